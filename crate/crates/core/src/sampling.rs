//! Finite-window Gram-matrix probes of the stable-sampling and
//! interpolation inequalities.
//!
//! The model subspace is spanned by kernel sections on a dense μ_p-uniform
//! reference grid; frame bounds of a probe set are generalized Rayleigh
//! quotients against the Gram of that grid. These are finite-scale,
//! empirical quantities: they track the asymptotic story but certify
//! nothing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::PointSet;
use crate::error::{Error, Result};
use crate::kernel::KernelEvaluator;
use crate::linalg::{symmetric_eigen, SymMatrix};
use crate::piecewise::BandwidthProfile;
use crate::scalar::{lit, Scalar};

/// Relative spectral floor below which Gram directions are discarded.
const GRAM_THRESHOLD: f64 = 1e-10;

/// Relative windowed-mass floor for the second cut. Directions carrying
/// less in-window mass than this live in an edge sliver that no probe set
/// inside the window can assess; keeping them only injects noise into the
/// extreme quotients.
const MASS_THRESHOLD: f64 = 1e-4;

/// Reference-grid policy.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec<T> {
    pub window: (T, T),
    /// Grid spacing is `π/(|Λ^{1/2}|·oversample)` in μ_p measure.
    pub oversample: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(window: (T, T)) -> Self {
        GridSpec {
            window,
            oversample: lit(8.0),
        }
    }
}

/// μ_p-uniform reference grid for a window.
pub fn reference_grid<T: Scalar>(
    profile: &BandwidthProfile<T>,
    sqrt_measure: T,
    spec: &GridSpec<T>,
) -> Vec<T> {
    let spacing = T::PI() / (sqrt_measure * spec.oversample);
    let mut pts = vec![spec.window.0];
    loop {
        let next = profile.advance_mu(*pts.last().expect("nonempty"), spacing);
        if next > spec.window.1 {
            break;
        }
        pts.push(next);
    }
    pts
}

/// Kernel Gram matrix of a point list, rows assembled in parallel.
pub fn kernel_gram<T: Scalar>(ev: &KernelEvaluator<T>, pts: &[T]) -> Result<SymMatrix<T>> {
    let n = pts.len();
    let rows: Vec<Result<Vec<T>>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| ev.eval(pts[i], pts[j])).collect())
        .collect();
    let mut m = SymMatrix::zeros(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Reference grid with its Gram matrix.
#[derive(Debug, Clone)]
pub struct GramSystem<T> {
    pub grid: Vec<T>,
    pub gram: SymMatrix<T>,
}

impl<T: Scalar> GramSystem<T> {
    pub fn build(ev: &KernelEvaluator<T>, spec: &GridSpec<T>) -> Result<Self> {
        let grid = reference_grid(ev.profile(), ev.spectral_set().sqrt_measure(), spec);
        if grid.is_empty() {
            return Err(Error::RankDeficient);
        }
        let gram = kernel_gram(ev, &grid)?;
        Ok(GramSystem { grid, gram })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameBounds<T> {
    pub a_hat: T,
    pub b_hat: T,
    /// Dimensions of the retained Gram subspace.
    pub retained: usize,
    pub grid_size: usize,
}

/// Empirical frame bounds of `X` against the grid-spanned subspace:
/// extreme Rayleigh quotients of `Σ_{x∈X} |f(x)|²` against the windowed
/// norm `‖f‖²_W` for `f = Σ c_i k(·, y_i)`, taken over the retained
/// spectral subspace of the grid Gram. At density `d` relative to `μ_p`, a
/// well-sampling set scores `A ≈ d·π/|Λ^{1/2}|` in units of the grid
/// quadrature.
pub fn empirical_frame_bounds<T: Scalar>(
    ev: &KernelEvaluator<T>,
    set: &PointSet<T>,
    spec: &GridSpec<T>,
) -> Result<FrameBounds<T>> {
    let system = GramSystem::build(ev, spec)?;
    let x = set.clipped(spec.window.0, spec.window.1);
    frame_bounds_from_system(ev, &system, &x)
}

fn frame_bounds_from_system<T: Scalar>(
    ev: &KernelEvaluator<T>,
    system: &GramSystem<T>,
    x: &PointSet<T>,
) -> Result<FrameBounds<T>> {
    let n = system.grid.len();
    let eig = symmetric_eigen(&system.gram)?;
    let lambda_max = eig.lambda_max();
    let floor = lit::<T>(GRAM_THRESHOLD) * lambda_max;
    let kept: Vec<usize> = (0..n).filter(|&i| eig.values[i] > floor).collect();
    if kept.is_empty() {
        return Err(Error::RankDeficient);
    }
    let r = kept.len();

    // Kernel sections carry mass outside any finite window, so the plain
    // Gram norm lets escaping modes drive every lower quotient to zero.
    // The denominator is therefore the windowed L² norm, approximated by
    // grid quadrature: ‖f‖²_W ≈ Σ_i |f(y_i)|² Δ_i.
    let cell: Vec<T> = (0..n)
        .map(|i| {
            let left = if i == 0 { system.grid[0] } else { system.grid[i - 1] };
            let right = if i + 1 == n {
                system.grid[n - 1]
            } else {
                system.grid[i + 1]
            };
            (right - left) * lit(0.5)
        })
        .collect();

    // in the retained basis P = V_r: f(y_j) for c = v_i is λ_i v_i[j]
    let mut numer = SymMatrix::zeros(r); // (K P)ᵀ (K P)
    let mut denom = SymMatrix::zeros(r); // Pᵀ G D G P

    let m = x.len();
    let k_rows: Vec<Result<Vec<T>>> = x
        .points()
        .par_iter()
        .map(|&px| system.grid.iter().map(|&gy| ev.eval(px, gy)).collect())
        .collect();
    let mut b = vec![T::zero(); m * r];
    for (i, row) in k_rows.into_iter().enumerate() {
        let row = row?;
        for (col, &idx) in kept.iter().enumerate() {
            let mut acc = T::zero();
            for (jj, v) in eig.vector(idx).enumerate() {
                acc = acc + row[jj] * v;
            }
            b[i * r + col] = acc;
        }
    }
    for p in 0..r {
        for q in 0..=p {
            let mut acc = T::zero();
            for i in 0..m {
                acc = acc + b[i * r + p] * b[i * r + q];
            }
            numer.set(p, q, acc);
        }
    }
    for p in 0..r {
        for q in 0..=p {
            let mut acc = T::zero();
            for (jj, (vp, vq)) in eig.vector(kept[p]).zip(eig.vector(kept[q])).enumerate() {
                acc = acc + vp * vq * cell[jj];
            }
            denom.set(p, q, acc * eig.values[kept[p]] * eig.values[kept[q]]);
        }
    }

    // discard directions with negligible in-window mass: samples inside the
    // window cannot assess them
    let den_eig = symmetric_eigen(&denom)?;
    let den_floor = lit::<T>(MASS_THRESHOLD) * den_eig.lambda_max();
    let den_kept: Vec<usize> = (0..r).filter(|&i| den_eig.values[i] > den_floor).collect();
    if den_kept.is_empty() {
        return Err(Error::RankDeficient);
    }
    let rr = den_kept.len();
    // whitening T of the denominator, then Tᵀ numer T
    let mut t = vec![T::zero(); r * rr];
    for (p, &idx) in den_kept.iter().enumerate() {
        let scale = T::one() / den_eig.values[idx].sqrt();
        for (a, v) in den_eig.vector(idx).enumerate() {
            t[a * rr + p] = v * scale;
        }
    }
    let mut nt = vec![T::zero(); r * rr];
    for a in 0..r {
        for p in 0..rr {
            let mut acc = T::zero();
            for bidx in 0..r {
                acc = acc + numer.get(a, bidx) * t[bidx * rr + p];
            }
            nt[a * rr + p] = acc;
        }
    }
    let mut reduced = SymMatrix::zeros(rr);
    for p in 0..rr {
        for q in 0..=p {
            let mut acc = T::zero();
            for a in 0..r {
                acc = acc + t[a * rr + p] * nt[a * rr + q];
            }
            reduced.set(p, q, acc);
        }
    }
    let eig2 = symmetric_eigen(&reduced)?;
    Ok(FrameBounds {
        a_hat: eig2.lambda_min().max(T::zero()),
        b_hat: eig2.lambda_max(),
        retained: rr,
        grid_size: n,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InterpolationReport<T> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub cond: T,
}

/// Eigenvalue extremes of the Gram of `X` itself; a floor on `lambda_min`
/// is the finite-scale proxy for a Riesz (interpolating) family.
pub fn interpolation_conditioning<T: Scalar>(
    ev: &KernelEvaluator<T>,
    set: &PointSet<T>,
) -> Result<InterpolationReport<T>> {
    let pts = set.points();
    for i in 1..pts.len() {
        if pts[i] == pts[i - 1] {
            return Err(Error::DuplicatePoints(i - 1, i));
        }
    }
    if pts.is_empty() {
        return Err(Error::RankDeficient);
    }
    let gram = kernel_gram(ev, pts)?;
    let eig = symmetric_eigen(&gram)?;
    let lambda_min = eig.lambda_min();
    let lambda_max = eig.lambda_max();
    let cond = if lambda_min > T::zero() {
        lambda_max / lambda_min
    } else {
        T::infinity()
    };
    Ok(InterpolationReport {
        lambda_min,
        lambda_max,
        cond,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow<T> {
    pub factor: T,
    pub window: T,
    pub trial: usize,
    pub a_hat: T,
    pub b_hat: T,
    pub lambda_min: T,
    pub seed: u64,
}

/// μ_p-uniform points at `factor × critical` density across the window,
/// with seeded jitter of a fifth of the gap.
pub fn jittered_uniform_set<T: Scalar>(
    profile: &BandwidthProfile<T>,
    sqrt_measure: T,
    window: (T, T),
    factor: T,
    rng: &mut impl Rng,
) -> PointSet<T> {
    let gap = T::PI() / (factor * sqrt_measure);
    let mut pts = Vec::new();
    let mut index = 0usize;
    loop {
        let jitter = lit::<T>(rng.gen_range(-0.2..0.2));
        let mu_pos = gap * (lit::<T>(index as f64) + jitter);
        let x = profile.advance_mu(window.0, mu_pos.max(T::zero()));
        if x > window.1 {
            break;
        }
        pts.push(x);
        index += 1;
    }
    PointSet::new(pts)
}

/// Frame and interpolation probes for each `(factor, window, trial)`.
/// Deterministic for a fixed master seed.
pub fn density_sweep<T: Scalar>(
    ev: &KernelEvaluator<T>,
    factors: &[T],
    half_windows: &[T],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow<T>>> {
    let profile = ev.profile().clone();
    let sqrt_measure = ev.spectral_set().sqrt_measure();
    let mut rows = Vec::new();
    for (fi, &factor) in factors.iter().enumerate() {
        for (wi, &half) in half_windows.iter().enumerate() {
            let window = (-half, half);
            let spec = GridSpec::new(window);
            let system = GramSystem::build(ev, &spec)?;
            for trial in 0..trials.max(1) {
                let stream = seed
                    ^ ((fi as u64) << 48)
                    ^ ((wi as u64) << 32)
                    ^ (trial as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(stream);
                let x = jittered_uniform_set(&profile, sqrt_measure, window, factor, &mut rng);
                let fb = frame_bounds_from_system(ev, &system, &x)?;
                let ic = interpolation_conditioning(ev, &x)?;
                rows.push(SweepRow {
                    factor,
                    window: half,
                    trial,
                    a_hat: fb.a_hat,
                    b_hat: fb.b_hat,
                    lambda_min: ic.lambda_min,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}
