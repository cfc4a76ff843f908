//! Reproducing kernel evaluation.
//!
//! Generic route: on each block `I_j × I_l` the integrand factors into
//! finitely many exponentials with affine phases `c + (±q_j)x + (±q_l)y`,
//! so `k(x,y) = Σ α J(β(x,y))` with coefficients constant per block. The
//! decomposition is cached once per block and reused for every point.
//!
//! Closed route: for two symmetric jumps and `Λ = [0, Ω]` the nine blocks
//! have explicit sinc/`J_r` expressions, transcribed term by term.

use num_complex::Complex;
use rayon::prelude::*;

use crate::appoly::APPoly;
use crate::error::{Error, Result};
use crate::kernel_blocks::closed_block;
use crate::piecewise::BandwidthProfile;
use crate::scalar::{lit, sinc, tol, Scalar};
use crate::spectral::{kappa_of, JEvaluator, JMode, SpectralSet};
use crate::transfer::{connection_table, ConnectionTable};

/// Which kernel route `eval` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Generic,
    ClosedFormN2,
}

/// One exponential of the block decomposition:
/// `alpha · e^{i(offset + x_coef·x + y_coef·y)u}` with `x_coef = ±q_j`,
/// `y_coef = ±q_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTerm<T> {
    pub alpha: T,
    pub offset: T,
    pub x_coef: T,
    pub y_coef: T,
}

/// Exponential-sum form of `ϑ(u, x, y)` on a fixed block `I_j × I_l`.
#[derive(Debug, Clone)]
pub struct ThetaDecomposition<T> {
    pub j: usize,
    pub l: usize,
    pub terms: Vec<ThetaTerm<T>>,
}

impl<T: Scalar> ThetaDecomposition<T> {
    /// Evaluate the represented `ϑ(u, x, y)`.
    pub fn eval(&self, u: T, x: T, y: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            let phase = (t.offset + t.x_coef * x + t.y_coef * y) * u;
            acc = acc + Complex::cis(phase) * t.alpha;
        }
        acc
    }
}

/// Expand `ϑ` on `I_j × I_l` from the local exponential forms of `Φ^±`.
pub fn theta_decompose<T: Scalar>(
    profile: &BandwidthProfile<T>,
    table: &ConnectionTable<T>,
    j: usize,
    l: usize,
) -> Result<ThetaDecomposition<T>> {
    let n = profile.num_jumps();
    if j > n || l > n {
        return Err(Error::IndexOutOfRange {
            index: j.max(l),
            expected: format!("0..={n}"),
        });
    }
    let q = profile.q();
    let inv_q0 = Complex::new(T::one() / profile.q_first(), T::zero());
    let inv_qn = Complex::new(T::one() / profile.q_last(), T::zero());

    // coefficient of e^{±iq_j u x} in conj Φ^±(x) and of e^{±iq_l u y} in Φ^±(y)
    let x_plus = [table.bplus[j].conj(), table.aplus[j].conj()];
    let y_plus = [table.aplus[l].clone(), table.bplus[l].clone()];
    let x_minus = [table.bminus[j].conj(), table.aminus[j].conj()];
    let y_minus = [table.aminus[l].clone(), table.bminus[l].clone()];

    let signs = [T::one(), -T::one()];
    let mut polys: Vec<(T, T, APPoly<T>)> = Vec::with_capacity(4);
    let mut scale = T::zero();
    for sx in 0..2 {
        for sy in 0..2 {
            let p = x_plus[sx]
                .mul(&y_plus[sy])
                .scale(inv_q0)
                .add(&x_minus[sx].mul(&y_minus[sy]).scale(inv_qn));
            scale = scale.max(p.max_coeff());
            polys.push((signs[sx] * q[j], signs[sy] * q[l], p));
        }
    }

    let floor = lit::<T>(1e-13) * scale;
    let imag_tol = tol::<T>(1e-9, 64.0) * scale.max(T::one());
    let mut terms = Vec::new();
    for (xc, yc, poly) in polys {
        for t in poly.terms() {
            if t.coeff.norm() <= floor {
                continue;
            }
            if t.coeff.im.abs() > imag_tol {
                return Err(Error::InternalConsistency(format!(
                    "theta coefficient at offset {} has imaginary part {}",
                    t.freq, t.coeff.im
                )));
            }
            terms.push(ThetaTerm {
                alpha: t.coeff.re,
                offset: t.freq,
                x_coef: xc,
                y_coef: yc,
            });
        }
    }
    Ok(ThetaDecomposition { j, l, terms })
}

/// Evaluator bundling profile, spectrum, `κ`, block decompositions and the
/// `J` machinery. Immutable after construction; grid jobs parallelize.
#[derive(Debug, Clone)]
pub struct KernelEvaluator<T> {
    profile: BandwidthProfile<T>,
    table: ConnectionTable<T>,
    sset: SpectralSet<T>,
    jev: JEvaluator<T>,
    theta: Vec<ThetaDecomposition<T>>,
    diag_const: Vec<T>,
    diag_h2: Vec<APPoly<T>>,
    mode: KernelMode,
}

/// Absolute cap on the imaginary residue tolerated in an assembled value.
const IMAG_TOL: f64 = 1e-9;

impl<T: Scalar> KernelEvaluator<T> {
    pub fn new(profile: BandwidthProfile<T>, sset: SpectralSet<T>) -> Result<Self> {
        Self::with_modes(profile, sset, None, None)
    }

    /// Build with explicit route choices; `None` auto-selects (closed form
    /// whenever the shape admits it, series `J` whenever available).
    pub fn with_modes(
        profile: BandwidthProfile<T>,
        sset: SpectralSet<T>,
        kernel_mode: Option<KernelMode>,
        j_mode: Option<JMode>,
    ) -> Result<Self> {
        let table = connection_table(&profile);
        let kappa = kappa_of(&profile, &table)?;
        let jev = match j_mode {
            None => JEvaluator::new(&profile, kappa, sset.clone())?,
            Some(m) => JEvaluator::with_mode(&profile, kappa, sset.clone(), m)?,
        };

        let n = profile.num_jumps();
        let mut theta = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for l in 0..=n {
                theta.push(theta_decompose(&profile, &table, j, l)?);
            }
        }

        let q0 = profile.q_first();
        let qn = profile.q_last();
        let mut diag_const = Vec::with_capacity(n + 1);
        let mut diag_h2 = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let h1 = table.aplus[j]
                .modulus_squared()
                .scale_re(T::one() / q0)
                .add(&table.aminus[j].modulus_squared().scale_re(T::one() / qn));
            let h2 = table.aplus[j]
                .conj()
                .mul(&table.bplus[j])
                .scale_re(T::one() / q0)
                .add(
                    &table.aminus[j]
                        .conj()
                        .mul(&table.bminus[j])
                        .scale_re(T::one() / qn),
                );
            diag_const.push(lit::<T>(2.0) * jev.weighted(&h1, T::zero())?.re);
            diag_h2.push(h2);
        }

        let closed_ok = closed_form_available(&profile, &sset);
        let mode = match kernel_mode {
            Some(KernelMode::ClosedFormN2) if !closed_ok => {
                return Err(Error::ShapeMismatch(
                    "closed form needs two jumps at ±T/2 and Λ = [0, Ω]".into(),
                ))
            }
            Some(m) => m,
            None => {
                if closed_ok {
                    KernelMode::ClosedFormN2
                } else {
                    KernelMode::Generic
                }
            }
        };

        Ok(KernelEvaluator {
            profile,
            table,
            sset,
            jev,
            theta,
            diag_const,
            diag_h2,
            mode,
        })
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn profile(&self) -> &BandwidthProfile<T> {
        &self.profile
    }

    pub fn spectral_set(&self) -> &SpectralSet<T> {
        &self.sset
    }

    pub fn j_evaluator(&self) -> &JEvaluator<T> {
        &self.jev
    }

    pub fn table(&self) -> &ConnectionTable<T> {
        &self.table
    }

    pub fn theta(&self, j: usize, l: usize) -> &ThetaDecomposition<T> {
        let n = self.profile.num_jumps();
        &self.theta[j * (n + 1) + l]
    }

    /// `k_Λ(x, y)` by the active route.
    pub fn eval(&self, x: T, y: T) -> Result<T> {
        match self.mode {
            KernelMode::Generic => self.eval_generic(x, y),
            KernelMode::ClosedFormN2 => self.eval_closed_n2(x, y),
        }
    }

    /// Generic route: `Σ α J(β)` over the cached block decomposition. In
    /// quadrature mode the sum is taken under the integral sign (one
    /// adaptive pass per point instead of one per term), which also shares
    /// the κ evaluations across terms.
    pub fn eval_generic(&self, x: T, y: T) -> Result<T> {
        let j = self.profile.interval_index(x);
        let l = self.profile.interval_index(y);
        let th = self.theta(j, l);
        let acc = match self.jev.mode() {
            JMode::Series => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for t in &th.terms {
                    let beta = t.offset + t.x_coef * x + t.y_coef * y;
                    acc = acc + self.jev.j(beta)? * t.alpha;
                }
                acc
            }
            JMode::Quadrature => {
                let max_beta = th
                    .terms
                    .iter()
                    .map(|t| (t.offset + t.x_coef * x + t.y_coef * y).abs())
                    .fold(T::zero(), T::max);
                self.jev
                    .integrate_over_kappa(max_beta, |u| th.eval(u, x, y))?
            }
        };
        if acc.im.abs() > tol(IMAG_TOL, 512.0) {
            return Err(Error::ExcessImaginary(acc.im.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(acc.re)
    }

    /// Closed nine-block formula for two symmetric jumps and `Λ = [0, Ω]`.
    pub fn eval_closed_n2(&self, x: T, y: T) -> Result<T> {
        if !closed_form_available(&self.profile, &self.sset) {
            return Err(Error::ShapeMismatch(
                "closed form needs two jumps at ±T/2 and Λ = [0, Ω]".into(),
            ));
        }
        let q = self.profile.q();
        let t_len = self.profile.knots()[1] - self.profile.knots()[0];
        let w = self.sset.u_max();
        let j = self.profile.interval_index(x);
        let l = self.profile.interval_index(y);
        closed_block(
            &|s| self.jev.jr(s),
            [q[0], q[1], q[2]],
            t_len,
            w,
            j,
            l,
            x,
            y,
        )
    }

    /// Diagonal `k_Λ(y, y)` through the per-interval split into a constant
    /// part and an oscillatory Fourier-type part.
    pub fn diagonal(&self, y: T) -> Result<T> {
        let j = self.profile.interval_index(y);
        let qj = self.profile.q()[j];
        let s = -(lit::<T>(2.0) * qj * y);
        let osc = self.jev.weighted(&self.diag_h2[j], s)?;
        Ok(self.diag_const[j] + lit::<T>(2.0) * osc.re)
    }

    /// Row-major kernel values on `xs × ys`, evaluated in parallel.
    pub fn grid(&self, xs: &[T], ys: &[T]) -> Result<Vec<T>> {
        let rows: Vec<Result<Vec<T>>> = xs
            .par_iter()
            .map(|&x| ys.iter().map(|&y| self.eval(x, y)).collect())
            .collect();
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for r in rows {
            out.extend(r?);
        }
        Ok(out)
    }

    /// Sup of `|k(x,y)|·(1 + |x-y|)` over a square grid, with per-ring sups
    /// for trend inspection.
    pub fn decay_fit(&self, radius: T, step: T) -> Result<DecayReport<T>> {
        let mut pts = Vec::new();
        let mut v = -radius;
        while v <= radius + step * lit(0.5) {
            pts.push(v);
            v = v + step;
        }
        let values = self.grid(&pts, &pts)?;
        let bins = 8usize;
        let mut ring_sup = vec![T::zero(); bins];
        let mut c_decay = T::zero();
        for (i, &x) in pts.iter().enumerate() {
            for (jj, &y) in pts.iter().enumerate() {
                let k = values[i * pts.len() + jj];
                let dist = (x - y).abs();
                let weighted = k.abs() * (T::one() + dist);
                c_decay = c_decay.max(weighted);
                let bin_t = dist / (lit::<T>(2.0) * radius) * lit(bins as f64);
                let bin = bin_t.to_usize().unwrap_or(0).min(bins - 1);
                ring_sup[bin] = ring_sup[bin].max(weighted);
            }
        }
        let rings: Vec<(T, T)> = ring_sup
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                (
                    lit::<T>(2.0) * radius * lit((i + 1) as f64) / lit(bins as f64),
                    s,
                )
            })
            .collect();
        let inner = rings[..bins / 2]
            .iter()
            .map(|&(_, s)| s)
            .fold(T::zero(), T::max);
        let outer = rings[bins / 2..]
            .iter()
            .map(|&(_, s)| s)
            .fold(T::zero(), T::max);
        Ok(DecayReport {
            c_decay,
            growth_flag: outer > inner * lit(1.1),
            rings,
            grid_points: pts.len() * pts.len(),
        })
    }

    /// Classical flat-profile kernel, for reference in tests and reports.
    pub fn classical_sinc(w: T, x: T, y: T) -> T {
        w / T::PI() * sinc(w * (x - y))
    }
}

/// Whether the closed nine-block formula applies.
pub fn closed_form_available<T: Scalar>(
    profile: &BandwidthProfile<T>,
    sset: &SpectralSet<T>,
) -> bool {
    if profile.num_jumps() != 2 || sset.single_from_zero().is_none() {
        return false;
    }
    let k = profile.knots();
    (k[0] + k[1]).abs() <= lit::<T>(1e-12) * (T::one() + k[0].abs() + k[1].abs())
}

/// Decay-probe summary.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecayReport<T> {
    /// `sup |k|·(1+|x-y|)` over the grid.
    pub c_decay: T,
    /// Whether the weighted sup grows toward large `|x-y|`, which would
    /// contradict the expected `1/(1+|x-y|)` envelope.
    pub growth_flag: bool,
    /// `(outer |x-y| of ring, sup of the weighted kernel in the ring)`.
    pub rings: Vec<(T, T)>,
    pub grid_points: usize,
}
