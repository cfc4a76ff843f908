//! Windowed Beurling densities against `μ_p` and the averaged kernel trace.

use serde::Serialize;

use crate::error::Result;
use crate::kernel::KernelEvaluator;
use crate::piecewise::BandwidthProfile;
use crate::quad::{GaussLegendre, PANEL_ORDER};
use crate::scalar::{lit, Scalar};
use crate::spectral::SpectralSet;

/// Sorted finite point set (duplicates allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    points: Vec<T>,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(mut points: Vec<T>) -> Self {
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        PointSet { points }
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest and largest point.
    pub fn support(&self) -> Option<(T, T)> {
        Some((*self.points.first()?, *self.points.last()?))
    }

    /// Number of points in the closed interval `[lo, hi]`.
    pub fn count_in(&self, lo: T, hi: T) -> usize {
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p <= hi);
        b - a
    }

    /// `max_x #(X ∩ [x, x+1])`, the relative separation count.
    pub fn rel(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.points.iter().enumerate() {
            let hi = self.points.partition_point(|&v| v <= p + T::one());
            best = best.max(hi - i);
        }
        best
    }

    /// Restrict to `[lo, hi]`.
    pub fn clipped(&self, lo: T, hi: T) -> PointSet<T> {
        PointSet {
            points: self
                .points
                .iter()
                .copied()
                .filter(|&p| p >= lo && p <= hi)
                .collect(),
        }
    }
}

/// Center-grid policy for the windowed densities.
#[derive(Debug, Clone, Copy)]
pub struct CentersSpec<T> {
    /// Grid spacing; `None` selects `min(0.1, r/100)` per radius.
    pub spacing: Option<T>,
}

impl<T> Default for CentersSpec<T> {
    fn default() -> Self {
        CentersSpec { spacing: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityRow<T> {
    pub r: T,
    pub lower: Option<T>,
    pub upper: Option<T>,
    pub centers: usize,
    /// Set when no center keeps `B_r(x)` inside the support.
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport<T> {
    pub rows: Vec<DensityRow<T>>,
    /// `|Λ^{1/2}|/π`.
    pub critical: T,
    pub rel: usize,
}

/// Windowed lower/upper Beurling ratios `#(X ∩ B_r(x)) / μ_p(B_r(x))` over
/// a center grid restricted so the ball stays inside the support of `X`.
///
/// A finite-data stand-in for the liminf/limsup densities: restricting the
/// centers avoids boundary depletion dragging the infimum to zero.
pub fn beurling_densities<T: Scalar>(
    profile: &BandwidthProfile<T>,
    sset: &SpectralSet<T>,
    set: &PointSet<T>,
    radii: &[T],
    centers: CentersSpec<T>,
) -> DensityReport<T> {
    let critical = sset.critical_density();
    let support = set.support();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let (lo, hi) = match support {
            Some((a, b)) if b - a >= lit::<T>(2.0) * r => (a + r, b - r),
            _ => {
                rows.push(DensityRow {
                    r,
                    lower: None,
                    upper: None,
                    centers: 0,
                    skipped: true,
                });
                continue;
            }
        };
        let spacing = centers
            .spacing
            .unwrap_or_else(|| lit::<T>(0.1).min(r / lit(100.0)));
        let mut lower = T::infinity();
        let mut upper = T::zero();
        let mut count = 0usize;
        let mut x = lo;
        loop {
            let ratio =
                lit::<T>(set.count_in(x - r, x + r) as f64) / profile.mu_ball(x, r);
            lower = lower.min(ratio);
            upper = upper.max(ratio);
            count += 1;
            if x >= hi {
                break;
            }
            x = (x + spacing).min(hi);
        }
        rows.push(DensityRow {
            r,
            lower: Some(lower),
            upper: Some(upper),
            centers: count,
            skipped: false,
        });
    }
    DensityReport {
        rows,
        critical,
        rel: set.rel(),
    }
}

/// `(1/μ_p(I)) ∫_I k(y,y) dy` by composite Gauss-Legendre panels aligned to
/// the knots, with widths resolving the `2 q_j u_max` oscillation of the
/// diagonal. `quad_points` is the evaluation budget per half-period;
/// doubling it halves the panel width.
pub fn averaged_trace<T: Scalar>(
    ev: &KernelEvaluator<T>,
    interval: (T, T),
    quad_points: usize,
) -> Result<T> {
    let (a, b) = interval;
    assert!(b > a, "empty trace interval");
    let profile = ev.profile();
    let u_max = ev.spectral_set().u_max();
    let rule = GaussLegendre::<T>::new(PANEL_ORDER);

    // split [a, b] at interior knots
    let mut cuts = vec![a];
    for &t in profile.knots() {
        if t > a && t < b {
            cuts.push(t);
        }
    }
    cuts.push(b);

    let panels_per_window = quad_points.div_ceil(PANEL_ORDER).max(1);
    let mut integral = T::zero();
    for piece in cuts.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        let qj = profile.q_at((lo + hi) * lit(0.5));
        let osc = lit::<T>(2.0) * qj * u_max;
        let half_period = if osc > T::zero() {
            T::PI() / osc
        } else {
            hi - lo
        };
        let width = (half_period / lit(panels_per_window as f64)).min(hi - lo);
        let count = ((hi - lo) / width).ceil().to_usize().unwrap_or(1).max(1);
        let step = (hi - lo) / lit(count as f64);
        for i in 0..count {
            let pa = lo + step * lit(i as f64);
            let pb = if i + 1 == count { hi } else { pa + step };
            let mut err = None;
            let v = rule.integrate(pa, pb, |y| {
                match ev.diagonal(y) {
                    Ok(d) => num_complex::Complex::new(d, T::zero()),
                    Err(e) => {
                        err = Some(e);
                        num_complex::Complex::new(T::zero(), T::zero())
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            integral = integral + v.re;
        }
    }
    Ok(integral / profile.mu(a, b))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceRow<T> {
    pub r: T,
    pub trace: T,
    pub error: T,
    /// `error · √μ_p([-r, r])`; bounded across radii when the trace
    /// converges at the square-root rate.
    pub bound_ratio: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport<T> {
    pub rows: Vec<TraceRow<T>>,
    pub critical: T,
    /// Spread of the `bound_ratio` column.
    pub ratio_spread: T,
}

/// Trace over `[-r, r]` for each radius, with the deviation from the
/// critical density and its square-root-rate normalization.
pub fn trace_convergence_report<T: Scalar>(
    ev: &KernelEvaluator<T>,
    radii: &[T],
    quad_points: usize,
) -> Result<TraceReport<T>> {
    let critical = ev.spectral_set().critical_density();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let trace = averaged_trace(ev, (-r, r), quad_points)?;
        let error = (trace - critical).abs();
        let mu = ev.profile().mu(-r, r);
        rows.push(TraceRow {
            r,
            trace,
            error,
            bound_ratio: error * mu.sqrt(),
        });
    }
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for row in &rows {
        lo = lo.min(row.bound_ratio);
        hi = hi.max(row.bound_ratio);
    }
    let ratio_spread = if lo > T::zero() { hi / lo } else { T::infinity() };
    Ok(TraceReport {
        rows,
        critical,
        ratio_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelMode;
    use crate::spectral::JMode;
    use crate::testing::{figure_profile, figure_spectrum};

    fn flat_kernel() -> KernelEvaluator<f64> {
        KernelEvaluator::new(BandwidthProfile::constant(1.0).unwrap(), figure_spectrum()).unwrap()
    }

    #[test]
    fn rel_counts_unit_window_occupancy() {
        let x = PointSet::new(vec![0.0, 0.3, 0.9, 1.0, 5.0]);
        assert_eq!(x.rel(), 4);
        assert_eq!(PointSet::<f64>::new(vec![]).rel(), 0);
    }

    #[test]
    fn count_in_is_closed_on_both_ends() {
        let x = PointSet::new(vec![0.0, 1.0, 2.0]);
        assert_eq!(x.count_in(0.0, 2.0), 3);
        assert_eq!(x.count_in(0.5, 1.5), 1);
        assert_eq!(x.count_in(1.0, 1.0), 1);
    }

    #[test]
    fn integer_lattice_density_is_one() {
        let profile = BandwidthProfile::constant(1.0).unwrap();
        let sset = figure_spectrum();
        let pts: Vec<f64> = (-100..=100).map(|i| i as f64).collect();
        let x = PointSet::new(pts);
        let report = beurling_densities(&profile, &sset, &x, &[10.0], CentersSpec::default());
        let row = &report.rows[0];
        assert!(!row.skipped);
        let lower = row.lower.unwrap();
        let upper = row.upper.unwrap();
        assert!(lower >= 0.95, "lower {lower}");
        assert!(upper <= 1.05 + 1e-12, "upper {upper}");
        assert!((report.critical - 1.0).abs() < 1e-12);
        assert_eq!(report.rel, 2);
    }

    #[test]
    fn mu_uniform_set_matches_gap_density() {
        let profile = figure_profile();
        let sset = figure_spectrum();
        let delta = 0.4;
        let mut pts = vec![-30.0f64];
        while *pts.last().unwrap() < 30.0 {
            let next = profile.advance_mu(*pts.last().unwrap(), delta);
            pts.push(next);
        }
        let x = PointSet::new(pts);
        let report = beurling_densities(&profile, &sset, &x, &[8.0, 15.0], CentersSpec::default());
        for row in &report.rows {
            let lower = row.lower.unwrap();
            let upper = row.upper.unwrap();
            let want = 1.0 / delta;
            assert!((lower - want).abs() / want < 0.1, "lower {lower} vs {want}");
            assert!((upper - want).abs() / want < 0.1, "upper {upper} vs {want}");
        }
    }

    #[test]
    fn window_counts_monotone_in_radius() {
        let x = PointSet::new(vec![-3.0, -0.5, 0.1, 0.2, 4.0, 9.0]);
        for &center in &[-1.0, 0.15, 3.0] {
            let mut prev = 0;
            for ir in 1..=20 {
                let r = 0.5 * ir as f64;
                let count = x.count_in(center - r, center + r);
                assert!(count >= prev);
                prev = count;
            }
        }
    }

    #[test]
    fn gap_in_the_set_pulls_lower_to_zero() {
        let profile = BandwidthProfile::constant(1.0).unwrap();
        let sset = figure_spectrum();
        let mut pts: Vec<f64> = (-60..=-10).map(|i| i as f64).collect();
        pts.extend((10..=60).map(|i| i as f64));
        let x = PointSet::new(pts);
        let report = beurling_densities(&profile, &sset, &x, &[4.0], CentersSpec::default());
        assert_eq!(report.rows[0].lower, Some(0.0));
    }

    #[test]
    fn oversized_radius_is_skipped() {
        let profile = BandwidthProfile::constant(1.0).unwrap();
        let sset = figure_spectrum();
        let x = PointSet::new(vec![0.0, 1.0, 2.0]);
        let report = beurling_densities(&profile, &sset, &x, &[5.0], CentersSpec::default());
        assert!(report.rows[0].skipped);
        assert_eq!(report.rows[0].centers, 0);
    }

    #[test]
    fn flat_trace_is_exactly_critical() {
        let ev = flat_kernel();
        let t = averaged_trace(&ev, (-7.0, 9.0), 30).unwrap();
        assert!((t - 1.0).abs() < 1e-10);
        let report = trace_convergence_report(&ev, &[5.0, 10.0], 30).unwrap();
        for row in report.rows {
            assert!(row.error < 1e-10);
        }
    }

    #[test]
    fn trace_is_mu_weighted_average_of_pieces() {
        let ev = KernelEvaluator::new(figure_profile(), figure_spectrum()).unwrap();
        let (a, m, b) = (-6.0, 1.5, 8.0);
        let whole = averaged_trace(&ev, (a, b), 30).unwrap();
        let left = averaged_trace(&ev, (a, m), 30).unwrap();
        let right = averaged_trace(&ev, (m, b), 30).unwrap();
        let p = ev.profile();
        let recombined = (left * p.mu(a, m) + right * p.mu(m, b)) / p.mu(a, b);
        assert!((whole - recombined).abs() < 1e-9);
    }

    #[test]
    fn trace_lies_between_diagonal_extremes() {
        let ev = KernelEvaluator::new(figure_profile(), figure_spectrum()).unwrap();
        let (a, b) = (-9.0, 9.0);
        let trace = averaged_trace(&ev, (a, b), 30).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut y = a;
        while y <= b {
            let d = ev.diagonal(y).unwrap();
            lo = lo.min(d);
            hi = hi.max(d);
            y += 0.05;
        }
        // ∫ k(y,y) dy / μ_p(I) is a |I|/μ_p(I)-weighted mean of the diagonal
        let weight = (b - a) / ev.profile().mu(a, b);
        assert!(trace >= lo * weight - 1e-9);
        assert!(trace <= hi * weight + 1e-9);
    }

    #[test]
    fn trace_stable_under_refinement() {
        let ev = KernelEvaluator::new(figure_profile(), figure_spectrum()).unwrap();
        let coarse = averaged_trace(&ev, (-10.0, 10.0), 30).unwrap();
        let fine = averaged_trace(&ev, (-10.0, 10.0), 60).unwrap();
        assert!((coarse - fine).abs() <= 1e-9 * coarse.abs());
    }

    #[test]
    fn one_jump_trace_against_elementary_diagonal() {
        // for a single jump κ is flat and the diagonal has an elementary
        // sinc form; integrate it with the same panels as an oracle
        let profile = BandwidthProfile::new(vec![0.5], vec![1.0, 2.25]).unwrap();
        let sset = figure_spectrum();
        let ev = KernelEvaluator::with_modes(
            profile.clone(),
            sset,
            Some(KernelMode::Generic),
            Some(JMode::Series),
        )
        .unwrap();
        let w = std::f64::consts::PI;
        let t1 = 0.5;
        let q = [1.0, 1.0 / 1.5];
        let rho = [
            (q[1] - q[0]) / (q[1] + q[0]),
            (q[0] - q[1]) / (q[0] + q[1]),
        ];
        let diag_oracle = |y: f64| -> f64 {
            let j = if y <= t1 { 0 } else { 1 };
            let qj = q[j];
            qj * w / std::f64::consts::PI
                * (1.0 + rho[j] * crate::scalar::sinc(2.0 * qj * w * (t1 - y)))
        };
        for &y in &[-3.2, 0.1, 0.5, 2.0, 7.7] {
            assert!(
                (ev.diagonal(y).unwrap() - diag_oracle(y)).abs() < 1e-10,
                "y={y}"
            );
        }
        let report = trace_convergence_report(&ev, &[5.0, 10.0, 20.0], 30).unwrap();
        assert!(report.rows.iter().all(|r| r.error < 1e-3), "{report:?}");
        assert!(
            report.rows.last().unwrap().error <= report.rows[0].error,
            "{report:?}"
        );
    }
}
