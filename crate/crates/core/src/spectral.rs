//! Spectral density `κ`, the 2×2 spectral measure, and the oscillatory
//! integral `J` in its quadrature and series forms.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::appoly::{APPoly, CosineView};
use crate::error::{Error, Result};
use crate::piecewise::BandwidthProfile;
use crate::quad::{adaptive, GaussLegendre, PANEL_ORDER};
use crate::scalar::{lit, sinc, tol, Scalar};
use crate::transfer::ConnectionTable;

/// Absolute error target for every adaptive `J` integral.
pub const J_QUAD_TARGET: f64 = 1e-10;

/// Finite union of disjoint bounded intervals `Λ ⊂ [0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "SpectrumData<T>",
    into = "SpectrumData<T>",
    bound = "T: Scalar + Serialize + serde::de::DeserializeOwned"
)]
pub struct SpectralSet<T> {
    intervals: Vec<(T, T)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpectrumData<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Scalar> TryFrom<SpectrumData<T>> for SpectralSet<T> {
    type Error = Error;
    fn try_from(d: SpectrumData<T>) -> Result<Self> {
        SpectralSet::new(d.intervals)
    }
}

impl<T: Scalar> From<SpectralSet<T>> for SpectrumData<T> {
    fn from(s: SpectralSet<T>) -> Self {
        SpectrumData {
            intervals: s.intervals,
        }
    }
}

impl<T: Scalar> SpectralSet<T> {
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidSpectrum("no intervals given".into()));
        }
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidSpectrum(format!("interval {i} not finite")));
            }
            if a < T::zero() || b <= a {
                return Err(Error::InvalidSpectrum(format!(
                    "interval {i} must satisfy 0 <= a < b"
                )));
            }
        }
        for w in intervals.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::InvalidSpectrum(
                    "intervals must be sorted and disjoint".into(),
                ));
            }
        }
        Ok(SpectralSet { intervals })
    }

    /// The single interval `[0, Ω]`.
    pub fn up_to(omega: T) -> Result<Self> {
        Self::new(vec![(T::zero(), omega)])
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    /// Square-root image `Λ^{1/2} = {u ≥ 0 : u² ∈ Λ}` as intervals.
    pub fn sqrt_intervals(&self) -> Vec<(T, T)> {
        self.intervals
            .iter()
            .map(|&(a, b)| (a.sqrt(), b.sqrt()))
            .collect()
    }

    /// `|Λ^{1/2}| = Σ (√b_i − √a_i)`.
    pub fn sqrt_measure(&self) -> T {
        self.intervals
            .iter()
            .fold(T::zero(), |acc, &(a, b)| acc + b.sqrt() - a.sqrt())
    }

    pub fn measure(&self) -> T {
        self.intervals
            .iter()
            .fold(T::zero(), |acc, &(a, b)| acc + b - a)
    }

    /// Top of the square-root image.
    pub fn u_max(&self) -> T {
        self.intervals.last().expect("nonempty").1.sqrt()
    }

    /// `Ω` when the set is the single interval `[0, Ω]`.
    pub fn single_from_zero(&self) -> Option<T> {
        if self.intervals.len() == 1 && self.intervals[0].0.abs() <= lit(1e-12) {
            Some(self.intervals[0].1)
        } else {
            None
        }
    }

    /// `|Λ^{1/2}|/π`, the critical sampling density.
    pub fn critical_density(&self) -> T {
        self.sqrt_measure() / T::PI()
    }
}

/// Scalar spectral density `κ(u) = |a_0^+(u²)|²/q_0²`, kept both as an
/// almost periodic polynomial and in the cosine basis.
#[derive(Debug, Clone)]
pub struct Kappa<T> {
    poly: APPoly<T>,
    cosine: CosineView<T>,
    lower_bound: T,
}

impl<T: Scalar> Kappa<T> {
    pub fn poly(&self) -> &APPoly<T> {
        &self.poly
    }

    pub fn cosine_view(&self) -> &CosineView<T> {
        &self.cosine
    }

    /// `1/(q_0 q_n)`.
    pub fn lower_bound(&self) -> T {
        self.lower_bound
    }

    /// Fast real evaluation through the cosine view.
    pub fn eval(&self, u: T) -> T {
        self.cosine.eval(u)
    }

    pub fn max_freq(&self) -> T {
        self.poly.max_freq()
    }
}

/// Build `κ` from the connection table and check it against its second
/// expression `|b_n^-(u²)|²/q_n²` on a grid.
pub fn kappa_of<T: Scalar>(
    profile: &BandwidthProfile<T>,
    table: &ConnectionTable<T>,
) -> Result<Kappa<T>> {
    let q0 = profile.q_first();
    let qn = profile.q_last();
    let a_form = table.aplus[0]
        .modulus_squared()
        .scale_re(T::one() / (q0 * q0));
    let b_form = table.bminus[profile.num_jumps()]
        .modulus_squared()
        .scale_re(T::one() / (qn * qn));

    let scale = a_form.max_coeff().max(T::one());
    for i in 1..=64 {
        let u = lit::<T>(20.0 / 64.0) * lit(i as f64);
        let da = (a_form.eval(u) - b_form.eval(u)).norm();
        if da > tol::<T>(1e-11, 64.0) * scale {
            return Err(Error::InternalConsistency(format!(
                "kappa expressions disagree at u={u}: {da}"
            )));
        }
    }

    let cosine = a_form.cosine_view().ok_or_else(|| {
        Error::InternalConsistency("kappa polynomial lost Hermitian symmetry".into())
    })?;
    Ok(Kappa {
        poly: a_form,
        cosine,
        lower_bound: T::one() / (q0 * qn),
    })
}

/// Density of the 2×2 spectral measure at `λ > 0`:
/// `diag(1/q_0, 1/q_n) / (4π κ(√λ) √λ)`; off-diagonal entries vanish.
pub fn spectral_density_matrix<T: Scalar>(
    kappa: &Kappa<T>,
    profile: &BandwidthProfile<T>,
    lambda: T,
) -> Result<[[T; 2]; 2]> {
    if lambda <= T::zero() {
        return Err(Error::NonPositiveSpectralParameter(
            lambda.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let root = lambda.sqrt();
    let scale = T::one() / (lit::<T>(4.0) * T::PI() * kappa.eval(root) * root);
    Ok([
        [scale / profile.q_first(), T::zero()],
        [T::zero(), scale / profile.q_last()],
    ])
}

/// How `J` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JMode {
    Series,
    Quadrature,
}

/// Constants of the single-cosine density `κ(u) = C + K cos(ζu)` on
/// `Λ^{1/2} = [0, W]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesData<T> {
    pub c: T,
    pub k: T,
    pub zeta: T,
    pub r: T,
    pub w: T,
}

/// Evaluator for `J(s) = (1/2π) ∫_{Λ^{1/2}} e^{isu}/κ(u) du`.
#[derive(Debug, Clone)]
pub struct JEvaluator<T> {
    kappa: Kappa<T>,
    sset: SpectralSet<T>,
    mode: JMode,
    series: Option<SeriesData<T>>,
    rule: GaussLegendre<T>,
    series_eps: T,
}

/// Largest `|R|` for which the series is preferred over quadrature.
const SERIES_R_CAP: f64 = 0.95;

impl<T: Scalar> JEvaluator<T> {
    /// Auto-selects the series route when `Λ = [0, Ω]` and `κ` has at most
    /// one cosine term with `|R| ≤ 0.95`, otherwise quadrature.
    pub fn new(
        profile: &BandwidthProfile<T>,
        kappa: Kappa<T>,
        sset: SpectralSet<T>,
    ) -> Result<Self> {
        let series = series_data(profile, &kappa, &sset)?;
        let mode = match &series {
            Some(sd) if sd.r.abs() <= lit(SERIES_R_CAP) => JMode::Series,
            _ => JMode::Quadrature,
        };
        Ok(JEvaluator {
            kappa,
            sset,
            mode,
            series,
            rule: GaussLegendre::new(PANEL_ORDER),
            series_eps: lit(1e-10),
        })
    }

    /// Force a mode; requesting `Series` where it is unavailable fails.
    pub fn with_mode(
        profile: &BandwidthProfile<T>,
        kappa: Kappa<T>,
        sset: SpectralSet<T>,
        mode: JMode,
    ) -> Result<Self> {
        let mut ev = Self::new(profile, kappa, sset)?;
        if mode == JMode::Series && ev.series.is_none() {
            return Err(Error::SeriesUnavailable(
                "series form needs Λ = [0, Ω] and a single-cosine κ".into(),
            ));
        }
        ev.mode = mode;
        Ok(ev)
    }

    pub fn mode(&self) -> JMode {
        self.mode
    }

    pub fn kappa(&self) -> &Kappa<T> {
        &self.kappa
    }

    pub fn spectral_set(&self) -> &SpectralSet<T> {
        &self.sset
    }

    pub fn series_data(&self) -> Option<&SeriesData<T>> {
        self.series.as_ref()
    }

    /// `J(s)` by the active mode.
    pub fn j(&self, s: T) -> Result<Complex<T>> {
        match self.mode {
            JMode::Series => Ok(self.j_series(s, self.series_eps)?.0),
            JMode::Quadrature => self.j_quadrature(s),
        }
    }

    /// Real part `J_r(s)`.
    pub fn jr(&self, s: T) -> Result<T> {
        Ok(self.j(s)?.re)
    }

    /// Adaptive quadrature of `e^{isu}/κ(u)` over `Λ^{1/2}`.
    pub fn j_quadrature(&self, s: T) -> Result<Complex<T>> {
        self.weighted_quadrature(None, s)
    }

    /// `(1/2π) ∫ numer(u) e^{isu} / κ(u) du` over `Λ^{1/2}`.
    pub fn weighted(&self, numer: &APPoly<T>, s: T) -> Result<Complex<T>> {
        match self.mode {
            JMode::Series => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for term in numer.terms() {
                    let v = self.j_series(s + term.freq, self.series_eps)?.0;
                    acc = acc + v * term.coeff;
                }
                Ok(acc)
            }
            JMode::Quadrature => self.weighted_quadrature(Some(numer), s),
        }
    }

    fn weighted_quadrature(&self, numer: Option<&APPoly<T>>, s: T) -> Result<Complex<T>> {
        let extra_freq = numer.map(|p| p.max_freq()).unwrap_or_else(T::zero);
        self.integrate_over_kappa(s.abs() + extra_freq, |u| {
            let base = Complex::cis(s * u);
            match numer {
                Some(p) => p.eval(u) * base,
                None => base,
            }
        })
    }

    /// `(1/2π) ∫_{Λ^{1/2}} numer(u)/κ(u) du` by adaptive panels, with the
    /// panel width capped for a numerator oscillating up to `numer_osc`.
    pub fn integrate_over_kappa<F>(&self, numer_osc: T, numer: F) -> Result<Complex<T>>
    where
        F: Fn(T) -> Complex<T>,
    {
        let osc = numer_osc.abs() + self.kappa.max_freq();
        let mut total = Complex::new(T::zero(), T::zero());
        for (a, b) in self.sset.sqrt_intervals() {
            // cap panel width so GL15 sees a fraction of a period
            let width = if osc > T::zero() {
                (T::PI() / (lit::<T>(4.0) * osc)).min(b - a)
            } else {
                b - a
            };
            let kappa = &self.kappa;
            let f = |u: T| -> Complex<T> { numer(u) / kappa.eval(u) };
            let (v, _) = adaptive(&self.rule, a, b, width, J_QUAD_TARGET, &f)?;
            total = total + v;
        }
        Ok(total / (lit::<T>(2.0) * T::PI()))
    }

    fn require_series(&self) -> Result<&SeriesData<T>> {
        let sd = self.series.as_ref().ok_or_else(|| {
            Error::SeriesUnavailable("series form needs Λ = [0, Ω] and a single-cosine κ".into())
        })?;
        if sd.r.abs() >= T::one() {
            return Err(Error::SeriesRatioOutOfRange(
                sd.r.abs().to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(sd)
    }

    /// A-priori sup-norm bound on truncating the series after `m` terms.
    pub fn series_bound(&self, m: usize) -> Result<T> {
        let sd = self.require_series()?;
        let pref = sd.w / (lit::<T>(2.0) * sd.c * T::PI());
        let rabs = sd.r.abs();
        Ok(pref * rabs.powi(m as i32 + 1) / (T::one() - rabs))
    }

    /// Partial sums up to the smallest `M` whose a-priori bound is `≤ eps`;
    /// returns `(J_M(s), M, bound(M))`.
    pub fn j_series(&self, s: T, eps: T) -> Result<(Complex<T>, usize, T)> {
        let sd = self.require_series()?;
        let m = self.series_order(sd, eps);
        Ok((series_partial(sd, s, m), m, self.series_bound(m)?))
    }

    /// `J_M(s)` for an explicit truncation order.
    pub fn j_series_partial(&self, s: T, m: usize) -> Result<Complex<T>> {
        let sd = self.require_series()?;
        Ok(series_partial(sd, s, m))
    }

    fn series_order(&self, sd: &SeriesData<T>, eps: T) -> usize {
        if sd.r == T::zero() {
            return 0;
        }
        let pref = sd.w / (lit::<T>(2.0) * sd.c * T::PI());
        let rabs = sd.r.abs();
        let mut m = 0usize;
        let mut tail = pref * rabs / (T::one() - rabs);
        while tail > eps && m < 100_000 {
            tail = tail * rabs;
            m += 1;
        }
        m
    }

    /// Coefficients `c_k`, `k = -kmax..=kmax`, of the expansion of `J_r`
    /// over shifted `sinc(W(s - kζ))`, by direct summation of the binomial
    /// series to a 1e-14 relative tail.
    pub fn jr_coefficients(&self, kmax: usize) -> Result<Vec<T>> {
        let sd = self.require_series()?;
        let pref = sd.w / (lit::<T>(2.0) * sd.c * T::PI());
        let half_r = -sd.r / lit::<T>(2.0);
        let r2 = sd.r * sd.r / lit::<T>(4.0);
        let mut half: Vec<T> = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let mut term = half_r.powi(k as i32);
            let mut sum = term;
            let mut j = 0usize;
            while term != T::zero() && j < 20_000 {
                let jk = lit::<T>((2 * j + k) as f64);
                let ratio = (jk + T::one()) * (jk + lit::<T>(2.0))
                    / (lit::<T>((j + 1) as f64) * lit::<T>((j + k + 1) as f64))
                    * r2;
                term = term * ratio;
                sum = sum + term;
                j += 1;
                if term.abs() <= lit::<T>(1e-14) * sum.abs().max(lit(1e-300)) {
                    break;
                }
            }
            half.push(pref * sum);
        }
        let mut out = Vec::with_capacity(2 * kmax + 1);
        for k in (1..=kmax).rev() {
            out.push(half[k]);
        }
        out.extend(half);
        Ok(out)
    }

    /// `Σ_k c_k sinc(W(s - kζ))`, the translated-sinc expansion of `J_r`.
    pub fn jr_from_coefficients(&self, coeffs: &[T], s: T) -> Result<T> {
        let sd = self.require_series()?;
        let kmax = (coeffs.len() - 1) / 2;
        let mut acc = T::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            let k = lit::<T>(i as f64 - kmax as f64);
            acc = acc + c * sinc(sd.w * (s - k * sd.zeta));
        }
        Ok(acc)
    }
}

/// `Σ_{m=0}^{M} Σ_{l=0}^{m} (W/2Cπ)(−R/2)^m binom(m,l) e^{iθ} sinc θ`,
/// `θ = (W/2)(s + (m−2l)ζ)`. Binomials are folded into `2^{-m}` so the
/// running coefficient never overflows.
fn series_partial<T: Scalar>(sd: &SeriesData<T>, s: T, m_max: usize) -> Complex<T> {
    let half = lit::<T>(0.5);
    let pref = sd.w / (lit::<T>(2.0) * sd.c * T::PI());
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut rm = T::one(); // (−R)^m
    for m in 0..=m_max {
        let mut coef = half.powi(m as i32); // binom(m,l)/2^m
        let mut inner = Complex::new(T::zero(), T::zero());
        for l in 0..=m {
            let k = lit::<T>(m as f64 - 2.0 * l as f64);
            let theta = sd.w * half * (s + k * sd.zeta);
            inner = inner + Complex::cis(theta) * (coef * sinc(theta));
            coef = coef * lit::<T>((m - l) as f64) / lit::<T>((l + 1) as f64);
        }
        acc = acc + inner * rm;
        rm = rm * (-sd.r);
    }
    acc * pref
}

/// Constants for the series route, when the profile and spectrum admit it.
fn series_data<T: Scalar>(
    profile: &BandwidthProfile<T>,
    kappa: &Kappa<T>,
    sset: &SpectralSet<T>,
) -> Result<Option<SeriesData<T>>> {
    let omega = match sset.single_from_zero() {
        Some(o) => o,
        None => return Ok(None),
    };
    let view = kappa.cosine_view();
    if view.terms.len() > 1 {
        return Ok(None);
    }
    let n = profile.num_jumps();
    let w = omega.sqrt();

    let (c, k, zeta) = if n == 2 {
        let q = profile.q();
        let (q0, q1, q2) = (q[0], q[1], q[2]);
        let t_len = profile.knots()[1] - profile.knots()[0];
        let one = T::one();
        let sixteen = lit::<T>(16.0);
        let eight = lit::<T>(8.0);
        let plus = (one + q0 / q1) * (one + q1 / q2);
        let minus = (one - q0 / q1) * (one - q1 / q2);
        let c = (plus * plus + minus * minus) / (sixteen * q0 * q0);
        let k = (one - q0 * q0 / (q1 * q1)) * (one - q1 * q1 / (q2 * q2)) / (eight * q0 * q0);
        let zeta = lit::<T>(2.0) * q1 * t_len;

        // the closed-form constants and the symbolic cosine view must agree
        let agree_tol = tol::<T>(1e-12, 16.0);
        let dc = (view.constant - c).abs();
        if dc > agree_tol * (one + c.abs()) {
            return Err(Error::InternalConsistency(format!(
                "kappa constant mismatch: view {} vs closed form {c}",
                view.constant
            )));
        }
        if let Some(&(kc, kf)) = view.terms.first() {
            if (kc - k).abs() > agree_tol * (one + k.abs())
                || (kf - zeta).abs() > agree_tol * (one + zeta.abs())
            {
                return Err(Error::InternalConsistency(format!(
                    "kappa cosine term mismatch: view ({kc}, {kf}) vs closed form ({k}, {zeta})"
                )));
            }
        } else if k.abs() > agree_tol {
            return Err(Error::InternalConsistency(
                "kappa cosine view lost its oscillatory term".into(),
            ));
        }
        (c, k, zeta)
    } else if n <= 1 {
        // κ is a constant; the m = 0 term is the whole series
        if !view.terms.is_empty() {
            return Err(Error::InternalConsistency(
                "kappa of a profile with at most one jump must be constant".into(),
            ));
        }
        (view.constant, T::zero(), T::zero())
    } else {
        return Ok(None);
    };

    Ok(Some(SeriesData {
        c,
        k,
        zeta,
        r: k / c,
        w,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::connection_table;

    fn figure() -> (BandwidthProfile<f64>, ConnectionTable<f64>) {
        let p = BandwidthProfile::new(vec![-3.0, 3.0], vec![1.0, 0.25, 1.0]).unwrap();
        let t = connection_table(&p);
        (p, t)
    }

    fn figure_j() -> JEvaluator<f64> {
        let (p, t) = figure();
        let kappa = kappa_of(&p, &t).unwrap();
        let sset = SpectralSet::up_to(std::f64::consts::PI.powi(2)).unwrap();
        JEvaluator::new(&p, kappa, sset).unwrap()
    }

    #[test]
    fn spectral_set_validation() {
        assert!(SpectralSet::new(vec![(0.0, 1.0), (2.0, 3.0)]).is_ok());
        assert!(SpectralSet::new(vec![(-1.0, 1.0)]).is_err());
        assert!(SpectralSet::new(vec![(1.0, 1.0)]).is_err());
        assert!(SpectralSet::new(vec![(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(SpectralSet::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn sqrt_measure_adds_up() {
        let s = SpectralSet::<f64>::new(vec![(0.0, 4.0), (9.0, 16.0)]).unwrap();
        assert!((s.sqrt_measure() - 3.0).abs() < 1e-14);
        assert_eq!(s.u_max(), 4.0);
        assert!(s.single_from_zero().is_none());
        assert!((s.critical_density() - 3.0 / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn kappa_of_constant_profile_is_one() {
        let p: BandwidthProfile<f64> = BandwidthProfile::constant(1.0).unwrap();
        let t = connection_table(&p);
        let k = kappa_of(&p, &t).unwrap();
        assert!((k.eval(3.0) - 1.0).abs() < 1e-14);
        assert_eq!(k.cosine_view().terms.len(), 0);
        assert!((k.lower_bound() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_figure_cosine_view() {
        let (p, t) = figure();
        let k = kappa_of(&p, &t).unwrap();
        let v = k.cosine_view();
        assert!((v.constant - 1.28125).abs() < 1e-13);
        assert_eq!(v.terms.len(), 1);
        assert!((v.terms[0].0 + 0.28125).abs() < 1e-13);
        assert!((v.terms[0].1 - 24.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_one_jump_is_constant() {
        let p: BandwidthProfile<f64> = BandwidthProfile::new(vec![0.7], vec![1.0, 4.0]).unwrap();
        let t = connection_table(&p);
        let k = kappa_of(&p, &t).unwrap();
        // (1/4)(1 + q0/q1)² / q0² with q0 = 1, q1 = 1/2
        assert!((k.cosine_view().constant - 2.25).abs() < 1e-13);
        assert_eq!(k.cosine_view().terms.len(), 0);
    }

    #[test]
    fn density_matrix_for_free_profile() {
        let p = BandwidthProfile::constant(1.0).unwrap();
        let t = connection_table(&p);
        let k = kappa_of(&p, &t).unwrap();
        let m = spectral_density_matrix(&k, &p, 1.0).unwrap();
        let want = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((m[0][0] - want).abs() < 1e-15);
        assert!((m[1][1] - want).abs() < 1e-15);
        assert_eq!(m[0][1], 0.0);
        assert_eq!(m[1][0], 0.0);
        assert!(spectral_density_matrix(&k, &p, 0.0).is_err());
    }

    #[test]
    fn density_matrix_positive_and_diagonal() {
        let (p, t) = figure();
        let k = kappa_of(&p, &t).unwrap();
        for &lam in &[0.1, 1.0, 5.0, 40.0] {
            let m = spectral_density_matrix(&k, &p, lam).unwrap();
            assert!(m[0][0] > 0.0 && m[1][1] > 0.0);
            assert_eq!(m[0][1], 0.0);
            assert_eq!(m[1][0], 0.0);
            // substituted u-form: dμ(u²) = diag(1/q_0, 1/q_n) / (2π κ(u)) du
            let u = lam.sqrt();
            let sub = 1.0 / (2.0 * std::f64::consts::PI * k.eval(u));
            // dλ = 2u du, so the λ-density times 2√λ must equal the u-density
            assert!((m[0][0] * 2.0 * u - sub / p.q_first()).abs() < 1e-13);
        }
    }

    #[test]
    fn j_quadrature_flat_kappa() {
        let p = BandwidthProfile::constant(1.0).unwrap();
        let t = connection_table(&p);
        let k = kappa_of(&p, &t).unwrap();
        let w = 2.0;
        let sset = SpectralSet::up_to(w * w).unwrap();
        let jev = JEvaluator::with_mode(&p, k, sset, JMode::Quadrature).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let v0 = jev.j_quadrature(0.0).unwrap();
        assert!((v0.re - w / two_pi).abs() < 1e-12 && v0.im.abs() < 1e-12);
        for &s in &[0.5, -2.0, 7.3, 30.0] {
            let expect = Complex::cis(s * w / 2.0) * (w / two_pi) * crate::scalar::sinc(s * w / 2.0);
            let got = jev.j_quadrature(s).unwrap();
            assert!((got - expect).norm() < 1e-11, "s={s}");
        }
    }

    #[test]
    fn j_quadrature_conjugate_symmetry() {
        let jev = figure_j();
        for &s in &[0.3, 2.0, 17.5] {
            let a = jev.j_quadrature(s).unwrap();
            let b = jev.j_quadrature(-s).unwrap();
            assert!((a.conj() - b).norm() < 1e-10);
        }
    }

    #[test]
    fn j_quadrature_rejects_hopeless_oscillation() {
        let jev = figure_j();
        assert!(matches!(
            jev.j_quadrature(1e12),
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn series_mode_auto_selected_for_figure() {
        let jev = figure_j();
        assert_eq!(jev.mode(), JMode::Series);
        let sd = jev.series_data().unwrap();
        assert!((sd.c - 1.28125).abs() < 1e-13);
        assert!((sd.k + 0.28125).abs() < 1e-13);
        assert!((sd.zeta - 24.0).abs() < 1e-12);
        assert!((sd.r + 0.28125 / 1.28125).abs() < 1e-13);
    }

    #[test]
    fn series_reduces_to_sinc_when_flat() {
        let p = BandwidthProfile::new(vec![0.0], vec![1.0, 1.0]).unwrap();
        let t = connection_table(&p);
        let k = kappa_of(&p, &t).unwrap();
        let sset = SpectralSet::up_to(4.0).unwrap();
        let jev = JEvaluator::new(&p, k, sset).unwrap();
        assert_eq!(jev.mode(), JMode::Series);
        let (v, m, _) = jev.j_series(1.3, 1e-12).unwrap();
        assert_eq!(m, 0);
        let w = 2.0;
        let expect =
            Complex::cis(1.3 * w / 2.0) * (w / (2.0 * std::f64::consts::PI)) * crate::scalar::sinc(1.3 * w / 2.0);
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn series_agrees_with_quadrature() {
        let jev = figure_j();
        for &s in &[0.0, 1.0, 5.5, -13.2, 24.0, 47.0] {
            let (vs, _, bound) = jev.j_series(s, 1e-12).unwrap();
            let vq = jev.j_quadrature(s).unwrap();
            assert!((vs - vq).norm() <= bound + 1e-10, "s={s}");
        }
    }

    #[test]
    fn partial_sum_bound_honesty_sampled() {
        let jev = figure_j();
        let (_, m, _) = jev.j_series(0.0, 1e-10).unwrap();
        for &s in &[0.0, 3.7, -11.0, 29.5] {
            let truth = jev.j_quadrature(s).unwrap();
            for mp in 0..=m {
                let jm = jev.j_series_partial(s, mp).unwrap();
                let bound = jev.series_bound(mp).unwrap();
                assert!(
                    (jm - truth).norm() <= bound + 1e-9,
                    "s={s} m'={mp}: {} > {bound}",
                    (jm - truth).norm()
                );
            }
        }
    }

    #[test]
    fn jr_zero_at_integers_not_multiple_of_zeta() {
        let jev = figure_j();
        for s in [1.0, 2.0, 5.0, 23.0, 25.0, 47.0] {
            assert!(jev.jr(s).unwrap().abs() < 1e-10, "s={s}");
            assert!(jev.jr(-s).unwrap().abs() < 1e-10);
        }
        // peaks at multiples of ζ = 24 survive
        assert!(jev.jr(0.0).unwrap() > 0.3);
        assert!(jev.jr(24.0).unwrap().abs() > 0.02);
    }

    #[test]
    fn jr_coefficients_flat_case() {
        let p = BandwidthProfile::new(vec![0.0], vec![2.0, 2.0]).unwrap();
        let t = connection_table(&p);
        let k = kappa_of(&p, &t).unwrap();
        let sset = SpectralSet::up_to(9.0).unwrap();
        let jev = JEvaluator::new(&p, k, sset).unwrap();
        let c = jev.jr_coefficients(3).unwrap();
        assert_eq!(c.len(), 7);
        let sd = jev.series_data().unwrap();
        let want = sd.w / (2.0 * sd.c * std::f64::consts::PI);
        assert!((c[3] - want).abs() < 1e-14);
        for i in [0, 1, 2, 4, 5, 6] {
            assert_eq!(c[i], 0.0);
        }
    }

    #[test]
    fn jr_coefficients_match_geometric_closed_form() {
        // Σ_j binom(2j+k, j) x^{2j+k} has the closed form
        // (1-x²·4... ) — via the generating function of central-ish binomials:
        // c_k = c_0 ρ^{|k|} with ρ = -R/(1+√(1-R²)), c_0 = pref/√(1-R²).
        let jev = figure_j();
        let sd = *jev.series_data().unwrap();
        let kmax = 6;
        let c = jev.jr_coefficients(kmax).unwrap();
        let pref = sd.w / (2.0 * sd.c * std::f64::consts::PI);
        let root = (1.0 - sd.r * sd.r).sqrt();
        let rho = -sd.r / (1.0 + root);
        for k in 0..=kmax {
            let want = pref / root * rho.powi(k as i32);
            assert!((c[kmax + k] - want).abs() < 1e-13, "k={k}");
            assert!((c[kmax - k] - want).abs() < 1e-13);
        }
        // Figure numbers: c_0 = 0.4 exactly, ratio 1/9
        assert!((c[kmax] - 0.4).abs() < 1e-13);
        assert!((c[kmax + 1] - 0.4 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn jr_sinc_expansion_matches_quadrature() {
        let jev = figure_j();
        let c = jev.jr_coefficients(40).unwrap();
        for &s in &[0.0, 0.4, 7.77, 24.0, -31.2] {
            let via_sincs = jev.jr_from_coefficients(&c, s).unwrap();
            let via_quad = jev.j_quadrature(s).unwrap().re;
            assert!((via_sincs - via_quad).abs() < 2e-8, "s={s}");
        }
    }

    #[test]
    fn coefficient_signs_follow_leading_power() {
        let jev = figure_j();
        let kmax = 5;
        let c = jev.jr_coefficients(kmax).unwrap();
        let sd = jev.series_data().unwrap();
        for k in 0..=kmax {
            let lead = (-sd.r / 2.0).powi(k as i32);
            assert_eq!(c[kmax + k].signum(), lead.signum(), "k={k}");
        }
    }

    #[test]
    fn series_unavailable_for_multi_interval_spectrum() {
        let (p, t) = figure();
        let kappa = kappa_of(&p, &t).unwrap();
        let sset = SpectralSet::new(vec![(0.0, 1.0), (4.0, 9.0)]).unwrap();
        let jev = JEvaluator::new(&p, kappa.clone(), sset.clone()).unwrap();
        assert_eq!(jev.mode(), JMode::Quadrature);
        assert!(jev.j_series(0.0, 1e-10).is_err());
        assert!(JEvaluator::with_mode(&p, kappa, sset, JMode::Series).is_err());
    }

    #[test]
    fn n2_kappa_has_exactly_the_expected_frequencies() {
        let (p, t) = figure();
        let k = kappa_of(&p, &t).unwrap();
        let freqs: Vec<f64> = k.poly().terms().iter().map(|t| t.freq).collect();
        assert_eq!(freqs.len(), 3);
        assert!((freqs[0] + 24.0).abs() < 1e-12);
        assert!(freqs[1].abs() < 1e-12);
        assert!((freqs[2] - 24.0).abs() < 1e-12);
    }
}
