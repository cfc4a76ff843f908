//! Piecewise-constant bandwidth profiles and the measure `μ_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real interval with optionally infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub lo_open: bool,
    pub hi_open: bool,
}

/// Step function `p(x) = Σ_j p_j χ_{(t_j, t_{j+1}]}(x)` with
/// `t_0 = -∞`, `t_{n+1} = +∞`.
///
/// `knots` holds `t_1 < … < t_n` (possibly empty), `levels` holds
/// `p_0, …, p_n` (one more entry than `knots`, all positive), and `q` caches
/// `q_k = p_k^{-1/2}`, the local frequency scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileData<T>", into = "ProfileData<T>", bound = "T: Scalar + Serialize + serde::de::DeserializeOwned")]
pub struct BandwidthProfile<T> {
    knots: Vec<T>,
    levels: Vec<T>,
    q: Vec<T>,
}

/// Raw JSON schema: `{"knots": [...], "levels": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProfileData<T> {
    knots: Vec<T>,
    levels: Vec<T>,
}

impl<T: Scalar> TryFrom<ProfileData<T>> for BandwidthProfile<T> {
    type Error = Error;
    fn try_from(d: ProfileData<T>) -> Result<Self> {
        BandwidthProfile::new(d.knots, d.levels)
    }
}

impl<T: Scalar> From<BandwidthProfile<T>> for ProfileData<T> {
    fn from(p: BandwidthProfile<T>) -> Self {
        ProfileData {
            knots: p.knots,
            levels: p.levels,
        }
    }
}

impl<T: Scalar> BandwidthProfile<T> {
    /// Validate and build a profile. Levels must be strictly positive and
    /// finite, knots strictly increasing, `levels.len() == knots.len() + 1`.
    pub fn new(knots: Vec<T>, levels: Vec<T>) -> Result<Self> {
        if levels.len() != knots.len() + 1 {
            return Err(Error::InvalidProfile(format!(
                "levels must have exactly one more entry than knots (got {} levels, {} knots)",
                levels.len(),
                knots.len()
            )));
        }
        for (i, &t) in knots.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::InvalidProfile(format!("knot {i} is not finite")));
            }
        }
        for w in knots.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidProfile(format!(
                    "knots must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (i, &p) in levels.iter().enumerate() {
            if !p.is_finite() || p <= T::zero() {
                return Err(Error::InvalidProfile(format!(
                    "level p_{i} must be a positive finite number, got {p}"
                )));
            }
        }
        let q = levels.iter().map(|&p| T::one() / p.sqrt()).collect();
        Ok(BandwidthProfile { knots, levels, q })
    }

    /// Constant profile `p ≡ level` (no jumps).
    pub fn constant(level: T) -> Result<Self> {
        Self::new(Vec::new(), vec![level])
    }

    /// Number of jumps `n`.
    pub fn num_jumps(&self) -> usize {
        self.knots.len()
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// `q_k = p_k^{-1/2}` for every interval.
    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn q_first(&self) -> T {
        self.q[0]
    }

    pub fn q_last(&self) -> T {
        *self.q.last().expect("levels nonempty")
    }

    /// Index `k` with `x ∈ I_k = (t_k, t_{k+1}]`; knots belong to the
    /// interval on their left.
    pub fn interval_index(&self, x: T) -> usize {
        debug_assert!(x.is_finite());
        self.knots.partition_point(|&t| t < x)
    }

    /// `p(x)` under the half-open convention.
    pub fn level_at(&self, x: T) -> T {
        self.levels[self.interval_index(x)]
    }

    /// `q(x) = p(x)^{-1/2}`.
    pub fn q_at(&self, x: T) -> T {
        self.q[self.interval_index(x)]
    }

    /// The interval `I_k` as a value (unbounded ends use infinities).
    pub fn interval(&self, k: usize) -> Result<Interval<T>> {
        let n = self.num_jumps();
        if k > n {
            return Err(Error::IndexOutOfRange {
                index: k,
                expected: format!("0..={n}"),
            });
        }
        let lo = if k == 0 { T::neg_infinity() } else { self.knots[k - 1] };
        let hi = if k == n { T::infinity() } else { self.knots[k] };
        Ok(Interval {
            lo,
            hi,
            lo_open: true,
            hi_open: k == n,
        })
    }

    /// `μ_p([a,b]) = ∫_a^b p(x)^{-1/2} dx`, evaluated exactly as
    /// `Σ_k q_k |overlap([a,b], I_k)|`.
    pub fn mu(&self, a: T, b: T) -> T {
        debug_assert!(a.is_finite() && b.is_finite());
        if b <= a {
            return T::zero();
        }
        let n = self.num_jumps();
        let mut total = T::zero();
        let mut lo = a;
        let mut k = self.interval_index(a);
        // mu is insensitive to which side of a knot a boundary point lands on
        while k < n && self.knots[k] < b {
            let hi = self.knots[k];
            if hi > lo {
                total = total + self.q[k] * (hi - lo);
                lo = hi;
            }
            k += 1;
        }
        total + self.q[k] * (b - lo)
    }

    /// μ_p of the closed ball `B_r(x) = [x-r, x+r]`.
    pub fn mu_ball(&self, x: T, r: T) -> T {
        self.mu(x - r, x + r)
    }

    /// The point `b ≥ a` with `μ_p([a,b]) = delta` (`delta ≥ 0`).
    pub fn advance_mu(&self, a: T, delta: T) -> T {
        debug_assert!(delta >= T::zero());
        let n = self.num_jumps();
        let mut x = a;
        let mut remaining = delta;
        let mut k = self.interval_index(a);
        while k < n {
            let cap = self.q[k] * (self.knots[k] - x);
            if remaining <= cap {
                return x + remaining / self.q[k];
            }
            remaining = remaining - cap;
            x = self.knots[k];
            k += 1;
        }
        x + remaining / self.q[n]
    }

    /// Smallest and largest `q_k`.
    pub fn q_range(&self) -> (T, T) {
        let mut lo = self.q[0];
        let mut hi = self.q[0];
        for &v in &self.q[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_profile() -> BandwidthProfile<f64> {
        BandwidthProfile::new(vec![-3.0, 3.0], vec![1.0, 0.25, 1.0]).unwrap()
    }

    #[test]
    fn interval_index_no_knots() {
        let p = BandwidthProfile::constant(1.0).unwrap();
        assert_eq!(p.interval_index(5.0), 0);
        assert_eq!(p.interval_index(-1e9), 0);
    }

    #[test]
    fn interval_index_boundary_is_left_closed() {
        let p = figure_profile();
        assert_eq!(p.interval_index(-3.0), 0);
        assert_eq!(p.interval_index(0.0), 1);
        assert_eq!(p.interval_index(3.0), 1);
        assert_eq!(p.interval_index(3.0 + 1e-12), 2);
    }

    #[test]
    fn level_lookup_reproduces_step_function() {
        let p = figure_profile();
        for &(x, want) in &[(-5.0, 1.0), (-3.0, 1.0), (-2.9, 0.25), (3.0, 0.25), (3.1, 1.0)] {
            assert_eq!(p.level_at(x), want);
        }
    }

    #[test]
    fn mu_of_constant_profile_is_length() {
        let p = BandwidthProfile::constant(1.0).unwrap();
        assert_eq!(p.mu(0.0, 7.0), 7.0);
    }

    #[test]
    fn mu_figure_profile_hand_sum() {
        // q = (1, 2, 1): 2·1 + 6·2 + 2·1 = 16
        let p = figure_profile();
        assert!((p.mu(-5.0, 5.0) - 16.0).abs() < 1e-14);
    }

    #[test]
    fn mu_empty_interval_is_zero() {
        let p = figure_profile();
        assert_eq!(p.mu(1.5, 1.5), 0.0);
        assert_eq!(p.mu(2.0, -2.0), 0.0);
    }

    #[test]
    fn mu_additive_and_bounded() {
        let p = figure_profile();
        let (a, b, c) = (-7.3, 0.4, 9.1);
        let whole = p.mu(a, c);
        let split = p.mu(a, b) + p.mu(b, c);
        assert!((whole - split).abs() <= 1e-14 * whole.abs());
        let (qmin, qmax) = p.q_range();
        assert!(whole >= qmin * (c - a) - 1e-12);
        assert!(whole <= qmax * (c - a) + 1e-12);
    }

    #[test]
    fn advance_mu_inverts_mu() {
        let p = figure_profile();
        for &(a, d) in &[(-5.0, 0.5), (-5.0, 4.0), (-3.0, 0.0), (-3.5, 1.0), (2.9, 7.0)] {
            let b = p.advance_mu(a, d);
            assert!((p.mu(a, b) - d).abs() < 1e-12, "a={a} d={d} b={b}");
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(BandwidthProfile::new(vec![0.0], vec![1.0]).is_err());
        assert!(BandwidthProfile::new(vec![1.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(BandwidthProfile::new(vec![2.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(BandwidthProfile::new(vec![], vec![0.0]).is_err());
        assert!(BandwidthProfile::new(vec![], vec![-2.0]).is_err());
        assert!(BandwidthProfile::new(vec![], vec![f64::NAN]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = figure_profile();
        let s = serde_json::to_string(&p).unwrap();
        let back: BandwidthProfile<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        // schema shape
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v.get("knots").is_some() && v.get("levels").is_some());
    }

    #[test]
    fn unbounded_interval_endpoints() {
        let p = figure_profile();
        let i0 = p.interval(0).unwrap();
        assert!(i0.lo.is_infinite() && i0.lo < 0.0);
        assert_eq!(i0.hi, -3.0);
        assert!(!i0.hi_open);
        let i2 = p.interval(2).unwrap();
        assert_eq!(i2.lo, 3.0);
        assert!(i2.hi.is_infinite());
        assert!(p.interval(3).is_err());
    }
}
