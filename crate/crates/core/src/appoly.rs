//! Almost periodic trigonometric polynomials `Σ_k c_k e^{i β_k u}`.
//!
//! Complex coefficients, real frequencies, finitely many terms. Connection
//! coefficients, the spectral density and the kernel exponents all live in
//! this algebra, so sums and products are kept exact (up to the frequency
//! merge described below) instead of being re-evaluated pointwise.

use num_complex::Complex;
use serde_json::json;

use crate::scalar::{lit, tol, Scalar};

/// Relative tolerance under which two frequencies are identified.
///
/// Frequencies arise from sums and differences of `q_k t_k` products done in
/// floating point; without merging, repeated products blow the term count up
/// combinatorially and the cosine structure of real-valued polynomials is
/// lost.
const FREQ_MERGE_TOL: f64 = 1e-9;

/// Coefficients below `PRUNE_TOL * max|c|` are dropped.
const PRUNE_TOL: f64 = 1e-14;

/// One term `c e^{i β u}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<T> {
    pub freq: T,
    pub coeff: Complex<T>,
}

/// Almost periodic trigonometric polynomial in a real variable.
///
/// Terms are kept sorted by frequency, with distinct frequencies and no zero
/// coefficients stored.
#[derive(Debug, Clone, PartialEq)]
pub struct APPoly<T> {
    terms: Vec<Term<T>>,
}

impl<T: Scalar> APPoly<T> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        APPoly { terms: Vec::new() }
    }

    /// Constant polynomial `c e^{i 0 u}`.
    pub fn constant(c: Complex<T>) -> Self {
        Self::from_terms(vec![(T::zero(), c)])
    }

    /// Single term `c e^{i β u}`.
    pub fn harmonic(freq: T, coeff: Complex<T>) -> Self {
        Self::from_terms(vec![(freq, coeff)])
    }

    /// Build from `(frequency, coefficient)` pairs and canonicalize.
    pub fn from_terms(pairs: Vec<(T, Complex<T>)>) -> Self {
        let mut p = APPoly {
            terms: pairs
                .into_iter()
                .map(|(freq, coeff)| Term { freq, coeff })
                .collect(),
        };
        p.canonicalize();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    /// Largest |frequency| present (0 for the zero polynomial).
    pub fn max_freq(&self) -> T {
        self.terms
            .iter()
            .map(|t| t.freq.abs())
            .fold(T::zero(), T::max)
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coeff(&self) -> T {
        self.terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(T::zero(), T::max)
    }

    /// Sort by frequency, merge frequencies closer than
    /// `FREQ_MERGE_TOL * (1 + max|β|)`, drop negligible coefficients.
    fn canonicalize(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        self.terms
            .sort_by(|a, b| a.freq.partial_cmp(&b.freq).expect("finite frequencies"));

        let max_freq = self.max_freq();
        let merge_tol = tol::<T>(FREQ_MERGE_TOL, 8.0) * (T::one() + max_freq);

        let mut merged: Vec<Term<T>> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if (term.freq - last.freq).abs() <= merge_tol => {
                    // |coeff|-weighted frequency so the heavier term wins
                    let wa = last.coeff.norm();
                    let wb = term.coeff.norm();
                    let w = wa + wb;
                    if w > T::zero() {
                        last.freq = (last.freq * wa + term.freq * wb) / w;
                    }
                    last.coeff = last.coeff + term.coeff;
                }
                _ => merged.push(term),
            }
        }

        let max_coeff = merged
            .iter()
            .map(|t| t.coeff.norm())
            .fold(T::zero(), T::max);
        let floor = tol::<T>(PRUNE_TOL, 2.0) * max_coeff;
        merged.retain(|t| t.coeff.norm() > floor && t.coeff.norm() > T::zero());
        self.terms = merged;
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut pairs: Vec<(T, Complex<T>)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        pairs.extend(self.terms.iter().map(|t| (t.freq, t.coeff)));
        pairs.extend(other.terms.iter().map(|t| (t.freq, t.coeff)));
        Self::from_terms(pairs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Complex::new(T::one(), T::zero())))
    }

    /// Product: frequencies add, coefficients multiply.
    pub fn mul(&self, other: &Self) -> Self {
        let mut pairs = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                pairs.push((a.freq + b.freq, a.coeff * b.coeff));
            }
        }
        Self::from_terms(pairs)
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::from_terms(self.terms.iter().map(|t| (t.freq, t.coeff * c)).collect())
    }

    pub fn scale_re(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    /// Complex conjugate on real arguments: coefficients conjugated,
    /// frequencies negated.
    pub fn conj(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| (-t.freq, t.coeff.conj()))
                .collect(),
        )
    }

    /// `f · conj(f)`; Hermitian term symmetry, real-valued on real `u`.
    pub fn modulus_squared(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Evaluate `Σ c_β e^{i β u}` with compensated summation.
    pub fn eval(&self, u: T) -> Complex<T> {
        let mut sum_re = T::zero();
        let mut sum_im = T::zero();
        let mut c_re = T::zero();
        let mut c_im = T::zero();
        for t in &self.terms {
            let rot = Complex::cis(t.freq * u);
            let v = t.coeff * rot;
            // Kahan step per component
            let y = v.re - c_re;
            let s = sum_re + y;
            c_re = (s - sum_re) - y;
            sum_re = s;
            let y = v.im - c_im;
            let s = sum_im + y;
            c_im = (s - sum_im) - y;
            sum_im = s;
        }
        Complex::new(sum_re, sum_im)
    }

    /// Whether the term multiset is (numerically) closed under
    /// `β ↦ -β, c ↦ conj c`, i.e. the polynomial is real on real arguments.
    pub fn is_hermitian(&self, tol: T) -> bool {
        let scale = self.max_coeff().max(T::one());
        for t in &self.terms {
            let mirror = self.coeff_at(-t.freq);
            if (mirror - t.coeff.conj()).norm() > tol * scale {
                return false;
            }
        }
        true
    }

    /// Coefficient at the frequency nearest `freq` (zero if none within the
    /// merge tolerance).
    pub fn coeff_at(&self, freq: T) -> Complex<T> {
        let merge_tol = tol::<T>(FREQ_MERGE_TOL, 8.0) * (T::one() + self.max_freq());
        self.terms
            .iter()
            .find(|t| (t.freq - freq).abs() <= merge_tol)
            .map(|t| t.coeff)
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Cosine-basis view `c_0 + Σ c_j cos(λ_j u)` of a Hermitian polynomial.
    ///
    /// Returns `None` when the polynomial is not Hermitian-symmetric or the
    /// paired coefficients carry a non-negligible imaginary part.
    pub fn cosine_view(&self) -> Option<CosineView<T>> {
        let imag_tol = tol::<T>(1e-10, 32.0);
        if !self.is_hermitian(imag_tol) {
            return None;
        }
        let scale = self.max_coeff().max(T::one());
        let mut constant = T::zero();
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.freq.abs() <= tol::<T>(FREQ_MERGE_TOL, 8.0) * (T::one() + self.max_freq()) {
                if t.coeff.im.abs() > imag_tol * scale {
                    return None;
                }
                constant = t.coeff.re;
            } else if t.freq > T::zero() {
                let two = lit::<T>(2.0);
                if t.coeff.im.abs() > imag_tol * scale {
                    return None;
                }
                terms.push((two * t.coeff.re, t.freq));
            }
        }
        Some(CosineView { constant, terms })
    }

    /// Debug serialization: `[{"freq": β, "re": _, "im": _}]`, sorted by
    /// frequency.
    pub fn to_debug_json(&self) -> serde_json::Value {
        json!(self
            .terms
            .iter()
            .map(|t| {
                json!({
                    "freq": t.freq.to_f64().unwrap_or(f64::NAN),
                    "re": t.coeff.re.to_f64().unwrap_or(f64::NAN),
                    "im": t.coeff.im.to_f64().unwrap_or(f64::NAN),
                })
            })
            .collect::<Vec<_>>())
    }
}

/// Projection of a real-valued polynomial onto `c_0 + Σ c_j cos(λ_j u)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CosineView<T> {
    pub constant: T,
    /// `(c_j, λ_j)` pairs, sorted by frequency.
    pub terms: Vec<(T, T)>,
}

impl<T: Scalar> CosineView<T> {
    pub fn eval(&self, u: T) -> T {
        let mut s = self.constant;
        for &(c, f) in &self.terms {
            s = s + c * (f * u).cos();
        }
        s
    }
}
