//! Fundamental system of `(τ_p − z)f = 0` via transfer matrices.
//!
//! On each interval of constancy the equation has plane-wave solutions
//! `e^{±i q_k √z x}`. Gluing them continuously (in value and in `p f'`)
//! across a knot multiplies the coefficient pair by a 2×2 matrix whose
//! entries are single exponentials in `u = √z`, so every connection
//! coefficient stays an almost periodic polynomial and is built here
//! symbolically once per profile.

use num_complex::Complex;

use crate::appoly::APPoly;
use crate::error::{Error, Result};
use crate::piecewise::BandwidthProfile;
use crate::scalar::{lit, Scalar};

/// Which member of the fundamental system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionSign {
    /// Square-integrable near `+∞`.
    Plus,
    /// Square-integrable near `-∞`.
    Minus,
}

/// 2×2 matrix of almost periodic polynomials in `u = √z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix<T> {
    pub entries: [[APPoly<T>; 2]; 2],
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn identity() -> Self {
        let one = APPoly::constant(Complex::new(T::one(), T::zero()));
        let zero = APPoly::zero();
        TransferMatrix {
            entries: [[one.clone(), zero.clone()], [zero, one]],
        }
    }

    /// Symbolic matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        let e = &self.entries;
        let f = &other.entries;
        let at = |i: usize, j: usize| {
            e[i][0].mul(&f[0][j]).add(&e[i][1].mul(&f[1][j]))
        };
        TransferMatrix {
            entries: [[at(0, 0), at(0, 1)], [at(1, 0), at(1, 1)]],
        }
    }

    /// Symbolic determinant.
    pub fn det(&self) -> APPoly<T> {
        let e = &self.entries;
        e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
    }

    /// Numeric value at `u`.
    pub fn eval(&self, u: T) -> [[Complex<T>; 2]; 2] {
        [
            [self.entries[0][0].eval(u), self.entries[0][1].eval(u)],
            [self.entries[1][0].eval(u), self.entries[1][1].eval(u)],
        ]
    }
}

fn check_jump_index<T: Scalar>(profile: &BandwidthProfile<T>, k: usize) -> Result<()> {
    let n = profile.num_jumps();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            index: k,
            expected: format!("1..={n}"),
        });
    }
    Ok(())
}

/// Left-to-right gluing matrix `L_k` at knot `t_k` (1-indexed).
///
/// Entries are `(1 ± q_k/q_{k-1})/2` times `e^{±i t_k (q_{k-1} ∓ q_k) u}`.
pub fn build_l<T: Scalar>(profile: &BandwidthProfile<T>, k: usize) -> Result<TransferMatrix<T>> {
    check_jump_index(profile, k)?;
    let q = profile.q();
    let t = profile.knots()[k - 1];
    let (qa, qb) = (q[k - 1], q[k]);
    let half = lit::<T>(0.5);
    let plus = half * (T::one() + qb / qa);
    let minus = half * (T::one() - qb / qa);
    let re = |v: T| Complex::new(v, T::zero());
    let eta = t * (qa - qb);
    let theta = t * (qa + qb);
    Ok(TransferMatrix {
        entries: [
            [
                APPoly::harmonic(eta, re(plus)),
                APPoly::harmonic(-theta, re(minus)),
            ],
            [
                APPoly::harmonic(theta, re(minus)),
                APPoly::harmonic(-eta, re(plus)),
            ],
        ],
    })
}

/// Right-to-left gluing matrix `R_k = L_k^{-1}`, built directly.
pub fn build_r<T: Scalar>(profile: &BandwidthProfile<T>, k: usize) -> Result<TransferMatrix<T>> {
    check_jump_index(profile, k)?;
    let q = profile.q();
    let t = profile.knots()[k - 1];
    let (qa, qb) = (q[k - 1], q[k]);
    let half = lit::<T>(0.5);
    let plus = half * (T::one() + qa / qb);
    let minus = half * (T::one() - qa / qb);
    let re = |v: T| Complex::new(v, T::zero());
    let eta = t * (qa - qb);
    let theta = t * (qa + qb);
    Ok(TransferMatrix {
        entries: [
            [
                APPoly::harmonic(-eta, re(plus)),
                APPoly::harmonic(-theta, re(minus)),
            ],
            [
                APPoly::harmonic(theta, re(minus)),
                APPoly::harmonic(eta, re(plus)),
            ],
        ],
    })
}

/// Per-interval connection coefficients of the fundamental system, as
/// almost periodic polynomials in `u = √λ`.
///
/// Boundary data: `a_n^+ = 1, b_n^+ = 0` and `a_0^- = 0, b_0^- = 1`; the
/// remaining entries follow the product recursions (right-to-left in `R`
/// for the `+` family, left-to-right in `L` for the `-` family).
#[derive(Debug, Clone)]
pub struct ConnectionTable<T> {
    pub aplus: Vec<APPoly<T>>,
    pub bplus: Vec<APPoly<T>>,
    pub aminus: Vec<APPoly<T>>,
    pub bminus: Vec<APPoly<T>>,
}

/// Build the full table for a profile.
pub fn connection_table<T: Scalar>(profile: &BandwidthProfile<T>) -> ConnectionTable<T> {
    let n = profile.num_jumps();
    let one = APPoly::constant(Complex::new(T::one(), T::zero()));
    let zero = APPoly::zero();

    let mut aplus = vec![zero.clone(); n + 1];
    let mut bplus = vec![zero.clone(); n + 1];
    let mut aminus = vec![zero.clone(); n + 1];
    let mut bminus = vec![zero.clone(); n + 1];

    aplus[n] = one.clone();
    bplus[n] = zero.clone();
    for l in (0..n).rev() {
        let r = build_r(profile, l + 1).expect("index in range");
        let e = &r.entries;
        aplus[l] = e[0][0].mul(&aplus[l + 1]).add(&e[0][1].mul(&bplus[l + 1]));
        bplus[l] = e[1][0].mul(&aplus[l + 1]).add(&e[1][1].mul(&bplus[l + 1]));
    }

    aminus[0] = zero;
    bminus[0] = one;
    for j in 1..=n {
        let l = build_l(profile, j).expect("index in range");
        let e = &l.entries;
        aminus[j] = e[0][0].mul(&aminus[j - 1]).add(&e[0][1].mul(&bminus[j - 1]));
        bminus[j] = e[1][0].mul(&aminus[j - 1]).add(&e[1][1].mul(&bminus[j - 1]));
    }

    ConnectionTable {
        aplus,
        bplus,
        aminus,
        bminus,
    }
}

impl<T: Scalar> ConnectionTable<T> {
    pub fn num_intervals(&self) -> usize {
        self.aplus.len()
    }

    /// Coefficient pair of the requested solution on interval `k`,
    /// evaluated at `u`.
    pub fn coeffs_at(&self, sign: SolutionSign, k: usize, u: T) -> (Complex<T>, Complex<T>) {
        match sign {
            SolutionSign::Plus => (self.aplus[k].eval(u), self.bplus[k].eval(u)),
            SolutionSign::Minus => (self.aminus[k].eval(u), self.bminus[k].eval(u)),
        }
    }

    /// Test hook: knock one coefficient off so identity checks fail.
    #[doc(hidden)]
    pub fn perturb_for_tests(&mut self, delta: T) {
        let k = self.aplus.len() - 1;
        let bump = APPoly::constant(Complex::new(delta, T::zero()));
        self.aplus[0] = self.aplus[0].add(&bump);
        let _ = k;
    }
}

fn require_positive_u<T: Scalar>(u: T) -> Result<()> {
    if u <= T::zero() {
        return Err(Error::NonPositiveSpectralParameter(
            u.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(())
}

/// Evaluate `Φ^±(u², x)` on the interval containing `x`.
pub fn phi<T: Scalar>(
    profile: &BandwidthProfile<T>,
    table: &ConnectionTable<T>,
    sign: SolutionSign,
    u: T,
    x: T,
) -> Result<Complex<T>> {
    require_positive_u(u)?;
    let k = profile.interval_index(x);
    Ok(phi_on_interval(profile, table, sign, u, x, k))
}

/// Same as [`phi`] but with the coefficient set of a chosen interval, so
/// one-sided limits at a knot can be formed.
pub fn phi_on_interval<T: Scalar>(
    profile: &BandwidthProfile<T>,
    table: &ConnectionTable<T>,
    sign: SolutionSign,
    u: T,
    x: T,
    k: usize,
) -> Complex<T> {
    let (a, b) = table.coeffs_at(sign, k, u);
    let qk = profile.q()[k];
    a * Complex::cis(qk * u * x) + b * Complex::cis(-(qk * u * x))
}

/// Value and flux `(Φ, p Φ')` on a chosen interval; the flux is the
/// quantity that must match across knots.
pub fn phi_with_flux<T: Scalar>(
    profile: &BandwidthProfile<T>,
    table: &ConnectionTable<T>,
    sign: SolutionSign,
    u: T,
    x: T,
    k: usize,
) -> (Complex<T>, Complex<T>) {
    let (a, b) = table.coeffs_at(sign, k, u);
    let qk = profile.q()[k];
    let e = Complex::cis(qk * u * x);
    let em = Complex::cis(-(qk * u * x));
    let value = a * e + b * em;
    // p_k Φ' = (i u / q_k)(a e^{iq_k u x} - b e^{-iq_k u x})
    let flux = (a * e - b * em) * Complex::new(T::zero(), u / qk);
    (value, flux)
}

/// Absolute residuals of the exact coefficient identities at one `u`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IdentityResiduals<T> {
    /// Cross-Wronskian chain through all intervals.
    pub cross_wronskian: T,
    /// `q_0(|b_k^-|² - |a_k^-|²) = q_n(|a_k^+|² - |b_k^+|²) = q_k`.
    pub normalization: T,
    /// Mixed-modulus identity tying the `+` and `-` families.
    pub mixed_modulus: T,
    /// Conjugate-Wronskian chain.
    pub conjugate_wronskian: T,
    /// `|b_0^+|²/q_0² + 1/(q_0 q_n) = |a_0^+|²/q_0² = |b_n^-|²/q_n² = …`.
    pub kappa_chain: T,
    /// Product of `L` matrices versus the SU(1,1) form in `a^-`, `b^-`.
    pub l_product: T,
    /// Product of `R` matrices versus the SU(1,1) form in `a^+`, `b^+`.
    pub r_product: T,
}

impl<T: Scalar> IdentityResiduals<T> {
    pub fn max(&self) -> T {
        self.cross_wronskian
            .max(self.normalization)
            .max(self.mixed_modulus)
            .max(self.conjugate_wronskian)
            .max(self.kappa_chain)
            .max(self.l_product)
            .max(self.r_product)
    }
}

/// Evaluate every identity at `λ = u²` and report residuals.
pub fn wronskian_identities<T: Scalar>(
    profile: &BandwidthProfile<T>,
    table: &ConnectionTable<T>,
    u: T,
) -> Result<IdentityResiduals<T>> {
    require_positive_u(u)?;
    let n = profile.num_jumps();
    let q = profile.q();
    let q0 = q[0];
    let qn = q[n];

    let ap: Vec<Complex<T>> = table.aplus.iter().map(|p| p.eval(u)).collect();
    let bp: Vec<Complex<T>> = table.bplus.iter().map(|p| p.eval(u)).collect();
    let am: Vec<Complex<T>> = table.aminus.iter().map(|p| p.eval(u)).collect();
    let bm: Vec<Complex<T>> = table.bminus.iter().map(|p| p.eval(u)).collect();

    let mut cross_wronskian = T::zero();
    let mut normalization = T::zero();
    let mut hid = T::zero();
    let mut conjugate_wronskian = T::zero();

    let w1 = ap[0] / q0;
    let w3 = bp[0] / q0;
    for k in 0..=n {
        let cross = (ap[k] * bm[k] - am[k] * bp[k]) / q[k];
        cross_wronskian = cross_wronskian.max((cross - w1).norm());

        let lhs = q0 * (bm[k].norm_sqr() - am[k].norm_sqr());
        let rhs = qn * (ap[k].norm_sqr() - bp[k].norm_sqr());
        normalization = normalization.max((lhs - q[k]).abs()).max((rhs - q[k]).abs());

        let h_lhs = ap[k].norm_sqr() / q0 + am[k].norm_sqr() / qn;
        let h_rhs = bp[k].norm_sqr() / q0 + bm[k].norm_sqr() / qn;
        hid = hid.max((h_lhs - h_rhs).abs());

        let cross3 = (bp[k] * bm[k].conj() - ap[k] * am[k].conj()) / q[k];
        conjugate_wronskian = conjugate_wronskian.max((cross3 - w3).norm());
    }
    cross_wronskian = cross_wronskian.max((bm[n] / qn - w1).norm());
    conjugate_wronskian = conjugate_wronskian.max((-(am[n].conj()) / qn - w3).norm());

    let inv = T::one() / (q0 * qn);
    let x1 = bp[0].norm_sqr() / (q0 * q0) + inv;
    let x2 = ap[0].norm_sqr() / (q0 * q0);
    let x3 = bm[n].norm_sqr() / (qn * qn);
    let x4 = inv + am[n].norm_sqr() / (qn * qn);
    let kappa_chain = (x1 - x2).abs().max((x3 - x2).abs()).max((x4 - x2).abs());

    let mut l_product = T::zero();
    let mut prod = [[Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())],
        [Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())]];
    for j in 1..=n {
        let lj = build_l(profile, j)?.eval(u);
        prod = mat_mul(&lj, &prod);
        let target = [[bm[j].conj(), am[j]], [am[j].conj(), bm[j]]];
        l_product = l_product.max(mat_diff(&prod, &target));
    }

    let mut r_product = T::zero();
    let mut rprod = [[Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())],
        [Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())]];
    for l in (0..n).rev() {
        let rl = build_r(profile, l + 1)?.eval(u);
        rprod = mat_mul(&rl, &rprod);
        let target = [[ap[l], bp[l].conj()], [bp[l], ap[l].conj()]];
        r_product = r_product.max(mat_diff(&rprod, &target));
    }

    Ok(IdentityResiduals {
        cross_wronskian,
        normalization,
        mixed_modulus: hid,
        conjugate_wronskian,
        kappa_chain,
        l_product,
        r_product,
    })
}

fn mat_mul<T: Scalar>(a: &[[Complex<T>; 2]; 2], b: &[[Complex<T>; 2]; 2]) -> [[Complex<T>; 2]; 2] {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_diff<T: Scalar>(a: &[[Complex<T>; 2]; 2], b: &[[Complex<T>; 2]; 2]) -> T {
    let mut m = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// `Π_k (1 + q_{k-1}/q_k) + 1`, a proven sup bound for `|Φ^+|`.
pub fn uniform_bound_plus<T: Scalar>(profile: &BandwidthProfile<T>) -> T {
    let q = profile.q();
    let mut prod = T::one();
    for k in 1..q.len() {
        prod = prod * (T::one() + q[k - 1] / q[k]);
    }
    prod + T::one()
}

/// Same bound with inverted ratios, valid for `|Φ^-|`.
pub fn uniform_bound_minus<T: Scalar>(profile: &BandwidthProfile<T>) -> T {
    let q = profile.q();
    let mut prod = T::one();
    for k in 1..q.len() {
        prod = prod * (T::one() + q[k] / q[k - 1]);
    }
    prod + T::one()
}
