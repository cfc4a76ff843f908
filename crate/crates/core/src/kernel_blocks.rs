//! The nine closed-form kernel blocks for two symmetric jumps at ±T/2 with
//! `Λ = [0, Ω]`, written out term by term with no algebraic re-grouping.
//!
//! Conventions: `q = (q_0, q_1, q_2)`, `t` is the middle-interval length,
//! `w = Ω^{1/2}`, `jr` evaluates the real part of `J`. Off-diagonal blocks
//! with `j > l` are obtained from their transposes by the kernel symmetry
//! `k_{jl}(x, y) = k_{lj}(y, x)`.

use crate::error::Result;
use crate::scalar::{lit, sinc, Scalar};

type Jr<'a, T> = &'a dyn Fn(T) -> Result<T>;

/// Evaluate block `(j, l)` at `(x, y)`.
#[allow(clippy::too_many_arguments)]
pub fn closed_block<T: Scalar>(
    jr: Jr<'_, T>,
    q: [T; 3],
    t: T,
    w: T,
    j: usize,
    l: usize,
    x: T,
    y: T,
) -> Result<T> {
    match (j, l) {
        (0, 0) => k00(jr, q, t, w, x, y),
        (1, 1) => k11(jr, q, t, x, y),
        (2, 2) => k22(jr, q, t, w, x, y),
        (0, 1) => k01(jr, q, t, x, y),
        (1, 0) => k01(jr, q, t, y, x),
        (0, 2) => k02(jr, q, t, x, y),
        (2, 0) => k02(jr, q, t, y, x),
        (1, 2) => k12(jr, q, t, x, y),
        (2, 1) => k12(jr, q, t, y, x),
        _ => unreachable!("block indices are 0..=2"),
    }
}

fn k00<T: Scalar>(jr: Jr<'_, T>, q: [T; 3], t: T, w: T, x: T, y: T) -> Result<T> {
    let [q0, q1, q2] = q;
    let one = T::one();
    let four = lit::<T>(4.0);
    let eight = lit::<T>(8.0);
    let two = lit::<T>(2.0);
    let base = q0 * (x + y + t);
    Ok(q0 * w / T::PI() * sinc(q0 * w * (x - y))
        + (one - q0 * q0 / (q1 * q1)) * (one + q1 * q1 / (q2 * q2)) / (four * q0) * jr(base)?
        + (one - q0 / q1) * (one - q0 / q1) * (one - q1 * q1 / (q2 * q2)) / (eight * q0)
            * jr(base + two * q1 * t)?
        + (one + q0 / q1) * (one + q0 / q1) * (one - q1 * q1 / (q2 * q2)) / (eight * q0)
            * jr(base - two * q1 * t)?)
}

fn k11<T: Scalar>(jr: Jr<'_, T>, q: [T; 3], t: T, x: T, y: T) -> Result<T> {
    let [q0, q1, q2] = q;
    let one = T::one();
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    Ok(
        half * ((one + q1 * q1 / (q2 * q2)) / q0 + (one + q1 * q1 / (q0 * q0)) / q2)
            * jr(q1 * (x - y))?
            + (one - q1 * q1 / (q2 * q2)) / (two * q0) * jr(q1 * (x + y - t))?
            + (one - q1 * q1 / (q0 * q0)) / (two * q2) * jr(q1 * (x + y + t))?,
    )
}

fn k22<T: Scalar>(jr: Jr<'_, T>, q: [T; 3], t: T, w: T, x: T, y: T) -> Result<T> {
    let [q0, q1, q2] = q;
    let one = T::one();
    let four = lit::<T>(4.0);
    let eight = lit::<T>(8.0);
    let two = lit::<T>(2.0);
    let base = q2 * (x + y - t);
    Ok(q2 * w / T::PI() * sinc(q2 * w * (x - y))
        + (one + q1 * q1 / (q0 * q0)) * (one - q2 * q2 / (q1 * q1)) / (four * q2) * jr(base)?
        + (one - q1 * q1 / (q0 * q0)) * (one - q2 / q1) * (one - q2 / q1) / (eight * q2)
            * jr(base - two * q1 * t)?
        + (one - q1 * q1 / (q0 * q0)) * (one + q2 / q1) * (one + q2 / q1) / (eight * q2)
            * jr(base + two * q1 * t)?)
}

fn k01<T: Scalar>(jr: Jr<'_, T>, q: [T; 3], t: T, x: T, y: T) -> Result<T> {
    let [q0, q1, q2] = q;
    let one = T::one();
    let four = lit::<T>(4.0);
    let half_t = t / lit::<T>(2.0);
    let three_half_t = lit::<T>(1.5) * t;
    let xs = q0 * (x + half_t);
    Ok(
        (one + q0 / q1) * (one + q1 / q2) * (one + q1 / q2) / (four * q0)
            * jr(xs - q1 * (y + half_t))?
            + (one - q0 / q1) * (one - q1 / q2) * (one - q1 / q2) / (four * q0)
                * jr(xs + q1 * (y + half_t))?
            + (one + q0 / q1) * (one - q1 * q1 / (q2 * q2)) / (four * q0)
                * jr(xs + q1 * (y - three_half_t))?
            + (one - q0 / q1) * (one - q1 * q1 / (q2 * q2)) / (four * q0)
                * jr(xs - q1 * (y - three_half_t))?,
    )
}

fn k02<T: Scalar>(jr: Jr<'_, T>, q: [T; 3], t: T, x: T, y: T) -> Result<T> {
    let [q0, q1, q2] = q;
    let one = T::one();
    let two = lit::<T>(2.0);
    let half_t = t / two;
    let xs = q0 * (x + half_t);
    let ys = q2 * (y - half_t);
    Ok(
        (one - q0 / q1) * (one - q1 / q2) / (two * q0) * jr(xs + q1 * t - ys)?
            + (one + q0 / q1) * (one + q1 / q2) / (two * q0) * jr(xs - q1 * t - ys)?,
    )
}

fn k12<T: Scalar>(jr: Jr<'_, T>, q: [T; 3], t: T, x: T, y: T) -> Result<T> {
    let [q0, q1, q2] = q;
    let one = T::one();
    let four = lit::<T>(4.0);
    let half_t = t / lit::<T>(2.0);
    let three_half_t = lit::<T>(1.5) * t;
    let ys = q2 * (y - half_t);
    Ok(
        (one + q1 / q0) * (one + q1 / q0) * (one + q2 / q1) / (four * q2)
            * jr(q1 * (x - half_t) - ys)?
            + (one - q1 / q0) * (one - q1 / q0) * (one - q2 / q1) / (four * q2)
                * jr(q1 * (x - half_t) + ys)?
            + (one - q1 * q1 / (q0 * q0)) * (one + q2 / q1) / (four * q2)
                * jr(q1 * (x + three_half_t) + ys)?
            + (one - q1 * q1 / (q0 * q0)) * (one - q2 / q1) / (four * q2)
                * jr(q1 * (x + three_half_t) - ys)?,
    )
}
