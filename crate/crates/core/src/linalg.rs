//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, with accumulated eigenvectors.
//!
//! Kept in-crate (rather than pulling a linear-algebra stack) so the whole
//! numeric core stays generic over the scalar type.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }
}

/// Eigenvalues (ascending) and the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Row-major `n×n`; column `j` is the eigenvector of `values[j]`.
    vectors: Vec<T>,
    n: usize,
}

impl<T: Scalar> SymEigen<T> {
    pub fn vector(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.vectors[i * self.n + j])
    }

    pub fn lambda_min(&self) -> T {
        self.values[0]
    }

    pub fn lambda_max(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn symmetric_eigen<T: Scalar>(a: &SymMatrix<T>) -> Result<SymEigen<T>> {
    let n = a.n;
    if n == 0 {
        return Err(Error::RankDeficient);
    }
    let mut z = a.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut z, &mut d, &mut e, n);
    tql2(&mut z, &mut d, &mut e, n)?;

    // sort ascending, carrying columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = z[row * n + old_col];
        }
    }
    Ok(SymEigen { values, vectors, n })
}

/// Householder reduction to tridiagonal form with accumulated transforms.
fn tred2<T: Scalar>(z: &mut [T], d: &mut [T], e: &mut [T], n: usize) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let mut scale = T::zero();
            for k in 0..=l {
                scale = scale + z[i * n + k].abs();
            }
            if scale == T::zero() {
                e[i] = z[i * n + l];
            } else {
                for k in 0..=l {
                    z[i * n + k] = z[i * n + k] / scale;
                    h = h + z[i * n + k] * z[i * n + k];
                }
                let f = z[i * n + l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                z[i * n + l] = f - g;
                let mut f_acc = T::zero();
                for j in 0..=l {
                    z[j * n + i] = z[i * n + j] / h;
                    let mut g_acc = T::zero();
                    for k in 0..=j {
                        g_acc = g_acc + z[j * n + k] * z[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g_acc = g_acc + z[k * n + j] * z[i * n + k];
                    }
                    e[j] = g_acc / h;
                    f_acc = f_acc + e[j] * z[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[j * n + k] = z[j * n + k] - (f * e[k] + g * z[i * n + k]);
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g = g + z[i * n + k] * z[k * n + j];
                }
                for k in 0..i {
                    z[k * n + j] = z[k * n + j] - g * z[k * n + i];
                }
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = T::one();
        for j in 0..i {
            z[j * n + i] = T::zero();
            z[i * n + j] = T::zero();
        }
    }
}

/// Implicit-shift QL on the tridiagonal form, rotating the eigenvector
/// columns along.
fn tql2<T: Scalar>(z: &mut [T], d: &mut [T], e: &mut [T], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    // deflate couplings that are negligible against the matrix norm; a
    // locally-relative test stalls on the near-zero clusters these kernel
    // Grams always carry
    let mut anorm = T::zero();
    for i in 0..n {
        anorm = anorm.max(d[i].abs() + e[i].abs());
    }
    let thresh = T::epsilon() * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if e[m].abs() <= thresh {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::InternalConsistency(
                    "QL iteration failed to converge".into(),
                ));
            }
            let two = lit::<T>(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if r == T::zero() && i > l {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
