//! `LDLᵀ` factorization without pivoting, used as a positive semidefiniteness test.
//!
//! Over an exact field the test is a decision procedure: a symmetric matrix
//! is PSD iff elimination never meets a negative pivot, and never meets a
//! zero pivot whose remaining column is nonzero.

use crate::scalar::Scalar;

/// Dense symmetric matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![T::zero(); dim * dim] }
    }

    /// Build from a function of `(i, j)`; only `i <= j` is queried.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.data[j * dim + i] = v.clone();
                m.data[i * dim + j] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.dim + j]
    }

    /// Add `v` to entries `(i, j)` and `(j, i)` (once if `i == j`).
    pub fn add_sym(&mut self, i: usize, j: usize, v: &T) {
        let d = self.dim;
        self.data[i * d + j] = self.data[i * d + j].clone() + v.clone();
        if i != j {
            self.data[j * d + i] = self.data[j * d + i].clone() + v.clone();
        }
    }

    pub fn shift_diagonal(&mut self, by: &T) {
        for i in 0..self.dim {
            self.add_sym(i, i, by);
        }
    }
}

/// Why a matrix failed the PSD test.
#[derive(Clone, Debug, PartialEq)]
pub enum LdlFailure {
    /// Pivot `index` was negative.
    NegativePivot { index: usize },
    /// Pivot `index` was zero but its column below was not.
    ZeroPivot { index: usize },
}

impl LdlFailure {
    /// Leading principal minor at which elimination failed.
    pub fn index(&self) -> usize {
        match *self {
            LdlFailure::NegativePivot { index } | LdlFailure::ZeroPivot { index } => index,
        }
    }
}

/// Result of a successful factorization `M = L D Lᵀ`, `L` unit lower triangular.
#[derive(Clone, Debug)]
pub struct Ldl<T> {
    dim: usize,
    lower: Vec<T>,
    pivots: Vec<T>,
}

impl<T: Scalar> Ldl<T> {
    /// Factor `m`. For inexact `T`, pivots at or below `tolerance` count as zero.
    pub fn factor(m: &SymMatrix<T>, tolerance: &T) -> Result<Self, LdlFailure> {
        let n = m.dim;
        let mut a = m.data.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let d = a[k * n + k].clone();
            let zero_like = if T::EXACT { d.is_zero() } else { d.abs() <= *tolerance };
            if zero_like {
                let column_clear = (k + 1..n).all(|i| {
                    let v = &a[i * n + k];
                    if T::EXACT {
                        v.is_zero()
                    } else {
                        v.abs() <= *tolerance
                    }
                });
                if !column_clear {
                    return Err(LdlFailure::ZeroPivot { index: k });
                }
                for i in k + 1..n {
                    a[i * n + k] = T::zero();
                }
                pivots.push(T::zero());
                continue;
            }
            if d < T::zero() {
                return Err(LdlFailure::NegativePivot { index: k });
            }
            let col: Vec<T> = (k + 1..n).map(|i| a[i * n + k].clone()).collect();
            for i in k + 1..n {
                let lik = col[i - k - 1].clone() / d.clone();
                if !lik.is_zero() {
                    // Update the trailing block's lower triangle only.
                    for j in k + 1..=i {
                        let akj = &col[j - k - 1];
                        if !akj.is_zero() {
                            a[i * n + j] = a[i * n + j].clone() - lik.clone() * akj.clone();
                        }
                    }
                }
                a[i * n + k] = lik;
            }
            pivots.push(d);
        }
        let mut lower = vec![T::zero(); n * n];
        for i in 0..n {
            lower[i * n + i] = T::one();
            for j in 0..i {
                lower[i * n + j] = a[i * n + j].clone();
            }
        }
        Ok(Ldl { dim: n, lower, pivots })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pivots(&self) -> &[T] {
        &self.pivots
    }

    pub fn lower(&self, i: usize, j: usize) -> &T {
        &self.lower[i * self.dim + j]
    }

    /// Rebuild `L D Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let n = self.dim;
        SymMatrix::from_fn(n, |i, j| {
            (0..=i.min(j)).fold(T::zero(), |acc, k| {
                acc + self.lower(i, k).clone() * self.pivots[k].clone() * self.lower(j, k).clone()
            })
        })
    }
}

/// PSD test in exact arithmetic.
pub fn is_psd_exact<T: Scalar>(m: &SymMatrix<T>) -> Result<(), LdlFailure> {
    Ldl::factor(m, &T::zero()).map(|_| ())
}
