//! Thomas algorithm and its cyclic (Sherman-Morrison) variant.

use crate::error::{Error, Result};

/// A tridiagonal system `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
///
/// When `cyclic` is set, `sub[0]` couples row 0 to `x[n-1]` and `sup[n-1]`
/// couples the last row to `x[0]`; otherwise those two entries are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
    pub cyclic: bool,
    /// Identifier reported in pivot errors.
    pub line: usize,
}

impl LineSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>, cyclic: bool) -> Self {
        Self { sub, diag, sup, rhs, cyclic, line: 0 }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x` for the stored matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i] * x[i - 1];
                } else if self.cyclic {
                    acc += self.sub[0] * x[n - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                } else if self.cyclic {
                    acc += self.sup[n - 1] * x[0];
                }
                acc
            })
            .collect()
    }
}

/// Solves a (possibly cyclic) tridiagonal system.
pub fn solve_tridiagonal(sys: &LineSystem) -> Result<Vec<f64>> {
    let n = sys.len();
    if n < 3 || sys.sub.len() != n || sys.sup.len() != n || sys.rhs.len() != n {
        return Err(Error::LineTooShort { len: n, min: 3 });
    }
    let factor = if sys.cyclic {
        Factor::cyclic(&sys.sub, &sys.diag, &sys.sup, sys.line)?
    } else {
        Factor::Plain(Thomas::new(&sys.sub, &sys.diag, &sys.sup, sys.line)?)
    };
    let mut x = sys.rhs.clone();
    factor.solve_in_place(&mut x);
    Ok(x)
}

/// Precomputed Thomas elimination for a fixed matrix.
#[derive(Debug, Clone)]
pub(crate) struct Thomas {
    sub: Vec<f64>,
    sup_mod: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Thomas {
    pub(crate) fn new(sub: &[f64], diag: &[f64], sup: &[f64], line: usize) -> Result<Self> {
        let n = diag.len();
        let mut sup_mod = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = if i == 0 { diag[0] } else { diag[i] - sub[i] * prev };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::ZeroPivot { line, row: i });
            }
            inv_pivot[i] = 1.0 / pivot;
            sup_mod[i] = if i + 1 < n { sup[i] * inv_pivot[i] } else { 0.0 };
            prev = sup_mod[i];
        }
        Ok(Self { sub: sub.to_vec(), sup_mod, inv_pivot })
    }

    #[inline]
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        debug_assert_eq!(n, self.inv_pivot.len());
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.sup_mod[i] * x[i + 1];
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Factor {
    Plain(Thomas),
    Cyclic {
        inner: Thomas,
        /// `B^-1 u` for the rank-one correction.
        z: Vec<f64>,
        /// `v[n-1]`; `v[0]` is one.
        v_last: f64,
        denom: f64,
    },
}

impl Factor {
    pub(crate) fn cyclic(sub: &[f64], diag: &[f64], sup: &[f64], line: usize) -> Result<Self> {
        let n = diag.len();
        let corner_top = sub[0];
        let corner_bottom = sup[n - 1];
        let gamma = -diag[0];
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= corner_bottom * corner_top / gamma;
        let inner = Thomas::new(sub, &d, sup, line)?;
        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = corner_bottom;
        inner.solve_in_place(&mut z);
        let v_last = corner_top / gamma;
        let denom = 1.0 + z[0] + v_last * z[n - 1];
        if denom == 0.0 {
            return Err(Error::ZeroPivot { line, row: 0 });
        }
        Ok(Factor::Cyclic { inner, z, v_last, denom })
    }

    #[inline]
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        match self {
            Factor::Plain(t) => t.solve_in_place(x),
            Factor::Cyclic { inner, z, v_last, denom } => {
                inner.solve_in_place(x);
                let n = x.len();
                let scale = (x[0] + v_last * x[n - 1]) / denom;
                for (xi, zi) in x.iter_mut().zip(z) {
                    *xi -= scale * zi;
                }
            }
        }
    }
}
