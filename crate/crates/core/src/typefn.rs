//! Scalar functions of the type coordinate `u ∈ [0,1]`.
//!
//! Reservation utilities, initial-law means and standard deviations, and the
//! profiles of separable interaction families are all supplied in one of
//! three forms: a constant, an affine map `a + b·u`, or a per-block table.
//! All three have trivially checkable block-Lipschitz constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::block_of;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum TypeFn {
    Constant { value: f64 },
    Affine { a: f64, b: f64 },
    /// Piecewise constant: `breaks` are the interior breakpoints in (0,1),
    /// `values` has one entry per block (half-open blocks, `u = 0` belongs
    /// to the first).
    Table { breaks: Vec<f64>, values: Vec<f64> },
}

impl TypeFn {
    pub fn constant(value: f64) -> Self {
        TypeFn::Constant { value }
    }

    pub fn affine(a: f64, b: f64) -> Self {
        TypeFn::Affine { a, b }
    }

    pub fn table(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: format!(
                    "{} breakpoints require {} values, got {}",
                    breaks.len(),
                    breaks.len() + 1,
                    values.len()
                ),
            });
        }
        if !breaks.windows(2).all(|w| w[0] < w[1])
            || breaks.iter().any(|b| !(*b > 0.0 && *b < 1.0))
        {
            return Err(Error::InvalidParameter {
                name: "table.breaks",
                reason: "breakpoints must be strictly increasing inside (0,1)".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "table.values",
                reason: "values must be finite".into(),
            });
        }
        Ok(TypeFn::Table { breaks, values })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TypeFn::Constant { value } if !value.is_finite() => Err(Error::InvalidParameter {
                name: "constant.value",
                reason: "must be finite".into(),
            }),
            TypeFn::Affine { a, b } if !(a.is_finite() && b.is_finite()) => {
                Err(Error::InvalidParameter {
                    name: "affine",
                    reason: "coefficients must be finite".into(),
                })
            }
            TypeFn::Table { breaks, values } => {
                Self::table(breaks.clone(), values.clone()).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            TypeFn::Constant { value } => *value,
            TypeFn::Affine { a, b } => a + b * u,
            TypeFn::Table { breaks, values } => {
                let mut full = Vec::with_capacity(breaks.len() + 2);
                full.push(0.0);
                full.extend_from_slice(breaks);
                full.push(1.0);
                values[block_of(&full, u)]
            }
        }
    }

    /// Interior breakpoints (empty for constant and affine forms).
    pub fn breaks(&self) -> &[f64] {
        match self {
            TypeFn::Table { breaks, .. } => breaks,
            _ => &[],
        }
    }

    /// Supremum of `|f|` over [0,1], exact for all three forms.
    pub fn sup_abs(&self) -> f64 {
        match self {
            TypeFn::Constant { value } => value.abs(),
            TypeFn::Affine { a, b } => a.abs().max((a + b).abs()),
            TypeFn::Table { values, .. } => {
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
        }
    }

    /// Minimum over [0,1], exact for all three forms.
    pub fn min(&self) -> f64 {
        match self {
            TypeFn::Constant { value } => *value,
            TypeFn::Affine { a, b } => a.min(a + b),
            TypeFn::Table { values, .. } => values.iter().fold(f64::INFINITY, |m, v| m.min(*v)),
        }
    }

    /// Largest sampled difference quotient within blocks, at `mesh` points
    /// per block. Table entries give 0; affine gives |b|. The left endpoint
    /// of a non-first block is sampled one ulp inside (blocks are left-open).
    pub fn max_block_difference_quotient(&self, mesh: usize) -> f64 {
        let breaks = self.breaks();
        let mut full = Vec::with_capacity(breaks.len() + 2);
        full.push(0.0);
        full.extend_from_slice(breaks);
        full.push(1.0);
        let mut worst = 0.0f64;
        for (j, w) in full.windows(2).enumerate() {
            let mut xs = crate::numeric::linspace(w[0], w[1], mesh.max(2));
            if j > 0 {
                xs[0] = xs[0].next_up();
            }
            for pair in xs.windows(2) {
                let dq = (self.eval(pair[1]) - self.eval(pair[0])).abs() / (pair[1] - pair[0]);
                worst = worst.max(dq);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn table_eval_uses_half_open_blocks() {
        let f = TypeFn::table(vec![0.5], vec![1.0, 2.0]).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(0.6), 2.0);
        assert_eq!(f.eval(1.0), 2.0);
    }

    #[test]
    fn table_shape_errors() {
        assert!(TypeFn::table(vec![0.5], vec![1.0]).is_err());
        assert!(TypeFn::table(vec![0.5, 0.4], vec![1.0, 2.0, 3.0]).is_err());
        assert!(TypeFn::table(vec![1.5], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn sup_and_quotients() {
        let f = TypeFn::affine(-1.0, 3.0);
        assert_abs_diff_eq!(f.sup_abs(), 2.0);
        assert_abs_diff_eq!(f.max_block_difference_quotient(16), 3.0, epsilon = 1e-12);
        let t = TypeFn::table(vec![0.3], vec![5.0, -7.0]).unwrap();
        assert_abs_diff_eq!(t.sup_abs(), 7.0);
        assert_abs_diff_eq!(t.max_block_difference_quotient(16), 0.0);
    }
}
