//! Proximal operators and the small linear-system kernel shared by both
//! ADMM solvers.
//!
//! The solvers repeatedly solve systems of the form `(AᵀA + ρI) x = rhs`.
//! [`FactoredSystem`] factors that matrix once and reuses the factorization
//! across iterations; for wide matrices (rows < cols) it factors the smaller
//! dual system `(ρI + AAᵀ)` instead and recovers the primal solve through the
//! matrix inversion lemma.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{invalid_argument, CoreError, Result};

/// Column vector of `f64`, used for weights, responses and ADMM iterates.
pub type Vector = DVector<f64>;

/// Dense row-major matrix of `f64`.
pub type Matrix = DMatrix<f64>;

pub(crate) fn ensure_finite(v: &Vector, what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return invalid_argument(format!("{what} contains a non-finite entry"));
    }
    Ok(())
}

pub(crate) fn ensure_finite_matrix(a: &Matrix, what: &str) -> Result<()> {
    if a.iter().any(|x| !x.is_finite()) {
        return invalid_argument(format!("{what} contains a non-finite entry"));
    }
    Ok(())
}

/// Elementwise soft-thresholding, the proximal operator of `kappa·|z|₁`:
/// `r_i = sign(v_i) · max(|v_i| − kappa, 0)`.
pub fn soft_threshold(v: &Vector, kappa: f64) -> Result<Vector> {
    ensure_finite(v, "soft_threshold input")?;
    if !(kappa >= 0.0) {
        return invalid_argument(format!("kappa must be nonnegative, got {kappa}"));
    }
    Ok(v.map(|x| {
        if x > kappa {
            x - kappa
        } else if x < -kappa {
            x + kappa
        } else {
            0.0
        }
    }))
}

/// Block shrinkage, the proximal operator of `kappa·‖z‖₂`:
/// returns `max(1 − kappa/‖v‖₂, 0) · v`, and the zero vector when
/// `‖v‖₂ ≤ kappa` (including `v = 0`, which never divides by zero).
pub fn group_shrink(v: &Vector, kappa: f64) -> Result<Vector> {
    ensure_finite(v, "group_shrink input")?;
    if !(kappa >= 0.0) {
        return invalid_argument(format!("kappa must be nonnegative, got {kappa}"));
    }
    let norm = v.norm();
    if norm <= kappa {
        return Ok(Vector::zeros(v.len()));
    }
    Ok(v * (1.0 - kappa / norm))
}

/// Reusable factorization of `(AᵀA + ρI)`.
///
/// When `rows < cols` the primal matrix is large but low-rank-plus-identity,
/// so the dual-sized system `(ρI + AAᵀ)` is factored instead and solves go
/// through the identity `(ρI + AᵀA)⁻¹ r = (r − Aᵀ(ρI + AAᵀ)⁻¹ A r) / ρ`.
pub struct FactoredSystem {
    form: Form,
    rho: f64,
    dim: usize,
}

enum Form {
    /// Cholesky of the `cols × cols` matrix `AᵀA + ρI`.
    Primal(Cholesky<f64, Dyn>),
    /// Cholesky of the `rows × rows` matrix `ρI + AAᵀ`, plus `A` itself.
    Dual { chol: Cholesky<f64, Dyn>, a: Matrix },
}

impl FactoredSystem {
    /// Factors `(AᵀA + ρI)` for repeated solves. Requires `rho > 0`.
    pub fn factor(a: &Matrix, rho: f64) -> Result<Self> {
        ensure_finite_matrix(a, "coefficient matrix")?;
        if !(rho > 0.0) {
            return invalid_argument(format!("rho must be positive, got {rho}"));
        }
        let (rows, cols) = a.shape();
        let form = if rows < cols {
            let mut gram = a * a.transpose();
            for i in 0..rows {
                gram[(i, i)] += rho;
            }
            let chol = Cholesky::new(gram).ok_or_else(|| {
                CoreError::InvalidArgument("dual normal equations are not positive definite".into())
            })?;
            Form::Dual { chol, a: a.clone() }
        } else {
            let mut gram = a.tr_mul(a);
            for i in 0..cols {
                gram[(i, i)] += rho;
            }
            let chol = Cholesky::new(gram).ok_or_else(|| {
                CoreError::InvalidArgument("normal equations are not positive definite".into())
            })?;
            Form::Primal(chol)
        };
        Ok(Self {
            form,
            rho,
            dim: cols,
        })
    }

    /// Dimension of the solve (number of columns of `A`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `(AᵀA + ρI) x = rhs`.
    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        ensure_finite(rhs, "solve rhs")?;
        if rhs.len() != self.dim {
            return invalid_argument(format!(
                "rhs length {} does not match system dimension {}",
                rhs.len(),
                self.dim
            ));
        }
        match &self.form {
            Form::Primal(chol) => Ok(chol.solve(rhs)),
            Form::Dual { chol, a } => {
                let ar = a * rhs;
                let inner = chol.solve(&ar);
                let correction = a.tr_mul(&inner);
                Ok((rhs - correction) / self.rho)
            }
        }
    }
}
