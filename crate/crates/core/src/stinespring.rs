//! Stinespring dilation of π and ⋆ on K = ℓ₂(G) ⊗ H ⊗ ℓ₂(G).
//!
//! Basis vector `x_a ⊗ ξ_i ⊗ x_b` of K sits at index `a·(d·n) + b·d + i`, so the
//! amplification ρ(Z) = I ⊗ Z is block diagonal with n copies of Z. V and F are
//! materialized as 0/1 matrices and every formula below is a literal product.

use std::sync::Arc;

use serde::Serialize;

use crate::crossed::{expect_hg, ConcreteOperator, Space};
use crate::error::{Error, Result};
use crate::numerics::{
    polar_partial_isometry, psd_sqrt, spectral_norm, CMatrix, Side, C64, DEFAULT_PINV_CUTOFF,
};
use crate::system::DynamicalSystem;

/// Default bound on dim K = n²·d.
pub const DEFAULT_SIZE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct StinespringSpace {
    system: Arc<DynamicalSystem>,
    v: CMatrix,
    f: CMatrix,
}

/// Residual of one structural identity of the dilation space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceCheck {
    pub name: &'static str,
    pub residual: f64,
}

impl StinespringSpace {
    pub fn build(system: Arc<DynamicalSystem>) -> Result<Self> {
        Self::build_with_limit(system, DEFAULT_SIZE_LIMIT)
    }

    pub fn build_with_limit(system: Arc<DynamicalSystem>, limit: usize) -> Result<Self> {
        let (n, d) = (system.order(), system.dim());
        let dim_k = n * n * d;
        if dim_k > limit {
            return Err(Error::TooLarge { dim: dim_k, limit });
        }
        let one = C64::new(1.0, 0.0);
        let mut v = CMatrix::zeros(dim_k, n * d);
        for g in 0..n {
            for i in 0..d {
                v[(k_index(n, d, g, i, g), g * d + i)] = one;
            }
        }
        let mut f = CMatrix::zeros(dim_k, dim_k);
        for a in 0..n {
            for b in 0..n {
                for i in 0..d {
                    f[(k_index(n, d, b, i, a), k_index(n, d, a, i, b))] = one;
                }
            }
        }
        let space = StinespringSpace { system, v, f };
        if let Some(bad) = space.structural_checks().into_iter().find(|c| c.residual != 0.0) {
            return Err(Error::invalid(format!("dilation space invariant {} failed", bad.name)));
        }
        Ok(space)
    }

    /// Assemble a space from explicit V and F without any checks. Corruption tests only.
    #[doc(hidden)]
    pub fn from_parts_unchecked(system: Arc<DynamicalSystem>, v: CMatrix, f: CMatrix) -> Self {
        StinespringSpace { system, v, f }
    }

    pub fn system(&self) -> &Arc<DynamicalSystem> {
        &self.system
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn f(&self) -> &CMatrix {
        &self.f
    }

    /// Index of `x_a ⊗ ξ_i ⊗ x_b` in K.
    pub fn index(&self, a: usize, i: usize, b: usize) -> usize {
        k_index(self.system.order(), self.system.dim(), a, i, b)
    }

    /// V*V = I, F = F*, F² = I and FV = V, as Frobenius residuals (exactly 0 when intact).
    pub fn structural_checks(&self) -> Vec<SpaceCheck> {
        let id_hg = CMatrix::identity(self.v.cols());
        let id_k = CMatrix::identity(self.f.rows());
        vec![
            SpaceCheck {
                name: "isometry",
                residual: (&self.v.adjoint() * &self.v).frobenius_distance(&id_hg),
            },
            SpaceCheck {
                name: "flip_self_adjoint",
                residual: self.f.hermitian_defect(),
            },
            SpaceCheck {
                name: "flip_involution",
                residual: (&self.f * &self.f).frobenius_distance(&id_k),
            },
            SpaceCheck {
                name: "flip_fixes_diagonal",
                residual: (&self.f * &self.v).frobenius_distance(&self.v),
            },
        ]
    }

    /// ρ(Z) = I_{ℓ₂(G)} ⊗ Z.
    pub fn rho(&self, z: &ConcreteOperator) -> Result<ConcreteOperator> {
        expect_hg(&self.system, z)?;
        let amplified = CMatrix::identity(self.system.order()).kron(z.matrix());
        ConcreteOperator::new(&self.system, Space::K, amplified)
    }

    /// V* ρ(Z) V.
    pub fn cond_exp_dilated(&self, z: &ConcreteOperator) -> Result<ConcreteOperator> {
        let r = self.rho(z)?;
        let out = &self.v.adjoint() * &(r.matrix() * &self.v);
        ConcreteOperator::hg(&self.system, out)
    }

    /// V* ρ(X) F ρ(Y) V.
    pub fn hadamard_dilated(&self, zx: &ConcreteOperator, zy: &ConcreteOperator) -> Result<ConcreteOperator> {
        let rx = self.rho(zx)?;
        let ry = self.rho(zy)?;
        let right = &self.f * &(ry.matrix() * &self.v);
        let out = &self.v.adjoint() * &(rx.matrix() * &right);
        ConcreteOperator::hg(&self.system, out)
    }

    /// Factor X ⋆ Y = π(XX*)^{1/2} S π(Y*Y)^{1/2} with S = W_X F W_Y, where W_Y and W_X
    /// are the polar partial isometries of ρ(Y)V and V*ρ(X).
    pub fn factor_contraction(
        &self,
        zx: &ConcreteOperator,
        zy: &ConcreteOperator,
    ) -> Result<(CMatrix, FactorReport)> {
        self.factor_contraction_with_cutoff(zx, zy, DEFAULT_PINV_CUTOFF)
    }

    pub fn factor_contraction_with_cutoff(
        &self,
        zx: &ConcreteOperator,
        zy: &ConcreteOperator,
        cutoff: f64,
    ) -> Result<(CMatrix, FactorReport)> {
        let ry_v = self.rho(zy)?.matrix() * &self.v;
        let v_rx = &self.v.adjoint() * self.rho(zx)?.matrix();

        let p = psd_sqrt(self.cond_exp_dilated(&zy.adjoint().compose(zy)?)?.matrix())?;
        let q = psd_sqrt(self.cond_exp_dilated(&zx.compose(&zx.adjoint())?)?.matrix())?;

        let w_y = polar_partial_isometry(&ry_v, &p, Side::Right, cutoff)?;
        let w_x = polar_partial_isometry(&v_rx, &q, Side::Left, cutoff)?;
        let s = &w_x * &(&self.f * &w_y);

        let product = self.hadamard_dilated(zx, zy)?;
        let reconstructed = &q * &(&s * &p);
        let report = FactorReport {
            sigma_max: spectral_norm(&s)?,
            residual: reconstructed.frobenius_distance(product.matrix()),
            product_norm: product.matrix().frobenius_norm(),
            w_x_norm: spectral_norm(&w_x)?,
            w_y_norm: spectral_norm(&w_y)?,
        };
        Ok((s, report))
    }
}

fn k_index(n: usize, d: usize, a: usize, i: usize, b: usize) -> usize {
    a * (d * n) + b * d + i
}

/// Diagnostics of [`StinespringSpace::factor_contraction`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    /// σ_max(S).
    pub sigma_max: f64,
    /// ‖π(XX*)^{1/2} S π(Y*Y)^{1/2} − X⋆Y‖_F.
    pub residual: f64,
    /// ‖X⋆Y‖_F, the scale for `residual`.
    pub product_norm: f64,
    pub w_x_norm: f64,
    pub w_y_norm: f64,
}
