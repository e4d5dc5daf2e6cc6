//! Hadamard products in reduced crossed products `C*_r(A, α, G)` of finite groups
//! acting on finite-dimensional matrix algebras.
//!
//! Elements of the crossed product are stored through their Fourier coefficients
//! `X_g = π(L_g* X)`. The Hadamard product `(X ⋆ Y)_g = X_g Y_g` is available both
//! coefficientwise ([`crossed::hadamard_coeffs`]) and through its Stinespring
//! dilation `V* ρ(X) F ρ(Y) V` ([`stinespring`]), and [`verify`] checks the
//! identities and inequalities relating them.

pub mod crossed;
pub mod error;
pub mod group;
pub mod instance;
pub mod numerics;
pub mod rng;
pub mod schur;
pub mod stinespring;
pub mod system;
pub mod verify;

pub use error::{Error, GroupAxiom, Result};
pub use group::{GroupSpec, GroupTable};
pub use numerics::{CMatrix, C64};
pub use rng::SeededRng;
pub use system::{DynamicalSystem, SystemSpec};
