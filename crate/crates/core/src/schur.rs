//! Block matrices in M_n(M_d) as elements of ℓ_∞(C_n, M_d) ⋊ C_n, and the
//! entrywise (Schur) product seen as a Hadamard product.
//!
//! Coefficient `X_g` is the block-diagonal matrix whose block `l` is
//! `a_{(l+g) mod n, l}`; conversely `a_{k,l}` is block `l` of `X_{(k−l) mod n}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::crossed::{analyze, hadamard_coeffs, mult_coeffs, synthesize, CPElement};
use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::rng::SeededRng;
use crate::stinespring::StinespringSpace;
use crate::system::{AlgebraKind, DynamicalSystem};
use crate::verify::CheckEntry;

/// An `n × n` array of `d × d` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockMatrixSpec", into = "BlockMatrixSpec")]
pub struct BlockMatrix {
    n: usize,
    d: usize,
    blocks: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockMatrixSpec {
    n: usize,
    d: usize,
    blocks: Vec<Vec<CMatrix>>,
}

impl TryFrom<BlockMatrixSpec> for BlockMatrix {
    type Error = Error;

    fn try_from(spec: BlockMatrixSpec) -> Result<Self> {
        BlockMatrix::new(spec.n, spec.d, spec.blocks)
    }
}

impl From<BlockMatrix> for BlockMatrixSpec {
    fn from(b: BlockMatrix) -> Self {
        let blocks = (0..b.n).map(|k| (0..b.n).map(|l| b.block(k, l).clone()).collect()).collect();
        BlockMatrixSpec { n: b.n, d: b.d, blocks }
    }
}

impl BlockMatrix {
    pub fn new(n: usize, d: usize, blocks: Vec<Vec<CMatrix>>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid("block matrix needs n ≥ 1 and d ≥ 1"));
        }
        if blocks.len() != n || blocks.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(format!("expected {n}×{n} blocks")));
        }
        let flat: Vec<CMatrix> = blocks.into_iter().flatten().collect();
        if let Some(k) = flat.iter().position(|b| b.shape() != (d, d)) {
            return Err(Error::invalid(format!(
                "block ({}, {}) has shape {:?}, expected {d}×{d}",
                k / n,
                k % n,
                flat[k].shape()
            )));
        }
        Ok(BlockMatrix { n, d, blocks: flat })
    }

    /// Read the `n × n` block structure off an `nd × nd` matrix.
    pub fn from_matrix(n: usize, d: usize, m: &CMatrix) -> Result<Self> {
        if n == 0 || d == 0 || m.shape() != (n * d, n * d) {
            return Err(Error::invalid(format!("matrix of shape {:?} is not {n}×{n} blocks of size {d}", m.shape())));
        }
        let blocks = (0..n)
            .map(|k| (0..n).map(|l| m.block(k * d, l * d, d, d)).collect())
            .collect();
        Self::new(n, d, blocks)
    }

    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(usize, usize) -> CMatrix) -> Result<Self> {
        Self::new(n, d, (0..n).map(|k| (0..n).map(|l| f(k, l)).collect()).collect())
    }

    pub fn random(n: usize, d: usize, rng: &mut SeededRng) -> Result<Self> {
        Self::from_fn(n, d, |_, _| rng.complex_matrix(d, d))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block(&self, k: usize, l: usize) -> &CMatrix {
        &self.blocks[k * self.n + l]
    }

    pub fn to_matrix(&self) -> CMatrix {
        let (n, d) = (self.n, self.d);
        let mut m = CMatrix::zeros(n * d, n * d);
        for k in 0..n {
            for l in 0..n {
                m.set_block(k * d, l * d, self.block(k, l));
            }
        }
        m
    }

    /// Ordinary matrix product in M_n(M_d).
    pub fn matmul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.same_shape(other)?;
        Self::from_matrix(self.n, self.d, &(&self.to_matrix() * &other.to_matrix()))
    }

    pub fn max_block_distance(&self, other: &BlockMatrix) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.frobenius_distance(b))
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }

    fn same_shape(&self, other: &BlockMatrix) -> Result<()> {
        if (self.n, self.d) != (other.n, other.d) {
            return Err(Error::invalid(format!(
                "block shapes differ: (n, d) = ({}, {}) vs ({}, {})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }
}

/// Blockwise product `[a_{kl} b_{kl}]`.
pub fn schur_product(a: &BlockMatrix, b: &BlockMatrix) -> Result<BlockMatrix> {
    a.same_shape(b)?;
    Ok(BlockMatrix {
        n: a.n,
        d: a.d,
        blocks: a.blocks.iter().zip(&b.blocks).map(|(x, y)| x * y).collect(),
    })
}

fn check_diagonal_system(system: &DynamicalSystem, n: usize, d: usize) -> Result<()> {
    match system.kind() {
        AlgebraKind::Diagonal { blocks } if blocks == n && system.order() == n && system.dim() == n * d => Ok(()),
        kind => Err(Error::invalid(format!(
            "expected the diagonal system ℓ_∞(C_{n}, M_{d}), got {kind:?} with |G| = {} and dim {}",
            system.order(),
            system.dim()
        ))),
    }
}

fn block_size(system: &DynamicalSystem) -> Result<(usize, usize)> {
    match system.kind() {
        AlgebraKind::Diagonal { blocks } if blocks == system.order() => Ok((blocks, system.dim() / blocks)),
        kind => Err(Error::invalid(format!(
            "block matrices correspond only to the diagonal system over C_n, got {kind:?} with |G| = {}",
            system.order()
        ))),
    }
}

/// Coefficients of `a` over `system`, which must be `DynamicalSystem::diagonal(n, d)`.
pub fn block_to_coeffs(a: &BlockMatrix, system: &Arc<DynamicalSystem>) -> Result<CPElement> {
    let (n, d) = (a.n, a.d);
    check_diagonal_system(system, n, d)?;
    let coeffs = (0..n)
        .map(|g| {
            let mut c = CMatrix::zeros(n * d, n * d);
            for l in 0..n {
                c.set_block(l * d, l * d, a.block((l + g) % n, l));
            }
            c
        })
        .collect();
    CPElement::new_unchecked(Arc::clone(system), coeffs)
}

/// Inverse of [`block_to_coeffs`]. Only the diagonal blocks of each coefficient are read.
pub fn coeffs_to_block(x: &CPElement) -> Result<BlockMatrix> {
    let (n, d) = block_size(x.system())?;
    BlockMatrix::from_fn(n, d, |k, l| {
        let g = (k + n - l) % n;
        x.coeff(g).block(l * d, l * d, d, d)
    })
}

/// The covariant representation Σ_g U_g X_g on C^n ⊗ C^d; it equals the
/// block matrix of `x` assembled as an `nd × nd` matrix.
pub fn represent(x: &CPElement) -> CMatrix {
    let ds = x.system();
    let dim = ds.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for g in ds.group().elements() {
        m += &(ds.unitary(g) * x.coeff(g));
    }
    m
}

/// Agreement of the direct Schur product with the coefficient Hadamard product
/// and with the Hadamard product computed on the dilation space.
pub fn check_schur_equivalence(a: &BlockMatrix, b: &BlockMatrix) -> Result<CheckEntry> {
    a.same_shape(b)?;
    let system = Arc::new(DynamicalSystem::diagonal(a.n, a.d)?);
    let space = StinespringSpace::build(Arc::clone(&system))?;
    schur_equivalence_on(&space, a, b)
}

/// As [`check_schur_equivalence`], reusing a dilation space built over the diagonal system.
pub fn schur_equivalence_on(space: &StinespringSpace, a: &BlockMatrix, b: &BlockMatrix) -> Result<CheckEntry> {
    a.same_shape(b)?;
    let system = space.system();
    let direct = schur_product(a, b)?;
    let x = block_to_coeffs(a, system)?;
    let y = block_to_coeffs(b, system)?;
    let via_coeffs = coeffs_to_block(&hadamard_coeffs(&x, &y)?)?;
    let dilated = space.hadamard_dilated(&synthesize(&x), &synthesize(&y))?;
    let via_dilation = coeffs_to_block(&analyze(system, &dilated)?)?;
    let dev_c = via_coeffs.max_block_distance(&direct);
    let dev_d = via_dilation.max_block_distance(&direct);
    Ok(CheckEntry::equality(
        "schur_equivalence",
        dev_c.max(dev_d),
        1e-9 * (1.0 + direct.frobenius_norm()),
        format!("n = {}, d = {}: coefficients {dev_c:.3e}, dilation {dev_d:.3e}", a.n, a.d),
    ))
}

/// The identification turns crossed-product multiplication into block-matrix multiplication.
pub fn check_intertwining(a: &BlockMatrix, b: &BlockMatrix) -> Result<CheckEntry> {
    a.same_shape(b)?;
    let system = Arc::new(DynamicalSystem::diagonal(a.n, a.d)?);
    let x = block_to_coeffs(a, &system)?;
    let y = block_to_coeffs(b, &system)?;
    let product = a.matmul(b)?;
    let via_coeffs = coeffs_to_block(&mult_coeffs(&x, &y)?)?;
    let dev = via_coeffs.max_block_distance(&product);
    Ok(CheckEntry::equality(
        "schur_intertwining",
        dev,
        1e-9 * (1.0 + product.frobenius_norm()),
        format!("n = {}, d = {}", a.n, a.d),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;
    use proptest::prelude::*;

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_real_rows(rows)
    }

    #[test]
    fn two_by_two_scalars() {
        let a = BlockMatrix::from_matrix(2, 1, &real(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        let system = Arc::new(DynamicalSystem::diagonal(2, 1).unwrap());
        let x = block_to_coeffs(&a, &system).unwrap();
        assert_eq!(x.coeff(0), &CMatrix::diag_real(&[1.0, 4.0]));
        assert_eq!(x.coeff(1), &CMatrix::diag_real(&[3.0, 2.0]));
        assert_eq!(coeffs_to_block(&x).unwrap(), a);
        assert!((&represent(&x) - &a.to_matrix()).is_zero());

        let b = BlockMatrix::from_matrix(2, 1, &real(&[&[5.0, 6.0], &[7.0, 8.0]])).unwrap();
        let s = schur_product(&a, &b).unwrap();
        assert_eq!(s.to_matrix(), real(&[&[5.0, 12.0], &[21.0, 32.0]]));
        assert!(check_schur_equivalence(&a, &b).unwrap().pass);
    }

    #[test]
    fn identity_and_ones() {
        let mut rng = SeededRng::new(3);
        let a = BlockMatrix::random(3, 2, &mut rng).unwrap();
        let ones = BlockMatrix::from_fn(3, 2, |_, _| CMatrix::identity(2)).unwrap();
        assert_eq!(schur_product(&a, &ones).unwrap(), a);
        let system = Arc::new(DynamicalSystem::diagonal(3, 2).unwrap());
        let j = CPElement::hadamard_unit(system.clone());
        assert_eq!(coeffs_to_block(&j).unwrap(), ones);
        let id = coeffs_to_block(&CPElement::unit(system)).unwrap();
        assert_eq!(id.to_matrix(), CMatrix::identity(6));
    }

    #[test]
    fn wrong_system_or_shape_is_rejected() {
        let a = BlockMatrix::from_fn(2, 1, |_, _| CMatrix::identity(1)).unwrap();
        let full = Arc::new(DynamicalSystem::trivial(GroupTable::cyclic(2).unwrap(), 2).unwrap());
        assert!(matches!(block_to_coeffs(&a, &full), Err(Error::InvalidInput(_))));
        assert!(matches!(coeffs_to_block(&CPElement::unit(full)), Err(Error::InvalidInput(_))));
        let wrong = Arc::new(DynamicalSystem::diagonal(2, 2).unwrap());
        assert!(block_to_coeffs(&a, &wrong).is_err());
        let c = BlockMatrix::from_fn(3, 1, |_, _| CMatrix::identity(1)).unwrap();
        assert!(schur_product(&a, &c).is_err());
        assert!(BlockMatrix::new(2, 1, vec![vec![CMatrix::identity(1)]]).is_err());
        assert!(BlockMatrix::new(1, 2, vec![vec![CMatrix::identity(1)]]).is_err());
    }

    #[test]
    fn json_shape() {
        let a = BlockMatrix::from_matrix(2, 1, &real(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        let json = serde_json::to_value(&a).unwrap();
        assert_eq!(json["n"], 2);
        assert_eq!(json["d"], 1);
        assert_eq!(json["blocks"][1][0], serde_json::json!([[[3.0, 0.0]]]));
        let back: BlockMatrix = serde_json::from_value(json).unwrap();
        assert_eq!(back, a);
        let bad = serde_json::json!({"n": 2, "d": 1, "blocks": [[[[[1.0, 0.0]]]]]});
        assert!(serde_json::from_value::<BlockMatrix>(bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn roundtrip_and_intertwining(n in 1usize..5, d in 1usize..3, seed in any::<u64>()) {
            let mut rng = SeededRng::new(seed);
            let a = BlockMatrix::random(n, d, &mut rng).unwrap();
            let b = BlockMatrix::random(n, d, &mut rng).unwrap();
            let system = Arc::new(DynamicalSystem::diagonal(n, d).unwrap());
            let x = block_to_coeffs(&a, &system).unwrap();
            prop_assert!(x.membership_residuals().iter().all(|&r| r < 1e-12));
            prop_assert_eq!(coeffs_to_block(&x).unwrap(), a.clone());
            prop_assert!(represent(&x).frobenius_distance(&a.to_matrix()) < 1e-12);
            let e = check_intertwining(&a, &b).unwrap();
            prop_assert!(e.pass, "{:?}", e);
            let e = check_schur_equivalence(&a, &b).unwrap();
            prop_assert!(e.pass, "{:?}", e);
        }
    }
}
