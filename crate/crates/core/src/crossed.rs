//! The reduced crossed product realized on H ⊗ ℓ₂(G).
//!
//! Basis vector `ξ_i ⊗ x_g` of H ⊗ ℓ₂(G) sits at index `g·d + i`, so an operator
//! is an n×n grid of d×d blocks indexed by group elements. Elements of the
//! crossed product are kept as their coefficient families `g ↦ X_g ∈ A`, with
//! `X = Σ_g L_g Ψ(X_g)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{spectral_norm, CMatrix, C64};
use crate::system::DynamicalSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// H ⊗ ℓ₂(G), dimension d·n.
    HG,
    /// ℓ₂(G) ⊗ H ⊗ ℓ₂(G), dimension n²·d.
    K,
}

impl Space {
    pub fn dim(self, ds: &DynamicalSystem) -> usize {
        match self {
            Space::HG => ds.dim() * ds.order(),
            Space::K => ds.dim() * ds.order() * ds.order(),
        }
    }
}

/// A dense square matrix tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteOperator {
    space: Space,
    matrix: CMatrix,
}

impl ConcreteOperator {
    pub fn new(ds: &DynamicalSystem, space: Space, matrix: CMatrix) -> Result<Self> {
        let n = space.dim(ds);
        if matrix.shape() != (n, n) {
            return Err(Error::invalid(format!(
                "operator on {space:?} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(ConcreteOperator { space, matrix })
    }

    pub fn hg(ds: &DynamicalSystem, matrix: CMatrix) -> Result<Self> {
        Self::new(ds, Space::HG, matrix)
    }

    pub(crate) fn from_parts(space: Space, matrix: CMatrix) -> Self {
        ConcreteOperator { space, matrix }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        ConcreteOperator {
            space: self.space,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Operator product; both factors must act on the same space.
    pub fn compose(&self, other: &ConcreteOperator) -> Result<Self> {
        if self.space != other.space || self.matrix.shape() != other.matrix.shape() {
            return Err(Error::invalid("cannot compose operators on different spaces"));
        }
        Ok(ConcreteOperator {
            space: self.space,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// The d×d block at block position (k, h).
    pub fn block(&self, d: usize, k: usize, h: usize) -> CMatrix {
        self.matrix.block(k * d, h * d, d, d)
    }
}

pub(crate) fn expect_hg(ds: &DynamicalSystem, z: &ConcreteOperator) -> Result<()> {
    if z.space != Space::HG || z.matrix.rows() != Space::HG.dim(ds) {
        return Err(Error::invalid(format!(
            "expected an operator on H⊗ℓ₂(G) of dimension {}",
            Space::HG.dim(ds)
        )));
    }
    Ok(())
}

/// An element of the crossed product, stored as its Fourier coefficients.
#[derive(Debug, Clone)]
pub struct CPElement {
    system: Arc<DynamicalSystem>,
    coeffs: Vec<CMatrix>,
}

impl CPElement {
    /// Build from a dense coefficient list (index = group element), checking that
    /// every coefficient lies in the algebra.
    pub fn new(system: Arc<DynamicalSystem>, coeffs: Vec<CMatrix>) -> Result<Self> {
        let x = Self::new_unchecked(system, coeffs)?;
        for (g, c) in x.coeffs.iter().enumerate() {
            let residual = x.system.project_membership(c)?.residual;
            if residual > DynamicalSystem::membership_tol(c) {
                return Err(Error::NotInAlgebra { g, residual });
            }
        }
        Ok(x)
    }

    /// Only shapes are checked; coefficients may lie outside the algebra.
    pub fn new_unchecked(system: Arc<DynamicalSystem>, coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.len() != system.order() {
            return Err(Error::invalid(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                system.order()
            )));
        }
        let d = system.dim();
        if let Some(g) = coeffs.iter().position(|c| c.shape() != (d, d)) {
            return Err(Error::invalid(format!("coefficient at g={g} is not {d}x{d}")));
        }
        Ok(CPElement { system, coeffs })
    }

    /// Build from a sparse map; absent group elements get zero coefficients.
    pub fn from_map(system: Arc<DynamicalSystem>, coeffs: BTreeMap<usize, CMatrix>) -> Result<Self> {
        let n = system.order();
        let d = system.dim();
        let mut dense = vec![CMatrix::zeros(d, d); n];
        for (g, c) in coeffs {
            if g >= n {
                return Err(Error::invalid(format!("group element {g} out of range")));
            }
            dense[g] = c;
        }
        Self::new(system, dense)
    }

    pub fn zero(system: Arc<DynamicalSystem>) -> Self {
        let d = system.dim();
        let coeffs = vec![CMatrix::zeros(d, d); system.order()];
        CPElement { system, coeffs }
    }

    /// L_g Ψ(a).
    pub fn monomial(system: Arc<DynamicalSystem>, g: usize, a: CMatrix) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(g, a);
        Self::from_map(system, coeffs)
    }

    /// The multiplicative unit: I at e.
    pub fn unit(system: Arc<DynamicalSystem>) -> Self {
        let d = system.dim();
        Self::monomial(system, 0, CMatrix::identity(d)).expect("identity lies in a unital algebra")
    }

    /// The ⋆-unit J with J_g = I for every g.
    pub fn hadamard_unit(system: Arc<DynamicalSystem>) -> Self {
        let d = system.dim();
        let coeffs = vec![CMatrix::identity(d); system.order()];
        CPElement { system, coeffs }
    }

    pub fn system(&self) -> &Arc<DynamicalSystem> {
        &self.system
    }

    pub fn coeff(&self, g: usize) -> &CMatrix {
        &self.coeffs[g]
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    fn with_coeffs(&self, coeffs: Vec<CMatrix>) -> Self {
        CPElement {
            system: Arc::clone(&self.system),
            coeffs,
        }
    }

    fn same_system(&self, other: &CPElement) -> Result<()> {
        if Arc::ptr_eq(&self.system, &other.system) {
            Ok(())
        } else {
            Err(Error::invalid("elements belong to different dynamical systems"))
        }
    }

    /// Largest membership residual over all coefficients, relative to its tolerance scale.
    pub fn membership_residuals(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| {
                self.system
                    .project_membership(c)
                    .map(|p| p.residual / (1.0 + c.frobenius_norm()))
                    .unwrap_or(f64::INFINITY)
            })
            .collect()
    }

    pub fn add(&self, other: &CPElement) -> Result<Self> {
        self.same_system(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &CPElement) -> Result<Self> {
        self.same_system(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    /// Truncation Σ_{k∈K} L_k Ψ(X_k).
    pub fn restrict(&self, support: &[usize]) -> Self {
        let d = self.system.dim();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(g, c)| if support.contains(&g) { c.clone() } else { CMatrix::zeros(d, d) })
            .collect();
        self.with_coeffs(coeffs)
    }

    /// True when every coefficient outside `support` is exactly zero.
    pub fn is_supported_on(&self, support: &[usize]) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(g, c)| support.contains(&g) || c.is_zero())
    }

    /// X·Ψ(a): coefficients X_g·a.
    pub fn mul_psi_right(&self, a: &CMatrix) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c * a).collect())
    }

    /// Ψ(a)·X: coefficients α_{g⁻¹}(a)·X_g.
    pub fn mul_psi_left(&self, a: &CMatrix) -> Self {
        let group = self.system.group();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(g, c)| &self.system.act_unchecked(group.inv(g), a) * c)
            .collect();
        self.with_coeffs(coeffs)
    }

    pub fn to_spec(&self) -> ElementSpec {
        ElementSpec {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(g, c)| (g.to_string(), c.clone()))
                .collect(),
        }
    }
}

/// JSON form of a crossed-product element: `{"coeffs": {"g": matrix, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub coeffs: BTreeMap<String, CMatrix>,
}

impl ElementSpec {
    pub fn build(&self, system: &Arc<DynamicalSystem>) -> Result<CPElement> {
        let mut map = BTreeMap::new();
        for (key, c) in &self.coeffs {
            let g: usize = key
                .parse()
                .ok()
                .filter(|&g| g < system.order())
                .ok_or_else(|| Error::invalid(format!("bad group element key {key:?}")).at("coeffs"))?;
            if c.shape() != (system.dim(), system.dim()) {
                return Err(Error::invalid(format!("coefficient must be {0}x{0}", system.dim())).at(&format!("coeffs.{key}")));
            }
            map.insert(g, c.clone());
        }
        CPElement::from_map(Arc::clone(system), map).map_err(|e| match e {
            Error::NotInAlgebra { g, .. } => e.at(&format!("coeffs.{g}")),
            other => other,
        })
    }
}

/// Ψ(A): block-diagonal operator whose g-block is α_{g⁻¹}(A).
pub fn psi_embed(ds: &DynamicalSystem, a: &CMatrix) -> Result<ConcreteOperator> {
    let Some(m) = ds.project_membership(a).ok() else {
        return Err(Error::invalid("psi_embed expects a d×d matrix"));
    };
    if m.residual > DynamicalSystem::membership_tol(a) {
        return Err(Error::NotInAlgebra { g: 0, residual: m.residual });
    }
    Ok(psi_embed_unchecked(ds, a))
}

pub(crate) fn psi_embed_unchecked(ds: &DynamicalSystem, a: &CMatrix) -> ConcreteOperator {
    let d = ds.dim();
    let n = ds.order();
    let mut out = CMatrix::zeros(n * d, n * d);
    for g in 0..n {
        out.set_block(g * d, g * d, &ds.act_unchecked(ds.group().inv(g), a));
    }
    ConcreteOperator::from_parts(Space::HG, out)
}

/// L_g = I ⊗ l_g: block (k, h) is I_d iff k = g·h.
pub fn left_unitary(ds: &DynamicalSystem, g: usize) -> ConcreteOperator {
    let d = ds.dim();
    let n = ds.order();
    let mut out = CMatrix::zeros(n * d, n * d);
    let one = C64::new(1.0, 0.0);
    for h in 0..n {
        let k = ds.group().mul(g, h);
        for i in 0..d {
            out[(k * d + i, h * d + i)] = one;
        }
    }
    ConcreteOperator::from_parts(Space::HG, out)
}

/// X = Σ_g L_g Ψ(X_g).
pub fn synthesize(x: &CPElement) -> ConcreteOperator {
    let ds = x.system();
    let dim = Space::HG.dim(ds);
    let mut out = CMatrix::zeros(dim, dim);
    for (g, c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out += &(left_unitary(ds, g).matrix() * psi_embed_unchecked(ds, c).matrix());
    }
    ConcreteOperator::from_parts(Space::HG, out)
}

/// Block-diagonal compression Σ_h (I⊗E_h) Z (I⊗E_h), as an operator on H⊗ℓ₂(G).
pub fn compress_diagonal(ds: &DynamicalSystem, z: &ConcreteOperator) -> Result<ConcreteOperator> {
    expect_hg(ds, z)?;
    let d = ds.dim();
    let dim = z.matrix().rows();
    let mut out = CMatrix::zeros(dim, dim);
    for h in 0..ds.order() {
        out.set_block(h * d, h * d, &z.block(d, h, h));
    }
    Ok(ConcreteOperator::from_parts(Space::HG, out))
}

/// Result of the conditional expectation read back into A.
#[derive(Debug, Clone, PartialEq)]
pub struct CondExp {
    /// α_e applied to the e-th diagonal block.
    pub value: CMatrix,
    /// Largest pairwise Frobenius distance between the untwisted diagonal blocks
    /// α_h(Z_hh). Zero (up to rounding) exactly when the compression lies in Ψ(A).
    pub inconsistency: f64,
}

/// π(Z) returned as the element A of the algebra with Ψ(A) equal to the diagonal compression.
pub fn cond_exp(ds: &DynamicalSystem, z: &ConcreteOperator) -> Result<CondExp> {
    expect_hg(ds, z)?;
    let d = ds.dim();
    let untwisted: Vec<CMatrix> = (0..ds.order()).map(|h| ds.act_unchecked(h, &z.block(d, h, h))).collect();
    let mut inconsistency = 0.0f64;
    for (i, a) in untwisted.iter().enumerate() {
        for b in &untwisted[i + 1..] {
            inconsistency = inconsistency.max(a.frobenius_distance(b));
        }
    }
    Ok(CondExp {
        value: untwisted.into_iter().next().expect("group is non-empty"),
        inconsistency,
    })
}

/// X_g = π(L_g* Z).
pub fn fourier_coeff(ds: &DynamicalSystem, z: &ConcreteOperator, g: usize) -> Result<CMatrix> {
    expect_hg(ds, z)?;
    if g >= ds.order() {
        return Err(Error::invalid(format!("group element {g} out of range")));
    }
    let shifted = left_unitary(ds, g).adjoint().compose(z)?;
    Ok(cond_exp(ds, &shifted)?.value)
}

/// All Fourier coefficients of Z, without checking that they lie in the algebra.
pub fn analyze(system: &Arc<DynamicalSystem>, z: &ConcreteOperator) -> Result<CPElement> {
    let coeffs = (0..system.order())
        .map(|g| fourier_coeff(system, z, g))
        .collect::<Result<Vec<_>>>()?;
    CPElement::new_unchecked(Arc::clone(system), coeffs)
}

/// (XY)_k = Σ_h α_{h⁻¹}(X_{k·h⁻¹}) Y_h.
pub fn mult_coeffs(x: &CPElement, y: &CPElement) -> Result<CPElement> {
    x.same_system(y)?;
    let ds = x.system();
    let group = ds.group();
    let d = ds.dim();
    let n = ds.order();
    let mut coeffs = vec![CMatrix::zeros(d, d); n];
    for k in 0..n {
        for h in 0..n {
            let yh = y.coeff(h);
            let hinv = group.inv(h);
            let xs = x.coeff(group.mul(k, hinv));
            if yh.is_zero() || xs.is_zero() {
                continue;
            }
            coeffs[k] += &(&ds.act_unchecked(hinv, xs) * yh);
        }
    }
    Ok(x.with_coeffs(coeffs))
}

/// (X*)_k = α_{k⁻¹}((X_{k⁻¹})*).
pub fn adjoint_coeffs(x: &CPElement) -> CPElement {
    let ds = x.system();
    let group = ds.group();
    let coeffs = (0..ds.order())
        .map(|k| {
            let kinv = group.inv(k);
            ds.act_unchecked(kinv, &x.coeff(kinv).adjoint())
        })
        .collect();
    x.with_coeffs(coeffs)
}

/// (X ⋆ Y)_g = X_g Y_g.
pub fn hadamard_coeffs(x: &CPElement, y: &CPElement) -> Result<CPElement> {
    x.same_system(y)?;
    Ok(x.with_coeffs(x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a * b).collect()))
}

/// π(X*X) = Σ_g X_g* X_g, in A.
pub fn pi_star_square(x: &CPElement) -> CMatrix {
    let d = x.system().dim();
    let mut acc = CMatrix::zeros(d, d);
    for c in x.coeffs() {
        acc += &(&c.adjoint() * c);
    }
    acc
}

/// π(XX*) = Σ_g α_g(X_g X_g*), in A.
pub fn pi_square_star(x: &CPElement) -> CMatrix {
    let ds = x.system();
    let d = ds.dim();
    let mut acc = CMatrix::zeros(d, d);
    for (g, c) in x.coeffs().iter().enumerate() {
        acc += &ds.act_unchecked(g, &(c * &c.adjoint()));
    }
    acc
}

/// ‖X‖_π = ‖π(X*X)‖^{1/2}, evaluated through Σ_g X_g* X_g.
pub fn pi_norm(x: &CPElement) -> f64 {
    spectral_norm(&pi_star_square(x)).expect("non-empty").sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;
    use crate::rng::SeededRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar(x: f64) -> CMatrix {
        CMatrix::diag_real(&[x])
    }

    fn c2_example() -> (Arc<DynamicalSystem>, CPElement, CPElement) {
        let ds = Arc::new(DynamicalSystem::trivial(GroupTable::cyclic(2).unwrap(), 1).unwrap());
        let x = CPElement::new(ds.clone(), vec![scalar(2.0), scalar(3.0)]).unwrap();
        let y = CPElement::new(ds.clone(), vec![scalar(5.0), scalar(7.0)]).unwrap();
        (ds, x, y)
    }

    fn fix_c() -> Arc<DynamicalSystem> {
        Arc::new(DynamicalSystem::diagonal(2, 1).unwrap())
    }

    fn random_element(ds: &Arc<DynamicalSystem>, rng: &mut SeededRng) -> CPElement {
        let coeffs = (0..ds.order()).map(|_| ds.random_element(rng)).collect();
        CPElement::new(ds.clone(), coeffs).unwrap()
    }

    fn systems() -> Vec<Arc<DynamicalSystem>> {
        vec![
            Arc::new(DynamicalSystem::trivial(GroupTable::cyclic(3).unwrap(), 2).unwrap()),
            Arc::new(DynamicalSystem::regular_conjugated(GroupTable::symmetric(3).unwrap(), 1, 3).unwrap()),
            Arc::new(DynamicalSystem::regular_conjugated(GroupTable::cyclic(2).unwrap(), 1, 8).unwrap()),
            Arc::new(DynamicalSystem::diagonal(3, 2).unwrap()),
            Arc::new(
                DynamicalSystem::trivial(
                    GroupTable::direct_product(&GroupTable::cyclic(2).unwrap(), &GroupTable::cyclic(2).unwrap()),
                    1,
                )
                .unwrap(),
            ),
        ]
    }

    #[test]
    fn psi_embed_cases() {
        let ds = DynamicalSystem::trivial(GroupTable::cyclic(3).unwrap(), 2).unwrap();
        let a = SeededRng::new(1).complex_matrix(2, 2);
        let psi = psi_embed(&ds, &a).unwrap();
        assert_eq!(psi.matrix(), &CMatrix::identity(3).kron(&a));

        let ds = fix_c();
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let psi = psi_embed(&ds, &a).unwrap();
        assert_eq!(psi.block(2, 0, 0), a);
        assert_eq!(psi.block(2, 1, 1), CMatrix::diag(&[c(0.0, 2.0), c(1.0, 0.0)]));

        let off = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(psi_embed(&ds, &off), Err(Error::NotInAlgebra { .. })));
    }

    #[test]
    fn covariance_relation() {
        let mut rng = SeededRng::new(4);
        for ds in systems() {
            let a = ds.random_element(&mut rng);
            for g in 0..ds.order() {
                let l = left_unitary(&ds, g);
                let lhs = &(l.matrix() * psi_embed(&ds, &a).unwrap().matrix()) * &l.matrix().adjoint();
                let rhs = psi_embed(&ds, &ds.act(g, &a).unwrap()).unwrap();
                assert!(lhs.frobenius_distance(rhs.matrix()) <= 1e-10 * (1.0 + lhs.frobenius_norm()));
            }
        }
    }

    #[test]
    fn left_unitaries() {
        let ds = DynamicalSystem::trivial(GroupTable::cyclic(2).unwrap(), 1).unwrap();
        assert_eq!(left_unitary(&ds, 0).matrix(), &CMatrix::identity(2));
        assert_eq!(left_unitary(&ds, 1).matrix(), &CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));

        let s3 = GroupTable::symmetric(3).unwrap();
        let ds = DynamicalSystem::trivial(s3.clone(), 2).unwrap();
        for g in 0..6 {
            for h in 0..6 {
                let prod = left_unitary(&ds, g).compose(&left_unitary(&ds, h)).unwrap();
                assert_eq!(prod, left_unitary(&ds, s3.mul(g, h)));
            }
        }
    }

    #[test]
    fn synthesize_c2_example_and_trivial_cases() {
        let (ds, x, _) = c2_example();
        assert_eq!(synthesize(&x).matrix(), &CMatrix::from_real_rows(&[&[2.0, 3.0], &[3.0, 2.0]]));
        assert!(synthesize(&CPElement::zero(ds.clone())).matrix().is_zero());
        let a = scalar(4.0);
        let single = CPElement::monomial(ds.clone(), 0, a.clone()).unwrap();
        assert_eq!(synthesize(&single), psi_embed(&ds, &a).unwrap());
    }

    #[test]
    fn cond_exp_cases() {
        let (ds, x, _) = c2_example();
        let pi = cond_exp(&ds, &synthesize(&x)).unwrap();
        assert_eq!(pi.value, scalar(2.0));
        assert_eq!(pi.inconsistency, 0.0);

        let mut rng = SeededRng::new(2);
        for ds in systems() {
            let a = ds.random_element(&mut rng);
            let pi = cond_exp(&ds, &psi_embed(&ds, &a).unwrap()).unwrap();
            assert!(pi.value.frobenius_distance(&a) < 1e-12);
            assert!(pi.inconsistency < 1e-9);
            for g in 1..ds.order() {
                let z = left_unitary(&ds, g).compose(&psi_embed(&ds, &a).unwrap()).unwrap();
                let pi = cond_exp(&ds, &z).unwrap();
                assert!(pi.value.frobenius_norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn cond_exp_flags_operators_outside_the_crossed_product() {
        let ds = DynamicalSystem::trivial(GroupTable::cyclic(2).unwrap(), 1).unwrap();
        let z = ConcreteOperator::hg(&ds, CMatrix::diag_real(&[1.0, 2.0])).unwrap();
        assert!((cond_exp(&ds, &z).unwrap().inconsistency - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fourier_coeff_cases() {
        let (ds, x, _) = c2_example();
        let z = synthesize(&x);
        assert_eq!(fourier_coeff(&ds, &z, 1).unwrap(), scalar(3.0));

        let ds = systems().remove(1);
        let id = ConcreteOperator::hg(&ds, CMatrix::identity(Space::HG.dim(&ds))).unwrap();
        assert!(fourier_coeff(&ds, &id, 0).unwrap().frobenius_distance(&CMatrix::identity(ds.dim())) < 1e-12);
        for g in 1..ds.order() {
            assert!(fourier_coeff(&ds, &id, g).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_inversion_round_trip() {
        let mut rng = SeededRng::new(10);
        for ds in systems() {
            for _ in 0..3 {
                let x = random_element(&ds, &mut rng);
                let z = synthesize(&x);
                for g in 0..ds.order() {
                    let got = fourier_coeff(&ds, &z, g).unwrap();
                    assert!(got.frobenius_distance(x.coeff(g)) <= 1e-10 * (1.0 + x.coeff(g).frobenius_norm()));
                }
            }
        }
    }

    #[test]
    fn mult_coeffs_cases() {
        let (ds, x, y) = c2_example();
        let xy = mult_coeffs(&x, &y).unwrap();
        assert_eq!(xy.coeffs(), &[scalar(31.0), scalar(29.0)]);
        let unit = CPElement::unit(ds);
        let same = mult_coeffs(&x, &unit).unwrap();
        assert_eq!(same.coeffs(), x.coeffs());
    }

    #[test]
    fn synthesize_is_a_star_homomorphism() {
        let mut rng = SeededRng::new(12);
        for ds in systems() {
            let x = random_element(&ds, &mut rng);
            let y = random_element(&ds, &mut rng);
            let lhs = synthesize(&mult_coeffs(&x, &y).unwrap());
            let rhs = synthesize(&x).compose(&synthesize(&y)).unwrap();
            assert!(lhs.matrix().frobenius_distance(rhs.matrix()) <= 1e-9 * (1.0 + rhs.matrix().frobenius_norm()));
            let adj = synthesize(&adjoint_coeffs(&x));
            let dense = synthesize(&x).adjoint();
            assert!(adj.matrix().frobenius_distance(dense.matrix()) <= 1e-9 * (1.0 + dense.matrix().frobenius_norm()));
        }
    }

    #[test]
    fn adjoint_coeffs_cases() {
        let (_, x, _) = c2_example();
        assert_eq!(adjoint_coeffs(&x).coeffs(), x.coeffs());

        let ds = fix_c();
        let x = CPElement::monomial(ds.clone(), 1, CMatrix::diag(&[c(1.0, 0.0), c(0.0, 2.0)])).unwrap();
        let xs = adjoint_coeffs(&x);
        assert_eq!(xs.coeff(1), &CMatrix::diag(&[c(0.0, -2.0), c(1.0, 0.0)]));
        assert!(xs.coeff(0).is_zero());
        let via_dense = synthesize(&x).adjoint();
        assert!(synthesize(&xs).matrix().frobenius_distance(via_dense.matrix()) < 1e-12);

        let mut rng = SeededRng::new(13);
        for ds in systems() {
            let x = random_element(&ds, &mut rng);
            let back = adjoint_coeffs(&adjoint_coeffs(&x));
            for g in 0..ds.order() {
                assert!(back.coeff(g).frobenius_distance(x.coeff(g)) <= 1e-12 * (1.0 + x.coeff(g).frobenius_norm()));
            }
        }
    }

    #[test]
    fn hadamard_coeffs_cases() {
        let (ds, x, y) = c2_example();
        assert_eq!(hadamard_coeffs(&x, &y).unwrap().coeffs(), &[scalar(10.0), scalar(21.0)]);
        let filter = hadamard_coeffs(&CPElement::unit(ds.clone()), &y).unwrap();
        assert_eq!(filter.coeffs(), &[scalar(5.0), scalar(0.0)]);
        let j = CPElement::hadamard_unit(ds.clone());
        assert_eq!(hadamard_coeffs(&j, &y).unwrap().coeffs(), y.coeffs());

        let other = Arc::new(DynamicalSystem::trivial(GroupTable::cyclic(2).unwrap(), 1).unwrap());
        assert!(hadamard_coeffs(&x, &CPElement::zero(other)).is_err());
    }

    #[test]
    fn pi_norm_cases() {
        let (ds, x, _) = c2_example();
        assert!((pi_norm(&x) - 13f64.sqrt()).abs() < 1e-14);
        assert_eq!(pi_norm(&CPElement::zero(ds)), 0.0);

        let mut rng = SeededRng::new(14);
        for ds in systems() {
            let x = random_element(&ds, &mut rng);
            let full = spectral_norm(synthesize(&x).matrix()).unwrap();
            assert!(pi_norm(&x) <= full + 1e-9 * (1.0 + full));
        }
    }

    #[test]
    fn pi_formulas_match_dense_route() {
        let mut rng = SeededRng::new(15);
        for ds in systems() {
            let x = random_element(&ds, &mut rng);
            let z = synthesize(&x);
            let xsx = z.adjoint().compose(&z).unwrap();
            let xxs = z.compose(&z.adjoint()).unwrap();
            let a = cond_exp(&ds, &xsx).unwrap().value;
            let b = cond_exp(&ds, &xxs).unwrap().value;
            assert!(a.frobenius_distance(&pi_star_square(&x)) <= 1e-9 * (1.0 + a.frobenius_norm()));
            assert!(b.frobenius_distance(&pi_square_star(&x)) <= 1e-9 * (1.0 + b.frobenius_norm()));
        }
    }

    #[test]
    fn element_json() {
        let (ds, x, _) = c2_example();
        let spec = x.to_spec();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"coeffs":{"0":[[[2.0,0.0]]],"1":[[[3.0,0.0]]]}}"#);
        let back = serde_json::from_str::<ElementSpec>(&text).unwrap().build(&ds).unwrap();
        assert_eq!(back.coeffs(), x.coeffs());

        let diag = fix_c();
        let bad: ElementSpec = serde_json::from_str(r#"{"coeffs":{"1":[[[0,0],[1,0]],[[0,0],[0,0]]]}}"#).unwrap();
        let err = bad.build(&diag).unwrap_err();
        assert_eq!(err.path(), "coeffs.1");
        assert!(matches!(err.root(), Error::NotInAlgebra { g: 1, .. }));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn bimodularity_symmetry_associativity(seed in any::<u64>(), which in 0usize..5) {
                let ds = systems().remove(which);
                let mut rng = SeededRng::new(seed);
                let x = random_element(&ds, &mut rng);
                let y = random_element(&ds, &mut rng);
                let w = random_element(&ds, &mut rng);
                let a = ds.random_element(&mut rng);
                let close = |p: &CPElement, q: &CPElement, tol: f64| {
                    p.coeffs().iter().zip(q.coeffs()).all(|(u, v)| u.frobenius_distance(v) <= tol * (1.0 + u.frobenius_norm()))
                };

                let xy = hadamard_coeffs(&x, &y).unwrap();
                prop_assert!(close(&hadamard_coeffs(&x, &y.mul_psi_right(&a)).unwrap(), &xy.mul_psi_right(&a), 1e-10));
                prop_assert!(close(&hadamard_coeffs(&x.mul_psi_left(&a), &y).unwrap(), &xy.mul_psi_left(&a), 1e-10));

                let lhs = adjoint_coeffs(&xy);
                let rhs = hadamard_coeffs(&adjoint_coeffs(&y), &adjoint_coeffs(&x)).unwrap();
                prop_assert!(close(&lhs, &rhs, 1e-10));

                let left = hadamard_coeffs(&xy, &w).unwrap();
                let right = hadamard_coeffs(&x, &hadamard_coeffs(&y, &w).unwrap()).unwrap();
                prop_assert!(close(&left, &right, 1e-12));
            }
        }
    }
}
