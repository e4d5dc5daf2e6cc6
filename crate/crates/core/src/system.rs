//! C*-dynamical systems (A, α, G) with A a unital *-subalgebra of M_d and
//! α_g = Ad(U_g) implemented by unitaries on H = C^d.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::numerics::{pinv, singular_values, CMatrix, C64, DEFAULT_PINV_CUTOFF};
use crate::rng::SeededRng;

const SPAN_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-10;
const INDEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    /// The full matrix algebra M_d.
    Full,
    /// Block-diagonal matrices ℓ_∞(C_blocks, M_{d/blocks}).
    Diagonal { blocks: usize },
}

/// Least-squares coordinates of a matrix in the algebra basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub coords: Vec<C64>,
    pub residual: f64,
}

/// Worst-case measurement of one structural invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMeasure {
    pub name: &'static str,
    pub worst: f64,
    pub tol: f64,
    pub at: String,
}

impl InvariantMeasure {
    fn new(name: &'static str, tol: f64) -> Self {
        InvariantMeasure {
            name,
            worst: 0.0,
            tol,
            at: String::new(),
        }
    }

    // Tracks the largest excess over a relative tolerance `tol·scale`.
    fn record(&mut self, value: f64, scale: f64, at: impl FnOnce() -> String) {
        let normalized = value / scale;
        if normalized > self.worst {
            self.worst = normalized;
            self.at = at();
        }
    }

    pub fn holds(&self) -> bool {
        self.worst <= self.tol
    }
}

#[derive(Clone)]
pub struct DynamicalSystem {
    group: GroupTable,
    dim: usize,
    kind: AlgebraKind,
    basis: Vec<CMatrix>,
    unitaries: Vec<CMatrix>,
    gram_inv: CMatrix,
}

impl fmt::Debug for DynamicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalSystem")
            .field("order", &self.group.order())
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("basis_len", &self.basis.len())
            .finish()
    }
}

fn matrix_unit(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Permutation matrix of the left-regular representation: x_h ↦ x_{g·h}.
pub fn left_regular_permutation(group: &GroupTable, g: usize) -> CMatrix {
    let n = group.order();
    let mut p = CMatrix::zeros(n, n);
    for h in 0..n {
        p[(group.mul(g, h), h)] = C64::new(1.0, 0.0);
    }
    p
}

impl DynamicalSystem {
    /// Validate a system from an explicit spanning basis and action unitaries.
    pub fn new(
        group: GroupTable,
        dim: usize,
        kind: AlgebraKind,
        basis: Vec<CMatrix>,
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        let ds = Self::new_unchecked(group, dim, kind, basis, unitaries)?;
        for m in ds.invariants()? {
            if !m.holds() {
                return Err(Error::SystemViolation {
                    invariant: m.name.to_string(),
                    detail: format!("worst relative residual {:e} at {}", m.worst, m.at),
                });
            }
        }
        Ok(ds)
    }

    /// Assemble a system checking only shapes. Invariants are not verified.
    #[doc(hidden)]
    pub fn new_unchecked(
        group: GroupTable,
        dim: usize,
        kind: AlgebraKind,
        basis: Vec<CMatrix>,
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("Hilbert space dimension must be positive"));
        }
        if basis.is_empty() {
            return Err(Error::invalid("algebra basis is empty"));
        }
        if unitaries.len() != group.order() {
            return Err(Error::invalid(format!(
                "{} action unitaries given for a group of order {}",
                unitaries.len(),
                group.order()
            )));
        }
        if let Some(k) = basis.iter().position(|b| b.shape() != (dim, dim)) {
            return Err(Error::invalid(format!("basis element {k} is not {dim}x{dim}")));
        }
        if let Some(g) = unitaries.iter().position(|u| u.shape() != (dim, dim)) {
            return Err(Error::invalid(format!("unitary U_{g} is not {dim}x{dim}")));
        }
        let m = basis.len();
        let gram = CMatrix::from_fn(m, m, |i, j| basis[i].inner(&basis[j]));
        let gram_inv = pinv(&gram, DEFAULT_PINV_CUTOFF)?;
        Ok(DynamicalSystem {
            group,
            dim,
            kind,
            basis,
            unitaries,
            gram_inv,
        })
    }

    /// A = M_d with the given action unitaries.
    pub fn full(group: GroupTable, dim: usize, unitaries: Vec<CMatrix>) -> Result<Self> {
        let basis = (0..dim * dim).map(|k| matrix_unit(dim, k / dim, k % dim)).collect();
        Self::new(group, dim, AlgebraKind::Full, basis, unitaries)
    }

    /// A = M_d with trivial action.
    pub fn trivial(group: GroupTable, dim: usize) -> Result<Self> {
        let unitaries = vec![CMatrix::identity(dim); group.order()];
        Self::full(group, dim, unitaries)
    }

    /// A = M_{n·k} with U_g = W (P_g ⊗ I_k) W*, P_g the left-regular permutation
    /// representation and W a Householder-product unitary drawn from `seed`.
    pub fn regular_conjugated(group: GroupTable, copies: usize, seed: u64) -> Result<Self> {
        if copies == 0 {
            return Err(Error::invalid("regular_conjugated needs at least one copy"));
        }
        let dim = group.order() * copies;
        let w = SeededRng::new(seed).unitary(dim);
        let w_adj = w.adjoint();
        let unitaries = group
            .elements()
            .map(|g| {
                let p = left_regular_permutation(&group, g).kron(&CMatrix::identity(copies));
                &(&w * &p) * &w_adj
            })
            .collect();
        Self::full(group, dim, unitaries)
    }

    /// Block-diagonal algebra ℓ_∞(C_n, M_d) on C^n ⊗ C^d (index `block·d + i`)
    /// with the cyclic shift action sending block g to block g+f.
    pub fn diagonal(n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("block dimension must be positive"));
        }
        let group = GroupTable::cyclic(n)?;
        let unitaries = (0..n)
            .map(|f| left_regular_permutation(&group, f).kron(&CMatrix::identity(d)))
            .collect();
        Self::diagonal_with_unitaries(group, n, d, unitaries)
    }

    /// Block-diagonal algebra with `blocks` blocks of size `d` and arbitrary action unitaries.
    pub fn diagonal_with_unitaries(
        group: GroupTable,
        blocks: usize,
        d: usize,
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        if blocks == 0 || d == 0 {
            return Err(Error::invalid("diagonal algebra needs positive block count and size"));
        }
        let dim = blocks * d;
        let mut basis = Vec::with_capacity(blocks * d * d);
        for b in 0..blocks {
            for i in 0..d {
                for j in 0..d {
                    basis.push(matrix_unit(dim, b * d + i, b * d + j));
                }
            }
        }
        Self::new(group, dim, AlgebraKind::Diagonal { blocks }, basis, unitaries)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Dimension d of H.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn unitary(&self, g: usize) -> &CMatrix {
        &self.unitaries[g]
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    /// α_g(A) = U_g A U_g*.
    pub fn act(&self, g: usize, a: &CMatrix) -> Result<CMatrix> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::invalid(format!(
                "act expects a {0}x{0} matrix, got {1}x{2}",
                self.dim,
                a.rows(),
                a.cols()
            )));
        }
        if g >= self.order() {
            return Err(Error::invalid(format!("group element {g} out of range")));
        }
        Ok(self.act_unchecked(g, a))
    }

    pub(crate) fn act_unchecked(&self, g: usize, a: &CMatrix) -> CMatrix {
        let u = &self.unitaries[g];
        &(u * a) * &u.adjoint()
    }

    /// Least-squares coordinates of `m` in span(basis) and the Frobenius residual.
    pub fn project_membership(&self, m: &CMatrix) -> Result<Membership> {
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::invalid(format!(
                "membership test expects a {0}x{0} matrix, got {1}x{2}",
                self.dim,
                m.rows(),
                m.cols()
            )));
        }
        let rhs: Vec<C64> = self.basis.iter().map(|b| b.inner(m)).collect();
        let coords = self.gram_inv.apply(&rhs);
        let residual = self.combine(&coords).frobenius_distance(m);
        Ok(Membership { coords, residual })
    }

    /// Orthogonal projection of `m` onto the algebra.
    pub fn project(&self, m: &CMatrix) -> Result<CMatrix> {
        let Membership { coords, .. } = self.project_membership(m)?;
        Ok(self.combine(&coords))
    }

    pub fn membership_tol(m: &CMatrix) -> f64 {
        SPAN_TOL * (1.0 + m.frobenius_norm())
    }

    pub fn is_member(&self, m: &CMatrix) -> bool {
        self.project_membership(m)
            .map(|p| p.residual <= Self::membership_tol(m))
            .unwrap_or(false)
    }

    fn combine(&self, coords: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != C64::new(0.0, 0.0) {
                out += &b.scale(*c);
            }
        }
        out
    }

    fn span_residual(&self, m: &CMatrix) -> f64 {
        self.project_membership(m).map(|p| p.residual).unwrap_or(f64::INFINITY)
    }

    /// Random algebra element: entries uniform in the complex unit square, then projected.
    pub fn random_element(&self, rng: &mut SeededRng) -> CMatrix {
        let raw = CMatrix::from_fn(self.dim, self.dim, |_, _| rng.unit_square());
        self.project(&raw).expect("shape matches")
    }

    /// Measure every structural invariant. Each measure's `worst` is a residual
    /// normalized by the scale of the quantity it compares.
    pub fn invariants(&self) -> Result<Vec<InvariantMeasure>> {
        let n = self.order();
        let id = CMatrix::identity(self.dim);
        let mut out = Vec::new();

        let mut independence = InvariantMeasure::new("basis_independent", 0.0);
        let stacked = CMatrix::from_fn(self.dim * self.dim, self.basis.len(), |r, k| self.basis[k].as_slice()[r]);
        let sv = singular_values(&stacked)?;
        let smallest = *sv.last().expect("non-empty basis");
        if smallest <= INDEPENDENCE_TOL || self.basis.len() > self.dim * self.dim {
            independence.worst = 1.0;
            independence.at = format!("smallest singular value {smallest:e}");
        }
        out.push(independence);

        let mut closure = InvariantMeasure::new("closed_under_product", SPAN_TOL);
        let mut adjoint = InvariantMeasure::new("closed_under_adjoint", SPAN_TOL);
        for (i, bi) in self.basis.iter().enumerate() {
            let bi_adj = bi.adjoint();
            adjoint.record(self.span_residual(&bi_adj), 1.0 + bi.frobenius_norm(), || format!("basis {i}"));
            for (j, bj) in self.basis.iter().enumerate() {
                let prod = bi * bj;
                if prod.is_zero() {
                    continue;
                }
                closure.record(self.span_residual(&prod), 1.0 + prod.frobenius_norm(), || {
                    format!("basis {i} · basis {j}")
                });
            }
        }
        out.push(closure);
        out.push(adjoint);

        let mut unital = InvariantMeasure::new("unital", SPAN_TOL);
        unital.record(self.span_residual(&id), 1.0 + id.frobenius_norm(), String::new);
        out.push(unital);

        let mut identity_unitary = InvariantMeasure::new("identity_acts_trivially", UNITARY_TOL);
        identity_unitary.record(self.unitaries[0].frobenius_distance(&id), 1.0, || "g=0".into());
        out.push(identity_unitary);

        let mut unitary = InvariantMeasure::new("unitaries_unitary", UNITARY_TOL);
        for (g, u) in self.unitaries.iter().enumerate() {
            unitary.record((&u.adjoint() * u).frobenius_distance(&id), 1.0, || format!("g={g}"));
        }
        out.push(unitary);

        let mut invariance = InvariantMeasure::new("action_preserves_algebra", SPAN_TOL);
        let mut homomorphism = InvariantMeasure::new("action_homomorphism", SPAN_TOL);
        let acted: Vec<Vec<CMatrix>> = (0..n)
            .map(|g| self.basis.iter().map(|b| self.act_unchecked(g, b)).collect())
            .collect();
        for g in 0..n {
            for (k, ab) in acted[g].iter().enumerate() {
                invariance.record(self.span_residual(ab), 1.0 + ab.frobenius_norm(), || format!("g={g}, basis {k}"));
            }
        }
        for g in 0..n {
            for h in 0..n {
                let gh = self.group.mul(g, h);
                for (k, ahb) in acted[h].iter().enumerate() {
                    let lhs = self.act_unchecked(g, ahb);
                    let rhs = &acted[gh][k];
                    homomorphism.record(lhs.frobenius_distance(rhs), 1.0 + rhs.frobenius_norm(), || {
                        format!("(g,h)=({g},{h}), basis {k}")
                    });
                }
            }
        }
        out.push(invariance);
        out.push(homomorphism);
        Ok(out)
    }

    /// Copy with one action unitary replaced, skipping validation. Corruption tests only.
    #[doc(hidden)]
    pub fn with_unitary_unchecked(&self, g: usize, u: CMatrix) -> Self {
        let mut out = self.clone();
        out.unitaries[g] = u;
        out
    }

    /// Copy with a replaced group table, skipping validation. Corruption tests only.
    #[doc(hidden)]
    pub fn with_group_unchecked(&self, group: GroupTable) -> Self {
        let mut out = self.clone();
        out.group = group;
        out
    }
}

/// JSON description of the algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlgebraSpec {
    Full,
    Diagonal { blocks: usize },
}

/// JSON description of the action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionSpec {
    Trivial,
    Explicit { unitaries: BTreeMap<String, CMatrix> },
    RegularConjugated { copies: usize, seed: u64 },
    /// Cyclic block shift; only meaningful for the diagonal algebra over C_blocks.
    Shift,
}

/// JSON description of a dynamical system. For the diagonal algebra `dim` is the
/// block size and H has dimension `blocks·dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dim: usize,
    pub algebra: AlgebraSpec,
    pub action: ActionSpec,
}

impl SystemSpec {
    pub fn build(&self, group: GroupTable) -> Result<DynamicalSystem> {
        let n = group.order();
        let total_dim = match self.algebra {
            AlgebraSpec::Full => self.dim,
            AlgebraSpec::Diagonal { blocks } => blocks * self.dim,
        };
        let unitaries: Vec<CMatrix> = match &self.action {
            ActionSpec::Trivial => vec![CMatrix::identity(total_dim); n],
            ActionSpec::Explicit { unitaries } => {
                let mut out = vec![None; n];
                for (key, u) in unitaries {
                    let g: usize = key
                        .parse()
                        .ok()
                        .filter(|&g| g < n)
                        .ok_or_else(|| Error::invalid(format!("bad group element key {key:?}")).at("action.unitaries"))?;
                    out[g] = Some(u.clone());
                }
                out.into_iter()
                    .enumerate()
                    .map(|(g, u)| {
                        u.ok_or_else(|| {
                            Error::invalid(format!("no unitary given for g={g}")).at("action.unitaries")
                        })
                    })
                    .collect::<Result<_>>()?
            }
            ActionSpec::RegularConjugated { copies, seed } => {
                if !matches!(self.algebra, AlgebraSpec::Full) {
                    return Err(Error::invalid("regular_conjugated requires the full algebra").at("action"));
                }
                if *copies == 0 || self.dim != n * copies {
                    return Err(Error::invalid(format!(
                        "regular_conjugated needs dim = |G|·copies = {}, got {}",
                        n * copies,
                        self.dim
                    ))
                    .at("dim"));
                }
                return DynamicalSystem::regular_conjugated(group, *copies, *seed).map_err(|e| e.at("action"));
            }
            ActionSpec::Shift => match self.algebra {
                AlgebraSpec::Diagonal { blocks } if group == GroupTable::cyclic(blocks)? => {
                    return DynamicalSystem::diagonal(blocks, self.dim).map_err(|e| e.at("action"));
                }
                _ => {
                    return Err(Error::invalid("shift action requires the diagonal algebra over C_blocks").at("action"))
                }
            },
        };
        match self.algebra {
            AlgebraSpec::Full => DynamicalSystem::full(group, self.dim, unitaries),
            AlgebraSpec::Diagonal { blocks } => {
                DynamicalSystem::diagonal_with_unitaries(group, blocks, self.dim, unitaries)
            }
        }
        .map_err(|e| e.at("action"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn swap2() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn scalar_system_over_any_group() {
        let ds = DynamicalSystem::trivial(GroupTable::symmetric(3).unwrap(), 1).unwrap();
        assert_eq!(ds.basis().len(), 1);
        let a = CMatrix::diag(&[c(2.0, -1.0)]);
        assert_eq!(ds.act(4, &a).unwrap(), a);
    }

    #[test]
    fn swap_action_on_m2() {
        let ds = DynamicalSystem::full(GroupTable::cyclic(2).unwrap(), 2, vec![CMatrix::identity(2), swap2()]).unwrap();
        let e11 = matrix_unit(2, 0, 0);
        let e22 = matrix_unit(2, 1, 1);
        assert_eq!(ds.act(1, &e11).unwrap(), e22);
    }

    #[test]
    fn cyclic_permutation_action_on_m3() {
        let group = GroupTable::cyclic(3).unwrap();
        let unitaries: Vec<CMatrix> = (0..3).map(|g| left_regular_permutation(&group, g)).collect();
        let ds = DynamicalSystem::full(group, 3, unitaries).unwrap();
        for m in ds.invariants().unwrap() {
            assert!(m.holds(), "{m:?}");
        }
    }

    #[test]
    fn non_homomorphic_action_is_rejected() {
        // U_1 = U_2 = swap over C_3: Ad(U_1)² is trivial but α_2 is not.
        let group = GroupTable::cyclic(3).unwrap();
        let u = swap2();
        let err = DynamicalSystem::full(group, 2, vec![CMatrix::identity(2), u.clone(), u]).unwrap_err();
        match err {
            Error::SystemViolation { invariant, detail } => {
                assert_eq!(invariant, "action_homomorphism");
                assert!(detail.contains("(g,h)"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_unitary_is_rejected() {
        let group = GroupTable::cyclic(2).unwrap();
        let err = DynamicalSystem::full(group, 1, vec![CMatrix::identity(1), CMatrix::diag_real(&[2.0])]).unwrap_err();
        assert!(matches!(err, Error::SystemViolation { ref invariant, .. } if invariant == "unitaries_unitary"));
    }

    #[test]
    fn diagonal_systems() {
        let ds = DynamicalSystem::diagonal(1, 3).unwrap();
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.basis().len(), 9);

        let ds = DynamicalSystem::diagonal(2, 1).unwrap();
        assert_eq!(ds.unitary(1), &swap2());
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(ds.act(1, &a).unwrap(), CMatrix::diag(&[c(0.0, 2.0), c(1.0, 0.0)]));

        let ds = DynamicalSystem::diagonal(3, 2).unwrap();
        assert_eq!(ds.dim(), 6);
        assert_eq!(ds.basis().len(), 12);
        for m in ds.invariants().unwrap() {
            assert!(m.holds(), "{m:?}");
        }
    }

    #[test]
    fn shift_moves_block_g_to_g_plus_f() {
        let ds = DynamicalSystem::diagonal(3, 1).unwrap();
        // α_1 sends the block at 0 to block 1: α_f(A)(g) = A(g − f).
        let a = CMatrix::diag_real(&[5.0, 0.0, 0.0]);
        assert_eq!(ds.act(1, &a).unwrap(), CMatrix::diag_real(&[0.0, 5.0, 0.0]));
    }

    #[test]
    fn act_dimension_and_adjoint() {
        let ds = DynamicalSystem::regular_conjugated(GroupTable::cyclic(3).unwrap(), 1, 4).unwrap();
        assert!(ds.act(0, &CMatrix::identity(2)).is_err());
        let mut rng = SeededRng::new(1);
        let a = rng.complex_matrix(3, 3);
        for g in 0..3 {
            assert!(ds.act(g, &a).unwrap().adjoint().frobenius_distance(&ds.act(g, &a.adjoint()).unwrap()) < 1e-12);
            let back = ds.act(ds.group().inv(g), &ds.act(g, &a).unwrap()).unwrap();
            assert!(back.frobenius_distance(&a) < 1e-9);
        }
        assert!(ds.act(0, &a).unwrap().frobenius_distance(&a) < 1e-12);
    }

    #[test]
    fn membership() {
        let ds = DynamicalSystem::diagonal(2, 1).unwrap();
        let p = ds.project_membership(&ds.basis()[0]).unwrap();
        assert!(p.residual < 1e-14);
        assert!((p.coords[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(p.coords[1..].iter().all(|z| z.norm() < 1e-14));

        let off = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let p = ds.project_membership(&off).unwrap();
        assert!((p.residual - 1.0).abs() < 1e-14);
        assert!(!ds.is_member(&off));

        let full = DynamicalSystem::trivial(GroupTable::cyclic(2).unwrap(), 3).unwrap();
        let m = SeededRng::new(3).complex_matrix(3, 3);
        assert!(full.project_membership(&m).unwrap().residual < 1e-12);
    }

    #[test]
    fn action_preserves_membership_on_basis() {
        let ds = DynamicalSystem::diagonal(4, 2).unwrap();
        for g in 0..4 {
            for b in ds.basis() {
                assert!(ds.is_member(&ds.act(g, b).unwrap()));
            }
        }
    }

    #[test]
    fn system_spec_json() {
        let spec: SystemSpec = serde_json::from_str(
            r#"{"dim":1,"algebra":{"kind":"diagonal","blocks":3},"action":{"kind":"shift"}}"#,
        )
        .unwrap();
        let ds = spec.build(GroupTable::cyclic(3).unwrap()).unwrap();
        assert_eq!(ds.dim(), 3);

        let spec: SystemSpec = serde_json::from_str(
            r#"{"dim":2,"algebra":{"kind":"full"},"action":{"kind":"regular_conjugated","copies":1,"seed":5}}"#,
        )
        .unwrap();
        assert!(spec.build(GroupTable::cyclic(2).unwrap()).is_ok());
        assert!(spec.build(GroupTable::cyclic(3).unwrap()).is_err());

        let spec: SystemSpec = serde_json::from_str(
            r#"{"dim":2,"algebra":{"kind":"full"},"action":{"kind":"explicit","unitaries":{"0":[[[1,0],[0,0]],[[0,0],[1,0]]],"1":[[[0,0],[1,0]],[[1,0],[0,0]]]}}}"#,
        )
        .unwrap();
        let ds = spec.build(GroupTable::cyclic(2).unwrap()).unwrap();
        assert_eq!(ds.unitary(1), &swap2());

        let missing: SystemSpec = serde_json::from_str(
            r#"{"dim":1,"algebra":{"kind":"full"},"action":{"kind":"explicit","unitaries":{"0":[[[1,0]]]}}}"#,
        )
        .unwrap();
        assert!(missing.build(GroupTable::cyclic(2).unwrap()).is_err());
    }
}
