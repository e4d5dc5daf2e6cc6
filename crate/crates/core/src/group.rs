//! Finite groups as validated multiplication tables. The identity is always index 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, GroupAxiom, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
}

fn violation(axiom: GroupAxiom, detail: impl Into<String>) -> Error {
    Error::NotAGroup {
        axiom,
        detail: detail.into(),
    }
}

impl GroupTable {
    /// Z/nZ with `g·h = (g + h) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cyclic group of order 0"));
        }
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inv = (0..n).map(|g| (n - g) % n).collect();
        Ok(GroupTable { n, table, inv })
    }

    /// Validate an arbitrary multiplication table (`table[g][h] = g·h`).
    ///
    /// If the identity is not at index 0 the labels of the identity and of
    /// element 0 are swapped, so the returned table may differ from the input
    /// by that relabelling.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(violation(GroupAxiom::Latin, "empty table"));
        }
        for (g, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(violation(
                    GroupAxiom::Latin,
                    format!("row {g} has {} entries, expected {n}", row.len()),
                ));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(violation(GroupAxiom::Latin, format!("entry {bad} in row {g} is out of range")));
            }
        }
        let at = |a: usize, b: usize| rows[a][b];
        for g in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for h in 0..n {
                if std::mem::replace(&mut seen_row[at(g, h)], true) {
                    return Err(violation(GroupAxiom::Latin, format!("row {g} repeats {}", at(g, h))));
                }
                if std::mem::replace(&mut seen_col[at(h, g)], true) {
                    return Err(violation(GroupAxiom::Latin, format!("column {g} repeats {}", at(h, g))));
                }
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| violation(GroupAxiom::Identity, "no two-sided identity element"))?;

        // Relabel by the transposition (0 e).
        let swap = |x: usize| {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[swap(a) * n + swap(b)] = swap(at(a, b));
            }
        }

        let mul = |a: usize, b: usize| table[a * n + b];
        let mut inv = vec![0; n];
        for g in 0..n {
            let h = (0..n).find(|&h| mul(g, h) == 0).expect("latin row contains the identity");
            if mul(h, g) != 0 {
                return Err(violation(
                    GroupAxiom::Inverse,
                    format!("right inverse {h} of {g} is not a left inverse"),
                ));
            }
            inv[g] = h;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(violation(
                            GroupAxiom::Associativity,
                            format!("(a·b)·c ≠ a·(b·c) for a={a}, b={b}, c={c}"),
                        ));
                    }
                }
            }
        }
        Ok(GroupTable { n, table, inv })
    }

    /// G1 × G2 with the pair (a, b) at index `a·|G2| + b`.
    pub fn direct_product(g1: &GroupTable, g2: &GroupTable) -> GroupTable {
        let (n1, n2) = (g1.n, g2.n);
        let n = n1 * n2;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let (a1, b1) = (x / n2, x % n2);
                let (a2, b2) = (y / n2, y % n2);
                table[x * n + y] = g1.mul(a1, a2) * n2 + g2.mul(b1, b2);
            }
        }
        let inv = (0..n).map(|x| g1.inv(x / n2) * n2 + g2.inv(x % n2)).collect();
        GroupTable { n, table, inv }
    }

    /// Symmetric group on `k` letters, permutations in lexicographic order
    /// (the identity comes first). Composition is `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 5 {
            return Err(Error::invalid(format!("symmetric group S_{k} not supported")));
        }
        let perms = permutations(k);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed under composition");
        let rows: Vec<Vec<usize>> = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index(&t.iter().map(|&i| s[i]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        Self::from_table(&rows)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.n + h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// Smallest k ≥ 1 with g^k = e.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Re-run all axiom checks on this table.
    pub fn validate(&self) -> Result<()> {
        let revalidated = Self::from_table(&self.rows())?;
        if revalidated != *self {
            return Err(violation(GroupAxiom::Inverse, "stored inverse array or identity label is inconsistent"));
        }
        Ok(())
    }

    /// Overwrite one table entry without validation; used by corruption tests.
    #[doc(hidden)]
    pub fn corrupt_entry(&mut self, g: usize, h: usize, value: usize) {
        self.table[g * self.n + h] = value;
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// JSON description of a group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: usize },
    Table { table: Vec<Vec<usize>> },
    Product { factors: Vec<GroupSpec> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupTable> {
        match self {
            GroupSpec::Cyclic { n } => GroupTable::cyclic(*n).map_err(|e| e.at("n")),
            GroupSpec::Table { table } => GroupTable::from_table(table).map_err(|e| e.at("table")),
            GroupSpec::Product { factors } => {
                let mut it = factors.iter().enumerate();
                let (_, first) = it
                    .next()
                    .ok_or_else(|| Error::invalid("product needs at least one factor").at("factors"))?;
                let mut acc = first.build().map_err(|e| e.at("factors[0]"))?;
                for (i, f) in it {
                    let next = f.build().map_err(|e| e.at(&format!("factors[{i}]")))?;
                    acc = GroupTable::direct_product(&acc, &next);
                }
                Ok(acc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(g: &GroupTable) {
        let n = g.order();
        for a in 0..n {
            assert_eq!(g.mul(0, a), a);
            assert_eq!(g.mul(a, 0), a);
            assert_eq!(g.mul(a, g.inv(a)), 0);
            assert_eq!(g.mul(g.inv(a), a), 0);
            assert_eq!(g.inv(g.inv(a)), a);
            let mut row: Vec<_> = (0..n).map(|b| g.mul(a, b)).collect();
            let mut col: Vec<_> = (0..n).map(|b| g.mul(b, a)).collect();
            row.sort_unstable();
            col.sort_unstable();
            assert_eq!(row, (0..n).collect::<Vec<_>>());
            assert_eq!(col, (0..n).collect::<Vec<_>>());
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn cyclic_small_cases() {
        assert_eq!(GroupTable::cyclic(1).unwrap().rows(), vec![vec![0]]);
        assert_eq!(GroupTable::cyclic(2).unwrap().rows(), vec![vec![0, 1], vec![1, 0]]);
        let c4 = GroupTable::cyclic(4).unwrap();
        assert_eq!((0..4).map(|g| c4.inv(g)).collect::<Vec<_>>(), vec![0, 3, 2, 1]);
        assert!(matches!(GroupTable::cyclic(0), Err(Error::InvalidInput(_))));
        for n in 1..=8 {
            check_axioms(&GroupTable::cyclic(n).unwrap());
        }
    }

    #[test]
    fn from_table_accepts_and_rejects() {
        let c2 = GroupTable::from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(c2, GroupTable::cyclic(2).unwrap());
        match GroupTable::from_table(&[vec![0, 1], vec![1, 1]]) {
            Err(Error::NotAGroup { axiom, .. }) => assert_eq!(axiom, GroupAxiom::Latin),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_table_names_identity_and_associativity_failures() {
        match GroupTable::from_table(&[vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]]) {
            Ok(g) => check_axioms(&g),
            Err(e) => panic!("C_3 with identity at index 2 should be accepted: {e}"),
        }
        // Latin square, identity 0, all elements self-inverse, order 5: cannot be associative.
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        match GroupTable::from_table(&loop5) {
            Err(Error::NotAGroup { axiom, .. }) => assert_eq!(axiom, GroupAxiom::Associativity),
            other => panic!("unexpected {other:?}"),
        }
        let no_id = vec![vec![1, 2, 0], vec![0, 1, 2], vec![2, 0, 1]];
        match GroupTable::from_table(&no_id) {
            Err(Error::NotAGroup { axiom, .. }) => assert_eq!(axiom, GroupAxiom::Identity),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_is_relabelled_to_zero() {
        // C_2 with the identity stored at index 1.
        let g = GroupTable::from_table(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g, GroupTable::cyclic(2).unwrap());
    }

    // S_3 in cycle notation: e, (12), (13), (23), (123), (132), composition right-to-left.
    fn s3_cycle_table() -> Vec<Vec<usize>> {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| {
                        let st = [s[t[0]], s[t[1]], s[t[2]]];
                        perms.iter().position(|p| *p == st).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn s3_is_a_nonabelian_group() {
        let g = GroupTable::from_table(&s3_cycle_table()).unwrap();
        check_axioms(&g);
        assert!(!g.is_abelian());
        let s3 = GroupTable::symmetric(3).unwrap();
        check_axioms(&s3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
    }

    #[test]
    fn direct_products() {
        let c1 = GroupTable::cyclic(1).unwrap();
        let s3 = GroupTable::symmetric(3).unwrap();
        assert_eq!(GroupTable::direct_product(&c1, &s3), s3);

        let c2 = GroupTable::cyclic(2).unwrap();
        let klein = GroupTable::direct_product(&c2, &c2);
        check_axioms(&klein);
        assert!((0..4).all(|g| klein.inv(g) == g));

        let c6 = GroupTable::direct_product(&c2, &GroupTable::cyclic(3).unwrap());
        check_axioms(&c6);
        assert!((0..6).any(|g| c6.element_order(g) == 6));
    }

    #[test]
    fn spec_json_forms() {
        let spec: GroupSpec = serde_json::from_str(r#"{"kind":"product","factors":[{"kind":"cyclic","n":2},{"kind":"cyclic","n":2}]}"#).unwrap();
        assert_eq!(spec.build().unwrap().order(), 4);
        let spec: GroupSpec = serde_json::from_str(r#"{"kind":"table","table":[[0,1],[1,1]]}"#).unwrap();
        let err = spec.build().unwrap_err();
        assert_eq!(err.path(), "table");
        assert!(matches!(err.root(), Error::NotAGroup { axiom: GroupAxiom::Latin, .. }));
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"cyclic","n":2,"extra":1}"#).is_err());
    }

    #[test]
    fn validate_detects_corruption() {
        let mut g = GroupTable::cyclic(3).unwrap();
        assert!(g.validate().is_ok());
        g.corrupt_entry(1, 1, 1);
        assert!(g.validate().is_err());
    }
}
