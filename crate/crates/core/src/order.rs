//! Finite preorders and the imitation relation between behavior-valued relations.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finrel::{empty_row, row_is_empty, singleton_row, FinRel, FinSet};

/// A reflexive, transitive relation `⪰` on a finite carrier.
#[derive(Clone, PartialEq, Eq)]
pub struct Preorder {
    carrier: FinSet,
    /// `below[x]` = `{y | x ⪰ y}`.
    below: Vec<FixedBitSet>,
    /// `above[y]` = `{x | x ⪰ y}`.
    above: Vec<FixedBitSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Enhancement,
    Degradation,
}

/// A map between subsets that moves every element weakly up (enhancement)
/// or weakly down (degradation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapWitness {
    pub kind: MapKind,
    /// `(source, image)` pairs as carrier indices.
    pub assignment: Vec<(usize, usize)>,
}

impl Preorder {
    /// The smallest preorder containing `edges`, each read as `hi ⪰ lo`.
    pub fn closure(carrier: &FinSet, edges: &[(usize, usize)]) -> Result<Self> {
        let n = carrier.len();
        let mut below: Vec<FixedBitSet> = (0..n).map(|i| singleton_row(n, i)).collect();
        for &(hi, lo) in edges {
            if hi >= n || lo >= n {
                return Err(Error::UnknownElement {
                    set: carrier.id().to_string(),
                    element: format!("#{}", hi.max(lo)),
                });
            }
            below[hi].insert(lo);
        }
        // Warshall: if i ⪰ k then i ⪰ everything below k.
        for k in 0..n {
            let row_k = below[k].clone();
            for row in below.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Ok(Preorder::from_below(carrier, below))
    }

    pub fn closure_labels(carrier: &FinSet, edges: &[(&str, &str)]) -> Result<Self> {
        let mut idx = Vec::with_capacity(edges.len());
        for (hi, lo) in edges {
            idx.push((carrier.require(hi)?, carrier.require(lo)?));
        }
        Preorder::closure(carrier, &idx)
    }

    pub fn equality(carrier: &FinSet) -> Self {
        Preorder::closure(carrier, &[]).expect("no edges")
    }

    /// `carrier[0] ⪯ carrier[1] ⪯ ...`, the last element on top.
    pub fn chain(carrier: &FinSet) -> Self {
        let edges: Vec<(usize, usize)> = (1..carrier.len()).map(|i| (i, i - 1)).collect();
        Preorder::closure(carrier, &edges).expect("edges in range")
    }

    /// Builds a preorder from a decision procedure, which must already be
    /// reflexive and transitive.
    pub fn from_fn(carrier: &FinSet, geq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = carrier.len();
        let below: Vec<FixedBitSet> = (0..n)
            .map(|x| {
                let mut r = empty_row(n);
                for y in 0..n {
                    if geq(x, y) {
                        r.insert(y);
                    }
                }
                r
            })
            .collect();
        let p = Preorder::from_below(carrier, below);
        if !p.is_reflexive() || !p.is_transitive() {
            return Err(Error::invalid(
                "preorder",
                format!("relation on `{}` is not a preorder", carrier.id()),
            ));
        }
        Ok(p)
    }

    fn from_below(carrier: &FinSet, below: Vec<FixedBitSet>) -> Self {
        let n = carrier.len();
        let mut above = vec![empty_row(n); n];
        for (x, row) in below.iter().enumerate() {
            for y in row.ones() {
                above[y].insert(x);
            }
        }
        Preorder {
            carrier: carrier.clone(),
            below,
            above,
        }
    }

    pub fn carrier(&self) -> &FinSet {
        &self.carrier
    }

    /// `x ⪰ y`.
    pub fn geq(&self, x: usize, y: usize) -> bool {
        self.below[x].contains(y)
    }

    pub fn below(&self, x: usize) -> &FixedBitSet {
        &self.below[x]
    }

    pub fn above(&self, y: usize) -> &FixedBitSet {
        &self.above[y]
    }

    /// Number of related ordered pairs, including the diagonal.
    pub fn num_pairs(&self) -> usize {
        self.below.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Non-reflexive related pairs `(hi, lo)`.
    pub fn strict_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, row) in self.below.iter().enumerate() {
            out.extend(row.ones().filter(|&y| y != x).map(|y| (x, y)));
        }
        out
    }

    /// A minimal generating set: related pairs not implied through a third element.
    pub fn cover_edges(&self) -> Vec<(usize, usize)> {
        self.strict_edges()
            .into_iter()
            .filter(|&(x, y)| {
                !(0..self.carrier.len()).any(|z| {
                    z != x
                        && z != y
                        && self.geq(x, z)
                        && self.geq(z, y)
                        && !(self.geq(z, x) && self.geq(y, z))
                })
            })
            .collect()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.carrier.len()).all(|x| self.geq(x, x))
    }

    pub fn is_transitive(&self) -> bool {
        self.below
            .iter()
            .all(|row| row.ones().all(|y| self.below[y].is_subset(row)))
    }

    /// The relation as `FinRel` from the carrier to itself, `x ↦ {y | x ⪰ y}`.
    pub fn as_rel(&self) -> FinRel {
        FinRel::from_rows(&self.carrier, &self.carrier, self.below.clone())
            .expect("rows fit the carrier")
    }

    /// Enhancement `U → V` (`f(u) ⪰ u`) or degradation `V → U` (`v ⪰ g(v)`),
    /// choosing the first valid target in carrier order.
    pub fn exists_map(
        &self,
        kind: MapKind,
        u: &FixedBitSet,
        v: &FixedBitSet,
    ) -> Option<MapWitness> {
        let mut assignment = Vec::new();
        match kind {
            MapKind::Enhancement => {
                for x in u.ones() {
                    let y = self.above[x].intersection(v).next()?;
                    assignment.push((x, y));
                }
            }
            MapKind::Degradation => {
                for y in v.ones() {
                    let x = self.below[y].intersection(u).next()?;
                    assignment.push((y, x));
                }
            }
        }
        Some(MapWitness { kind, assignment })
    }

    /// `ν ⪰ μ` for subsets: enhancement `μ → ν` and degradation `ν → μ`, or `μ = ∅`.
    pub fn imitates_sets(&self, nu: &FixedBitSet, mu: &FixedBitSet) -> bool {
        if row_is_empty(mu) {
            return true;
        }
        mu.ones().all(|m| !self.above[m].is_disjoint(nu))
            && nu.ones().all(|n| !self.below[n].is_disjoint(mu))
    }

    /// The set form of imitation is itself a test of a subset against a
    /// single element on each side.
    pub fn dominates(&self, n: usize, mu: &FixedBitSet) -> bool {
        mu.ones().all(|m| self.geq(n, m))
    }
}

/// `ν ⪰ μ`: for every `a` in the domain of `μ`, an enhancement `μ(a) → ν(a)`
/// and a degradation `ν(a) → μ(a)` exist.
pub fn imitates(nu: &FinRel, mu: &FinRel, order: &Preorder) -> Result<bool> {
    nu.same_type(mu, "imitation")?;
    if nu.cod() != order.carrier() {
        return Err(Error::TypeMismatch(format!(
            "imitation: codomain `{}` is not the carrier `{}`",
            nu.cod().id(),
            order.carrier().id()
        )));
    }
    Ok(nu
        .rows()
        .iter()
        .zip(mu.rows())
        .all(|(n, m)| order.imitates_sets(n, m)))
}

impl std::fmt::Debug for Preorder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let edges: Vec<String> = self
            .cover_edges()
            .into_iter()
            .map(|(x, y)| format!("{}>={}", self.carrier.label(x), self.carrier.label(y)))
            .collect();
        write!(f, "Preorder({}; {})", self.carrier.id(), edges.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, xs: &[usize]) -> FixedBitSet {
        let mut r = empty_row(n);
        for &x in xs {
            r.insert(x);
        }
        r
    }

    #[test]
    fn closure_without_edges_is_equality() {
        let a = FinSet::new("X", ["a", "b"]).unwrap();
        let p = Preorder::closure(&a, &[]).unwrap();
        assert_eq!(p.num_pairs(), 2);
        assert!(!p.geq(0, 1));
    }

    #[test]
    fn closure_is_transitive() {
        let a = FinSet::new("X", ["a", "b", "c"]).unwrap();
        let p = Preorder::closure_labels(&a, &[("a", "b"), ("b", "c")]).unwrap();
        assert!(p.geq(0, 2));
        assert!(p.is_transitive());
    }

    #[test]
    fn closure_unknown_element() {
        let a = FinSet::new("X", ["a"]).unwrap();
        assert!(Preorder::closure(&a, &[(0, 3)]).is_err());
        assert!(Preorder::closure_labels(&a, &[("a", "z")]).is_err());
    }

    #[test]
    fn equality_enhancement_is_inclusion() {
        let a = FinSet::numbered("X", "x", 4);
        let p = Preorder::equality(&a);
        let u = bits(4, &[0, 1]);
        assert!(p
            .exists_map(MapKind::Enhancement, &u, &bits(4, &[0, 1, 3]))
            .is_some());
        assert!(p
            .exists_map(MapKind::Enhancement, &u, &bits(4, &[0, 3]))
            .is_none());
    }

    #[test]
    fn empty_source_maps_vacuously() {
        let a = FinSet::numbered("X", "x", 3);
        let p = Preorder::equality(&a);
        let e = empty_row(3);
        let v = bits(3, &[2]);
        assert!(p.exists_map(MapKind::Enhancement, &e, &v).is_some());
        assert!(p.exists_map(MapKind::Degradation, &v, &e).is_some());
    }

    #[test]
    fn top_absorbs_enhancements() {
        let a = FinSet::numbered("X", "x", 4);
        let p = Preorder::chain(&a);
        let top = bits(4, &[3]);
        for mask in 0u64..16 {
            let u = crate::finrel::enumerate::mask_row(4, mask);
            assert!(p.exists_map(MapKind::Enhancement, &u, &top).is_some());
        }
    }

    #[test]
    fn imitation_of_partial_functions() {
        let a = FinSet::numbered("A", "a", 2);
        let x = FinSet::numbered("X", "x", 3);
        let p = Preorder::chain(&x);
        let nu = FinRel::from_pairs(&a, &x, [(0, 2), (1, 0)]).unwrap();
        let mu = FinRel::from_pairs(&a, &x, [(0, 1)]).unwrap();
        assert!(imitates(&nu, &mu, &p).unwrap());
        let mu2 = FinRel::from_pairs(&a, &x, [(1, 1)]).unwrap();
        assert!(!imitates(&nu, &mu2, &p).unwrap());
    }
}
