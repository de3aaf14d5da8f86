use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::set::{pair_index, split_index, FinSet};
use crate::error::{Error, Result};

/// A relation between two finite sets, stored as one bit row per domain element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinRel {
    dom: FinSet,
    cod: FinSet,
    rows: Vec<FixedBitSet>,
}

/// The classification of a morphism of `Rel`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MorphismClass {
    pub functional: bool,
    pub total: bool,
    pub normalized: bool,
    pub deterministic: bool,
}

/// Support of a relation with its deterministic inclusion into the codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    pub set: FinSet,
    pub inclusion: FinRel,
}

pub(crate) fn empty_row(n: usize) -> FixedBitSet {
    FixedBitSet::with_capacity(n)
}

pub(crate) fn singleton_row(n: usize, i: usize) -> FixedBitSet {
    let mut r = FixedBitSet::with_capacity(n);
    r.insert(i);
    r
}

#[inline]
pub(crate) fn row_is_empty(r: &FixedBitSet) -> bool {
    r.ones().next().is_none()
}

fn mismatch(what: &str, left: &FinSet, right: &FinSet) -> Error {
    Error::TypeMismatch(format!("{what}: `{}` vs `{}`", left.id(), right.id()))
}

impl FinRel {
    pub fn empty(dom: &FinSet, cod: &FinSet) -> Self {
        FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows: vec![empty_row(cod.len()); dom.len()],
        }
    }

    pub fn identity(a: &FinSet) -> Self {
        let rows = (0..a.len()).map(|i| singleton_row(a.len(), i)).collect();
        FinRel {
            dom: a.clone(),
            cod: a.clone(),
            rows,
        }
    }

    /// The full relation `dom × cod`.
    pub fn full(dom: &FinSet, cod: &FinSet) -> Self {
        let mut row = empty_row(cod.len());
        row.insert_range(..);
        FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows: vec![row; dom.len()],
        }
    }

    pub fn from_pairs(
        dom: &FinSet,
        cod: &FinSet,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut rel = FinRel::empty(dom, cod);
        for (a, x) in pairs {
            if a >= dom.len() || x >= cod.len() {
                return Err(Error::TypeMismatch(format!(
                    "pair ({a},{x}) out of range for {} -> {}",
                    dom.id(),
                    cod.id()
                )));
            }
            rel.rows[a].insert(x);
        }
        Ok(rel)
    }

    pub fn from_labels(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut idx = Vec::with_capacity(pairs.len());
        for (a, x) in pairs {
            idx.push((dom.require(a)?, cod.require(x)?));
        }
        FinRel::from_pairs(dom, cod, idx)
    }

    /// Builds a functional relation from a partial function on indices.
    pub fn from_fn(dom: &FinSet, cod: &FinSet, f: impl Fn(usize) -> Option<usize>) -> Self {
        let rows = (0..dom.len())
            .map(|a| match f(a) {
                Some(x) => singleton_row(cod.len(), x),
                None => empty_row(cod.len()),
            })
            .collect();
        FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows,
        }
    }

    /// Builds a relation row by row.
    pub fn from_row_fn(
        dom: &FinSet,
        cod: &FinSet,
        mut f: impl FnMut(usize) -> FixedBitSet,
    ) -> Self {
        let rows = (0..dom.len())
            .map(|a| {
                let mut r = f(a);
                r.grow(cod.len());
                r
            })
            .collect();
        FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows,
        }
    }

    pub fn from_rows(dom: &FinSet, cod: &FinSet, rows: Vec<FixedBitSet>) -> Result<Self> {
        if rows.len() != dom.len() {
            return Err(Error::TypeMismatch(format!(
                "expected {} rows, got {}",
                dom.len(),
                rows.len()
            )));
        }
        let mut out = Vec::with_capacity(rows.len());
        for mut r in rows {
            if r.ones().any(|x| x >= cod.len()) {
                return Err(Error::TypeMismatch(format!(
                    "row exceeds codomain `{}`",
                    cod.id()
                )));
            }
            r.grow(cod.len());
            out.push(r);
        }
        Ok(FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows: out,
        })
    }

    /// The deterministic state `I → A` picking element `i`.
    pub fn point(a: &FinSet, i: usize) -> Self {
        FinRel {
            dom: FinSet::unit(),
            cod: a.clone(),
            rows: vec![singleton_row(a.len(), i)],
        }
    }

    /// The state `I → A` given by a subset.
    pub fn state(a: &FinSet, subset: &FixedBitSet) -> Self {
        let mut r = subset.clone();
        r.grow(a.len());
        FinRel {
            dom: FinSet::unit(),
            cod: a.clone(),
            rows: vec![r],
        }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn row(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    pub fn rows(&self) -> &[FixedBitSet] {
        &self.rows
    }

    pub fn image(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[a].ones()
    }

    /// The unique image of `a` for functional relations.
    pub fn value(&self, a: usize) -> Option<usize> {
        self.rows[a].ones().next()
    }

    pub fn contains(&self, a: usize, x: usize) -> bool {
        self.rows[a].contains(x)
    }

    pub fn insert(&mut self, a: usize, x: usize) {
        self.rows[a].insert(x);
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, r)| r.ones().map(move |x| (a, x)))
            .collect()
    }

    pub fn label_pairs(&self) -> Vec<(String, String)> {
        self.pairs()
            .into_iter()
            .map(|(a, x)| (self.dom.label(a).to_string(), self.cod.label(x).to_string()))
            .collect()
    }

    pub fn num_pairs(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(row_is_empty)
    }

    /// Image of a subset of the domain.
    pub fn image_of_set(&self, subset: &FixedBitSet) -> FixedBitSet {
        let mut out = empty_row(self.cod.len());
        for a in subset.ones() {
            out.union_with(&self.rows[a]);
        }
        out
    }

    /// `self ∘ f`, i.e. first `f` then `self`.
    pub fn after(&self, f: &FinRel) -> Result<FinRel> {
        compose(self, f)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FinRel) -> Result<FinRel> {
        compose(g, self)
    }

    pub fn converse(&self) -> FinRel {
        let mut out = FinRel::empty(&self.cod, &self.dom);
        for (a, x) in self.pairs() {
            out.rows[x].insert(a);
        }
        out
    }

    pub fn union(&self, other: &FinRel) -> Result<FinRel> {
        self.same_type(other, "union")?;
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            r.union_with(o);
        }
        Ok(out)
    }

    pub fn is_subrelation_of(&self, other: &FinRel) -> Result<bool> {
        self.same_type(other, "inclusion")?;
        Ok(self
            .rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b)))
    }

    /// Reinterprets the relation between sets of equal sizes, e.g. along a unitor.
    pub fn retype(&self, dom: &FinSet, cod: &FinSet) -> Result<FinRel> {
        if dom.len() != self.dom.len() || cod.len() != self.cod.len() {
            return Err(Error::TypeMismatch(format!(
                "cannot retype {}->{} as {}->{}",
                self.dom.id(),
                self.cod.id(),
                dom.id(),
                cod.id()
            )));
        }
        Ok(FinRel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows: self.rows.clone(),
        })
    }

    pub(crate) fn same_type(&self, other: &FinRel, what: &str) -> Result<()> {
        if self.dom != other.dom {
            return Err(mismatch(&format!("{what} domain"), &self.dom, &other.dom));
        }
        if self.cod != other.cod {
            return Err(mismatch(&format!("{what} codomain"), &self.cod, &other.cod));
        }
        Ok(())
    }

    pub fn is_functional(&self) -> bool {
        self.rows.iter().all(|r| r.count_ones(..) <= 1)
    }

    pub fn is_total(&self) -> bool {
        self.rows.iter().all(|r| !row_is_empty(r))
    }

    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().all(|r| r.count_ones(..) == 1)
    }

    /// `dom(f)`: the partial identity on the elements where `f` is defined.
    pub fn domain(&self) -> FinRel {
        let n = self.dom.len();
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(a, r)| {
                if row_is_empty(r) {
                    empty_row(n)
                } else {
                    singleton_row(n, a)
                }
            })
            .collect();
        FinRel {
            dom: self.dom.clone(),
            cod: self.dom.clone(),
            rows,
        }
    }

    /// `f ∘ dom(f) = f`; checked rather than assumed.
    pub fn is_normalized(&self) -> bool {
        compose(self, &self.domain())
            .map(|c| &c == self)
            .unwrap_or(false)
    }

    pub fn classify(&self) -> MorphismClass {
        let functional = self.is_functional();
        let total = self.is_total();
        MorphismClass {
            functional,
            total,
            normalized: self.is_normalized(),
            deterministic: functional && total,
        }
    }

    /// Decides `self ⊒ g`: `self ∘ dom(g) = g`.
    pub fn restricts_to(&self, g: &FinRel) -> Result<bool> {
        self.same_type(g, "restriction order")?;
        Ok(compose(self, &g.domain())? == *g)
    }

    /// The set of elements hit by the relation, with its inclusion.
    pub fn support(&self) -> Support {
        let hit = self.image_of_set(&full_row(self.dom.len()));
        let labels: Vec<&str> = hit.ones().map(|x| self.cod.label(x)).collect();
        let set = FinSet::new(format!("supp({})", self.cod.id()), labels)
            .expect("labels of a set are unique");
        let members: Vec<usize> = hit.ones().collect();
        let inclusion = FinRel::from_fn(&set, &self.cod, |i| Some(members[i]));
        Support { set, inclusion }
    }

    /// Canonical text form `{ a->x b->y }` with labels.
    pub fn to_text(&self) -> String {
        let body: Vec<String> = self
            .label_pairs()
            .into_iter()
            .map(|(a, x)| format!("{a}->{x}"))
            .collect();
        if body.is_empty() {
            "{ }".to_string()
        } else {
            format!("{{ {} }}", body.join(" "))
        }
    }
}

pub(crate) fn full_row(n: usize) -> FixedBitSet {
    let mut r = empty_row(n);
    r.insert_range(..);
    r
}

/// `g ∘ f`.
pub fn compose(g: &FinRel, f: &FinRel) -> Result<FinRel> {
    if f.cod != g.dom {
        return Err(mismatch("composition", &f.cod, &g.dom));
    }
    let rows = f.rows.iter().map(|r| g.image_of_set(r)).collect();
    Ok(FinRel {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        rows,
    })
}

/// `f ⊗ g` on the cartesian products of domains and codomains.
pub fn tensor(f: &FinRel, g: &FinRel) -> FinRel {
    let dom = FinSet::product(&f.dom, &g.dom);
    let cod = FinSet::product(&f.cod, &g.cod);
    let ny = g.cod.len();
    let nb = g.dom.len();
    let mut rows = Vec::with_capacity(dom.len());
    for k in 0..dom.len() {
        let (a, b) = split_index(k, nb);
        let mut row = empty_row(cod.len());
        for x in f.rows[a].ones() {
            for y in g.rows[b].ones() {
                row.insert(pair_index(x, y, ny));
            }
        }
        rows.push(row);
    }
    FinRel { dom, cod, rows }
}

/// `copy_A : A → A×A`.
pub fn copy(a: &FinSet) -> FinRel {
    let cod = FinSet::product(a, a);
    FinRel::from_fn(a, &cod, |i| Some(pair_index(i, i, a.len())))
}

/// `⊤_A : A → I`.
pub fn delete(a: &FinSet) -> FinRel {
    FinRel::from_fn(a, &FinSet::unit(), |_| Some(0))
}

/// `swap : A×B → B×A`.
pub fn swap(a: &FinSet, b: &FinSet) -> FinRel {
    let dom = FinSet::product(a, b);
    let cod = FinSet::product(b, a);
    FinRel::from_fn(&dom, &cod, |k| {
        let (i, j) = split_index(k, b.len());
        Some(pair_index(j, i, a.len()))
    })
}

pub fn identity(a: &FinSet) -> FinRel {
    FinRel::identity(a)
}

/// `A×I → A`.
pub fn unitor_right(a: &FinSet) -> FinRel {
    let dom = FinSet::product(a, &FinSet::unit());
    FinRel::from_fn(&dom, a, Some)
}

/// `I×A → A`.
pub fn unitor_left(a: &FinSet) -> FinRel {
    let dom = FinSet::product(&FinSet::unit(), a);
    FinRel::from_fn(&dom, a, Some)
}

impl fmt::Debug for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} {}",
            self.dom.id(),
            self.cod.id(),
            self.to_text()
        )
    }
}

impl fmt::Display for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
