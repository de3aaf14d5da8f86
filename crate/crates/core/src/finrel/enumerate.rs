//! Exhaustive enumeration of hom-sets of `Rel` and its subcategories.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::rel::{empty_row, singleton_row, FinRel};
use super::set::FinSet;
use crate::budget::space_size;

/// Which morphisms of a hom-set are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelSpace {
    /// Every relation.
    All,
    /// Relations with at most one image per element.
    Functional,
    /// Total functions.
    Deterministic,
}

impl RelSpace {
    /// Number of choices for a single row with `m` codomain elements.
    pub fn row_choices(self, m: usize) -> u128 {
        match self {
            RelSpace::All => space_size(2, m),
            RelSpace::Functional => m as u128 + 1,
            RelSpace::Deterministic => m as u128,
        }
    }

    /// Size of the hom-set `n → m`.
    pub fn size(self, n: usize, m: usize) -> u128 {
        let per_row = self.row_choices(m);
        if per_row == 0 {
            return if n == 0 { 1 } else { 0 };
        }
        space_size(per_row, n)
    }

    /// Whether every relation admitted by `other` is admitted by `self`.
    pub fn contains(self, other: RelSpace) -> bool {
        use RelSpace::*;
        matches!(
            (self, other),
            (All, _) | (Functional, Functional | Deterministic) | (Deterministic, Deterministic)
        )
    }

    pub fn admits(self, f: &FinRel) -> bool {
        match self {
            RelSpace::All => true,
            RelSpace::Functional => f.is_functional(),
            RelSpace::Deterministic => f.is_deterministic(),
        }
    }

    /// All rows in this space for a codomain of size `m`, in enumeration order.
    ///
    /// Functional rows start with the empty row. Rows of `All` are ordered by
    /// their bitmask value. Panics for `All` with `m >= 32`.
    pub fn rows(self, m: usize) -> Vec<FixedBitSet> {
        match self {
            RelSpace::All => {
                assert!(m < 32, "row space too large to materialise");
                (0u64..(1u64 << m)).map(|mask| mask_row(m, mask)).collect()
            }
            RelSpace::Functional => std::iter::once(empty_row(m))
                .chain((0..m).map(|x| singleton_row(m, x)))
                .collect(),
            RelSpace::Deterministic => (0..m).map(|x| singleton_row(m, x)).collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelSpace::All => "all",
            RelSpace::Functional => "functional",
            RelSpace::Deterministic => "deterministic",
        }
    }
}

pub(crate) fn mask_row(m: usize, mask: u64) -> FixedBitSet {
    let mut r = empty_row(m);
    for x in 0..m {
        if mask >> x & 1 == 1 {
            r.insert(x);
        }
    }
    r
}

/// Iterates the hom-set `dom → cod` restricted to a [`RelSpace`].
///
/// The order is lexicographic in the row choices with the first domain
/// element most significant.
pub struct HomIter {
    dom: FinSet,
    cod: FinSet,
    choices: Vec<FixedBitSet>,
    digits: Vec<usize>,
    done: bool,
}

impl HomIter {
    pub fn new(dom: &FinSet, cod: &FinSet, space: RelSpace) -> Self {
        let choices = space.rows(cod.len());
        let done = choices.is_empty() && !dom.is_empty();
        HomIter {
            dom: dom.clone(),
            cod: cod.clone(),
            choices,
            digits: vec![0; dom.len()],
            done,
        }
    }
}

impl Iterator for HomIter {
    type Item = FinRel;

    fn next(&mut self) -> Option<FinRel> {
        if self.done {
            return None;
        }
        let rows = self
            .digits
            .iter()
            .map(|&d| self.choices[d].clone())
            .collect();
        let rel = FinRel::from_rows(&self.dom, &self.cod, rows).expect("rows fit the codomain");
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.choices.len() {
                break;
            }
            self.digits[k] = 0;
        }
        Some(rel)
    }
}

pub fn homs(dom: &FinSet, cod: &FinSet, space: RelSpace) -> HomIter {
    HomIter::new(dom, cod, space)
}

/// All states `I → A` in the space.
pub fn states(a: &FinSet, space: RelSpace) -> HomIter {
    HomIter::new(&FinSet::unit(), a, space)
}
