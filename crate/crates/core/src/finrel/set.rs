use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Label of the single element of the monoidal unit.
pub const UNIT_ELEMENT: &str = "•";
/// Id of the monoidal unit.
pub const UNIT_ID: &str = "I";

/// A finite set with a fixed element order.
///
/// Products are flattened: `(A×B)×C` and `A×(B×C)` are the same set with
/// factors `[A, B, C]`, and elements are indexed row-major over the factors.
/// Associators are therefore identities on indices.
#[derive(Clone)]
pub struct FinSet(Arc<Inner>);

struct Inner {
    id: String,
    elements: Vec<String>,
    index: HashMap<String, usize>,
    factors: Vec<FinSet>,
}

impl FinSet {
    /// An atomic set. Labels must be unique.
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        elements: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let id = id.into();
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::DuplicateElement {
                    set: id,
                    element: e.clone(),
                });
            }
        }
        Ok(FinSet(Arc::new(Inner {
            id,
            elements,
            index,
            factors: Vec::new(),
        })))
    }

    /// The monoidal unit `I = {•}`.
    pub fn unit() -> Self {
        FinSet::new(UNIT_ID, [UNIT_ELEMENT]).expect("unit labels are unique")
    }

    /// A set `{prefix0, prefix1, ...}` of `n` generated labels.
    pub fn numbered(id: impl Into<String>, prefix: &str, n: usize) -> Self {
        FinSet::new(id, (0..n).map(|i| format!("{prefix}{i}")))
            .expect("generated labels are unique")
    }

    /// Cartesian product with flattened factor structure.
    pub fn product(a: &FinSet, b: &FinSet) -> Self {
        let mut factors: Vec<FinSet> = a.leaves().to_vec();
        factors.extend(b.leaves().iter().cloned());
        let id = factors.iter().map(|f| f.id()).collect::<Vec<_>>().join("×");
        let mut elements = Vec::with_capacity(a.len() * b.len());
        let mut index = HashMap::with_capacity(a.len() * b.len());
        let sizes: Vec<usize> = factors.iter().map(FinSet::len).collect();
        let total: usize = sizes.iter().product();
        let mut digits = vec![0usize; factors.len()];
        for i in 0..total {
            let label = tuple_label(digits.iter().zip(&factors).map(|(&d, f)| f.label(d)));
            index.insert(label.clone(), i);
            elements.push(label);
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        FinSet(Arc::new(Inner {
            id,
            elements,
            index,
            factors,
        }))
    }

    /// Product of a list of sets; the empty list gives `I`.
    pub fn product_of(sets: &[FinSet]) -> Self {
        match sets {
            [] => FinSet::unit(),
            [one] => one.clone(),
            [first, rest @ ..] => rest
                .iter()
                .fold(first.clone(), |acc, s| FinSet::product(&acc, s)),
        }
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn len(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.0.elements
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.elements[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.index.get(label).copied()
    }

    /// Index of `label`, or an [`Error::UnknownElement`].
    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownElement {
            set: self.id().to_string(),
            element: label.to_string(),
        })
    }

    pub fn is_product(&self) -> bool {
        !self.0.factors.is_empty()
    }

    /// Atomic factors of a product; empty for an atomic set.
    pub fn factors(&self) -> &[FinSet] {
        &self.0.factors
    }

    /// Atomic factors, treating an atomic set as its own single factor.
    pub fn leaves(&self) -> &[FinSet] {
        if self.is_product() {
            &self.0.factors
        } else {
            std::slice::from_ref(self)
        }
    }

    pub fn is_unit(&self) -> bool {
        !self.is_product() && self.id() == UNIT_ID && self.len() == 1
    }

    /// Factor indices of element `i`.
    pub fn tuple(&self, mut i: usize) -> Vec<usize> {
        let leaves = self.leaves();
        let mut out = vec![0; leaves.len()];
        for k in (0..leaves.len()).rev() {
            let n = leaves[k].len();
            out[k] = i % n;
            i /= n;
        }
        out
    }

    /// Element index of a tuple of factor indices.
    pub fn from_tuple(&self, digits: &[usize]) -> usize {
        self.leaves()
            .iter()
            .zip(digits)
            .fold(0, |acc, (f, &d)| acc * f.len() + d)
    }

    pub fn iter(&self) -> std::ops::Range<usize> {
        0..self.len()
    }
}

/// Index of `(i, j)` in `A×B` when `B` has `right_len` elements.
#[inline]
pub fn pair_index(i: usize, j: usize, right_len: usize) -> usize {
    i * right_len + j
}

/// Splits an index of `A×B` into `(i, j)`.
#[inline]
pub fn split_index(k: usize, right_len: usize) -> (usize, usize) {
    (k / right_len, k % right_len)
}

pub(crate) fn tuple_label<'a>(parts: impl IntoIterator<Item = &'a str>) -> String {
    let mut s = String::from("(");
    for (n, p) in parts.into_iter().enumerate() {
        if n > 0 {
            s.push(',');
        }
        s.push_str(p);
    }
    s.push(')');
    s
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.id == other.0.id && self.0.elements == other.0.elements)
    }
}

impl Eq for FinSet {}

impl Hash for FinSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
        self.0.elements.len().hash(state);
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.id(), self.len())
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{ {} }}", self.id(), self.elements().join(" "))
    }
}
