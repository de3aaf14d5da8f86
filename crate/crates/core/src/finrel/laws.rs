//! The gs-monoidal axioms of `Rel`, evaluated on concrete sets.

use super::rel::{
    compose, copy, delete, identity, swap, tensor, unitor_left, unitor_right, FinRel,
};
use super::set::FinSet;
use crate::error::Result;

/// Outcome of one law instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub passed: bool,
}

fn check(law: &'static str, lhs: Result<FinRel>, rhs: Result<FinRel>) -> LawCheck {
    let passed = matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r);
    LawCheck { law, passed }
}

/// Counit, coassociativity and cocommutativity of `copy_A` and `⊤_A`.
pub fn comonoid_laws(a: &FinSet) -> Vec<LawCheck> {
    let id = identity(a);
    vec![
        check(
            "counit-left",
            compose(&tensor(&delete(a), &id), &copy(a)).and_then(|d| compose(&unitor_left(a), &d)),
            Ok(id.clone()),
        ),
        check(
            "counit-right",
            compose(&tensor(&id, &delete(a)), &copy(a)).and_then(|d| compose(&unitor_right(a), &d)),
            Ok(id.clone()),
        ),
        check(
            "coassociativity",
            compose(&tensor(&copy(a), &id), &copy(a)),
            compose(&tensor(&id, &copy(a)), &copy(a)),
        ),
        check(
            "cocommutativity",
            compose(&swap(a, a), &copy(a)),
            Ok(copy(a)),
        ),
    ]
}

/// Compatibility of copy and delete with the tensor product.
pub fn product_laws(a: &FinSet, b: &FinSet) -> Vec<LawCheck> {
    let ab = FinSet::product(a, b);
    let unit = FinSet::unit();
    let middle = tensor(&tensor(&identity(a), &swap(a, b)), &identity(b));
    vec![
        check(
            "copy-product",
            Ok(copy(&ab)),
            compose(&middle, &tensor(&copy(a), &copy(b))),
        ),
        check(
            "delete-product",
            Ok(delete(&ab)),
            compose(&unitor_left(&unit), &tensor(&delete(a), &delete(b))),
        ),
    ]
}

/// `⊤_I = id_I` and `copy_I` is the inverse unitor.
pub fn unit_laws() -> Vec<LawCheck> {
    let i = FinSet::unit();
    vec![
        check("delete-unit", Ok(delete(&i)), Ok(identity(&i))),
        check("copy-unit", Ok(copy(&i)), Ok(unitor_left(&i).converse())),
    ]
}

/// `f ∘ dom(f) = f`.
pub fn normalization_law(f: &FinRel) -> LawCheck {
    LawCheck {
        law: "normalized",
        passed: f.is_normalized(),
    }
}
