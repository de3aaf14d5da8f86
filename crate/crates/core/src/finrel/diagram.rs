//! Definitions stated as string diagrams, evaluated with the categorical
//! operations only. These are the reference forms the direct combinatorial
//! checks in [`FinRel`] are compared against.

use super::rel::{compose, copy, delete, identity, tensor, unitor_right, FinRel, MorphismClass};
use super::set::FinSet;
use crate::error::Result;

/// `dom(f) = ρ ∘ (id_A ⊗ (⊤_X ∘ f)) ∘ copy_A`.
pub fn domain(f: &FinRel) -> Result<FinRel> {
    let a = f.dom();
    let discard_f = compose(&delete(f.cod()), f)?;
    let body = compose(&tensor(&identity(a), &discard_f), &copy(a))?;
    compose(&unitor_right(a), &body)
}

/// `copy_X ∘ f = (f ⊗ f) ∘ copy_A`.
pub fn is_functional(f: &FinRel) -> Result<bool> {
    Ok(compose(&copy(f.cod()), f)? == compose(&tensor(f, f), &copy(f.dom()))?)
}

/// `⊤_X ∘ f = ⊤_A`.
pub fn is_total(f: &FinRel) -> Result<bool> {
    Ok(compose(&delete(f.cod()), f)? == delete(f.dom()))
}

/// `f ∘ dom(f) = f` with the diagrammatic domain.
pub fn is_normalized(f: &FinRel) -> Result<bool> {
    Ok(compose(f, &domain(f)?)? == *f)
}

pub fn classify(f: &FinRel) -> Result<MorphismClass> {
    let functional = is_functional(f)?;
    let total = is_total(f)?;
    Ok(MorphismClass {
        functional,
        total,
        normalized: is_normalized(f)?,
        deterministic: functional && total,
    })
}

/// `f ⊒ g` as `f ∘ dom(g) = g` with the diagrammatic domain.
pub fn restricts_to(f: &FinRel, g: &FinRel) -> Result<bool> {
    f.same_type(g, "restriction order")?;
    Ok(compose(f, &domain(g)?)? == *g)
}

/// A well-typed string diagram over finite relations.
#[derive(Debug, Clone)]
pub enum Diagram {
    Id(FinSet),
    Copy(FinSet),
    Delete(FinSet),
    Swap(FinSet, FinSet),
    Box(FinRel),
    /// Sequential composite, first element applied first.
    Seq(Vec<Diagram>),
    /// Parallel composite, left to right.
    Par(Vec<Diagram>),
}

impl Diagram {
    pub fn eval(&self) -> Result<FinRel> {
        match self {
            Diagram::Id(a) => Ok(identity(a)),
            Diagram::Copy(a) => Ok(copy(a)),
            Diagram::Delete(a) => Ok(delete(a)),
            Diagram::Swap(a, b) => Ok(super::rel::swap(a, b)),
            Diagram::Box(f) => Ok(f.clone()),
            Diagram::Seq(parts) => {
                let mut it = parts.iter();
                let mut acc = match it.next() {
                    Some(d) => d.eval()?,
                    None => return Ok(identity(&FinSet::unit())),
                };
                for d in it {
                    acc = compose(&d.eval()?, &acc)?;
                }
                Ok(acc)
            }
            Diagram::Par(parts) => {
                let mut it = parts.iter();
                let mut acc = match it.next() {
                    Some(d) => d.eval()?,
                    None => return Ok(identity(&FinSet::unit())),
                };
                for d in it {
                    acc = tensor(&acc, &d.eval()?);
                }
                Ok(acc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_functional_by_diagram() {
        let a = FinSet::new("A", ["a"]).unwrap();
        let x = FinSet::new("X", ["x1", "x2"]).unwrap();
        let f = FinRel::from_labels(&a, &x, &[("a", "x1"), ("a", "x2")]).unwrap();
        assert!(!is_functional(&f).unwrap());
        assert_eq!(classify(&f).unwrap(), f.classify());
    }

    #[test]
    fn interchange_law() {
        let a = FinSet::numbered("A", "a", 2);
        let b = FinSet::numbered("B", "b", 2);
        let f = FinRel::from_pairs(&a, &a, [(0, 1), (1, 1)]).unwrap();
        let g = FinRel::from_pairs(&b, &b, [(0, 0), (0, 1)]).unwrap();
        let h = FinRel::from_pairs(&a, &a, [(1, 0)]).unwrap();
        let k = FinRel::from_pairs(&b, &b, [(1, 1), (1, 0)]).unwrap();
        let lhs = Diagram::Seq(vec![
            Diagram::Par(vec![Diagram::Box(f.clone()), Diagram::Box(g.clone())]),
            Diagram::Par(vec![Diagram::Box(h.clone()), Diagram::Box(k.clone())]),
        ]);
        let rhs = Diagram::Par(vec![
            Diagram::Seq(vec![Diagram::Box(f), Diagram::Box(h)]),
            Diagram::Seq(vec![Diagram::Box(g), Diagram::Box(k)]),
        ]);
        assert_eq!(lhs.eval().unwrap(), rhs.eval().unwrap());
    }
}
