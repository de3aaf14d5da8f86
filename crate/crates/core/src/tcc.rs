//! Target–context instances with behaviors.
//!
//! An instance fixes targets `T`, contexts `C`, behaviors `B` with an
//! evaluation `eval: T×C → B` and a preorder on `B`. The ambient relation on
//! morphisms `A → T×C` is imitation of their evaluations.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finrel::{compose, empty_row, tensor, unitor_left, FinRel, FinSet, RelSpace};
use crate::order::{imitates, Preorder};

/// The subcategory of `Rel` whose morphisms are admitted as programs,
/// reductions and context maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ambient {
    /// All relations.
    Relations,
    /// Relations with at most one output per input.
    PartialFunctions,
    /// Total functions.
    Functions,
}

impl Ambient {
    pub fn space(self) -> RelSpace {
        match self {
            Ambient::Relations => RelSpace::All,
            Ambient::PartialFunctions => RelSpace::Functional,
            Ambient::Functions => RelSpace::Deterministic,
        }
    }

    /// Space searched for functional morphisms of the ambient.
    pub fn functional_space(self) -> RelSpace {
        match self {
            Ambient::Functions => RelSpace::Deterministic,
            _ => RelSpace::Functional,
        }
    }

    pub fn admits(self, f: &FinRel) -> bool {
        self.space().admits(f)
    }

    /// Whether the undefined value is a functional morphism of the ambient.
    pub fn allows_undefined(self) -> bool {
        self != Ambient::Functions
    }

    pub fn name(self) -> &'static str {
        match self {
            Ambient::Relations => "relations",
            Ambient::PartialFunctions => "partial-functions",
            Ambient::Functions => "functions",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "relations" => Some(Ambient::Relations),
            "partial-functions" => Some(Ambient::PartialFunctions),
            "functions" => Some(Ambient::Functions),
            _ => None,
        }
    }

    pub const ALL: [Ambient; 3] = [
        Ambient::Relations,
        Ambient::PartialFunctions,
        Ambient::Functions,
    ];
}

/// Behaviors, their preorder and the evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorStructure {
    behaviors: FinSet,
    order: Preorder,
    eval: FinRel,
}

impl BehaviorStructure {
    /// `eval` must be functional (possibly partial) with codomain the carrier of `order`.
    pub fn new(eval: FinRel, order: Preorder) -> Result<Self> {
        if eval.cod() != order.carrier() {
            return Err(Error::TypeMismatch(format!(
                "eval codomain `{}` is not the behavior carrier `{}`",
                eval.cod().id(),
                order.carrier().id()
            )));
        }
        if !eval.is_functional() {
            return Err(Error::NotFunctional("eval".into()));
        }
        Ok(BehaviorStructure {
            behaviors: order.carrier().clone(),
            order,
            eval,
        })
    }

    pub fn behaviors(&self) -> &FinSet {
        &self.behaviors
    }

    pub fn order(&self) -> &Preorder {
        &self.order
    }

    pub fn eval(&self) -> &FinRel {
        &self.eval
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TccInstance {
    name: String,
    targets: FinSet,
    contexts: FinSet,
    pairs: FinSet,
    behavior: BehaviorStructure,
    ambient: Ambient,
}

impl TccInstance {
    pub fn new(
        name: impl Into<String>,
        targets: &FinSet,
        contexts: &FinSet,
        behavior: BehaviorStructure,
        ambient: Ambient,
    ) -> Result<Self> {
        let pairs = FinSet::product(targets, contexts);
        if behavior.eval.dom() != &pairs {
            return Err(Error::TypeMismatch(format!(
                "eval domain `{}` is not `{}`",
                behavior.eval.dom().id(),
                pairs.id()
            )));
        }
        Ok(TccInstance {
            name: name.into(),
            targets: targets.clone(),
            contexts: contexts.clone(),
            pairs,
            behavior,
            ambient,
        })
    }

    /// Convenience constructor from a behavior table `(t, c) ↦ b`.
    pub fn from_table(
        name: impl Into<String>,
        targets: &FinSet,
        contexts: &FinSet,
        order: Preorder,
        ambient: Ambient,
        table: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let pairs = FinSet::product(targets, contexts);
        let n = contexts.len();
        let eval = FinRel::from_fn(&pairs, order.carrier(), |k| {
            k.checked_div(n).and_then(|t| table(t, k % n))
        });
        TccInstance::new(
            name,
            targets,
            contexts,
            BehaviorStructure::new(eval, order)?,
            ambient,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn targets(&self) -> &FinSet {
        &self.targets
    }

    pub fn contexts(&self) -> &FinSet {
        &self.contexts
    }

    /// `T×C`.
    pub fn pairs(&self) -> &FinSet {
        &self.pairs
    }

    pub fn behaviors(&self) -> &FinSet {
        &self.behavior.behaviors
    }

    pub fn order(&self) -> &Preorder {
        &self.behavior.order
    }

    pub fn eval(&self) -> &FinRel {
        &self.behavior.eval
    }

    pub fn behavior(&self) -> &BehaviorStructure {
        &self.behavior
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn with_ambient(&self, ambient: Ambient) -> TccInstance {
        TccInstance {
            ambient,
            ..self.clone()
        }
    }

    pub fn renamed(&self, name: impl Into<String>) -> TccInstance {
        TccInstance {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Whether `eval` is itself a morphism of the ambient.
    pub fn is_intrinsic(&self) -> bool {
        self.ambient.admits(&self.behavior.eval)
    }

    #[inline]
    pub fn pair(&self, t: usize, c: usize) -> usize {
        t * self.contexts.len() + c
    }

    /// `eval(t, c)` as a row over `B`.
    #[inline]
    pub fn eval_at(&self, t: usize, c: usize) -> &FixedBitSet {
        self.behavior.eval.row(self.pair(t, c))
    }

    /// `eval({t} × S)`.
    pub fn eval_over(&self, t: usize, contexts: &FixedBitSet) -> FixedBitSet {
        let mut out = empty_row(self.behaviors().len());
        for c in contexts.ones() {
            out.union_with(self.eval_at(t, c));
        }
        out
    }

    /// `eval` of a subset of `T×C`.
    pub fn eval_pairs(&self, subset: &FixedBitSet) -> FixedBitSet {
        self.behavior.eval.image_of_set(subset)
    }

    /// Functional states `I → T` of the ambient, `None` being the empty state.
    pub fn functional_states(&self) -> Vec<Option<usize>> {
        let mut out = Vec::with_capacity(self.targets.len() + 1);
        if self.ambient.allows_undefined() {
            out.push(None);
        }
        out.extend(self.targets.iter().map(Some));
        out
    }

    /// `eval ∘ f`.
    pub fn behavior_of(&self, f: &FinRel) -> Result<FinRel> {
        self.check_into_pairs(f)?;
        compose(&self.behavior.eval, f)
    }

    /// `f ⪰ g` in the ambient relation.
    pub fn ambient_imitates(&self, f: &FinRel, g: &FinRel) -> Result<bool> {
        f.same_type(g, "ambient imitation")?;
        imitates(&self.behavior_of(f)?, &self.behavior_of(g)?, self.order())
    }

    /// `f ⪰ w ⊗ f` for a scalar `w: I → I`.
    pub fn scalar_dominance_check(&self, w: &FinRel, f: &FinRel) -> Result<bool> {
        let unit = FinSet::unit();
        if w.dom() != &unit || w.cod() != &unit {
            return Err(Error::TypeMismatch("scalar must have type I -> I".into()));
        }
        self.check_into_pairs(f)?;
        let wf = tensor(w, f);
        let back = compose(
            &compose(&unitor_left(f.cod()), &wf)?,
            &unitor_left(f.dom()).converse(),
        )?;
        self.ambient_imitates(f, &back)
    }

    /// The instance with behaviors `T×C`, identity evaluation, and the order
    /// induced by imitation of evaluations of deterministic states.
    pub fn intrinsify(&self) -> Result<TccInstance> {
        let pairs = self.pairs.clone();
        let order = self.order();
        let eval = self.eval();
        let induced =
            Preorder::from_fn(&pairs, |x, y| order.imitates_sets(eval.row(x), eval.row(y)))?;
        let behavior = BehaviorStructure::new(FinRel::identity(&pairs), induced)?;
        TccInstance::new(
            format!("{}.intr", self.name),
            &self.targets,
            &self.contexts,
            behavior,
            self.ambient,
        )
    }

    fn check_into_pairs(&self, f: &FinRel) -> Result<()> {
        if f.cod() != &self.pairs {
            return Err(Error::TypeMismatch(format!(
                "expected a morphism into `{}`, got codomain `{}`",
                self.pairs.id(),
                f.cod().id()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finrel::states;

    #[test]
    fn multivalued_precomposition_can_break_imitation() {
        // f extends g to a point where g is undefined; a relation hitting both
        // points then mixes an unmatched behavior into f∘h.
        let t = FinSet::numbered("T", "t", 2);
        let c = FinSet::numbered("C", "c", 1);
        let b = FinSet::numbered("B", "b", 2);
        let inst = TccInstance::from_table(
            "eq",
            &t,
            &c,
            Preorder::equality(&b),
            Ambient::Relations,
            |t, _| Some(t),
        )
        .unwrap();
        let a = FinSet::numbered("A", "a", 2);
        let f = FinRel::from_fn(&a, inst.pairs(), Some);
        let g = FinRel::from_fn(&a, inst.pairs(), |x| (x == 0).then_some(0));
        assert!(f.restricts_to(&g).unwrap());
        assert!(inst.ambient_imitates(&f, &g).unwrap());
        let z = FinSet::unit();
        let h = FinRel::full(&z, &a);
        let fh = compose(&f, &h).unwrap();
        let gh = compose(&g, &h).unwrap();
        assert!(!inst.ambient_imitates(&fh, &gh).unwrap());
        let h1 = FinRel::from_fn(&z, &a, |_| Some(0));
        assert!(inst
            .ambient_imitates(&compose(&f, &h1).unwrap(), &compose(&g, &h1).unwrap())
            .unwrap());
    }

    fn tiny() -> TccInstance {
        let t = FinSet::numbered("T", "t", 2);
        let c = FinSet::numbered("C", "c", 2);
        let b = FinSet::numbered("B", "b", 2);
        TccInstance::from_table(
            "tiny",
            &t,
            &c,
            Preorder::chain(&b),
            Ambient::Relations,
            |t, c| {
                if t == 1 && c == 1 {
                    None
                } else {
                    Some(t)
                }
            },
        )
        .unwrap()
    }

    #[test]
    fn eval_is_partial_and_intrinsic() {
        let inst = tiny();
        assert!(inst.is_intrinsic());
        assert!(!inst.with_ambient(Ambient::Functions).is_intrinsic());
        assert!(inst.eval_at(1, 1).is_clear());
    }

    #[test]
    fn scalars_dominated() {
        let inst = tiny();
        let unit = FinSet::unit();
        for f in states(inst.pairs(), RelSpace::All) {
            for w in [FinRel::identity(&unit), FinRel::empty(&unit, &unit)] {
                assert!(inst.scalar_dominance_check(&w, &f).unwrap());
            }
        }
    }

    #[test]
    fn intrinsify_reflects_imitation_of_functional_states() {
        let inst = tiny();
        let intr = inst.intrinsify().unwrap();
        assert!(intr.is_intrinsic());
        for f in states(inst.pairs(), RelSpace::Functional) {
            for g in states(inst.pairs(), RelSpace::Functional) {
                if intr.ambient_imitates(&f, &g).unwrap() {
                    assert!(inst.ambient_imitates(&f, &g).unwrap());
                }
            }
        }
    }

    // An undefined pair is dominated by every pair in the induced order, so a
    // multi-valued state can pass the induced degradation check while its
    // evaluation has no degradation in the original order.
    #[test]
    fn intrinsify_does_not_reflect_multivalued_states() {
        let t = FinSet::numbered("T", "t", 3);
        let c = FinSet::unit();
        let b = FinSet::numbered("B", "b", 2);
        let inst = TccInstance::from_table(
            "gap",
            &t,
            &c,
            Preorder::equality(&b),
            Ambient::Relations,
            |t, _| match t {
                0 => None,
                1 => Some(0),
                _ => Some(1),
            },
        )
        .unwrap();
        let intr = inst.intrinsify().unwrap();
        let g = FinRel::from_pairs(&FinSet::unit(), inst.pairs(), [(0, 0), (0, 1)]).unwrap();
        let f = FinRel::from_pairs(&FinSet::unit(), inst.pairs(), [(0, 1), (0, 2)]).unwrap();
        assert!(intr.ambient_imitates(&f, &g).unwrap());
        assert!(!inst.ambient_imitates(&f, &g).unwrap());
    }

    #[test]
    fn wrong_codomain_rejected() {
        let inst = tiny();
        let f = FinRel::identity(inst.targets());
        assert!(matches!(inst.behavior_of(&f), Err(Error::TypeMismatch(_))));
    }
}
