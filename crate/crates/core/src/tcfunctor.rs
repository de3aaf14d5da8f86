//! Functors between finite instances given by relabelings of targets and contexts.
//!
//! A functor acts on atomic sets: the targets and contexts of the source are
//! sent along the given maps, every other atomic set is left alone. On
//! relations it conjugates by these maps, so products, copy and delete are
//! preserved whenever the maps are bijections.

use serde::Serialize;

use crate::budget::Meter;
use crate::error::{Error, Result};
use crate::finrel::{compose, copy, delete, homs, states, swap, FinRel, FinSet, RelSpace};
use crate::order::Preorder;
use crate::simcat::{Processing, SimMorphism};
use crate::simulator::{check_reduction, find_universality_witness, Flavor, Reduction, Simulator};
use crate::tcc::{BehaviorStructure, TccInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcFunctor {
    pub name: String,
    pub source: TccInstance,
    pub target: TccInstance,
    /// Image of each source target; `None` where the map is undefined.
    pub target_map: Vec<Option<usize>>,
    pub context_map: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctorLaw {
    Objects,
    Identity,
    Composition,
    Monoidal,
    Ambient,
    Imitation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorViolation {
    pub law: FunctorLaw,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorCheck {
    pub violations: Vec<FunctorViolation>,
    pub imitation_pairs_checked: u128,
    pub compositions_checked: u128,
}

impl FunctorCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Endomorphisms per atomic set used for the composition check.
const COMPOSITION_SAMPLE: u128 = 40;

fn bijection(map: &[Option<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    map.len() == n
        && map
            .iter()
            .all(|x| matches!(x, Some(i) if *i < n && !std::mem::replace(&mut seen[*i], true)))
}

impl TcFunctor {
    pub fn new(
        name: impl Into<String>,
        source: &TccInstance,
        target: &TccInstance,
        target_map: Vec<Option<usize>>,
        context_map: Vec<Option<usize>>,
    ) -> Result<Self> {
        if source.targets() == source.contexts() {
            return Err(Error::invalid(
                "functor",
                "targets and contexts of the source must be distinct sets",
            ));
        }
        Ok(TcFunctor {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            target_map,
            context_map,
        })
    }

    pub fn identity(inst: &TccInstance) -> Self {
        let t = inst.targets().iter().map(Some).collect();
        let c = inst.contexts().iter().map(Some).collect();
        TcFunctor::new("id", inst, inst, t, c).expect("identity functor")
    }

    /// Relabels targets and contexts of `inst` along permutations, keeping the
    /// behaviors and replacing their order by `order`.
    pub fn relabeling(
        inst: &TccInstance,
        target_perm: &[usize],
        context_perm: &[usize],
        order: Preorder,
        suffix: &str,
    ) -> Result<Self> {
        let nt = inst.targets().len();
        let nc = inst.contexts().len();
        let tm: Vec<Option<usize>> = target_perm.iter().map(|&x| Some(x)).collect();
        let cm: Vec<Option<usize>> = context_perm.iter().map(|&x| Some(x)).collect();
        if !bijection(&tm, nt) || !bijection(&cm, nc) {
            return Err(Error::invalid("relabeling", "permutations expected"));
        }
        let mut t_labels = vec![String::new(); nt];
        for (t, &x) in target_perm.iter().enumerate() {
            t_labels[x] = format!("{}{suffix}", inst.targets().label(t));
        }
        let mut c_labels = vec![String::new(); nc];
        for (c, &x) in context_perm.iter().enumerate() {
            c_labels[x] = format!("{}{suffix}", inst.contexts().label(c));
        }
        let targets = FinSet::new(format!("{}{suffix}", inst.targets().id()), t_labels)?;
        let contexts = FinSet::new(format!("{}{suffix}", inst.contexts().id()), c_labels)?;
        let mut t_inv = vec![0; nt];
        for (t, &x) in target_perm.iter().enumerate() {
            t_inv[x] = t;
        }
        let mut c_inv = vec![0; nc];
        for (c, &x) in context_perm.iter().enumerate() {
            c_inv[x] = c;
        }
        let pairs = FinSet::product(&targets, &contexts);
        let eval = FinRel::from_row_fn(&pairs, order.carrier(), |k| {
            inst.eval_at(t_inv[k / nc], c_inv[k % nc]).clone()
        });
        let image = TccInstance::new(
            format!("{}{suffix}", inst.name()),
            &targets,
            &contexts,
            BehaviorStructure::new(eval, order)?,
            inst.ambient(),
        )?;
        TcFunctor::new(format!("relabel{suffix}"), inst, &image, tm, cm)
    }

    fn is_object_bijective(&self) -> bool {
        bijection(&self.target_map, self.source.targets().len())
            && self.source.targets().len() == self.target.targets().len()
            && bijection(&self.context_map, self.source.contexts().len())
            && self.source.contexts().len() == self.target.contexts().len()
    }

    fn leaf_map(&self, leaf: &FinSet) -> (FinSet, Option<&[Option<usize>]>) {
        if leaf == self.source.targets() {
            (self.target.targets().clone(), Some(&self.target_map))
        } else if leaf == self.source.contexts() {
            (self.target.contexts().clone(), Some(&self.context_map))
        } else {
            (leaf.clone(), None)
        }
    }

    pub fn map_set(&self, a: &FinSet) -> FinSet {
        let leaves: Vec<FinSet> = a.leaves().iter().map(|l| self.leaf_map(l).0).collect();
        if a.is_unit() || !a.is_product() {
            return leaves.into_iter().next().unwrap_or_else(FinSet::unit);
        }
        FinSet::product_of(&leaves)
    }

    /// Element translation `A → F(A)`.
    fn element_map(&self, a: &FinSet) -> Result<(FinSet, Vec<usize>)> {
        let image = self.map_set(a);
        let maps: Vec<Option<&[Option<usize>]>> =
            a.leaves().iter().map(|l| self.leaf_map(l).1).collect();
        let mut out = Vec::with_capacity(a.len());
        for i in a.iter() {
            let digits = a.tuple(i);
            let mut mapped = Vec::with_capacity(digits.len());
            for (d, m) in digits.iter().zip(&maps) {
                match m {
                    None => mapped.push(*d),
                    Some(m) => match m.get(*d).copied().flatten() {
                        Some(x) => mapped.push(x),
                        None => {
                            return Err(Error::invalid(
                                "functor",
                                format!("`{}` has no image", a.label(i)),
                            ))
                        }
                    },
                }
            }
            out.push(if a.is_product() {
                image.from_tuple(&mapped)
            } else {
                mapped[0]
            });
        }
        Ok((image, out))
    }

    /// `F(f)`: conjugation by the element maps.
    pub fn map_rel(&self, f: &FinRel) -> Result<FinRel> {
        if !self.is_object_bijective() {
            return Err(Error::invalid(
                "functor",
                format!("`{}` is not a bijection on targets and contexts", self.name),
            ));
        }
        let (dom, dm) = self.element_map(f.dom())?;
        let (cod, cm) = self.element_map(f.cod())?;
        let mut pairs = Vec::with_capacity(f.num_pairs());
        for (a, b) in f.pairs() {
            pairs.push((dm[a], cm[b]));
        }
        FinRel::from_pairs(&dom, &cod, pairs)
    }

    pub fn map_simulator(&self, s: &Simulator) -> Result<Simulator> {
        let compiler = self.map_rel(s.compiler())?;
        let context = self.map_rel(s.context())?;
        Simulator::new(
            format!("{}({})", self.name, s.name()),
            compiler,
            context,
            &self.target,
        )
    }

    pub fn map_processing(&self, q: &Processing) -> Result<Processing> {
        Processing::from_parts(
            format!("{}({})", self.name, q.name()),
            &self.map_set(q.programs()),
            self.map_rel(q.target_map())?,
            self.map_rel(q.context_map())?,
            &self.target,
        )
    }

    pub fn map_morphism(&self, m: &SimMorphism) -> Result<SimMorphism> {
        let source = self.map_simulator(&m.source)?;
        let target = self.map_simulator(&m.target)?;
        SimMorphism::new(
            self.map_rel(&m.reduction)?,
            self.map_processing(&m.processing)?,
            &source,
            &target,
            &self.target,
        )
    }

    /// `G ∘ F`.
    pub fn then(&self, g: &TcFunctor) -> Result<TcFunctor> {
        if self.target != g.source {
            return Err(Error::invalid(
                "functor composition",
                "target of the first is not the source of the second",
            ));
        }
        let compose_maps = |f: &[Option<usize>], h: &[Option<usize>]| -> Vec<Option<usize>> {
            f.iter()
                .map(|x| x.and_then(|i| h.get(i).copied().flatten()))
                .collect()
        };
        TcFunctor::new(
            format!("{}∘{}", g.name, self.name),
            &self.source,
            &g.target,
            compose_maps(&self.target_map, &g.target_map),
            compose_maps(&self.context_map, &g.context_map),
        )
    }
}

/// Checks the object maps, functoriality on endomorphisms of `T` and `C`,
/// preservation of copy, delete and swap, the ambient, and imitation of
/// states `I → T×C`.
pub fn check_tc_functor(f: &TcFunctor, meter: &mut Meter) -> Result<FunctorCheck> {
    let mut violations = Vec::new();
    let mut push = |law, detail: String| violations.push(FunctorViolation { law, detail });
    if !f.is_object_bijective() {
        push(
            FunctorLaw::Objects,
            format!(
                "`{}` does not map targets and contexts bijectively onto the target instance",
                f.name
            ),
        );
        return Ok(FunctorCheck {
            violations,
            imitation_pairs_checked: 0,
            compositions_checked: 0,
        });
    }
    let src = &f.source;
    let t = src.targets();
    let c = src.contexts();
    let pairs = src.pairs();
    for a in [t, c, pairs] {
        if f.map_rel(&FinRel::identity(a))? != FinRel::identity(&f.map_set(a)) {
            push(
                FunctorLaw::Identity,
                format!("identity on `{}` is not preserved", a.id()),
            );
        }
        if f.map_rel(&copy(a))? != copy(&f.map_set(a)) {
            push(
                FunctorLaw::Monoidal,
                format!("copy on `{}` is not preserved", a.id()),
            );
        }
        if f.map_rel(&delete(a))? != delete(&f.map_set(a)) {
            push(
                FunctorLaw::Monoidal,
                format!("delete on `{}` is not preserved", a.id()),
            );
        }
    }
    if f.map_rel(&swap(t, c))? != swap(&f.map_set(t), &f.map_set(c)) {
        push(
            FunctorLaw::Monoidal,
            "swap of targets and contexts is not preserved".into(),
        );
    }
    let mut compositions = 0u128;
    for a in [t, c] {
        let count = RelSpace::Functional.size(a.len(), a.len());
        let stride = count.div_ceil(COMPOSITION_SAMPLE).max(1) as usize;
        let maps: Vec<FinRel> = homs(a, a, RelSpace::Functional).step_by(stride).collect();
        let images: Vec<FinRel> = maps.iter().map(|g| f.map_rel(g)).collect::<Result<_>>()?;
        for (g, fg) in maps.iter().zip(&images) {
            for (h, fh) in maps.iter().zip(&images) {
                meter.charge(1, "functor composition check")?;
                compositions += 1;
                if f.map_rel(&compose(h, g)?)? != compose(fh, fg)? {
                    push(
                        FunctorLaw::Composition,
                        format!("composition on `{}` is not preserved", a.id()),
                    );
                }
            }
        }
    }
    if !f.target.ambient().space().contains(src.ambient().space()) {
        push(
            FunctorLaw::Ambient,
            format!(
                "{} ambient does not embed into {}",
                src.ambient().name(),
                f.target.ambient().name()
            ),
        );
    }
    let space = src.ambient().functional_space();
    let count = space.size(1, pairs.len());
    meter.reserve(count.saturating_mul(count), "functor imitation check")?;
    let all: Vec<FinRel> = states(pairs, space).collect();
    let mapped: Vec<FinRel> = all.iter().map(|x| f.map_rel(x)).collect::<Result<_>>()?;
    let mut checked = 0u128;
    'outer: for (x, fx) in all.iter().zip(&mapped) {
        for (y, fy) in all.iter().zip(&mapped) {
            meter.charge(1, "functor imitation check")?;
            checked += 1;
            if src.ambient_imitates(x, y)? && !f.target.ambient_imitates(fx, fy)? {
                push(
                    FunctorLaw::Imitation,
                    format!("{} ⪰ {} is not preserved", x.to_text(), y.to_text()),
                );
                break 'outer;
            }
        }
    }
    Ok(FunctorCheck {
        violations,
        imitation_pairs_checked: checked,
        compositions_checked: compositions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalityPreservation {
    pub source_universal: bool,
    /// Whether `F r` witnesses universality of `F s`.
    pub image_universal: bool,
    pub singleton_preserved: bool,
}

pub fn verify_universality_preservation(
    f: &TcFunctor,
    s: &Simulator,
    meter: &mut Meter,
) -> Result<UniversalityPreservation> {
    let image = f.map_simulator(s)?;
    let singleton_preserved = s.is_singleton().is_none() || image.is_singleton().is_some();
    let Some(r) = find_universality_witness(s, &f.source, meter)? else {
        return Ok(UniversalityPreservation {
            source_universal: false,
            image_universal: false,
            singleton_preserved,
        });
    };
    let fr = Reduction::new(f.map_rel(&r.map)?, Flavor::Lax)?;
    let trivial = Simulator::trivial(&f.target);
    let image_universal = check_reduction(&fr, &image, &trivial, &f.target)?;
    Ok(UniversalityPreservation {
        source_universal: true,
        image_universal,
        singleton_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::lookup_demo;
    use crate::tcc::Ambient;

    #[test]
    fn identity_functor_is_valid() {
        let (inst, s) = lookup_demo();
        let id = TcFunctor::identity(&inst);
        assert!(check_tc_functor(&id, &mut Meter::default())
            .unwrap()
            .is_valid());
        let p = verify_universality_preservation(&id, &s, &mut Meter::default()).unwrap();
        assert!(p.source_universal && p.image_universal && p.singleton_preserved);
    }

    #[test]
    fn broken_object_map_rejected() {
        let (inst, _) = lookup_demo();
        let mut f = TcFunctor::identity(&inst);
        f.target_map[0] = Some(1);
        let check = check_tc_functor(&f, &mut Meter::default()).unwrap();
        assert_eq!(check.violations[0].law, FunctorLaw::Objects);
    }

    #[test]
    fn narrowing_the_ambient_is_rejected() {
        let (inst, _) = lookup_demo();
        let wide = inst.with_ambient(Ambient::Relations);
        let f = TcFunctor::new(
            "narrow",
            &wide,
            &inst,
            (0..4).map(Some).collect(),
            (0..2).map(Some).collect(),
        )
        .unwrap();
        let check = check_tc_functor(&f, &mut Meter::default()).unwrap();
        assert!(check
            .violations
            .iter()
            .any(|v| v.law == FunctorLaw::Ambient));
    }

    #[test]
    fn relabeling_with_enlarged_order() {
        let (inst, s) = lookup_demo();
        let order = Preorder::closure(inst.behaviors(), &[(1, 0)]).unwrap();
        let f = TcFunctor::relabeling(&inst, &[3, 2, 1, 0], &[1, 0], order, "'").unwrap();
        assert!(check_tc_functor(&f, &mut Meter::default())
            .unwrap()
            .is_valid());
        let fs = f.map_simulator(&s).unwrap();
        assert!(fs.is_singleton().is_some());
        assert!(
            verify_universality_preservation(&f, &s, &mut Meter::default())
                .unwrap()
                .image_universal
        );
    }
}
