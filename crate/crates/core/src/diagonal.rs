//! Complete parametrizations, quasi-fixed points and diagonal arguments.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::budget::{space_size, Meter};
use crate::error::{Error, Result};
use crate::finrel::{compose, homs, states, FinRel, FinSet, RelSpace};
use crate::order::{imitates, Preorder};
use crate::simulator::{find_universality_witness, Simulator};
use crate::tcc::{Ambient, TccInstance};

/// A map `F: P×C → B` read as a family of maps `C → B` indexed by programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parametrization {
    pub name: String,
    pub programs: FinSet,
    pub contexts: FinSet,
    pub map: FinRel,
}

impl Parametrization {
    pub fn new(
        name: impl Into<String>,
        programs: &FinSet,
        contexts: &FinSet,
        map: FinRel,
    ) -> Result<Self> {
        let pc = FinSet::product(programs, contexts);
        if map.dom() != &pc {
            return Err(Error::TypeMismatch(format!(
                "parametrization must have domain {}",
                pc.id()
            )));
        }
        Ok(Parametrization {
            name: name.into(),
            programs: programs.clone(),
            contexts: contexts.clone(),
            map,
        })
    }

    /// `eval` itself, indexed by targets.
    pub fn of_eval(inst: &TccInstance) -> Self {
        Parametrization::new("eval", inst.targets(), inst.contexts(), inst.eval().clone())
            .expect("eval is typed")
    }

    /// `eval ∘ s`.
    pub fn through(s: &Simulator, inst: &TccInstance) -> Self {
        let map = compose(inst.eval(), s.assembled()).expect("simulator lands in T×C");
        Parametrization::new(
            format!("eval∘{}", s.name()),
            s.programs(),
            inst.contexts(),
            map,
        )
        .expect("typed")
    }

    pub fn behaviors(&self) -> &FinSet {
        self.map.cod()
    }

    /// `F(p, c)`; the undefined program gives the empty row.
    pub fn at(&self, p: Option<usize>, c: usize) -> Option<&FixedBitSet> {
        p.map(|p| self.map.row(p * self.contexts.len() + c))
    }

    /// Whether program `p` imitates row `a` of `f: A×C → B`.
    fn serves(&self, p: Option<usize>, f: &FinRel, a: usize, order: &Preorder) -> bool {
        let nc = self.contexts.len();
        let empty = FixedBitSet::with_capacity(self.behaviors().len());
        (0..nc).all(|c| order.imitates_sets(self.at(p, c).unwrap_or(&empty), f.row(a * nc + c)))
    }

    /// Least functional witness `p_f: A → P`; undefined tried first unless `total`.
    pub fn witness(&self, f: &FinRel, order: &Preorder, total: bool) -> Option<Vec<Option<usize>>> {
        let nc = self.contexts.len();
        let na = f.dom().len().checked_div(nc).unwrap_or(0);
        let options: Vec<Option<usize>> = if total {
            self.programs.iter().map(Some).collect()
        } else {
            std::iter::once(None)
                .chain(self.programs.iter().map(Some))
                .collect()
        };
        (0..na)
            .map(|a| {
                options
                    .iter()
                    .copied()
                    .find(|&p| self.serves(p, f, a, order))
            })
            .collect()
    }

    /// Checks `F ∘ (p_f ⊗ id) ⪰ f` directly from the composite.
    pub fn check_witness(
        &self,
        f: &FinRel,
        witness: &[Option<usize>],
        order: &Preorder,
    ) -> Result<bool> {
        let a = FinSet::numbered("A", "a", witness.len());
        let p = FinRel::from_fn(&a, &self.programs, |i| witness[i]);
        let nc = self.contexts.len();
        let ac = FinSet::product(&a, &self.contexts);
        let lifted = FinRel::from_fn(&ac, &FinSet::product(&self.programs, &self.contexts), |k| {
            p.value(k / nc).map(|pi| pi * nc + k % nc)
        });
        let composite = compose(&self.map, &lifted)?;
        imitates(&composite, &f.retype(&ac, self.behaviors())?, order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completeness {
    pub complete: bool,
    /// The first map in enumeration order without a witness.
    pub counterexample: Option<FinRel>,
    pub maps_checked: u128,
    /// `(f, p_f)` for every map checked before a counterexample, when kept.
    pub witnesses: Vec<(FinRel, Vec<Option<usize>>)>,
}

/// Decides whether every `f: A×C → B` drawn from `space` has a functional
/// witness. `a` is the size of the parameter set `A`.
pub fn is_complete_parametrization(
    param: &Parametrization,
    a: usize,
    order: &Preorder,
    space: RelSpace,
    total_witnesses: bool,
    keep_witnesses: bool,
    meter: &mut Meter,
) -> Result<Completeness> {
    let aset = FinSet::numbered("A", "a", a);
    let ac = FinSet::product(&aset, &param.contexts);
    let count = space.size(ac.len(), param.behaviors().len());
    meter.reserve(count, "complete parametrization check")?;
    let mut witnesses = Vec::new();
    let mut checked = 0u128;
    for f in homs(&ac, param.behaviors(), space) {
        meter.charge(
            1 + param.programs.len() as u64,
            "complete parametrization check",
        )?;
        checked += 1;
        match param.witness(&f, order, total_witnesses) {
            Some(w) => {
                if keep_witnesses {
                    witnesses.push((f, w));
                }
            }
            None => {
                return Ok(Completeness {
                    complete: false,
                    counterexample: Some(f),
                    maps_checked: checked,
                    witnesses,
                })
            }
        }
    }
    Ok(Completeness {
        complete: true,
        counterexample: None,
        maps_checked: checked,
        witnesses,
    })
}

/// `b ⪰ g ∘ b` for a state `b: I → B`.
pub fn is_quasi_fixed(b: &FinRel, g: &FinRel, order: &Preorder) -> Result<bool> {
    imitates(b, &compose(g, b)?, order)
}

/// Every quasi-fixed state of `g` drawn from `space`.
pub fn quasi_fixed_points(
    g: &FinRel,
    order: &Preorder,
    space: RelSpace,
    meter: &mut Meter,
) -> Result<Vec<FinRel>> {
    let carrier = order.carrier();
    meter.reserve(space.size(1, carrier.len()), "quasi-fixed point search")?;
    let mut out = Vec::new();
    for b in states(carrier, space) {
        meter.charge(1, "quasi-fixed point search")?;
        if is_quasi_fixed(&b, g, order)? {
            out.push(b);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiFixedPoint {
    /// `c ↦ g(F(c, c))`, as a map `I×C → B`.
    pub diagonal: FinRel,
    /// The program that parametrizes the diagonal map.
    pub program: Option<usize>,
    /// `F(c_f, c_f)`.
    pub point: FinRel,
}

/// The diagonal construction: parametrize `c ↦ g(F(c, c))` by some `c_f` and
/// evaluate `F` at `(c_f, c_f)`. Programs and contexts must carry the same labels.
pub fn lawvere_quasi_fixed_point(
    param: &Parametrization,
    g: &FinRel,
    order: &Preorder,
    total: bool,
) -> Result<QuasiFixedPoint> {
    if param.programs.elements() != param.contexts.elements() {
        return Err(Error::invalid(
            "diagonal construction",
            "programs and contexts must coincide",
        ));
    }
    let b = param.behaviors();
    if g.dom() != b || g.cod() != b {
        return Err(Error::TypeMismatch(format!(
            "g must have type {} -> {}",
            b.id(),
            b.id()
        )));
    }
    let nc = param.contexts.len();
    let ic = FinSet::product(&FinSet::unit(), &param.contexts);
    let diagonal = FinRel::from_row_fn(&ic, b, |c| g.image_of_set(param.map.row(c * nc + c)));
    let witness = param.witness(&diagonal, order, total).ok_or_else(|| {
        Error::invalid(
            "parametrization certificate",
            "the diagonal map has no program",
        )
    })?;
    let program = witness.first().copied().flatten();
    let unit = FinSet::unit();
    let point = match program {
        Some(p) => FinRel::from_rows(&unit, b, vec![param.map.row(p * nc + p).clone()])?,
        None => FinRel::empty(&unit, b),
    };
    if !is_quasi_fixed(&point, g, order)? {
        return Err(Error::invalid(
            "diagonal construction",
            "constructed point is not quasi-fixed",
        ));
    }
    Ok(QuasiFixedPoint {
        diagonal,
        program,
        point,
    })
}

/// Programs `r ∘ t_f` transported along a universality witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transport {
    pub parametrization: Parametrization,
    pub witnesses: Vec<(FinRel, Vec<Option<usize>>)>,
}

/// Moves the witnesses of `eval` to witnesses of `eval ∘ s` through a
/// universality witness, checking each one.
pub fn parametrization_through_simulator(
    s: &Simulator,
    base: &[(FinRel, Vec<Option<usize>>)],
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Transport> {
    let r = find_universality_witness(s, inst, meter)?
        .ok_or_else(|| Error::NotUniversal(s.name().to_string()))?;
    let choices = r.choices();
    let param = Parametrization::through(s, inst);
    let mut witnesses = Vec::with_capacity(base.len());
    for (f, t) in base {
        let p: Vec<Option<usize>> = t.iter().map(|x| x.and_then(|t| choices[t])).collect();
        if !param.check_witness(f, &p, inst.order())? {
            return Err(Error::invalid(
                "transported witness",
                "does not parametrize its map",
            ));
        }
        witnesses.push((f.clone(), p));
    }
    Ok(Transport {
        parametrization: param,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unreachability {
    pub unreachable: bool,
    /// A map `C → B` that no program reaches.
    pub witness: Option<FinRel>,
    pub maps_checked: u128,
}

/// Whether `eval ∘ s` misses some map `C → B` drawn from `space`.
pub fn has_unreachability(
    s: &Simulator,
    inst: &TccInstance,
    space: RelSpace,
    meter: &mut Meter,
) -> Result<Unreachability> {
    let param = Parametrization::through(s, inst);
    let total = !inst.ambient().allows_undefined();
    let c = is_complete_parametrization(&param, 1, inst.order(), space, total, false, meter)?;
    Ok(Unreachability {
        unreachable: !c.complete,
        witness: c.counterexample,
        maps_checked: c.maps_checked,
    })
}

/// A section `σ: T×C → C` and retraction `π: C → T×C` with `π ∘ σ = id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractPair {
    pub section: FinRel,
    pub retraction: FinRel,
}

impl RetractPair {
    pub fn new(section: FinRel, retraction: FinRel) -> Result<Self> {
        if !section.is_deterministic() || !retraction.is_deterministic() {
            return Err(Error::invalid(
                "retract pair",
                "both maps must be total functions",
            ));
        }
        if compose(&retraction, &section)? != FinRel::identity(section.dom()) {
            return Err(Error::invalid(
                "retract pair",
                "retraction after section is not the identity",
            ));
        }
        Ok(RetractPair {
            section,
            retraction,
        })
    }

    /// The index embedding of `T×C` into `C`, when `|C| ≥ |T||C|`.
    pub fn by_index(inst: &TccInstance) -> Result<Self> {
        let pairs = inst.pairs();
        let c = inst.contexts();
        if pairs.is_empty() || c.len() < pairs.len() {
            return Err(Error::invalid(
                "retract pair",
                format!("T×C has {} elements but C only {}", pairs.len(), c.len()),
            ));
        }
        let section = FinRel::from_fn(pairs, c, Some);
        let retraction = FinRel::from_fn(c, pairs, |x| Some(if x < pairs.len() { x } else { 0 }));
        RetractPair::new(section, retraction)
    }
}

#[derive(Debug, Clone)]
pub struct SingletonConstructions {
    /// Simulator with constant compiler `t_id` and context reduction `eval`.
    pub by_identity: Result<Simulator>,
    /// Simulator with constant compiler `t_u` and context reduction `σ`.
    pub by_retract: Result<Simulator>,
}

/// Both singleton universal simulators of an instance whose behaviors are its contexts.
pub fn singleton_constructions(
    inst: &TccInstance,
    retract: Option<&RetractPair>,
    meter: &mut Meter,
) -> Result<SingletonConstructions> {
    if inst.behaviors().elements() != inst.contexts().elements() {
        return Err(Error::invalid(
            "singleton construction",
            "behaviors and contexts must coincide",
        ));
    }
    let by_identity = singleton_by_identity(inst, meter);
    let by_retract = match retract {
        Some(r) => singleton_by_retract(inst, r, meter),
        None => RetractPair::by_index(inst).and_then(|r| singleton_by_retract(inst, &r, meter)),
    };
    Ok(SingletonConstructions {
        by_identity,
        by_retract,
    })
}

/// First target whose row imitates the given map `C → B`.
fn parametrizing_target(
    inst: &TccInstance,
    wanted: impl Fn(usize) -> FixedBitSet,
) -> Option<usize> {
    let order = inst.order();
    inst.targets().iter().find(|&t| {
        inst.contexts()
            .iter()
            .all(|c| order.imitates_sets(inst.eval_at(t, c), &wanted(c)))
    })
}

fn programs_as_targets(inst: &TccInstance) -> Result<FinSet> {
    FinSet::new("P", inst.targets().elements().iter().cloned())
}

fn singleton_by_identity(inst: &TccInstance, meter: &mut Meter) -> Result<Simulator> {
    let nb = inst.behaviors().len();
    let t_id = parametrizing_target(inst, |c| {
        let mut r = FixedBitSet::with_capacity(nb);
        r.insert(c);
        r
    })
    .ok_or_else(|| {
        Error::invalid(
            "singleton construction",
            "no target parametrizes the identity",
        )
    })?;
    let programs = programs_as_targets(inst)?;
    let compiler = FinRel::from_fn(&programs, inst.targets(), |_| Some(t_id));
    let context = inst.eval().retype(
        &FinSet::product(&programs, inst.contexts()),
        inst.contexts(),
    )?;
    let s = Simulator::new(
        format!("s_id[{}]", inst.targets().label(t_id)),
        compiler,
        context,
        inst,
    )?;
    assert_universal(&s, inst, meter)?;
    Ok(s)
}

fn singleton_by_retract(
    inst: &TccInstance,
    retract: &RetractPair,
    meter: &mut Meter,
) -> Result<Simulator> {
    let u = compose(inst.eval(), &retract.retraction)?;
    let t_u = parametrizing_target(inst, |c| u.row(c).clone()).ok_or_else(|| {
        Error::invalid("singleton construction", "no target parametrizes eval ∘ π")
    })?;
    let programs = programs_as_targets(inst)?;
    let compiler = FinRel::from_fn(&programs, inst.targets(), |_| Some(t_u));
    let context = retract.section.retype(
        &FinSet::product(&programs, inst.contexts()),
        inst.contexts(),
    )?;
    let s = Simulator::new(
        format!("s_u[{}]", inst.targets().label(t_u)),
        compiler,
        context,
        inst,
    )?;
    assert_universal(&s, inst, meter)?;
    Ok(s)
}

fn assert_universal(s: &Simulator, inst: &TccInstance, meter: &mut Meter) -> Result<()> {
    match find_universality_witness(s, inst, meter)? {
        Some(_) => Ok(()),
        None => Err(Error::NotUniversal(s.name().to_string())),
    }
}

/// Subsets of `C` as targets, `B = {0, 1}`, `eval(t, c) = [c ∈ t]`.
pub fn cantor_instance(n: usize) -> TccInstance {
    let contexts = FinSet::numbered("C", "c", n);
    let targets = FinSet::new(
        "T",
        (0..1usize << n).map(|mask| {
            let members: Vec<String> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i.to_string())
                .collect();
            if members.is_empty() {
                "s._".to_string()
            } else {
                format!("s.{}", members.join("."))
            }
        }),
    )
    .expect("distinct subsets");
    let behaviors = FinSet::new("B", ["0", "1"]).expect("distinct");
    TccInstance::from_table(
        format!("cantor{n}"),
        &targets,
        &contexts,
        Preorder::equality(&behaviors),
        Ambient::Functions,
        |t, c| Some(t >> c & 1),
    )
    .expect("cantor instance is well typed")
}

/// Simulator `P×C → T×C` with compiler `l` and context reduction `⊤_P ⊗ id_C`.
pub fn simulator_of(l: &[usize], inst: &TccInstance, name: &str) -> Result<Simulator> {
    let programs = FinSet::numbered("P", "p", l.len());
    let compiler = FinRel::from_fn(&programs, inst.targets(), |p| Some(l[p]));
    let nc = inst.contexts().len();
    let context = FinRel::from_fn(
        &FinSet::product(&programs, inst.contexts()),
        inst.contexts(),
        |k| Some(k % nc),
    );
    Simulator::new(name, compiler, context, inst)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CantorReport {
    pub n: usize,
    pub targets: usize,
    pub simulators_checked: u128,
    pub universal_found: bool,
    /// Whether `eval` parametrizes every map `C → B` of each space.
    pub complete_all: bool,
    pub complete_functional: bool,
    pub complete_deterministic: bool,
    /// Quasi-fixed points of negation per state space.
    pub negation_fixed_all: usize,
    pub negation_fixed_functional: usize,
    pub negation_fixed_deterministic: usize,
    /// Compilers `P → T` compared for "surjective iff universal".
    pub equivalence_checked: u128,
    pub equivalence_holds: bool,
}

/// Runs the diagonal argument on subsets of an `n`-element set.
///
/// For `n ≤ 2` every total compiler and context reduction with `P = C` is
/// tried; for larger `n` only the context reduction `⊤ ⊗ id`.
pub fn cantor_report(n: usize, meter: &mut Meter) -> Result<CantorReport> {
    if n > 3 {
        return Err(Error::invalid("cantor report", "only n ≤ 3 is supported"));
    }
    let inst = cantor_instance(n);
    let nt = inst.targets().len();
    let programs = FinSet::numbered("P", "p", n);
    let pc = FinSet::product(&programs, inst.contexts());
    let compilers = space_size(nt as u128, n);
    let contexts_count = if n <= 2 {
        space_size(n as u128, n * n)
    } else {
        1
    };
    meter.reserve(
        compilers.saturating_mul(contexts_count),
        "cantor simulators",
    )?;
    let mut checked = 0u128;
    let mut universal_found = false;
    let context_maps: Vec<FinRel> = if n <= 2 {
        homs(&pc, inst.contexts(), RelSpace::Deterministic).collect()
    } else {
        vec![FinRel::from_fn(&pc, inst.contexts(), |k| Some(k % n))]
    };
    for compiler in homs(&programs, inst.targets(), RelSpace::Deterministic) {
        for context in &context_maps {
            checked += 1;
            let s = Simulator::new("candidate", compiler.clone(), context.clone(), &inst)?;
            if find_universality_witness(&s, &inst, meter)?.is_some() {
                universal_found = true;
            }
        }
    }
    let param = Parametrization::of_eval(&inst);
    let order = inst.order();
    let mut complete = [false; 3];
    for (slot, space) in
        complete
            .iter_mut()
            .zip([RelSpace::All, RelSpace::Functional, RelSpace::Deterministic])
    {
        *slot = is_complete_parametrization(&param, 1, order, space, true, false, meter)?.complete;
    }
    let b = inst.behaviors();
    let negation = FinRel::from_fn(b, b, |x| Some(1 - x));
    let mut fixed = [0usize; 3];
    for (slot, space) in
        fixed
            .iter_mut()
            .zip([RelSpace::All, RelSpace::Functional, RelSpace::Deterministic])
    {
        *slot = quasi_fixed_points(&negation, order, space, meter)?.len();
    }
    let (equivalence_checked, equivalence_holds) = if n <= 2 {
        surjection_equivalence(&inst, meter)?
    } else {
        (0, true)
    };
    Ok(CantorReport {
        n,
        targets: nt,
        simulators_checked: checked,
        universal_found,
        complete_all: complete[0],
        complete_functional: complete[1],
        complete_deterministic: complete[2],
        negation_fixed_all: fixed[0],
        negation_fixed_functional: fixed[1],
        negation_fixed_deterministic: fixed[2],
        equivalence_checked,
        equivalence_holds,
    })
}

/// For every `l: P → T` with `|P| ≤ |T|`: `l` surjective iff its simulator is universal.
fn surjection_equivalence(inst: &TccInstance, meter: &mut Meter) -> Result<(u128, bool)> {
    let nt = inst.targets().len();
    let mut checked = 0u128;
    for np in 1..=nt {
        let programs = FinSet::numbered("P", "p", np);
        meter.reserve(space_size(nt as u128, np), "surjection equivalence")?;
        for l in homs(&programs, inst.targets(), RelSpace::Deterministic) {
            checked += 1;
            let choice: Vec<usize> = (0..np).map(|p| l.value(p).expect("total")).collect();
            let surjective = (0..nt).all(|t| choice.contains(&t));
            let s = simulator_of(&choice, inst, "l")?;
            let universal = find_universality_witness(&s, inst, meter)?.is_some();
            if surjective != universal {
                return Ok((checked, false));
            }
        }
    }
    Ok((checked, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::lookup_demo;

    #[test]
    fn lookup_eval_is_complete_for_functions() {
        let (inst, _) = lookup_demo();
        let param = Parametrization::of_eval(&inst);
        let c = is_complete_parametrization(
            &param,
            1,
            inst.order(),
            RelSpace::Deterministic,
            true,
            true,
            &mut Meter::default(),
        )
        .unwrap();
        assert!(c.complete);
        assert_eq!(c.maps_checked, 4);
        for (f, w) in &c.witnesses {
            assert!(param.check_witness(f, w, inst.order()).unwrap());
        }
    }

    #[test]
    fn no_programs_is_incomplete() {
        let (inst, _) = lookup_demo();
        let empty = FinSet::numbered("P", "p", 0);
        let map = FinRel::empty(&FinSet::product(&empty, inst.contexts()), inst.behaviors());
        let param = Parametrization::new("none", &empty, inst.contexts(), map).unwrap();
        let c = is_complete_parametrization(
            &param,
            1,
            inst.order(),
            RelSpace::Deterministic,
            true,
            false,
            &mut Meter::default(),
        )
        .unwrap();
        assert!(!c.complete);
    }

    #[test]
    fn identity_and_constant_have_quasi_fixed_points() {
        let b = FinSet::numbered("B", "b", 3);
        let order = Preorder::equality(&b);
        let id = FinRel::identity(&b);
        let mut m = Meter::default();
        assert_eq!(
            quasi_fixed_points(&id, &order, RelSpace::Deterministic, &mut m)
                .unwrap()
                .len(),
            3
        );
        let k = FinRel::from_fn(&b, &b, |_| Some(1));
        let fixed = quasi_fixed_points(&k, &order, RelSpace::Deterministic, &mut m).unwrap();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0].value(0), Some(1));
    }

    #[test]
    fn negation_is_fixed_point_free_on_deterministic_states() {
        let r = cantor_report(1, &mut Meter::default()).unwrap();
        assert_eq!(r.negation_fixed_deterministic, 0);
        // The empty state and the full state {0, 1} are quasi-fixed.
        assert_eq!(r.negation_fixed_all, 2);
        assert_eq!(r.negation_fixed_functional, 1);
    }

    #[test]
    fn cantor_small() {
        for n in 1..=2 {
            let r = cantor_report(n, &mut Meter::default()).unwrap();
            assert!(!r.universal_found);
            assert!(r.equivalence_holds);
            assert!(r.complete_functional && r.complete_deterministic && !r.complete_all);
        }
    }

    #[test]
    fn singleton_lookup() {
        let (inst, _) = lookup_demo();
        let built = singleton_constructions(&inst, None, &mut Meter::default()).unwrap();
        let s = built.by_identity.unwrap();
        assert_eq!(s.programs().elements(), inst.targets().elements());
        assert!(built.by_retract.is_err());
    }
}
