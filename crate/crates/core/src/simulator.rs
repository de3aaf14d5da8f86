//! Simulators, reductions, universality, the context-reduction preorder and
//! the no-go criterion.

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use serde::Serialize;

use crate::budget::Meter;
use crate::error::{Error, Result};
use crate::finrel::{empty_row, row_is_empty, singleton_row, FinRel, FinSet, RelSpace};
use crate::tcc::TccInstance;

/// A simulator `P×C → T×C` split into a compiler `P → T` and a context
/// reduction `P×C → C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulator {
    name: String,
    programs: FinSet,
    compiler: FinRel,
    context: FinRel,
    assembled: FinRel,
}

impl Simulator {
    /// Validates the split and both domain conditions against `inst`.
    pub fn new(
        name: impl Into<String>,
        compiler: FinRel,
        context: FinRel,
        inst: &TccInstance,
    ) -> Result<Self> {
        let name = name.into();
        let programs = compiler.dom().clone();
        if compiler.cod() != inst.targets() {
            return Err(Error::TypeMismatch(format!(
                "compiler of `{name}` lands in `{}`, not the targets `{}`",
                compiler.cod().id(),
                inst.targets().id()
            )));
        }
        let pc = FinSet::product(&programs, inst.contexts());
        if context.dom() != &pc || context.cod() != inst.contexts() {
            return Err(Error::TypeMismatch(format!(
                "context reduction of `{name}` must have type {} -> {}",
                pc.id(),
                inst.contexts().id()
            )));
        }
        if !compiler.is_functional() {
            return Err(Error::NotFunctional(format!("compiler of `{name}`")));
        }
        let ambient = inst.ambient();
        if !ambient.admits(&compiler) || !ambient.admits(&context) {
            return Err(Error::invalid(
                "simulator",
                format!(
                    "`{name}` is not a morphism of the {} ambient",
                    ambient.name()
                ),
            ));
        }
        let nc = inst.contexts().len();
        for p in programs.iter() {
            let defined = !row_is_empty(compiler.row(p));
            let mut any = false;
            for c in 0..nc {
                let row = context.row(p * nc + c);
                if !row_is_empty(row) {
                    any = true;
                    if !defined {
                        return Err(Error::SplitViolation(format!(
                            "`{name}`: context reduction defined at ({},{}) where the compiler is undefined",
                            programs.label(p),
                            inst.contexts().label(c)
                        )));
                    }
                }
            }
            if defined && nc > 0 && !any {
                return Err(Error::SplitViolation(format!(
                    "`{name}`: compiler defined at `{}` but no context is reduced",
                    programs.label(p)
                )));
            }
        }
        let assembled = assemble(&compiler, &context, inst);
        Ok(Simulator {
            name,
            programs,
            compiler,
            context,
            assembled,
        })
    }

    /// Recovers the canonical compiler and context reduction of a raw
    /// morphism `P×C → T×C`.
    pub fn from_raw(
        name: impl Into<String>,
        programs: &FinSet,
        raw: &FinRel,
        inst: &TccInstance,
    ) -> Result<Self> {
        let name = name.into();
        let pc = FinSet::product(programs, inst.contexts());
        if raw.dom() != &pc || raw.cod() != inst.pairs() {
            return Err(Error::TypeMismatch(format!(
                "raw simulator `{name}` must have type {} -> {}",
                pc.id(),
                inst.pairs().id()
            )));
        }
        if inst.contexts().is_empty() {
            return Err(Error::NoTotalContext);
        }
        let (compiler, context) = split_raw(programs, inst.targets(), inst.contexts(), raw, &name)?;
        let sim = Simulator::new(name, compiler, context, inst)?;
        if &sim.assembled != raw {
            return Err(Error::SplitViolation(format!(
                "`{}` does not factor through a compiler",
                sim.name
            )));
        }
        Ok(sim)
    }

    /// `P = T`, `s = id_{T×C}`.
    pub fn trivial(inst: &TccInstance) -> Self {
        let t = inst.targets();
        let c = inst.contexts();
        let compiler = FinRel::identity(t);
        let context = FinRel::from_fn(inst.pairs(), c, |k| Some(k % c.len()));
        Simulator::new("trivial", compiler, context, inst).expect("the trivial simulator is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Simulator {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn programs(&self) -> &FinSet {
        &self.programs
    }

    pub fn compiler(&self) -> &FinRel {
        &self.compiler
    }

    pub fn context(&self) -> &FinRel {
        &self.context
    }

    /// The assembled morphism `P×C → T×C`.
    pub fn assembled(&self) -> &FinRel {
        &self.assembled
    }

    pub fn target_of(&self, p: usize) -> Option<usize> {
        self.compiler.value(p)
    }

    /// `s(p, c)` as a subset of `T×C`.
    pub fn at(&self, p: usize, c: usize, nc: usize) -> &FixedBitSet {
        self.assembled.row(p * nc + c)
    }

    /// The compiled target shared by all programs, when the compiler is
    /// constant. `Some(None)` means the compiler is nowhere defined.
    pub fn is_singleton(&self) -> Option<Option<usize>> {
        let mut seen: Option<Option<usize>> = None;
        for p in self.programs.iter() {
            let v = self.compiler.value(p);
            match seen {
                None => seen = Some(v),
                Some(prev) if prev != v => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(None))
    }

    /// Whether this is the trivial simulator of `inst`.
    pub fn is_trivial(&self, inst: &TccInstance) -> bool {
        &self.programs == inst.targets() && self.assembled == FinRel::identity(inst.pairs())
    }
}

fn assemble(compiler: &FinRel, context: &FinRel, inst: &TccInstance) -> FinRel {
    let nc = inst.contexts().len();
    let pc = context.dom();
    FinRel::from_row_fn(pc, inst.pairs(), |k| {
        let (p, c) = (k / nc.max(1), k % nc.max(1));
        let mut row = empty_row(inst.pairs().len());
        for t in compiler.image(p) {
            for c2 in context.row(p * nc + c).ones() {
                row.insert(t * nc + c2);
            }
        }
        row
    })
}

/// Canonical split of a raw morphism `D×C → T×C` into `D → T` and `D×C → C`.
pub(crate) fn split_raw(
    dom: &FinSet,
    targets: &FinSet,
    contexts: &FinSet,
    raw: &FinRel,
    name: &str,
) -> Result<(FinRel, FinRel)> {
    let nc = contexts.len();
    let mut t_rows = vec![empty_row(targets.len()); dom.len()];
    let mut c_rows = vec![empty_row(nc); dom.len() * nc];
    for d in dom.iter() {
        for c in 0..nc {
            for k in raw.row(d * nc + c).ones() {
                t_rows[d].insert(k / nc);
                c_rows[d * nc + c].insert(k % nc);
            }
        }
    }
    let compiler = FinRel::from_rows(dom, targets, t_rows)?;
    if !compiler.is_functional() {
        return Err(Error::NotFunctional(format!(
            "recovered compiler of `{name}`"
        )));
    }
    let context = FinRel::from_rows(raw.dom(), contexts, c_rows)?;
    Ok((compiler, context))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Strict,
    Lax,
    Oplax,
}

/// A functional map of programs `P' → P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub map: FinRel,
    pub flavor: Flavor,
}

impl Reduction {
    pub fn new(map: FinRel, flavor: Flavor) -> Result<Self> {
        if !map.is_functional() {
            return Err(Error::NotFunctional("reduction".into()));
        }
        Ok(Reduction { map, flavor })
    }

    pub fn identity(programs: &FinSet, flavor: Flavor) -> Self {
        Reduction {
            map: FinRel::identity(programs),
            flavor,
        }
    }

    /// Builds `T' → P` from per-element choices, `None` for undefined.
    pub fn from_choices(
        dom: &FinSet,
        cod: &FinSet,
        choices: &[Option<usize>],
        flavor: Flavor,
    ) -> Self {
        Reduction {
            map: FinRel::from_fn(dom, cod, |i| choices[i]),
            flavor,
        }
    }

    pub fn choices(&self) -> Vec<Option<usize>> {
        self.map.dom().iter().map(|i| self.map.value(i)).collect()
    }
}

/// `s ∘ (r ⊗ id_C)` for a functional `r: P' → P`.
pub fn pull_back(s: &Simulator, r: &FinRel, inst: &TccInstance) -> Result<FinRel> {
    if r.cod() != s.programs() {
        return Err(Error::TypeMismatch(format!(
            "reduction lands in `{}`, simulator `{}` has programs `{}`",
            r.cod().id(),
            s.name(),
            s.programs().id()
        )));
    }
    let nc = inst.contexts().len();
    let dom = FinSet::product(r.dom(), inst.contexts());
    Ok(FinRel::from_row_fn(&dom, inst.pairs(), |k| {
        let (p2, c) = (k / nc.max(1), k % nc.max(1));
        let mut row = empty_row(inst.pairs().len());
        for p in r.image(p2) {
            row.union_with(s.at(p, c, nc));
        }
        row
    }))
}

/// Checks the reduction `r` from `target` to `source` of the given flavor:
/// `source ∘ (r⊗id)` equals, imitates, or is imitated by `target`.
pub fn check_reduction(
    r: &Reduction,
    source: &Simulator,
    target: &Simulator,
    inst: &TccInstance,
) -> Result<bool> {
    if r.map.dom() != target.programs() {
        return Err(Error::TypeMismatch(format!(
            "reduction starts at `{}`, simulator `{}` has programs `{}`",
            r.map.dom().id(),
            target.name(),
            target.programs().id()
        )));
    }
    if !r.map.is_functional() {
        return Err(Error::NotFunctional("reduction".into()));
    }
    let pulled = pull_back(source, &r.map, inst)?;
    let other = target.assembled();
    match r.flavor {
        Flavor::Strict => Ok(&pulled == other),
        Flavor::Lax => inst.ambient_imitates(&pulled, other),
        Flavor::Oplax => inst.ambient_imitates(other, &pulled),
    }
}

/// Options for one reduction value: undefined (when the ambient allows it)
/// followed by every program.
pub(crate) fn program_options(n: usize, inst: &TccInstance) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(n + 1);
    if inst.ambient().allows_undefined() {
        out.push(None);
    }
    out.extend((0..n).map(Some));
    out
}

/// Whether program `opt` serves target `t` in every context, laxly
/// (`eval(s(p,c)) ⪰ eval(t,c)`) or oplaxly.
pub(crate) fn serves(
    s: &Simulator,
    opt: Option<usize>,
    t: usize,
    flavor: Flavor,
    inst: &TccInstance,
) -> bool {
    let nc = inst.contexts().len();
    let nb = inst.behaviors().len();
    let order = inst.order();
    (0..nc).all(|c| {
        let nu = match opt {
            Some(p) => inst.eval_pairs(s.at(p, c, nc)),
            None => empty_row(nb),
        };
        let mu = inst.eval_at(t, c);
        match flavor {
            Flavor::Lax => order.imitates_sets(&nu, mu),
            Flavor::Oplax => order.imitates_sets(mu, &nu),
            Flavor::Strict => {
                let direct = match opt {
                    Some(p) => s.at(p, c, nc).clone(),
                    None => empty_row(inst.pairs().len()),
                };
                direct == singleton_row(inst.pairs().len(), inst.pair(t, c))
            }
        }
    })
}

/// The programs that serve each target laxly, per target in option order.
pub fn lax_options(
    s: &Simulator,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Vec<Vec<Option<usize>>>> {
    let opts = program_options(s.programs().len(), inst);
    let cost = (inst.targets().len() * opts.len() * inst.contexts().len().max(1)) as u128;
    meter.reserve(cost, "lax reduction options")?;
    meter.charge(cost as u64, "lax reduction options")?;
    Ok(inst
        .targets()
        .iter()
        .map(|t| {
            opts.iter()
                .copied()
                .filter(|&o| serves(s, o, t, Flavor::Lax, inst))
                .collect()
        })
        .collect())
}

/// The lexicographically least lax reduction from the trivial simulator to
/// `s`, if one exists.
///
/// Imitation is decided row by row, so the search over all `(|P|+1)^|T|`
/// functional maps splits into an independent choice per target; the least
/// valid choice per target gives the least map overall.
pub fn find_universality_witness(
    s: &Simulator,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Option<Reduction>> {
    let options = lax_options(s, inst, meter)?;
    let mut choice = Vec::with_capacity(options.len());
    for opts in &options {
        match opts.first() {
            Some(&o) => choice.push(o),
            None => return Ok(None),
        }
    }
    Ok(Some(Reduction::from_choices(
        inst.targets(),
        s.programs(),
        &choice,
        Flavor::Lax,
    )))
}

pub fn is_universal(s: &Simulator, inst: &TccInstance, meter: &mut Meter) -> Result<bool> {
    Ok(find_universality_witness(s, inst, meter)?.is_some())
}

/// Outcome of a context-reduction decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextReduction {
    pub holds: bool,
    /// A context reduction `A×C → C` witnessing the relation.
    pub witness: Option<FinRel>,
    /// The space the witness was drawn from.
    pub space: RelSpace,
    /// True when only a supplied witness was checked.
    pub checked_only: bool,
}

/// Narrows a requested witness space to what the ambient admits.
pub fn witness_space(inst: &TccInstance, requested: Option<RelSpace>) -> RelSpace {
    let ambient = inst.ambient().space();
    match (requested, ambient) {
        (None, a) => a,
        (Some(_), RelSpace::Deterministic) | (Some(RelSpace::Deterministic), _) => {
            RelSpace::Deterministic
        }
        (Some(RelSpace::Functional), _) | (_, RelSpace::Functional) => RelSpace::Functional,
        (Some(RelSpace::All), RelSpace::All) => RelSpace::All,
    }
}

/// Decides whether `f` lax (or oplax) context-reduces to `g`.
///
/// With a witness only that witness is checked. Otherwise the search runs
/// row by row: for each `(a, c)` the set `f_C(a, c)` is chosen on its own,
/// which is exact for every witness space.
pub fn context_reduces(
    f: &FinRel,
    g: &FinRel,
    inst: &TccInstance,
    flavor: Flavor,
    witness: Option<&FinRel>,
    space: Option<RelSpace>,
    meter: &mut Meter,
) -> Result<ContextReduction> {
    f.same_type(g, "context reduction")?;
    if f.cod() != inst.targets() {
        return Err(Error::TypeMismatch(format!(
            "context reduction needs morphisms into `{}`",
            inst.targets().id()
        )));
    }
    if flavor == Flavor::Strict {
        return Err(Error::invalid(
            "context reduction",
            "only lax and oplax flavors exist",
        ));
    }
    let a = f.dom();
    let c = inst.contexts();
    let ac = FinSet::product(a, c);
    let nc = c.len();
    let order = inst.order();
    if let Some(w) = witness {
        if w.dom() != &ac || w.cod() != c {
            return Err(Error::TypeMismatch(format!(
                "context witness must have type {} -> {}",
                ac.id(),
                c.id()
            )));
        }
        meter.charge((a.len() * nc) as u64, "context reduction check")?;
        let holds = (0..a.len()).all(|ai| {
            (0..nc).all(|ci| {
                let lhs = eval_product(inst, f.row(ai), w.row(ai * nc + ci));
                let rhs = eval_product(inst, g.row(ai), &singleton_row(nc, ci));
                match flavor {
                    Flavor::Lax => order.imitates_sets(&lhs, &rhs),
                    _ => order.imitates_sets(&rhs, &lhs),
                }
            })
        });
        let space = if w.is_deterministic() {
            RelSpace::Deterministic
        } else if w.is_functional() {
            RelSpace::Functional
        } else {
            RelSpace::All
        };
        return Ok(ContextReduction {
            holds,
            witness: holds.then(|| w.clone()),
            space,
            checked_only: true,
        });
    }
    let space = witness_space(inst, space);
    let cost = (a.len() * nc * (nc + 1)) as u128;
    meter.reserve(cost, "context reduction search")?;
    meter.charge(cost as u64, "context reduction search")?;
    let mut rows = Vec::with_capacity(a.len() * nc);
    for ai in 0..a.len() {
        for ci in 0..nc {
            let mu = eval_product(inst, g.row(ai), &singleton_row(nc, ci));
            let found = match flavor {
                Flavor::Lax => lax_row(inst, f.row(ai), &mu, space),
                _ => oplax_row(inst, f.row(ai), &mu, space),
            };
            match found {
                Some(row) => rows.push(row),
                None => {
                    return Ok(ContextReduction {
                        holds: false,
                        witness: None,
                        space,
                        checked_only: false,
                    })
                }
            }
        }
    }
    let w = FinRel::from_rows(&ac, c, rows)?;
    Ok(ContextReduction {
        holds: true,
        witness: Some(w),
        space,
        checked_only: false,
    })
}

/// `eval(targets × contexts)`.
pub(crate) fn eval_product(
    inst: &TccInstance,
    targets: &FixedBitSet,
    contexts: &FixedBitSet,
) -> FixedBitSet {
    let mut out = empty_row(inst.behaviors().len());
    for t in targets.ones() {
        out.union_with(&inst.eval_over(t, contexts));
    }
    out
}

/// A context set `S` with `eval(f(a) × S) ⪰ μ`.
fn lax_row(
    inst: &TccInstance,
    f_row: &FixedBitSet,
    mu: &FixedBitSet,
    space: RelSpace,
) -> Option<FixedBitSet> {
    let nc = inst.contexts().len();
    let order = inst.order();
    match space {
        RelSpace::All => {
            if row_is_empty(mu) {
                return Some(empty_row(nc));
            }
            // Every context whose behaviors all sit above some element of μ can
            // be included without breaking the degradation; including all of
            // them is then best for the enhancement.
            let mut s = empty_row(nc);
            for c in 0..nc {
                let nu = eval_product(inst, f_row, &singleton_row(nc, c));
                if nu.ones().all(|n| !order.below(n).is_disjoint(mu)) {
                    s.insert(c);
                }
            }
            let nu = eval_product(inst, f_row, &s);
            order.imitates_sets(&nu, mu).then_some(s)
        }
        RelSpace::Functional | RelSpace::Deterministic => {
            let undefined = (space == RelSpace::Functional).then(|| empty_row(nc));
            undefined
                .into_iter()
                .chain((0..nc).map(|c| singleton_row(nc, c)))
                .find(|s| order.imitates_sets(&eval_product(inst, f_row, s), mu))
        }
    }
}

/// A context set `S` with `μ ⪰ eval(f(a) × S)`.
fn oplax_row(
    inst: &TccInstance,
    f_row: &FixedBitSet,
    mu: &FixedBitSet,
    space: RelSpace,
) -> Option<FixedBitSet> {
    let nc = inst.contexts().len();
    if space != RelSpace::Deterministic {
        return Some(empty_row(nc));
    }
    let order = inst.order();
    (0..nc)
        .map(|c| singleton_row(nc, c))
        .find(|s| order.imitates_sets(mu, &eval_product(inst, f_row, s)))
}

/// The composite context reduction witnessing `f ⪰ h` from witnesses of
/// `f ⪰ g` (`f_c`) and `g ⪰ h` (`g_c`): `(a, c) ↦ f_c(a, g_c(a, c))`.
pub fn compose_context_witnesses(f_c: &FinRel, g_c: &FinRel) -> Result<FinRel> {
    f_c.same_type(g_c, "context witness composition")?;
    let nc = f_c.cod().len();
    Ok(FinRel::from_row_fn(f_c.dom(), f_c.cod(), |k| {
        let a = k / nc.max(1);
        let mut row = empty_row(nc);
        for c2 in g_c.row(k).ones() {
            row.union_with(f_c.row(a * nc + c2));
        }
        row
    }))
}

/// A functional state `I → T` as a relation.
pub fn state_rel(inst: &TccInstance, t: Option<usize>) -> FinRel {
    FinRel::from_fn(&FinSet::unit(), inst.targets(), |_| t)
}

/// `{f ∘ a | a a deterministic state of A}` for a functional `f: A → T`, in
/// first-appearance order with `None` for the empty state.
pub fn functional_image(f: &FinRel) -> Result<Vec<Option<usize>>> {
    if !f.is_functional() {
        return Err(Error::NotFunctional("functional image argument".into()));
    }
    let mut out: Vec<Option<usize>> = Vec::new();
    for a in f.dom().iter() {
        let v = f.value(a);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// A map from functional states of `T` to the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneFn {
    pub name: String,
    pub values: Vec<BigRational>,
    pub undefined: BigRational,
}

impl MonotoneFn {
    pub fn new(name: impl Into<String>, values: Vec<BigRational>, undefined: BigRational) -> Self {
        MonotoneFn {
            name: name.into(),
            values,
            undefined,
        }
    }

    pub fn constant(name: impl Into<String>, n: usize, v: BigRational) -> Self {
        MonotoneFn {
            name: name.into(),
            values: vec![v.clone(); n],
            undefined: v,
        }
    }

    pub fn value(&self, t: Option<usize>) -> &BigRational {
        match t {
            Some(i) => &self.values[i],
            None => &self.undefined,
        }
    }
}

/// First pair `(x, y)` with `x ⪰^c y` but `φ(x) < φ(y)`, over all functional
/// states of the ambient.
pub fn check_monotone(
    phi: &MonotoneFn,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Option<(Option<usize>, Option<usize>)>> {
    if phi.values.len() != inst.targets().len() {
        return Err(Error::TypeMismatch(format!(
            "`{}` has {} values for {} targets",
            phi.name,
            phi.values.len(),
            inst.targets().len()
        )));
    }
    let states = inst.functional_states();
    for &x in &states {
        for &y in &states {
            if phi.value(x) >= phi.value(y) {
                continue;
            }
            let fx = state_rel(inst, x);
            let fy = state_rel(inst, y);
            if context_reduces(&fx, &fy, inst, Flavor::Lax, None, None, meter)?.holds {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NogoVerdict {
    NotUniversal,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NogoOutcome {
    pub verdict: NogoVerdict,
    pub sup_image: Option<BigRational>,
    pub sup_all: Option<BigRational>,
    pub image: Vec<Option<usize>>,
    /// Result of the exhaustive witness search, when it fit the budget.
    pub witness_search: Option<bool>,
}

/// Compares `sup φ` over the functional image of the compiler with `sup φ`
/// over all targets. `φ` must pass [`check_monotone`] first.
pub fn nogo_check(
    s: &Simulator,
    phi: &MonotoneFn,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<NogoOutcome> {
    if let Some((x, y)) = check_monotone(phi, inst, meter)? {
        let label =
            |v: Option<usize>| v.map_or("∅".to_string(), |i| inst.targets().label(i).to_string());
        return Err(Error::invalid(
            "monotone function",
            format!(
                "`{}` decreases from {} to {} along a context reduction",
                phi.name,
                label(x),
                label(y)
            ),
        ));
    }
    let image = functional_image(s.compiler())?;
    let sup = |states: &[Option<usize>]| states.iter().map(|&t| phi.value(t)).max().cloned();
    let sup_image = sup(&image);
    let all = functional_image(&FinRel::identity(inst.targets()))?;
    let sup_all = sup(&all);
    let strictly_less = match (&sup_image, &sup_all) {
        (Some(a), Some(b)) => a < b,
        (None, Some(_)) => true,
        _ => false,
    };
    let verdict = if strictly_less {
        NogoVerdict::NotUniversal
    } else {
        NogoVerdict::Inconclusive
    };
    let witness_search = match find_universality_witness(s, inst, meter) {
        Ok(w) => Some(w.is_some()),
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e),
    };
    if verdict == NogoVerdict::NotUniversal && witness_search == Some(true) {
        return Err(Error::invalid(
            "no-go check",
            format!("`{}` was found universal despite the sup gap", s.name()),
        ));
    }
    Ok(NogoOutcome {
        verdict,
        sup_image,
        sup_all,
        image,
        witness_search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Preorder;
    use crate::tcc::Ambient;

    fn chain_instance() -> TccInstance {
        let t = FinSet::new("T", ["hi", "lo"]).unwrap();
        let c = FinSet::numbered("C", "c", 2);
        let b = FinSet::new("B", ["b2", "b1"]).unwrap();
        TccInstance::from_table(
            "chain",
            &t,
            &c,
            Preorder::closure(&b, &[(1, 0)]).unwrap(),
            Ambient::Relations,
            |t, _| Some(1 - t),
        )
        .unwrap()
    }

    #[test]
    fn trivial_is_universal_with_least_witness() {
        let inst = chain_instance();
        let s = Simulator::trivial(&inst);
        let r = find_universality_witness(&s, &inst, &mut Meter::default())
            .unwrap()
            .unwrap();
        // `hi` dominates `lo`, so it is the least program serving both.
        assert_eq!(r.choices(), vec![Some(0), Some(0)]);
        assert!(check_reduction(&r, &s, &s, &inst).unwrap());
        let eq = inst.renamed("eq");
        let eq = TccInstance::new(
            "eq",
            eq.targets(),
            eq.contexts(),
            crate::tcc::BehaviorStructure::new(
                eq.eval().clone(),
                Preorder::equality(eq.behaviors()),
            )
            .unwrap(),
            Ambient::Relations,
        )
        .unwrap();
        let r = find_universality_witness(&Simulator::trivial(&eq), &eq, &mut Meter::default())
            .unwrap()
            .unwrap();
        assert_eq!(r.map, FinRel::identity(eq.targets()));
        assert!(check_reduction(
            &Reduction::identity(s.programs(), Flavor::Strict),
            &s,
            &s,
            &inst
        )
        .unwrap());
    }

    #[test]
    fn raw_round_trip() {
        let inst = chain_instance();
        let s = Simulator::trivial(&inst);
        let back = Simulator::from_raw("again", s.programs(), s.assembled(), &inst).unwrap();
        assert_eq!(back.compiler(), s.compiler());
        assert_eq!(back.context(), s.context());
    }

    #[test]
    fn target_dependent_context_rejected() {
        let inst = chain_instance();
        let p = FinSet::numbered("P", "p", 1);
        let pc = FinSet::product(&p, inst.contexts());
        // s(p, c0) = (hi, c0), s(p, c1) = (lo, c1): the target depends on the context.
        let raw = FinRel::from_pairs(&pc, inst.pairs(), [(0, 0), (1, 3)]).unwrap();
        assert!(Simulator::from_raw("bad", &p, &raw, &inst).is_err());
    }

    #[test]
    fn lax_but_not_oplax() {
        let inst = chain_instance();
        let s = Simulator::trivial(&inst);
        // Send both targets to `hi`, whose behavior b1 dominates b2.
        let r = Reduction::from_choices(
            inst.targets(),
            s.programs(),
            &[Some(0), Some(0)],
            Flavor::Lax,
        );
        assert!(check_reduction(&r, &s, &s, &inst).unwrap());
        let op = Reduction {
            flavor: Flavor::Oplax,
            ..r
        };
        assert!(!check_reduction(&op, &s, &s, &inst).unwrap());
    }

    #[test]
    fn context_reduction_reflexive_and_ordered() {
        let inst = chain_instance();
        let hi = state_rel(&inst, Some(0));
        let lo = state_rel(&inst, Some(1));
        let mut m = Meter::default();
        assert!(
            context_reduces(&hi, &lo, &inst, Flavor::Lax, None, None, &mut m)
                .unwrap()
                .holds
        );
        assert!(
            !context_reduces(&lo, &hi, &inst, Flavor::Lax, None, None, &mut m)
                .unwrap()
                .holds
        );
        let refl = FinRel::from_fn(
            &FinSet::product(&FinSet::unit(), inst.contexts()),
            inst.contexts(),
            Some,
        );
        assert!(
            context_reduces(&lo, &lo, &inst, Flavor::Lax, Some(&refl), None, &mut m)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn singleton_detection() {
        let inst = chain_instance();
        assert_eq!(Simulator::trivial(&inst).is_singleton(), None);
        let p = FinSet::numbered("P", "p", 3);
        let compiler = FinRel::from_fn(&p, inst.targets(), |_| Some(1));
        let pc = FinSet::product(&p, inst.contexts());
        let context = FinRel::from_fn(&pc, inst.contexts(), |k| Some(k % 2));
        let s = Simulator::new("const", compiler, context, &inst).unwrap();
        assert_eq!(s.is_singleton(), Some(Some(1)));
        assert_eq!(functional_image(s.compiler()).unwrap(), vec![Some(1)]);
    }
}
