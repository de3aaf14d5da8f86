//! Processings, simulator morphisms and parsimony.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::budget::{space_size, Meter};
use crate::error::{Error, Result};
use crate::finrel::{empty_row, row_is_empty, singleton_row, FinRel, FinSet};
use crate::simulator::{
    check_reduction, context_reduces, find_universality_witness, lax_options, program_options,
    pull_back, serves, split_raw, state_rel, Flavor, Reduction, Simulator,
};
use crate::tcc::{Ambient, TccInstance};

/// A program-dependent rewiring `q: P×T×C → T×C`, split into
/// `q_T: P×T → T` and `q_C: P×T×C → C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Processing {
    name: String,
    programs: FinSet,
    target_map: FinRel,
    context_map: FinRel,
    assembled: FinRel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessingCondition {
    Split,
    Domain,
    Ambient,
    Weakening,
    Result,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessingViolation {
    pub condition: ProcessingCondition,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessingCheck {
    pub violations: Vec<ProcessingViolation>,
    /// The processed simulator, when every condition holds.
    pub result: Option<Simulator>,
}

impl ProcessingCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Processing {
    pub fn from_parts(
        name: impl Into<String>,
        programs: &FinSet,
        target_map: FinRel,
        context_map: FinRel,
        inst: &TccInstance,
    ) -> Result<Self> {
        let name = name.into();
        let pt = FinSet::product(programs, inst.targets());
        let ptc = FinSet::product(&pt, inst.contexts());
        if target_map.dom() != &pt || target_map.cod() != inst.targets() {
            return Err(Error::TypeMismatch(format!(
                "target map of `{name}` must have type {} -> {}",
                pt.id(),
                inst.targets().id()
            )));
        }
        if context_map.dom() != &ptc || context_map.cod() != inst.contexts() {
            return Err(Error::TypeMismatch(format!(
                "context map of `{name}` must have type {} -> {}",
                ptc.id(),
                inst.contexts().id()
            )));
        }
        if !target_map.is_functional() {
            return Err(Error::NotFunctional(format!("target map of `{name}`")));
        }
        let nc = inst.contexts().len();
        let assembled = FinRel::from_row_fn(&ptc, inst.pairs(), |k| {
            let mut row = empty_row(inst.pairs().len());
            let pt_index = k / nc.max(1);
            for t in target_map.image(pt_index) {
                for c in context_map.row(k).ones() {
                    row.insert(t * nc + c);
                }
            }
            row
        });
        Ok(Processing {
            name,
            programs: programs.clone(),
            target_map,
            context_map,
            assembled,
        })
    }

    /// Splits a raw `P×T×C → T×C`; fails when the target depends on the context.
    pub fn from_raw(
        name: impl Into<String>,
        programs: &FinSet,
        raw: &FinRel,
        inst: &TccInstance,
    ) -> Result<Self> {
        let name = name.into();
        let pt = FinSet::product(programs, inst.targets());
        let ptc = FinSet::product(&pt, inst.contexts());
        if raw.dom() != &ptc || raw.cod() != inst.pairs() {
            return Err(Error::TypeMismatch(format!(
                "processing `{name}` must have type {} -> {}",
                ptc.id(),
                inst.pairs().id()
            )));
        }
        if inst.contexts().is_empty() {
            return Err(Error::NoTotalContext);
        }
        let (target_map, context_map) =
            split_raw(&pt, inst.targets(), inst.contexts(), raw, &name)?;
        let q = Processing::from_parts(name, programs, target_map, context_map, inst)?;
        if &q.assembled != raw {
            return Err(Error::SplitViolation(format!(
                "processing `{}` does not split",
                q.name
            )));
        }
        Ok(q)
    }

    /// `⊤_P ⊗ id_{T×C}`.
    pub fn identity(programs: &FinSet, inst: &TccInstance) -> Self {
        let nt = inst.targets().len();
        let nc = inst.contexts().len();
        let pt = FinSet::product(programs, inst.targets());
        let ptc = FinSet::product(&pt, inst.contexts());
        let target_map = FinRel::from_fn(&pt, inst.targets(), |k| Some(k % nt));
        let context_map = FinRel::from_fn(&ptc, inst.contexts(), |k| Some(k % nc));
        Processing::from_parts("id", programs, target_map, context_map, inst)
            .expect("identity processing is well typed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn programs(&self) -> &FinSet {
        &self.programs
    }

    pub fn target_map(&self) -> &FinRel {
        &self.target_map
    }

    pub fn context_map(&self) -> &FinRel {
        &self.context_map
    }

    pub fn assembled(&self) -> &FinRel {
        &self.assembled
    }

    /// `q(p, t, c)`.
    pub fn at(&self, p: usize, t: usize, c: usize, inst: &TccInstance) -> &FixedBitSet {
        let nt = inst.targets().len();
        let nc = inst.contexts().len();
        self.assembled.row((p * nt + t) * nc + c)
    }

    /// The `P`-correlated composite `(p, c) ↦ ∪ q(p, x)` over `x ∈ m(p, c)`.
    pub fn apply(&self, m: &FinRel, inst: &TccInstance) -> Result<FinRel> {
        let pc = FinSet::product(&self.programs, inst.contexts());
        if m.dom() != &pc || m.cod() != inst.pairs() {
            return Err(Error::TypeMismatch(format!(
                "processing `{}` applies to {} -> {}",
                self.name,
                pc.id(),
                inst.pairs().id()
            )));
        }
        let nc = inst.contexts().len();
        Ok(FinRel::from_row_fn(&pc, inst.pairs(), |k| {
            let p = k / nc.max(1);
            let mut row = empty_row(inst.pairs().len());
            for x in m.row(k).ones() {
                row.union_with(self.at(p, x / nc, x % nc, inst));
            }
            row
        }))
    }
}

/// Checks the split, domain, ambient and weakening conditions of `q` and
/// computes the processed simulator.
pub fn check_processing(
    q: &Processing,
    s: &Simulator,
    inst: &TccInstance,
) -> Result<ProcessingCheck> {
    if q.programs() != s.programs() {
        return Err(Error::TypeMismatch(format!(
            "processing `{}` is over `{}`, simulator `{}` has programs `{}`",
            q.name(),
            q.programs().id(),
            s.name(),
            s.programs().id()
        )));
    }
    let mut violations = Vec::new();
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let programs = q.programs();
    let label = |p: usize, t: usize| format!("({},{})", programs.label(p), inst.targets().label(t));
    for p in programs.iter() {
        for t in 0..nt {
            let k = p * nt + t;
            let defined = !row_is_empty(q.target_map.row(k));
            let any = (0..nc).any(|c| !row_is_empty(q.context_map.row(k * nc + c)));
            if !defined && any {
                violations.push(ProcessingViolation {
                    condition: ProcessingCondition::Domain,
                    detail: format!(
                        "context map defined where the target map is undefined at {}",
                        label(p, t)
                    ),
                });
            }
            if defined && nc > 0 && !any {
                violations.push(ProcessingViolation {
                    condition: ProcessingCondition::Domain,
                    detail: format!(
                        "target map defined but no context is produced at {}",
                        label(p, t)
                    ),
                });
            }
            for c in 0..nc {
                let nu = inst.eval_at(t, c);
                let mu = inst.eval_pairs(q.at(p, t, c, inst));
                if !inst.order().imitates_sets(nu, &mu) {
                    violations.push(ProcessingViolation {
                        condition: ProcessingCondition::Weakening,
                        detail: format!(
                            "q({},{},{}) is not imitated by its input",
                            programs.label(p),
                            inst.targets().label(t),
                            inst.contexts().label(c)
                        ),
                    });
                }
            }
        }
    }
    let ambient = inst.ambient();
    if !ambient.admits(&q.target_map) || !ambient.admits(&q.context_map) {
        violations.push(ProcessingViolation {
            condition: ProcessingCondition::Ambient,
            detail: format!(
                "`{}` is not a morphism of the {} ambient",
                q.name(),
                ambient.name()
            ),
        });
    }
    if !violations.is_empty() {
        return Ok(ProcessingCheck {
            violations,
            result: None,
        });
    }
    let processed = processed_simulator(q, s, inst);
    match processed {
        Ok(sim) => Ok(ProcessingCheck {
            violations,
            result: Some(sim),
        }),
        Err(e) => {
            violations.push(ProcessingViolation {
                condition: ProcessingCondition::Result,
                detail: e.to_string(),
            });
            Ok(ProcessingCheck {
                violations,
                result: None,
            })
        }
    }
}

fn processed_simulator(q: &Processing, s: &Simulator, inst: &TccInstance) -> Result<Simulator> {
    let name = format!("{}.{}", q.name(), s.name());
    if inst.contexts().is_empty() {
        let nt = inst.targets().len();
        let compiler = FinRel::from_fn(s.programs(), inst.targets(), |p| {
            s.target_of(p).and_then(|t| q.target_map.value(p * nt + t))
        });
        let context = FinRel::empty(
            &FinSet::product(s.programs(), inst.contexts()),
            inst.contexts(),
        );
        return Simulator::new(name, compiler, context, inst);
    }
    let raw = q.apply(s.assembled(), inst)?;
    Simulator::from_raw(name, s.programs(), &raw, inst)
}

/// A morphism `source → target`: a reduction `r: P_target → P_source`
/// followed by a processing over `P_target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimMorphism {
    pub source: Simulator,
    pub target: Simulator,
    pub reduction: FinRel,
    pub processing: Processing,
}

impl SimMorphism {
    /// Validates the reduction, the processing and that the processed
    /// pull-back equals `target`.
    pub fn new(
        reduction: FinRel,
        processing: Processing,
        source: &Simulator,
        target: &Simulator,
        inst: &TccInstance,
    ) -> Result<Self> {
        if reduction.dom() != target.programs() || reduction.cod() != source.programs() {
            return Err(Error::TypeMismatch(format!(
                "morphism reduction must have type {} -> {}",
                target.programs().id(),
                source.programs().id()
            )));
        }
        if !reduction.is_functional() || !inst.ambient().admits(&reduction) {
            return Err(Error::NotFunctional("morphism reduction".into()));
        }
        let pulled = pull_back(source, &reduction, inst)?;
        let pulled_sim = Simulator::from_raw_or_empty(
            &format!("r*{}", source.name()),
            target.programs(),
            &pulled,
            inst,
        )?;
        let check = check_processing(&processing, &pulled_sim, inst)?;
        if let Some(v) = check.violations.first() {
            return Err(Error::invalid(
                "processing",
                format!("{:?}: {}", v.condition, v.detail),
            ));
        }
        let produced = processing.apply(&pulled, inst)?;
        if &produced != target.assembled() {
            return Err(Error::invalid(
                "simulator morphism",
                format!(
                    "processing the pulled-back `{}` does not give `{}`",
                    source.name(),
                    target.name()
                ),
            ));
        }
        Ok(SimMorphism {
            source: source.clone(),
            target: target.clone(),
            reduction,
            processing,
        })
    }

    pub fn identity(s: &Simulator, inst: &TccInstance) -> Self {
        SimMorphism::new(
            FinRel::identity(s.programs()),
            Processing::identity(s.programs(), inst),
            s,
            s,
            inst,
        )
        .expect("identity morphism is valid")
    }

    pub fn reduction_choices(&self) -> Vec<Option<usize>> {
        self.reduction
            .dom()
            .iter()
            .map(|i| self.reduction.value(i))
            .collect()
    }
}

impl Simulator {
    /// Like [`Simulator::from_raw`] but accepts an empty context set when the
    /// raw morphism is empty.
    pub fn from_raw_or_empty(
        name: &str,
        programs: &FinSet,
        raw: &FinRel,
        inst: &TccInstance,
    ) -> Result<Simulator> {
        if inst.contexts().is_empty() {
            let compiler = FinRel::empty(programs, inst.targets());
            let context = FinRel::empty(raw.dom(), inst.contexts());
            return Simulator::new(name, compiler, context, inst);
        }
        Simulator::from_raw(name, programs, raw, inst)
    }
}

/// `m2 ∘ m1` for `m1: s → s1` and `m2: s1 → s2`.
pub fn compose_morphisms(
    m2: &SimMorphism,
    m1: &SimMorphism,
    inst: &TccInstance,
) -> Result<SimMorphism> {
    if m1.target != m2.source {
        return Err(Error::invalid(
            "morphism composition",
            format!(
                "`{}` does not end where `{}` starts",
                m1.target.name(),
                m2.source.name()
            ),
        ));
    }
    let r = m2.reduction.then(&m1.reduction)?;
    let p2 = m2.processing.programs();
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let pt = FinSet::product(p2, inst.targets());
    let ptc = FinSet::product(&pt, inst.contexts());
    let raw = FinRel::from_row_fn(&ptc, inst.pairs(), |k| {
        let (p, rest) = (k / (nt * nc).max(1), k % (nt * nc).max(1));
        let (t, c) = (rest / nc.max(1), rest % nc.max(1));
        let mut row = empty_row(inst.pairs().len());
        for p1 in m2.reduction.image(p) {
            for x in m1.processing.at(p1, t, c, inst).ones() {
                row.union_with(m2.processing.at(p, x / nc, x % nc, inst));
            }
        }
        row
    });
    let q = if nc == 0 {
        Processing::identity(p2, inst)
    } else {
        Processing::from_raw(
            format!("{}∘{}", m2.processing.name(), m1.processing.name()),
            p2,
            &raw,
            inst,
        )?
    };
    SimMorphism::new(r, q, &m1.source, &m2.target, inst)
}

/// The reduction part of a morphism, checked to be a lax reduction.
pub fn morphism_to_lax_reduction(m: &SimMorphism, inst: &TccInstance) -> Result<Reduction> {
    let r = Reduction::new(m.reduction.clone(), Flavor::Lax)?;
    if !check_reduction(&r, &m.source, &m.target, inst)? {
        return Err(Error::invalid(
            "simulator morphism",
            format!(
                "reduction of `{}` → `{}` is not lax",
                m.source.name(),
                m.target.name()
            ),
        ));
    }
    Ok(r)
}

/// Whether every lax reduction from the trivial simulator to `s` is also oplax.
/// Both conditions hold target by target, so this is checked per option.
pub fn every_lax_is_oplax(s: &Simulator, inst: &TccInstance, meter: &mut Meter) -> Result<bool> {
    let opts = program_options(s.programs().len(), inst);
    let cost = (2 * inst.targets().len() * opts.len() * inst.contexts().len().max(1)) as u128;
    meter.reserve(cost, "lax/oplax comparison")?;
    meter.charge(cost as u64, "lax/oplax comparison")?;
    Ok(inst.targets().iter().all(|t| {
        opts.iter()
            .all(|&o| !serves(s, o, t, Flavor::Lax, inst) || serves(s, o, t, Flavor::Oplax, inst))
    }))
}

/// A pair of functional states compiled to the same target whose behaviors
/// cannot be traded: `t` does not oplax context-reduce to `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompressionPair {
    pub reduction: Vec<Option<usize>>,
    pub t: Option<usize>,
    pub g: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compression {
    pub compressed: bool,
    /// One pair per lax reduction, in enumeration order, while all have one.
    pub pairs: Vec<CompressionPair>,
    /// The first lax reduction without such a pair.
    pub counterexample: Option<Vec<Option<usize>>>,
    pub reductions_checked: u128,
}

/// Decides whether the universal simulator `s` is compressed by enumerating
/// every lax reduction to the trivial simulator.
pub fn is_compressed(s: &Simulator, inst: &TccInstance, meter: &mut Meter) -> Result<Compression> {
    let options = lax_options(s, inst, meter)?;
    if options.iter().any(Vec::is_empty) {
        return Err(Error::NotUniversal(s.name().to_string()));
    }
    let total = options
        .iter()
        .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
    let states = inst.functional_states();
    meter.reserve(
        total.saturating_mul((states.len() * states.len()) as u128),
        "compression check",
    )?;
    let bad = bad_pairs(inst, &states, meter)?;
    let mut digits = vec![0usize; options.len()];
    let mut pairs = Vec::new();
    let mut checked = 0u128;
    loop {
        let r: Vec<Option<usize>> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
        meter.charge((states.len() * states.len()) as u64, "compression check")?;
        checked += 1;
        let compiled = |x: Option<usize>| x.and_then(|t| r[t]).and_then(|p| s.target_of(p));
        let found = states.iter().enumerate().find_map(|(i, &x)| {
            states
                .iter()
                .enumerate()
                .find_map(|(j, &y)| (bad[i][j] && compiled(x) == compiled(y)).then_some((x, y)))
        });
        match found {
            Some((t, g)) => pairs.push(CompressionPair { reduction: r, t, g }),
            None => {
                return Ok(Compression {
                    compressed: false,
                    pairs,
                    counterexample: Some(r),
                    reductions_checked: checked,
                })
            }
        }
        if !advance(&mut digits, &options) {
            break;
        }
    }
    Ok(Compression {
        compressed: true,
        pairs,
        counterexample: None,
        reductions_checked: checked,
    })
}

fn advance(digits: &mut [usize], options: &[Vec<Option<usize>>]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < options[k].len() {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// `bad[i][j]`: state `i` does not oplax context-reduce to state `j`.
fn bad_pairs(
    inst: &TccInstance,
    states: &[Option<usize>],
    meter: &mut Meter,
) -> Result<Vec<Vec<bool>>> {
    let mut out = vec![vec![false; states.len()]; states.len()];
    for (i, &x) in states.iter().enumerate() {
        for (j, &y) in states.iter().enumerate() {
            let fx = state_rel(inst, x);
            let fy = state_rel(inst, y);
            out[i][j] = !context_reduces(&fx, &fy, inst, Flavor::Oplax, None, None, meter)?.holds;
        }
    }
    Ok(out)
}

/// The morphism `trivial → s` built from a reduction that is both lax and
/// oplax and a weak right inverse `m` with `s ∘ (r∘m ⊗ id) = s`.
pub fn morph_stronger(
    s: &Simulator,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Option<SimMorphism>> {
    let opts = program_options(s.programs().len(), inst);
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let cost = (2 * nt * opts.len() * nc.max(1)) as u128;
    meter.reserve(cost, "lax and oplax options")?;
    meter.charge(cost as u64, "lax and oplax options")?;
    let options: Vec<Vec<Option<usize>>> = inst
        .targets()
        .iter()
        .map(|t| {
            opts.iter()
                .copied()
                .filter(|&o| {
                    serves(s, o, t, Flavor::Lax, inst) && serves(s, o, t, Flavor::Oplax, inst)
                })
                .collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let total = options
        .iter()
        .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
    let np = s.programs().len();
    meter.reserve(
        total.saturating_mul((np * (nt + 1)) as u128),
        "weak right inverse search",
    )?;
    let trivial = Simulator::trivial(inst);
    let mut digits = vec![0usize; nt];
    loop {
        let r: Vec<Option<usize>> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
        meter.charge((np * (nt + 1)) as u64, "weak right inverse search")?;
        if let Some(m) = weak_right_inverse(s, &r, inst) {
            let morphism = stronger_morphism(s, &r, &m, &trivial, inst)?;
            return Ok(Some(morphism));
        }
        if !advance(&mut digits, &options) {
            return Ok(None);
        }
    }
}

fn weak_right_inverse(
    s: &Simulator,
    r: &[Option<usize>],
    inst: &TccInstance,
) -> Option<Vec<Option<usize>>> {
    let nc = inst.contexts().len();
    let empty = empty_row(inst.pairs().len());
    let row_of = |p: Option<usize>, c: usize| -> &FixedBitSet {
        match p {
            Some(p) => s.at(p, c, nc),
            None => &empty,
        }
    };
    let choices: Vec<Option<usize>> = if inst.ambient().allows_undefined() {
        std::iter::once(None)
            .chain(inst.targets().iter().map(Some))
            .collect()
    } else {
        inst.targets().iter().map(Some).collect()
    };
    s.programs()
        .iter()
        .map(|p| {
            choices.iter().copied().find(|&t| {
                let via = t.and_then(|t| r[t]);
                (0..nc).all(|c| row_of(via, c) == s.at(p, c, nc))
            })
        })
        .collect()
}

fn stronger_morphism(
    s: &Simulator,
    r: &[Option<usize>],
    m: &[Option<usize>],
    trivial: &Simulator,
    inst: &TccInstance,
) -> Result<SimMorphism> {
    let programs = s.programs();
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let pt = FinSet::product(programs, inst.targets());
    let ptc = FinSet::product(&pt, inst.contexts());
    let target_map = FinRel::from_fn(&pt, inst.targets(), |k| {
        r[k % nt].and_then(|p| s.target_of(p))
    });
    let context_map = FinRel::from_row_fn(&ptc, inst.contexts(), |k| {
        let t = (k / nc.max(1)) % nt;
        let c = k % nc.max(1);
        match r[t] {
            Some(p) => s.context().row(p * nc + c).clone(),
            None => empty_row(nc),
        }
    });
    let q = Processing::from_parts("q_r", programs, target_map, context_map, inst)?;
    let reduction = FinRel::from_fn(programs, inst.targets(), |p| m[p]);
    SimMorphism::new(reduction, q, trivial, s, inst)
}

/// Exact search for a morphism `a → b`.
///
/// The conditions on `(r, q)` only couple values at the same program of `b`,
/// so each program is solved on its own: try `r(p')` in order and build the
/// largest admissible slice of `q` at `p'`.
pub fn search_morphism(
    a: &Simulator,
    b: &Simulator,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Option<SimMorphism>> {
    let opts = program_options(a.programs().len(), inst);
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let cost = (b.programs().len() * opts.len() * (nc + 1) * (nc + 1)) as u128;
    meter.reserve(cost, "morphism search")?;
    meter.charge(cost as u64, "morphism search")?;
    let pb = b.programs();
    let mut r = Vec::with_capacity(pb.len());
    let mut t_rows: Vec<FixedBitSet> = Vec::with_capacity(pb.len() * nt);
    let mut c_rows: Vec<FixedBitSet> = Vec::with_capacity(pb.len() * nt * nc);
    for p2 in pb.iter() {
        let found = opts
            .iter()
            .find_map(|&o| slice(a, b, p2, o, inst).map(|sl| (o, sl)));
        let Some((o, sl)) = found else {
            return Ok(None);
        };
        r.push(o);
        t_rows.extend(sl.targets);
        c_rows.extend(sl.contexts);
    }
    let pt = FinSet::product(pb, inst.targets());
    let ptc = FinSet::product(&pt, inst.contexts());
    let q = Processing::from_parts(
        "q",
        pb,
        FinRel::from_rows(&pt, inst.targets(), t_rows)?,
        FinRel::from_rows(&ptc, inst.contexts(), c_rows)?,
        inst,
    )?;
    let reduction = FinRel::from_fn(pb, a.programs(), |p| r[p]);
    SimMorphism::new(reduction, q, a, b, inst).map(Some)
}

struct Slice {
    targets: Vec<FixedBitSet>,
    contexts: Vec<FixedBitSet>,
}

fn slice(
    a: &Simulator,
    b: &Simulator,
    p2: usize,
    opt: Option<usize>,
    inst: &TccInstance,
) -> Option<Slice> {
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let functions = inst.ambient() == Ambient::Functions;
    // Rows other than the one actually hit are left empty, or the identity
    // where the ambient demands total maps.
    let mut targets: Vec<FixedBitSet> = (0..nt)
        .map(|t| {
            if functions {
                singleton_row(nt, t)
            } else {
                empty_row(nt)
            }
        })
        .collect();
    let mut contexts: Vec<FixedBitSet> = (0..nt * nc)
        .map(|k| {
            if functions {
                singleton_row(nc, k % nc)
            } else {
                empty_row(nc)
            }
        })
        .collect();
    let hit_target = opt.and_then(|p| a.target_of(p));
    let wanted = b.target_of(p2);
    let Some(ta) = hit_target else {
        let all_empty = (0..nc).all(|c| row_is_empty(b.at(p2, c, nc)));
        return all_empty.then_some(Slice { targets, contexts });
    };
    let Some(x) = wanted else {
        if functions {
            return None;
        }
        targets[ta] = empty_row(nt);
        for c in 0..nc {
            contexts[ta * nc + c] = empty_row(nc);
        }
        return Some(Slice { targets, contexts });
    };
    let p = opt.expect("hit target implies a program");
    // U(c'): contexts of b allowed at c', intersected over every c reaching c'.
    let mut hit = empty_row(nc);
    let mut bound: Vec<FixedBitSet> = vec![
        {
            let mut full = empty_row(nc);
            full.insert_range(..);
            full
        };
        nc
    ];
    for c in 0..nc {
        let want = b.context().row(p2 * nc + c);
        for c1 in a.context().row(p * nc + c).ones() {
            hit.insert(c1);
            bound[c1].intersect_with(want);
        }
    }
    let order = inst.order();
    let mut q: Vec<FixedBitSet> = vec![empty_row(nc); nc];
    for c1 in 0..nc {
        let nu = inst.eval_at(ta, c1);
        if hit.contains(c1) {
            q[c1] = match inst.ambient() {
                Ambient::Relations => {
                    let admissible: FixedBitSet = bound[c1]
                        .ones()
                        .filter(|&c2| {
                            inst.eval_at(x, c2)
                                .ones()
                                .all(|m| !order.above(m).is_disjoint(nu))
                        })
                        .fold(empty_row(nc), |mut acc, c2| {
                            acc.insert(c2);
                            acc
                        });
                    if order.imitates_sets(nu, &inst.eval_over(x, &admissible)) {
                        admissible
                    } else {
                        admissible
                            .ones()
                            .filter(|&c2| row_is_empty(inst.eval_at(x, c2)))
                            .fold(empty_row(nc), |mut acc, c2| {
                                acc.insert(c2);
                                acc
                            })
                    }
                }
                _ => {
                    let forced = bound[c1].clone();
                    if forced.count_ones(..) > 1
                        || !order.imitates_sets(nu, &inst.eval_over(x, &forced))
                    {
                        return None;
                    }
                    forced
                }
            };
        } else if functions {
            let c2 = (0..nc).find(|&c2| order.imitates_sets(nu, inst.eval_at(x, c2)))?;
            q[c1] = singleton_row(nc, c2);
        }
        if functions && q[c1].count_ones(..) != 1 {
            return None;
        }
    }
    for c in 0..nc {
        let mut produced = empty_row(nc);
        for c1 in a.context().row(p * nc + c).ones() {
            produced.union_with(&q[c1]);
        }
        if &produced != b.context().row(p2 * nc + c) {
            return None;
        }
    }
    if q.iter().all(row_is_empty) {
        if functions {
            return None;
        }
        targets[ta] = empty_row(nt);
    } else {
        targets[ta] = singleton_row(nt, x);
    }
    for (c1, row) in q.into_iter().enumerate() {
        contexts[ta * nc + c1] = row;
    }
    Some(Slice { targets, contexts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Identity,
    MorphStronger,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoneCertificate {
    /// Every lax reduction is oplax and the source is compressed.
    Compressed {
        compression: Compression,
        search_agrees: Option<bool>,
    },
    /// The exact search found nothing.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsimony {
    Found {
        morphism: Box<SimMorphism>,
        route: Route,
    },
    NoneExists {
        certificate: NoneCertificate,
    },
}

/// Decides whether a morphism `a → b` exists.
pub fn decide_parsimony(
    a: &Simulator,
    b: &Simulator,
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Parsimony> {
    if a.programs() == b.programs() && a.assembled() == b.assembled() {
        let morphism = SimMorphism::new(
            FinRel::identity(a.programs()),
            Processing::identity(a.programs(), inst),
            a,
            b,
            inst,
        )?;
        return Ok(Parsimony::Found {
            morphism: Box::new(morphism),
            route: Route::Identity,
        });
    }
    if b.is_trivial(inst)
        && find_universality_witness(a, inst, meter)?.is_some()
        && every_lax_is_oplax(a, inst, meter)?
    {
        let compression = is_compressed(a, inst, meter)?;
        if compression.compressed {
            let search_agrees = match search_morphism(a, b, inst, meter) {
                Ok(found) => Some(found.is_none()),
                Err(e) if e.is_budget() => None,
                Err(e) => return Err(e),
            };
            if search_agrees == Some(false) {
                return Err(Error::invalid(
                    "parsimony",
                    "a morphism exists despite the compression certificate",
                ));
            }
            return Ok(Parsimony::NoneExists {
                certificate: NoneCertificate::Compressed {
                    compression,
                    search_agrees,
                },
            });
        }
    }
    if a.is_trivial(inst) {
        if let Some(morphism) = morph_stronger(b, inst, meter)? {
            return Ok(Parsimony::Found {
                morphism: Box::new(morphism),
                route: Route::MorphStronger,
            });
        }
    }
    match search_morphism(a, b, inst, meter)? {
        Some(morphism) => Ok(Parsimony::Found {
            morphism: Box::new(morphism),
            route: Route::Search,
        }),
        None => Ok(Parsimony::NoneExists {
            certificate: NoneCertificate::Exhaustive,
        }),
    }
}

/// Size of the naive `(r, q)` space, for reporting.
pub fn naive_morphism_space(a: &Simulator, b: &Simulator, inst: &TccInstance) -> u128 {
    let r = space_size(a.programs().len() as u128 + 1, b.programs().len());
    let rows = b.programs().len() * inst.pairs().len();
    r.saturating_mul(space_size(2, rows.saturating_mul(inst.pairs().len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Preorder;

    fn inst() -> TccInstance {
        let t = FinSet::numbered("T", "t", 2);
        let c = FinSet::numbered("C", "c", 2);
        let b = FinSet::numbered("B", "b", 2);
        TccInstance::from_table(
            "small",
            &t,
            &c,
            Preorder::equality(&b),
            Ambient::Relations,
            |t, c| Some((t + c) % 2),
        )
        .unwrap()
    }

    #[test]
    fn identity_processing_fixes_simulator() {
        let inst = inst();
        let s = Simulator::trivial(&inst);
        let check =
            check_processing(&Processing::identity(s.programs(), &inst), &s, &inst).unwrap();
        assert!(check.is_ok());
        assert_eq!(check.result.unwrap().assembled(), s.assembled());
    }

    #[test]
    fn context_dependent_target_map_rejected() {
        let inst = inst();
        let p = FinSet::numbered("P", "p", 1);
        let ptc = FinSet::product_of(&[p.clone(), inst.targets().clone(), inst.contexts().clone()]);
        // (p,t,c) ↦ (c, c): the output target follows the context.
        let raw = FinRel::from_fn(&ptc, inst.pairs(), |k| {
            let c = k % 2;
            Some(c * 2 + c)
        });
        assert!(matches!(
            Processing::from_raw("bad", &p, &raw, &inst),
            Err(Error::SplitViolation(_) | Error::NotFunctional(_))
        ));
    }

    #[test]
    fn identity_morphism_found_and_composes() {
        let inst = inst();
        let s = Simulator::trivial(&inst);
        let id = SimMorphism::identity(&s, &inst);
        let twice = compose_morphisms(&id, &id, &inst).unwrap();
        assert_eq!(twice.reduction, id.reduction);
        assert_eq!(twice.processing.assembled(), id.processing.assembled());
        match decide_parsimony(&s, &s, &inst, &mut Meter::default()).unwrap() {
            Parsimony::Found { route, .. } => assert_eq!(route, Route::Identity),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_is_not_compressed() {
        let inst = inst();
        let s = Simulator::trivial(&inst);
        let c = is_compressed(&s, &inst, &mut Meter::default()).unwrap();
        assert!(!c.compressed);
    }
}
