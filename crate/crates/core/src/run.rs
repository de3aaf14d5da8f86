//! Command dispatch over a resolved document.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::budget::{Meter, DEFAULT_BUDGET};
use crate::diagonal::{
    cantor_report, has_unreachability, is_complete_parametrization, lawvere_quasi_fixed_point,
    Parametrization,
};
use crate::dsl::{build, to_text, Code, Diagnostic, Document, Model};
use crate::error::{Error, Result};
use crate::finrel::diagram;
use crate::finrel::laws::{comonoid_laws, normalization_law, product_laws, unit_laws};
use crate::finrel::{FinRel, FinSet, RelSpace};
use crate::instances::presets;
use crate::instances::spin::reduced;
use crate::report::{instance_hash, Basis, Budget, Report};
use crate::simcat::{decide_parsimony, NoneCertificate, Parsimony, Route};
use crate::simulator::{
    context_reduces, find_universality_witness, nogo_check, Flavor, MonotoneFn, NogoVerdict,
    Simulator,
};
use crate::tcc::TccInstance;
use crate::tcfunctor::{check_tc_functor, verify_universality_preservation};

pub const COMMANDS: [&str; 10] = [
    "laws",
    "universal",
    "reduce",
    "nogo",
    "parsimony",
    "lawvere",
    "unreachability",
    "cantor",
    "functor-check",
    "checks",
];

/// Sets larger than this are skipped by the law suite.
const LAW_SET_LIMIT: usize = 16;
/// Relations with more cells than this are skipped by the law suite.
const LAW_REL_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub budget: u64,
    pub search: Option<RelSpace>,
    pub seed: u64,
    pub n: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            budget: DEFAULT_BUDGET,
            search: None,
            seed: 0,
            n: 2,
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Diagnostics(Vec<Diagnostic>),
    Budget(Box<Report>),
    Engine(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Budget(_) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage: {m}"),
            RunError::Diagnostics(ds) => {
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
            RunError::Budget(r) => write!(
                f,
                "budget exceeded after {} of {} candidates",
                r.budgets.used, r.budgets.limit
            ),
            RunError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Runs `args` (command and operands) against an optional document.
pub fn run(args: &[String], doc: Option<&Document>, opts: &RunOptions) -> Result<Report, RunError> {
    let Some(command) = args.first() else {
        return Err(RunError::Usage(format!(
            "expected a command, one of {}",
            COMMANDS.join(", ")
        )));
    };
    if !COMMANDS.contains(&command.as_str()) {
        return Err(RunError::Usage(format!(
            "unknown command `{command}`, expected one of {}",
            COMMANDS.join(", ")
        )));
    }
    let mut meter = Meter::new(opts.budget);
    let fallback;
    let doc = match doc {
        Some(d) => Some(d),
        None if command == "laws" => {
            fallback = presets::preset("lookup").map_err(RunError::Engine)?;
            Some(&fallback)
        }
        None if command == "cantor" => None,
        None => {
            return Err(RunError::Usage(format!(
                "`{command}` needs --instance FILE"
            )))
        }
    };
    let model = match doc {
        Some(d) => match build(d, &mut meter) {
            Ok(m) => m,
            Err(ds) if ds.iter().any(|d| d.code == Code::Budget) => {
                return Err(RunError::Budget(Box::new(budget_report(args, &meter))));
            }
            Err(ds) => return Err(RunError::Diagnostics(ds)),
        },
        None => Model::default(),
    };
    let mut ctx = Ctx {
        model: &model,
        meter: &mut meter,
        opts,
    };
    let result = ctx.dispatch(args);
    let budgets = Budget {
        limit: meter.limit(),
        used: meter.used(),
    };
    match result {
        Ok(mut report) => {
            report.command = args.join(" ");
            report.instance_hash = doc.map(|d| instance_hash(&to_text(d)));
            report.budgets = budgets;
            Ok(report)
        }
        Err(CmdError::Engine(e)) if e.is_budget() => {
            let mut r = budget_report(args, &meter);
            r.instance_hash = doc.map(|d| instance_hash(&to_text(d)));
            r.deviations.push(e.to_string());
            Err(RunError::Budget(Box::new(r)))
        }
        Err(CmdError::Engine(e)) => Err(RunError::Engine(e)),
        Err(CmdError::Usage(m)) => Err(RunError::Usage(m)),
    }
}

fn budget_report(args: &[String], meter: &Meter) -> Report {
    let mut r = Report::new(args.join(" "), "budget-exceeded", None);
    r.basis = Basis::BudgetExceeded;
    r.budgets = Budget {
        limit: meter.limit(),
        used: meter.used(),
    };
    r
}

enum CmdError {
    Usage(String),
    Engine(Error),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Engine(e)
    }
}

type CmdResult<T> = std::result::Result<T, CmdError>;

fn usage<T>(m: impl Into<String>) -> CmdResult<T> {
    Err(CmdError::Usage(m.into()))
}

struct Ctx<'a> {
    model: &'a Model,
    meter: &'a mut Meter,
    opts: &'a RunOptions,
}

/// `[[from, to], ...]` by labels.
pub fn rel_json(f: &FinRel) -> Value {
    Value::Array(
        f.label_pairs()
            .into_iter()
            .map(|(a, b)| json!([a, b]))
            .collect(),
    )
}

fn choices_json(dom: &FinSet, cod: &FinSet, choices: &[Option<usize>]) -> Value {
    let mut m = Map::new();
    for (i, c) in choices.iter().enumerate() {
        m.insert(
            dom.label(i).to_string(),
            c.map_or(Value::Null, |p| Value::from(cod.label(p))),
        );
    }
    Value::Object(m)
}

fn state_label(inst: &TccInstance, t: Option<usize>) -> Value {
    t.map_or(Value::Null, |t| Value::from(inst.targets().label(t)))
}

impl Ctx<'_> {
    fn arg<'b>(&self, args: &'b [String], i: usize, what: &str) -> CmdResult<&'b str> {
        match args.get(i) {
            Some(a) => Ok(a),
            None => usage(format!("`{}` expects {what}", args[0])),
        }
    }

    /// A simulator by name; `trivial` or `trivial@N` is the trivial simulator
    /// of `N`, of `hint`, or of the first instance.
    fn simulator(
        &self,
        name: &str,
        hint: Option<&TccInstance>,
    ) -> CmdResult<(Simulator, TccInstance)> {
        if let Some(rest) = name.strip_prefix("trivial") {
            let inst = match rest.strip_prefix('@') {
                Some(n) => match self.model.tccs.get(n) {
                    Some(e) => e.instance.clone(),
                    None => return usage(format!("unknown instance `{n}`")),
                },
                None if rest.is_empty() => match hint
                    .cloned()
                    .or_else(|| self.model.tccs.first().map(|(_, e)| e.instance.clone()))
                {
                    Some(i) => i,
                    None => return usage("the document declares no instance"),
                },
                None => return self.named_simulator(name),
            };
            return Ok((Simulator::trivial(&inst), inst));
        }
        self.named_simulator(name)
    }

    fn named_simulator(&self, name: &str) -> CmdResult<(Simulator, TccInstance)> {
        match self.model.simulators.get(name) {
            Some(e) => Ok((
                e.simulator.clone(),
                self.model
                    .tccs
                    .get(&e.tcc)
                    .expect("resolved")
                    .instance
                    .clone(),
            )),
            None => usage(format!("unknown simulator `{name}`")),
        }
    }

    fn rel(&self, name: &str) -> CmdResult<&FinRel> {
        match self.model.rels.get(name) {
            Some(f) => Ok(f),
            None => usage(format!("unknown relation `{name}`")),
        }
    }

    fn dispatch(&mut self, args: &[String]) -> CmdResult<Report> {
        match args[0].as_str() {
            "laws" => self.laws(),
            "universal" => self.universal(args),
            "reduce" => self.reduce(args),
            "nogo" => self.nogo(args),
            "parsimony" => self.parsimony(args),
            "lawvere" => self.lawvere(args),
            "unreachability" => self.unreachability(args),
            "cantor" => self.cantor(),
            "functor-check" => self.functor_check(args),
            "checks" => self.checks(),
            other => usage(format!("unknown command `{other}`")),
        }
    }

    fn laws(&mut self) -> CmdResult<Report> {
        let mut failures = Vec::new();
        let mut skipped = Vec::new();
        let mut checked = 0usize;
        let mut record = |subject: &str, law: &str, passed: bool| {
            checked += 1;
            if !passed {
                failures.push(json!({ "subject": subject, "law": law }));
            }
        };
        for c in unit_laws() {
            record("I", c.law, c.passed);
        }
        for (name, set) in self.model.sets.iter() {
            if set.len() > LAW_SET_LIMIT {
                skipped.push(Value::from(name));
                continue;
            }
            self.meter
                .charge((set.len() as u64).pow(3).max(1), "law suite")?;
            for c in comonoid_laws(set) {
                record(name, c.law, c.passed);
            }
        }
        for (name, entry) in self.model.tccs.iter() {
            let inst = &entry.instance;
            if inst.targets().len().max(inst.contexts().len()) <= LAW_SET_LIMIT {
                for c in product_laws(inst.targets(), inst.contexts()) {
                    record(name, c.law, c.passed);
                }
            } else {
                skipped.push(Value::from(format!("{name}: product laws")));
            }
            record(name, "order-reflexive", inst.order().is_reflexive());
            record(name, "order-transitive", inst.order().is_transitive());
        }
        for (name, f) in self.model.rels.iter() {
            if f.dom().len() * f.cod().len() > LAW_REL_LIMIT {
                skipped.push(Value::from(name));
                continue;
            }
            self.meter
                .charge((f.dom().len() * f.cod().len()) as u64, "law suite")?;
            let c = normalization_law(f);
            record(name, c.law, c.passed);
            record(
                name,
                "domain-functional",
                diagram::classify(&diagram::domain(f)?)?.functional,
            );
            record(
                name,
                "classification-agrees",
                diagram::classify(f)? == f.classify(),
            );
        }
        let ok = failures.is_empty();
        let mut r = Report::new("", if ok { "all-pass" } else { "fail" }, Some(ok))
            .with_certificate(
                json!({ "checked": checked, "failures": failures, "skipped": skipped }),
            );
        r.basis = Basis::ExhaustiveSearch;
        Ok(r)
    }

    fn universal(&mut self, args: &[String]) -> CmdResult<Report> {
        let (s, inst) = self.simulator(self.arg(args, 1, "a simulator")?, None)?;
        match find_universality_witness(&s, &inst, self.meter)? {
            Some(r) => Ok(
                Report::new("", "universal", Some(true)).with_certificate(json!({
                    "simulator": s.name(),
                    "flavor": "lax",
                    "reduction": choices_json(inst.targets(), s.programs(), &r.choices()),
                })),
            ),
            None => Ok(Report::new("", "not-universal", Some(false))),
        }
    }

    fn reduce(&mut self, args: &[String]) -> CmdResult<Report> {
        let f = self.rel(self.arg(args, 1, "two relations")?)?.clone();
        let g = self.rel(self.arg(args, 2, "two relations")?)?.clone();
        let Some((_, entry)) = self
            .model
            .tccs
            .iter()
            .find(|(_, e)| e.instance.targets() == f.cod())
        else {
            return usage(format!("no instance has targets `{}`", f.cod().id()));
        };
        let inst = entry.instance.clone();
        let mut cert = Map::new();
        let mut verdict = Vec::new();
        for (key, flavor) in [("lax", Flavor::Lax), ("oplax", Flavor::Oplax)] {
            let c = context_reduces(&f, &g, &inst, flavor, None, self.opts.search, self.meter)?;
            verdict.push(format!("{key}={}", c.holds));
            cert.insert(
                key.to_string(),
                json!({ "holds": c.holds, "space": c.space.name(), "witness": c.witness.as_ref().map(rel_json) }),
            );
        }
        Ok(Report::new("", verdict.join(" "), None).with_certificate(Value::Object(cert)))
    }

    fn nogo(&mut self, args: &[String]) -> CmdResult<Report> {
        let (s, inst) =
            self.simulator(self.arg(args, 1, "a simulator and a size function")?, None)?;
        let phi_name = self.arg(args, 2, "a simulator and a size function")?;
        let phi = if phi_name == "spectrum_size" {
            let Some(spin) = self
                .model
                .tccs
                .iter()
                .find(|(_, e)| e.instance == inst)
                .and_then(|(_, e)| e.spin.as_ref())
            else {
                return usage("`spectrum_size` needs a spin instance");
            };
            let mut values = Vec::with_capacity(spin.systems.len());
            for sys in &spin.systems {
                let sp = sys.spectrum(self.meter)?;
                values.push(BigRational::from_integer(
                    reduced(&sp, &sys.delta).len().into(),
                ));
            }
            MonotoneFn::new("spectrum_size", values, BigRational::zero())
        } else {
            let f = self.rel(phi_name)?;
            if f.dom() != inst.targets() || !f.is_deterministic() {
                return usage(format!(
                    "`{phi_name}` must be a total function on `{}`",
                    inst.targets().id()
                ));
            }
            let mut values = Vec::with_capacity(f.dom().len());
            for t in f.dom().iter() {
                let label = f.cod().label(f.value(t).expect("total"));
                match BigRational::from_str(label) {
                    Ok(v) => values.push(v),
                    Err(_) => return usage(format!("`{label}` is not a rational number")),
                }
            }
            let least = values
                .iter()
                .min()
                .cloned()
                .unwrap_or_else(BigRational::zero);
            MonotoneFn::new(phi_name, values, least)
        };
        let out = nogo_check(&s, &phi, &inst, self.meter)?;
        let verdict = match out.verdict {
            NogoVerdict::NotUniversal => "not-universal",
            NogoVerdict::Inconclusive => "inconclusive",
        };
        let mut values = Map::new();
        for (t, v) in phi.values.iter().enumerate() {
            values.insert(
                inst.targets().label(t).to_string(),
                Value::from(v.to_string()),
            );
        }
        Ok(
            Report::new("", verdict, Some(out.verdict == NogoVerdict::NotUniversal))
                .with_certificate(json!({
                    "phi": values,
                    "image": out.image.iter().map(|&t| state_label(&inst, t)).collect::<Vec<_>>(),
                    "sup_image": out.sup_image.map(|v| v.to_string()),
                    "sup_all": out.sup_all.map(|v| v.to_string()),
                    "witness_search_universal": out.witness_search,
                })),
        )
    }

    fn parsimony(&mut self, args: &[String]) -> CmdResult<Report> {
        let a_name = self.arg(args, 1, "two simulators")?;
        let b_name = self.arg(args, 2, "two simulators")?;
        let anchor = [a_name, b_name]
            .into_iter()
            .find(|n| !n.starts_with("trivial"))
            .map(|n| self.named_simulator(n))
            .transpose()?
            .map(|(_, i)| i);
        let (a, inst) = self.simulator(a_name, anchor.as_ref())?;
        let (b, inst_b) = self.simulator(b_name, anchor.as_ref())?;
        if inst != inst_b {
            return usage("both simulators must live in the same instance");
        }
        match decide_parsimony(&a, &b, &inst, self.meter)? {
            Parsimony::Found { morphism, route } => {
                let route = match route {
                    Route::Identity => "identity",
                    Route::MorphStronger => "stronger-simulator",
                    Route::Search => "search",
                };
                Ok(Report::new("", "morphism-exists", Some(true)).with_certificate(json!({
                    "route": route,
                    "reduction": choices_json(b.programs(), a.programs(), &morphism.reduction_choices()),
                    "processing": {
                        "targets": rel_json(morphism.processing.target_map()),
                        "contexts": rel_json(morphism.processing.context_map()),
                    },
                })))
            }
            Parsimony::NoneExists {
                certificate:
                    NoneCertificate::Compressed {
                        compression,
                        search_agrees,
                    },
            } => {
                let pairs: Vec<Value> = compression
                    .pairs
                    .iter()
                    .map(|p| {
                        json!({
                            "reduction": choices_json(inst.targets(), a.programs(), &p.reduction),
                            "t": state_label(&inst, p.t),
                            "g": state_label(&inst, p.g),
                        })
                    })
                    .collect();
                Ok(
                    Report::new("", "none-exists", Some(false)).with_certificate(json!({
                        "kind": "compressed",
                        "reductions_checked": compression.reductions_checked.to_string(),
                        "pairs": pairs,
                        "search_agrees": search_agrees,
                    })),
                )
            }
            Parsimony::NoneExists {
                certificate: NoneCertificate::Exhaustive,
            } => Ok(Report::new("", "none-exists", Some(false))),
        }
    }

    fn lawvere(&mut self, args: &[String]) -> CmdResult<Report> {
        let g = self
            .rel(self.arg(args, 1, "an endomap of behaviors")?)?
            .clone();
        let (param, inst) = match args.get(2) {
            Some(name) => {
                let (s, inst) = self.simulator(name, None)?;
                (Parametrization::through(&s, &inst), inst)
            }
            None => {
                let Some((_, e)) = self
                    .model
                    .tccs
                    .iter()
                    .find(|(_, e)| e.instance.behaviors() == g.dom())
                else {
                    return usage(format!("no instance has behaviors `{}`", g.dom().id()));
                };
                (Parametrization::of_eval(&e.instance), e.instance.clone())
            }
        };
        let total = !inst.ambient().allows_undefined();
        let space = self.opts.search.unwrap_or(RelSpace::All);
        let complete =
            is_complete_parametrization(&param, 1, inst.order(), space, total, false, self.meter)?;
        if !complete.complete {
            return Ok(Report::new("", "incomplete-parametrization", Some(false))
                .with_certificate(json!({
                    "space": space.name(),
                    "unreached": complete.counterexample.as_ref().map(rel_json),
                })));
        }
        let q = lawvere_quasi_fixed_point(&param, &g, inst.order(), total)?;
        Ok(
            Report::new("", "quasi-fixed-point", Some(true)).with_certificate(json!({
                "space": space.name(),
                "maps_checked": complete.maps_checked.to_string(),
                "diagonal": rel_json(&q.diagonal),
                "program": q.program.map(|p| param.programs.label(p).to_string()),
                "point": rel_json(&q.point),
            })),
        )
    }

    fn unreachability(&mut self, args: &[String]) -> CmdResult<Report> {
        let (s, inst) = self.simulator(self.arg(args, 1, "a simulator")?, None)?;
        let space = self.opts.search.unwrap_or(inst.ambient().space());
        let u = has_unreachability(&s, &inst, space, self.meter)?;
        let verdict = if u.unreachable {
            "unreachable"
        } else {
            "complete"
        };
        Ok(
            Report::new("", verdict, Some(u.unreachable)).with_certificate(
                json!({ "space": space.name(), "unreached": u.witness.as_ref().map(rel_json) }),
            ),
        )
    }

    fn cantor(&mut self) -> CmdResult<Report> {
        let c = cantor_report(self.opts.n, self.meter)?;
        let holds = !c.universal_found && c.equivalence_holds;
        let verdict = if c.universal_found {
            "universal-found"
        } else {
            "no-universal-simulator"
        };
        let mut r = Report::new("", verdict, Some(holds))
            .with_certificate(serde_json::to_value(&c).expect("cantor report serializes"));
        r.basis = Basis::ExhaustiveSearch;
        Ok(r)
    }

    fn functor_check(&mut self, args: &[String]) -> CmdResult<Report> {
        let name = self.arg(args, 1, "a functor")?;
        let Some(f) = self.model.functors.get(name) else {
            return usage(format!("unknown functor `{name}`"));
        };
        let check = check_tc_functor(f, self.meter)?;
        let mut preserved = Vec::new();
        let mut ok = check.is_valid();
        if ok {
            let mut sims = vec![Simulator::trivial(&f.source)];
            sims.extend(
                self.model
                    .simulators
                    .iter()
                    .filter(|(_, e)| {
                        self.model
                            .tccs
                            .get(&e.tcc)
                            .is_some_and(|t| t.instance == f.source)
                    })
                    .map(|(_, e)| e.simulator.clone()),
            );
            for s in &sims {
                let p = verify_universality_preservation(f, s, self.meter)?;
                ok &= !p.source_universal || (p.image_universal && p.singleton_preserved);
                preserved.push(json!({ "simulator": s.name(), "result": p }));
            }
        }
        let mut r = Report::new("", if ok { "valid" } else { "invalid" }, Some(ok))
            .with_certificate(json!({
                "violations": check.violations,
                "compositions_checked": check.compositions_checked.to_string(),
                "imitation_pairs_checked": check.imitation_pairs_checked.to_string(),
                "universality": preserved,
            }));
        r.basis = Basis::ExhaustiveSearch;
        Ok(r)
    }

    fn checks(&mut self) -> CmdResult<Report> {
        let mut results = Vec::new();
        for (name, c) in self.model.checks.iter() {
            if c.words.first().is_some_and(|w| w == "checks") {
                return usage(format!("check `{name}` may not run `checks`"));
            }
            let r = self.dispatch(&c.words)?;
            results.push(json!({ "check": name, "command": c.words.join(" "), "verdict": r.verdict, "holds": r.holds }));
        }
        let n = results.len();
        let mut r = Report::new("", format!("ran {n} checks"), None)
            .with_certificate(Value::Array(results));
        r.basis = Basis::ExhaustiveSearch;
        Ok(r)
    }
}

/// Canonical JSON export of a resolved document.
pub fn model_json(model: &Model) -> Value {
    let sets: Map<String, Value> = model
        .sets
        .iter()
        .map(|(n, s)| (n.to_string(), json!(s.elements())))
        .collect();
    let rels: Map<String, Value> = model
        .rels
        .iter()
        .map(|(n, f)| {
            (
                n.to_string(),
                json!({ "dom": f.dom().id(), "cod": f.cod().id(), "pairs": rel_json(f) }),
            )
        })
        .collect();
    let tccs: Map<String, Value> = model
        .tccs
        .iter()
        .map(|(n, e)| {
            let i = &e.instance;
            (
                n.to_string(),
                json!({
                    "targets": i.targets().elements(),
                    "contexts": i.contexts().elements(),
                    "behaviors": i.behaviors().elements(),
                    "ambient": i.ambient().name(),
                    "eval": rel_json(i.eval()),
                    "order": rel_json(&i.order().as_rel()),
                }),
            )
        })
        .collect();
    let sims: Map<String, Value> = model
        .simulators
        .iter()
        .map(|(n, e)| {
            (
                n.to_string(),
                json!({
                    "tcc": e.tcc,
                    "programs": e.simulator.programs().elements(),
                    "compiler": rel_json(e.simulator.compiler()),
                    "context": rel_json(e.simulator.context()),
                }),
            )
        })
        .collect();
    json!({ "sets": sets, "rels": rels, "tccs": tccs, "simulators": sims })
}
