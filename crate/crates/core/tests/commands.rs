use serde_json::Value;
use univsim::diagonal::is_quasi_fixed;
use univsim::dsl::{self, Document, Model};
use univsim::finrel::{FinRel, FinSet};
use univsim::instances::presets;
use univsim::report::{emit_report, Basis, Format};
use univsim::run::{run, RunError, RunOptions};
use univsim::simulator::{check_reduction, context_reduces, Flavor, Reduction};
use univsim::{Meter, Simulator};

fn opts() -> RunOptions {
    RunOptions::default()
}

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn load(text: &str) -> (Document, Model) {
    let doc = dsl::parse(text).expect("parses");
    let model = dsl::build(&doc, &mut Meter::default()).expect("builds");
    (doc, model)
}

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/../../corpus/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .expect("corpus file")
}

fn rel_from_json(v: &Value, dom: &FinSet, cod: &FinSet) -> FinRel {
    let pairs: Vec<(usize, usize)> = v
        .as_array()
        .expect("pair list")
        .iter()
        .map(|p| {
            let a = p[0].as_str().unwrap();
            let b = p[1].as_str().unwrap();
            (
                dom.index_of(a)
                    .unwrap_or_else(|| panic!("{a} in {}", dom.id())),
                cod.index_of(b).unwrap(),
            )
        })
        .collect();
    FinRel::from_pairs(dom, cod, pairs).unwrap()
}

#[test]
fn universal_certificate_reverifies_without_search() {
    let doc = presets::preset("lookup").unwrap();
    let model = dsl::build(&doc, &mut Meter::default()).unwrap();
    let report = run(&args("universal s_u"), Some(&doc), &opts()).unwrap();
    assert_eq!(report.holds, Some(true));
    assert_eq!(report.basis, Basis::Certificate);
    let entry = model.simulators.get("s_u").unwrap();
    let inst = &model.tccs.get(&entry.tcc).unwrap().instance;
    let s = &entry.simulator;
    let cert = report.certificates.unwrap();
    let table = cert["reduction"].as_object().unwrap();
    let choices: Vec<Option<usize>> = inst
        .targets()
        .elements()
        .iter()
        .map(|t| table[t].as_str().map(|p| s.programs().index_of(p).unwrap()))
        .collect();
    let r = Reduction::from_choices(inst.targets(), s.programs(), &choices, Flavor::Lax);
    assert!(check_reduction(&r, s, &Simulator::trivial(inst), inst).unwrap());
}

#[test]
fn reduce_witnesses_reverify() {
    let (doc, model) = load(&corpus("reduce.tcc"));
    let inst = &model.tccs.get("red").unwrap().instance;
    let f = model.rels.get("f").unwrap();
    let g = model.rels.get("g").unwrap();
    let report = run(&args("reduce f g"), Some(&doc), &opts()).unwrap();
    let cert = report.certificates.unwrap();
    let ac = FinSet::product(f.dom(), inst.contexts());
    for (key, flavor) in [("lax", Flavor::Lax), ("oplax", Flavor::Oplax)] {
        let entry = &cert[key];
        if entry["holds"].as_bool().unwrap() {
            let w = rel_from_json(&entry["witness"], &ac, inst.contexts());
            let mut m = Meter::default();
            assert!(
                context_reduces(f, g, inst, flavor, Some(&w), None, &mut m)
                    .unwrap()
                    .holds,
                "{key}"
            );
        }
    }
}

#[test]
fn lawvere_point_is_quasi_fixed() {
    let (doc, model) = load(&corpus("lawvere-pair.tcc"));
    let report = run(&args("lawvere negate s"), Some(&doc), &opts()).unwrap();
    assert_eq!(report.verdict, "quasi-fixed-point");
    let inst = &model.tccs.get("diag").unwrap().instance;
    let g = model.rels.get("negate").unwrap();
    let cert = report.certificates.unwrap();
    let point = rel_from_json(&cert["point"], &FinSet::unit(), inst.behaviors());
    assert!(is_quasi_fixed(&point, g, inst.order()).unwrap());
}

#[test]
fn reports_are_byte_identical_on_rerun() {
    for name in presets::NAMES {
        let doc = presets::preset(name).unwrap();
        let a = run(&args("checks"), Some(&doc), &opts()).unwrap();
        let b = run(&args("checks"), Some(&doc), &opts()).unwrap();
        assert_eq!(
            emit_report(&a, Format::Json),
            emit_report(&b, Format::Json),
            "{name}"
        );
    }
}

#[test]
fn hash_ignores_layout_and_comments() {
    let text = corpus("comments.tcc");
    let doc = dsl::parse(&text).unwrap();
    let canonical = dsl::parse(&dsl::to_text(&doc)).unwrap();
    let a = run(&args("laws"), Some(&doc), &opts()).unwrap();
    let b = run(&args("laws"), Some(&canonical), &opts()).unwrap();
    assert!(a.instance_hash.is_some());
    assert_eq!(a.instance_hash, b.instance_hash);
}

#[test]
fn empty_certificate_is_null() {
    let (doc, _) = load(&corpus("cofinal-chain.tcc"));
    let report = run(&args("universal low"), Some(&doc), &opts()).unwrap();
    assert_eq!(report.holds, Some(false));
    let json: Value = serde_json::from_str(&emit_report(&report, Format::Json)).unwrap();
    assert!(json["certificates"].is_null());
    assert_eq!(json["schema_version"], 1);
}

#[test]
fn trivial_is_universal_by_identity() {
    let (doc, _) = load(&corpus("partial-eval.tcc"));
    let report = run(&args("universal trivial"), Some(&doc), &opts()).unwrap();
    let table = report.certificates.unwrap()["reduction"].clone();
    assert_eq!(table["t0"], "t0");
    assert_eq!(table["t1"], "t1");
}

#[test]
fn tiny_budget_is_reported_as_such() {
    let doc = presets::preset("nogo-spin").unwrap();
    let small = RunOptions {
        budget: 100,
        ..opts()
    };
    match run(&args("nogo s spectrum_size"), Some(&doc), &small) {
        Err(e @ RunError::Budget(_)) => {
            assert_eq!(e.exit_code(), 3);
            let RunError::Budget(report) = e else {
                unreachable!()
            };
            assert_eq!(report.basis, Basis::BudgetExceeded);
            assert_eq!(report.budgets.limit, 100);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn usage_errors() {
    let doc = presets::preset("lookup").unwrap();
    for bad in [
        "frobnicate",
        "universal",
        "universal nobody",
        "parsimony s_u",
    ] {
        let e = run(&args(bad), Some(&doc), &opts()).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{bad}");
    }
    assert!(run(&args("universal s_u"), None, &opts()).is_err());
}

#[test]
fn nogo_reports_both_suprema() {
    let (doc, _) = load(&corpus("nogo-rel.tcc"));
    let report = run(&args("nogo mid phi"), Some(&doc), &opts()).unwrap();
    assert_eq!(report.verdict, "not-universal");
    let cert = report.certificates.unwrap();
    assert_eq!(cert["sup_image"], "2");
    assert_eq!(cert["sup_all"], "7/2");
}

#[test]
fn cantor_without_instance() {
    let report = run(&args("cantor"), None, &RunOptions { n: 1, ..opts() }).unwrap();
    assert_eq!(report.verdict, "no-universal-simulator");
    assert_eq!(report.holds, Some(true));
    assert!(report.instance_hash.is_none());
}
