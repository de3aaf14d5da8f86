//! Ready-made documents for the command line and the example corpus.

use num_rational::BigRational;

use super::catalog::{cofinal, dense_metric, lookup_demo};
use super::spin::{build_spin_tcc, field_system, SpinTcc};
use crate::budget::Meter;
use crate::diagonal::cantor_instance;
use crate::dsl::{Document, Exporter};
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::order::Preorder;
use crate::simulator::Simulator;
use crate::tcc::{Ambient, TccInstance};
use crate::tcfunctor::TcFunctor;

pub const NAMES: [&str; 8] = [
    "nogo-spin",
    "lookup",
    "cofinal",
    "dense",
    "cantor1",
    "cantor2",
    "lawvere",
    "functor",
];

pub fn preset(name: &str) -> Result<Document> {
    match name {
        "nogo-spin" => nogo_spin(),
        "lookup" => lookup(),
        "cofinal" => cofinal_doc(),
        "dense" => dense(),
        "cantor1" => cantor(1),
        "cantor2" => cantor(2),
        "lawvere" => lawvere(),
        "functor" => functor(),
        other => Err(Error::invalid(
            "preset",
            format!(
                "unknown preset `{other}`, expected one of {}",
                NAMES.join(", ")
            ),
        )),
    }
}

/// Same simulator over a renamed program set.
fn with_programs(s: &Simulator, id: &str, name: &str, inst: &TccInstance) -> Result<Simulator> {
    let programs = FinSet::new(id, s.programs().elements().iter().cloned())?;
    let compiler = s.compiler().retype(&programs, inst.targets())?;
    let context = s.context().retype(
        &FinSet::product(&programs, inst.contexts()),
        inst.contexts(),
    )?;
    Simulator::new(name, compiler, context, inst)
}

/// Field systems on `0..=5` vertices and a simulator compiling only to the
/// one- and two-vertex systems.
pub fn nogo_spin_instance(meter: &mut Meter) -> Result<(SpinTcc, Simulator)> {
    let spin = build_spin_tcc("spins", (0..=5).map(field_system).collect(), meter)?;
    let inst = &spin.instance;
    let programs = FinSet::new("P", ["p1", "p2"])?;
    let image = [1usize, 2];
    let compiler = FinRel::from_fn(&programs, inst.targets(), |p| Some(image[p]));
    let nc = inst.contexts().len();
    let context = FinRel::from_fn(
        &FinSet::product(&programs, inst.contexts()),
        inst.contexts(),
        |k| {
            let (p, c) = (k / nc, k % nc);
            let home = spin.complex_of(image[p]);
            if spin.configs[c].0 == home {
                Some(c)
            } else {
                spin.configs
                    .iter()
                    .position(|(kc, a)| *kc == home && a.iter().all(|&x| x == 0))
            }
        },
    );
    let s = Simulator::new("s", compiler, context, inst)?;
    Ok((spin, s))
}

fn nogo_spin() -> Result<Document> {
    let (spin, s) = nogo_spin_instance(&mut Meter::default())?;
    let mut ex = Exporter::new();
    ex.spin_instance("spins", &spin);
    ex.simulator("spins", &s)?;
    ex.check("nogo", &["nogo", "s", "spectrum_size"]);
    ex.check("universal", &["universal", "s"]);
    Ok(ex.finish())
}

fn lookup() -> Result<Document> {
    let (inst, s) = lookup_demo();
    let mut ex = Exporter::new();
    ex.instance("lookup", &inst)?;
    ex.simulator("lookup", &s)?;
    ex.check("universal", &["universal", "s_u"]);
    ex.check("up", &["parsimony", "trivial", "s_u"]);
    ex.check("down", &["parsimony", "s_u", "trivial"]);
    Ok(ex.finish())
}

fn cofinal_doc() -> Result<Document> {
    let x = Preorder::chain(&FinSet::numbered("X", "x", 4));
    let top = cofinal("cofinal", &x, &[3])?;
    let low = cofinal("cofinal", &x, &[1, 2])?;
    let low_sim = with_programs(&low.simulator, "Q", "inclusion.low", &low.instance)?;
    let mut ex = Exporter::new();
    ex.instance("cofinal", &top.instance)?;
    ex.simulator("cofinal", &top.simulator)?;
    ex.simulator("cofinal", &low_sim)?;
    ex.check("top", &["universal", "inclusion"]);
    ex.check("low", &["universal", "inclusion.low"]);
    Ok(ex.finish())
}

fn dense() -> Result<Document> {
    let pts: Vec<BigRational> = (0..5)
        .map(|i| BigRational::new(i.into(), 2.into()))
        .collect();
    let radii = vec![
        BigRational::from_integer(1.into()),
        BigRational::new(1.into(), 4.into()),
    ];
    let c = dense_metric("dense", &pts, &[0, 2, 4], &radii)?;
    let mut ex = Exporter::new();
    ex.instance("dense", &c.instance)?;
    ex.simulator("dense", &c.simulator)?;
    ex.check("sparse", &["universal", "inclusion"]);
    Ok(ex.finish())
}

fn cantor(n: usize) -> Result<Document> {
    let inst = cantor_instance(n);
    let mut ex = Exporter::new();
    ex.instance(inst.name(), &inst)?;
    ex.check("unreachable", &["unreachability", "trivial"]);
    Ok(ex.finish())
}

/// Tables `C → B` with `B = C` a chain; program `x_i` compiles to the
/// constant table `x_i`, so the last program reaches the top everywhere.
pub fn lawvere_chain(n: usize) -> Result<(TccInstance, Simulator)> {
    if n == 0 {
        return Err(Error::invalid(
            "chain lookup instance",
            "needs at least one context",
        ));
    }
    let contexts = FinSet::numbered("C", "x", n);
    let behaviors = FinSet::numbered("B", "x", n);
    let tables = super::catalog::all_tables(n, n, false);
    let targets = FinSet::new(
        "T",
        tables
            .iter()
            .map(|t| super::catalog::table_label(t, &behaviors)),
    )?;
    let inst = TccInstance::from_table(
        "lawvere",
        &targets,
        &contexts,
        Preorder::chain(&behaviors),
        Ambient::Functions,
        |t, c| tables[t][c],
    )?;
    let programs = FinSet::numbered("P", "x", n);
    let constant = |b: usize| {
        tables
            .iter()
            .position(|t| t.iter().all(|&x| x == Some(b)))
            .expect("constant table listed")
    };
    let compiler = FinRel::from_fn(&programs, inst.targets(), |p| Some(constant(p)));
    let context = FinRel::from_fn(&FinSet::product(&programs, &contexts), &contexts, |k| {
        Some(k % n)
    });
    let s = Simulator::new("s", compiler, context, &inst)?;
    Ok((inst, s))
}

fn lawvere() -> Result<Document> {
    let (inst, s) = lawvere_chain(3)?;
    let b = inst.behaviors();
    let mut ex = Exporter::new();
    ex.instance("lawvere", &inst)?;
    ex.simulator("lawvere", &s)?;
    let shift = FinRel::from_fn(b, b, |x| Some((x + 1) % b.len()));
    ex.rel("shift", &shift)?;
    ex.check("fixed", &["lawvere", "shift", "s"]);
    Ok(ex.finish())
}

fn functor() -> Result<Document> {
    let (inst, s) = lookup_demo();
    let order = Preorder::closure(inst.behaviors(), &[(1, 0)])?;
    let f = TcFunctor::relabeling(&inst, &[3, 2, 1, 0], &[1, 0], order, "'")?;
    let mut ex = Exporter::new();
    ex.instance("lookup", &inst)?;
    ex.simulator("lookup", &s)?;
    ex.instance("lookup'", &f.target)?;
    ex.functor("lookup", "lookup'", &f)?;
    ex.check("laws", &["functor-check", f.name.as_str()]);
    Ok(ex.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{build, parse, to_text};

    #[test]
    fn presets_round_trip_and_build() {
        for name in NAMES {
            let doc = preset(name).unwrap();
            let text = to_text(&doc);
            let parsed = parse(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
            assert_eq!(parsed, doc, "{name}");
            build(&parsed, &mut Meter::default()).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        }
    }

    #[test]
    fn rebuilt_lookup_matches() {
        let (inst, s) = lookup_demo();
        let m = build(&preset("lookup").unwrap(), &mut Meter::default()).unwrap();
        assert_eq!(m.tccs.get("lookup").unwrap().instance.eval(), inst.eval());
        assert_eq!(
            m.simulators.get("s_u").unwrap().simulator.assembled(),
            s.assembled()
        );
    }
}
