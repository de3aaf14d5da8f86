//! Cofinal subsets, a finite density analogue, and lookup machines.

use num_rational::BigRational;
use num_traits::Signed;

use crate::budget::Meter;
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::order::Preorder;
use crate::simulator::{find_universality_witness, Simulator};
use crate::tcc::{Ambient, TccInstance};

/// An instance with its canonical simulator.
#[derive(Debug, Clone)]
pub struct CatalogInstance {
    pub instance: TccInstance,
    pub simulator: Simulator,
}

/// `T = B = X`, `C = I`, `eval = id`; the simulator includes `M` into `X`.
pub fn cofinal(name: &str, x: &Preorder, m: &[usize]) -> Result<CatalogInstance> {
    let carrier = x.carrier();
    let targets = FinSet::new("T", carrier.elements().iter().cloned())?;
    let behaviors = FinSet::new("B", carrier.elements().iter().cloned())?;
    let order = Preorder::closure(&behaviors, &x.strict_edges())?;
    let unit = FinSet::new("C", ["c"])?;
    let instance =
        TccInstance::from_table(name, &targets, &unit, order, Ambient::Functions, |t, _| {
            Some(t)
        })?;
    let mut members = m.to_vec();
    members.sort_unstable();
    members.dedup();
    if let Some(&bad) = members.iter().find(|&&i| i >= carrier.len()) {
        return Err(Error::UnknownElement {
            set: carrier.id().to_string(),
            element: format!("#{bad}"),
        });
    }
    let programs = FinSet::new(
        "P",
        members.iter().map(|&i| format!("m.{}", carrier.label(i))),
    )?;
    let compiler = FinRel::from_fn(&programs, &targets, |p| Some(members[p]));
    let context = FinRel::from_fn(&FinSet::product(&programs, &unit), &unit, |_| Some(0));
    let simulator = Simulator::new("inclusion", compiler, context, &instance)?;
    Ok(CatalogInstance {
        instance,
        simulator,
    })
}

/// Every `x` has some `m ∈ M` with `m ⪰ x`.
pub fn is_cofinal(x: &Preorder, m: &[usize]) -> bool {
    x.carrier().iter().all(|a| m.iter().any(|&b| x.geq(b, a)))
}

/// Points of a finite line, a subset playing the dense part, and radii.
/// Targets are `(point, radius)`, behaviors the balls they cut out of the
/// point set, ordered by inclusion with the smaller ball on top.
pub fn dense_metric(
    name: &str,
    points: &[BigRational],
    dense: &[usize],
    radii: &[BigRational],
) -> Result<CatalogInstance> {
    if radii.iter().any(|r| !r.is_positive()) {
        return Err(Error::invalid(
            "dense metric instance",
            "radii must be positive",
        ));
    }
    if let Some(&bad) = dense.iter().find(|&&i| i >= points.len()) {
        return Err(Error::invalid(
            "dense metric instance",
            format!("point #{bad} out of range"),
        ));
    }
    let balls = ball_table(points, radii);
    let mut distinct: Vec<Vec<usize>> = balls.clone();
    distinct.sort();
    distinct.dedup();
    let label = |b: &[usize]| {
        if b.is_empty() {
            "ball._".to_string()
        } else {
            let parts: Vec<String> = b.iter().map(ToString::to_string).collect();
            format!("ball.{}", parts.join("."))
        }
    };
    let behaviors = FinSet::new("B", distinct.iter().map(|b| label(b)))?;
    let order = Preorder::from_fn(&behaviors, |x, y| {
        distinct[x].iter().all(|p| distinct[y].contains(p))
    })?;
    let nr = radii.len();
    let targets = FinSet::new(
        "T",
        (0..points.len()).flat_map(|x| (0..nr).map(move |r| format!("x{x}.r{r}"))),
    )?;
    let unit = FinSet::new("C", ["c"])?;
    let index: Vec<usize> = balls
        .iter()
        .map(|b| distinct.iter().position(|d| d == b).expect("ball listed"))
        .collect();
    let instance =
        TccInstance::from_table(name, &targets, &unit, order, Ambient::Functions, |t, _| {
            Some(index[t])
        })?;
    let programs = FinSet::new(
        "P",
        dense
            .iter()
            .flat_map(|&x| (0..nr).map(move |r| format!("q{x}.r{r}"))),
    )?;
    let compiler = FinRel::from_fn(&programs, &targets, |p| Some(dense[p / nr] * nr + p % nr));
    let context = FinRel::from_fn(&FinSet::product(&programs, &unit), &unit, |_| Some(0));
    let simulator = Simulator::new("inclusion", compiler, context, &instance)?;
    Ok(CatalogInstance {
        instance,
        simulator,
    })
}

/// `balls[x·|R| + r]` = indices of points strictly within `radii[r]` of `points[x]`.
fn ball_table(points: &[BigRational], radii: &[BigRational]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(points.len() * radii.len());
    for x in points {
        for r in radii {
            out.push(
                (0..points.len())
                    .filter(|&y| (&points[y] - x).abs() < *r)
                    .collect(),
            );
        }
    }
    out
}

/// Every ball around a point contains some ball around a dense point.
pub fn is_dense(points: &[BigRational], dense: &[usize], radii: &[BigRational]) -> bool {
    let balls = ball_table(points, radii);
    let nr = radii.len();
    (0..balls.len()).all(|t| {
        dense
            .iter()
            .any(|&q| (0..nr).any(|r| balls[q * nr + r].iter().all(|p| balls[t].contains(p))))
    })
}

/// Every partial (or total) table `C → B`, the first context most significant,
/// undefined sorting first.
pub fn all_tables(nc: usize, nb: usize, partial: bool) -> Vec<Vec<Option<usize>>> {
    let choices: Vec<Option<usize>> = if partial {
        std::iter::once(None).chain((0..nb).map(Some)).collect()
    } else {
        (0..nb).map(Some).collect()
    };
    let mut out = vec![Vec::new()];
    for _ in 0..nc {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for &x in &choices {
                let mut t = prefix.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub fn table_label(table: &[Option<usize>], behaviors: &FinSet) -> String {
    let parts: Vec<&str> = table
        .iter()
        .map(|x| x.map_or("_", |b| behaviors.label(b)))
        .collect();
    format!("t.{}", parts.join("."))
}

/// Targets are the given tables, `eval(t, c) = t(c)`, behaviors ordered by
/// equality, ambient of total functions.
pub fn lookup_machines(
    name: &str,
    contexts: &FinSet,
    behaviors: &FinSet,
    tables: &[Vec<Option<usize>>],
) -> Result<TccInstance> {
    for t in tables {
        if t.len() != contexts.len() || t.iter().flatten().any(|&b| b >= behaviors.len()) {
            return Err(Error::invalid(
                "lookup table",
                "table does not match the context and behavior sets",
            ));
        }
    }
    let targets = FinSet::new("T", tables.iter().map(|t| table_label(t, behaviors)))?;
    TccInstance::from_table(
        name,
        &targets,
        contexts,
        Preorder::equality(behaviors),
        Ambient::Functions,
        |t, c| tables[t][c],
    )
}

/// Searches for `u` such that routing each program `p_t` through contexts
/// of `u` imitates `t`; programs are the targets themselves.
pub fn find_singleton_universal(
    inst: &TccInstance,
    meter: &mut Meter,
) -> Result<Option<Simulator>> {
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let programs = FinSet::new(
        "P",
        inst.targets().elements().iter().map(|l| format!("p.{l}")),
    )?;
    let pc = FinSet::product(&programs, inst.contexts());
    let order = inst.order();
    for u in 0..nt {
        meter.charge((nt * nc * nc) as u64, "singleton search")?;
        let choice: Option<Vec<usize>> = (0..nt * nc)
            .map(|k| {
                let (t, c) = (k / nc, k % nc);
                (0..nc).find(|&c2| order.imitates_sets(inst.eval_at(u, c2), inst.eval_at(t, c)))
            })
            .collect();
        let Some(choice) = choice else { continue };
        let compiler = FinRel::from_fn(&programs, inst.targets(), |_| Some(u));
        let context = FinRel::from_fn(&pc, inst.contexts(), |k| Some(choice[k]));
        let s = Simulator::new(
            format!("s_{}", inst.targets().label(u)),
            compiler,
            context,
            inst,
        )?;
        if find_universality_witness(&s, inst, meter)?.is_some() {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// The four total tables on `C = B = {a, b}` and the singleton simulator
/// of the identity table, whose context reduction reads the table.
pub fn lookup_demo() -> (TccInstance, Simulator) {
    let set = FinSet::new("C", ["a", "b"]).expect("distinct");
    let behaviors = FinSet::new("B", ["a", "b"]).expect("distinct");
    let tables = all_tables(2, 2, false);
    let inst = lookup_machines("lookup", &set, &behaviors, &tables).expect("tables fit");
    let u = tables
        .iter()
        .position(|t| t == &[Some(0), Some(1)])
        .expect("identity table");
    let programs = FinSet::new(
        "P",
        inst.targets().elements().iter().map(|l| format!("p.{l}")),
    )
    .expect("distinct");
    let compiler = FinRel::from_fn(&programs, inst.targets(), |_| Some(u));
    let pc = FinSet::product(&programs, inst.contexts());
    let context = FinRel::from_fn(&pc, inst.contexts(), |k| tables[k / 2][k % 2]);
    let s = Simulator::new("s_u", compiler, context, &inst).expect("lookup simulator is valid");
    (inst, s)
}
