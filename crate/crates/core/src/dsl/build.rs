use std::collections::HashMap;
use std::str::FromStr;

use num_rational::BigRational;

use super::ast::*;
use super::{Code, Diagnostic, Span};
use crate::budget::Meter;
use crate::error::Error;
use crate::finrel::{FinRel, FinSet};
use crate::instances::spin::{build_spin_tcc, SimplicialComplex, SpinSystem, SpinTcc};
use crate::order::Preorder;
use crate::simcat::Processing;
use crate::simulator::Simulator;
use crate::tcc::{Ambient, BehaviorStructure, TccInstance};
use crate::tcfunctor::TcFunctor;

/// Named objects in declaration order.
#[derive(Debug, Clone)]
pub struct Table<T> {
    entries: Vec<(String, T)>,
    index: HashMap<String, usize>,
}

impl<T> Default for Table<T> {
    fn default() -> Self {
        Table {
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }
}

impl<T> Table<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.index.get(name).map(|&i| &self.entries[i].1)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first(&self) -> Option<(&str, &T)> {
        self.entries.first().map(|(n, t)| (n.as_str(), t))
    }

    fn insert(&mut self, name: &Name, kind: &str, value: T) -> Result<(), Diagnostic> {
        if self.index.contains_key(name.as_str()) {
            return Err(Diagnostic::new(
                Code::Dup,
                name.span,
                format!("{kind} `{}` is declared twice", name.node),
            ));
        }
        self.index.insert(name.node.clone(), self.entries.len());
        self.entries.push((name.node.clone(), value));
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TccEntry {
    pub instance: TccInstance,
    pub spin: Option<SpinTcc>,
}

#[derive(Debug, Clone)]
pub struct SimEntry {
    pub tcc: String,
    pub simulator: Simulator,
}

#[derive(Debug, Clone)]
pub struct ProcEntry {
    pub tcc: String,
    pub processing: Processing,
}

#[derive(Debug, Clone)]
pub struct CheckEntry {
    pub words: Vec<String>,
    pub span: Span,
}

/// Resolved objects of a document.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub sets: Table<FinSet>,
    pub rels: Table<FinRel>,
    pub preorders: Table<Preorder>,
    pub spins: Table<SpinSystem>,
    pub tccs: Table<TccEntry>,
    pub simulators: Table<SimEntry>,
    pub processings: Table<ProcEntry>,
    pub functors: Table<TcFunctor>,
    pub checks: Table<CheckEntry>,
}

fn code_of(e: &Error) -> Code {
    match e {
        Error::TypeMismatch(_) => Code::Type,
        Error::UnknownElement { .. } => Code::Elem,
        Error::DuplicateElement { .. } => Code::Dup,
        Error::BudgetExceeded { .. } => Code::Budget,
        _ => Code::Valid,
    }
}

fn lift(span: Span) -> impl Fn(Error) -> Diagnostic {
    move |e| Diagnostic::new(code_of(&e), span, e.to_string())
}

fn unknown(span: Span, kind: &str, name: &str) -> Diagnostic {
    Diagnostic::new(Code::Ref, span, format!("unknown {kind} `{name}`"))
}

/// Resolves a parsed document. Names must be declared before use.
pub fn build(doc: &Document, meter: &mut Meter) -> Result<Model, Vec<Diagnostic>> {
    let mut m = Model::default();
    let mut errors = Vec::new();
    for block in &doc.blocks {
        if let Err(d) = m.add(block, meter) {
            errors.push(d);
        }
    }
    if errors.is_empty() {
        Ok(m)
    } else {
        Err(errors)
    }
}

impl Model {
    pub fn set(&self, name: &Name) -> Result<FinSet, Diagnostic> {
        if name.as_str() == crate::finrel::UNIT_ID {
            return Ok(FinSet::unit());
        }
        self.sets
            .get(name.as_str())
            .cloned()
            .ok_or_else(|| unknown(name.span, "set", name.as_str()))
    }

    fn type_expr(&self, t: &TypeExpr) -> Result<FinSet, Diagnostic> {
        let factors: Vec<FinSet> = t.iter().map(|f| self.set(f)).collect::<Result<_, _>>()?;
        Ok(FinSet::product_of(&factors))
    }

    fn tcc(&self, name: &Name) -> Result<&TccEntry, Diagnostic> {
        self.tccs
            .get(name.as_str())
            .ok_or_else(|| unknown(name.span, "instance", name.as_str()))
    }

    fn rel_ref(&self, name: &Name, dom: &FinSet, cod: &FinSet) -> Result<FinRel, Diagnostic> {
        let f = self
            .rels
            .get(name.as_str())
            .ok_or_else(|| unknown(name.span, "relation", name.as_str()))?;
        if f.dom() != dom || f.cod() != cod {
            return Err(Diagnostic::new(
                Code::Type,
                name.span,
                format!(
                    "`{}` has type {} -> {}, expected {} -> {}",
                    name.node,
                    f.dom().id(),
                    f.cod().id(),
                    dom.id(),
                    cod.id()
                ),
            ));
        }
        Ok(f.clone())
    }

    fn add(&mut self, block: &Block, meter: &mut Meter) -> Result<(), Diagnostic> {
        match block {
            Block::Set(d) => {
                if d.name.as_str() == crate::finrel::UNIT_ID {
                    return Err(Diagnostic::new(
                        Code::Dup,
                        d.name.span,
                        "`I` is the built-in unit set",
                    ));
                }
                if let Some(dup) = d
                    .elements
                    .iter()
                    .enumerate()
                    .find(|(i, e)| d.elements[..*i].contains(e))
                {
                    return Err(Diagnostic::new(
                        Code::Dup,
                        dup.1.span,
                        format!("element `{}` listed twice", dup.1.node),
                    ));
                }
                let set = FinSet::new(
                    d.name.node.clone(),
                    d.elements.iter().map(|e| e.node.clone()),
                )
                .map_err(lift(d.name.span))?;
                self.sets.insert(&d.name, "set", set)
            }
            Block::Rel(d) => {
                let dom = self.type_expr(&d.dom)?;
                let cod = self.type_expr(&d.cod)?;
                let f = pairs_rel(&dom, &cod, &d.pairs)?;
                self.rels.insert(&d.name, "relation", f)
            }
            Block::Preorder(d) => {
                let carrier = self.set(&d.carrier)?;
                let mut edges = Vec::with_capacity(d.edges.len());
                for (x, y) in &d.edges {
                    edges.push((element(&carrier, x)?, element(&carrier, y)?));
                }
                let p = Preorder::closure(&carrier, &edges).map_err(lift(d.name.span))?;
                self.preorders.insert(&d.name, "preorder", p)
            }
            Block::Spin(d) => {
                let vertices = FinSet::new(
                    d.vertex_set.node.clone(),
                    d.vertices.iter().map(|v| v.node.clone()),
                )
                .map_err(lift(d.vertex_set.span))?;
                let levels: usize = d.levels.as_str().parse().map_err(|_| {
                    Diagnostic::new(
                        Code::Valid,
                        d.levels.span,
                        "level count must be a natural number",
                    )
                })?;
                let mut facets = Vec::with_capacity(d.facets.len());
                let mut terms = Vec::with_capacity(d.facets.len());
                for f in &d.facets {
                    let idx: Vec<usize> = f
                        .vertices
                        .iter()
                        .map(|v| element(&vertices, v))
                        .collect::<Result<_, _>>()?;
                    if idx.windows(2).any(|w| w[0] >= w[1]) {
                        let span = f.vertices.first().map_or(d.name.span, |v| v.span);
                        return Err(Diagnostic::new(
                            Code::Valid,
                            span,
                            "facet vertices must follow the vertex order",
                        ));
                    }
                    facets.push(idx);
                    terms.push(
                        f.energies
                            .iter()
                            .map(rational)
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                let complex =
                    SimplicialComplex::new(vertices, facets).map_err(lift(d.name.span))?;
                let delta = rational(&d.delta)?;
                let system = SpinSystem::new(d.name.node.clone(), complex, levels, terms, delta)
                    .map_err(lift(d.name.span))?;
                self.spins.insert(&d.name, "spin system", system)
            }
            Block::Tcc(d) => {
                let entry = match &d.body {
                    TccBody::Explicit {
                        targets,
                        contexts,
                        behaviors,
                        eval,
                        order,
                        ambient,
                    } => {
                        let t = self.set(targets)?;
                        let c = self.set(contexts)?;
                        let b = self.set(behaviors)?;
                        let e = self.rel_ref(eval, &FinSet::product(&t, &c), &b)?;
                        let o = self
                            .preorders
                            .get(order.as_str())
                            .ok_or_else(|| unknown(order.span, "preorder", order.as_str()))?;
                        if o.carrier() != &b {
                            return Err(Diagnostic::new(
                                Code::Type,
                                order.span,
                                format!(
                                    "`{}` orders `{}`, not the behaviors `{}`",
                                    order.node,
                                    o.carrier().id(),
                                    b.id()
                                ),
                            ));
                        }
                        let amb = Ambient::parse(ambient.as_str()).ok_or_else(|| {
                            Diagnostic::new(
                                Code::Valid,
                                ambient.span,
                                format!("unknown ambient `{}`, expected relations, partial-functions or functions", ambient.node),
                            )
                        })?;
                        let structure =
                            BehaviorStructure::new(e, o.clone()).map_err(lift(eval.span))?;
                        let instance =
                            TccInstance::new(d.name.node.clone(), &t, &c, structure, amb)
                                .map_err(lift(d.name.span))?;
                        TccEntry {
                            instance,
                            spin: None,
                        }
                    }
                    TccBody::Spin { systems } => {
                        let mut list = Vec::with_capacity(systems.len());
                        for s in systems {
                            list.push(
                                self.spins
                                    .get(s.as_str())
                                    .cloned()
                                    .ok_or_else(|| unknown(s.span, "spin system", s.as_str()))?,
                            );
                        }
                        let spin = build_spin_tcc(d.name.node.clone(), list, meter)
                            .map_err(lift(d.name.span))?;
                        for (suffix, set) in [
                            ("T", spin.instance.targets()),
                            ("C", spin.instance.contexts()),
                            ("B", spin.instance.behaviors()),
                        ] {
                            let name =
                                Spanned::new(format!("{}.{suffix}", d.name.node), d.name.span);
                            self.sets.insert(&name, "set", set.clone())?;
                        }
                        TccEntry {
                            instance: spin.instance.clone(),
                            spin: Some(spin),
                        }
                    }
                };
                self.tccs.insert(&d.name, "instance", entry)
            }
            Block::Simulator(d) => {
                let inst = self.tcc(&d.tcc)?.instance.clone();
                let p = self.set(&d.programs)?;
                let compiler = self.source(&d.compiler, &p, inst.targets())?;
                let pc = FinSet::product(&p, inst.contexts());
                let context = match &d.context {
                    RelSource::Passthrough => {
                        let nc = inst.contexts().len();
                        FinRel::from_fn(&pc, inst.contexts(), |k| {
                            compiler.value(k / nc).map(|_| k % nc)
                        })
                    }
                    other => self.source(other, &pc, inst.contexts())?,
                };
                let s = Simulator::new(d.name.node.clone(), compiler, context, &inst)
                    .map_err(lift(d.name.span))?;
                self.simulators.insert(
                    &d.name,
                    "simulator",
                    SimEntry {
                        tcc: d.tcc.node.clone(),
                        simulator: s,
                    },
                )
            }
            Block::Processing(d) => {
                let inst = self.tcc(&d.tcc)?.instance.clone();
                let p = self.set(&d.programs)?;
                let pt = FinSet::product(&p, inst.targets());
                let ptc = FinSet::product(&pt, inst.contexts());
                let tm = self.source(&d.targets, &pt, inst.targets())?;
                let cm = self.source(&d.contexts, &ptc, inst.contexts())?;
                let q = Processing::from_parts(d.name.node.clone(), &p, tm, cm, &inst)
                    .map_err(lift(d.name.span))?;
                self.processings.insert(
                    &d.name,
                    "processing",
                    ProcEntry {
                        tcc: d.tcc.node.clone(),
                        processing: q,
                    },
                )
            }
            Block::Functor(d) => {
                let source = self.tcc(&d.source)?.instance.clone();
                let target = self.tcc(&d.target)?.instance.clone();
                let mut tmap: Option<Vec<Option<usize>>> = None;
                let mut cmap: Option<Vec<Option<usize>>> = None;
                for om in &d.maps {
                    let from = self.set(&om.from)?;
                    let to = self.set(&om.to)?;
                    let (slot, image) = if &from == source.targets() {
                        (&mut tmap, target.targets())
                    } else if &from == source.contexts() {
                        (&mut cmap, target.contexts())
                    } else {
                        return Err(Diagnostic::new(
                            Code::Type,
                            om.from.span,
                            format!(
                                "`{}` is neither the targets nor the contexts of `{}`",
                                om.from.node, d.source.node
                            ),
                        ));
                    };
                    if slot.is_some() {
                        return Err(Diagnostic::new(
                            Code::Dup,
                            om.from.span,
                            format!("`{}` is mapped twice", om.from.node),
                        ));
                    }
                    let mut map = vec![None; from.len()];
                    for pair in &om.pairs {
                        let x = elem_index(&from, &pair.from)?;
                        let y = elem_index(&to, &pair.to)?;
                        if map[x].is_some() {
                            return Err(Diagnostic::new(
                                Code::Dup,
                                pair.from.span,
                                "element mapped twice",
                            ));
                        }
                        map[x] = Some(y);
                    }
                    // An object map into the wrong set is left undefined for the checker to report.
                    *slot = Some(if &to == image {
                        map
                    } else {
                        vec![None; from.len()]
                    });
                }
                let default = |a: &FinSet, b: &FinSet| -> Vec<Option<usize>> {
                    if a == b {
                        a.iter().map(Some).collect()
                    } else {
                        vec![None; a.len()]
                    }
                };
                let tmap = tmap.unwrap_or_else(|| default(source.targets(), target.targets()));
                let cmap = cmap.unwrap_or_else(|| default(source.contexts(), target.contexts()));
                let f = TcFunctor::new(d.name.node.clone(), &source, &target, tmap, cmap)
                    .map_err(lift(d.name.span))?;
                self.functors.insert(&d.name, "functor", f)
            }
            Block::Check(d) => {
                let words = d.words.iter().map(|w| w.node.clone()).collect();
                self.checks.insert(
                    &d.name,
                    "check",
                    CheckEntry {
                        words,
                        span: d.name.span,
                    },
                )
            }
        }
    }

    fn source(&self, src: &RelSource, dom: &FinSet, cod: &FinSet) -> Result<FinRel, Diagnostic> {
        match src {
            RelSource::Ref(n) => self.rel_ref(n, dom, cod),
            RelSource::Inline(pairs) => pairs_rel(dom, cod, pairs),
            RelSource::Passthrough => Err(Diagnostic::new(
                Code::Syntax,
                Span::default(),
                "`passthrough` is only valid for contexts",
            )),
        }
    }
}

fn element(set: &FinSet, label: &Name) -> Result<usize, Diagnostic> {
    set.index_of(label.as_str()).ok_or_else(|| {
        Diagnostic::new(
            Code::Elem,
            label.span,
            format!("`{}` is not an element of `{}`", label.node, set.id()),
        )
    })
}

fn elem_index(set: &FinSet, e: &ElemRef) -> Result<usize, Diagnostic> {
    let leaves = set.leaves();
    if e.parts.len() != leaves.len() {
        return Err(Diagnostic::new(
            Code::Type,
            e.span,
            format!(
                "`{}` has {} factors, got a tuple of {}",
                set.id(),
                leaves.len(),
                e.parts.len()
            ),
        ));
    }
    let digits: Vec<usize> = e
        .parts
        .iter()
        .zip(leaves)
        .map(|(p, l)| element(l, p))
        .collect::<Result<_, _>>()?;
    Ok(if set.is_product() {
        set.from_tuple(&digits)
    } else {
        digits[0]
    })
}

fn pairs_rel(dom: &FinSet, cod: &FinSet, pairs: &[Pair]) -> Result<FinRel, Diagnostic> {
    let mut idx = Vec::with_capacity(pairs.len());
    for p in pairs {
        idx.push((elem_index(dom, &p.from)?, elem_index(cod, &p.to)?));
    }
    FinRel::from_pairs(dom, cod, idx).map_err(lift(Span::default()))
}

fn rational(w: &Name) -> Result<BigRational, Diagnostic> {
    BigRational::from_str(w.as_str()).map_err(|_| {
        Diagnostic::new(
            Code::Valid,
            w.span,
            format!("`{}` is not a rational number", w.node),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn load(src: &str) -> Result<Model, Vec<Diagnostic>> {
        build(&parse(src).unwrap(), &mut Meter::default())
    }

    const BASE: &str = "
set T { hi lo }
set C { c0 c1 }
set B { b1 b2 }
rel e : T*C -> B { (hi,c0)->b2 (hi,c1)->b2 (lo,c0)->b1 (lo,c1)->b1 }
preorder o on B { b2>=b1 }
tcc N { targets T contexts C behaviors B eval e order o ambient relations }
set P { p }
simulator s in N { programs P compiler { p->hi } context passthrough }
";

    #[test]
    fn builds_instance_and_simulator() {
        let m = load(BASE).unwrap();
        let s = &m.simulators.get("s").unwrap().simulator;
        assert_eq!(s.target_of(0), Some(0));
        assert_eq!(m.tccs.get("N").unwrap().instance.targets().len(), 2);
    }

    #[test]
    fn resolution_codes() {
        let e = load("rel f : T -> Missing { }").unwrap_err();
        assert_eq!(e[0].code, Code::Ref);
        let e = load("set A { a }\nrel f : A -> A { a->z }").unwrap_err();
        assert_eq!((e[0].code, e[0].span.line), (Code::Elem, 2));
        let e = load("set A { a }\nset A { b }").unwrap_err();
        assert_eq!(e[0].code, Code::Dup);
        let e = load(&format!(
            "{BASE}\nsimulator t in N {{ programs P compiler e context passthrough }}"
        ))
        .unwrap_err();
        assert_eq!(e[0].code, Code::Type);
    }
}
