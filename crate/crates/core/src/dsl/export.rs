use super::ast::*;
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet, UNIT_ID};
use crate::instances::spin::{SpinSystem, SpinTcc};
use crate::order::Preorder;
use crate::simcat::Processing;
use crate::simulator::Simulator;
use crate::tcc::TccInstance;
use crate::tcfunctor::TcFunctor;

/// Writes model objects as a document, declaring each atomic set once.
#[derive(Debug, Default)]
pub struct Exporter {
    doc: Document,
    sets: Vec<(String, FinSet)>,
}

fn name(s: impl Into<String>) -> Name {
    Spanned::bare(s.into())
}

impl Exporter {
    pub fn new() -> Self {
        Exporter::default()
    }

    pub fn finish(self) -> Document {
        self.doc
    }

    fn lookup(&self, s: &FinSet) -> Option<&str> {
        self.sets
            .iter()
            .find(|(_, x)| x == s)
            .map(|(n, _)| n.as_str())
    }

    /// Declares the atomic factors of `s` and returns their names.
    pub fn set(&mut self, s: &FinSet) -> Result<Vec<String>> {
        let mut names = Vec::new();
        for leaf in s.leaves() {
            if leaf.is_unit() {
                names.push(UNIT_ID.to_string());
                continue;
            }
            if let Some(n) = self.lookup(leaf) {
                names.push(n.to_string());
                continue;
            }
            if self.sets.iter().any(|(n, _)| n == leaf.id()) {
                return Err(Error::invalid(
                    "export",
                    format!("two different sets are called `{}`", leaf.id()),
                ));
            }
            self.doc.blocks.push(Block::Set(SetDecl {
                name: name(leaf.id()),
                elements: leaf.elements().iter().map(|e| name(e.as_str())).collect(),
            }));
            self.sets.push((leaf.id().to_string(), leaf.clone()));
            names.push(leaf.id().to_string());
        }
        Ok(names)
    }

    fn pairs(f: &FinRel) -> Vec<Pair> {
        let elem = |s: &FinSet, i: usize| {
            let leaves = s.leaves();
            if leaves.len() == 1 {
                ElemRef::single(s.label(i))
            } else {
                ElemRef::tuple(
                    s.tuple(i)
                        .iter()
                        .zip(leaves)
                        .map(|(&d, l)| l.label(d).to_string()),
                )
            }
        };
        f.pairs()
            .into_iter()
            .map(|(a, b)| Pair {
                from: elem(f.dom(), a),
                to: elem(f.cod(), b),
            })
            .collect()
    }

    pub fn rel(&mut self, rel_name: &str, f: &FinRel) -> Result<()> {
        let dom = self.set(f.dom())?.into_iter().map(name).collect();
        let cod = self.set(f.cod())?.into_iter().map(name).collect();
        self.doc.blocks.push(Block::Rel(RelDecl {
            name: name(rel_name),
            dom,
            cod,
            pairs: Self::pairs(f),
        }));
        Ok(())
    }

    pub fn preorder(&mut self, order_name: &str, p: &Preorder) -> Result<()> {
        let carrier = self.set(p.carrier())?.remove(0);
        let c = p.carrier();
        let edges = p
            .strict_edges()
            .into_iter()
            .map(|(x, y)| (name(c.label(x)), name(c.label(y))))
            .collect();
        self.doc.blocks.push(Block::Preorder(PreorderDecl {
            name: name(order_name),
            carrier: name(carrier),
            edges,
        }));
        Ok(())
    }

    /// Sets, evaluation `{name}.eval`, order `{name}.order`, and the instance.
    pub fn instance(&mut self, inst_name: &str, inst: &TccInstance) -> Result<()> {
        let targets = self.set(inst.targets())?.remove(0);
        let contexts = self.set(inst.contexts())?.remove(0);
        let behaviors = self.set(inst.behaviors())?.remove(0);
        let eval = format!("{inst_name}.eval");
        let order = format!("{inst_name}.order");
        self.rel(&eval, inst.eval())?;
        self.preorder(&order, inst.order())?;
        self.doc.blocks.push(Block::Tcc(TccDecl {
            name: name(inst_name),
            body: TccBody::Explicit {
                targets: name(targets),
                contexts: name(contexts),
                behaviors: name(behaviors),
                eval: name(eval),
                order: name(order),
                ambient: name(inst.ambient().name()),
            },
        }));
        Ok(())
    }

    pub fn spin_system(&mut self, s: &SpinSystem) {
        let v = s.complex.vertices();
        let facets = s
            .complex
            .facets()
            .iter()
            .zip(&s.terms)
            .map(|(e, t)| Facet {
                vertices: e.iter().map(|&i| name(v.label(i))).collect(),
                energies: t.iter().map(|x| name(x.to_string())).collect(),
            })
            .collect();
        self.doc.blocks.push(Block::Spin(SpinDecl {
            name: name(s.name.as_str()),
            vertex_set: name(v.id()),
            vertices: v.elements().iter().map(|x| name(x.as_str())).collect(),
            levels: name(s.levels.to_string()),
            facets,
            delta: name(s.delta.to_string()),
        }));
    }

    /// Spin blocks for each system and the instance over them; its sets
    /// become `{name}.T`, `{name}.C` and `{name}.B`.
    pub fn spin_instance(&mut self, inst_name: &str, spin: &SpinTcc) {
        for s in &spin.systems {
            self.spin_system(s);
        }
        let systems = spin.systems.iter().map(|s| name(s.name.as_str())).collect();
        self.doc.blocks.push(Block::Tcc(TccDecl {
            name: name(inst_name),
            body: TccBody::Spin { systems },
        }));
        let inst = &spin.instance;
        for (suffix, set) in [
            ("T", inst.targets()),
            ("C", inst.contexts()),
            ("B", inst.behaviors()),
        ] {
            self.sets
                .push((format!("{inst_name}.{suffix}"), set.clone()));
        }
    }

    pub fn simulator(&mut self, inst_name: &str, s: &Simulator) -> Result<()> {
        let programs = self.set(s.programs())?.remove(0);
        self.doc.blocks.push(Block::Simulator(SimDecl {
            name: name(s.name()),
            tcc: name(inst_name),
            programs: name(programs),
            compiler: RelSource::Inline(Self::pairs(s.compiler())),
            context: RelSource::Inline(Self::pairs(s.context())),
        }));
        Ok(())
    }

    pub fn processing(&mut self, inst_name: &str, q: &Processing) -> Result<()> {
        let programs = self.set(q.programs())?.remove(0);
        self.doc.blocks.push(Block::Processing(ProcDecl {
            name: name(q.name()),
            tcc: name(inst_name),
            programs: name(programs),
            targets: RelSource::Inline(Self::pairs(q.target_map())),
            contexts: RelSource::Inline(Self::pairs(q.context_map())),
        }));
        Ok(())
    }

    pub fn functor(&mut self, source: &str, target: &str, f: &TcFunctor) -> Result<()> {
        let mut maps = Vec::new();
        for (from, to, map) in [
            (f.source.targets(), f.target.targets(), &f.target_map),
            (f.source.contexts(), f.target.contexts(), &f.context_map),
        ] {
            let from_name = self.set(from)?.remove(0);
            let to_name = self.set(to)?.remove(0);
            let pairs = map
                .iter()
                .enumerate()
                .filter_map(|(i, y)| {
                    y.map(|y| Pair {
                        from: ElemRef::single(from.label(i)),
                        to: ElemRef::single(to.label(y)),
                    })
                })
                .collect();
            maps.push(ObjectMap {
                from: name(from_name),
                to: name(to_name),
                pairs,
            });
        }
        self.doc.blocks.push(Block::Functor(FunctorDecl {
            name: name(f.name.as_str()),
            source: name(source),
            target: name(target),
            maps,
        }));
        Ok(())
    }

    pub fn check(&mut self, check_name: &str, words: &[&str]) {
        self.doc.blocks.push(Block::Check(CheckDecl {
            name: name(check_name),
            words: words.iter().map(|w| name(*w)).collect(),
        }));
    }
}
