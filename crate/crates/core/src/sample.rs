//! Seeded random sets, relations, preorders and instances for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::finrel::{empty_row, FinRel, FinSet, RelSpace};
use crate::order::Preorder;
use crate::simulator::Simulator;
use crate::tcc::{Ambient, TccInstance};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A set `{prefix0, ...}` with between `min` and `max` elements.
pub fn set(rng: &mut SampleRng, id: &str, min: usize, max: usize) -> FinSet {
    let n = rng.random_range(min..=max);
    let prefix = id.to_lowercase();
    FinSet::numbered(id, &prefix, n)
}

/// A relation in `space`; for `All`, each pair is present with probability `density`.
pub fn rel(
    rng: &mut SampleRng,
    dom: &FinSet,
    cod: &FinSet,
    space: RelSpace,
    density: f64,
) -> FinRel {
    let m = cod.len();
    FinRel::from_row_fn(dom, cod, |_| {
        let mut row = empty_row(m);
        match space {
            RelSpace::All => {
                for x in 0..m {
                    if rng.random_bool(density) {
                        row.insert(x);
                    }
                }
            }
            RelSpace::Functional => {
                if m > 0 && rng.random_bool(density.max(0.5)) {
                    row.insert(rng.random_range(0..m));
                }
            }
            RelSpace::Deterministic => {
                if m > 0 {
                    row.insert(rng.random_range(0..m));
                }
            }
        }
        row
    })
}

/// A relation drawn from a randomly chosen space, so that all classes occur.
pub fn any_rel(rng: &mut SampleRng, dom: &FinSet, cod: &FinSet) -> FinRel {
    let space =
        [RelSpace::All, RelSpace::Functional, RelSpace::Deterministic][rng.random_range(0..3)];
    let density = rng.random_range(0.1..0.7);
    rel(rng, dom, cod, space, density)
}

/// Closure of random edges, each ordered pair present with probability `p`.
pub fn preorder(rng: &mut SampleRng, carrier: &FinSet, p: f64) -> Preorder {
    let n = carrier.len();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && rng.random_bool(p) {
                edges.push((x, y));
            }
        }
    }
    Preorder::closure(carrier, &edges).expect("edges in range")
}

/// A random instance with partial evaluation.
pub fn instance(
    rng: &mut SampleRng,
    name: &str,
    max_t: usize,
    max_c: usize,
    max_b: usize,
    equality: bool,
) -> TccInstance {
    let t = set(rng, "T", 1, max_t);
    let c = set(rng, "C", 1, max_c);
    let b = set(rng, "B", 1, max_b);
    let order = if equality {
        Preorder::equality(&b)
    } else {
        preorder(rng, &b, 0.3)
    };
    let nb = b.len();
    let table: Vec<Option<usize>> = (0..t.len() * c.len())
        .map(|_| {
            if rng.random_bool(0.8) {
                Some(rng.random_range(0..nb))
            } else {
                None
            }
        })
        .collect();
    let nc = c.len();
    TccInstance::from_table(name, &t, &c, order, Ambient::Relations, |ti, ci| {
        table[ti * nc + ci]
    })
    .expect("random table is well typed")
}

/// A random simulator valid for the ambient of `inst`.
pub fn simulator(
    rng: &mut SampleRng,
    name: &str,
    inst: &TccInstance,
    programs: usize,
) -> Simulator {
    let p = FinSet::numbered("P", "p", programs);
    let space = inst.ambient().space();
    let compiler_space = inst.ambient().functional_space();
    let compiler = rel(rng, &p, inst.targets(), compiler_space, 0.8);
    let pc = FinSet::product(&p, inst.contexts());
    let nc = inst.contexts().len();
    let mut context = rel(rng, &pc, inst.contexts(), space, 0.4);
    for pi in 0..programs {
        let defined = compiler.value(pi).is_some();
        let rows = pi * nc..(pi + 1) * nc;
        if !defined {
            for k in rows {
                context = context_without_row(&context, k);
            }
        } else if nc > 0 && rows.clone().all(|k| context.row(k).is_clear()) {
            let c = rng.random_range(0..nc);
            context.insert(pi * nc + c, rng.random_range(0..nc));
        }
    }
    Simulator::new(name, compiler, context, inst).expect("sampled simulator is valid")
}

fn context_without_row(f: &FinRel, k: usize) -> FinRel {
    FinRel::from_row_fn(f.dom(), f.cod(), |i| {
        if i == k {
            empty_row(f.cod().len())
        } else {
            f.row(i).clone()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = FinSet::numbered("A", "a", 3);
        let b = FinSet::numbered("B", "b", 4);
        let f = rel(&mut rng(7), &a, &b, RelSpace::All, 0.4);
        let g = rel(&mut rng(7), &a, &b, RelSpace::All, 0.4);
        assert_eq!(f, g);
    }

    #[test]
    fn spaces_are_respected() {
        let mut r = rng(1);
        let a = FinSet::numbered("A", "a", 5);
        let b = FinSet::numbered("B", "b", 3);
        for _ in 0..50 {
            assert!(rel(&mut r, &a, &b, RelSpace::Functional, 0.5).is_functional());
            assert!(rel(&mut r, &a, &b, RelSpace::Deterministic, 0.5).is_deterministic());
        }
    }
}
