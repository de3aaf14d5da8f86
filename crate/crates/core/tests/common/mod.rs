//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use fixedbitset::FixedBitSet;
use univsim::{Ambient, Simulator, TccInstance};

/// Every subset of `0..n` as a bit row.
pub fn subsets(n: usize) -> Vec<FixedBitSet> {
    (0u64..1 << n)
        .map(|mask| {
            let mut row = FixedBitSet::with_capacity(n);
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    row.insert(i);
                }
            }
            row
        })
        .collect()
}

/// Whether a single raw row of a processing is admissible on its own:
/// of the form `{x} × S`, sized for the ambient, weakly below its input.
fn raw_row_ok(row: &FixedBitSet, t: usize, c: usize, inst: &TccInstance) -> Option<Option<usize>> {
    let nc = inst.contexts().len();
    let xs: Vec<usize> = row.ones().map(|k| k / nc).collect();
    let x = xs.first().copied();
    if xs.iter().any(|&y| Some(y) != x) {
        return None;
    }
    let size = row.count_ones(..);
    match inst.ambient() {
        Ambient::Relations => {}
        Ambient::PartialFunctions if size > 1 => return None,
        Ambient::Functions if size != 1 => return None,
        _ => {}
    }
    let mu = inst.eval().image_of_set(row);
    inst.order()
        .imitates_sets(inst.eval_at(t, c), &mu)
        .then_some(x)
}

/// Existence of a morphism `a → b` by enumerating every reduction and every
/// raw processing, without any decomposition.
pub fn brute_morphism_exists(a: &Simulator, b: &Simulator, inst: &TccInstance) -> bool {
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let npairs = nt * nc;
    let np = b.programs().len();
    let rows_per_p = nt * nc;
    let all_rows = subsets(npairs);
    // Rows admissible at each (t, c), with their target.
    let admissible: Vec<Vec<(usize, Option<usize>)>> = (0..rows_per_p)
        .map(|k| {
            let (t, c) = (k / nc, k % nc);
            all_rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| raw_row_ok(r, t, c, inst).map(|x| (i, x)))
                .collect()
        })
        .collect();
    let mut r_options: Vec<Option<usize>> = a.programs().iter().map(Some).collect();
    if inst.ambient() != Ambient::Functions {
        r_options.insert(0, None);
    }
    let empty = FixedBitSet::with_capacity(npairs);
    let total_r = r_options.len().pow(np as u32);
    for r_code in 0..total_r {
        let r: Vec<Option<usize>> = (0..np)
            .map(|i| r_options[r_code / r_options.len().pow(i as u32) % r_options.len()])
            .collect();
        let total_q: usize = admissible
            .iter()
            .map(Vec::len)
            .product::<usize>()
            .pow(np as u32);
        'q: for q_code in 0..total_q {
            let mut code = q_code;
            let mut q: Vec<&FixedBitSet> = Vec::with_capacity(np * rows_per_p);
            for _ in 0..np {
                for opts in &admissible {
                    q.push(&all_rows[opts[code % opts.len()].0]);
                    code /= opts.len();
                }
            }
            // A common target per (p, t).
            for p in 0..np {
                for t in 0..nt {
                    let mut target = None;
                    for c in 0..nc {
                        let row = q[p * rows_per_p + t * nc + c];
                        if let Some(k) = row.ones().next() {
                            if target.is_some_and(|x| x != k / nc) {
                                continue 'q;
                            }
                            target = Some(k / nc);
                        }
                    }
                }
            }
            for p in 0..np {
                for c in 0..nc {
                    let mut produced = FixedBitSet::with_capacity(npairs);
                    let input = match r[p] {
                        Some(pa) => a.at(pa, c, nc),
                        None => &empty,
                    };
                    for x in input.ones() {
                        produced.union_with(q[p * rows_per_p + x]);
                    }
                    if &produced != b.at(p, c, nc) {
                        continue 'q;
                    }
                }
            }
            return true;
        }
    }
    false
}
