mod common;

use proptest::prelude::*;
use univsim::dsl::{self, Block, Document, ElemRef, Pair, RelDecl, SetDecl, Spanned};
use univsim::finrel::diagram::Diagram;
use univsim::finrel::{compose, tensor, FinRel, FinSet, RelSpace};
use univsim::instances::spin::{int, ising, SimplicialComplex};
use univsim::sample;
use univsim::simcat::{decide_parsimony, Parsimony};
use univsim::simulator::{
    check_reduction, context_reduces, find_universality_witness, state_rel, Flavor, Reduction,
};
use univsim::{imitates, Ambient, Meter, Preorder, Simulator};

fn rel_strategy(max_dom: usize, max_cod: usize) -> impl Strategy<Value = FinRel> {
    (0..=max_dom, 0..=max_cod).prop_flat_map(|(n, m)| {
        prop::collection::vec(any::<bool>(), n * m).prop_map(move |bits| {
            let a = FinSet::numbered("A", "a", n);
            let b = FinSet::numbered("B", "b", m);
            let pairs = bits
                .iter()
                .enumerate()
                .filter(|(_, &x)| x)
                .map(|(k, _)| (k / m, k % m));
            FinRel::from_pairs(&a, &b, pairs).unwrap()
        })
    })
}

/// Three composable relations `A → B → C → D`.
fn chain_strategy() -> impl Strategy<Value = (FinRel, FinRel, FinRel)> {
    (1..=3usize, 1..=3usize, 1..=3usize, 1..=3usize, any::<u64>()).prop_map(|(a, b, c, d, seed)| {
        let mut rng = sample::rng(seed);
        let sa = FinSet::numbered("A", "a", a);
        let sb = FinSet::numbered("B", "b", b);
        let sc = FinSet::numbered("C", "c", c);
        let sd = FinSet::numbered("D", "d", d);
        (
            sample::any_rel(&mut rng, &sa, &sb),
            sample::any_rel(&mut rng, &sb, &sc),
            sample::any_rel(&mut rng, &sc, &sd),
        )
    })
}

/// `f` kept on the domain of `g`, arbitrary elsewhere: `f ⊒ g` by construction.
fn extend(rng: &mut sample::SampleRng, g: &FinRel) -> FinRel {
    let noise = sample::any_rel(rng, g.dom(), g.cod());
    FinRel::from_row_fn(g.dom(), g.cod(), |a| {
        if g.row(a).is_clear() {
            noise.row(a).clone()
        } else {
            g.row(a).clone()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_relation_is_normalized_with_functional_domain(f in rel_strategy(5, 5)) {
        prop_assert!(f.is_normalized());
        prop_assert!(f.domain().is_functional());
        prop_assert_eq!(compose(&f, &f.domain()).unwrap(), f);
    }

    #[test]
    fn restriction_is_a_preorder(seed in any::<u64>(), n in 1..=4usize, m in 1..=4usize) {
        let mut rng = sample::rng(seed);
        let a = FinSet::numbered("A", "a", n);
        let b = FinSet::numbered("B", "b", m);
        let h = sample::any_rel(&mut rng, &a, &b);
        let g = extend(&mut rng, &h);
        let f = extend(&mut rng, &g);
        prop_assert!(h.restricts_to(&h).unwrap());
        prop_assert!(g.restricts_to(&h).unwrap() && f.restricts_to(&g).unwrap());
        prop_assert!(f.restricts_to(&h).unwrap());
    }

    #[test]
    fn deterministic_relations_compose(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = sample::set(&mut rng, "A", 0, 4);
        let b = sample::set(&mut rng, "B", 1, 4);
        let c = sample::set(&mut rng, "C", 1, 4);
        let f = sample::rel(&mut rng, &a, &b, RelSpace::Deterministic, 0.5);
        let g = sample::rel(&mut rng, &b, &c, RelSpace::Deterministic, 0.5);
        prop_assert!(compose(&g, &f).unwrap().is_deterministic());
    }

    #[test]
    fn diagram_evaluation_is_associative((f, g, h) in chain_strategy()) {
        let flat = Diagram::Seq(vec![Diagram::Box(f.clone()), Diagram::Box(g.clone()), Diagram::Box(h.clone())]);
        let left = Diagram::Seq(vec![Diagram::Seq(vec![Diagram::Box(f.clone()), Diagram::Box(g.clone())]), Diagram::Box(h.clone())]);
        let right = Diagram::Seq(vec![Diagram::Box(f), Diagram::Seq(vec![Diagram::Box(g), Diagram::Box(h)])]);
        let v = flat.eval().unwrap();
        prop_assert_eq!(&left.eval().unwrap(), &v);
        prop_assert_eq!(&right.eval().unwrap(), &v);
    }

    #[test]
    fn diagram_evaluation_respects_interchange((f, g, _) in chain_strategy(), (f2, g2, _) in chain_strategy()) {
        let seq_of_par = Diagram::Seq(vec![
            Diagram::Par(vec![Diagram::Box(f.clone()), Diagram::Box(f2.clone())]),
            Diagram::Par(vec![Diagram::Box(g.clone()), Diagram::Box(g2.clone())]),
        ]);
        let par_of_seq = Diagram::Par(vec![
            Diagram::Seq(vec![Diagram::Box(f.clone()), Diagram::Box(g.clone())]),
            Diagram::Seq(vec![Diagram::Box(f2.clone()), Diagram::Box(g2.clone())]),
        ]);
        prop_assert_eq!(seq_of_par.eval().unwrap(), par_of_seq.eval().unwrap());
        let direct = tensor(&compose(&g, &f).unwrap(), &compose(&g2, &f2).unwrap());
        prop_assert_eq!(par_of_seq.eval().unwrap(), direct);
    }

    #[test]
    fn imitation_is_a_preorder(seed in any::<u64>(), n in 1..=3usize, m in 1..=3usize) {
        let mut rng = sample::rng(seed);
        let a = FinSet::numbered("A", "a", n);
        let x = FinSet::numbered("X", "x", m);
        let order = sample::preorder(&mut rng, &x, 0.4);
        let h = sample::any_rel(&mut rng, &a, &x);
        prop_assert!(imitates(&h, &h, &order).unwrap());
        let rels: Vec<FinRel> = (0..6).map(|_| sample::any_rel(&mut rng, &a, &x)).collect();
        for f in &rels {
            for g in &rels {
                for k in &rels {
                    if imitates(f, g, &order).unwrap() && imitates(g, k, &order).unwrap() {
                        prop_assert!(imitates(f, k, &order).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn imitation_under_equality_is_restriction(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = sample::set(&mut rng, "A", 1, 4);
        let x = sample::set(&mut rng, "X", 1, 3);
        let eq = Preorder::equality(&x);
        let mu = sample::any_rel(&mut rng, &a, &x);
        let nu = if rng_bool(seed) { extend(&mut rng, &mu) } else { sample::any_rel(&mut rng, &a, &x) };
        prop_assert_eq!(imitates(&nu, &mu, &eq).unwrap(), nu.restricts_to(&mu).unwrap());
    }

    #[test]
    fn functional_precomposition_preserves_imitation(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let inst = sample::instance(&mut rng, "i", 3, 2, 3, false);
        let a = sample::set(&mut rng, "A", 1, 3);
        let z = sample::set(&mut rng, "Z", 1, 3);
        let g = sample::any_rel(&mut rng, &a, inst.pairs());
        let f = extend(&mut rng, &g);
        prop_assert!(inst.ambient_imitates(&f, &g).unwrap());
        let h = sample::rel(&mut rng, &z, &a, RelSpace::Functional, 0.7);
        prop_assert!(inst.ambient_imitates(&compose(&f, &h).unwrap(), &compose(&g, &h).unwrap()).unwrap());
    }

    #[test]
    fn trivial_simulator_is_universal(seed in any::<u64>(), k in 0..3usize) {
        let mut rng = sample::rng(seed);
        let inst = sample::instance(&mut rng, "i", 4, 3, 3, seed % 2 == 0).with_ambient(Ambient::ALL[k]);
        let s = Simulator::trivial(&inst);
        let r = find_universality_witness(&s, &inst, &mut Meter::default()).unwrap();
        prop_assert!(r.is_some());
        prop_assert!(check_reduction(&r.unwrap(), &s, &s, &inst).unwrap());
    }

    #[test]
    fn universality_witness_reduces_every_state(seed in any::<u64>(), k in 0..3usize) {
        let mut rng = sample::rng(seed);
        let inst = sample::instance(&mut rng, "i", 3, 2, 2, false).with_ambient(Ambient::ALL[k]);
        let s = sample::simulator(&mut rng, "s", &inst, 3);
        if let Some(r) = find_universality_witness(&s, &inst, &mut Meter::default()).unwrap() {
            for t in inst.targets().iter() {
                let state = state_rel(&inst, Some(t));
                let routed = compose(s.compiler(), &compose(&r.map, &state).unwrap()).unwrap();
                let c = context_reduces(&routed, &state, &inst, Flavor::Lax, None, None, &mut Meter::default()).unwrap();
                prop_assert!(c.holds, "target {}", inst.targets().label(t));
            }
        }
    }

    #[test]
    fn strict_reductions_are_lax(seed in any::<u64>(), k in 0..3usize) {
        let mut rng = sample::rng(seed);
        let inst = sample::instance(&mut rng, "i", 3, 2, 2, false).with_ambient(Ambient::ALL[k]);
        let s = sample::simulator(&mut rng, "s", &inst, 2);
        let t = sample::simulator(&mut rng, "t", &inst, 2);
        let choices: Vec<Option<usize>> = (0..2).map(|_| Some(rng_index(&mut rng, 2))).collect();
        let strict = Reduction::from_choices(t.programs(), s.programs(), &choices, Flavor::Strict);
        let lax = Reduction::from_choices(t.programs(), s.programs(), &choices, Flavor::Lax);
        if check_reduction(&strict, &s, &t, &inst).unwrap() {
            prop_assert!(check_reduction(&lax, &s, &t, &inst).unwrap());
        }
    }

    #[test]
    fn none_exists_agrees_with_brute_force(seed in any::<u64>(), k in 0..3usize) {
        let mut rng = sample::rng(seed);
        let inst = sample::instance(&mut rng, "i", 2, 2, 2, seed % 2 == 0).with_ambient(Ambient::ALL[k]);
        let a = sample::simulator(&mut rng, "a", &inst, 2);
        let b = sample::simulator(&mut rng, "b", &inst, 1);
        let decided = decide_parsimony(&a, &b, &inst, &mut Meter::default()).unwrap();
        let brute = common::brute_morphism_exists(&a, &b, &inst);
        prop_assert_eq!(matches!(decided, Parsimony::Found { .. }), brute);
    }

    #[test]
    fn ising_spectrum_is_invariant_under_reflection(j in prop::collection::vec(-2i64..=2, 2), b in prop::collection::vec(-2i64..=2, 3)) {
        // The path v0 - v1 - v2 and its reflection.
        let v = FinSet::numbered("V", "v", 3);
        let path = SimplicialComplex::new(v, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let couplings: Vec<_> = j.iter().map(|&x| int(x)).collect();
        let fields: Vec<_> = b.iter().map(|&x| int(x)).collect();
        let sys = ising("path", path, &couplings, &fields, int(10)).unwrap();
        let flipped = sys.permuted(&[2, 1, 0]).unwrap();
        let mut m = Meter::default();
        prop_assert_eq!(sys.spectrum(&mut m).unwrap(), flipped.spectrum(&mut m).unwrap());
    }

    #[test]
    fn canonical_text_round_trips(doc in document_strategy()) {
        let text = dsl::to_text(&doc);
        let parsed = dsl::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(dsl::to_text(&parsed), text);
    }
}

fn rng_bool(seed: u64) -> bool {
    !seed.is_multiple_of(3)
}

fn rng_index(rng: &mut sample::SampleRng, n: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..n)
}

fn label_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9_.']{0,5}",
        "[a-z ]{1,6}",
        "-?[0-9]{1,3}",
        "[0-9]{1,2}/[1-9]",
        "\"?[a-z]{0,3}\\\\?",
    ]
}

fn document_strategy() -> impl Strategy<Value = Document> {
    prop::collection::btree_set(label_strategy(), 1..5).prop_flat_map(|labels| {
        let labels: Vec<String> = labels.into_iter().collect();
        let n = labels.len();
        prop::collection::vec((0..n, 0..n), 0..6).prop_map(move |pairs| {
            let set = Block::Set(SetDecl {
                name: Spanned::bare("S".to_string()),
                elements: labels.iter().cloned().map(Spanned::bare).collect(),
            });
            let rel = Block::Rel(RelDecl {
                name: Spanned::bare("r".to_string()),
                dom: vec![Spanned::bare("S".to_string())],
                cod: vec![Spanned::bare("S".to_string())],
                pairs: pairs
                    .iter()
                    .map(|&(a, b)| Pair {
                        from: ElemRef::single(labels[a].clone()),
                        to: ElemRef::single(labels[b].clone()),
                    })
                    .collect(),
            });
            Document {
                blocks: vec![set, rel],
            }
        })
    })
}
