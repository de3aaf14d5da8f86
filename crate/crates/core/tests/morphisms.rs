mod common;

use univsim::sample;
use univsim::simcat::{compose_morphisms, morphism_to_lax_reduction, search_morphism, SimMorphism};
use univsim::{Ambient, Meter};

#[test]
fn exact_search_agrees_with_brute_force() {
    let mut rng = sample::rng(11);
    let mut found = 0;
    for round in 0..240 {
        let ambient = Ambient::ALL[round % 3];
        let inst =
            sample::instance(&mut rng, "rand", 2, 2, 2, round % 2 == 0).with_ambient(ambient);
        let a = sample::simulator(&mut rng, "a", &inst, 2);
        let b = sample::simulator(&mut rng, "b", &inst, 1);
        let fast = search_morphism(&a, &b, &inst, &mut Meter::default()).unwrap();
        let slow = common::brute_morphism_exists(&a, &b, &inst);
        assert_eq!(
            fast.is_some(),
            slow,
            "round {round}: {inst:?}\n{a:?}\n{b:?}"
        );
        if let Some(m) = fast {
            found += 1;
            morphism_to_lax_reduction(&m, &inst).unwrap();
        }
    }
    assert!(found > 20, "only {found} positive cases");
}

#[test]
fn composition_is_associative_with_identities() {
    let mut rng = sample::rng(5);
    let mut composed = 0;
    for round in 0..300 {
        let ambient = Ambient::ALL[round % 3];
        let inst = sample::instance(&mut rng, "rand", 2, 2, 2, false).with_ambient(ambient);
        let s: Vec<_> = (0..4)
            .map(|i| sample::simulator(&mut rng, &format!("s{i}"), &inst, 1 + i % 2))
            .collect();
        let mut meter = Meter::default();
        let m1 = search_morphism(&s[0], &s[1], &inst, &mut meter).unwrap();
        let m2 = search_morphism(&s[1], &s[2], &inst, &mut meter).unwrap();
        let m3 = search_morphism(&s[2], &s[3], &inst, &mut meter).unwrap();
        if let Some(m1) = &m1 {
            let id0 = SimMorphism::identity(&s[0], &inst);
            let id1 = SimMorphism::identity(&s[1], &inst);
            let left = compose_morphisms(&id1, m1, &inst).unwrap();
            let right = compose_morphisms(m1, &id0, &inst).unwrap();
            assert_eq!(left.reduction, m1.reduction);
            assert_eq!(right.reduction, m1.reduction);
            assert_eq!(left.processing.assembled(), right.processing.assembled());
        }
        if let (Some(m1), Some(m2), Some(m3)) = (m1, m2, m3) {
            let a = compose_morphisms(&m3, &compose_morphisms(&m2, &m1, &inst).unwrap(), &inst)
                .unwrap();
            let b = compose_morphisms(&compose_morphisms(&m3, &m2, &inst).unwrap(), &m1, &inst)
                .unwrap();
            assert_eq!(a.reduction, b.reduction);
            assert_eq!(a.processing.assembled(), b.processing.assembled());
            composed += 1;
        }
    }
    assert!(composed > 0);
}
