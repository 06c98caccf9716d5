use meteor_core::dynamics::{moves_to_chain, verify_chain};
use meteor_core::gen::{random_meteor, random_valid_move, random_walk};
use meteor_core::meteor::{canonical_graph, canonicalize, equivalent, normalize, quasi_normalize, recognize, witness, witness_verify};
use meteor_core::moves::replay;
use meteor_core::talented::{talented_equal, transport, TalentedElement};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn moves_preserve_profile() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 300 {
        let g = random_meteor(&mut rng, 10);
        let Some((h, _)) = random_valid_move(&mut rng, &g) else { continue };
        let (a, b) = (recognize(&g).unwrap(), recognize(&h).unwrap());
        assert_eq!(a.profile(), b.profile());
        checked += 1;
    }
}

#[test]
fn normal_and_canonical_forms() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..150 {
        let g = random_meteor(&mut rng, 10);
        let (n, moves) = normalize(&g).unwrap();
        assert_eq!(replay(&g, &moves).unwrap(), n);
        let m = recognize(&n).unwrap();
        assert!(m.is_normal());
        assert_eq!(m.profile(), recognize(&g).unwrap().profile());
        let c = canonicalize(&g).unwrap();
        assert_eq!(replay(&g, &c.moves).unwrap(), c.graph);
        assert!(c.graph.is_isomorphic(&canonical_graph(&c.profile)).is_some());
    }
}

#[test]
fn witnesses_replay() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..80 {
        let g = random_meteor(&mut rng, 8);
        let (h, _) = random_walk(&mut rng, &g, 4);
        assert!(equivalent(&g, &h).unwrap());
        let w = witness(&g, &h).unwrap().expect("equivalent graphs have witnesses");
        witness_verify(&g, &h, &w).unwrap();
        let chain = moves_to_chain(&g, &w.moves).unwrap();
        assert!(verify_chain(&g.adjacency_matrix(), &replay(&g, &w.moves).unwrap().adjacency_matrix(), &chain));
    }
}

#[test]
fn quasi_normal_keeps_order_unit() {
    let mut rng = StdRng::seed_from_u64(14);
    let mut done = 0;
    while done < 40 {
        let g = random_meteor(&mut rng, 9);
        let m = recognize(&g).unwrap();
        if m.interior().iter().any(|&u| g.in_degree(u) != 1) {
            continue;
        }
        let (q, moves) = quasi_normalize(&g).unwrap();
        assert!(recognize(&q).unwrap().is_quasi_normal());
        let mut cur = g.clone();
        let mut unit = TalentedElement::unit(&g, 0);
        for rec in &moves {
            let (next, _) = meteor_core::moves::apply(&cur, rec).unwrap();
            unit = transport(&cur, &next, rec, &unit);
            cur = next;
        }
        let mq = recognize(&q).unwrap();
        assert!(talented_equal(&mq, &unit, &TalentedElement::unit(&q, 0)).unwrap());
        done += 1;
    }
}
