//! Acceptance suite: one line per criterion, then a single assertion.
//!
//! Run with `cargo test -p meteor-core --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use meteor_core::exec::Parallelism;
use meteor_core::monoid::{monoid_equal_with, Verdict};
use meteor_core::dynamics::{chain_to_se, move_to_matrices, verify_chain};
use meteor_core::gen::{random_graph, random_meteor, random_talented, random_valid_move, random_walk};
use meteor_core::graph::{Graph, VertexId};
use meteor_core::meteor::{build, equivalent, lcm, recognize, witness, witness_verify, worked_example};
use meteor_core::moves::{apply, replay};
use meteor_core::talented::{
    archimedean_class, covering_graph, covering_projection, is_closure_of_sinks_and_cycles, leaf_set, one_step, talented_flow_step,
    TalentedElement, VWContext,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let res = f();
    let took = start.elapsed();
    match res {
        Err(e) => Outcome { pass: false, detail: format!("{e} ({took:.2?})") },
        Ok(msg) => match limit {
            Some(l) if took > l => Outcome { pass: false, detail: format!("{msg}; took {took:.2?}, limit {l:?}") },
            _ => Outcome { pass: true, detail: format!("{msg} ({took:.2?})") },
        },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1() -> Result<String, String> {
    let g = worked_example();
    let m = recognize(&g).map_err(|e| e.to_string())?;
    let n = |s: &str| g.vertex_by_name(s).unwrap();
    let m = m.with_basepoints(n("a1"), n("b1")).ok_or("basepoints")?;
    ensure(m.p() == 6 && m.q() == 4 && m.period() == 2, || "cycle lengths".into())?;
    let counts = m.raw_counts(m.v(), m.w());
    ensure(counts == vec![3, 4], || format!("raw counts {counts:?}"))?;
    let ds = m.through_lengths();
    ensure(ds == vec![2, 3, 3, 3, 4, 4, 5], || format!("through-lengths {ds:?}"))?;
    Ok(format!("period 2, N = {counts:?}, through-lengths {ds:?}"))
}

fn c2() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0xC2);
    let mut checked = 0;
    while checked < 250 {
        let g = random_meteor(&mut rng, 10);
        let Some((h, rec)) = random_valid_move(&mut rng, &g) else { continue };
        let a = recognize(&g).map_err(|e| e.to_string())?;
        let b = recognize(&h).map_err(|e| format!("move {:?} broke the meteor shape: {e}", rec.kind))?;
        ensure(a.p() == b.p() && a.q() == b.q(), || "cycle lengths changed".into())?;
        ensure(a.profile() == b.profile(), || format!("profile changed under {:?}", rec.kind))?;
        checked += 1;
    }
    Ok(format!("{checked} (graph, move) pairs"))
}

fn c3() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0xC3);
    let mut total_moves = 0;
    for i in 0..60 {
        let g = random_meteor(&mut rng, 8);
        let (h, _) = random_walk(&mut rng, &g, 4);
        let w = witness(&g, &h).map_err(|e| format!("pair {i}: {e}"))?.ok_or(format!("pair {i}: no witness"))?;
        let end = replay(&g, &w.moves).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(meteor_core::graph::is_isomorphism(&end, &h, &w.isomorphism), || format!("pair {i}: not isomorphic"))?;
        total_moves += w.moves.len();
    }
    Ok(format!("60 pairs, {total_moves} moves replayed"))
}

fn c4() -> Result<String, String> {
    let x = build(2, 2, &[(0, 0, 0), (0, 0, 0)]);
    let y = build(2, 2, &[(0, 0, 0), (0, 1, 0)]);
    let cx = recognize(&x).unwrap().raw_counts(VertexId(0), VertexId(2));
    let cy = recognize(&y).unwrap().raw_counts(VertexId(0), VertexId(2));
    ensure(cx == vec![0, 2] && cy == vec![1, 1], || format!("counts {cx:?} / {cy:?}"))?;
    ensure(!equivalent(&x, &y).unwrap(), || "(0,2) vs (1,1) reported equivalent".into())?;
    ensure(witness(&x, &y).map_err(|e| e.to_string())?.is_none(), || "witness for inequivalent pair".into())?;
    let a = build(2, 2, &[(0, 0, 0)]);
    let b = build(2, 2, &[(0, 1, 0)]);
    ensure(equivalent(&a, &b).unwrap(), || "length 1 vs 2 reported inequivalent".into())?;
    let w = witness(&a, &b).map_err(|e| e.to_string())?.ok_or("no witness")?;
    witness_verify(&a, &b, &w).map_err(|e| e.to_string())?;
    Ok(format!("(0,2) vs (1,1) inequivalent; length 1 vs 2 equivalent, {}-move witness verified", w.moves.len()))
}

fn subsets(g: &Graph) -> Vec<BTreeSet<VertexId>> {
    let vs = g.vertices();
    (0..1u32 << vs.len())
        .map(|mask| vs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
        .collect()
}

fn c5() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0xC5);
    let mut sets = 0;
    for gi in 0..30 {
        let n = rng.gen_range(1..=6);
        let g = random_graph(&mut rng, n, 2 * n as usize);
        let all = subsets(&g);
        let leaves: Vec<BTreeSet<VertexId>> = all.iter().map(|a| leaf_set(&g, a)).collect();
        let image: BTreeSet<&BTreeSet<VertexId>> = leaves.iter().collect();
        for (i, b) in all.iter().enumerate() {
            let in_image = image.contains(b);
            let arrow = one_step(&g, b) == *b;
            let closure = is_closure_of_sinks_and_cycles(&g, b);
            let fixed = leaves[i] == *b;
            ensure(in_image == arrow && arrow == closure && closure == fixed, || {
                format!("graph {gi}, B = {b:?}: image {in_image}, arrow {arrow}, closure {closure}, fixed {fixed}")
            })?;
            for (j, c) in all.iter().enumerate() {
                let u: BTreeSet<VertexId> = b.union(c).copied().collect();
                let lhs = leaf_set(&g, &u);
                let rhs: BTreeSet<VertexId> = leaves[i].union(&leaves[j]).copied().collect();
                ensure(lhs == rhs, || format!("graph {gi}: R(A ∪ B) ≠ R(A) ∪ R(B)"))?;
            }
            sets += 1;
        }
    }
    Ok(format!("30 graphs, {sets} subsets, all pairs checked for unions"))
}

fn c6() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0xC6);
    let mut seen = BTreeSet::new();
    for _ in 0..60 {
        let g = random_meteor(&mut rng, 10);
        let m = recognize(&g).unwrap();
        let all: BTreeSet<VertexId> = g.vertices().iter().copied().collect();
        let sink: BTreeSet<VertexId> = m.sink_cycle().vertices.iter().copied().collect();
        for _ in 0..25 {
            let x = random_talented(&mut rng, &g, 4);
            let class = archimedean_class(&g, &x);
            let kind = if class.is_empty() {
                "empty"
            } else if class == sink {
                "sink cycle"
            } else if class == all {
                "all vertices"
            } else {
                return Err(format!("class {class:?} of {x} is none of the three"));
            };
            seen.insert(kind);
        }
        ensure(archimedean_class(&g, &TalentedElement::zero()).is_empty(), || "zero class".into())?;
    }
    Ok(format!("60 graphs x 25 elements, classes seen: {seen:?}"))
}

/// Confirms `x = y` by pushing both into a common top layer of the covering
/// graph; `None` if no layer up to the bound agrees.
fn window_equal(g: &Graph, x: &TalentedElement, y: &TalentedElement, extra: i64) -> Result<bool, String> {
    let top = x.shift_range().map_or(0, |r| r.1).max(y.shift_range().map_or(0, |r| r.1));
    for hi in top..=top + extra {
        let a = covering_projection(g, x, hi).map_err(|e| e.to_string())?;
        let b = covering_projection(g, y, hi).map_err(|e| e.to_string())?;
        if a == b {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Breadth-first flow search in the covering window one layer above the
/// highest shift; only an `Equal` outcome is conclusive for `T_E`.
fn confluence_equal(g: &Graph, x: &TalentedElement, y: &TalentedElement) -> Result<bool, String> {
    let lo = x.shift_range().unwrap().0.min(y.shift_range().unwrap().0);
    let hi = x.shift_range().unwrap().1.max(y.shift_range().unwrap().1) + 1;
    let cov = covering_graph(g, lo, hi).map_err(|e| e.to_string())?;
    let (a, b) = (cov.lift(x).map_err(|e| e.to_string())?, cov.lift(y).map_err(|e| e.to_string())?);
    Ok(monoid_equal_with(&cov.graph, &a, &b, 6, 5_000, Parallelism::Sequential) == Verdict::Equal)
}

fn c7() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0xC7);
    let (mut eq_pairs, mut ne_pairs, mut undecided) = (0, 0, 0);
    for gi in 0..60 {
        let g = random_meteor(&mut rng, 8);
        let m = recognize(&g).unwrap();
        let ctx = VWContext::new(&m).map_err(|e| e.to_string())?;
        let extra = 2 * (g.vertex_count() + lcm(m.p(), m.q())) as i64 + 4;
        for _ in 0..12 {
            let x = random_talented(&mut rng, &g, 3);
            // half the partners are derived by flowing, half are random
            let y = if rng.gen_bool(0.5) {
                let mut y = x.clone();
                for _ in 0..rng.gen_range(1..=4) {
                    let sites: Vec<(VertexId, i64)> = y.terms().map(|(k, _)| k).collect();
                    let at = sites[rng.gen_range(0..sites.len())];
                    y = talented_flow_step(&g, &y, at).map_err(|e| e.to_string())?;
                }
                y
            } else {
                random_talented(&mut rng, &g, 3)
            };
            let exact = ctx.equal(&x, &y).map_err(|e| e.to_string())?;
            let window = window_equal(&g, &x, &y, extra)?;
            if confluence_equal(&g, &x, &y)? && !exact {
                return Err(format!("graph {gi}: confluence search joins {x} and {y}, canonical forms disagree"));
            }
            if window && !exact {
                return Err(format!("graph {gi}: window search proves {x} = {y}, canonical forms disagree"));
            }
            if exact && !window {
                undecided += 1;
            }
            if exact {
                eq_pairs += 1;
            } else {
                ne_pairs += 1;
            }
        }
    }
    ensure(undecided == 0, || format!("{undecided} equal pairs not confirmed within the window bound"))?;
    Ok(format!("{eq_pairs} equal and {ne_pairs} unequal pairs, no contradiction"))
}

fn c8() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0xC8);
    let mut pairs = 0;
    for i in 0..30 {
        let g = random_meteor(&mut rng, 7);
        let (h, _) = random_walk(&mut rng, &g, 3);
        let w = witness(&g, &h).map_err(|e| e.to_string())?.ok_or("no witness")?;
        let mut cur = g.clone();
        let mut chain = Vec::new();
        for (k, rec) in w.moves.iter().enumerate() {
            let (next, _) = apply(&cur, rec).map_err(|e| e.to_string())?;
            let pair = move_to_matrices(rec, &cur, &next).map_err(|e| format!("pair {i}, move {k}: {e}"))?;
            ensure(pair.verify(&cur.adjacency_matrix(), &next.adjacency_matrix()), || format!("pair {i}, move {k}"))?;
            chain.push(pair);
            cur = next;
        }
        pairs += chain.len();
        let (a, b) = (g.adjacency_matrix(), cur.adjacency_matrix());
        ensure(verify_chain(&a, &b, &chain), || format!("pair {i}: chain"))?;
        let se = chain_to_se(&a, &chain).map_err(|e| e.to_string())?;
        ensure(se.lag as usize == chain.len().max(1) && se.verify(&a, &b), || format!("pair {i}: composed SE"))?;
    }
    Ok(format!("{pairs} moves translated and verified; composed chains satisfy SE"))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Result<String, String>);

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("C1 worked example", Some(Duration::from_secs(1)), c1),
        ("C2 move invariance", Some(Duration::from_secs(30)), c2),
        ("C3 witness soundness", Some(Duration::from_secs(60)), c3),
        ("C4 decision separation", None, c4),
        ("C5 leaf-set laws", Some(Duration::from_secs(30)), c5),
        ("C6 archimedean trichotomy", None, c6),
        ("C7 canonical-form oracle agreement", Some(Duration::from_secs(120)), c7),
        ("C8 matrix oracle consistency", None, c8),
    ];
    let mut failed = Vec::new();
    for (name, limit, f) in criteria {
        let out = timed(limit, f);
        println!("{} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failed.push(name);
        }
    }
    // Classification of all meteor graphs and the operator-algebraic
    // equivalences are not desk-checkable; C1 to C8 stand in for them.
    let c9 = failed.is_empty();
    println!(
        "{} C9 scope: full-scale claims out of scope, substituted by C1-C8 ({})",
        if c9 { "PASS" } else { "FAIL" },
        if c9 { "all substitutes pass" } else { "a substitute failed" }
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
