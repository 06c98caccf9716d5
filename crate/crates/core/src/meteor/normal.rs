//! Normal, quasi-normal and canonical forms, reached by recorded moves, and
//! the move witnesses they yield.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{min_rotation, recognize, Meteor, MeteorProfile, NotMeteor, Trail};
use crate::graph::{is_isomorphism, EdgeId, Graph, VertexId};
use crate::moves::{
    in_amalgamate, in_split, invert_path, out_amalgamate, out_split, replay, replay_trace, InvertError, MoveError,
    MoveRecord, ReplayError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeteorError {
    #[error(transparent)]
    NotMeteor(#[from] NotMeteor),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("move failed: {0}")]
    Move(#[from] MoveError),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

/// Result of [`canonicalize`].
#[derive(Clone, Debug)]
pub struct Canonical {
    pub graph: Graph,
    pub moves: Vec<MoveRecord>,
    pub profile: MeteorProfile,
    /// Sink basepoint at which the raw counts equal the rotated profile.
    pub sink_basepoint: VertexId,
}

/// Moves turning the first graph into one isomorphic to the second, and the
/// isomorphism from the replayed graph onto the second graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub moves: Vec<MoveRecord>,
    pub isomorphism: BTreeMap<VertexId, VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Meteor(#[from] MeteorError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Invert(#[from] InvertError),
    #[error("canonical forms of equivalent graphs are not isomorphic")]
    CanonicalMismatch,
    #[error("replayed graph is not carried onto the target by the given map")]
    NotIsomorphic,
}

/// A graph together with the moves that produced it.
struct Run {
    g: Graph,
    moves: Vec<MoveRecord>,
}

impl Run {
    fn new(g: &Graph) -> Self {
        Run { g: g.clone(), moves: Vec::new() }
    }

    fn push(&mut self, step: Result<(Graph, MoveRecord), MoveError>) -> Result<&MoveRecord, MeteorError> {
        let (h, rec) = step?;
        self.g = h;
        self.moves.push(rec);
        Ok(self.moves.last().expect("just pushed"))
    }

    fn meteor(&self) -> Result<Meteor, MeteorError> {
        recognize(&self.g).map_err(|e| MeteorError::Internal(format!("lost meteor shape: {e}")))
    }

    fn split_at(
        &mut self,
        out: bool,
        v: VertexId,
        classes: Vec<Vec<EdgeId>>,
    ) -> Result<&MoveRecord, MeteorError> {
        let partition = BTreeMap::from([(v, classes)]);
        let step = if out { out_split(&self.g, &partition) } else { in_split(&self.g, &partition) };
        self.push(step)
    }

    /// Moves the source of a trail one step back along `C₀`, making it one
    /// edge longer. `first` is the trail's first edge; returns the new one.
    fn s_back(&mut self, m: &Meteor, first: EdgeId) -> Result<EdgeId, MeteorError> {
        let c = self.g.src(first);
        let rest: Vec<EdgeId> = self.g.out_edges(c).iter().copied().filter(|&e| e != first).collect();
        debug_assert!(m.source_cycle().contains(c));
        let rec = self.split_at(true, c, vec![rest, vec![first]])?;
        let copy = rec.id_map.vertices[&c][1];
        Ok(self.g.in_edges(copy)[0])
    }

    /// Inverse direction of [`Run::s_back`]: merges the first interior
    /// vertex into the next source-cycle vertex. Returns the new first edge
    /// when the merged vertex had a single outgoing edge.
    fn s_fwd(&mut self, m: &Meteor, first: EdgeId) -> Result<Option<EdgeId>, MeteorError> {
        let a = self.g.src(first);
        let y = self.g.dst(first);
        let next = m.source_cycle().step(a, 1).expect("source on C0");
        let outs = self.g.out_edges(y).to_vec();
        self.push(out_amalgamate(&self.g, &[vec![next, y]]))?;
        Ok((outs.len() == 1).then(|| outs[0]))
    }

    /// Merges the last interior vertex into the sink-cycle vertex before
    /// the range, making the trail one edge shorter. `last` is the trail's
    /// last edge; returns the new one.
    fn r_back(&mut self, m: &Meteor, last: EdgeId) -> Result<EdgeId, MeteorError> {
        let y = self.g.src(last);
        let r = self.g.dst(last);
        let prev = m.sink_cycle().step(r, -1).expect("range on C1");
        let new_last = self.g.in_edges(y)[0];
        self.push(in_amalgamate(&self.g, &[vec![prev, y]]))?;
        Ok(new_last)
    }

    /// Moves the range of a trail one step forward along `C₁`, making it one
    /// edge longer. Returns the new last edge.
    fn r_fwd(&mut self, m: &Meteor, last: EdgeId) -> Result<EdgeId, MeteorError> {
        let r = self.g.dst(last);
        let k = m.sink_cycle().edge_from(r).expect("range on C1");
        let rest: Vec<EdgeId> = self.g.in_edges(r).iter().copied().filter(|&e| e != last).collect();
        let rec = self.split_at(false, r, vec![rest, vec![last]])?;
        Ok(rec.id_map.edges[&k][1])
    }
}

fn interior_set(m: &Meteor) -> BTreeSet<VertexId> {
    m.interior().into_iter().collect()
}

/// Out-splits every interior vertex with several outgoing edges, starting
/// with those from which no other such vertex is reachable.
fn split_multisources(run: &mut Run) -> Result<(), MeteorError> {
    loop {
        let m = run.meteor()?;
        let interior = interior_set(&m);
        let multi: BTreeSet<VertexId> = interior.iter().copied().filter(|&u| run.g.out_degree(u) > 1).collect();
        let Some(&u) = multi.iter().find(|&&u| {
            let below = run.g.reachable_from(run.g.successors(u));
            multi.iter().all(|x| x == &u || !below.contains(x))
        }) else {
            return Ok(());
        };
        let classes = run.g.out_edges(u).iter().map(|&e| vec![e]).collect();
        run.split_at(true, u, classes)?;
    }
}

/// In-splits interior vertices to in-degree 1, upstream vertices first.
fn disjoin_interiors(run: &mut Run) -> Result<(), MeteorError> {
    loop {
        let m = run.meteor()?;
        let interior = interior_set(&m);
        let multi: BTreeSet<VertexId> = interior.iter().copied().filter(|&u| run.g.in_degree(u) > 1).collect();
        let Some(&u) = multi.iter().find(|&&u| {
            let above = run.g.reaching(run.g.predecessors(u));
            multi.iter().all(|x| x == &u || !above.contains(x))
        }) else {
            return Ok(());
        };
        let classes = run.g.in_edges(u).iter().map(|&e| vec![e]).collect();
        run.split_at(false, u, classes)?;
    }
}

fn normalize_run(g: &Graph) -> Result<Run, MeteorError> {
    let m0 = recognize(g)?;
    let v = m0.v();
    let mut run = Run::new(g);
    split_multisources(&mut run)?;
    disjoin_interiors(&mut run)?;
    loop {
        let m = run.meteor()?;
        let Some(t) = m.trails().iter().find(|t| t.source() != v) else { break };
        let first = t.edges[0];
        run.s_back(&m, first)?;
    }
    loop {
        let m = run.meteor()?;
        let Some(t) = m.trails().iter().find(|t| t.len() > 1) else { break };
        let last = *t.edges.last().expect("nonempty trail");
        run.r_back(&m, last)?;
    }
    let m = run.meteor()?;
    if !m.is_normal() || m.v() != v {
        return Err(MeteorError::Internal("normalization did not reach normal form".into()));
    }
    Ok(run)
}

/// Transforms a meteor graph into normal form: every trail is a single
/// edge leaving the source basepoint.
pub fn normalize(g: &Graph) -> Result<(Graph, Vec<MoveRecord>), MeteorError> {
    let run = normalize_run(g)?;
    Ok((run.g, run.moves))
}

/// Shortens trails using only out-amalgamations at the source cycle.
/// Requires every interior vertex to have exactly one incoming edge.
pub fn quasi_normalize(g: &Graph) -> Result<(Graph, Vec<MoveRecord>), MeteorError> {
    let m0 = recognize(g)?;
    if let Some(u) = m0.interior().into_iter().find(|&u| g.in_degree(u) != 1) {
        return Err(MeteorError::Precondition(format!(
            "interior vertex {} has {} incoming edges",
            g.vertex_name(u),
            g.in_degree(u)
        )));
    }
    let mut run = Run::new(g);
    loop {
        let m = run.meteor()?;
        let Some(t) = m.trails().iter().find(|t| t.len() > 1) else { break };
        let first = t.edges[0];
        run.s_fwd(&m, first)?;
    }
    Ok((run.g, run.moves))
}

/// The canonical representative of a profile: cycles `0..p` and `p..p+q`,
/// and `counts[n]` edges from vertex `0` to the sink vertex lying
/// `(n − 1) mod 𝗉` steps before vertex `p`.
pub fn canonical_graph(profile: &MeteorProfile) -> Graph {
    let (p, q, period) = (profile.p, profile.q, profile.period);
    let mut trails = Vec::new();
    for (n, &c) in profile.counts.iter().enumerate() {
        let d = (n + period - 1) % period;
        for _ in 0..c {
            trails.push((0, 0, (q - d) % q));
        }
    }
    super::build(p, q, &trails)
}

/// Smallest `|α| ≤ q/𝗉` with `d + αp ≡ target (mod q)`, positive first on
/// ties.
fn bezout_shift(p: usize, q: usize, period: usize, d: usize, target: usize) -> i64 {
    let bound = (q / period) as i64;
    let (p, q) = (p as i64, q as i64);
    for k in 0..=bound {
        for alpha in [k, -k] {
            if (d as i64 + alpha * p - target as i64).rem_euclid(q) == 0 {
                return alpha;
            }
        }
    }
    unreachable!("residues agree mod gcd(p, q)")
}

/// Normalizes, then moves each trail's range so that trails of residue `n`
/// land `(n − 1) mod 𝗉` steps before a sink basepoint chosen to realise the
/// rotated profile. The result is isomorphic to [`canonical_graph`].
pub fn canonicalize(g: &Graph) -> Result<Canonical, MeteorError> {
    let mut run = normalize_run(g)?;
    let m = run.meteor()?;
    let period = m.period();
    let (p, q) = (m.p(), m.q());
    let (rotated, offset) = min_rotation(&m.raw_counts(m.v(), m.w()));
    let t = ((period - offset % period) % period) as i64;
    let w = m.sink_cycle().step(m.w(), t).expect("w on C1");
    debug_assert_eq!(m.raw_counts(m.v(), w), rotated);

    let trails: Vec<EdgeId> = m.trails().iter().map(|t| t.edges[0]).collect();
    for e in trails {
        let m = run.meteor()?;
        let d = m.sink_cycle().distance(run.g.dst(e), w).expect("range on C1");
        let target = d % period;
        let alpha = bezout_shift(p, q, period, d, target);
        let steps = (alpha.unsigned_abs() as usize) * p;
        if alpha > 0 {
            let mut first = e;
            for _ in 0..steps {
                let m = run.meteor()?;
                first = run.s_back(&m, first)?;
            }
            let mut last = e;
            for _ in 0..steps {
                let m = run.meteor()?;
                last = run.r_back(&m, last)?;
            }
        } else if alpha < 0 {
            let mut last = e;
            for _ in 0..steps {
                let m = run.meteor()?;
                last = run.r_fwd(&m, last)?;
            }
            let mut first = e;
            for _ in 0..steps {
                let m = run.meteor()?;
                first = run
                    .s_fwd(&m, first)?
                    .ok_or_else(|| MeteorError::Internal("lengthened trail branched".into()))?;
            }
        }
    }

    let m = run.meteor()?;
    let profile = m.profile();
    let ok = m.is_normal()
        && m.trails().iter().all(|t: &Trail| {
            let d = m.sink_cycle().distance(t.range(), w).expect("range on C1");
            d < period
        });
    if !ok || m.raw_counts(m.v(), w) != profile.counts {
        return Err(MeteorError::Internal("canonicalization missed the canonical layout".into()));
    }
    Ok(Canonical { graph: run.g, moves: run.moves, profile, sink_basepoint: w })
}

/// A replayable move sequence from `g1` to a graph isomorphic to `g2`, or
/// `None` when the graphs are not equivalent.
pub fn witness(g1: &Graph, g2: &Graph) -> Result<Option<Witness>, WitnessError> {
    let c1 = canonicalize(g1)?;
    let c2 = canonicalize(g2)?;
    if c1.profile != c2.profile {
        return Ok(None);
    }
    let sigma = c2.graph.is_isomorphic(&c1.graph).ok_or(WitnessError::CanonicalMismatch)?;
    let trace2 = replay_trace(g2, &c2.moves)?;
    let (back, _, to_final) = invert_path(&trace2, &c2.moves, &c1.graph, &sigma)?;
    let mut moves = c1.moves;
    moves.extend(back);
    let isomorphism = to_final.into_iter().map(|(a, b)| (b, a)).collect();
    let w = Witness { moves, isomorphism };
    witness_verify(g1, g2, &w)?;
    Ok(Some(w))
}

/// Replays the witness from `g1` and checks its isomorphism onto `g2`.
pub fn witness_verify(g1: &Graph, g2: &Graph, w: &Witness) -> Result<(), WitnessError> {
    let h = replay(g1, &w.moves)?;
    if is_isomorphism(&h, g2, &w.isomorphism) {
        Ok(())
    } else {
        Err(WitnessError::NotIsomorphic)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build, worked_example};
    use super::*;

    #[test]
    fn dumbbell_is_normal() {
        let g = build(1, 1, &[(0, 0, 0)]);
        let (h, moves) = normalize(&g).unwrap();
        assert!(moves.is_empty());
        assert_eq!(h, g);
        let c = canonicalize(&g).unwrap();
        assert!(c.moves.is_empty());
        assert!(c.graph.is_isomorphic(&canonical_graph(&c.profile)).is_some());
    }

    #[test]
    fn worked_example_normal_form() {
        let g = worked_example();
        let (h, moves) = normalize(&g).unwrap();
        let m = recognize(&h).unwrap();
        assert!(m.is_normal());
        assert_eq!(m.trails().len(), 7);
        assert_eq!(m.raw_counts(m.v(), m.w()), vec![3, 4]);
        assert_eq!(replay(&g, &moves).unwrap(), h);
    }

    #[test]
    fn quasi_normal_single_amalgamation() {
        let g = build(1, 1, &[(0, 1, 0)]);
        let (h, moves) = quasi_normalize(&g).unwrap();
        assert_eq!(moves.len(), 1);
        assert!(recognize(&h).unwrap().is_quasi_normal());
        let (_, none) = quasi_normalize(&h).unwrap();
        assert!(none.is_empty());
        // a second edge into the interior vertex breaks the precondition
        let with_join = Graph::new(
            g.vertices().iter().copied(),
            g.edges()
                .cloned()
                .chain([crate::graph::Edge { id: EdgeId(9), src: VertexId(0), dst: VertexId(2) }]),
        )
        .unwrap();
        assert!(matches!(quasi_normalize(&with_join), Err(MeteorError::Precondition(_))));
    }

    #[test]
    fn canonical_forms_agree() {
        let a = build(2, 2, &[(0, 0, 0)]);
        let b = build(2, 2, &[(0, 1, 0)]);
        let ca = canonicalize(&a).unwrap();
        let cb = canonicalize(&b).unwrap();
        assert_eq!(ca.profile, cb.profile);
        assert!(ca.graph.is_isomorphic(&cb.graph).is_some());
        assert!(ca.graph.is_isomorphic(&canonical_graph(&ca.profile)).is_some());
        assert_eq!(replay(&b, &cb.moves).unwrap(), cb.graph);
    }

    #[test]
    fn retuning_both_directions() {
        // p = 2, q = 4: trails whose ranges sit 2 and 3 steps before w
        let g = build(2, 4, &[(0, 0, 2), (0, 0, 1), (1, 2, 3)]);
        let c = canonicalize(&g).unwrap();
        assert!(c.graph.is_isomorphic(&canonical_graph(&c.profile)).is_some());
        assert_eq!(replay(&g, &c.moves).unwrap(), c.graph);
    }

    #[test]
    fn witnesses() {
        let a = build(2, 2, &[(0, 0, 0)]);
        let b = build(2, 2, &[(0, 1, 0)]);
        let w = witness(&a, &b).unwrap().unwrap();
        assert!(!w.moves.is_empty());
        witness_verify(&a, &b, &w).unwrap();
        let same = witness(&a, &a).unwrap().unwrap();
        witness_verify(&a, &a, &same).unwrap();
        let x = build(2, 2, &[(0, 0, 0), (0, 0, 0)]);
        let y = build(2, 2, &[(0, 0, 0), (0, 1, 0)]);
        assert!(witness(&x, &y).unwrap().is_none());
        let json = serde_json::to_string(&w).unwrap();
        let back: Witness = serde_json::from_str(&json).unwrap();
        witness_verify(&a, &b, &back).unwrap();
    }

    #[test]
    fn witness_on_worked_example_split() {
        let g = worked_example();
        let u = g.vertex_by_name("u").unwrap();
        let outs = g.out_edges(u).to_vec();
        let (h, _) = out_split(&g, &BTreeMap::from([(u, vec![outs[..2].to_vec(), outs[2..].to_vec()])])).unwrap();
        let w = witness(&g, &h).unwrap().unwrap();
        witness_verify(&g, &h, &w).unwrap();
    }
}
