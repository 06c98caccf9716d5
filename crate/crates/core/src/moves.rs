//! Williams moves: in- and out-splits and their inverse amalgamations.
//!
//! Every move returns the new graph together with a [`MoveRecord`] that
//! can be replayed. Ids are allocated deterministically: copy 0 of a
//! vertex or edge keeps the original id, further copies take fresh ids
//! above the current maximum, in ascending (original id, copy index) order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    InSplit,
    OutSplit,
    InAmalgamation,
    OutAmalgamation,
}

impl MoveKind {
    pub fn is_split(self) -> bool {
        matches!(self, MoveKind::InSplit | MoveKind::OutSplit)
    }

    pub fn is_out(self) -> bool {
        matches!(self, MoveKind::OutSplit | MoveKind::OutAmalgamation)
    }
}

/// Where each old id went. Split copies are listed copy 0 first; an
/// amalgamated vertex maps to its block representative and a dropped edge
/// to the kept edge it was merged with.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMap {
    pub vertices: BTreeMap<VertexId, Vec<VertexId>>,
    pub edges: BTreeMap<EdgeId, Vec<EdgeId>>,
}

impl IdMap {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub site: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub partition: BTreeMap<VertexId, Vec<Vec<EdgeId>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub block_map: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "IdMap::is_empty")]
    pub id_map: IdMap,
}

impl MoveRecord {
    pub fn split(kind: MoveKind, partition: BTreeMap<VertexId, Vec<Vec<EdgeId>>>) -> Self {
        debug_assert!(kind.is_split());
        MoveRecord {
            kind,
            site: partition.keys().copied().collect(),
            partition,
            block_map: Vec::new(),
            id_map: IdMap::default(),
        }
    }

    pub fn amalgamation(kind: MoveKind, blocks: Vec<Vec<VertexId>>) -> Self {
        debug_assert!(!kind.is_split());
        MoveRecord {
            kind,
            site: blocks.iter().filter_map(|b| b.first().copied()).collect(),
            partition: BTreeMap::new(),
            block_map: blocks,
            id_map: IdMap::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("class {class} of the partition at {vertex} is empty")]
    EmptyClass { vertex: VertexId, class: usize },
    #[error("edge {edge} appears twice in the partition at {vertex}")]
    Overlap { vertex: VertexId, edge: EdgeId },
    #[error("edge {edge} does not belong to the edge set partitioned at {vertex}")]
    ForeignEdge { vertex: VertexId, edge: EdgeId },
    #[error("edge {edge} at {vertex} is not covered by the partition")]
    NotCovered { vertex: VertexId, edge: EdgeId },
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("vertex {vertex} appears in more than one block")]
    BlockOverlap { vertex: VertexId },
    #[error("block {block} cannot be amalgamated: {reason}")]
    InvalidBlock { block: usize, reason: String },
    #[error("recorded id map does not match the replayed move")]
    IdMapMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("move {index}: {source}")]
pub struct ReplayError {
    pub index: usize,
    #[source]
    pub source: MoveError,
}

/// Checks one partition of `edges` and returns the class index per edge.
fn check_classes(
    vertex: VertexId,
    classes: &[Vec<EdgeId>],
    edges: &[EdgeId],
) -> Result<BTreeMap<EdgeId, usize>, MoveError> {
    let allowed: BTreeSet<EdgeId> = edges.iter().copied().collect();
    let mut class_of = BTreeMap::new();
    for (i, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(MoveError::EmptyClass { vertex, class: i });
        }
        for &e in class {
            if !allowed.contains(&e) {
                return Err(MoveError::ForeignEdge { vertex, edge: e });
            }
            if class_of.insert(e, i).is_some() {
                return Err(MoveError::Overlap { vertex, edge: e });
            }
        }
    }
    if let Some(&e) = edges.iter().find(|e| !class_of.contains_key(e)) {
        return Err(MoveError::NotCovered { vertex, edge: e });
    }
    Ok(class_of)
}

fn copy_label(label: &str, j: usize) -> String {
    if j == 0 {
        label.to_owned()
    } else {
        format!("{label}_{j}")
    }
}

/// In-split at the vertices named in `partition`; other vertices with
/// in-edges get the one-class partition, and vertices without in-edges are
/// carried over unchanged.
pub fn in_split(
    g: &Graph,
    partition: &BTreeMap<VertexId, Vec<Vec<EdgeId>>>,
) -> Result<(Graph, MoveRecord), MoveError> {
    let mut class_of: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut m: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (&v, classes) in partition {
        if !g.contains_vertex(v) {
            return Err(MoveError::UnknownVertex(v));
        }
        class_of.extend(check_classes(v, classes, g.in_edges(v))?);
        if !classes.is_empty() {
            m.insert(v, classes.len());
        }
    }

    let mut next_v = g.max_vertex_id().map_or(0, |v| v.0 + 1);
    let mut copies: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut vlabels = BTreeMap::new();
    for &v in g.vertices() {
        let count = m.get(&v).copied().unwrap_or(1);
        let mut cs = vec![v];
        for _ in 1..count {
            cs.push(VertexId(next_v));
            next_v += 1;
        }
        let base = g.vertex_name(v);
        for (j, &c) in cs.iter().enumerate() {
            if g.vertex_label(v).is_some() || j > 0 {
                vlabels.insert(c, copy_label(&base, j));
            }
        }
        copies.insert(v, cs);
    }

    let mut next_e = g.max_edge_id().map_or(0, |e| e.0 + 1);
    let mut edges = Vec::new();
    let mut edge_copies: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut elabels = BTreeMap::new();
    for e in g.edges() {
        let dst = copies[&e.dst][class_of.get(&e.id).copied().unwrap_or(0)];
        let base = g.edge_name(e.id);
        let mut cs = Vec::new();
        for (j, &src) in copies[&e.src].iter().enumerate() {
            let id = if j == 0 {
                e.id
            } else {
                next_e += 1;
                EdgeId(next_e - 1)
            };
            if g.edge_label(e.id).is_some() || j > 0 {
                elabels.insert(id, copy_label(&base, j));
            }
            edges.push(Edge { id, src, dst });
            cs.push(id);
        }
        edge_copies.insert(e.id, cs);
    }
    let h = Graph::new(copies.values().flatten().copied(), edges)
        .expect("split of a valid graph is valid")
        .with_labels(vlabels, elabels);
    let mut record = MoveRecord::split(MoveKind::InSplit, partition.clone());
    record.id_map = IdMap { vertices: copies, edges: edge_copies };
    Ok((h, record))
}

/// Out-split: the in-split of the transpose, transposed back.
pub fn out_split(
    g: &Graph,
    partition: &BTreeMap<VertexId, Vec<Vec<EdgeId>>>,
) -> Result<(Graph, MoveRecord), MoveError> {
    let (h, mut record) = in_split(&g.transpose(), partition)?;
    record.kind = MoveKind::OutSplit;
    Ok((h.transpose(), record))
}

/// Normalises a block list: validates membership and disjointness and
/// returns the representative of every vertex.
fn block_reps(g: &Graph, blocks: &[Vec<VertexId>]) -> Result<BTreeMap<VertexId, VertexId>, MoveError> {
    let mut rep = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        let Some(&r) = b.first() else {
            return Err(MoveError::EmptyBlock { block: i });
        };
        for &v in b {
            if !g.contains_vertex(v) {
                return Err(MoveError::UnknownVertex(v));
            }
            if rep.insert(v, r).is_some() {
                return Err(MoveError::BlockOverlap { vertex: v });
            }
        }
    }
    for &v in g.vertices() {
        rep.entry(v).or_insert(v);
    }
    Ok(rep)
}

fn range_multiset(g: &Graph, v: VertexId) -> Vec<VertexId> {
    let mut r: Vec<VertexId> = g.successors(v).collect();
    r.sort_unstable();
    r
}

/// Checks that `blocks` can be in-amalgamated: inside a block every vertex
/// receives at least one edge and all members have the same multiset of
/// edge ranges.
pub fn check_in_amalgamation(g: &Graph, blocks: &[Vec<VertexId>]) -> Result<(), MoveError> {
    block_reps(g, blocks)?;
    for (i, b) in blocks.iter().enumerate() {
        if b.len() < 2 {
            continue;
        }
        if let Some(v) = b.iter().find(|&&v| g.in_degree(v) == 0) {
            return Err(MoveError::InvalidBlock {
                block: i,
                reason: format!("{v} receives no edges"),
            });
        }
        let first = range_multiset(g, b[0]);
        if let Some(v) = b[1..].iter().find(|&&v| range_multiset(g, v) != first) {
            return Err(MoveError::InvalidBlock {
                block: i,
                reason: format!("edges leaving {v} and {} have different ranges", b[0]),
            });
        }
    }
    Ok(())
}

/// Merges each block into its first vertex. Only edges leaving a
/// representative survive, retargeted to representatives.
pub fn in_amalgamate(g: &Graph, blocks: &[Vec<VertexId>]) -> Result<(Graph, MoveRecord), MoveError> {
    check_in_amalgamation(g, blocks)?;
    let rep = block_reps(g, blocks)?;
    let blocks: Vec<Vec<VertexId>> = blocks.iter().filter(|b| b.len() > 1).cloned().collect();

    let kept_vertices: Vec<VertexId> = g.vertices().iter().copied().filter(|v| rep[v] == *v).collect();
    let mut edges = Vec::new();
    let mut edge_map: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    for &v in &kept_vertices {
        for &e in g.out_edges(v) {
            edges.push(Edge { id: e, src: v, dst: rep[&g.dst(e)] });
            edge_map.insert(e, vec![e]);
        }
    }
    for &v in g.vertices() {
        let r = rep[&v];
        if r == v {
            continue;
        }
        // Pair parallel edges to the same range in id order.
        let mut pool: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for &e in g.out_edges(r) {
            pool.entry(g.dst(e)).or_default().push(e);
        }
        let mut used: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &e in g.out_edges(v) {
            let d = g.dst(e);
            let k = used.entry(d).or_default();
            edge_map.insert(e, vec![pool[&d][*k]]);
            *k += 1;
        }
    }
    let vlabels = g.vertex_labels().iter().filter(|(v, _)| rep[*v] == **v).map(|(v, l)| (*v, l.clone())).collect();
    let elabels = g.edge_labels().iter().filter(|(e, _)| edge_map[*e][0] == **e).map(|(e, l)| (*e, l.clone())).collect();
    let h = Graph::new(kept_vertices, edges)
        .expect("quotient of a valid graph is valid")
        .with_labels(vlabels, elabels);
    let mut record = MoveRecord::amalgamation(MoveKind::InAmalgamation, blocks);
    record.id_map = IdMap {
        vertices: rep.iter().map(|(&v, &r)| (v, vec![r])).collect(),
        edges: edge_map,
    };
    Ok((h, record))
}

/// Checks the transpose-dual amalgamation condition.
pub fn check_out_amalgamation(g: &Graph, blocks: &[Vec<VertexId>]) -> Result<(), MoveError> {
    check_in_amalgamation(&g.transpose(), blocks)
}

pub fn out_amalgamate(g: &Graph, blocks: &[Vec<VertexId>]) -> Result<(Graph, MoveRecord), MoveError> {
    let (h, mut record) = in_amalgamate(&g.transpose(), blocks)?;
    record.kind = MoveKind::OutAmalgamation;
    Ok((h.transpose(), record))
}

/// Applies one record. A nonempty recorded id map must match the one the
/// move produces.
pub fn apply(g: &Graph, record: &MoveRecord) -> Result<(Graph, MoveRecord), MoveError> {
    let (h, produced) = match record.kind {
        MoveKind::InSplit => in_split(g, &record.partition)?,
        MoveKind::OutSplit => out_split(g, &record.partition)?,
        MoveKind::InAmalgamation => in_amalgamate(g, &record.block_map)?,
        MoveKind::OutAmalgamation => out_amalgamate(g, &record.block_map)?,
    };
    if !record.id_map.is_empty() && record.id_map != produced.id_map {
        return Err(MoveError::IdMapMismatch);
    }
    Ok((h, produced))
}

pub fn replay(g: &Graph, seq: &[MoveRecord]) -> Result<Graph, ReplayError> {
    let mut cur = g.clone();
    for (index, r) in seq.iter().enumerate() {
        cur = apply(&cur, r).map_err(|source| ReplayError { index, source })?.0;
    }
    Ok(cur)
}

/// Like [`replay`], returning every intermediate graph, starting with `g`.
pub fn replay_trace(g: &Graph, seq: &[MoveRecord]) -> Result<Vec<Graph>, ReplayError> {
    let mut trace = vec![g.clone()];
    for (index, r) in seq.iter().enumerate() {
        let next = apply(trace.last().expect("nonempty"), r)
            .map_err(|source| ReplayError { index, source })?
            .0;
        trace.push(next);
    }
    Ok(trace)
}

/// The move undoing `record`, expressed in the ids of `after`. For a split
/// the inverse restores the original ids exactly.
pub fn inverse(before: &Graph, after: &Graph, record: &MoveRecord) -> MoveRecord {
    if record.kind.is_split() {
        let blocks = record.id_map.vertices.values().filter(|c| c.len() > 1).cloned().collect();
        let kind = if record.kind.is_out() { MoveKind::OutAmalgamation } else { MoveKind::InAmalgamation };
        return MoveRecord::amalgamation(kind, blocks);
    }
    let (before, after) = if record.kind.is_out() {
        (before.transpose(), after.transpose())
    } else {
        (before.clone(), after.clone())
    };
    let mut partition = BTreeMap::new();
    for b in &record.block_map {
        let rep = b[0];
        let classes: Vec<Vec<EdgeId>> = b
            .iter()
            .map(|&u| {
                after
                    .in_edges(rep)
                    .iter()
                    .copied()
                    .filter(|&e| before.dst(e) == u)
                    .collect()
            })
            .collect();
        partition.insert(rep, classes);
    }
    let kind = if record.kind.is_out() { MoveKind::OutSplit } else { MoveKind::InSplit };
    MoveRecord::split(kind, partition)
}

/// Rewrites a record's site ids through vertex and edge bijections. The
/// id map is dropped since fresh ids depend on the host graph.
pub fn translate(
    record: &MoveRecord,
    vmap: &BTreeMap<VertexId, VertexId>,
    emap: &BTreeMap<EdgeId, EdgeId>,
) -> MoveRecord {
    let partition = record
        .partition
        .iter()
        .map(|(v, classes)| {
            (vmap[v], classes.iter().map(|c| c.iter().map(|e| emap[e]).collect()).collect())
        })
        .collect();
    let blocks: Vec<Vec<VertexId>> = record.block_map.iter().map(|b| b.iter().map(|v| vmap[v]).collect()).collect();
    if record.kind.is_split() {
        MoveRecord::split(record.kind, partition)
    } else {
        MoveRecord::amalgamation(record.kind, blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("trace and move list lengths disagree")]
    Length,
    #[error("starting map is not an isomorphism")]
    BadStart,
    #[error("step {0}: inverse move failed: {1}")]
    Move(usize, MoveError),
    #[error("step {0}: inverse move did not reproduce the earlier graph")]
    Drift(usize),
}

/// Moves found by [`invert_path`], the graph they reach and the final bijection.
pub type Inverted = (Vec<MoveRecord>, Graph, BTreeMap<VertexId, VertexId>);

/// Walks a recorded path `trace[0] → … → trace[n]` backwards starting from
/// `x`, a graph isomorphic to `trace[n]` via `sigma`. Returns the moves
/// applied to `x`, the final graph, and an isomorphism `trace[0] → final`.
pub fn invert_path(
    trace: &[Graph],
    moves: &[MoveRecord],
    x: &Graph,
    sigma: &BTreeMap<VertexId, VertexId>,
) -> Result<Inverted, InvertError> {
    if trace.len() != moves.len() + 1 {
        return Err(InvertError::Length);
    }
    if !crate::graph::is_isomorphism(&trace[moves.len()], x, sigma) {
        return Err(InvertError::BadStart);
    }
    let mut out = Vec::new();
    let mut cur = x.clone();
    let mut sigma = sigma.clone();
    for k in (0..moves.len()).rev() {
        let (before, after, rec) = (&trace[k], &trace[k + 1], &moves[k]);
        let emap = after.edge_bijection(&cur, &sigma).ok_or(InvertError::Drift(k))?;
        let inv = translate(&inverse(before, after, rec), &sigma, &emap);
        let (next, applied) = apply(&cur, &inv).map_err(|e| InvertError::Move(k, e))?;
        let next_sigma: BTreeMap<VertexId, VertexId> = if rec.kind.is_split() {
            rec.id_map.vertices.iter().map(|(&v, cs)| (v, sigma[&cs[0]])).collect()
        } else {
            let mut s: BTreeMap<VertexId, VertexId> = BTreeMap::new();
            for &v in before.vertices() {
                let r = rec.id_map.vertices[&v][0];
                let image = sigma[&r];
                let pos = rec
                    .block_map
                    .iter()
                    .find(|b| b[0] == r)
                    .and_then(|b| b.iter().position(|&u| u == v))
                    .unwrap_or(0);
                s.insert(v, applied.id_map.vertices[&image][pos]);
            }
            s
        };
        if !crate::graph::is_isomorphism(before, &next, &next_sigma) {
            return Err(InvertError::Drift(k));
        }
        out.push(applied);
        cur = next;
        sigma = next_sigma;
    }
    Ok((out, cur, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dumbbell() -> Graph {
        Graph::from_edge_list(2, &[(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn e(i: u32) -> EdgeId {
        EdgeId(i)
    }

    #[test]
    fn trivial_split_is_identity() {
        let g = dumbbell();
        let (h, rec) = in_split(&g, &BTreeMap::new()).unwrap();
        assert_eq!(h.adjacency_matrix(), g.adjacency_matrix());
        assert_eq!(rec.id_map.vertices[&v(0)], vec![v(0)]);
        let (h, _) = out_split(&g, &BTreeMap::from([(v(0), vec![vec![e(0), e(2)]])])).unwrap();
        assert!(h.is_isomorphic(&g).is_some());
    }

    #[test]
    fn dumbbell_in_split_lengthens_trail() {
        let g = dumbbell();
        let p = BTreeMap::from([(v(1), vec![vec![e(1)], vec![e(2)]])]);
        let (h, rec) = in_split(&g, &p).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(rec.id_map.vertices[&v(1)], vec![v(1), v(2)]);
        // w keeps the loop, the new copy w_1 receives the old trail edge and
        // inherits w's loop as an edge w_1 → w.
        assert_eq!(h.multiplicity(v(0), v(2)), 1);
        assert_eq!(h.multiplicity(v(2), v(1)), 1);
        assert_eq!(h.multiplicity(v(1), v(1)), 1);
        assert_eq!(h.multiplicity(v(0), v(1)), 0);
        assert_eq!(h.edge_count(), 4);
        assert_eq!(rec.id_map.edges[&e(1)], vec![e(1), e(3)]);
    }

    #[test]
    fn partition_errors_are_distinct() {
        let g = dumbbell();
        let w = v(1);
        let cases = [
            (vec![vec![e(1)], vec![], vec![e(2)]], MoveError::EmptyClass { vertex: w, class: 1 }),
            (vec![vec![e(1), e(2)], vec![e(2)]], MoveError::Overlap { vertex: w, edge: e(2) }),
            (vec![vec![e(1), e(2), e(0)]], MoveError::ForeignEdge { vertex: w, edge: e(0) }),
            (vec![vec![e(1)]], MoveError::NotCovered { vertex: w, edge: e(2) }),
        ];
        for (classes, want) in cases {
            assert_eq!(in_split(&g, &BTreeMap::from([(w, classes)])).unwrap_err(), want);
        }
        assert_eq!(
            in_split(&g, &BTreeMap::from([(v(9), vec![])])).unwrap_err(),
            MoveError::UnknownVertex(v(9))
        );
    }

    #[test]
    fn source_vertices_pass_through() {
        // 0 → 1 → 1: vertex 0 has no in-edges
        let g = Graph::from_edge_list(2, &[(0, 1), (1, 1)]).unwrap();
        let p = BTreeMap::from([(v(1), vec![vec![e(0)], vec![e(1)]])]);
        let (h, rec) = in_split(&g, &p).unwrap();
        assert_eq!(rec.id_map.vertices[&v(0)], vec![v(0)]);
        assert_eq!(h.out_degree(v(0)), 1);
        assert_eq!(h.vertex_count(), 3);
    }

    #[test]
    fn split_then_inverse_restores_ids() {
        let g = dumbbell();
        let p = BTreeMap::from([(v(1), vec![vec![e(1)], vec![e(2)]])]);
        let (h, rec) = in_split(&g, &p).unwrap();
        let inv = inverse(&g, &h, &rec);
        assert_eq!(inv.block_map, vec![vec![v(1), v(2)]]);
        let (back, _) = apply(&h, &inv).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn amalgamation_validity() {
        let g = dumbbell();
        let err = in_amalgamate(&g, &[vec![v(0), v(1)]]).unwrap_err();
        assert!(matches!(err, MoveError::InvalidBlock { block: 0, .. }));
        let (h, _) = in_amalgamate(&g, &[vec![v(0)], vec![v(1)]]).unwrap();
        assert_eq!(h, g);
        assert_eq!(in_amalgamate(&g, &[vec![]]).unwrap_err(), MoveError::EmptyBlock { block: 0 });
        assert_eq!(
            in_amalgamate(&g, &[vec![v(0)], vec![v(0)]]).unwrap_err(),
            MoveError::BlockOverlap { vertex: v(0) }
        );
    }

    #[test]
    fn amalgamation_inverse_split() {
        // 2-cycle 0 ⇄ 1 where both copies of an in-split of a loop.
        let loop2 = Graph::from_edge_list(2, &[(0, 1), (1, 0), (0, 0), (1, 1)]).unwrap();
        let (h, rec) = in_amalgamate(&loop2, &[vec![v(0), v(1)]]).unwrap();
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(rec.id_map.vertices[&v(1)], vec![v(0)]);
        let inv = inverse(&loop2, &h, &rec);
        assert_eq!(inv.kind, MoveKind::InSplit);
        let (back, _) = apply(&h, &inv).unwrap();
        assert!(back.is_isomorphic(&loop2).is_some());
    }

    #[test]
    fn replay_reports_index() {
        let g = dumbbell();
        let good = MoveRecord::split(MoveKind::InSplit, BTreeMap::from([(v(1), vec![vec![e(1)], vec![e(2)]])]));
        let bad = MoveRecord::split(MoveKind::OutSplit, BTreeMap::from([(v(0), vec![vec![e(0)]])]));
        let err = replay(&g, &[good.clone(), bad]).unwrap_err();
        assert_eq!(err.index, 1);
        assert!(matches!(err.source, MoveError::NotCovered { .. }));
        assert_eq!(replay(&g, &[]).unwrap(), g);
        let trace = replay_trace(&g, &[good]).unwrap();
        assert_eq!(trace.len(), 2);
    }

    #[test]
    fn record_json_round_trip() {
        let g = dumbbell();
        let p = BTreeMap::from([(v(1), vec![vec![e(1)], vec![e(2)]])]);
        let (_, rec) = in_split(&g, &p).unwrap();
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"kind\":\"in_split\""));
        let back: MoveRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
        assert!(apply(&g, &back).is_ok());
    }

    #[test]
    fn invert_path_walks_back() {
        let g = dumbbell();
        let p = BTreeMap::from([(v(1), vec![vec![e(1)], vec![e(2)]])]);
        let (h1, r1) = in_split(&g, &p).unwrap();
        let q = BTreeMap::from([(v(0), vec![vec![e(0)], vec![e(2)]])]);
        let (h2, r2) = out_split(&h1, &q).unwrap();
        let trace = vec![g.clone(), h1, h2.clone()];
        let id: BTreeMap<_, _> = h2.vertices().iter().map(|&x| (x, x)).collect();
        let (moves, end, sigma) = invert_path(&trace, &[r1, r2], &h2, &id).unwrap();
        assert_eq!(moves.len(), 2);
        assert!(crate::graph::is_isomorphism(&g, &end, &sigma));
    }
}
