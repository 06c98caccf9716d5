//! Random generators for property tests, benches and the CLI.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::moves::{apply, check_in_amalgamation, MoveKind, MoveRecord};
use crate::talented::TalentedElement;

/// A random meteor graph with at most `max_vertices` vertices (at least 3):
/// cycle lengths in `1..=3`, an acyclic interior where every vertex has an
/// edge in and out, possibly parallel edges, and shuffled vertex ids.
pub fn random_meteor<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> Graph {
    let max_vertices = max_vertices.max(3);
    let p = rng.gen_range(1..=3usize.min(max_vertices - 1));
    let q = rng.gen_range(1..=3usize.min(max_vertices - p));
    let k = rng.gen_range(0..=(max_vertices - p - q).min(4));
    let c0: Vec<u32> = (0..p as u32).collect();
    let c1: Vec<u32> = (p as u32..(p + q) as u32).collect();
    let interior: Vec<u32> = ((p + q) as u32..(p + q + k) as u32).collect();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..p {
        edges.push((c0[i], c0[(i + 1) % p]));
    }
    for i in 0..q {
        edges.push((c1[i], c1[(i + 1) % q]));
    }
    // interior[i] may receive from C0 or interior[..i] and send to C1 or
    // interior[i+1..]
    for (i, &u) in interior.iter().enumerate() {
        let src = if i == 0 || rng.gen_bool(0.5) { *c0.choose(rng).unwrap() } else { interior[rng.gen_range(0..i)] };
        edges.push((src, u));
        let dst = if i + 1 == k || rng.gen_bool(0.5) { *c1.choose(rng).unwrap() } else { interior[rng.gen_range(i + 1..k)] };
        edges.push((u, dst));
    }
    if k == 0 || rng.gen_bool(0.3) {
        edges.push((*c0.choose(rng).unwrap(), *c1.choose(rng).unwrap()));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let from: Vec<u32> = c0.iter().chain(&interior).copied().collect();
        let s = *from.choose(rng).unwrap();
        let later: Vec<u32> = match interior.iter().position(|&x| x == s) {
            Some(i) => interior[i + 1..].iter().chain(&c1).copied().collect(),
            None => interior.iter().chain(&c1).copied().collect(),
        };
        edges.push((s, *later.choose(rng).unwrap()));
    }
    let n = (p + q + k) as u32;
    let mut perm: Vec<u32> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<(u32, u32)> = edges.into_iter().map(|(a, b)| (perm[a as usize], perm[b as usize])).collect();
    Graph::from_edge_list(n, &edges).expect("generated meteor is valid")
}

/// A random graph on `n` vertices with up to `max_edges` edges.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: u32, max_edges: usize) -> Graph {
    let m = if n == 0 { 0 } else { rng.gen_range(0..=max_edges) };
    let edges: Vec<(u32, u32)> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    Graph::from_edge_list(n, &edges).expect("endpoints in range")
}

fn random_partition<R: Rng + ?Sized>(rng: &mut R, edges: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    let k = rng.gen_range(1..=edges.len());
    let mut shuffled = edges.to_vec();
    shuffled.shuffle(rng);
    let mut classes: Vec<Vec<EdgeId>> = vec![Vec::new(); k];
    for (i, e) in shuffled.into_iter().enumerate() {
        let c = if i < k { i } else { rng.gen_range(0..k) };
        classes[c].push(e);
    }
    classes
}

/// Groups of at least two vertices that may be in-amalgamated together.
fn amalgamable_groups(g: &Graph) -> Vec<Vec<VertexId>> {
    let mut by_ranges: BTreeMap<Vec<VertexId>, Vec<VertexId>> = BTreeMap::new();
    for &v in g.vertices() {
        if g.in_degree(v) == 0 {
            continue;
        }
        let mut r: Vec<VertexId> = g.successors(v).collect();
        r.sort_unstable();
        by_ranges.entry(r).or_default().push(v);
    }
    by_ranges.into_values().filter(|b| b.len() > 1).collect()
}

/// A random valid move on `g` together with its result, or `None` when
/// the drawn kind has no admissible site.
pub fn random_valid_move<R: Rng + ?Sized>(rng: &mut R, g: &Graph) -> Option<(Graph, MoveRecord)> {
    let kind = *[MoveKind::InSplit, MoveKind::OutSplit, MoveKind::InAmalgamation, MoveKind::OutAmalgamation]
        .choose(rng)
        .unwrap();
    let record = if kind.is_split() {
        let sites: Vec<VertexId> = g
            .vertices()
            .iter()
            .copied()
            .filter(|&v| if kind.is_out() { g.out_degree(v) >= 2 } else { g.in_degree(v) >= 2 })
            .collect();
        let &v = sites.choose(rng)?;
        let edges = if kind.is_out() { g.out_edges(v) } else { g.in_edges(v) };
        MoveRecord::split(kind, BTreeMap::from([(v, random_partition(rng, edges))]))
    } else {
        let host = if kind.is_out() { g.transpose() } else { g.clone() };
        let groups = amalgamable_groups(&host);
        let group = groups.choose(rng)?;
        let mut members = group.clone();
        members.shuffle(rng);
        let take = rng.gen_range(2..=members.len());
        members.truncate(take);
        debug_assert!(check_in_amalgamation(&host, std::slice::from_ref(&members)).is_ok());
        MoveRecord::amalgamation(kind, vec![members])
    };
    apply(g, &record).ok()
}

/// Applies up to `steps` random valid moves; returns the trace of graphs
/// and the records.
pub fn random_walk<R: Rng + ?Sized>(rng: &mut R, g: &Graph, steps: usize) -> (Graph, Vec<MoveRecord>) {
    let mut cur = g.clone();
    let mut moves = Vec::new();
    let mut tries = 0;
    while moves.len() < steps && tries < 20 * steps.max(1) {
        tries += 1;
        if let Some((h, rec)) = random_valid_move(rng, &cur) {
            // keep graphs desk-sized
            if h.vertex_count() > 14 {
                continue;
            }
            cur = h;
            moves.push(rec);
        }
    }
    (cur, moves)
}

/// A random nonzero talented element over the vertices of `g`, shifts in
/// `-3..=3`, coefficients in `1..=3`.
pub fn random_talented<R: Rng + ?Sized>(rng: &mut R, g: &Graph, max_terms: usize) -> TalentedElement {
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut x = TalentedElement::zero();
    for _ in 0..terms {
        let &v = g.vertices().choose(rng).expect("nonempty graph");
        x.add_term(v, rng.gen_range(-3..=3), rng.gen_range(1..=3));
    }
    x
}

/// Adds one parallel copy of a random edge; handy for perturbing graphs.
pub fn with_extra_edge<R: Rng + ?Sized>(rng: &mut R, g: &Graph) -> Graph {
    let edges: Vec<Edge> = g.edges().cloned().collect();
    let Some(e) = edges.choose(rng) else { return g.clone() };
    let id = EdgeId(g.max_edge_id().map_or(0, |m| m.0 + 1));
    let mut all = edges.clone();
    all.push(Edge { id, src: e.src, dst: e.dst });
    Graph::new(g.vertices().iter().copied(), all).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meteor::recognize;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn meteors_are_meteors() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let g = random_meteor(&mut rng, 10);
            assert!(g.vertex_count() <= 10);
            recognize(&g).unwrap();
        }
    }

    #[test]
    fn walks_stay_meteor() {
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..50 {
            let g = random_meteor(&mut rng, 8);
            let (h, _) = random_walk(&mut rng, &g, 4);
            recognize(&h).unwrap();
        }
    }
}
