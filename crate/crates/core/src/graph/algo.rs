//! Structural queries: reachability, SCCs, cycles and isomorphism.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{EdgeId, Graph, VertexId};

/// A simple closed path, stored in canonical rotation (minimal vertex first).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Position of `v` along the cycle.
    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// Number of steps along the cycle from `a` to `b`.
    pub fn distance(&self, a: VertexId, b: VertexId) -> Option<usize> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        Some((j + self.len() - i) % self.len())
    }

    /// Vertex `k` steps after `a`; `k` may be negative.
    pub fn step(&self, a: VertexId, k: i64) -> Option<VertexId> {
        let i = self.position(a)? as i64;
        let n = self.len() as i64;
        Some(self.vertices[(i + k).rem_euclid(n) as usize])
    }

    /// The cycle edge leaving `v`.
    pub fn edge_from(&self, v: VertexId) -> Option<EdgeId> {
        self.position(v).map(|i| self.edges[i])
    }

    /// The cycle edge entering `v`.
    pub fn edge_into(&self, v: VertexId) -> Option<EdgeId> {
        let i = self.position(v)?;
        Some(self.edges[(i + self.len() - 1) % self.len()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Components, each sorted, listed by ascending minimal vertex.
    pub components: Vec<Vec<VertexId>>,
    pub component_of: BTreeMap<VertexId, usize>,
    /// Edges of the condensation DAG as (from component, to component).
    pub condensation: BTreeSet<(usize, usize)>,
    nontrivial: Vec<bool>,
}

impl SccDecomposition {
    /// A component is nontrivial when it contains a cycle.
    pub fn is_nontrivial(&self, c: usize) -> bool {
        self.nontrivial[c]
    }

    pub fn nontrivial_components(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.components.len()).filter(|&c| self.nontrivial[c])
    }
}

impl Graph {
    /// Vertices reachable from `start` by directed paths of length ≥ 0.
    pub fn reachable_from(&self, start: impl IntoIterator<Item = VertexId>) -> BTreeSet<VertexId> {
        self.bfs(start, false)
    }

    /// Vertices from which some vertex of `target` is reachable.
    pub fn reaching(&self, target: impl IntoIterator<Item = VertexId>) -> BTreeSet<VertexId> {
        self.bfs(target, true)
    }

    fn bfs(&self, start: impl IntoIterator<Item = VertexId>, backward: bool) -> BTreeSet<VertexId> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut queue: VecDeque<VertexId> = VecDeque::new();
        for v in start {
            if self.contains_vertex(v) && seen.insert(v) {
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let next: Vec<VertexId> = if backward {
                self.predecessors(v).collect()
            } else {
                self.successors(v).collect()
            };
            for w in next {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Connected as an undirected graph. The empty graph counts as connected.
    pub fn is_weakly_connected(&self) -> bool {
        let Some(&first) = self.vertices().first() else {
            return true;
        };
        let mut seen = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(v) = stack.pop() {
            for w in self.successors(v).chain(self.predecessors(v)) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertex_count()
    }

    /// Strongly connected components by an iterative Tarjan traversal.
    pub fn scc_decomposition(&self) -> SccDecomposition {
        let n = self.vertex_count();
        let verts = self.vertices();
        let idx = |v: VertexId| self.index_of(v).expect("known vertex");
        let succ: Vec<Vec<usize>> = verts
            .iter()
            .map(|&v| self.successors(v).map(idx).collect())
            .collect();

        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut comps: Vec<Vec<usize>> = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut next)) = call.last_mut() {
                if *next < succ[v].len() {
                    let w = succ[v][*next];
                    *next += 1;
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps.sort_by_key(|c| c[0]);

        let components: Vec<Vec<VertexId>> =
            comps.iter().map(|c| c.iter().map(|&i| verts[i]).collect()).collect();
        let mut component_of = BTreeMap::new();
        for (ci, c) in components.iter().enumerate() {
            for &v in c {
                component_of.insert(v, ci);
            }
        }
        let mut condensation = BTreeSet::new();
        let mut nontrivial: Vec<bool> = components.iter().map(|c| c.len() > 1).collect();
        for e in self.edges() {
            let (a, b) = (component_of[&e.src], component_of[&e.dst]);
            if a != b {
                condensation.insert((a, b));
            } else if e.src == e.dst {
                nontrivial[a] = true;
            }
        }
        SccDecomposition { components, component_of, condensation, nontrivial }
    }

    /// Every simple cycle, once per rotation class, starting at its minimal
    /// vertex. Parallel edges give distinct cycles.
    pub fn simple_cycles(&self) -> Vec<Cycle> {
        let mut out = Vec::new();
        for &start in self.vertices() {
            let mut path_edges: Vec<EdgeId> = Vec::new();
            let mut path_vertices: Vec<VertexId> = vec![start];
            let mut on_path: BTreeSet<VertexId> = BTreeSet::from([start]);
            let mut cursor: Vec<usize> = vec![0];
            while let Some(pos) = cursor.last_mut() {
                let v = *path_vertices.last().expect("nonempty path");
                let outs = self.out_edges(v);
                if *pos >= outs.len() {
                    cursor.pop();
                    path_vertices.pop();
                    on_path.remove(&v);
                    path_edges.pop();
                    continue;
                }
                let e = outs[*pos];
                *pos += 1;
                let w = self.dst(e);
                if w == start {
                    let mut edges = path_edges.clone();
                    edges.push(e);
                    out.push(Cycle { edges, vertices: path_vertices.clone() });
                } else if w > start && !on_path.contains(&w) {
                    path_edges.push(e);
                    path_vertices.push(w);
                    on_path.insert(w);
                    cursor.push(0);
                }
            }
        }
        out
    }

    /// Searches for a vertex bijection `g → h` preserving every edge
    /// multiplicity. Colour refinement prunes, backtracking decides.
    pub fn is_isomorphic(&self, h: &Graph) -> Option<BTreeMap<VertexId, VertexId>> {
        if self.vertex_count() != h.vertex_count() || self.edge_count() != h.edge_count() {
            return None;
        }
        let (cg, ch) = refine_colours(self, h);
        let mut hist_g: BTreeMap<usize, usize> = BTreeMap::new();
        let mut hist_h: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &cg {
            *hist_g.entry(*c).or_default() += 1;
        }
        for c in &ch {
            *hist_h.entry(*c).or_default() += 1;
        }
        if hist_g != hist_h {
            return None;
        }

        let n = self.vertex_count();
        let mg = multiplicity_table(self);
        let mh = multiplicity_table(h);
        // Rarest colours first, ties broken by index.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (hist_g[&cg[i]], i));

        let mut assign = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if backtrack(0, &order, &cg, &ch, &mg, &mh, &mut assign, &mut used) {
            let gv = self.vertices();
            let hv = h.vertices();
            Some((0..n).map(|i| (gv[i], hv[assign[i]])).collect())
        } else {
            None
        }
    }

    /// Pairs the edges of `self` with those of `h` along a vertex
    /// isomorphism, matching parallel edges in ascending id order.
    pub fn edge_bijection(
        &self,
        h: &Graph,
        vmap: &BTreeMap<VertexId, VertexId>,
    ) -> Option<BTreeMap<EdgeId, EdgeId>> {
        if !is_isomorphism(self, h, vmap) {
            return None;
        }
        let mut out = BTreeMap::new();
        for &a in self.vertices() {
            let mut by_dst: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
            for &e in self.out_edges(a) {
                by_dst.entry(self.dst(e)).or_default().push(e);
            }
            for (b, es) in by_dst {
                let (ha, hb) = (vmap[&a], vmap[&b]);
                let hs = h.out_edges(ha).iter().filter(|&&f| h.dst(f) == hb);
                for (&e, &f) in es.iter().zip(hs) {
                    out.insert(e, f);
                }
            }
        }
        Some(out)
    }
}

/// Checks that `vmap` is a bijection `g⁰ → h⁰` preserving multiplicities.
pub fn is_isomorphism(g: &Graph, h: &Graph, vmap: &BTreeMap<VertexId, VertexId>) -> bool {
    if g.vertex_count() != h.vertex_count()
        || g.edge_count() != h.edge_count()
        || vmap.len() != g.vertex_count()
    {
        return false;
    }
    let image: BTreeSet<VertexId> = vmap.values().copied().collect();
    if image.len() != vmap.len() || !image.iter().all(|&v| h.contains_vertex(v)) {
        return false;
    }
    if !g.vertices().iter().all(|v| vmap.contains_key(v)) {
        return false;
    }
    let mut count: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
    for e in g.edges() {
        *count.entry((vmap[&e.src], vmap[&e.dst])).or_default() += 1;
    }
    for e in h.edges() {
        *count.entry((e.src, e.dst)).or_default() -= 1;
    }
    count.values().all(|&c| c == 0)
}

fn multiplicity_table(g: &Graph) -> Vec<Vec<u64>> {
    let n = g.vertex_count();
    let mut t = vec![vec![0u64; n]; n];
    for e in g.edges() {
        let i = g.index_of(e.src).expect("vertex");
        let j = g.index_of(e.dst).expect("vertex");
        t[i][j] += 1;
    }
    t
}

type Signature = (usize, Vec<(usize, u64)>, Vec<(usize, u64)>);

/// Joint 1-dimensional Weisfeiler–Leman refinement on both graphs, so the
/// colour ids are comparable across them.
fn refine_colours(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let initial = |x: &Graph| -> Vec<(usize, usize, u64)> {
        x.vertices()
            .iter()
            .map(|&v| (x.out_degree(v), x.in_degree(v), x.multiplicity(v, v)))
            .collect()
    };
    let mut palette: BTreeMap<(usize, usize, u64), usize> = BTreeMap::new();
    for key in initial(g).into_iter().chain(initial(h)) {
        let next = palette.len();
        palette.entry(key).or_insert(next);
    }
    let mut cg: Vec<usize> = initial(g).iter().map(|k| palette[k]).collect();
    let mut ch: Vec<usize> = initial(h).iter().map(|k| palette[k]).collect();
    let mut classes = palette.len();

    loop {
        let sig = |x: &Graph, col: &[usize]| -> Vec<Signature> {
            x.vertices()
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let mut outs: BTreeMap<usize, u64> = BTreeMap::new();
                    for w in x.successors(v) {
                        *outs.entry(col[x.index_of(w).expect("vertex")]).or_default() += 1;
                    }
                    let mut ins: BTreeMap<usize, u64> = BTreeMap::new();
                    for u in x.predecessors(v) {
                        *ins.entry(col[x.index_of(u).expect("vertex")]).or_default() += 1;
                    }
                    (col[i], outs.into_iter().collect(), ins.into_iter().collect())
                })
                .collect()
        };
        let sg = sig(g, &cg);
        let sh = sig(h, &ch);
        let mut pal: BTreeMap<&Signature, usize> = BTreeMap::new();
        for s in sg.iter().chain(sh.iter()) {
            let next = pal.len();
            pal.entry(s).or_insert(next);
        }
        let ng: Vec<usize> = sg.iter().map(|s| pal[s]).collect();
        let nh: Vec<usize> = sh.iter().map(|s| pal[s]).collect();
        let stable = pal.len() == classes;
        classes = pal.len();
        cg = ng;
        ch = nh;
        if stable {
            return (cg, ch);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    depth: usize,
    order: &[usize],
    cg: &[usize],
    ch: &[usize],
    mg: &[Vec<u64>],
    mh: &[Vec<u64>],
    assign: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&i) = order.get(depth) else {
        return true;
    };
    for j in 0..ch.len() {
        if used[j] || ch[j] != cg[i] || mg[i][i] != mh[j][j] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&k| {
            let l = assign[k];
            mg[i][k] == mh[j][l] && mg[k][i] == mh[l][j]
        });
        if !consistent {
            continue;
        }
        assign[i] = j;
        used[j] = true;
        if backtrack(depth + 1, order, cg, ch, mg, mh, assign, used) {
            return true;
        }
        used[j] = false;
        assign[i] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dumbbell() -> Graph {
        Graph::from_edge_list(2, &[(0, 0), (1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn scc_of_dumbbell() {
        let d = dumbbell().scc_decomposition();
        assert_eq!(d.components, vec![vec![VertexId(0)], vec![VertexId(1)]]);
        assert_eq!(d.condensation, BTreeSet::from([(0, 1)]));
        assert!(d.is_nontrivial(0) && d.is_nontrivial(1));
    }

    #[test]
    fn scc_of_cycle_and_path() {
        let c = Graph::from_edge_list(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(c.scc_decomposition().components.len(), 1);
        let p = Graph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        let d = p.scc_decomposition();
        assert_eq!(d.components.len(), 3);
        assert_eq!(d.nontrivial_components().count(), 0);
    }

    #[test]
    fn cycles() {
        let cs = dumbbell().simple_cycles();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.len() == 1));
        let dag = Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(dag.simple_cycles().is_empty());
        let tri = Graph::from_edge_list(3, &[(1, 2), (2, 0), (0, 1)]).unwrap();
        let cs = tri.simple_cycles();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].vertices, vec![VertexId(0), VertexId(1), VertexId(2)]);
        assert_eq!(cs[0].edges, vec![EdgeId(2), EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn three_cycle_example_has_three_cycles() {
        // source 3-cycle, a 2-cycle between, sink 4-cycle through vertex 5
        let g = Graph::from_edge_list(
            9,
            &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 3), (4, 5), (2, 5), (5, 6), (6, 7), (7, 8), (8, 5)],
        )
        .unwrap();
        let mut lens: Vec<usize> = g.simple_cycles().iter().map(Cycle::len).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 3, 4]);
    }

    #[test]
    fn cycle_navigation() {
        let tri = Graph::from_edge_list(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = &tri.simple_cycles()[0];
        assert_eq!(c.distance(VertexId(2), VertexId(1)), Some(2));
        assert_eq!(c.step(VertexId(0), -1), Some(VertexId(2)));
        assert_eq!(c.edge_into(VertexId(0)), Some(EdgeId(2)));
        assert_eq!(c.edge_from(VertexId(0)), Some(EdgeId(0)));
    }

    #[test]
    fn isomorphism_basics() {
        let d = dumbbell();
        let id = d.is_isomorphic(&d).unwrap();
        assert!(id.iter().all(|(a, b)| a == b));
        let relabelled = Graph::from_edge_list(2, &[(1, 1), (0, 0), (1, 0)]).unwrap();
        let m = d.is_isomorphic(&relabelled).unwrap();
        assert_eq!(m[&VertexId(0)], VertexId(1));
        let doubled = Graph::from_edge_list(2, &[(0, 0), (1, 1), (0, 1), (0, 1)]).unwrap();
        assert!(d.is_isomorphic(&doubled).is_none());
        let eb = d.edge_bijection(&relabelled, &m).unwrap();
        assert_eq!(eb[&EdgeId(2)], EdgeId(2));
        assert_eq!(eb[&EdgeId(0)], EdgeId(0));
        assert_eq!(eb[&EdgeId(1)], EdgeId(1));
    }

    #[test]
    fn isomorphism_needs_backtracking() {
        // Two 3-regular-ish graphs that colour refinement cannot split:
        // a 6-cycle versus two disjoint 3-cycles.
        let c6 = Graph::from_edge_list(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let two = Graph::from_edge_list(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(c6.is_isomorphic(&two).is_none());
        let shuffled = Graph::from_edge_list(6, &[(3, 0), (0, 5), (5, 1), (1, 4), (4, 2), (2, 3)]).unwrap();
        let m = c6.is_isomorphic(&shuffled).unwrap();
        assert!(is_isomorphism(&c6, &shuffled, &m));
    }

    #[test]
    fn weak_connectivity() {
        assert!(dumbbell().is_weakly_connected());
        let two = Graph::from_edge_list(2, &[(0, 0), (1, 1)]).unwrap();
        assert!(!two.is_weakly_connected());
    }
}
