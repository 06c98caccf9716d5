//! The talented monoid `T_E`, generated by `v(i)` for `v ∈ E⁰`, `i ∈ ℤ`,
//! subject to `v(i) = Σ_{e ∈ s⁻¹(v)} r(e)(i+1)`, with `ℤ` acting by shifts.
//!
//! For arbitrary graphs this module computes leaf sets and Archimedean
//! classes. For meteor graphs it gives exact canonical forms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cycle, Edge, EdgeId, Graph, VertexId};
use crate::meteor::{lcm, Meteor};
use crate::monoid::{split_terms, FlowError, LiteralError, MonoidElement};
use crate::moves::{MoveKind, MoveRecord};

/// Finitely supported `E⁰ × ℤ → ℕ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TalentedElement(BTreeMap<(VertexId, i64), u64>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TalentedError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("{0} is not a vertex of the graph")]
    UnknownVertex(VertexId),
    #[error("empty window")]
    EmptyWindow,
    #[error("shift {shift} of {vertex} lies outside the window")]
    OutsideWindow { vertex: VertexId, shift: i64 },
    #[error("coefficient overflow")]
    Overflow,
}

impl TalentedElement {
    pub fn zero() -> Self {
        TalentedElement::default()
    }

    pub fn generator(v: VertexId, i: i64) -> Self {
        TalentedElement::from_terms([((v, i), 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((VertexId, i64), u64)>) -> Self {
        let mut x = TalentedElement::zero();
        for (k, c) in terms {
            x.add_term(k.0, k.1, c);
        }
        x
    }

    /// `Σ_{v ∈ E⁰} v(shift)`, the order unit at the given shift.
    pub fn unit(g: &Graph, shift: i64) -> Self {
        TalentedElement::from_terms(g.vertices().iter().map(|&v| ((v, shift), 1)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, v: VertexId, i: i64) -> u64 {
        self.0.get(&(v, i)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((VertexId, i64), u64)> + '_ {
        self.0.iter().map(|(&k, &c)| (k, c))
    }

    pub fn add_term(&mut self, v: VertexId, i: i64, c: u64) {
        if c > 0 {
            *self.0.entry((v, i)).or_default() += c;
        }
    }

    pub fn add(&self, other: &TalentedElement) -> TalentedElement {
        let mut out = self.clone();
        for ((v, i), c) in other.terms() {
            out.add_term(v, i, c);
        }
        out
    }

    /// `ⁿx`: every shift translated by `n`.
    pub fn shift(&self, n: i64) -> TalentedElement {
        TalentedElement(self.0.iter().map(|(&(v, i), &c)| ((v, i + n), c)).collect())
    }

    pub fn support_vertices(&self) -> BTreeSet<VertexId> {
        self.0.keys().map(|&(v, _)| v).collect()
    }

    pub fn shift_range(&self) -> Option<(i64, i64)> {
        let lo = self.0.keys().map(|k| k.1).min()?;
        let hi = self.0.keys().map(|k| k.1).max()?;
        Some((lo, hi))
    }

    pub fn display(&self, g: &Graph) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|((v, i), c)| {
                let atom = format!("{}({i})", g.vertex_name(v));
                if c == 1 {
                    atom
                } else {
                    format!("{c}*{atom}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses `2*v(0) + w(-3)`; a bare name means shift 0.
    pub fn parse(g: &Graph, text: &str) -> Result<TalentedElement, LiteralError> {
        let mut x = TalentedElement::zero();
        for (pos, coeff, atom) in split_terms(text)? {
            if atom == "0" && coeff == 1 {
                continue;
            }
            let (name, shift) = match atom.strip_suffix(')').and_then(|a| a.rsplit_once('(')) {
                Some((n, s)) => {
                    let s: i64 = s
                        .trim()
                        .parse()
                        .map_err(|_| LiteralError { pos, msg: format!("bad shift {s:?}") })?;
                    (n.trim(), s)
                }
                None => (atom, 0),
            };
            let v = g
                .vertex_by_name(name)
                .ok_or_else(|| LiteralError { pos, msg: format!("unknown vertex {name:?}") })?;
            x.add_term(v, shift, coeff);
        }
        Ok(x)
    }

    /// Whether the literal mentions a shift explicitly, i.e. is meant as a
    /// talented element rather than a plain monoid element.
    pub fn is_talented_literal(text: &str) -> bool {
        text.contains('(')
    }
}

impl fmt::Display for TalentedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|((v, i), c)| if c == 1 { format!("{v}({i})") } else { format!("{c}*{v}({i})") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One defining-relation rewrite of `at = (v, i)`, left to right.
pub fn talented_flow_step(
    g: &Graph,
    x: &TalentedElement,
    at: (VertexId, i64),
) -> Result<TalentedElement, TalentedError> {
    let (v, i) = at;
    if !g.contains_vertex(v) {
        return Err(FlowError::UnknownVertex(v).into());
    }
    if x.coeff(v, i) == 0 {
        return Err(FlowError::NotInSupport(v).into());
    }
    if g.is_sink(v) {
        return Err(FlowError::Sink(v).into());
    }
    let mut y = x.clone();
    let slot = y.0.get_mut(&(v, i)).expect("in support");
    *slot -= 1;
    if *slot == 0 {
        y.0.remove(&(v, i));
    }
    for w in g.successors(v) {
        y.add_term(w, i + 1, 1);
    }
    Ok(y)
}

/// The layers `lo..=hi` of the covering graph `Ē`, whose graph monoid is
/// `T_E`.
#[derive(Clone, Debug)]
pub struct Covering {
    pub graph: Graph,
    pub lo: i64,
    pub hi: i64,
    lift: BTreeMap<(VertexId, i64), VertexId>,
    project: BTreeMap<VertexId, (VertexId, i64)>,
}

impl Covering {
    pub fn lift_vertex(&self, v: VertexId, i: i64) -> Option<VertexId> {
        self.lift.get(&(v, i)).copied()
    }

    pub fn project_vertex(&self, u: VertexId) -> Option<(VertexId, i64)> {
        self.project.get(&u).copied()
    }

    pub fn lift(&self, x: &TalentedElement) -> Result<MonoidElement, TalentedError> {
        let mut m = MonoidElement::zero();
        for ((v, i), c) in x.terms() {
            let u = self.lift_vertex(v, i).ok_or(TalentedError::OutsideWindow { vertex: v, shift: i })?;
            m.add_term(u, c);
        }
        Ok(m)
    }

    pub fn project(&self, m: &MonoidElement) -> TalentedElement {
        TalentedElement::from_terms(m.terms().map(|(u, c)| (self.project[&u], c)))
    }
}

/// Vertices `(v, i)` for `i ∈ lo..=hi`; an edge `(e, i)` from `(s(e), i)` to
/// `(r(e), i+1)` whenever both layers are present.
pub fn covering_graph(g: &Graph, lo: i64, hi: i64) -> Result<Covering, TalentedError> {
    if lo > hi {
        return Err(TalentedError::EmptyWindow);
    }
    let n = g.vertex_count() as u32;
    let m = g.edge_count() as u32;
    let mut lift = BTreeMap::new();
    let mut project = BTreeMap::new();
    let mut vlabels = BTreeMap::new();
    let mut elabels = BTreeMap::new();
    for (layer, i) in (lo..=hi).enumerate() {
        for (k, &v) in g.vertices().iter().enumerate() {
            let id = VertexId(layer as u32 * n + k as u32);
            lift.insert((v, i), id);
            project.insert(id, (v, i));
            vlabels.insert(id, format!("{}({i})", g.vertex_name(v)));
        }
    }
    let mut edges = Vec::new();
    for (layer, i) in (lo..hi).enumerate() {
        for (k, e) in g.edges().enumerate() {
            let id = EdgeId(layer as u32 * m + k as u32);
            edges.push(Edge { id, src: lift[&(e.src, i)], dst: lift[&(e.dst, i + 1)] });
            elabels.insert(id, format!("{}({i})", g.edge_name(e.id)));
        }
    }
    let graph = Graph::new(project.keys().copied(), edges)
        .expect("covering graph is valid")
        .with_labels(vlabels, elabels);
    Ok(Covering { graph, lo, hi, lift, project })
}

/// `A^→ = r(s⁻¹(A)) ∪ {a ∈ A | a is a sink}`.
pub fn one_step(g: &Graph, a: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut out: BTreeSet<VertexId> = a.iter().filter(|&&v| g.is_sink(v)).copied().collect();
    for &v in a {
        out.extend(g.successors(v));
    }
    out
}

/// `R(A)`, the leaves of `A`: the union of the sets on the terminal cycle
/// of `A, A^→, A^{2→}, …`.
pub fn leaf_set(g: &Graph, a: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut seen: BTreeMap<BTreeSet<VertexId>, usize> = BTreeMap::new();
    let mut seq: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut cur: BTreeSet<VertexId> = a.iter().copied().filter(|&v| g.contains_vertex(v)).collect();
    loop {
        if let Some(&start) = seen.get(&cur) {
            return seq[start..].iter().flatten().copied().collect();
        }
        seen.insert(cur.clone(), seq.len());
        let next = one_step(g, &cur);
        seq.push(cur);
        cur = next;
    }
}

/// `r(s⁻¹(H)) ⊆ H`.
pub fn is_hereditary(g: &Graph, h: &BTreeSet<VertexId>) -> bool {
    h.iter().all(|&v| g.successors(v).all(|w| h.contains(&w)))
}

pub fn hereditary_closure(g: &Graph, x: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    g.reachable_from(x.iter().copied())
}

/// Smallest hereditary saturated set containing `x`. A set is saturated when
/// every non-sink vertex whose edges all land inside it belongs to it.
pub fn saturation(g: &Graph, x: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut h = hereditary_closure(g, x);
    loop {
        let add: Vec<VertexId> = g
            .vertices()
            .iter()
            .copied()
            .filter(|v| !h.contains(v) && !g.is_sink(*v) && g.successors(*v).all(|w| h.contains(&w)))
            .collect();
        if add.is_empty() {
            return h;
        }
        h.extend(add);
        h = hereditary_closure(g, &h);
    }
}

/// Vertices lying on some cycle entirely inside `b`.
pub fn cycle_vertices_within(g: &Graph, b: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let sub = g.induced(b);
    let scc = sub.scc_decomposition();
    scc.nontrivial_components()
        .flat_map(|c| scc.components[c].iter().copied())
        .collect()
}

/// `B` is the hereditary closure of a union of sinks and cycles.
pub fn is_closure_of_sinks_and_cycles(g: &Graph, b: &BTreeSet<VertexId>) -> bool {
    if !is_hereditary(g, b) {
        return false;
    }
    let mut seeds = cycle_vertices_within(g, b);
    seeds.extend(b.iter().copied().filter(|&v| g.is_sink(v)));
    hereditary_closure(g, &seeds) == *b
}

/// The leaf set `R(x)` naming the Archimedean class of `x`.
pub fn archimedean_class(g: &Graph, x: &TalentedElement) -> BTreeSet<VertexId> {
    leaf_set(g, &x.support_vertices())
}

/// `x ∈ ⟨y⟩` iff `R(x) ⊆ R(y)`.
pub fn in_order_ideal(g: &Graph, x: &TalentedElement, y: &TalentedElement) -> bool {
    archimedean_class(g, x).is_subset(&archimedean_class(g, y))
}

/// Cycles without exits: every vertex on them has out-degree 1.
pub fn minimal_periodic_orbits(g: &Graph) -> Vec<Cycle> {
    let scc = g.scc_decomposition();
    let mut out = Vec::new();
    for c in scc.nontrivial_components() {
        let comp = &scc.components[c];
        if comp.iter().all(|&v| g.out_degree(v) == 1) {
            let start = comp[0];
            let mut vertices = vec![start];
            let mut edges = Vec::new();
            let mut cur = start;
            loop {
                let e = g.out_edges(cur)[0];
                edges.push(e);
                cur = g.dst(e);
                if cur == start {
                    break;
                }
                vertices.push(cur);
            }
            out.push(Cycle { edges, vertices });
        }
    }
    out
}

/// The presentation `Σ_{i<p} a_i v(j−i) + Σ_{i<q} b_i w(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VWForm {
    pub j: i64,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

/// A vertex generator `u(0)` rewritten over the basepoints: v-coefficients
/// by shift and w-coefficients by residue mod q.
#[derive(Clone, Debug)]
struct Template {
    v: BTreeMap<i64, u64>,
    w: Vec<u64>,
}

impl Template {
    fn add_shifted(&mut self, other: &Template, s: i64) -> Result<(), TalentedError> {
        let q = self.w.len() as i64;
        for (&r, &c) in &other.v {
            let slot = self.v.entry(r + s).or_default();
            *slot = slot.checked_add(c).ok_or(TalentedError::Overflow)?;
        }
        for (k, &c) in other.w.iter().enumerate() {
            let idx = (k as i64 + s).rem_euclid(q) as usize;
            self.w[idx] = self.w[idx].checked_add(c).ok_or(TalentedError::Overflow)?;
        }
        Ok(())
    }
}

/// Rewriting data for one meteor graph with fixed basepoints.
pub struct VWContext<'a> {
    m: &'a Meteor,
    templates: BTreeMap<VertexId, Template>,
    /// `D_α` for every trail.
    through: Vec<i64>,
}

impl<'a> VWContext<'a> {
    pub fn new(m: &'a Meteor) -> Result<Self, TalentedError> {
        let mut ctx = VWContext {
            m,
            templates: BTreeMap::new(),
            through: m.trails().iter().map(|t| m.through_length(t) as i64).collect(),
        };
        for &u in m.graph().vertices() {
            ctx.template(u)?;
        }
        Ok(ctx)
    }

    pub fn meteor(&self) -> &Meteor {
        self.m
    }

    fn template(&mut self, u: VertexId) -> Result<Template, TalentedError> {
        if let Some(t) = self.templates.get(&u) {
            return Ok(t.clone());
        }
        let q = self.m.q();
        let mut t = Template { v: BTreeMap::new(), w: vec![0; q] };
        if u == self.m.v() {
            t.v.insert(0, 1);
        } else if let Some(d) = self.m.sink_cycle().distance(u, self.m.w()) {
            t.w[d % q] = 1;
        } else {
            // Mass at a source-cycle vertex or an interior vertex flows
            // forward; this terminates at v or on the sink cycle.
            let succ: Vec<VertexId> = self.m.graph().successors(u).collect();
            for x in succ {
                let tx = self.template(x)?;
                t.add_shifted(&tx, 1)?;
            }
        }
        self.templates.insert(u, t.clone());
        Ok(t)
    }

    /// `W(r)`: the w-mass released by pushing `v(r)` to `v(r+p)`.
    fn release(&self, r: i64) -> Vec<u64> {
        let q = self.m.q() as i64;
        let mut out = vec![0u64; q as usize];
        for &d in &self.through {
            out[(r + d).rem_euclid(q) as usize] += 1;
        }
        out
    }

    /// The presentation with `j` equal to the largest v-shift produced by
    /// the rewriting, before any lowering.
    pub fn raw_form(&self, x: &TalentedElement) -> Result<VWForm, TalentedError> {
        let (p, q) = (self.m.p(), self.m.q());
        let mut total = Template { v: BTreeMap::new(), w: vec![0; q] };
        for ((u, i), c) in x.terms() {
            let t = self.templates.get(&u).ok_or(TalentedError::UnknownVertex(u))?;
            let mut scaled = t.clone();
            for val in scaled.v.values_mut() {
                *val = val.checked_mul(c).ok_or(TalentedError::Overflow)?;
            }
            for val in scaled.w.iter_mut() {
                *val = val.checked_mul(c).ok_or(TalentedError::Overflow)?;
            }
            total.add_shifted(&scaled, i)?;
        }
        total.v.retain(|_, c| *c > 0);
        let Some(&j) = total.v.keys().next_back() else {
            return Ok(VWForm { j: 0, a: vec![0; p], b: total.w });
        };
        let mut a = vec![0u64; p];
        let mut b = total.w;
        let pi = p as i64;
        for (&r, &c) in &total.v {
            let pushes = (j - r) / pi;
            for s in 0..pushes {
                self.add_release(&mut b, r + s * pi, c)?;
            }
            let top = r + pushes * pi;
            a[(j - top) as usize] += c;
        }
        Ok(VWForm { j, a, b })
    }

    fn add_release(&self, b: &mut [u64], r: i64, c: u64) -> Result<(), TalentedError> {
        if c == 0 {
            return Ok(());
        }
        for (k, add) in self.release(r).into_iter().enumerate() {
            let t = add.checked_mul(c).ok_or(TalentedError::Overflow)?;
            b[k] = b[k].checked_add(t).ok_or(TalentedError::Overflow)?;
        }
        Ok(())
    }

    /// Raises the window top to `target ≥ form.j`.
    pub fn push_to(&self, form: &VWForm, target: i64) -> Result<VWForm, TalentedError> {
        let p = self.m.p();
        let mut f = form.clone();
        if f.a.iter().all(|&c| c == 0) {
            f.j = f.j.max(target);
            return Ok(f);
        }
        while f.j < target {
            let bottom = f.a[p - 1];
            self.add_release(&mut f.b, f.j - p as i64 + 1, bottom)?;
            f.a.rotate_right(1);
            f.j += 1;
        }
        Ok(f)
    }

    /// Lowers the window as far as the w-mass allows. The result is the
    /// unique presentation with minimal `j`, and `a₀ > 0` unless `a = 0`.
    pub fn lower(&self, form: &VWForm) -> VWForm {
        let p = self.m.p();
        let mut f = form.clone();
        if f.a.iter().all(|&c| c == 0) {
            f.j = 0;
            return f;
        }
        loop {
            let top = f.a[0];
            if top > 0 {
                let rel = self.release(f.j - p as i64);
                if rel.iter().zip(&f.b).any(|(&r, &b)| r.saturating_mul(top) > b) {
                    return f;
                }
                for (b, r) in f.b.iter_mut().zip(rel) {
                    *b -= r * top;
                }
            }
            f.a.rotate_left(1);
            f.j -= 1;
        }
    }

    /// The canonical presentation of `x`.
    pub fn vw_form(&self, x: &TalentedElement) -> Result<VWForm, TalentedError> {
        Ok(self.lower(&self.raw_form(x)?))
    }

    pub fn to_element(&self, f: &VWForm) -> TalentedElement {
        let mut x = TalentedElement::zero();
        for (i, &c) in f.a.iter().enumerate() {
            x.add_term(self.m.v(), f.j - i as i64, c);
        }
        for (i, &c) in f.b.iter().enumerate() {
            x.add_term(self.m.w(), i as i64, c);
        }
        x
    }

    /// Exact equality: push both presentations to a common window and
    /// compare coefficients.
    pub fn equal(&self, x: &TalentedElement, y: &TalentedElement) -> Result<bool, TalentedError> {
        let fx = self.raw_form(x)?;
        let fy = self.raw_form(y)?;
        let top = fx.j.max(fy.j);
        Ok(self.push_to(&fx, top)? == self.push_to(&fy, top)?)
    }

    /// `y ≤ x`, that is `x = y + z` for some `z ∈ T_E`.
    pub fn leq(&self, y: &TalentedElement, x: &TalentedElement) -> Result<bool, TalentedError> {
        let fx = self.raw_form(x)?;
        let fy = self.raw_form(y)?;
        let x_has_v = fx.a.iter().any(|&c| c > 0);
        let y_has_v = fy.a.iter().any(|&c| c > 0);
        if y_has_v && !x_has_v {
            return Ok(false);
        }
        let top = fx.j.max(fy.j);
        let mut px = self.push_to(&fx, top)?;
        let mut py = self.push_to(&fy, top)?;
        if px.a.iter().zip(&py.a).any(|(a, b)| b > a) {
            return Ok(false);
        }
        // Past the common top the v-parts rotate in step, and the b-gap
        // grows by a fixed vector every lcm(p, q) windows.
        let period = lcm(self.m.p(), self.m.q());
        let mut gaps: Vec<Vec<i128>> = Vec::with_capacity(2 * period + 1);
        for _ in 0..=2 * period {
            gaps.push(px.b.iter().zip(&py.b).map(|(&a, &b)| a as i128 - b as i128).collect());
            px = self.push_to(&px, px.j + 1)?;
            py = self.push_to(&py, py.j + 1)?;
        }
        for t in 0..period {
            let (now, later) = (&gaps[t], &gaps[t + period]);
            let ok = now.iter().zip(later).all(|(&g0, &g1)| g0 >= 0 || g1 > g0);
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Canonical presentation of `x` at the meteor's basepoints.
pub fn vw_form(m: &Meteor, x: &TalentedElement) -> Result<VWForm, TalentedError> {
    VWContext::new(m)?.vw_form(x)
}

/// Exact equality in `T_E` for a meteor graph.
pub fn talented_equal(m: &Meteor, x: &TalentedElement, y: &TalentedElement) -> Result<bool, TalentedError> {
    VWContext::new(m)?.equal(x, y)
}

/// Pushes all mass of `x` into the top layer `hi` of the covering graph
/// and reads it back. For essential graphs two elements are equal in `T_E`
/// iff these projections agree for some `hi`, and then for all larger ones.
pub fn covering_projection(g: &Graph, x: &TalentedElement, hi: i64) -> Result<TalentedElement, TalentedError> {
    let lo = x.shift_range().map_or(hi, |(lo, _)| lo.min(hi));
    let cov = covering_graph(g, lo, hi)?;
    let lifted = cov.lift(x)?;
    let pushed = crate::monoid::sink_normal_form(&cov.graph, &lifted)?;
    Ok(cov.project(&pushed))
}

/// Image of `x ∈ T_E` under the isomorphism `T_E → T_F` induced by a move
/// `E → F`.
pub fn transport(before: &Graph, after: &Graph, record: &MoveRecord, x: &TalentedElement) -> TalentedElement {
    let mut out = TalentedElement::zero();
    for ((u, i), c) in x.terms() {
        let copies = &record.id_map.vertices[&u];
        match record.kind {
            MoveKind::OutSplit => {
                for &cu in copies {
                    out.add_term(cu, i, c);
                }
            }
            MoveKind::InSplit | MoveKind::InAmalgamation => out.add_term(copies[0], i, c),
            MoveKind::OutAmalgamation => {
                if record.block_map.iter().all(|b| !b.contains(&u)) {
                    out.add_term(u, i, c);
                } else {
                    // Members of a block carry only part of the merged
                    // vertex's edges: rewrite u(i) through them, counting
                    // each edge once at the representative copy of its range.
                    for &e in before.out_edges(u) {
                        let r = before.dst(e);
                        if record.id_map.vertices[&r][0] == r {
                            out.add_term(r, i + 1, c);
                        }
                    }
                }
            }
        }
    }
    debug_assert!(out.support_vertices().iter().all(|v| after.contains_vertex(*v)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meteor::{build, recognize};

    fn set(xs: &[u32]) -> BTreeSet<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    fn t(v: u32, i: i64) -> TalentedElement {
        TalentedElement::generator(VertexId(v), i)
    }

    #[test]
    fn covering_basics() {
        let lp = Graph::from_edge_list(1, &[(0, 0)]).unwrap();
        let c = covering_graph(&lp, 0, 2).unwrap();
        assert_eq!(c.graph.vertex_count(), 3);
        assert_eq!(c.graph.edge_count(), 2);
        assert!(c.graph.simple_cycles().is_empty());
        let flat = covering_graph(&lp, 5, 5).unwrap();
        assert_eq!(flat.graph.edge_count(), 0);
        assert!(matches!(covering_graph(&lp, 1, 0), Err(TalentedError::EmptyWindow)));
    }

    #[test]
    fn flow_and_shift() {
        let g = build(1, 1, &[(0, 0, 0)]);
        let y = talented_flow_step(&g, &t(0, 0), (VertexId(0), 0)).unwrap();
        assert_eq!(y, t(0, 1).add(&t(1, 1)));
        let x = t(0, 2).add(&t(1, -1));
        let a = talented_flow_step(&g, &x, (VertexId(0), 2)).unwrap().shift(3);
        let b = talented_flow_step(&g, &x.shift(3), (VertexId(0), 5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(x.shift(2).shift(-5), x.shift(-3));
    }

    #[test]
    fn leaves_on_meteor() {
        // source loop 0, sink loop 1, trail 0 → 2 → 1
        let g = build(1, 1, &[(0, 1, 0)]);
        assert_eq!(leaf_set(&g, &set(&[0])), set(&[0, 1, 2]));
        assert_eq!(leaf_set(&g, &set(&[2])), set(&[1]));
        assert_eq!(leaf_set(&g, &set(&[])), set(&[]));
        assert!(is_hereditary(&g, &set(&[1])));
        assert!(!is_hereditary(&g, &set(&[0])));
        let d = build(1, 1, &[(0, 0, 0)]);
        assert_eq!(saturation(&d, &set(&[1])), set(&[1]));
    }

    #[test]
    fn leaves_with_sinks() {
        // 0 → 1 → 2 with 2 a sink
        let g = Graph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(leaf_set(&g, &set(&[0])), set(&[2]));
        assert!(is_closure_of_sinks_and_cycles(&g, &set(&[2])));
        assert!(!is_closure_of_sinks_and_cycles(&g, &set(&[1, 2])));
        assert_eq!(saturation(&g, &set(&[2])), set(&[0, 1, 2]));
    }

    #[test]
    fn periodic_orbits() {
        let g = build(2, 3, &[(0, 0, 0)]);
        let orbits = minimal_periodic_orbits(&g);
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].len(), 3);
        let exit = Graph::from_edge_list(2, &[(0, 0), (0, 1), (1, 0)]).unwrap();
        assert!(minimal_periodic_orbits(&exit).is_empty());
        let two = Graph::from_edge_list(2, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(minimal_periodic_orbits(&two).len(), 2);
    }

    #[test]
    fn dumbbell_forms() {
        let m = recognize(&build(1, 1, &[(0, 0, 0)])).unwrap();
        let ctx = VWContext::new(&m).unwrap();
        let f = ctx.vw_form(&t(0, 0)).unwrap();
        assert_eq!(f, VWForm { j: 0, a: vec![1], b: vec![0] });
        let g = ctx.vw_form(&t(0, 1).add(&t(1, 1))).unwrap();
        assert_eq!(g, f);
        assert_eq!(ctx.raw_form(&t(0, 1).add(&t(1, 1))).unwrap(), VWForm { j: 1, a: vec![1], b: vec![1] });
        assert!(ctx.equal(&t(0, 0), &t(0, 1).add(&t(1, 1))).unwrap());
        assert!(!ctx.equal(&t(0, 0), &t(0, 1)).unwrap());
        assert!(ctx.equal(&t(1, 0), &t(1, 1)).unwrap());
        assert_eq!(ctx.vw_form(&t(1, 5)).unwrap(), VWForm { j: 0, a: vec![0], b: vec![1] });
    }

    #[test]
    fn sink_residues() {
        let m = recognize(&build(1, 2, &[(0, 0, 0)])).unwrap();
        let ctx = VWContext::new(&m).unwrap();
        assert!(ctx.equal(&t(1, 0), &t(1, 2)).unwrap());
        assert!(!ctx.equal(&t(1, 0), &t(1, 1)).unwrap());
        // the other sink vertex is one step before w
        assert!(ctx.equal(&t(2, 0), &t(1, 1)).unwrap());
    }

    #[test]
    fn order() {
        let m = recognize(&build(1, 1, &[(0, 0, 0)])).unwrap();
        let ctx = VWContext::new(&m).unwrap();
        assert!(ctx.leq(&t(1, 0), &t(0, 0)).unwrap());
        assert!(!ctx.leq(&t(0, 0), &t(1, 0)).unwrap());
        assert!(ctx.leq(&t(0, 3), &t(0, 0)).unwrap());
        assert!(!ctx.leq(&t(0, 0), &t(0, 3)).unwrap());
        let two_w = t(1, 0).add(&t(1, 0));
        assert!(ctx.leq(&two_w, &t(0, 0)).unwrap());
    }

    #[test]
    fn literals() {
        let g = Graph::parse("vertex v\nvertex w\nedge a v -> v\nedge b w -> w\nedge t v -> w\n").unwrap();
        let x = TalentedElement::parse(&g, "2*v(0) + w(-3) + w").unwrap();
        assert_eq!(x.coeff(VertexId(0), 0), 2);
        assert_eq!(x.coeff(VertexId(1), -3), 1);
        assert_eq!(x.coeff(VertexId(1), 0), 1);
        assert_eq!(x.display(&g), "2*v(0) + w(-3) + w(0)");
        assert!(TalentedElement::parse(&g, "v(x)").is_err());
    }

    #[test]
    fn projection_matches_forms() {
        let m = recognize(&build(1, 1, &[(0, 0, 0)])).unwrap();
        let g = m.graph();
        let a = covering_projection(g, &t(0, 0), 4).unwrap();
        let b = covering_projection(g, &t(0, 1).add(&t(1, 1)), 4).unwrap();
        assert_eq!(a, b);
        let c = covering_projection(g, &t(0, 1), 4).unwrap();
        assert_ne!(a, c);
    }
}
