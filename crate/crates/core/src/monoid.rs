//! The graph monoid `M_E`: the free commutative monoid on vertices modulo
//! `v = Σ_{e ∈ s⁻¹(v)} r(e)` for every vertex that is not a sink.
//!
//! Equality is semi-decided through the Confluence Lemma: `a = b` iff both
//! flow to a common element.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Parallelism};
use crate::graph::{Graph, VertexId};

/// Finitely supported `E⁰ → ℕ`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidElement(BTreeMap<VertexId, u64>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("{0} is not in the support")]
    NotInSupport(VertexId),
    #[error("{0} is a sink and cannot flow")]
    Sink(VertexId),
    #[error("{0} is not a vertex of the graph")]
    UnknownVertex(VertexId),
    #[error("coefficient overflow")]
    Overflow,
    #[error("a cycle is reachable from the support")]
    CycleReachable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("position {pos}: {msg}")]
pub struct LiteralError {
    pub pos: usize,
    pub msg: String,
}

impl MonoidElement {
    pub fn zero() -> Self {
        MonoidElement::default()
    }

    pub fn vertex(v: VertexId) -> Self {
        MonoidElement::from_terms([(v, 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (VertexId, u64)>) -> Self {
        let mut x = MonoidElement::zero();
        for (v, c) in terms {
            x.add_term(v, c);
        }
        x
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, v: VertexId) -> u64 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.0.iter().map(|(&v, &c)| (v, c))
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.0.keys().copied().collect()
    }

    pub fn add_term(&mut self, v: VertexId, c: u64) {
        if c > 0 {
            *self.0.entry(v).or_default() += c;
        }
    }

    fn checked_add_term(&mut self, v: VertexId, c: u64) -> Result<(), FlowError> {
        if c > 0 {
            let slot = self.0.entry(v).or_default();
            *slot = slot.checked_add(c).ok_or(FlowError::Overflow)?;
        }
        Ok(())
    }

    pub fn add(&self, other: &MonoidElement) -> MonoidElement {
        let mut out = self.clone();
        for (v, c) in other.terms() {
            out.add_term(v, c);
        }
        out
    }

    /// Total mass `Σ coefficients`.
    pub fn size(&self) -> u64 {
        self.0.values().sum()
    }

    /// Renders with the graph's vertex names, e.g. `2*v + w`.
    pub fn display(&self, g: &Graph) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(v, c)| if c == 1 { g.vertex_name(v) } else { format!("{c}*{}", g.vertex_name(v)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses `2*v + w` against the graph's vertex names. `0` is the zero
    /// element.
    pub fn parse(g: &Graph, text: &str) -> Result<MonoidElement, LiteralError> {
        let mut x = MonoidElement::zero();
        for (pos, coeff, name) in split_terms(text)? {
            if name == "0" && coeff == 1 {
                continue;
            }
            let v = g
                .vertex_by_name(name)
                .ok_or_else(|| LiteralError { pos, msg: format!("unknown vertex {name:?}") })?;
            x.add_term(v, coeff);
        }
        Ok(x)
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(v, c)| if c == 1 { v.to_string() } else { format!("{c}*{v}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Splits `c*x + y + …` into (offset, coefficient, atom) triples.
pub(crate) fn split_terms(text: &str) -> Result<Vec<(usize, u64, &str)>, LiteralError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in text.split('+') {
        let pos = offset + raw.len() - raw.trim_start().len();
        offset += raw.len() + 1;
        let term = raw.trim();
        if term.is_empty() {
            return Err(LiteralError { pos, msg: "empty term".into() });
        }
        let (coeff, atom) = match term.split_once('*') {
            Some((c, a)) => {
                let c: u64 = c
                    .trim()
                    .parse()
                    .map_err(|_| LiteralError { pos, msg: format!("bad coefficient {:?}", c.trim()) })?;
                (c, a.trim())
            }
            None => (1, term),
        };
        if atom.is_empty() {
            return Err(LiteralError { pos, msg: "missing generator".into() });
        }
        out.push((pos, coeff, atom));
    }
    Ok(out)
}

/// One application of the defining relation at `at`.
pub fn flow_step(g: &Graph, x: &MonoidElement, at: VertexId) -> Result<MonoidElement, FlowError> {
    if !g.contains_vertex(at) {
        return Err(FlowError::UnknownVertex(at));
    }
    if x.coeff(at) == 0 {
        return Err(FlowError::NotInSupport(at));
    }
    if g.is_sink(at) {
        return Err(FlowError::Sink(at));
    }
    let mut y = x.clone();
    let slot = y.0.get_mut(&at).expect("in support");
    *slot -= 1;
    if *slot == 0 {
        y.0.remove(&at);
    }
    for w in g.successors(at) {
        y.checked_add_term(w, 1)?;
    }
    Ok(y)
}

fn expand(g: &Graph, x: &MonoidElement) -> Vec<MonoidElement> {
    x.support()
        .into_iter()
        .filter(|&v| g.contains_vertex(v) && !g.is_sink(v))
        .filter_map(|v| flow_step(g, x, v).ok())
        .collect()
}

/// Outcome of a bounded closure computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub elements: BTreeSet<MonoidElement>,
    /// The last sweep added nothing new, so the set is the full closure.
    pub stabilized: bool,
}

/// Everything reachable from `x` in at most `depth` flow steps.
pub fn flow_successors(g: &Graph, x: &MonoidElement, depth: usize) -> BTreeSet<MonoidElement> {
    closure(g, x, depth, usize::MAX, Parallelism::Sequential).elements
}

/// Breadth-first closure, stopping at `depth` steps or once more than
/// `max_elements` elements are known.
pub fn closure(g: &Graph, x: &MonoidElement, depth: usize, max_elements: usize, mode: Parallelism) -> Closure {
    let mut seen: BTreeSet<MonoidElement> = BTreeSet::from([x.clone()]);
    let mut frontier = vec![x.clone()];
    for _ in 0..depth {
        if frontier.is_empty() || seen.len() > max_elements {
            break;
        }
        let layers = exec::map_collect(mode, &frontier, |y| expand(g, y));
        let mut next = Vec::new();
        for y in layers.into_iter().flatten() {
            if seen.insert(y.clone()) {
                next.push(y);
            }
        }
        frontier = next;
    }
    let stabilized = frontier.is_empty() || (depth > 0 && frontier.iter().all(|y| expand(g, y).iter().all(|z| seen.contains(z))));
    Closure { elements: seen, stabilized }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    UnequalWithinBound,
    Unknown,
}

/// Closures larger than this are abandoned with [`Verdict::Unknown`].
pub const DEFAULT_MAX_ELEMENTS: usize = 200_000;

/// Confluence search with a step bound.
pub fn monoid_equal(g: &Graph, a: &MonoidElement, b: &MonoidElement, depth: usize) -> Verdict {
    monoid_equal_with(g, a, b, depth, DEFAULT_MAX_ELEMENTS, Parallelism::default())
}

pub fn monoid_equal_with(
    g: &Graph,
    a: &MonoidElement,
    b: &MonoidElement,
    depth: usize,
    max_elements: usize,
    mode: Parallelism,
) -> Verdict {
    if a == b {
        return Verdict::Equal;
    }
    // The monoid is conical, so only 0 equals 0.
    if a.is_zero() || b.is_zero() {
        return Verdict::UnequalWithinBound;
    }
    let ca = closure(g, a, depth, max_elements, mode);
    let cb = closure(g, b, depth, max_elements, mode);
    if !ca.elements.is_disjoint(&cb.elements) {
        Verdict::Equal
    } else if ca.stabilized && cb.stabilized {
        Verdict::UnequalWithinBound
    } else {
        Verdict::Unknown
    }
}

/// Flows all mass into sinks. Exact when no cycle is reachable from the
/// support, in which case `a = b` iff the two forms coincide.
pub fn sink_normal_form(g: &Graph, x: &MonoidElement) -> Result<MonoidElement, FlowError> {
    for v in x.support() {
        if !g.contains_vertex(v) {
            return Err(FlowError::UnknownVertex(v));
        }
    }
    let reach = g.reachable_from(x.support());
    // Kahn's algorithm restricted to the reachable part.
    let mut indeg: BTreeMap<VertexId, usize> = reach.iter().map(|&v| (v, 0)).collect();
    for &v in &reach {
        for w in g.successors(v) {
            *indeg.get_mut(&w).expect("reachable") += 1;
        }
    }
    let mut ready: Vec<VertexId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut order = Vec::with_capacity(reach.len());
    while let Some(v) = ready.pop() {
        order.push(v);
        for w in g.successors(v) {
            let d = indeg.get_mut(&w).expect("reachable");
            *d -= 1;
            if *d == 0 {
                ready.push(w);
            }
        }
    }
    if order.len() != reach.len() {
        return Err(FlowError::CycleReachable);
    }
    let mut mass: BTreeMap<VertexId, u64> = x.0.clone();
    let mut out = MonoidElement::zero();
    for v in order {
        let c = mass.remove(&v).unwrap_or(0);
        if c == 0 {
            continue;
        }
        if g.is_sink(v) {
            out.checked_add_term(v, c)?;
            continue;
        }
        for w in g.successors(v) {
            let slot = mass.entry(w).or_default();
            *slot = slot.checked_add(c).ok_or(FlowError::Overflow)?;
        }
    }
    Ok(out)
}
