//! Text and JSON graph formats.
//!
//! Text: one construct per line, `vertex <name>` or
//! `edge <name> <src> -> <dst>`; blank lines and `#` comments are skipped.
//! JSON: `{"vertices": [names], "edges": [{"name", "src", "dst"}]}`.
//! Ids are assigned in declaration order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Edge, EdgeId, Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    vertices: Vec<String>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    name: String,
    src: String,
    dst: String,
}

#[derive(Default)]
struct Builder {
    vertex_ids: BTreeMap<String, VertexId>,
    vertex_labels: BTreeMap<VertexId, String>,
    edge_names: BTreeSet<String>,
    edge_labels: BTreeMap<EdgeId, String>,
    edges: Vec<Edge>,
}

impl Builder {
    fn vertex(&mut self, line: usize, name: &str) -> Result<(), ParseError> {
        if self.vertex_ids.contains_key(name) {
            return Err(err(line, format!("duplicate vertex {name:?}")));
        }
        let id = VertexId(self.vertex_ids.len() as u32);
        self.vertex_ids.insert(name.to_owned(), id);
        self.vertex_labels.insert(id, name.to_owned());
        Ok(())
    }

    fn edge(&mut self, line: usize, name: &str, src: &str, dst: &str) -> Result<(), ParseError> {
        if !self.edge_names.insert(name.to_owned()) {
            return Err(err(line, format!("duplicate edge {name:?}")));
        }
        let lookup = |v: &str| {
            self.vertex_ids
                .get(v)
                .copied()
                .ok_or_else(|| err(line, format!("unknown vertex {v:?}")))
        };
        let (src, dst) = (lookup(src)?, lookup(dst)?);
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { id, src, dst });
        self.edge_labels.insert(id, name.to_owned());
        Ok(())
    }

    fn finish(self) -> Graph {
        Graph::new(self.vertex_ids.values().copied(), self.edges)
            .expect("builder checks endpoints")
            .with_labels(self.vertex_labels, self.edge_labels)
    }
}

impl Graph {
    /// Parses either format; input whose first non-blank character is `{`
    /// is read as JSON.
    pub fn parse(text: &str) -> Result<Graph, ParseError> {
        if text.trim_start().starts_with('{') {
            Graph::parse_json(text)
        } else {
            Graph::parse_text(text)
        }
    }

    pub fn parse_text(text: &str) -> Result<Graph, ParseError> {
        let mut b = Builder::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks.as_slice() {
                ["vertex", name] => b.vertex(line, name)?,
                ["edge", name, src, "->", dst] => b.edge(line, name, src, dst)?,
                ["vertex", ..] => return Err(err(line, "expected `vertex <name>`")),
                ["edge", ..] => return Err(err(line, "expected `edge <name> <src> -> <dst>`")),
                [kw, ..] => return Err(err(line, format!("unknown directive {kw:?}"))),
                [] => unreachable!("blank lines skipped"),
            }
        }
        Ok(b.finish())
    }

    pub fn parse_json(text: &str) -> Result<Graph, ParseError> {
        let j: JsonGraph = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
        let mut b = Builder::default();
        for v in &j.vertices {
            b.vertex(0, v)?;
        }
        for e in &j.edges {
            b.edge(0, &e.name, &e.src, &e.dst)?;
        }
        Ok(b.finish())
    }

    /// Unique display names for every vertex and edge. Labels win; anything
    /// unlabelled or clashing falls back to its id form.
    fn export_names(&self) -> (BTreeMap<VertexId, String>, BTreeMap<EdgeId, String>) {
        fn uniquify<K: Ord + Copy>(
            items: impl Iterator<Item = (K, Option<String>, String)>,
        ) -> BTreeMap<K, String> {
            let items: Vec<_> = items.collect();
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for (_, label, _) in &items {
                if let Some(l) = label {
                    *counts.entry(l.clone()).or_default() += 1;
                }
            }
            let mut taken: BTreeSet<String> = BTreeSet::new();
            let mut out = BTreeMap::new();
            for (k, label, _) in &items {
                if let Some(l) = label.as_ref().filter(|l| counts[*l] == 1) {
                    taken.insert(l.clone());
                    out.insert(*k, l.clone());
                }
            }
            for (k, _, fallback) in items {
                if out.contains_key(&k) {
                    continue;
                }
                let mut name = fallback.clone();
                let mut n = 1;
                while taken.contains(&name) {
                    name = format!("{fallback}_{n}");
                    n += 1;
                }
                taken.insert(name.clone());
                out.insert(k, name);
            }
            out
        }
        let valid = |s: &str| !s.is_empty() && !s.contains(char::is_whitespace) && !s.contains('#') && s != "->";
        let vs = uniquify(self.vertices().iter().map(|&v| {
            (v, self.vertex_label(v).filter(|s| valid(s)).map(str::to_owned), v.to_string())
        }));
        let es = uniquify(self.edges().map(|e| {
            (e.id, self.edge_label(e.id).filter(|s| valid(s)).map(str::to_owned), e.id.to_string())
        }));
        (vs, es)
    }

    pub fn to_text(&self) -> String {
        let (vs, es) = self.export_names();
        let mut s = String::new();
        for v in self.vertices() {
            writeln!(s, "vertex {}", vs[v]).expect("string write");
        }
        for e in self.edges() {
            writeln!(s, "edge {} {} -> {}", es[&e.id], vs[&e.src], vs[&e.dst]).expect("string write");
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (vs, es) = self.export_names();
        let j = JsonGraph {
            vertices: self.vertices().iter().map(|v| vs[v].clone()).collect(),
            edges: self
                .edges()
                .map(|e| JsonEdge {
                    name: es[&e.id].clone(),
                    src: vs[&e.src].clone(),
                    dst: vs[&e.dst].clone(),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("plain data serialises")
    }
}
