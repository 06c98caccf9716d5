//! Bounded brute-force oracles on nonnegative integer matrices: elementary
//! strong shift equivalence, chains of them, and lagged shift equivalence.
//!
//! Every search reports absence at its bounds, never non-equivalence.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{find_map_first, map_collect, Parallelism};
use crate::graph::{Graph, VertexId};
use crate::matrix::{IntMatrix, MatrixError};
use crate::moves::{apply, MoveError, MoveRecord};

/// `A = RS`, `B = SR`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsePair {
    #[serde(rename = "R")]
    pub r: IntMatrix,
    #[serde(rename = "S")]
    pub s: IntMatrix,
}

/// `Aˡ = RS`, `Bˡ = SR`, `AR = RB`, `SA = BS`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeWitness {
    #[serde(rename = "R")]
    pub r: IntMatrix,
    #[serde(rename = "S")]
    pub s: IntMatrix,
    pub lag: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("move record does not match the graphs: {0}")]
    Inconsistent(String),
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    a.checked_mul(b).ok()
}

impl SsePair {
    pub fn verify(&self, a: &IntMatrix, b: &IntMatrix) -> bool {
        mul(&self.r, &self.s).as_ref() == Some(a) && mul(&self.s, &self.r).as_ref() == Some(b)
    }
}

impl SeWitness {
    pub fn verify(&self, a: &IntMatrix, b: &IntMatrix) -> bool {
        if self.lag == 0 {
            return false;
        }
        let (Ok(al), Ok(bl)) = (a.checked_pow(self.lag), b.checked_pow(self.lag)) else {
            return false;
        };
        mul(&self.r, &self.s).as_ref() == Some(&al)
            && mul(&self.s, &self.r).as_ref() == Some(&bl)
            && mul(a, &self.r).is_some()
            && mul(a, &self.r) == mul(&self.r, b)
            && mul(&self.s, a) == mul(b, &self.s)
    }
}

/// Verifies a chain `A = A₀ ∼ A₁ ∼ … ∼ Aₖ = B` link by link.
pub fn verify_chain(a: &IntMatrix, b: &IntMatrix, chain: &[SsePair]) -> bool {
    let mut cur = a.clone();
    for pair in chain {
        let Some(next) = mul(&pair.s, &pair.r) else { return false };
        if !pair.verify(&cur, &next) {
            return false;
        }
        cur = next;
    }
    cur == *b
}

/// All vectors in `[0, bound]ⁿ`, lexicographically.
fn box_vectors(n: usize, bound: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=bound).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Vectors `s ≤ caps` entrywise, lexicographically.
fn capped_vectors(caps: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=c).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn dot(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Factorisations `A = RS` with inner dimension `k` built as a sum of
/// outer products `R[:,l] ⊗ S[l,:]`, each bounded by what remains of `A`.
/// With a target `B`, entries of `SR` are checked as soon as both factors
/// are known.
struct Factorer<'a> {
    a: &'a IntMatrix,
    b: Option<&'a IntMatrix>,
    k: usize,
    bound: u64,
    columns: Vec<Vec<u64>>,
    /// Only generate factor pairs in nondecreasing order. Reordering the
    /// inner index permutes `SR`, so this keeps one factorisation per
    /// permutation class of results.
    ordered: bool,
}

#[derive(Clone)]
struct Partial {
    cols: Vec<Vec<u64>>,
    rows: Vec<Vec<u64>>,
    rem: Vec<u64>,
}

impl<'a> Factorer<'a> {
    fn new(a: &'a IntMatrix, b: Option<&'a IntMatrix>, k: usize, bound: u64) -> Self {
        Factorer { a, b, k, bound, columns: box_vectors(a.rows(), bound), ordered: b.is_none() }
    }

    fn start(&self) -> Partial {
        Partial { cols: Vec::new(), rows: Vec::new(), rem: self.a.as_slice().to_vec() }
    }

    /// Admissible `(column, row)` choices for the next inner index.
    fn choices(&self, st: &Partial) -> Vec<Partial> {
        let n = self.a.rows();
        let l = st.cols.len();
        // what the remaining outer products can still cover per entry
        let spare = (self.k - l - 1) as u64 * self.bound * self.bound;
        let mut out = Vec::new();
        for c in &self.columns {
            if self.ordered && l > 0 && *c < st.cols[l - 1] {
                continue;
            }
            let caps: Vec<u64> = (0..n)
                .map(|j| {
                    (0..n)
                        .filter(|&i| c[i] > 0)
                        .map(|i| st.rem[i * n + j] / c[i])
                        .fold(self.bound, u64::min)
                })
                .collect();
            for s in capped_vectors(&caps) {
                if self.ordered && l > 0 && *c == st.cols[l - 1] && s < st.rows[l - 1] {
                    continue;
                }
                let covered = (0..n).all(|i| (0..n).all(|j| st.rem[i * n + j] - c[i] * s[j] <= spare));
                if !covered {
                    continue;
                }
                if let Some(b) = self.b {
                    if dot(&s, c) != b.get(l, l) {
                        continue;
                    }
                    let clash = (0..l).any(|m| dot(&s, &st.cols[m]) != b.get(l, m) || dot(&st.rows[m], c) != b.get(m, l));
                    if clash {
                        continue;
                    }
                }
                let mut next = st.clone();
                for (i, &ci) in c.iter().enumerate() {
                    for (j, &sj) in s.iter().enumerate() {
                        next.rem[i * n + j] -= ci * sj;
                    }
                }
                next.cols.push(c.clone());
                next.rows.push(s);
                out.push(next);
            }
        }
        out
    }

    fn finish(&self, st: &Partial) -> Option<SsePair> {
        if st.rem.iter().any(|&x| x != 0) {
            return None;
        }
        let n = self.a.rows();
        let mut r = IntMatrix::zeros(n, self.k);
        let mut s = IntMatrix::zeros(self.k, n);
        for l in 0..self.k {
            for i in 0..n {
                r.set(i, l, st.cols[l][i]);
                s.set(l, i, st.rows[l][i]);
            }
        }
        Some(SsePair { r, s })
    }

    fn first(&self, st: &Partial) -> Option<SsePair> {
        if st.cols.len() == self.k {
            return self.finish(st);
        }
        self.choices(st).iter().find_map(|next| self.first(next))
    }

    fn all(&self, st: &Partial, out: &mut Vec<SsePair>) {
        if st.cols.len() == self.k {
            out.extend(self.finish(st));
            return;
        }
        for next in self.choices(st) {
            self.all(&next, out);
        }
    }
}

/// Searches `R`, `S` with entries at most `entry_bound` and `A = RS`,
/// `B = SR`. The inner dimension is the size of `B`, so `B` larger than
/// `inner_dim_bound` is out of bounds.
pub fn elementary_sse(
    a: &IntMatrix,
    b: &IntMatrix,
    entry_bound: u64,
    inner_dim_bound: usize,
    mode: Parallelism,
) -> Option<SsePair> {
    if !a.is_square() || !b.is_square() || b.rows() > inner_dim_bound || b.rows() == 0 {
        return None;
    }
    let f = Factorer::new(a, Some(b), b.rows(), entry_bound);
    let first_level = f.choices(&f.start());
    find_map_first(mode, &first_level, |st| f.first(st))
}

/// Matrices `SR` with `A = RS` within the bounds, with their pairs; at
/// least one representative per permutation class.
fn neighbours(a: &IntMatrix, entry_bound: u64, inner_dim_bound: usize, mode: Parallelism) -> Vec<(SsePair, IntMatrix)> {
    let mut out = Vec::new();
    for k in 1..=inner_dim_bound {
        let f = Factorer::new(a, None, k, entry_bound);
        let first_level = f.choices(&f.start());
        let found = map_collect(mode, &first_level, |st| {
            let mut v = Vec::new();
            f.all(st, &mut v);
            v
        });
        for pair in found.into_iter().flatten() {
            let b = pair.s.checked_mul(&pair.r).expect("bounded entries");
            out.push((pair, b));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest flattened form under simultaneous row and column permutation.
pub fn canonical_form(m: &IntMatrix) -> (usize, Vec<u64>) {
    let best = permutations(m.rows())
        .into_iter()
        .map(|p| m.permute(&p).as_slice().to_vec())
        .min()
        .unwrap_or_default();
    (m.rows(), best)
}

/// Reorders the inner index of `pair` so that `SR` becomes exactly
/// `target`, when `m = SR` is a permuted copy of it.
fn align(pair: &SsePair, m: &IntMatrix, target: &IntMatrix) -> Option<SsePair> {
    if m.rows() != target.rows() {
        return None;
    }
    let sorted = |x: &IntMatrix| {
        let mut v = x.as_slice().to_vec();
        v.sort_unstable();
        v
    };
    if sorted(m) != sorted(target) {
        return None;
    }
    let perm = permutations(m.rows()).into_iter().find(|p| m.permute(p) == *target)?;
    let (n, k) = (pair.r.rows(), m.rows());
    let mut r = IntMatrix::zeros(n, k);
    let mut s = IntMatrix::zeros(k, n);
    for (l, &pl) in perm.iter().enumerate() {
        for i in 0..n {
            r.set(i, pl, pair.r.get(i, l));
            s.set(pl, i, pair.s.get(l, i));
        }
    }
    Some(SsePair { r, s })
}

/// Breadth-first search over chains of elementary equivalences of length at
/// most `chain_bound`, skipping matrices already seen up to permutation.
/// Two permuted matrices have the same neighbours, so the pruning is exact.
pub fn sse_chain(
    a: &IntMatrix,
    b: &IntMatrix,
    chain_bound: usize,
    entry_bound: u64,
    inner_dim_bound: usize,
    mode: Parallelism,
) -> Option<Vec<SsePair>> {
    if !a.is_square() || !b.is_square() {
        return None;
    }
    if a == b {
        return Some(Vec::new());
    }
    let mut seen: BTreeSet<(usize, Vec<u64>)> = BTreeSet::from([canonical_form(a)]);
    let mut frontier: Vec<(IntMatrix, Vec<SsePair>)> = vec![(a.clone(), Vec::new())];
    for _ in 0..chain_bound {
        let expanded = map_collect(mode, &frontier, |(m, _)| neighbours(m, entry_bound, inner_dim_bound, Parallelism::Sequential));
        let mut next = Vec::new();
        for ((_, path), nbs) in frontier.iter().zip(expanded) {
            for (pair, m) in nbs {
                if let Some(pair) = align(&pair, &m, b) {
                    let mut chain = path.clone();
                    chain.push(pair);
                    return Some(chain);
                }
                if seen.insert(canonical_form(&m)) {
                    let mut chain = path.clone();
                    chain.push(pair);
                    next.push((m, chain));
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        frontier = next;
    }
    None
}

/// Matrices `R` (`n × k`) with `AR = RB`, first row fixed.
fn intertwiners(a: &IntMatrix, b: &IntMatrix, first_row: &[u64], bound: u64) -> Vec<IntMatrix> {
    let (n, k) = (a.rows(), b.rows());
    let rest = box_vectors((n - 1) * k, bound);
    let mut out = Vec::new();
    for tail in rest {
        let mut data = first_row.to_vec();
        data.extend(tail);
        let r = IntMatrix::from_vec(n, k, data).expect("sized");
        if mul(a, &r).is_some() && mul(a, &r) == mul(&r, b) {
            out.push(r);
        }
    }
    out
}

/// Completes `R` to a witness: columns of `S` solve `R s = Aˡ[:, j]`, then
/// the combinations are filtered by `SR = Bˡ` and `SA = BS`.
fn complete(a: &IntMatrix, b: &IntMatrix, al: &IntMatrix, bl: &IntMatrix, r: &IntMatrix, bound: u64, lag: u32) -> Option<SeWitness> {
    let (n, k) = (a.rows(), b.rows());
    let cands = box_vectors(k, bound);
    let per_col: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|j| {
            cands
                .iter()
                .filter(|s| (0..n).all(|i| dot(r.row(i), s) == al.get(i, j)))
                .cloned()
                .collect()
        })
        .collect();
    if per_col.iter().any(Vec::is_empty) {
        return None;
    }
    let mut chosen: Vec<&Vec<u64>> = Vec::with_capacity(n);
    fn go<'c>(
        j: usize,
        per_col: &'c [Vec<Vec<u64>>],
        chosen: &mut Vec<&'c Vec<u64>>,
        check: &dyn Fn(&[&Vec<u64>]) -> Option<SeWitness>,
        partial_ok: &dyn Fn(&[&Vec<u64>]) -> bool,
    ) -> Option<SeWitness> {
        if j == per_col.len() {
            return check(chosen);
        }
        for s in &per_col[j] {
            chosen.push(s);
            if partial_ok(chosen) {
                if let Some(w) = go(j + 1, per_col, chosen, check, partial_ok) {
                    return Some(w);
                }
            }
            chosen.pop();
        }
        None
    }
    // (SR)[i][m] = Σ_t S[i][t] R[t][m] only grows as columns t are added.
    let partial_ok = |cols: &[&Vec<u64>]| {
        (0..k).all(|i| {
            (0..k).all(|m| {
                let sum: u64 = cols.iter().enumerate().map(|(t, c)| c[i] * r.get(t, m)).sum();
                sum <= bl.get(i, m)
            })
        })
    };
    let check = |cols: &[&Vec<u64>]| {
        let mut s = IntMatrix::zeros(k, n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..k {
                s.set(i, j, c[i]);
            }
        }
        let w = SeWitness { r: r.clone(), s, lag };
        w.verify(a, b).then_some(w)
    };
    go(0, &per_col, &mut chosen, &check, &partial_ok)
}

/// Searches a lag `l ≤ lag_bound` and `R`, `S` with entries at most
/// `entry_bound` satisfying the shift-equivalence relations. `R` is
/// enumerated first and filtered by `AR = RB`.
pub fn shift_equivalent(
    a: &IntMatrix,
    b: &IntMatrix,
    lag_bound: u32,
    entry_bound: u64,
    mode: Parallelism,
) -> Option<SeWitness> {
    if !a.is_square() || !b.is_square() || a.rows() == 0 || b.rows() == 0 {
        return None;
    }
    let rows = box_vectors(b.rows(), entry_bound);
    for lag in 1..=lag_bound {
        let (Ok(al), Ok(bl)) = (a.checked_pow(lag), b.checked_pow(lag)) else {
            return None;
        };
        let hit = find_map_first(mode, &rows, |first| {
            intertwiners(a, b, first, entry_bound)
                .iter()
                .find_map(|r| complete(a, b, &al, &bl, r, entry_bound, lag))
        });
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Composes a chain of elementary equivalences into a shift equivalence
/// with lag equal to the chain length.
pub fn chain_to_se(a: &IntMatrix, chain: &[SsePair]) -> Result<SeWitness, MatrixError> {
    if chain.is_empty() {
        return Ok(SeWitness { r: a.clone(), s: IntMatrix::identity(a.rows()), lag: 1 });
    }
    let mut r = chain[0].r.clone();
    let mut s = chain[0].s.clone();
    for pair in &chain[1..] {
        r = r.checked_mul(&pair.r)?;
        s = pair.s.checked_mul(&s)?;
    }
    Ok(SeWitness { r, s, lag: chain.len() as u32 })
}

/// `R[u][y]` counts edges of `fine` from a copy of `u` to `y`, `S[y][x]`
/// marks copies, so that `A_coarse = RS` and `A_fine = SR` for an in-split.
fn split_pair(coarse: &Graph, fine: &Graph, proj: &BTreeMap<VertexId, VertexId>) -> SsePair {
    let (n, m) = (coarse.vertex_count(), fine.vertex_count());
    let mut r = IntMatrix::zeros(n, m);
    let mut s = IntMatrix::zeros(m, n);
    let mut copy_of: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&y, &x) in proj {
        copy_of.entry(x).or_insert(y);
    }
    for (i, &u) in coarse.vertices().iter().enumerate() {
        let Some(&uy) = copy_of.get(&u) else { continue };
        for (j, &y) in fine.vertices().iter().enumerate() {
            r.set(i, j, fine.multiplicity(uy, y));
        }
    }
    for (j, &y) in fine.vertices().iter().enumerate() {
        let x = proj[&y];
        s.set(j, coarse.index_of(x).expect("projection lands in coarse graph"), 1);
    }
    SsePair { r, s }
}

/// The elementary equivalence `A_before = RS`, `A_after = SR` realised by
/// one move: division and edge-distribution matrices for splits, the
/// same pair reversed for amalgamations.
pub fn move_to_matrices(record: &MoveRecord, before: &Graph, after: &Graph) -> Result<SsePair, DynamicsError> {
    let (h, produced) = apply(before, record)?;
    if h.adjacency_matrix() != after.adjacency_matrix() || h.vertices() != after.vertices() {
        return Err(DynamicsError::Inconsistent("replayed move does not give the stated graph".into()));
    }
    let out = record.kind.is_out();
    let (coarse, fine, proj): (&Graph, &Graph, BTreeMap<VertexId, VertexId>) = if record.kind.is_split() {
        let proj = produced
            .id_map
            .vertices
            .iter()
            .flat_map(|(&x, copies)| copies.iter().map(move |&y| (y, x)))
            .collect();
        (before, after, proj)
    } else {
        let proj = produced.id_map.vertices.iter().map(|(&y, xs)| (y, xs[0])).collect();
        (after, before, proj)
    };
    let pair = if out {
        let p = split_pair(&coarse.transpose(), &fine.transpose(), &proj);
        SsePair { r: p.s.transpose(), s: p.r.transpose() }
    } else {
        split_pair(coarse, fine, &proj)
    };
    let pair = if record.kind.is_split() { pair } else { SsePair { r: pair.s, s: pair.r } };
    if !pair.verify(&before.adjacency_matrix(), &after.adjacency_matrix()) {
        return Err(DynamicsError::Inconsistent("derived matrices do not factor the adjacency matrices".into()));
    }
    Ok(pair)
}

/// Translates a whole move sequence into a chain.
pub fn moves_to_chain(g: &Graph, moves: &[MoveRecord]) -> Result<Vec<SsePair>, DynamicsError> {
    let mut cur = g.clone();
    let mut chain = Vec::with_capacity(moves.len());
    for rec in moves {
        let (next, _) = apply(&cur, rec)?;
        chain.push(move_to_matrices(rec, &cur, &next)?);
        cur = next;
    }
    Ok(chain)
}

/// The pair `A_k = [[1, k], [k−1, 1]]`, `B_k = [[1, k(k−1)], [1, 1]]`,
/// shift equivalent for every `k ≥ 1`.
pub fn ak_bk(k: u64) -> (IntMatrix, IntMatrix) {
    let a = IntMatrix::from_rows(&[[1, k], [k - 1, 1]]).expect("2x2");
    let b = IntMatrix::from_rows(&[[1, k * (k - 1)], [1, 1]]).expect("2x2");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meteor::build;
    use crate::moves::{in_split, out_split};

    fn m(rows: &[&[u64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn trivial_elementary() {
        let one = m(&[&[1]]);
        let p = elementary_sse(&one, &one, 1, 1, Parallelism::Sequential).unwrap();
        assert_eq!(p.r, one);
        assert_eq!(p.s, one);
    }

    #[test]
    fn a1_b1() {
        let (a, b) = ak_bk(1);
        assert_eq!(a, m(&[&[1, 1], &[0, 1]]));
        for mode in [Parallelism::Sequential, Parallelism::Parallel] {
            let p = elementary_sse(&a, &b, 3, 3, mode).unwrap();
            assert!(p.verify(&a, &b));
        }
    }

    #[test]
    fn dumbbell_split_pair() {
        let g = build(1, 1, &[(0, 0, 0)]);
        let w = VertexId(1);
        let ins = g.in_edges(w).to_vec();
        let (h, rec) = in_split(&g, &BTreeMap::from([(w, vec![vec![ins[0]], vec![ins[1]]])])).unwrap();
        let pair = move_to_matrices(&rec, &g, &h).unwrap();
        assert_eq!((pair.r.rows(), pair.r.cols()), (2, 3));
        assert!(pair.verify(&g.adjacency_matrix(), &h.adjacency_matrix()));
        let v = VertexId(0);
        let outs = g.out_edges(v).to_vec();
        let (h2, rec2) = out_split(&g, &BTreeMap::from([(v, vec![vec![outs[0]], vec![outs[1]]])])).unwrap();
        assert!(move_to_matrices(&rec2, &g, &h2).unwrap().verify(&g.adjacency_matrix(), &h2.adjacency_matrix()));
        let chain = sse_chain(&g.adjacency_matrix(), &h.adjacency_matrix(), 2, 1, 3, Parallelism::Parallel).unwrap();
        assert!(verify_chain(&g.adjacency_matrix(), &h.adjacency_matrix(), &chain));
    }

    #[test]
    fn chains_and_se() {
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(sse_chain(&a, &a, 2, 2, 2, Parallelism::Sequential), Some(vec![]));
        let b = m(&[&[1, 2], &[0, 1]]);
        assert!(sse_chain(&a, &b, 2, 2, 2, Parallelism::Sequential).is_none());
        let se = shift_equivalent(&a, &a, 1, 1, Parallelism::Sequential).unwrap();
        assert!(se.verify(&a, &a));
        let id = SeWitness { r: a.clone(), s: IntMatrix::identity(2), lag: 1 };
        assert!(id.verify(&a, &a));
        let (a2, b2) = ak_bk(2);
        assert_eq!(a2, b2);
        assert!(shift_equivalent(&a2, &b2, 1, 2, Parallelism::Parallel).is_some());
        let (a1, b1) = ak_bk(1);
        let chain = sse_chain(&a1, &b1, 2, 1, 2, Parallelism::Parallel).unwrap();
        let w = chain_to_se(&a1, &chain).unwrap();
        assert!(w.verify(&a1, &b1));
        let t = shift_equivalent(&a1.transpose(), &b1.transpose(), 2, 2, Parallelism::Sequential);
        assert!(t.is_some());
    }

    #[test]
    fn canonical_forms() {
        let a = m(&[&[1, 0], &[1, 1]]);
        let b = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_eq!(permutations(3).len(), 6);
    }
}
