//! `meteor`: analyse graphs, decide equivalence of meteor graphs, replay
//! and verify move witnesses, and run the bounded matrix oracles.

mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use meteor_core::dynamics::{chain_to_se, elementary_sse, shift_equivalent, sse_chain, verify_chain};
use meteor_core::exec::Parallelism;
use meteor_core::gen::random_meteor;
use meteor_core::graph::Graph;
use meteor_core::matrix::IntMatrix;
use meteor_core::meteor::{
    canonicalize, closure_check, normalize, recognize, witness, witness_verify, ClosureVerdict, Witness,
};
use meteor_core::monoid::{monoid_equal_with, MonoidElement, Verdict, DEFAULT_MAX_ELEMENTS};
use meteor_core::moves::{apply, MoveRecord};
use meteor_core::talented::{leaf_set, talented_equal, TalentedElement};

use report::{InputDigest, Report, Status};

#[derive(Parser)]
#[command(name = "meteor", version, about = "Meteor graphs, Williams moves and shift equivalence oracles")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run searches on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Essentiality, components, cycles, meteor recognition and leaf sets.
    Analyze { graph: String },
    /// Decide equivalence of two meteor graphs.
    Equiv {
        graph1: String,
        graph2: String,
        /// Write a replay-verified move witness here.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Replay a JSON move file.
    Moves {
        graph: String,
        movefile: String,
        /// Check the meteor profile after every move.
        #[arg(long)]
        check_profile: bool,
        /// Write the resulting graph here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Bring a meteor graph to normal form.
    Normalize {
        graph: String,
        #[arg(long)]
        out: Option<String>,
        /// Write the emitted moves here.
        #[arg(long)]
        moves: Option<String>,
    },
    /// Bring a meteor graph to the canonical representative of its class.
    Canonicalize {
        graph: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        moves: Option<String>,
    },
    /// Replay a witness file and check its isomorphism onto the target.
    WitnessVerify { graph1: String, graph2: String, witness: String },
    /// Bounded search for a chain of elementary strong shift equivalences.
    Sse {
        matrix1: String,
        matrix2: String,
        #[arg(long, default_value_t = 2)]
        chain_bound: usize,
        #[arg(long, default_value_t = 2)]
        entry_bound: u64,
        #[arg(long, default_value_t = 3)]
        inner_dim_bound: usize,
    },
    /// Bounded search for a shift equivalence.
    Se {
        matrix1: String,
        matrix2: String,
        #[arg(long, default_value_t = 2)]
        lag_bound: u32,
        #[arg(long, default_value_t = 2)]
        entry_bound: u64,
    },
    /// Compare two elements of the graph monoid, or of the talented monoid
    /// when the literals carry shifts.
    Monoid {
        graph: String,
        expr1: String,
        expr2: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Print a random meteor graph.
    RandomMeteor {
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
    },
}

type CmdResult = Result<Report, String>;

struct Ctx {
    mode: Parallelism,
    seed: u64,
}

fn read(path: &str, report: &mut Report) -> Result<String, String> {
    let bytes = fs::read(path).map_err(|e| format!("{path}: {e}"))?;
    report.inputs.push(InputDigest::of(path, &bytes));
    String::from_utf8(bytes).map_err(|_| format!("{path}: not UTF-8"))
}

fn read_graph(path: &str, report: &mut Report) -> Result<Graph, String> {
    let text = read(path, report)?;
    Graph::parse(&text).map_err(|e| format!("{path}: {e}"))
}

fn read_matrix(path: &str, report: &mut Report) -> Result<IntMatrix, String> {
    let text = read(path, report)?;
    let m = IntMatrix::parse(&text).map_err(|e| format!("{path}: {e}"))?;
    if !m.is_square() {
        return Err(format!("{path}: matrix is not square"));
    }
    Ok(m)
}

fn write(path: &str, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{path}: {e}"))
}

fn names(g: &Graph, set: &BTreeSet<meteor_core::VertexId>) -> Vec<String> {
    set.iter().map(|&v| g.vertex_name(v)).collect()
}

fn profile_json(g: &Graph) -> Value {
    match recognize(g) {
        Ok(m) => json!({ "meteor": true, "profile": m.profile(), "raw_counts": m.raw_counts(m.v(), m.w()) }),
        Err(e) => json!({ "meteor": false, "reason": e.reason, "detail": e.detail }),
    }
}

fn analyze(path: &str) -> CmdResult {
    let mut r = Report::new("analyze");
    let g = read_graph(path, &mut r)?;
    r.line(format!("vertices: {}, edges: {}", g.vertex_count(), g.edge_count()));
    let essential = g.vertex_count() > 0 && g.is_essential();
    r.line(format!("essential: {}", if essential { "yes" } else { "no" }));
    let scc = g.scc_decomposition();
    let comps: Vec<Vec<String>> = scc
        .components
        .iter()
        .map(|c| c.iter().map(|&v| g.vertex_name(v)).collect())
        .collect();
    r.line(format!("strongly connected components: {}", comps.len()));
    let cycles: Vec<Vec<String>> = g
        .simple_cycles()
        .iter()
        .map(|c| c.vertices.iter().map(|&v| g.vertex_name(v)).collect())
        .collect();
    for c in &cycles {
        r.line(format!("cycle: {}", c.join(" -> ")));
    }
    let meteor = profile_json(&g);
    match recognize(&g) {
        Ok(m) => {
            let p = m.profile();
            r.line(format!("meteor: yes, p={}, q={}, period={}", p.p, p.q, p.period));
            r.line(format!("counts (rotated): {:?}, raw at default basepoints: {:?}", p.counts, m.raw_counts(m.v(), m.w())));
            r.line(format!("trails: {}", m.trails().len()));
        }
        Err(e) => r.line(format!("meteor: no ({})", e.reason)),
    }
    let mut leaves = BTreeMap::new();
    let mut singles = Vec::new();
    for &v in g.vertices() {
        let l = leaf_set(&g, &BTreeSet::from([v]));
        r.line(format!("leaves of {}: {{{}}}", g.vertex_name(v), names(&g, &l).join(", ")));
        leaves.insert(g.vertex_name(v), names(&g, &l));
        singles.push(l);
    }
    // R(A ∪ B) = R(A) ∪ R(B), so the classes are the unions of singleton
    // leaf sets.
    let mut classes: BTreeSet<BTreeSet<meteor_core::VertexId>> = BTreeSet::new();
    for l in singles {
        let mut grown: Vec<BTreeSet<_>> = classes.iter().map(|c| c.union(&l).copied().collect()).collect();
        grown.push(l);
        classes.extend(grown);
    }
    r.line(format!("archimedean classes of nonzero elements: {}", classes.len()));
    r.result = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "essential": essential,
        "components": comps,
        "cycles": cycles,
        "recognition": meteor,
        "leaf_sets": leaves,
        "archimedean_classes": classes.len(),
    });
    Ok(r)
}

fn equiv(p1: &str, p2: &str, witness_out: Option<&str>) -> CmdResult {
    let mut r = Report::new("equiv");
    let g1 = read_graph(p1, &mut r)?;
    let g2 = read_graph(p2, &mut r)?;
    match closure_check(&g1, &g2) {
        ClosureVerdict::Proceed => {}
        ClosureVerdict::NotApplicable { reason, detail } => {
            return Err(format!("{p1}: not a meteor graph ({reason}): {detail}"));
        }
        ClosureVerdict::Refused { reason, detail, definitive } => {
            if definitive {
                r.line(format!("not equivalent: {p2} is essential but not a meteor graph ({reason})"));
                r.result = json!({ "equivalent": false, "refused": reason, "detail": detail });
                return Ok(r);
            }
            return Err(format!("{p2}: not a meteor graph ({reason}): {detail}"));
        }
    }
    let (m1, m2) = (recognize(&g1).expect("checked"), recognize(&g2).expect("checked"));
    let (a, b) = (m1.profile(), m2.profile());
    let eq = a == b;
    r.line(format!("profile 1: p={} q={} counts={:?}", a.p, a.q, a.counts));
    r.line(format!("profile 2: p={} q={} counts={:?}", b.p, b.q, b.counts));
    r.line(format!("equivalent: {}", if eq { "yes" } else { "no" }));
    let mut result = json!({ "equivalent": eq, "profile1": a, "profile2": b });
    if let (true, Some(out)) = (eq, witness_out) {
        let w = witness(&g1, &g2).map_err(|e| format!("witness construction failed: {e}"))?;
        let w = w.ok_or("witness construction found no witness for equivalent graphs")?;
        witness_verify(&g1, &g2, &w).map_err(|e| format!("witness failed verification: {e}"))?;
        write(out, &serde_json::to_string_pretty(&w).expect("witness serializes"))?;
        r.line(format!("witness: {} moves, replay verified, written to {out}", w.moves.len()));
        result["witness"] = json!({ "path": out, "moves": w.moves.len(), "verified": true });
    }
    r.result = result;
    Ok(r)
}

fn read_moves(path: &str, r: &mut Report) -> Result<Vec<MoveRecord>, String> {
    let text = read(path, r)?;
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

fn moves_cmd(graph: &str, movefile: &str, check_profile: bool, out: Option<&str>) -> CmdResult {
    let mut r = Report::new("moves");
    let g = read_graph(graph, &mut r)?;
    let moves = read_moves(movefile, &mut r)?;
    let start = if check_profile {
        Some(recognize(&g).map_err(|e| format!("{graph}: {e}"))?.profile())
    } else {
        None
    };
    let mut cur = g;
    for (i, rec) in moves.iter().enumerate() {
        let (next, _) = apply(&cur, rec).map_err(|e| format!("move {i}: {e}"))?;
        if let Some(p) = &start {
            let now = recognize(&next).map_err(|e| format!("move {i}: result is not a meteor graph: {e}"))?;
            if now.profile() != *p {
                return Err(format!("move {i}: profile changed"));
            }
        }
        cur = next;
    }
    r.line(format!("replayed {} moves: {} vertices, {} edges", moves.len(), cur.vertex_count(), cur.edge_count()));
    if check_profile {
        r.line("profile preserved by every move");
    }
    if let Some(out) = out {
        write(out, &cur.to_text())?;
    } else if moves.is_empty() || !check_profile {
        r.line(cur.to_text().trim_end().to_owned());
    }
    r.result = json!({ "moves": moves.len(), "graph": cur.to_json(), "profile_checked": check_profile });
    Ok(r)
}

fn emit_form(
    r: &mut Report,
    g: &Graph,
    moves: &[MoveRecord],
    out: Option<&str>,
    moves_out: Option<&str>,
) -> Result<(), String> {
    if let Some(path) = moves_out {
        write(path, &serde_json::to_string_pretty(moves).expect("moves serialize"))?;
    }
    match out {
        Some(path) => write(path, &g.to_text())?,
        None => r.line(g.to_text().trim_end().to_owned()),
    }
    Ok(())
}

fn normalize_cmd(graph: &str, out: Option<&str>, moves_out: Option<&str>) -> CmdResult {
    let mut r = Report::new("normalize");
    let g = read_graph(graph, &mut r)?;
    let (h, moves) = normalize(&g).map_err(|e| format!("{graph}: {e}"))?;
    r.line(format!("normal form reached with {} moves", moves.len()));
    emit_form(&mut r, &h, &moves, out, moves_out)?;
    r.result = json!({ "moves": moves.len(), "graph": h.to_json(), "profile": profile_json(&h) });
    Ok(r)
}

fn canonicalize_cmd(graph: &str, out: Option<&str>, moves_out: Option<&str>) -> CmdResult {
    let mut r = Report::new("canonicalize");
    let g = read_graph(graph, &mut r)?;
    let c = canonicalize(&g).map_err(|e| format!("{graph}: {e}"))?;
    r.line(format!(
        "canonical form reached with {} moves; p={} q={} counts={:?}",
        c.moves.len(),
        c.profile.p,
        c.profile.q,
        c.profile.counts
    ));
    emit_form(&mut r, &c.graph, &c.moves, out, moves_out)?;
    r.result = json!({ "moves": c.moves.len(), "graph": c.graph.to_json(), "profile": c.profile });
    Ok(r)
}

fn witness_verify_cmd(p1: &str, p2: &str, wpath: &str) -> CmdResult {
    let mut r = Report::new("witness-verify");
    let g1 = read_graph(p1, &mut r)?;
    let g2 = read_graph(p2, &mut r)?;
    let text = read(wpath, &mut r)?;
    let w: Witness = serde_json::from_str(&text).map_err(|e| format!("{wpath}: {e}"))?;
    match witness_verify(&g1, &g2, &w) {
        Ok(()) => {
            r.line(format!("witness verified: {} moves", w.moves.len()));
            r.result = json!({ "valid": true, "moves": w.moves.len() });
        }
        Err(e) => {
            r.line(format!("witness rejected: {e}"));
            r.result = json!({ "valid": false, "error": e.to_string() });
        }
    }
    Ok(r)
}

fn sse_cmd(ctx: &Ctx, p1: &str, p2: &str, chain_bound: usize, entry_bound: u64, inner: usize) -> CmdResult {
    let mut r = Report::new("sse");
    let a = read_matrix(p1, &mut r)?;
    let b = read_matrix(p2, &mut r)?;
    r.bounds = json!({ "chain_bound": chain_bound, "entry_bound": entry_bound, "inner_dim_bound": inner });
    let chain = match elementary_sse(&a, &b, entry_bound, inner, ctx.mode) {
        _ if a == b => Some(Vec::new()),
        Some(pair) if chain_bound >= 1 => Some(vec![pair]),
        _ => sse_chain(&a, &b, chain_bound, entry_bound, inner, ctx.mode),
    };
    match chain {
        Some(chain) => {
            debug_assert!(verify_chain(&a, &b, &chain));
            let se = chain_to_se(&a, &chain).map_err(|e| e.to_string())?;
            r.line(format!("strong shift equivalence chain of length {}", chain.len()));
            for (i, pair) in chain.iter().enumerate() {
                r.line(format!("link {i}: R = {:?}, S = {:?}", pair.r.to_rows(), pair.s.to_rows()));
            }
            r.result = json!({ "found": true, "chain": chain, "se": se });
        }
        None => {
            r.line("no chain within bounds");
            r.status = Status::UndecidedAtBound;
            r.result = json!({ "found": false });
        }
    }
    Ok(r)
}

fn se_cmd(ctx: &Ctx, p1: &str, p2: &str, lag_bound: u32, entry_bound: u64) -> CmdResult {
    let mut r = Report::new("se");
    let a = read_matrix(p1, &mut r)?;
    let b = read_matrix(p2, &mut r)?;
    r.bounds = json!({ "lag_bound": lag_bound, "entry_bound": entry_bound });
    match shift_equivalent(&a, &b, lag_bound, entry_bound, ctx.mode) {
        Some(w) => {
            r.line(format!("shift equivalent at lag {}", w.lag));
            r.line(format!("R = {:?}", w.r.to_rows()));
            r.line(format!("S = {:?}", w.s.to_rows()));
            r.result = json!({ "found": true, "witness": w });
        }
        None => {
            r.line("no shift equivalence within bounds");
            r.status = Status::UndecidedAtBound;
            r.result = json!({ "found": false });
        }
    }
    Ok(r)
}

fn monoid_cmd(ctx: &Ctx, graph: &str, e1: &str, e2: &str, depth: usize) -> CmdResult {
    let mut r = Report::new("monoid");
    let g = read_graph(graph, &mut r)?;
    if TalentedElement::is_talented_literal(e1) || TalentedElement::is_talented_literal(e2) {
        let m = recognize(&g).map_err(|e| format!("talented literals need a meteor graph: {e}"))?;
        let x = TalentedElement::parse(&g, e1).map_err(|e| format!("first expression: {e}"))?;
        let y = TalentedElement::parse(&g, e2).map_err(|e| format!("second expression: {e}"))?;
        let eq = talented_equal(&m, &x, &y).map_err(|e| e.to_string())?;
        let verdict = if eq { Verdict::Equal } else { Verdict::UnequalWithinBound };
        r.line(format!("{} in the talented monoid (exact)", if eq { "equal" } else { "unequal" }));
        r.result = json!({ "monoid": "talented", "exact": true, "verdict": verdict, "equal": eq });
        return Ok(r);
    }
    let x = MonoidElement::parse(&g, e1).map_err(|e| format!("first expression: {e}"))?;
    let y = MonoidElement::parse(&g, e2).map_err(|e| format!("second expression: {e}"))?;
    r.bounds = json!({ "depth": depth, "max_elements": DEFAULT_MAX_ELEMENTS });
    let verdict = monoid_equal_with(&g, &x, &y, depth, DEFAULT_MAX_ELEMENTS, ctx.mode);
    let text = match verdict {
        Verdict::Equal => "equal",
        Verdict::UnequalWithinBound => "unequal (both flow closures exhausted)",
        Verdict::Unknown => {
            r.status = Status::UndecidedAtBound;
            "unknown at this depth"
        }
    };
    r.line(text);
    r.result = json!({ "monoid": "graph", "exact": verdict != Verdict::Unknown, "verdict": verdict });
    Ok(r)
}

fn random_meteor_cmd(ctx: &Ctx, max_vertices: usize) -> CmdResult {
    let mut r = Report::new("random-meteor");
    let mut rng = StdRng::seed_from_u64(ctx.seed);
    let g = random_meteor(&mut rng, max_vertices);
    r.line(g.to_text().trim_end().to_owned());
    r.result = json!({ "seed": ctx.seed, "graph": g.to_json(), "profile": profile_json(&g) });
    Ok(r)
}

fn run(cli: &Cli) -> CmdResult {
    let ctx = Ctx {
        mode: if cli.sequential { Parallelism::Sequential } else { Parallelism::Parallel },
        seed: cli.seed,
    };
    match &cli.cmd {
        Cmd::Analyze { graph } => analyze(graph),
        Cmd::Equiv { graph1, graph2, witness } => equiv(graph1, graph2, witness.as_deref()),
        Cmd::Moves { graph, movefile, check_profile, out } => moves_cmd(graph, movefile, *check_profile, out.as_deref()),
        Cmd::Normalize { graph, out, moves } => normalize_cmd(graph, out.as_deref(), moves.as_deref()),
        Cmd::Canonicalize { graph, out, moves } => canonicalize_cmd(graph, out.as_deref(), moves.as_deref()),
        Cmd::WitnessVerify { graph1, graph2, witness } => witness_verify_cmd(graph1, graph2, witness),
        Cmd::Sse { matrix1, matrix2, chain_bound, entry_bound, inner_dim_bound } => {
            sse_cmd(&ctx, matrix1, matrix2, *chain_bound, *entry_bound, *inner_dim_bound)
        }
        Cmd::Se { matrix1, matrix2, lag_bound, entry_bound } => se_cmd(&ctx, matrix1, matrix2, *lag_bound, *entry_bound),
        Cmd::Monoid { graph, expr1, expr2, depth } => monoid_cmd(&ctx, graph, expr1, expr2, *depth),
        Cmd::RandomMeteor { max_vertices } => random_meteor_cmd(&ctx, *max_vertices),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.finish(started.elapsed());
            println!("{}", report.render(cli.json));
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(msg) => {
            if cli.json {
                println!("{}", json!({ "error": msg }));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(1)
        }
    }
}
