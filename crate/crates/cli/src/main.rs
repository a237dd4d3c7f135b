//! Command line front end: parse graphs and set families, run the
//! classification and verification pipelines, and emit deterministic JSON
//! reports.
//!
//! Exit codes: 0 success (including negative decision results), 1 a
//! verification check failed, 2 usage or parse error, 3 resource exhaustion
//! (a legitimate outcome of the finite extension step).

use bgraph_core::error::Error;
use bgraph_core::gf2;
use bgraph_core::graph::{
    self, canonicalize, classify, enumerate_classes, equivalent, g_infinity_capped,
    graphs_isomorphic, Graph,
};
use bgraph_core::repr::Representation;
use bgraph_core::setfam::{self, FinitePair, SetFamily};
use bgraph_core::BitVec;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Read;
use std::time::Instant;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "bgraph", version, about = "Graph CCR algebra classification and verification")]
struct Cli {
    /// Worker threads for enumeration verbs.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphSource {
    /// Graph file path; '-' reads standard input.
    #[arg(value_name = "GRAPH", required_unless_present = "inline", conflicts_with = "inline")]
    path: Option<String>,
    /// Inline graph text; ';' separates lines.
    #[arg(long, value_name = "TEXT")]
    inline: Option<String>,
}

#[derive(Args)]
struct FamilySource {
    /// Family file path; '-' reads standard input.
    #[arg(value_name = "FAMILY", required_unless_present = "inline", conflicts_with = "inline")]
    path: Option<String >,
    /// Inline family text; ';' separates lines.
    #[arg(long, value_name = "TEXT")]
    inline: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the algebra class M_{2^k} ⊗ C^{2^l} of a graph.
    Classify {
        #[command(flatten)]
        graph: GraphSource,
    },
    /// Reduce a graph to canonical form, reporting the move script.
    Canonicalize {
        #[command(flatten)]
        graph: GraphSource,
        /// Write the canonical graph in DOT format to this path.
        #[arg(long, value_name = "PATH")]
        dot: Option<String>,
    },
    /// Decide whether two graphs have isomorphic algebras.
    Equiv {
        /// First graph file ('-' for standard input).
        left: String,
        /// Second graph file.
        right: String,
    },
    /// Exhaustively classify all labeled graphs on n vertices.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Build the graph on all nonempty vertex subsets.
    Ginf {
        #[command(flatten)]
        graph: GraphSource,
        /// Vertex-count cap for the input graph.
        #[arg(long, default_value_t = graph::G_INFINITY_LIMIT)]
        cap: usize,
        #[arg(long, value_name = "PATH")]
        dot: Option<String>,
    },
    /// Search for a graph isomorphism.
    Iso {
        left: String,
        right: String,
    },
    /// Run the set-family predicate battery.
    FamilyCheck {
        #[command(flatten)]
        family: FamilySource,
        /// Cap on |F| + |G| in the independence check.
        #[arg(long, default_value_t = 3)]
        max_selection: usize,
        /// Intersection-size threshold for the almost-disjointness check.
        #[arg(long, default_value_t = 1)]
        threshold: usize,
        /// Size bound on s for the separation check (defaults to exhaustive).
        #[arg(long)]
        s_bound: Option<usize>,
    },
    /// Compute the dual family.
    Dual {
        #[command(flatten)]
        family: FamilySource,
    },
    /// Build the tree-coded independent family at a given depth.
    Fk {
        #[arg(long)]
        depth: usize,
    },
    /// Build the bipartite incidence graph of a family and classify it.
    Bipartite {
        #[command(flatten)]
        family: FamilySource,
        #[arg(long, value_name = "PATH")]
        dot: Option<String>,
    },
    /// Greedily repair the separation property within an edit budget.
    Densify {
        #[command(flatten)]
        family: FamilySource,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 2)]
        max_selection: usize,
        /// Size bound on s for the separation reports.
        #[arg(long, default_value_t = 2)]
        s_bound: usize,
    },
    /// Extend a finite pair to a full-matrix pattern.
    Extend {
        #[command(flatten)]
        family: FamilySource,
        /// Member indices, comma separated (may be empty).
        #[arg(long, value_name = "LIST", default_value = "")]
        members: String,
        /// Universe elements, comma separated (may be empty).
        #[arg(long, value_name = "LIST", default_value = "")]
        elements: String,
    },
    /// Build a representation and run the verification report.
    Repr {
        /// Construction kind: pairs, canonical (graph input) or bipartite
        /// (family input).
        #[arg(long, value_name = "KIND")]
        kind: String,
        /// Input file path; '-' reads standard input.
        #[arg(value_name = "INPUT", required_unless_present = "inline", conflicts_with = "inline")]
        path: Option<String>,
        /// Inline input text; ';' separates lines.
        #[arg(long, value_name = "TEXT")]
        inline: Option<String>,
    },
    /// Timing harness for the heavy kernels.
    Bench {
        /// One of: gf2-rank, canonicalize, repr-verify.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct Report {
    schema_version: &'static str,
    verb: &'static str,
    inputs: Value,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.pass == Some(false) {
                std::process::exit(1);
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(match err {
                Error::ResourceExhausted(_) => 3,
                _ => 2,
            });
        }
    }
}

fn read_source(path: Option<&str>, inline: Option<&str>) -> Result<String, Error> {
    match (path, inline) {
        (_, Some(text)) => Ok(text.replace(';', "\n")),
        (Some("-"), None) => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Parse(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read '{path}': {e}"))),
        (None, None) => Err(Error::Parse("no input given".into())),
    }
}

fn load_graph(src: &GraphSource) -> Result<Graph, Error> {
    graph::parse_graph(&read_source(src.path.as_deref(), src.inline.as_deref())?)
}

fn load_graph_path(path: &str) -> Result<Graph, Error> {
    graph::parse_graph(&read_source(Some(path), None)?)
}

fn load_family(src: &FamilySource) -> Result<SetFamily, Error> {
    setfam::parse_family(&read_source(src.path.as_deref(), src.inline.as_deref())?)
}

fn graph_summary(g: &Graph) -> Value {
    json!({ "n": g.n(), "edges": g.edge_count() })
}

fn family_summary(fam: &SetFamily) -> Value {
    json!({ "universe_size": fam.universe_size(), "members": fam.len() })
}

fn subset_label(s: &BitVec) -> String {
    let elems: Vec<String> = s.ones().map(|i| i.to_string()).collect();
    format!("{{{}}}", elems.join(","))
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid index '{tok}'")))
        })
        .collect()
}

fn write_dot(path: &str, g: &Graph) -> Result<(), Error> {
    std::fs::write(path, graph::graph_to_dot(g))
        .map_err(|e| Error::Parse(format!("cannot write '{path}': {e}")))
}

fn run(cli: Cli) -> Result<Report, Error> {
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::Classify { graph } => {
            let g = load_graph(&graph)?;
            let class = classify(&g);
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "classify",
                inputs: json!({ "graph": graph_summary(&g) }),
                results: serde_json::to_value(&class).expect("class serializes"),
                pass: None,
            })
        }
        Command::Canonicalize { graph, dot } => {
            let g = load_graph(&graph)?;
            let form = canonicalize(&g);
            let canonical = Graph::canonical(g.n(), form.k);
            if let Some(path) = dot {
                write_dot(&path, &canonical)?;
            }
            let moves: Vec<Value> = form
                .moves
                .iter()
                .map(|m| json!({ "x": m.x, "s": m.s.ones().collect::<Vec<_>>() }))
                .collect();
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "canonicalize",
                inputs: json!({ "graph": graph_summary(&g) }),
                results: json!({
                    "k": form.k,
                    "l": form.l,
                    "moves": moves,
                    "canonical_graph": graph::graph_to_text(&canonical),
                }),
                pass: None,
            })
        }
        Command::Equiv { left, right } => {
            let g = load_graph_path(&left)?;
            let h = load_graph_path(&right)?;
            let (gk, hk) = (canonicalize(&g).k, canonicalize(&h).k);
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "equiv",
                inputs: json!({ "left": graph_summary(&g), "right": graph_summary(&h) }),
                results: json!({
                    "equivalent": equivalent(&g, &h),
                    "left_k": gk,
                    "right_k": hk,
                }),
                pass: None,
            })
        }
        Command::Enumerate { n } => {
            let table = enumerate_classes(n, jobs)?;
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "enumerate",
                inputs: json!({ "n": n }),
                results: serde_json::to_value(&table).expect("table serializes"),
                pass: None,
            })
        }
        Command::Ginf { graph, cap, dot } => {
            let g = load_graph(&graph)?;
            let out = g_infinity_capped(&g, cap)?;
            if let Some(path) = dot {
                write_dot(&path, &out)?;
            }
            let legend: Vec<String> = (1u64..1 << g.n())
                .map(|mask| {
                    let s = BitVec::from_indices(
                        g.n(),
                        &(0..g.n()).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>(),
                    );
                    subset_label(&s)
                })
                .collect();
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "ginf",
                inputs: json!({ "graph": graph_summary(&g) }),
                results: json!({
                    "vertices": out.n(),
                    "edges": out.edge_count(),
                    "graph": graph::graph_to_text(&out),
                    "legend": legend,
                }),
                pass: None,
            })
        }
        Command::Iso { left, right } => {
            let g = load_graph_path(&left)?;
            let h = load_graph_path(&right)?;
            let mapping = graphs_isomorphic(&g, &h)?;
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "iso",
                inputs: json!({ "left": graph_summary(&g), "right": graph_summary(&h) }),
                results: json!({
                    "isomorphic": mapping.is_some(),
                    "mapping": mapping,
                }),
                pass: None,
            })
        }
        Command::FamilyCheck {
            family,
            max_selection,
            threshold,
            s_bound,
        } => {
            let fam = load_family(&family)?;
            let independence = fam.is_independent(max_selection);
            let separating = match s_bound {
                Some(bound) => fam.separating_report(bound),
                None => {
                    if fam.universe_size() > setfam::SEPARATING_EXHAUSTIVE_LIMIT {
                        return Err(Error::LimitExceeded {
                            what: "separation-check universe (pass --s-bound)",
                            requested: fam.universe_size(),
                            limit: setfam::SEPARATING_EXHAUSTIVE_LIMIT,
                        });
                    }
                    fam.separating_report(fam.universe_size())
                }
            };
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "family-check",
                inputs: json!({ "family": family_summary(&fam), "max_selection": max_selection }),
                results: json!({
                    "independent": independence.independent,
                    "counterexample": independence.counterexample
                        .map(|(f, g)| json!({ "f": f, "g": g })),
                    "separating": {
                        "bound": separating.bound,
                        "satisfied": separating.satisfied,
                        "total": separating.total,
                        "holds": separating.is_separating(),
                    },
                    "noncovered": fam.is_noncovered(),
                    "almost_disjoint": {
                        "threshold": threshold,
                        "holds": fam.is_almost_disjoint(threshold),
                    },
                }),
                pass: None,
            })
        }
        Command::Dual { family } => {
            let fam = load_family(&family)?;
            let dual = fam.dual();
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "dual",
                inputs: json!({ "family": family_summary(&fam) }),
                results: json!({
                    "universe_size": dual.universe_size(),
                    "members": dual.len(),
                    "family": setfam::family_to_text(&dual),
                }),
                pass: None,
            })
        }
        Command::Fk { depth } => {
            let (fam, legend) = setfam::fk_family(depth)?;
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "fk",
                inputs: json!({ "depth": depth }),
                results: json!({
                    "universe_size": fam.universe_size(),
                    "members": fam.len(),
                    "family": setfam::family_to_text(&fam),
                    "legend": legend.iter().map(|ls| ls.to_string()).collect::<Vec<_>>(),
                }),
                pass: None,
            })
        }
        Command::Bipartite { family, dot } => {
            let fam = load_family(&family)?;
            let g = fam.bipartite_graph();
            if let Some(path) = dot {
                write_dot(&path, &g)?;
            }
            let class = classify(&g);
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "bipartite",
                inputs: json!({ "family": family_summary(&fam) }),
                results: json!({
                    "graph": graph::graph_to_text(&g),
                    "n": g.n(),
                    "class": serde_json::to_value(&class).expect("class serializes"),
                }),
                pass: None,
            })
        }
        Command::Densify {
            family,
            budget,
            max_selection,
            s_bound,
        } => {
            let fam = load_family(&family)?;
            let (out, report) = fam.densify(budget, max_selection, s_bound);
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "densify",
                inputs: json!({
                    "family": family_summary(&fam),
                    "budget": budget,
                    "max_selection": max_selection,
                    "s_bound": s_bound,
                }),
                results: json!({
                    "family": setfam::family_to_text(&out),
                    "edits_spent": report.edits_spent,
                    "satisfied_before": report.satisfied_before,
                    "satisfied_after": report.satisfied_after,
                    "pair_total": report.pair_total,
                    "edits": report.edits.iter()
                        .map(|(i, flips)| json!({ "member": i, "flipped": flips }))
                        .collect::<Vec<_>>(),
                    "unsatisfied": report.unsatisfied.len(),
                }),
                pass: None,
            })
        }
        Command::Extend {
            family,
            members,
            elements,
        } => {
            let fam = load_family(&family)?;
            let pair = FinitePair::new(parse_index_list(&members)?, parse_index_list(&elements)?);
            let pattern = fam.extend_to_full_matrix(&pair)?;
            let bipartite = fam.bipartite_graph();
            let mut vertices: Vec<usize> = pattern.pair.elements.clone();
            vertices.extend(pattern.pair.members.iter().map(|&x| fam.universe_size() + x));
            let class = classify(&bipartite.induced(&vertices));
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "extend",
                inputs: json!({
                    "family": family_summary(&fam),
                    "members": pair.members,
                    "elements": pair.elements,
                }),
                results: json!({
                    "members": pattern.pair.members,
                    "elements": pattern.pair.elements,
                    "matching": pattern.matching,
                    "split": pattern.split,
                    "induced_class": serde_json::to_value(&class).expect("class serializes"),
                }),
                pass: Some(class.l == 0),
            })
        }
        Command::Repr { kind, path, inline } => {
            let text = read_source(path.as_deref(), inline.as_deref())?;
            let (rep, inputs) = match kind.as_str() {
                "pairs" => {
                    let g = graph::parse_graph(&text)?;
                    let summary = graph_summary(&g);
                    (Representation::rep_pairs(&g)?, json!({ "graph": summary }))
                }
                "canonical" => {
                    let g = graph::parse_graph(&text)?;
                    let summary = graph_summary(&g);
                    (Representation::rep_canonical(&g)?, json!({ "graph": summary }))
                }
                "bipartite" => {
                    let fam = setfam::parse_family(&text)?;
                    let summary = family_summary(&fam);
                    (Representation::rep_bipartite(&fam)?, json!({ "family": summary }))
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown representation kind '{other}' (expected pairs, canonical or bipartite)"
                    )))
                }
            };
            let report = rep.report();
            let pass = report.pass;
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "repr",
                inputs,
                results: serde_json::to_value(&report).expect("report serializes"),
                pass: Some(pass),
            })
        }
        Command::Bench { suite, size, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (details, wall_ms) = match suite.as_str() {
                "gf2-rank" => {
                    let m = gf2::random_alternating(size, &mut rng);
                    let start = Instant::now();
                    let rank = m.rank();
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    (json!({ "n": size, "rank": rank }), ms)
                }
                "canonicalize" => {
                    let g = Graph::random(size, &mut rng);
                    let start = Instant::now();
                    let form = canonicalize(&g);
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    (
                        json!({ "n": size, "k": form.k, "moves": form.moves.len() }),
                        ms,
                    )
                }
                "repr-verify" => {
                    let g = Graph::random(size, &mut rng);
                    let start = Instant::now();
                    let rep = if size <= 6 {
                        Representation::rep_pairs(&g)?
                    } else {
                        Representation::rep_canonical(&g)?
                    };
                    let relations = rep.verify_relations();
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    (
                        json!({
                            "n": size,
                            "dim": rep.dim(),
                            "pass": relations.pass,
                            "pair_checks": size * size.saturating_sub(1) / 2,
                        }),
                        ms,
                    )
                }
                other => return Err(Error::Parse(format!("unknown bench suite '{other}'"))),
            };
            Ok(Report {
                schema_version: SCHEMA_VERSION,
                verb: "bench",
                inputs: json!({ "suite": suite, "size": size, "seed": seed }),
                results: json!({ "wall_ms": wall_ms, "details": details }),
                pass: None,
            })
        }
    }
}
