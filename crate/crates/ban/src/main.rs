//! Command-line front door: parse a network file, run one analysis, emit a
//! human-readable or JSON report. Exit codes: 0 success, 1 a verification
//! claim was refuted, 2 input error.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ban::config::{mask_to_indices, Config};
use ban::cycles::critical_cycles;
use ban::dot::to_dot;
use ban::dynamics::{AttractorKind, Transition, TransitionGraph, Variant};
use ban::expr::parse_network;
use ban::impact::{classify_impact, classify_sensitivity};
use ban::network::{Limits, Network};
use ban::search::{
    verify_lemmas_and_propositions, verify_size2_claims, verify_size3_claims, EnumerationSpec,
    VerificationLedger,
};
use ban::sequential::{normal_transitions, Verdict as SeqVerdict};

#[derive(Parser)]
#[command(name = "ban", version, about = "Boolean automata network analysis")]
struct Cli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Raise the soft size ceilings up to the hard ceiling of 20.
    #[arg(long, global = true, value_name = "N")]
    max_n: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Sig,
    Eig,
}

#[derive(Subcommand)]
enum Command {
    /// Print the signed structure, monotony and per-configuration instability.
    Analyze { file: String },
    /// Print the attractor decomposition of a transition graph.
    Attractors {
        file: String,
        #[arg(long, value_enum, default_value = "sig")]
        graph: GraphKind,
    },
    /// List every critical cycle with a witnessing configuration.
    CriticalCycles { file: String },
    /// List the normal (non-sequentialisable) synchronous transitions.
    Normal { file: String },
    /// Classify the impact of one synchronous transition.
    Impact {
        file: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Classify the network's synchronism sensitivity.
    Sensitivity { file: String },
    /// Run the verification battery over a whole domain of networks.
    Verify {
        #[arg(long)]
        size: usize,
        /// Restrict the domain to locally monotone networks.
        #[arg(long)]
        monotone: bool,
        /// Seed for sampled domains.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample this many networks instead of enumerating exhaustively.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Write a transition graph in DOT.
    ExportDot {
        file: String,
        #[arg(long, value_enum, default_value = "sig")]
        graph: GraphKind,
        /// Draw the graph augmented with one synchronous transition FROM,TO.
        #[arg(long, value_name = "FROM,TO")]
        add_transition: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = cli.max_n.map(Limits::with_max).unwrap_or_default();
    match run(&cli.command, cli.json, &limits) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load(file: &str) -> Result<Network, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
    parse_network(&text).map_err(|e| format!("{file}: {e}"))
}

fn parse_config(s: &str, n: usize) -> Result<Config, String> {
    let x: Config = s.parse().map_err(|e| format!("{s}: {e}"))?;
    if x.len() != n {
        return Err(format!("{s}: expected {n} bits, got {}", x.len()));
    }
    Ok(x)
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct ArcOut {
    from: usize,
    to: usize,
    sign: String,
}

#[derive(Serialize)]
struct ConfigRow {
    configuration: String,
    unstable: Vec<usize>,
    stable: bool,
}

#[derive(Serialize)]
struct AnalyzeOut {
    network: String,
    size: usize,
    locally_monotone: bool,
    non_monotone_arcs: Vec<(usize, usize)>,
    arcs: Vec<ArcOut>,
    configurations: Vec<ConfigRow>,
}

#[derive(Serialize)]
struct AttractorOut {
    index: usize,
    kind: String,
    configs: Vec<String>,
}

#[derive(Serialize)]
struct AttractorsOut {
    network: String,
    graph: String,
    attractors: Vec<AttractorOut>,
    transient: Vec<String>,
}

fn run(command: &Command, json: bool, limits: &Limits) -> Result<ExitCode, String> {
    match command {
        Command::Analyze { file } => {
            let net = load(file)?;
            let structure = net.signed_structure();
            let (monotone, bad) = net.is_locally_monotone();
            let mut arcs: Vec<ArcOut> = structure
                .arcs()
                .map(|((j, i), s)| ArcOut {
                    from: j,
                    to: i,
                    sign: format!("{s:?}"),
                })
                .collect();
            arcs.sort_by_key(|a| (a.from, a.to));
            let configurations: Vec<ConfigRow> = Config::all(net.size())
                .map(|x| {
                    let unstable = mask_to_indices(net.unstable_mask(&x));
                    ConfigRow {
                        configuration: x.to_string(),
                        stable: unstable.is_empty(),
                        unstable,
                    }
                })
                .collect();
            let out = AnalyzeOut {
                network: net.id(),
                size: net.size(),
                locally_monotone: monotone,
                non_monotone_arcs: bad,
                arcs,
                configurations,
            };
            if json {
                emit_json(&out)?;
            } else {
                println!("network {}  n = {}", out.network, out.size);
                println!(
                    "locally monotone: {}{}",
                    out.locally_monotone,
                    if out.non_monotone_arcs.is_empty() {
                        String::new()
                    } else {
                        format!("  (non-monotone arcs: {:?})", out.non_monotone_arcs)
                    }
                );
                println!("arcs:");
                for a in &out.arcs {
                    println!("  ({}, {}) {}", a.from, a.to, a.sign);
                }
                println!("configurations:");
                for row in &out.configurations {
                    let tag = if row.stable { "stable" } else { "unstable" };
                    println!("  {}  U = {:?}  {}", row.configuration, row.unstable, tag);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Attractors { file, graph } => {
            let net = load(file)?;
            let variant = match graph {
                GraphKind::Sig => Variant::Sig,
                GraphKind::Eig => Variant::Eig,
            };
            let g = TransitionGraph::build(&net, variant, limits).map_err(|e| e.to_string())?;
            let attractors: Vec<AttractorOut> = g
                .attractors()
                .iter()
                .enumerate()
                .map(|(i, a)| AttractorOut {
                    index: i,
                    kind: match a.kind {
                        AttractorKind::Stable => "stable".to_string(),
                        AttractorKind::Unstable => "unstable".to_string(),
                    },
                    configs: a.configs.iter().map(|x| x.to_string()).collect(),
                })
                .collect();
            let transient: Vec<String> = Config::all(net.size())
                .filter(|x| g.attractor_of(x).is_none())
                .map(|x| x.to_string())
                .collect();
            let out = AttractorsOut {
                network: net.id(),
                graph: variant.name().to_string(),
                attractors,
                transient,
            };
            if json {
                emit_json(&out)?;
            } else {
                println!(
                    "network {}  graph {}  {} attractors",
                    out.network,
                    out.graph,
                    out.attractors.len()
                );
                for a in &out.attractors {
                    println!(
                        "  attractor {} ({}, {} configurations): {}",
                        a.index,
                        a.kind,
                        a.configs.len(),
                        a.configs.join(" ")
                    );
                }
                println!(
                    "  transient ({}): {}",
                    out.transient.len(),
                    out.transient.join(" ")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CriticalCycles { file } => {
            let net = load(file)?;
            let cycles = critical_cycles(&net).map_err(|e| e.to_string())?;
            if json {
                emit_json(&cycles)?;
            } else {
                println!("{} critical cycles", cycles.len());
                for c in &cycles {
                    let sign = if c.sign > 0 { '+' } else { '-' };
                    println!(
                        "  length {} sign {}  arcs {:?}  witness {}",
                        c.length, sign, c.arcs, c.witness
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Normal { file } => {
            let net = load(file)?;
            let normals = normal_transitions(&net, limits).map_err(|e| e.to_string())?;
            if json {
                emit_json(&normals)?;
            } else {
                println!("{} normal transitions", normals.len());
                for v in &normals {
                    debug_assert!(matches!(v.verdict, SeqVerdict::Normal));
                    println!(
                        "  {} => {}  (size {})",
                        v.transition.from,
                        v.transition.to,
                        v.transition.changed().len()
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Impact { file, from, to } => {
            let net = load(file)?;
            let from = parse_config(from, net.size())?;
            let to = parse_config(to, net.size())?;
            let t = Transition::new(&net, from, to).map_err(|e| e.to_string())?;
            let report = classify_impact(&net, t, limits).map_err(|e| e.to_string())?;
            if json {
                emit_json(&report)?;
            } else {
                println!(
                    "{} => {}  impact {}",
                    report.transition.from,
                    report.transition.to,
                    report.label.name()
                );
                println!(
                    "  x recurrent: {}  y recurrent: {}",
                    report.x_recurrent, report.y_recurrent
                );
                println!(
                    "  attractors reachable from x: {:?}  from y: {:?}",
                    report.aa_x, report.aa_y
                );
                println!("  semantically silent: {}", report.semantically_silent);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sensitivity { file } => {
            let net = load(file)?;
            let report = classify_sensitivity(&net, limits).map_err(|e| e.to_string())?;
            if json {
                emit_json(&report)?;
            } else {
                println!(
                    "network {}  {} normal transitions  very sensitive: {}",
                    report.network, report.normal_count, report.very_sensitive
                );
                println!("  labels: {:?}", report.per_label);
                println!("  sensitivities: {:?}", report.sensitivities);
                for (a, b) in &report.merge_pairs {
                    println!(
                        "  merge pair: {} => {}  with  {} => {}",
                        a.from, a.to, b.from, b.to
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            size,
            monotone,
            seed,
            sample,
        } => {
            let spec = match sample {
                Some(count) => EnumerationSpec::sampled(*size, *monotone, *seed, *count),
                None => EnumerationSpec::exhaustive(*size, *monotone),
            };
            let mut ledgers: Vec<VerificationLedger> =
                vec![verify_lemmas_and_propositions(&spec, limits).map_err(|e| e.to_string())?];
            if sample.is_none() && *size == 2 && !monotone {
                ledgers.push(verify_size2_claims(limits).map_err(|e| e.to_string())?);
            }
            if sample.is_none() && *size == 3 && *monotone {
                ledgers.push(verify_size3_claims(limits).map_err(|e| e.to_string())?);
            }
            let passed = ledgers.iter().all(|l| l.passed());
            if json {
                emit_json(&ledgers)?;
            } else {
                for ledger in &ledgers {
                    println!(
                        "domain {}  {} networks scanned{}",
                        ledger.domain,
                        ledger.networks_scanned,
                        ledger
                            .seed
                            .map(|s| format!("  seed {s}"))
                            .unwrap_or_default()
                    );
                    for claim in &ledger.claims {
                        println!(
                            "  {:?} {}  checked {}  violations {}{}",
                            claim.verdict,
                            claim.id,
                            claim.checked,
                            claim.violations,
                            claim
                                .note
                                .as_deref()
                                .map(|n| format!("  ({n})"))
                                .unwrap_or_default()
                        );
                        for w in &claim.witnesses {
                            println!("    witness: {w}");
                        }
                    }
                }
                println!("{}", if passed { "PASSED" } else { "REFUTED" });
            }
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::ExportDot {
            file,
            graph,
            add_transition,
        } => {
            let net = load(file)?;
            let variant = match (graph, add_transition) {
                (GraphKind::Sig, None) => Variant::Sig,
                (GraphKind::Eig, None) => Variant::Eig,
                (GraphKind::Sig, Some(spec)) => {
                    let (from, to) = spec
                        .split_once(',')
                        .ok_or_else(|| format!("{spec}: expected FROM,TO"))?;
                    let from = parse_config(from, net.size())?;
                    let to = parse_config(to, net.size())?;
                    let t = Transition::new(&net, from, to).map_err(|e| e.to_string())?;
                    Variant::Augmented(t)
                }
                (GraphKind::Eig, Some(_)) => {
                    return Err("--add-transition applies to the sig graph only".to_string())
                }
            };
            let g = TransitionGraph::build(&net, variant, limits).map_err(|e| e.to_string())?;
            print!("{}", to_dot(&g));
            Ok(ExitCode::SUCCESS)
        }
    }
}
