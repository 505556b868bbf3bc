use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ahkit::ahp1;
use ahkit::assets::{sha256_hex, Catalog};
use ahkit::fusion::{parse_fusion_data, ActionOrder, FusionData, FusionRing};
use ahkit::graphs::GraphFile;
use ahkit::intertwiners::diagram::{evaluate_text, Diagram};
use ahkit::intertwiners::Calculus;
use ahkit::scalars::interval::set_start_precision;
use ahkit::verify::{self, Check, Outcome, VerifyError, Witness};

const SCHEMA: &str = "ahkit-report/1";

#[derive(Parser)]
#[command(name = "ahkit", version, about = "Exact checks for the AH+1 connections, intertwiner diagrams and AH fusion data")]
struct Cli {
    /// write a JSON report to this path
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// decimal digits the interval sign refinement starts from
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// wall-clock budget in seconds; exceeding it exits with status 3
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// read assets from this directory instead of the embedded copy
    #[arg(long, global = true)]
    assets: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// run one of the exact verification suites
    Verify {
        #[arg(value_enum)]
        what: Suite,
    },
    /// evaluate a diagram coefficient between two boundary paths
    Eval {
        /// diagram file, one slice per line
        diagram: PathBuf,
        top: String,
        bottom: String,
        /// negate the α cup relative to its normalisation
        #[arg(long)]
        cup_negated: bool,
        /// negate w relative to the shipped gauge
        #[arg(long)]
        w_negated: bool,
    },
    /// fusion rings, modules and bimodules
    Fusion {
        #[command(subcommand)]
        command: FusionCommand,
    },
    /// exact Perron–Frobenius weights of a graph (asset name or JSON file)
    FpWeights { graph: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Kappa,
    AlphaClasses,
    Gauge,
    AppendixUnitarity,
    Duality,
    Relations,
    Lemma,
}

#[derive(Args)]
struct Source {
    /// fusion data file; defaults to the shipped data
    file: Option<PathBuf>,
    /// restrict to one ring of the data
    #[arg(long)]
    ring: Option<String>,
}

#[derive(Subcommand)]
enum FusionCommand {
    /// check the axioms of every ring, module and bimodule
    Check {
        #[command(flatten)]
        source: Source,
    },
    /// list transitive based modules, or compare against the unpruned search
    Enumerate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        /// compare the pruned search with the unpruned one
        #[arg(long)]
        oracle: bool,
        /// search node budget
        #[arg(long, default_value_t = 100_000_000)]
        nodes: u64,
    },
    /// recompute the compatibility records of a data file
    Compat {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000_000)]
        nodes: u64,
    },
    /// algebra objects of every enumerated module
    Algebras {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        #[arg(long, default_value_t = 100_000_000)]
        nodes: u64,
    },
}

#[derive(Serialize)]
struct Input {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    command: String,
    inputs: Vec<Input>,
    checks: Vec<Check>,
    wall_time_s: f64,
}

struct Job {
    inputs: Vec<Input>,
    checks: Vec<Check>,
}

fn asset_inputs(cat: &Catalog, names: &[&str]) -> Vec<Input> {
    names
        .iter()
        .filter_map(|n| cat.entry(n).ok())
        .map(|e| Input { name: e.name.clone(), sha256: e.sha256.clone() })
        .collect()
}

fn read_file(p: &Path) -> Result<(String, Input), VerifyError> {
    let text = std::fs::read_to_string(p).map_err(|e| VerifyError::Input(format!("{}: {}", p.display(), e)))?;
    let input = Input { name: p.display().to_string(), sha256: sha256_hex(text.as_bytes()) };
    Ok((text, input))
}

const MODEL: &[&str] = &[ahp1::KAPPA, ahp1::ALPHA, ahp1::TABLE1, ahp1::TABLE2, ahp1::APPENDIX];

/// The data a fusion command works on: a file, or the shipped AH4 ring and
/// small rings.
fn fusion_source(cat: &Catalog, file: Option<&Path>, inputs: &mut Vec<Input>) -> Result<FusionData, VerifyError> {
    match file {
        Some(p) => {
            let (text, input) = read_file(p)?;
            inputs.push(input);
            Ok(parse_fusion_data(&text)?)
        }
        None => {
            inputs.extend(asset_inputs(cat, &["ah4.ring", "fusion.small-rings"]));
            let mut d = cat.fusion_data("fusion.small-rings")?;
            d.rings.insert(0, cat.fusion_ring("ah4.ring")?);
            Ok(d)
        }
    }
}

fn select_rings(d: &FusionData, ring: Option<&str>, default_small: bool) -> Result<Vec<FusionRing>, VerifyError> {
    match ring {
        Some(n) => Ok(vec![d.ring(n).cloned().ok_or_else(|| VerifyError::Input(format!("no ring named {}", n)))?]),
        None if default_small => Ok(d.rings.iter().filter(|r| r.name != "AH4").cloned().collect()),
        None => Ok(d.rings.clone()),
    }
}

fn run(cli: &Cli, cat: &Catalog) -> Result<Job, VerifyError> {
    let mut inputs = Vec::new();
    let checks = match &cli.command {
        Command::Verify { what } => {
            let (names, checks): (&[&str], _) = match what {
                Suite::Kappa => (&[ahp1::KAPPA], verify::kappa(cat)?),
                Suite::AppendixUnitarity => (&[ahp1::APPENDIX, ahp1::APPENDIX_PRINTED], verify::appendix_unitarity(cat)?),
                Suite::Gauge => (
                    &[ahp1::KAPPA, ahp1::ALPHA, ahp1::TABLE1, ahp1::TABLE2, ahp1::APPENDIX, ahp1::TABLE1_PRINTED, ahp1::TABLE2_PRINTED, ahp1::APPENDIX_PRINTED],
                    verify::gauge(cat)?,
                ),
                Suite::AlphaClasses => (MODEL, verify::alpha_classes(cat)?),
                Suite::Duality => (MODEL, verify::duality(cat)?),
                Suite::Relations => (MODEL, verify::relations(cat)?),
                Suite::Lemma => (MODEL, verify::lemma(cat)?),
            };
            inputs = asset_inputs(cat, names);
            checks
        }
        Command::Eval { diagram, top, bottom, cup_negated, w_negated } => {
            let (text, input) = read_file(diagram)?;
            inputs.push(input);
            inputs.extend(asset_inputs(cat, MODEL));
            let calc = Calculus::ahp1(cat)?.with_signs(*cup_negated, *w_negated)?;
            let d = Diagram::parse(&text)?;
            let c = evaluate_text(&calc, &d, top, bottom)?;
            vec![Check {
                id: "eval".into(),
                outcome: Outcome::Pass,
                detail: format!("{} consistent states", c.states),
                witnesses: vec![Witness::exact(format!("coefficient at ({}, {})", top, bottom), &c.value)],
            }]
        }
        Command::Fusion { command } => match command {
            FusionCommand::Check { source } => {
                let d = fusion_source(cat, source.file.as_deref(), &mut inputs)?;
                let mut out = Vec::new();
                if source.file.is_none() && source.ring.is_none() {
                    out.extend(verify::ah4(cat)?);
                }
                for r in select_rings(&d, source.ring.as_deref(), false)? {
                    out.extend(verify::ring_checks(&r));
                }
                for m in &d.modules {
                    let r = d.ring(&m.ring).ok_or_else(|| VerifyError::Input(format!("module {}: no ring {}", m.name, m.ring)))?;
                    let v = m.check(r, ActionOrder::Right);
                    let mut c = Check { id: format!("module.{}", m.name), outcome: if v.is_empty() { Outcome::Pass } else { Outcome::Fail }, detail: format!("rank {} over {}", m.rank(), m.ring), witnesses: Vec::new() };
                    c.witnesses.extend(v.iter().map(|x| Witness::text(x.axiom, x.detail.clone())));
                    out.push(c);
                }
                for (name, order) in &d.import_orders {
                    out.push(Check { id: format!("import.{}", name), outcome: Outcome::Pass, detail: format!("positional data valid in {:?} order", order), witnesses: Vec::new() });
                }
                for b in &d.bimodules {
                    let ring = |n: &str| d.ring(n).ok_or_else(|| VerifyError::Input(format!("bimodule {}: no ring {}", b.name, n)));
                    let v = b.check(ring(&b.left_ring)?, ring(&b.right_ring)?);
                    let mut c = Check { id: format!("bimodule.{}", b.name), outcome: if v.is_empty() { Outcome::Pass } else { Outcome::Fail }, detail: format!("rank {}, {}-{}", b.rank(), b.left_ring, b.right_ring), witnesses: Vec::new() };
                    c.witnesses.extend(v.iter().map(|x| Witness::text(x.axiom, x.detail.clone())));
                    out.push(c);
                }
                out
            }
            FusionCommand::Enumerate { source, max_rank, oracle, nodes } => {
                let d = fusion_source(cat, source.file.as_deref(), &mut inputs)?;
                let rings = select_rings(&d, source.ring.as_deref(), source.file.is_none())?;
                if *oracle {
                    verify::enumeration_oracle(&rings, *max_rank, *nodes)?
                } else {
                    let mut out = Vec::new();
                    for r in &rings {
                        out.extend(verify::modules(r, *max_rank, *nodes, false)?);
                    }
                    out
                }
            }
            FusionCommand::Compat { file, nodes } => {
                let d = match file {
                    Some(p) => {
                        let (text, input) = read_file(p)?;
                        inputs.push(input);
                        Some(parse_fusion_data(&text)?)
                    }
                    None => None,
                };
                verify::compat(d.as_ref(), *nodes)?
            }
            FusionCommand::Algebras { source, max_rank, nodes } => {
                let d = fusion_source(cat, source.file.as_deref(), &mut inputs)?;
                let mut out = Vec::new();
                if d.modules.is_empty() || source.ring.is_some() {
                    for r in select_rings(&d, source.ring.as_deref(), source.file.is_none())? {
                        out.extend(verify::modules(&r, *max_rank, *nodes, true)?);
                    }
                } else {
                    for m in &d.modules {
                        let r = d.ring(&m.ring).ok_or_else(|| VerifyError::Input(format!("module {}: no ring {}", m.name, m.ring)))?;
                        let objs: Vec<String> = ahkit::fusion::algebra_objects(m).iter().map(|o| verify::show_element(r, o)).collect();
                        out.push(Check { id: format!("algebras.{}", m.name), outcome: Outcome::Pass, detail: format!("over {}", m.ring), witnesses: vec![Witness::text("objects", objs.join(", "))] });
                    }
                }
                out
            }
        },
        Command::FpWeights { graph } => {
            let file: GraphFile = if cat.entry(graph).is_ok() {
                inputs = asset_inputs(cat, &[graph.as_str()]);
                cat.graph_file(graph)?
            } else {
                let (text, input) = read_file(Path::new(graph))?;
                inputs.push(input);
                serde_json::from_str(&text).map_err(|e| VerifyError::Input(format!("{}: {}", graph, e)))?
            };
            verify::graph_weights(&file)?
        }
    };
    Ok(Job { inputs, checks })
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let tag = match &c.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Flagged(_) => "FLAG",
            Outcome::Skipped(_) => "SKIP",
        };
        println!("{} {}: {}", tag, c.id, c.detail);
        if let Outcome::Flagged(n) | Outcome::Skipped(n) = &c.outcome {
            println!("    {}", n);
        }
        for w in &c.witnesses {
            if w.exact.is_empty() {
                continue;
            }
            match &w.decimal {
                Some(d) => println!("    {} = {} ≈ {}", w.label, w.exact, &d[..d.len().min(24)]),
                None => println!("    {}: {}", w.label, w.exact),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    set_start_precision(cli.precision.max(1));
    let start = Instant::now();
    let cat = match &cli.assets {
        Some(dir) => match Catalog::from_dir(dir) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}", e);
                return ExitCode::from(2);
            }
        },
        None => Catalog::embedded(),
    };
    let command_line: Vec<String> = std::env::args().skip(1).collect();
    let budget = cli.budget.map(Duration::from_secs_f64);

    let (tx, rx) = mpsc::channel();
    let cli = std::sync::Arc::new(cli);
    let worker_cli = cli.clone();
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || {
            let _ = tx.send(run(&worker_cli, &cat));
        })
        .expect("spawn worker");
    let result = match budget {
        Some(b) => match rx.recv_timeout(b) {
            Ok(r) => r,
            Err(_) => {
                eprintln!("error: wall-clock budget of {:.1} s exceeded", b.as_secs_f64());
                return ExitCode::from(3);
            }
        },
        None => rx.recv().expect("worker finished"),
    };

    let job = match result {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(if e.is_budget() { 3 } else { 2 });
        }
    };
    let mut checks = job.checks;
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    print_checks(&checks);
    let failed = checks.iter().filter(|c| c.outcome == Outcome::Fail).count();
    let flagged = checks.iter().filter(|c| matches!(c.outcome, Outcome::Flagged(_))).count();
    println!("{} checks: {} failed, {} flagged", checks.len(), failed, flagged);

    if let Some(path) = &cli.report {
        let report = Report { schema: SCHEMA, command: command_line.join(" "), inputs: job.inputs, checks, wall_time_s: start.elapsed().as_secs_f64() };
        let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return ExitCode::from(2);
        }
    }
    ExitCode::from(if failed > 0 { 1 } else { 0 })
}
