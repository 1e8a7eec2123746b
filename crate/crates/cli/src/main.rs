use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use rgbp::habitat_graph::{decompose, BasicHabitatGraph, Shape};
use rgbp::io;
use rgbp::model::instance_stats;
use rgbp::preprocess::reduce;
use rgbp::reductions::{self, Construction};
use rgbp::solver::{self, SolverConfig};
use rgbp::{Error, Instance, Mode};

/// Exact solver for robust green bridges placement.
#[derive(Parser, Debug)]
#[command(name = "rgbp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and print the solution document.
    Solve {
        file: String,
        /// largest free-edge count handled by exhaustive search
        #[arg(long, default_value_t = solver::DEFAULT_EXHAUSTIVE_THRESHOLD)]
        exhaustive_threshold: usize,
        /// solve components one after another
        #[arg(long, conflicts_with = "threads")]
        sequential: bool,
        /// worker threads (overrides RGBP_THREADS)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a solution document against an instance.
    Verify { instance: String, solution: String },
    /// Apply the reduction rules; prints the reduced instance and its trace.
    Reduce { file: String },
    /// Build a hardness instance from a cubic graph or a balanced CNF.
    Generate {
        #[arg(value_parser = parse_construction)]
        construction: Construction,
        source: String,
        #[arg(long, value_parser = parse_mode, default_value = "vertex")]
        mode: Mode,
    },
    /// Print size parameters and component shapes.
    Stats { file: String },
    /// Time every `.rgbp` instance in a directory.
    Bench { dir: PathBuf },
}

fn parse_construction(s: &str) -> Result<Construction, String> {
    Construction::from_keyword(s).ok_or_else(|| {
        let all: Vec<&str> = Construction::ALL.iter().map(|c| c.keyword()).collect();
        format!("unknown construction `{s}` (expected one of {})", all.join(", "))
    })
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_keyword(s).ok_or_else(|| format!("unknown mode `{s}` (expected vertex or edge)"))
}

fn read_input(path: &str) -> Result<String, Error> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map(|_| ())
    };
    res.map_err(|e| Error::Input(format!("{path}: {e}")))?;
    Ok(text)
}

fn load_instance(path: &str) -> Result<Instance, Error> {
    io::parse_instance(&read_input(path)?).map_err(Error::from)
}

fn install_pool(threads: Option<usize>) -> Result<(), Error> {
    let env = std::env::var("RGBP_THREADS").ok();
    let count = match (threads, env) {
        (Some(n), _) => n,
        (None, Some(v)) => v.trim().parse().map_err(|_| Error::Usage(format!("RGBP_THREADS must be a number, got `{v}`")))?,
        (None, None) => 0,
    };
    if count > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build_global()
            .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Output and exit code of a command.
struct Outcome {
    stdout: String,
    code: u8,
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Solve { file, exhaustive_threshold, sequential, threads } => {
            install_pool(threads)?;
            let inst = load_instance(&file)?;
            let config = SolverConfig { exhaustive_threshold, parallel: !sequential };
            let report = solver::solve_with(&inst, &config)?;
            Ok(Outcome { stdout: io::serialize_solution(&inst, &report), code: if report.answer { 0 } else { 1 } })
        }
        Command::Verify { instance, solution } => {
            let inst = load_instance(&instance)?;
            let doc = io::parse_solution(&read_input(&solution)?)?;
            let verdict = match doc.edge_set(&inst) {
                Ok(edges) => solver::verify(&inst, &edges),
                Err(e) => solver::Verdict { ok: false, diagnostic: Some(e.to_string()) },
            };
            Ok(match verdict.diagnostic {
                None => Outcome { stdout: "valid\n".into(), code: 0 },
                Some(d) => Outcome { stdout: format!("invalid: {d}\n"), code: 1 },
            })
        }
        Command::Reduce { file } => {
            let inst = load_instance(&file)?;
            Ok(match reduce(&inst) {
                Ok(red) => Outcome { stdout: io::serialize_reduction(&red), code: 0 },
                Err(inf) => {
                    let mut out = format!("infeasible {inf}\n");
                    for step in &inf.trace.steps {
                        let _ = writeln!(out, "#! step {step}");
                    }
                    Outcome { stdout: out, code: 1 }
                }
            })
        }
        Command::Generate { construction, source, mode } => {
            let text = read_input(&source)?;
            let (inst, map) = match construction {
                Construction::H5D6 => {
                    let cnf = io::parse_dimacs(&text)?;
                    reductions::generate(construction, None, Some(&cnf), mode)?
                }
                Construction::H13D4 => {
                    let file = io::parse_cubic_graph(&text)?;
                    reductions::gen_h13d4(&file.graph, file.p, mode)?
                }
                _ => {
                    let hcvc = io::parse_cubic_graph(&text)?.hcvc()?;
                    reductions::generate(construction, Some(&hcvc), None, mode)?
                }
            };
            let mut out = io::serialize_instance(&inst);
            out.push_str(&io::serialize_witness_map(&map));
            Ok(Outcome { stdout: out, code: 0 })
        }
        Command::Stats { file } => Ok(Outcome { stdout: stats(&load_instance(&file)?), code: 0 }),
        Command::Bench { dir } => {
            install_pool(None)?;
            Ok(Outcome { stdout: bench(&dir)?, code: 0 })
        }
    }
}

fn stats(inst: &Instance) -> String {
    let s = instance_stats(inst);
    let mut out = String::new();
    let _ = writeln!(out, "eta={}", s.eta);
    let _ = writeln!(out, "delta={}", s.delta);
    let _ = writeln!(out, "vertices={}", inst.graph().vertex_count());
    let _ = writeln!(out, "edges={}", inst.graph().edge_count());
    let _ = writeln!(out, "habitats={}", s.num_habitats);
    let _ = writeln!(out, "free_edges={}", s.num_free_edges);
    match reduce(inst) {
        Ok(red) => {
            let hg = BasicHabitatGraph::build(&red.instance);
            let dec = decompose(&red.instance, &hg);
            let _ = writeln!(out, "reduced_free_edges={}", instance_stats(&red.instance).num_free_edges);
            let _ = writeln!(out, "components={}", dec.components.len());
            for shape in [Shape::Singleton, Shape::Path, Shape::Cycle, Shape::Other] {
                let count = dec.components.iter().filter(|c| c.shape == shape).count();
                let _ = writeln!(out, "shape_{}={count}", shape.keyword());
            }
        }
        Err(_) => {
            let _ = writeln!(out, "components=infeasible");
        }
    }
    out
}

struct BenchRow {
    name: String,
    reduce: Duration,
    decompose: Duration,
    solve: Duration,
    result: String,
}

fn bench_one(path: &Path) -> BenchRow {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = BenchRow { name, reduce: Duration::ZERO, decompose: Duration::ZERO, solve: Duration::ZERO, result: String::new() };
    let inst = match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| io::parse_instance(&t).map_err(|e| e.to_string())) {
        Ok(i) => i,
        Err(e) => {
            row.result = format!("error: {e}");
            return row;
        }
    };
    let t = Instant::now();
    let red = reduce(&inst);
    row.reduce = t.elapsed();
    if let Ok(red) = &red {
        let t = Instant::now();
        let hg = BasicHabitatGraph::build(&red.instance);
        let _ = decompose(&red.instance, &hg);
        row.decompose = t.elapsed();
    }
    let t = Instant::now();
    let report = solver::solve_with(&inst, &SolverConfig { parallel: false, ..SolverConfig::default() });
    row.solve = t.elapsed();
    row.result = match report {
        Ok(r) if r.solution.is_infeasible() => "infeasible".into(),
        Ok(r) => format!("cost={} {}", r.solution.cost, if r.answer { "yes" } else { "no" }),
        Err(e) => format!("error: {e}"),
    };
    row
}

fn bench(dir: &Path) -> Result<String, Error> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rgbp"))
        .collect();
    files.sort();
    let rows: Vec<BenchRow> = files.par_iter().map(|p| bench_one(p)).collect();
    let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
    let mut out = format!("{:<32} {:>12} {:>12} {:>12}  result\n", "instance", "reduce_ms", "decompose_ms", "solve_ms");
    for r in rows {
        let _ = writeln!(out, "{:<32} {:>12} {:>12} {:>12}  {}", r.name, ms(r.reduce), ms(r.decompose), ms(r.solve), r.result);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("rgbp: {e}");
            ExitCode::from(2)
        }
    }
}
