//! `constel-sched`: run scenarios, benchmark suites and standalone graph solves.
//!
//! Exit codes: 0 success, 1 a schedule failed validation, 2 bad input.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use constel_core::access::write_collects_jsonl;
use constel_core::baselines::{export_ilp, ScheduleFile};
use constel_core::experiment::{
    execute_scenario, load_suite, prepare, run_benchmark_suite, write_suite_outputs, Scenario, SolverSpec, SuiteEntry,
    SuiteReport,
};
use constel_core::mis::io::{read_dimacs, write_certificate};
use constel_core::mis::{exact_bnb, greedy_min_degree, redumis_solve, SolverConfig};
use constel_core::schedcore::{export_dimacs, graph_stats};

#[derive(Parser)]
#[command(
    name = "constel-sched",
    version,
    about = "Satellite collect scheduling via maximum independent sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its schedules and result tables.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's solver list. Repeatable.
        #[arg(long = "solver")]
        solvers: Vec<SolverSpec>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads for the access search.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run every scenario listed in a suite file.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a scenario's infeasibility graph and export it.
    Graph {
        #[arg(long)]
        scenario: PathBuf,
        /// DIMACS edge-format output.
        #[arg(long)]
        export: PathBuf,
        /// Also write the equivalent integer program in LP format.
        #[arg(long)]
        lp: Option<PathBuf>,
        /// Also write the collects, one JSON object per line.
        #[arg(long)]
        collects: Option<PathBuf>,
    },
    /// Solve a DIMACS graph directly.
    SolveGraph {
        graph: PathBuf,
        #[arg(long, default_value = "mis")]
        solver: SolverSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Certificate output: `s <size>` then one 1-based vertex per line.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

enum Failure {
    Input(anyhow::Error),
    Invalid(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            scenario,
            solvers,
            seed,
            out,
            workers,
        } => run(&scenario, solvers, seed, &out, workers),
        Command::Bench { suite, out } => bench(&suite, &out),
        Command::Graph {
            scenario,
            export,
            lp,
            collects,
        } => graph(&scenario, &export, lp.as_deref(), collects.as_deref()),
        Command::SolveGraph {
            graph,
            solver,
            seed,
            certificate,
        } => solve_graph(&graph, solver, seed, certificate.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(path: &Path, solvers: Vec<SolverSpec>, seed: Option<u64>, out: &Path, workers: Option<usize>) -> Outcome {
    let mut sc = Scenario::load(path)?;
    if !solvers.is_empty() {
        sc.solvers = solvers;
    }
    if let Some(s) = seed {
        sc.seed = s;
    }
    if workers.is_some() {
        sc.propagation.workers = workers;
    }
    sc.validate()?;

    let run = execute_scenario(&sc)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (row, sched) in run.result.rows.iter().zip(&run.schedules) {
        if !row.valid {
            continue;
        }
        let file = out.join(format!("schedule_{}.json", row.solver.replace(':', "_")));
        let body = serde_json::to_string_pretty(&ScheduleFile::new(sched, &run.prepared.collects))?;
        fs::write(&file, body).with_context(|| format!("writing {}", file.display()))?;
    }
    let valid = run.result.valid;
    let report = SuiteReport {
        entries: vec![SuiteEntry {
            scenario: sc.name.clone(),
            result: Some(run.result),
            error: None,
        }],
    };
    write_suite_outputs(&report, out)?;
    report.write_text(io::stdout().lock())?;
    if valid {
        Ok(())
    } else {
        Err(Failure::Invalid(format!(
            "{}: a schedule failed validation and was not written",
            sc.name
        )))
    }
}

fn bench(suite: &Path, out: &Path) -> Outcome {
    let scenarios = load_suite(suite)?;
    let report = run_benchmark_suite(&scenarios, out)?;
    report.write_text(io::stdout().lock())?;
    if report.all_valid() {
        Ok(())
    } else {
        Err(Failure::Invalid(
            "one or more scenarios failed or produced invalid schedules".into(),
        ))
    }
}

fn graph(path: &Path, export: &Path, lp: Option<&Path>, collects: Option<&Path>) -> Outcome {
    let sc = Scenario::load(path)?;
    let prep = prepare(&sc)?;
    let create = |p: &Path| {
        File::create(p)
            .map(BufWriter::new)
            .with_context(|| format!("creating {}", p.display()))
    };

    let mut w = create(export)?;
    export_dimacs(&prep.infeasibility, &mut w)?;
    w.flush()?;
    if let Some(p) = lp {
        let mut w = create(p)?;
        export_ilp(&prep.infeasibility, &mut w)?;
        w.flush()?;
    }
    if let Some(p) = collects {
        let mut w = create(p)?;
        write_collects_jsonl(&mut w, &prep.collects)?;
        w.flush()?;
    }
    let stats = graph_stats(&prep.infeasibility);
    println!(
        "{}: {} collects, {} edges, density {:.4}, max degree {}",
        sc.name, stats.vertices, stats.edges, stats.density, stats.max_degree
    );
    Ok(())
}

fn solve_graph(path: &Path, solver: SolverSpec, seed: u64, certificate: Option<&Path>) -> Outcome {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let g = read_dimacs(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    let start = Instant::now();
    let sol = match solver {
        SolverSpec::Mis { time_limit_s } => redumis_solve(
            &g,
            &SolverConfig {
                time_limit_s,
                seed,
                ..SolverConfig::default()
            },
        ),
        SolverSpec::Exact { time_limit_s } => exact_bnb(&g, time_limit_s.map(std::time::Duration::from_secs_f64)),
        // Without collect data there is no feasibility graph to traverse.
        SolverSpec::Greedy => greedy_min_degree(&g),
    };
    let elapsed = start.elapsed();
    if !g.is_independent(sol.vertices()) {
        return Err(Failure::Invalid(format!(
            "{solver} returned a set that is not independent"
        )));
    }
    println!(
        "{solver}: {} vertices, {} edges, independent set {} ({}, {:.3} s)",
        g.num_vertices(),
        g.num_edges(),
        sol.objective(),
        sol.termination(),
        elapsed.as_secs_f64()
    );
    if let Some(p) = certificate {
        let mut w = File::create(p)
            .map(BufWriter::new)
            .with_context(|| format!("creating {}", p.display()))?;
        write_certificate(&sol, &mut w)?;
        w.flush()?;
    }
    Ok(())
}
