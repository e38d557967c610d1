use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use jitterbound::boiler::{find_critical_points, simulate, CriticalPoint};
use jitterbound::frontend::{self, Model, ResponseEstimate};
use jitterbound::{Limits, SearchOrder, Ticks};

/// Response-time verification for networked automation time chains.
#[derive(Debug, Parser)]
#[command(name = "jitterbound", version)]
struct Cli {
    /// Suppress normal output; the exit code carries the result.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    Bfs,
    Dfs,
    Random,
}

#[derive(Debug, clap::Args)]
struct SearchArgs {
    /// Give up after this many symbolic states.
    #[arg(long, default_value_t = Limits::default().max_states)]
    max_states: usize,

    #[arg(long, value_enum, default_value_t = Order::Bfs)]
    order: Order,

    /// Seed for `--order random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_states: self.max_states,
            ..Limits::default()
        }
    }

    fn order(&self) -> SearchOrder {
        match self.order {
            Order::Bfs => SearchOrder::Bfs,
            Order::Dfs => SearchOrder::Dfs,
            Order::Random => SearchOrder::Random { seed: self.seed },
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the model's bounded response query.
    Check {
        model: PathBuf,

        /// Deadline in ms, overriding the model's.
        #[arg(long)]
        bound: Option<f64>,

        /// Write the counterexample, if any, to this file.
        #[arg(long)]
        trace: Option<PathBuf>,

        /// Also compute worst- and best-case response times.
        #[arg(long)]
        wcrt: bool,

        /// Print the trace and extra statistics.
        #[arg(long, short)]
        verbose: bool,

        #[command(flatten)]
        search: SearchArgs,
    },
    /// Worst- and best-case response times of the model's query pair.
    Wcrt {
        model: PathBuf,

        #[command(flatten)]
        search: SearchArgs,
    },
    /// Simulate the model's boiler and list critical points.
    Simulate {
        model: PathBuf,

        /// Horizon in minutes.
        #[arg(long)]
        horizon: f64,

        /// Sample period in minutes.
        #[arg(long)]
        dt: f64,

        /// Distance to a level limit that counts as critical.
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,

        /// Write the trajectory here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Export the network and query for UPPAAL.
    Export {
        model: PathBuf,

        /// Model file; the query goes next to it with a `.q` extension.
        #[arg(long, short)]
        output: PathBuf,

        #[arg(long)]
        bound: Option<f64>,
    },
    /// Parse the model and check its structure without verifying it.
    Validate { model: PathBuf },
}

fn load(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    frontend::parse_model(&text).with_context(|| format!("in {}", path.display()))
}

fn bound_ticks(model: &Model, ms: Option<f64>) -> Result<Option<Ticks>> {
    ms.map(|ms| {
        model
            .resolution
            .ms_to_ticks(ms)
            .with_context(|| format!("--bound {ms}"))
    })
    .transpose()
}

struct Output {
    quiet: bool,
    format: Format,
}

impl Output {
    fn print(&self, human: impl FnOnce() -> String, machine: impl FnOnce() -> String) -> Result<()> {
        if self.quiet {
            return Ok(());
        }
        let text = match self.format {
            Format::Human => human(),
            Format::Machine => machine(),
        };
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            writeln!(out)?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<u8> {
    let out = Output {
        quiet: cli.quiet,
        format: cli.format,
    };
    match cli.command {
        Command::Check {
            model,
            bound,
            trace,
            wcrt,
            verbose,
            search,
        } => {
            let model = load(&model)?;
            let bound = bound_ticks(&model, bound)?;
            let limits = search.limits();
            let mut outcome = frontend::check(&model, bound, &limits, search.order())?;
            if wcrt {
                let times = frontend::response_times(&model, &limits)?;
                outcome.report.worst_case = Some(times.estimate);
            }
            let report = &outcome.report;
            if let (Some(path), Some(doc)) = (&trace, &report.trace) {
                let text = serde_json::to_string_pretty(doc)?;
                fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
            }
            out.print(|| report.render_human(verbose), || report.render_machine())?;
            Ok(report.exit_code() as u8)
        }
        Command::Wcrt { model, search } => {
            let model = load(&model)?;
            let times = frontend::response_times(&model, &search.limits())?;
            out.print(|| times.render_human(), || times.render_machine())?;
            let ResponseEstimate { worst, .. } = times.estimate;
            Ok(if worst.is_some() { 0 } else { 1 })
        }
        Command::Simulate {
            model,
            horizon,
            dt,
            threshold,
            output,
        } => {
            let model = load(&model)?;
            let Some(scenario) = &model.boiler else {
                bail!("the model has no [boiler] section");
            };
            let traj = simulate(&scenario.config, &scenario.schedule, horizon, dt)?;
            let points = find_critical_points(&traj, &scenario.config, threshold);
            match &output {
                Some(path) => {
                    let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
                    traj.write_csv(file)?;
                }
                None if !out.quiet => traj.write_csv(io::stdout().lock())?,
                None => {}
            }
            // the trajectory owns stdout unless it went to a file
            let summary = match out.format {
                Format::Human => points.iter().map(describe).collect::<String>(),
                Format::Machine => serde_json::to_string_pretty(&points)? + "\n",
            };
            if !out.quiet {
                if output.is_some() {
                    print!("{summary}");
                } else {
                    eprint!("{summary}");
                }
            }
            Ok(0)
        }
        Command::Export { model, output, bound } => {
            let model = load(&model)?;
            let bound = bound_ticks(&model, bound)?;
            let export = frontend::export(&model, bound)?;
            let query_path = output.with_extension("q");
            fs::write(&output, &export.model).with_context(|| format!("cannot write {}", output.display()))?;
            fs::write(&query_path, &export.query).with_context(|| format!("cannot write {}", query_path.display()))?;
            out.print(
                || format!("wrote {} and {}", output.display(), query_path.display()),
                || serde_json::json!({ "model": output, "query": query_path }).to_string(),
            )?;
            Ok(0)
        }
        Command::Validate { model } => {
            let model = load(&model)?;
            let diagnostics = frontend::validate_model(&model);
            if !cli.quiet {
                for d in &diagnostics {
                    eprintln!("{d}");
                }
            }
            out.print(
                || {
                    if diagnostics.is_empty() {
                        "valid".to_string()
                    } else {
                        format!("invalid: {} problem(s)", diagnostics.len())
                    }
                },
                || serde_json::json!({ "valid": diagnostics.is_empty(), "diagnostics": diagnostics }).to_string(),
            )?;
            Ok(if diagnostics.is_empty() { 0 } else { 2 })
        }
    }
}

fn describe(p: &CriticalPoint) -> String {
    format!("t = {:.4} min: {:?} (margin {:.3})\n", p.time, p.kind, p.margin)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
