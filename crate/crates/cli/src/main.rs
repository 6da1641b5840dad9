//! `nlbound`: orthogonality graphs, maximal cliques, LO inequalities and
//! success bounds for the Hardy and Cabello arguments.

mod output;
mod reproduce;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nlbound::lo::{verify_appendix, verify_entries};
use nlbound::optimize::{
    self, OptConfig, OptResult, DEFAULT_MAX_ITERS, DEFAULT_STARTS, DEFAULT_TOL,
};
use nlbound::quantum::{max_quantum, StateFamily};
use nlbound::{appendix, maximal_cliques, OptError, Scenario};

use output::Artifacts;

#[derive(Parser)]
#[command(
    name = "nlbound",
    version,
    about = "Bounds on Hardy and Cabello success probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; the default depends on the command.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory receiving one file per artifact.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "NLBOUND_JOBS")]
    jobs: Option<usize>,
    /// Include wall time in optimisation results.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
            Format::Text => "txt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstraintSet {
    Appendix,
    Full,
}

impl ConstraintSet {
    pub fn suffix(self) -> &'static str {
        match self {
            ConstraintSet::Appendix => "appendix",
            ConstraintSet::Full => "full",
        }
    }
}

#[derive(Args, Clone)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    starts: usize,
    /// Constraint tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Function evaluations per local search.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// LO constraints: the published subsets or every maximal clique.
    #[arg(long, value_enum, default_value = "appendix")]
    constraint_set: ConstraintSet,
}

impl SolveArgs {
    pub fn config(&self) -> OptConfig {
        OptConfig {
            starts: self.starts,
            seed: self.seed,
            tol: self.tol,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Orthogonality graph of one or two copies.
    Graph {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        copies: u8,
    },
    /// All maximal cliques, in canonical order.
    Cliques {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        copies: u8,
    },
    /// Check the published cliques and inequalities.
    VerifyAppendix {
        #[arg(long)]
        scenario: Scenario,
        /// Drop one event from the first clique before checking.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Solve a named problem.
    Optimize {
        /// One of the presets; `<scenario>_lo2` takes `--constraint-set`.
        #[arg(long)]
        preset: String,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Two-qubit optimum for a scenario.
    Quantum {
        #[arg(long)]
        scenario: Scenario,
        /// Restrict to product states.
        #[arg(long)]
        product: bool,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Compare LO optima under the published subset and the full clique set.
    Compare {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 2e-3)]
        agree_tol: f64,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Run every preset and the quantum references; print the summary table.
    Reproduce {
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Debug)]
pub enum Failure {
    /// Verification or reproduction mismatch, or a bad request.
    Check(String),
    Infeasible(String),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e)
    }
}

impl From<OptError> for Failure {
    fn from(e: OptError) -> Failure {
        match e {
            OptError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check(m) | Failure::Infeasible(m) => eprintln!("error: {m}"),
                Failure::Io(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = Artifacts::new(&cli.out);
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match &cli.command {
        Command::Graph { scenario, copies } => {
            let g = scenario.graph(*copies as usize);
            let format = cli.format.unwrap_or(Format::Dot);
            let name = format!("graph_{scenario}_{copies}");
            let body = match format {
                Format::Dot => g.to_dot(&format!("{scenario}_{copies}")),
                Format::Json => output::graph_json(*scenario, *copies, &g),
                Format::Text | Format::Csv => output::graph_text(&g),
            };
            let path = out.write(&name, format, &body)?;
            writeln!(
                w,
                "{scenario}, {copies} cop{}: {} vertices, {} edges -> {}",
                if *copies == 1 { "y" } else { "ies" },
                g.len(),
                g.edge_count(),
                path.display()
            )?;
        }
        Command::Cliques { scenario, copies } => {
            let g = scenario.graph(*copies as usize);
            let cliques = maximal_cliques(&g);
            let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
            for c in &cliques {
                *sizes.entry(c.members.len()).or_default() += 1;
            }
            let format = cli.format.unwrap_or(Format::Json);
            let name = format!("cliques_{scenario}_{copies}");
            let path = out.write_with(&name, format, |f| {
                output::cliques(f, format, *scenario, *copies, &g, &cliques, &sizes)
            })?;
            writeln!(
                w,
                "{scenario}, {copies} cop{}: {} vertices, {} maximal cliques -> {}",
                if *copies == 1 { "y" } else { "ies" },
                g.len(),
                cliques.len(),
                path.display()
            )?;
            let hist: Vec<String> = sizes.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            writeln!(w, "sizes {}", hist.join(" "))?;
        }
        Command::VerifyAppendix { scenario, corrupt } => {
            let report = if *corrupt {
                let mut entries = appendix::entries(*scenario);
                entries[0].events.pop();
                verify_entries(*scenario, &entries)
            } else {
                verify_appendix(*scenario)
            };
            let format = cli.format.unwrap_or(Format::Text);
            let body = match format {
                Format::Json => output::json(&report),
                _ => report.render(),
            };
            out.write(&format!("verify-appendix_{scenario}"), format, &body)?;
            write!(w, "{}", report.render())?;
            if !report.all_passed() {
                return Err(Failure::Check(format!(
                    "{}/{} appendix checks passed",
                    report.checks_passed(),
                    report.total_checks()
                )));
            }
        }
        Command::Optimize { preset, solve } => {
            let name = if preset.ends_with("_lo2") {
                format!("{preset}_{}", solve.constraint_set.suffix())
            } else {
                preset.clone()
            };
            let problem = optimize::preset(&name)?;
            let result = timed(cli.timing, || optimize::maximize(&problem, &solve.config()))?;
            emit_result(&mut w, &out, cli.format, "optimize", &result)?;
        }
        Command::Quantum {
            scenario,
            product,
            solve,
        } => {
            let family = if *product {
                StateFamily::Product
            } else {
                StateFamily::Entangled
            };
            let result = timed(cli.timing, || {
                max_quantum(*scenario, family, &solve.config())
            })?;
            emit_result(&mut w, &out, cli.format, "quantum", &result)?;
        }
        Command::Compare {
            scenario,
            agree_tol,
            solve,
        } => {
            let config = solve.config();
            let subset = optimize::maximize(
                &optimize::preset(&format!("{scenario}_lo2_appendix"))?,
                &config,
            )?;
            let full =
                optimize::maximize(&optimize::preset(&format!("{scenario}_lo2_full"))?, &config)?;
            let c = optimize::compare(&full, &subset, *agree_tol);
            let format = cli.format.unwrap_or(Format::Json);
            let body = match format {
                Format::Json => output::json(&c),
                _ => format!("{c}\n"),
            };
            out.write(
                &format!("compare_{scenario}_seed{}", solve.seed),
                format,
                &body,
            )?;
            writeln!(w, "{c}")?;
            if !c.agree {
                return Err(Failure::Check("optima differ".into()));
            }
        }
        Command::Reproduce { solve } => {
            let table = reproduce::run(solve)?;
            let stem = format!("reproduce_seed{}", solve.seed);
            out.write_with(&stem, Format::Csv, |f| table.write_csv(f))?;
            out.write(&stem, Format::Text, &table.render())?;
            if cli.format == Some(Format::Json) {
                out.write(&stem, Format::Json, &output::json(&table))?;
            }
            write!(w, "{}", table.render())?;
            if !table.all_passed() {
                return Err(Failure::Check("reproduction failed".into()));
            }
        }
    }
    Ok(())
}

fn timed<F>(timing: bool, f: F) -> Result<OptResult, OptError>
where
    F: FnOnce() -> Result<OptResult, OptError>,
{
    let start = Instant::now();
    let mut r = f()?;
    if timing {
        r.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(r)
}

fn emit_result(
    w: &mut impl Write,
    out: &Artifacts,
    format: Option<Format>,
    command: &str,
    r: &OptResult,
) -> Result<(), Failure> {
    let format = format.unwrap_or(Format::Json);
    let name = format!("{command}_{}_seed{}", r.preset, r.seed);
    let path = match format {
        Format::Csv => out.write_with(&name, format, |f| output::result_csv(f, r))?,
        Format::Json => out.write(&name, format, &output::json(r))?,
        Format::Text | Format::Dot => out.write(&name, Format::Text, &output::result_text(r))?,
    };
    writeln!(w, "{r}")?;
    writeln!(w, "  {}", r.point)?;
    writeln!(w, "  -> {}", path.display())?;
    Ok(())
}
