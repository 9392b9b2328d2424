//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::damage::{DamageKind, DamageModel};
use crate::engine::{self, Engine};
use crate::error::{Error, Result};
use crate::experiments::{self, output, ExperimentConfig, OneOrMany, SweepRow};
use crate::graph::{Family, GraphSpec};

pub const WORKERS_ENV: &str = "CYBEREPI_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "cyberepi", version, about = "Malware and awareness spreading on contact networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a contact network and write it as an edge list
    Graph(GraphArgs),
    /// Simulate one realization and write its compartment counts per step
    Run(RunArgs),
    /// Ensemble-mean compartment series for one parameter point
    Cycle(ExperimentArgs),
    /// Total damage per node against constant base damage d
    #[command(name = "sweep-d")]
    SweepD(ExperimentArgs),
    /// Total damage per node against the damage growth rate epsilon
    #[command(name = "sweep-eps")]
    SweepEps(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GraphFlags {
    /// Graph families: er (connected Erdos-Renyi) or ba (Barabasi-Albert) [default: er]
    #[arg(long = "graph", value_delimiter = ',')]
    pub family: Option<Vec<Family>>,
    /// Number of nodes, at least 2 [default: 500]
    #[arg(long)]
    pub n: Option<usize>,
    /// Mean degree, in (0, n); even for ba [default: 10]
    #[arg(long, value_delimiter = ',')]
    pub mean_degree: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ModelFlags {
    /// Infection rate per infective neighbour, [0,1] [default: 0.0055]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Infection-rate multiplier for aware susceptibles, [0,1] [default: 0.1]
    #[arg(long)]
    pub aware_factor: Option<f64>,
    /// Contact awareness rate per aware neighbour, [0,1] [default: 0.011]
    #[arg(long)]
    pub nu: Option<f64>,
    /// Spontaneous awareness base rate, [0,1] [default: 0.011]
    #[arg(long)]
    pub mu0: Option<f64>,
    /// Healing rate of aware nodes, [0,1] [default: 0.03]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Initially infected fraction, (0,1] [default: 0.01]
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Damage thresholds, [0,1] [default: 0.2]
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    /// Damage law: constant:<d>, logistic:<d0>:<eps> or mutating:<d0>:<eps>, with d, d0 in [0,1] and eps > 0 [default: constant:0.3]
    #[arg(long)]
    pub damage: Option<DamageModel>,
}

#[derive(Debug, Args)]
pub struct CommonFlags {
    /// Base random seed (required)
    #[arg(long)]
    pub seed: u64,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress the summary line on stderr
    #[arg(long, conflicts_with = "progress")]
    pub quiet: bool,
    /// Report progress on stderr
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub graph: GraphFlags,
    #[command(flatten)]
    pub common: CommonFlags,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub graph: GraphFlags,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub common: CommonFlags,
    /// Step cap; runs hitting it are reported as truncated [default: 1000000]
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Also write the sampled graph as an edge list
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config file (TOML); flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub graph: GraphFlags,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub common: CommonFlags,
    /// Realizations per parameter point, at least 1 [default: 200]
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Damage kinds for sweeps: constant, logistic, mutating
    #[arg(long, value_delimiter = ',')]
    pub kind: Option<Vec<DamageKind>>,
    /// Base damage grid for sweep-d [default: 41 points in [0,1]]
    #[arg(long, value_delimiter = ',')]
    pub d_grid: Option<Vec<f64>>,
    /// Number of evenly spaced d values in [0,1] (alternative to --d-grid)
    #[arg(long, conflicts_with = "d_grid")]
    pub d_points: Option<usize>,
    /// Growth-rate grid for sweep-eps [default: 40 log-spaced points in (0.001,1]]
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    /// Number of log-spaced epsilon values in (0.001,1] (alternative to --eps-grid)
    #[arg(long, conflicts_with = "eps_grid")]
    pub eps_points: Option<usize>,
    /// Initial damage of logistic and mutating laws, [0,1] [default: 0.1]
    #[arg(long)]
    pub d0: Option<f64>,
    /// Skip the constant-damage reference sweep of sweep-eps
    #[arg(long)]
    pub no_reference: bool,
    /// Reuse one sampled graph for every realization
    #[arg(long)]
    pub fixed_graph: bool,
    /// Full-size runs: n = 1000, 1000 realizations
    #[arg(long)]
    pub paper_scale: bool,
    /// Step cap per realization [default: 1000000]
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Worker threads [default: available parallelism]
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
}

fn apply_graph_flags(cfg: &mut ExperimentConfig, flags: &GraphFlags) {
    if let Some(f) = &flags.family {
        cfg.graph.family = OneOrMany::Many(f.clone());
    }
    if let Some(n) = flags.n {
        cfg.graph.n = n;
    }
    if let Some(k) = &flags.mean_degree {
        cfg.graph.mean_degree = OneOrMany::Many(k.clone());
    }
}

fn apply_model_flags(cfg: &mut ExperimentConfig, flags: &ModelFlags) {
    let p = &mut cfg.params;
    macro_rules! set {
        ($($field:ident <- $flag:ident),*) => {$(
            if let Some(v) = flags.$flag {
                p.$field = v;
            }
        )*};
    }
    set!(tau <- tau, aware_infection_factor <- aware_factor, nu <- nu, mu0 <- mu0, gamma <- gamma, rho0 <- rho0);
    if let Some(th) = &flags.theta {
        p.theta = OneOrMany::Many(th.clone());
    }
    if let Some(model) = flags.damage {
        let d = &mut cfg.damage;
        d.kind = OneOrMany::One(model.kind());
        match model {
            DamageModel::Constant { d: x } => d.d = Some(OneOrMany::One(x)),
            DamageModel::LogisticClock { d0, epsilon } | DamageModel::MutatingStrain { d0, epsilon } => {
                d.d0 = d0;
                d.epsilon = Some(OneOrMany::One(epsilon));
            }
        }
    }
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if args.paper_scale {
        cfg.full_scale();
    }
    apply_graph_flags(&mut cfg, &args.graph);
    apply_model_flags(&mut cfg, &args.model);
    cfg.base_seed = args.common.seed;
    if let Some(r) = args.realizations {
        cfg.realizations = r;
    }
    if let Some(k) = &args.kind {
        cfg.damage.kind = OneOrMany::Many(k.clone());
    }
    if let Some(d) = &args.d_grid {
        cfg.damage.d = Some(OneOrMany::Many(d.clone()));
    }
    if let Some(points) = args.d_points {
        cfg.damage.d = Some(OneOrMany::Many(experiments::linear_grid(points)));
    }
    if let Some(e) = &args.eps_grid {
        cfg.damage.epsilon = Some(OneOrMany::Many(e.clone()));
    }
    if let Some(points) = args.eps_points {
        cfg.damage.epsilon = Some(OneOrMany::Many(experiments::log_grid(points)));
    }
    if let Some(d0) = args.d0 {
        cfg.damage.d0 = d0;
    }
    if args.no_reference {
        cfg.damage.reference = false;
    }
    if args.fixed_graph {
        cfg.graph.fixed_graph = true;
    }
    if let Some(m) = args.max_steps {
        cfg.max_steps = m;
    }
    if args.common.out.is_some() {
        cfg.output = args.common.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn one<T: Copy>(v: Vec<T>, flag: &str) -> Result<T> {
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::Invalid(format!("{flag} takes a single value here"))),
    }
}

fn single_graph(cfg: &ExperimentConfig, seed: u64) -> Result<GraphSpec> {
    let spec = GraphSpec::new(
        one(cfg.families(), "--graph")?,
        cfg.graph.n,
        one(cfg.mean_degrees(), "--mean-degree")?,
        seed,
    );
    spec.validate()?;
    Ok(spec)
}

fn cmd_graph(args: &GraphArgs) -> Result<String> {
    let mut cfg = ExperimentConfig::default();
    apply_graph_flags(&mut cfg, &args.graph);
    let g = single_graph(&cfg, args.common.seed)?.generate()?;
    let text = g.to_edge_list();
    let mut out = output::open(args.common.out.as_deref())?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(args.common.out.clone().unwrap_or_else(|| "<stdout>".into()), e))?;
    Ok(format!(
        "graph: n={} edges={} mean_degree={}",
        g.n(),
        g.edge_count(),
        output::sig6(g.mean_degree())
    ))
}

fn cmd_run(args: &RunArgs) -> Result<String> {
    let mut cfg = ExperimentConfig::default();
    apply_graph_flags(&mut cfg, &args.graph);
    apply_model_flags(&mut cfg, &args.model);
    let seed = args.common.seed;
    let spec = single_graph(&cfg, seed)?;
    let params = cfg.params.at_theta(one(cfg.thetas(), "--theta")?);
    params.validate()?;
    let damage = experiments::cycle_damage(&cfg)?;
    damage.validate()?;
    let g = spec.generate()?;
    if let Some(path) = &args.dump_graph {
        g.write_edge_list(path)?;
    }
    let max_steps = args.max_steps.unwrap_or(engine::DEFAULT_MAX_STEPS);
    let result = engine::run(&g, &params, &damage, seed, max_steps)?;
    let echo = format!(
        "graph: {} n={} mean_degree={} seed={seed}\n\
         params: tau={} aware_infection_factor={} nu={} mu0={} gamma={} theta={} rho0={}\n\
         damage: {damage}\nmax_steps: {max_steps}",
        spec.family,
        spec.n,
        spec.mean_degree,
        params.tau,
        params.aware_infection_factor,
        params.nu,
        params.mu0,
        params.gamma,
        params.theta,
        params.rho0
    );
    output::write_run(args.common.out.as_deref(), &echo, &result)?;
    Ok(format!(
        "run: D/N={} ever_infected={} steps={} absorbed={}",
        output::sig6(result.total_damage_per_node),
        result.ever_infected,
        result.steps,
        result.absorbed
    ))
}

fn progress_printer(enabled: bool) -> impl Fn(usize, usize, &SweepRow) {
    move |done, total, row| {
        if enabled {
            eprintln!(
                "progress: {done}/{total} {} k={} theta={} {} x={} D/N={}",
                row.family,
                row.mean_degree,
                row.params.theta,
                row.kind,
                output::sig6(row.point.x),
                output::sig6(row.point.mean_dn)
            );
        }
    }
}

fn cmd_experiment(which: &Command, args: &ExperimentArgs) -> Result<String> {
    let cfg = experiment_config(args)?;
    let engine = Engine::new(args.workers)?;
    let out = cfg.output.as_deref();
    let printer = progress_printer(args.common.progress);
    match which {
        Command::Cycle(_) => {
            let s = experiments::run_cycle_experiment(&engine, &cfg, out)?;
            Ok(format!(
                "cycle: realizations={} mean_D/N={} mean_onset_t={} truncated={}",
                s.realizations,
                output::sig6(s.mean_dn),
                s.mean_onset_t.map(output::sig6).unwrap_or_else(|| "none".into()),
                s.truncated
            ))
        }
        Command::SweepD(_) => {
            let rows = experiments::run_damage_sweep(&engine, &cfg, Some(&printer))?;
            experiments::write_damage_sweep(&cfg, &rows, out)?;
            Ok(format!("sweep-d: {} rows", rows.len()))
        }
        Command::SweepEps(_) => {
            let rows = experiments::run_epsilon_sweep(&engine, &cfg, Some(&printer))?;
            experiments::write_epsilon_sweep(&cfg, &rows, out)?;
            Ok(format!("sweep-eps: {} rows", rows.len()))
        }
        _ => unreachable!("not an experiment subcommand"),
    }
}

fn output_path_writable(path: Option<&Path>) -> Result<()> {
    if let Some(dir) = path.and_then(Path::parent).filter(|d| !d.as_os_str().is_empty()) {
        if !dir.is_dir() {
            return Err(Error::io(
                path.unwrap(),
                std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
            ));
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Errors are reported as a single `error: ...` line on stderr.
pub fn main_with<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap spreads some messages over several lines before the
            // usage block; fold them into one
            let rendered = e.render().to_string();
            let message: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("{}", message.join(" "));
            return ExitCode::from(2);
        }
    };

    let (quiet, out) = match &cli.command {
        Command::Graph(a) => (a.common.quiet, a.common.out.as_deref()),
        Command::Run(a) => (a.common.quiet, a.common.out.as_deref()),
        Command::Cycle(a) | Command::SweepD(a) | Command::SweepEps(a) => (a.common.quiet, a.common.out.as_deref()),
    };
    let result = output_path_writable(out).and_then(|_| match &cli.command {
        Command::Graph(a) => cmd_graph(a),
        Command::Run(a) => cmd_run(a),
        Command::Cycle(a) | Command::SweepD(a) | Command::SweepEps(a) => cmd_experiment(&cli.command, a),
    });
    match result {
        Ok(summary) => {
            if !quiet {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
