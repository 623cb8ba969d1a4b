use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::info;
use mcplan_core::harness::{
    builtin, check_trace, compute_metrics, export, read_trace, run_batch, AgentKind, Metrics,
    Preference, PropertyReport, RunSpec, Scenario,
};
use mcplan_core::ConfigError;

/// Latency bound for a single replan, milliseconds.
const LATENCY_BOUND_MS: f64 = 100.0;

#[derive(Parser)]
#[command(
    name = "mcplan",
    version,
    about = "Model-checking obstacle avoidance simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate runs and export their traces and metrics.
    Run(RunArgs),
    /// Recompute metrics from a stored trace.
    Replay {
        #[arg(long)]
        trace: PathBuf,
        /// Also write the recomputed metrics here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites over random worlds and the built-in scenarios.
    Check(CheckArgs),
    /// Print a scenario, with any overrides applied, as JSON.
    Show {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file, or a built-in: culdesac, playground, empty, random-<seed>.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value = "mc")]
    agent: AgentKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds; defaults to the scenario's duration.
    #[arg(long)]
    duration: Option<f64>,
    /// Runs per start pose, seeded `seed`, `seed + 1`, ...
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "left")]
    prefer: Preference,
    /// JSON file overriding fields of the scenario's `config`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Only this start pose; all of them otherwise.
    #[arg(long)]
    start: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// Number of random worlds.
    #[arg(long, default_value_t = 100)]
    worlds: u64,
    /// Seconds per random-world run.
    #[arg(long, default_value_t = 300.0)]
    duration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Config(anyhow::Error),
    Violation(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        if e.downcast_ref::<ConfigError>().is_some() {
            Failure::Config(e)
        } else {
            Failure::Other(e)
        }
    }
}

fn load_scenario(name: &str, config: Option<&Path>) -> anyhow::Result<Scenario> {
    let path = Path::new(name);
    let mut sc = if path.exists() {
        Scenario::load(path)?
    } else {
        builtin::by_name(name).ok_or_else(|| {
            ConfigError::invalid(
                "scenario",
                format!("`{name}` is neither a file nor a built-in"),
            )
        })?
    };
    if let Some(c) = config {
        sc.apply_override_file(c)?;
    }
    sc.validate()?;
    Ok(sc)
}

fn print_metrics(label: &str, m: &Metrics) {
    println!(
        "{label}: length {:.3} m, in pocket {:.3} m / {:.1} s ({} visits), collisions {}, replans {}, end {:?} at {:.1} s",
        m.trajectory_length,
        m.in_culdesac_length,
        m.in_culdesac_time,
        m.culdesac_visits,
        m.collisions,
        m.replans,
        m.end,
        m.duration
    );
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let sc = load_scenario(&a.scenario, a.config.as_deref())?;
    let starts: Vec<String> = match &a.start {
        Some(s) => {
            if sc.start(s).is_none() {
                return Err(Failure::Config(
                    ConfigError::invalid("start", format!("no start pose named `{s}`")).into(),
                ));
            }
            vec![s.clone()]
        }
        None => sc.start_poses.iter().map(|p| p.name.clone()).collect(),
    };
    let mut specs = Vec::new();
    for start in &starts {
        for i in 0..a.runs {
            specs.push(RunSpec {
                scenario: sc.clone(),
                start: start.clone(),
                agent: a.agent,
                prefer: a.prefer,
                seed: a.seed.wrapping_add(i),
                duration: a.duration,
            });
        }
    }
    let mut report = PropertyReport::default();
    for (i, (spec, trace)) in specs.iter().zip(run_batch(&specs)).enumerate() {
        let trace = trace.map_err(anyhow::Error::from)?;
        let metrics = compute_metrics(&trace, sc.cutoff.as_ref());
        let dir = a.out.join(format!("run_{i:03}"));
        export(&trace, &metrics, &dir).with_context(|| format!("exporting run {i}"))?;
        info!("wrote {}", dir.display());
        print_metrics(
            &format!("run_{i:03} {} seed {}", spec.start, spec.seed),
            &metrics,
        );
        report.merge(&check_trace(&trace, LATENCY_BOUND_MS));
    }
    if a.agent == AgentKind::Mc && !report.is_clean() {
        return Err(Failure::Violation(format!("{:?}", report.violations())));
    }
    Ok(())
}

fn cmd_replay(trace: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let t = read_trace(trace).map_err(anyhow::Error::from)?;
    let metrics = compute_metrics(&t, t.header.cutoff.as_ref());
    println!(
        "{}",
        serde_json::to_string_pretty(&metrics).map_err(anyhow::Error::from)?
    );
    if let Some(out) = out {
        mcplan_core::harness::export::write_metrics(&metrics, out).map_err(anyhow::Error::from)?;
    }
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let mut specs: Vec<RunSpec> = (0..a.worlds)
        .map(|i| RunSpec {
            scenario: builtin::random_world(a.seed + i),
            start: "random".into(),
            agent: AgentKind::Mc,
            prefer: Preference::Random,
            seed: a.seed + i,
            duration: Some(a.duration),
        })
        .collect();
    for sc in [builtin::culdesac(), builtin::playground()] {
        for p in &sc.start_poses {
            specs.push(RunSpec {
                scenario: sc.clone(),
                start: p.name.clone(),
                agent: AgentKind::Mc,
                prefer: Preference::Left,
                seed: a.seed,
                duration: None,
            });
        }
    }
    let mut report = PropertyReport::default();
    for trace in run_batch(&specs) {
        report.merge(&check_trace(
            &trace.map_err(anyhow::Error::from)?,
            LATENCY_BOUND_MS,
        ));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?
    );
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{:?}", report.violations())))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let r = match cli.command {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Replay { trace, out } => cmd_replay(&trace, out.as_deref()),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Show { scenario, config } => load_scenario(&scenario, config.as_deref())
            .map(|sc| println!("{}", sc.to_json_pretty()))
            .map_err(Failure::from),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(v)) => {
            eprintln!("property violation: {v}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
