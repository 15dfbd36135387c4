use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mim_core::experiment::{cmd_generate, cmd_inspect_pgm, cmd_solve, cmd_verify, ExperimentConfig};
use mim_core::generate::GeneratorConfig;
use mim_core::io::load_multiplex;
use mim_core::reasoner::{ClampMode, Method, ReasonerConfig};
use mim_core::{Error, LayerId, NodeId, SeedSet};

/// Influence maximization on multiplex networks.
#[derive(Parser)]
#[command(name = "mim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic Erdős–Rényi multiplex network.
    Generate(GenerateArgs),
    /// Select seeds with one method and write the solution.
    Solve(SolveArgs),
    /// Check approximation bounds against an exhaustive optimum.
    Verify(SolveArgs),
    /// Fit a Chow-Liu tree on a status dataset and print it as JSON.
    InspectPgm(InspectArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON generator config; the preset flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of layers of the preset layer-size table (3 to 9).
    #[arg(long, default_value_t = 3)]
    layers: usize,
    /// Shared identities as a fraction of the largest layer.
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    /// Divide preset node and edge counts by this factor.
    #[arg(long, default_value_t = 1)]
    scale_down: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge-list path; a manifest is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    mc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    rollouts: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    clamp_mode: Option<ClampMode>,
    /// Stop after the knapsack allocation.
    #[arg(long)]
    no_phase2: bool,
    /// Enumerate live-edge worlds instead of sampling (small instances only).
    #[arg(long)]
    exact: bool,
    /// Layer for `celf-single`.
    #[arg(long)]
    layer: Option<LayerId>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn into_config(self) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let r = &mut c.reasoner;
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(
            budget => r.budget, mc => r.mc, seed => r.seed, xi => r.xi, gamma => r.gamma,
            tau => r.tau, rollouts => r.rollouts, delta => r.delta, restarts => r.restarts,
            alpha => r.alpha, clamp_mode => r.clamp_mode, method => c.method, layer => c.layer,
            out => c.output_dir,
        );
        if self.no_phase2 {
            r.phase2 = false;
        }
        if self.exact {
            r.exact = true;
        }
        if let Some(n) = self.network {
            c.network = Some(n);
        }
        Ok(c)
    }
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    network: PathBuf,
    /// Comma-separated seed node ids.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<NodeId>,
    /// Comma-separated layers the diffusion runs in.
    #[arg(long, value_delimiter = ',', required = true)]
    layers: Vec<LayerId>,
    #[arg(long, default_value_t = 100)]
    mc: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = mim_core::pgm::DEFAULT_XI)]
    xi: f64,
    #[arg(long, default_value_t = mim_core::pgm::DEFAULT_ALPHA)]
    alpha: f64,
    /// Write the tree here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate(a) => {
            let cfg = match &a.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
                        path: p.display().to_string(),
                        source: e,
                    })?;
                    serde_json::from_str::<GeneratorConfig>(&text)
                        .map_err(|e| Error::InvalidConfig(format!("generator config: {e}")))?
                }
                None => GeneratorConfig::preset(a.layers, a.overlap, a.seed, a.scale_down)?,
            };
            let report = cmd_generate(&cfg, &a.out)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Solve(a) => {
            let cfg = a.into_config()?;
            let sol = cmd_solve(&cfg)?;
            println!(
                "{} spread {:.3} ± {:.3} with {} seeds; wrote {}",
                sol.method,
                sol.total_spread.mean,
                sol.total_spread.stderr,
                sol.union_seeds.len(),
                cfg.output_dir.join("solution.json").display()
            );
        }
        Command::Verify(a) => {
            let cfg = a.into_config()?;
            let report = cmd_verify(&cfg)?;
            print!("{}", report.to_text());
        }
        Command::InspectPgm(a) => {
            let net = load_multiplex(&a.network)?;
            let rc = ReasonerConfig {
                mc: a.mc,
                seed: a.seed,
                xi: a.xi,
                alpha: a.alpha,
                ..Default::default()
            };
            let seeds = SeedSet::from_nodes(a.seeds.iter().copied());
            let json = serde_json::to_string_pretty(&cmd_inspect_pgm(&net, &seeds, &a.layers, &rc)?)?;
            match a.out {
                Some(p) => std::fs::write(&p, json).map_err(|e| Error::Io { path: p.display().to_string(), source: e })?,
                None => println!("{json}"),
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::InvalidConfig(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("MIM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}
