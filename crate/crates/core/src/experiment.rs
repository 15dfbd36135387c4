//! Experiment configuration and the work behind each CLI subcommand.

use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate_synthetic_with_report, GenerationReport, GeneratorConfig};
use crate::io::{load_multiplex, save_multiplex};
use crate::network::{LayerId, LayerSet, MultiplexNetwork, SeedSet};
use crate::pgm::FittedPgm;
use crate::propagation::{record_status_dataset, SpreadEvaluator, WorldSet};
use crate::reasoner::{exhaustive_optimum, run_method, BoundCheck, Method, ReasonerConfig, Solution};

pub const RESULTS_HEADER: &str = "method,k,o,l,total_spread,stderr,wall_seconds";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Edge-list file; takes precedence over `generator`.
    pub network: Option<PathBuf>,
    pub generator: Option<GeneratorConfig>,
    pub method: Method,
    /// Layer used by `celf-single`.
    pub layer: LayerId,
    pub output_dir: PathBuf,
    #[serde(flatten)]
    pub reasoner: ReasonerConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            network: None,
            generator: None,
            method: Method::MimReasoner,
            layer: 0,
            output_dir: PathBuf::from("out"),
            reasoner: ReasonerConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
        // flattened fields swallow typos, so check keys by hand
        let known = serde_json::to_value(Self::default())?;
        if let (Some(given), Some(known)) = (value.as_object(), known.as_object()) {
            if let Some(key) = given.keys().find(|k| !known.contains_key(*k)) {
                return Err(Error::InvalidConfig(format!("config: unknown field `{key}`")));
            }
        }
        serde_json::from_value(value).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn load_network(&self) -> Result<MultiplexNetwork> {
        match (&self.network, &self.generator) {
            (Some(path), _) => load_multiplex(path),
            (None, Some(gen)) => Ok(generate_synthetic_with_report(gen)?.0),
            (None, None) => Err(Error::InvalidConfig("no network file or generator configured".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: GeneratorConfig,
    pub report: GenerationReport,
}

/// Path of the manifest written next to a generated network.
pub fn manifest_path(network: &Path) -> PathBuf {
    network.with_extension("manifest.json")
}

/// Generates a network, writes it as an edge list plus a JSON manifest.
pub fn cmd_generate(cfg: &GeneratorConfig, out: &Path) -> Result<GenerationReport> {
    let (net, report) = generate_synthetic_with_report(cfg)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    save_multiplex(&net, out)?;
    let manifest = Manifest {
        generator: cfg.clone(),
        report: report.clone(),
    };
    let mpath = manifest_path(out);
    std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&mpath, e))?;
    Ok(report)
}

/// Solution JSON without fields that depend on the clock.
pub fn solution_json_without_timing(sol: &Solution) -> Result<String> {
    let mut v = serde_json::to_value(sol)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("wall_times");
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

/// Runs the configured method and writes `solution.json`, the Phase-1
/// tables when there are any, and one row of `results.csv`.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<Solution> {
    let start = Instant::now();
    let net = cfg.load_network()?;
    let (sol, phase1) = run_method(&net, &cfg.reasoner, cfg.method, cfg.layer)?;
    let wall = start.elapsed().as_secs_f64();

    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    write("solution.json", serde_json::to_string_pretty(&sol)?)?;
    if let Some(p1) = &phase1 {
        write("profit_cost.csv", p1.table.to_csv())?;
        write("allocation.csv", p1.allocation.to_csv())?;
    }

    let path = dir.join("results.csv");
    let fresh = !path.exists();
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::io(&path, e))?;
    let mut row = String::new();
    if fresh {
        row.push_str(RESULTS_HEADER);
        row.push('\n');
    }
    row.push_str(&format!(
        "{},{},{},{},{},{},{:.3}\n",
        sol.method,
        net.num_layers(),
        net.overlap_count(),
        cfg.reasoner.budget,
        sol.total_spread.mean,
        sol.total_spread.stderr,
        wall
    ));
    f.write_all(row.as_bytes()).map_err(|e| Error::io(&path, e))?;
    Ok(sol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub method: Method,
    pub k: usize,
    pub o: usize,
    pub budget: usize,
    pub sigma_hat: f64,
    pub sigma_opt: f64,
    pub optimum_seeds: SeedSet,
    pub solution_seeds: SeedSet,
    pub beta: f64,
    pub checks: Vec<BoundCheck>,
}

impl VerifyReport {
    pub fn passed(&self, bound: &str) -> bool {
        self.checks.iter().any(|c| c.name == bound && c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "method {} k={} o={} l={}\nsigma(S_hat) = {}\nsigma(S_opt) = {}\nbeta = {}\n",
            self.method, self.k, self.o, self.budget, self.sigma_hat, self.sigma_opt, self.beta
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<8} required ratio {:.6} achieved {:.6}: {}\n",
                c.name,
                c.required,
                c.ratio,
                if c.passed { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Solves on exact world enumeration and compares against the exhaustive
/// optimum. Refuses instances above the enumeration guards.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let net = cfg.load_network()?;
    let mut rc = cfg.reasoner.clone();
    rc.exact = true;
    let worlds = WorldSet::enumerate(&net, net.all_layers())?;
    let sigma = SpreadEvaluator::new(&net, &worlds, net.all_layers());
    let (sigma_opt, optimum_seeds) = exhaustive_optimum(&sigma, &net.member_nodes(), rc.budget)?;
    let (sol, _) = run_method(&net, &rc, cfg.method, cfg.layer)?;
    let cert = sol.certificate.clone().with_optimum(sigma_opt);
    Ok(VerifyReport {
        method: cfg.method,
        k: net.num_layers(),
        o: net.overlap_count(),
        budget: rc.budget,
        sigma_hat: sol.total_spread.mean,
        sigma_opt,
        optimum_seeds,
        solution_seeds: sol.union_seeds,
        beta: sol.beta,
        checks: cert.checks(),
    })
}

/// Records a status dataset for `seeds` diffusing in `layers`, fits a tree
/// and returns its JSON description.
pub fn cmd_inspect_pgm(
    net: &MultiplexNetwork,
    seeds: &SeedSet,
    layers: &[LayerId],
    cfg: &ReasonerConfig,
) -> Result<serde_json::Value> {
    cfg.validate()?;
    for &l in layers {
        net.check_layer(l)?;
    }
    let d = record_status_dataset(net, seeds, LayerSet::from_layers(layers.iter().copied()), cfg.mc, cfg.seed)?;
    let pgm = FittedPgm::fit(&d, cfg.xi, cfg.alpha)?;
    let mut v = pgm.tree.to_json();
    v["seeds"] = serde_json::to_value(seeds)?;
    v["layers"] = serde_json::to_value(layers)?;
    v["xi"] = serde_json::to_value(cfg.xi)?;
    Ok(v)
}
