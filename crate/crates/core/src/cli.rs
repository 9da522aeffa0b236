//! Batch front end: experiment configs, suite dispatch and report files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{weighted_sup_check, FunctionSpec, TargetFunction};
use crate::geometry::{SampleGrid, ZSet};
use crate::minimax::{minimax_on_points, ApproxCache, MinimaxOptions};
use crate::moduli::{complete_on, dt_modulus, h_values, main_part_on, mt_modulus};
use crate::verify::{verify_polynomial_inequalities, Grids, VerdictReport, Verifier};
use crate::weights::{classify_weight, Weight, WeightSpec};

pub const SUITES: &[&str] = &[
    "jackson",
    "inverse",
    "realization",
    "equivalence_chain",
    "modulus_properties",
    "polynomial_inequalities",
    "near_best_extension",
    "mt_sandwich",
];

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn twenty() -> usize {
    20
}
fn ten() -> usize {
    10
}
fn default_t_ladder() -> Vec<f64> {
    vec![0.25, 0.125, 0.0625, 0.03125]
}
fn default_mt_ladder() -> Vec<f64> {
    vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]
}
fn default_poly_ladder() -> Vec<usize> {
    vec![8, 16, 32, 64]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub weight: WeightSpec,
    pub zset: ZSet,
    pub function: FunctionSpec,
    pub r: usize,
    #[serde(rename = "A", default = "one")]
    pub a: f64,
    #[serde(rename = "B", default = "one")]
    pub b: f64,
    pub n_ladder: Vec<usize>,
    #[serde(default)]
    pub grids: Grids,
    pub suites: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "two")]
    pub c2: f64,
    #[serde(default = "default_t_ladder")]
    pub t_ladder: Vec<f64>,
    #[serde(default = "default_mt_ladder")]
    pub mt_t_ladder: Vec<f64>,
    #[serde(default = "twenty")]
    pub trials: usize,
    #[serde(default = "default_poly_ladder")]
    pub poly_n_ladder: Vec<usize>,
    /// Weights for the polynomial inequalities; defaults to the main weight.
    #[serde(default)]
    pub poly_weights: Vec<WeightSpec>,
    #[serde(default = "ten")]
    pub near_best_levels: usize,
}

/// A validated config with its objects built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub f: TargetFunction,
    pub w: Weight,
    pub poly_weights: Vec<Weight>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn build(self) -> Result<Experiment> {
        let cfg = |m: String| Error::Config(m);
        if self.suites.is_empty() {
            return Err(cfg("suites must not be empty".into()));
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(cfg(format!("unknown suite '{s}'; known: {}", SUITES.join(", "))));
            }
        }
        if self.n_ladder.is_empty() || self.n_ladder[0] == 0 || self.n_ladder.windows(2).any(|p| p[0] >= p[1]) {
            return Err(cfg(format!("n_ladder must be nonempty, positive and strictly increasing: {:?}", self.n_ladder)));
        }
        if self.r == 0 || self.r > crate::moduli::MAX_ORDER {
            return Err(cfg(format!("r = {} outside 1..={}", self.r, crate::moduli::MAX_ORDER)));
        }
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(cfg(format!("A = {}, B = {} must be positive", self.a, self.b)));
        }
        let max_n = self.n_ladder[self.n_ladder.len() - 1];
        if self.grids.x_grid < crate::minimax::MIN_GRID_FACTOR * max_n {
            return Err(cfg(format!("x_grid {} below 8·max n = {}", self.grids.x_grid, 8 * max_n)));
        }
        let f = self.function.build().map_err(|e| cfg(e.to_string()))?;
        let w = self.weight.build().map_err(|e| cfg(e.to_string()))?;
        let poly_weights = if self.poly_weights.is_empty() {
            vec![w.clone()]
        } else {
            self.poly_weights.iter().map(|s| s.build()).collect::<Result<Vec<_>>>().map_err(|e| cfg(e.to_string()))?
        };
        let (_, bounded) = weighted_sup_check(&f, &w, 12);
        if !bounded {
            return Err(cfg(format!("w f is unbounded for f = {}, w = {}", f.label(), w.label())));
        }
        Ok(Experiment { config: self, f, w, poly_weights })
    }
}

impl Experiment {
    pub fn verifier(&self, cache: Arc<ApproxCache>) -> Result<Verifier> {
        let c = &self.config;
        let v = Verifier::new(self.f.clone(), self.w.clone(), c.zset.clone(), c.r, c.a, c.b, c.grids)?.with_cache(cache);
        Ok(match c.threshold {
            Some(t) => v.with_threshold(t),
            None => v,
        })
    }

    /// Runs one suite.
    pub fn run_suite(&self, name: &str, v: &Verifier) -> Result<Vec<VerdictReport>> {
        let c = &self.config;
        let ns = &c.n_ladder;
        match name {
            "jackson" => v.jackson(ns),
            "inverse" => Ok(vec![v.inverse(ns)?]),
            "realization" => v.realization(ns, c.c1, c.c2),
            "equivalence_chain" => Ok(vec![v.chain(ns)?]),
            "modulus_properties" => v.modulus_properties(&c.t_ladder),
            "polynomial_inequalities" => verify_polynomial_inequalities(&self.poly_weights, &c.poly_n_ladder, c.trials, c.seed),
            "near_best_extension" => v.near_best_extension(c.near_best_levels),
            "mt_sandwich" => v.mt_sandwich(&c.mt_t_ladder),
            other => Err(Error::Config(format!("unknown suite '{other}'"))),
        }
    }

    /// Runs `names` (all configured suites when empty) concurrently and
    /// returns the reports in suite order.
    pub fn run(&self, names: &[String]) -> Result<Vec<VerdictReport>> {
        let chosen: Vec<String> = if names.is_empty() { self.config.suites.clone() } else { names.to_vec() };
        for s in &chosen {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::Config(format!("unknown suite '{s}'; known: {}", SUITES.join(", "))));
            }
        }
        let v = self.verifier(Arc::new(ApproxCache::new()))?;
        let per: Vec<Vec<VerdictReport>> = chosen.par_iter().map(|s| self.run_suite(s, &v)).collect::<Result<_>>()?;
        Ok(per.into_iter().flatten().collect())
    }
}

/// File stem for a report name.
pub fn file_stem(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() || ch == '.' || ch == '-' {
            out.push(ch);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// Writes `<stem>.json` and `<stem>.csv` per report, numbering repeated
/// stems, and a `summary.csv`.
pub fn write_reports(dir: &Path, reports: &[VerdictReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut seen = BTreeSet::new();
    let mut summary = String::from("report,pass,max_ratio,median_ratio,rows\n");
    for r in reports {
        let mut stem = file_stem(&r.theorem);
        let mut k = 2;
        while !seen.insert(stem.clone()) {
            stem = format!("{}_{k}", file_stem(&r.theorem));
            k += 1;
        }
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(r)?)?;
        fs::write(dir.join(format!("{stem}.csv")), r.to_csv())?;
        summary.push_str(&format!("{stem},{},{:e},{:e},{}\n", r.pass, r.max_ratio, r.median_ratio, r.rows.len()));
    }
    fs::write(dir.join("summary.csv"), summary)?;
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "wapprox", about = "Weighted polynomial approximation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (JSON).
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: config output_dir, else ./out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Multiplies every grid size.
    #[arg(long, default_value_t = 1.0)]
    pub grid_scale: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Doubling, A* and W*(Z) estimates for the configured weight.
    CheckWeight(Common),
    /// Minimax errors E_n(f, [-1, 1])_w along the n ladder.
    Approx(Common),
    /// Moduli at t = 1/n along the n ladder.
    Modulus(Common),
    /// Runs verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run (repeatable); default: the config's suites.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

/// Loads and validates a config with command-line overrides applied.
pub fn load_experiment(c: &Common) -> Result<(Experiment, PathBuf)> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if !(c.grid_scale > 0.0 && c.grid_scale.is_finite()) {
        return Err(Error::Config(format!("--grid-scale {} must be positive", c.grid_scale)));
    }
    if c.grid_scale != 1.0 {
        cfg.grids = cfg.grids.scaled(c.grid_scale);
    }
    let out = c.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg.build()?, out))
}

fn check_weight(exp: &Experiment, out: &Path) -> Result<bool> {
    let report = classify_weight(&exp.w, &exp.config.zset, &[128, 256, 512])?;
    fs::create_dir_all(out)?;
    fs::write(out.join("weight_class.json"), serde_json::to_string_pretty(&report)?)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(!report.diverging && report.wstar_pass)
}

fn approx(exp: &Experiment, out: &Path) -> Result<()> {
    let grid = SampleGrid::new(exp.config.grids.x_grid, &exp.config.zset);
    let rows = exp
        .config
        .n_ladder
        .par_iter()
        .map(|&n| minimax_on_points(&exp.f, &exp.w, [-1.0, 1.0], n, grid.points(), MinimaxOptions::default()))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("n,error,levelled_error,iterations,method,alternations\n");
    for (n, r) in exp.config.n_ladder.iter().zip(&rows) {
        csv.push_str(&format!(
            "{n},{:e},{:e},{},{:?},{}\n",
            r.error,
            r.levelled_error,
            r.iterations,
            r.method,
            r.alternations(1e-6 * r.error.max(1e-300))
        ));
    }
    fs::create_dir_all(out)?;
    fs::write(out.join("approx.csv"), &csv)?;
    fs::write(out.join("approx.json"), serde_json::to_string_pretty(&rows)?)?;
    print!("{csv}");
    Ok(())
}

fn modulus(exp: &Experiment, out: &Path) -> Result<()> {
    let c = &exp.config;
    let grid = SampleGrid::new(c.grids.x_grid, &c.zset);
    let cache = ApproxCache::new();
    let mut csv = String::from("n,t,main_part,complete,dt,mt\n");
    for &n in &c.n_ladder {
        let t = 1.0 / n as f64;
        let hs = h_values(t.min((2.0 / c.a).sqrt()), c.grids.h_grid);
        let main = main_part_on(&exp.f, &exp.w, &c.zset, c.r, c.a, &hs, grid.points());
        let comp = complete_on(&exp.f, &exp.w, &c.zset, c.r, c.a, c.b, t, &hs, &grid, &cache)?;
        let dt = dt_modulus(&exp.f, &exp.w, c.r, t, c.grids.h_grid, &grid)?;
        let mt = mt_modulus(&exp.f, &exp.w, &c.zset, c.r, t, c.grids.h_grid, &grid, &cache)
            .map(|m| format!("{:e}", m.value))
            .unwrap_or_default();
        csv.push_str(&format!("{n},{t:e},{:e},{:e},{:e},{mt}\n", main.value, comp.value, dt.value));
    }
    fs::create_dir_all(out)?;
    fs::write(out.join("moduli.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let common = match &cli.command {
        Command::CheckWeight(c) | Command::Approx(c) | Command::Modulus(c) => c,
        Command::Verify { common, .. } => common,
    };
    let (exp, out) = match load_experiment(common) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::CheckWeight(_) => check_weight(&exp, &out),
        Command::Approx(_) => approx(&exp, &out).map(|_| true),
        Command::Modulus(_) => modulus(&exp, &out).map(|_| true),
        Command::Verify { suites, .. } => exp.run(suites).and_then(|reports| {
            write_reports(&out, &reports)?;
            for r in &reports {
                println!("{}", r.summary_line());
            }
            Ok(reports.iter().all(|r| r.pass))
        }),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
