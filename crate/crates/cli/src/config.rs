//! Run configuration shared by every subcommand. The same struct is parsed
//! from flags and from a JSON file; flags win field by field.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use besselinv::forward::PotentialModel;
use besselinv::inverse::{TailModel, WeightOptions};
use besselinv::quadrature::RhoGrid;
use besselinv::recover::{Exclusions, Route};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub const WORKERS_ENV: &str = "BESSELINV_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    SquareWell,
    Hulthen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailArg {
    InverseSquare,
    InverseLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Beta,
    ParticularSolution,
}

/// Open interval `a:b` excluded from error summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
        let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if !(a < b) {
            return Err(format!("interval {s:?} is empty"));
        }
        Ok(Interval(a, b))
    }
}

#[derive(Debug, Clone, Default, PartialEq, clap::Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Benchmark potential.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Square-well depth parameter (q = -Q² inside the well).
    #[arg(long = "Q")]
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    /// Square-well radius.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Angular momentum index ℓ.
    #[arg(long, allow_hyphen_values = true)]
    pub ell: Option<f64>,
    /// Hulthén screening parameter, 0 < δ < 1.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Upper end of the ρ grid [default: 100].
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// ρ grid spacing [default: 0.1].
    #[arg(long)]
    pub step: Option<f64>,
    /// First x node [default: 0.05].
    #[arg(long)]
    pub x_start: Option<f64>,
    /// Last x node [default: 3].
    #[arg(long)]
    pub x_stop: Option<f64>,
    /// Number of equally spaced x nodes [default: 60].
    #[arg(long)]
    pub x_count: Option<usize>,
    /// Highest index of the truncated system (M+1 equations) [default: 9].
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// Relative uniform noise level added to the data, 0 <= noise < 1 [default: 0].
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Large-ρ model of |F|⁻² − 1 [default: inverse-linear for hulthen, else inverse-square].
    #[arg(long, value_enum)]
    pub tail_model: Option<TailArg>,
    /// Fraction of the ρ grid used to fit the tail [default: 0.2].
    #[arg(long)]
    pub window: Option<f64>,
    /// Spline breakpoints, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub breakpoints: Option<Vec<f64>>,
    /// Differentiation route, one for all segments or one per segment.
    #[arg(long = "route", value_enum, value_delimiter = ',')]
    pub routes: Option<Vec<RouteArg>>,
    /// Open interval a:b left out of error summaries; repeatable.
    #[arg(long)]
    pub exclude: Option<Vec<Interval>>,
    /// Nodes at each end left out of error summaries [default: 0].
    #[arg(long)]
    pub exclude_ends: Option<usize>,
    /// Worker threads for the per-node solves [default: $BESSELINV_WORKERS or all cores].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Record the condition number and eigenvalue range for M = 0..=N.
    #[arg(long = "sweep-M")]
    #[serde(rename = "sweep-M")]
    pub sweep_m: Option<usize>,
    /// x at which the M sweep is taken [default: x-stop].
    #[arg(long)]
    pub sweep_x: Option<f64>,
    /// Input dataset (invert).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Input profile (recover).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Main output file.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Jost samples as CSV (generate).
    #[arg(long)]
    pub jost_csv: Option<PathBuf>,
    /// Diagnostics JSON (pipeline).
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            model: over.model.or(self.model),
            q: over.q.or(self.q),
            r: over.r.or(self.r),
            ell: over.ell.or(self.ell),
            delta: over.delta.or(self.delta),
            rho_max: over.rho_max.or(self.rho_max),
            step: over.step.or(self.step),
            x_start: over.x_start.or(self.x_start),
            x_stop: over.x_stop.or(self.x_stop),
            x_count: over.x_count.or(self.x_count),
            m: over.m.or(self.m),
            noise: over.noise.or(self.noise),
            seed: over.seed.or(self.seed),
            tail_model: over.tail_model.or(self.tail_model),
            window: over.window.or(self.window),
            breakpoints: over.breakpoints.or(self.breakpoints),
            routes: over.routes.or(self.routes),
            exclude: over.exclude.or(self.exclude),
            exclude_ends: over.exclude_ends.or(self.exclude_ends),
            workers: over.workers.or(self.workers),
            sweep_m: over.sweep_m.or(self.sweep_m),
            sweep_x: over.sweep_x.or(self.sweep_x),
            data: over.data.or(self.data),
            profile: over.profile.or(self.profile),
            out: over.out.or(self.out),
            jost_csv: over.jost_csv.or(self.jost_csv),
            diagnostics: over.diagnostics.or(self.diagnostics),
        }
    }

    pub fn has_model(&self) -> bool {
        self.model.is_some()
    }

    pub fn model(&self) -> Result<PotentialModel> {
        let kind = self.model.ok_or_else(|| anyhow!("--model is required"))?;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| anyhow!("--{name} is required for this model"));
        let model = match kind {
            ModelKind::SquareWell => {
                let ell = need(self.ell, "ell")?;
                if ell < 0.0 || ell.fract() != 0.0 || ell > u32::MAX as f64 {
                    bail!("square well needs a non-negative integer ell, got {ell}");
                }
                PotentialModel::SquareWell { q: need(self.q, "Q")?, r: need(self.r, "R")?, ell: ell as u32 }
            }
            ModelKind::Hulthen => {
                PotentialModel::Hulthen { delta: need(self.delta, "delta")?, ell: need(self.ell, "ell")? }
            }
        };
        model.validate()?;
        Ok(model)
    }

    pub fn grid(&self) -> Result<RhoGrid> {
        Ok(RhoGrid::new(self.rho_max.unwrap_or(100.0), self.step.unwrap_or(0.1))?)
    }

    pub fn x_nodes(&self) -> Result<Vec<f64>> {
        let start = self.x_start.unwrap_or(0.05);
        let stop = self.x_stop.unwrap_or(3.0);
        let count = self.x_count.unwrap_or(60);
        if !(start > 0.0) || !start.is_finite() || !stop.is_finite() {
            bail!("x-start must be positive and finite, got {start}");
        }
        match count {
            0 => bail!("x-count must be at least 1"),
            1 if start == stop => Ok(vec![start]),
            1 => bail!("a single x node needs x-start == x-stop"),
            _ if stop <= start => bail!("x-stop ({stop}) must exceed x-start ({start})"),
            _ => Ok((0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect()),
        }
    }

    pub fn max_index(&self) -> usize {
        self.m.unwrap_or(9)
    }

    pub fn noise(&self) -> Result<f64> {
        let level = self.noise.unwrap_or(0.0);
        if !(0.0..1.0).contains(&level) {
            bail!("noise must satisfy 0 <= noise < 1, got {level}");
        }
        Ok(level)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn weight_options(&self) -> Result<WeightOptions> {
        let tail_model = match self.tail_model {
            Some(TailArg::InverseSquare) => TailModel::InverseSquare,
            Some(TailArg::InverseLinear) => TailModel::InverseLinear,
            None if self.model == Some(ModelKind::Hulthen) => TailModel::InverseLinear,
            None => TailModel::InverseSquare,
        };
        let window = self.window.unwrap_or(0.2);
        if !(window > 0.0 && window <= 1.0) {
            bail!("window must lie in (0, 1], got {window}");
        }
        Ok(WeightOptions { tail_model, window })
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone().unwrap_or_default()
    }

    pub fn routes(&self) -> Vec<Route> {
        let routes = self.routes.clone().unwrap_or_else(|| vec![RouteArg::Beta]);
        routes
            .into_iter()
            .map(|r| match r {
                RouteArg::Beta => Route::Beta,
                RouteArg::ParticularSolution => Route::ParticularSolution,
            })
            .collect()
    }

    pub fn exclusions(&self) -> Exclusions {
        Exclusions {
            intervals: self.exclude.iter().flatten().map(|i| (i.0, i.1)).collect(),
            end_nodes: self.exclude_ends.unwrap_or(0),
        }
    }

    /// Flag, then environment, then available parallelism.
    pub fn workers(&self) -> Result<usize> {
        let n = match self.workers {
            Some(n) => n,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v:?} is not a count"))?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if n == 0 {
            bail!("worker count must be at least 1");
        }
        Ok(n)
    }

    pub fn require<'a>(&self, path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        path.as_deref().ok_or_else(|| anyhow!("--{flag} is required"))
    }
}
