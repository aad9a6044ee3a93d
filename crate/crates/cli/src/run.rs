use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use besselinv::forward::{add_noise, generate_data, PotentialModel, ScatteringData};
use besselinv::inverse::{BetaProfile, BetaSolver, TailModel, WeightOptions};
use besselinv::recover::{error_report, recover_potential_with, ErrorReport, RecoveredPotential};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Failure classes, one per non-zero exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config, or input files.
    Config(anyhow::Error),
    /// The numerics failed; outputs written so far carry diagnostics.
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Numerical(e) => e,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn config<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Config(e.into())
}

fn numerical<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Numerical(e.into())
}

/// A β profile on disk, with what `recover` needs to interpret it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub ell: f64,
    pub tail_model: TailModel,
    pub f_tilde: f64,
    pub c1: f64,
    #[serde(flatten)]
    pub profile: BetaProfile,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    #[serde(rename = "M")]
    m: usize,
    cond: f64,
    lambda_min: f64,
    lambda_max: f64,
}

#[derive(Debug, Serialize)]
struct Sweep {
    x: f64,
    rows: Vec<SweepRow>,
}

#[derive(Debug, Default, Serialize)]
struct Timings {
    generate_s: f64,
    invert_s: f64,
    recover_s: f64,
    sweep_s: f64,
    total_s: f64,
}

#[derive(Debug, Serialize)]
struct ErrorSummary {
    max_abs: f64,
    l2: f64,
    included_nodes: usize,
}

#[derive(Debug, Serialize)]
struct Diagnostics<'a> {
    model: PotentialModel,
    noise: f64,
    seed: u64,
    #[serde(rename = "M")]
    m: usize,
    workers: usize,
    tail_model: TailModel,
    f_tilde: f64,
    c1: f64,
    bound_states: usize,
    x_nodes: &'a [f64],
    cond_per_node: &'a [f64],
    failures: &'a [besselinv::inverse::NodeFailure],
    flagged: &'a [f64],
    error: ErrorSummary,
    sweep: Option<Sweep>,
    timings: Timings,
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path).map(BufWriter::new).with_context(|| format!("creating {}", path.display())).map_err(config)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(config)?;
    writeln!(w).and_then(|_| w.flush()).map_err(config)
}

fn read_dataset(path: &Path) -> Outcome<ScatteringData> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(config)?;
    let data = ScatteringData::read_json(std::io::BufReader::new(file))
        .with_context(|| format!("reading dataset {}", path.display()))
        .map_err(config)?;
    data.validate().with_context(|| format!("dataset {}", path.display())).map_err(config)?;
    Ok(data)
}

fn read_profile(path: &Path) -> Outcome<ProfileDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("opening {}", path.display())).map_err(config)?;
    let doc: ProfileDocument =
        serde_json::from_str(&text).with_context(|| format!("reading profile {}", path.display())).map_err(config)?;
    doc.profile.validate().with_context(|| format!("profile {}", path.display())).map_err(config)?;
    Ok(doc)
}

/// Exact data for the configured model, with noise if requested.
fn dataset(cfg: &RunConfig) -> Outcome<(PotentialModel, ScatteringData)> {
    let model = cfg.model().map_err(config)?;
    let grid = cfg.grid().map_err(config)?;
    let noise = cfg.noise().map_err(config)?;
    let mut data = generate_data(&model, &grid).context("generating data").map_err(numerical)?;
    if noise > 0.0 {
        data = add_noise(&data, noise, cfg.seed()).map_err(numerical)?;
    }
    Ok((model, data))
}

fn invert(cfg: &RunConfig, data: &ScatteringData, opts: &WeightOptions) -> Outcome<(ProfileDocument, usize)> {
    let xs = cfg.x_nodes().map_err(config)?;
    let workers = cfg.workers().map_err(config)?;
    let solver = BetaSolver::new(data, cfg.max_index(), opts).context("building the weight").map_err(numerical)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(numerical)?;
    let results = pool.install(|| xs.par_iter().map(|&x| (x, solver.solve_at(x))).collect::<Vec<_>>());
    let weight = solver.weight();
    let doc = ProfileDocument {
        ell: data.ell,
        tail_model: opts.tail_model,
        f_tilde: weight.f_tilde,
        c1: weight.c1,
        profile: BetaProfile::from_results(cfg.max_index(), results),
    };
    Ok((doc, workers))
}

fn recover(cfg: &RunConfig, doc: &ProfileDocument) -> Outcome<RecoveredPotential> {
    recover_potential_with(&doc.profile, doc.ell, &cfg.breakpoints(), &cfg.routes())
        .context("spline differentiation")
        .map_err(|e| match e.downcast_ref::<besselinv::Error>() {
            Some(besselinv::Error::LengthMismatch { .. }) => config(e),
            _ => numerical(e),
        })
}

fn report_failures(profile: &BetaProfile) -> Outcome<()> {
    if profile.failures.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = profile.failures.iter().map(|f| format!("x = {}: {}", f.x, f.reason)).collect();
    Err(numerical(anyhow!(
        "{} of {} nodes failed:\n  {}",
        profile.failures.len(),
        profile.failures.len() + profile.x_nodes.len(),
        list.join("\n  ")
    )))
}

pub fn generate(cfg: &RunConfig) -> Outcome<()> {
    let out = cfg.require(&cfg.out, "out").map_err(config)?;
    let (_, data) = dataset(cfg)?;
    write_json(out, &data)?;
    if let Some(path) = &cfg.jost_csv {
        let mut w = create(path)?;
        data.write_csv(&mut w).and_then(|_| w.flush()).map_err(config)?;
    }
    println!("{} Jost samples, {} bound states", data.jost.len(), data.bound_states.len());
    if !data.bound_states.is_empty() {
        println!("{:>3} {:>24} {:>24}", "j", "tau", "c");
        for (j, b) in data.bound_states.iter().enumerate() {
            println!("{:>3} {:>24.16e} {:>24.16e}", j + 1, b.tau, b.c);
        }
    }
    Ok(())
}

pub fn invert_cmd(cfg: &RunConfig) -> Outcome<()> {
    let input = cfg.require(&cfg.data, "data").map_err(config)?;
    let out = cfg.require(&cfg.out, "out").map_err(config)?;
    let data = read_dataset(input)?;
    let opts = cfg.weight_options().map_err(config)?;
    let (doc, _) = invert(cfg, &data, &opts)?;
    write_json(out, &doc)?;
    println!("solved {} nodes, F~ = {}, c1 = {}", doc.profile.x_nodes.len(), doc.f_tilde, doc.c1);
    report_failures(&doc.profile)
}

pub fn recover_cmd(cfg: &RunConfig) -> Outcome<()> {
    let input = cfg.require(&cfg.profile, "profile").map_err(config)?;
    let out = cfg.require(&cfg.out, "out").map_err(config)?;
    let doc = read_profile(input)?;
    let model = if cfg.has_model() { Some(cfg.model().map_err(config)?) } else { None };
    if let Some(m) = &model {
        if m.ell() != doc.ell {
            return Err(config(anyhow!("model has ell = {}, profile has ell = {}", m.ell(), doc.ell)));
        }
    }
    let rec = recover(cfg, &doc)?;
    let mut w = create(out)?;
    match &model {
        Some(m) => {
            let report = error_report(&rec, m, &cfg.exclusions());
            report.write_csv(&mut w).map_err(config)?;
            println!("max |q_rec - q| = {}, L2 = {} over {} nodes", report.max_abs, report.l2, report.included);
        }
        None => rec.write_csv(&mut w).map_err(config)?,
    }
    w.flush().map_err(config)?;
    flagged_warning(&rec);
    Ok(())
}

fn flagged_warning(rec: &RecoveredPotential) {
    if !rec.flagged.is_empty() {
        eprintln!("warning: {} nodes omitted by the denominator guard: {:?}", rec.flagged.len(), rec.flagged);
    }
}

fn sweep(cfg: &RunConfig, data: &ScatteringData, opts: &WeightOptions, top: usize) -> Outcome<Sweep> {
    let xs = cfg.x_nodes().map_err(config)?;
    let x = cfg.sweep_x.unwrap_or(xs[xs.len() - 1]);
    if !(x > 0.0) {
        return Err(config(anyhow!("sweep-x must be positive, got {x}")));
    }
    let solver = BetaSolver::new(data, top, opts).map_err(numerical)?;
    let full = solver.system_at(x).with_context(|| format!("sweep system at x = {x}")).map_err(numerical)?;
    let rows = (0..=top)
        .map(|m| {
            let sys = full.leading(m + 1).expect("block within the swept system");
            let (lambda_min, lambda_max) = sys.eigen_extremes();
            SweepRow { m, cond: sys.cond, lambda_min, lambda_max }
        })
        .collect();
    Ok(Sweep { x, rows })
}

fn write_pipeline_csv(path: &Path, doc: &ProfileDocument, report: &ErrorReport) -> Outcome<()> {
    let mut w = create(path)?;
    pipeline_rows(&mut w, doc, report).map_err(config)
}

fn pipeline_rows(w: &mut impl Write, doc: &ProfileDocument, report: &ErrorReport) -> std::io::Result<()> {
    writeln!(w, "x,beta0,q_rec,q_true,abs_err")?;
    let mut k = 0;
    for e in &report.nodes {
        while doc.profile.x_nodes[k] != e.x {
            k += 1;
        }
        writeln!(w, "{},{},{},{},{}", e.x, doc.profile.beta0[k], e.q_recovered, e.q_true, e.abs_error)?;
    }
    w.flush()
}

pub fn pipeline(cfg: &RunConfig) -> Outcome<()> {
    let out = cfg.require(&cfg.out, "out").map_err(config)?;
    let start = Instant::now();
    let mut timings = Timings::default();
    let opts = cfg.weight_options().map_err(config)?;
    cfg.x_nodes().map_err(config)?;
    cfg.workers().map_err(config)?;

    let (model, data) = dataset(cfg)?;
    timings.generate_s = start.elapsed().as_secs_f64();

    let t = Instant::now();
    let (doc, workers) = invert(cfg, &data, &opts)?;
    timings.invert_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let rec = recover(cfg, &doc);
    timings.recover_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let sweep = cfg.sweep_m.map(|top| sweep(cfg, &data, &opts, top)).transpose()?;
    timings.sweep_s = t.elapsed().as_secs_f64();
    timings.total_s = start.elapsed().as_secs_f64();

    let empty = RecoveredPotential {
        ell: doc.ell,
        x_nodes: Vec::new(),
        q: Vec::new(),
        u0: Vec::new(),
        breakpoints: Vec::new(),
        flagged: Vec::new(),
    };
    let rec_ref = rec.as_ref().unwrap_or(&empty);
    let report = error_report(rec_ref, &model, &cfg.exclusions());
    write_pipeline_csv(out, &doc, &report)?;
    if let Some(path) = &cfg.diagnostics {
        let diag = Diagnostics {
            model,
            noise: cfg.noise().map_err(config)?,
            seed: cfg.seed(),
            m: cfg.max_index(),
            workers,
            tail_model: opts.tail_model,
            f_tilde: doc.f_tilde,
            c1: doc.c1,
            bound_states: data.bound_states.len(),
            x_nodes: &doc.profile.x_nodes,
            cond_per_node: &doc.profile.cond_per_node,
            failures: &doc.profile.failures,
            flagged: &rec_ref.flagged,
            error: ErrorSummary { max_abs: report.max_abs, l2: report.l2, included_nodes: report.included },
            sweep,
            timings,
        };
        write_json(path, &diag)?;
    }
    flagged_warning(rec_ref);
    report_failures(&doc.profile)?;
    rec?;
    println!(
        "{} nodes, max |q_rec - q| = {}, L2 = {} over {} nodes",
        report.nodes.len(),
        report.max_abs,
        report.l2,
        report.included
    );
    Ok(())
}
