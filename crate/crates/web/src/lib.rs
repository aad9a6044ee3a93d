//! Browser bindings: Jost curves, potential recovery and the condition
//! sweep, exposed through wasm-bindgen. Every export has a plain Rust twin
//! (`*_impl`) so the logic is testable off the browser.

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use besselinv::forward::{add_noise, generate_data, PotentialModel, ScatteringData};
use besselinv::inverse::{beta_profile, build_gl_weight, BetaSolver, TailModel, WeightOptions};
use besselinv::quadrature::RhoGrid;
use besselinv::recover::{error_report, recover_potential_with, Exclusions, Route};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Model(PotentialModel);

#[wasm_bindgen]
impl Model {
    #[wasm_bindgen(js_name = squareWell)]
    pub fn square_well(q: f64, r: f64, ell: u32) -> Result<Model, JsError> {
        Model::checked(PotentialModel::SquareWell { q, r, ell }).map_err(|e| JsError::new(&e))
    }

    pub fn hulthen(delta: f64, ell: f64) -> Result<Model, JsError> {
        Model::checked(PotentialModel::Hulthen { delta, ell }).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter)]
    pub fn ell(&self) -> f64 {
        self.0.ell()
    }
}

impl Model {
    pub fn checked(model: PotentialModel) -> Result<Model, String> {
        model.validate().map_err(|e| e.to_string())?;
        Ok(Model(model))
    }

    fn options(&self) -> WeightOptions {
        let tail_model = match self.0 {
            PotentialModel::Hulthen { .. } => TailModel::InverseLinear,
            PotentialModel::SquareWell { .. } => TailModel::InverseSquare,
        };
        WeightOptions { tail_model, ..WeightOptions::default() }
    }

    fn data(&self, rho_max: f64, step: f64) -> Result<ScatteringData, String> {
        let grid = RhoGrid::new(rho_max, step).map_err(|e| e.to_string())?;
        generate_data(&self.0, &grid).map_err(|e| e.to_string())
    }
}

/// Jost samples on the ρ-grid and the weight the inverse step integrates.
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct JostCurve {
    pub rho: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub modulus: Vec<f64>,
    /// `|F|⁻² − 1`.
    pub weight: Vec<f64>,
    pub f_tilde: f64,
    pub bound_states: usize,
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct Recovery {
    pub x: Vec<f64>,
    pub beta0: Vec<f64>,
    pub q_rec: Vec<f64>,
    pub q_true: Vec<f64>,
    pub abs_err: Vec<f64>,
    pub max_abs: f64,
    pub l2: f64,
    pub failed_nodes: usize,
    pub elapsed_ms: f64,
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct Sweep {
    pub m: Vec<f64>,
    pub cond: Vec<f64>,
    pub lambda_min: Vec<f64>,
    pub lambda_max: Vec<f64>,
}

/// Parameters of a recovery run, mirrored from the page controls.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct RecoveryParams {
    pub rho_max: f64,
    pub step: f64,
    pub x_start: f64,
    pub x_stop: f64,
    pub x_count: usize,
    pub max_index: usize,
    pub noise: f64,
    pub seed: u32,
    /// Spline breakpoint; NaN for none.
    pub breakpoint: f64,
    /// Differentiate `u_{ℓ,0}` instead of `β₀` right of the breakpoint.
    pub particular_outside: bool,
}

#[wasm_bindgen]
impl RecoveryParams {
    #[wasm_bindgen(constructor)]
    pub fn new() -> RecoveryParams {
        RecoveryParams {
            rho_max: 100.0,
            step: 0.1,
            x_start: std::f64::consts::PI / 60.0,
            x_stop: std::f64::consts::PI,
            x_count: 60,
            max_index: 9,
            noise: 0.0,
            seed: 7,
            breakpoint: f64::NAN,
            particular_outside: false,
        }
    }
}

impl Default for RecoveryParams {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen(js_name = jostCurve)]
pub fn jost_curve(model: &Model, rho_max: f64, step: f64) -> Result<JostCurve, JsError> {
    jost_curve_impl(model, rho_max, step).map_err(|e| JsError::new(&e))
}

pub fn jost_curve_impl(model: &Model, rho_max: f64, step: f64) -> Result<JostCurve, String> {
    let data = model.data(rho_max, step)?;
    let weight = build_gl_weight(&data, &model.options()).map_err(|e| e.to_string())?;
    Ok(JostCurve {
        rho: data.grid.nodes().collect(),
        re: data.jost.iter().map(|f| f.re).collect(),
        im: data.jost.iter().map(|f| f.im).collect(),
        modulus: data.moduli(),
        weight: weight.raw,
        f_tilde: weight.f_tilde,
        bound_states: data.bound_states.len(),
    })
}

#[wasm_bindgen(js_name = recoverPotential)]
pub fn recover_potential(model: &Model, params: &RecoveryParams) -> Result<Recovery, JsError> {
    recover_potential_impl(model, params).map_err(|e| JsError::new(&e))
}

pub fn recover_potential_impl(model: &Model, p: &RecoveryParams) -> Result<Recovery, String> {
    if !(p.x_start > 0.0) || !(p.x_stop > p.x_start) || p.x_count < 4 {
        return Err("need 0 < x start < x stop and at least 4 nodes".into());
    }
    if !(0.0..1.0).contains(&p.noise) {
        return Err("noise must satisfy 0 <= noise < 1".into());
    }
    let started = now_ms();
    let mut data = model.data(p.rho_max, p.step)?;
    if p.noise > 0.0 {
        data = add_noise(&data, p.noise, u64::from(p.seed)).map_err(|e| e.to_string())?;
    }
    let n = p.x_count;
    let xs: Vec<f64> = (0..n).map(|k| p.x_start + (p.x_stop - p.x_start) * k as f64 / (n - 1) as f64).collect();
    let profile = beta_profile(&data, &xs, p.max_index, &model.options()).map_err(|e| e.to_string())?;
    let (breakpoints, routes) = if p.breakpoint.is_finite() {
        let outer = if p.particular_outside { Route::ParticularSolution } else { Route::Beta };
        (vec![p.breakpoint], vec![Route::Beta, outer])
    } else {
        (Vec::new(), vec![Route::Beta])
    };
    let rec = recover_potential_with(&profile, model.ell(), &breakpoints, &routes).map_err(|e| e.to_string())?;
    let report = error_report(&rec, &model.0, &Exclusions::default());
    let beta0 = rec
        .x_nodes
        .iter()
        .map(|x| profile.x_nodes.iter().position(|v| v == x).map_or(f64::NAN, |k| profile.beta0[k]))
        .collect();
    Ok(Recovery {
        x: rec.x_nodes.clone(),
        beta0,
        q_rec: rec.q.clone(),
        q_true: report.nodes.iter().map(|e| e.q_true).collect(),
        abs_err: report.nodes.iter().map(|e| e.abs_error).collect(),
        max_abs: report.max_abs,
        l2: report.l2,
        failed_nodes: profile.failures.len(),
        elapsed_ms: now_ms() - started,
    })
}

/// Condition number and eigenvalue range of the scaled system at `x` for
/// every truncation `0..=max_index`.
#[wasm_bindgen(js_name = conditionSweep)]
pub fn condition_sweep(model: &Model, rho_max: f64, step: f64, x: f64, max_index: usize) -> Result<Sweep, JsError> {
    condition_sweep_impl(model, rho_max, step, x, max_index).map_err(|e| JsError::new(&e))
}

pub fn condition_sweep_impl(model: &Model, rho_max: f64, step: f64, x: f64, max_index: usize) -> Result<Sweep, String> {
    let data = model.data(rho_max, step)?;
    let solver = BetaSolver::new(&data, max_index, &model.options()).map_err(|e| e.to_string())?;
    let full = solver.system_at(x).map_err(|e| e.to_string())?;
    let mut out = Sweep { m: Vec::new(), cond: Vec::new(), lambda_min: Vec::new(), lambda_max: Vec::new() };
    for m in 0..=max_index {
        let sys = full.leading(m + 1).map_err(|e| e.to_string())?;
        let (lo, hi) = sys.eigen_extremes();
        out.m.push(m as f64);
        out.cond.push(sys.cond);
        out.lambda_min.push(lo);
        out.lambda_max.push(hi);
    }
    Ok(out)
}

#[cfg(target_arch = "wasm32")]
fn now_ms() -> f64 {
    js_sys_now()
}

#[cfg(target_arch = "wasm32")]
#[wasm_bindgen]
extern "C" {
    #[wasm_bindgen(js_namespace = Date, js_name = now)]
    fn js_sys_now() -> f64;
}

#[cfg(not(target_arch = "wasm32"))]
fn now_ms() -> f64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64() * 1e3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn well() -> Model {
        Model::checked(PotentialModel::SquareWell { q: 1.0, r: FRAC_PI_2, ell: 2 }).unwrap()
    }

    #[test]
    fn jost_curve_shapes() {
        let c = jost_curve_impl(&well(), 20.0, 0.1).unwrap();
        assert_eq!(c.rho.len(), 200);
        assert_eq!(c.re.len(), 200);
        for k in 0..200 {
            assert!((c.modulus[k] - c.re[k].hypot(c.im[k])).abs() < 1e-14);
            assert!((c.weight[k] - (c.modulus[k].powi(-2) - 1.0)).abs() < 1e-12);
        }
        assert_eq!(c.bound_states, 0);
    }

    #[test]
    fn recovery_of_square_well() {
        let p = RecoveryParams { breakpoint: FRAC_PI_2, particular_outside: true, ..RecoveryParams::new() };
        let r = recover_potential_impl(&well(), &p).unwrap();
        assert_eq!(r.x.len(), 60);
        assert_eq!(r.failed_nodes, 0);
        let inside = r.x.iter().position(|x| (*x - PI / 3.0).abs() < 1e-9).unwrap();
        assert!((r.q_rec[inside] + 1.0).abs() < 1e-3);
        assert!(r.beta0.iter().all(|b| b.is_finite()));
    }

    #[test]
    fn bad_parameters_are_reported() {
        assert!(Model::checked(PotentialModel::Hulthen { delta: 1.5, ell: 0.3 }).is_err());
        let p = RecoveryParams { x_count: 2, ..RecoveryParams::new() };
        assert!(recover_potential_impl(&well(), &p).is_err());
    }

    #[test]
    fn sweep_starts_at_one_by_one() {
        let h = Model::checked(PotentialModel::Hulthen { delta: 0.1, ell: 1.0 / 3.0 }).unwrap();
        let s = condition_sweep_impl(&h, 100.0, 0.1, 3.0, 12).unwrap();
        assert_eq!(s.cond.len(), 13);
        assert_eq!(s.cond[0], 1.0);
        assert!(s.cond.iter().all(|c| *c >= 1.0 && *c < 100.0));
        assert!(s.lambda_min.iter().zip(&s.lambda_max).all(|(a, b)| a <= b));
    }
}
