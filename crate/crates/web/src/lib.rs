//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export has a plain Rust counterpart returning
//! [`hidden_corr::Result`] so it can be tested natively.

use hidden_corr::correlations::CorrelationReport;
use hidden_corr::experiment::{run_trajectory_scan, Mode, ScanConfig, SummaryRow};
use hidden_corr::filtering::hidden_measures;
use hidden_corr::io::{fmt_f64, write_key_value};
use hidden_corr::qstate::{make_x_state, XParams};
use hidden_corr::C64;
use wasm_bindgen::prelude::*;

/// Columns of [`family_curves`], row-major.
pub const CURVE_COLUMNS: [&str; 8] = ["tau", "C", "B", "BF3", "D", "HB", "HBF3", "HD"];

fn family(
    p: f64,
    k: f64,
    tau_max: f64,
    samples: usize,
) -> hidden_corr::Result<Vec<hidden_corr::experiment::TrajectoryRecord>> {
    let cfg = ScanConfig {
        p_values: vec![p],
        k,
        tau_max,
        samples,
        mode: Mode::AnalyticFamily,
        output_path: None,
        seed: 0,
    };
    run_trajectory_scan(&cfg)
}

pub fn family_curves_native(
    p: f64,
    k: f64,
    tau_max: f64,
    samples: usize,
) -> hidden_corr::Result<Vec<f64>> {
    let recs = family(p, k, tau_max, samples)?;
    Ok(recs
        .iter()
        .flat_map(|r| CURVE_COLUMNS.map(|c| r.get(c).expect("known column")))
        .collect())
}

/// `[C_max, τ at C_max, birth C, birth HD, birth HBF3, birth HB,
/// 0.99 HD, 0.99 HBF3, 0.99 HB]`, NaN where a crossing does not occur
/// before `tau_max`.
pub fn birth_times_native(
    p: f64,
    k: f64,
    tau_max: f64,
    samples: usize,
) -> hidden_corr::Result<Vec<f64>> {
    let recs = family(p, k, tau_max, samples)?;
    let row = SummaryRow::from_family(p, k, &recs);
    let mut out = vec![row.c_max, row.tau_c_max];
    out.extend(
        row.birth
            .iter()
            .chain(&row.saturation)
            .map(|t| t.unwrap_or(f64::NAN)),
    );
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn x_state_report_native(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
) -> hidden_corr::Result<String> {
    let x = XParams {
        a,
        b,
        c,
        d,
        z: C64::new(z_re, z_im),
        w: C64::new(w_re, w_im),
    };
    let rho = make_x_state(&x)?;
    let mut out = CorrelationReport::of(&rho).to_key_value();
    let hid = hidden_measures(&rho)?;
    out.push_str(&write_key_value(
        hid.fields().into_iter().map(|(k, v)| (k, fmt_f64(v))),
    ));
    Ok(out)
}

fn js(e: hidden_corr::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = curveColumns)]
pub fn curve_columns() -> Vec<String> {
    CURVE_COLUMNS.iter().map(|s| s.to_string()).collect()
}

/// Measures along the trajectory from the Werner state with mixing `p`,
/// flattened row by row in [`CURVE_COLUMNS`] order.
#[wasm_bindgen(js_name = familyCurves)]
pub fn family_curves(p: f64, k: f64, tau_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    family_curves_native(p, k, tau_max, samples).map_err(js)
}

#[wasm_bindgen(js_name = birthTimes)]
pub fn birth_times(p: f64, k: f64, tau_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    birth_times_native(p, k, tau_max, samples).map_err(js)
}

/// `name=value` report of standard and hidden measures for an X state.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = xStateReport)]
pub fn x_state_report(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
) -> Result<String, JsError> {
    x_state_report_native(a, b, c, d, z_re, z_im, w_re, w_im).map_err(js)
}
