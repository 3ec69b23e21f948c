//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes plain numbers, runs one computation from
//! `stochairy` and returns a JSON string. The work itself lives in the
//! [`demo`] module so it can be tested natively.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_json<T: serde::Serialize>(r: stochairy::Result<T>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Prüfer phase `θ_λ(t)` for each λ in `lambdas`, one noise realization.
#[wasm_bindgen(js_name = phaseCurves)]
pub fn phase_curves(beta: f64, seed: u64, truncation: f64, step: f64, lambdas: Vec<f64>) -> Result<String, JsError> {
    to_json(demo::phase_curves(beta, seed, truncation, step, &lambdas))
}

/// Lowest `k` eigenvalues by shooting and by the discretized form.
#[wasm_bindgen(js_name = saoSpectrum)]
pub fn sao_spectrum(beta: f64, seed: u64, step: f64, k: usize) -> Result<String, JsError> {
    to_json(demo::sao_spectrum(beta, seed, step, k))
}

/// Histogram of the scaled top eigenvalue of the tridiagonal β-ensemble.
#[wasm_bindgen(js_name = edgeHistogram)]
pub fn edge_histogram(n: usize, beta: f64, samples: usize, seed_base: u64, bins: usize) -> Result<String, JsError> {
    to_json(demo::edge_histogram(n, beta, samples, seed_base, bins))
}
