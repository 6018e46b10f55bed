//! WebAssembly entry points for the demo page in `www/`.
//!
//! Each export returns a JSON string; errors surface as JavaScript exceptions.

use rpm_core::hankel::{det_symbolic, HankelSpec, DEFAULT_TERM_LIMIT};
use rpm_core::oracle::{oracle_state, OracleOptions};
use rpm_core::potential::{parse_potential, symbolic_display_name};
use rpm_core::solver::{ensure_order, track_from_first, RootSequence, SolveOptions};
use rpm_core::wavefunction::{eigenfunction_profile, pade_for, residual_profile};
use rpm_core::{BigReal, Parity, PotentialSpec, Precision, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn to_js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

fn tracked(v: &PotentialSpec, parity: Parity, shift: usize, dmax: usize, seed: f64) -> Result<RootSequence> {
    let opts = SolveOptions {
        target_digits: 16,
        ..SolveOptions::default()
    };
    let seed = BigReal::from_f64(seed, Precision::new(40)?);
    track_from_first(v, parity, shift, 2..=dmax.max(2), &seed, &opts)
}

fn reference(v: &PotentialSpec, parity: Parity, state: usize) -> Result<f64> {
    oracle_state(v, 2 * state + parity.index() as usize, &OracleOptions::default())
}

pub fn bound_curves_value(potential: &str, parity: u8, state: usize, dmax: usize) -> Result<Value> {
    let v = parse_potential(potential, 2)?;
    let parity = Parity::from_index(parity)?;
    let exact = reference(&v, parity, state)?;
    let lower = tracked(&v, parity, 0, dmax, exact)?;
    let upper = tracked(&v, parity, 1, dmax, exact)?;
    let rows: Vec<Value> = lower
        .entries
        .iter()
        .filter_map(|lo| {
            let up = upper.entries.iter().find(|u| u.dim == lo.dim)?;
            let gap = &up.energy - &lo.energy;
            Some(json!({
                "D": lo.dim,
                "lower": lo.energy.to_sig_string(16),
                "upper": up.energy.to_sig_string(16),
                "log10_gap": gap.abs().log10_abs(),
            }))
        })
        .collect();
    Ok(json!({ "reference": exact, "rows": rows }))
}

pub fn wavefunction_value(potential: &str, parity: u8, state: usize, dim: usize, points: usize) -> Result<Value> {
    let v = parse_potential(potential, 2)?;
    let parity = Parity::from_index(parity)?;
    let exact = reference(&v, parity, state)?;
    let seq = tracked(&v, parity, 0, dim, exact)?;
    let root = seq.last().expect("nonempty sequence");
    let (m, n) = HankelSpec::new(root.dim, 0, parity)?.pade_orders();
    let p = pade_for(&v, parity, &root.energy, m, n, root.precision)?;
    let xmax = p.poles.first().map_or(4.0, |pole| (0.9 * pole).min(4.0));
    let points = points.max(2);
    let grid: Vec<f64> = (0..points).map(|i| xmax * i as f64 / (points - 1) as f64).collect();
    let xs: Vec<BigReal> = grid.iter().map(|x| BigReal::from_f64(*x, root.precision)).collect();
    let psi = eigenfunction_profile(&p, parity, &xs, 16)?;
    let residual = residual_profile(&p, parity, &root.energy, &v, &xs, 16)?;
    Ok(json!({
        "D": root.dim,
        "energy": root.energy.to_sig_string(16),
        "poles": p.poles,
        "x": grid,
        "psi": psi.iter().map(BigReal::to_f64).collect::<Vec<_>>(),
        "log10_residual": residual.iter().map(|(_, r)| r.log10_abs()).collect::<Vec<_>>(),
    }))
}

pub fn hankel_polynomial_value(potential: &str, dim: usize, shift: usize, parity: u8, monic: bool) -> Result<Value> {
    let v = parse_potential(potential, 2)?;
    let spec = HankelSpec::new(dim, shift, Parity::from_index(parity)?)?;
    let v = ensure_order(&v, spec.max_index())?;
    let mut det = det_symbolic(&v, &spec, None, DEFAULT_TERM_LIMIT)?;
    if monic {
        det = det.monic();
    }
    let name = symbolic_display_name(potential).unwrap_or_else(|| "p".to_string());
    Ok(json!({ "degree": det.degree(), "polynomial": det.render("E", &name) }))
}

/// Lower and upper bounds of one state for `D = 2..=dmax`.
#[wasm_bindgen]
pub fn bound_curves(potential: &str, parity: u8, state: usize, dmax: usize) -> std::result::Result<String, JsError> {
    to_js(bound_curves_value(potential, parity, state, dmax))
}

/// Approximate eigenfunction from the `[M/N]` Padé approximant at `H_D^0`.
#[wasm_bindgen]
pub fn wavefunction(potential: &str, parity: u8, state: usize, dim: usize, points: usize) -> std::result::Result<String, JsError> {
    to_js(wavefunction_value(potential, parity, state, dim, points))
}

#[wasm_bindgen]
pub fn hankel_polynomial(potential: &str, dim: usize, shift: usize, parity: u8, monic: bool) -> std::result::Result<String, JsError> {
    to_js(hankel_polynomial_value(potential, dim, shift, parity, monic))
}
