//! Built-in parameter sets for the five measured working points (three
//! circuits at five flux biases), plus an optional JSON override file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rabi::RabiParams;

/// One tabulated working point.
#[derive(Debug, Clone)]
pub struct CircuitPreset {
    /// Stable identifier, e.g. `II_m0p5` for circuit II at n_phi_q = -0.5.
    pub id: &'static str,
    pub circuit: &'static str,
    pub n_phi_q: f64,
    pub params: RabiParams,
}

fn preset(id: &'static str, circuit: &'static str, n_phi_q: f64, d: f64, w: f64, g: f64) -> CircuitPreset {
    CircuitPreset {
        id,
        circuit,
        n_phi_q,
        params: RabiParams {
            delta: d,
            omega_o: w,
            g,
            epsilon: 0.0,
        },
    }
}

/// The five working points, in table order.
pub fn all() -> Vec<CircuitPreset> {
    vec![
        preset("I_m0p5", "I", -0.5, 0.505, 6.336, 4.57),
        preset("I_m1p5", "I", -1.5, 0.430, 6.306, 4.92),
        preset("I_2p5", "I", 2.5, 0.299, 6.233, 5.79),
        preset("II_m0p5", "II", -0.5, 0.441, 5.711, 7.63),
        preset("III_0p5", "III", 0.5, 3.84, 5.588, 5.63),
    ]
}

pub fn by_id(id: &str) -> Result<CircuitPreset> {
    all()
        .into_iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::InvalidParams(format!("unknown preset {id:?}")))
}

/// Superradiance criterion ratios 2g/sqrt(omega_o delta) for the five
/// presets, in table order.
pub fn tabulated_ratios() -> [f64; 5] {
    [5.1, 6.0, 8.5, 9.6, 2.4]
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamsEntry {
    delta_ghz: f64,
    omega_o_ghz: f64,
    g_ghz: f64,
}

/// Reads a preset override file: a JSON object keyed by preset id, each
/// entry holding `delta_ghz`, `omega_o_ghz`, `g_ghz`.
pub fn load_params_file<P: AsRef<Path>>(path: P) -> Result<BTreeMap<String, RabiParams>> {
    let text = std::fs::read_to_string(path)?;
    let raw: BTreeMap<String, ParamsEntry> = serde_json::from_str(&text)?;
    raw.into_iter()
        .map(|(k, v)| Ok((k, RabiParams::new(v.delta_ghz, v.omega_o_ghz, v.g_ghz)?)))
        .collect()
}
