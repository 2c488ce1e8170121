//! Named parameter sets shared by every indicator figure.
//!
//! `a`: no Kerr medium, resonant. `b`: deformed Kerr medium (`chi = 0.4`,
//! harmonious `g`), resonant. `c`: as `b` plus equal detunings on both
//! transitions. `up` keeps constant coupling, `down` switches on the
//! harmonious intensity-dependent coupling. Every preset uses
//! `lambda1 = lambda2 = 1`, `|alpha1|^2 = |alpha2|^2 = 10` and `n_max = 40`.
//!
//! Mode frequencies are zero and `omega1 = 0`, so the remaining level
//! frequencies equal the detunings.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModelConfig, Nonlinearity};

/// Detuning applied to the `c` presets unless overridden.
pub const DEFAULT_DETUNING: f64 = 5.0;

pub const PRESET_NAMES: [&str; 6] = ["a-up", "a-down", "b-up", "b-down", "c-up", "c-down"];

/// Accepts `a-down` as well as figure-qualified forms such as `fig1a-down`.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    let lower = name.trim().to_ascii_lowercase();
    let bare = match lower.strip_prefix("fig") {
        Some(rest) => rest.trim_start_matches(|c: char| c.is_ascii_digit()),
        None => lower.as_str(),
    };
    PRESET_NAMES.iter().copied().find(|p| *p == bare)
}

pub fn preset(name: &str) -> Result<ModelConfig> {
    preset_with_detuning(name, DEFAULT_DETUNING)
}

/// Builds a preset; `detuning` only affects the `c` family.
pub fn preset_with_detuning(name: &str, detuning: f64) -> Result<ModelConfig> {
    let canonical = canonical_name(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset {name:?}; expected one of {}",
            PRESET_NAMES.join(", ")
        ))
    })?;
    let (family, coupling) = canonical
        .split_once('-')
        .expect("preset names contain a dash");
    let f = match coupling {
        "up" => Nonlinearity::Unit,
        _ => Nonlinearity::Harmonious,
    };
    let alpha = Complex64::new(10f64.sqrt(), 0.0);
    let mut cfg = ModelConfig {
        lambda1: 1.0,
        lambda2: 1.0,
        f1: f.clone(),
        f2: f,
        n_max: 40,
        alpha1: alpha,
        alpha2: alpha,
        ..ModelConfig::default()
    };
    if family != "a" {
        cfg.chi = 0.4;
        cfg.g1 = Nonlinearity::Harmonious;
        cfg.g2 = Nonlinearity::Harmonious;
    }
    if family == "c" {
        cfg.set_detunings(detuning, detuning);
    }
    Ok(cfg)
}

pub fn presets() -> Vec<(&'static str, ModelConfig)> {
    PRESET_NAMES
        .iter()
        .map(|&n| (n, preset(n).expect("built-in preset")))
        .collect()
}
