//! Reduced-scale cross-check of the closed form against the RK4 oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Evolution;
use crate::model::ModelConfig;
use crate::oracle::{build_hamiltonian, Oracle};

/// Truncation used by the reduced check.
pub const REDUCED_N_MAX: usize = 15;
/// Mean photon number per mode used by the reduced check.
pub const REDUCED_MEAN_PHOTONS: f64 = 4.0;
/// Max-norm bound between closed-form and oracle amplitudes.
pub const VERIFY_TOL: f64 = 1e-6;

/// Same physics at `n_max = 15` and `|alpha|^2 = 4`, keeping the phase of
/// each coherent amplitude. The tail of a `|alpha|^2 = 4` Poisson beyond
/// 15 photons is ~4e-6, so the truncation tolerance is relaxed to match;
/// both sides of the comparison share the same truncated weights.
pub fn reduced_config(cfg: &ModelConfig) -> ModelConfig {
    let rescale = |a: Complex64| {
        if a.norm() == 0.0 {
            a
        } else {
            a / a.norm() * REDUCED_MEAN_PHOTONS.sqrt()
        }
    };
    let mut out = cfg.clone();
    if cfg.initial_weights.is_none() {
        out.n_max = REDUCED_N_MAX;
        out.alpha1 = rescale(cfg.alpha1);
        out.alpha2 = rescale(cfg.alpha2);
        out.truncation_tol = cfg.truncation_tol.max(1e-5);
    }
    out
}

/// Result of one closed-form versus oracle comparison.
#[derive(Clone, Debug)]
pub struct Verification {
    /// `(tau, max |psi_closed - psi_oracle|)` per checkpoint.
    pub deviations: Vec<(f64, f64)>,
    /// Largest relative drift of `<H>` over the checkpoints.
    pub energy_drift: f64,
}

impl Verification {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().map(|d| d.1).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation() < tol
    }
}

/// Step in `t` for the oracle: `1e-3 / lambda1`, tightened if the
/// Hamiltonian demands it.
pub fn oracle_step(cfg: &ModelConfig) -> f64 {
    let h = build_hamiltonian(cfg);
    let limit = 0.01 / h.max_entry().max(f64::MIN_POSITIVE);
    (1e-3 / cfg.lambda1).min(limit)
}

/// Compares closed-form and oracle states at each scaled time in `taus`.
pub fn compare_with_oracle(cfg: &ModelConfig, taus: &[f64], dt: f64) -> Result<Verification> {
    let evo = Evolution::new(cfg)?;
    let oracle = Oracle::new(cfg, dt)?;
    let times: Vec<f64> = taus.iter().map(|tau| tau / cfg.lambda1).collect();
    let snaps = oracle.run(&times)?;
    let e0 = oracle.hamiltonian().expectation(&oracle.initial_vector()?);
    let scale = e0.abs().max(1.0);
    let mut deviations = Vec::with_capacity(taus.len());
    let mut energy_drift: f64 = 0.0;
    for (tau, snap) in taus.iter().zip(&snaps) {
        let closed = evo.state_at(snap.state.t);
        deviations.push((*tau, closed.max_abs_diff(&snap.state)));
        energy_drift = energy_drift.max((snap.energy - e0).abs() / scale);
    }
    Ok(Verification {
        deviations,
        energy_drift,
    })
}

/// The check run by `--verify`: reduced scale, `tau = 1, 2, ..., 10`.
pub fn verify_reduced(cfg: &ModelConfig) -> Result<Verification> {
    let reduced = reduced_config(cfg);
    let taus: Vec<f64> = (1..=10).map(f64::from).collect();
    let report = compare_with_oracle(&reduced, &taus, oracle_step(&reduced))?;
    if !report.passed(VERIFY_TOL) {
        return Err(Error::Verification(format!(
            "max deviation {:e} exceeds {VERIFY_TOL:e}",
            report.max_deviation()
        )));
    }
    Ok(report)
}
