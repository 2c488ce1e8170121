//! Initial field amplitudes and the joint atom-field state on the truncated
//! two-mode Fock lattice.

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BlockTable, ModelConfig};

/// Fock amplitudes `q_0..q_{n_max}` of the initial state of each mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentWeights {
    pub q1: Vec<Complex64>,
    pub q2: Vec<Complex64>,
}

impl CoherentWeights {
    /// Glauber coherent amplitudes for both modes.
    pub fn coherent(alpha1: Complex64, alpha2: Complex64, n_max: usize, tol: f64) -> Result<Self> {
        Ok(Self {
            q1: coherent_weights_with_tol(alpha1, n_max, tol)?,
            q2: coherent_weights_with_tol(alpha2, n_max, tol)?,
        })
    }

    /// Arbitrary product preparation; each vector holds `q_0..q_{n_max}`.
    pub fn custom(q1: Vec<Complex64>, q2: Vec<Complex64>) -> Self {
        Self { q1, q2 }
    }

    pub fn for_config(cfg: &ModelConfig) -> Result<Self> {
        match &cfg.initial_weights {
            Some(w) => Ok(w.clone()),
            None => Self::coherent(cfg.alpha1, cfg.alpha2, cfg.n_max, cfg.truncation_tol),
        }
    }

    pub fn norm(&self) -> f64 {
        let n1: f64 = self.q1.iter().map(|q| q.norm_sqr()).sum();
        let n2: f64 = self.q2.iter().map(|q| q.norm_sqr()).sum();
        n1 * n2
    }
}

/// `q_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)` for `n = 0..=n_max`, with the
/// default tail tolerance of `1e-10`.
pub fn coherent_weights(alpha: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    coherent_weights_with_tol(alpha, n_max, 1e-10)
}

pub fn coherent_weights_with_tol(
    alpha: Complex64,
    n_max: usize,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let mut q = Vec::with_capacity(n_max + 1);
    let mut cur = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    q.push(cur);
    for n in 0..n_max {
        cur = cur * alpha / ((n + 1) as f64).sqrt();
        q.push(cur);
    }
    let mass: f64 = q.iter().map(|v| v.norm_sqr()).sum();
    let deficit = 1.0 - mass;
    if deficit > tol {
        return Err(Error::Truncation {
            n_max,
            deficit,
            tol,
        });
    }
    Ok(q)
}

/// Field amplitudes correlated with each atomic level at time `t`.
///
/// Each grid is indexed by photon numbers `(m1, m2)` in `[0, n_max + 1]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub t: f64,
    pub psi1: Array2<Complex64>,
    pub psi2: Array2<Complex64>,
    pub psi3: Array2<Complex64>,
}

impl JointState {
    pub fn zeros(len: usize, t: f64) -> Self {
        let z = Array2::zeros((len, len));
        Self {
            t,
            psi1: z.clone(),
            psi2: z.clone(),
            psi3: z,
        }
    }

    pub fn grid_len(&self) -> usize {
        self.psi1.nrows()
    }

    pub fn branches(&self) -> [&Array2<Complex64>; 3] {
        [&self.psi1, &self.psi2, &self.psi3]
    }

    pub fn branches_mut(&mut self) -> [&mut Array2<Complex64>; 3] {
        [&mut self.psi1, &mut self.psi2, &mut self.psi3]
    }

    /// Reduced populations of the atomic levels `|1>, |2>, |3>`.
    pub fn level_populations(&self) -> [f64; 3] {
        self.branches()
            .map(|p| p.iter().map(|v| v.norm_sqr()).sum())
    }

    pub fn norm(&self) -> f64 {
        self.level_populations().iter().sum()
    }

    /// Largest pointwise amplitude difference over the three grids.
    pub fn max_abs_diff(&self, other: &JointState) -> f64 {
        self.branches()
            .iter()
            .zip(other.branches())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Multiplies every amplitude by `exp(i phase)`.
    pub fn with_global_phase(mut self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        for p in self.branches_mut() {
            p.mapv_inplace(|v| v * w);
        }
        self
    }
}

/// Precomputed closed-form evolution: block table plus initial weights.
#[derive(Clone, Debug)]
pub struct Evolution {
    cfg: ModelConfig,
    table: BlockTable,
    weights: CoherentWeights,
}

impl Evolution {
    pub fn new(cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let weights = CoherentWeights::for_config(cfg)?;
        let table = BlockTable::solve(cfg)?;
        Ok(Self {
            cfg: cfg.clone(),
            table,
            weights,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn table(&self) -> &BlockTable {
        &self.table
    }

    pub fn weights(&self) -> &CoherentWeights {
        &self.weights
    }

    pub fn state_at(&self, t: f64) -> JointState {
        let cfg = &self.cfg;
        let n_max = cfg.n_max;
        let mut state = JointState::zeros(cfg.grid_len(), t);
        let (q1, q2) = (&self.weights.q1, &self.weights.q2);
        for n1 in 0..=n_max {
            for n2 in 0..=n_max {
                let w = q1[n1] * q2[n2];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (a, b, c) = self.table.get(n1, n2).amplitudes(t);
                state.psi1[(n1, n2)] = w * a;
                state.psi2[(n1 + 1, n2)] = w * b;
                state.psi3[(n1, n2 + 1)] = w * c;
            }
        }
        if cfg.include_free_phases {
            let levels = [cfg.omega1, cfg.omega2, cfg.omega3];
            for (psi, omega) in state.branches_mut().into_iter().zip(levels) {
                for ((m1, m2), v) in psi.indexed_iter_mut() {
                    let gamma = omega + m1 as f64 * cfg.mode_omega1 + m2 as f64 * cfg.mode_omega2;
                    *v *= Complex64::from_polar(1.0, -gamma * t);
                }
            }
        }
        state
    }
}

/// Closed-form joint state at time `t`.
pub fn assemble_state(cfg: &ModelConfig, t: f64) -> Result<JointState> {
    Ok(Evolution::new(cfg)?.state_at(t))
}

/// Joint photon-number distribution `P(m1, m2)` of the field.
pub fn number_distribution(state: &JointState) -> Array2<f64> {
    let mut p = Array2::zeros(state.psi1.raw_dim());
    Zip::from(&mut p)
        .and(&state.psi1)
        .and(&state.psi2)
        .and(&state.psi3)
        .for_each(|p, a, b, c| *p = a.norm_sqr() + b.norm_sqr() + c.norm_sqr());
    p
}
