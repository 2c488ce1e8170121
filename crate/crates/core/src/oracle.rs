//! Brute-force reference: the full Hamiltonian on the truncated
//! atom-field space, propagated with fixed-step RK4 in the lab picture.
//!
//! Only `ModelConfig` is shared with the closed-form path. Matrix elements are
//! built here from the operator definitions, not from the block constants.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CoherentWeights, JointState};
use crate::model::ModelConfig;

/// Hamiltonian on `3 (n_max + 2)^2` basis states `|k, m1, m2>`, stored as
/// `(row, col, value)` triplets.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    len: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHamiltonian {
    pub fn grid_len(&self) -> usize {
        self.len
    }

    pub fn dimension(&self) -> usize {
        3 * self.len * self.len
    }

    /// Flat index of `|level, m1, m2>`, with `level` in `0..3`.
    pub fn index(&self, level: usize, m1: usize, m2: usize) -> usize {
        (level * self.len + m1) * self.len + m2
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
    }

    /// Every entry has its conjugate transpose partner and diagonals are real.
    pub fn is_hermitian(&self) -> bool {
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|e| (e.0, e.1));
        let lookup = |r: usize, c: usize| {
            sorted
                .binary_search_by_key(&(r, c), |e| (e.0, e.1))
                .ok()
                .map(|i| sorted[i].2)
        };
        self.entries.iter().all(|&(r, c, v)| {
            if r == c {
                v.im == 0.0
            } else {
                lookup(c, r) == Some(v.conj())
            }
        })
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
    }

    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| (x[r].conj() * v * x[c]).re)
            .sum()
    }

    /// Reshapes a flat vector into the three-branch grid layout.
    pub fn to_joint_state(&self, x: &[Complex64], t: f64) -> Result<JointState> {
        if x.len() != self.dimension() {
            return Err(Error::Dimension {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        let mut state = JointState::zeros(self.len, t);
        for (level, psi) in state.branches_mut().into_iter().enumerate() {
            for ((m1, m2), v) in psi.indexed_iter_mut() {
                *v = x[(level * self.len + m1) * self.len + m2];
            }
        }
        Ok(state)
    }
}

/// `H = sum_j w_j s_jj + sum_j W_j n_j + chi R1^dag R1 R2^dag R2
///      + lambda1 (A1 s_12 + s_21 A1^dag) + lambda2 (A2 s_13 + s_31 A2^dag)`
/// with `R = a g(n)` and `A = a f(n)`.
pub fn build_hamiltonian(cfg: &ModelConfig) -> SparseHamiltonian {
    let len = cfg.grid_len();
    let mut h = SparseHamiltonian {
        len,
        entries: Vec::new(),
    };
    let atom = [cfg.omega1, cfg.omega2, cfg.omega3];
    for level in 0..3 {
        for m1 in 0..len {
            for m2 in 0..len {
                // <m|R^dag R|m> = |<m-1|R|m>|^2
                let r1 = cfg.g1.ladder(m1);
                let r2 = cfg.g2.ladder(m2);
                let e = atom[level]
                    + m1 as f64 * cfg.mode_omega1
                    + m2 as f64 * cfg.mode_omega2
                    + cfg.chi * r1 * r1 * r2 * r2;
                let i = h.index(level, m1, m2);
                h.entries.push((i, i, Complex64::new(e, 0.0)));
            }
        }
    }
    for m1 in 0..len {
        for m2 in 0..len {
            let upper = h.index(0, m1, m2);
            if m1 + 1 < len {
                let v = Complex64::new(cfg.lambda1 * cfg.f1.ladder(m1 + 1), 0.0);
                let lower = h.index(1, m1 + 1, m2);
                h.entries.push((upper, lower, v));
                h.entries.push((lower, upper, v.conj()));
            }
            if m2 + 1 < len {
                let v = Complex64::new(cfg.lambda2 * cfg.f2.ladder(m2 + 1), 0.0);
                let lower = h.index(2, m1, m2 + 1);
                h.entries.push((upper, lower, v));
                h.entries.push((lower, upper, v.conj()));
            }
        }
    }
    h
}

/// One recorded point of an oracle trajectory.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub state: JointState,
    pub energy: f64,
    pub norm: f64,
}

/// Fixed-step RK4 propagator for `i d|psi>/dt = H |psi>`.
#[derive(Clone, Debug)]
pub struct Oracle {
    cfg: ModelConfig,
    h: SparseHamiltonian,
    dt: f64,
}

/// Drift of the squared norm beyond which a run is rejected.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

impl Oracle {
    pub fn new(cfg: &ModelConfig, dt: f64) -> Result<Self> {
        Self::with_hamiltonian(cfg, build_hamiltonian(cfg), dt)
    }

    pub fn with_hamiltonian(cfg: &ModelConfig, h: SparseHamiltonian, dt: f64) -> Result<Self> {
        cfg.validate_decoupled_ok()?;
        if h.grid_len() != cfg.grid_len() {
            return Err(Error::Dimension {
                expected: cfg.grid_len(),
                found: h.grid_len(),
            });
        }
        let limit = 0.01 / h.max_entry().max(f64::MIN_POSITIVE);
        if !(dt > 0.0 && dt <= limit) {
            return Err(Error::StepSize(format!(
                "dt = {dt} outside (0, {limit:e}] for max |H| = {}",
                h.max_entry()
            )));
        }
        Ok(Self {
            cfg: cfg.clone(),
            h,
            dt,
        })
    }

    pub fn hamiltonian(&self) -> &SparseHamiltonian {
        &self.h
    }

    /// Atom in `|1>`, field in the configured product state.
    pub fn initial_vector(&self) -> Result<Vec<Complex64>> {
        let w = CoherentWeights::for_config(&self.cfg)?;
        let mut x = vec![Complex64::new(0.0, 0.0); self.h.dimension()];
        for (n1, q1) in w.q1.iter().enumerate() {
            for (n2, q2) in w.q2.iter().enumerate() {
                x[self.h.index(0, n1, n2)] = q1 * q2;
            }
        }
        Ok(x)
    }

    fn step(&self, x: &mut [Complex64], h: f64, work: &mut [Vec<Complex64>; 5]) {
        let minus_i = Complex64::new(0.0, -1.0);
        let [k1, k2, k3, k4, tmp] = work;
        self.h.apply(x, k1);
        k1.iter_mut().for_each(|v| *v *= minus_i);
        for i in 0..x.len() {
            tmp[i] = x[i] + k1[i] * (h / 2.0);
        }
        self.h.apply(tmp, k2);
        k2.iter_mut().for_each(|v| *v *= minus_i);
        for i in 0..x.len() {
            tmp[i] = x[i] + k2[i] * (h / 2.0);
        }
        self.h.apply(tmp, k3);
        k3.iter_mut().for_each(|v| *v *= minus_i);
        for i in 0..x.len() {
            tmp[i] = x[i] + k3[i] * h;
        }
        self.h.apply(tmp, k4);
        k4.iter_mut().for_each(|v| *v *= minus_i);
        for i in 0..x.len() {
            x[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }

    /// Propagates from `t = 0` and records the state at each requested time
    /// (ascending, non-negative). Each interval is split into equal steps no
    /// longer than `dt`.
    pub fn run(&self, times: &[f64]) -> Result<Vec<Snapshot>> {
        let mut x = self.initial_vector()?;
        let norm0: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let dim = x.len();
        let mut work: [Vec<Complex64>; 5] =
            std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); dim]);
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if !(t >= now) {
                return Err(Error::StepSize(format!("checkpoint {t} precedes {now}")));
            }
            let span = t - now;
            let steps = (span / self.dt).ceil() as usize;
            if steps > 0 {
                let h = span / steps as f64;
                for _ in 0..steps {
                    self.step(&mut x, h, &mut work);
                }
            }
            now = t;
            let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            if (norm - norm0).abs() > NORM_DRIFT_TOL {
                return Err(Error::StepSize(format!(
                    "norm drifted by {:e} at t = {t}",
                    norm - norm0
                )));
            }
            let mut state = self.h.to_joint_state(&x, t)?;
            if !self.cfg.include_free_phases {
                strip_free_phases(&mut state, &self.cfg);
            }
            out.push(Snapshot {
                state,
                energy: self.h.expectation(&x),
                norm,
            });
        }
        Ok(out)
    }
}

fn strip_free_phases(state: &mut JointState, cfg: &ModelConfig) {
    let t = state.t;
    let levels = [cfg.omega1, cfg.omega2, cfg.omega3];
    for (psi, omega) in state.branches_mut().into_iter().zip(levels) {
        for ((m1, m2), v) in psi.indexed_iter_mut() {
            let gamma = omega + m1 as f64 * cfg.mode_omega1 + m2 as f64 * cfg.mode_omega2;
            *v *= Complex64::from_polar(1.0, gamma * t);
        }
    }
}

/// Oracle state at `t_end`.
pub fn integrate(cfg: &ModelConfig, t_end: f64, dt: f64) -> Result<JointState> {
    let mut snaps = Oracle::new(cfg, dt)?.run(&[t_end])?;
    Ok(snaps.pop().expect("one checkpoint requested").state)
}
