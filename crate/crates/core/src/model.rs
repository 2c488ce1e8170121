//! Physical parameters and the closed-form solution of each Fock block.
//!
//! The Hamiltonian conserves the excitation structure, so the dynamics closes
//! on the three-dimensional blocks spanned by `|1,n1,n2>`, `|2,n1+1,n2>` and
//! `|3,n1,n2+1>`. Within a block the amplitudes are sums of three exponentials
//! whose frequencies are the real roots of a cubic.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::CoherentWeights;

/// Deformation function applied to a ladder operator, `a -> a f(n)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Nonlinearity {
    /// `f(n) = 1`.
    Unit,
    /// `f(n) = 1/sqrt(n)`.
    Harmonious,
    /// Tabulated `f(0), f(1), ...`; must reach index `n_max + 1`.
    Custom(Vec<f64>),
}

impl Nonlinearity {
    /// `sqrt(n) f(n)`, the matrix element of the deformed lowering operator.
    /// Zero at `n = 0` for every kind.
    pub fn ladder(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            Nonlinearity::Unit => (n as f64).sqrt(),
            Nonlinearity::Harmonious => 1.0,
            Nonlinearity::Custom(table) => (n as f64).sqrt() * table[n],
        }
    }

    /// `n f(n)^2`, the occupation factor entering the deformed Kerr term.
    /// Zero at `n = 0` for every kind.
    pub fn kerr_factor(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            Nonlinearity::Unit => n as f64,
            Nonlinearity::Harmonious => 1.0,
            Nonlinearity::Custom(table) => n as f64 * table[n] * table[n],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Nonlinearity::Unit => "unit",
            Nonlinearity::Harmonious => "harmonious",
            Nonlinearity::Custom(_) => "custom",
        }
    }

    fn check_table(&self, label: &str, n_max: usize) -> Result<()> {
        if let Nonlinearity::Custom(table) = self {
            if table.len() < n_max + 2 {
                return Err(Error::Config(format!(
                    "custom table for {label} has {} entries, needs {} (indices 0..=n_max+1)",
                    table.len(),
                    n_max + 2
                )));
            }
            if table.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!(
                    "custom table for {label} has non-finite entries"
                )));
            }
        }
        Ok(())
    }
}

/// Full parameter set of the atom-cavity model. All frequencies in rad/time.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Cross-Kerr susceptibility.
    pub chi: f64,
    /// Atomic level frequencies.
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    /// Cavity mode frequencies.
    pub mode_omega1: f64,
    pub mode_omega2: f64,
    /// Intensity-dependent coupling of each mode.
    pub f1: Nonlinearity,
    pub f2: Nonlinearity,
    /// Kerr deformation of each mode.
    pub g1: Nonlinearity,
    pub g2: Nonlinearity,
    /// Largest initial photon number kept per mode.
    pub n_max: usize,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    /// Overrides the coherent preparation when set.
    pub initial_weights: Option<CoherentWeights>,
    /// Largest tolerated coherent tail mass lost to truncation, per mode.
    pub truncation_tol: f64,
    /// Keep the `exp(-i gamma_k t)` free-evolution phases in the joint state.
    pub include_free_phases: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let alpha = Complex64::new(10f64.sqrt(), 0.0);
        Self {
            lambda1: 1.0,
            lambda2: 1.0,
            chi: 0.0,
            omega1: 0.0,
            omega2: 0.0,
            omega3: 0.0,
            mode_omega1: 0.0,
            mode_omega2: 0.0,
            f1: Nonlinearity::Unit,
            f2: Nonlinearity::Unit,
            g1: Nonlinearity::Unit,
            g2: Nonlinearity::Unit,
            n_max: 40,
            alpha1: alpha,
            alpha2: alpha,
            initial_weights: None,
            truncation_tol: 1e-10,
            include_free_phases: true,
        }
    }
}

impl ModelConfig {
    /// `Delta2 = omega2 - omega1 + Omega1`.
    pub fn delta2(&self) -> f64 {
        self.omega2 - self.omega1 + self.mode_omega1
    }

    /// `Delta3 = omega3 - omega1 + Omega2`.
    pub fn delta3(&self) -> f64 {
        self.omega3 - self.omega1 + self.mode_omega2
    }

    /// Moves the lower atomic levels so that the derived detunings take the
    /// requested values. Detunings are never stored on their own.
    pub fn set_detunings(&mut self, delta2: f64, delta3: f64) {
        self.omega2 = delta2 + self.omega1 - self.mode_omega1;
        self.omega3 = delta3 + self.omega1 - self.mode_omega2;
    }

    /// Side length of the field grids, `n_max + 2`: the lower-level branches
    /// carry one extra photon.
    pub fn grid_len(&self) -> usize {
        self.n_max + 2
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_inner(true)
    }

    /// Same checks, but zero couplings are allowed. The brute-force
    /// propagator has no use for the closed-form non-degeneracy condition.
    pub fn validate_decoupled_ok(&self) -> Result<()> {
        self.validate_inner(false)
    }

    fn validate_inner(&self, strict: bool) -> Result<()> {
        let ok = if strict {
            self.lambda1 > 0.0 && self.lambda2 > 0.0
        } else {
            self.lambda1 >= 0.0 && self.lambda2 >= 0.0
        };
        if !ok {
            return Err(Error::Config(format!(
                "couplings must be positive (lambda1 = {}, lambda2 = {})",
                self.lambda1, self.lambda2
            )));
        }
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        let scalars = [
            self.chi,
            self.omega1,
            self.omega2,
            self.omega3,
            self.mode_omega1,
            self.mode_omega2,
            self.alpha1.re,
            self.alpha1.im,
            self.alpha2.re,
            self.alpha2.im,
        ];
        if scalars.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite model parameter".into()));
        }
        if !(self.truncation_tol >= 0.0) {
            return Err(Error::Config(
                "truncation tolerance must be non-negative".into(),
            ));
        }
        self.f1.check_table("f1", self.n_max)?;
        self.f2.check_table("f2", self.n_max)?;
        self.g1.check_table("g1", self.n_max)?;
        self.g2.check_table("g2", self.n_max)?;
        if let Some(w) = &self.initial_weights {
            if w.q1.len() != self.n_max + 1 || w.q2.len() != self.n_max + 1 {
                return Err(Error::Config(format!(
                    "initial weights must have n_max + 1 = {} entries per mode",
                    self.n_max + 1
                )));
            }
        }
        Ok(())
    }
}

/// `V(n1, n2) = chi * [n1 g1^2(n1)] * [n2 g2^2(n2)]`.
pub fn kerr_shift(n1: usize, n2: usize, cfg: &ModelConfig) -> f64 {
    cfg.chi * cfg.g1.kerr_factor(n1) * cfg.g2.kerr_factor(n2)
}

/// Per-block constants of the reduced three-level problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockConstants {
    pub va: f64,
    pub vb: f64,
    pub vc: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl BlockConstants {
    /// Coefficients of `mu^3 + x1 mu^2 + x2 mu + x3`.
    pub fn cubic(&self) -> [f64; 3] {
        let BlockConstants {
            va,
            vb,
            vc,
            kappa1,
            kappa2,
            delta2,
            delta3,
        } = *self;
        let k1 = kappa1 * kappa1;
        let k2 = kappa2 * kappa2;
        let lower3 = vc + delta3 - delta2;
        let x1 = va + vb + vc + delta3 - 2.0 * delta2;
        let x2 = (va + vb - delta2) * lower3 + vb * (va - delta2) - k1 - k2;
        let x3 = vb * ((va - delta2) * lower3 - k2) - k1 * lower3;
        [x1, x2, x3]
    }
}

pub fn block_constants(n1: usize, n2: usize, cfg: &ModelConfig) -> BlockConstants {
    BlockConstants {
        va: kerr_shift(n1, n2, cfg),
        vb: kerr_shift(n1 + 1, n2, cfg),
        vc: kerr_shift(n1, n2 + 1, cfg),
        kappa1: cfg.lambda1 * cfg.f1.ladder(n1 + 1),
        kappa2: cfg.lambda2 * cfg.f2.ladder(n2 + 1),
        delta2: cfg.delta2(),
        delta3: cfg.delta3(),
    }
}

fn cubic_scale(x1: f64, x2: f64) -> f64 {
    1f64.max(x1 * x1).max(x2.abs())
}

/// Argument of `acos` in the trigonometric root formula, before clamping.
/// Returns `None` when `x1^2 - 3 x2` vanishes (triple root).
pub fn acos_argument(x1: f64, x2: f64, x3: f64) -> Option<f64> {
    let p = x1 * x1 - 3.0 * x2;
    if p <= 0.0 {
        return None;
    }
    Some((9.0 * x1 * x2 - 2.0 * x1 * x1 * x1 - 27.0 * x3) / (2.0 * p * p.sqrt()))
}

fn polish(mu: f64, x1: f64, x2: f64, x3: f64) -> f64 {
    let eval = |m: f64| ((m + x1) * m + x2) * m + x3;
    let mut best = mu;
    let mut residual = eval(mu).abs();
    for _ in 0..2 {
        let slope = (3.0 * best + 2.0 * x1) * best + x2;
        if slope == 0.0 || residual == 0.0 {
            break;
        }
        let next = best - eval(best) / slope;
        let r = eval(next).abs();
        if r < residual {
            best = next;
            residual = r;
        } else {
            break;
        }
    }
    best
}

/// Real roots of `mu^3 + x1 mu^2 + x2 mu + x3` by the trigonometric method,
/// in ascending order. Each root gets up to two guarded Newton steps.
pub fn cardano_roots(x1: f64, x2: f64, x3: f64) -> Result<[f64; 3]> {
    let p = x1 * x1 - 3.0 * x2;
    let scale = cubic_scale(x1, x2);
    if p < -1e-12 * scale {
        return Err(Error::DegenerateCubic { discriminant: p });
    }
    let shift = -x1 / 3.0;
    let mut mu = match acos_argument(x1, x2, x3) {
        None => [shift; 3],
        Some(arg) => {
            let theta = arg.clamp(-1.0, 1.0).acos() / 3.0;
            let amp = 2.0 / 3.0 * p.sqrt();
            let mut out = [0.0; 3];
            for (j, m) in out.iter_mut().enumerate() {
                *m = shift + amp * (theta + 2.0 * PI * j as f64 / 3.0).cos();
            }
            out
        }
    };
    for m in mu.iter_mut() {
        *m = polish(*m, x1, x2, x3);
    }
    mu.sort_by(|a, b| a.total_cmp(b));
    Ok(mu)
}

/// Closed-form solution of one Fock block, labelled by the photon numbers of
/// its upper-level state `|1,n1,n2>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSolution {
    pub n1: usize,
    pub n2: usize,
    /// Ascending roots of the block cubic.
    pub mu: [f64; 3],
    pub b: [f64; 3],
    pub va: f64,
    pub vb: f64,
    pub vc: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// Cubic coefficients `[x1, x2, x3]`.
    pub x: [f64; 3],
}

fn min_separation(mu: &[f64; 3]) -> f64 {
    (mu[1] - mu[0])
        .abs()
        .min((mu[2] - mu[1]).abs())
        .min((mu[2] - mu[0]).abs())
}

/// Weights fixed by the atom starting in `|1>`:
/// `b_j = (mu_k + mu_l + V_A + V_B - Delta2) / ((mu_j - mu_k)(mu_j - mu_l))`.
pub fn block_weights(sol: &BlockSolution) -> Result<[f64; 3]> {
    let mu = &sol.mu;
    let largest = mu.iter().fold(0f64, |m, v| m.max(v.abs()));
    let tol = (1e-8 * largest).max(1e-12);
    let separation = min_separation(mu);
    if separation < tol {
        return Err(Error::DegenerateRoots {
            n1: sol.n1,
            n2: sol.n2,
            separation,
        });
    }
    let offset = sol.va + sol.vb - sol.delta2;
    let mut b = [0.0; 3];
    for (j, bj) in b.iter_mut().enumerate() {
        let k = (j + 1) % 3;
        let l = (j + 2) % 3;
        *bj = (mu[k] + mu[l] + offset) / ((mu[j] - mu[k]) * (mu[j] - mu[l]));
    }
    Ok(b)
}

impl BlockSolution {
    pub fn solve(n1: usize, n2: usize, cfg: &ModelConfig) -> Result<Self> {
        let c = block_constants(n1, n2, cfg);
        if c.kappa2 == 0.0 {
            return Err(Error::Config(format!(
                "kappa2 vanishes in block ({n1}, {n2})"
            )));
        }
        let x = c.cubic();
        let mut sol = BlockSolution {
            n1,
            n2,
            mu: cardano_roots(x[0], x[1], x[2])?,
            b: [0.0; 3],
            va: c.va,
            vb: c.vb,
            vc: c.vc,
            kappa1: c.kappa1,
            kappa2: c.kappa2,
            delta2: c.delta2,
            delta3: c.delta3,
            x,
        };
        match block_weights(&sol) {
            Ok(b) => sol.b = b,
            Err(Error::DegenerateRoots { separation, .. }) => {
                let bump = 1e-10 * x[2].abs().max(1.0);
                warn!(
                    "block ({n1}, {n2}): roots {:?} coincide (separation {separation:e}); \
                     perturbing x3 by {bump:e}",
                    sol.mu
                );
                sol.mu = cardano_roots(x[0], x[1], x[2] + bump)?;
                sol.b = block_weights(&sol)?;
            }
            Err(e) => return Err(e),
        }
        Ok(sol)
    }

    pub fn constants(&self) -> BlockConstants {
        BlockConstants {
            va: self.va,
            vb: self.vb,
            vc: self.vc,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            delta2: self.delta2,
            delta3: self.delta3,
        }
    }

    /// Largest cubic residual over the three roots, relative to `max(1, |x3|)`.
    pub fn root_residual(&self) -> f64 {
        let [x1, x2, x3] = self.x;
        self.mu
            .iter()
            .map(|&m| (((m + x1) * m + x2) * m + x3).abs())
            .fold(0.0, f64::max)
            / x3.abs().max(1.0)
    }

    /// Amplitudes `(A, B, C)` of `|1,n1,n2>`, `|2,n1+1,n2>`, `|3,n1,n2+1>`
    /// at time `t`, without the free-evolution phases.
    pub fn amplitudes(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        let mut c = Complex64::new(0.0, 0.0);
        let k1sq = self.kappa1 * self.kappa1;
        for j in 0..3 {
            let mu = self.mu[j];
            let e = Complex64::from_polar(self.b[j], mu * t);
            a += e * (mu + self.vb);
            b += e;
            c += e * ((mu + self.vb) * (mu + self.va - self.delta2) - k1sq);
        }
        let a = -a * Complex64::from_polar(1.0, -self.delta2 * t);
        let b = b * self.kappa1;
        let c = c * Complex64::from_polar(1.0 / self.kappa2, (self.delta3 - self.delta2) * t);
        (a, b, c)
    }
}

/// `block_amplitudes` as a free function over a solved block.
pub fn block_amplitudes(sol: &BlockSolution, t: f64) -> (Complex64, Complex64, Complex64) {
    sol.amplitudes(t)
}

/// Solutions for every block `(n1, n2)` in `[0, n_max]^2`, row-major in `n1`.
#[derive(Clone, Debug)]
pub struct BlockTable {
    n_max: usize,
    blocks: Vec<BlockSolution>,
}

impl BlockTable {
    pub fn solve(cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let side = cfg.n_max + 1;
        let blocks = (0..side * side)
            .into_par_iter()
            .map(|idx| BlockSolution::solve(idx / side, idx % side, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_max: cfg.n_max,
            blocks,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n1: usize, n2: usize) -> &BlockSolution {
        &self.blocks[n1 * (self.n_max + 1) + n2]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BlockSolution> {
        self.blocks.iter()
    }
}
