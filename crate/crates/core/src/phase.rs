//! Two-mode Pegg-Barnett phase distribution and number/phase Shannon
//! entropies.
//!
//! In the limit of an infinite phase-state basis the distribution becomes the
//! continuous density
//!
//! ```text
//! P(t1, t2) = 1/(4 pi^2) sum_k | sum_{m1,m2} psi_k(m1,m2) e^{-i m1 t1} e^{-i m2 t2} |^2
//! ```
//!
//! which is a trigonometric polynomial of degree `n_max + 1` per angle, so a
//! uniform mesh of at least `2 (n_max + 1)` points integrates it exactly.
//! Each branch sum is a zero-padded 2-D DFT.

use std::f64::consts::PI;

use log::debug;
use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{number_distribution, JointState};

/// Phase density sampled on `theta_i = theta0 + 2 pi i / m_pts` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    pub theta0: f64,
    pub m_pts: usize,
    /// `values[(i, j)] = P(theta_i, theta_j)`.
    pub values: Array2<f64>,
}

impl PhaseGrid {
    pub fn theta(&self, i: usize) -> f64 {
        self.theta0 + 2.0 * PI * i as f64 / self.m_pts as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = 2.0 * PI / self.m_pts as f64;
        h * h
    }

    /// Periodic rectangle-rule integral over the full square.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }
}

/// Smallest mesh accepted for a state whose grids have side `len`.
pub fn min_mesh(len: usize) -> usize {
    2 * (len - 1)
}

pub fn phase_distribution(state: &JointState, theta0: f64, m_pts: usize) -> Result<PhaseGrid> {
    let len = state.grid_len();
    let min = min_mesh(len);
    if m_pts < min {
        return Err(Error::Resolution { m_pts, min });
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m_pts);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut values = Array2::<f64>::zeros((m_pts, m_pts));
    let mut rows = vec![Complex64::new(0.0, 0.0); len * m_pts];
    let mut column = vec![Complex64::new(0.0, 0.0); m_pts];

    for psi in state.branches() {
        if psi.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        // Transform along m2 for each occupied m1, folding in the theta0 offset.
        rows.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for m1 in 0..len {
            let row = &mut rows[m1 * m_pts..(m1 + 1) * m_pts];
            for m2 in 0..len {
                row[m2] = psi[(m1, m2)] * Complex64::from_polar(1.0, -((m1 + m2) as f64) * theta0);
            }
            fft.process_with_scratch(row, &mut scratch);
        }
        // Then along m1 for every output column.
        for j2 in 0..m_pts {
            column
                .iter_mut()
                .for_each(|v| *v = Complex64::new(0.0, 0.0));
            for m1 in 0..len {
                column[m1] = rows[m1 * m_pts + j2];
            }
            fft.process_with_scratch(&mut column, &mut scratch);
            for (j1, v) in column.iter().enumerate() {
                values[(j1, j2)] += v.norm_sqr();
            }
        }
    }
    values.mapv_inplace(|v| v / (4.0 * PI * PI));
    Ok(PhaseGrid {
        theta0,
        m_pts,
        values,
    })
}

/// Number and phase entropies (nats) and their squeezing indicators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyRecord {
    pub r_n: f64,
    pub r_theta: f64,
    pub s_n: f64,
    pub s_theta: f64,
}

impl EntropyRecord {
    pub fn number_squeezed(&self) -> bool {
        self.s_n > -1.0 && self.s_n < 0.0
    }

    pub fn phase_squeezed(&self) -> bool {
        self.s_theta > -1.0 && self.s_theta < 0.0
    }
}

fn neg_plogp(p: f64) -> f64 {
    if p < 1e-300 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// `S = exp(R) / sqrt(2 pi) - 1`.
pub fn entropy_squeezing(r: f64) -> f64 {
    r.exp() / (2.0 * PI).sqrt() - 1.0
}

/// Shannon entropy of the joint photon-number distribution.
pub fn number_entropy(state: &JointState) -> f64 {
    number_distribution(state)
        .iter()
        .map(|&p| neg_plogp(p))
        .sum()
}

/// Differential entropy of the phase density, rectangle rule on the grid.
pub fn phase_entropy(grid: &PhaseGrid) -> f64 {
    grid.values.iter().map(|&p| neg_plogp(p)).sum::<f64>() * grid.cell_area()
}

pub fn entropies(state: &JointState, grid: &PhaseGrid) -> EntropyRecord {
    let r_n = number_entropy(state);
    let r_theta = phase_entropy(grid);
    if r_n + r_theta < 2.0 * (2.0 * PI).ln() {
        debug!(
            "t = {}: R_n + R_theta = {} is below 2 ln(2 pi)",
            state.t,
            r_n + r_theta
        );
    }
    EntropyRecord {
        r_n,
        r_theta,
        s_n: entropy_squeezing(r_n),
        s_theta: entropy_squeezing(r_theta),
    }
}
