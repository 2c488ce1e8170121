//! Field moments and the photon-statistics and squeezing indicators built
//! from them.
//!
//! The reduced field state is the atom trace of a pure state with three
//! branches, so every expectation value is the sum of three branch
//! expectations. Ladder operators act by shifting grid indices; amplitudes
//! pushed past the grid edge are dropped.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::JointState;

/// Mean photon numbers below this floor make Mandel Q undefined.
pub const Q_FLOOR: f64 = 1e-12;
/// `|<n1 n2>|` below this floor makes the CSI parameter undefined.
pub const CSI_FLOOR: f64 = 1e-12;

/// Expectation values of the field operators needed by the indicators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    /// `<a1>`
    pub m10: Complex64,
    /// `<a2>`
    pub m01: Complex64,
    /// `<a1^2>`
    pub m20: Complex64,
    /// `<a2^2>`
    pub m02: Complex64,
    /// `<a1 a2>`
    pub m11: Complex64,
    /// `<a1^dag a2>`
    pub c11: Complex64,
    /// `<a1^dag a1>`
    pub n1: Complex64,
    /// `<a2^dag a2>`
    pub n2: Complex64,
    /// `<a1^dag^2 a1^2>`
    pub n1sq: Complex64,
    /// `<a2^dag^2 a2^2>`
    pub n2sq: Complex64,
    /// `<a1^dag a1 a2^dag a2>`
    pub nn: Complex64,
    /// `<a1^2 a2^2>`
    pub g22: Complex64,
}

fn sqrt_fall(m: usize, k: usize) -> f64 {
    // sqrt((m+1)(m+2)...(m+k))
    (1..=k).map(|j| (m + j) as f64).product::<f64>().sqrt()
}

fn shifted_sum(psi: &Array2<Complex64>, d1: usize, d2: usize) -> Complex64 {
    // sum_{m} conj(psi(m1, m2)) sqrt_fall(m1, d1) sqrt_fall(m2, d2) psi(m1 + d1, m2 + d2)
    let len = psi.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for m1 in 0..len.saturating_sub(d1) {
        let f1 = sqrt_fall(m1, d1);
        for m2 in 0..len.saturating_sub(d2) {
            let hi = psi[(m1 + d1, m2 + d2)];
            if hi.re == 0.0 && hi.im == 0.0 {
                continue;
            }
            acc += psi[(m1, m2)].conj() * hi * (f1 * sqrt_fall(m2, d2));
        }
    }
    acc
}

fn diagonal_sum(psi: &Array2<Complex64>, weight: impl Fn(f64, f64) -> f64) -> f64 {
    psi.indexed_iter()
        .map(|((m1, m2), v)| weight(m1 as f64, m2 as f64) * v.norm_sqr())
        .sum()
}

/// Moments of the reduced field state, summed over the three branches.
pub fn moments(state: &JointState) -> MomentSet {
    let real = |x: f64| Complex64::new(x, 0.0);
    let mut m = MomentSet {
        m10: real(0.0),
        m01: real(0.0),
        m20: real(0.0),
        m02: real(0.0),
        m11: real(0.0),
        c11: real(0.0),
        n1: real(0.0),
        n2: real(0.0),
        n1sq: real(0.0),
        n2sq: real(0.0),
        nn: real(0.0),
        g22: real(0.0),
    };
    for psi in state.branches() {
        let len = psi.nrows();
        m.m10 += shifted_sum(psi, 1, 0);
        m.m01 += shifted_sum(psi, 0, 1);
        m.m20 += shifted_sum(psi, 2, 0);
        m.m02 += shifted_sum(psi, 0, 2);
        m.m11 += shifted_sum(psi, 1, 1);
        m.g22 += shifted_sum(psi, 2, 2);
        // <a1^dag a2>: psi(m1 - 1, m2 + 1) -> (m1, m2) with sqrt(m1 (m2 + 1)).
        for m1 in 1..len {
            for m2 in 0..len - 1 {
                let src = psi[(m1 - 1, m2 + 1)];
                if src.re == 0.0 && src.im == 0.0 {
                    continue;
                }
                m.c11 += psi[(m1, m2)].conj() * src * ((m1 * (m2 + 1)) as f64).sqrt();
            }
        }
        m.n1 += diagonal_sum(psi, |a, _| a);
        m.n2 += diagonal_sum(psi, |_, b| b);
        m.n1sq += diagonal_sum(psi, |a, _| a * (a - 1.0));
        m.n2sq += diagonal_sum(psi, |_, b| b * (b - 1.0));
        m.nn += diagonal_sum(psi, |a, b| a * b);
    }
    m
}

/// Field mode selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

/// Mandel `Q = (<n^2> - <n>^2 - <n>) / <n>` for the selected mode.
pub fn mandel_q(mom: &MomentSet, mode: Mode) -> Result<f64> {
    let (mean, factorial) = match mode {
        Mode::One => (mom.n1.re, mom.n1sq.re),
        Mode::Two => (mom.n2.re, mom.n2sq.re),
    };
    if mean <= Q_FLOOR {
        return Err(Error::QUndefined { mean });
    }
    // <n^2> - <n> = <a^dag^2 a^2>, so the numerator is factorial - mean^2.
    Ok((factorial - mean * mean) / mean)
}

/// `I0 = sqrt(<a1^dag^2 a1^2><a2^dag^2 a2^2>) / |<n1 n2>| - 1`; negative values
/// violate the Cauchy-Schwarz inequality.
pub fn csi_parameter(mom: &MomentSet) -> Result<f64> {
    let denom = mom.nn.norm();
    if denom <= CSI_FLOOR {
        return Err(Error::CsiUndefined { value: denom });
    }
    Ok((mom.n1sq.re * mom.n2sq.re).sqrt() / denom - 1.0)
}

/// Two-mode quadrature squeezing `(S_X1, S_X2)`; squeezed when in `(-1, 0)`.
pub fn two_mode_squeezing(mom: &MomentSet) -> (f64, f64) {
    let mean = mom.m10 + mom.m01;
    let occ = mom.n1.re + mom.n2.re;
    let sx1 =
        (mom.m20 + mom.m02 + 2.0 * mom.c11 + 2.0 * mom.m11).re + occ - 2.0 * mean.re * mean.re;
    let sx2 =
        (2.0 * mom.c11 - 2.0 * mom.m11 - mom.m20 - mom.m02).re + occ - 2.0 * mean.im * mean.im;
    (sx1, sx2)
}

/// Normalized sum squeezing `(S_Y1, S_Y2)`; squeezed when negative.
pub fn sum_squeezing(mom: &MomentSet) -> (f64, f64) {
    let norm = mom.n1.re + mom.n2.re + 1.0;
    let sy1 = (2.0 * mom.g22.re + 2.0 * mom.nn.re - 4.0 * mom.m11.re * mom.m11.re) / norm;
    let sy2 = (2.0 * mom.nn.re - 2.0 * mom.g22.re - 4.0 * mom.m11.im * mom.m11.im) / norm;
    (sy1, sy2)
}

/// `4 Var(X) - 1` for `X1 = (a1 + a1^dag + a2 + a2^dag) / (2 sqrt 2)` and
/// `X2 = (a1 - a1^dag + a2 - a2^dag) / (2 i sqrt 2)`, evaluated by applying the
/// quadrature operators to the state directly. Matches `two_mode_squeezing`
/// wherever the grid edge carries no amplitude.
pub fn quadrature_variances_direct(state: &JointState) -> (f64, f64) {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    let mut out = [0.0; 2];
    for (which, slot) in out.iter_mut().enumerate() {
        let mut mean = 0.0;
        let mut second = 0.0;
        for psi in state.branches() {
            let x = apply_quadrature(psi, which == 1, s);
            second += x.iter().map(|v| v.norm_sqr()).sum::<f64>();
            mean += psi
                .iter()
                .zip(x.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .re;
        }
        *slot = 4.0 * (second - mean * mean) - 1.0;
    }
    (out[0], out[1])
}

fn apply_quadrature(psi: &Array2<Complex64>, second: bool, s: f64) -> Array2<Complex64> {
    // (a +- a^dag) on each mode, then the prefactor.
    let len = psi.nrows();
    let sign = if second { -1.0 } else { 1.0 };
    let mut out = Array2::<Complex64>::zeros((len, len));
    for ((m1, m2), v) in psi.indexed_iter() {
        if v.re == 0.0 && v.im == 0.0 {
            continue;
        }
        if m1 > 0 {
            out[(m1 - 1, m2)] += v * (m1 as f64).sqrt();
        }
        if m1 + 1 < len {
            out[(m1 + 1, m2)] += v * (sign * ((m1 + 1) as f64).sqrt());
        }
        if m2 > 0 {
            out[(m1, m2 - 1)] += v * (m2 as f64).sqrt();
        }
        if m2 + 1 < len {
            out[(m1, m2 + 1)] += v * (sign * ((m2 + 1) as f64).sqrt());
        }
    }
    let pref = if second {
        Complex64::new(0.0, -s)
    } else {
        Complex64::new(s, 0.0)
    };
    out.mapv_inplace(|v| v * pref);
    out
}
