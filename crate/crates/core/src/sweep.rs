//! Time sweeps over a configuration, CSV output and phase snapshots.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Evolution;
use crate::model::{ModelConfig, Nonlinearity};
use crate::observables::{
    csi_parameter, mandel_q, moments, sum_squeezing, two_mode_squeezing, Mode,
};
use crate::phase::{
    entropy_squeezing, number_entropy, phase_distribution, phase_entropy, PhaseGrid,
};
use crate::presets::{canonical_name, preset_with_detuning, DEFAULT_DETUNING};
use crate::verify::verify_reduced;

/// Output columns after `tau`, in their fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Column {
    STheta,
    SN,
    RN,
    RTheta,
    Q1,
    Q2,
    I0,
    SX1,
    SX2,
    SY1,
    SY2,
    N1Mean,
    N2Mean,
    NormErr,
}

impl Column {
    pub const ALL: [Column; 14] = [
        Column::STheta,
        Column::SN,
        Column::RN,
        Column::RTheta,
        Column::Q1,
        Column::Q2,
        Column::I0,
        Column::SX1,
        Column::SX2,
        Column::SY1,
        Column::SY2,
        Column::N1Mean,
        Column::N2Mean,
        Column::NormErr,
    ];

    pub fn header(self) -> &'static str {
        match self {
            Column::STheta => "S_theta",
            Column::SN => "S_n",
            Column::RN => "R_n",
            Column::RTheta => "R_theta",
            Column::Q1 => "Q1",
            Column::Q2 => "Q2",
            Column::I0 => "I0",
            Column::SX1 => "S_X1",
            Column::SX2 => "S_X2",
            Column::SY1 => "S_Y1",
            Column::SY2 => "S_Y2",
            Column::N1Mean => "n1_mean",
            Column::N2Mean => "n2_mean",
            Column::NormErr => "norm_err",
        }
    }

    fn needs_phase(self) -> bool {
        matches!(self, Column::STheta | Column::RTheta)
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .iter()
            .copied()
            .find(|c| c.header().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown observable {s:?}")))
    }
}

/// Everything a sweep needs.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub model: ModelConfig,
    /// Canonical preset name the model was built from, if any.
    pub preset: Option<String>,
    pub tau_start: f64,
    pub tau_end: f64,
    /// Number of samples, endpoints included.
    pub tau_steps: usize,
    /// Selected columns, kept in `Column::ALL` order.
    pub columns: Vec<Column>,
    pub out: PathBuf,
    pub verify: bool,
    pub m_pts: usize,
    pub theta0: f64,
    /// When set, write the phase grid at this tau instead of a time series.
    pub phase_snapshot: Option<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            preset: None,
            tau_start: 0.0,
            tau_end: 50.0,
            tau_steps: 500,
            columns: Column::ALL.to_vec(),
            out: PathBuf::from("sweep.csv"),
            verify: false,
            m_pts: 128,
            theta0: -PI,
            phase_snapshot: None,
        }
    }
}

impl SweepSpec {
    pub fn for_preset(name: &str) -> Result<Self> {
        let mut settings = Settings::default();
        settings.set("preset", name);
        Self::from_settings(&settings)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.tau_start >= 0.0 && self.tau_end > self.tau_start) {
            return Err(Error::Config(format!(
                "need tau_end > tau_start >= 0 (got {} .. {})",
                self.tau_start, self.tau_end
            )));
        }
        if self.tau_steps < 2 {
            return Err(Error::Config("tau_steps must be at least 2".into()));
        }
        if self.columns.is_empty() {
            return Err(Error::Config("no observables selected".into()));
        }
        if !self.theta0.is_finite() {
            return Err(Error::Config("theta0 must be finite".into()));
        }
        Ok(())
    }

    pub fn taus(&self) -> Vec<f64> {
        let span = self.tau_end - self.tau_start;
        let last = (self.tau_steps - 1) as f64;
        (0..self.tau_steps)
            .map(|i| {
                if i + 1 == self.tau_steps {
                    self.tau_end
                } else {
                    self.tau_start + span * i as f64 / last
                }
            })
            .collect()
    }

    /// Builds a spec from flat `key = value` settings. Later layers (CLI
    /// flags) are merged into the same map before calling this.
    pub fn from_settings(settings: &Settings) -> Result<Self> {
        let mut spec = SweepSpec::default();
        let detuning = settings.value::<f64>("detuning")?;
        let explicit_levels = settings.get("omega2").is_some() || settings.get("omega3").is_some();
        if let Some(name) = settings.get("preset") {
            let canonical = canonical_name(name)
                .ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
            spec.model = preset_with_detuning(canonical, detuning.unwrap_or(DEFAULT_DETUNING))?;
            spec.preset = Some(canonical.to_string());
        }
        let m = &mut spec.model;
        for (key, value) in settings.iter() {
            let num = || parse_value::<f64>(key, value);
            match key {
                "preset" | "detuning" => {}
                "lambda1" => m.lambda1 = num()?,
                "lambda2" => m.lambda2 = num()?,
                "chi" => m.chi = num()?,
                "omega1" => m.omega1 = num()?,
                "omega2" => m.omega2 = num()?,
                "omega3" => m.omega3 = num()?,
                "Omega1" | "mode_omega1" => m.mode_omega1 = num()?,
                "Omega2" | "mode_omega2" => m.mode_omega2 = num()?,
                "f1" => m.f1 = parse_nonlinearity(key, value)?,
                "f2" => m.f2 = parse_nonlinearity(key, value)?,
                "g1" => m.g1 = parse_nonlinearity(key, value)?,
                "g2" => m.g2 = parse_nonlinearity(key, value)?,
                "n_max" => m.n_max = parse_value(key, value)?,
                "alpha1" => m.alpha1 = parse_complex(key, value)?,
                "alpha2" => m.alpha2 = parse_complex(key, value)?,
                "truncation_tol" => m.truncation_tol = num()?,
                "include_free_phases" => m.include_free_phases = parse_bool(key, value)?,
                "tau_start" => spec.tau_start = num()?,
                "tau_end" => spec.tau_end = num()?,
                "tau_steps" => spec.tau_steps = parse_value(key, value)?,
                "m_pts" => spec.m_pts = parse_value(key, value)?,
                "theta0" => spec.theta0 = num()?,
                "out" => spec.out = PathBuf::from(value),
                "verify" => spec.verify = parse_bool(key, value)?,
                "phase_snapshot" => spec.phase_snapshot = Some(num()?),
                "observables" => {
                    let mut cols = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(Column::from_str)
                        .collect::<Result<Vec<_>>>()?;
                    cols.sort();
                    cols.dedup();
                    spec.columns = cols;
                }
                other => return Err(Error::Config(format!("unknown setting {other:?}"))),
            }
        }
        let m = &mut spec.model;
        match detuning {
            Some(d) => m.set_detunings(d, d),
            None => {
                let c_family = spec.preset.as_deref().is_some_and(|p| p.starts_with("c-"));
                if c_family && !explicit_levels {
                    m.set_detunings(DEFAULT_DETUNING, DEFAULT_DETUNING);
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Ordered `key = value` settings; later assignments win.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses UTF-8 `key = value` lines. `#` starts a comment; blank lines
    /// are skipped; dashes in keys read as underscores.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            out.set(k, v.trim());
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.replace('-', "_"), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn value<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key).map(|v| parse_value(key, v)).transpose()
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean {value:?} for {key}"))),
    }
}

/// `re` or `re,im`.
fn parse_complex(key: &str, value: &str) -> Result<Complex64> {
    match value.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse_value(key, re)?, parse_value(key, im)?)),
        None => Ok(Complex64::new(parse_value(key, value)?, 0.0)),
    }
}

/// `unit`, `harmonious`, or `custom:f0,f1,...`.
fn parse_nonlinearity(key: &str, value: &str) -> Result<Nonlinearity> {
    let v = value.trim();
    match v.to_ascii_lowercase().as_str() {
        "unit" | "1" => return Ok(Nonlinearity::Unit),
        "harmonious" => return Ok(Nonlinearity::Harmonious),
        _ => {}
    }
    let table = v
        .strip_prefix("custom:")
        .ok_or_else(|| Error::Config(format!("bad nonlinearity {value:?} for {key}")))?;
    table
        .split(',')
        .map(|s| parse_value::<f64>(key, s))
        .collect::<Result<Vec<_>>>()
        .map(Nonlinearity::Custom)
}

/// All indicators at one sample. Undefined or unselected values are NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRow {
    pub tau: f64,
    pub s_theta: f64,
    pub s_n: f64,
    pub r_n: f64,
    pub r_theta: f64,
    pub q1: f64,
    pub q2: f64,
    pub i0: f64,
    pub s_x1: f64,
    pub s_x2: f64,
    pub s_y1: f64,
    pub s_y2: f64,
    pub n1_mean: f64,
    pub n2_mean: f64,
    pub norm_err: f64,
}

impl ObservableRow {
    pub fn get(&self, col: Column) -> f64 {
        match col {
            Column::STheta => self.s_theta,
            Column::SN => self.s_n,
            Column::RN => self.r_n,
            Column::RTheta => self.r_theta,
            Column::Q1 => self.q1,
            Column::Q2 => self.q2,
            Column::I0 => self.i0,
            Column::SX1 => self.s_x1,
            Column::SX2 => self.s_x2,
            Column::SY1 => self.s_y1,
            Column::SY2 => self.s_y2,
            Column::N1Mean => self.n1_mean,
            Column::N2Mean => self.n2_mean,
            Column::NormErr => self.norm_err,
        }
    }
}

/// Time-ordered indicator records.
#[derive(Clone, Debug, Default)]
pub struct ObservableSeries {
    pub rows: Vec<ObservableRow>,
}

impl ObservableSeries {
    pub fn column(&self, col: Column) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(col)).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau).collect()
    }
}

fn row_at(evo: &Evolution, spec: &SweepSpec, tau: f64, with_phase: bool) -> Result<ObservableRow> {
    let t = tau / evo.config().lambda1;
    let state = evo.state_at(t);
    let mom = moments(&state);
    let (s_x1, s_x2) = two_mode_squeezing(&mom);
    let (s_y1, s_y2) = sum_squeezing(&mom);
    let mut row = ObservableRow {
        tau,
        s_theta: f64::NAN,
        s_n: f64::NAN,
        r_n: f64::NAN,
        r_theta: f64::NAN,
        q1: mandel_q(&mom, Mode::One).unwrap_or(f64::NAN),
        q2: mandel_q(&mom, Mode::Two).unwrap_or(f64::NAN),
        i0: csi_parameter(&mom).unwrap_or(f64::NAN),
        s_x1,
        s_x2,
        s_y1,
        s_y2,
        n1_mean: mom.n1.re,
        n2_mean: mom.n2.re,
        norm_err: state.norm() - 1.0,
    };
    row.r_n = number_entropy(&state);
    row.s_n = entropy_squeezing(row.r_n);
    if with_phase {
        let grid = phase_distribution(&state, spec.theta0, spec.m_pts)?;
        row.r_theta = phase_entropy(&grid);
        row.s_theta = entropy_squeezing(row.r_theta);
    }
    Ok(row)
}

/// Computes every sample of the sweep. Samples run in parallel over a shared
/// block table; rows come back in tau order.
pub fn compute_series(spec: &SweepSpec) -> Result<ObservableSeries> {
    spec.validate()?;
    let evo = Evolution::new(&spec.model)?;
    let with_phase = spec.columns.iter().any(|c| c.needs_phase());
    if with_phase {
        let min = crate::phase::min_mesh(spec.model.grid_len());
        if spec.m_pts < min {
            return Err(Error::Resolution {
                m_pts: spec.m_pts,
                min,
            });
        }
    }
    let rows = spec
        .taus()
        .into_par_iter()
        .map(|tau| row_at(&evo, spec, tau, with_phase).map_err(|e| e.at_time(tau)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservableSeries { rows })
}

fn fmt_f64(buf: &mut ryu::Buffer, v: f64) -> String {
    buf.format(v).to_string()
}

/// CSV with a header row: `tau` followed by the selected columns.
pub fn write_series<W: Write>(series: &ObservableSeries, columns: &[Column], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["tau"];
    header.extend(columns.iter().map(|c| c.header()));
    w.write_record(&header)?;
    let mut buf = ryu::Buffer::new();
    for row in &series.rows {
        let mut rec = vec![fmt_f64(&mut buf, row.tau)];
        rec.extend(columns.iter().map(|&c| fmt_f64(&mut buf, row.get(c))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the optional oracle check, the sweep, and writes the CSV to
/// `spec.out`.
pub fn run_sweep(spec: &SweepSpec) -> Result<ObservableSeries> {
    spec.validate()?;
    if spec.verify {
        let report = verify_reduced(&spec.model)?;
        info!(
            "oracle check passed: max deviation {:e}, energy drift {:e}",
            report.max_deviation(),
            report.energy_drift
        );
    }
    let series = compute_series(spec)?;
    let file = std::fs::File::create(&spec.out)?;
    write_series(&series, &spec.columns, std::io::BufWriter::new(file))?;
    Ok(series)
}

/// Phase distribution at scaled time `tau`.
pub fn phase_snapshot(spec: &SweepSpec, tau: f64) -> Result<PhaseGrid> {
    spec.model.validate()?;
    let evo = Evolution::new(&spec.model)?;
    let state = evo.state_at(tau / spec.model.lambda1);
    phase_distribution(&state, spec.theta0, spec.m_pts).map_err(|e| e.at_time(tau))
}

pub fn write_phase_grid<W: Write>(grid: &PhaseGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta1", "theta2", "P_theta"])?;
    let mut buf = ryu::Buffer::new();
    for ((i, j), p) in grid.values.indexed_iter() {
        w.write_record([
            fmt_f64(&mut buf, grid.theta(i)),
            fmt_f64(&mut buf, grid.theta(j)),
            fmt_f64(&mut buf, *p),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the phase grid at `tau` to `spec.out`.
pub fn dump_phase_snapshot(spec: &SweepSpec, tau: f64) -> Result<PhaseGrid> {
    let grid = phase_snapshot(spec, tau)?;
    let file = std::fs::File::create(&spec.out)?;
    write_phase_grid(&grid, std::io::BufWriter::new(file))?;
    Ok(grid)
}
