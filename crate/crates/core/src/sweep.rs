//! Deterministic parameter sweeps: evaluate the cycle over a grid spanned
//! by one or more axes, optionally fanning the points out across a thread
//! pool. Points are independent, results are collected back in row-major
//! grid order (last axis fastest), and per-point failures are recorded in
//! the row instead of aborting the sweep — so the output is byte-for-byte
//! identical no matter how many workers ran it.

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cycle::{run_cycle, CycleConfig, CycleError, CycleResult};
use crate::demon::DemonSpec;
use crate::spectrum::{self, WellSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("axis `{key}`: {message}")]
    InvalidAxis { key: &'static str, message: String },
    #[error("worker pool: {0}")]
    ThreadPool(String),
}

/// Parameters a sweep axis may range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Barrier insertion position `l`.
    Insertion,
    /// Well length `L`.
    BoxLength,
    /// Engine bath inverse temperature `beta`.
    SystemBeta,
    /// Demon bath inverse temperature `beta_D`.
    BathBeta,
    /// Register gap `Delta`.
    Gap,
    /// Register coherence `F`.
    Coherence,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::Insertion,
        SweepParam::BoxLength,
        SweepParam::SystemBeta,
        SweepParam::BathBeta,
        SweepParam::Gap,
        SweepParam::Coherence,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Insertion => "l",
            SweepParam::BoxLength => "L",
            SweepParam::SystemBeta => "beta",
            SweepParam::BathBeta => "beta_D",
            SweepParam::Gap => "Delta",
            SweepParam::Coherence => "F",
        }
    }

    pub fn parse(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// One grid dimension: `count` nodes from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    param: SweepParam,
    min: f64,
    max: f64,
    count: usize,
    spacing: Spacing,
}

impl SweepAxis {
    pub fn new(
        param: SweepParam,
        min: f64,
        max: f64,
        count: usize,
        spacing: Spacing,
    ) -> Result<Self, SweepError> {
        let fail = |message: String| SweepError::InvalidAxis {
            key: param.key(),
            message,
        };
        if count < 2 {
            return Err(fail(format!("need at least 2 points, got {count}")));
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(fail(format!("bounds must be finite, got [{min}, {max}]")));
        }
        if min >= max {
            return Err(fail(format!("bounds must satisfy min < max, got [{min}, {max}]")));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(fail(format!("log spacing needs min > 0, got {min}")));
        }
        Ok(Self {
            param,
            min,
            max,
            count,
            spacing,
        })
    }

    pub fn param(&self) -> SweepParam {
        self.param
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Node `i`; the first and last land exactly on the bounds.
    pub fn value_at(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        if i == 0 {
            return self.min;
        }
        if i == self.count - 1 {
            return self.max;
        }
        let t = (i as f64) / ((self.count - 1) as f64);
        match self.spacing {
            Spacing::Linear => self.min + (self.max - self.min) * t,
            Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
        }
    }
}

/// A full operating point with optional fields left to defaulting rules.
///
/// `insertion` defaults to the well center. Expansion endpoints default to
/// full expansion `(L, 0)` when the demon record is perfect (cold bath,
/// nonzero gap) and to the guarded interior pair
/// `(L (1 - guard_frac), L guard_frac)` otherwise, keeping every block at
/// finite width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub insertion: Option<f64>,
    pub box_length: f64,
    pub system_beta: f64,
    pub gap: f64,
    pub bath_beta: f64,
    pub coherence: f64,
    pub expand_ground: Option<f64>,
    pub expand_excited: Option<f64>,
    pub guard_frac: f64,
    pub tol: f64,
}

impl Default for PointParams {
    fn default() -> Self {
        Self {
            insertion: None,
            box_length: 1.0,
            system_beta: 1.0,
            gap: 0.5,
            bath_beta: 3.0,
            coherence: 0.0,
            expand_ground: None,
            expand_excited: None,
            guard_frac: 1e-6,
            tol: spectrum::DEFAULT_TOL,
        }
    }
}

impl PointParams {
    pub fn apply(mut self, param: SweepParam, value: f64) -> Self {
        match param {
            SweepParam::Insertion => self.insertion = Some(value),
            SweepParam::BoxLength => self.box_length = value,
            SweepParam::SystemBeta => self.system_beta = value,
            SweepParam::BathBeta => self.bath_beta = value,
            SweepParam::Gap => self.gap = value,
            SweepParam::Coherence => self.coherence = value,
        }
        self
    }

    /// Materializes every defaulted field into plain numbers. Performs no
    /// validation; bad values surface when the point is run.
    pub fn resolve(&self) -> ResolvedPoint {
        let length = self.box_length;
        let perfect_record = self.bath_beta.is_infinite() && self.gap > 0.0;
        let (default_g, default_e) = if perfect_record {
            (length, 0.0)
        } else {
            (length * (1.0 - self.guard_frac), length * self.guard_frac)
        };
        ResolvedPoint {
            insertion: self.insertion.unwrap_or(0.5 * length),
            box_length: length,
            system_beta: self.system_beta,
            gap: self.gap,
            bath_beta: self.bath_beta,
            coherence: self.coherence,
            expand_ground: self.expand_ground.unwrap_or(default_g),
            expand_excited: self.expand_excited.unwrap_or(default_e),
            tol: self.tol,
        }
    }
}

/// A point with all defaults materialized — what actually ran.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedPoint {
    pub insertion: f64,
    pub box_length: f64,
    pub system_beta: f64,
    pub gap: f64,
    pub bath_beta: f64,
    pub coherence: f64,
    pub expand_ground: f64,
    pub expand_excited: f64,
    pub tol: f64,
}

impl ResolvedPoint {
    pub fn config(&self) -> Result<CycleConfig, CycleError> {
        let well = WellSpec::natural(self.box_length)?;
        let demon = DemonSpec::new(self.gap, self.bath_beta, self.coherence)?;
        CycleConfig::new(well, self.system_beta, demon, self.insertion)?
            .with_expansion(self.expand_ground, self.expand_excited)?
            .with_tol(self.tol)
    }
}

/// One grid point's echo and outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub point: ResolvedPoint,
    pub result: Result<CycleResult, CycleError>,
}

fn grid_size(axes: &[SweepAxis]) -> usize {
    axes.iter().map(|a| a.count()).product::<usize>().max(1)
}

fn point_at(base: &PointParams, axes: &[SweepAxis], index: usize) -> PointParams {
    let mut params = *base;
    let mut rest = index;
    for axis in axes.iter().rev() {
        let i = rest % axis.count();
        rest /= axis.count();
        params = params.apply(axis.param(), axis.value_at(i));
    }
    params
}

fn evaluate(params: PointParams) -> SweepOutcome {
    let point = params.resolve();
    let result = point.config().and_then(|cfg| run_cycle(&cfg));
    SweepOutcome { point, result }
}

/// Evaluates the grid on the calling thread, in row-major order.
pub fn run_sweep_sequential(base: &PointParams, axes: &[SweepAxis]) -> Vec<SweepOutcome> {
    (0..grid_size(axes))
        .map(|i| evaluate(point_at(base, axes, i)))
        .collect()
}

/// Evaluates the grid across `workers` threads (`0` uses the default pool,
/// `1` stays on the calling thread). Row order matches the sequential run
/// exactly.
#[cfg(feature = "parallel")]
pub fn run_sweep(
    base: &PointParams,
    axes: &[SweepAxis],
    workers: usize,
) -> Result<Vec<SweepOutcome>, SweepError> {
    if workers == 1 {
        return Ok(run_sweep_sequential(base, axes));
    }
    let total = grid_size(axes);
    let body = || {
        (0..total)
            .into_par_iter()
            .map(|i| evaluate(point_at(base, axes, i)))
            .collect()
    };
    if workers == 0 {
        Ok(body())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| SweepError::ThreadPool(e.to_string()))?;
        Ok(pool.install(body))
    }
}

/// Single-threaded stand-in when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_sweep(
    base: &PointParams,
    axes: &[SweepAxis],
    _workers: usize,
) -> Result<Vec<SweepOutcome>, SweepError> {
    Ok(run_sweep_sequential(base, axes))
}
