//! Operating-point analysis on top of the cycle: closed-form totals, the
//! positive-work threshold in the demon's bath temperature, the critical and
//! optimal insertion positions, and the small-gap / cold-demon limits.
//!
//! The net work and heat of a cycle do not depend on where the conditional
//! expansion parks its walls, so every solver here evaluates the cycle with
//! the walls pinned at the insertion point (a no-op expansion stroke). That
//! choice is crush-free for any demon and keeps the degenerate `Delta = 0`
//! engine at exactly zero net work in floating point, which the sign-change
//! detection relies on.

use thiserror::Error;

use crate::cycle::{binary_entropy, run_cycle, CycleConfig, CycleError};
use crate::demon::DemonSpec;
use crate::spectrum::{joint_split_log_z, ThermoPoint, WellSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(
        "objective does not change sign on [{lo}, {hi}] (f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e})"
    )]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("objective is maximal at the bracket edge {at}; no interior maximum in [{lo}, {hi}]")]
    BoundaryMaximum { at: f64, lo: f64, hi: f64 },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

/// Which condition a [`SolveReport`] answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveTarget {
    /// Demon bath inverse temperature where net work changes sign.
    PwcBathBeta,
    /// Smallest insertion position with zero net work.
    CriticalInsertion,
    /// Insertion position maximizing net work.
    MaxWorkInsertion,
}

impl SolveTarget {
    pub fn label(self) -> &'static str {
        match self {
            SolveTarget::PwcBathBeta => "pwc-beta",
            SolveTarget::CriticalInsertion => "l-cri",
            SolveTarget::MaxWorkInsertion => "l-wmax",
        }
    }
}

/// Result of a root or argmax search.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub target: SolveTarget,
    /// Root (or argmax) in the solved variable.
    pub root: f64,
    /// `|W_tot|` at a root; stationarity-condition mismatch at an argmax.
    pub residual: f64,
    /// Interval that was searched.
    pub bracket: (f64, f64),
    /// Refinement iterations (excluding the coarse bracketing scan).
    pub iterations: u32,
    /// Root of the cold-demon critical condition
    /// `T (P_L ln P_L + P_R ln P_R) + P_R Delta = 0`, when it has one.
    pub condition_root: Option<f64>,
    /// That condition evaluated at [`SolveReport::root`].
    pub condition_residual: Option<f64>,
}

/// Cycle totals in closed form, bypassing the ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedTotals {
    pub w_tot: f64,
    pub q_tot: f64,
    pub w_mea: f64,
}

/// Net work, net heat, and measurement cost from the occupation and
/// population numbers alone:
///
/// ```text
/// w_g = P_L p_g + P_R p_e        w_e = P_L p_e + P_R p_g
/// Q_tot = T [H(w_g, w_e) - H(p_g, p_e)]
/// W_mea = P_R (p_g - p_e) Delta
/// W_tot = Q_tot - W_mea
/// ```
pub fn closed_cycle_totals(
    p_left: f64,
    p_right: f64,
    p_g: f64,
    p_e: f64,
    gap: f64,
    temperature: f64,
) -> ClosedTotals {
    let w_g = p_left * p_g + p_right * p_e;
    let w_e = p_left * p_e + p_right * p_g;
    let q_tot = temperature * (binary_entropy(w_g, w_e) - binary_entropy(p_g, p_e));
    let w_mea = p_right * (p_g - p_e) * gap;
    ClosedTotals {
        w_tot: q_tot - w_mea,
        q_tot,
        w_mea,
    }
}

/// Closed forms at the centered insertion point `l = L/2`, where
/// `P_L = P_R = 1/2` for any box length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSplitForms {
    pub w_tot: f64,
    pub q_tot: f64,
    pub eta: f64,
    /// Small-gap efficiency ceiling `1 - 2 T_D / T` (with the effective
    /// demon temperature when the register is coherent).
    pub eta_max: f64,
}

pub fn half_split_closed_forms(
    beta: f64,
    demon: &DemonSpec,
) -> Result<HalfSplitForms, AnalysisError> {
    let pt = ThermoPoint::new(beta).map_err(CycleError::from)?;
    let t = pt.temperature();
    let (p_g, p_e) = demon.operating_populations();
    let totals = closed_cycle_totals(0.5, 0.5, p_g, p_e, demon.gap(), t);
    let eta = if totals.w_tot > 0.0 {
        1.0 - totals.w_mea / totals.q_tot
    } else {
        0.0
    };
    let eta_max = 1.0 - 2.0 * demon_temperature(demon).map_err(CycleError::from)? / t;
    Ok(HalfSplitForms {
        w_tot: totals.w_tot,
        q_tot: totals.q_tot,
        eta,
        eta_max,
    })
}

fn demon_temperature(demon: &DemonSpec) -> Result<f64, crate::demon::DemonError> {
    if demon.coherence() == 0.0 {
        if demon.bath_beta().is_infinite() {
            Ok(0.0)
        } else {
            Ok(demon.bath_beta().recip())
        }
    } else if demon.gap() == 0.0 {
        Ok(0.0)
    } else {
        Ok(demon.effective_beta()?.recip())
    }
}

/// `W_tot` as a function of the insertion position, walls pinned at `l`.
fn net_work_at_insertion(cfg: &CycleConfig, l: f64) -> Result<f64, CycleError> {
    let eval = CycleConfig::new(*cfg.well(), cfg.beta(), *cfg.demon(), l)?
        .with_expansion(l, l)?
        .with_tol(cfg.tol())?;
    Ok(run_cycle(&eval)?.w_tot)
}

/// `W_tot` as a function of the demon bath inverse temperature.
fn net_work_at_bath_beta(cfg: &CycleConfig, bath_beta: f64) -> Result<f64, CycleError> {
    let demon = DemonSpec::new(cfg.demon().gap(), bath_beta, cfg.demon().coherence())?;
    let l = cfg.insertion();
    let eval = CycleConfig::new(*cfg.well(), cfg.beta(), demon, l)?
        .with_expansion(l, l)?
        .with_tol(cfg.tol())?;
    Ok(run_cycle(&eval)?.w_tot)
}

const SCAN_CELLS: usize = 256;
const MAX_BISECT: u32 = 200;
const MAX_SECANT: u32 = 4;

fn check_bracket(lo: f64, hi: f64) -> Result<(), AnalysisError> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(AnalysisError::InvalidBracket { lo, hi });
    }
    Ok(())
}

/// Scans left to right and returns the first cell with a strict sign change,
/// skipping cells whose endpoints failed to evaluate.
fn first_sign_change<F>(
    f: &mut F,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64, f64, f64), AnalysisError>
where
    F: FnMut(f64) -> Result<f64, CycleError>,
{
    let mut prev: Option<(f64, f64)> = None;
    let mut edge = (f64::NAN, f64::NAN);
    for i in 0..=SCAN_CELLS {
        let x = if i == SCAN_CELLS {
            hi
        } else {
            lo + (hi - lo) * (i as f64) / (SCAN_CELLS as f64)
        };
        let value = match f(x) {
            Ok(v) if v.is_finite() => v,
            _ => {
                prev = None;
                continue;
            }
        };
        if i == 0 {
            edge.0 = value;
        }
        edge.1 = value;
        if let Some((px, pv)) = prev {
            if pv * value < 0.0 {
                return Ok((px, x, pv, value));
            }
        }
        prev = Some((x, value));
    }
    Err(AnalysisError::NoSignChange {
        lo,
        hi,
        f_lo: edge.0,
        f_hi: edge.1,
    })
}

/// Bisection to a relative width near machine precision, then a few secant
/// polish steps; returns `(root, residual, iterations)`.
fn refine_root<F>(
    f: &mut F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
) -> Result<(f64, f64, u32), AnalysisError>
where
    F: FnMut(f64) -> Result<f64, CycleError>,
{
    let mut iterations = 0;
    let width_floor = 2.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0);
    while hi - lo > width_floor && iterations < MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        iterations += 1;
        if f_mid == 0.0 {
            return Ok((mid, 0.0, iterations));
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let (mut best_x, mut best_f) = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    let (mut x0, mut v0, mut x1, mut v1) = (lo, f_lo, hi, f_hi);
    for _ in 0..MAX_SECANT {
        if v1 == v0 {
            break;
        }
        let x2 = x1 - v1 * (x1 - x0) / (v1 - v0);
        if !x2.is_finite() || x2 < lo || x2 > hi {
            break;
        }
        let v2 = f(x2)?;
        iterations += 1;
        if v2.abs() < best_f.abs() {
            best_x = x2;
            best_f = v2;
        }
        (x0, v0, x1, v1) = (x1, v1, x2, v2);
        if v2 == 0.0 {
            break;
        }
    }
    Ok((best_x, best_f.abs(), iterations))
}

fn solve_root<F>(
    f: &mut F,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64, u32), AnalysisError>
where
    F: FnMut(f64) -> Result<f64, CycleError>,
{
    check_bracket(lo, hi)?;
    let (a, b, fa, fb) = first_sign_change(f, lo, hi)?;
    refine_root(f, a, b, fa, fb)
}

/// Demon bath inverse temperature at which the net work crosses zero, at
/// the configured insertion point. Default bracket: `[beta, 100 beta]`.
pub fn pwc_beta_threshold(
    cfg: &CycleConfig,
    bracket: Option<(f64, f64)>,
) -> Result<SolveReport, AnalysisError> {
    let (lo, hi) = bracket.unwrap_or((cfg.beta(), 100.0 * cfg.beta()));
    let mut f = |bath_beta: f64| net_work_at_bath_beta(cfg, bath_beta);
    let (root, residual, iterations) = solve_root(&mut f, lo, hi)?;
    Ok(SolveReport {
        target: SolveTarget::PwcBathBeta,
        root,
        residual,
        bracket: (lo, hi),
        iterations,
        condition_root: None,
        condition_residual: None,
    })
}

/// The cold-demon critical condition
/// `T (P_L ln P_L + P_R ln P_R) + P_R Delta` as a function of `l`.
fn cold_critical_condition(cfg: &CycleConfig, l: f64) -> Result<f64, CycleError> {
    let pt = ThermoPoint::new(cfg.beta())?;
    let split = joint_split_log_z(cfg.well(), &pt, l, cfg.tol())?;
    let t = pt.temperature();
    Ok(-t * binary_entropy(split.p_left, split.p_right) + split.p_right * cfg.demon().gap())
}

/// Smallest insertion position with `W_tot = 0` in the bracket (default
/// `[0.05 L, 0.95 L]`). Also solves and reports the cold-demon printed
/// condition when it changes sign on the same bracket.
pub fn critical_insertion(
    cfg: &CycleConfig,
    bracket: Option<(f64, f64)>,
) -> Result<SolveReport, AnalysisError> {
    let length = cfg.well().length();
    let (lo, hi) = bracket.unwrap_or((0.05 * length, 0.95 * length));
    let mut f = |l: f64| net_work_at_insertion(cfg, l);
    let (root, residual, iterations) = solve_root(&mut f, lo, hi)?;
    let mut g = |l: f64| cold_critical_condition(cfg, l);
    let condition_root = solve_root(&mut g, lo, hi).ok().map(|(r, _, _)| r);
    let condition_residual = cold_critical_condition(cfg, root).ok();
    Ok(SolveReport {
        target: SolveTarget::CriticalInsertion,
        root,
        residual,
        bracket: (lo, hi),
        iterations,
        condition_root,
        condition_residual,
    })
}

/// Stationarity mismatch `|w_e / w_g - exp(-beta Delta)|` at insertion `l`.
fn stationarity_residual(cfg: &CycleConfig, l: f64) -> Result<f64, CycleError> {
    let pt = ThermoPoint::new(cfg.beta())?;
    let split = joint_split_log_z(cfg.well(), &pt, l, cfg.tol())?;
    let (p_g, p_e) = cfg.demon().operating_populations();
    let w_g = split.p_left * p_g + split.p_right * p_e;
    let w_e = split.p_left * p_e + split.p_right * p_g;
    Ok((w_e / w_g - (-cfg.beta() * cfg.demon().gap()).exp()).abs())
}

/// Insertion position maximizing the net work, by a coarse scan and golden-
/// section refinement to `dl < 1e-8 L`. The residual reports how well the
/// argmax satisfies `w_e / w_g = exp(-beta Delta)`.
pub fn max_work_insertion(
    cfg: &CycleConfig,
    bracket: Option<(f64, f64)>,
) -> Result<SolveReport, AnalysisError> {
    let length = cfg.well().length();
    let (lo, hi) = bracket.unwrap_or((0.05 * length, 0.95 * length));
    check_bracket(lo, hi)?;

    let (p_g, p_e) = cfg.demon().operating_populations();
    if p_g == p_e {
        // Flat profile: every position extracts the same (zero) net work,
        // and the stationarity condition holds identically at the center.
        let root = 0.5 * length;
        return Ok(SolveReport {
            target: SolveTarget::MaxWorkInsertion,
            root,
            residual: stationarity_residual(cfg, root)?,
            bracket: (lo, hi),
            iterations: 0,
            condition_root: None,
            condition_residual: None,
        });
    }

    let f = |l: f64| net_work_at_insertion(cfg, l);
    let cells = 64usize;
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut nodes = Vec::with_capacity(cells + 1);
    for i in 0..=cells {
        let x = if i == cells {
            hi
        } else {
            lo + (hi - lo) * (i as f64) / (cells as f64)
        };
        let v = f(x)?;
        nodes.push(x);
        if v > best.1 {
            best = (i, v);
        }
    }
    // Without positive extractable work the profile climbs toward a wall
    // and flattens into rounding noise there; the supremum sits on the
    // bracket edge, not at an interior peak.
    let noise_floor = 1e-13 * (1.0 / cfg.beta()).max(1.0);
    if best.0 == 0 || best.0 == cells || best.1 <= noise_floor {
        let edge = if best.0 <= cells / 2 { lo } else { hi };
        return Err(AnalysisError::BoundaryMaximum { at: edge, lo, hi });
    }

    let (mut a, mut b) = (nodes[best.0 - 1], nodes[best.0 + 1]);
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while b - a > 1e-8 * length && iterations < 200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
        iterations += 1;
    }
    let root = 0.5 * (a + b);
    Ok(SolveReport {
        target: SolveTarget::MaxWorkInsertion,
        root,
        residual: stationarity_residual(cfg, root)?,
        bracket: (lo, hi),
        iterations,
        condition_root: None,
        condition_residual: None,
    })
}

/// Two-level Richardson extrapolation to zero step for a quantity with an
/// even error series, sampled at steps `h`, `h/r`, `h/r²`.
pub fn richardson_even3(samples: [f64; 3], ratio: f64) -> f64 {
    let r2 = ratio * ratio;
    let g0 = (r2 * samples[1] - samples[0]) / (r2 - 1.0);
    let g1 = (r2 * samples[2] - samples[1]) / (r2 - 1.0);
    let r4 = r2 * r2;
    (r4 * g1 - g0) / (r4 - 1.0)
}

/// Small-gap limit of the centered-insertion efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct GapLimitReport {
    /// Richardson extrapolation of the sampled efficiencies to zero gap.
    pub extrapolated: f64,
    /// The ceiling `1 - 2 T_D / T` it should approach.
    pub target: f64,
    /// `(gap, eta)` samples, largest gap first.
    pub samples: [(f64, f64); 3],
}

/// Runs the engine at `l = L/2` with gaps `1e-2, 1e-3, 1e-4` and
/// extrapolates the efficiency to zero gap.
pub fn eta_small_gap_limit(
    well: &WellSpec,
    beta: f64,
    bath_beta: f64,
) -> Result<GapLimitReport, AnalysisError> {
    let gaps = [1e-2, 1e-3, 1e-4];
    let l = 0.5 * well.length();
    let mut samples = [(0.0, 0.0); 3];
    for (slot, &gap) in samples.iter_mut().zip(&gaps) {
        let demon = DemonSpec::thermal(gap, bath_beta).map_err(CycleError::from)?;
        let cfg = CycleConfig::new(*well, beta, demon, l)?.with_expansion(l, l)?;
        *slot = (gap, run_cycle(&cfg)?.eta);
    }
    let t_demon = if bath_beta.is_infinite() {
        0.0
    } else {
        bath_beta.recip()
    };
    Ok(GapLimitReport {
        extrapolated: richardson_even3([samples[0].1, samples[1].1, samples[2].1], 10.0),
        target: 1.0 - 2.0 * t_demon * beta,
        samples,
    })
}

/// The two orders of the joint small-gap / cold-demon limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitOrderDemo {
    /// Gap to zero first, then bath temperature: net work extrapolates to 0.
    pub order_a: f64,
    /// Cold demon first, then gap to zero: net work lands on `T ln 2`.
    pub order_b: f64,
    /// `(bath_beta, extrapolated W_tot)` stages of order A.
    pub order_a_trail: Vec<(f64, f64)>,
    /// `(gap, W_tot)` stages of order B.
    pub order_b_trail: Vec<(f64, f64)>,
}

/// Demonstrates that the two limits do not commute: sending the register
/// gap to zero first leaves nothing to extract, while cooling the demon
/// first recovers the full one-bit yield.
pub fn limit_order_demo() -> Result<LimitOrderDemo, AnalysisError> {
    let beta = 1.0;

    let well = WellSpec::default();
    let l = 0.5 * well.length();
    let mut order_a_trail = Vec::new();
    for bath_beta in [10.0, 100.0] {
        let mut works = [0.0; 3];
        for (slot, gap) in works.iter_mut().zip([1e-3, 1e-4, 1e-5]) {
            let demon = DemonSpec::thermal(gap, bath_beta).map_err(CycleError::from)?;
            let cfg = CycleConfig::new(well, beta, demon, l)?.with_expansion(l, l)?;
            *slot = run_cycle(&cfg)?.w_tot;
        }
        order_a_trail.push((bath_beta, richardson_even3(works, 10.0)));
    }
    let order_a = order_a_trail.last().expect("two stages").1;

    let wide = WellSpec::natural(100.0).map_err(CycleError::from)?;
    let l = 0.5 * wide.length();
    let mut order_b_trail = Vec::new();
    for gap in [1e-2, 1e-4, 1e-6] {
        let demon = DemonSpec::thermal(gap, f64::INFINITY).map_err(CycleError::from)?;
        let cfg = CycleConfig::new(wide, beta, demon, l)?;
        order_b_trail.push((gap, run_cycle(&cfg)?.w_tot));
    }
    let order_b = order_b_trail.last().expect("three stages").1;

    Ok(LimitOrderDemo {
        order_a,
        order_b,
        order_a_trail,
        order_b_trail,
    })
}
