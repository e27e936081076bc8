//! Simulator of a single-molecule Szilard engine run by a finite-temperature
//! two-level demon.
//!
//! One cycle of the engine inserts a barrier into a one-dimensional box
//! holding a single thermal particle, lets a demon register which side the
//! particle is on through a CNOT coupling, extracts work by a quasi-static
//! expansion conditioned on the demon's record, and finally removes the
//! barrier. Because the demon itself sits at a finite temperature its record
//! is imperfect, and the cycle only yields net positive work in part of
//! parameter space.
//!
//! * [`spectrum`] — infinite-well partition functions, mean energies, and
//!   left/right occupation probabilities, valid from the frozen quantum
//!   regime to the classical limit.
//! * [`demon`] — the two-level register: thermal occupation, residual
//!   coherence, and the effective temperature it presents to the engine.
//! * [`cycle`] — the four strokes tracked through an explicit block
//!   decomposition of the joint state, with per-step work/heat/entropy
//!   records and cycle totals.
//! * [`analysis`] — positive-work thresholds, the maximum-work insertion
//!   point, half-split closed forms, and the non-commuting classical limits
//!   of the demon parameters.
//! * [`sweep`] — deterministic Cartesian parameter sweeps over full cycles,
//!   data-parallel when the `parallel` feature (default) is enabled.
//!
//! Units are natural throughout: `hbar = k_B = 1`, and the default well mass
//! `m = pi^2 / 2` makes the box spectrum `E_n = n^2 / y^2` for a width-`y`
//! box.

pub mod analysis;
pub mod cycle;
pub mod demon;
pub mod spectrum;
pub mod sweep;

pub use analysis::{AnalysisError, SolveReport, SolveTarget};
pub use cycle::{
    run_cycle, Block, CycleConfig, CycleError, CycleResult, StateLedger, StepName, StepRecord,
};
pub use demon::{DemonError, DemonLevel, DemonSpec};
pub use spectrum::{BoxThermo, SpectrumError, SplitProbabilities, ThermoPoint, WellSpec};
pub use sweep::{
    run_sweep, run_sweep_sequential, PointParams, ResolvedPoint, Spacing, SweepAxis,
    SweepError, SweepOutcome, SweepParam,
};
