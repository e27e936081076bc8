//! The four strokes of the engine — barrier insertion, demon measurement,
//! conditional expansion, barrier removal — tracked through an explicit block
//! decomposition of the joint particle–demon state.
//!
//! A *block* is a classically weighted sector: the particle in canonical
//! equilibrium inside a box of some width, paired with a definite demon
//! level. The strokes only ever split blocks, relabel their demon level, or
//! slide their walls, so four blocks suffice for the whole cycle. State
//! functions are sums over blocks,
//!
//! ```text
//! U = sum_b w_b U_box(y_b)  +  Delta * sum_{excited b} w_b
//! S = sum_b w_b (-ln w_b)   +  sum_b w_b S_box(y_b)
//! F = U - T S
//! ```
//!
//! and every stroke is quasi-static at the engine temperature, so the work
//! done *on* the system is the free-energy increment `W = dF` and the heat
//! surrendered to the bath is `Q = -T dS`. The first law `W - Q = dU` then
//! holds identically, and the cycle totals collapse to closed forms in
//! `(P_L, p_g, p_e, Delta)` alone — which the test suite exploits as an
//! independent cross-check on the ledger arithmetic.
//!
//! Sign conventions: per-step `W` and `Q` are work done by the external
//! agent and heat given up to the bath; the cycle totals `W_tot = -sum W`
//! and `Q_tot = -sum Q` flip both, so positive `W_tot` means the engine
//! delivered net work and positive `Q_tot` means it drew net heat from the
//! bath.

use thiserror::Error;

use crate::demon::{DemonError, DemonLevel, DemonSpec};
use crate::spectrum::{
    self, box_thermo_unbounded, joint_split_log_z, SpectrumError, ThermoPoint, WellSpec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CycleError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Demon(#[from] DemonError),
    #[error("insertion position {position} outside [0, {length}]")]
    InvalidInsertion { position: f64, length: f64 },
    #[error("expansion endpoint `{name}` = {value} outside [0, {length}]")]
    InvalidEndpoint {
        name: &'static str,
        value: f64,
        length: f64,
    },
    #[error("block with weight {weight:.6e} crushed to zero width on the {level:?} branch")]
    CrushedBlock { level: DemonLevel, weight: f64 },
    #[error("stroke applied out of order: {0}")]
    WrongPhase(&'static str),
}

/// Which side of the barrier a block's box occupies, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// No barrier present: the box spans the full well.
    Whole,
    Left,
    Right,
}

/// One classically weighted sector of the joint state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    /// Statistical weight; zero-weight blocks are dropped at assembly.
    pub weight: f64,
    /// Width of this block's box.
    pub width: f64,
    /// Demon level tied to this block.
    pub level: DemonLevel,
    /// Geometric tag used by the measurement and expansion strokes.
    pub region: Region,
}

/// A full joint state: blocks plus the extensive quantities derived from
/// them at the engine temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct StateLedger {
    blocks: Vec<Block>,
    energy: f64,
    entropy: f64,
    free_energy: f64,
}

impl StateLedger {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn free_energy(&self) -> f64 {
        self.free_energy
    }

    /// Total weight per demon level, in `(ground, excited)` order.
    pub fn demon_marginal(&self) -> (f64, f64) {
        let mut w_g = 0.0;
        let mut w_e = 0.0;
        for b in &self.blocks {
            match b.level {
                DemonLevel::Ground => w_g += b.weight,
                DemonLevel::Excited => w_e += b.weight,
            }
        }
        (w_g, w_e)
    }
}

/// Names of the four strokes, in cycle order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepName {
    Insertion,
    Measurement,
    Expansion,
    Removal,
}

impl StepName {
    pub fn label(self) -> &'static str {
        match self {
            StepName::Insertion => "insertion",
            StepName::Measurement => "measurement",
            StepName::Expansion => "expansion",
            StepName::Removal => "removal",
        }
    }
}

/// Work, heat, and state increments of one stroke. `work` is done by the
/// external agent on the system, `heat` is surrendered to the engine bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub name: StepName,
    pub work: f64,
    pub heat: f64,
    pub d_energy: f64,
    pub d_entropy: f64,
}

/// Everything needed to run one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleConfig {
    well: WellSpec,
    bath: ThermoPoint,
    demon: DemonSpec,
    insertion: f64,
    expand_ground: f64,
    expand_excited: f64,
    tol: f64,
}

impl CycleConfig {
    /// Expansion endpoints default to full expansion (`l_g = L`, `l_e = 0`),
    /// which is only admissible for a perfectly correlated demon; see
    /// [`CycleConfig::with_expansion`].
    pub fn new(
        well: WellSpec,
        beta: f64,
        demon: DemonSpec,
        insertion: f64,
    ) -> Result<Self, CycleError> {
        let bath = ThermoPoint::new(beta)?;
        let length = well.length();
        if !insertion.is_finite() || insertion < 0.0 || insertion > length {
            return Err(CycleError::InvalidInsertion {
                position: insertion,
                length,
            });
        }
        Ok(Self {
            well,
            bath,
            demon,
            insertion,
            expand_ground: length,
            expand_excited: 0.0,
            tol: spectrum::DEFAULT_TOL,
        })
    }

    /// Final wall positions `l_g` (ground record) and `l_e` (excited
    /// record) for the conditional expansion.
    pub fn with_expansion(mut self, l_g: f64, l_e: f64) -> Result<Self, CycleError> {
        let length = self.well.length();
        for (name, value) in [("l_g", l_g), ("l_e", l_e)] {
            if !value.is_finite() || value < 0.0 || value > length {
                return Err(CycleError::InvalidEndpoint {
                    name,
                    value,
                    length,
                });
            }
        }
        self.expand_ground = l_g;
        self.expand_excited = l_e;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self, CycleError> {
        if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
            return Err(CycleError::Spectrum(SpectrumError::InvalidTolerance(tol)));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn well(&self) -> &WellSpec {
        &self.well
    }

    pub fn beta(&self) -> f64 {
        self.bath.beta()
    }

    pub fn temperature(&self) -> f64 {
        self.bath.temperature()
    }

    pub fn demon(&self) -> &DemonSpec {
        &self.demon
    }

    pub fn insertion(&self) -> f64 {
        self.insertion
    }

    pub fn expansion(&self) -> (f64, f64) {
        (self.expand_ground, self.expand_excited)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Builds a state from raw blocks: drops zero-weight blocks, rejects
    /// finite-weight blocks of zero width, and evaluates the ledger sums.
    fn assemble(&self, raw: Vec<Block>) -> Result<StateLedger, CycleError> {
        let mut blocks = Vec::with_capacity(raw.len());
        for b in raw {
            if b.weight == 0.0 {
                continue;
            }
            if b.width == 0.0 {
                return Err(CycleError::CrushedBlock {
                    level: b.level,
                    weight: b.weight,
                });
            }
            blocks.push(b);
        }
        let t = self.bath.temperature();
        let gap = self.demon.gap();
        let mut energy = 0.0;
        let mut entropy = 0.0;
        for b in &blocks {
            let (_, u_box, s_box) =
                box_thermo_unbounded(&self.well, self.bath.beta(), b.width, self.tol)?;
            energy += b.weight * u_box;
            if b.level == DemonLevel::Excited {
                energy += b.weight * gap;
            }
            entropy += b.weight * (-(b.weight.ln()) + s_box);
        }
        Ok(StateLedger {
            blocks,
            energy,
            entropy,
            free_energy: energy - t * entropy,
        })
    }

    fn record(&self, name: StepName, prev: &StateLedger, next: &StateLedger) -> StepRecord {
        let t = self.bath.temperature();
        let d_energy = next.energy - prev.energy;
        let d_entropy = next.entropy - prev.entropy;
        let heat = if d_entropy == 0.0 { 0.0 } else { -t * d_entropy };
        StepRecord {
            name,
            work: d_energy + heat,
            heat,
            d_energy,
            d_entropy,
        }
    }
}

/// The joint state before the cycle starts: particle thermal in the full
/// well, demon populations as the engine sees them (eigen-populations when
/// the register is coherent).
pub fn initial_state(cfg: &CycleConfig) -> Result<StateLedger, CycleError> {
    let (p_g, p_e) = cfg.demon.operating_populations();
    let length = cfg.well.length();
    cfg.assemble(vec![
        Block {
            weight: p_g,
            width: length,
            level: DemonLevel::Ground,
            region: Region::Whole,
        },
        Block {
            weight: p_e,
            width: length,
            level: DemonLevel::Excited,
            region: Region::Whole,
        },
    ])
}

/// Stroke 1: insert the barrier at `l`. Each block splits into a left box of
/// width `l` and a right box of width `L - l`, weighted by the occupation
/// probabilities of the two compartments.
pub fn step_insertion(
    cfg: &CycleConfig,
    prev: &StateLedger,
) -> Result<(StateLedger, StepRecord), CycleError> {
    if prev.blocks.iter().any(|b| b.region != Region::Whole) {
        return Err(CycleError::WrongPhase("insertion expects an unsplit state"));
    }
    let length = cfg.well.length();
    let split = joint_split_log_z(&cfg.well, &cfg.bath, cfg.insertion, cfg.tol)?;
    let mut raw = Vec::with_capacity(prev.blocks.len() * 2);
    for b in &prev.blocks {
        raw.push(Block {
            weight: b.weight * split.p_left,
            width: cfg.insertion,
            level: b.level,
            region: Region::Left,
        });
        raw.push(Block {
            weight: b.weight * split.p_right,
            width: length - cfg.insertion,
            level: b.level,
            region: Region::Right,
        });
    }
    let next = cfg.assemble(raw)?;
    let rec = cfg.record(StepName::Insertion, prev, &next);
    Ok((next, rec))
}

/// Stroke 2: the CNOT measurement. Right-side blocks have their demon level
/// flipped; weights and widths are untouched, so `dS = 0` identically and
/// the work equals the change in register energy,
/// `W = P_R (p_g - p_e) Delta`.
pub fn step_measurement(
    cfg: &CycleConfig,
    prev: &StateLedger,
) -> Result<(StateLedger, StepRecord), CycleError> {
    if prev.blocks.iter().any(|b| b.region == Region::Whole) {
        return Err(CycleError::WrongPhase("measurement expects a split state"));
    }
    let raw = prev
        .blocks
        .iter()
        .map(|b| Block {
            level: match (b.region, b.level) {
                (Region::Right, DemonLevel::Ground) => DemonLevel::Excited,
                (Region::Right, DemonLevel::Excited) => DemonLevel::Ground,
                (_, level) => level,
            },
            ..*b
        })
        .collect();
    let next = cfg.assemble(raw)?;
    let rec = cfg.record(StepName::Measurement, prev, &next);
    Ok((next, rec))
}

/// Stroke 3: quasi-static conditional expansion. Every wall moves to the
/// final position selected by its block's demon record: blocks on the left
/// of a level-`d` wall end at width `l_d`, blocks on the right at
/// `L - l_d`. A finite-weight block driven to zero width is an error — that
/// geometry costs unbounded compression work and signals an inconsistent
/// endpoint choice (full expansion with an imperfect demon).
pub fn step_expansion(
    cfg: &CycleConfig,
    prev: &StateLedger,
) -> Result<(StateLedger, StepRecord), CycleError> {
    if prev.blocks.iter().any(|b| b.region == Region::Whole) {
        return Err(CycleError::WrongPhase("expansion expects a split state"));
    }
    let length = cfg.well.length();
    let raw = prev
        .blocks
        .iter()
        .map(|b| {
            let wall = match b.level {
                DemonLevel::Ground => cfg.expand_ground,
                DemonLevel::Excited => cfg.expand_excited,
            };
            Block {
                width: match b.region {
                    Region::Left => wall,
                    Region::Right => length - wall,
                    Region::Whole => unreachable!("checked above"),
                },
                ..*b
            }
        })
        .collect();
    let next = cfg.assemble(raw)?;
    let rec = cfg.record(StepName::Expansion, prev, &next);
    Ok((next, rec))
}

/// Stroke 4: remove the barrier and let the particle re-equilibrate over the
/// full well. The demon keeps only its level marginal; the particle-record
/// correlations built up by the measurement are discarded here, which is
/// what makes this stroke irreversible in general.
pub fn step_removal(
    cfg: &CycleConfig,
    prev: &StateLedger,
) -> Result<(StateLedger, StepRecord), CycleError> {
    let (w_g, w_e) = prev.demon_marginal();
    let length = cfg.well.length();
    let next = cfg.assemble(vec![
        Block {
            weight: w_g,
            width: length,
            level: DemonLevel::Ground,
            region: Region::Whole,
        },
        Block {
            weight: w_e,
            width: length,
            level: DemonLevel::Excited,
            region: Region::Whole,
        },
    ])?;
    let rec = cfg.record(StepName::Removal, prev, &next);
    Ok((next, rec))
}

/// Outcome of one full cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub steps: [StepRecord; 4],
    /// Net work delivered by the engine, `-sum W`.
    pub w_tot: f64,
    /// Net heat drawn from the engine bath, `-sum Q`.
    pub q_tot: f64,
    /// `1 - W_mea / Q_tot` when the cycle delivers positive work, else 0.
    pub eta: f64,
    /// Carnot bound `1 - T_D / T`, using the effective demon temperature
    /// when the register is coherent.
    pub eta_carnot: f64,
    /// Positive-work condition: `W_tot > 0`.
    pub pwc_satisfied: bool,
    /// Left-compartment occupation at the insertion point.
    pub p_left: f64,
    pub p_right: f64,
    /// Populations the engine worked with, `(p_g, p_e)`.
    pub populations: (f64, f64),
    /// Demon level weights after removal, `(w_g, w_e)`.
    pub demon_marginal: (f64, f64),
    /// Shannon entropy of that marginal — the record that must be erased
    /// before the next cycle; erasing it costs at least `T_D` times this.
    pub erasure_entropy: f64,
}

/// Runs the four strokes in order and assembles the totals.
pub fn run_cycle(cfg: &CycleConfig) -> Result<CycleResult, CycleError> {
    let start = initial_state(cfg)?;
    let (split_state, ins) = step_insertion(cfg, &start)?;
    let (measured, mea) = step_measurement(cfg, &split_state)?;
    let (expanded, exp) = step_expansion(cfg, &measured)?;
    let (closed, rev) = step_removal(cfg, &expanded)?;

    let steps = [ins, mea, exp, rev];
    let w_tot = -steps.iter().map(|s| s.work).sum::<f64>();
    let q_tot = -steps.iter().map(|s| s.heat).sum::<f64>();
    let pwc_satisfied = w_tot > 0.0;
    let eta = if pwc_satisfied && q_tot > 0.0 {
        1.0 - mea.work / q_tot
    } else {
        0.0
    };

    let demon = cfg.demon();
    let t_demon = if demon.coherence() == 0.0 {
        if demon.bath_beta().is_infinite() {
            0.0
        } else {
            demon.bath_beta().recip()
        }
    } else if demon.gap() == 0.0 {
        // Degenerate coherent register: beta_eff diverges as the gap closes,
        // so the effective demon temperature is zero.
        0.0
    } else {
        demon.effective_beta()?.recip()
    };
    let eta_carnot = 1.0 - t_demon / cfg.temperature();

    let split = joint_split_log_z(&cfg.well, &cfg.bath, cfg.insertion, cfg.tol)?;
    let demon_marginal = closed.demon_marginal();
    let erasure_entropy = binary_entropy(demon_marginal.0, demon_marginal.1);

    Ok(CycleResult {
        steps,
        w_tot,
        q_tot,
        eta,
        eta_carnot,
        pwc_satisfied,
        p_left: split.p_left,
        p_right: split.p_right,
        populations: demon.operating_populations(),
        demon_marginal,
        erasure_entropy,
    })
}

/// `-x ln x - y ln y` with the `0 ln 0 = 0` convention.
pub fn binary_entropy(x: f64, y: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(x) + term(y)
}
