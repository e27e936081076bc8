//! The demon's memory register: a two-level system with gap `Delta`,
//! thermalized by its own bath at inverse temperature `beta_D`, possibly
//! retaining a residual coherence of magnitude `F` between ground and excited
//! states.
//!
//! With coherence, the register state in the energy basis is
//!
//! ```text
//!         [ p_g   F  ]
//! rho  =  [          ]      p_g = 1 / (1 + exp(-beta_D Delta)),
//!         [ F*    p_e ]
//! ```
//!
//! whose eigenvalues `1/2 ∓ sqrt((p_g - p_e)^2 / 4 + |F|^2)` are the
//! populations the engine actually works with. The register therefore looks
//! thermal at an effective inverse temperature
//! `beta_eff = ln(p_minus / p_plus) / Delta`. Coherence purifies the
//! register, so `beta_eff >= beta_D`, with equality exactly at `F = 0`.
//!
//! `beta_D = +inf` is a representable, exact value (a demon pre-cooled to its
//! ground state), not a numerical limit.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DemonError {
    #[error("demon parameter `{name}` must be finite and non-negative, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("bath inverse temperature must be positive (or +inf), got {0}")]
    InvalidBathBeta(f64),
    #[error("coherence |F| = {coherence} violates positivity: |F|^2 > p_g p_e = {bound:.6e}")]
    PositivityViolation { coherence: f64, bound: f64 },
    #[error("effective temperature undefined: degenerate gap with |F| = {coherence} > 0")]
    DegenerateGap { coherence: f64 },
}

/// Which level of the register a block of the joint state is tied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemonLevel {
    Ground,
    Excited,
}

/// A validated demon register: gap, bath inverse temperature, and coherence
/// magnitude. Positivity (`|F|^2 <= p_g p_e`) is enforced at construction,
/// so every constructed spec describes a genuine density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemonSpec {
    gap: f64,
    bath_beta: f64,
    coherence: f64,
}

impl DemonSpec {
    pub fn new(gap: f64, bath_beta: f64, coherence: f64) -> Result<Self, DemonError> {
        if !gap.is_finite() || gap < 0.0 {
            return Err(DemonError::InvalidParameter {
                name: "gap",
                value: gap,
            });
        }
        if bath_beta.is_nan() || bath_beta <= 0.0 {
            return Err(DemonError::InvalidBathBeta(bath_beta));
        }
        if !coherence.is_finite() || coherence < 0.0 {
            return Err(DemonError::InvalidParameter {
                name: "coherence",
                value: coherence,
            });
        }
        let spec = Self {
            gap,
            bath_beta,
            coherence,
        };
        let (p_g, p_e) = spec.thermal_populations();
        if coherence * coherence > p_g * p_e {
            return Err(DemonError::PositivityViolation {
                coherence,
                bound: p_g * p_e,
            });
        }
        Ok(spec)
    }

    /// Incoherent register at the bath temperature.
    pub fn thermal(gap: f64, bath_beta: f64) -> Result<Self, DemonError> {
        Self::new(gap, bath_beta, 0.0)
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn bath_beta(&self) -> f64 {
        self.bath_beta
    }

    pub fn coherence(&self) -> f64 {
        self.coherence
    }

    /// Diagonal occupation at the bath temperature:
    /// `p_g = 1 / (1 + exp(-beta_D Delta))`, `p_e = 1 - p_g` (exact
    /// complement in floating point). A degenerate gap gives `(1/2, 1/2)`
    /// regardless of `beta_D`; an infinitely cold bath with `Delta > 0`
    /// gives `(1, 0)` exactly.
    pub fn thermal_populations(&self) -> (f64, f64) {
        if self.gap == 0.0 {
            return (0.5, 0.5);
        }
        if self.bath_beta.is_infinite() {
            return (1.0, 0.0);
        }
        let p_g = 1.0 / (1.0 + (-self.bath_beta * self.gap).exp());
        (p_g, 1.0 - p_g)
    }

    /// Exact eigenvalues of the register state,
    /// `p_± = 1/2 ∓ sqrt((p_g - p_e)^2 / 4 + |F|^2)`,
    /// returned as `(p_plus, p_minus)`. The larger eigenvalue `p_minus`
    /// belongs to the eigenvector that connects continuously to the ground
    /// state as `F -> 0`, so at `F = 0` this is exactly `(p_e, p_g)`.
    pub fn eigen_populations(&self) -> (f64, f64) {
        let (p_g, p_e) = self.thermal_populations();
        let half_gap = 0.5 * (p_g - p_e);
        let r = (half_gap * half_gap + self.coherence * self.coherence).sqrt();
        (0.5 - r, 0.5 + r)
    }

    /// The populations the engine works with, ordered as `(p_g, p_e)`:
    /// thermal occupation for an incoherent register, eigen-populations
    /// (`p_minus` on the ground branch) otherwise.
    pub fn operating_populations(&self) -> (f64, f64) {
        if self.coherence == 0.0 {
            self.thermal_populations()
        } else {
            let (p_plus, p_minus) = self.eigen_populations();
            (p_minus, p_plus)
        }
    }

    /// Inverse temperature at which a thermal register would have the same
    /// eigen-populations: `beta_eff = ln(p_minus / p_plus) / Delta`. Exactly
    /// `beta_D` at `F = 0`; strictly larger otherwise. Undefined for a
    /// coherent register with zero gap.
    pub fn effective_beta(&self) -> Result<f64, DemonError> {
        if self.coherence == 0.0 {
            return Ok(self.bath_beta);
        }
        if self.gap == 0.0 {
            return Err(DemonError::DegenerateGap {
                coherence: self.coherence,
            });
        }
        let (p_plus, p_minus) = self.eigen_populations();
        Ok((p_minus / p_plus).ln() / self.gap)
    }
}
