//! The power-law wave packet `φ(x) = N (1 + x²)^{−α/2}` and its momentum
//! representation `φ̃(p) ∝ |p|^{(α−1)/2} K_{(α−1)/2}(|p|)`.
//!
//! Units are ħ = m = 1, so `x` and `p` are dimensionless.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{bessel_k_ln, ln_gamma, SpecFunError, LN_SQRT_PI};

/// Below this exponent the heavy tails make quadrature slow and the
/// packet carries a warning flag.
pub const NEAR_EDGE_ALPHA: f64 = 0.55;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PacketError {
    #[error("alpha must exceed 1/2 for a normalizable packet, got {0}")]
    NotNormalizable(f64),
    #[error("momentum amplitude diverges at p = 0 for alpha = {0} <= 1")]
    SingularAtZero(f64),
    #[error("momentum log-density is undefined at p = 0")]
    ZeroMomentum,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// A second moment that is either finite or divergent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum MomentValue {
    Finite(f64),
    Divergent,
}

impl MomentValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            MomentValue::Finite(v) => Some(v),
            MomentValue::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, MomentValue::Divergent)
    }
}

/// Validated exponent with cached normalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawPacket {
    alpha: f64,
    norm_sq: f64,
    ln_norm_sq: f64,
    // ln of 2^{1−α/2} N / Γ(α/2), the prefactor of the momentum amplitude
    ln_momentum_prefactor: f64,
}

impl PowerLawPacket {
    pub fn new(alpha: f64) -> Result<Self, PacketError> {
        if !(alpha > 0.5) || !alpha.is_finite() {
            return Err(PacketError::NotNormalizable(alpha));
        }
        let ln_norm_sq = ln_gamma(alpha)? - LN_SQRT_PI - ln_gamma(alpha - 0.5)?;
        let ln_momentum_prefactor = (1.0 - 0.5 * alpha) * LN_2 + 0.5 * ln_norm_sq - ln_gamma(0.5 * alpha)?;
        Ok(Self {
            alpha,
            norm_sq: ln_norm_sq.exp(),
            ln_norm_sq,
            ln_momentum_prefactor,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `N² = Γ(α) / (√π Γ(α − 1/2))`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn ln_norm_sq(&self) -> f64 {
        self.ln_norm_sq
    }

    /// Set when `α < 0.55`; numerics this close to the normalizability edge
    /// run with relaxed tolerances.
    pub fn near_edge(&self) -> bool {
        self.alpha < NEAR_EDGE_ALPHA
    }

    /// Order `(α − 1)/2` of the Bessel function in the momentum amplitude.
    pub fn bessel_order(&self) -> f64 {
        0.5 * (self.alpha - 1.0)
    }

    pub fn amplitude_x(&self, x: f64) -> f64 {
        self.norm_sq.sqrt() * (1.0 + x * x).powf(-0.5 * self.alpha)
    }

    /// `ln |φ(x)|² = ln N² − α ln(1 + x²)`.
    pub fn density_x_ln(&self, x: f64) -> f64 {
        // ln(1+x²) without overflowing x² for |x| up to ~1e300
        let ax = x.abs();
        let ln_1p_x2 = if ax > 1e8 { 2.0 * ax.ln() + (1.0 / (ax * ax)).ln_1p() } else { (ax * ax).ln_1p() };
        self.ln_norm_sq - self.alpha * ln_1p_x2
    }

    /// Display-only position density.
    pub fn density_x(&self, x: f64) -> f64 {
        self.density_x_ln(x).exp()
    }

    /// Momentum amplitude. At `p = 0` this is the finite limit for `α > 1`
    /// and an error otherwise.
    pub fn amplitude_p(&self, p: f64) -> Result<f64, PacketError> {
        if p == 0.0 {
            if self.alpha <= 1.0 {
                return Err(PacketError::SingularAtZero(self.alpha));
            }
            // p^ν K_ν(p) → Γ(ν) 2^{ν−1} as p → 0
            let ln_limit = 0.5 * self.ln_norm_sq + ln_gamma(self.bessel_order())? - 0.5 * LN_2 - ln_gamma(0.5 * self.alpha)?;
            return Ok(ln_limit.exp());
        }
        Ok((0.5 * self.density_p_ln(p)?).exp())
    }

    /// `ln |φ̃(p)|²`, exact in log form well past the point where the density
    /// underflows.
    pub fn density_p_ln(&self, p: f64) -> Result<f64, PacketError> {
        if p == 0.0 {
            return Err(PacketError::ZeroMomentum);
        }
        let ap = p.abs();
        let nu = self.bessel_order();
        Ok(2.0 * (self.ln_momentum_prefactor + nu * ap.ln() + bessel_k_ln(nu, ap)?))
    }

    /// Display-only momentum density.
    pub fn density_p(&self, p: f64) -> Result<f64, PacketError> {
        Ok(self.density_p_ln(p)?.exp())
    }

    /// The potential for which `φ` is a zero-energy eigenstate,
    /// `U(x) = [α(α+1)x² − α] / [2(1+x²)²]`.
    pub fn potential(&self, x: f64) -> f64 {
        let a = self.alpha;
        let q = 1.0 + x * x;
        (a * (a + 1.0) * x * x - a) / (2.0 * q * q)
    }

    /// `⟨X²⟩`, divergent for `α ≤ 3/2` and `1/(2α − 3)` above.
    pub fn position_second_moment(&self) -> MomentValue {
        if self.alpha <= 1.5 {
            MomentValue::Divergent
        } else {
            MomentValue::Finite(1.0 / (2.0 * self.alpha - 3.0))
        }
    }

    /// `⟨P²⟩ = ∫ |φ′|² dx = α(2α − 1) / (4(α + 1))`, finite for every valid α.
    pub fn momentum_second_moment(&self) -> f64 {
        let a = self.alpha;
        a * (2.0 * a - 1.0) / (4.0 * (a + 1.0))
    }

    /// `ΔX·ΔP`. Both means vanish by symmetry, so the variances are the
    /// second moments.
    pub fn heisenberg_product(&self) -> MomentValue {
        match self.position_second_moment() {
            MomentValue::Divergent => MomentValue::Divergent,
            MomentValue::Finite(x2) => MomentValue::Finite((x2 * self.momentum_second_moment()).sqrt()),
        }
    }

    pub fn variance_report(&self) -> VarianceReport {
        VarianceReport {
            alpha: self.alpha,
            position_second_moment: self.position_second_moment(),
            momentum_second_moment: self.momentum_second_moment(),
            heisenberg_product: self.heisenberg_product(),
        }
    }
}

/// Second moments and the Heisenberg product of one packet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub alpha: f64,
    pub position_second_moment: MomentValue,
    pub momentum_second_moment: f64,
    pub heisenberg_product: MomentValue,
}

/// Constructs a packet, rejecting `α ≤ 1/2`.
pub fn make_packet(alpha: f64) -> Result<PowerLawPacket, PacketError> {
    PowerLawPacket::new(alpha)
}
