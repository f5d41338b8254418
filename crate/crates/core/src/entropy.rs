//! Position and momentum Shannon entropies of the power-law packet and the
//! entropic uncertainty sum `U = S_x + S_p ≥ 1 + ln π`.
//!
//! Two independent routes exist for each entropy. The closed routes use
//! `ln Γ`, `ψ` and the single auxiliary integral `I(α)`; the numeric routes
//! integrate `−ρ ln ρ` directly from the log-densities of [`PowerLawPacket`].

use std::cell::Cell;
use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::packet::{PacketError, PowerLawPacket};
use crate::quadrature::{integrate_half_line, integrate_real_line_even, IntegrationResult, QuadratureConfig, QuadratureError};
use crate::specfun::{bessel_k_ln, digamma, ln_gamma, LN_SQRT_PI};

/// Slack below the bound tolerated before a report is rejected.
pub const BOUND_SLACK: f64 = 1e-7;

/// Tolerance multiplier for packets flagged [`PowerLawPacket::near_edge`].
pub const NEAR_EDGE_RELAXATION: f64 = 100.0;

// exp(-745) is below the smallest subnormal double
const LN_UNDERFLOW: f64 = -745.0;

/// `1 + ln π`.
pub fn entropic_bound() -> f64 {
    1.0 + PI.ln()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{quantity} did not converge (value {}, error estimate {})", .result.value, .result.error_estimate)]
    NotConverged { quantity: &'static str, result: IntegrationResult },
    #[error("S_x + S_p falls below 1 + ln pi by {} at alpha = {alpha}", -.gap)]
    BoundViolation { alpha: f64, gap: f64 },
    #[error("direct assembly of U ({direct}) disagrees with S_x + S_p ({sum})")]
    InconsistentAssembly { direct: f64, sum: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    NumericOracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub alpha: f64,
    pub s_x: f64,
    pub s_p: f64,
    pub u_total: f64,
    pub bound: f64,
    pub gap: f64,
    pub s_x_method: Method,
    pub s_p_method: Method,
    pub near_edge: bool,
}

impl EntropyReport {
    fn assemble(packet: &PowerLawPacket, s_x: f64, s_p: f64, methods: (Method, Method)) -> Result<Self, EntropyError> {
        let u_total = s_x + s_p;
        let bound = entropic_bound();
        let gap = u_total - bound;
        if !(gap >= -BOUND_SLACK) {
            return Err(EntropyError::BoundViolation { alpha: packet.alpha(), gap });
        }
        Ok(Self {
            alpha: packet.alpha(),
            s_x,
            s_p,
            u_total,
            bound,
            gap,
            s_x_method: methods.0,
            s_p_method: methods.1,
            near_edge: packet.near_edge(),
        })
    }
}

fn effective_config(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> QuadratureConfig {
    if packet.near_edge() {
        cfg.relaxed(NEAR_EDGE_RELAXATION)
    } else {
        *cfg
    }
}

fn converged(quantity: &'static str, r: IntegrationResult) -> Result<f64, EntropyError> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(EntropyError::NotConverged { quantity, result: r })
    }
}

/// `−ρ ln ρ` from `ln ρ`, with `0 · ln 0 = 0` once `ρ` underflows.
fn neg_entropy_density(ln_rho: f64) -> f64 {
    if ln_rho < LN_UNDERFLOW {
        0.0
    } else {
        -ln_rho * ln_rho.exp()
    }
}

// ln Γ at arguments that are positive for every valid packet
fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("gamma arguments are positive for alpha > 1/2")
}

fn psi(x: f64) -> f64 {
    digamma(x).expect("digamma arguments are positive for alpha > 1/2")
}

/// `S_x = ln(√π Γ(α−½)/Γ(α)) + α[ψ(α) − ψ(α−½)]`.
pub fn s_x_closed(packet: &PowerLawPacket) -> f64 {
    let a = packet.alpha();
    LN_SQRT_PI + lg(a - 0.5) - lg(a) + a * (psi(a) - psi(a - 0.5))
}

/// `S_x = −∫ ρ ln ρ dx` by whole-line quadrature of the position density.
pub fn s_x_numeric(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> Result<f64, EntropyError> {
    let cfg = effective_config(packet, cfg);
    let r = integrate_real_line_even(|x| neg_entropy_density(packet.density_x_ln(x)), &cfg)?;
    converged("position entropy", r)
}

/// Runs `f` inside a quadrature, turning the first error it reports into
/// an aborted integration and returning that error afterwards.
fn integrate_fallible<F>(
    quantity: &'static str,
    cfg: &QuadratureConfig,
    f: F,
) -> Result<IntegrationResult, EntropyError>
where
    F: Fn(f64) -> Result<f64, EntropyError>,
{
    let failure: Cell<Option<EntropyError>> = Cell::new(None);
    let result = integrate_half_line(
        |p| match f(p) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        },
        cfg,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let r = result?;
    converged(quantity, r)?;
    Ok(r)
}

/// `I(α) = ∫₀^∞ g ln g dp` with `g(p) = p^{α−1} K_{(α−1)/2}(p)²`.
///
/// `ln g` is assembled from `ln K`, so the integrand stays exact where `g`
/// itself would overflow (small `p`, large α) or underflow (large `p`).
pub fn i_alpha(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> Result<f64, EntropyError> {
    let cfg = effective_config(packet, cfg);
    let nu = packet.bessel_order();
    let a = packet.alpha();
    let r = integrate_fallible("I(alpha)", &cfg, |p| {
        let ln_g = (a - 1.0) * p.ln() + 2.0 * bessel_k_ln(nu, p).map_err(PacketError::from)?;
        Ok(-neg_entropy_density(ln_g))
    })?;
    Ok(r.value)
}

/// The two α-dependent constants of the semi-closed momentum entropy:
/// `S_p = offset − weight · I(α)`.
fn momentum_entropy_coefficients(packet: &PowerLawPacket) -> (f64, f64) {
    let a = packet.alpha();
    // ln[Γ(α/2)² Γ(α−½) / Γ(α)]
    let ln_ratio = 2.0 * lg(0.5 * a) + lg(a - 0.5) - lg(a);
    let offset = (a - 2.0) * LN_2 + LN_SQRT_PI + ln_ratio;
    let weight = ((3.0 - a) * LN_2 - LN_SQRT_PI - ln_ratio).exp();
    (offset, weight)
}

/// `S_p = ln[2^{α−2} √π Γ(α/2)² Γ(α−½)/Γ(α)] − (2^{3−α}/√π) Γ(α)/(Γ(α/2)² Γ(α−½)) · I(α)`.
pub fn s_p_semi_closed(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> Result<f64, EntropyError> {
    let i = i_alpha(packet, cfg)?;
    Ok(s_p_from_i_alpha(packet, i))
}

fn s_p_from_i_alpha(packet: &PowerLawPacket, i: f64) -> f64 {
    let (offset, weight) = momentum_entropy_coefficients(packet);
    offset - weight * i
}

/// `S_p = −2 ∫₀^∞ ρ̃ ln ρ̃ dp` from the momentum log-density.
pub fn s_p_numeric(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> Result<f64, EntropyError> {
    let cfg = effective_config(packet, cfg);
    let r = integrate_fallible("momentum entropy", &cfg, |p| Ok(neg_entropy_density(packet.density_p_ln(p)?)))?;
    Ok(2.0 * r.value)
}

/// `U` assembled term by term in its fully expanded form:
/// `ln π + (α−2) ln 2 − 2 ln[Γ(α)/(Γ(α/2)Γ(α−½))] + α[ψ(α) − ψ(α−½)] − w·I(α)`.
pub fn u_total_expanded(packet: &PowerLawPacket, i: f64) -> f64 {
    let a = packet.alpha();
    let weight = 2f64.powf(3.0 - a) / PI.sqrt() * (lg(a) - 2.0 * lg(0.5 * a) - lg(a - 0.5)).exp();
    PI.ln() + (a - 2.0) * LN_2 - 2.0 * (lg(a) - lg(0.5 * a) - lg(a - 0.5)) + a * (psi(a) - psi(a - 0.5)) - weight * i
}

/// Entropies from the closed and semi-closed forms, with the expanded form
/// of `U` checked against `S_x + S_p`.
pub fn total_uncertainty(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> Result<EntropyReport, EntropyError> {
    let i = i_alpha(packet, cfg)?;
    let s_x = s_x_closed(packet);
    let s_p = s_p_from_i_alpha(packet, i);
    let direct = u_total_expanded(packet, i);
    let sum = s_x + s_p;
    if !((direct - sum).abs() <= 1e-10 * sum.abs().max(1.0)) {
        return Err(EntropyError::InconsistentAssembly { direct, sum });
    }
    EntropyReport::assemble(packet, s_x, s_p, (Method::ClosedForm, Method::ClosedForm))
}

/// Entropies by direct quadrature of both definitions.
pub fn total_uncertainty_numeric(packet: &PowerLawPacket, cfg: &QuadratureConfig) -> Result<EntropyReport, EntropyError> {
    let s_x = s_x_numeric(packet, cfg)?;
    let s_p = s_p_numeric(packet, cfg)?;
    EntropyReport::assemble(packet, s_x, s_p, (Method::NumericOracle, Method::NumericOracle))
}
