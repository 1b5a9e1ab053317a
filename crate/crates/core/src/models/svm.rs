//! Stochastic-volatility coefficients: the general `(m,n) = (1,2)` family
//! for models `dZ = -v/2 dt + √v dB`, `dX = b dt + c dW`, `v = v(X)`,
//! with time-decaying leverage `ρ_t = ρ t^{α_ρ}`.
//!
//! Writing `f = √v` and `g = f'c`, the cumulant coefficients are
//!
//! ```text
//! κ₃ = ρ g(X₀) / (2 f(X₀))
//! κ₄ = (ρ_θ²/6)(g'c/f)(X₀) + ((1+2ρ_θ²)/6)(g²/f²)(X₀)
//! ```
//!
//! with `β₁ = 1/2 + α_ρ`, `β₂ = 1`. Since `n = 2`, the kurtosis term drops
//! out of the ATM skew, which becomes `κ₃ θ^{α_ρ}` at leading order.

use super::ModelError;
use crate::edgeworth::CumulantData;

/// Heston variance dynamics `dv = κ(v̄ - v)dt + η√v dW` with leverage
/// `ρ_t = ρ t^{α_ρ}` between price and variance shocks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HestonDLParams {
    /// Mean-reversion speed per year.
    pub kappa: f64,
    /// Long-run variance.
    pub vbar: f64,
    /// Volatility of volatility.
    pub eta: f64,
    /// Spot leverage level, in [-1, 1].
    pub rho: f64,
    /// Initial variance.
    pub v0: f64,
    /// Leverage decay exponent, 0 for constant correlation.
    pub alpha_rho: f64,
}

impl HestonDLParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.kappa > 0.0 && self.vbar > 0.0 && self.eta >= 0.0 && self.v0 > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "kappa, vbar, v0 must be positive and eta non-negative: {self:?}"
            )));
        }
        if !(self.rho >= -1.0 && self.rho <= 1.0) {
            return Err(ModelError::InvalidParams(format!(
                "rho must be in [-1, 1], got {}",
                self.rho
            )));
        }
        if !(self.alpha_rho >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "alpha_rho must be non-negative, got {}",
                self.alpha_rho
            )));
        }
        Ok(())
    }

    /// Feller ratio `2κv̄/η²` (recorded, not enforced).
    pub fn feller_ratio(&self) -> f64 {
        2.0 * self.kappa * self.vbar / (self.eta * self.eta)
    }

    /// `ρ_t = ρ t^{α_ρ}` (equal to ρ everywhere when `α_ρ = 0`).
    pub fn rho_at(&self, t: f64) -> f64 {
        self.rho * t.powf(self.alpha_rho)
    }
}

/// 3/2 variance dynamics `dv = v(p - qv)dt + ε v^{3/2} dW` with constant
/// leverage ρ; only the short-maturity cumulant coefficients are used.
///
/// The κ₄ printed in the source catalog, `(1+3ρ²)ε²v₀²/6`, disagrees with
/// the specialization of the general SVM formula above, which gives
/// `(1+4ρ²)ε²v₀/24` (via `g = εv/2`, `g'c = ε²v^{3/2}/2·...`). The catalog
/// value is implemented verbatim; the discrepancy is deliberately left
/// visible rather than silently resolved.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThreeHalvesParams {
    /// Volatility-of-volatility scale ε.
    pub eps: f64,
    /// Leverage, in [-1, 1].
    pub rho: f64,
    /// Initial variance.
    pub v0: f64,
}

impl ThreeHalvesParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.eps > 0.0 && self.v0 > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "eps and v0 must be positive: {self:?}"
            )));
        }
        if !(self.rho >= -1.0 && self.rho <= 1.0) {
            return Err(ModelError::InvalidParams(format!(
                "rho must be in [-1, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// General SVM cumulant coefficients from the model functions evaluated at
/// the initial state: `f0 = f(X₀)`, `g0 = g(X₀)`, `gprime_c0 = (g'c)(X₀)`.
///
/// `kappa2` fixes the volatility normalization `σ₀ = κ₂√θ` of the emitted
/// cumulant data (callers supply `σ̃₀(θ)/√θ` when they have it exactly).
#[allow(clippy::too_many_arguments)]
pub fn svm_coeffs(
    f0: f64,
    g0: f64,
    gprime_c0: f64,
    rho: f64,
    alpha_rho: f64,
    theta: f64,
    kappa2: f64,
) -> Result<CumulantData, ModelError> {
    if !(f0 > 0.0) {
        return Err(ModelError::InvalidParams(format!(
            "f(X0) must be positive, got {f0}"
        )));
    }
    let rho_theta = rho * theta.powf(alpha_rho);
    let kappa3 = rho * g0 / (2.0 * f0);
    let kappa4 = rho_theta * rho_theta / 6.0 * gprime_c0 / f0
        + (1.0 + 2.0 * rho_theta * rho_theta) / 6.0 * (g0 * g0) / (f0 * f0);
    Ok(CumulantData::new(
        theta,
        kappa2,
        kappa3,
        kappa4,
        0.5,
        0.5 + alpha_rho,
        1.0,
        1.0,
        2.0,
    )?)
}

/// `σ₀(θ) = √(∫₀^θ E[v_t] dt)` for Heston:
/// `∫₀^θ E[v_t] dt = v̄θ + (v₀ - v̄)(1 - e^{-κθ})/κ`.
pub fn heston_sigma0(p: &HestonDLParams, theta: f64) -> f64 {
    let integral = p.vbar * theta + (p.v0 - p.vbar) * (1.0 - (-p.kappa * theta).exp()) / p.kappa;
    integral.sqrt()
}

/// Heston specialization of [`svm_coeffs`]: `v(x) = x`, `c(x) = η√x`, so
/// `f = √v₀`, `g = η/2`, `g'c = 0`, giving `κ₃ = ρη/(4√v₀)` and
/// `κ₄ = (1 + 2ρ_θ²)η²/(24v₀)`.
pub fn heston_coeffs(p: &HestonDLParams, theta: f64) -> Result<CumulantData, ModelError> {
    p.validate()?;
    if !(theta > 0.0) {
        return Err(ModelError::ThetaOutOfRange(theta));
    }
    let kappa2 = heston_sigma0(p, theta) / theta.sqrt();
    svm_coeffs(
        p.v0.sqrt(),
        0.5 * p.eta,
        0.0,
        p.rho,
        p.alpha_rho,
        theta,
        kappa2,
    )
}

/// 3/2-model coefficients, catalog values taken verbatim:
/// `κ₃ = ρε√v₀/4`, `κ₄ = (1+3ρ²)ε²v₀²/6`, `(m,n) = (1,2)`.
///
/// See [`ThreeHalvesParams`] for the documented disagreement with the
/// general SVM specialization.
pub fn three_halves_coeffs(p: &ThreeHalvesParams, theta: f64) -> Result<CumulantData, ModelError> {
    p.validate()?;
    if !(theta > 0.0) {
        return Err(ModelError::ThetaOutOfRange(theta));
    }
    let kappa3 = p.rho * p.eps * p.v0.sqrt() / 4.0;
    let kappa4 = (1.0 + 3.0 * p.rho * p.rho) * p.eps * p.eps * p.v0 * p.v0 / 6.0;
    let kappa2 = p.v0.sqrt();
    Ok(CumulantData::new(
        theta, kappa2, kappa3, kappa4, 0.5, 0.5, 1.0, 1.0, 2.0,
    )?)
}

/// The Example-3 specialization of the 3/2 model for comparison with the
/// catalog row: `κ₄ = (1+4ρ²)ε²v₀/24`.
pub fn three_halves_kappa4_from_svm(p: &ThreeHalvesParams) -> f64 {
    // f = √v, c = εv^{3/2}: g = f'c = εv/2, g'c = ε²v²/2, g²/f² = ε²v/4.
    let g_over_f_sq = p.eps * p.eps * p.v0 / 4.0;
    let gprime_c_over_f = p.eps * p.eps * p.v0.powf(1.5) / (2.0 * p.v0.sqrt());
    p.rho * p.rho / 6.0 * gprime_c_over_f + (1.0 + 2.0 * p.rho * p.rho) / 6.0 * g_over_f_sq
}
