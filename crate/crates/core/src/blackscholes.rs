//! Black-Scholes puts, implied volatility, the normalized put transform
//! and the exact smile-derivative identities.
//!
//! Prices are quoted off the forward: `p = e^{-rθ}[K Φ(-d₂) - F Φ(-d₁)]`
//! with `d₁,₂ = (log(F/K) ± σ²θ/2)/(σ√θ)`. Calls are handled by parity by
//! callers where needed; they are not first-class here.

use crate::numerics::{find_root, normal_cdf, normal_pdf, NumericsError};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum BsError {
    #[error("negative volatility {0}")]
    NegativeVol(f64),
    #[error("strike must be positive, got {0}")]
    NonPositiveStrike(f64),
    #[error("put price {price} at or below lower arbitrage bound {bound} (discounted intrinsic)")]
    PriceBelowIntrinsic { price: f64, bound: f64 },
    #[error("put price {price} at or above upper arbitrage bound {bound} (discounted strike)")]
    PriceAboveStrike { price: f64, bound: f64 },
    #[error("implied vol outside solver bracket [{lo}, {hi}]")]
    VolOutsideBracket { lo: f64, hi: f64 },
    #[error("non-finite value in smile-derivative inputs: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A forward contract view of the underlying: forward price `F = S₀e^{rθ}`,
/// flat rate `r` and time to maturity `θ` in years.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForwardContract {
    pub forward: f64,
    pub rate: f64,
    pub maturity: f64,
}

impl ForwardContract {
    pub fn new(forward: f64, rate: f64, maturity: f64) -> Result<Self, BsError> {
        if !(forward > 0.0) || !forward.is_finite() {
            return Err(BsError::NonFinite(format!("forward {forward}")));
        }
        if !(maturity > 0.0) || !maturity.is_finite() {
            return Err(BsError::NonFinite(format!("maturity {maturity}")));
        }
        Ok(ForwardContract {
            forward,
            rate,
            maturity,
        })
    }

    /// Discount factor e^{-rθ}.
    pub fn discount(&self) -> f64 {
        (-self.rate * self.maturity).exp()
    }
}

/// One maturity slice of an implied-volatility smile.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Smile {
    /// Time to maturity in years.
    pub maturity: f64,
    /// (log-moneyness k = log(K/F), implied vol) points, strictly increasing in k.
    pub points: Vec<(f64, f64)>,
}

impl Smile {
    pub fn new(maturity: f64, points: Vec<(f64, f64)>) -> Result<Self, BsError> {
        if !(maturity > 0.0) {
            return Err(BsError::NonFinite(format!("maturity {maturity}")));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(BsError::NonFinite(format!(
                    "log-moneyness not strictly increasing at {} -> {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(k, v) in &points {
            if !k.is_finite() || !v.is_finite() || v <= 0.0 {
                return Err(BsError::NonFinite(format!("smile point ({k}, {v})")));
            }
        }
        Ok(Smile { maturity, points })
    }
}

/// Black-Scholes put price.
///
/// `vol = 0` returns the discounted intrinsic value `e^{-rθ}(K - F)₊`.
pub fn bs_put(c: &ForwardContract, strike: f64, vol: f64) -> Result<f64, BsError> {
    if vol < 0.0 {
        return Err(BsError::NegativeVol(vol));
    }
    if strike <= 0.0 {
        return Err(BsError::NonPositiveStrike(strike));
    }
    let df = c.discount();
    let total = vol * c.maturity.sqrt();
    if total == 0.0 {
        return Ok(df * (strike - c.forward).max(0.0));
    }
    let log_fk = (c.forward / strike).ln();
    let d1 = log_fk / total + 0.5 * total;
    let d2 = d1 - total;
    Ok(df * (strike * normal_cdf(-d2) - c.forward * normal_cdf(-d1)))
}

const IV_BRACKET_LO: f64 = 1e-6;
const IV_BRACKET_HI: f64 = 5.0;
const IV_TOL: f64 = 1e-12;
/// Prices this close to an arbitrage bound are rejected rather than
/// clamped, so downstream regressions never see synthetic vols.
const BOUND_MARGIN: f64 = 1e-14;

/// Invert `bs_put` for the unique volatility reproducing `put_price`.
///
/// The price must lie strictly inside the arbitrage interval
/// `(e^{-rθ}(K-F)₊, e^{-rθ}K)`; the error names the violated bound.
pub fn implied_vol(c: &ForwardContract, strike: f64, put_price: f64) -> Result<f64, BsError> {
    if strike <= 0.0 {
        return Err(BsError::NonPositiveStrike(strike));
    }
    let df = c.discount();
    let lower = df * (strike - c.forward).max(0.0);
    let upper = df * strike;
    if put_price <= lower + BOUND_MARGIN {
        return Err(BsError::PriceBelowIntrinsic {
            price: put_price,
            bound: lower,
        });
    }
    if put_price >= upper - BOUND_MARGIN {
        return Err(BsError::PriceAboveStrike {
            price: put_price,
            bound: upper,
        });
    }
    let objective = |v: f64| bs_put(c, strike, v).unwrap_or(f64::NAN) - put_price;
    let flo = objective(IV_BRACKET_LO);
    let fhi = objective(IV_BRACKET_HI);
    if flo.signum() == fhi.signum() {
        return Err(BsError::VolOutsideBracket {
            lo: IV_BRACKET_LO,
            hi: IV_BRACKET_HI,
        });
    }
    Ok(find_root(objective, IV_BRACKET_LO, IV_BRACKET_HI, IV_TOL)?)
}

/// Normalized put price
/// `P_θ(σ) = (1/√θ)[Φ(z/σ + σ√θ/2) e^{√θ z} - Φ(z/σ - σ√θ/2)]`,
/// the Black-Scholes put at strike `F e^{√θ z}` divided by `F e^{-rθ} √θ`.
///
/// Strictly increasing in σ with range
/// `[(e^{√θ z} - 1)₊/√θ, e^{√θ z}/√θ]`; its σ-derivative is
/// `φ(z/σ - σ√θ/2)`.
pub fn normalized_put(z: f64, sigma: f64, theta: f64) -> Result<f64, BsError> {
    if sigma < 0.0 {
        return Err(BsError::NegativeVol(sigma));
    }
    if !(theta > 0.0) {
        return Err(BsError::NonFinite(format!("maturity {theta}")));
    }
    let sqrt_theta = theta.sqrt();
    if sigma == 0.0 {
        // Limit value: the discounted intrinsic, zero at z = 0.
        return Ok(((sqrt_theta * z).exp() - 1.0).max(0.0) / sqrt_theta);
    }
    let zs = z / sigma;
    let half = 0.5 * sigma * sqrt_theta;
    Ok((normal_cdf(zs + half) * (sqrt_theta * z).exp() - normal_cdf(zs - half)) / sqrt_theta)
}

/// The pair `f₁ = k/(√θ σ) - √θ σ/2`, `f₂ = k/(√θ σ) + √θ σ/2` entering
/// the exact smile-derivative identities. `f₂ - f₁ = √θ σ` always.
pub fn f1_f2(k: f64, theta: f64, vol: f64) -> (f64, f64) {
    let st = theta.sqrt();
    let a = k / (st * vol);
    let b = 0.5 * st * vol;
    (a - b, a + b)
}

/// Exact ATM skew and curvature of the smile implied by a return
/// distribution, given its CDF and density.
///
/// `cdf_at` must evaluate `Q(X_θ ≤ ·)` and `density_at` the density
/// `p_θ(·)` of the normalized return; `smile_vol_at_0` is the ATM implied
/// vol of the same distribution. The identities are
///
/// ```text
/// ∂_k σ  = [Q(0 ≥ σ₀X_θ) - Φ(f₂)] / (√θ φ(f₂))
/// ∂²_k σ = p_θ(0)/(σ₀√θ φ(f₂)) - σ_BS ∂_k f₁ ∂_k f₂
/// ```
///
/// with `σ_BS ∂_k f₁ ∂_k f₂ = 1/(θσ_BS) - (θ/4)(∂_k σ_BS)² σ_BS` evaluated
/// analytically at k = 0 from the computed skew.
pub fn skew_from_distribution(
    cdf_at: impl Fn(f64) -> f64,
    density_at: impl Fn(f64) -> f64,
    sigma0: f64,
    theta: f64,
    smile_vol_at_0: f64,
) -> Result<(f64, f64), BsError> {
    if !(sigma0 > 0.0) || !(theta > 0.0) || !(smile_vol_at_0 > 0.0) {
        return Err(BsError::NonFinite(format!(
            "sigma0={sigma0}, theta={theta}, vol={smile_vol_at_0}"
        )));
    }
    let st = theta.sqrt();
    let (_, f2) = f1_f2(0.0, theta, smile_vol_at_0);
    let q0 = cdf_at(0.0);
    let p0 = density_at(0.0);
    if !q0.is_finite() || !p0.is_finite() {
        return Err(BsError::NonFinite(format!("cdf(0)={q0}, density(0)={p0}")));
    }
    let phi_f2 = normal_pdf(f2);
    let skew = (q0 - normal_cdf(f2)) / (st * phi_f2);
    let cross = 1.0 / (theta * smile_vol_at_0) - 0.25 * theta * skew * skew * smile_vol_at_0;
    let curvature = p0 / (sigma0 * st * phi_f2) - cross;
    if !skew.is_finite() || !curvature.is_finite() {
        return Err(BsError::NonFinite(format!(
            "skew={skew}, curvature={curvature}"
        )));
    }
    Ok((skew, curvature))
}
