//! CGMY-return model: the normalized log return is a tempered-stable
//! variable, `X_θ = (Z_θ + w_θ)/σ₀(θ)` with `Z_θ ~ CGMY(C_θ, G_θ, M_θ, Y)`
//! and martingale shift
//! `w_θ = -C_θ Γ(-Y)((M_θ-1)^Y - M_θ^Y + (G_θ+1)^Y - G_θ^Y)`.
//!
//! Tempering decays as `M_θ = c_M θ^{α_M}`, `G_θ = M_θ + c_G θ^{α_G}`, and
//! the level as `C_θ = c_C θ^β` with `β = 1 - (Y-2)α_M` forced so that
//! `σ₀(θ) = O(√θ)`. The n-th cumulant of `X_θ` is
//! `C_θ Γ(n-Y)(M^{Y-n} + (-1)ⁿ G^{Y-n})/σ₀ⁿ`, giving the `(m,n) = (0,0)`
//! family with `β₁ = α_G - 2α_M - 1/2`, `β₂ = -2α_M - 1`.

use num_complex::Complex64;

use super::ModelError;
use crate::edgeworth::CumulantData;
use crate::numerics::{complex_pow, gamma_fn};

/// Scale constants, decay exponents, and activity index of the CGMY-return model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CgmyReturnParams {
    /// Scale of the Lévy-measure level `C_θ = c_C θ^{1-(Y-2)α_M}`.
    pub c_c: f64,
    /// Scale of the left/right tempering gap `G_θ - M_θ = c_G θ^{α_G}`.
    pub c_g: f64,
    /// Scale of the right tempering `M_θ = c_M θ^{α_M}`.
    pub c_m: f64,
    /// Tempering decay exponent, in (-1, -0.5).
    pub alpha_m: f64,
    /// Gap decay exponent, greater than `alpha_m`.
    pub alpha_g: f64,
    /// Activity index `Y` in (0, 2) excluding 1.
    pub y: f64,
}

impl CgmyReturnParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha_m > -1.0 && self.alpha_m < -0.5) {
            return Err(ModelError::InvalidParams(format!(
                "alpha_m must be in (-1, -0.5), got {}",
                self.alpha_m
            )));
        }
        if !(self.alpha_g > self.alpha_m) {
            return Err(ModelError::InvalidParams(format!(
                "alpha_g {} must exceed alpha_m {}",
                self.alpha_g, self.alpha_m
            )));
        }
        if !(self.c_c > 0.0) || !(self.c_m > 0.0) || !(self.c_g >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "scale constants must be positive (c_g may be 0): \
                 c_c={}, c_g={}, c_m={}",
                self.c_c, self.c_g, self.c_m
            )));
        }
        if self.y <= 0.0 || self.y >= 2.0 {
            return Err(ModelError::InvalidParams(format!(
                "Y must be in (0, 2), got {}",
                self.y
            )));
        }
        if self.y == 1.0 {
            return Err(ModelError::ActivityIndexPole(self.y));
        }
        Ok(())
    }

    /// `β = 1 - (Y-2)α_M`, the forced decay of the Lévy level.
    pub fn beta(&self) -> f64 {
        1.0 - (self.y - 2.0) * self.alpha_m
    }

    /// `(C_θ, G_θ, M_θ)` at maturity `theta`.
    pub fn at(&self, theta: f64) -> (f64, f64, f64) {
        let m = self.c_m * theta.powf(self.alpha_m);
        (
            self.c_c * theta.powf(self.beta()),
            m + self.c_g * theta.powf(self.alpha_g),
            m,
        )
    }
}

fn check_theta(theta: f64) -> Result<(), ModelError> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(ModelError::ThetaOutOfRange(theta));
    }
    Ok(())
}

/// `n`-th cumulant of the normalized return `X_θ`:
/// `C_θ Γ(n-Y)(M^{Y-n} + (-1)ⁿ G^{Y-n})/σ₀ⁿ`.
pub(crate) fn cgmy_cumulant_n(
    p: &CgmyReturnParams,
    theta: f64,
    order: u32,
) -> Result<f64, ModelError> {
    let (c, g, m) = p.at(theta);
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    let raw = c
        * gamma_fn(order as f64 - p.y)?
        * (m.powf(p.y - order as f64) + sign * g.powf(p.y - order as f64));
    let sigma0 = cgmy_sigma0(p, theta)?;
    Ok(raw / sigma0.powi(order as i32))
}

fn cgmy_sigma0(p: &CgmyReturnParams, theta: f64) -> Result<f64, ModelError> {
    let (c, g, m) = p.at(theta);
    let var = c * gamma_fn(2.0 - p.y)? * (m.powf(p.y - 2.0) + g.powf(p.y - 2.0));
    Ok(var.sqrt())
}

/// Cumulant data of the CGMY-return model at maturity `theta`.
pub fn cgmy_cumulants(p: &CgmyReturnParams, theta: f64) -> Result<CumulantData, ModelError> {
    p.validate()?;
    check_theta(theta)?;
    let sigma0 = cgmy_sigma0(p, theta)?;
    let kappa2 = sigma0 / theta.sqrt();
    let skewness = cgmy_cumulant_n(p, theta, 3)?;
    let excess_kurtosis = cgmy_cumulant_n(p, theta, 4)?;
    let beta1 = p.alpha_g - 2.0 * p.alpha_m - 0.5;
    let beta2 = -2.0 * p.alpha_m - 1.0;
    let kappa3 = skewness / 6.0 * theta.powf(-beta1);
    let kappa4 = excess_kurtosis / 24.0 * theta.powf(-beta2);
    Ok(CumulantData::new(
        theta, kappa2, kappa3, kappa4, 0.5, beta1, beta2, 0.0, 0.0,
    )?)
}

/// Exact characteristic function of the normalized return,
/// `φ_X(u;θ) = e^{iuw_θ/σ₀} exp{C_θ Γ(-Y)((M-iu/σ₀)^Y - M^Y + (G+iu/σ₀)^Y - G^Y)}`.
///
/// Requires `M_θ > 1` so the martingale shift is real. `u` may sit off the
/// real axis within the tempering strip `Im(u) < G_θ σ₀` / `Im(u) > -M_θ σ₀`.
pub fn cgmy_cf(u: Complex64, p: &CgmyReturnParams, theta: f64) -> Result<Complex64, ModelError> {
    p.validate()?;
    check_theta(theta)?;
    let (c, g, m) = p.at(theta);
    if m <= 1.0 {
        return Err(ModelError::TemperingTooSmall { m, theta });
    }
    let sigma0 = cgmy_sigma0(p, theta)?;
    let gamma_neg_y = gamma_fn(-p.y)?;
    let w = -c
        * gamma_neg_y
        * ((m - 1.0).powf(p.y) - m.powf(p.y) + (g + 1.0).powf(p.y) - g.powf(p.y));
    let i = Complex64::new(0.0, 1.0);
    let us = u / sigma0;
    let m_c = Complex64::new(m, 0.0);
    let g_c = Complex64::new(g, 0.0);
    let exponent = c
        * gamma_neg_y
        * (complex_pow(m_c - i * us, p.y)? - m.powf(p.y) + complex_pow(g_c + i * us, p.y)?
            - g.powf(p.y));
    Ok((i * us * w + exponent).exp())
}
