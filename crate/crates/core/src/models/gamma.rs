//! Gamma-return model: the normalized log return is a centered difference
//! of gamma variables, `X_θ = (Z⁽¹⁾ - Z⁽²⁾ + w_θ)/σ₀(θ)` with
//! `Z⁽¹⁾ ~ Γ(k_θ, γ_θ⁻¹)`, `Z⁽²⁾ ~ Γ(k_θ + k̄_θ, γ_θ⁻¹)` and the
//! martingale shift `w_θ = k_θ ln(1-γ_θ) + (k_θ+k̄_θ) ln(1+γ_θ)`.
//!
//! Parameters decay in maturity as `k_θ = c_k θ^α`, `k̄_θ = c_k̄ θ^ᾱ`,
//! `γ_θ = c_γ θ^β` with `β = (1-α)/2` forced so that `σ₀(θ) = O(√θ)`.
//! The skewness and excess kurtosis of `X_θ` are
//! `κ̃₃ = -2k̄_θ/(2k_θ+k̄_θ)^{3/2}` and `κ̃₄ = 6/(2k_θ+k̄_θ)`, giving the
//! `(m,n) = (0,0)` cumulant family with `β₁ = ᾱ - 3α/2`, `β₂ = -α`.

use num_complex::Complex64;

use super::ModelError;
use crate::edgeworth::CumulantData;
use crate::numerics::complex_pow;

/// Scale constants and decay exponents of the gamma-return model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaReturnParams {
    /// Scale of the shared shape parameter `k_θ = c_k θ^α`.
    pub c_k: f64,
    /// Scale of the shape asymmetry `k̄_θ = c_kbar θ^ᾱ` (0 gives a symmetric return).
    pub c_kbar: f64,
    /// Scale of the gamma scale parameter `γ_θ = c_gamma θ^{(1-α)/2}`.
    pub c_gamma: f64,
    /// Shape decay exponent, in (-1, 0).
    pub alpha: f64,
    /// Asymmetry decay exponent, greater than `alpha`.
    pub alpha_bar: f64,
}

impl GammaReturnParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha > -1.0 && self.alpha < 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "alpha must be in (-1, 0), got {}",
                self.alpha
            )));
        }
        if !(self.alpha_bar > self.alpha) {
            return Err(ModelError::InvalidParams(format!(
                "alpha_bar {} must exceed alpha {}",
                self.alpha_bar, self.alpha
            )));
        }
        if !(self.c_k > 0.0) || !(self.c_gamma > 0.0) || !(self.c_kbar >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "scale constants must be positive (c_kbar may be 0): \
                 c_k={}, c_kbar={}, c_gamma={}",
                self.c_k, self.c_kbar, self.c_gamma
            )));
        }
        Ok(())
    }

    /// `β = (1-α)/2`, the forced decay of the gamma scale.
    pub fn beta(&self) -> f64 {
        0.5 * (1.0 - self.alpha)
    }

    /// `(k_θ, k̄_θ, γ_θ)` at maturity `theta`.
    pub fn at(&self, theta: f64) -> (f64, f64, f64) {
        (
            self.c_k * theta.powf(self.alpha),
            self.c_kbar * theta.powf(self.alpha_bar),
            self.c_gamma * theta.powf(self.beta()),
        )
    }

    /// Volatility of the log return, `σ₀(θ) = (2k_θ + k̄_θ)^{1/2} γ_θ`.
    pub fn sigma0(&self, theta: f64) -> f64 {
        let (k, kbar, gamma) = self.at(theta);
        (2.0 * k + kbar).sqrt() * gamma
    }
}

fn check_theta(theta: f64) -> Result<(), ModelError> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(ModelError::ThetaOutOfRange(theta));
    }
    Ok(())
}

/// Cumulant data of the gamma-return model at maturity `theta`.
pub fn gamma_cumulants(p: &GammaReturnParams, theta: f64) -> Result<CumulantData, ModelError> {
    p.validate()?;
    check_theta(theta)?;
    let (k, kbar, gamma) = p.at(theta);
    let pool = 2.0 * k + kbar;
    let sigma0 = pool.sqrt() * gamma;
    let kappa2 = sigma0 / theta.sqrt();
    let skewness = -2.0 * kbar / pool.powf(1.5);
    let excess_kurtosis = 6.0 / pool;
    let beta1 = p.alpha_bar - 1.5 * p.alpha;
    let beta2 = -p.alpha;
    let kappa3 = skewness / 6.0 * theta.powf(-beta1);
    let kappa4 = excess_kurtosis / 24.0 * theta.powf(-beta2);
    Ok(CumulantData::new(
        theta, kappa2, kappa3, kappa4, 0.5, beta1, beta2, 0.0, 0.0,
    )?)
}

/// Exact characteristic function of the normalized return,
/// `φ_X(u;θ) = e^{iuw_θ/σ₀} (1 + γ²u²/σ₀²)^{-k} (1 + iγu/σ₀)^{-k̄}`.
///
/// `u` may sit off the real axis as long as `|Im(u)| γ_θ < σ₀`, which keeps
/// both principal powers away from the branch cut.
pub fn gamma_cf(u: Complex64, p: &GammaReturnParams, theta: f64) -> Result<Complex64, ModelError> {
    p.validate()?;
    check_theta(theta)?;
    let (k, kbar, gamma) = p.at(theta);
    if gamma >= 1.0 {
        return Err(ModelError::GammaScaleTooLarge { gamma, theta });
    }
    let sigma0 = (2.0 * k + kbar).sqrt() * gamma;
    let w = k * (1.0 - gamma).ln() + (k + kbar) * (1.0 + gamma).ln();
    let i = Complex64::new(0.0, 1.0);
    let us = u / sigma0;
    let shift = (i * us * w).exp();
    let even = complex_pow(Complex64::new(1.0, 0.0) + gamma * gamma * us * us, -k)?;
    let odd = complex_pow(Complex64::new(1.0, 0.0) + i * gamma * us, -kbar)?;
    Ok(shift * even * odd)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Figure-1 scale constants.
    pub(crate) fn fig1(alpha_bar: f64) -> GammaReturnParams {
        GammaReturnParams {
            c_k: 3.0,
            c_kbar: 0.5,
            c_gamma: 0.1,
            alpha: -0.2,
            alpha_bar,
        }
    }

    #[test]
    fn example_closed_forms_at_theta_one() {
        // (c_k, c_kbar, c_gamma) = (3, 0.5, 0.1), α = -0.2, θ = 1:
        // κ̃₃ = -1/6.5^1.5, κ̃₄ = 6/6.5, σ₀ = √6.5/10
        let p = fig1(-0.1);
        let c = gamma_cumulants(&p, 1.0).unwrap();
        let skewness = 6.0 * c.kappa3; // θ^{β₁} = 1
        let kurt = 24.0 * c.kappa4;
        assert!((skewness - (-1.0 / 6.5f64.powf(1.5))).abs() < 1e-12);
        assert!((skewness + 0.06034342619636432).abs() < 1e-12);
        assert!((kurt - 6.0 / 6.5).abs() < 1e-12);
        assert!((c.sigma0 - 6.5f64.sqrt() * 0.1).abs() < 1e-12);
        assert!((c.sigma0 - 0.25495097567963926).abs() < 1e-12);
    }

    #[test]
    fn symmetric_limit_has_zero_skewness() {
        let p = GammaReturnParams {
            c_kbar: 0.0,
            ..fig1(-0.1)
        };
        for &theta in &[1.0, 0.3, 0.05] {
            let c = gamma_cumulants(&p, theta).unwrap();
            assert_eq!(c.kappa3, 0.0);
        }
    }

    #[test]
    fn sigma0_identity_across_maturities() {
        let p = fig1(0.4);
        for &theta in &[1.0, 0.1, 0.01] {
            let c = gamma_cumulants(&p, theta).unwrap();
            assert!((c.sigma0 - c.kappa2 * theta.sqrt()).abs() < 1e-12 * c.sigma0);
            assert!((c.sigma0 - p.sigma0(theta)).abs() < 1e-15);
        }
    }

    #[test]
    fn cf_at_origin_and_conjugate_symmetry() {
        let p = fig1(-0.1);
        let one = gamma_cf(Complex64::new(0.0, 0.0), &p, 0.05).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let u = Complex64::new(1.7, 0.0);
        let plus = gamma_cf(u, &p, 0.05).unwrap();
        let minus = gamma_cf(-u, &p, 0.05).unwrap();
        assert!((plus.conj() - minus).norm() < 1e-14);
    }

    #[test]
    fn cf_modulus_decomposition() {
        // |φ(u)| = (1 + γ²u²/σ₀²)^{-k} · (1 + γ²u²/σ₀²)^{-k̄/2} for real u
        let p = fig1(-0.1);
        let theta = 0.05;
        let (k, kbar, gamma) = p.at(theta);
        let sigma0 = p.sigma0(theta);
        let u = 3.0;
        let base = 1.0 + gamma * gamma * u * u / (sigma0 * sigma0);
        let expect = base.powf(-k) * base.powf(-0.5 * kbar);
        let got = gamma_cf(Complex64::new(u, 0.0), &p, theta).unwrap().norm();
        assert!((got - expect).abs() < 1e-12 * expect, "{got} vs {expect}");
    }

    #[test]
    fn theta_window_enforced() {
        let p = fig1(-0.1);
        assert!(matches!(
            gamma_cumulants(&p, 1.5),
            Err(ModelError::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            gamma_cumulants(&p, 0.0),
            Err(ModelError::ThetaOutOfRange(_))
        ));
    }
}
