//! Generalized Edgeworth expansions of option prices and implied
//! volatility, and the resulting ATM skew/curvature asymptotics.
//!
//! Everything is driven by [`CumulantData`]: the volatility scale
//! `σ₀(θ) = κ₂ θ^{β₀}` of the normalized log return, the cumulant
//! coefficients `κ₃, κ₄` with decay exponents `β₁, β₂`, and the
//! approximator adjustments `(m, n)`. Distribution-based models use
//! `(m, n) = (0, 0)`; stochastic volatility models use `(1, 2)`.
//!
//! The density approximator is
//!
//! ```text
//! q(x) = φ(x+σ₀/2){1 + κ₃(H₃(x+σ₀/2) - mσ₀H₂(x+σ₀/2))θ^β₁}
//!      + φ(x+σ₀/2) κ₄ (H₄(x+σ₀/2) - nσ₀H₃(x+σ₀/2)) θ^β₂
//!      + φ(x) (κ₃²/2) H₆(x) θ^{2β₁}
//! ```
//!
//! which is a signed measure: it integrates to one but may be negative in
//! the tails.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{hermite_unchecked, normal_cdf, normal_pdf};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

#[derive(Debug, Clone, Error)]
pub enum EdgeworthError {
    #[error("invalid cumulant data: {0}")]
    InvalidCumulants(String),
    #[error(
        "implied-vol expansion requires beta0 = 1/2 (got {0}); \
         use atm_asymptotics for general beta0"
    )]
    UnsupportedScaling(f64),
}

/// The tuple parameterizing every expansion.
///
/// Invariant: `sigma0 = kappa2 · theta^beta0` (enforced on construction to
/// 1e-12 relative).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CumulantData {
    /// Time to maturity in years.
    pub theta: f64,
    /// Standard deviation of the log return `Z_θ` (dimensionless).
    pub sigma0: f64,
    /// `σ₀ / θ^{β₀}`; for `β₀ = 1/2` this is the annualized volatility scale.
    pub kappa2: f64,
    /// Third-cumulant coefficient: skewness of `X_θ` is `6 κ₃ θ^{β₁}`.
    pub kappa3: f64,
    /// Fourth-cumulant coefficient: excess kurtosis of `X_θ` is `24 κ₄ θ^{β₂}`.
    pub kappa4: f64,
    /// Volatility scaling exponent, 1/2 for diffusive scaling.
    pub beta0: f64,
    /// Skewness decay exponent.
    pub beta1: f64,
    /// Kurtosis decay exponent.
    pub beta2: f64,
    /// Hermite adjustment on the κ₃ term (0 for distribution-based models,
    /// 1 for stochastic volatility).
    pub m: f64,
    /// Hermite adjustment on the κ₄ term (0 or 2 respectively).
    pub n: f64,
}

impl CumulantData {
    /// Build from `(θ, κ₂, κ₃, κ₄, β₀, β₁, β₂, m, n)`, deriving `σ₀ = κ₂θ^{β₀}`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theta: f64,
        kappa2: f64,
        kappa3: f64,
        kappa4: f64,
        beta0: f64,
        beta1: f64,
        beta2: f64,
        m: f64,
        n: f64,
    ) -> Result<Self, EdgeworthError> {
        let fields = [
            ("theta", theta),
            ("kappa2", kappa2),
            ("kappa3", kappa3),
            ("kappa4", kappa4),
            ("beta0", beta0),
            ("beta1", beta1),
            ("beta2", beta2),
            ("m", m),
            ("n", n),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(EdgeworthError::InvalidCumulants(format!(
                    "{name} is not finite: {v}"
                )));
            }
        }
        if theta <= 0.0 {
            return Err(EdgeworthError::InvalidCumulants(format!(
                "theta must be positive, got {theta}"
            )));
        }
        if kappa2 <= 0.0 {
            return Err(EdgeworthError::InvalidCumulants(format!(
                "kappa2 must be positive, got {kappa2}"
            )));
        }
        for (name, b) in [("beta0", beta0), ("beta1", beta1), ("beta2", beta2)] {
            if b <= 0.0 {
                return Err(EdgeworthError::InvalidCumulants(format!(
                    "{name} must be positive, got {b}"
                )));
            }
        }
        let sigma0 = kappa2 * theta.powf(beta0);
        if !(sigma0 > 0.0) || !sigma0.is_finite() {
            return Err(EdgeworthError::InvalidCumulants(format!(
                "sigma0 = {sigma0} out of range"
            )));
        }
        Ok(CumulantData {
            theta,
            sigma0,
            kappa2,
            kappa3,
            kappa4,
            beta0,
            beta1,
            beta2,
            m,
            n,
        })
    }

    /// Check the defining identity `σ₀ = κ₂ θ^{β₀}` to 1e-12 relative.
    pub fn is_consistent(&self) -> bool {
        let expect = self.kappa2 * self.theta.powf(self.beta0);
        (self.sigma0 - expect).abs() <= 1e-12 * expect.abs().max(1.0)
    }

    /// `β̄_ε = min(β₂ + β₀, 2β₁, 2β₂ - ε, β₁ + β₂ - ε)`: the order of the
    /// price-expansion remainder. ε only affects asserted decay rates.
    pub fn beta_bar(&self, eps: f64) -> f64 {
        (self.beta2 + self.beta0)
            .min(2.0 * self.beta1)
            .min(2.0 * self.beta2 - eps)
            .min(self.beta1 + self.beta2 - eps)
    }

    /// `β*_ε = min(β₁ + β₀ - ε, β̄_ε - β₀)`: the order of the skew remainder.
    pub fn beta_star(&self, eps: f64) -> f64 {
        (self.beta1 + self.beta0 - eps).min(self.beta_bar(eps) - self.beta0)
    }
}

/// A value with its term-by-term decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub value: f64,
    pub leading_terms: Vec<(&'static str, f64)>,
    pub order_label: String,
}

impl ExpansionResult {
    fn from_terms(leading_terms: Vec<(&'static str, f64)>, order_label: String) -> Self {
        let value = leading_terms.iter().map(|(_, v)| v).sum();
        ExpansionResult {
            value,
            leading_terms,
            order_label,
        }
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.leading_terms
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| *v)
    }
}

/// The signed density approximator `q_θ^{(m,n)}(x)`.
pub fn q_density(x: f64, c: &CumulantData) -> f64 {
    let s = 0.5 * c.sigma0;
    let y = x + s;
    let phi_y = normal_pdf(y);
    let h2 = hermite_unchecked(2, y);
    let h3 = hermite_unchecked(3, y);
    let h4 = hermite_unchecked(4, y);
    let t1 = c.theta.powf(c.beta1);
    let t2 = c.theta.powf(c.beta2);

    let base = phi_y * (1.0 + c.kappa3 * (h3 - c.m * c.sigma0 * h2) * t1);
    let kurt = phi_y * c.kappa4 * (h4 - c.n * c.sigma0 * h3) * t2;
    let sq = normal_pdf(x) * 0.5 * c.kappa3 * c.kappa3 * hermite_unchecked(6, x) * t1 * t1;
    base + kurt + sq
}

/// Antiderivative of `q_density`: `∫_{-∞}^ζ q(x) dx` in closed form, using
/// `∫ φ H_n = -φ H_{n-1}` for n ≥ 1.
pub fn q_cdf(zeta: f64, c: &CumulantData) -> f64 {
    let s = 0.5 * c.sigma0;
    let y = zeta + s;
    let phi_y = normal_pdf(y);
    let t1 = c.theta.powf(c.beta1);
    let t2 = c.theta.powf(c.beta2);
    let h1 = y;
    let h2 = hermite_unchecked(2, y);
    let h3 = hermite_unchecked(3, y);

    normal_cdf(y) - c.kappa3 * t1 * phi_y * (h2 - c.m * c.sigma0 * h1)
        - c.kappa4 * t2 * phi_y * (h3 - c.n * c.sigma0 * h2)
        - 0.5 * c.kappa3 * c.kappa3 * t1 * t1 * normal_pdf(zeta) * hermite_unchecked(5, zeta)
}

/// The characteristic-function approximator `φ_{(m,n)}(u; θ)` on the
/// complex plane (evaluated off the real axis for strip conditions).
pub fn phi_mn(u: Complex64, c: &CumulantData) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u2 * u2;
    let u6 = u4 * u2;
    let t1 = c.theta.powf(c.beta1);
    let t2 = c.theta.powf(c.beta2);

    let prefactor = (-i * u * (0.5 * c.sigma0) - 0.5 * u2).exp();
    let bracket = Complex64::new(1.0, 0.0) - c.kappa3 * (i * u3 - c.m * c.sigma0 * u2) * t1
        - 0.5 * c.kappa3 * c.kappa3 * u6 * t1 * t1
        + c.kappa4 * (u4 + i * u3 * c.n * c.sigma0) * t2;
    prefactor * bracket
}

/// Normalized put price expansion: the value of
/// `p(F e^{σ₀ z}, θ) / (F e^{-rθ} σ₀)` with the remainder dropped.
///
/// Terms: `"bs"` (the Black-Scholes-like bracket including the m
/// correction), `"kappa3"`, `"kappa4"`, `"kappa3_sq"`. With
/// `κ₃ = κ₄ = 0` the value reduces identically to the Black-Scholes
/// normalized put.
pub fn put_expansion(z: f64, c: &CumulantData) -> ExpansionResult {
    let s = 0.5 * c.sigma0;
    let y = z + s;
    let e_sz = (c.sigma0 * z).exp();
    let phi_y = normal_pdf(y);
    let t1 = c.theta.powf(c.beta1);
    let t2 = c.theta.powf(c.beta2);

    let bs = (normal_cdf(y) * e_sz
        - (1.0 + c.m * c.kappa3 * c.sigma0.powi(3) * t1) * normal_cdf(z - s))
        / c.sigma0;
    let k3 = c.kappa3 * phi_y * (y + (1.0 - c.m) * c.sigma0) * e_sz * t1;
    let k4 = c.kappa4
        * phi_y
        * (hermite_unchecked(2, y) + (1.0 - c.n) * c.sigma0 * y)
        * e_sz
        * t2;
    let k3sq = normal_pdf(z) * 0.5 * c.kappa3 * c.kappa3 * hermite_unchecked(4, z) * t1 * t1;

    ExpansionResult::from_terms(
        vec![("bs", bs), ("kappa3", k3), ("kappa4", k4), ("kappa3_sq", k3sq)],
        format!("o(theta^{:.4})", c.beta_bar(0.0)),
    )
}

/// Implied-volatility expansion `σ_BS(√θ z, θ)` for diffusive scaling
/// (`β₀ = 1/2`).
///
/// Terms: `"kappa2"` (the flat base), `"kappa3"`, `"kappa3_sq"`,
/// `"kappa4"`. The κ₃ group carries the m-dependent Mills-ratio
/// correction evaluated at `z/κ₂ - κ₂√θ/2`.
pub fn iv_expansion(z: f64, c: &CumulantData) -> Result<ExpansionResult, EdgeworthError> {
    if (c.beta0 - 0.5).abs() > 1e-12 {
        return Err(EdgeworthError::UnsupportedScaling(c.beta0));
    }
    let st = c.theta.sqrt();
    let zk = z / c.kappa2;
    let a = zk - 0.5 * c.kappa2 * st;
    let t1 = c.theta.powf(c.beta1);
    let t2 = c.theta.powf(c.beta2);

    let mills = normal_cdf(a) / normal_pdf(a);
    let k3 = c.kappa2
        * c.kappa3
        * (zk + (1.5 - c.m) * c.kappa2 * st - c.m * mills * c.kappa2 * c.kappa2 * c.theta)
        * t1;
    let k3sq = c.kappa2 * (1.5 * c.kappa3 * c.kappa3 - 3.0 * c.kappa3 * c.kappa3 * zk * zk)
        * t1
        * t1;
    let k4 = c.kappa2 * c.kappa4 * (-1.0 + zk * zk + (2.0 - c.n) * z * st) * t2;

    Ok(ExpansionResult::from_terms(
        vec![
            ("kappa2", c.kappa2),
            ("kappa3", k3),
            ("kappa3_sq", k3sq),
            ("kappa4", k4),
        ],
        format!("o(theta^{:.4})", c.beta_bar(0.0)),
    ))
}

/// Which exponent the κ₃ group of the ATM curvature carries.
///
/// The theorem statement prints `θ^{β₁+β₀}` while the final display of its
/// proof carries `θ^{β₁-β₀}`; the two are not reconcilable by algebra
/// alone, so both are exposed and the proof-final reading is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurvatureConvention {
    /// κ₃ curvature group at `θ^{β₁-β₀}` (default).
    #[default]
    ProofFinal,
    /// κ₃ curvature group at `θ^{β₁+β₀}`.
    TheoremStatement,
}

/// ATM skew and curvature asymptotics for general `β₀ > 0`.
///
/// ```text
/// skew  = κ₃ θ^{β₁-β₀} + (2-n) κ₂ κ₄ θ^{β₂}
/// curv  = 2(κ₄/κ₂) θ^{β₂-2β₀} - 6(κ₃²/κ₂) θ^{2β₁-2β₀}
///       + ((1-2m)/8 κ₂²κ₃ - (√(2π)m/2) κ₂κ₃ θ^{β₀}) θ^{E}
/// ```
///
/// with `E` set by the [`CurvatureConvention`]. Skew terms are labeled
/// `"kappa3"`, `"kappa4"`; curvature terms `"kappa4"`, `"kappa3_sq"`,
/// `"kappa3"`.
pub fn atm_asymptotics_with(
    c: &CumulantData,
    convention: CurvatureConvention,
) -> (ExpansionResult, ExpansionResult) {
    let th = c.theta;
    let skew_k3 = c.kappa3 * th.powf(c.beta1 - c.beta0);
    let skew_k4 = (2.0 - c.n) * c.kappa2 * c.kappa4 * th.powf(c.beta2);
    let skew = ExpansionResult::from_terms(
        vec![("kappa3", skew_k3), ("kappa4", skew_k4)],
        format!("o(theta^{:.4})", c.beta_star(0.0)),
    );

    let curv_k4 = 2.0 * c.kappa4 / c.kappa2 * th.powf(c.beta2 - 2.0 * c.beta0);
    let curv_k3sq =
        -6.0 * c.kappa3 * c.kappa3 / c.kappa2 * th.powf(2.0 * c.beta1 - 2.0 * c.beta0);
    let exponent = match convention {
        CurvatureConvention::ProofFinal => c.beta1 - c.beta0,
        CurvatureConvention::TheoremStatement => c.beta1 + c.beta0,
    };
    let curv_k3 = ((1.0 - 2.0 * c.m) / 8.0 * c.kappa2 * c.kappa2 * c.kappa3
        - 0.5 * SQRT_2PI * c.m * c.kappa2 * c.kappa3 * th.powf(c.beta0))
        * th.powf(exponent);
    let curvature = ExpansionResult::from_terms(
        vec![
            ("kappa4", curv_k4),
            ("kappa3_sq", curv_k3sq),
            ("kappa3", curv_k3),
        ],
        format!("o(theta^{:.4})", c.beta_bar(0.0) - 2.0 * c.beta0),
    );
    (skew, curvature)
}

/// [`atm_asymptotics_with`] under the default proof-final convention.
pub fn atm_asymptotics(c: &CumulantData) -> (ExpansionResult, ExpansionResult) {
    atm_asymptotics_with(c, CurvatureConvention::default())
}

/// The alternative approximator `q̃` for stochastic volatility models:
/// the `(m, n) = (1, 0)` member with `β₁ = H`, `β₂ = 2H` and the kurtosis
/// and κ₃² corrections recentered at the unshifted Gaussian.
///
/// `H` is read from `c.beta1`; `c.sigma0` plays the role of `σ̃₀`.
pub fn q_tilde_density(x: f64, c: &CumulantData) -> f64 {
    let h = c.beta1;
    let s = 0.5 * c.sigma0;
    let y = x + s;
    let th = c.theta.powf(h);
    let th2 = c.theta.powf(2.0 * h);

    normal_pdf(y)
        * (1.0
            + c.kappa3
                * (hermite_unchecked(3, y) - c.sigma0 * hermite_unchecked(2, y))
                * th)
        + normal_pdf(x)
            * (c.kappa4 * hermite_unchecked(4, x)
                + 0.5 * c.kappa3 * c.kappa3 * hermite_unchecked(6, x))
            * th2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackscholes::normalized_put;

    fn sample(theta: f64, kappa3: f64, kappa4: f64, m: f64, n: f64) -> CumulantData {
        CumulantData::new(theta, 0.2, kappa3, kappa4, 0.5, 0.4, 0.6, m, n).unwrap()
    }

    #[test]
    fn invariant_enforced() {
        let c = sample(0.25, -0.1, 0.05, 0.0, 0.0);
        assert!(c.is_consistent());
        assert!((c.sigma0 - 0.2 * 0.25f64.powf(0.5)).abs() < 1e-15);
        assert!(CumulantData::new(0.25, 0.2, 0.0, 0.0, -0.5, 0.4, 0.6, 0.0, 0.0).is_err());
        assert!(CumulantData::new(0.0, 0.2, 0.0, 0.0, 0.5, 0.4, 0.6, 0.0, 0.0).is_err());
    }

    #[test]
    fn q_density_gaussian_base_case() {
        let c = sample(0.25, 0.0, 0.0, 0.0, 0.0);
        for &x in &[-3.0, -1.0, 0.0, 0.5, 2.0] {
            let expect = normal_pdf(x + 0.5 * c.sigma0);
            assert!((q_density(x, &c) - expect).abs() < 1e-16);
        }
    }

    #[test]
    fn q_cdf_matches_derivative() {
        let c = sample(0.09, -0.3, 0.2, 1.0, 2.0);
        let h = 1e-5;
        for &x in &[-2.0, -0.5, 0.0, 0.7, 1.9] {
            let fd = (q_cdf(x + h, &c) - q_cdf(x - h, &c)) / (2.0 * h);
            assert!(
                (fd - q_density(x, &c)).abs() < 1e-8,
                "x={x}: fd {fd} vs {}",
                q_density(x, &c)
            );
        }
    }

    #[test]
    fn phi_mn_at_origin_is_one() {
        let c = sample(0.25, -0.3, 0.2, 1.0, 2.0);
        let v = phi_mn(Complex64::new(0.0, 0.0), &c);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_mn_gaussian_base_case() {
        let c = sample(0.25, 0.0, 0.0, 0.0, 0.0);
        let u = Complex64::new(1.3, 0.0);
        let expect = (Complex64::new(0.0, -1.3 * 0.5 * c.sigma0)
            + Complex64::new(-0.5 * 1.3 * 1.3, 0.0))
        .exp();
        assert!((phi_mn(u, &c) - expect).norm() < 1e-15);
    }

    #[test]
    fn put_expansion_reduces_to_black_scholes() {
        // Bit-level formula identity at κ₃ = κ₄ = 0.
        for &(theta, kappa2, z) in &[(1.0, 0.2, 0.0), (0.04, 0.3, -0.8), (0.01, 0.15, 1.2)] {
            let c = CumulantData::new(theta, kappa2, 0.0, 0.0, 0.5, 0.4, 0.6, 0.0, 0.0).unwrap();
            let got = put_expansion(z, &c).value;
            let expect =
                normalized_put(z * c.sigma0 / theta.sqrt(), kappa2, theta).unwrap() / kappa2;
            assert!(
                (got - expect).abs() <= 1e-14 * expect.abs().max(1.0),
                "theta={theta} z={z}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn put_expansion_atm_value() {
        // z=0, σ₀=0.2, κ₃=κ₄=0 -> (2Φ(0.1)-1)/0.2
        let c = CumulantData::new(1.0, 0.2, 0.0, 0.0, 0.5, 0.4, 0.6, 0.0, 0.0).unwrap();
        let got = put_expansion(0.0, &c).value;
        assert!((got - 0.3982783727702902).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn expansion_terms_sum_to_value() {
        let c = sample(0.04, -0.2, 0.1, 1.0, 2.0);
        let r = put_expansion(-0.3, &c);
        let sum: f64 = r.leading_terms.iter().map(|(_, v)| v).sum();
        assert_eq!(r.value, sum);
        let (s, k) = atm_asymptotics(&c);
        assert_eq!(s.value, s.leading_terms.iter().map(|(_, v)| v).sum::<f64>());
        assert_eq!(k.value, k.leading_terms.iter().map(|(_, v)| v).sum::<f64>());
    }

    #[test]
    fn iv_expansion_flat_case() {
        let c = sample(0.04, 0.0, 0.0, 0.0, 0.0);
        for &z in &[-1.0, 0.0, 2.0] {
            assert_eq!(iv_expansion(z, &c).unwrap().value, 0.2);
        }
    }

    #[test]
    fn iv_expansion_atm_m_zero() {
        // z=0, m=0: κ₂(1 + (3/2)κ₂κ₃√θ θ^β₁ + (3/2)κ₃²θ^{2β₁} - κ₄θ^β₂)
        let c = sample(0.04, -0.2, 0.1, 0.0, 0.7);
        let st = c.theta.sqrt();
        let t1 = c.theta.powf(c.beta1);
        let t2 = c.theta.powf(c.beta2);
        let expect = c.kappa2
            * (1.0 + 1.5 * c.kappa2 * c.kappa3 * st * t1 + 1.5 * c.kappa3 * c.kappa3 * t1 * t1
                - c.kappa4 * t2);
        let got = iv_expansion(0.0, &c).unwrap().value;
        assert!((got - expect).abs() < 1e-15, "{got} vs {expect}");
    }

    #[test]
    fn iv_expansion_rejects_non_diffusive_scaling() {
        let c = CumulantData::new(0.04, 0.2, -0.1, 0.1, 0.4, 0.4, 0.6, 0.0, 0.0).unwrap();
        assert!(matches!(
            iv_expansion(0.0, &c),
            Err(EdgeworthError::UnsupportedScaling(_))
        ));
    }

    #[test]
    fn atm_skew_svm_case_drops_kurtosis() {
        let c = sample(0.04, -0.4375, 0.1, 1.0, 2.0);
        let (skew, _) = atm_asymptotics(&c);
        assert_eq!(skew.term("kappa4").unwrap(), 0.0);
        let expect = c.kappa3 * c.theta.powf(c.beta1 - 0.5);
        assert!((skew.value - expect).abs() < 1e-15);
    }

    #[test]
    fn atm_skew_symmetric_case() {
        let c = sample(0.04, 0.0, 0.1, 0.0, 0.0);
        let (skew, curv) = atm_asymptotics(&c);
        assert_eq!(skew.term("kappa3").unwrap(), 0.0);
        let expect = 2.0 * c.kappa2 * c.kappa4 * c.theta.powf(c.beta2);
        assert!((skew.value - expect).abs() < 1e-15);
        assert_eq!(curv.term("kappa3").unwrap(), 0.0);
        assert_eq!(curv.term("kappa3_sq").unwrap(), 0.0);
        let curv_expect = 2.0 * c.kappa4 / c.kappa2 * c.theta.powf(c.beta2 - 1.0);
        assert!((curv.value - curv_expect).abs() < 1e-12);
    }

    #[test]
    fn curvature_conventions_differ_by_theta_power() {
        let c = sample(0.04, -0.2, 0.1, 0.0, 0.0);
        let (_, proof) = atm_asymptotics_with(&c, CurvatureConvention::ProofFinal);
        let (_, thm) = atm_asymptotics_with(&c, CurvatureConvention::TheoremStatement);
        let ratio = thm.term("kappa3").unwrap() / proof.term("kappa3").unwrap();
        assert!((ratio - c.theta.powf(2.0 * c.beta0)).abs() < 1e-12);
    }

    #[test]
    fn q_tilde_gaussian_base_case() {
        let c = CumulantData::new(0.04, 0.2, 0.0, 0.0, 0.5, 0.3, 0.6, 1.0, 0.0).unwrap();
        for &x in &[-2.0, 0.0, 1.5] {
            assert!((q_tilde_density(x, &c) - normal_pdf(x + 0.5 * c.sigma0)).abs() < 1e-16);
        }
    }
}
