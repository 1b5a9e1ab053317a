//! Model catalog: parameterizations that produce [`CumulantData`] and,
//! where available, exact characteristic functions of the normalized
//! return `X_θ`.
//!
//! Two distribution-based models (Gamma return, CGMY return) come with
//! closed-form characteristic functions and belong to the `(m,n) = (0,0)`
//! family. Stochastic volatility models (Heston with decaying leverage,
//! 3/2, rough Bergomi) belong to `(m,n) = (1,2)`; for those only the
//! cumulant coefficients are produced here — ground truth comes from the
//! Monte Carlo engine.

mod cgmy;
mod gamma;
mod rough_bergomi;
mod svm;

pub use cgmy::{cgmy_cf, cgmy_cumulants, CgmyReturnParams};
pub use gamma::{gamma_cf, gamma_cumulants, GammaReturnParams};
pub use rough_bergomi::{
    rough_bergomi_coeffs, rough_bergomi_coeffs_with_curve, RoughBergomiAsymParams,
};
pub use svm::{
    heston_coeffs, heston_sigma0, svm_coeffs, three_halves_coeffs,
    three_halves_kappa4_from_svm, HestonDLParams, ThreeHalvesParams,
};

use crate::edgeworth::EdgeworthError;
use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("invalid model parameter: {0}")]
    InvalidParams(String),
    #[error("maturity {0} outside (0, 1]")]
    ThetaOutOfRange(f64),
    #[error("gamma scale {gamma} >= 1 at theta {theta}: martingale shift undefined")]
    GammaScaleTooLarge { gamma: f64, theta: f64 },
    #[error("CGMY tempering M = {m} <= 1 at theta {theta}: martingale shift undefined")]
    TemperingTooSmall { m: f64, theta: f64 },
    #[error("CGMY activity index Y = {0} hits a gamma pole (Y in {{1, 2}})")]
    ActivityIndexPole(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Cumulants(#[from] EdgeworthError),
}

/// Tagged union of the model parameterizations understood by the pricing
/// and term-structure drivers.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    GammaReturn(GammaReturnParams),
    CgmyReturn(CgmyReturnParams),
    HestonDecayingLeverage(HestonDLParams),
    ThreeHalves(ThreeHalvesParams),
    RoughBergomiAsym(RoughBergomiAsymParams),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::GammaReturn(_) => "gamma",
            ModelSpec::CgmyReturn(_) => "cgmy",
            ModelSpec::HestonDecayingLeverage(_) => "heston",
            ModelSpec::ThreeHalves(_) => "three_halves",
            ModelSpec::RoughBergomiAsym(_) => "rough_bergomi",
        }
    }

    /// Cumulant data at maturity `theta` for whichever model is configured.
    pub fn cumulants(
        &self,
        theta: f64,
        quad: &crate::numerics::QuadratureSpec,
    ) -> Result<crate::edgeworth::CumulantData, ModelError> {
        match self {
            ModelSpec::GammaReturn(p) => gamma_cumulants(p, theta),
            ModelSpec::CgmyReturn(p) => cgmy_cumulants(p, theta),
            ModelSpec::HestonDecayingLeverage(p) => heston_coeffs(p, theta),
            ModelSpec::ThreeHalves(p) => three_halves_coeffs(p, theta),
            ModelSpec::RoughBergomiAsym(p) => rough_bergomi_coeffs(p, theta, quad),
        }
    }
}
