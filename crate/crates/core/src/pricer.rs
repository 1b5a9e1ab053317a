//! Ground-truth option prices and smiles from exact characteristic
//! functions, plus finite-difference ATM skew/curvature extraction.
//!
//! Put prices come from a single damped Fourier integral along the
//! contour `Im(u) = damping` inside the characteristic function's
//! analyticity strip. Writing `z = log(K/F)/σ₀` and `ν` for the damping,
//!
//! ```text
//! p(K, θ) = e^{-rθ} K e^{νz} (σ₀/π) ∫₀^∞ Re[ e^{iuz} φ_X(-u + iν)
//!             / ((ν + iu)(ν + σ₀ + iu)) ] du
//! ```
//!
//! which equals the exact double-integral put representation whenever
//! `E[e^{-νX_θ}] < ∞`. The smile derivative extraction uses five-point
//! Richardson stencils with a step proportional to the distribution's
//! width, `h = 0.05 σ₀`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::blackscholes::{implied_vol, BsError, ForwardContract, Smile};
use crate::edgeworth::atm_asymptotics;
use crate::mc::{mc_atm, McConfig, McError};
use crate::models::{cgmy_cf, gamma_cf, ModelError, ModelSpec};
use crate::numerics::{integrate, NumericsError, QuadratureSpec};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum PricerError {
    #[error("damping {damping} outside the characteristic function's strip")]
    StripViolation { damping: f64 },
    #[error("non-finite price integrand")]
    NonFiniteIntegrand,
    #[error("smile quality: {dropped} of {total} grid points dropped")]
    SmileQuality { dropped: usize, total: usize },
    #[error("invalid pricing grid: {0}")]
    InvalidGrid(String),
    #[error("model {0} has no numeric pricing engine (asymptotics only)")]
    NoNumericEngine(&'static str),
    #[error("all {0} maturities failed")]
    AllMaturitiesFailed(usize),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    BlackScholes(#[from] BsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
}

/// Strike grid and contour parameters for one maturity.
#[derive(Debug, Clone)]
pub struct PricingGrid {
    pub maturity: f64,
    /// Log-moneyness points, strictly increasing and containing 0.
    pub log_moneyness: Vec<f64>,
    /// Contour shift `ν > 0` inside the analyticity strip.
    pub damping: f64,
    pub quad: QuadratureSpec,
}

impl PricingGrid {
    pub fn validate(&self) -> Result<(), PricerError> {
        if !(self.maturity > 0.0) {
            return Err(PricerError::InvalidGrid(format!(
                "maturity {} must be positive",
                self.maturity
            )));
        }
        if !(self.damping > 0.0) {
            return Err(PricerError::InvalidGrid(format!(
                "damping {} must be positive",
                self.damping
            )));
        }
        if !self.log_moneyness.iter().any(|&k| k == 0.0) {
            return Err(PricerError::InvalidGrid(
                "log-moneyness grid must contain 0".into(),
            ));
        }
        for w in self.log_moneyness.windows(2) {
            if !(w[0] < w[1]) {
                return Err(PricerError::InvalidGrid(
                    "log-moneyness grid must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Default contour shift: inside both distribution-based models' strips
/// for θ ∈ (0, 1] at the figure parameters.
pub const DEFAULT_DAMPING: f64 = 1.5;
/// Finite-difference step as a fraction of σ₀.
pub const DEFAULT_FD_SCALE: f64 = 0.05;

/// Numeric and asymptotic ATM term structures on a common θ grid,
/// ordered with θ strictly decreasing toward 0.
#[derive(Debug, Clone, Default)]
pub struct AtmTermStructure {
    pub thetas: Vec<f64>,
    pub skew_numeric: Vec<f64>,
    pub skew_asym: Vec<f64>,
    pub curv_numeric: Vec<f64>,
    pub curv_asym: Vec<f64>,
    /// Monte Carlo standard errors, present only for simulated models.
    pub skew_std_error: Option<Vec<f64>>,
    pub curv_std_error: Option<Vec<f64>>,
}

/// Put price from the characteristic function of the normalized return.
///
/// `cf` must evaluate `E[e^{iuX_θ}]` for complex `u` with `Im(u) = damping`;
/// a non-finite value at `iν` (the negative-exponential moment) is
/// reported as a strip violation.
pub fn put_from_cf(
    cf: &(dyn Fn(Complex64) -> Complex64 + Sync),
    c: &ForwardContract,
    strike: f64,
    damping: f64,
    quad: &QuadratureSpec,
    sigma0: f64,
) -> Result<f64, PricerError> {
    if strike <= 0.0 {
        return Err(PricerError::InvalidGrid(format!(
            "strike {strike} must be positive"
        )));
    }
    if !(damping > 0.0) || !(sigma0 > 0.0) {
        return Err(PricerError::InvalidGrid(format!(
            "damping {damping} and sigma0 {sigma0} must be positive"
        )));
    }
    let probe = cf(Complex64::new(0.0, damping));
    if !probe.re.is_finite() || !probe.im.is_finite() {
        return Err(PricerError::StripViolation { damping });
    }
    let z = (strike / c.forward).ln() / sigma0;
    let nu = damping;
    let integrand = move |u: f64| {
        let phase = Complex64::new(0.0, u * z).exp();
        let denom = Complex64::new(nu, u) * Complex64::new(nu + sigma0, u);
        (phase * cf(Complex64::new(-u, nu)) / denom).re
    };
    let result = integrate(integrand, 0.0, f64::INFINITY, quad)?;
    if !result.value.is_finite() {
        return Err(PricerError::NonFiniteIntegrand);
    }
    let price = c.discount() * strike * (nu * z).exp() * sigma0 / std::f64::consts::PI
        * result.value;
    Ok(price.max(0.0))
}

/// CDF of the normalized return by Gil-Pelaez inversion:
/// `F(x) = 1/2 - (1/π) ∫₀^∞ Im[e^{-iux} φ(u)]/u du`.
pub fn cdf_from_cf(
    cf: &(dyn Fn(Complex64) -> Complex64 + Sync),
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64, PricerError> {
    let integrand = move |u: f64| {
        let phase = Complex64::new(0.0, -u * x).exp();
        (phase * cf(Complex64::new(u, 0.0))).im / u
    };
    let tail = integrate(integrand, 0.0, f64::INFINITY, quad)?;
    Ok(0.5 - tail.value / std::f64::consts::PI)
}

/// Density of the normalized return by Fourier inversion:
/// `p(x) = (1/π) ∫₀^∞ Re[e^{-iux} φ(u)] du`.
pub fn density_from_cf(
    cf: &(dyn Fn(Complex64) -> Complex64 + Sync),
    x: f64,
    quad: &QuadratureSpec,
) -> Result<f64, PricerError> {
    let integrand = move |u: f64| {
        let phase = Complex64::new(0.0, -u * x).exp();
        (phase * cf(Complex64::new(u, 0.0))).re
    };
    let r = integrate(integrand, 0.0, f64::INFINITY, quad)?;
    Ok(r.value / std::f64::consts::PI)
}

/// A smile with the grid points that had to be dropped (price at an
/// arbitrage bound), each with the reason.
#[derive(Debug, Clone)]
pub struct SmileResult {
    pub smile: Smile,
    pub dropped: Vec<(f64, String)>,
}

/// Price the grid and invert to implied volatilities. Points whose price
/// sits outside the arbitrage interior are dropped and recorded, never
/// clamped; more than 20% dropped is an error.
pub fn smile_from_cf(
    cf: &(dyn Fn(Complex64) -> Complex64 + Sync),
    c: &ForwardContract,
    grid: &PricingGrid,
    sigma0: f64,
) -> Result<SmileResult, PricerError> {
    grid.validate()?;
    let total = grid.log_moneyness.len();
    let mut points = Vec::with_capacity(total);
    let mut dropped = Vec::new();
    for &k in &grid.log_moneyness {
        let strike = c.forward * k.exp();
        let price = put_from_cf(cf, c, strike, grid.damping, &grid.quad, sigma0)?;
        match implied_vol(c, strike, price) {
            Ok(iv) => points.push((k, iv)),
            Err(e @ (BsError::PriceBelowIntrinsic { .. } | BsError::PriceAboveStrike { .. })) => {
                dropped.push((k, e.to_string()));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if dropped.len() * 5 > total {
        return Err(PricerError::SmileQuality {
            dropped: dropped.len(),
            total,
        });
    }
    Ok(SmileResult {
        smile: Smile::new(grid.maturity, points)?,
        dropped,
    })
}

/// Five-point Richardson estimates of the ATM slope and curvature of a
/// smile function evaluated at `{-2h, -h, 0, h, 2h}`.
pub fn numerical_atm<F>(mut smile_fn: F, h: f64) -> Result<(f64, f64), PricerError>
where
    F: FnMut(f64) -> Result<f64, PricerError>,
{
    if !(h > 0.0) {
        return Err(PricerError::InvalidGrid(format!("step {h} must be positive")));
    }
    let mut v = [0.0; 5];
    for (i, mult) in [-2.0, -1.0, 0.0, 1.0, 2.0].iter().enumerate() {
        v[i] = smile_fn(mult * h)?;
        if !v[i].is_finite() {
            return Err(PricerError::NonFiniteIntegrand);
        }
    }
    let skew = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
    let curvature = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
    Ok((skew, curvature))
}

/// Geometric θ grid used by the figure reproductions: 12 points from 0.25
/// down to 0.004.
pub fn figure_theta_grid() -> Vec<f64> {
    let (lo, hi, n) = (0.004f64, 0.25f64, 12usize);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|j| (lhi + (llo - lhi) * j as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Controls for [`term_structure`].
#[derive(Debug, Clone)]
pub struct TermStructureConfig {
    pub damping: f64,
    pub quad: QuadratureSpec,
    /// Finite-difference step as a fraction of σ₀(θ).
    pub fd_scale: f64,
    /// Monte Carlo settings, used when the model has no closed-form
    /// characteristic function (Heston with decaying leverage).
    pub mc: McConfig,
}

impl Default for TermStructureConfig {
    fn default() -> Self {
        TermStructureConfig {
            damping: DEFAULT_DAMPING,
            quad: QuadratureSpec::default(),
            fd_scale: DEFAULT_FD_SCALE,
            mc: McConfig::default(),
        }
    }
}

/// The smile slice at one maturity as a reusable closure over k.
fn cf_smile_fn<'a>(
    model: &'a ModelSpec,
    theta: f64,
    cfg: &'a TermStructureConfig,
    sigma0: f64,
) -> Option<impl Fn(f64) -> Result<f64, PricerError> + 'a> {
    let cf: Box<dyn Fn(Complex64) -> Complex64 + Sync> = match model {
        ModelSpec::GammaReturn(p) => {
            let p = *p;
            Box::new(move |u| {
                gamma_cf(u, &p, theta).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            })
        }
        ModelSpec::CgmyReturn(p) => {
            let p = *p;
            Box::new(move |u| cgmy_cf(u, &p, theta).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
        }
        _ => return None,
    };
    let contract = ForwardContract {
        forward: 1.0,
        rate: 0.0,
        maturity: theta,
    };
    Some(move |k: f64| {
        let price = put_from_cf(&*cf, &contract, k.exp(), cfg.damping, &cfg.quad, sigma0)?;
        Ok(implied_vol(&contract, k.exp(), price)?)
    })
}

struct ThetaRow {
    theta: f64,
    skew_numeric: f64,
    skew_asym: f64,
    curv_numeric: f64,
    curv_asym: f64,
    skew_se: Option<f64>,
    curv_se: Option<f64>,
}

fn term_structure_row(
    model: &ModelSpec,
    theta: f64,
    cfg: &TermStructureConfig,
) -> Result<ThetaRow, PricerError> {
    let cumulants = model.cumulants(theta, &cfg.quad)?;
    let (skew_asym, curv_asym) = atm_asymptotics(&cumulants);
    let h = cfg.fd_scale * cumulants.sigma0;

    match model {
        ModelSpec::GammaReturn(_) | ModelSpec::CgmyReturn(_) => {
            let smile_fn = cf_smile_fn(model, theta, cfg, cumulants.sigma0)
                .expect("CF models have a smile function");
            let (skew, curv) = numerical_atm(smile_fn, h)?;
            Ok(ThetaRow {
                theta,
                skew_numeric: skew,
                skew_asym: skew_asym.value,
                curv_numeric: curv,
                curv_asym: curv_asym.value,
                skew_se: None,
                curv_se: None,
            })
        }
        ModelSpec::HestonDecayingLeverage(p) => {
            let atm = mc_atm(p, theta, &cfg.mc, cfg.fd_scale)?;
            Ok(ThetaRow {
                theta,
                skew_numeric: atm.skew.value,
                skew_asym: skew_asym.value,
                curv_numeric: atm.curvature.value,
                curv_asym: curv_asym.value,
                skew_se: Some(atm.skew.std_error),
                curv_se: Some(atm.curvature.std_error),
            })
        }
        other => Err(PricerError::NoNumericEngine(other.name())),
    }
}

/// Numeric (Fourier or Monte Carlo) versus asymptotic ATM term structure.
///
/// Per-θ failures are recorded and skipped; only a fully failed grid is an
/// error. Rows come back ordered by decreasing θ, and the parallel map is
/// collected in grid order so output is identical to a sequential run.
pub fn term_structure(
    model: &ModelSpec,
    thetas: &[f64],
    cfg: &TermStructureConfig,
) -> Result<(AtmTermStructure, Vec<(f64, String)>), PricerError> {
    let mut sorted: Vec<f64> = thetas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();

    let rows: Vec<Result<ThetaRow, PricerError>> = sorted
        .par_iter()
        .map(|&theta| term_structure_row(model, theta, cfg))
        .collect();

    let mut ts = AtmTermStructure::default();
    let has_se = matches!(model, ModelSpec::HestonDecayingLeverage(_));
    if has_se {
        ts.skew_std_error = Some(Vec::new());
        ts.curv_std_error = Some(Vec::new());
    }
    let mut failures = Vec::new();
    for (theta, row) in sorted.iter().zip(rows) {
        match row {
            Ok(r) => {
                ts.thetas.push(r.theta);
                ts.skew_numeric.push(r.skew_numeric);
                ts.skew_asym.push(r.skew_asym);
                ts.curv_numeric.push(r.curv_numeric);
                ts.curv_asym.push(r.curv_asym);
                if let (Some(v), Some(se)) = (ts.skew_std_error.as_mut(), r.skew_se) {
                    v.push(se);
                }
                if let (Some(v), Some(se)) = (ts.curv_std_error.as_mut(), r.curv_se) {
                    v.push(se);
                }
            }
            Err(e) => failures.push((*theta, e.to_string())),
        }
    }
    if ts.thetas.is_empty() && !sorted.is_empty() {
        return Err(PricerError::AllMaturitiesFailed(sorted.len()));
    }
    Ok((ts, failures))
}

/// Write a smile as CSV (`theta,k,iv,price` plus `std_error` when given).
/// Shared by the CLI and tests so output stays byte-identical.
pub fn write_smile_csv<W: std::io::Write>(
    out: &mut W,
    smile: &Smile,
    prices: &[f64],
    std_errors: Option<&[f64]>,
) -> std::io::Result<()> {
    if std_errors.is_some() {
        writeln!(out, "theta,k,iv,price,std_error")?;
    } else {
        writeln!(out, "theta,k,iv,price")?;
    }
    for (i, &(k, iv)) in smile.points.iter().enumerate() {
        match std_errors {
            Some(se) => writeln!(
                out,
                "{},{},{},{},{}",
                smile.maturity, k, iv, prices[i], se[i]
            )?,
            None => writeln!(out, "{},{},{},{}", smile.maturity, k, iv, prices[i])?,
        }
    }
    Ok(())
}

/// Write a term structure as CSV
/// (`theta,skew_numeric,skew_asym,curv_numeric,curv_asym` plus standard
/// error columns when present).
pub fn write_term_structure_csv<W: std::io::Write>(
    out: &mut W,
    ts: &AtmTermStructure,
) -> std::io::Result<()> {
    let with_se = ts.skew_std_error.is_some();
    if with_se {
        writeln!(
            out,
            "theta,skew_numeric,skew_asym,curv_numeric,curv_asym,skew_std_error,curv_std_error"
        )?;
    } else {
        writeln!(out, "theta,skew_numeric,skew_asym,curv_numeric,curv_asym")?;
    }
    for i in 0..ts.thetas.len() {
        if with_se {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                ts.thetas[i],
                ts.skew_numeric[i],
                ts.skew_asym[i],
                ts.curv_numeric[i],
                ts.curv_asym[i],
                ts.skew_std_error.as_ref().expect("checked")[i],
                ts.curv_std_error.as_ref().expect("checked")[i],
            )?;
        } else {
            writeln!(
                out,
                "{},{},{},{},{}",
                ts.thetas[i],
                ts.skew_numeric[i],
                ts.skew_asym[i],
                ts.curv_numeric[i],
                ts.curv_asym[i],
            )?;
        }
    }
    Ok(())
}

/// Convex-order diagnostic: call prices `E[(e^{σ₀X_s} - a)₊]` on a coarse
/// grid of maturities, for manual inspection of the marginal-ordering
/// assumption. Reports values and whether each strike's column is
/// non-decreasing in s; nothing is enforced.
pub fn convex_order_report(
    model: &ModelSpec,
    thetas: &[f64],
    strikes: &[f64],
    cfg: &TermStructureConfig,
) -> Result<Vec<(f64, Vec<(f64, f64)>, bool)>, PricerError> {
    let mut report = Vec::new();
    for &a in strikes {
        let mut column = Vec::new();
        for &theta in thetas {
            let cumulants = model.cumulants(theta, &cfg.quad)?;
            let smile = cf_smile_fn(model, theta, cfg, cumulants.sigma0);
            let Some(_) = smile else {
                return Err(PricerError::NoNumericEngine(model.name()));
            };
            let contract = ForwardContract {
                forward: 1.0,
                rate: 0.0,
                maturity: theta,
            };
            let cf: Box<dyn Fn(Complex64) -> Complex64 + Sync> = match model {
                ModelSpec::GammaReturn(p) => {
                    let p = *p;
                    Box::new(move |u| {
                        gamma_cf(u, &p, theta).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                    })
                }
                ModelSpec::CgmyReturn(p) => {
                    let p = *p;
                    Box::new(move |u| {
                        cgmy_cf(u, &p, theta).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                    })
                }
                other => return Err(PricerError::NoNumericEngine(other.name())),
            };
            let put = put_from_cf(&*cf, &contract, a, cfg.damping, &cfg.quad, cumulants.sigma0)?;
            // call = put + F - K with r = 0, F = 1
            column.push((theta, put + 1.0 - a));
        }
        column.sort_by(|x, y| x.0.total_cmp(&y.0));
        let monotone = column.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-10);
        report.push((a, column, monotone));
    }
    Ok(report)
}
