//! Monte Carlo ground truth for the Heston model with time-decaying
//! leverage `ρ_t = ρ t^{α_ρ}`, where no closed-form characteristic
//! function exists for `α_ρ > 0`.
//!
//! Scheme: full-truncation Euler — the positive part `v⁺` enters the
//! drift and diffusion of the variance and the log-return increment. The
//! leverage is evaluated at the left endpoint of each step.
//!
//! Determinism contract: every antithetic pair (or single path) draws
//! from its own counter-indexed ChaCha substream, blocks of pairs are
//! accumulated sequentially by index, and block results are folded in a
//! fixed order. The same `(seed, n_paths, n_steps_per_year)` therefore
//! produces bitwise-identical estimates for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::blackscholes::{implied_vol, BsError, ForwardContract, Smile};
use crate::models::{heston_sigma0, HestonDLParams, ModelError};
use crate::numerics::{normal_pdf, NumericsError};

#[derive(Debug, Clone, Error)]
pub enum McError {
    #[error("invalid Monte Carlo config: {0}")]
    InvalidConfig(String),
    #[error("all {0} smile points dropped (prices at arbitrage bounds)")]
    AllPointsDropped(usize),
    #[error("smile grid must contain k = 0")]
    MissingAtm,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    BlackScholes(#[from] BsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Discretization scheme; only full-truncation Euler is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McScheme {
    FullTruncationEuler,
}

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McConfig {
    /// Total number of paths (pairs count double when antithetic).
    pub n_paths: usize,
    pub n_steps_per_year: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub scheme: McScheme,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 2_000_000,
            n_steps_per_year: 2000,
            seed: 42,
            antithetic: true,
            scheme: McScheme::FullTruncationEuler,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.n_paths < 10_000 {
            return Err(McError::InvalidConfig(format!(
                "n_paths must be at least 10^4, got {}",
                self.n_paths
            )));
        }
        if self.n_steps_per_year < 250 {
            return Err(McError::InvalidConfig(format!(
                "n_steps_per_year must be at least 250, got {}",
                self.n_steps_per_year
            )));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(McError::InvalidConfig(format!(
                "n_paths must be even with antithetic pairing, got {}",
                self.n_paths
            )));
        }
        Ok(())
    }

    /// Number of independent sampling units (pairs or single paths).
    fn n_units(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }
}

/// A Monte Carlo estimate with its standard error and the number of
/// independent units behind it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_effective: usize,
}

/// Units per accumulation block; fixed so the reduction tree does not
/// depend on the thread count.
const BLOCK_UNITS: usize = 8192;

/// Precomputed per-step leverage schedule.
struct StepSchedule {
    n_steps: usize,
    dt: f64,
    sqrt_dt: f64,
    rho: Vec<f64>,
    rho_ortho: Vec<f64>,
}

fn schedule(p: &HestonDLParams, theta: f64, cfg: &McConfig) -> StepSchedule {
    let n_steps = ((theta * cfg.n_steps_per_year as f64).ceil() as usize).max(1);
    let dt = theta / n_steps as f64;
    let mut rho = Vec::with_capacity(n_steps);
    let mut rho_ortho = Vec::with_capacity(n_steps);
    for i in 0..n_steps {
        // Left endpoint of the step.
        let r = p.rho_at(i as f64 * dt).clamp(-1.0, 1.0);
        rho.push(r);
        rho_ortho.push((1.0 - r * r).sqrt());
    }
    StepSchedule {
        n_steps,
        dt,
        sqrt_dt: dt.sqrt(),
        rho,
        rho_ortho,
    }
}

fn unit_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&unit.to_le_bytes());
    key[16..24].copy_from_slice(b"volivhmc");
    ChaCha8Rng::from_seed(key)
}

/// One Euler path; `flip` negates both driving increments (the antithetic
/// partner re-runs with `flip = true` on the same draws).
#[inline]
fn euler_path(
    p: &HestonDLParams,
    sched: &StepSchedule,
    draws: &[(f64, f64)],
    flip: bool,
) -> f64 {
    let sign = if flip { -1.0 } else { 1.0 };
    let mut v = p.v0;
    let mut z = 0.0;
    for i in 0..sched.n_steps {
        let (xi_w, xi_perp) = draws[i];
        let (xi_w, xi_perp) = (sign * xi_w, sign * xi_perp);
        let vp = v.max(0.0);
        let sqrt_vp = vp.sqrt();
        let xi_b = sched.rho[i] * xi_w + sched.rho_ortho[i] * xi_perp;
        z += -0.5 * vp * sched.dt + sqrt_vp * sched.sqrt_dt * xi_b;
        v += p.kappa * (p.vbar - vp) * sched.dt + p.eta * sqrt_vp * sched.sqrt_dt * xi_w;
    }
    z
}

/// Run `visit` over every sampling unit's terminal log returns, block by
/// block, and fold the per-block outputs in index order.
fn map_blocks<A, M>(
    p: &HestonDLParams,
    theta: f64,
    cfg: &McConfig,
    make: impl Fn() -> A + Sync,
    visit: M,
) -> Result<Vec<A>, McError>
where
    A: Send,
    M: Fn(&mut A, &[f64]) + Sync,
{
    p.validate()?;
    cfg.validate()?;
    if !(theta > 0.0) {
        return Err(McError::InvalidConfig(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let sched = schedule(p, theta, cfg);
    let n_units = cfg.n_units();
    let n_blocks = n_units.div_ceil(BLOCK_UNITS);
    let paths_per_unit = if cfg.antithetic { 2 } else { 1 };

    let blocks: Vec<A> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut acc = make();
            let start = block * BLOCK_UNITS;
            let end = ((block + 1) * BLOCK_UNITS).min(n_units);
            let mut draws = vec![(0.0, 0.0); sched.n_steps];
            let mut unit_z = [0.0f64; 2];
            for unit in start..end {
                let mut rng = unit_rng(cfg.seed, unit as u64);
                for d in draws.iter_mut() {
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let b: f64 = StandardNormal.sample(&mut rng);
                    *d = (a, b);
                }
                unit_z[0] = euler_path(p, &sched, &draws, false);
                if cfg.antithetic {
                    unit_z[1] = euler_path(p, &sched, &draws, true);
                }
                visit(&mut acc, &unit_z[..paths_per_unit]);
            }
            acc
        })
        .collect();
    Ok(blocks)
}

/// Terminal log returns `Z_θ` for every path, ordered by path index.
///
/// Reproducible: identical `(seed, n_paths, n_steps_per_year)` give an
/// identical sample for any thread count.
pub fn simulate_terminal(
    p: &HestonDLParams,
    theta: f64,
    cfg: &McConfig,
) -> Result<Vec<f64>, McError> {
    let blocks = map_blocks(
        p,
        theta,
        cfg,
        Vec::new,
        |acc: &mut Vec<f64>, zs: &[f64]| acc.extend_from_slice(zs),
    )?;
    let mut out = Vec::with_capacity(cfg.n_paths);
    for b in blocks {
        out.extend_from_slice(&b);
    }
    Ok(out)
}

/// Put-payoff moment accumulator over a strike list: per-unit means enter
/// first and second (cross) moments.
struct PayoffStats {
    n: usize,
    sum: Vec<f64>,
    cross: Vec<f64>, // upper triangle, row-major
}

impl PayoffStats {
    fn new(k: usize) -> Self {
        PayoffStats {
            n: 0,
            sum: vec![0.0; k],
            cross: vec![0.0; k * (k + 1) / 2],
        }
    }

    #[inline]
    fn tri(i: usize, j: usize, k: usize) -> usize {
        // i <= j
        i * k - i * (i + 1) / 2 + j
    }

    fn visit(&mut self, payoffs: &[f64]) {
        let k = self.sum.len();
        self.n += 1;
        for i in 0..k {
            self.sum[i] += payoffs[i];
        }
        let mut idx = 0;
        for i in 0..k {
            for j in i..k {
                self.cross[idx] += payoffs[i] * payoffs[j];
                idx += 1;
            }
        }
        debug_assert_eq!(idx, Self::tri(k - 1, k - 1, k) + 1);
    }

    fn merge(&mut self, other: &PayoffStats) {
        self.n += other.n;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
    }

    fn means(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.n as f64).collect()
    }

    /// Covariance of the vector of means: `Cov(ūᵢ, ūⱼ)`.
    fn cov_of_mean(&self, i: usize, j: usize) -> f64 {
        let k = self.sum.len();
        let n = self.n as f64;
        let (lo, hi) = (i.min(j), i.max(j));
        let mean_i = self.sum[i] / n;
        let mean_j = self.sum[j] / n;
        let second = self.cross[Self::tri(lo, hi, k)] / n;
        ((second - mean_i * mean_j) / (n - 1.0)).max(0.0)
    }
}

struct PricedGrid {
    stats: PayoffStats,
}

fn price_grid(
    p: &HestonDLParams,
    theta: f64,
    ks: &[f64],
    cfg: &McConfig,
) -> Result<PricedGrid, McError> {
    let strikes: Vec<f64> = ks.iter().map(|k| k.exp()).collect();
    let nk = strikes.len();
    let blocks = map_blocks(
        p,
        theta,
        cfg,
        || PayoffStats::new(nk),
        |acc: &mut PayoffStats, zs: &[f64]| {
            let mut payoffs = vec![0.0; nk];
            let inv = 1.0 / zs.len() as f64;
            for &z in zs {
                let s = z.exp();
                for (i, &strike) in strikes.iter().enumerate() {
                    payoffs[i] += (strike - s).max(0.0) * inv;
                }
            }
            acc.visit(&payoffs);
        },
    )?;
    let mut stats = PayoffStats::new(nk);
    for b in &blocks {
        stats.merge(b);
    }
    Ok(PricedGrid { stats })
}

/// Black-Scholes vega in forward units (`F = 1`, `r = 0`).
fn vega(k: f64, vol: f64, theta: f64) -> f64 {
    let st = theta.sqrt();
    let d1 = (-k + 0.5 * vol * vol * theta) / (vol * st);
    st * normal_pdf(d1)
}

/// A Monte Carlo smile with per-point estimates and dropped points.
#[derive(Debug, Clone)]
pub struct McSmile {
    pub smile: Smile,
    /// Implied-vol estimates (delta-propagated standard errors), aligned
    /// with `smile.points`.
    pub estimates: Vec<McEstimate>,
    /// Put prices in forward units, aligned with `smile.points`.
    pub prices: Vec<f64>,
    pub dropped: Vec<(f64, String)>,
}

/// Simulate once and price every strike in `ks` (which must contain 0),
/// then invert to implied volatilities. Standard errors are propagated
/// through the Black-Scholes vega.
pub fn mc_smile(
    p: &HestonDLParams,
    theta: f64,
    ks: &[f64],
    cfg: &McConfig,
) -> Result<McSmile, McError> {
    if !ks.iter().any(|&k| k == 0.0) {
        return Err(McError::MissingAtm);
    }
    let priced = price_grid(p, theta, ks, cfg)?;
    let means = priced.stats.means();
    let n_units = priced.stats.n;
    let contract = ForwardContract {
        forward: 1.0,
        rate: 0.0,
        maturity: theta,
    };

    let mut points = Vec::new();
    let mut estimates = Vec::new();
    let mut prices = Vec::new();
    let mut dropped = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let price = means[i];
        match implied_vol(&contract, k.exp(), price) {
            Ok(iv) => {
                let se_price = priced.stats.cov_of_mean(i, i).sqrt();
                let se_iv = se_price / vega(k, iv, theta);
                points.push((k, iv));
                estimates.push(McEstimate {
                    value: iv,
                    std_error: se_iv,
                    n_effective: n_units,
                });
                prices.push(price);
            }
            Err(e @ (BsError::PriceBelowIntrinsic { .. } | BsError::PriceAboveStrike { .. })) => {
                dropped.push((k, e.to_string()));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if points.is_empty() {
        return Err(McError::AllPointsDropped(ks.len()));
    }
    Ok(McSmile {
        smile: Smile::new(theta, points)?,
        estimates,
        prices,
        dropped,
    })
}

/// ATM skew/curvature estimates from a five-point Richardson stencil on
/// the Monte Carlo smile, with standard errors carried through the full
/// covariance of the five price estimates (the strikes share paths, so
/// their errors are strongly correlated and mostly cancel in the
/// differences).
#[derive(Debug, Clone, Copy)]
pub struct McAtm {
    pub skew: McEstimate,
    pub curvature: McEstimate,
    pub atm_iv: McEstimate,
    /// The stencil step actually used.
    pub h: f64,
}

pub fn mc_atm(
    p: &HestonDLParams,
    theta: f64,
    cfg: &McConfig,
    fd_scale: f64,
) -> Result<McAtm, McError> {
    let sigma0 = heston_sigma0(p, theta);
    let h = fd_scale * sigma0;
    let ks = [-2.0 * h, -h, 0.0, h, 2.0 * h];
    let priced = price_grid(p, theta, &ks, cfg)?;
    let means = priced.stats.means();
    let n_units = priced.stats.n;
    let contract = ForwardContract {
        forward: 1.0,
        rate: 0.0,
        maturity: theta,
    };

    let mut ivs = [0.0; 5];
    let mut vegas = [0.0; 5];
    for i in 0..5 {
        let iv = implied_vol(&contract, ks[i].exp(), means[i])?;
        ivs[i] = iv;
        vegas[i] = vega(ks[i], iv, theta);
    }

    // IV covariance via the delta method through the price->vol inverse.
    let iv_cov = |i: usize, j: usize| priced.stats.cov_of_mean(i, j) / (vegas[i] * vegas[j]);

    let w_skew = [1.0, -8.0, 0.0, 8.0, -1.0].map(|w| w / (12.0 * h));
    let w_curv = [-1.0, 16.0, -30.0, 16.0, -1.0].map(|w| w / (12.0 * h * h));
    let combine = |w: &[f64; 5]| {
        let value: f64 = (0..5).map(|i| w[i] * ivs[i]).sum();
        let mut var = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                var += w[i] * w[j] * iv_cov(i, j);
            }
        }
        (value, var.max(0.0).sqrt())
    };
    let (skew, skew_se) = combine(&w_skew);
    let (curv, curv_se) = combine(&w_curv);
    Ok(McAtm {
        skew: McEstimate {
            value: skew,
            std_error: skew_se,
            n_effective: n_units,
        },
        curvature: McEstimate {
            value: curv,
            std_error: curv_se,
            n_effective: n_units,
        },
        atm_iv: McEstimate {
            value: ivs[2],
            std_error: iv_cov(2, 2).sqrt(),
            n_effective: n_units,
        },
        h,
    })
}

/// Deterministic pairwise mean of a sample (used by tests and the
/// martingale diagnostics; summation order is independent of threading).
pub fn pairwise_mean(xs: &[f64]) -> f64 {
    fn sum(xs: &[f64]) -> f64 {
        if xs.len() <= 32 {
            xs.iter().sum()
        } else {
            let mid = xs.len() / 2;
            sum(&xs[..mid]) + sum(&xs[mid..])
        }
    }
    sum(xs) / xs.len() as f64
}
