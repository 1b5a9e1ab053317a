//! Short-maturity implied-volatility asymptotics.
//!
//! The library is organized around a single parameterization of the log
//! return distribution — its volatility scale, third and fourth cumulant
//! coefficients and their decay exponents — from which generalized
//! Edgeworth expansions of option prices, implied volatility, and the
//! at-the-money skew and curvature are evaluated in closed form. Exact
//! pricing engines (Fourier inversion over characteristic functions,
//! Monte Carlo for stochastic volatility with time-decaying leverage)
//! provide the ground truth the expansions are checked against, and an
//! option-quote pipeline extracts empirical skew/curvature term structures
//! and fits power laws to them.
//!
//! Modules:
//! - [`numerics`]: special functions, quadrature, root finding
//! - [`blackscholes`]: Black-Scholes pricing and implied-vol inversion
//! - [`edgeworth`]: density/characteristic-function approximators and the
//!   price, implied-vol and ATM expansions
//! - [`models`]: Gamma-return, CGMY-return, stochastic-volatility and
//!   rough-Bergomi cumulant catalogs plus exact characteristic functions
//! - [`pricer`]: damped Fourier pricing and numerical smile derivatives
//! - [`mc`]: deterministic parallel Monte Carlo for the Heston model with
//!   decaying leverage
//! - [`empirical`]: quote filtering, spline smiles, power-law fitting

pub mod blackscholes;
pub mod edgeworth;
pub mod empirical;
pub mod mc;
pub mod models;
pub mod numerics;
pub mod pricer;
pub mod spline;
