//! Special functions, principal-branch complex powers, deterministic
//! quadrature and bracketed root finding.
//!
//! Everything in this module is pure and re-entrant; it is safe to call
//! any of these functions from any number of threads concurrently.

mod quadrature;
mod roots;

pub use quadrature::{integrate, integrate_complex, Bound, QuadResult, QuadratureSpec, Scheme};
pub use roots::find_root;

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("Hermite degree {0} unsupported (max 10)")]
    UnsupportedDegree(usize),
    #[error("gamma function pole at non-positive integer {0}")]
    GammaPole(f64),
    #[error("complex power of zero with non-positive exponent {exponent}")]
    ComplexPowDomain { exponent: f64 },
    #[error(
        "quadrature accuracy not reached after {subdivisions} subdivisions: \
         best estimate {estimate}, error bound {error:e}"
    )]
    AccuracyNotReached {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo)={flo:e}, f(hi)={fhi:e}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("non-finite function value at {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

/// Probabilists' Hermite polynomial `H_n(x)`.
///
/// Convention: `H_0 = 1`, `H_1 = x`, `H_{n+1}(x) = x H_n(x) - n H_{n-1}(x)`,
/// so that `∫ φ(x) H_j(x) H_k(x) dx = j! δ_{jk}`. Only degrees up to 6 are
/// used by the expansions; the cap at 10 guards against misuse.
pub fn hermite(n: usize, x: f64) -> Result<f64, NumericsError> {
    if n > 10 {
        return Err(NumericsError::UnsupportedDegree(n));
    }
    Ok(hermite_unchecked(n, x))
}

/// `hermite` without the degree check, for hot loops over fixed small n.
#[inline]
pub(crate) fn hermite_unchecked(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0; // H_{k-1}
            let mut cur = x; // H_k
            for k in 1..n {
                let next = x * cur - (k as f64) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal density `φ(x) = exp(-x²/2)/√(2π)`.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function `Φ(x)`, via the complementary
/// error function. Absolute error below 1e-15 on the whole real line.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / SQRT_2)
}

/// Euler gamma function for real non-pole arguments.
///
/// Negative non-integer arguments go through the reflection formula.
pub fn gamma_fn(x: f64) -> Result<f64, NumericsError> {
    if x <= 0.0 && x == x.floor() {
        return Err(NumericsError::GammaPole(x));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// Principal-branch complex power `z^y = exp(y · Log z)`.
///
/// `Log` is the principal logarithm with `arg ∈ (−π, π]`. `0^y` is 0 for
/// positive `y` and a domain error otherwise.
pub fn complex_pow(z: Complex64, y: f64) -> Result<Complex64, NumericsError> {
    if z.re == 0.0 && z.im == 0.0 {
        if y > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(NumericsError::ComplexPowDomain { exponent: y });
    }
    Ok(z.powf(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_low_degrees() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite(1, 3.7).unwrap(), 3.7);
        // H2(0) = -1
        assert_eq!(hermite(2, 0.0).unwrap(), -1.0);
        // H3(1) = 1 - 3 = -2
        assert_eq!(hermite(3, 1.0).unwrap(), -2.0);
        // H6(2) = 64 - 240 + 180 - 15 = -11
        assert_eq!(hermite(6, 2.0).unwrap(), -11.0);
    }

    #[test]
    fn hermite_degree_cap() {
        assert!(hermite(10, 0.3).is_ok());
        assert!(matches!(
            hermite(11, 0.3),
            Err(NumericsError::UnsupportedDegree(11))
        ));
    }

    #[test]
    fn normal_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_pdf(0.0) - 0.3989422804014327).abs() < 1e-16);
        // High-precision erf oracle value for Φ(0.1).
        assert!((normal_cdf(0.1) - 0.539827837277029).abs() < 1e-15);
        assert!((normal_cdf(-0.1) - (1.0 - 0.539827837277029)).abs() < 1e-15);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(4.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((gamma_fn(0.5).unwrap() - 1.7724538509055159).abs() < 1e-12);
        assert!((gamma_fn(-0.5).unwrap() - (-3.5449077018110318)).abs() / 3.5449 < 1e-12);
        assert!(matches!(gamma_fn(0.0), Err(NumericsError::GammaPole(_))));
        assert!(matches!(gamma_fn(-3.0), Err(NumericsError::GammaPole(_))));
    }

    #[test]
    fn complex_pow_principal_branch() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(complex_pow(one, 2.0).unwrap(), one);
        let i = Complex64::new(0.0, 1.0);
        let m1 = complex_pow(i, 2.0).unwrap();
        assert!((m1.re + 1.0).abs() < 1e-15 && m1.im.abs() < 1e-15);
        // (1+i)^(1/2) = 2^(1/4) · exp(iπ/8)
        let r = complex_pow(Complex64::new(1.0, 1.0), 0.5).unwrap();
        assert!((r.re - 1.09868411346781).abs() < 1e-8);
        assert!((r.im - 0.45508986056222733).abs() < 1e-8);
        // zero base
        assert_eq!(
            complex_pow(Complex64::new(0.0, 0.0), 1.5).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(complex_pow(Complex64::new(0.0, 0.0), -1.0).is_err());
    }
}
