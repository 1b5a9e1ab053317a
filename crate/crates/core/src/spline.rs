//! Natural cubic spline interpolation with derivative evaluation.
//!
//! Solved by the Thomas algorithm (O(n) tridiagonal solve) with natural
//! boundary conditions `S''(x₀) = S''(xₙ₋₁) = 0`. Evaluation uses binary
//! search plus Horner form; first and second derivatives come from the
//! same piecewise coefficients.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SplineError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("abscissae must be strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("non-finite input at index {0}")]
    NonFinite(usize),
    #[error("evaluation point {x} outside [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
}

/// On interval `[xᵢ, xᵢ₊₁]`: `S(x) = a + b·dx + c·dx² + d·dx³`, `dx = x - xᵢ`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

/// Natural cubic spline through `(x, y)` points.
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    xs: Vec<f64>,
    segments: Vec<Segment>,
}

impl NaturalCubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, SplineError> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(SplineError::TooFewPoints {
                need: 3,
                got: n.min(ys.len()),
            });
        }
        for i in 0..n {
            if !xs[i].is_finite() || !ys[i].is_finite() {
                return Err(SplineError::NonFinite(i));
            }
            if i + 1 < n && !(xs[i] < xs[i + 1]) {
                return Err(SplineError::NotIncreasing(i));
            }
        }

        // Solve for second derivatives m_i (natural: m_0 = m_{n-1} = 0)
        // via the standard tridiagonal system.
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        // Thomas sweep on the interior unknowns.
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let sub = if i > 1 { h[i - 1] } else { 0.0 };
            let denom = diag[i] - sub * c_prime[i - 1];
            c_prime[i] = h[i] / denom;
            d_prime[i] = (rhs[i] - sub * d_prime[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        }

        let segments = (0..n - 1)
            .map(|i| Segment {
                a: ys[i],
                b: (ys[i + 1] - ys[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0,
                c: 0.5 * m[i],
                d: (m[i + 1] - m[i]) / (6.0 * h[i]),
            })
            .collect();
        Ok(NaturalCubicSpline { xs, segments })
    }

    fn segment_at(&self, x: f64) -> Result<(usize, f64), SplineError> {
        let lo = self.xs[0];
        let hi = *self.xs.last().expect("non-empty");
        if x < lo || x > hi {
            return Err(SplineError::OutOfRange { x, lo, hi });
        }
        let idx = match self.xs.binary_search_by(|probe| probe.total_cmp(&x)) {
            Ok(i) => i.min(self.segments.len() - 1),
            Err(i) => i - 1,
        };
        Ok((idx, x - self.xs[idx]))
    }

    pub fn value(&self, x: f64) -> Result<f64, SplineError> {
        let (i, dx) = self.segment_at(x)?;
        let s = &self.segments[i];
        Ok(s.a + dx * (s.b + dx * (s.c + dx * s.d)))
    }

    pub fn derivative(&self, x: f64) -> Result<f64, SplineError> {
        let (i, dx) = self.segment_at(x)?;
        let s = &self.segments[i];
        Ok(s.b + dx * (2.0 * s.c + 3.0 * dx * s.d))
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64, SplineError> {
        let (i, dx) = self.segment_at(x)?;
        let s = &self.segments[i];
        Ok(2.0 * s.c + 6.0 * dx * s.d)
    }
}
