//! Bracketed root finding.

use super::NumericsError;

/// Find a root of `f` on the bracket `[lo, hi]` by Brent's method.
///
/// Requires a sign change (`f(lo)·f(hi) ≤ 0`). Converges to an interval of
/// width at most `tol` (plus a machine-epsilon floor); never steps outside
/// the bracket, so it is total on continuous inputs.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(NumericsError::NonFinite { at: a });
    }
    if !fb.is_finite() {
        return Err(NumericsError::NonFinite { at: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoBracket {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }

    // Classic Brent: b is the best iterate, a the previous one, c the
    // counterpoint keeping the bracket.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation / secant.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(NumericsError::NonFinite { at: b });
        }
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal_cdf;

    #[test]
    fn linear() {
        let r = find_root(|x| x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cube_root_of_two() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn cdf_median() {
        let r = find_root(|x| normal_cdf(x) - 0.5, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.abs() < 1e-10);
    }

    #[test]
    fn missing_bracket() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(NumericsError::NoBracket { .. })
        ));
    }
}
