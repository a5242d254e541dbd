use super::NumericsError;

const MAX_ITERATIONS: usize = 200;

/// Brent's method on a sign-changing bracket.
///
/// Stops once `|f(root)| <= tol` or the bracket is narrower than
/// `tol * max(1, |root|)`.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(NumericsError::InvalidBracket {
            lo,
            f_lo: fa,
            hi,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let width_tol = 0.5 * tol * b.abs().max(1.0) + 2.0 * f64::EPSILON * b.abs();
        let half = 0.5 * (c - b);
        if fb.abs() <= tol || half.abs() <= width_tol {
            return Ok(b);
        }
        if e.abs() >= width_tol && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, or secant when only two points differ.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (width_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > width_tol {
            d
        } else {
            width_tol.copysign(half)
        };
        fb = f(b);
    }
    Err(NumericsError::RootNotConverged {
        lo: b.min(c),
        hi: b.max(c),
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_root() {
        let r = find_root(|x| x - 1.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn no_sign_change_is_rejected() {
        let err = find_root(|x| x * x, 1.0, 2.0, 1e-12).unwrap_err();
        assert!(matches!(err, NumericsError::InvalidBracket { .. }));
    }

    #[test]
    fn lundberg_type_root() {
        // psi(s) - 0.05 for lambda = mu = 1, c = 1.25
        let psi = |s: f64| 1.25 * s - s / (1.0 + s);
        let r = find_root(|s| psi(s) - 0.05, 0.0, 10.0, 1e-15).unwrap();
        let closed = (-0.2 + 0.29_f64.sqrt()) / 2.5;
        assert_relative_eq!(r, closed, max_relative = 1e-12);
        assert_relative_eq!(r, 0.135_406_6, max_relative = 1e-6);
    }

    #[test]
    fn steep_function() {
        let r = find_root(|x| x.powi(9) - 1e-3, 0.0, 4.0, 1e-15).unwrap();
        assert_relative_eq!(r, 1e-3_f64.powf(1.0 / 9.0), max_relative = 1e-10);
    }
}
