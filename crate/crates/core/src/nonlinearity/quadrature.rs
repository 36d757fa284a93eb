/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation).
/// Returns `None` when the recursion depth is exhausted before the local
/// error estimate falls below the tolerance, or when `f` is non-finite.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    const MAX_DEPTH: u32 = 48;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let value = refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    value.is_finite().then_some(value)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    // Stop once the interval can no longer be split in floating point.
    if delta.abs() <= 15.0 * tol || m == a || m == b {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_orientation() {
        assert!((adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-12).unwrap() - 9.0).abs() < 1e-12);
        assert!((adaptive_simpson(|x| x * x, 3.0, 0.0, 1e-12).unwrap() + 9.0).abs() < 1e-12);
        assert!((adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-11).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrand_fails() {
        assert!(adaptive_simpson(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-10).is_none());
    }
}
