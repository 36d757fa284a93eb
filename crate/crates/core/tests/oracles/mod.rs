//! Reference computations that share no code with the library.

#![allow(dead_code)]

/// `(Σ_e |e| |u_e|^p)^{1/p}` for element values and measures.
pub fn lp_norm(measures: &[f64], values: &[f64], p: f64) -> f64 {
    measures.iter().zip(values).map(|(m, v)| m * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `Σ_e |e| |u_e|^{p_e}`.
pub fn modular(measures: &[f64], values: &[f64], exponents: &[f64]) -> f64 {
    measures.iter().zip(values).zip(exponents).map(|((m, v), p)| m * v.abs().powf(*p)).sum()
}

/// Scale `s > 0` with `Σ |e| |s u_e|^{p_e} = 1`, by Newton on `log s`.
pub fn unit_modular_scale(measures: &[f64], values: &[f64], exponents: &[f64]) -> f64 {
    let mut log_s: f64 = 0.0;
    for _ in 0..200 {
        let s = log_s.exp();
        let scaled: Vec<f64> = values.iter().map(|v| s * v).collect();
        let rho = modular(measures, &scaled, exponents);
        // d rho / d log s = Σ p_e |e| |s u_e|^{p_e}
        let slope: f64 = measures
            .iter()
            .zip(&scaled)
            .zip(exponents)
            .map(|((m, v), p)| p * m * v.abs().powf(*p))
            .sum();
        let step = (rho - 1.0) / slope;
        log_s -= step.clamp(-5.0, 5.0);
        if step.abs() < 1e-15 {
            break;
        }
    }
    log_s.exp()
}

/// Nodal P1 solution of `−c u″ = f` on a uniform mesh of `(0,1)` with `n`
/// cells and the load sampled at cell midpoints, by the Thomas algorithm.
pub fn p1_linear_solve(n: usize, c: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let m = n - 1;
    let diag = 2.0 * c / h;
    let off = -c / h;
    let rhs: Vec<f64> = (1..n).map(|i| 0.5 * h * (f((i as f64 - 0.5) * h) + f((i as f64 + 0.5) * h))).collect();
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    cp[0] = off / diag;
    dp[0] = rhs[0] / diag;
    for i in 1..m {
        let denom = diag - off * cp[i - 1];
        cp[i] = off / denom;
        dp[i] = (rhs[i] - off * dp[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = dp[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    let mut out = vec![0.0];
    out.extend(x);
    out.push(0.0);
    out
}

/// RK4 for `u″ = −u³/2`, `u(0) = 0`, `u′(0) = s`, with `steps` equal steps of
/// size `h`; returns the samples `u(k h)`.
fn integrate_cubic(s: f64, h: f64, steps: usize) -> Vec<f64> {
    let rhs = |u: f64, v: f64| (v, -0.5 * u * u * u);
    let (mut u, mut v) = (0.0, s);
    let mut out = vec![0.0];
    for _ in 0..steps {
        let (k1u, k1v) = rhs(u, v);
        let (k2u, k2v) = rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = rhs(u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.push(u);
    }
    out
}

/// Positive solution of `−2u″ = u³` on `(0,1)` with zero boundary values,
/// by shooting on `u′(0)` so that the first zero lands at `x = 1`. Returns
/// the values at the `n + 1` uniform nodes.
pub fn cubic_bvp_nodes(n: usize) -> Vec<f64> {
    let per_cell = 512;
    let steps = n * per_cell;
    let h = 1.0 / steps as f64;
    // u(1; s) > 0 before the first zero reaches 1, < 0 just after.
    let end = |s: f64| *integrate_cubic(s, h, steps).last().unwrap();
    let (mut lo, mut hi) = (1e-3, 1.0);
    while end(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if end(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let profile = integrate_cubic(0.5 * (lo + hi), h, steps);
    (0..=n).map(|i| if i == n { 0.0 } else { profile[i * per_cell] }).collect()
}

/// Composite Simpson rule with `2m` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + inner + f(b))
}
