//! Sanity checks on the reference computations themselves.

mod oracles;

use oracles::*;

#[test]
fn thomas_reproduces_quadratic() {
    let u = p1_linear_solve(8, 2.0, |_| 2.0);
    for (i, v) in u.iter().enumerate() {
        let x = i as f64 / 8.0;
        assert!((v - x * (1.0 - x) / 2.0).abs() < 1e-14);
    }
}

#[test]
fn shooting_profile_is_symmetric_and_positive() {
    let u = cubic_bvp_nodes(16);
    assert!(u[1..16].iter().all(|&v| v > 0.0));
    for i in 0..=16 {
        assert!((u[i] - u[16 - i]).abs() < 1e-8);
    }
}

#[test]
fn unit_scale_for_constant_exponent() {
    let m = [0.5, 0.5];
    let s = unit_modular_scale(&m, &[2.0, 2.0], &[3.0, 3.0]);
    assert!((s - 0.5).abs() < 1e-14);
}
