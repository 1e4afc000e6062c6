use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use proptest::prelude::*;
use ptsym::polyalg::ComplexPoly;
use ptsym::specfun::{branch_power, eq13_closed, eq13_quadrature, pcf_d, pcf_d_quadrature};

fn hermite_form(n: usize, z: f64) -> f64 {
    let h = ComplexPoly::hermite(n).unwrap().eval(Complex64::new(z / SQRT_2, 0.0)).re;
    2f64.powf(-(n as f64) / 2.0) * (-z * z / 4.0).exp() * h
}

#[test]
fn integer_orders_match_hermite_form() {
    for n in 0..=20 {
        let mut z = -8.0;
        while z <= 8.0 {
            let d = pcf_d(n as f64, z).unwrap().value;
            let h = hermite_form(n, z);
            let scale = (0..=n).map(|k| hermite_form(k, z).abs()).fold(h.abs(), f64::max);
            assert!((d - h).abs() <= 1e-10 * scale.max(1e-300), "n={n} z={z}: {d} vs {h}");
            z += 0.37;
        }
    }
}

#[test]
fn quadrature_form_agrees_with_series() {
    for &(nu, z) in &[(0.3, 1.2), (2.7, -2.5), (-0.6, 0.4), (5.5, 4.0), (3.1, -6.0), (8.2, 3.3)] {
        let s = pcf_d(nu, z).unwrap();
        assert!(!s.cancellation);
        let q = pcf_d_quadrature(nu, z).unwrap();
        assert!((s.value - q).abs() <= 1e-9 * (1.0 + s.value.abs()), "nu={nu} z={z}: {} vs {q}", s.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pcf_three_term_recurrence(nu in -0.99f64..10.0, z in -6.0f64..6.0) {
        // D_{ν+1}(z) − z D_ν(z) + ν D_{ν−1}(z) = 0, valid where ν − 1 ≥ −1 + floor
        let nu = nu + 1.0;
        let dp = pcf_d(nu + 1.0, z).unwrap().value;
        let d0 = pcf_d(nu, z).unwrap().value;
        let dm = pcf_d(nu - 1.0, z).unwrap().value;
        let scale = dp.abs() + (z * d0).abs() + (nu * dm).abs();
        prop_assert!((dp - z * d0 + nu * dm).abs() <= 1e-9 * scale, "residual {} scale {}", dp - z * d0 + nu * dm, scale);
    }

    #[test]
    fn eq13_closed_matches_quadrature(nu in -0.9f64..6.0, beta in 0.5f64..2.0, q in -5.0f64..5.0) {
        let closed = eq13_closed(nu, beta, q).unwrap();
        let quad = eq13_quadrature(nu, beta, q).unwrap();
        // the integral is real for real β, q
        prop_assert!(quad.im.abs() <= 1e-9 * (1.0 + quad.norm()));
        prop_assert!((closed - quad).norm() <= 1e-8 * (1.0 + closed.norm()), "{} vs {}", closed, quad);
    }

    #[test]
    fn branch_power_multiplicative(x in -5.0f64..5.0, m in -0.9f64..4.0, n in 0.0f64..4.0) {
        prop_assume!(x.abs() > 1e-3);
        let lhs = branch_power(x, m) * branch_power(x, n);
        let rhs = branch_power(x, m + n);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn branch_power_conjugate_symmetry(x in 0.01f64..5.0, nu in -0.9f64..6.0) {
        // (i(−x))^ν = conj((ix)^ν)
        let a = branch_power(-x, nu);
        let b = branch_power(x, nu).conj();
        prop_assert!((a - b).norm() <= 1e-13 * b.norm());
    }
}
