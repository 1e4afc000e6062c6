//! Leading-order WKB levels for `−d²/dx² − (ix)^N`, `N = ε + 2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::gamma_real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbInput {
    pub n: usize,
    pub eps: f64,
}

impl WkbInput {
    pub fn new(n: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!("WKB levels need eps > 0, got {eps}")));
        }
        Ok(Self { n, eps })
    }
}

/// `E = [Γ(3/2 + 1/N)·√π·(n + ½) / (sin(π/N)·Γ(1 + 1/N))]^{2N/(N+2)}`.
pub fn wkb_energy(n: usize, eps: f64) -> Result<f64> {
    WkbInput::new(n, eps)?;
    let big_n = eps + 2.0;
    let num = gamma_real(1.5 + 1.0 / big_n)? * PI.sqrt() * (n as f64 + 0.5);
    let den = (PI / big_n).sin() * gamma_real(1.0 + 1.0 / big_n)?;
    Ok((num / den).powf(2.0 * big_n / (big_n + 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let eps1 = [1.094, 4.089, 7.549, 11.304, 15.283, 19.444, 23.761, 28.212, 32.784];
        let eps2 = [1.377, 5.956, 11.769, 18.432, 25.769, 33.675, 42.076, 50.921, 60.170];
        for n in 0..9 {
            assert!((wkb_energy(n, 1.0).unwrap() - eps1[n]).abs() <= 1e-3);
            assert!((wkb_energy(n, 2.0).unwrap() - eps2[n]).abs() <= 1e-3);
        }
    }

    #[test]
    fn monotone_in_level() {
        for eps in [0.3, 1.0, 2.5] {
            let e: Vec<f64> = (0..10).map(|n| wkb_energy(n, eps).unwrap()).collect();
            assert!(e.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn harmonic_limit() {
        for n in 0..6 {
            assert!((wkb_energy(n, 1e-6).unwrap() - (2 * n + 1) as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn domain() {
        assert!(wkb_energy(0, 0.0).is_err());
        assert!(wkb_energy(0, -0.5).is_err());
    }
}
