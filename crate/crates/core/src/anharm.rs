//! Quartic anharmonic oscillator `H = p²/2 + x²/2 + λx⁴` in the oscillator
//! basis of frequency ω, the Hermitian test case of the operator method.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhoInput {
    pub n: usize,
    pub lambda: f64,
}

impl AhoInput {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("coupling {lambda} must be non-negative")));
        }
        Ok(Self { n, lambda })
    }
}

/// Positive root of `ω³ − ω − 2λ(2n+3) = 0`, which zeroes `H_{n,n+2}`.
pub fn aho_omega(n: usize, lambda: f64) -> f64 {
    let c = 2.0 * lambda * (2 * n + 3) as f64;
    let f = |w: f64| w * w * w - w - c;
    // f(1) = −c ≤ 0 and f is increasing past 1/√3: Newton from the right converges monotonically
    let mut w = 1f64.max(c.cbrt()) + 1.0;
    for _ in 0..100 {
        let step = f(w) / (3.0 * w * w - 1.0);
        w -= step;
        if step.abs() <= 1e-16 * w {
            break;
        }
    }
    w
}

/// `H_nn(ω)`.
pub fn aho_diag(n: usize, omega: f64, lambda: f64) -> f64 {
    let nf = n as f64;
    (omega * omega + 1.0) * (2.0 * nf + 1.0) / (4.0 * omega) + 3.0 * lambda * (2.0 * nf * nf + 2.0 * nf + 1.0) / (4.0 * omega * omega)
}

/// `H_nk(ω)` for `k ≠ n`; nonzero only for `|k − n| ∈ {2, 4}`.
pub fn aho_offdiag(n: usize, k: usize, omega: f64, lambda: f64) -> f64 {
    let (lo, hi) = (n.min(k), n.max(k));
    let l = lo as f64;
    match hi - lo {
        2 => {
            0.25 * ((l + 1.0) * (l + 2.0)).sqrt()
                * ((1.0 - omega * omega) / omega + 2.0 * lambda * (2.0 * l + 3.0) / (omega * omega))
        }
        4 => lambda / (4.0 * omega * omega) * ((l + 1.0) * (l + 2.0) * (l + 3.0) * (l + 4.0)).sqrt(),
        _ => 0.0,
    }
}

/// Zeroth-order energy `H_nn(ω_n)`.
pub fn aho_energy(n: usize, lambda: f64) -> f64 {
    aho_diag(n, aho_omega(n, lambda), lambda)
}

fn band_matrix(size: usize, omega: f64, lambda: f64) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| if i == j { aho_diag(i, omega, lambda) } else { aho_offdiag(i, j, omega, lambda) })
}

fn nth_eigenvalue(size: usize, omega: f64, lambda: f64, n: usize) -> f64 {
    let mut ev: Vec<f64> = SymmetricEigen::new(band_matrix(size, omega, lambda)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[n]
}

/// Largest basis tried before giving up.
const AHO_MAX_BASIS: usize = 2048;

/// Numerically exact n-th level: the band matrix at the fixed frequency
/// `aho_omega(0, λ)`, doubling the basis until the level changes by less
/// than 10⁻⁶.
pub fn aho_reference(n: usize, lambda: f64, basis_size: Option<usize>) -> Result<f64> {
    AhoInput::new(n, lambda)?;
    let omega = aho_omega(0, lambda);
    let mut size = basis_size.unwrap_or(4 * n + 40).max(n + 5);
    let mut prev = nth_eigenvalue(size, omega, lambda, n);
    while size < AHO_MAX_BASIS {
        size *= 2;
        let next = nth_eigenvalue(size, omega, lambda, n);
        if (next - prev).abs() < 1e-6 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::ReferenceNonConvergence { levels: vec![n] })
}
