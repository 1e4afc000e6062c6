//! Real special functions: Γ, Kummer's M, the parabolic cylinder function
//! D_ν, and the Gaussian-Fourier integral of the branch power `(ix)^ν` in
//! closed form and by quadrature.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;

/// Smallest admissible order is `-1 + NU_FLOOR`.
pub const NU_FLOOR: f64 = 1e-6;
/// Largest |z| accepted by [`pcf_d`].
pub const PCF_Z_MAX: f64 = 12.0;
/// Largest |z| accepted by [`kummer_m`].
pub const KUMMER_Z_MAX: f64 = 60.0;
const KUMMER_MAX_TERMS: usize = 10_000;
/// Estimated relative error above which [`pcf_d`] flags cancellation.
pub const PCF_CANCELLATION_LIMIT: f64 = 1e-8;

/// The branch power `(ix)^ν` on the real line, principal branch:
/// `|x|^ν · exp(iνπ/2 · sign x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPower {
    pub x: f64,
    pub nu: f64,
}

impl BranchPower {
    pub fn new(x: f64, nu: f64) -> Self {
        Self { x, nu }
    }

    pub fn value(&self) -> Complex64 {
        branch_power(self.x, self.nu)
    }
}

/// `(ix)^ν` with the branch of [`BranchPower`]. Integer orders are formed by
/// repeated multiplication so that they agree with `(i·x)^n` exactly.
pub fn branch_power(x: f64, nu: f64) -> Complex64 {
    if x == 0.0 {
        return if nu > 0.0 {
            Complex64::new(0.0, 0.0)
        } else if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    if nu.fract() == 0.0 && nu.abs() <= 64.0 {
        let n = nu as i32;
        let ix = Complex64::new(0.0, x);
        return if n >= 0 { ix.powi(n) } else { ix.powi(-n).inv() };
    }
    let mag = x.abs().powf(nu);
    let phase = nu * FRAC_PI_2 * x.signum();
    Complex64::from_polar(mag, phase)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r.fract() == 0.0 {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

fn gamma_positive(x: f64) -> f64 {
    // Lanczos approximation, x >= 0.5
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Γ(x) for real x away from the poles.
pub fn gamma_real(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x.fract() == 0.0 && x <= 20.0 {
        // exact factorial for small positive integers
        return Ok((1..x as u64).fold(1.0, |acc, k| acc * k as f64));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * gamma_positive(1.0 - x)))
    } else {
        Ok(gamma_positive(x))
    }
}

/// 1/Γ(x), zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        sin_pi(x) * gamma_positive(1.0 - x) / PI
    } else {
        1.0 / gamma_real(x).expect("no pole for x >= 0.5")
    }
}

/// Kummer's confluent hypergeometric M(a, b, z) by its power series.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    kummer_m_with_magnitude(a, b, z).map(|(v, _)| v)
}

/// As [`kummer_m`], also returning the sum of term magnitudes (for error
/// estimates).
pub fn kummer_m_with_magnitude(a: f64, b: f64, z: f64) -> Result<(f64, f64)> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("Kummer M undefined for b = {b}")));
    }
    if z.abs() > KUMMER_Z_MAX {
        return Err(Error::Domain(format!("|z| = {} exceeds series range {KUMMER_Z_MAX}", z.abs())));
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        // Kummer transformation keeps the series free of sign alternation
        let (m, s) = kummer_m_with_magnitude(b - a, b, -z)?;
        let e = z.exp();
        return Ok((e * m, e * s));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut mag = 1.0;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        if term == 0.0 {
            return Ok((sum, mag));
        }
        sum += term;
        mag += term.abs();
        if kf > -a && term.abs() <= 1e-17 * sum.abs() {
            return Ok((sum, mag));
        }
    }
    Err(Error::SeriesNonConvergence { terms: KUMMER_MAX_TERMS })
}

/// Validated (order, argument) pair for the parabolic cylinder function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfOrder {
    pub nu: f64,
    pub z: f64,
}

impl PcfOrder {
    pub fn new(nu: f64, z: f64) -> Result<Self> {
        if !(nu >= -1.0 + NU_FLOOR) || !nu.is_finite() {
            return Err(Error::Domain(format!("parabolic cylinder order {nu} below -1 + {NU_FLOOR}")));
        }
        if !(z.abs() <= PCF_Z_MAX) {
            return Err(Error::Domain(format!("|z| = {} outside [0, {PCF_Z_MAX}]", z.abs())));
        }
        Ok(Self { nu, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfValue {
    pub value: f64,
    /// Estimated relative error of the Kummer combination.
    pub estimated_error: f64,
    /// Set when the estimate exceeded [`PCF_CANCELLATION_LIMIT`]; `value`
    /// then comes from quadrature instead of the series.
    pub cancellation: bool,
}

/// D_ν(z) from the two-term Kummer combination, with a quadrature fallback
/// when the two terms cancel.
pub fn pcf_d(nu: f64, z: f64) -> Result<PcfValue> {
    let PcfOrder { nu, z } = PcfOrder::new(nu, z)?;
    let x = 0.5 * z * z;
    if x > KUMMER_Z_MAX {
        // series out of range; the cancellation would be total anyway
        let value = pcf_d_quadrature(nu, z)?;
        return Ok(PcfValue { value, estimated_error: f64::INFINITY, cancellation: true });
    }
    let r1 = rgamma(0.5 * (1.0 - nu));
    let r2 = rgamma(-0.5 * nu);
    let (t1, s1) = if r1 != 0.0 {
        let (m, s) = kummer_m_with_magnitude(-0.5 * nu, 0.5, x)?;
        (m * r1, s * r1.abs())
    } else {
        (0.0, 0.0)
    };
    let (t2, s2) = if r2 != 0.0 && z != 0.0 {
        let (m, s) = kummer_m_with_magnitude(0.5 * (1.0 - nu), 1.5, x)?;
        (SQRT_2 * z * m * r2, SQRT_2 * z.abs() * s * r2.abs())
    } else {
        (0.0, 0.0)
    };
    let pre = 2f64.powf(0.5 * nu) * PI.sqrt() * (-0.25 * z * z).exp();
    let diff = t1 - t2;
    let magnitude = s1 + s2;
    let estimated_error = if magnitude == 0.0 {
        0.0
    } else if diff == 0.0 {
        f64::INFINITY
    } else {
        4.0 * f64::EPSILON * magnitude / diff.abs()
    };
    if estimated_error <= PCF_CANCELLATION_LIMIT {
        return Ok(PcfValue { value: pre * diff, estimated_error, cancellation: false });
    }
    let value = pcf_d_quadrature(nu, z)?;
    Ok(PcfValue { value, estimated_error, cancellation: true })
}

/// D_ν(z) from the Gaussian-Fourier integral. For z > 0 the contour is moved
/// through the saddle, `D_ν(z) = 2^{ν/2} π^{-1/2} e^{-z²/4} ∫ (is + z/√2)^ν e^{-s²} ds`,
/// which has no oscillation and keeps full relative accuracy; for z ≤ 0 the
/// real-line integral is used directly.
pub fn pcf_d_quadrature(nu: f64, z: f64) -> Result<f64> {
    if z > 0.0 {
        let a = z / SQRT_2;
        let span = 9.0 + (0.5 * nu.max(0.0)).sqrt();
        let scale = (a * a + 0.5 * nu.max(0.0)).powf(0.5 * nu) * PI.sqrt();
        let r = tanh_sinh(
            |s| Complex64::new(a, s).powf(nu) * (-s * s).exp(),
            -span,
            span,
            1e-15 * scale,
        )?;
        Ok(2f64.powf(0.5 * nu) / PI.sqrt() * (-0.25 * z * z).exp() * r.value.re)
    } else {
        let q = SQRT_2 * z;
        let integral = eq13_quadrature(nu, 1.0, q)?;
        Ok(integral.re * 2f64.powf(0.5 * nu) * (0.25 * z * z).exp() / PI.sqrt())
    }
}

fn check_eq13_domain(nu: f64, beta: f64) -> Result<()> {
    if !(nu > -1.0) {
        return Err(Error::Domain(format!("order {nu} must exceed -1")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    Ok(())
}

/// Closed form of `∫ (ix)^ν e^{-β²x² - iqx} dx` through D_ν.
pub fn eq13_closed(nu: f64, beta: f64, q: f64) -> Result<Complex64> {
    check_eq13_domain(nu, beta)?;
    let d = pcf_d(nu, q / (beta * SQRT_2))?;
    let v = 2f64.powf(-0.5 * nu) * PI.sqrt() * beta.powf(-nu - 1.0) * (-q * q / (8.0 * beta * beta)).exp() * d.value;
    Ok(Complex64::new(v, 0.0))
}

/// The same integral by quadrature: split at `x = 0`, each half on
/// `[0, 12/β]` with the branch power evaluated pointwise. The tolerance is
/// relative to `∫|x|^ν e^{-β²x²} dx`.
pub fn eq13_quadrature(nu: f64, beta: f64, q: f64) -> Result<Complex64> {
    check_eq13_domain(nu, beta)?;
    let cutoff = 12.0 / beta;
    let b2 = beta * beta;
    let scale = gamma_real(0.5 * (nu + 1.0))? / beta.powf(nu + 1.0);
    let r = tanh_sinh(
        |x| {
            let g = (-b2 * x * x).exp();
            let right = branch_power(x, nu) * Complex64::from_polar(g, -q * x);
            let left = branch_power(-x, nu) * Complex64::from_polar(g, q * x);
            right + left
        },
        0.0,
        cutoff,
        1e-12 * scale.max(1.0),
    )?;
    Ok(r.value)
}
