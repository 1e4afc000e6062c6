//! Matrix elements of `H = -d²/dx² - (ix)^{ε+2}` in the complex-shifted
//! oscillator basis `ψ_n(√ω x + iũ)`.
//!
//! All formulas use the dimensionless shift ũ of the scaled coordinate; the
//! physical shift is `ũ/√ω`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::polyalg::ComplexPoly;
use crate::quad::{tanh_sinh, GaussLegendre};
use crate::specfun::{branch_power, pcf_d};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BasisParams {
    pub omega: f64,
    pub ushift: f64,
}

impl BasisParams {
    pub fn new(omega: f64, ushift: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega = {omega} must be positive")));
        }
        if !ushift.is_finite() {
            return Err(Error::Domain("shift must be finite".into()));
        }
        Ok(Self { omega, ushift })
    }

    /// Unshifted unit-frequency basis.
    pub fn harmonic() -> Self {
        Self { omega: 1.0, ushift: 0.0 }
    }

    /// Shift in the unscaled coordinate.
    pub fn physical_shift(&self) -> f64 {
        self.ushift / self.omega.sqrt()
    }
}

/// Lower edge of the deformation range accepted in outlook mode.
pub const OUTLOOK_EPS_MIN: f64 = -1.05;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct Epsilon(f64);

impl Epsilon {
    /// ε > −1.
    pub fn new(eps: f64) -> Result<Self> {
        if eps > -1.0 && eps.is_finite() {
            Ok(Self(eps))
        } else {
            Err(Error::Domain(format!("eps = {eps} must exceed -1")))
        }
    }

    /// ε > −1, or ε ∈ [−1.05, −1) for the outlook pairing.
    pub fn outlook(eps: f64) -> Result<Self> {
        if (OUTLOOK_EPS_MIN..-1.0).contains(&eps) {
            Ok(Self(eps))
        } else {
            Self::new(eps)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Exponent of the potential, ε + 2.
    pub fn power(self) -> f64 {
        self.0 + 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixElement {
    pub n: usize,
    pub k: usize,
    pub value: Complex64,
}

/// `1/√(2^n n! 2^k k!)`, or an overflow error.
fn norm_factor(n: usize, k: usize) -> Result<f64> {
    let ln = |m: usize| -> f64 { m as f64 * 2f64.ln() + (1..=m).map(|j| (j as f64).ln()).sum::<f64>() };
    let v = (-0.5 * (ln(n) + ln(k))).exp();
    if v == 0.0 || !v.is_finite() {
        return Err(Error::Overflow { n, k });
    }
    Ok(v)
}

/// Value of `J(n,k)` with an estimate of its absolute rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
}

/// Relative rounding loss above which [`pt_integral`] switches to quadrature.
const REDUCTION_LOSS_LIMIT: f64 = 1e-11;

/// `J(n,k) = ∫ ψ_n(x+iũ) ψ_k(x+iũ) (ix)^{ε+2} dx` with normalized Hermite
/// functions ψ, by expanding the shifted Hermite product into monomials and
/// integrating each against the Gaussian in closed form.
pub fn pt_integral(n: usize, k: usize, utilde: f64, eps: Epsilon) -> Result<Complex64> {
    pt_integral_detail(n, k, utilde, eps).map(|r| r.value)
}

/// As [`pt_integral`], with an error estimate.
///
/// The monomial terms grow like `|ũ|^{n+k}` while `J` does not, so for large
/// shifts the sum cancels. When the estimated loss is too large and the
/// branch point of the potential allows it, the integral is instead taken
/// along a shifted line by [`LineRule`].
pub fn pt_integral_detail(n: usize, k: usize, utilde: f64, eps: Epsilon) -> Result<Integral> {
    let norm = norm_factor(n, k)?;
    let prod = &ComplexPoly::hermite(n)? * &ComplexPoly::hermite(k)?;
    let shifted = prod.shift(Complex64::new(0.0, utilde));
    let z = SQRT_2 * utilde;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut pcf_error = 0.0;
    let mut minus_i_pow = Complex64::new(1.0, 0.0);
    for (m, c) in shifted.coeffs.iter().enumerate() {
        let nu = m as f64 + eps.power();
        let d = pcf_d(nu, z)?;
        let term = c * minus_i_pow * (2f64.powf(-0.5 * nu) * d.value);
        sum += term;
        magnitude += term.norm();
        if !d.cancellation {
            pcf_error += term.norm() * d.estimated_error;
        }
        minus_i_pow *= Complex64::new(0.0, -1.0);
    }
    let scale = norm * (0.5 * utilde * utilde).exp();
    let value = sum * scale;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Overflow { n, k });
    }
    let error = scale * (4.0 * f64::EPSILON * magnitude + pcf_error);
    if error > REDUCTION_LOSS_LIMIT * value.norm() && LineRule::is_regular(utilde, eps) {
        let rule = LineRule::new(n.max(k) + 1, utilde, eps);
        let value = rule.element(n, k);
        return Ok(Integral { value, error: 1e-13 * (1.0 + value.norm()) });
    }
    Ok(Integral { value, error })
}

/// Composite Gauss-Legendre rule for `J(n,k)` along the line `Im z = c` of
/// the scaled variable `z = x + iũ`.
///
/// Moving the line down keeps the branch point of `(ix)^{ε+2}` (at `z = iũ`,
/// cut running upward) on the same side. With `c = 0`, possible for `ũ > 0.5`
/// or integer powers, the Hermite functions are real and the integrand has no
/// Gaussian growth, so the rule is accurate for any shift.
pub struct LineRule {
    psi: Vec<Vec<Complex64>>,
    weights: Vec<Complex64>,
}

impl LineRule {
    /// Whether the rule runs on the real `z` axis.
    pub fn is_regular(utilde: f64, eps: Epsilon) -> bool {
        utilde > 0.5 || eps.power().fract() == 0.0
    }

    pub fn new(size: usize, utilde: f64, eps: Epsilon) -> Self {
        let nu = eps.power();
        let integer_power = nu.fract() == 0.0;
        let c = if Self::is_regular(utilde, eps) { 0.0 } else { utilde - 0.5 };
        let half = (2.0 * size as f64 + 1.0).sqrt() + 8.0 + c.abs();
        let panels = (2.0 * half / 0.25).ceil() as usize;
        let (ts, ws) = GaussLegendre::new(20).composite(-half, half, panels);
        let mut psi = Vec::with_capacity(ts.len());
        let mut weights = Vec::with_capacity(ts.len());
        for (&t, &w) in ts.iter().zip(&ws) {
            let z = Complex64::new(t, c);
            // x = z − iũ, so ix = iz + ũ
            let ix = Complex64::new(0.0, 1.0) * z + utilde;
            let v = if integer_power { ix.powi(nu as i32) } else { ix.powf(nu) };
            psi.push(hermite_functions(size, z));
            weights.push(v * w);
        }
        Self { psi, weights }
    }

    pub fn element(&self, n: usize, k: usize) -> Complex64 {
        self.psi.iter().zip(&self.weights).map(|(row, w)| row[n] * row[k] * w).sum()
    }
}

/// Normalized Hermite functions `ψ_0..ψ_{count-1}` at a complex point.
pub fn hermite_functions(count: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push((-0.5 * z * z).exp() * PI.powf(-0.25));
    if count > 1 {
        out.push(z * SQRT_2 * out[0]);
    }
    for j in 1..count.saturating_sub(1) {
        let jf = j as f64;
        let next = z * (2.0 / (jf + 1.0)).sqrt() * out[j] - out[j - 1] * (jf / (jf + 1.0)).sqrt();
        out.push(next);
    }
    out
}

/// The same integral by direct quadrature, split at `x = 0`.
pub fn pt_integral_quadrature(n: usize, k: usize, utilde: f64, eps: Epsilon) -> Result<Complex64> {
    norm_factor(n, k)?;
    let nu = eps.power();
    let count = n.max(k) + 1;
    let integrand = |x: f64| {
        let psi = hermite_functions(count, Complex64::new(x, utilde));
        psi[n] * psi[k] * branch_power(x, nu)
    };
    let cutoff = 10.0 + ((n + k) as f64 + nu + 1.0).sqrt() + utilde.abs();
    let right = tanh_sinh(integrand, 0.0, cutoff, 1e-11)?;
    let left = tanh_sinh(|x| integrand(-x), 0.0, cutoff, 1e-11)?;
    Ok(right.value + left.value)
}

/// Kinetic (δ_{k,n±2}) contribution of the off-diagonal element.
pub fn kinetic_offdiag(n: usize, k: usize, omega: f64) -> f64 {
    if k == n + 2 {
        -0.5 * omega * (((n + 1) * (n + 2)) as f64).sqrt()
    } else if n >= 2 && k == n - 2 {
        -0.5 * omega * ((n * (n - 1)) as f64).sqrt()
    } else {
        0.0
    }
}

/// Expectation value `H_nn`.
pub fn h_diag(n: usize, p: BasisParams, eps: Epsilon) -> Result<Complex64> {
    let j = pt_integral(n, n, p.ushift, eps)?;
    Ok(Complex64::new(0.5 * p.omega * (2 * n + 1) as f64, 0.0) - j * p.omega.powf(-0.5 * eps.power()))
}

/// Metric-reduced off-diagonal element, without the alternating sign of the
/// PT product; this is the entry of the complex-symmetric matrix whose
/// eigenvalues are the energies.
pub fn metric_offdiag(n: usize, k: usize, p: BasisParams, eps: Epsilon) -> Result<Complex64> {
    if n == k {
        return Err(Error::Domain("off-diagonal element requested with n = k".into()));
    }
    let j = pt_integral(n, k, p.ushift, eps)?;
    Ok(Complex64::new(kinetic_offdiag(n, k, p.omega), 0.0) - j * p.omega.powf(-0.5 * eps.power()))
}

/// Off-diagonal element under the PT scalar product, carrying the factor
/// `(−1)^n` of the row norm.
pub fn h_offdiag(n: usize, k: usize, p: BasisParams, eps: Epsilon) -> Result<Complex64> {
    let s = metric_offdiag(n, k, p, eps)?;
    Ok(if n % 2 == 0 { s } else { -s })
}

/// Full `size × size` matrix of PT-product elements `H_nk`.
pub fn pt_matrix(size: usize, p: BasisParams, eps: Epsilon) -> Result<CMatrix> {
    let s = metric_matrix(size, p, eps)?;
    Ok(CMatrix::from_fn(size, size, |i, j| if i % 2 == 0 || i == j { s[(i, j)] } else { -s[(i, j)] }))
}

/// Full `size × size` complex-symmetric matrix `S_nk` from the analytic
/// elements (intended for small sizes; see [`potential_table`] for large ones).
pub fn metric_matrix(size: usize, p: BasisParams, eps: Epsilon) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(size, size);
    for i in 0..size {
        m[(i, i)] = h_diag(i, p, eps)?;
        for j in i + 1..size {
            let v = metric_offdiag(i, j, p, eps)?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Potential integrals `J(n,k)` for all `n, k < size` by [`LineRule`].
pub fn potential_table(size: usize, utilde: f64, eps: Epsilon) -> CMatrix {
    let rule = LineRule::new(size, utilde, eps);
    let mut table = CMatrix::zeros(size, size);
    for i in 0..size {
        for j in i..size {
            let s = rule.element(i, j);
            table[(i, j)] = s;
            table[(j, i)] = s;
        }
    }
    table
}

/// Large complex-symmetric matrix `S_nk` assembled from [`potential_table`].
pub fn metric_matrix_quadrature(size: usize, p: BasisParams, eps: Epsilon) -> CMatrix {
    let j = potential_table(size, p.ushift, eps);
    let scale = p.omega.powf(-0.5 * eps.power());
    CMatrix::from_fn(size, size, |n, k| {
        let base = if n == k {
            0.5 * p.omega * (2 * n + 1) as f64
        } else {
            kinetic_offdiag(n, k, p.omega)
        };
        Complex64::new(base, 0.0) - j[(n, k)] * scale
    })
}
