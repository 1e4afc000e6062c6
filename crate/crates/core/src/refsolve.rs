//! Numerically exact reference spectra.
//!
//! Three independent routes:
//!
//! * [`build_matrix`]: the operator-method matrix at one fixed (ω, ũ) for
//!   all levels, diagonalized densely. Converges where the shifted real line
//!   stays inside the Stokes wedges (roughly ε < 1.5).
//! * [`contour_pencil`]: Galerkin discretization on a smooth contour whose
//!   arms follow the centres of the Stokes wedges, giving the generalized
//!   problem `Aψ = E Bψ`. This is what [`converged_levels`] uses; it covers
//!   the whole range of ε including ε ≥ 2 and ε < −1.
//! * [`fd_check`]: finite differences on the real line, for −1 < ε < 2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, inverse_iteration_residual, matrix_norm, sort_spectrum, CMatrix};
use crate::melem::{hermite_functions, metric_matrix_quadrature, BasisParams, Epsilon};
use crate::quad::GaussLegendre;
use crate::roots::bisect;
use crate::specfun::branch_power;

pub const MAX_BASIS: usize = 600;

/// The complex-symmetric matrix `S_nk` of the operator method at shared
/// parameters; its eigenvalues are the energies.
pub fn build_matrix(eps: Epsilon, params: BasisParams, size: usize) -> Result<CMatrix> {
    if size == 0 || size > MAX_BASIS {
        return Err(Error::Domain(format!("basis size {size} outside 1..={MAX_BASIS}")));
    }
    Ok(metric_matrix_quadrature(size, params, eps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSpectrum {
    pub basis_size: usize,
    pub params: Option<BasisParams>,
    /// Sorted by real part, conjugate partners adjacent.
    pub eigenvalues: Vec<Complex64>,
    /// Backward-error estimates for the lowest eigenvalues, in order.
    pub residual_norms: Vec<f64>,
    pub matrix_norm: f64,
}

/// All eigenvalues of `m`, with inverse-iteration residuals for the
/// `residuals` lowest.
pub fn eigen_dense(m: &CMatrix, residuals: usize) -> Result<DenseSpectrum> {
    let mut ev = eigenvalues(m)?;
    sort_spectrum(&mut ev);
    let residual_norms = ev
        .iter()
        .take(residuals)
        .map(|&l| inverse_iteration_residual(m, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseSpectrum {
        basis_size: m.nrows(),
        params: None,
        eigenvalues: ev,
        residual_norms,
        matrix_norm: matrix_norm(m),
    })
}

/// Contour `x(t) = t − ic − i·tanφ·(√(t² + b²) − b)`, scaled-basis frequency ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub phi: f64,
    pub c: f64,
    pub b: f64,
    pub omega: f64,
}

impl Contour {
    /// Arms along the Stokes-wedge centres `arg x = −φ`, `π + φ`, with
    /// `φ = π(N − 2)/(2(N + 2))`, `N = ε + 2`.
    pub fn for_eps(eps: Epsilon) -> Self {
        let big_n = eps.power();
        Self {
            phi: PI * (big_n - 2.0) / (2.0 * (big_n + 2.0)),
            c: 0.5,
            b: 1.0,
            omega: 1.0 + 0.5 * eps.value().max(0.0),
        }
    }

    pub fn point(&self, t: f64) -> (Complex64, Complex64) {
        let ta = self.phi.tan();
        let r = (t * t + self.b * self.b).sqrt();
        let x = Complex64::new(t, -self.c - ta * (r - self.b));
        let dx = Complex64::new(1.0, -ta * t / r);
        (x, dx)
    }
}

/// Complex-symmetric Gram-type product `Σ_q u_i(q) w(q) v_k(q)`.
fn weighted_gram(u: &[Vec<Complex64>], w: &[Complex64]) -> CMatrix {
    let n = u.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ui: Vec<Complex64> = u[i].iter().zip(w).map(|(a, b)| a * b).collect();
            (i..n).map(|k| ui.iter().zip(&u[k]).map(|(a, b)| a * b).sum()).collect()
        })
        .collect();
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            m[(i, i + off)] = v;
            m[(i + off, i)] = v;
        }
    }
    m
}

/// Galerkin pencil `(A, B)` for `−ψ'' − (ix)^{ε+2}ψ = Eψ` on the contour,
/// in the oscillator basis of frequency ω in the parameter `t`.
pub fn contour_pencil(eps: Epsilon, contour: Contour, size: usize) -> Result<(CMatrix, CMatrix)> {
    if size == 0 || size > MAX_BASIS {
        return Err(Error::Domain(format!("basis size {size} outside 1..={MAX_BASIS}")));
    }
    let nu = eps.power();
    let sw = contour.omega.sqrt();
    let half = ((2.0 * size as f64 + 1.0).sqrt() + 8.0) / sw;
    let panels = (2.0 * half * sw / 0.25).ceil() as usize;
    let (ts, ws) = GaussLegendre::new(20).composite(-half, half, panels);
    let q = ts.len();
    let mut phi = vec![vec![Complex64::new(0.0, 0.0); q]; size];
    let mut dphi = vec![vec![Complex64::new(0.0, 0.0); q]; size];
    let mut w_kin = Vec::with_capacity(q);
    let mut w_pot = Vec::with_capacity(q);
    let mut w_ovl = Vec::with_capacity(q);
    let norm = contour.omega.powf(0.25);
    for (j, (&t, &w)) in ts.iter().zip(&ws).enumerate() {
        let psi = hermite_functions(size + 1, Complex64::new(sw * t, 0.0));
        for n in 0..size {
            phi[n][j] = psi[n] * norm;
            let lower = if n > 0 { psi[n - 1] * (n as f64 / 2.0).sqrt() } else { Complex64::new(0.0, 0.0) };
            dphi[n][j] = (lower - psi[n + 1] * ((n as f64 + 1.0) / 2.0).sqrt()) * (sw * norm);
        }
        let (x, dx) = contour.point(t);
        let ix = Complex64::new(0.0, 1.0) * x;
        let v = if nu.fract() == 0.0 { ix.powi(nu as i32) } else { ix.powf(nu) };
        w_kin.push(w / dx);
        w_pot.push(v * dx * w);
        w_ovl.push(dx * w);
    }
    let a = weighted_gram(&dphi, &w_kin) - weighted_gram(&phi, &w_pot);
    let b = weighted_gram(&phi, &w_ovl);
    Ok((a, b))
}

/// Spectrum of the contour pencil, as the standard problem `B⁻¹A`.
pub fn contour_spectrum(eps: Epsilon, contour: Contour, size: usize, residuals: usize) -> Result<DenseSpectrum> {
    let (a, b) = contour_pencil(eps, contour, size)?;
    let m = b.lu().solve(&a).ok_or(Error::Singular)?;
    eigen_dense(&m, residuals)
}

pub const REFERENCE_BASIS: usize = 150;

/// Nearest-match level identification between two spectra. Returns, for each
/// value of `fine`, the matched value of `coarse` when it is within 0.3 of
/// the local level spacing.
fn match_levels(coarse: &[Complex64], fine: &[Complex64]) -> Vec<Option<Complex64>> {
    fine.iter()
        .map(|&e| {
            let (idx, best) = coarse
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - e).norm().total_cmp(&(b.1 - e).norm()))?;
            let spacing = coarse
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != idx)
                .map(|(_, z)| (z - best).norm())
                .fold(f64::INFINITY, f64::min);
            ((best - e).norm() < 0.3 * spacing).then_some(*best)
        })
        .collect()
}

/// The `n_levels` lowest eigenvalues that agree between bases of size
/// [`REFERENCE_BASIS`] and twice that to `tol`.
pub fn converged_levels(eps: Epsilon, n_levels: usize, tol: f64) -> Result<Vec<Complex64>> {
    converged_levels_with(eps, n_levels, tol, REFERENCE_BASIS)
}

pub fn converged_levels_with(eps: Epsilon, n_levels: usize, tol: f64, size: usize) -> Result<Vec<Complex64>> {
    let contour = Contour::for_eps(eps);
    let (coarse, fine) = rayon::join(
        || contour_spectrum(eps, contour, size, 0),
        || contour_spectrum(eps, contour, 2 * size, n_levels + 4),
    );
    let (coarse, fine) = (coarse?, fine?);
    let matches = match_levels(&coarse.eigenvalues, &fine.eigenvalues);
    let mut levels = Vec::with_capacity(n_levels);
    let mut failing = Vec::new();
    for (i, (&e, m)) in fine.eigenvalues.iter().zip(&matches).enumerate() {
        if levels.len() == n_levels {
            break;
        }
        let converged = matches!(m, Some(c) if (c - e).norm() < tol);
        let residual_ok = fine.residual_norms.get(i).is_none_or(|&r| r <= 1e-8 * fine.matrix_norm);
        if converged && residual_ok {
            levels.push(e);
        } else if e.norm() < 10.0 * (levels.last().map_or(1.0, |l: &Complex64| l.norm()) + 10.0) {
            // an unconverged value inside the range of interest
            failing.push(levels.len() + failing.len());
        }
    }
    if levels.len() < n_levels || !failing.is_empty() {
        if failing.is_empty() {
            failing.extend(levels.len()..n_levels);
        }
        return Err(Error::ReferenceNonConvergence { levels: failing });
    }
    Ok(levels)
}

/// `Re (E₁ − E₂)²` for the levels `(a, a+1)` of the contour spectrum;
/// negative once the pair is complex conjugate.
pub fn reference_pair_discriminant(eps: f64, lower: usize, size: usize) -> Result<f64> {
    let eps = Epsilon::outlook(eps)?;
    let s = contour_spectrum(eps, Contour::for_eps(eps), size, 0)?;
    let (e1, e2) = (s.eigenvalues[lower], s.eigenvalues[lower + 1]);
    Ok(((e1 - e2) * (e1 - e2)).re)
}

/// ε at which levels `(lower, lower+1)` of the reference spectrum coalesce.
pub fn reference_branch_onset(lower: usize, eps_lo: f64, eps_hi: f64) -> Result<f64> {
    let f = |e: f64| reference_pair_discriminant(e, lower, 120);
    let (a, b) = (f(eps_lo)?, f(eps_hi)?);
    if a.signum() == b.signum() {
        return Err(Error::NoSignChange { what: "reference pair discriminant".into(), lo: eps_lo, hi: eps_hi });
    }
    bisect(f, eps_lo, eps_hi, 1e-4)
}

/// Default half-width and point count of [`fd_check`].
pub const FD_HALF_WIDTH: f64 = 14.0;
pub const FD_POINTS: usize = 2000;

/// `w` scaled to unit maximum, or `None` if it is zero or not finite.
fn normalized(w: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let big = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (big.is_finite() && big > 0.0).then(|| w.into_iter().map(|z| z / big).collect())
}

/// `T = −Δ_h + V` on the interior grid points, `V = −(ix)^{ε+2}`.
struct Tridiagonal {
    potential: Vec<Complex64>,
    inv_h2: f64,
}

impl Tridiagonal {
    fn new(eps: Epsilon, half_width: f64, points: usize) -> Self {
        let h = 2.0 * half_width / (points as f64 + 1.0);
        let nu = eps.power();
        let potential = (1..=points).map(|j| -branch_power(-half_width + j as f64 * h, nu)).collect();
        Self { potential, inv_h2: 1.0 / (h * h) }
    }

    fn diag(&self, i: usize) -> Complex64 {
        self.potential[i] + 2.0 * self.inv_h2
    }

    /// Solves `(T − λ)x = rhs` by forward elimination without pivoting.
    fn solve(&self, lambda: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
        let o = Complex64::new(-self.inv_h2, 0.0);
        let n = self.potential.len();
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        let mut m = self.diag(0) - lambda;
        c[0] = o / m;
        y[0] = rhs[0] / m;
        for i in 1..n {
            m = self.diag(i) - lambda - o * c[i - 1];
            c[i] = o / m;
            y[i] = (rhs[i] - o * y[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            let next = y[i + 1];
            y[i] -= c[i] * next;
        }
        y
    }

    /// `vᵀTv / vᵀv`, the Rayleigh quotient of the complex-symmetric `T`.
    /// The kinetic part is summed by parts as `Σ (v_{i+1} − v_i)² / h²`,
    /// which avoids the cancellation of the second difference.
    fn rayleigh(&self, v: &[Complex64]) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let mut kinetic = v[0] * v[0];
        let mut pot = zero;
        let mut den = zero;
        for i in 0..v.len() {
            let d = v.get(i + 1).copied().unwrap_or(zero) - v[i];
            kinetic += d * d;
            pot += self.potential[i] * v[i] * v[i];
            den += v[i] * v[i];
        }
        (kinetic * self.inv_h2 + pot) / den
    }

    /// Equidistributed start vector without any parity or smoothness, so
    /// that it overlaps every eigenvector.
    fn start_vector(&self) -> Vec<Complex64> {
        (0..self.potential.len())
            .map(|i| Complex64::new((i as f64 * 0.754_877_666_2).fract() - 0.5, (i as f64 * 0.569_840_290_9).fract() - 0.5))
            .collect()
    }

    /// Fraction of `Σ|v|²` beyond `inner·L` for the eigenvector of the
    /// eigenvalue `lambda` (found by inverse iteration).
    fn edge_weight(&self, lambda: Complex64, inner: f64) -> Option<f64> {
        let mut v = self.start_vector();
        for _ in 0..3 {
            v = normalized(self.solve(lambda, &v))?;
        }
        let n = v.len();
        let cut = ((1.0 - inner) * 0.5 * n as f64).round() as usize;
        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let edge: f64 = v[..cut].iter().chain(&v[n - cut..]).map(|z| z.norm_sqr()).sum();
        Some(edge / total)
    }

    /// Eigenvalue near `seed`: inverse iteration at the fixed shift, then
    /// Rayleigh-quotient iteration. Convergence is cubic; iterating stops at a
    /// relative change of 10⁻¹⁰ or once the changes stop shrinking, which
    /// happens at a rounding floor set by the non-normality of T.
    fn refine(&self, seed: Complex64) -> Result<Complex64> {
        let mut v = self.start_vector();
        for _ in 0..6 {
            v = normalized(self.solve(seed, &v)).ok_or(Error::Singular)?;
        }
        let mut lambda = self.rayleigh(&v);
        let mut prev = f64::INFINITY;
        for _ in 0..40 {
            let Some(w) = normalized(self.solve(lambda, &v)) else {
                // exactly singular: λ is an eigenvalue to working precision
                return Ok(lambda);
            };
            v = w;
            let next = self.rayleigh(&v);
            let change = (next - lambda).norm();
            lambda = next;
            let scale = 1.0 + lambda.norm();
            // converged, or stalled at the rounding floor
            if change <= 1e-10 * scale || (change <= 1e-7 * scale && change > 0.5 * prev) {
                return Ok(lambda);
            }
            prev = change;
        }
        Err(Error::ReferenceNonConvergence { levels: vec![] })
    }

    fn dense(&self) -> CMatrix {
        let n = self.potential.len();
        let off = Complex64::new(-self.inv_h2, 0.0);
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag(i)
            } else if i.abs_diff(j) == 1 {
                off
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Lowest `n_levels` eigenvalues of `−ψ'' − (ix)^{ε+2}ψ` on `[−L, L]` with
/// Dirichlet ends: second-order central differences with steps h, h/2 and
/// h/4 (`points`, `2·points + 1` and `4·points + 3` interior points),
/// combined by two Richardson steps.
pub fn fd_check(eps: Epsilon, half_width: f64, points: usize, n_levels: usize) -> Result<Vec<Complex64>> {
    let e = eps.value();
    if !(e > -1.0 && e < 2.0) {
        return Err(Error::Domain(format!("finite-difference check needs -1 < eps < 2, got {e}")));
    }
    // Seeds from a coarse dense solve. Truncating the real line also creates
    // modes sitting at the box edges (for ε > 1, where −(ix)^{ε+2} has a large
    // negative real part there), modes trapped where that real part is large
    // and negative, and poorly resolved grid-scale modes. The physical levels
    // have Re E > 0 and eigenvectors confined to the inner part of the box.
    let coarse = Tridiagonal::new(eps, half_width, 400);
    let mut seeds: Vec<Complex64> = eigenvalues(&coarse.dense())?
        .into_iter()
        .filter(|&z| z.re > 0.0 && coarse.edge_weight(z, 0.85).is_some_and(|w| w < 1e-6))
        .collect();
    sort_spectrum(&mut seeds);
    // A real level can show up as a conjugate pair on the coarse grid; its real
    // part is tried as an extra seed.
    let pair_centres: Vec<Complex64> = seeds
        .iter()
        .filter(|z| z.im > 1e-6 * (1.0 + z.norm()))
        .map(|z| Complex64::new(z.re, 0.0))
        .collect();
    seeds.extend(pair_centres);
    sort_spectrum(&mut seeds);
    let fine = Tridiagonal::new(eps, half_width, points);
    let finer = Tridiagonal::new(eps, half_width, 2 * points + 1);
    let finest = Tridiagonal::new(eps, half_width, 4 * points + 3);
    let found: Vec<Option<Complex64>> = seeds
        .par_iter()
        .map(|&s| {
            // RQI may wander off to another level from a poor seed
            let a = fine.refine(s).ok().filter(|a| (a - s).norm() <= 0.05 * (1.0 + s.norm()))?;
            let b = finer.refine(a).ok()?;
            let c = finest.refine(b).ok()?;
            // a resolved level converges steadily under refinement
            if !((c - b).norm() < (b - a).norm() && (b - a).norm() <= 0.01 * (1.0 + a.norm())) {
                return None;
            }
            let (ab, bc) = ((4.0 * b - a) / 3.0, (4.0 * c - b) / 3.0);
            Some((16.0 * bc - ab) / 15.0)
        })
        .collect();
    let mut out: Vec<Complex64> = Vec::new();
    for z in found.into_iter().flatten() {
        if !out.iter().any(|w| (w - z).norm() < 1e-6 * (1.0 + z.norm())) {
            out.push(z);
        }
    }
    sort_spectrum(&mut out);
    if out.len() < n_levels {
        return Err(Error::ReferenceNonConvergence { levels: (out.len()..n_levels).collect() });
    }
    out.truncate(n_levels);
    Ok(out)
}
