//! The operator method: per level, the basis parameters (ω, ũ) are fixed by
//! making the two nearest off-diagonal elements vanish, and the diagonal
//! element is the zeroth-order energy. Nearly degenerate neighbours are
//! treated by 2×2 mixing with shared parameters.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::melem::{h_diag, metric_offdiag, pt_integral, pt_integral_detail, BasisParams, Epsilon};
use crate::roots::{bisect, brent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Solo,
    Mixed,
    Reference,
    Wkb,
    Anharmonic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Solo => "solo",
            Method::Mixed => "mixed",
            Method::Reference => "reference",
            Method::Wkb => "wkb",
            Method::Anharmonic => "anharmonic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solo" => Ok(Method::Solo),
            "mixed" => Ok(Method::Mixed),
            "reference" => Ok(Method::Reference),
            "wkb" => Ok(Method::Wkb),
            "anharmonic" => Ok(Method::Anharmonic),
            other => Err(Error::Domain(format!("unknown method tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub n: usize,
    pub eps: Epsilon,
    pub value: Complex64,
    pub method: Method,
    pub params: BasisParams,
    /// Magnitude of the leading neglected off-diagonal couplings.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingPair {
    /// The two mixed levels, lower index first.
    pub levels: (usize, usize),
    pub params: BasisParams,
    pub h11: Complex64,
    pub h22: Complex64,
    pub h12: Complex64,
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub residual: f64,
}

impl MixingPair {
    /// `(h11 − h22)² + 4h12²`, with the algebraic square of `h12`.
    pub fn discriminant(&self) -> Complex64 {
        discriminant(self.h11, self.h22, self.h12)
    }
}

fn discriminant(h11: Complex64, h22: Complex64, h12: Complex64) -> Complex64 {
    (h11 - h22) * (h11 - h22) + h12 * h12 * 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingScheme {
    Solo,
    /// Ground state alone, then (1,2), (3,4), …
    #[serde(rename = "standard")]
    StandardMix,
    /// (0,1), (2,3), …
    #[serde(rename = "outlook")]
    OutlookMix,
}

impl PairingScheme {
    /// Solo for ε ≥ 0, standard mixing on (−1, 0), outlook mixing below −1.
    pub fn auto(eps: Epsilon) -> Self {
        let e = eps.value();
        if e >= 0.0 {
            PairingScheme::Solo
        } else if e > -1.0 {
            PairingScheme::StandardMix
        } else {
            PairingScheme::OutlookMix
        }
    }

    /// Levels of pair `m` and the level whose vanishing conditions fix the
    /// shared parameters.
    pub fn pair_levels(self, m: usize) -> Result<((usize, usize), usize)> {
        match self {
            PairingScheme::Solo => Err(Error::Domain("solo scheme has no mixing pairs".into())),
            PairingScheme::StandardMix => Ok(((2 * m + 1, 2 * m + 2), 2 * m + 2)),
            PairingScheme::OutlookMix => Ok(((2 * m, 2 * m + 1), 2 * m + 1)),
        }
    }
}

impl fmt::Display for PairingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            PairingScheme::Solo => "solo",
            PairingScheme::StandardMix => "standard",
            PairingScheme::OutlookMix => "outlook",
        })
    }
}

/// Scan grid for the ũ roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self { lo: -6.0, hi: 6.0, step: 0.05 }
    }
}

impl ScanGrid {
    fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        // offsets in units of the step keep a node exactly on zero
        let first = self.lo / self.step;
        (0..=count).map(|i| (first + i as f64) * self.step).collect()
    }
}

/// `H_{n,n+1}` is proportional to `J(n,n+1)`, which is `i` times a real
/// function of ũ; this returns that real factor.
pub fn g_function(utilde: f64, n: usize, eps: Epsilon) -> Result<f64> {
    g_with_error(utilde, n, eps).map(|(g, _)| g)
}

fn g_with_error(utilde: f64, n: usize, eps: Epsilon) -> Result<(f64, f64)> {
    let j = pt_integral_detail(n, n + 1, utilde, eps)?;
    if j.value.re.abs() > 1e-8 * (1.0 + j.value.norm()) + j.error {
        return Err(Error::BranchInconsistency(format!(
            "J({n},{}) at u = {utilde} has real part {:e}",
            n + 1,
            j.value.re
        )));
    }
    Ok((j.value.im, j.error))
}

/// All roots of [`g_function`] on the scan grid, refined by Brent's method.
/// Points where `|g|` is below its rounding-error estimate carry no sign
/// information and only bracket a root when isolated.
pub fn solve_u(n: usize, eps: Epsilon, scan: ScanGrid) -> Result<Vec<f64>> {
    let us = scan.points();
    let gs: Vec<(f64, f64)> = us.par_iter().map(|&u| g_with_error(u, n, eps)).collect::<Result<_>>()?;
    // brackets join consecutive reliable points, bridging at most one
    // unreliable point (a root sitting on the grid)
    let reliable: Vec<usize> = (0..us.len()).filter(|&i| gs[i].0.abs() > gs[i].1).collect();
    let mut roots = Vec::new();
    for w in reliable.windows(2) {
        let (i, j) = (w[0], w[1]);
        if j - i > 2 || gs[i].0.signum() == gs[j].0.signum() {
            continue;
        }
        if j - i == 2 && gs[i + 1].0 == 0.0 {
            roots.push(us[i + 1]);
            continue;
        }
        roots.push(brent(|u| g_function(u, n, eps), us[i], us[j], 1e-14, 0.0)?);
    }
    if roots.is_empty() {
        return Err(Error::NoRoot { level: n, eps: eps.value() });
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// The bracket `B(ũ) = −2J(n,n+2)/√((n+1)(n+2))`; `ω = B^{2/(ε+4)}`.
pub fn omega_bracket(n: usize, eps: Epsilon, utilde: f64) -> Result<Complex64> {
    let j = pt_integral(n, n + 2, utilde, eps)?;
    Ok(j * (-2.0 / (((n + 1) * (n + 2)) as f64).sqrt()))
}

pub fn solve_omega(n: usize, eps: Epsilon, utilde: f64) -> Result<f64> {
    let b = omega_bracket(n, eps, utilde)?;
    if b.im.abs() > 1e-8 * b.norm() {
        return Err(Error::BranchInconsistency(format!("Im B = {:e} at u = {utilde}", b.im)));
    }
    if !(b.re > 0.0) {
        return Err(Error::NegativeBracket { re_b: b.re });
    }
    Ok(b.re.powf(2.0 / (eps.value() + 4.0)))
}

/// A root of the parameter equations together with its selection residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub params: BasisParams,
    pub residual: f64,
}

/// Every admissible (ω, ũ) for level `n`, best first: roots with a positive
/// bracket, ordered by `|H_{n,n+3}| + |H_{n,n+4}|`, then by `|ũ|`.
pub fn candidates(n: usize, eps: Epsilon, scan: ScanGrid) -> Result<Vec<Candidate>> {
    let roots = solve_u(n, eps, scan)?;
    let mut out = Vec::new();
    let mut last_err = None;
    for u in roots {
        match solve_omega(n, eps, u) {
            Ok(omega) => {
                let params = BasisParams::new(omega, u)?;
                let residual = metric_offdiag(n, n + 3, params, eps)?.norm() + metric_offdiag(n, n + 4, params, eps)?.norm();
                out.push(Candidate { params, residual });
            }
            Err(e @ (Error::NegativeBracket { .. } | Error::BranchInconsistency(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(last_err.unwrap_or(Error::NoRoot { level: n, eps: eps.value() }));
    }
    out.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then(a.params.ushift.abs().total_cmp(&b.params.ushift.abs()))
    });
    Ok(out)
}

/// Parameters selected for level `n` under the root-selection policy.
pub fn level_params(n: usize, eps: Epsilon) -> Result<Candidate> {
    Ok(candidates(n, eps, ScanGrid::default())?[0])
}

/// `E_n = H_nn` at the level's own parameters.
pub fn zeroth_energy(n: usize, eps: Epsilon) -> Result<EnergyEstimate> {
    let c = level_params(n, eps)?;
    Ok(EnergyEstimate {
        n,
        eps,
        value: h_diag(n, c.params, eps)?,
        method: Method::Solo,
        params: c.params,
        residual: c.residual,
    })
}

/// 2×2 mixing of pair `m` of the scheme, with parameters shared from the
/// upper member's vanishing conditions.
pub fn mixed_pair(m: usize, eps: Epsilon, scheme: PairingScheme) -> Result<MixingPair> {
    let ((a, b), fix) = scheme.pair_levels(m)?;
    let params = level_params(fix, eps)?.params;
    mix_at(a, b, params, eps)
}

fn mix_at(a: usize, b: usize, params: BasisParams, eps: Epsilon) -> Result<MixingPair> {
    let h11 = h_diag(a, params, eps)?;
    let h22 = h_diag(b, params, eps)?;
    let h12 = metric_offdiag(a, b, params, eps)?;
    let root = discriminant(h11, h22, h12).sqrt();
    let mean = (h11 + h22) * 0.5;
    // couplings of the lower member to the next levels up are what the pair neglects
    let residual = metric_offdiag(a, b + 1, params, eps)?.norm() + metric_offdiag(a, b + 2, params, eps)?.norm();
    Ok(MixingPair {
        levels: (a, b),
        params,
        h11,
        h22,
        h12,
        e_plus: mean + root * 0.5,
        e_minus: mean - root * 0.5,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub eps_star: f64,
    /// d(Re discriminant)/dε at the branch point.
    pub discriminant_slope: f64,
}

fn make_eps(e: f64, scheme: PairingScheme) -> Result<Epsilon> {
    match scheme {
        PairingScheme::OutlookMix => Epsilon::outlook(e),
        _ => Epsilon::new(e),
    }
}

/// Real part of the pair discriminant as a function of ε.
pub fn pair_discriminant(m: usize, scheme: PairingScheme, eps: f64) -> Result<f64> {
    Ok(mixed_pair(m, make_eps(eps, scheme)?, scheme)?.discriminant().re)
}

/// ε at which the pair discriminant changes sign, by bisection to 10⁻⁶.
pub fn find_branch_point(m: usize, scheme: PairingScheme, eps_lo: f64, eps_hi: f64) -> Result<BranchPoint> {
    let f = |e: f64| pair_discriminant(m, scheme, e);
    let (flo, fhi) = (f(eps_lo)?, f(eps_hi)?);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::NoSignChange { what: "pair discriminant".into(), lo: eps_lo, hi: eps_hi });
    }
    let eps_star = bisect(f, eps_lo, eps_hi, 1e-6)?;
    let h = 1e-4;
    let lo = (eps_star - h).max(eps_lo);
    let hi = (eps_star + h).min(eps_hi);
    let discriminant_slope = (f(hi)? - f(lo)?) / (hi - lo);
    Ok(BranchPoint { eps_star, discriminant_slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub delta: Complex64,
    /// Levels k whose denominator `|E⁰ − H_kk|` fell below `10⁻⁶|E⁰|`.
    pub near_degenerate: Vec<usize>,
}

/// First iteration of the coupled equations for the expansion coefficients:
/// `ΔE = Σ_k S_nk² / (E⁰ − S_kk)` over `k ≠ n, k ≤ k_max`, at the level's own
/// parameters. Diagnostic only; not added to reported energies.
pub fn first_order_correction(n: usize, eps: Epsilon, k_max: usize) -> Result<Correction> {
    let e0 = zeroth_energy(n, eps)?;
    let p = e0.params;
    let mut delta = Complex64::new(0.0, 0.0);
    let mut near_degenerate = Vec::new();
    for k in 0..=k_max {
        if k == n {
            continue;
        }
        let s = metric_offdiag(n, k, p, eps)?;
        let denom = e0.value - h_diag(k, p, eps)?;
        if denom.norm() < 1e-6 * e0.value.norm() {
            near_degenerate.push(k);
        }
        if denom.norm() == 0.0 {
            continue;
        }
        delta += s * s / denom;
    }
    Ok(Correction { delta, near_degenerate })
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub scheme: PairingScheme,
    pub estimates: Vec<EnergyEstimate>,
    pub failures: Vec<(usize, Error)>,
}

/// Orders two values by real part, the negative imaginary part first for a
/// conjugate-like pair.
fn order_pair(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let tol = 1e-9 * (1.0 + a.re.abs().max(b.re.abs()));
    if (a.re - b.re).abs() <= tol {
        if a.im <= b.im {
            (a, b)
        } else {
            (b, a)
        }
    } else if a.re < b.re {
        (a, b)
    } else {
        (b, a)
    }
}

/// The lowest `n_levels` zeroth-order energies under a pairing scheme
/// (`None` for the automatic choice). Per-level failures are collected.
pub fn spectrum(eps: Epsilon, n_levels: usize, scheme: Option<PairingScheme>) -> SpectrumReport {
    let scheme = scheme.unwrap_or_else(|| PairingScheme::auto(eps));
    // units of work: a single level or a mixing pair
    let units: Vec<Vec<usize>> = match scheme {
        PairingScheme::Solo => (0..n_levels).map(|n| vec![n]).collect(),
        PairingScheme::StandardMix => {
            let mut u = vec![vec![0]];
            let mut m = 0;
            while 2 * m + 1 < n_levels {
                u.push(vec![2 * m + 1, 2 * m + 2]);
                m += 1;
            }
            u
        }
        PairingScheme::OutlookMix => (0..n_levels.div_ceil(2)).map(|m| vec![2 * m, 2 * m + 1]).collect(),
    };
    let results: Vec<(Vec<usize>, Result<Vec<EnergyEstimate>>)> = units
        .into_par_iter()
        .filter(|u| u[0] < n_levels)
        .map(|levels| {
            let r = if levels.len() == 1 {
                zeroth_energy(levels[0], eps).map(|e| vec![e])
            } else {
                let m = match scheme {
                    PairingScheme::StandardMix => (levels[0] - 1) / 2,
                    _ => levels[0] / 2,
                };
                mixed_pair(m, eps, scheme).map(|p| {
                    let (lo, hi) = order_pair(p.e_minus, p.e_plus);
                    [(p.levels.0, lo), (p.levels.1, hi)]
                        .into_iter()
                        .map(|(n, value)| EnergyEstimate {
                            n,
                            eps,
                            value,
                            method: Method::Mixed,
                            params: p.params,
                            residual: p.residual,
                        })
                        .collect()
                })
            };
            (levels, r)
        })
        .collect();
    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    for (levels, r) in results {
        match r {
            Ok(es) => estimates.extend(es.into_iter().filter(|e| e.n < n_levels)),
            Err(e) => failures.extend(levels.into_iter().filter(|&n| n < n_levels).map(|n| (n, e.clone()))),
        }
    }
    estimates.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    failures.sort_by_key(|f| f.0);
    SpectrumReport { scheme, estimates, failures }
}
