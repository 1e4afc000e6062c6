//! Tabulated output: ε sweeps of the analytic and baseline spectra, the two
//! comparison tables and branch-point reports, with CSV/JSON serialization.

use std::io;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anharm::{aho_energy, aho_reference};
use crate::error::{Error, Result};
use crate::melem::Epsilon;
use crate::opmethod::{find_branch_point, spectrum, zeroth_energy, BranchPoint, Method, PairingScheme};
use crate::refsolve::converged_levels;
use crate::wkb::wkb_energy;

/// Largest number of ε points in one sweep.
pub const MAX_GRID: usize = 10_000;

/// Agreement between the two reference bases required for a sweep level.
pub const REFERENCE_TOL: f64 = 1e-4;

/// Families of values a sweep can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analytic,
    Reference,
    Wkb,
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(Source::Analytic),
            "reference" => Ok(Source::Reference),
            "wkb" => Ok(Source::Wkb),
            other => Err(Error::Domain(format!("unknown method {other:?} (expected analytic, reference or wkb)"))),
        }
    }
}

/// One CSV/JSON row. Failed solves keep `eps`, `n` and `method` and leave
/// every numeric field empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub n: usize,
    pub method: Method,
    #[serde(rename = "re_E")]
    pub re_e: Option<f64>,
    #[serde(rename = "im_E")]
    pub im_e: Option<f64>,
    pub omega: Option<f64>,
    pub ushift: Option<f64>,
    pub residual: Option<f64>,
}

impl SweepRow {
    fn failed(eps: f64, n: usize, method: Method) -> Self {
        Self { eps, n, method, re_e: None, im_e: None, omega: None, ushift: None, residual: None }
    }

    fn value(eps: f64, n: usize, method: Method, e: Complex64) -> Self {
        if !(e.re.is_finite() && e.im.is_finite()) {
            return Self::failed(eps, n, method);
        }
        Self { re_e: Some(e.re), im_e: Some(e.im), ..Self::failed(eps, n, method) }
    }

    pub fn is_error(&self) -> bool {
        self.re_e.is_none()
    }

    pub fn energy(&self) -> Option<Complex64> {
        Some(Complex64::new(self.re_e?, self.im_e?))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Reasons for the error rows, for stderr; not part of the data files.
    #[serde(skip)]
    pub diagnostics: Vec<String>,
}

impl SweepResult {
    /// Sorts by (ε, n, method name).
    pub fn new(rows: Vec<SweepRow>) -> Self {
        Self::with_diagnostics(rows, Vec::new())
    }

    pub fn with_diagnostics(mut rows: Vec<SweepRow>, diagnostics: Vec<String>) -> Self {
        rows.sort_by(|a, b| {
            a.eps.total_cmp(&b.eps).then(a.n.cmp(&b.n)).then(a.method.as_str().cmp(b.method.as_str()))
        });
        Self { rows, diagnostics }
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_error()).count()
    }

    pub fn success_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 1.0;
        }
        1.0 - self.failures() as f64 / self.rows.len() as f64
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if self.rows.is_empty() {
            out.write_record(["eps", "n", "method", "re_E", "im_E", "omega", "ushift", "residual"])?;
        }
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(r: R) -> csv::Result<Self> {
        let rows = csv::Reader::from_reader(r).deserialize().collect::<csv::Result<Vec<SweepRow>>>()?;
        Ok(Self::new(rows))
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Inclusive grid `lo, lo+step, …` up to `hi`, rounded to 12 decimals so
/// that accumulated steps print cleanly.
pub fn eps_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Domain(format!("invalid range {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() + 1.0;
    if count > MAX_GRID as f64 {
        return Err(Error::Domain(format!("{count} grid points exceed the limit of {MAX_GRID}")));
    }
    Ok((0..count as usize).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// Method tag the analytic solve of level `n` would carry.
fn analytic_tag(n: usize, scheme: PairingScheme) -> Method {
    match scheme {
        PairingScheme::Solo => Method::Solo,
        PairingScheme::StandardMix if n == 0 => Method::Solo,
        _ => Method::Mixed,
    }
}

fn eps_for(e: f64, scheme: Option<PairingScheme>) -> Result<Epsilon> {
    let outlook = scheme.is_none() || scheme == Some(PairingScheme::OutlookMix);
    if outlook {
        Epsilon::outlook(e)
    } else {
        Epsilon::new(e)
    }
}

type Rows = (Vec<SweepRow>, Vec<String>);

fn analytic_rows(e: f64, n_levels: usize, scheme: Option<PairingScheme>) -> Rows {
    let eps = match eps_for(e, scheme) {
        Ok(eps) => eps,
        Err(err) => {
            let scheme = scheme.unwrap_or(PairingScheme::Solo);
            return ((0..n_levels).map(|n| SweepRow::failed(e, n, analytic_tag(n, scheme))).collect(), vec![format!("eps = {e}: {err}")]);
        }
    };
    let report = spectrum(eps, n_levels, scheme);
    let mut rows: Vec<SweepRow> = report
        .estimates
        .iter()
        .map(|est| SweepRow {
            omega: Some(est.params.omega),
            ushift: Some(est.params.ushift),
            residual: est.residual.is_finite().then_some(est.residual),
            ..SweepRow::value(e, est.n, est.method, est.value)
        })
        .collect();
    let mut notes = Vec::new();
    for (n, err) in &report.failures {
        notes.push(format!("eps = {e}, level {n}: {err}"));
        rows.push(SweepRow::failed(e, *n, analytic_tag(*n, report.scheme)));
    }
    (rows, notes)
}

fn reference_rows(e: f64, n_levels: usize) -> Rows {
    let result = Epsilon::outlook(e).and_then(|eps| converged_levels(eps, n_levels, REFERENCE_TOL));
    match result {
        Ok(levels) => {
            (levels.into_iter().enumerate().map(|(n, v)| SweepRow::value(e, n, Method::Reference, v)).collect(), Vec::new())
        }
        Err(err) => (
            (0..n_levels).map(|n| SweepRow::failed(e, n, Method::Reference)).collect(),
            vec![format!("eps = {e}, reference: {err}")],
        ),
    }
}

/// WKB levels exist only for ε > 0; other points produce no rows.
fn wkb_rows(e: f64, n_levels: usize) -> Rows {
    if !(e > 0.0) {
        return (Vec::new(), Vec::new());
    }
    let mut notes = Vec::new();
    let rows = (0..n_levels)
        .map(|n| match wkb_energy(n, e) {
            Ok(v) => SweepRow::value(e, n, Method::Wkb, Complex64::new(v, 0.0)),
            Err(err) => {
                notes.push(format!("eps = {e}, wkb level {n}: {err}"));
                SweepRow::failed(e, n, Method::Wkb)
            }
        })
        .collect();
    (rows, notes)
}

/// Spectra at every ε of `grid`. `scheme = None` picks the pairing per point.
pub fn sweep(grid: &[f64], n_levels: usize, scheme: Option<PairingScheme>, sources: &[Source]) -> SweepResult {
    let parts: Vec<Rows> = grid
        .par_iter()
        .flat_map_iter(|&e| {
            sources.iter().map(move |s| match s {
                Source::Analytic => analytic_rows(e, n_levels, scheme),
                Source::Reference => reference_rows(e, n_levels),
                Source::Wkb => wkb_rows(e, n_levels),
            })
        })
        .collect();
    let (rows, notes): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    SweepResult::with_diagnostics(rows.into_iter().flatten().collect(), notes.into_iter().flatten().collect())
}

pub const TABLE1_LEVELS: [usize; 3] = [0, 10, 40];
pub const TABLE1_COUPLINGS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub lambda: f64,
    pub analytic: f64,
    pub reference: f64,
}

/// Zeroth-order and numerically exact levels of the quartic oscillator.
pub fn table1() -> Result<Vec<Table1Row>> {
    let cells: Vec<(usize, f64)> =
        TABLE1_LEVELS.iter().flat_map(|&n| TABLE1_COUPLINGS.iter().map(move |&l| (n, l))).collect();
    cells
        .into_par_iter()
        .map(|(n, lambda)| Ok(Table1Row { n, lambda, analytic: aho_energy(n, lambda), reference: aho_reference(n, lambda, None)? }))
        .collect()
}

pub const TABLE2_EPS: [f64; 2] = [1.0, 2.0];
pub const TABLE2_LEVELS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub eps: f64,
    pub n: usize,
    pub exact: f64,
    pub analytic: f64,
    pub wkb: f64,
}

/// Reference, operator-method and WKB levels for ε ∈ {1, 2}.
pub fn table2() -> Result<Vec<Table2Row>> {
    let mut rows = Vec::new();
    for e in TABLE2_EPS {
        let eps = Epsilon::new(e)?;
        let (exact, analytic) = rayon::join(
            || converged_levels(eps, TABLE2_LEVELS, REFERENCE_TOL),
            || (0..TABLE2_LEVELS).into_par_iter().map(|n| zeroth_energy(n, eps)).collect::<Result<Vec<_>>>(),
        );
        let (exact, analytic) = (exact?, analytic?);
        for n in 0..TABLE2_LEVELS {
            rows.push(Table2Row { eps: e, n, exact: exact[n].re, analytic: analytic[n].value.re, wkb: wkb_energy(n, e)? });
        }
    }
    Ok(rows)
}

/// Writes any serializable rows as CSV.
pub fn write_rows_csv<W: io::Write, T: Serialize>(w: W, rows: &[T]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub pair: (usize, usize),
    pub scheme: PairingScheme,
    pub eps_star: f64,
    pub discriminant_slope: f64,
}

/// Branch point of the mixing pair `(a, a+1)`.
pub fn branch(pair: (usize, usize), scheme: PairingScheme, eps_lo: f64, eps_hi: f64) -> Result<BranchReport> {
    let m = pair_index(pair, scheme)?;
    let BranchPoint { eps_star, discriminant_slope } = find_branch_point(m, scheme, eps_lo, eps_hi)?;
    Ok(BranchReport { pair, scheme, eps_star, discriminant_slope })
}

/// Index `m` of a mixing pair given its two levels.
pub fn pair_index(pair: (usize, usize), scheme: PairingScheme) -> Result<usize> {
    let bad = || Error::Domain(format!("({}, {}) is not a mixing pair of the {scheme} scheme", pair.0, pair.1));
    if pair.1 != pair.0 + 1 {
        return Err(bad());
    }
    match scheme {
        PairingScheme::StandardMix if pair.0 % 2 == 1 => Ok((pair.0 - 1) / 2),
        PairingScheme::OutlookMix if pair.0 % 2 == 0 => Ok(pair.0 / 2),
        _ => Err(bad()),
    }
}
