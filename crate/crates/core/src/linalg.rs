//! Dense complex eigenvalues: balancing, Householder reduction to upper
//! Hessenberg form, then single-shift QR with Wilkinson shifts and deflation.
//!
//! Only eigenvalues are computed here. Eigenvector-quality information comes
//! from [`inverse_iteration_residual`], which runs a few steps of shifted
//! inverse iteration per requested eigenvalue.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Row-major working copy.
struct Work {
    n: usize,
    a: Vec<Complex64>,
}

impl Work {
    fn from(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut a = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = m[(i, j)];
            }
        }
        Self { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    /// Diagonal similarity scaling by powers of two so that row and column
    /// norms are comparable.
    fn balance(&mut self) {
        let n = self.n;
        let radix = 2.0f64;
        let sqrdx = radix * radix;
        let mut done = false;
        let mut sweeps = 0;
        while !done && sweeps < 100 {
            done = true;
            sweeps += 1;
            for i in 0..n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 0..n {
                    if j != i {
                        c += self.at(j, i).l1_norm();
                        r += self.at(i, j).l1_norm();
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let inv = 1.0 / f;
                    for j in 0..n {
                        let v = self.at(i, j) * inv;
                        self.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = self.at(j, i) * f;
                        self.set(j, i, v);
                    }
                }
            }
        }
    }

    fn to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![ZERO; n];
        for k in 0..n - 2 {
            let mut norm2 = 0.0;
            for i in k + 1..n {
                norm2 += self.at(i, k).norm_sqr();
            }
            let norm = norm2.sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = self.at(k + 1, k);
            let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
            let alpha = -phase * norm;
            for i in k + 1..n {
                v[i] = self.at(i, k);
            }
            v[k + 1] -= alpha;
            let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let beta = 2.0 / vnorm2;
            // left: A <- (I - beta v v^H) A on rows k+1.., cols k..
            for j in k..n {
                let mut s = ZERO;
                for i in k + 1..n {
                    s += v[i].conj() * self.at(i, j);
                }
                s *= beta;
                for i in k + 1..n {
                    let val = self.at(i, j) - v[i] * s;
                    self.set(i, j, val);
                }
            }
            // right: A <- A (I - beta v v^H) on all rows, cols k+1..
            for i in 0..n {
                let mut s = ZERO;
                for j in k + 1..n {
                    s += self.at(i, j) * v[j];
                }
                s *= beta;
                for j in k + 1..n {
                    let val = self.at(i, j) - s * v[j].conj();
                    self.set(i, j, val);
                }
            }
            for i in k + 2..n {
                self.set(i, k, ZERO);
            }
        }
    }

    fn hessenberg_qr(&mut self) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut eig = vec![ZERO; n];
        if n == 0 {
            return Ok(eig);
        }
        let norm: f64 = self.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let eps = f64::EPSILON;
        let max_iter = 60 * n.max(10);
        let mut total = 0usize;
        let mut hi = n - 1;
        let mut its = 0usize;
        let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);

        while hi > 0 {
            // locate the start of the unreduced block ending at `hi`
            let mut l = hi;
            while l > 0 {
                let mut s = self.at(l - 1, l - 1).l1_norm() + self.at(l, l).l1_norm();
                if s == 0.0 {
                    s = norm;
                }
                if self.at(l, l - 1).l1_norm() <= eps * s {
                    self.set(l, l - 1, ZERO);
                    break;
                }
                l -= 1;
            }
            if l == hi {
                eig[hi] = self.at(hi, hi);
                hi -= 1;
                its = 0;
                continue;
            }
            its += 1;
            total += 1;
            if total > max_iter {
                return Err(Error::QrNonConvergence { iterations: total });
            }

            let a = self.at(hi - 1, hi - 1);
            let b = self.at(hi - 1, hi);
            let c = self.at(hi, hi - 1);
            let d = self.at(hi, hi);
            let mu = if its % 11 == 10 {
                // exceptional shift
                d + Complex64::new(0.75 * c.norm(), 0.0)
            } else {
                let half = (a - d) * 0.5;
                let disc = (half * half + b * c).sqrt();
                let m1 = (a + d) * 0.5 + disc;
                let m2 = (a + d) * 0.5 - disc;
                if (m1 - d).norm() < (m2 - d).norm() {
                    m1
                } else {
                    m2
                }
            };

            for i in l..=hi {
                let v = self.at(i, i) - mu;
                self.set(i, i, v);
            }
            rot.clear();
            for k in l..hi {
                let x = self.at(k, k);
                let y = self.at(k + 1, k);
                let (cs, sn) = givens(x, y);
                rot.push((cs, sn));
                for j in k..=hi {
                    let p = self.at(k, j);
                    let q = self.at(k + 1, j);
                    self.set(k, j, p * cs + sn * q);
                    self.set(k + 1, j, -sn.conj() * p + q * cs);
                }
            }
            for (idx, &(cs, sn)) in rot.iter().enumerate() {
                let k = l + idx;
                let last = (k + 2).min(hi);
                for i in l..=last {
                    let p = self.at(i, k);
                    let q = self.at(i, k + 1);
                    self.set(i, k, p * cs + q * sn.conj());
                    self.set(i, k + 1, -p * sn + q * cs);
                }
            }
            for i in l..=hi {
                let v = self.at(i, i) + mu;
                self.set(i, i, v);
            }
        }
        eig[0] = self.at(0, 0);
        Ok(eig)
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

/// All eigenvalues of a dense complex matrix, unsorted.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    assert_eq!(m.nrows(), m.ncols(), "square matrix required");
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let mut w = Work::from(m);
    w.balance();
    w.to_hessenberg();
    w.hessenberg_qr()
}

/// Backward-error estimate `‖Mv − λv‖/‖v‖` for an approximate eigenvalue,
/// with `v` from a few steps of shifted inverse iteration.
pub fn inverse_iteration_residual(m: &CMatrix, lambda: Complex64) -> Result<f64> {
    let n = m.nrows();
    let scale = 1.0 + lambda.norm();
    let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(1.0 / (1.0 + i as f64).sqrt(), 0.3));
    for _ in 0..3 {
        let next = lu.solve(&v).ok_or(Error::Singular)?;
        let nrm = next.norm();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::Singular);
        }
        v = next / Complex64::new(nrm, 0.0);
    }
    let r = m * &v - &v * lambda;
    Ok(r.norm() / v.norm())
}

/// Frobenius-type magnitude used to scale residual checks.
pub fn matrix_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orders eigenvalues by real part, conjugate partners adjacent with the
/// negative imaginary part first.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re));
    // within clusters of (numerically) equal real part, order by imaginary part
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && (values[j].re - values[i].re).abs() <= 1e-9 * (1.0 + values[i].re.abs()) {
            j += 1;
        }
        values[i..j].sort_by(|a, b| a.im.total_cmp(&b.im));
        i = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 2.0), c(0.5, 0.0)]));
        let mut e = eigenvalues(&m).unwrap();
        sort_spectrum(&mut e);
        assert_eq!(e, vec![c(-1.0, 2.0), c(0.5, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn swap_matrix() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let mut e = eigenvalues(&m).unwrap();
        sort_spectrum(&mut e);
        assert!((e[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((e[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_matrix_has_conjugate_pair() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let mut e = eigenvalues(&m).unwrap();
        sort_spectrum(&mut e);
        assert!((e[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn residual_is_small_for_exact_eigenvalue() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let r = inverse_iteration_residual(&m, c(3.0, 0.0)).unwrap();
        assert!(r < 1e-8);
    }
}
