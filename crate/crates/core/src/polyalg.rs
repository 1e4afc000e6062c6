//! Dense complex polynomials in the monomial basis: physicists' Hermite
//! polynomials, products and argument shifts.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest Hermite degree accepted by [`ComplexPoly::hermite`].
pub const HERMITE_MAX_DEGREE: usize = 200;

/// `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    pub coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn one() -> Self {
        Self { coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Physicists' Hermite polynomial H_n from the three-term recurrence.
    pub fn hermite(n: usize) -> Result<Self> {
        if n > HERMITE_MAX_DEGREE {
            return Err(Error::Domain(format!("Hermite degree {n} exceeds {HERMITE_MAX_DEGREE}")));
        }
        let mut prev = vec![1.0];
        if n == 0 {
            return Ok(Self::from_real(&prev));
        }
        let mut cur = vec![0.0, 2.0];
        for k in 1..n {
            // H_{k+1} = 2x H_k - 2k H_{k-1}
            let mut next = vec![0.0; k + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += 2.0 * c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= 2.0 * k as f64 * c;
            }
            prev = cur;
            cur = next;
        }
        Ok(Self::from_real(&cur))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `p(x + a)` by repeated synthetic division (Taylor shift).
    pub fn shift(&self, a: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = c[j + 1] * a;
                c[j] += t;
            }
        }
        Self::new(c)
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;

    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(ComplexPoly::hermite(0).unwrap(), ComplexPoly::from_real(&[1.0]));
        assert_eq!(ComplexPoly::hermite(2).unwrap(), ComplexPoly::from_real(&[-2.0, 0.0, 4.0]));
        assert_eq!(ComplexPoly::hermite(3).unwrap(), ComplexPoly::from_real(&[0.0, -12.0, 0.0, 8.0]));
        assert!(ComplexPoly::hermite(201).is_err());
    }

    #[test]
    fn shift_example() {
        // H_2(x + i) = 4x² + 8ix - 6
        let p = ComplexPoly::hermite(2).unwrap().shift(c(0.0, 1.0));
        assert_eq!(p.coeffs, vec![c(-6.0, 0.0), c(0.0, 8.0), c(4.0, 0.0)]);
    }

    #[test]
    fn product_degree_and_value() {
        let a = ComplexPoly::hermite(3).unwrap();
        let b = ComplexPoly::hermite(4).unwrap();
        let p = &a * &b;
        assert_eq!(p.degree(), 7);
        let x = c(0.3, -0.2);
        assert!((p.eval(x) - a.eval(x) * b.eval(x)).norm() < 1e-12);
    }
}
