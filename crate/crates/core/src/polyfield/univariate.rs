use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Dense univariate polynomial with ascending coefficients `c0 + c1 x + ...`.
///
/// The coefficient vector is kept trimmed: the last stored coefficient is
/// nonzero, and the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnivariatePoly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for UnivariatePoly {
    fn from(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs)
    }
}

impl From<UnivariatePoly> for Vec<f64> {
    fn from(p: UnivariatePoly) -> Self {
        p.coeffs
    }
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `c x^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` stands for the degree of the zero polynomial (minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(s x)`.
    pub fn compose_scale(&self, s: f64) -> Self {
        let mut pow = 1.0;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * pow);
            pow *= s;
        }
        Self::new(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// All real roots in ascending order, each reported once.
    ///
    /// Roots are isolated recursively: between consecutive real critical
    /// points (roots of `p'`) the polynomial is monotone, so each such interval
    /// holds at most one simple root, located by bisection and polished with
    /// Newton. Critical points where `p` vanishes to rounding precision are
    /// reported as (even-multiplicity) roots.
    pub fn real_roots(&self) -> Vec<f64> {
        let deg = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(d) => d,
        };
        if deg == 1 {
            return vec![-self.coeffs[0] / self.coeffs[1]];
        }
        let bound = self.cauchy_bound();
        let crit: Vec<f64> = self
            .derivative()
            .real_roots()
            .into_iter()
            .filter(|c| c.abs() <= bound)
            .collect();
        let mut breaks = Vec::with_capacity(crit.len() + 2);
        breaks.push(-bound);
        breaks.extend(crit.iter().copied());
        breaks.push(bound);

        let scale = self.max_abs_coeff();
        let mut roots: Vec<f64> = Vec::new();
        for &c in &crit {
            if self.eval(c).abs() <= 1e-13 * scale * (1.0 + c.abs()).powi(deg as i32) {
                roots.push(c);
            }
        }
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 {
                roots.push(a);
                continue;
            }
            if fa.signum() == fb.signum() || fb == 0.0 {
                continue;
            }
            roots.push(self.bisect(a, b, fa));
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        roots
    }

    fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        1.0 + m / lead
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        let mut x = 0.5 * (a + b);
        let dp = self.derivative();
        for _ in 0..3 {
            let d = dp.eval(x);
            if d == 0.0 {
                break;
            }
            let next = x - self.eval(x) / d;
            if !(a..=b).contains(&next) {
                break;
            }
            x = next;
        }
        x
    }
}

impl Add for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn add(self, rhs: Self) -> UnivariatePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn sub(self, rhs: Self) -> UnivariatePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn mul(self, rhs: Self) -> UnivariatePoly {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UnivariatePoly::new(out)
    }
}

impl Neg for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn neg(self) -> UnivariatePoly {
        self.scale(-1.0)
    }
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(f64, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, &c)| (c, super::monomial_name(&[("x", k as u32)])))
            .collect();
        super::write_terms(f, &terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_reports_degree() {
        let p = UnivariatePoly::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UnivariatePoly::new(vec![0.0, 0.0]).degree(), None);
        assert!(UnivariatePoly::zero().is_zero());
    }

    #[test]
    fn roots_of_cubic_with_one_real_root() {
        // -x^3 - x^2 - x + 1
        let p = UnivariatePoly::new(vec![1.0, -1.0, -1.0, -1.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.543_689_012_692_076).abs() < 1e-12);
    }

    #[test]
    fn roots_with_double_root() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let p = UnivariatePoly::new(vec![2.0, -3.0, 0.0, 1.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn constants_have_no_roots() {
        assert!(UnivariatePoly::new(vec![3.0]).real_roots().is_empty());
        assert!(UnivariatePoly::zero().real_roots().is_empty());
    }

    #[test]
    fn display_is_descending() {
        let p = UnivariatePoly::new(vec![1.0, -1.0, 0.0, -1.0]);
        assert_eq!(p.to_string(), "-x^3 - x + 1");
    }
}
