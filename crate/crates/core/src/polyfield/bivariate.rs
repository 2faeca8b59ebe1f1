use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::UnivariatePoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    U,
    V,
}

/// Sparse bivariate polynomial `sum c_ij u^i v^j` keyed by exponent pair.
///
/// Zero coefficients are never stored, so structural equality is
/// coefficient-level equality.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "BTreeMap<String, f64>", try_from = "BTreeMap<String, f64>")]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), f64>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), f64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// `q(u)` lifted to a bivariate polynomial in `u` (or `v`).
    pub fn from_univariate(q: &UnivariatePoly, axis: Axis) -> Self {
        Self::from_terms(q.coeffs().iter().enumerate().map(|(k, &c)| {
            let k = k as u32;
            match axis {
                Axis::U => ((k, 0), c),
                Axis::V => ((0, k), c),
            }
        }))
    }

    /// Accumulates `c u^i v^j`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, i: u32, j: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Nested Horner evaluation: outer in `u`, inner in `v`.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let mut acc = 0.0;
        let mut row = 0.0;
        let mut row_i: Option<u32> = None;
        let mut row_j = 0u32;
        // Terms iterate in ascending (i, j); walk them backwards so that both
        // Horner recurrences run from the highest power down.
        for (&(i, j), &c) in self.terms.iter().rev() {
            match row_i {
                Some(ri) if ri == i => {
                    row = row * v.powi((row_j - j) as i32) + c;
                }
                Some(ri) => {
                    let finished = row * v.powi(row_j as i32);
                    acc = (acc + finished) * u.powi((ri - i) as i32);
                    row = c;
                }
                None => row = c,
            }
            row_i = Some(i);
            row_j = j;
        }
        match row_i {
            Some(ri) => (acc + row * v.powi(row_j as i32)) * u.powi(ri as i32),
            None => 0.0,
        }
    }

    pub fn partial(&self, axis: Axis) -> Self {
        Self::from_terms(self.terms().filter_map(|((i, j), c)| match axis {
            Axis::U if i > 0 => Some(((i - 1, j), c * i as f64)),
            Axis::V if j > 0 => Some(((i, j - 1), c * j as f64)),
            _ => None,
        }))
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    /// Restriction to `v = 0` as a polynomial in `u`.
    pub fn restrict_v_zero(&self) -> UnivariatePoly {
        let deg = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let mut c = vec![0.0; deg + 1];
        for ((i, j), coef) in self.terms() {
            if j == 0 {
                c[i as usize] += coef;
            }
        }
        UnivariatePoly::new(c)
    }

    /// Human-readable form with the given variable names, graded descending.
    pub fn display_with(&self, x: &str, y: &str) -> String {
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        let terms: Vec<(f64, String)> = keys
            .into_iter()
            .map(|(i, j)| (self.terms[&(i, j)], super::monomial_name(&[(x, i), (y, j)])))
            .collect();
        struct W<'a>(&'a [(f64, String)]);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                super::write_terms(f, self.0)
            }
        }
        W(&terms).to_string()
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("u", "v"))
    }
}

impl From<BivariatePoly> for BTreeMap<String, f64> {
    fn from(p: BivariatePoly) -> Self {
        p.terms
            .into_iter()
            .map(|((i, j), c)| (format!("{i},{j}"), c))
            .collect()
    }
}

impl TryFrom<BTreeMap<String, f64>> for BivariatePoly {
    type Error = String;

    fn try_from(map: BTreeMap<String, f64>) -> Result<Self, Self::Error> {
        let mut p = Self::zero();
        for (key, c) in map {
            let (i, j) = key
                .split_once(',')
                .ok_or_else(|| format!("exponent key {key:?} is not of the form \"i,j\""))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad exponent in {key:?}: {e}"))
            };
            p.add_term(parse(i)?, parse(j)?, c);
        }
        Ok(p)
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: Self) -> BivariatePoly {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, c);
        }
        out
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: Self) -> BivariatePoly {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: Self) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for ((i1, j1), a) in self.terms() {
            for ((i2, j2), b) in rhs.terms() {
                out.add_term(i1 + i2, j1 + j2, a * b);
            }
        }
        out
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p0() -> BivariatePoly {
        BivariatePoly::from_terms([((2, 0), -1.0), ((0, 2), 1.0), ((1, 0), -1.0)])
    }

    fn q0() -> BivariatePoly {
        BivariatePoly::from_terms([((0, 2), 1.0), ((2, 0), 1.0), ((0, 1), 1.0)])
    }

    #[test]
    fn eval_quadratic_example() {
        assert_eq!(p0().eval(0.0, 0.0), 0.0);
        assert_eq!(p0().eval(1.0, 1.0), -1.0);
        assert_eq!(q0().eval(1.0, 1.0), 3.0);
    }

    #[test]
    fn eval_matches_naive_sum() {
        let p = BivariatePoly::from_terms([
            ((0, 0), 0.5),
            ((3, 1), -2.0),
            ((0, 4), 1.5),
            ((2, 2), 0.25),
            ((5, 0), 1.0),
        ]);
        let (u, v): (f64, f64) = (0.7, -1.3);
        let naive: f64 = p
            .terms()
            .map(|((i, j), c)| c * u.powi(i as i32) * v.powi(j as i32))
            .sum();
        assert!((p.eval(u, v) - naive).abs() < 1e-13);
    }

    #[test]
    fn partials_of_example() {
        let du = p0().partial(Axis::U);
        assert_eq!(
            du,
            BivariatePoly::from_terms([((1, 0), -2.0), ((0, 0), -1.0)])
        );
        assert!(BivariatePoly::constant(3.0).partial(Axis::V).is_zero());
        let dv = q0().partial(Axis::V);
        assert_eq!(
            dv,
            BivariatePoly::from_terms([((0, 1), 2.0), ((0, 0), 1.0)])
        );
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = &p0() - &p0();
        assert!(p.is_zero());
        assert_eq!(p.total_degree(), None);
    }

    #[test]
    fn json_uses_exponent_keys() {
        let s = serde_json::to_string(&p0()).unwrap();
        assert_eq!(s, r#"{"0,2":1.0,"1,0":-1.0,"2,0":-1.0}"#);
        let back: BivariatePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p0());
        assert!(serde_json::from_str::<BivariatePoly>(r#"{"12":1.0}"#).is_err());
    }

    #[test]
    fn display_graded() {
        assert_eq!(p0().display_with("x", "y"), "-x^2 + y^2 - x");
    }
}
