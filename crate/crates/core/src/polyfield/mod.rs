//! Exact polynomial representation of the planar fields and of the problem
//! data they are built from.

mod bivariate;
mod spec;
mod univariate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use bivariate::{Axis, BivariatePoly};
pub use spec::{limit_field, ProblemSpec, DIFFUSION_SAMPLES};
pub use univariate::UnivariatePoly;

use crate::error::{Error, Result};

pub type Matrix2 = [[f64; 2]; 2];

/// A planar polynomial vector field `(P, Q)` with `d = max(deg P, deg Q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlanarFieldRepr", into = "PlanarFieldRepr")]
pub struct PlanarField {
    p: BivariatePoly,
    q: BivariatePoly,
    d: u32,
    #[serde(skip)]
    grad: [BivariatePoly; 4],
}

#[derive(Serialize, Deserialize)]
struct PlanarFieldRepr {
    p: BivariatePoly,
    q: BivariatePoly,
    d: u32,
}

impl TryFrom<PlanarFieldRepr> for PlanarField {
    type Error = Error;
    fn try_from(r: PlanarFieldRepr) -> Result<Self> {
        let f = PlanarField::new(r.p, r.q)?;
        if f.d != r.d {
            return Err(Error::Domain(format!(
                "stored degree {} differs from polynomial degree {}",
                r.d, f.d
            )));
        }
        Ok(f)
    }
}

impl From<PlanarField> for PlanarFieldRepr {
    fn from(f: PlanarField) -> Self {
        Self {
            p: f.p,
            q: f.q,
            d: f.d,
        }
    }
}

impl PlanarField {
    /// Fails when both components are constant (`d < 1`).
    pub fn new(p: BivariatePoly, q: BivariatePoly) -> Result<Self> {
        let d = p.total_degree().max(q.total_degree()).unwrap_or(0);
        if d < 1 {
            return Err(Error::Domain(
                "planar field must have degree at least 1".into(),
            ));
        }
        let grad = [
            p.partial(Axis::U),
            p.partial(Axis::V),
            q.partial(Axis::U),
            q.partial(Axis::V),
        ];
        Ok(Self { p, q, d, grad })
    }

    pub fn p(&self) -> &BivariatePoly {
        &self.p
    }

    pub fn q(&self) -> &BivariatePoly {
        &self.q
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn eval(&self, u: f64, v: f64) -> [f64; 2] {
        [self.p.eval(u, v), self.q.eval(u, v)]
    }

    pub fn jacobian(&self, u: f64, v: f64) -> Matrix2 {
        let g = &self.grad;
        [
            [g[0].eval(u, v), g[1].eval(u, v)],
            [g[2].eval(u, v), g[3].eval(u, v)],
        ]
    }
}

/// `[[dP/du, dP/dv], [dQ/du, dQ/dv]]` at `(u, v)`.
pub fn jacobian(field: &PlanarField, u: f64, v: f64) -> Matrix2 {
    field.jacobian(u, v)
}

pub(crate) fn format_coeff(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

pub(crate) fn monomial_name(vars: &[(&str, u32)]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .filter(|(_, k)| *k > 0)
        .map(|(name, k)| {
            if *k == 1 {
                name.to_string()
            } else {
                format!("{name}^{k}")
            }
        })
        .collect();
    parts.join("*")
}

pub(crate) fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(f64, String)]) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (n, (c, mono)) in terms.iter().enumerate() {
        let sign = if *c < 0.0 { "-" } else { "+" };
        match (n, *c < 0.0) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            _ => write!(f, " {sign} ")?,
        }
        let mag = c.abs();
        if mono.is_empty() {
            f.write_str(&format_coeff(mag))?;
        } else if mag == 1.0 {
            f.write_str(mono)?;
        } else {
            write!(f, "{}*{}", format_coeff(mag), mono)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> PlanarField {
        PlanarField::new(
            BivariatePoly::from_terms([((2, 0), -1.0), ((0, 2), 1.0), ((1, 0), -1.0)]),
            BivariatePoly::from_terms([((0, 2), 1.0), ((2, 0), 1.0), ((0, 1), 1.0)]),
        )
        .unwrap()
    }

    #[test]
    fn jacobian_examples() {
        let f = example();
        assert_eq!(jacobian(&f, 0.0, 0.0), [[-1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(jacobian(&f, 1.0, 1.0), [[-3.0, 2.0], [2.0, 3.0]]);
        let lin = PlanarField::new(
            BivariatePoly::monomial(-1.0, 1, 0),
            BivariatePoly::monomial(-1.0, 0, 1),
        )
        .unwrap();
        assert_eq!(jacobian(&lin, 3.0, -7.0), [[-1.0, 0.0], [0.0, -1.0]]);
    }

    #[test]
    fn constant_field_rejected() {
        assert!(PlanarField::new(BivariatePoly::constant(1.0), BivariatePoly::zero()).is_err());
    }

    #[test]
    fn field_json_round_trip() {
        let f = example();
        let s = serde_json::to_string(&f).unwrap();
        let g: PlanarField = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.jacobian(1.0, 1.0), f.jacobian(1.0, 1.0));
    }

    #[test]
    fn coefficient_formatting() {
        assert_eq!(format_coeff(2.0), "2");
        assert_eq!(format_coeff(0.5), "0.5");
    }
}
