use serde::{Deserialize, Serialize};

use super::{Axis, BivariatePoly, PlanarField, UnivariatePoly};
use crate::error::{Error, Result};

/// Number of uniform sample points on `[0, 1]` used to check `a(x) > 0`
/// and to estimate `min a`.
pub const DIFFUSION_SAMPLES: usize = 1001;

/// Full data of the coupled PDE-ODE problem: reaction rates, polynomial
/// nonlinearities, and the base diffusion profile `a(x)` with
/// `a_eps(x) = a(x) / eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub lambda: f64,
    pub beta: f64,
    pub f1: UnivariatePoly,
    pub f2: UnivariatePoly,
    pub g1: UnivariatePoly,
    pub g2: UnivariatePoly,
    pub diffusion: UnivariatePoly,
    #[serde(default)]
    pub relaxed_degrees: bool,
}

impl ProblemSpec {
    /// The worked quadratic example: `lambda = beta = 1`, `f1 = -u^2`,
    /// `g1 = v^2`, `f2 = u^2`, `g2 = v^2 + 2v`, constant diffusion.
    ///
    /// `f1` and `g1` have full degree `d = 2`, so the example is only
    /// admissible under the relaxed degree rule (`f1(0) = g1(0) = 0`).
    pub fn quadratic_example() -> Self {
        Self {
            lambda: 1.0,
            beta: 1.0,
            f1: UnivariatePoly::new(vec![0.0, 0.0, -1.0]),
            f2: UnivariatePoly::new(vec![0.0, 0.0, 1.0]),
            g1: UnivariatePoly::new(vec![0.0, 0.0, 1.0]),
            g2: UnivariatePoly::new(vec![0.0, 2.0, 1.0]),
            diffusion: UnivariatePoly::new(vec![1.0]),
            relaxed_degrees: true,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// `max(deg f1, deg f2, deg g1, deg g2)`, or `None` if all vanish.
    pub fn nonlinear_degree(&self) -> Option<usize> {
        [&self.f1, &self.f2, &self.g1, &self.g2]
            .iter()
            .filter_map(|p| p.degree())
            .max()
    }

    /// Degree used for the compactification of every field built from this spec.
    pub fn degree(&self) -> u32 {
        self.nonlinear_degree().map_or(1, |d| d.max(1) as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "lambda > 0 violated (lambda = {})",
                self.lambda
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "beta > 0 violated (beta = {})",
                self.beta
            )));
        }
        for (name, p) in [
            ("f1", &self.f1),
            ("f2", &self.f2),
            ("g1", &self.g1),
            ("g2", &self.g2),
        ] {
            if p.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "{name} has a non-finite coefficient"
                )));
            }
        }
        match self.nonlinear_degree() {
            None if self.relaxed_degrees => {}
            None => {
                return Err(Error::InvalidSpec(
                    "d - 2 >= 0 violated: all nonlinearities vanish (d undefined)".into(),
                ))
            }
            Some(d) => {
                if d < 2 {
                    return Err(Error::InvalidSpec(format!("d - 2 >= 0 violated (d = {d})")));
                }
                for (name, p) in [("g1", &self.g1), ("f1", &self.f1)] {
                    let dp = match p.degree() {
                        Some(k) => k,
                        None => continue,
                    };
                    if dp + 1 <= d {
                        continue;
                    }
                    let relaxed_ok = self.relaxed_degrees && p.coeff(0) == 0.0;
                    if !relaxed_ok {
                        let hint = if self.relaxed_degrees {
                            format!(" and {name}(0) = {} != 0", p.coeff(0))
                        } else {
                            String::new()
                        };
                        return Err(Error::InvalidSpec(format!(
                            "d - 1 >= deg {name} violated (d = {d}, deg {name} = {dp}){hint}"
                        )));
                    }
                }
            }
        }
        if self.diffusion.is_zero() {
            return Err(Error::InvalidSpec(
                "diffusion a(x) is identically zero".into(),
            ));
        }
        let (xmin, amin) = self.diffusion_min();
        if !(amin > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "diffusion a(x) > 0 violated: a({xmin}) = {amin}"
            )));
        }
        Ok(())
    }

    /// Minimum of `a` over the uniform sample of `[0, 1]` with its location.
    pub fn diffusion_min(&self) -> (f64, f64) {
        (0..DIFFUSION_SAMPLES)
            .map(|k| {
                let x = k as f64 / (DIFFUSION_SAMPLES - 1) as f64;
                (x, self.diffusion.eval(x))
            })
            .fold((0.0, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// `a_eps(x) = a(x) / eps`.
    pub fn diffusion_at(&self, x: f64, eps: f64) -> f64 {
        self.diffusion.eval(x) / eps
    }

    /// `tau(eps) = min_x a_eps(x)`.
    pub fn tau(&self, eps: f64) -> f64 {
        self.diffusion_min().1 / eps
    }
}

/// The limiting planar field
/// `P0 = -lambda u + f1(u) + g1(v)`, `Q0 = -beta v + f2(u) + g2(v)`.
pub fn limit_field(spec: &ProblemSpec) -> Result<PlanarField> {
    spec.validate()?;
    let p = &(&BivariatePoly::monomial(-spec.lambda, 1, 0)
        + &BivariatePoly::from_univariate(&spec.f1, Axis::U))
        + &BivariatePoly::from_univariate(&spec.g1, Axis::V);
    let q = &(&BivariatePoly::monomial(-spec.beta, 0, 1)
        + &BivariatePoly::from_univariate(&spec.f2, Axis::U))
        + &BivariatePoly::from_univariate(&spec.g2, Axis::V);
    PlanarField::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_spec(relaxed: bool) -> ProblemSpec {
        ProblemSpec {
            lambda: 1.0,
            beta: 1.0,
            f1: UnivariatePoly::zero(),
            f2: UnivariatePoly::zero(),
            g1: UnivariatePoly::zero(),
            g2: UnivariatePoly::zero(),
            diffusion: UnivariatePoly::new(vec![1.0]),
            relaxed_degrees: relaxed,
        }
    }

    #[test]
    fn quadratic_example_field() {
        let f = limit_field(&ProblemSpec::quadratic_example()).unwrap();
        assert_eq!(f.p().display_with("u", "v"), "-u^2 + v^2 - u");
        assert_eq!(f.q().display_with("u", "v"), "u^2 + v^2 + v");
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn quadratic_example_needs_relaxed_rule() {
        let mut s = ProblemSpec::quadratic_example();
        s.relaxed_degrees = false;
        let err = limit_field(&s).unwrap_err().to_string();
        assert!(err.contains("d - 1 >= deg g1"), "{err}");
    }

    #[test]
    fn zero_nonlinearities() {
        let f = limit_field(&zero_spec(true)).unwrap();
        assert_eq!(f.p(), &BivariatePoly::monomial(-1.0, 1, 0));
        assert_eq!(f.q(), &BivariatePoly::monomial(-1.0, 0, 1));
        assert!(limit_field(&zero_spec(false)).is_err());
    }

    #[test]
    fn single_quadratic_reaction() {
        let mut s = zero_spec(true);
        s.f1 = UnivariatePoly::new(vec![0.0, 0.0, 1.0]);
        let f = limit_field(&s).unwrap();
        assert_eq!(
            f.p(),
            &BivariatePoly::from_terms([((1, 0), -1.0), ((2, 0), 1.0)])
        );
        assert_eq!(f.q(), &BivariatePoly::monomial(-1.0, 0, 1));
    }

    #[test]
    fn linear_nonlinearities_rejected_in_both_modes() {
        for relaxed in [false, true] {
            let mut s = zero_spec(relaxed);
            s.f1 = UnivariatePoly::new(vec![0.0, 0.5]);
            s.g2 = UnivariatePoly::new(vec![0.1, 0.2]);
            let err = limit_field(&s).unwrap_err().to_string();
            assert!(err.contains("d - 2 >= 0"), "{err}");
        }
    }

    #[test]
    fn relaxed_rule_requires_vanishing_constant() {
        let mut s = ProblemSpec::quadratic_example();
        s.g1 = UnivariatePoly::new(vec![0.5, 0.0, 1.0]);
        assert!(limit_field(&s).unwrap_err().to_string().contains("g1(0)"));
    }

    #[test]
    fn strict_rule_accepts_lower_degree_f1_g1() {
        let mut s = zero_spec(false);
        s.f1 = UnivariatePoly::new(vec![0.3, 1.0]);
        s.g1 = UnivariatePoly::new(vec![1.0, -1.0]);
        s.f2 = UnivariatePoly::new(vec![0.0, 0.0, 1.0]);
        assert!(limit_field(&s).is_ok());
    }

    #[test]
    fn nonpositive_diffusion_rejected() {
        let mut s = ProblemSpec::quadratic_example();
        s.diffusion = UnivariatePoly::new(vec![0.5, -1.0]);
        assert!(s.validate().unwrap_err().to_string().contains("a(x) > 0"));
    }

    #[test]
    fn nonpositive_rates_rejected() {
        let mut s = ProblemSpec::quadratic_example();
        s.beta = 0.0;
        assert!(s.validate().unwrap_err().to_string().contains("beta > 0"));
    }

    #[test]
    fn json_schema() {
        let text = r#"{"lambda":1,"beta":1,"f1":[0,0,-1],"f2":[0,0,1],"g1":[0,0,1],
                       "g2":[0,2,1],"diffusion":[1],"relaxed_degrees":true}"#;
        assert_eq!(
            ProblemSpec::from_json(text).unwrap(),
            ProblemSpec::quadratic_example()
        );
        let missing = r#"{"lambda":1,"f1":[0],"f2":[0],"g1":[0],"g2":[0],"diffusion":[1]}"#;
        let err = ProblemSpec::from_json(missing).unwrap_err().to_string();
        assert!(err.contains("beta"), "{err}");
    }

    #[test]
    fn tau_scales_inverse_eps() {
        let mut s = ProblemSpec::quadratic_example();
        s.diffusion = UnivariatePoly::new(vec![1.0, 1.0]);
        assert!((s.tau(1e-2) - 100.0).abs() < 1e-12);
    }
}
