//! The reduced planar field obtained by restricting the PDE-ODE system to the
//! span of its two leading modes, and the convergence study against the
//! limiting field.
//!
//! With the manifold correction truncated to zero, the reduced field is
//!
//! ```text
//! P_eps(u, v) = -lambda2 u + int_0^1 f1(u phi) phi dx + phi(0) g1(v)
//! Q_eps(u, v) = -beta v + f2(phi(0) u) + g2(v)
//! ```
//!
//! and because `f1` is a polynomial, `int f1(u phi) phi = sum_k a_k m_k u^k`
//! with the moments `m_k = int phi^(k+1)`, so `P_eps` is again an exact
//! polynomial.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::c1norm::{c1_distance, Radius};
use crate::compactify::compactify_with_degree;
use crate::error::{Error, Result};
use crate::polyfield::{limit_field, Axis, BivariatePoly, PlanarField, ProblemSpec};
use crate::simulate::{integrate_pde, wperp_sup_h1, PdeOptions, SimState};
use crate::spectral::{spectral_result, GridFunction, SpectralResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    /// `m[k] = int_0^1 phi^(k+1)`, `k = 0..=d`.
    pub m: Vec<f64>,
    /// `phi(0)`.
    pub phi0: f64,
}

/// Trapezoid moments of `phi` up to order `d + 1`.
pub fn moments(phi: &GridFunction, d: usize) -> MomentTable {
    let mut pow = phi.clone();
    let mut m = Vec::with_capacity(d + 1);
    for _ in 0..=d {
        m.push(pow.integral());
        for (p, f) in pow.values_mut().iter_mut().zip(phi.values()) {
            *p *= f;
        }
    }
    MomentTable {
        m,
        phi0: phi.values()[0],
    }
}

/// Treatment of the invariant-manifold graph in the reduced field. Only the
/// zero-order truncation is computable; its error is measured separately by
/// the `w_perp` statistic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldMode {
    #[default]
    Zero,
}

pub fn reduced_field(
    spec: &ProblemSpec,
    sr: &SpectralResult,
    mode: ManifoldMode,
) -> Result<PlanarField> {
    let ManifoldMode::Zero = mode;
    spec.validate()?;
    let table = moments(&sr.phi, spec.f1.degree().unwrap_or(0));
    let mut p = BivariatePoly::monomial(-sr.lambda2, 1, 0);
    for (k, &a) in spec.f1.coeffs().iter().enumerate() {
        p.add_term(k as u32, 0, a * table.m[k]);
    }
    p = &p + &BivariatePoly::from_univariate(&spec.g1.scale(table.phi0), Axis::V);
    let q = &(&BivariatePoly::monomial(-spec.beta, 0, 1)
        + &BivariatePoly::from_univariate(&spec.f2.compose_scale(table.phi0), Axis::U))
        + &BivariatePoly::from_univariate(&spec.g2, Axis::V);
    PlanarField::new(p, q)
}

/// Options of [`convergence_study`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    /// Grid resolution for the eigenproblem and the simulation.
    pub n: usize,
    pub grid_n: usize,
    pub radius: Radius,
    /// Time stepping of the `w_perp` simulation.
    pub pde: PdeOptions,
    /// Initial datum `w0(x)` as coefficients of `c0 + c1 cos(pi x)`, plus `v0`.
    pub w0: [f64; 2],
    pub v0: f64,
    /// Time window of the `w_perp` statistic.
    pub window: (f64, f64),
    /// Skip the PDE simulation (the `w_perp` column is then `NaN`).
    pub skip_simulation: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            n: 256,
            grid_n: 64,
            radius: Radius::Unit,
            pde: PdeOptions {
                t_end: 1.0,
                dt: 1e-3,
                sample_every: 10,
            },
            w0: [0.1, 0.05],
            v0: -0.1,
            window: (0.0, 1.0),
            skip_simulation: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub tau_eps: f64,
    pub lambda2_eps: f64,
    pub c1_distance: f64,
    pub sup_wperp_h1: f64,
}

/// For each `eps` (descending): spectral data, reduced field, chart-wise C¹
/// distance to the compactified limit field, and the `w_perp` statistic of a
/// PDE run from the configured initial datum.
pub fn convergence_study(
    spec: &ProblemSpec,
    eps_list: &[f64],
    opts: &StudyOptions,
) -> Result<Vec<ConvergenceRow>> {
    if eps_list.is_empty() {
        return Err(Error::Domain("empty eps list".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(format!(
            "eps list must be strictly descending: {eps_list:?}"
        )));
    }
    let d = spec.degree();
    let limit = compactify_with_degree(&limit_field(spec)?, d)?;
    eps_list
        .iter()
        .map(|&eps| {
            let sr = spectral_result(spec, eps, opts.n)?;
            let reduced =
                compactify_with_degree(&reduced_field(spec, &sr, ManifoldMode::Zero)?, d)?;
            let dist = c1_distance(&reduced, &limit, opts.grid_n, opts.radius)?;
            let sup_wperp_h1 = if opts.skip_simulation {
                f64::NAN
            } else {
                let [c0, c1] = opts.w0;
                let init = SimState::from_fn(
                    opts.n,
                    |x| c0 + c1 * (std::f64::consts::PI * x).cos(),
                    opts.v0,
                )?;
                let traj = integrate_pde(spec, eps, &init, &opts.pde)?;
                wperp_sup_h1(&traj, &sr.phi, opts.window)?
            };
            Ok(ConvergenceRow {
                eps,
                tau_eps: spec.tau(eps),
                lambda2_eps: sr.lambda2,
                c1_distance: dist.overall,
                sup_wperp_h1,
            })
        })
        .collect()
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("eps,tau_eps,lambda2_eps,c1_distance,sup_wperp_h1\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.eps, r.tau_eps, r.lambda2_eps, r.c1_distance, r.sup_wperp_h1
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::UnivariatePoly;
    use std::f64::consts::PI;

    #[test]
    fn moments_of_constant_and_cosine_profiles() {
        let one = GridFunction::from_fn(101, |_| 1.0).unwrap();
        let t = moments(&one, 3);
        assert!(t.m.iter().all(|m| (m - 1.0).abs() < 1e-14));
        assert_eq!(t.phi0, 1.0);
        let bump = GridFunction::from_fn(4001, |x| 1.0 + 0.1 * (PI * x).cos()).unwrap();
        let t = moments(&bump, 2);
        assert!((t.m[1] - 1.005).abs() < 1e-7);
        assert!((t.m[2] - 1.015).abs() < 1e-7);
    }

    #[test]
    fn example_reduces_to_limit_field() {
        let spec = ProblemSpec::quadratic_example();
        let x0 = limit_field(&spec).unwrap();
        for eps in [1e-1, 1e-2, 1e-3] {
            let sr = spectral_result(&spec, eps, 256).unwrap();
            let xe = reduced_field(&spec, &sr, ManifoldMode::Zero).unwrap();
            for (a, b) in [(xe.p(), x0.p()), (xe.q(), x0.q())] {
                let diff = a - b;
                assert!(diff.max_abs_coeff() < 1e-8, "{diff}");
            }
        }
    }

    #[test]
    fn synthetic_profile_rescales_quadratic_coefficient() {
        let spec = ProblemSpec::quadratic_example();
        let mut sr = spectral_result(&spec, 1.0, 64).unwrap();
        sr.phi = GridFunction::from_fn(4001, |x| 1.0 + 0.1 * (PI * x).cos()).unwrap();
        let xe = reduced_field(&spec, &sr, ManifoldMode::Zero).unwrap();
        assert!((xe.p().coeff(2, 0) + 1.015).abs() < 1e-7);
        assert!((xe.p().coeff(0, 2) - 1.1).abs() < 1e-12);
        assert!((xe.q().coeff(2, 0) - 1.21).abs() < 1e-12);
    }

    #[test]
    fn study_rejects_ascending_eps() {
        let spec = ProblemSpec::quadratic_example();
        assert!(convergence_study(&spec, &[1e-2, 1e-1], &StudyOptions::default()).is_err());
    }

    #[test]
    fn single_eps_gives_one_row() {
        let mut spec = ProblemSpec::quadratic_example();
        spec.diffusion = UnivariatePoly::new(vec![1.0, 1.0]);
        let opts = StudyOptions {
            n: 64,
            grid_n: 32,
            skip_simulation: true,
            ..Default::default()
        };
        let rows = convergence_study(&spec, &[0.1], &opts).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].c1_distance < 1e-7);
        assert!((rows[0].tau_eps - 10.0).abs() < 1e-12);
        assert_eq!(convergence_csv(&rows).lines().count(), 2);
    }
}
