//! Shared property suites. Each suite draws random inputs through proptest and
//! is run both from the `properties` test target and from the acceptance
//! harness, so the two can never drift apart.

#![allow(dead_code)]

use poincare_core::c1norm::{c1_distance, c1_norm, Radius};
use poincare_core::compactify::{
    antipodal_sign, central_projection, chart_to_sphere, compactify, compactify_with_degree, sphere_to_chart,
    sphere_to_plane, Chart, ChartField,
};
use poincare_core::equilibria::{classify, infinite_equilibria};
use poincare_core::polyfield::{Axis, BivariatePoly, Matrix2, PlanarField};
use poincare_core::simulate::project;
use poincare_core::spectral::{eigen_lowest, GridFunction, SymTridiagonal};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

pub type Check = std::result::Result<(), TestCaseError>;

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 3 => -3.0f64..3.0]
}

/// Bivariate polynomial with every monomial of total degree `<= deg` drawn
/// independently (a quarter of them zero on average).
pub fn poly(deg: u32) -> impl Strategy<Value = BivariatePoly> {
    let monomials: Vec<(u32, u32)> = (0..=deg).flat_map(|t| (0..=t).map(move |j| (t - j, j))).collect();
    prop::collection::vec(coefficient(), monomials.len())
        .prop_map(move |cs| BivariatePoly::from_terms(monomials.iter().copied().zip(cs)))
}

/// Planar field of degree between 1 and `max_deg`.
pub fn field(max_deg: u32) -> impl Strategy<Value = PlanarField> {
    (1..=max_deg)
        .prop_flat_map(|d| (poly(d), poly(d)))
        .prop_filter_map("degree at least one", |(p, q)| PlanarField::new(p, q).ok())
}

pub fn chart() -> impl Strategy<Value = Chart> {
    prop::sample::select(Chart::ALL.to_vec())
}

fn close(a: f64, b: f64, tol: f64) -> Check {
    prop_assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol:e})");
    Ok(())
}

/// Largest absolute term a field can produce on `|u|, |v| <= r`.
fn term_bound(f: &PlanarField, r: f64) -> f64 {
    let b = |p: &BivariatePoly| p.terms().map(|((i, j), c)| c.abs() * r.powi((i + j) as i32)).sum::<f64>();
    b(f.p()).max(b(f.q())).max(1.0)
}

// ---------------------------------------------------------------- suites

pub fn chart_round_trip(runner: &mut TestRunner) -> Result<(), String> {
    let s = (chart(), -20.0f64..20.0, -20.0f64..20.0, -50.0f64..50.0, -50.0f64..50.0);
    runner
        .run(&s, |(c, x, y, u, v)| {
            let sp = chart_to_sphere(c, x, y);
            close(sp.iter().map(|a| a * a).sum::<f64>(), 1.0, 1e-14)?;
            let back = sphere_to_chart(c, sp).expect("chart contains its own points");
            let tol = 1e-12 * (1.0 + x.abs() + y.abs());
            close(back[0], x, tol)?;
            close(back[1], y, tol)?;
            let plane = sphere_to_plane(central_projection(u, v)).unwrap();
            let tol = 1e-12 * (1.0 + u.abs() + v.abs());
            close(plane[0], u, tol)?;
            close(plane[1], v, tol)
        })
        .map_err(|e| e.to_string())
}

/// Chart map `phi` of the plane into an equatorial chart and its derivative.
fn chart_map(c: Chart, u: f64, v: f64) -> Option<([f64; 2], Matrix2)> {
    let (pivot, other) = match c {
        Chart::U1 | Chart::V1 => (v, u),
        Chart::U2 | Chart::V2 => (u, v),
        _ => return None,
    };
    let wanted = if c.is_v() { pivot < -0.2 } else { pivot > 0.2 };
    if !wanted {
        return None;
    }
    let point = [other / pivot, 1.0 / pivot];
    // d(other/pivot) and d(1/pivot) with respect to (other, pivot).
    let d_other = [1.0 / pivot, -other / (pivot * pivot)];
    let d_pivot = [0.0, -1.0 / (pivot * pivot)];
    let to_uv = |g: [f64; 2]| match c {
        Chart::U1 | Chart::V1 => [g[0], g[1]],
        _ => [g[1], g[0]],
    };
    Some((point, [to_uv(d_other), to_uv(d_pivot)]))
}

/// Each chart system at `phi(u, v)` equals `|y|^(d-1) Dphi X(u, v)`; `U3` is
/// `X` itself and every `Vk` system is `(-1)^(d-1)` times the `Uk` system.
pub fn pushforward_conjugacy(runner: &mut TestRunner) -> Result<(), String> {
    let s = (field(3), -5.0f64..5.0, -5.0f64..5.0);
    runner
        .run(&s, |(f, u, v)| {
            let cf = compactify(&f);
            let d = cf.d;
            prop_assert_eq!(cf.chart(Chart::U3).fx(), f.p());
            prop_assert_eq!(cf.chart(Chart::U3).fy(), f.q());
            for (uc, vc) in [(Chart::U1, Chart::V1), (Chart::U2, Chart::V2), (Chart::U3, Chart::V3)] {
                let s = antipodal_sign(d);
                prop_assert_eq!(cf.chart(vc).fx(), &cf.chart(uc).fx().scale(s));
                prop_assert_eq!(cf.chart(vc).fy(), &cf.chart(uc).fy().scale(s));
            }
            let x = f.eval(u, v);
            for c in [Chart::U1, Chart::U2, Chart::V1, Chart::V2] {
                let Some((pt, dphi)) = chart_map(c, u, v) else { continue };
                let rho = pt[1].abs().powi(d as i32 - 1);
                let pushed = [
                    rho * (dphi[0][0] * x[0] + dphi[0][1] * x[1]),
                    rho * (dphi[1][0] * x[0] + dphi[1][1] * x[1]),
                ];
                let got = cf.chart(c).eval(pt[0], pt[1]);
                let scale = rho * 25.0 * 25.0 * term_bound(&f, 5.0);
                close(got[0], pushed[0], 1e-12 * scale)?;
                close(got[1], pushed[1], 1e-12 * scale)?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// The chart expansions are exact polynomials of degree `<= d + 1`, the
/// equator is invariant, and they agree with the rational substitution.
pub fn polynomiality(runner: &mut TestRunner) -> Result<(), String> {
    let s = (field(4), chart(), -3.0f64..3.0, 0.1f64..3.0);
    runner
        .run(&s, |(f, c, x, y)| {
            let cf = compactify(&f);
            let d = cf.d;
            let sys: &ChartField = cf.chart(c);
            for p in [sys.fx(), sys.fy()] {
                prop_assert!(p.total_degree().unwrap_or(0) <= d + 1);
                prop_assert!(p.terms().all(|(_, a)| a.is_finite() && a != 0.0));
            }
            if c.touches_equator() {
                prop_assert!(sys.fy().terms().all(|((_, j), _)| j >= 1), "equator not invariant");
                let y = y * c.upper_sign();
                let (u, v) = match c {
                    Chart::U1 | Chart::V1 => (x / y, 1.0 / y),
                    _ => (1.0 / y, x / y),
                };
                let pq = f.eval(u, v);
                let yd = y.powi(d as i32);
                let sgn = if c.is_v() { antipodal_sign(d) } else { 1.0 };
                let direct = match c {
                    Chart::U1 | Chart::V1 => [yd * (pq[0] - x * pq[1]), -yd * y * pq[1]],
                    _ => [yd * (pq[1] - x * pq[0]), -yd * y * pq[0]],
                };
                let got = sys.eval(x, y);
                let scale = yd.abs() * 10.0 * term_bound(&f, 10.0 * (1.0 + x.abs()));
                close(got[0], sgn * direct[0], 1e-12 * scale)?;
                close(got[1], sgn * direct[1], 1e-12 * scale)?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Distance axioms on the sampling grid, homogeneity of the norm, and
/// monotone refinement of the nested polar grids.
pub fn c1_axioms(runner: &mut TestRunner) -> Result<(), String> {
    let s = (field(2), field(2), field(2), -4.0f64..4.0, prop::bool::ANY);
    runner
        .run(&s, |(a, b, c, k, wide)| {
            let radius = if wide { Radius::Sqrt2 } else { Radius::Unit };
            let [ca, cb, cc] = [&a, &b, &c].map(|f| compactify_with_degree(f, 2).unwrap());
            let dab = c1_distance(&ca, &cb, 32, radius).unwrap().overall;
            let dba = c1_distance(&cb, &ca, 32, radius).unwrap().overall;
            let dbc = c1_distance(&cb, &cc, 32, radius).unwrap().overall;
            let dac = c1_distance(&ca, &cc, 32, radius).unwrap().overall;
            prop_assert_eq!(c1_distance(&ca, &ca, 32, radius).unwrap().overall, 0.0);
            prop_assert!(dab >= 0.0);
            prop_assert_eq!(dab, dba);
            prop_assert!(dac <= (dab + dbc) * (1.0 + 1e-12), "{dac} > {dab} + {dbc}");
            let na = c1_norm(&ca, 32, radius).unwrap().overall;
            let scaled = PlanarField::new(a.p().scale(k), a.q().scale(k));
            if let Ok(scaled) = scaled {
                let nk = c1_norm(&compactify_with_degree(&scaled, 2).unwrap(), 32, radius).unwrap().overall;
                close(nk, k.abs() * na, 1e-12 * (1.0 + k.abs() * na))?;
            }
            let fine = c1_norm(&ca, 64, radius).unwrap().overall;
            prop_assert!(fine >= na);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn fd_check(analytic: Matrix2, f: impl Fn(f64, f64) -> [f64; 2], u: f64, v: f64, scale: f64) -> Check {
    let h = 1e-5;
    let du = f(u + h, v);
    let dum = f(u - h, v);
    let dv = f(u, v + h);
    let dvm = f(u, v - h);
    for i in 0..2 {
        close(analytic[i][0], (du[i] - dum[i]) / (2.0 * h), 1e-6 * scale)?;
        close(analytic[i][1], (dv[i] - dvm[i]) / (2.0 * h), 1e-6 * scale)?;
    }
    Ok(())
}

/// Analytic Jacobians of planar fields and chart systems against central
/// differences.
pub fn jacobian_vs_finite_differences(runner: &mut TestRunner) -> Result<(), String> {
    let s = (field(3), chart(), -2.0f64..2.0, -2.0f64..2.0);
    runner
        .run(&s, |(f, c, u, v)| {
            let scale = term_bound(&f, 3.0);
            fd_check(f.jacobian(u, v), |a, b| f.eval(a, b), u, v, scale)?;
            let sys = compactify(&f).chart(c).clone();
            fd_check(sys.jacobian(u, v), |a, b| sys.eval(a, b), u, v, 10.0 * scale)
        })
        .map_err(|e| e.to_string())
}

/// Projection onto `phi` and its complement is idempotent and reconstructs
/// the input.
pub fn projection_idempotence(runner: &mut TestRunner) -> Result<(), String> {
    let s = (
        prop::collection::vec(-1.0f64..1.0, 64..=64),
        prop::collection::vec(0.1f64..2.0, 64..=64),
    );
    runner
        .run(&s, |(w, p)| {
            let w = GridFunction::new(w).unwrap();
            let mut phi = GridFunction::new(p).unwrap();
            let n = phi.l2_norm();
            phi.values_mut().iter_mut().for_each(|x| *x /= n);
            let (u, perp) = project(&w, &phi).unwrap();
            let (u2, perp2) = project(&perp, &phi).unwrap();
            close(u2, 0.0, 1e-14)?;
            for ((a, b), (orig, ph)) in perp.values().iter().zip(perp2.values()).zip(w.values().iter().zip(phi.values()))
            {
                close(*a, *b, 1e-14)?;
                close(u * ph + a, *orig, 1e-14)?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Ring identities of evaluation and symmetry of mixed partials.
pub fn polynomial_algebra(runner: &mut TestRunner) -> Result<(), String> {
    let s = (poly(3), poly(3), -2.0f64..2.0, -2.0f64..2.0);
    runner
        .run(&s, |(a, b, u, v)| {
            let scale = 1e-12 * 100.0 * (1.0 + a.max_abs_coeff()) * (1.0 + b.max_abs_coeff());
            close((&a + &b).eval(u, v), a.eval(u, v) + b.eval(u, v), scale)?;
            close((&a * &b).eval(u, v), a.eval(u, v) * b.eval(u, v), scale * 100.0)?;
            prop_assert_eq!(a.partial(Axis::U).partial(Axis::V), a.partial(Axis::V).partial(Axis::U));
            prop_assert_eq!(&a - &a, BivariatePoly::zero());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Positive rescaling of a Jacobian keeps the classification; negation
/// reverses it.
pub fn classification_scaling(runner: &mut TestRunner) -> Result<(), String> {
    let m = prop::array::uniform2(prop::array::uniform2(-5.0f64..5.0));
    runner
        .run(&(m, 0.01f64..100.0), |(j, s)| {
            let (_, c) = classify(j);
            let scaled = j.map(|r| r.map(|x| x * s));
            let neg = j.map(|r| r.map(|x| -x));
            if c.is_hyperbolic() {
                prop_assert_eq!(classify(scaled).1, c);
                prop_assert_eq!(classify(neg).1, c.reversed());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// At most `d + 1` directions at infinity are equilibria, each with its
/// antipode, unless the whole equator is degenerate.
pub fn infinite_count(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&field(4), |f| {
            let cf = compactify(&f);
            let inf = infinite_equilibria(&cf).unwrap();
            if !inf.degenerate_equator {
                prop_assert!(inf.points.len() <= 2 * (cf.d as usize + 1));
                prop_assert!(inf.points.len() % 2 == 0);
                prop_assert!(inf.points.iter().all(|e| e.on_equator()));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Lowest eigenvalues of random symmetric tridiagonal matrices against a
/// dense symmetric eigensolver.
pub fn eigen_vs_dense(runner: &mut TestRunner) -> Result<(), String> {
    let s = (prop::collection::vec(-5.0f64..5.0, 50), prop::collection::vec(-2.0f64..2.0, 49));
    runner
        .run(&s, |(diag, off)| {
            let t = SymTridiagonal::new(diag.clone(), off.clone()).unwrap();
            let pairs = eigen_lowest(&t, 4).unwrap();
            let dense = nalgebra::DMatrix::from_fn(50, 50, |i, j| {
                if i == j {
                    diag[i]
                } else if i + 1 == j {
                    off[i]
                } else if j + 1 == i {
                    off[j]
                } else {
                    0.0
                }
            });
            let mut ev: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            for (p, e) in pairs.iter().zip(&ev) {
                close(p.value, *e, 1e-9)?;
                let r = t.matvec(&p.vector);
                let res = r.iter().zip(&p.vector).map(|(a, b)| (a - p.value * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(res <= 1e-8 * (1.0 + t.norm_inf()));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Suite = fn(&mut TestRunner) -> Result<(), String>;

/// The suites making up the property criterion, with their names.
pub const CORE_SUITES: [(&str, Suite); 6] = [
    ("chart round-trip", chart_round_trip),
    ("pushforward conjugacy", pushforward_conjugacy),
    ("polynomiality of expansion", polynomiality),
    ("C1-norm axioms and homogeneity", c1_axioms),
    ("Jacobian vs finite differences", jacobian_vs_finite_differences),
    ("projection idempotence", projection_idempotence),
];

/// Runner drawing `cases` inputs from a randomly seeded generator.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

/// Runner with a fixed seed, for reproducible acceptance runs.
pub fn deterministic_runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

