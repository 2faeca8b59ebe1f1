//! Finite and infinite equilibria of a compactified field and their
//! classification by the eigenvalues of the chart Jacobian.

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::c1norm::spectral_norm;
use crate::compactify::{
    antipodal_sign, chart_point_to_disk, equator_poly, Chart, CompactifiedField,
};
use crate::error::{Error, Result};
use crate::polyfield::{Matrix2, PlanarField};

/// Eigenvalues with `|Re| <= HYPERBOLICITY_TOL * ||J||` count as zero real part.
pub const HYPERBOLICITY_TOL: f64 = 1e-8;
/// Roots closer than this (chart coordinates) are the same equilibrium.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Required `|P| + |Q|` at every reported finite equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_BOX_RADIUS: f64 = 10.0;
pub const DEFAULT_SEEDS_PER_AXIS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Classification {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    Center,
    NonHyperbolic,
    Degenerate,
}

impl Classification {
    /// Classification after reversing time (negating the eigenvalues).
    pub fn reversed(self) -> Self {
        use Classification::*;
        match self {
            StableNode => UnstableNode,
            UnstableNode => StableNode,
            StableFocus => UnstableFocus,
            UnstableFocus => StableFocus,
            other => other,
        }
    }

    pub fn is_hyperbolic(self) -> bool {
        use Classification::*;
        matches!(
            self,
            Saddle | StableNode | UnstableNode | StableFocus | UnstableFocus
        )
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub chart: Chart,
    pub coords: [f64; 2],
    pub disk_position: [f64; 2],
    pub eigenvalues: [Complex64; 2],
    pub classification: Classification,
    pub hyperbolic: bool,
}

impl Equilibrium {
    pub fn from_jacobian(chart: Chart, coords: [f64; 2], j: Matrix2) -> Result<Self> {
        let disk_position = chart_point_to_disk(chart, coords[0], coords[1])?;
        let (eigenvalues, classification) = classify(j);
        Ok(Self {
            chart,
            coords,
            disk_position,
            eigenvalues,
            classification,
            hyperbolic: classification.is_hyperbolic(),
        })
    }

    /// True for points on `y = 0` of an equatorial chart.
    pub fn on_equator(&self) -> bool {
        self.chart.touches_equator() && self.coords[1].abs() <= 1e-12
    }
}

/// Eigenvalues from trace and determinant, and the resulting classification.
///
/// Real eigenvalues are returned ascending; a complex pair as `(re - i im,
/// re + i im)` with `im > 0`.
pub fn classify(j: Matrix2) -> ([Complex64; 2], Classification) {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let half = 0.5 * tr;
    let disc = half * half - det;
    let tol = HYPERBOLICITY_TOL * spectral_norm(j);
    if disc >= 0.0 {
        let s = disc.sqrt();
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (l1, l2) = if small <= big {
            (small, big)
        } else {
            (big, small)
        };
        let eig = [Complex64::new(l1, 0.0), Complex64::new(l2, 0.0)];
        let class = if l1.abs() <= tol || l2.abs() <= tol {
            Classification::NonHyperbolic
        } else if l1 < 0.0 && l2 > 0.0 {
            Classification::Saddle
        } else if l2 < 0.0 {
            Classification::StableNode
        } else {
            Classification::UnstableNode
        };
        (eig, class)
    } else {
        let im = (-disc).sqrt();
        let eig = [Complex64::new(half, -im), Complex64::new(half, im)];
        let class = if half.abs() <= tol {
            Classification::Center
        } else if half < 0.0 {
            Classification::StableFocus
        } else {
            Classification::UnstableFocus
        };
        (eig, class)
    }
}

/// Result of the finite-equilibrium search.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSearch {
    pub equilibria: Vec<Equilibrium>,
    /// Cells where both components change sign but no Newton start converged.
    pub warnings: Vec<String>,
}

/// Settings for [`finite_equilibria`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Half-width `R` of the search box `[-R, R]^2`.
    pub radius: f64,
    pub seeds_per_axis: usize,
    /// Seed of the jitter applied to the Newton start grid.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            radius: DEFAULT_BOX_RADIUS,
            seeds_per_axis: DEFAULT_SEEDS_PER_AXIS,
            seed: 0,
        }
    }
}

fn residual(field: &PlanarField, x: [f64; 2]) -> f64 {
    let f = field.eval(x[0], x[1]);
    f[0].abs() + f[1].abs()
}

/// Damped Newton iteration; `None` when the iteration stalls, leaves the
/// neighbourhood of the box, or ends above the residual tolerance.
fn newton(field: &PlanarField, start: [f64; 2], radius: f64) -> Option<[f64; 2]> {
    let mut x = start;
    let mut res = residual(field, x);
    for _ in 0..100 {
        if res == 0.0 {
            break;
        }
        let f = field.eval(x[0], x[1]);
        let j = field.jacobian(x[0], x[1]);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = [
            -(j[1][1] * f[0] - j[0][1] * f[1]) / det,
            -(-j[1][0] * f[0] + j[0][0] * f[1]) / det,
        ];
        let mut alpha = 1.0;
        let mut moved = false;
        while alpha >= 1.0 / 1024.0 {
            let trial = [x[0] + alpha * step[0], x[1] + alpha * step[1]];
            let r = residual(field, trial);
            if r.is_finite() && r < res {
                x = trial;
                res = r;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        let step_len = alpha * step[0].hypot(step[1]);
        if !moved || step_len <= 1e-15 * (1.0 + x[0].hypot(x[1])) {
            break;
        }
        if x[0].abs() > 10.0 * radius || x[1].abs() > 10.0 * radius {
            return None;
        }
    }
    let inside = x[0].abs() <= radius && x[1].abs() <= radius;
    (res < RESIDUAL_TOL && inside).then_some(x)
}

fn push_unique(roots: &mut Vec<[f64; 2]>, x: [f64; 2]) -> bool {
    if roots
        .iter()
        .any(|r| (r[0] - x[0]).hypot(r[1] - x[1]) < DEDUP_RADIUS)
    {
        return false;
    }
    roots.push(x);
    true
}

fn sign_change(vals: [f64; 4]) -> bool {
    vals.iter().any(|&v| v <= 0.0) && vals.iter().any(|&v| v >= 0.0)
}

/// All equilibria of the planar field in `[-R, R]^2`, located by damped
/// Newton from a jittered `seeds_per_axis^2` start grid and completed by a
/// sign-change sweep on a finer grid.
pub fn finite_equilibria(field: &PlanarField, opts: &SearchOptions) -> Result<EquilibriumSearch> {
    let r = opts.radius;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "search radius must be positive, got {r}"
        )));
    }
    if opts.seeds_per_axis < 8 {
        return Err(Error::Domain(format!(
            "need at least 8 seeds per axis, got {}",
            opts.seeds_per_axis
        )));
    }
    let n = opts.seeds_per_axis;
    let cell = 2.0 * r / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut roots: Vec<[f64; 2]> = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let jx: f64 = rng.gen_range(-0.25..0.25);
            let jy: f64 = rng.gen_range(-0.25..0.25);
            let start = [
                -r + (i as f64 + 0.5 + jx) * cell,
                -r + (k as f64 + 0.5 + jy) * cell,
            ];
            if let Some(x) = newton(field, start, r) {
                push_unique(&mut roots, x);
            }
        }
    }

    // Sign-change sweep: every cell crossed by both zero curves must be
    // explained by a known root nearby, or be searched from its own corners.
    let m = 8 * n;
    let h = 2.0 * r / m as f64;
    let node = |i: usize| -r + i as f64 * h;
    let mut warnings = Vec::new();
    let mut prev: Vec<[f64; 2]> = (0..=m).map(|k| field.eval(node(0), node(k))).collect();
    for i in 1..=m {
        let cur: Vec<[f64; 2]> = (0..=m).map(|k| field.eval(node(i), node(k))).collect();
        for k in 0..m {
            let c = [prev[k], prev[k + 1], cur[k], cur[k + 1]];
            if !sign_change(c.map(|v| v[0])) || !sign_change(c.map(|v| v[1])) {
                continue;
            }
            let (x0, y0) = (node(i - 1), node(k));
            let explained = roots.iter().any(|p| {
                p[0] >= x0 - h && p[0] <= x0 + 2.0 * h && p[1] >= y0 - h && p[1] <= y0 + 2.0 * h
            });
            if explained {
                continue;
            }
            let starts = [
                [x0 + 0.5 * h, y0 + 0.5 * h],
                [x0, y0],
                [x0 + h, y0],
                [x0, y0 + h],
                [x0 + h, y0 + h],
            ];
            let found = starts
                .iter()
                .filter_map(|&s| newton(field, s, r))
                .collect::<Vec<_>>();
            if found.is_empty() {
                warnings.push(format!(
                    "possible missed root: no Newton start converged near ({:.6}, {:.6})",
                    x0 + 0.5 * h,
                    y0 + 0.5 * h
                ));
            }
            for x in found {
                push_unique(&mut roots, x);
            }
        }
        prev = cur;
    }

    roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
    let equilibria = roots
        .into_iter()
        .map(|x| Equilibrium::from_jacobian(Chart::U3, x, field.jacobian(x[0], x[1])))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumSearch {
        equilibria,
        warnings,
    })
}

/// Brute-force oracle: every grid cell of a `cells x cells` partition of the
/// box where both `P` and `Q` change sign is refined by recursive quadrisection
/// down to width `1e-11`; surviving cells are reported as roots.
///
/// Independent of Newton's method; roots exactly tangent to a zero curve (no
/// sign change) are invisible to it.
pub fn grid_bisection_oracle(field: &PlanarField, radius: f64, cells: usize) -> Vec<[f64; 2]> {
    let h = 2.0 * radius / cells as f64;
    let node = |i: usize| -radius + i as f64 * h;
    let mut out: Vec<[f64; 2]> = Vec::new();
    let mut prev: Vec<[f64; 2]> = (0..=cells).map(|k| field.eval(node(0), node(k))).collect();
    for i in 1..=cells {
        let cur: Vec<[f64; 2]> = (0..=cells).map(|k| field.eval(node(i), node(k))).collect();
        for k in 0..cells {
            let c = [prev[k], prev[k + 1], cur[k], cur[k + 1]];
            if sign_change(c.map(|v| v[0])) && sign_change(c.map(|v| v[1])) {
                refine_cell(field, [node(i - 1), node(k)], h, &mut out);
            }
        }
        prev = cur;
    }
    let mut clustered: Vec<[f64; 2]> = Vec::new();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for p in out {
        if !clustered
            .iter()
            .any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < 1e-7)
        {
            clustered.push(p);
        }
    }
    clustered
}

fn refine_cell(field: &PlanarField, corner: [f64; 2], width: f64, out: &mut Vec<[f64; 2]>) {
    const MAX_ACTIVE: usize = 16;
    let mut active = vec![(corner, width)];
    let mut w = width;
    while w > 1e-11 * (1.0 + corner[0].abs().max(corner[1].abs())) && !active.is_empty() {
        let half = 0.5 * w;
        let mut next = Vec::new();
        for (c, _) in &active {
            let g = |a: usize, b: usize| field.eval(c[0] + a as f64 * half, c[1] + b as f64 * half);
            let vals: [[[f64; 2]; 3]; 3] = [
                [g(0, 0), g(0, 1), g(0, 2)],
                [g(1, 0), g(1, 1), g(1, 2)],
                [g(2, 0), g(2, 1), g(2, 2)],
            ];
            for a in 0..2 {
                for b in 0..2 {
                    let corners = [
                        vals[a][b],
                        vals[a][b + 1],
                        vals[a + 1][b],
                        vals[a + 1][b + 1],
                    ];
                    if sign_change(corners.map(|v| v[0])) && sign_change(corners.map(|v| v[1])) {
                        next.push(([c[0] + a as f64 * half, c[1] + b as f64 * half], half));
                    }
                }
            }
        }
        if next.len() > MAX_ACTIVE {
            // Keep the cells whose centres have the smallest residual.
            let score = |c: &([f64; 2], f64)| {
                let v = field.eval(c.0[0] + 0.5 * c.1, c.0[1] + 0.5 * c.1);
                v[0].abs() + v[1].abs()
            };
            next.sort_by(|a, b| score(a).partial_cmp(&score(b)).unwrap());
            next.truncate(MAX_ACTIVE);
        }
        active = next;
        w = half;
    }
    for (c, w) in active {
        out.push([c[0] + 0.5 * w, c[1] + 0.5 * w]);
    }
}

/// Equilibria at infinity, one entry per distinct point of the equator.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InfiniteEquilibria {
    pub points: Vec<Equilibrium>,
    /// The equator polynomial vanishes identically: the whole equator
    /// consists of (non-isolated) equilibria.
    pub degenerate_equator: bool,
}

/// Every equilibrium on `y = 0` of one equatorial chart, classified by that
/// chart's Jacobian. Empty when the equator polynomial vanishes identically.
pub fn equator_equilibria(cf: &CompactifiedField, chart: Chart) -> Result<Vec<Equilibrium>> {
    let poly = equator_poly(cf, chart)?;
    let sys = cf.chart(chart);
    poly.real_roots()
        .into_iter()
        .map(|x| Equilibrium::from_jacobian(chart, [x, 0.0], sys.jacobian(x, 0.0)))
        .collect()
}

/// Distinct equilibria on the equator: roots of the `U1` equator polynomial,
/// the direction missed by `U1` (the `U2` origin) when it is a root, and the
/// antipodes of all of these.
pub fn infinite_equilibria(cf: &CompactifiedField) -> Result<InfiniteEquilibria> {
    let p1 = equator_poly(cf, Chart::U1)?;
    if p1.is_zero() {
        return Ok(InfiniteEquilibria {
            points: Vec::new(),
            degenerate_equator: true,
        });
    }
    let mut points = equator_equilibria(cf, Chart::U1)?;
    let p2 = equator_poly(cf, Chart::U2)?;
    if p2.coeff(0).abs() <= 1e-12 * p2.max_abs_coeff() {
        let j = cf.chart(Chart::U2).jacobian(0.0, 0.0);
        points.push(Equilibrium::from_jacobian(Chart::U2, [0.0, 0.0], j)?);
    }
    let antipodes = points
        .iter()
        .map(|e| antipodal(e, cf.d))
        .collect::<Result<Vec<_>>>()?;
    points.extend(antipodes);
    Ok(InfiniteEquilibria {
        points,
        degenerate_equator: false,
    })
}

/// The diametrically opposite equilibrium on the equator.
///
/// The `Vk` system is the `Uk` system times `(-1)^(d-1)`, so the eigenvalues
/// are negated for even `d` (stability flips) and kept for odd `d`.
pub fn antipodal(e: &Equilibrium, d: u32) -> Result<Equilibrium> {
    if !e.on_equator() {
        return Err(Error::Domain(format!(
            "{} point ({}, {}) is not on the equator",
            e.chart, e.coords[0], e.coords[1]
        )));
    }
    let s = antipodal_sign(d);
    let mut eigenvalues = e.eigenvalues.map(|z| z * s);
    if eigenvalues[0].re > eigenvalues[1].re
        || (eigenvalues[0].re == eigenvalues[1].re && eigenvalues[0].im > eigenvalues[1].im)
    {
        eigenvalues.swap(0, 1);
    }
    let classification = if s < 0.0 {
        e.classification.reversed()
    } else {
        e.classification
    };
    Ok(Equilibrium {
        chart: e.chart.antipode(),
        coords: e.coords,
        disk_position: [-e.disk_position[0], -e.disk_position[1]],
        eigenvalues,
        classification,
        hyperbolic: e.hyperbolic,
    })
}

pub const CSV_HEADER: &str =
    "chart,x,y,disk_p,disk_q,re_eig1,im_eig1,re_eig2,im_eig2,classification";

pub fn to_csv(eqs: &[Equilibrium]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in eqs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            e.chart,
            e.coords[0],
            e.coords[1],
            e.disk_position[0],
            e.disk_position[1],
            e.eigenvalues[0].re,
            e.eigenvalues[0].im,
            e.eigenvalues[1].re,
            e.eigenvalues[1].im,
            e.classification
        );
    }
    out
}
