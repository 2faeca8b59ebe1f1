//! Chart-wise C¹ norm of a compactified field, sampled on polar grids.
//!
//! For every chart the supremum over a closed ball of the Euclidean norm of
//! the chart system and of the operator norm of its Jacobian is estimated by
//! the maximum over a polar grid; the reported values are therefore lower
//! bounds of the true suprema.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::compactify::{Chart, ChartField, CompactifiedField};
use crate::error::{Error, Result};
use crate::polyfield::Matrix2;

pub const MIN_GRID_N: usize = 32;
pub const DEFAULT_GRID_N: usize = 64;

/// Radius of the chart balls. `Unit` follows the norm's definition; `Sqrt2`
/// gives balls whose images actually cover the sphere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Radius {
    #[default]
    #[serde(rename = "1")]
    Unit,
    #[serde(rename = "sqrt2")]
    Sqrt2,
}

impl Radius {
    pub fn value(self) -> f64 {
        match self {
            Radius::Unit => 1.0,
            Radius::Sqrt2 => SQRT_2,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Radius::Unit => "1",
            Radius::Sqrt2 => "sqrt2",
        })
    }
}

impl std::str::FromStr for Radius {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Radius::Unit),
            "sqrt2" => Ok(Radius::Sqrt2),
            _ => Err(Error::Domain(format!(
                "radius must be 1 or sqrt2, got {s:?}"
            ))),
        }
    }
}

/// Largest singular value of a 2x2 matrix, in closed form.
pub fn spectral_norm(m: Matrix2) -> f64 {
    let [[a, b], [c, d]] = m;
    // sigma_max = (sqrt((a+d)^2 + (b-c)^2) + sqrt((a-d)^2 + (b+c)^2)) / 2
    0.5 * ((a + d).hypot(b - c) + (a - d).hypot(b + c))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSup {
    pub sup_value: f64,
    pub sup_derivative: f64,
    pub argmax_value: [f64; 2],
    pub argmax_derivative: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Report {
    pub per_chart: BTreeMap<Chart, ChartSup>,
    pub overall: f64,
    pub grid_n: usize,
    pub radius: f64,
}

/// Center plus `grid_n` radii `R i / grid_n` times `4 grid_n` equispaced angles.
///
/// Doubling `grid_n` reproduces every node of the coarser grid bit for bit,
/// so refined suprema never decrease.
pub fn polar_grid(grid_n: usize, radius: f64) -> Vec<[f64; 2]> {
    let na = 4 * grid_n;
    let mut pts = Vec::with_capacity(grid_n * na + 1);
    pts.push([0.0, 0.0]);
    for i in 1..=grid_n {
        let r = radius * i as f64 / grid_n as f64;
        for k in 0..na {
            let th = 2.0 * PI * k as f64 / na as f64;
            pts.push([r * th.cos(), r * th.sin()]);
        }
    }
    pts
}

fn chart_sup(sys: &ChartField, grid: &[[f64; 2]]) -> ChartSup {
    let mut s = ChartSup {
        sup_value: 0.0,
        sup_derivative: 0.0,
        argmax_value: grid[0],
        argmax_derivative: grid[0],
    };
    for &p in grid {
        let f = sys.eval(p[0], p[1]);
        let v = f[0].hypot(f[1]);
        if v > s.sup_value {
            s.sup_value = v;
            s.argmax_value = p;
        }
        let dn = spectral_norm(sys.jacobian(p[0], p[1]));
        if dn > s.sup_derivative {
            s.sup_derivative = dn;
            s.argmax_derivative = p;
        }
    }
    s
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < MIN_GRID_N {
        return Err(Error::Domain(format!(
            "grid_n must be at least {MIN_GRID_N}, got {grid_n}"
        )));
    }
    Ok(())
}

fn report<'a>(
    systems: impl Iterator<Item = ChartField>,
    grid_n: usize,
    radius: Radius,
) -> C1Report {
    let grid = polar_grid(grid_n, radius.value());
    let per_chart: BTreeMap<Chart, ChartSup> = systems
        .map(|sys| (sys.chart, chart_sup(&sys, &grid)))
        .collect();
    let overall = per_chart
        .values()
        .fold(0.0f64, |m, s| m.max(s.sup_value).max(s.sup_derivative));
    C1Report {
        per_chart,
        overall,
        grid_n,
        radius: radius.value(),
    }
}

pub fn c1_norm(cf: &CompactifiedField, grid_n: usize, radius: Radius) -> Result<C1Report> {
    check_grid(grid_n)?;
    Ok(report(cf.charts().iter().cloned(), grid_n, radius))
}

/// C¹ norm of the chart-wise difference `a - b`; both fields must have been
/// compactified with the same degree.
pub fn c1_distance(
    a: &CompactifiedField,
    b: &CompactifiedField,
    grid_n: usize,
    radius: Radius,
) -> Result<C1Report> {
    check_grid(grid_n)?;
    if a.d != b.d {
        return Err(Error::Domain(format!(
            "cannot compare compactifications of degree {} and {}; compactify both with a common d",
            a.d, b.d
        )));
    }
    let diffs = Chart::ALL
        .into_iter()
        .map(|c| a.chart(c).difference(b.chart(c)));
    Ok(report(diffs, grid_n, radius))
}
