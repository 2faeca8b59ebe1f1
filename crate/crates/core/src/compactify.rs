//! Poincaré compactification of planar polynomial fields.
//!
//! The plane is identified with the tangent plane `{(u, v, 1)}` of the unit
//! sphere and pushed onto the upper hemisphere by central projection. Six
//! charts cover the sphere; each carries a polynomial chart system obtained by
//! substituting the chart's change of variables and multiplying by `y^d`.
//!
//! Chart conventions (sphere point `s = (s1, s2, s3)`):
//!
//! | chart | domain  | coordinates          | plane point `(u, v)` |
//! |-------|---------|----------------------|----------------------|
//! | `U1`  | `s2 > 0` | `(s1/s2, s3/s2)`    | `(x/y, 1/y)`         |
//! | `U2`  | `s1 > 0` | `(s2/s1, s3/s1)`    | `(1/y, x/y)`         |
//! | `U3`  | `s3 > 0` | `(s1/s3, s2/s3)`    | `(x, y)`             |
//!
//! `V1`, `V2`, `V3` use the same coordinate formulas on the opposite half
//! spaces, so the antipode of the `Uk` point `(x, y)` is the `Vk` point
//! `(x, y)`. With that choice each `Vk` system is the `Uk` system multiplied by
//! `(-1)^(d-1)`, and the upper hemisphere corresponds to `y <= 0` in `V1`/`V2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfield::{Axis, BivariatePoly, Matrix2, PlanarField, UnivariatePoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Chart {
    U1,
    U2,
    U3,
    V1,
    V2,
    V3,
}

impl Chart {
    pub const ALL: [Chart; 6] = [
        Chart::U1,
        Chart::U2,
        Chart::U3,
        Chart::V1,
        Chart::V2,
        Chart::V3,
    ];

    fn index(self) -> usize {
        self as usize
    }

    /// Sphere component used as the chart denominator.
    fn pivot(self) -> usize {
        match self {
            Chart::U1 | Chart::V1 => 1,
            Chart::U2 | Chart::V2 => 0,
            Chart::U3 | Chart::V3 => 2,
        }
    }

    /// The two sphere components forming the chart coordinates `(x, y)`.
    fn others(self) -> (usize, usize) {
        match self.pivot() {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    fn sign(self) -> f64 {
        if self.is_v() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_v(self) -> bool {
        matches!(self, Chart::V1 | Chart::V2 | Chart::V3)
    }

    /// True for the four charts whose `y = 0` line is the equator.
    pub fn touches_equator(self) -> bool {
        !matches!(self, Chart::U3 | Chart::V3)
    }

    pub fn antipode(self) -> Chart {
        match self {
            Chart::U1 => Chart::V1,
            Chart::U2 => Chart::V2,
            Chart::U3 => Chart::V3,
            Chart::V1 => Chart::U1,
            Chart::V2 => Chart::U2,
            Chart::V3 => Chart::U3,
        }
    }

    pub fn id(self) -> u8 {
        self as u8 + 1
    }

    /// Upper-hemisphere side of the chart, expressed on its `y` coordinate.
    pub fn upper_sign(self) -> f64 {
        self.sign()
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Chart::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown chart {s:?}")))
    }
}

/// `(u/D, v/D, 1/D)` with `D = sqrt(u^2 + v^2 + 1)`.
pub fn central_projection(u: f64, v: f64) -> [f64; 3] {
    let delta = (u * u + v * v + 1.0).sqrt();
    [u / delta, v / delta, 1.0 / delta]
}

/// Inverse of [`central_projection`] on the open upper hemisphere.
pub fn sphere_to_plane(s: [f64; 3]) -> Result<[f64; 2]> {
    if s[2] <= 0.0 {
        return Err(Error::Domain(format!(
            "{s:?} is not in the open upper hemisphere"
        )));
    }
    Ok([s[0] / s[2], s[1] / s[2]])
}

pub fn chart_to_sphere(chart: Chart, x: f64, y: f64) -> [f64; 3] {
    let sg = chart.sign();
    let (m, n) = chart.others();
    let mut s = [0.0; 3];
    s[chart.pivot()] = sg;
    s[m] = sg * x;
    s[n] = sg * y;
    let norm = (1.0 + x * x + y * y).sqrt();
    s.map(|c| c / norm)
}

/// Chart coordinates of a sphere point, or `None` outside the chart domain.
pub fn sphere_to_chart(chart: Chart, s: [f64; 3]) -> Option<[f64; 2]> {
    let piv = s[chart.pivot()];
    if piv * chart.sign() <= 0.0 {
        return None;
    }
    let (m, n) = chart.others();
    Some([s[m] / piv, s[n] / piv])
}

/// Chart with the largest pivot component; its coordinates are bounded by 1.
pub fn best_chart(s: [f64; 3]) -> Chart {
    let k = (0..3)
        .max_by(|&a, &b| s[a].abs().partial_cmp(&s[b].abs()).unwrap())
        .unwrap();
    let positive = s[k] >= 0.0;
    match (k, positive) {
        (0, true) => Chart::U2,
        (0, false) => Chart::V2,
        (1, true) => Chart::U1,
        (1, false) => Chart::V1,
        (_, true) => Chart::U3,
        (_, false) => Chart::V3,
    }
}

/// Orthogonal projection to the Poincaré disk of a chart point on the
/// closed upper hemisphere.
pub fn chart_point_to_disk(chart: Chart, x: f64, y: f64) -> Result<[f64; 2]> {
    let s = chart_to_sphere(chart, x, y);
    if s[2] < -1e-12 {
        return Err(Error::Domain(format!(
            "{chart} point ({x}, {y}) lies on the lower hemisphere"
        )));
    }
    Ok([s[0], s[1]])
}

/// Lift of a closed-disk point to the closed upper hemisphere.
pub fn disk_to_sphere(p: f64, q: f64) -> Result<[f64; 3]> {
    let r2 = p * p + q * q;
    if r2 > 1.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "({p}, {q}) lies outside the closed unit disk"
        )));
    }
    if r2 >= 1.0 {
        let r = r2.sqrt();
        return Ok([p / r, q / r, 0.0]);
    }
    Ok([p, q, (1.0 - r2).sqrt()])
}

/// One chart system `x' = fx(x, y)`, `y' = fy(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ChartFieldRepr", into = "ChartFieldRepr")]
pub struct ChartField {
    pub chart: Chart,
    fx: BivariatePoly,
    fy: BivariatePoly,
    grad: [BivariatePoly; 4],
}

#[derive(Serialize, Deserialize)]
struct ChartFieldRepr {
    chart: Chart,
    fx: BivariatePoly,
    fy: BivariatePoly,
}

impl From<ChartFieldRepr> for ChartField {
    fn from(r: ChartFieldRepr) -> Self {
        ChartField::new(r.chart, r.fx, r.fy)
    }
}

impl From<ChartField> for ChartFieldRepr {
    fn from(c: ChartField) -> Self {
        Self {
            chart: c.chart,
            fx: c.fx,
            fy: c.fy,
        }
    }
}

impl ChartField {
    pub fn new(chart: Chart, fx: BivariatePoly, fy: BivariatePoly) -> Self {
        let grad = [
            fx.partial(Axis::U),
            fx.partial(Axis::V),
            fy.partial(Axis::U),
            fy.partial(Axis::V),
        ];
        Self {
            chart,
            fx,
            fy,
            grad,
        }
    }

    pub fn fx(&self) -> &BivariatePoly {
        &self.fx
    }

    pub fn fy(&self) -> &BivariatePoly {
        &self.fy
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        [self.fx.eval(x, y), self.fy.eval(x, y)]
    }

    pub fn jacobian(&self, x: f64, y: f64) -> Matrix2 {
        let g = &self.grad;
        [
            [g[0].eval(x, y), g[1].eval(x, y)],
            [g[2].eval(x, y), g[3].eval(x, y)],
        ]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.chart, self.fx.scale(s), self.fy.scale(s))
    }

    /// Chart-wise difference `self - other` (charts must match).
    pub fn difference(&self, other: &ChartField) -> Self {
        debug_assert_eq!(self.chart, other.chart);
        Self::new(self.chart, &self.fx - &other.fx, &self.fy - &other.fy)
    }

    /// `x' = ..., y' = ...` listing in chart variables.
    pub fn listing(&self) -> String {
        format!(
            "{}: x' = {}\n{}: y' = {}",
            self.chart,
            self.fx.display_with("x", "y"),
            self.chart,
            self.fy.display_with("x", "y")
        )
    }
}

/// The six chart systems of a planar field compactified with degree `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactifiedField {
    pub source: PlanarField,
    pub d: u32,
    charts: Vec<ChartField>,
}

impl CompactifiedField {
    pub fn chart(&self, chart: Chart) -> &ChartField {
        &self.charts[chart.index()]
    }

    pub fn charts(&self) -> &[ChartField] {
        &self.charts
    }

    /// `(-1)^(d-1)`: factor relating each `Vk` system to its `Uk` system.
    pub fn antipodal_sign(&self) -> f64 {
        antipodal_sign(self.d)
    }

    pub fn listing(&self) -> String {
        let mut out = format!("degree d = {}\n", self.d);
        for c in &self.charts {
            out.push_str(&c.listing());
            out.push('\n');
        }
        out
    }

    pub(crate) fn from_charts(source: PlanarField, d: u32, charts: Vec<ChartField>) -> Self {
        Self { source, d, charts }
    }
}

pub fn antipodal_sign(d: u32) -> f64 {
    if d % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Compactify with the field's own degree.
pub fn compactify(field: &PlanarField) -> CompactifiedField {
    compactify_with_degree(field, field.degree())
        .expect("a field's own degree bounds all of its monomials")
}

/// Compactify treating the field as having degree `d >= deg field`.
pub fn compactify_with_degree(field: &PlanarField, d: u32) -> Result<CompactifiedField> {
    if d < field.degree() {
        return Err(Error::Domain(format!(
            "cannot compactify a degree-{} field with d = {d}",
            field.degree()
        )));
    }
    let (p, q) = (field.p(), field.q());
    let u1 = expand_u1(p, q, d)?;
    let u2 = expand_u2(p, q, d)?;
    let u3 = ChartField::new(Chart::U3, p.clone(), q.clone());
    let s = antipodal_sign(d);
    let mirror =
        |c: &ChartField, chart: Chart| ChartField::new(chart, c.fx.scale(s), c.fy.scale(s));
    let v1 = mirror(&u1, Chart::V1);
    let v2 = mirror(&u2, Chart::V2);
    let v3 = mirror(&u3, Chart::V3);
    let charts = vec![u1, u2, u3, v1, v2, v3];
    Ok(CompactifiedField::from_charts(field.clone(), d, charts))
}

fn check_exponent(i: u32, j: u32, d: u32) -> Result<u32> {
    d.checked_sub(i + j).ok_or_else(|| {
        Error::Internal(format!(
            "monomial u^{i} v^{j} exceeds compactification degree {d}"
        ))
    })
}

/// `(u, v) = (x/y, 1/y)`: `c u^i v^j` times `y^d` becomes `c x^i y^(d-i-j)`.
fn expand_u1(p: &BivariatePoly, q: &BivariatePoly, d: u32) -> Result<ChartField> {
    let mut fx = BivariatePoly::zero();
    let mut fy = BivariatePoly::zero();
    for ((i, j), c) in p.terms() {
        let k = check_exponent(i, j, d)?;
        fx.add_term(i, k, c);
    }
    for ((i, j), c) in q.terms() {
        let k = check_exponent(i, j, d)?;
        fx.add_term(i + 1, k, -c);
        fy.add_term(i, k + 1, -c);
    }
    Ok(ChartField::new(Chart::U1, fx, fy))
}

/// `(u, v) = (1/y, x/y)`: `c u^i v^j` times `y^d` becomes `c x^j y^(d-i-j)`.
fn expand_u2(p: &BivariatePoly, q: &BivariatePoly, d: u32) -> Result<ChartField> {
    let mut fx = BivariatePoly::zero();
    let mut fy = BivariatePoly::zero();
    for ((i, j), c) in q.terms() {
        let k = check_exponent(i, j, d)?;
        fx.add_term(j, k, c);
    }
    for ((i, j), c) in p.terms() {
        let k = check_exponent(i, j, d)?;
        fx.add_term(j + 1, k, -c);
        fy.add_term(j, k + 1, -c);
    }
    Ok(ChartField::new(Chart::U2, fx, fy))
}

/// `fx(x, 0)` of an equatorial chart.
pub fn equator_poly(cf: &CompactifiedField, chart: Chart) -> Result<UnivariatePoly> {
    if !chart.touches_equator() {
        return Err(Error::Domain(format!("{chart} does not meet the equator")));
    }
    Ok(cf.chart(chart).fx().restrict_v_zero())
}
