//! Global phase portraits on the Poincaré disk: chart-switching trajectory
//! integration, separatrices of saddles, a heuristic Morse–Smale check and
//! deterministic SVG/CSV output.
//!
//! Time is the orbit parameter of whichever chart system is being integrated.
//! Chart systems differ from each other by positive factors, so orbits and
//! their orientation are meaningful across charts while speeds are not.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::compactify::{
    best_chart, chart_point_to_disk, chart_to_sphere, compactify, disk_to_sphere, sphere_to_chart,
    Chart, ChartField, CompactifiedField,
};
use crate::equilibria::{
    classify, equator_equilibria, finite_equilibria, infinite_equilibria, Classification,
    Equilibrium, SearchOptions,
};
use crate::error::{Error, Result};
use crate::ode::{dopri5_step, Dopri5Options, StepResult, Stepper};
use crate::polyfield::{limit_field, BivariatePoly, ProblemSpec};

/// Chart coordinates above this bound trigger a switch to the best chart.
pub const SWITCH_THRESHOLD: f64 = 1.2;
/// Trial steps leaving this box are rejected, so switches happen promptly.
const COORD_LIMIT: f64 = 2.0;
/// Field norm (in chart coordinates) below which a trajectory has arrived at
/// an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-10;
pub const SEPARATRIX_OFFSET: f64 = 1e-6;
/// Disk distance at which a separatrix is deemed to hit another saddle.
pub const CONNECTION_TOL: f64 = 1e-4;
/// Separatrix points closer than this to their own saddle are ignored when
/// looking for connections.
const DEPARTURE_RADIUS: f64 = 1e-2;
/// Chart views closer than this in the disk are one point of the sphere.
const SAME_POINT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// The field norm dropped below [`EQUILIBRIUM_TOL`].
    Equilibrium,
    /// The time limit was reached on the equator.
    Equator,
    TimeLimit,
    /// The step size collapsed or the state became non-finite.
    Blowup,
    /// The requested stopping radius was reached (located by bisection).
    StopRadius,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A point given in the coordinates of one chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub coords: [f64; 2],
}

impl ChartPoint {
    /// Point of the closed disk expressed in the chart with the largest pivot.
    pub fn from_disk(p: f64, q: f64) -> Result<Self> {
        let s = disk_to_sphere(p, q)?;
        let chart = best_chart(s);
        let coords = sphere_to_chart(chart, s).expect("the best chart contains the point");
        Ok(Self { chart, coords })
    }

    pub fn to_disk(&self) -> Result<[f64; 2]> {
        chart_point_to_disk(self.chart, self.coords[0], self.coords[1])
    }

    /// The same sphere point in another chart, if that chart contains it.
    pub fn in_chart(&self, chart: Chart) -> Option<ChartPoint> {
        let s = chart_to_sphere(self.chart, self.coords[0], self.coords[1]);
        sphere_to_chart(chart, s).map(|coords| ChartPoint { chart, coords })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskTrajectory {
    /// Polyline in the closed unit disk.
    pub points: Vec<[f64; 2]>,
    /// `(index into points, chart)` for the initial chart and every switch.
    pub chart_log: Vec<(usize, Chart)>,
    pub termination: Termination,
    /// Final state in chart coordinates.
    pub end: ChartPoint,
    /// Accumulated orbit-parameter time.
    pub time: f64,
}

impl DiskTrajectory {
    /// Chart in use when `points[index]` was recorded.
    pub fn chart_at(&self, index: usize) -> Chart {
        self.chart_log
            .iter()
            .take_while(|(i, _)| *i <= index)
            .last()
            .map(|&(_, c)| c)
            .unwrap_or(self.end.chart)
    }

    pub fn last_point(&self) -> [f64; 2] {
        *self
            .points
            .last()
            .expect("trajectories hold their starting point")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub t_max: f64,
    pub direction: Direction,
    pub rtol: f64,
    pub atol: f64,
    /// Switch charts when a coordinate exceeds [`SWITCH_THRESHOLD`]. With
    /// switching off the trajectory stays in its starting chart whatever the
    /// size of its coordinates.
    pub switching: bool,
    /// Stop as soon as the disk radius reaches this value.
    pub stop_radius: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            t_max: 200.0,
            direction: Direction::Forward,
            rtol: 1e-9,
            atol: 1e-9,
            switching: true,
            stop_radius: None,
            max_steps: 200_000,
        }
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn disk_of(chart: Chart, y: &[f64; 2]) -> [f64; 2] {
    let s = chart_to_sphere(chart, y[0], y[1]);
    // Clamp round-off below the equator; admissibility keeps it tiny.
    let r = s[0].hypot(s[1]);
    if r > 1.0 {
        [s[0] / r, s[1] / r]
    } else {
        [s[0], s[1]]
    }
}

/// Below this field norm a trajectory is tested for capture by an attracting
/// equilibrium. With tolerances near `1e-9` the integrator stalls at that
/// level near a sink, so [`EQUILIBRIUM_TOL`] alone would never be met.
const CAPTURE_SPEED: f64 = 1e-6;

/// Newton-polished equilibrium next to `y` if it attracts in the direction of
/// integration (both eigenvalues of `dir * J` with negative real part).
fn attracting_equilibrium_near(
    sys: &ChartField,
    y: [f64; 2],
    dir: f64,
    upper_side: Option<f64>,
) -> Option<[f64; 2]> {
    let mut z = y;
    for _ in 0..30 {
        let f = sys.eval(z[0], z[1]);
        let j = sys.jacobian(z[0], z[1]);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        z = [z[0] - dx, z[1] - dy];
        if dx.hypot(dy) <= 1e-15 * (1.0 + norm2(z)) {
            break;
        }
    }
    if let Some(side) = upper_side {
        if z[1] * side < 0.0 {
            z[1] = 0.0;
        }
    }
    if norm2(sys.eval(z[0], z[1])) > 1e-12 || norm2([z[0] - y[0], z[1] - y[1]]) > 1e-4 {
        return None;
    }
    let j = sys.jacobian(z[0], z[1]);
    let (eig, _) = classify([
        [dir * j[0][0], dir * j[0][1]],
        [dir * j[1][0], dir * j[1][1]],
    ]);
    eig.iter().all(|l| l.re < 0.0).then_some(z)
}

/// Integrate from a point of the closed disk.
pub fn integrate_disk(
    cf: &CompactifiedField,
    start: [f64; 2],
    t_max: f64,
    direction: Direction,
) -> Result<DiskTrajectory> {
    let cp = ChartPoint::from_disk(start[0], start[1])?;
    integrate_from(
        cf,
        cp,
        &IntegrationOptions {
            t_max,
            direction,
            ..Default::default()
        },
    )
}

/// Integrate from a chart point on the closed upper hemisphere.
pub fn integrate_from(
    cf: &CompactifiedField,
    start: ChartPoint,
    opts: &IntegrationOptions,
) -> Result<DiskTrajectory> {
    if start.chart == Chart::V3 {
        return Err(Error::Domain("V3 covers the lower hemisphere only".into()));
    }
    if start.chart.touches_equator() && start.coords[1] * start.chart.upper_sign() < 0.0 {
        return Err(Error::Domain(format!(
            "{} point {:?} lies on the lower hemisphere",
            start.chart, start.coords
        )));
    }
    if !(opts.t_max >= 0.0) || !start.coords.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain(
            "time limit and start must be finite and nonnegative".into(),
        ));
    }
    let dir = opts.direction.sign();
    let ode = Dopri5Options {
        rtol: opts.rtol,
        atol: opts.atol,
        ..Default::default()
    };

    let mut chart = start.chart;
    let mut y = start.coords;
    let mut t = 0.0;
    let mut traj = DiskTrajectory {
        points: vec![disk_of(chart, &y)],
        chart_log: vec![(0, chart)],
        termination: Termination::TimeLimit,
        end: start,
        time: 0.0,
    };
    let finish = |traj: &mut DiskTrajectory, term, chart, y: [f64; 2], t| {
        traj.termination = term;
        traj.end = ChartPoint { chart, coords: y };
        traj.time = t;
    };
    if norm2(cf.chart(chart).eval(y[0], y[1])) < EQUILIBRIUM_TOL {
        finish(&mut traj, Termination::Equilibrium, chart, y, t);
        return Ok(traj);
    }
    let mut steps = 0usize;
    loop {
        let sys = cf.chart(chart);
        let f = |_t: f64, z: &[f64; 2]| {
            let v = sys.eval(z[0], z[1]);
            [dir * v[0], dir * v[1]]
        };
        let equatorial = chart.touches_equator();
        let side = chart.upper_sign();
        let admissible = |z: &[f64; 2]| {
            (!opts.switching || z.iter().all(|c| c.abs() <= COORD_LIMIT))
                && (!equatorial || z[1] * side >= -1e-9)
        };
        let mut st = Stepper::new(&f, t, y, ode);
        let switched = loop {
            if st.t >= opts.t_max || steps >= opts.max_steps {
                let on_equator = equatorial && st.y[1] == 0.0;
                let term = if on_equator {
                    Termination::Equator
                } else {
                    Termination::TimeLimit
                };
                finish(&mut traj, term, chart, st.y, st.t);
                return Ok(traj);
            }
            steps += 1;
            let (t0, y0, k0) = (st.t, st.y, *st.derivative());
            let h = match st.advance(&f, opts.t_max - st.t, admissible) {
                StepResult::Accepted(h) => h,
                StepResult::StepUnderflow => {
                    finish(&mut traj, Termination::Blowup, chart, st.y, st.t);
                    return Ok(traj);
                }
            };
            if h >= opts.t_max - t0 {
                st.t = opts.t_max;
            }
            if equatorial && st.y[1] * side < 0.0 {
                // The equator is invariant; an overshoot is round-off.
                let mut z = st.y;
                z[1] = 0.0;
                st.reset(&f, st.t, z);
            }
            if !st.y.iter().all(|c| c.is_finite()) {
                finish(&mut traj, Termination::Blowup, chart, st.y, st.t);
                return Ok(traj);
            }
            if let Some(r_stop) = opts.stop_radius {
                let r0 = norm2(disk_of(chart, &y0));
                let r1 = norm2(disk_of(chart, &st.y));
                if (r0 - r_stop) * (r1 - r_stop) <= 0.0 && r0 != r_stop {
                    let (mut lo, mut hi) = (0.0, h);
                    let mut z = st.y;
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        let (zm, _, _) = dopri5_step(&f, t0, &y0, &k0, mid);
                        if (norm2(disk_of(chart, &zm)) - r_stop) * (r0 - r_stop) > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                            z = zm;
                        }
                    }
                    traj.points.push(disk_of(chart, &z));
                    finish(&mut traj, Termination::StopRadius, chart, z, t0 + hi);
                    return Ok(traj);
                }
            }
            traj.points.push(disk_of(chart, &st.y));
            let speed = norm2(sys.eval(st.y[0], st.y[1]));
            if speed < EQUILIBRIUM_TOL {
                finish(&mut traj, Termination::Equilibrium, chart, st.y, st.t);
                return Ok(traj);
            }
            if speed < CAPTURE_SPEED {
                if let Some(z) =
                    attracting_equilibrium_near(sys, st.y, dir, equatorial.then_some(side))
                {
                    traj.points.push(disk_of(chart, &z));
                    finish(&mut traj, Termination::Equilibrium, chart, z, st.t);
                    return Ok(traj);
                }
            }
            if opts.switching && st.y.iter().any(|c| c.abs() > SWITCH_THRESHOLD) {
                break (st.t, st.y);
            }
        };
        // The best chart has coordinates bounded by 1, which gives the switch
        // its hysteresis: the next switch needs another excursion past 1.2.
        let (t_sw, y_sw) = switched;
        let s = chart_to_sphere(chart, y_sw[0], y_sw[1]);
        let mut next = best_chart([s[0], s[1], s[2].max(0.0)]);
        if next == Chart::V3 {
            next = Chart::U3;
        }
        let mut z = sphere_to_chart(next, s)
            .ok_or_else(|| Error::Internal(format!("best chart {next} does not contain {s:?}")))?;
        if next.touches_equator() && z[1] * next.upper_sign() < 0.0 {
            z[1] = 0.0;
        }
        chart = next;
        y = z;
        t = t_sw;
        traj.chart_log.push((traj.points.len() - 1, chart));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparatrixKind {
    Unstable,
    Stable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separatrix {
    pub kind: SeparatrixKind,
    pub seed: ChartPoint,
    /// True when the separatrix runs inside the equator.
    pub in_equator: bool,
    pub trajectory: DiskTrajectory,
}

/// Unit eigenvector of `j` for the real eigenvalue `l`.
fn eigenvector(j: [[f64; 2]; 2], l: f64) -> [f64; 2] {
    let a = [j[0][1], l - j[0][0]];
    let b = [l - j[1][1], j[1][0]];
    let v = if norm2(a) >= norm2(b) { a } else { b };
    let n = norm2(v);
    if n == 0.0 {
        // j = l I: every direction is an eigenvector.
        [1.0, 0.0]
    } else {
        [v[0] / n, v[1] / n]
    }
}

/// Separatrices of a saddle, traced from seeds at distance
/// [`SEPARATRIX_OFFSET`] along the eigenvectors: unstable ones forward,
/// stable ones backward. A saddle on the equator has seeds pointing off the
/// disk; those are skipped.
pub fn separatrices(
    cf: &CompactifiedField,
    saddle: &Equilibrium,
    opts: &IntegrationOptions,
) -> Result<Vec<Separatrix>> {
    if saddle.classification != Classification::Saddle {
        return Err(Error::Domain(format!(
            "separatrices need a saddle, got {}",
            saddle.classification
        )));
    }
    let j = cf
        .chart(saddle.chart)
        .jacobian(saddle.coords[0], saddle.coords[1]);
    let on_equator = saddle.on_equator();
    let mut out = Vec::new();
    for (lambda, kind, direction) in [
        (
            saddle.eigenvalues[1].re,
            SeparatrixKind::Unstable,
            Direction::Forward,
        ),
        (
            saddle.eigenvalues[0].re,
            SeparatrixKind::Stable,
            Direction::Backward,
        ),
    ] {
        let e = eigenvector(j, lambda);
        let in_equator = on_equator && e[1].abs() <= 1e-12;
        for sgn in [1.0, -1.0] {
            let mut coords = [
                saddle.coords[0] + sgn * SEPARATRIX_OFFSET * e[0],
                saddle.coords[1] + sgn * SEPARATRIX_OFFSET * e[1],
            ];
            if on_equator {
                if in_equator {
                    coords[1] = 0.0;
                } else if coords[1] * saddle.chart.upper_sign() < 0.0 {
                    continue;
                }
            }
            let seed = ChartPoint {
                chart: saddle.chart,
                coords,
            };
            let trajectory = integrate_from(cf, seed, &IntegrationOptions { direction, ..*opts })?;
            out.push(Separatrix {
                kind,
                seed,
                in_equator,
                trajectory,
            });
        }
    }
    Ok(out)
}

/// One chart view of an equilibrium in the census.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub equilibrium: Equilibrium,
    pub finite: bool,
    /// Index into [`MorseSmaleReport::points`] of the sphere point viewed.
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleConnection {
    /// Index of the source saddle in [`MorseSmaleReport::points`].
    pub from: usize,
    pub to: usize,
    pub kind: SeparatrixKind,
    pub distance: f64,
}

/// Heuristic necessary-condition check for the Morse–Smale property: all
/// equilibria hyperbolic and no separatrix passing near a saddle. Periodic
/// orbits are not examined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseSmaleReport {
    pub all_hyperbolic: bool,
    pub saddle_connection_suspected: bool,
    /// Finite equilibria plus every chart view of the equilibria at infinity
    /// in `U1`, `U2`, `V1`, `V2` (a point seen by two charts appears twice).
    pub census: Vec<CensusEntry>,
    /// Distinct equilibria on the closed sphere, finite ones first.
    pub points: Vec<Equilibrium>,
    pub finite_count: usize,
    pub degenerate_equator: bool,
    pub connections: Vec<SaddleConnection>,
    pub separatrices: Vec<Separatrix>,
    pub warnings: Vec<String>,
}

fn point_segment_distance(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    norm2([x[0] - a[0] - s * d[0], x[1] - a[1] - s * d[1]])
}

fn disk_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    norm2([a[0] - b[0], a[1] - b[1]])
}

/// Smallest distance from `target` to the part of `traj` after it first
/// leaves the [`DEPARTURE_RADIUS`] ball around `source`.
fn approach_distance(traj: &DiskTrajectory, source: [f64; 2], target: [f64; 2]) -> Option<f64> {
    let start = traj
        .points
        .iter()
        .position(|&p| disk_distance(p, source) > DEPARTURE_RADIUS)?;
    let pts = &traj.points[start..];
    let mut best = disk_distance(pts[0], target);
    for w in pts.windows(2) {
        best = best.min(point_segment_distance(target, w[0], w[1]));
    }
    Some(best)
}

pub fn morse_smale_check(cf: &CompactifiedField) -> Result<MorseSmaleReport> {
    morse_smale_check_with(
        cf,
        &SearchOptions::default(),
        &IntegrationOptions::default(),
    )
}

pub fn morse_smale_check_with(
    cf: &CompactifiedField,
    search: &SearchOptions,
    integ: &IntegrationOptions,
) -> Result<MorseSmaleReport> {
    let finite = finite_equilibria(&cf.source, search)?;
    let infinite = infinite_equilibria(cf)?;
    let mut points = finite.equilibria.clone();
    let finite_count = points.len();
    points.extend(infinite.points.iter().cloned());

    let mut census: Vec<CensusEntry> = finite
        .equilibria
        .iter()
        .enumerate()
        .map(|(i, e)| CensusEntry {
            equilibrium: e.clone(),
            finite: true,
            point: i,
        })
        .collect();
    let mut warnings = finite.warnings.clone();
    if !infinite.degenerate_equator {
        for chart in [Chart::U1, Chart::U2, Chart::V1, Chart::V2] {
            for e in equator_equilibria(cf, chart)? {
                let point = (finite_count..points.len())
                    .min_by(|&a, &b| {
                        disk_distance(points[a].disk_position, e.disk_position)
                            .total_cmp(&disk_distance(points[b].disk_position, e.disk_position))
                    })
                    .filter(|&k| {
                        disk_distance(points[k].disk_position, e.disk_position) <= SAME_POINT_TOL
                    });
                match point {
                    Some(point) => census.push(CensusEntry {
                        equilibrium: e,
                        finite: false,
                        point,
                    }),
                    None => warnings.push(format!(
                        "{chart} view at {:?} matches no equilibrium at infinity",
                        e.coords
                    )),
                }
            }
        }
    }
    let all_hyperbolic = !infinite.degenerate_equator && points.iter().all(|e| e.hyperbolic);

    let saddles: Vec<usize> = (0..points.len())
        .filter(|&k| points[k].classification == Classification::Saddle)
        .collect();
    let mut connections = Vec::new();
    let mut all_seps = Vec::new();
    for &k in &saddles {
        let seps = separatrices(cf, &points[k], integ)?;
        for sep in &seps {
            if sep.in_equator {
                continue;
            }
            for &m in &saddles {
                if let Some(dist) = approach_distance(
                    &sep.trajectory,
                    points[k].disk_position,
                    points[m].disk_position,
                ) {
                    if dist < CONNECTION_TOL {
                        connections.push(SaddleConnection {
                            from: k,
                            to: m,
                            kind: sep.kind,
                            distance: dist,
                        });
                    }
                }
            }
        }
        all_seps.extend(seps);
    }
    Ok(MorseSmaleReport {
        all_hyperbolic,
        saddle_connection_suspected: !connections.is_empty(),
        census,
        points,
        finite_count,
        degenerate_equator: infinite.degenerate_equator,
        connections,
        separatrices: all_seps,
        warnings,
    })
}

/// Styling of [`render_svg`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvgOptions {
    /// Width and height in pixels.
    pub size: u32,
    pub margin: u32,
    pub glyph_radius: f64,
    pub stroke_width: f64,
    /// Extra CSS appended to the built-in stylesheet.
    pub extra_css: String,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            size: 600,
            margin: 20,
            glyph_radius: 5.0,
            stroke_width: 1.0,
            extra_css: String::new(),
        }
    }
}

fn class_slug(c: Classification) -> &'static str {
    match c {
        Classification::Saddle => "saddle",
        Classification::StableNode => "stable-node",
        Classification::UnstableNode => "unstable-node",
        Classification::StableFocus => "stable-focus",
        Classification::UnstableFocus => "unstable-focus",
        Classification::Center => "center",
        Classification::NonHyperbolic => "non-hyperbolic",
        #[allow(unreachable_patterns)]
        _ => "other",
    }
}

/// Deterministic SVG: the unit circle, one `<polyline class="traj">` per
/// trajectory and one glyph element of class `eq eq-<classification>` per
/// equilibrium.
pub fn render_svg(
    trajectories: &[DiskTrajectory],
    equilibria: &[Equilibrium],
    opts: &SvgOptions,
) -> String {
    let size = opts.size as f64;
    let c = size / 2.0;
    let r = c - opts.margin as f64;
    let px = |p: [f64; 2]| (c + r * p[0], c - r * p[1]);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let _ = writeln!(
        out,
        "<style>.disk{{fill:none;stroke:#000;stroke-width:{sw}}} .traj{{fill:none;stroke:#369;stroke-width:{sw}}} \
         .eq{{stroke:#000;stroke-width:1}} .eq-stable-node,.eq-stable-focus{{fill:#000}} \
         .eq-unstable-node,.eq-unstable-focus{{fill:#fff}} .eq-saddle{{fill:#c33}} \
         .eq-center,.eq-non-hyperbolic{{fill:#fc3}}{extra}</style>",
        sw = opts.stroke_width,
        extra = opts.extra_css
    );
    let _ = writeln!(
        out,
        r#"<circle class="disk" cx="{c:.3}" cy="{c:.3}" r="{r:.3}"/>"#
    );
    for t in trajectories {
        if t.points.len() < 2 {
            continue;
        }
        out.push_str(r#"<polyline class="traj" points=""#);
        for (i, &p) in t.points.iter().enumerate() {
            let (x, y) = px(p);
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{x:.3},{y:.3}");
        }
        out.push_str("\"/>\n");
    }
    let g = opts.glyph_radius;
    for e in equilibria {
        let (x, y) = px(e.disk_position);
        let slug = class_slug(e.classification);
        match e.classification {
            Classification::Saddle => {
                let _ = writeln!(
                    out,
                    r#"<rect class="eq eq-{slug}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                    x - g,
                    y - g,
                    2.0 * g,
                    2.0 * g
                );
            }
            Classification::Center | Classification::NonHyperbolic => {
                let _ = writeln!(
                    out,
                    r#"<polygon class="eq eq-{slug}" points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}"/>"#,
                    x,
                    y - g,
                    x + g,
                    y,
                    x,
                    y + g,
                    x - g,
                    y
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    r#"<circle class="eq eq-{slug}" cx="{x:.3}" cy="{y:.3}" r="{g:.3}"/>"#
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Trajectories as CSV with columns `traj,p,q,chart_id`.
pub fn trajectories_csv(trajectories: &[DiskTrajectory]) -> String {
    let mut out = String::from("traj,p,q,chart_id\n");
    for (k, t) in trajectories.iter().enumerate() {
        let mut log = t.chart_log.iter().peekable();
        let mut chart = t.chart_log.first().map(|&(_, c)| c).unwrap_or(t.end.chart);
        for (i, p) in t.points.iter().enumerate() {
            while let Some(&&(j, c)) = log.peek() {
                if j > i {
                    break;
                }
                chart = c;
                log.next();
            }
            let _ = writeln!(out, "{k},{},{},{}", p[0], p[1], chart.id());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortraitOptions {
    pub integration: IntegrationOptions,
    pub search: SearchOptions,
    /// Number of fill orbits started on each of the two seed rings.
    pub fill_orbits: usize,
    pub svg: SvgOptions,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            integration: IntegrationOptions::default(),
            search: SearchOptions::default(),
            fill_orbits: 12,
            svg: SvgOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub report: MorseSmaleReport,
    /// Separatrices first, then fill orbits.
    pub trajectories: Vec<DiskTrajectory>,
    pub svg: String,
}

/// Separatrices of every saddle plus fill orbits traced both ways from two
/// rings of seeds, rendered with one glyph per distinct equilibrium.
pub fn phase_portrait(cf: &CompactifiedField, opts: &PortraitOptions) -> Result<Portrait> {
    let report = morse_smale_check_with(cf, &opts.search, &opts.integration)?;
    let mut trajectories: Vec<DiskTrajectory> = report
        .separatrices
        .iter()
        .map(|s| s.trajectory.clone())
        .collect();
    let n = opts.fill_orbits;
    for ring in [0.5, 0.9] {
        for k in 0..n {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            let cp = ChartPoint::from_disk(ring * th.cos(), ring * th.sin())?;
            for direction in [Direction::Forward, Direction::Backward] {
                trajectories.push(integrate_from(
                    cf,
                    cp,
                    &IntegrationOptions {
                        direction,
                        ..opts.integration
                    },
                )?);
            }
        }
    }
    let svg = render_svg(&trajectories, &report.points, &opts.svg);
    Ok(Portrait {
        report,
        trajectories,
        svg,
    })
}

/// Outcome of one checked claim about the quadratic example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub claims: Vec<Claim>,
    #[serde(skip)]
    pub portrait: Option<Portrait>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.claims {
            let _ = writeln!(
                out,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        out
    }
}

/// The `U1` and `U2` chart systems expected for the quadratic example.
pub fn expected_example_charts() -> [(Chart, BivariatePoly, BivariatePoly); 2] {
    [
        (
            Chart::U1,
            BivariatePoly::from_terms([
                ((3, 0), -1.0),
                ((2, 0), -1.0),
                ((1, 0), -1.0),
                ((1, 1), -2.0),
                ((0, 0), 1.0),
            ]),
            BivariatePoly::from_terms([((0, 2), -1.0), ((0, 1), -1.0), ((2, 1), -1.0)]),
        ),
        (
            Chart::U2,
            BivariatePoly::from_terms([
                ((3, 0), -1.0),
                ((2, 0), 1.0),
                ((1, 0), 1.0),
                ((1, 1), 2.0),
                ((0, 0), 1.0),
            ]),
            BivariatePoly::from_terms([((0, 2), 1.0), ((0, 1), 1.0), ((2, 1), -1.0)]),
        ),
    ]
}

pub const EXAMPLE_FOCUS: [f64; 2] = [0.419643, -0.771845];
pub const EXAMPLE_U1_ROOT: f64 = 0.543689;
pub const EXAMPLE_U2_ROOT: f64 = 1.83929;

/// Run the whole pipeline on the quadratic example and check every claim
/// made about it: exact chart systems, the equilibria and their types,
/// hyperbolicity, absence of saddle connections and the rendered glyphs.
pub fn reproduce_example(opts: &PortraitOptions) -> Result<ExampleReport> {
    let mut claims = Vec::new();
    let mut claim = |name: &str, passed: bool, detail: String| {
        claims.push(Claim {
            name: name.to_string(),
            passed,
            detail,
        })
    };
    let field = limit_field(&ProblemSpec::quadratic_example())?;
    let cf = compactify(&field);

    for (chart, fx, fy) in expected_example_charts() {
        let sys = cf.chart(chart);
        claim(
            &format!("{chart} chart system exact"),
            sys.fx() == &fx && sys.fy() == &fy,
            sys.listing().replace('\n', "; "),
        );
    }

    let portrait = phase_portrait(&cf, opts)?;
    let report = &portrait.report;
    let finite = &report.points[..report.finite_count];
    claim(
        "two finite equilibria",
        finite.len() == 2,
        format!("found {}", finite.len()),
    );
    let origin = finite.iter().find(|e| norm2(e.coords) < 1e-8);
    claim(
        "origin is a saddle",
        origin.is_some_and(|e| e.classification == Classification::Saddle),
        format!("{:?}", origin.map(|e| e.classification)),
    );
    let focus = finite
        .iter()
        .min_by(|a, b| dist2(a.coords, EXAMPLE_FOCUS).total_cmp(&dist2(b.coords, EXAMPLE_FOCUS)));
    claim(
        "stable focus near (0.419643, -0.771845)",
        focus.is_some_and(|e| {
            dist2(e.coords, EXAMPLE_FOCUS).sqrt() < 1e-4
                && e.classification == Classification::StableFocus
        }),
        format!("{:?}", focus.map(|e| (e.coords, e.classification))),
    );

    let view = |chart: Chart, x0: f64| {
        report
            .census
            .iter()
            .map(|c| &c.equilibrium)
            .find(|e| e.chart == chart && (e.coords[0] - x0).abs() < 1e-4)
    };
    for (chart, x0, class) in [
        (Chart::U1, EXAMPLE_U1_ROOT, Classification::StableNode),
        (Chart::U2, EXAMPLE_U2_ROOT, Classification::StableNode),
        (Chart::V1, EXAMPLE_U1_ROOT, Classification::UnstableNode),
        (Chart::V2, EXAMPLE_U2_ROOT, Classification::UnstableNode),
    ] {
        let e = view(chart, x0);
        claim(
            &format!("{chart} equilibrium at infinity near {x0} is {class}"),
            e.is_some_and(|e| e.classification == class),
            format!("{:?}", e.map(|e| (e.coords, e.classification))),
        );
    }
    let infinite_views = report.census.iter().filter(|c| !c.finite).count();
    claim(
        "census of 2 finite equilibria and 4 chart views at infinity",
        report.finite_count == 2 && infinite_views == 4,
        format!(
            "{} finite, {} views at infinity of {} distinct points",
            report.finite_count,
            infinite_views,
            report.points.len() - report.finite_count
        ),
    );
    claim(
        "all equilibria hyperbolic",
        report.all_hyperbolic,
        String::new(),
    );
    claim(
        "no saddle connection suspected",
        !report.saddle_connection_suspected,
        format!("{} separatrices traced", report.separatrices.len()),
    );
    let glyphs = portrait.svg.matches(r#"class="eq "#).count();
    claim(
        "one glyph per distinct equilibrium",
        glyphs == report.points.len(),
        format!("{glyphs} glyphs for {} points", report.points.len()),
    );
    Ok(ExampleReport {
        claims,
        portrait: Some(portrait),
    })
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}
