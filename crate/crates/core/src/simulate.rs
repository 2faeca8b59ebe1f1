//! Method-of-lines integration of the coupled PDE-ODE system
//!
//! ```text
//! w_t = (a_eps w_x)_x - lambda w + f1(w),   0 < x < 1,
//! -a_eps(0) w_x(0) = g1(v),   w_x(1) = 0,
//! v' = -beta v + f2(w(0)) + g2(v),
//! ```
//!
//! its projection onto the ground state of the diffusion operator, and the
//! limiting planar ODE.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, Dopri5Options, OdeSolution};
use crate::polyfield::{limit_field, ProblemSpec};
use crate::spectral::{assemble_b, GridFunction, TridiagLu};

/// Max-norm beyond which a trajectory is declared to blow up.
pub const BLOWUP_BOUND: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub w: GridFunction,
    pub v: f64,
    pub t: f64,
}

impl SimState {
    pub fn from_fn(n: usize, w0: impl Fn(f64) -> f64, v0: f64) -> Result<Self> {
        Ok(Self {
            w: GridFunction::from_fn(n, w0)?,
            v: v0,
            t: 0.0,
        })
    }

    fn max_norm(&self) -> f64 {
        self.w
            .values()
            .iter()
            .fold(self.v.abs(), |m, x| m.max(x.abs()))
    }

    fn is_admissible(&self) -> bool {
        let m = self.max_norm();
        m.is_finite() && m <= BLOWUP_BOUND
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimStatus {
    Completed,
    /// The state left `|.| <= BLOWUP_BOUND`; the trajectory is truncated.
    Blowup,
}

/// States sampled at a fixed stride of a uniform time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<SimState>,
    pub dt: f64,
    pub eps: f64,
    pub status: SimStatus,
}

/// Time-stepping settings for [`integrate_pde`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Record every `sample_every`-th step (the final step is always kept).
    pub sample_every: usize,
}

impl Default for PdeOptions {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt: 1e-3,
            sample_every: 10,
        }
    }
}

/// IMEX integration: diffusion and the linear decay implicitly (second-order
/// semi-implicit BDF, started by one implicit-explicit Euler step), `f1` and
/// the boundary flux explicitly; `v` by Heun's method.
///
/// The flux condition enters as the conservative source `g1(v)` in the half
/// cell at `x = 0`, i.e. `g1(v) / (h/2)` at node 0.
pub fn integrate_pde(
    spec: &ProblemSpec,
    eps: f64,
    init: &SimState,
    opts: &PdeOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) {
        return Err(Error::Domain(format!(
            "final time must be positive, got {}",
            opts.t_end
        )));
    }
    if !(opts.dt > 0.0 && opts.dt <= opts.t_end) {
        return Err(Error::Domain(format!(
            "time step must lie in (0, T], got {}",
            opts.dt
        )));
    }
    if opts.sample_every == 0 {
        return Err(Error::Domain("sample stride must be at least 1".into()));
    }
    let n = init.w.n();
    let op = assemble_b(spec, eps, n)?;
    let k = op.stiffness();
    let w = op.weights().to_vec();
    let dt = opts.dt;
    let lambda = spec.lambda;
    let conductance = op.conductance().to_vec();
    let factor = |c: f64| {
        let diag: Vec<f64> = (0..n)
            .map(|i| c * w[i] / dt + k.diag()[i] + lambda * w[i])
            .collect();
        (c, TridiagLu::factor(k.off(), &diag, k.off(), 0.0))
    };
    // One step of iterative refinement with the residual evaluated in flux
    // form keeps the discrete mass balance at round-off level per step.
    let solve = |(c, lu): &(f64, TridiagLu), rhs: Vec<f64>| -> Vec<f64> {
        let mut x = rhs.clone();
        lu.solve(&mut x);
        let mut res: Vec<f64> = (0..n)
            .map(|i| rhs[i] - (c / dt + lambda) * w[i] * x[i])
            .collect();
        for (j, cj) in conductance.iter().enumerate() {
            let flux = cj * (x[j + 1] - x[j]);
            res[j] += flux;
            res[j + 1] -= flux;
        }
        lu.solve(&mut res);
        x.iter_mut().zip(&res).for_each(|(a, b)| *a += b);
        x
    };
    let euler = factor(1.0);
    let bdf2 = factor(1.5);

    let reaction = |u: &[f64]| -> Vec<f64> { u.iter().map(|&x| spec.f1.eval(x)).collect() };
    let vdot = |w0: f64, v: f64| -spec.beta * v + spec.f2.eval(w0) + spec.g2.eval(v);

    let steps = (opts.t_end / dt).round() as usize;
    let mut traj = Trajectory {
        states: vec![init.clone()],
        dt,
        eps,
        status: SimStatus::Completed,
    };
    let mut prev: Option<(Vec<f64>, Vec<f64>, f64)> = None; // (w, f1(w), g1(v)) at t_{n-1}
    let mut cur_w = init.w.values().to_vec();
    let mut cur_v = init.v;
    for step in 1..=steps {
        let f_cur = reaction(&cur_w);
        let g_cur = spec.g1.eval(cur_v);
        let next = match &prev {
            None => {
                let mut rhs: Vec<f64> = (0..n).map(|i| w[i] * (cur_w[i] / dt + f_cur[i])).collect();
                rhs[0] += g_cur;
                solve(&euler, rhs)
            }
            Some((w_old, f_old, g_old)) => {
                let mut rhs: Vec<f64> = (0..n)
                    .map(|i| {
                        w[i] * ((2.0 * cur_w[i] - 0.5 * w_old[i]) / dt + 2.0 * f_cur[i] - f_old[i])
                    })
                    .collect();
                rhs[0] += 2.0 * g_cur - g_old;
                solve(&bdf2, rhs)
            }
        };
        let k1 = vdot(cur_w[0], cur_v);
        let k2 = vdot(next[0], cur_v + dt * k1);
        let new_v = cur_v + 0.5 * dt * (k1 + k2);
        prev = Some((std::mem::replace(&mut cur_w, next), f_cur, g_cur));
        cur_v = new_v;

        let state = SimState {
            w: GridFunction::new(cur_w.clone())?,
            v: cur_v,
            t: init.t + step as f64 * dt,
        };
        if !state.is_admissible() {
            traj.status = SimStatus::Blowup;
            traj.states.push(state);
            return Ok(traj);
        }
        if step % opts.sample_every == 0 || step == steps {
            traj.states.push(state);
        }
    }
    Ok(traj)
}

/// `u = int w phi` and `w_perp = w - u phi` (trapezoid quadrature).
pub fn project(w: &GridFunction, phi: &GridFunction) -> Result<(f64, GridFunction)> {
    if w.n() != phi.n() {
        return Err(Error::Domain(format!(
            "grid mismatch: {} vs {} nodes",
            w.n(),
            phi.n()
        )));
    }
    let u = w.inner(phi);
    let perp = w
        .values()
        .iter()
        .zip(phi.values())
        .map(|(a, p)| a - u * p)
        .collect();
    Ok((u, GridFunction::new(perp)?))
}

/// `max` of `||w_perp||_{H^1}` over the samples with `window.0 < t < window.1`
/// (zero when no sample falls inside).
pub fn wperp_sup_h1(traj: &Trajectory, phi: &GridFunction, window: (f64, f64)) -> Result<f64> {
    let mut sup = 0.0f64;
    for s in &traj.states {
        if s.t > window.0 && s.t < window.1 {
            let (_, perp) = project(&s.w, phi)?;
            sup = sup.max(perp.h1_norm());
        }
    }
    Ok(sup)
}

/// CSV with columns `t,v,u,wperp_L2,wperp_H1,status`; the status of the last
/// row is `blowup` for a truncated trajectory.
pub fn trajectory_csv(traj: &Trajectory, phi: &GridFunction) -> Result<String> {
    let mut out = String::from("t,v,u,wperp_L2,wperp_H1,status\n");
    let last = traj.states.len() - 1;
    for (i, s) in traj.states.iter().enumerate() {
        let (u, perp) = project(&s.w, phi)?;
        let status = if i == last && traj.status == SimStatus::Blowup {
            "blowup"
        } else {
            "ok"
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t,
            s.v,
            u,
            perp.l2_norm(),
            perp.h1_norm(),
            status
        );
    }
    Ok(out)
}

/// Full-field snapshots `t,x,w` of every `stride`-th sample.
pub fn snapshots_csv(traj: &Trajectory, stride: usize) -> String {
    let mut out = String::from("t,x,w\n");
    for s in traj.states.iter().step_by(stride.max(1)) {
        for (k, w) in s.w.values().iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", s.t, s.w.x(k), w);
        }
    }
    out
}

/// Adaptive Dormand–Prince integration (tolerance `1e-9`) of the limiting
/// planar field from `init = (u, v)`.
pub fn integrate_limit_ode(
    spec: &ProblemSpec,
    init: [f64; 2],
    t_end: f64,
) -> Result<OdeSolution<2>> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!(
            "final time must be positive, got {t_end}"
        )));
    }
    let field = limit_field(spec)?;
    let f = move |_: f64, y: &[f64; 2]| field.eval(y[0], y[1]);
    Ok(integrate(
        f,
        0.0,
        init,
        t_end,
        Dopri5Options::default(),
        BLOWUP_BOUND,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::OdeStatus;
    use crate::polyfield::UnivariatePoly;
    use std::f64::consts::PI;

    fn linear_spec() -> ProblemSpec {
        ProblemSpec {
            lambda: 1.0,
            beta: 2.0,
            f1: UnivariatePoly::zero(),
            f2: UnivariatePoly::zero(),
            g1: UnivariatePoly::zero(),
            g2: UnivariatePoly::zero(),
            diffusion: UnivariatePoly::new(vec![1.0]),
            relaxed_degrees: true,
        }
    }

    #[test]
    fn linear_decay_matches_exact_solution() {
        let init = SimState::from_fn(64, |_| 0.7, -0.4).unwrap();
        let opts = PdeOptions {
            t_end: 1.0,
            dt: 1e-4,
            sample_every: 100,
        };
        let traj = integrate_pde(&linear_spec(), 1.0, &init, &opts).unwrap();
        let last = traj.states.last().unwrap();
        assert!((last.t - 1.0).abs() < 1e-12);
        assert!(last.w.sup_distance_to(0.7 * (-1.0f64).exp()) < 1e-4);
        assert!((last.v + 0.4 * (-2.0f64).exp()).abs() < 1e-4);
        // spatially constant throughout
        for s in &traj.states {
            let c = s.w.values()[0];
            assert!(s.w.sup_distance_to(c) < 1e-12);
        }
    }

    #[test]
    fn pure_diffusion_conserves_mean() {
        let mut spec = linear_spec();
        spec.lambda = 1e-300; // validation requires lambda > 0
        let init = SimState::from_fn(128, |x| 1.0 + (PI * x).cos(), 0.0).unwrap();
        let opts = PdeOptions {
            t_end: 1.0,
            dt: 1e-3,
            sample_every: 100,
        };
        let traj = integrate_pde(&spec, 0.1, &init, &opts).unwrap();
        let m0 = traj.states[0].w.integral();
        for s in &traj.states {
            let drift = (s.w.integral() - m0).abs();
            assert!(drift < 1e-12 * (1.0 + s.t), "t = {}: drift {drift:e}", s.t);
        }
    }

    #[test]
    fn projection_examples() {
        let phi = GridFunction::from_fn(101, |_| 1.0).unwrap();
        let (u, perp) = project(&phi, &phi).unwrap();
        assert!((u - 1.0).abs() < 1e-14 && perp.sup_distance_to(0.0) < 1e-14);
        let odd = GridFunction::from_fn(101, |x| (PI * x).cos()).unwrap();
        let (u, perp) = project(&odd, &phi).unwrap();
        assert!(u.abs() < 1e-14);
        let diff = perp
            .values()
            .iter()
            .zip(odd.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-14);
    }

    #[test]
    fn limit_ode_examples() {
        let spec = ProblemSpec::quadratic_example();
        let rest = integrate_limit_ode(&spec, [0.0, 0.0], 5.0).unwrap();
        assert_eq!(rest.last().0, [0.0, 0.0]);
        let conv = integrate_limit_ode(&spec, [0.1, -0.1], 50.0).unwrap();
        let (y, _) = conv.last();
        assert!(
            (y[0] - 0.419643).abs() < 1e-5 && (y[1] + 0.771845).abs() < 1e-5,
            "{y:?}"
        );
        let esc = integrate_limit_ode(&spec, [0.0, 10.0], 5.0).unwrap();
        assert_eq!(esc.status, OdeStatus::Blowup);
    }

    #[test]
    fn blowup_is_flagged_in_pde() {
        let spec = ProblemSpec::quadratic_example();
        let init = SimState::from_fn(64, |_| 0.0, 10.0).unwrap();
        let opts = PdeOptions {
            t_end: 5.0,
            dt: 1e-3,
            sample_every: 10,
        };
        let traj = integrate_pde(&spec, 0.1, &init, &opts).unwrap();
        assert_eq!(traj.status, SimStatus::Blowup);
        let phi = GridFunction::from_fn(64, |_| 1.0).unwrap();
        let csv = trajectory_csv(&traj, &phi).unwrap();
        assert!(csv.trim_end().ends_with("blowup"));
    }
}
