//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.
//!
//! The stepper exposes single accepted steps so that callers can interleave
//! their own bookkeeping (chart switches, blow-up checks, event location)
//! between steps; [`integrate`] is the plain driver on top of it.

use serde::{Deserialize, Serialize};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the field magnitude when `None`.
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-9,
            h_init: None,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OdeStatus {
    Completed,
    /// The state left the admissible region (norm bound or non-finite).
    Blowup,
    /// The step size fell below `h_min`.
    StepUnderflow,
    MaxSteps,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// One Dormand–Prince step of size `h` from `(t, y)` with `k1 = f(t, y)`.
///
/// Returns the 5th-order solution, the stage `f(t + h, y_new)` (first stage of
/// the next step) and the raw local error estimate vector.
pub fn dopri5_step<F, const N: usize>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(
        t + C4 * h,
        &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = f(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, k7, err)
}

fn error_norm<const N: usize>(
    err: &[f64; N],
    y: &[f64; N],
    y_new: &[f64; N],
    o: &Dopri5Options,
) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y[i].abs().max(y_new[i].abs());
        s += (err[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Outcome of [`Stepper::advance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepResult {
    /// A step of the given size was accepted.
    Accepted(f64),
    StepUnderflow,
}

/// Adaptive stepper holding the current point, the proposed step size and the
/// FSAL stage.
#[derive(Clone, Debug)]
pub struct Stepper<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub h: f64,
    k1: [f64; N],
    opts: Dopri5Options,
}

impl<const N: usize> Stepper<N> {
    pub fn new<F>(f: &F, t0: f64, y0: [f64; N], opts: Dopri5Options) -> Self
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let k1 = f(t0, &y0);
        let h = opts.h_init.unwrap_or_else(|| {
            let fnorm = k1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let ynorm = y0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let h = 0.01 * (ynorm + opts.atol / opts.rtol.max(1e-300)).max(1e-6) / fnorm.max(1e-12);
            h.clamp(1e-8, 0.1)
        });
        Self {
            t: t0,
            y: y0,
            h: h.min(opts.h_max),
            k1,
            opts,
        }
    }

    /// Current derivative `f(t, y)`.
    pub fn derivative(&self) -> &[f64; N] {
        &self.k1
    }

    /// Replace the state (e.g. after a coordinate change); resets the FSAL stage.
    pub fn reset<F>(&mut self, f: &F, t: f64, y: [f64; N])
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        self.t = t;
        self.y = y;
        self.k1 = f(t, &y);
    }

    /// Take one accepted step of size at most `h_cap`.
    ///
    /// A trial that passes the error test but fails `admissible` is rejected
    /// and retried with half the step; this keeps the state inside regions
    /// the caller can represent (e.g. bounded chart coordinates).
    pub fn advance<F, A>(&mut self, f: &F, h_cap: f64, admissible: A) -> StepResult
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        A: Fn(&[f64; N]) -> bool,
    {
        loop {
            let h = self.h.min(h_cap).min(self.opts.h_max);
            if h < self.opts.h_min {
                return StepResult::StepUnderflow;
            }
            let (y_new, k7, err) = dopri5_step(f, self.t, &self.y, &self.k1, h);
            let en = error_norm(&err, &self.y, &y_new, &self.opts);
            let finite = en.is_finite() && y_new.iter().all(|v| v.is_finite());
            if finite && en <= 1.0 {
                if !admissible(&y_new) {
                    self.h = 0.5 * h;
                    continue;
                }
                self.t += h;
                self.y = y_new;
                self.k1 = k7;
                let fac = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                // Do not let a capped step shrink the proposal for the next one.
                self.h = (h * fac).max(if h < self.h { self.h } else { 0.0 });
                return StepResult::Accepted(h);
            }
            let fac = if finite {
                (0.9 * en.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            self.h = h * fac;
        }
    }
}

/// Sampled solution of an initial value problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    #[serde(with = "state_vec")]
    pub y: Vec<[f64; N]>,
    pub status: OdeStatus,
}

mod state_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(
        v: &[[f64; N]],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = v.iter().map(|r| r.to_vec()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<Vec<[f64; N]>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.try_into().map_err(|r: Vec<f64>| {
                    serde::de::Error::invalid_length(r.len(), &"state of fixed dimension")
                })
            })
            .collect()
    }
}

impl<const N: usize> OdeSolution<N> {
    pub fn last(&self) -> ([f64; N], f64) {
        (
            *self.y.last().expect("solutions hold the initial point"),
            *self.t.last().unwrap(),
        )
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, recording every accepted step.
///
/// Integration stops early with [`OdeStatus::Blowup`] once the max-norm of the
/// state exceeds `blowup_bound` or becomes non-finite.
pub fn integrate<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: Dopri5Options,
    blowup_bound: f64,
) -> OdeSolution<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut sol = OdeSolution {
        t: vec![t0],
        y: vec![y0],
        status: OdeStatus::Completed,
    };
    let mut st = Stepper::new(&f, t0, y0, opts);
    let mut steps = 0;
    while st.t < t_end {
        if steps >= opts.max_steps {
            sol.status = OdeStatus::MaxSteps;
            return sol;
        }
        steps += 1;
        let remaining = t_end - st.t;
        match st.advance(&f, remaining, |_| true) {
            StepResult::Accepted(h) => {
                if h >= remaining {
                    st.t = t_end;
                }
            }
            StepResult::StepUnderflow => {
                // Near a finite-time singularity the controller collapses the
                // step; that is the blow-up signature, not a solver defect.
                let big = st.y.iter().any(|v| v.abs() > blowup_bound.sqrt());
                sol.status = if big {
                    OdeStatus::Blowup
                } else {
                    OdeStatus::StepUnderflow
                };
                return sol;
            }
        }
        sol.t.push(st.t);
        sol.y.push(st.y);
        if st
            .y
            .iter()
            .any(|v| !v.is_finite() || v.abs() > blowup_bound)
        {
            sol.status = OdeStatus::Blowup;
            return sol;
        }
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            2.0,
            Dopri5Options::default(),
            1e6,
        );
        let (y, t) = sol.last();
        assert_eq!(sol.status, OdeStatus::Completed);
        assert_eq!(t, 2.0);
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_: f64, y: &[f64; 2]| [y[1], -y[0]];
        let sol = integrate(
            f,
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            Dopri5Options::default(),
            1e6,
        );
        let (y, _) = sol.last();
        assert!((y[0] - 1.0).abs() < 1e-7 && y[1].abs() < 1e-7);
    }

    #[test]
    fn riccati_blowup_is_flagged() {
        // y' = y^2, y(0) = 1 escapes at t = 1.
        let sol = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            Dopri5Options::default(),
            1e6,
        );
        assert_eq!(sol.status, OdeStatus::Blowup);
        assert!(sol.last().1 < 1.0);
    }

    #[test]
    fn admissibility_rejects_and_retries() {
        let f = |_: f64, _: &[f64; 1]| [1.0];
        let mut st = Stepper::new(
            &f,
            0.0,
            [0.0],
            Dopri5Options {
                h_init: Some(1.0),
                ..Default::default()
            },
        );
        let r = st.advance(&f, f64::INFINITY, |y| y[0] <= 0.3);
        assert!(matches!(r, StepResult::Accepted(h) if h <= 0.3));
        assert!(st.y[0] <= 0.3);
    }
}
