//! Finite-volume discretization of the scalar diffusion operator
//! `B u = -(a_eps u_x)_x + lambda u` with zero-flux ends, a symmetric
//! tridiagonal eigensolver, and the spectrum of the product operator
//! `A (u, v) = (B u, beta v)`.
//!
//! The grid is vertex centred, `x_k = k h` with `h = 1/(n-1)`; the end nodes
//! own half cells. With the cell widths `W = diag(h/2, h, ..., h, h/2)` (the
//! composite trapezoid weights) and the conductances `c_k = a_eps(x_{k+1/2})/h`
//! the operator reads `B = W^{-1} K + lambda I`, where `K` is the symmetric
//! stiffness matrix with zero row sums. Its eigenvalues are those of the
//! symmetric matrix `W^{-1/2} K W^{-1/2} + lambda I`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfield::ProblemSpec;

/// Smallest resolution accepted for grid functions.
pub const MIN_GRID: usize = 64;
/// Number of eigenpairs of `B` computed by [`spectral_result`].
pub const DEFAULT_MODES: usize = 4;

/// Symmetric tridiagonal matrix stored as diagonal and off-diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Euclidean-normalized eigenvector.
    pub vector: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal and {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "tridiagonal matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Max-row-sum norm, an upper bound of the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDL^T
    /// inertia count).
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off.iter().fold(1.0f64, |m, e| m.max(e * e));
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.n() {
            if i > 0 {
                q = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `i`-th smallest eigenvalue (0-based) by bisection to full precision.
    pub fn eigenvalue_bisect(&self, i: usize) -> f64 {
        let (g_lo, g_hi) = self.gershgorin();
        let pad = f64::EPSILON * (g_lo.abs().max(g_hi.abs()) + 1.0);
        let (mut lo, mut hi) = (g_lo - pad, g_hi + pad);
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// LU factorization with partial pivoting of a tridiagonal matrix.
pub(crate) struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    pub(crate) fn factor(sub: &[f64], diag: &[f64], sup: &[f64], tiny: f64) -> Self {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        for p in d.iter_mut() {
            if p.abs() < tiny {
                *p = if *p < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// The `k` smallest eigenpairs, ascending: eigenvalues by Sturm bisection,
/// eigenvectors by inverse iteration (re-orthogonalized inside clusters).
///
/// Each pair satisfies `||T v - mu v|| <= 1e-8 ||T||`; a shift that stagnates
/// is perturbed and retried up to five times before failing.
pub fn eigen_lowest(t: &SymTridiagonal, k: usize) -> Result<Vec<EigenPair>> {
    let n = t.n();
    if k > n {
        return Err(Error::Domain(format!(
            "requested {k} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let norm = t.norm_inf().max(f64::MIN_POSITIVE);
    let sub = t.off.clone();
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    for i in 0..k {
        let mu = t.eigenvalue_bisect(i);
        let cluster: Vec<usize> = (0..pairs.len())
            .filter(|&j| (pairs[j].value - mu).abs() <= 1e-3 * norm)
            .collect();
        let mut done = None;
        for attempt in 0..6 {
            let shift =
                mu + attempt as f64 * 1e-10 * norm * if attempt % 2 == 0 { 1.0 } else { -1.0 };
            let diag: Vec<f64> = t.diag.iter().map(|d| d - shift).collect();
            let lu = TridiagLu::factor(&sub, &diag, &sub, f64::EPSILON * norm);
            // Deterministic start vector with components in every direction.
            let mut v: Vec<f64> = (0..n)
                .map(|j| 1.0 + 0.5 * ((j as f64 + 1.0) * (0.7 + i as f64 + attempt as f64)).sin())
                .collect();
            normalize(&mut v);
            for _ in 0..8 {
                lu.solve(&mut v);
                for &j in &cluster {
                    let p = &pairs[j].vector;
                    let c: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
                }
                if normalize(&mut v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
                    break;
                }
            }
            let tv = t.matvec(&v);
            let res = tv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - mu * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if res.is_finite() && res <= 1e-8 * norm {
                done = Some(v);
                break;
            }
        }
        let vector = done.ok_or_else(|| {
            Error::Numerical(format!(
                "inverse iteration stagnated for eigenvalue {i} ({mu})"
            ))
        })?;
        pairs.push(EigenPair { value: mu, vector });
    }
    Ok(pairs)
}

/// Composite trapezoid weights of the uniform grid on `[0, 1]` with `n` nodes.
pub fn trapezoid_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Nodal values on the uniform grid `x_k = k / (n - 1)` of `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GridFunction {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for GridFunction {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<GridFunction> for Vec<f64> {
    fn from(g: GridFunction) -> Self {
        g.values
    }
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_GRID {
            return Err(Error::Domain(format!(
                "grid functions need at least {MIN_GRID} nodes, got {}",
                values.len()
            )));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "grid functions need at least {MIN_GRID} nodes, got {n}"
            )));
        }
        Self::new((0..n).map(|k| f(k as f64 / (n - 1) as f64)).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n() - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 / (self.n() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Trapezoid rule for `int_0^1 g`.
    pub fn integral(&self) -> f64 {
        let n = self.n();
        let inner: f64 = self.values[1..n - 1].iter().sum();
        self.h() * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
    }

    /// Trapezoid rule for `int_0^1 g * other`.
    pub fn inner(&self, other: &GridFunction) -> f64 {
        let n = self.n();
        let v = &self.values;
        let o = &other.values;
        let inner: f64 = (1..n - 1).map(|k| v[k] * o[k]).sum();
        self.h() * (inner + 0.5 * (v[0] * o[0] + v[n - 1] * o[n - 1]))
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `L^2` norm of the forward differences `(g_{k+1} - g_k) / h`.
    pub fn derivative_l2(&self) -> f64 {
        let h = self.h();
        let s: f64 = self
            .values
            .windows(2)
            .map(|w| ((w[1] - w[0]) / h).powi(2))
            .sum();
        (h * s).sqrt()
    }

    /// Discrete `H^1` norm: `L^2` norm plus `L^2` norm of forward differences.
    pub fn h1_norm(&self) -> f64 {
        self.l2_norm() + self.derivative_l2()
    }

    pub fn sup_distance_to(&self, c: f64) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max((v - c).abs()))
    }

    pub fn to_csv(&self, header: &str) -> String {
        let mut out = format!("x,{header}\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.x(k), v);
        }
        out
    }
}

/// Finite-volume form of `B_eps` on the vertex-centred grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionOperator {
    pub n: usize,
    pub eps: f64,
    pub lambda: f64,
    /// `c_k = a_eps(x_{k+1/2}) / h`, `k = 0..n-2`.
    conductance: Vec<f64>,
    weights: Vec<f64>,
}

/// Rows `(sub, diag, sup)` of a general tridiagonal matrix.
pub type TridiagonalRows = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Assemble the zero-flux finite-volume operator for `a_eps = a / eps`.
pub fn assemble_b(spec: &ProblemSpec, eps: f64, n: usize) -> Result<DiffusionOperator> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if n < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 grid nodes, got {n}"
        )));
    }
    let h = 1.0 / (n - 1) as f64;
    let mut conductance = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let xm = (k as f64 + 0.5) * h;
        let a = spec.diffusion_at(xm, eps);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!(
                "diffusion a_eps({xm}) = {a} is not positive"
            )));
        }
        conductance.push(a / h);
    }
    for k in 0..n {
        let x = k as f64 * h;
        let a = spec.diffusion_at(x, eps);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!(
                "diffusion a_eps({x}) = {a} is not positive"
            )));
        }
    }
    Ok(DiffusionOperator {
        n,
        eps,
        lambda: spec.lambda,
        conductance,
        weights: trapezoid_weights(n),
    })
}

impl DiffusionOperator {
    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    /// Cell widths `W` (trapezoid weights).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn conductance(&self) -> &[f64] {
        &self.conductance
    }

    /// Stiffness matrix `K` of the diffusion part (zero row sums).
    pub fn stiffness(&self) -> SymTridiagonal {
        let n = self.n;
        let c = &self.conductance;
        let diag = (0..n)
            .map(|k| {
                let left = if k > 0 { c[k - 1] } else { 0.0 };
                let right = if k + 1 < n { c[k] } else { 0.0 };
                left + right
            })
            .collect();
        let off = c.iter().map(|v| -v).collect();
        SymTridiagonal { diag, off }
    }

    /// Rows of `B = W^{-1} K + lambda I`; interior off-diagonals are
    /// `-a_eps(x_{k +- 1/2}) / h^2`.
    pub fn b_rows(&self) -> TridiagonalRows {
        let k = self.stiffness();
        let w = &self.weights;
        let sub = (0..self.n - 1).map(|i| k.off[i] / w[i + 1]).collect();
        let sup = (0..self.n - 1).map(|i| k.off[i] / w[i]).collect();
        let diag = (0..self.n)
            .map(|i| k.diag[i] / w[i] + self.lambda)
            .collect();
        (sub, diag, sup)
    }

    /// `W^{-1/2} K W^{-1/2} + lambda I`, similar to `B` and symmetric
    /// positive definite for `lambda > 0`.
    pub fn symmetric(&self) -> SymTridiagonal {
        let k = self.stiffness();
        let w = &self.weights;
        let diag = (0..self.n)
            .map(|i| k.diag[i] / w[i] + self.lambda)
            .collect();
        let off = (0..self.n - 1)
            .map(|i| k.off[i] / (w[i] * w[i + 1]).sqrt())
            .collect();
        SymTridiagonal { diag, off }
    }

    /// `sum_k c_k (g_{k+1} - g_k)^2`, the discrete Dirichlet form `g^T K g`.
    ///
    /// Written in differences so that nearly constant `g` are evaluated
    /// without cancellation.
    pub fn dirichlet_form(&self, g: &[f64]) -> f64 {
        self.conductance
            .iter()
            .zip(g.windows(2))
            .map(|(c, w)| c * (w[1] - w[0]).powi(2))
            .sum()
    }

    /// Rayleigh quotient of `B` at `g` in the `W` inner product.
    pub fn rayleigh(&self, g: &[f64]) -> f64 {
        let mass: f64 = g.iter().zip(&self.weights).map(|(v, w)| w * v * v).sum();
        self.lambda + self.dirichlet_form(g) / mass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub eps: f64,
    /// Lowest eigenvalues of the discretized `B_eps`, ascending.
    pub mu: Vec<f64>,
    /// Eigenfunction of `mu[0]`, `L^2`-normalized with nonnegative mean.
    pub phi: GridFunction,
    /// `{beta}` merged with `mu`, ascending.
    pub lambda_a: Vec<f64>,
    /// Eigenvalue of the mode `(0, 1)`: always exactly `beta`.
    pub lambda1: f64,
    /// Eigenvalue of the mode `(phi, 0)`: the ground state `mu[0]` of `B_eps`.
    pub lambda2: f64,
}

impl SpectralResult {
    pub fn eigenfunction_csv(&self) -> String {
        self.phi.to_csv("phi")
    }
}

/// Lowest part of the spectrum of `A_eps` and the ground state of `B_eps`.
///
/// Eigenvalues located by bisection are refined by the Rayleigh quotient in
/// difference form, which keeps the ground state accurate relative to its own
/// size rather than to `||B_eps|| ~ 1/(eps h^2)`.
pub fn spectral_result(spec: &ProblemSpec, eps: f64, n: usize) -> Result<SpectralResult> {
    spec.validate()?;
    if n < MIN_GRID {
        return Err(Error::Domain(format!(
            "need at least {MIN_GRID} grid nodes, got {n}"
        )));
    }
    let op = assemble_b(spec, eps, n)?;
    let pairs = eigen_lowest(&op.symmetric(), DEFAULT_MODES.min(n))?;
    let mut modes: Vec<(f64, Vec<f64>)> = pairs
        .into_iter()
        .map(|p| {
            let g: Vec<f64> = p
                .vector
                .iter()
                .zip(op.weights())
                .map(|(v, w)| v / w.sqrt())
                .collect();
            (op.rayleigh(&g), g)
        })
        .collect();
    modes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mu: Vec<f64> = modes.iter().map(|m| m.0).collect();
    let mut phi = GridFunction::new(modes.swap_remove(0).1)?;
    let nrm = phi.l2_norm();
    let sign = if phi.integral() < 0.0 { -1.0 } else { 1.0 };
    phi.values_mut().iter_mut().for_each(|v| *v *= sign / nrm);

    let mut lambda_a = mu.clone();
    lambda_a.push(spec.beta);
    lambda_a.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SpectralResult {
        eps,
        lambda2: mu[0],
        mu,
        phi,
        lambda_a,
        lambda1: spec.beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::UnivariatePoly;
    use std::f64::consts::PI;

    fn constant_spec(lambda: f64, beta: f64) -> ProblemSpec {
        ProblemSpec {
            lambda,
            beta,
            ..ProblemSpec::quadratic_example()
        }
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let t = SymTridiagonal::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let p = eigen_lowest(&t, 3).unwrap();
        let vals: Vec<f64> = p.iter().map(|e| e.value).collect();
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!(p[0].vector[1].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn row_sums_vanish_without_reaction() {
        let spec = constant_spec(1.0, 1.0);
        let mut op = assemble_b(&spec, 1.0, 4).unwrap();
        op.lambda = 0.0;
        let (sub, diag, sup) = op.b_rows();
        for i in 0..4 {
            let mut s = diag[i];
            if i > 0 {
                s += sub[i - 1];
            }
            if i < 3 {
                s += sup[i];
            }
            assert!(s.abs() < 1e-12, "row {i}: {s}");
        }
        // interior off-diagonal is -a/h^2 with h = 1/3
        assert!((sup[1] + 9.0).abs() < 1e-12);
    }

    #[test]
    fn constant_coefficient_closed_form() {
        let spec = constant_spec(1.0, 1.0);
        let eps = 1e-2;
        let sr = spectral_result(&spec, eps, 2000).unwrap();
        assert!((sr.mu[0] - 1.0).abs() < 1e-10);
        for k in 1..3 {
            let exact = 1.0 + (k as f64 * PI).powi(2) / eps;
            assert!(((sr.mu[k] - exact) / exact).abs() < 1e-3);
        }
        assert!(sr.phi.sup_distance_to(1.0) < 1e-8);
        assert_eq!(sr.lambda1, 1.0);
        assert!(sr.lambda_a.contains(&1.0));
    }

    #[test]
    fn beta_is_the_first_eigenvalue() {
        let sr = spectral_result(&constant_spec(1.0, 0.5), 0.1, 128).unwrap();
        assert_eq!(sr.lambda_a[0], 0.5);
        assert_eq!(sr.lambda1, 0.5);
    }

    #[test]
    fn nonconstant_diffusion_keeps_constant_ground_state() {
        let mut spec = constant_spec(1.0, 1.0);
        spec.diffusion = UnivariatePoly::new(vec![1.0, 1.0]);
        for eps in [1e-1, 1e-2, 1e-3] {
            let sr = spectral_result(&spec, eps, 256).unwrap();
            assert!(sr.mu[0] >= spec.lambda - 1e-10);
            assert!((sr.mu[0] - 1.0).abs() < 1e-10, "{}", sr.mu[0]);
            assert!(sr.phi.sup_distance_to(1.0) < 1e-8);
            assert!(sr.mu[1] * eps > PI * PI / 2.0);
        }
    }

    #[test]
    fn grid_convergence_is_second_order() {
        let mut spec = constant_spec(1.0, 1.0);
        spec.diffusion = UnivariatePoly::new(vec![1.0, 1.0]);
        let m = |n| spectral_result(&spec, 1.0, n).unwrap().mu[1];
        let (a, b, c) = (m(65), m(129), m(257));
        let ratio = (a - b) / (b - c);
        assert!(ratio > 4.0 / 3.0 && ratio < 12.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_input() {
        let spec = constant_spec(1.0, 1.0);
        assert!(assemble_b(&spec, 0.0, 10).is_err());
        assert!(spectral_result(&spec, 1.0, 32).is_err());
        let mut bad = spec.clone();
        bad.diffusion = UnivariatePoly::new(vec![1.0, -2.0]);
        assert!(assemble_b(&bad, 1.0, 10).is_err());
        assert!(GridFunction::new(vec![0.0; 10]).is_err());
    }

    #[test]
    fn grid_function_norms() {
        let g = GridFunction::from_fn(1001, |x| (PI * x).cos()).unwrap();
        assert!((g.l2_norm() - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((g.derivative_l2() - PI / 2f64.sqrt()).abs() < 1e-4);
        assert!(g.integral().abs() < 1e-12);
    }
}
