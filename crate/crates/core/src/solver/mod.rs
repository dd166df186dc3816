//! Backward-Euler finite-volume integrator for the two prototype equations.
//!
//! Both equations are advanced in conservative form
//! `u_next - dt * div_h F = u_prev + dt * S` with the face flux
//!
//! ```text
//! F = coef * (|g|^2 + eps^2)^{(p-2)/2} g,   g = grad_h w
//! ```
//!
//! where `w = u`, `coef = 1` for the p-Laplacian and `w = max(u, floor)^beta`,
//! `coef = beta^{1-p}` for the doubly nonlinear equation. The normal part of
//! `g` is the two-point difference across the face; tangential parts average
//! the central differences of the two adjacent cells.
//!
//! Each nonlinear iteration solves `(I + dt/h^2 L_k D) delta = -R(u)`, with
//! `L_k` a weighted graph Laplacian over faces and `D = dw/du` diagonal.
//! Substituting `y = D delta` gives the symmetric positive definite system
//! `(D^{-1} + dt/h^2 L_k) y = -R`, solved by preconditioned CG. Picard uses
//! the lagged conductance `k = coef (|g|^2+eps^2)^{(p-2)/2}`; Newton uses the
//! normal derivative of the flux, which is the exact Jacobian in 1D.

mod linear;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{validate_params, BoundaryCondition, Equation, Grid, ProblemParams, SpaceTimeField};
use linear::LaplacianSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linearization {
    Newton,
    Picard,
}

pub type SourceFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// A named source term `S(x, t)`, evaluated at the new time level.
#[derive(Clone)]
pub struct ManufacturedSource {
    pub name: String,
    pub eval: SourceFn,
}

impl ManufacturedSource {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        ManufacturedSource {
            name: name.into(),
            eval: Arc::new(f),
        }
    }
}

impl fmt::Debug for ManufacturedSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedSource").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub flux_regularization_eps: f64,
    /// Lower clamp applied to `u` inside `u^beta` (doubly nonlinear only).
    pub positivity_floor: f64,
    pub nonlinear_tol: f64,
    pub max_newton_iters: usize,
    pub linearization: Linearization,
    pub source: Option<ManufacturedSource>,
}

impl SolverConfig {
    /// Defaults: `eps = h`, floor `1e-12` for the doubly nonlinear equation,
    /// Picard iterations to `1e-10`.
    pub fn for_grid(grid: &Grid, params: &ProblemParams) -> Self {
        SolverConfig {
            flux_regularization_eps: grid.spacing(),
            positivity_floor: match params.equation {
                Equation::PLaplacian => 0.0,
                Equation::DoublyNonlinear => 1e-12,
            },
            nonlinear_tol: 1e-10,
            max_newton_iters: 200,
            linearization: Linearization::Picard,
            source: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.flux_regularization_eps > 0.0 && self.flux_regularization_eps.is_finite()) {
            return Err(Error::InvalidInput("flux_regularization_eps must be positive".into()));
        }
        if !(self.nonlinear_tol > 0.0) {
            return Err(Error::InvalidInput("nonlinear_tol must be positive".into()));
        }
        if !(self.positivity_floor >= 0.0) {
            return Err(Error::InvalidInput("positivity_floor must be non-negative".into()));
        }
        if self.max_newton_iters == 0 {
            return Err(Error::InvalidInput("max_newton_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Nodes whose converged value was slightly negative and reset to zero.
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub field: SpaceTimeField,
    pub newton_iteration_counts: Vec<usize>,
    pub converged: bool,
    pub mass_history: Vec<f64>,
    pub final_residuals: Vec<f64>,
    pub clamp_activations: usize,
}

/// One implicit step of the p-Laplacian. `t_next` is where the source term
/// is evaluated.
pub fn step_p_laplacian(
    u_prev: &[f64],
    t_next: f64,
    cfg: &SolverConfig,
    grid: &Grid,
    params: &ProblemParams,
) -> Result<StepOutcome> {
    if params.equation != Equation::PLaplacian {
        return Err(Error::InvalidInput(
            "step_p_laplacian needs a p-Laplacian problem".into(),
        ));
    }
    Stepper::new(grid, params, cfg)?.step(u_prev, t_next)
}

/// One implicit step of the doubly nonlinear equation in its `u^beta` form.
pub fn step_doubly_nonlinear(
    u_prev: &[f64],
    t_next: f64,
    cfg: &SolverConfig,
    grid: &Grid,
    params: &ProblemParams,
) -> Result<StepOutcome> {
    if params.equation != Equation::DoublyNonlinear {
        return Err(Error::InvalidInput(
            "step_doubly_nonlinear needs a doubly nonlinear problem".into(),
        ));
    }
    if let Some(i) = u_prev.iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidInput(format!("negative initial value at node {i}")));
    }
    Stepper::new(grid, params, cfg)?.step(u_prev, t_next)
}

/// Runs `grid.n_steps` implicit steps from `initial`.
pub fn solve(initial: &[f64], cfg: &SolverConfig, grid: &Grid, params: &ProblemParams) -> Result<SolveResult> {
    validate_params(params)?;
    let stepper = Stepper::new(grid, params, cfg)?;
    if initial.len() != grid.nodes_per_slice() {
        return Err(Error::InvalidInput(format!(
            "initial data has {} values, grid expects {}",
            initial.len(),
            grid.nodes_per_slice()
        )));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial data is not finite".into()));
    }
    if params.equation == Equation::DoublyNonlinear && initial.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput(
            "doubly nonlinear initial data must be non-negative".into(),
        ));
    }

    let vol = grid.cell_volume();
    let mut values = Vec::with_capacity(grid.n_slices() * initial.len());
    values.extend_from_slice(initial);
    let mut mass_history = vec![initial.iter().sum::<f64>() * vol];
    let mut counts = Vec::with_capacity(grid.n_steps);
    let mut residuals = Vec::with_capacity(grid.n_steps);
    let mut clamps = 0;
    let mut current = initial.to_vec();
    for k in 0..grid.n_steps {
        let out = stepper
            .step(&current, grid.time(k + 1))
            .map_err(|e| Error::StepFailed {
                step: k + 1,
                source: Box::new(e),
            })?;
        counts.push(out.iterations);
        residuals.push(out.residual);
        clamps += out.clamped;
        mass_history.push(out.u.iter().sum::<f64>() * vol);
        values.extend_from_slice(&out.u);
        current = out.u;
    }
    let converged = residuals.iter().all(|&r| r <= cfg.nonlinear_tol);
    let label = format!("{} solve", params.equation.tag());
    let field = SpaceTimeField::new(grid.clone(), params.clone(), label, values)?;
    Ok(SolveResult {
        field,
        newton_iteration_counts: counts,
        converged,
        mass_history,
        final_residuals: residuals,
        clamp_activations: clamps,
    })
}

/// A face between cells `lo` and `hi = lo + e_axis`.
#[derive(Debug, Clone)]
struct Face {
    lo: usize,
    hi: usize,
    /// Per tangential axis: `(lo+, lo-, span_lo, hi+, hi-, span_hi)` where a
    /// span of 2 marks a central difference and 1 a one-sided one.
    tangential: Vec<(usize, usize, f64, usize, usize, f64)>,
}

struct Stepper<'a> {
    grid: &'a Grid,
    cfg: &'a SolverConfig,
    p: f64,
    beta: f64,
    coef: f64,
    floor: f64,
    dnl: bool,
    h: f64,
    faces: Vec<Face>,
    active: Vec<bool>,
    active_index: Vec<usize>,
    n_active: usize,
}

impl<'a> Stepper<'a> {
    fn new(grid: &'a Grid, params: &ProblemParams, cfg: &'a SolverConfig) -> Result<Self> {
        grid.validate()?;
        cfg.validate()?;
        if params.dim_n != grid.dim_n {
            return Err(Error::InvalidInput("problem and grid dimensions differ".into()));
        }
        let dnl = params.equation == Equation::DoublyNonlinear;
        let beta = params.beta();
        let npts = grid.nodes_per_slice();
        let active: Vec<bool> = (0..npts).map(|i| !grid.is_boundary_node(i)).collect();
        let mut active_index = vec![usize::MAX; npts];
        let mut n_active = 0;
        for (i, &a) in active.iter().enumerate() {
            if a {
                active_index[i] = n_active;
                n_active += 1;
            }
        }
        Ok(Stepper {
            grid,
            cfg,
            p: params.p,
            beta,
            coef: if dnl { beta.powf(1.0 - params.p) } else { 1.0 },
            floor: cfg.positivity_floor,
            dnl,
            h: grid.spacing(),
            faces: build_faces(grid),
            active,
            active_index,
            n_active,
        })
    }

    fn transform(&self, u: &[f64]) -> Vec<f64> {
        if self.dnl {
            u.iter().map(|&v| v.max(self.floor).powf(self.beta)).collect()
        } else {
            u.to_vec()
        }
    }

    /// Derivative of the transform, kept strictly positive.
    fn transform_derivative(&self, u: &[f64]) -> Vec<f64> {
        if self.dnl {
            let lo = self.floor.max(f64::EPSILON);
            u.iter().map(|&v| self.beta * v.max(lo).powf(self.beta - 1.0)).collect()
        } else {
            vec![1.0; u.len()]
        }
    }

    /// Face gradient `(normal, |tangential|^2)`.
    fn face_gradient(&self, face: &Face, w: &[f64]) -> (f64, f64) {
        let gn = (w[face.hi] - w[face.lo]) / self.h;
        let mut gt2 = 0.0;
        for &(lp, lm, sl, hp, hm, sh) in &face.tangential {
            let g = ((w[lp] - w[lm]) / sl + (w[hp] - w[hm]) / sh) / (2.0 * self.h);
            gt2 += g * g;
        }
        (gn, gt2)
    }

    fn residual(&self, u: &[f64], w: &[f64], rhs: &[f64]) -> Vec<f64> {
        let dt = self.grid.dt;
        let eps2 = self.cfg.flux_regularization_eps.powi(2);
        let mut div = vec![0.0; u.len()];
        for face in &self.faces {
            let (gn, gt2) = self.face_gradient(face, w);
            let flux = self.coef * (gn * gn + gt2 + eps2).powf(0.5 * (self.p - 2.0)) * gn;
            div[face.lo] += flux / self.h;
            div[face.hi] -= flux / self.h;
        }
        let mut r = vec![0.0; u.len()];
        for i in 0..u.len() {
            if self.active[i] {
                r[i] = u[i] - rhs[i] - dt * div[i];
            }
        }
        r
    }

    fn assemble(&self, u: &[f64], w: &[f64]) -> LaplacianSystem {
        let eps2 = self.cfg.flux_regularization_eps.powi(2);
        let scale = self.grid.dt / (self.h * self.h);
        let d = self.transform_derivative(u);
        let mut sys = LaplacianSystem::new(self.n_active);
        for (i, &a) in self.active.iter().enumerate() {
            if a {
                sys.diag[self.active_index[i]] = 1.0 / d[i];
            }
        }
        for face in &self.faces {
            let (lo_on, hi_on) = (self.active[face.lo], self.active[face.hi]);
            if !lo_on && !hi_on {
                continue;
            }
            let (gn, gt2) = self.face_gradient(face, w);
            let q = gn * gn + gt2 + eps2;
            let kappa = match self.cfg.linearization {
                Linearization::Picard => self.coef * q.powf(0.5 * (self.p - 2.0)),
                Linearization::Newton => {
                    self.coef * q.powf(0.5 * (self.p - 4.0)) * ((self.p - 1.0) * gn * gn + gt2 + eps2)
                }
            } * scale;
            match (lo_on, hi_on) {
                (true, true) => {
                    let (a, b) = (self.active_index[face.lo], self.active_index[face.hi]);
                    if a == b {
                        continue;
                    }
                    sys.edges.push((a, b, kappa));
                }
                (true, false) => sys.diag[self.active_index[face.lo]] += kappa,
                (false, true) => sys.diag[self.active_index[face.hi]] += kappa,
                (false, false) => unreachable!(),
            }
        }
        sys
    }

    fn step(&self, u_prev: &[f64], t_next: f64) -> Result<StepOutcome> {
        let npts = self.grid.nodes_per_slice();
        if u_prev.len() != npts {
            return Err(Error::InvalidInput("state length does not match the grid".into()));
        }
        let dt = self.grid.dt;
        let mut rhs = u_prev.to_vec();
        if let Some(src) = &self.cfg.source {
            let mut x = [0.0; 3];
            for (i, r) in rhs.iter_mut().enumerate() {
                self.grid.node_coord(i, &mut x);
                *r += dt * (src.eval)(&x[..self.grid.dim_n], t_next);
            }
        }
        let tol = self.cfg.nonlinear_tol;
        let mut u = u_prev.to_vec();
        let mut w = self.transform(&u);
        let mut r = self.residual(&u, &w, &rhs);
        let mut rnorm = max_abs(&r);
        let mut iterations = 0;
        let mut b = vec![0.0; self.n_active];
        let mut y = vec![0.0; self.n_active];
        while rnorm > tol {
            if iterations == self.cfg.max_newton_iters {
                return Err(Error::NonlinearDivergence {
                    iterations,
                    residual: rnorm,
                });
            }
            iterations += 1;
            let sys = self.assemble(&u, &w);
            for (i, &a) in self.active.iter().enumerate() {
                if a {
                    b[self.active_index[i]] = -r[i];
                }
            }
            if sys.solve(&b, &mut y, 1e-13, 20 * self.n_active + 100).is_none() {
                return Err(Error::NonlinearDivergence {
                    iterations,
                    residual: rnorm,
                });
            }
            let d = self.transform_derivative(&u);
            let mut delta = vec![0.0; npts];
            for (i, &a) in self.active.iter().enumerate() {
                if a {
                    delta[i] = y[self.active_index[i]] / d[i];
                }
            }
            // Backtrack while the residual grows.
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + lambda * b).collect();
                let w_trial = self.transform(&trial);
                let r_trial = self.residual(&trial, &w_trial, &rhs);
                let n_trial = max_abs(&r_trial);
                if n_trial < rnorm || lambda < 1.0 / 64.0 {
                    u = trial;
                    w = w_trial;
                    r = r_trial;
                    rnorm = n_trial;
                    break;
                }
                lambda *= 0.5;
            }
        }
        let mut clamped = 0;
        if self.dnl {
            for (i, v) in u.iter_mut().enumerate() {
                if *v < -tol {
                    return Err(Error::Negativity { node: i, value: *v });
                }
                if *v < 0.0 {
                    *v = 0.0;
                    clamped += 1;
                }
            }
        }
        Ok(StepOutcome {
            u,
            iterations,
            residual: rnorm,
            clamped,
        })
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn build_faces(grid: &Grid) -> Vec<Face> {
    let n = grid.cells_per_axis;
    let dim = grid.dim_n;
    let periodic = grid.bc == BoundaryCondition::Periodic;
    let mut faces = Vec::new();
    let mut multi = [0usize; 3];
    // Neighbour of `idx` along `axis` by `+1`/`-1`, with the span it covers.
    let shift = |multi: &[usize; 3], axis: usize, up: bool| -> Option<usize> {
        let mut m = *multi;
        let i = m[axis];
        m[axis] = if up {
            if i + 1 < n {
                i + 1
            } else if periodic {
                0
            } else {
                return None;
            }
        } else if i > 0 {
            i - 1
        } else if periodic {
            n - 1
        } else {
            return None;
        };
        Some(grid.flat_index(&m[..dim]))
    };
    for idx in 0..grid.nodes_per_slice() {
        grid.multi_index(idx, &mut multi);
        for axis in 0..dim {
            let Some(hi) = shift(&multi, axis, true) else {
                continue;
            };
            let mut hi_multi = [0usize; 3];
            grid.multi_index(hi, &mut hi_multi);
            let mut tangential = Vec::new();
            for other in (0..dim).filter(|&o| o != axis) {
                let pair = |m: &[usize; 3], own: usize| {
                    let plus = shift(m, other, true);
                    let minus = shift(m, other, false);
                    match (plus, minus) {
                        (Some(a), Some(b)) => (a, b, 2.0),
                        (Some(a), None) => (a, own, 1.0),
                        (None, Some(b)) => (own, b, 1.0),
                        (None, None) => (own, own, 1.0),
                    }
                };
                let (lp, lm, sl) = pair(&multi, idx);
                let (hp, hm, sh) = pair(&hi_multi, hi);
                tangential.push((lp, lm, sl, hp, hm, sh));
            }
            faces.push(Face {
                lo: idx,
                hi,
                tangential,
            });
        }
    }
    faces
}
