//! Discrete weak-form residual
//! `int int { -u phi_t + A(grad) . grad phi - S phi } dx dt`
//! for test functions compactly supported inside a window cylinder.
//!
//! Time integrals use the midpoint of each step interval with
//! `u_mid = (u^k + u^{k+1}) / 2`; space integrals are node sums for the
//! `u phi_t` term and face sums for the flux term, with face gradients built
//! from two-point normal differences and averaged tangential differences.

use crate::error::{Error, Result};
use crate::model::{BoundaryCondition, Cylinder, Equation, SpaceTimeField};

/// `amplitude * (1 - |x-c|^2/r^2)^3_+ * (1 - ((t-tc)/tw)^2)^3_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub t_center: f64,
    pub t_half_width: f64,
    pub amplitude: f64,
}

fn cube(v: f64) -> f64 {
    v * v * v
}

impl Bump {
    pub fn new(center: Vec<f64>, radius: f64, t_center: f64, t_half_width: f64) -> Self {
        Bump {
            center,
            radius,
            t_center,
            t_half_width,
            amplitude: 1.0,
        }
    }

    fn space_arg(&self, x: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(x)
            .map(|(c, xi)| (xi - c) * (xi - c))
            .sum::<f64>()
            / (self.radius * self.radius)
    }

    fn time_arg(&self, t: f64) -> f64 {
        let s = (t - self.t_center) / self.t_half_width;
        s * s
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        let (a, b) = (self.space_arg(x), self.time_arg(t));
        if a >= 1.0 || b >= 1.0 {
            return 0.0;
        }
        self.amplitude * cube(1.0 - a) * cube(1.0 - b)
    }

    pub fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        let (a, b) = (self.space_arg(x), self.time_arg(t));
        if a >= 1.0 || b >= 1.0 {
            return 0.0;
        }
        let db = 2.0 * (t - self.t_center) / (self.t_half_width * self.t_half_width);
        self.amplitude * cube(1.0 - a) * (-3.0 * (1.0 - b) * (1.0 - b) * db)
    }

    /// Derivative along `axis`.
    pub fn partial(&self, x: &[f64], t: f64, axis: usize) -> f64 {
        let (a, b) = (self.space_arg(x), self.time_arg(t));
        if a >= 1.0 || b >= 1.0 {
            return 0.0;
        }
        let da = 2.0 * (x[axis] - self.center[axis]) / (self.radius * self.radius);
        self.amplitude * (-3.0 * (1.0 - a) * (1.0 - a) * da) * cube(1.0 - b)
    }

    /// Support strictly inside the window's open ball and open time interval.
    fn check_support(&self, window: &Cylinder) -> Result<()> {
        if self.center.len() != window.center.len() {
            return Err(Error::InvalidInput("test function dimension differs".into()));
        }
        let dist = self
            .center
            .iter()
            .zip(&window.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if !(dist + self.radius < window.radius) {
            return Err(Error::Support(format!(
                "spatial support reaches {} >= window radius {}",
                dist + self.radius,
                window.radius
            )));
        }
        let (lo, hi) = (self.t_center - self.t_half_width, self.t_center + self.t_half_width);
        if !(lo > window.top_time - window.length && hi < window.top_time) {
            return Err(Error::Support(format!(
                "time support ({lo}, {hi}) touches window ({}, {}]",
                window.top_time - window.length,
                window.top_time
            )));
        }
        Ok(())
    }
}

/// A finite linear combination of bumps.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub terms: Vec<(f64, Bump)>,
}

impl TestFunction {
    pub fn bump(b: Bump) -> Self {
        TestFunction { terms: vec![(1.0, b)] }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.terms.iter_mut().for_each(|(w, _)| *w *= c);
        self
    }

    pub fn plus(mut self, other: TestFunction) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        self.terms.iter().map(|(c, b)| c * b.value(x, t)).sum()
    }

    pub fn time_derivative(&self, x: &[f64], t: f64) -> f64 {
        self.terms.iter().map(|(c, b)| c * b.time_derivative(x, t)).sum()
    }

    pub fn partial(&self, x: &[f64], t: f64, axis: usize) -> f64 {
        self.terms.iter().map(|(c, b)| c * b.partial(x, t, axis)).sum()
    }

    fn time_support(&self) -> (f64, f64) {
        self.terms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, b)| {
                (lo.min(b.t_center - b.t_half_width), hi.max(b.t_center + b.t_half_width))
            })
    }
}

pub type SourceRef<'a> = &'a dyn Fn(&[f64], f64) -> f64;

/// Options for the weak form: flux regularization (0 gives the unregularized
/// flux) and an optional right-hand side `S(x, t)`.
#[derive(Default)]
pub struct WeakFormOptions<'a> {
    pub flux_regularization_eps: f64,
    pub source: Option<SourceRef<'a>>,
}

/// Evaluates the weak-form residual of `field` against `test_fn`. The
/// boundary term `int u phi dx |_{t1}^{t2}` vanishes because the test
/// function is supported strictly inside `window`.
pub fn weak_residual(
    field: &SpaceTimeField,
    test_fn: &TestFunction,
    window: &Cylinder,
    opts: &WeakFormOptions<'_>,
) -> Result<f64> {
    let grid = &field.grid;
    if !window.in_domain(grid) {
        return Err(Error::Domain("weak-form window must lie inside the grid domain".into()));
    }
    for (_, b) in &test_fn.terms {
        b.check_support(window)?;
    }
    let dim = grid.dim_n;
    let n = grid.cells_per_axis;
    let h = grid.spacing();
    let vol = grid.cell_volume();
    let p = field.params.p;
    let dnl = field.params.equation == Equation::DoublyNonlinear;
    let beta = field.params.beta();
    let coef = if dnl { beta.powf(1.0 - p) } else { 1.0 };
    let eps2 = opts.flux_regularization_eps * opts.flux_regularization_eps;
    let (t_lo, t_hi) = test_fn.time_support();
    let npts = grid.nodes_per_slice();
    let periodic = grid.bc == BoundaryCondition::Periodic;

    // Neighbour along `axis`, without wrapping across the outer boundary for
    // non-periodic grids.
    let neighbour = |multi: &[usize; 3], axis: usize, up: bool| -> Option<usize> {
        let mut m = *multi;
        let i = m[axis];
        m[axis] = match (up, i) {
            (true, i) if i + 1 < n => i + 1,
            (true, _) if periodic => 0,
            (false, i) if i > 0 => i - 1,
            (false, _) if periodic => n - 1,
            _ => return None,
        };
        Some(grid.flat_index(&m[..dim]))
    };

    let mut total = 0.0;
    let mut x = [0.0; 3];
    let mut xf = [0.0; 3];
    let mut multi = [0usize; 3];
    let mut hi_multi = [0usize; 3];
    let mut w = vec![0.0; npts];
    for k in 0..grid.n_steps {
        let (ta, tb) = (grid.time(k), grid.time(k + 1));
        if tb <= t_lo || ta >= t_hi {
            continue;
        }
        let tm = 0.5 * (ta + tb);
        let (ua, ub) = (field.slice(k), field.slice(k + 1));
        for i in 0..npts {
            let um = 0.5 * (ua[i] + ub[i]);
            w[i] = if dnl { um.max(0.0).powf(beta) } else { um };
            grid.node_coord(i, &mut x);
            let xs = &x[..dim];
            let mut term = -um * test_fn.time_derivative(xs, tm);
            if let Some(src) = opts.source {
                term -= src(xs, tm) * test_fn.value(xs, tm);
            }
            total += term * vol * grid.dt;
        }
        for lo in 0..npts {
            grid.multi_index(lo, &mut multi);
            grid.node_coord(lo, &mut x);
            for axis in 0..dim {
                if multi[axis] + 1 >= n {
                    continue;
                }
                let hi = neighbour(&multi, axis, true).expect("interior face");
                xf[..dim].copy_from_slice(&x[..dim]);
                xf[axis] += 0.5 * h;
                let dphi = test_fn.partial(&xf[..dim], tm, axis);
                if dphi == 0.0 {
                    continue;
                }
                grid.multi_index(hi, &mut hi_multi);
                let gn = (w[hi] - w[lo]) / h;
                let mut gt2 = 0.0;
                for other in (0..dim).filter(|&o| o != axis) {
                    let central =
                        |m: &[usize; 3], own: usize| match (neighbour(m, other, true), neighbour(m, other, false)) {
                            (Some(a), Some(b)) => (w[a] - w[b]) / (2.0 * h),
                            (Some(a), None) => (w[a] - w[own]) / h,
                            (None, Some(b)) => (w[own] - w[b]) / h,
                            (None, None) => 0.0,
                        };
                    let g = 0.5 * (central(&multi, lo) + central(&hi_multi, hi));
                    gt2 += g * g;
                }
                let q = gn * gn + gt2 + eps2;
                let flux = if q == 0.0 {
                    0.0
                } else {
                    coef * q.powf(0.5 * (p - 2.0)) * gn
                };
                total += flux * dphi * vol * grid.dt;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Grid, ProblemParams};

    fn field_1d(f: impl Fn(f64, f64) -> f64) -> SpaceTimeField {
        let g = Grid::new(1, 128, 1.0, 0.01, 100, BoundaryCondition::Periodic).unwrap();
        SpaceTimeField::from_fn(g, ProblemParams::p_laplacian(1, 1.5), "test", |x, t| f(x[0], t)).unwrap()
    }

    fn window() -> Cylinder {
        Cylinder::new(vec![0.0], 0.9, 0.8, 0.8).unwrap()
    }

    #[test]
    fn constant_field_has_zero_residual() {
        let f = field_1d(|_, _| 3.0);
        let phi = TestFunction::bump(Bump::new(vec![0.1], 0.5, 0.5, 0.3));
        let r = weak_residual(&f, &phi, &window(), &WeakFormOptions::default()).unwrap();
        assert!(r.abs() < 1e-12, "{r}");
    }

    #[test]
    fn linear_steady_state_residual_is_small() {
        // Flux is the constant 0.5^{1/2}; int phi_x = 0 and int phi_t = 0, so
        // only quadrature error remains.
        let f = field_1d(|x, _| 0.5 * x + 1.0);
        let phi = TestFunction::bump(Bump::new(vec![0.05], 0.5, 0.5, 0.3));
        let r = weak_residual(&f, &phi, &window(), &WeakFormOptions::default()).unwrap();
        assert!(r.abs() <= f.grid.spacing(), "{r}");
    }

    #[test]
    fn support_must_be_strictly_inside() {
        let f = field_1d(|x, _| x);
        let touching = TestFunction::bump(Bump::new(vec![0.3], 0.5, 0.5, 0.3));
        assert!(matches!(
            weak_residual(&f, &touching, &window(), &WeakFormOptions::default()),
            Err(Error::Support(_))
        ));
        let late = TestFunction::bump(Bump::new(vec![0.0], 0.5, 0.75, 0.2));
        assert!(matches!(
            weak_residual(&f, &late, &window(), &WeakFormOptions::default()),
            Err(Error::Support(_))
        ));
    }

    #[test]
    fn residual_is_linear_in_the_test_function() {
        let f = field_1d(|x, t| (3.0 * x).sin() * (-t).exp() + 0.2 * x * x);
        let a = TestFunction::bump(Bump::new(vec![0.1], 0.4, 0.5, 0.3));
        let b = TestFunction::bump(Bump::new(vec![-0.2], 0.3, 0.4, 0.2));
        let opts = WeakFormOptions::default();
        let ra = weak_residual(&f, &a, &window(), &opts).unwrap();
        let rb = weak_residual(&f, &b, &window(), &opts).unwrap();
        let combo = a.clone().scaled(2.5).plus(b.clone().scaled(-0.7));
        let rc = weak_residual(&f, &combo, &window(), &opts).unwrap();
        assert!((rc - (2.5 * ra - 0.7 * rb)).abs() < 1e-12 * (1.0 + rc.abs()));
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = Bump::new(vec![0.1, -0.2], 0.7, 0.4, 0.3);
        let (x, t) = ([0.3, 0.05], 0.5);
        let e = 1e-6;
        let fd_t = (b.value(&x, t + e) - b.value(&x, t - e)) / (2.0 * e);
        assert!((fd_t - b.time_derivative(&x, t)).abs() < 1e-7);
        for axis in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += e;
            xm[axis] -= e;
            let fd = (b.value(&xp, t) - b.value(&xm, t)) / (2.0 * e);
            assert!((fd - b.partial(&x, t, axis)).abs() < 1e-7);
        }
    }
}
