//! Shared domain types: problem parameters, grids, space-time fields and
//! cylinders.
//!
//! The spatial domain is always the cube `[-L, L]^N` carrying a uniform
//! cell-centred grid; node `i` along an axis sits at `-L + (i + 1/2) h`
//! with `h = 2L / cells_per_axis`. Time slice `k` sits at `k * dt`.

use crate::error::{Error, Result};

/// Relative slack (in units of `dt`) applied when matching times to slices.
pub const TIME_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    /// `u_t = div(|grad u|^{p-2} grad u)`
    PLaplacian,
    /// `u_t = div(u^{m-1} |grad u|^{p-2} grad u)`
    DoublyNonlinear,
}

impl Equation {
    pub fn tag(self) -> &'static str {
        match self {
            Equation::PLaplacian => "plap",
            Equation::DoublyNonlinear => "dnl",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "plap" => Some(Equation::PLaplacian),
            "dnl" => Some(Equation::DoublyNonlinear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub dim_n: usize,
    pub p: f64,
    /// Ignored for the p-Laplacian.
    pub m: f64,
    pub equation: Equation,
    pub c0_struct: f64,
    pub c1_struct: f64,
}

impl ProblemParams {
    pub fn p_laplacian(dim_n: usize, p: f64) -> Self {
        ProblemParams {
            dim_n,
            p,
            m: 1.0,
            equation: Equation::PLaplacian,
            c0_struct: 1.0,
            c1_struct: 1.0,
        }
    }

    pub fn doubly_nonlinear(dim_n: usize, p: f64, m: f64) -> Self {
        ProblemParams {
            dim_n,
            p,
            m,
            equation: Equation::DoublyNonlinear,
            c0_struct: 1.0,
            c1_struct: 1.0,
        }
    }

    /// Exponent of the transformed unknown `u^beta`; equals 1 for the
    /// p-Laplacian.
    pub fn beta(&self) -> f64 {
        match self.equation {
            Equation::PLaplacian => 1.0,
            Equation::DoublyNonlinear => beta(self.p, self.m),
        }
    }

    /// Exponent `e` in the intrinsic stretch `c = omega^e`:
    /// `(p-2)/p` for the p-Laplacian, `(m+p-3)/p` for the doubly nonlinear
    /// equation.
    pub fn intrinsic_exponent(&self) -> f64 {
        match self.equation {
            Equation::PLaplacian => (self.p - 2.0) / self.p,
            Equation::DoublyNonlinear => (self.m + self.p - 3.0) / self.p,
        }
    }
}

/// `beta = (p + m - 2) / (p - 1)`.
pub fn beta(p: f64, m: f64) -> f64 {
    (p + m - 2.0) / (p - 1.0)
}

/// Checks the exponent ranges. For the doubly nonlinear equation this is the
/// supercritical window `3 - p/N < m + p < 3` together with `m > 1`.
pub fn validate_params(params: &ProblemParams) -> Result<()> {
    let ProblemParams {
        dim_n, p, m, equation, ..
    } = *params;
    if !(1..=3).contains(&dim_n) {
        return Err(Error::Range(format!("dimension N={dim_n} must be 1, 2 or 3")));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Range(format!("p > 1 violated (p={p})")));
    }
    if p >= 2.0 {
        return Err(Error::Range(format!("p < 2 violated (p={p})")));
    }
    if !(params.c0_struct > 0.0 && params.c1_struct > 0.0) {
        return Err(Error::Range("structure constants must be positive".into()));
    }
    if equation == Equation::DoublyNonlinear {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::Range(format!("m > 1 violated (m={m})")));
        }
        let s = m + p;
        if s <= 2.0 {
            return Err(Error::Range(format!("m + p > 2 violated (m+p={s})")));
        }
        if s >= 3.0 {
            return Err(Error::Range(format!("m + p < 3 violated (m+p={s})")));
        }
        let lower = 3.0 - p / dim_n as f64;
        if s <= lower {
            return Err(Error::Range(format!(
                "supercritical bound m + p > 3 - p/N violated (m+p={s}, 3-p/N={lower})"
            )));
        }
    }
    Ok(())
}

/// Lebesgue measure `w_N` of the unit ball in `R^N`.
pub fn unit_ball_measure(dim_n: usize) -> f64 {
    match dim_n {
        0 => 1.0,
        1 => 2.0,
        n => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_measure(n - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirichletData {
    /// Boundary cells keep their initial values for all time.
    FrozenInitial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// The outermost layer of cells along every axis is held fixed.
    Dirichlet(DirichletData),
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim_n: usize,
    pub cells_per_axis: usize,
    pub domain_half_width: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub bc: BoundaryCondition,
}

impl Grid {
    pub fn new(
        dim_n: usize,
        cells_per_axis: usize,
        domain_half_width: f64,
        dt: f64,
        n_steps: usize,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        let grid = Grid {
            dim_n,
            cells_per_axis,
            domain_half_width,
            dt,
            n_steps,
            bc,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim_n) {
            return Err(Error::InvalidInput(format!(
                "grid dimension {} must be 1, 2 or 3",
                self.dim_n
            )));
        }
        if self.cells_per_axis < 8 {
            return Err(Error::InvalidInput(format!(
                "cells_per_axis={} must be at least 8",
                self.cells_per_axis
            )));
        }
        if !(self.domain_half_width.is_finite() && self.domain_half_width > 0.0) {
            return Err(Error::InvalidInput("domain_half_width must be positive".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidInput("dt must be positive".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.domain_half_width / self.cells_per_axis as f64
    }

    pub fn final_time(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn n_slices(&self) -> usize {
        self.n_steps + 1
    }

    pub fn nodes_per_slice(&self) -> usize {
        self.cells_per_axis.pow(self.dim_n as u32)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Coordinate of node `i` along one axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.domain_half_width + (i as f64 + 0.5) * self.spacing()
    }

    /// Splits a flat spatial index into per-axis indices (axis 0 slowest).
    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        let n = self.cells_per_axis;
        for d in (0..self.dim_n).rev() {
            out[d] = idx % n;
            idx /= n;
        }
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .take(self.dim_n)
            .fold(0, |acc, &i| acc * self.cells_per_axis + i)
    }

    pub fn node_coord(&self, idx: usize, out: &mut [f64]) {
        let mut multi = [0usize; 3];
        self.multi_index(idx, &mut multi);
        for d in 0..self.dim_n {
            out[d] = self.axis_coord(multi[d]);
        }
    }

    /// Index of the slice at time `t`, if `t` matches one.
    pub fn slice_index(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt).round();
        if k < 0.0 || k > self.n_steps as f64 {
            return None;
        }
        let k = k as usize;
        ((self.time(k) - t).abs() <= TIME_SLACK * self.dt).then_some(k)
    }

    /// True when the node lies on the held boundary layer of a Dirichlet grid.
    pub fn is_boundary_node(&self, idx: usize) -> bool {
        if self.bc == BoundaryCondition::Periodic {
            return false;
        }
        let mut multi = [0usize; 3];
        self.multi_index(idx, &mut multi);
        multi[..self.dim_n]
            .iter()
            .any(|&i| i == 0 || i + 1 == self.cells_per_axis)
    }

    /// Node-counting volume element `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim_n as i32)
    }
}

/// A discrete solution `u` on every time slice of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub grid: Grid,
    pub params: ProblemParams,
    pub label: String,
    values: Vec<f64>,
}

impl SpaceTimeField {
    /// Builds a field from slice-major values. Checks length, finiteness and
    /// (for the doubly nonlinear equation) non-negativity.
    pub fn new(grid: Grid, params: ProblemParams, label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let expected = grid.n_slices() * grid.nodes_per_slice();
        if values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid expects {expected}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at index {i}")));
        }
        if params.equation == Equation::DoublyNonlinear {
            if let Some(i) = values.iter().position(|&v| v < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "negative value {} at index {i} in a doubly nonlinear field",
                    values[i]
                )));
            }
        }
        Ok(SpaceTimeField {
            grid,
            params,
            label: label.into(),
            values,
        })
    }

    /// Samples `f(x, t)` on every node and slice.
    pub fn from_fn(
        grid: Grid,
        params: ProblemParams,
        label: impl Into<String>,
        f: impl Fn(&[f64], f64) -> f64,
    ) -> Result<Self> {
        let npts = grid.nodes_per_slice();
        let mut values = Vec::with_capacity(grid.n_slices() * npts);
        let mut x = [0.0; 3];
        for k in 0..grid.n_slices() {
            let t = grid.time(k);
            for idx in 0..npts {
                grid.node_coord(idx, &mut x);
                values.push(f(&x[..grid.dim_n], t));
            }
        }
        Self::new(grid, params, label, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n_slices(&self) -> usize {
        self.grid.n_slices()
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        let n = self.grid.nodes_per_slice();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn value(&self, k: usize, idx: usize) -> f64 {
        self.values[k * self.grid.nodes_per_slice() + idx]
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same grid and parameters, new values.
    pub fn with_values(&self, label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.params.clone(), label, values)
    }
}

/// The set `B_radius(center) x (top_time - length, top_time]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub center: Vec<f64>,
    pub top_time: f64,
    pub radius: f64,
    pub length: f64,
}

impl Cylinder {
    pub fn new(center: Vec<f64>, top_time: f64, radius: f64, length: f64) -> Result<Self> {
        if !(radius > 0.0 && length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "cylinder needs radius > 0 and length > 0 (got {radius}, {length})"
            )));
        }
        Ok(Cylinder {
            center,
            top_time,
            radius,
            length,
        })
    }

    /// Strict ball membership: `|x - center| < radius`.
    pub fn contains_space(&self, x: &[f64]) -> bool {
        ball_contains(&self.center, self.radius, x)
    }

    /// Half-open window `(top - length, top]`, with a `TIME_SLACK * dt`
    /// tolerance on both ends.
    pub fn contains_time(&self, t: f64, dt: f64) -> bool {
        let slack = TIME_SLACK * dt;
        t > self.top_time - self.length + slack && t <= self.top_time + slack
    }

    /// `B_radius(center)` inside `[-L, L]^N` and the window inside `(0, T]`.
    pub fn in_domain(&self, grid: &Grid) -> bool {
        let slack = TIME_SLACK * grid.dt;
        self.center.len() == grid.dim_n
            && self
                .center
                .iter()
                .all(|c| c.abs() + self.radius <= grid.domain_half_width)
            && self.top_time - self.length >= -slack
            && self.top_time <= grid.final_time() + slack
    }

    pub fn with_radius(&self, radius: f64) -> Self {
        Cylinder { radius, ..self.clone() }
    }
}

pub(crate) fn ball_contains(center: &[f64], radius: f64, x: &[f64]) -> bool {
    let d2: f64 = center.iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum();
    d2 < radius * radius
}

/// `Q(rho^p, c0 rho)` with `c0 = omega^{(p-2)/p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicCylinderSpec {
    pub rho: f64,
    pub omega: f64,
    pub p: f64,
}

impl IntrinsicCylinderSpec {
    pub fn c0(&self) -> f64 {
        self.omega.powf((self.p - 2.0) / self.p)
    }

    pub fn radius(&self) -> f64 {
        self.c0() * self.rho
    }

    pub fn length(&self) -> f64 {
        self.rho.powf(self.p)
    }

    pub fn to_cylinder(&self, center: Vec<f64>, top_time: f64) -> Result<Cylinder> {
        Cylinder::new(center, top_time, self.radius(), self.length())
    }
}

/// Builds the intrinsically scaled cylinder of radius `omega^{(p-2)/p} rho`
/// and length `rho^p`.
pub fn intrinsic_cylinder(rho: f64, omega: f64, p: f64, center: Vec<f64>, top_time: f64) -> Result<Cylinder> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho must be positive (got {rho})")));
    }
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Range(format!("p must lie in (1, 2] (got {p})")));
    }
    if omega == 0.0 {
        return Err(Error::DegenerateOscillation);
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidInput(format!("omega must be positive (got {omega})")));
    }
    IntrinsicCylinderSpec { rho, omega, p }.to_cylinder(center, top_time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        assert!(validate_params(&ProblemParams::doubly_nonlinear(2, 1.5, 1.2)).is_ok());
        let err = validate_params(&ProblemParams::doubly_nonlinear(1, 1.5, 1.0)).unwrap_err();
        assert!(err.to_string().contains("m > 1"), "{err}");
        let err = validate_params(&ProblemParams::p_laplacian(1, 2.0)).unwrap_err();
        assert!(err.to_string().contains("p < 2"), "{err}");
    }

    #[test]
    fn subcritical_rejected() {
        // N=3, p=1.2: need m+p > 2.6.
        let err = validate_params(&ProblemParams::doubly_nonlinear(3, 1.2, 1.3)).unwrap_err();
        assert!(err.to_string().contains("supercritical"), "{err}");
        assert!(validate_params(&ProblemParams::doubly_nonlinear(3, 1.2, 1.5)).is_ok());
    }

    #[test]
    fn intrinsic_cylinder_examples() {
        let q = intrinsic_cylinder(0.5, 1.0, 1.5, vec![0.0], 1.0).unwrap();
        assert_relative_eq!(q.radius, 0.5);
        assert_relative_eq!(q.length, 0.5f64.powf(1.5), max_relative = 1e-15);
        assert_relative_eq!(q.length, 0.353_553_390_593_273_8, max_relative = 1e-14);

        let q = intrinsic_cylinder(0.5, 0.25, 1.5, vec![0.0], 1.0).unwrap();
        // 0.25^{-1/3} = 4^{1/3}
        assert_relative_eq!(q.radius, 0.5 * 4f64.cbrt(), max_relative = 1e-14);
        assert_relative_eq!(q.radius, 0.793_700_525_984_1, max_relative = 1e-12);

        let q = intrinsic_cylinder(0.5, 0.25, 2.0, vec![0.0], 1.0).unwrap();
        assert_relative_eq!(q.radius, 0.5);
        assert_relative_eq!(q.length, 0.25);
    }

    #[test]
    fn unit_ball_measures() {
        assert_eq!(unit_ball_measure(1), 2.0);
        assert_eq!(unit_ball_measure(2), std::f64::consts::PI);
        assert_relative_eq!(
            unit_ball_measure(3),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn zero_oscillation_is_terminal() {
        assert_eq!(
            intrinsic_cylinder(0.5, 0.0, 1.5, vec![0.0], 1.0),
            Err(Error::DegenerateOscillation)
        );
    }

    #[test]
    fn grid_indexing_round_trip() {
        let g = Grid::new(2, 8, 1.0, 0.1, 3, BoundaryCondition::Periodic).unwrap();
        let mut m = [0usize; 3];
        for idx in 0..g.nodes_per_slice() {
            g.multi_index(idx, &mut m);
            assert_eq!(g.flat_index(&m[..2]), idx);
        }
        assert_eq!(g.slice_index(0.2), Some(2));
        assert_eq!(g.slice_index(0.25), None);
        assert!(Grid::new(1, 4, 1.0, 0.1, 3, BoundaryCondition::Periodic).is_err());
    }

    #[test]
    fn dnl_field_rejects_negative_values() {
        let g = Grid::new(1, 8, 1.0, 0.1, 0, BoundaryCondition::Periodic).unwrap();
        let params = ProblemParams::doubly_nonlinear(1, 1.5, 1.3);
        assert!(SpaceTimeField::from_fn(g.clone(), params.clone(), "x", |x, _| x[0]).is_err());
        assert!(SpaceTimeField::from_fn(g, params, "x", |x, _| x[0].abs()).is_ok());
    }

    fn direct_range_check(n: usize, p: f64, m: f64, dnl: bool) -> bool {
        let p_ok = 1.0 < p && p < 2.0;
        if !dnl {
            return p_ok;
        }
        p_ok && m > 1.0 && 2.0 < m + p && m + p < 3.0 && m + p > 3.0 - p / n as f64
    }

    proptest! {
        #[test]
        fn validate_matches_direct_inequalities(
            p in 0.0f64..3.0, m in 0.0f64..3.0, n in 1usize..=3, dnl in any::<bool>()
        ) {
            let params = if dnl {
                ProblemParams::doubly_nonlinear(n, p, m)
            } else {
                ProblemParams::p_laplacian(n, p)
            };
            prop_assert_eq!(validate_params(&params).is_ok(), direct_range_check(n, p, m, dnl));
        }

        #[test]
        fn intrinsic_cylinder_scales(rho in 0.01f64..2.0, omega in 0.01f64..10.0, p in 1.01f64..2.0) {
            let a = intrinsic_cylinder(rho, omega, p, vec![0.0], 0.0).unwrap();
            let b = intrinsic_cylinder(2.0 * rho, omega, p, vec![0.0], 0.0).unwrap();
            prop_assert!((b.radius - 2.0 * a.radius).abs() <= 1e-12 * b.radius);
            prop_assert!((b.length - 2f64.powf(p) * a.length).abs() <= 1e-12 * b.length);
        }

        #[test]
        fn c0_nonincreasing_in_omega(w1 in 0.01f64..10.0, w2 in 0.01f64..10.0, p in 1.01f64..2.0) {
            let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            let c_lo = IntrinsicCylinderSpec { rho: 1.0, omega: lo, p }.c0();
            let c_hi = IntrinsicCylinderSpec { rho: 1.0, omega: hi, p }.c0();
            prop_assert!(c_hi <= c_lo);
        }

        #[test]
        fn containment_monotone(
            cx in -1.0f64..1.0, top in 0.0f64..2.0, r in 0.01f64..1.0, l in 0.01f64..1.0,
            shrink_r in 0.0f64..1.0, shrink_l in 0.0f64..1.0
        ) {
            let g = Grid::new(1, 16, 1.0, 0.1, 10, BoundaryCondition::Periodic).unwrap();
            let q = Cylinder::new(vec![cx], top, r, l).unwrap();
            let smaller = Cylinder::new(vec![cx], top, r * (1.0 - 0.99 * shrink_r), l * (1.0 - 0.99 * shrink_l)).unwrap();
            if q.in_domain(&g) {
                prop_assert!(smaller.in_domain(&g));
            }
        }
    }
}
