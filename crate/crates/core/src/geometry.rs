//! Measurements on discrete fields: oscillation, level-set fractions, ball
//! integrals, the normalizing changes of variables and intrinsic distances.
//!
//! Essential suprema become discrete maxima over the grid points of a set,
//! and measures become node counts.

use crate::error::{Error, Result};
use crate::model::{ball_contains, Cylinder, Grid, IntrinsicCylinderSpec, SpaceTimeField, TIME_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelDirection {
    /// `u > k`
    Above,
    /// `u <= k`
    AtOrBelow,
    /// `u >= k`
    AtLeast,
}

impl LevelDirection {
    pub fn test(self, v: f64, k: f64) -> bool {
        match self {
            LevelDirection::Above => v > k,
            LevelDirection::AtOrBelow => v <= k,
            LevelDirection::AtLeast => v >= k,
        }
    }
}

/// Slice indices whose time lies in the cylinder's window.
pub fn cylinder_slices(grid: &Grid, q: &Cylinder) -> Vec<usize> {
    (0..grid.n_slices())
        .filter(|&k| q.contains_time(grid.time(k), grid.dt))
        .collect()
}

/// Spatial nodes strictly inside `B_radius(center)`, in increasing order.
pub fn ball_nodes(grid: &Grid, center: &[f64], radius: f64) -> Vec<usize> {
    let n = grid.cells_per_axis;
    let h = grid.spacing();
    let l = grid.domain_half_width;
    let dim = grid.dim_n;
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for d in 0..dim {
        let a = ((center[d] - radius + l) / h - 1.0).floor().max(0.0) as usize;
        let b = ((center[d] + radius + l) / h + 1.0).ceil().max(0.0) as usize;
        lo[d] = a.min(n - 1);
        hi[d] = b.min(n - 1);
    }
    let mut out = Vec::new();
    let mut multi = lo;
    let mut x = [0.0; 3];
    'outer: loop {
        for d in 0..dim {
            x[d] = grid.axis_coord(multi[d]);
        }
        if ball_contains(center, radius, &x[..dim]) {
            out.push(grid.flat_index(&multi[..dim]));
        }
        // Odometer over the bounding box, last axis fastest.
        let mut d = dim;
        loop {
            if d == 0 {
                break 'outer;
            }
            d -= 1;
            if multi[d] < hi[d] {
                multi[d] += 1;
                multi[d + 1..dim].copy_from_slice(&lo[d + 1..dim]);
                break;
            }
        }
    }
    out
}

pub(crate) fn require_in_domain(grid: &Grid, q: &Cylinder) -> Result<()> {
    if q.in_domain(grid) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "cylinder centre {:?}, radius {}, window ({}, {}]",
            q.center,
            q.radius,
            q.top_time - q.length,
            q.top_time
        )))
    }
}

/// Calls `f(value)` for every grid point of the cylinder; returns the count.
fn visit(field: &SpaceTimeField, q: &Cylinder, mut f: impl FnMut(f64)) -> usize {
    let slices = cylinder_slices(&field.grid, q);
    let nodes = ball_nodes(&field.grid, &q.center, q.radius);
    for &k in &slices {
        let s = field.slice(k);
        for &i in &nodes {
            f(s[i]);
        }
    }
    slices.len() * nodes.len()
}

/// Number of grid points in the cylinder.
pub fn point_count(grid: &Grid, q: &Cylinder) -> usize {
    cylinder_slices(grid, q).len() * ball_nodes(grid, &q.center, q.radius).len()
}

/// `(min, max)` of the field over the grid points of `q`.
pub fn min_max(field: &SpaceTimeField, q: &Cylinder) -> Result<(f64, f64)> {
    require_in_domain(&field.grid, q)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let count = visit(field, q, |v| {
        lo = lo.min(v);
        hi = hi.max(v);
    });
    if count == 0 {
        return Err(Error::EmptyCylinder);
    }
    Ok((lo, hi))
}

/// Discrete essential oscillation: max minus min over the points of `q`.
pub fn ess_osc(field: &SpaceTimeField, q: &Cylinder) -> Result<f64> {
    let (lo, hi) = min_max(field, q)?;
    Ok(hi - lo)
}

/// Fraction of the points of `q` on the chosen side of the level `k`.
pub fn level_set_fraction(field: &SpaceTimeField, q: &Cylinder, k: f64, direction: LevelDirection) -> Result<f64> {
    require_in_domain(&field.grid, q)?;
    let mut hits = 0usize;
    let count = visit(field, q, |v| {
        if direction.test(v, k) {
            hits += 1;
        }
    });
    if count == 0 {
        return Err(Error::EmptyCylinder);
    }
    Ok(hits as f64 / count as f64)
}

pub(crate) fn require_ball_in_domain(grid: &Grid, center: &[f64], radius: f64) -> Result<()> {
    if center.len() == grid.dim_n && center.iter().all(|c| c.abs() + radius <= grid.domain_half_width) {
        Ok(())
    } else {
        Err(Error::Domain(format!("ball B_{radius}({center:?}) leaves the domain")))
    }
}

pub(crate) fn slice_at(grid: &Grid, t: f64) -> Result<usize> {
    grid.slice_index(t).ok_or(Error::NotOnSlice(t))
}

/// Fraction of the ball's nodes with `u(., t) > k`.
pub fn slice_level_fraction(field: &SpaceTimeField, center: &[f64], radius: f64, t: f64, k: f64) -> Result<f64> {
    slice_fraction_by(field, center, radius, t, |v| v > k)
}

/// Fraction of the ball's nodes with `u(., t) >= k`.
pub fn slice_level_fraction_at_least(
    field: &SpaceTimeField,
    center: &[f64],
    radius: f64,
    t: f64,
    k: f64,
) -> Result<f64> {
    slice_fraction_by(field, center, radius, t, |v| v >= k)
}

fn slice_fraction_by(
    field: &SpaceTimeField,
    center: &[f64],
    radius: f64,
    t: f64,
    pred: impl Fn(f64) -> bool,
) -> Result<f64> {
    require_ball_in_domain(&field.grid, center, radius)?;
    let k = slice_at(&field.grid, t)?;
    let nodes = ball_nodes(&field.grid, center, radius);
    if nodes.is_empty() {
        return Err(Error::EmptyBall);
    }
    let s = field.slice(k);
    let hits = nodes.iter().filter(|&&i| pred(s[i])).count();
    Ok(hits as f64 / nodes.len() as f64)
}

/// `int_{B_radius(center)} u(x, t_k) dx` by node counting.
pub fn ball_integral(field: &SpaceTimeField, k: usize, center: &[f64], radius: f64) -> f64 {
    let s = field.slice(k);
    ball_nodes(&field.grid, center, radius)
        .iter()
        .map(|&i| s[i])
        .sum::<f64>()
        * field.grid.cell_volume()
}

/// Node-counting measure of a ball.
pub fn ball_measure(grid: &Grid, center: &[f64], radius: f64) -> f64 {
    ball_nodes(grid, center, radius).len() as f64 * grid.cell_volume()
}

/// Bookkeeping for a field resampled onto the unit cylinder.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCylinderMap {
    pub center: Vec<f64>,
    pub top_time: f64,
    /// Spatial stretch `c0 rho`.
    pub space_scale: f64,
    /// Time stretch `rho^p`.
    pub time_scale: f64,
    pub mu_minus: f64,
    pub omega: f64,
    /// Original node feeding each unit-grid node.
    pub node_map: Vec<usize>,
    /// Original slice feeding each unit-grid slice.
    pub slice_map: Vec<usize>,
}

impl UnitCylinderMap {
    /// Maps normalized values back: `u = mu_minus + omega v`, paired with
    /// the original `(slice, node)` each value came from.
    pub fn denormalize(&self, v: &SpaceTimeField) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(v.values().len());
        for (kk, &k) in self.slice_map.iter().enumerate() {
            let s = v.slice(kk);
            for (j, &i) in self.node_map.iter().enumerate() {
                out.push((k, i, self.mu_minus + self.omega * s[j]));
            }
        }
        out
    }
}

/// Change of variables `z = (x - y)/(c0 rho)`, `tau = (t - s)/rho^p`,
/// `v = (u - mu_minus)/omega`, resampled by nearest-node restriction onto a
/// unit grid whose spacing is the image of the original spacing.
///
/// The unit grid covers `|z_d| <= extent` (at least `B_1`) and its slices
/// cover `tau in [-1, 0]` as closely as the original slices allow; unit
/// slice `j` sits at unit time `j dt'`, so the top of the unit cylinder is
/// the final unit time.
pub fn normalize_p_laplacian(
    field: &SpaceTimeField,
    spec: &IntrinsicCylinderSpec,
    center: &[f64],
    top_time: f64,
    mu_minus: f64,
    extent: f64,
) -> Result<(SpaceTimeField, UnitCylinderMap)> {
    if spec.omega == 0.0 {
        return Err(Error::DegenerateOscillation);
    }
    if !(spec.omega > 0.0 && spec.rho > 0.0 && extent >= 1.0) {
        return Err(Error::InvalidInput(
            "normalization needs omega > 0, rho > 0 and extent >= 1".into(),
        ));
    }
    let grid = &field.grid;
    let space_scale = spec.radius();
    let time_scale = spec.length();
    require_ball_in_domain(grid, center, space_scale * extent)?;
    let k_top = slice_at(grid, top_time)?;
    let back = ((time_scale / grid.dt) * (1.0 + TIME_SLACK)).floor() as usize;
    if back == 0 || back > k_top {
        return Err(Error::Domain(format!(
            "time window of length {time_scale} before t={top_time} does not fit the slices"
        )));
    }
    let h = grid.spacing();
    let h_unit = h / space_scale;
    let cells = (2.0 * (extent / h_unit).ceil() + 1.0).max(9.0) as usize;
    let unit_grid = Grid::new(
        grid.dim_n,
        cells,
        0.5 * cells as f64 * h_unit,
        grid.dt / time_scale,
        back,
        grid.bc,
    )?;
    let n = grid.cells_per_axis;
    let nearest = |x: f64| -> usize {
        let i = ((x + grid.domain_half_width) / h - 0.5).round();
        i.clamp(0.0, (n - 1) as f64) as usize
    };
    let dim = grid.dim_n;
    let mut node_map = Vec::with_capacity(unit_grid.nodes_per_slice());
    let mut z = [0.0; 3];
    let mut multi = [0usize; 3];
    for j in 0..unit_grid.nodes_per_slice() {
        unit_grid.node_coord(j, &mut z);
        for d in 0..dim {
            multi[d] = nearest(center[d] + space_scale * z[d]);
        }
        node_map.push(grid.flat_index(&multi[..dim]));
    }
    let slice_map: Vec<usize> = (0..=back).map(|j| k_top - back + j).collect();
    let mut values = Vec::with_capacity(slice_map.len() * node_map.len());
    for &k in &slice_map {
        let s = field.slice(k);
        values.extend(node_map.iter().map(|&i| (s[i] - mu_minus) / spec.omega));
    }
    let mut params = field.params.clone();
    params.equation = crate::model::Equation::PLaplacian;
    let v = SpaceTimeField::new(unit_grid, params, format!("{} normalized", field.label), values)?;
    Ok((
        v,
        UnitCylinderMap {
            center: center.to_vec(),
            top_time,
            space_scale,
            time_scale,
            mu_minus,
            omega: spec.omega,
            node_map,
            slice_map,
        },
    ))
}

/// `v = u / sup`, on the same grid.
pub fn normalize_dnl(field: &SpaceTimeField, sup: f64) -> Result<SpaceTimeField> {
    if sup == 0.0 {
        return Err(Error::ZeroSup);
    }
    if !(sup > 0.0 && sup.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "normalizing sup must be positive (got {sup})"
        )));
    }
    let values = field.values().iter().map(|v| v / sup).collect();
    field.with_values(format!("{} normalized", field.label), values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimePoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: Vec<f64>, t: f64) -> Self {
        SpaceTimePoint { x, t }
    }
}

fn weighted_dist(k: &[SpaceTimePoint], gamma: &[SpaceTimePoint], weight: f64, p: f64) -> f64 {
    let mut best = f64::INFINITY;
    for a in k {
        for b in gamma {
            let dx = a.x.iter().zip(&b.x).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            let d = weight * dx + (a.t - b.t).abs().powf(1.0 / p);
            best = best.min(d);
        }
    }
    best
}

/// `inf ||u||^{(2-p)/p} |x - y| + |t - s|^{1/p}` over pairs.
pub fn p_dist(k: &[SpaceTimePoint], gamma: &[SpaceTimePoint], sup_norm_u: f64, p: f64) -> Result<f64> {
    if k.is_empty() || gamma.is_empty() {
        return Err(Error::InvalidInput("point sets must be non-empty".into()));
    }
    Ok(weighted_dist(k, gamma, sup_norm_u.powf((2.0 - p) / p), p))
}

/// `inf ||u||^{(3-m-p)/p} |x - y| + |t - s|^{1/p}` over pairs.
pub fn mp_dist(k: &[SpaceTimePoint], gamma: &[SpaceTimePoint], sup_norm_u: f64, p: f64, m: f64) -> Result<f64> {
    if k.is_empty() || gamma.is_empty() {
        return Err(Error::InvalidInput("point sets must be non-empty".into()));
    }
    Ok(weighted_dist(k, gamma, sup_norm_u.powf((3.0 - m - p) / p), p))
}
