use super::CheckReport;
use crate::error::{Error, Result};
use crate::geometry::{
    ball_nodes, level_set_fraction, min_max, require_ball_in_domain, slice_at, slice_level_fraction,
    slice_level_fraction_at_least, LevelDirection,
};
use crate::model::{Cylinder, SpaceTimeField, TIME_SLACK};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive (got {v})")))
    }
}

fn in_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must lie in (0,1) (got {v})")))
    }
}

fn min_over(field: &SpaceTimeField, nodes: &[usize], k: usize) -> f64 {
    let s = field.slice(k);
    nodes.iter().map(|&i| s[i]).fold(f64::INFINITY, f64::min)
}

/// Expansion of positivity for the p-Laplacian.
///
/// Hypothesis: `|[u(., t) > M] cap B_rho(y)| > alpha |B_rho|` on every slice
/// of `[s - eps M^{2-p} rho^p, s]`. Conclusion: the largest `sigma` and
/// `eps_star <= eps/2` with `u >= sigma M` on `B_{m rho}(y)` for
/// `t in (s - eps_star M^{2-p} rho^p, s]`; the window is grown backwards
/// from `s` while the running minimum stays positive.
#[allow(clippy::too_many_arguments)]
pub fn check_expansion_positivity_p(
    field: &SpaceTimeField,
    y: &[f64],
    rho: f64,
    s_time: f64,
    level_m: f64,
    alpha: f64,
    eps: f64,
    m_expand: u32,
) -> Result<CheckReport> {
    positive("rho", rho)?;
    positive("M", level_m)?;
    in_unit("alpha", alpha)?;
    in_unit("eps", eps)?;
    if m_expand == 0 {
        return Err(Error::InvalidInput("m_expand must be at least 1".into()));
    }
    let grid = &field.grid;
    let p = field.params.p;
    let mf = f64::from(m_expand);
    require_ball_in_domain(grid, y, 8.0 * mf * rho)?;
    let ks = slice_at(grid, s_time)?;
    let scale = level_m.powf(2.0 - p) * rho.powf(p);
    let start = s_time - eps * scale;
    if start < -TIME_SLACK * grid.dt {
        return Err(Error::Domain(format!("hypothesis window starts at {start} < 0")));
    }

    let mut min_fraction = f64::INFINITY;
    let mut hyp_slices = 0usize;
    for k in (0..=ks).rev() {
        if grid.time(k) < start - TIME_SLACK * grid.dt {
            break;
        }
        min_fraction = min_fraction.min(slice_level_fraction(field, y, rho, grid.time(k), level_m)?);
        hyp_slices += 1;
    }
    let hypothesis = min_fraction > alpha;

    let nodes = ball_nodes(grid, y, mf * rho);
    if nodes.is_empty() {
        return Err(Error::EmptyBall);
    }
    let half = 0.5 * eps;
    let mut running = f64::INFINITY;
    let mut eps_hat = half;
    let mut concl_slices = 0usize;
    for k in (0..=ks).rev() {
        let t = grid.time(k);
        if t <= s_time - half * scale + TIME_SLACK * grid.dt {
            break;
        }
        let lo = min_over(field, &nodes, k);
        if lo.min(running) <= 0.0 {
            eps_hat = (s_time - t) / scale;
            break;
        }
        running = running.min(lo);
        concl_slices += 1;
    }
    let sigma = if concl_slices == 0 { 0.0 } else { running / level_m };

    Ok(CheckReport::new(
        "expansion_positivity_p",
        hypothesis,
        sigma > 0.0,
        [
            ("M", level_m),
            ("alpha", alpha),
            ("eps", eps),
            ("m_expand", mf),
            ("min_fraction_above_M", min_fraction),
            ("hypothesis_slices", hyp_slices as f64),
            ("sigma_hat", sigma),
            ("eps_star_hat", eps_hat),
            ("conclusion_slices", concl_slices as f64),
            ("interior_margin", super::interior_margin(grid, y, 8.0 * mf * rho)),
        ],
    ))
}

/// Expansion of positivity for the doubly nonlinear equation.
///
/// Hypothesis: `|B_rho(x0) cap [u(., s) >= M]| >= alpha |B_rho|`.
/// Conclusion: `eta = min u / M` over `B_2rho(x0)` and the open window
/// `(s + (1 - eps) delta M^{3-m-p} rho^p, s + delta M^{3-m-p} rho^p)`.
#[allow(clippy::too_many_arguments)]
pub fn check_expansion_positivity_dnl(
    field: &SpaceTimeField,
    x0: &[f64],
    rho: f64,
    s_time: f64,
    level_m: f64,
    alpha: f64,
    delta: f64,
    eps: f64,
) -> Result<CheckReport> {
    positive("rho", rho)?;
    positive("M", level_m)?;
    in_unit("alpha", alpha)?;
    in_unit("delta", delta)?;
    in_unit("eps", eps)?;
    let grid = &field.grid;
    let (p, m) = (field.params.p, field.params.m);
    require_ball_in_domain(grid, x0, 16.0 * rho)?;
    let ks = slice_at(grid, s_time)?;
    let span = delta * level_m.powf(3.0 - m - p) * rho.powf(p);
    let end = s_time + span;
    if end > grid.final_time() + TIME_SLACK * grid.dt {
        return Err(Error::Domain(format!("window ends at {end} after the final time")));
    }
    let fraction = slice_level_fraction_at_least(field, x0, rho, s_time, level_m)?;
    let hypothesis = fraction >= alpha;

    let lo_t = s_time + (1.0 - eps) * span;
    let nodes = ball_nodes(grid, x0, 2.0 * rho);
    if nodes.is_empty() {
        return Err(Error::EmptyBall);
    }
    let slack = TIME_SLACK * grid.dt;
    let mut running = f64::INFINITY;
    let mut count = 0usize;
    for k in ks..grid.n_slices() {
        let t = grid.time(k);
        if t > lo_t + slack && t < end - slack {
            running = running.min(min_over(field, &nodes, k));
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyCylinder);
    }
    let eta = running / level_m;
    Ok(CheckReport::new(
        "expansion_positivity_dnl",
        hypothesis,
        eta > 0.0,
        [
            ("M", level_m),
            ("alpha", alpha),
            ("delta", delta),
            ("eps", eps),
            ("fraction_at_least_M", fraction),
            ("eta_hat", eta),
            ("window_start", lo_t),
            ("window_end", end),
            ("conclusion_slices", count as f64),
            ("interior_margin", super::interior_margin(grid, x0, 16.0 * rho)),
        ],
    ))
}

/// Critical-mass (De Giorgi) check on `Q_rho(theta) = B_rho x (top - theta rho^p, top]`.
///
/// Requires `sup_Q u <= 2M`. Hypothesis: the fraction of `Q` where `u > M`
/// is at most `nu / (theta M^{m+p-3})`. Conclusion:
/// `u <= (3/2)^{1/beta} M` on `Q_{rho/2}(theta)`.
#[allow(clippy::too_many_arguments)]
pub fn check_critical_mass_dnl(
    field: &SpaceTimeField,
    center: &[f64],
    top_time: f64,
    rho: f64,
    theta: f64,
    level_m: f64,
    nu: f64,
) -> Result<CheckReport> {
    positive("rho", rho)?;
    positive("theta", theta)?;
    positive("M", level_m)?;
    in_unit("nu", nu)?;
    let (p, m) = (field.params.p, field.params.m);
    let beta = crate::model::beta(p, m);
    let q = Cylinder::new(center.to_vec(), top_time, rho, theta * rho.powf(p))?;
    let (_, sup) = min_max(field, &q)?;
    if sup > 2.0 * level_m {
        return Err(Error::Precondition(format!(
            "sup over the cylinder is {sup} > 2M = {}",
            2.0 * level_m
        )));
    }
    let fraction = level_set_fraction(field, &q, level_m, LevelDirection::Above)?;
    let threshold = nu / (theta * level_m.powf(m + p - 3.0));
    let half = Cylinder::new(center.to_vec(), top_time, 0.5 * rho, theta * (0.5 * rho).powf(p))?;
    let (_, sup_half) = min_max(field, &half)?;
    let bound = 1.5f64.powf(1.0 / beta) * level_m;
    Ok(CheckReport::new(
        "critical_mass_dnl",
        fraction <= threshold,
        sup_half <= bound,
        [
            ("M", level_m),
            ("nu", nu),
            ("theta", theta),
            ("beta", beta),
            ("sup_cylinder", sup),
            ("fraction_above_M", fraction),
            ("fraction_threshold", threshold),
            ("sup_half_cylinder", sup_half),
            ("bound", bound),
        ],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    MostlyAbove,
    MostlyBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlternativeMode {
    /// Slice at the cylinder top: `|[v > k] cap B| > nu |B|`.
    Slice,
    /// Whole cylinder: `|[v >= k] cap Q| >= nu |Q|`.
    SpaceTime,
}

/// Which branch of the measure alternative a normalized field falls in.
pub fn classify_alternative(
    field: &SpaceTimeField,
    q: &Cylinder,
    threshold: f64,
    nu: f64,
    mode: AlternativeMode,
) -> Result<Alternative> {
    let above = match mode {
        AlternativeMode::Slice => match slice_level_fraction(field, &q.center, q.radius, q.top_time, threshold) {
            Err(Error::EmptyBall) => return Err(Error::EmptyCylinder),
            r => r? > nu,
        },
        AlternativeMode::SpaceTime => level_set_fraction(field, q, threshold, LevelDirection::AtLeast)? >= nu,
    };
    Ok(if above {
        Alternative::MostlyAbove
    } else {
        Alternative::MostlyBelow
    })
}
