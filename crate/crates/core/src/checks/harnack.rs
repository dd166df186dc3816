use super::CheckReport;
use crate::error::{Error, Result};
use crate::geometry::{ball_integral, ball_nodes, require_ball_in_domain, slice_at};
use crate::model::SpaceTimeField;

struct WindowIntegrals {
    sup_inner: f64,
    inf_outer: f64,
    slices: usize,
    margin: f64,
}

/// `sup_k int_{B_rho} u` and `inf_k int_{B_2rho} u` over the closed window.
fn window_integrals(
    field: &SpaceTimeField,
    center: &[f64],
    rho: f64,
    margin: f64,
    t_start: f64,
    t_end: f64,
) -> Result<WindowIntegrals> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho must be positive (got {rho})")));
    }
    require_ball_in_domain(&field.grid, center, margin * rho)?;
    let k0 = slice_at(&field.grid, t_start)?;
    let k1 = slice_at(&field.grid, t_end)?;
    if k1 < k0 {
        return Err(Error::InvalidInput(format!(
            "window end {t_end} precedes start {t_start}"
        )));
    }
    let outer = ball_nodes(&field.grid, center, 2.0 * rho);
    let (mut sup_inner, mut inf_outer) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in k0..=k1 {
        let s = field.slice(k);
        if let Some(&i) = outer.iter().find(|&&i| s[i] < 0.0) {
            return Err(Error::Precondition(format!(
                "field is negative ({}) at node {i}, slice {k}",
                s[i]
            )));
        }
        sup_inner = sup_inner.max(ball_integral(field, k, center, rho));
        inf_outer = inf_outer.min(ball_integral(field, k, center, 2.0 * rho));
    }
    Ok(WindowIntegrals {
        sup_inner,
        inf_outer,
        slices: k1 - k0 + 1,
        margin: super::interior_margin(&field.grid, center, margin * rho),
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn harnack_report(name: &str, w: WindowIntegrals, remainder: f64, gamma_cap: f64) -> CheckReport {
    let gamma_min = ratio(w.sup_inner, w.inf_outer + remainder);
    CheckReport::new(
        name,
        true,
        gamma_min <= gamma_cap,
        [
            ("sup_int_inner", w.sup_inner),
            ("inf_int_outer", w.inf_outer),
            ("remainder", remainder),
            ("gamma_min", gamma_min),
            ("gamma_cap", gamma_cap),
            ("window_slices", w.slices as f64),
            ("interior_margin", w.margin),
        ],
    )
}

/// Integral Harnack check for the p-Laplacian on `B_rho(center) x [t0, t1]`.
///
/// Reports the smallest `gamma` for which
/// `sup int_{B_rho} u <= gamma (inf int_{B_2rho} u + R)` holds with
/// `R = ((t1 - t0) / rho^{N(p-2)+p})^{1/(2-p)}`. `B_4rho` must lie in the
/// domain.
pub fn check_integral_harnack_p(
    field: &SpaceTimeField,
    center: &[f64],
    rho: f64,
    t0_time: f64,
    t1_time: f64,
    gamma_cap: f64,
) -> Result<CheckReport> {
    let p = field.params.p;
    let n = field.grid.dim_n as f64;
    let w = window_integrals(field, center, rho, 4.0, t0_time, t1_time)?;
    let remainder = ((t1_time - t0_time) / rho.powf(n * (p - 2.0) + p)).powf(1.0 / (2.0 - p));
    Ok(harnack_report("integral_harnack_p", w, remainder, gamma_cap))
}

/// Integral Harnack check for the doubly nonlinear equation on
/// `B_rho(center) x [s, T]`, with remainder `((T - s)/rho^p)^{1/(3-m-p)} rho^N`.
pub fn check_integral_harnack_dnl(
    field: &SpaceTimeField,
    center: &[f64],
    rho: f64,
    s_time: f64,
    t_time: f64,
    gamma_cap: f64,
) -> Result<CheckReport> {
    let (p, m) = (field.params.p, field.params.m);
    let n = field.grid.dim_n as i32;
    let w = window_integrals(field, center, rho, 2.0, s_time, t_time)?;
    let remainder = ((t_time - s_time) / rho.powf(p)).powf(1.0 / (3.0 - m - p)) * rho.powi(n);
    Ok(harnack_report("integral_harnack_dnl", w, remainder, gamma_cap))
}
