//! Reduction-of-oscillation traces and empirical Hölder exponents.

use crate::error::{Error, Result};
use crate::geometry::{ess_osc, point_count};
use crate::model::{Cylinder, SpaceTimeField};

/// Cylinders with fewer grid points than this are not measured.
pub const MIN_POINTS: usize = 8;

/// Parameters of the recursion `omega_{n+1} = max(a omega_n, Gamma rho_n^{eps*})`,
/// `rho_{n+1} = rho_n / b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationParams {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub eps_star: f64,
}

impl Default for IterationParams {
    fn default() -> Self {
        IterationParams {
            a: 0.9,
            b: 2.0,
            gamma: 1.0,
            eps_star: 0.5,
        }
    }
}

impl IterationParams {
    /// Defaults with `a = 1 - sigma eta` from measured expansion constants.
    pub fn from_expansion(sigma: f64, eta: f64) -> Self {
        IterationParams {
            a: 1.0 - sigma * eta,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::InvalidInput(format!("a must lie in (0,1) (got {})", self.a)));
        }
        if !(self.b > 1.0) {
            return Err(Error::InvalidInput(format!("b must exceed 1 (got {})", self.b)));
        }
        if !(self.gamma >= 0.0 && self.eps_star > 0.0) {
            return Err(Error::InvalidInput(
                "Gamma must be non-negative and eps* positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationTrace {
    pub params: IterationParams,
    pub rho_seq: Vec<f64>,
    /// Recursive bound `omega_n`.
    pub omega_seq: Vec<f64>,
    /// Fresh `ess osc` over `Q_n`.
    pub measured_osc_seq: Vec<f64>,
    pub cylinders: Vec<Cylinder>,
    pub all_nested: bool,
    pub all_bounded: bool,
}

impl OscillationTrace {
    pub fn len(&self) -> usize {
        self.rho_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_seq.is_empty()
    }
}

fn intrinsic(field: &SpaceTimeField, center: &[f64], top: f64, rho: f64, omega: f64) -> Result<Cylinder> {
    let c = omega.powf(field.params.intrinsic_exponent());
    let p = field.params.p;
    Cylinder::new(center.to_vec(), top, c * rho, rho.powf(p))
}

fn usable(field: &SpaceTimeField, q: &Cylinder) -> bool {
    q.in_domain(&field.grid) && point_count(&field.grid, q) >= MIN_POINTS
}

/// Runs the recursion on `Q_n = Q(rho_n^p, c_n rho_n)`, `c_n = omega_n^{(p-2)/p}`
/// (the doubly nonlinear exponent `(m+p-3)/p` for that equation), all with
/// top at `(center, top_time)`. Stops early once a cylinder leaves the domain
/// or holds fewer than [`MIN_POINTS`] points.
pub fn build_trace(
    field: &SpaceTimeField,
    center: &[f64],
    top_time: f64,
    rho0: f64,
    omega0: f64,
    params: IterationParams,
    n_max: usize,
) -> Result<OscillationTrace> {
    params.validate()?;
    if !(rho0 > 0.0) {
        return Err(Error::InvalidInput(format!("rho0 must be positive (got {rho0})")));
    }
    if !(omega0 > 0.0) {
        return Err(Error::DegenerateOscillation);
    }
    let q0 = intrinsic(field, center, top_time, rho0, omega0)?;
    if !q0.in_domain(&field.grid) {
        return Err(Error::Domain("starting cylinder leaves the grid".into()));
    }
    let osc0 = ess_osc(field, &q0)?;
    if osc0 > omega0 {
        return Err(Error::InitialOscillationViolated {
            measured: osc0,
            bound: omega0,
        });
    }
    let mut trace = OscillationTrace {
        params,
        rho_seq: Vec::new(),
        omega_seq: Vec::new(),
        measured_osc_seq: Vec::new(),
        cylinders: Vec::new(),
        all_nested: true,
        all_bounded: true,
    };
    let (mut rho, mut omega) = (rho0, omega0);
    for n in 0..n_max {
        let q = if n == 0 {
            q0.clone()
        } else {
            intrinsic(field, center, top_time, rho, omega)?
        };
        if !usable(field, &q) {
            break;
        }
        let osc = ess_osc(field, &q)?;
        if let Some(prev) = trace.cylinders.last() {
            if q.radius > prev.radius || q.length > prev.length {
                trace.all_nested = false;
            }
        }
        trace.all_bounded &= osc <= omega;
        trace.rho_seq.push(rho);
        trace.omega_seq.push(omega);
        trace.measured_osc_seq.push(osc);
        trace.cylinders.push(q);
        omega = (params.a * omega).max(params.gamma * rho.powf(params.eps_star));
        rho /= params.b;
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub alpha: f64,
    pub r_squared: f64,
    /// Oscillation on the standard cylinder `Q(rho0^p, rho0)`, which fixes `c0`.
    pub omega: f64,
    pub radii: Vec<f64>,
    pub oscillations: Vec<f64>,
}

/// Least-squares slope of `log osc Q(r^p, c0 r)` against `log(r / rho0)`.
///
/// `c0 = omega^{(p-2)/p}` with `omega` measured on `Q(rho0^p, rho0)`. Radii
/// whose cylinder leaves the domain or holds fewer than [`MIN_POINTS`] points
/// are dropped; at least four must remain.
pub fn fit_holder_exponent(
    field: &SpaceTimeField,
    center: &[f64],
    top_time: f64,
    rho0: f64,
    radii: &[f64],
) -> Result<HolderFit> {
    if radii.windows(2).any(|w| !(w[1] < w[0])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    let p = field.params.p;
    let standard = Cylinder::new(center.to_vec(), top_time, rho0, rho0.powf(p))?;
    let omega = ess_osc(field, &standard)?;
    if omega == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let mut used = Vec::new();
    let mut oscs = Vec::new();
    for &r in radii {
        let q = intrinsic(field, center, top_time, r, omega)?;
        if !usable(field, &q) {
            continue;
        }
        let o = ess_osc(field, &q)?;
        if o == 0.0 {
            return Err(Error::DegenerateFit);
        }
        used.push(r);
        oscs.push(o);
    }
    if used.len() < 4 {
        return Err(Error::InsufficientRadii {
            needed: 4,
            got: used.len(),
        });
    }
    let xs: Vec<f64> = used.iter().map(|r| (r / rho0).ln()).collect();
    let ys: Vec<f64> = oscs.iter().map(|o| o.ln()).collect();
    let (alpha, r_squared) = linear_fit(&xs, &ys);
    Ok(HolderFit {
        alpha,
        r_squared,
        omega,
        radii: used,
        oscillations: oscs,
    })
}

/// Slope and coefficient of determination of an ordinary least-squares line.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, r2)
}
