//! Source-type (Barenblatt) solution of the fast-diffusion p-Laplacian,
//! generated from its radial self-similar ODE.
//!
//! With `u(x, t) = t^{-k} Phi(|x| t^{-k/N})` and `k = N / (p - N(2-p))`, the
//! profile satisfies `|Phi'|^{p-1} = (k/N) eta Phi` with `Phi' <= 0`. The
//! amplitude `Phi(0)` is found by bisection so that the profile carries the
//! requested mass. Only this module's own RK4 integrator is used here; no
//! PDE solver code is involved.

use crate::error::{Error, Result};
use crate::model::{unit_ball_measure, Grid};

/// Uniform steps per similarity length on the core `[0, CORE_SPAN]`.
const CORE_STEPS_PER_UNIT: usize = 400;
const CORE_SPAN: f64 = 4.0;
/// Steps per unit of `ln(eta)` on the tail.
const TAIL_STEPS_PER_LOG: usize = 400;
const TAIL_DECADES: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarProfile {
    pub p: f64,
    pub dim_n: usize,
    /// Self-similar decay rate `k`.
    pub alpha_ss: f64,
    pub total_mass: f64,
    /// Shooting parameter `Phi(0)` that reproduces `total_mass`.
    pub amplitude: f64,
    eta: Vec<f64>,
    phi: Vec<f64>,
}

/// `k = N / (p - N(2-p))`; errors unless `2N/(N+1) < p < 2`.
pub fn self_similar_rate(p: f64, dim_n: usize) -> Result<f64> {
    let n = dim_n as f64;
    let denom = p - n * (2.0 - p);
    if !(p < 2.0) || !(denom > 0.0) {
        return Err(Error::Range(format!(
            "source solution needs 2N/(N+1) < p < 2 (N={dim_n}, p={p})"
        )));
    }
    Ok(n / denom)
}

impl SelfSimilarProfile {
    /// Shoots on `Phi(0)` until the profile mass matches `total_mass` to
    /// relative precision `1e-13`.
    pub fn new(p: f64, dim_n: usize, total_mass: f64) -> Result<Self> {
        let k = self_similar_rate(p, dim_n)?;
        if !(total_mass > 0.0 && total_mass.is_finite()) {
            return Err(Error::InvalidInput("total mass must be positive".into()));
        }
        let mass_of = |a: f64| integrate_profile(p, dim_n, k, a).2;
        let (mut lo, mut hi) = (1.0, 1.0);
        while mass_of(lo) > total_mass {
            lo *= 0.5;
        }
        while mass_of(hi) < total_mass {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass_of(mid) < total_mass {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        let amplitude = 0.5 * (lo + hi);
        let (eta, phi, _) = integrate_profile(p, dim_n, k, amplitude);
        Ok(SelfSimilarProfile {
            p,
            dim_n,
            alpha_ss: k,
            total_mass,
            amplitude,
            eta,
            phi,
        })
    }

    fn slope(&self, eta: f64, phi: f64) -> f64 {
        profile_slope(self.p, self.dim_n, self.alpha_ss, eta, phi)
    }

    /// `Phi(eta)` for `eta >= 0`, by cubic Hermite interpolation on the table
    /// and a power-law tail `eta^{-p/(2-p)}` beyond it.
    pub fn profile(&self, eta: f64) -> f64 {
        let eta = eta.abs();
        let last = self.eta.len() - 1;
        if eta >= self.eta[last] {
            let q = self.p / (2.0 - self.p);
            return self.phi[last] * (eta / self.eta[last]).powf(-q);
        }
        let j = self.eta.partition_point(|&e| e <= eta).saturating_sub(1).min(last - 1);
        let (x0, x1) = (self.eta[j], self.eta[j + 1]);
        let (y0, y1) = (self.phi[j], self.phi[j + 1]);
        let (d0, d1) = (self.slope(x0, y0), self.slope(x1, y1));
        let hstep = x1 - x0;
        let s = (eta - x0) / hstep;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * y0 + h10 * hstep * d0 + h01 * y1 + h11 * hstep * d1
    }

    /// `u(x, t) = t^{-k} Phi(|x| t^{-k/N})`.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let k = self.alpha_ss;
        t.powf(-k) * self.profile(r * t.powf(-k / self.dim_n as f64))
    }

    pub fn table(&self) -> (&[f64], &[f64]) {
        (&self.eta, &self.phi)
    }
}

/// Evaluates the source solution at time `t` on every node of `grid`.
pub fn barenblatt_reference(profile: &SelfSimilarProfile, t: f64, grid: &Grid) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("time must be positive (got {t})")));
    }
    if grid.dim_n != profile.dim_n {
        return Err(Error::InvalidInput("profile and grid dimensions differ".into()));
    }
    let mut x = [0.0; 3];
    Ok((0..grid.nodes_per_slice())
        .map(|i| {
            grid.node_coord(i, &mut x);
            profile.eval(&x[..grid.dim_n], t)
        })
        .collect())
}

fn profile_slope(p: f64, dim_n: usize, k: f64, eta: f64, phi: f64) -> f64 {
    -((k / dim_n as f64) * eta * phi.max(0.0)).powf(1.0 / (p - 1.0))
}

/// Integrates the profile ODE from `Phi(0) = amplitude`; returns the table
/// and the total mass (Simpson on the core, Simpson in `ln eta` on the
/// tail, plus the analytic power-law remainder).
fn integrate_profile(p: f64, dim_n: usize, k: f64, amplitude: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let n = dim_n as f64;
    let f = |eta: f64, phi: f64| profile_slope(p, dim_n, k, eta, phi);
    // Natural width of a profile with this amplitude.
    let width = amplitude.powf((p - 2.0) / p);
    let core_steps = (CORE_SPAN * CORE_STEPS_PER_UNIT as f64) as usize;
    let d_eta = CORE_SPAN * width / core_steps as f64;
    let mut eta = Vec::with_capacity(core_steps + 4000);
    let mut phi = Vec::with_capacity(core_steps + 4000);
    eta.push(0.0);
    phi.push(amplitude);
    let (mut e, mut y) = (0.0, amplitude);
    for i in 0..core_steps {
        let k1 = f(e, y);
        let k2 = f(e + 0.5 * d_eta, y + 0.5 * d_eta * k1);
        let k3 = f(e + 0.5 * d_eta, y + 0.5 * d_eta * k2);
        let k4 = f(e + d_eta, y + d_eta * k3);
        y += d_eta / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        e = (i + 1) as f64 * d_eta;
        eta.push(e);
        phi.push(y);
    }
    let weight = |e: f64| n * unit_ball_measure(dim_n) * e.powi(dim_n as i32 - 1);
    let mut mass = simpson(&eta, &phi, |e, v| weight(e) * v);

    // Tail in s = ln(eta): dPhi/ds = eta * Phi'.
    let tail_steps = (TAIL_DECADES * std::f64::consts::LN_10 * TAIL_STEPS_PER_LOG as f64) as usize;
    let ds = 1.0 / TAIL_STEPS_PER_LOG as f64;
    let s0 = e.ln();
    let g = |s: f64, v: f64| {
        let et = s.exp();
        et * f(et, v)
    };
    let tail_start = eta.len() - 1;
    let mut s = s0;
    for i in 0..tail_steps {
        let k1 = g(s, y);
        let k2 = g(s + 0.5 * ds, y + 0.5 * ds * k1);
        let k3 = g(s + 0.5 * ds, y + 0.5 * ds * k2);
        let k4 = g(s + ds, y + ds * k3);
        y += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s = s0 + (i + 1) as f64 * ds;
        eta.push(s.exp());
        phi.push(y);
    }
    let logs: Vec<f64> = eta[tail_start..].iter().map(|e| e.ln()).collect();
    mass += simpson(&logs, &phi[tail_start..], |ls, v| weight(ls.exp()) * ls.exp() * v);
    let q = p / (2.0 - p);
    let (e_max, phi_max) = (*eta.last().unwrap(), *phi.last().unwrap());
    mass += n * unit_ball_measure(dim_n) * phi_max * e_max.powi(dim_n as i32) / (q - n);
    (eta, phi, mass)
}

/// Composite Simpson over uniformly spaced abscissae (odd point count),
/// falling back to a trapezoid for a trailing interval.
fn simpson(x: &[f64], y: &[f64], integrand: impl Fn(f64, f64) -> f64) -> f64 {
    let n = x.len();
    let vals: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| integrand(a, b)).collect();
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h = x[i + 1] - x[i];
        total += h / 3.0 * (vals[i] + 4.0 * vals[i + 1] + vals[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        total += 0.5 * (x[i + 1] - x[i]) * (vals[i] + vals[i + 1]);
    }
    total
}
