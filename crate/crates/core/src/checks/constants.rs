use crate::error::{Error, Result};
use crate::model::unit_ball_measure;

pub const DEFAULT_NU: f64 = 0.1;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_M_EXPAND: u32 = 1;

/// Every constant of the oscillation argument. Closed-form ledgers fill
/// their part; measured and user-chosen values are added by callers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProofConstants {
    pub gamma_harnack: Option<f64>,
    pub t0: Option<f64>,
    pub eta_small: Option<f64>,
    /// `|t0| / eta^{2-p}` as literally defined.
    pub eps_paper: Option<f64>,
    /// The simplified closed form `2^p / 2^{(N+2)/(2-p)}`.
    pub eps_paper_claimed: Option<f64>,
    /// `eps_paper / eps_paper_claimed`.
    pub eps_paper_ratio: Option<f64>,
    pub eps_star: Option<f64>,
    pub eps1: Option<f64>,
    pub level_count_l: Option<f64>,
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
    pub rho0: Option<f64>,
    pub eta1: Option<f64>,
    pub eta_star: Option<f64>,
    pub eps0: Option<f64>,
    pub w_n: Option<f64>,
    pub m_expand: Option<u32>,
    pub sigma: Option<f64>,
    pub alpha_measure: Option<f64>,
    pub delta_dnl: Option<f64>,
    pub eps_dnl: Option<f64>,
    pub eta_dnl: Option<f64>,
    pub a_iter: Option<f64>,
    pub b_iter: Option<f64>,
    pub gamma_iter: Option<f64>,
    pub eps_star_iter: Option<f64>,
}

impl ProofConstants {
    /// Present constants as `(name, value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let all = [
            ("gamma_harnack", self.gamma_harnack),
            ("t0", self.t0),
            ("eta_small", self.eta_small),
            ("eps_paper", self.eps_paper),
            ("eps_paper_claimed", self.eps_paper_claimed),
            ("eps_paper_ratio", self.eps_paper_ratio),
            ("eps_star", self.eps_star),
            ("eps1", self.eps1),
            ("level_count_l", self.level_count_l),
            ("beta", self.beta),
            ("theta", self.theta),
            ("nu", self.nu),
            ("rho0", self.rho0),
            ("eta1", self.eta1),
            ("eta_star", self.eta_star),
            ("eps0", self.eps0),
            ("w_n", self.w_n),
            ("m_expand", self.m_expand.map(f64::from)),
            ("sigma", self.sigma),
            ("alpha_measure", self.alpha_measure),
            ("delta_dnl", self.delta_dnl),
            ("eps_dnl", self.eps_dnl),
            ("eta_dnl", self.eta_dnl),
            ("a_iter", self.a_iter),
            ("b_iter", self.b_iter),
            ("gamma_iter", self.gamma_iter),
            ("eps_star_iter", self.eps_star_iter),
        ];
        all.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }

    /// Checks `t0 < 0` and that the constants living in `(0, 1)` do.
    pub fn validate(&self) -> Result<()> {
        if let Some(t0) = self.t0 {
            if !(t0 < 0.0) {
                return Err(Error::Range(format!("t0 must be negative (got {t0})")));
            }
        }
        let unit = [
            ("nu", self.nu),
            ("sigma", self.sigma),
            ("alpha_measure", self.alpha_measure),
            ("delta_dnl", self.delta_dnl),
            ("eps_dnl", self.eps_dnl),
            ("eta_dnl", self.eta_dnl),
            ("a_iter", self.a_iter),
        ];
        for (name, v) in unit {
            if let Some(v) = v {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::Range(format!("{name} must lie in (0,1) (got {v})")));
                }
            }
        }
        Ok(())
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Range(format!("{name} must lie in (0,1) (got {v})")))
    }
}

/// `theta = (2M)^{3-m-p}`.
pub fn theta(level_m: f64, m: f64, p: f64) -> f64 {
    (2.0 * level_m).powf(3.0 - m - p)
}

/// Constants of the p-Laplacian argument for a Harnack constant `gamma`
/// and a chosen `eps_star`.
pub fn p_constants_ledger(dim_n: usize, p: f64, gamma: f64, eps_star: f64) -> Result<ProofConstants> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Range(format!("p must lie in (1,2) (got {p})")));
    }
    if !(gamma >= 1.0) {
        return Err(Error::Range(format!("gamma must be at least 1 (got {gamma})")));
    }
    if !(eps_star > 0.0) {
        return Err(Error::Range(format!("eps_star must be positive (got {eps_star})")));
    }
    let n = dim_n as f64;
    let q = p / (2.0 - p);
    let t0 = -(1.0 / (gamma * 2f64.powf(3.0 + q))).powf(2.0 - p);
    let eta = 2f64.powf(q) / 2f64.powf(n + 2.0) * t0.abs().powf(1.0 / (2.0 - p));
    let eps_literal = t0.abs() / eta.powf(2.0 - p);
    let eps_claimed = 2f64.powf(p) / 2f64.powf((n + 2.0) / (2.0 - p));
    let eps1 = eps_star * eps_claimed;
    let l = (1.0 / (eps1 * t0.abs())).log2() / p;
    let c = ProofConstants {
        gamma_harnack: Some(gamma),
        t0: Some(t0),
        eta_small: Some(eta),
        eps_paper: Some(eps_literal),
        eps_paper_claimed: Some(eps_claimed),
        eps_paper_ratio: Some(eps_literal / eps_claimed),
        eps_star: Some(eps_star),
        eps1: Some(eps1),
        level_count_l: Some(l),
        w_n: Some(unit_ball_measure(dim_n)),
        ..Default::default()
    };
    c.validate()?;
    Ok(c)
}

/// Constants of the doubly nonlinear argument at the level `M = 1/2`.
pub fn dnl_constants_ledger(dim_n: usize, p: f64, m: f64, gamma: f64, nu: f64, eta_dnl: f64) -> Result<ProofConstants> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Range(format!("p must lie in (1,2) (got {p})")));
    }
    if !(m + p < 3.0 && m + p > 2.0) {
        return Err(Error::Range(format!("need 2 < m+p < 3 (got {})", m + p)));
    }
    let n = dim_n as f64;
    let s = 3.0 - m - p;
    let denom = p - n * s;
    if !(denom > 0.0) {
        return Err(Error::Range(format!(
            "subcritical exponents: p - N(3-m-p) = {denom} must be positive"
        )));
    }
    if !(gamma >= 1.0) {
        return Err(Error::Range(format!("gamma must be at least 1 (got {gamma})")));
    }
    open_unit("nu", nu)?;
    open_unit("eta_dnl", eta_dnl)?;
    let w_n = unit_ball_measure(dim_n);
    let base = nu * w_n / (4.0 * gamma);
    let rho0 = base.powf(s / denom);
    let eta1 = base.powf(p / denom);
    let eta_star = eta_dnl * eta1;
    let c = ProofConstants {
        gamma_harnack: Some(gamma),
        beta: Some(crate::model::beta(p, m)),
        theta: Some(theta(0.5, m, p)),
        nu: Some(nu),
        rho0: Some(rho0),
        eta1: Some(eta1),
        eta_star: Some(eta_star),
        eps0: Some(eta_star / 2.0),
        w_n: Some(w_n),
        eta_dnl: Some(eta_dnl),
        ..Default::default()
    };
    c.validate()?;
    Ok(c)
}
