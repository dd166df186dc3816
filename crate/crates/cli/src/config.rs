//! Plain-text `key=value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use holderlab::model::{validate_params, BoundaryCondition, DirichletData, Equation, Grid, ProblemParams};
use holderlab::solver::{Linearization, SolverConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Solve,
    CheckHarnack,
    CheckExpansion,
    CheckCriticalMass,
    FitHolder,
    ConstantsLedger,
    FullCertify,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Solve => "solve",
            Scenario::CheckHarnack => "check_harnack",
            Scenario::CheckExpansion => "check_expansion",
            Scenario::CheckCriticalMass => "check_critical_mass",
            Scenario::FitHolder => "fit_holder",
            Scenario::ConstantsLedger => "constants_ledger",
            Scenario::FullCertify => "full_certify",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "solve" => Scenario::Solve,
            "check_harnack" | "check-harnack" => Scenario::CheckHarnack,
            "check_expansion" | "check-expansion" => Scenario::CheckExpansion,
            "check_critical_mass" | "check-critical-mass" => Scenario::CheckCriticalMass,
            "fit_holder" | "fit-holder" => Scenario::FitHolder,
            "constants_ledger" | "constants" => Scenario::ConstantsLedger,
            "full_certify" | "certify" => Scenario::FullCertify,
            _ => return None,
        })
    }

    pub fn needs_solve(self) -> bool {
        self != Scenario::ConstantsLedger
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Constant(f64),
    /// `1 + (x_1 + L)/(2L)`, raised to `1/beta` for the doubly nonlinear
    /// equation so that it is stationary.
    LinearRamp,
    /// `exp(-8 |x|^2 / L^2)`.
    Bump,
    /// Source solution evaluated at the given start time.
    Barenblatt(f64),
    /// Independent uniform values in `[lo, hi)` from the run seed.
    RandomNodal(f64, f64),
    FromSnapshot(PathBuf),
}

impl InitialData {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return None,
            None => (s, None),
        };
        let nums = |a: &str| -> Option<Vec<f64>> { a.split(',').map(|v| v.trim().parse::<f64>().ok()).collect() };
        Some(match (name, args) {
            ("constant", Some(a)) => match nums(a)?[..] {
                [c] => InitialData::Constant(c),
                _ => return None,
            },
            ("linear_ramp", None) => InitialData::LinearRamp,
            ("bump", None) => InitialData::Bump,
            ("barenblatt", Some(a)) => match nums(a)?[..] {
                [t] => InitialData::Barenblatt(t),
                _ => return None,
            },
            ("random_nodal", Some(a)) => match nums(a)?[..] {
                [lo, hi] => InitialData::RandomNodal(lo, hi),
                _ => return None,
            },
            ("from_snapshot", Some(a)) if !a.trim().is_empty() => InitialData::FromSnapshot(PathBuf::from(a.trim())),
            _ => return None,
        })
    }

    pub fn emit(&self) -> String {
        match self {
            InitialData::Constant(c) => format!("constant({c})"),
            InitialData::LinearRamp => "linear_ramp".into(),
            InitialData::Bump => "bump".into(),
            InitialData::Barenblatt(t) => format!("barenblatt({t})"),
            InitialData::RandomNodal(lo, hi) => format!("random_nodal({lo},{hi})"),
            InitialData::FromSnapshot(p) => format!("from_snapshot({})", p.display()),
        }
    }
}

/// Everything a run needs. Optional fields fall back to values derived from
/// the grid or the measured data at run time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub output_dir: PathBuf,

    pub equation: Equation,
    pub n: usize,
    pub p: f64,
    pub m: f64,
    pub c0_struct: f64,
    pub c1_struct: f64,

    pub cells: usize,
    pub domain_half_width: f64,
    pub dt: f64,
    pub steps: usize,
    pub boundary: BoundaryCondition,

    /// Defaults to the grid spacing.
    pub flux_regularization_eps: Option<f64>,
    pub positivity_floor: Option<f64>,
    pub nonlinear_tol: f64,
    pub max_newton_iters: usize,
    pub linearization: Linearization,

    pub initial_data: InitialData,
    /// Total mass of the source solution for `barenblatt(..)` data.
    pub mass: f64,

    pub center: Vec<f64>,
    pub rho: f64,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub level_m: Option<f64>,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    pub nu: f64,
    pub m_expand: u32,
    pub theta: Option<f64>,
    pub gamma_cap: f64,
    pub gamma_harnack: f64,
    pub eps_star: f64,
    pub eta_dnl: f64,
    pub expand_rho: f64,
    pub weak_tol: f64,

    pub a_iter: Option<f64>,
    pub b_iter: f64,
    pub gamma_iter: f64,
    pub eps_star_iter: f64,
    pub n_max: usize,
    pub radii: Vec<f64>,
}

impl RunConfig {
    /// Defaults for everything except the required keys.
    pub fn new(scenario: Scenario, equation: Equation, n: usize, p: f64, cells: usize, dt: f64, steps: usize) -> Self {
        RunConfig {
            scenario,
            seed: 0,
            output_dir: PathBuf::from("out"),
            equation,
            n,
            p,
            m: 1.0,
            c0_struct: 1.0,
            c1_struct: 1.0,
            cells,
            domain_half_width: 1.0,
            dt,
            steps,
            boundary: BoundaryCondition::Dirichlet(DirichletData::FrozenInitial),
            flux_regularization_eps: None,
            positivity_floor: None,
            nonlinear_tol: 1e-10,
            max_newton_iters: 200,
            linearization: Linearization::Picard,
            initial_data: InitialData::Bump,
            mass: 1.0,
            center: vec![0.0; n],
            rho: 0.1,
            t_start: None,
            t_end: None,
            level_m: None,
            alpha: holderlab::checks::DEFAULT_ALPHA,
            eps: 0.5,
            delta: 0.5,
            nu: holderlab::checks::DEFAULT_NU,
            m_expand: holderlab::checks::DEFAULT_M_EXPAND,
            theta: None,
            gamma_cap: f64::INFINITY,
            gamma_harnack: 1.0,
            eps_star: 0.5,
            eta_dnl: 0.5,
            expand_rho: 0.25,
            weak_tol: 1e-2,
            a_iter: None,
            b_iter: 2.0,
            gamma_iter: 1.0,
            eps_star_iter: 0.5,
            n_max: 8,
            radii: Vec::new(),
        }
    }

    pub fn params(&self) -> ProblemParams {
        let mut params = match self.equation {
            Equation::PLaplacian => ProblemParams::p_laplacian(self.n, self.p),
            Equation::DoublyNonlinear => ProblemParams::doubly_nonlinear(self.n, self.p, self.m),
        };
        params.c0_struct = self.c0_struct;
        params.c1_struct = self.c1_struct;
        params
    }

    pub fn grid(&self) -> holderlab::Result<Grid> {
        Grid::new(
            self.n,
            self.cells,
            self.domain_half_width,
            self.dt,
            self.steps,
            self.boundary,
        )
    }

    pub fn solver_config(&self) -> holderlab::Result<SolverConfig> {
        let grid = self.grid()?;
        let mut cfg = SolverConfig::for_grid(&grid, &self.params());
        if let Some(e) = self.flux_regularization_eps {
            cfg.flux_regularization_eps = e;
        }
        if let Some(f) = self.positivity_floor {
            cfg.positivity_floor = f;
        }
        cfg.nonlinear_tol = self.nonlinear_tol;
        cfg.max_newton_iters = self.max_newton_iters;
        cfg.linearization = self.linearization;
        Ok(cfg)
    }

    /// `t_start`, or the slice halfway through the run.
    pub fn window_start(&self) -> f64 {
        self.t_start.unwrap_or((self.steps / 2) as f64 * self.dt)
    }

    /// `t_end`, or the final time.
    pub fn window_end(&self) -> f64 {
        self.t_end.unwrap_or(self.steps as f64 * self.dt)
    }

    /// `radii`, or `rho 2^{-k/2}` for `k = 0..6`.
    pub fn fit_radii(&self) -> Vec<f64> {
        if self.radii.is_empty() {
            (0..6).map(|k| self.rho * 0.5f64.powf(0.5 * k as f64)).collect()
        } else {
            self.radii.clone()
        }
    }

    pub fn validate(&self) -> holderlab::Result<()> {
        use holderlab::Error;
        validate_params(&self.params())?;
        self.solver_config()?.validate()?;
        if self.center.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "center has {} coordinates, expected {}",
                self.center.len(),
                self.n
            )));
        }
        if !(self.rho > 0.0) {
            return Err(Error::InvalidInput("rho must be positive".into()));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("eps", self.eps),
            ("delta", self.delta),
            ("nu", self.nu),
            ("eta_dnl", self.eta_dnl),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!("{name} must lie in (0,1) (got {v})")));
            }
        }
        if self.m_expand == 0 {
            return Err(Error::InvalidInput("m_expand must be at least 1".into()));
        }
        if let InitialData::RandomNodal(lo, hi) = self.initial_data {
            if !(lo < hi) {
                return Err(Error::InvalidInput("random_nodal needs lo < hi".into()));
            }
        }
        match (self.scenario, self.equation) {
            (Scenario::CheckCriticalMass, Equation::PLaplacian) => Err(Error::InvalidInput(
                "check_critical_mass applies to the doubly nonlinear equation".into(),
            )),
            _ => Ok(()),
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> CliResult<T> {
    value.parse::<T>().map_err(|_| CliError::Parse {
        line,
        message: format!("cannot parse `{value}` for `{key}`"),
    })
}

fn parse_list(line: usize, key: &str, value: &str) -> CliResult<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse_value(line, key, v.trim())).collect()
}

fn emit_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_equation(s: &str) -> Option<Equation> {
    match s {
        "p_laplacian" | "plap" => Some(Equation::PLaplacian),
        "doubly_nonlinear" | "dnl" => Some(Equation::DoublyNonlinear),
        _ => None,
    }
}

fn equation_name(e: Equation) -> &'static str {
    match e {
        Equation::PLaplacian => "p_laplacian",
        Equation::DoublyNonlinear => "doubly_nonlinear",
    }
}

/// Parses and validates a configuration document.
///
/// Required keys: `scenario`, `equation`, `n` (also accepted as `N`), `p`,
/// `cells`, `dt`, `steps`. Unknown and repeated keys are rejected.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    parse_config_with(text, None)
}

/// Like [`parse_config`], with `scenario` taking precedence over the
/// document's own `scenario` key (which then becomes optional).
pub fn parse_config_with(text: &str, scenario: Option<Scenario>) -> CliResult<RunConfig> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(CliError::Parse {
                line,
                message: format!("expected key=value, found `{content}`"),
            });
        };
        let key = match k.trim() {
            "N" => "n".to_string(),
            other => other.to_string(),
        };
        if pairs.iter().any(|(_, existing, _)| *existing == key) {
            return Err(CliError::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        pairs.push((line, key, v.trim().to_string()));
    }
    let find = |key: &str| pairs.iter().find(|(_, k, _)| k == key);
    let required = |key: &'static str| {
        find(key).ok_or(CliError::Parse {
            line: 0,
            message: format!("missing required key `{key}`"),
        })
    };

    let scenario = match scenario {
        Some(s) => s,
        None => {
            let (l, _, v) = required("scenario")?;
            Scenario::parse(v).ok_or_else(|| CliError::Parse {
                line: *l,
                message: format!("unknown scenario `{v}`"),
            })?
        }
    };
    let (l, _, v) = required("equation")?;
    let equation = parse_equation(v).ok_or_else(|| CliError::Parse {
        line: *l,
        message: format!("unknown equation `{v}`"),
    })?;
    let (l, k, v) = required("n")?;
    let n: usize = parse_value(*l, k, v)?;
    let (l, k, v) = required("p")?;
    let p: f64 = parse_value(*l, k, v)?;
    let (l, k, v) = required("cells")?;
    let cells: usize = parse_value(*l, k, v)?;
    let (l, k, v) = required("dt")?;
    let dt: f64 = parse_value(*l, k, v)?;
    let (l, k, v) = required("steps")?;
    let steps: usize = parse_value(*l, k, v)?;

    let mut cfg = RunConfig::new(scenario, equation, n, p, cells, dt, steps);
    for (line, key, value) in &pairs {
        let (line, key, value) = (*line, key.as_str(), value.as_str());
        let bad = |what: &str| CliError::Parse {
            line,
            message: format!("unknown {what} `{value}`"),
        };
        match key {
            "scenario" | "equation" | "n" | "p" | "cells" | "dt" | "steps" => {}
            "seed" => cfg.seed = parse_value(line, key, value)?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "m" => cfg.m = parse_value(line, key, value)?,
            "c0_struct" => cfg.c0_struct = parse_value(line, key, value)?,
            "c1_struct" => cfg.c1_struct = parse_value(line, key, value)?,
            "domain_half_width" => cfg.domain_half_width = parse_value(line, key, value)?,
            "boundary" => {
                cfg.boundary = match value {
                    "dirichlet" => BoundaryCondition::Dirichlet(DirichletData::FrozenInitial),
                    "periodic" => BoundaryCondition::Periodic,
                    _ => return Err(bad("boundary")),
                }
            }
            "flux_regularization_eps" => cfg.flux_regularization_eps = Some(parse_value(line, key, value)?),
            "positivity_floor" => cfg.positivity_floor = Some(parse_value(line, key, value)?),
            "nonlinear_tol" => cfg.nonlinear_tol = parse_value(line, key, value)?,
            "max_newton_iters" => cfg.max_newton_iters = parse_value(line, key, value)?,
            "linearization" => {
                cfg.linearization = match value {
                    "newton" => Linearization::Newton,
                    "picard" => Linearization::Picard,
                    _ => return Err(bad("linearization")),
                }
            }
            "initial_data" => cfg.initial_data = InitialData::parse(value).ok_or_else(|| bad("initial_data"))?,
            "mass" => cfg.mass = parse_value(line, key, value)?,
            "center" => cfg.center = parse_list(line, key, value)?,
            "rho" => cfg.rho = parse_value(line, key, value)?,
            "t_start" => cfg.t_start = Some(parse_value(line, key, value)?),
            "t_end" => cfg.t_end = Some(parse_value(line, key, value)?),
            "level_m" => cfg.level_m = Some(parse_value(line, key, value)?),
            "alpha" => cfg.alpha = parse_value(line, key, value)?,
            "eps" => cfg.eps = parse_value(line, key, value)?,
            "delta" => cfg.delta = parse_value(line, key, value)?,
            "nu" => cfg.nu = parse_value(line, key, value)?,
            "m_expand" => cfg.m_expand = parse_value(line, key, value)?,
            "theta" => cfg.theta = Some(parse_value(line, key, value)?),
            "gamma_cap" => cfg.gamma_cap = parse_value(line, key, value)?,
            "gamma_harnack" => cfg.gamma_harnack = parse_value(line, key, value)?,
            "eps_star" => cfg.eps_star = parse_value(line, key, value)?,
            "eta_dnl" => cfg.eta_dnl = parse_value(line, key, value)?,
            "expand_rho" => cfg.expand_rho = parse_value(line, key, value)?,
            "weak_tol" => cfg.weak_tol = parse_value(line, key, value)?,
            "a_iter" => cfg.a_iter = Some(parse_value(line, key, value)?),
            "b_iter" => cfg.b_iter = parse_value(line, key, value)?,
            "gamma_iter" => cfg.gamma_iter = parse_value(line, key, value)?,
            "eps_star_iter" => cfg.eps_star_iter = parse_value(line, key, value)?,
            "n_max" => cfg.n_max = parse_value(line, key, value)?,
            "radii" => cfg.radii = parse_list(line, key, value)?,
            _ => {
                return Err(CliError::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
    }
    if find("center").is_none() {
        cfg.center = vec![0.0; cfg.n];
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes every field, one `key=value` per line, in a fixed order.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    put("scenario", cfg.scenario.name().into());
    put("seed", cfg.seed.to_string());
    put("output_dir", cfg.output_dir.display().to_string());
    put("equation", equation_name(cfg.equation).into());
    put("n", cfg.n.to_string());
    put("p", cfg.p.to_string());
    put("m", cfg.m.to_string());
    put("c0_struct", cfg.c0_struct.to_string());
    put("c1_struct", cfg.c1_struct.to_string());
    put("cells", cfg.cells.to_string());
    put("domain_half_width", cfg.domain_half_width.to_string());
    put("dt", cfg.dt.to_string());
    put("steps", cfg.steps.to_string());
    put(
        "boundary",
        match cfg.boundary {
            BoundaryCondition::Dirichlet(_) => "dirichlet",
            BoundaryCondition::Periodic => "periodic",
        }
        .into(),
    );
    if let Some(v) = cfg.flux_regularization_eps {
        put("flux_regularization_eps", v.to_string());
    }
    if let Some(v) = cfg.positivity_floor {
        put("positivity_floor", v.to_string());
    }
    put("nonlinear_tol", cfg.nonlinear_tol.to_string());
    put("max_newton_iters", cfg.max_newton_iters.to_string());
    put(
        "linearization",
        match cfg.linearization {
            Linearization::Newton => "newton",
            Linearization::Picard => "picard",
        }
        .into(),
    );
    put("initial_data", cfg.initial_data.emit());
    put("mass", cfg.mass.to_string());
    put("center", emit_list(&cfg.center));
    put("rho", cfg.rho.to_string());
    if let Some(v) = cfg.t_start {
        put("t_start", v.to_string());
    }
    if let Some(v) = cfg.t_end {
        put("t_end", v.to_string());
    }
    if let Some(v) = cfg.level_m {
        put("level_m", v.to_string());
    }
    put("alpha", cfg.alpha.to_string());
    put("eps", cfg.eps.to_string());
    put("delta", cfg.delta.to_string());
    put("nu", cfg.nu.to_string());
    put("m_expand", cfg.m_expand.to_string());
    if let Some(v) = cfg.theta {
        put("theta", v.to_string());
    }
    put("gamma_cap", cfg.gamma_cap.to_string());
    put("gamma_harnack", cfg.gamma_harnack.to_string());
    put("eps_star", cfg.eps_star.to_string());
    put("eta_dnl", cfg.eta_dnl.to_string());
    put("expand_rho", cfg.expand_rho.to_string());
    put("weak_tol", cfg.weak_tol.to_string());
    if let Some(v) = cfg.a_iter {
        put("a_iter", v.to_string());
    }
    put("b_iter", cfg.b_iter.to_string());
    put("gamma_iter", cfg.gamma_iter.to_string());
    put("eps_star_iter", cfg.eps_star_iter.to_string());
    put("n_max", cfg.n_max.to_string());
    if !cfg.radii.is_empty() {
        put("radii", emit_list(&cfg.radii));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "\
# minimal run
equation=p_laplacian
p=1.5
N=1
cells=128
dt=1e-3
steps=100
scenario=solve
seed=42
";

    #[test]
    fn minimal_document() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.scenario, Scenario::Solve);
        assert_eq!((cfg.n, cfg.cells, cfg.steps, cfg.seed), (1, 128, 100, 42));
        assert_eq!(cfg.p, 1.5);
        assert_eq!(cfg.center, vec![0.0]);
    }

    #[test]
    fn out_of_range_p_is_a_validation_error() {
        let doc = MINIMAL.replace("p=1.5", "p=2.5");
        assert!(matches!(parse_config(&doc), Err(CliError::Validation(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let doc = format!("{MINIMAL}bogus=1\n");
        match parse_config(&doc) {
            Err(CliError::Parse { line, message }) => {
                assert_eq!(line, 10);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        let doc = MINIMAL.replace("cells=128", "cells=many");
        assert!(matches!(parse_config(&doc), Err(CliError::Parse { line: 5, .. })));
        let doc = MINIMAL.replace("dt=1e-3", "dt 1e-3");
        assert!(matches!(parse_config(&doc), Err(CliError::Parse { line: 6, .. })));
        let doc = MINIMAL.replace("scenario=solve", "");
        assert!(matches!(parse_config(&doc), Err(CliError::Parse { .. })));
        let doc = format!("{MINIMAL}seed=1\n");
        assert!(matches!(parse_config(&doc), Err(CliError::Parse { line: 10, .. })));
    }

    #[test]
    fn initial_data_forms() {
        for s in [
            "constant(3)",
            "linear_ramp",
            "bump",
            "barenblatt(0.5)",
            "random_nodal(0,1)",
            "from_snapshot(a/b.spf)",
        ] {
            let d = InitialData::parse(s).unwrap();
            assert_eq!(InitialData::parse(&d.emit()), Some(d));
        }
        assert_eq!(InitialData::parse("constant(1,2)"), None);
        assert_eq!(InitialData::parse("wave"), None);
    }

    #[test]
    fn critical_mass_needs_dnl() {
        let doc = MINIMAL.replace("scenario=solve", "scenario=check_critical_mass");
        assert!(matches!(parse_config(&doc), Err(CliError::Validation(_))));
        let doc = doc.replace("equation=p_laplacian", "equation=doubly_nonlinear\nm=1.3");
        assert!(parse_config(&doc).is_ok());
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(
            p in 1.05f64..1.95,
            cells in 8usize..400,
            dt in 1e-5f64..1e-1,
            steps in 1usize..3000,
            seed in any::<u64>(),
            rho in 0.01f64..0.5,
            dnl in any::<bool>(),
            nu in 0.01f64..0.99,
            lo in -1.0f64..0.0,
            radii in proptest::collection::vec(0.001f64..1.0, 0..5),
        ) {
            let eq = if dnl { Equation::DoublyNonlinear } else { Equation::PLaplacian };
            let mut cfg = RunConfig::new(Scenario::FullCertify, eq, 1, p, cells, dt, steps);
            cfg.m = if dnl { 1.0 + 0.5 * (2.0 - p) } else { 1.0 };
            cfg.seed = seed;
            cfg.rho = rho;
            cfg.nu = nu;
            cfg.radii = radii;
            cfg.t_start = Some(dt * 3.0);
            cfg.initial_data = InitialData::RandomNodal(lo, 1.0);
            cfg.flux_regularization_eps = Some(0.1);
            prop_assume!(cfg.validate().is_ok());
            let text = emit_config(&cfg);
            prop_assert_eq!(parse_config(&text).unwrap(), cfg);
        }
    }
}
