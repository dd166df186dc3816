//! Scenario orchestration. Artifacts are assembled in memory and written at
//! the end so that every file carries the complete set of constants.

use std::path::PathBuf;

use holderlab::checks::{
    check_critical_mass_dnl, check_expansion_positivity_dnl, check_expansion_positivity_p, check_integral_harnack_dnl,
    check_integral_harnack_p, classify_alternative, dnl_constants_ledger, p_constants_ledger, theta, Alternative,
    AlternativeMode, CheckReport, ProofConstants,
};
use holderlab::geometry::{ball_nodes, min_max, normalize_dnl, normalize_p_laplacian};
use holderlab::model::{Cylinder, Equation, Grid, IntrinsicCylinderSpec, SpaceTimeField};
use holderlab::oracles::{weak_residual, Bump, TestFunction, WeakFormOptions};
use holderlab::oscillation::{build_trace, fit_holder_exponent, IterationParams, OscillationTrace};
use holderlab::solver::{solve, SolverConfig};
use holderlab::Error;
use log::info;

use crate::config::{RunConfig, Scenario};
use crate::error::{CliResult, StageExt};
use crate::initial::initial_slice;
use crate::io::write_atomic;
use crate::report::{render_constants, render_reports, render_summary, render_trace, ArtifactHeader};
use crate::snapshot::render_snapshot;

pub const SNAPSHOT_FILE: &str = "solution.spf";
pub const REPORTS_FILE: &str = "reports.csv";
pub const CONSTANTS_FILE: &str = "constants.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRACE_FILE: &str = "trace.csv";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub reports: Vec<CheckReport>,
    pub summary: Vec<(String, String, String)>,
    pub constants: ProofConstants,
    pub trace: Option<OscillationTrace>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    constants: ProofConstants,
    ledger_rows: Vec<(String, String, f64)>,
    reports: Vec<CheckReport>,
    summary: Vec<(String, String, String)>,
    trace: Option<OscillationTrace>,
    field: Option<SpaceTimeField>,
}

impl Ctx<'_> {
    fn note(&mut self, stage: &str, key: &str, value: impl ToString) {
        self.summary
            .push((stage.to_string(), key.to_string(), value.to_string()));
    }

    fn ledger(&mut self, name: &str, c: &ProofConstants) {
        for (k, v) in c.entries() {
            self.ledger_rows.push((name.to_string(), k.to_string(), v));
        }
    }

    fn report(&mut self, r: CheckReport) {
        info!("{}: {}", r.check_name, r.verdict.as_str());
        self.note(&r.check_name.clone(), "verdict", r.verdict.as_str());
        self.reports.push(r);
    }
}

/// Merges the set fields of `extra` into `base`.
fn merge(base: &mut ProofConstants, extra: &ProofConstants) {
    macro_rules! take {
        ($($f:ident),*) => { $( if extra.$f.is_some() { base.$f = extra.$f; } )* };
    }
    take!(
        gamma_harnack,
        t0,
        eta_small,
        eps_paper,
        eps_paper_claimed,
        eps_paper_ratio,
        eps_star,
        eps1,
        level_count_l,
        beta,
        theta,
        nu,
        rho0,
        eta1,
        eta_star,
        eps0,
        w_n,
        m_expand,
        sigma,
        alpha_measure,
        delta_dnl,
        eps_dnl,
        eta_dnl,
        a_iter,
        b_iter,
        gamma_iter,
        eps_star_iter
    );
}

/// Runs the configured scenario and writes its artifacts.
pub fn run(cfg: &RunConfig) -> CliResult<RunOutcome> {
    cfg.validate().stage("config")?;
    let mut ctx = Ctx {
        cfg,
        constants: ProofConstants::default(),
        ledger_rows: Vec::new(),
        reports: Vec::new(),
        summary: Vec::new(),
        trace: None,
        field: None,
    };
    ctx.note("run", "scenario", cfg.scenario.name());

    if cfg.scenario == Scenario::ConstantsLedger {
        constants_stage(&mut ctx)?;
    } else {
        solve_stage(&mut ctx)?;
        let field = ctx.field.clone().expect("solved field");
        match cfg.scenario {
            Scenario::Solve | Scenario::ConstantsLedger => {}
            Scenario::CheckHarnack => harnack_stage(&mut ctx, &field)?,
            Scenario::CheckExpansion => expansion_stage(&mut ctx, &field)?,
            Scenario::CheckCriticalMass => critical_mass_stage(&mut ctx, &field)?,
            Scenario::FitHolder => {
                fit_stage(&mut ctx, &field, cfg.window_end())?;
            }
            Scenario::FullCertify => match cfg.equation {
                Equation::PLaplacian => certify_p(&mut ctx, &field)?,
                Equation::DoublyNonlinear => certify_dnl(&mut ctx, &field)?,
            },
        }
    }
    write_artifacts(ctx)
}

fn write_artifacts(ctx: Ctx<'_>) -> CliResult<RunOutcome> {
    let cfg = ctx.cfg;
    let header = ArtifactHeader::new(
        cfg,
        ctx.constants
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    );
    let dir = &cfg.output_dir;
    let mut artifacts = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> CliResult<()> {
        let path = dir.join(name);
        write_atomic(&path, &bytes).stage("write")?;
        artifacts.push(path);
        Ok(())
    };
    if let Some(f) = &ctx.field {
        put(SNAPSHOT_FILE, render_snapshot(f).into_bytes())?;
    }
    if !ctx.reports.is_empty() {
        put(REPORTS_FILE, render_reports(&header, &ctx.reports))?;
    }
    if !ctx.ledger_rows.is_empty() {
        put(CONSTANTS_FILE, render_constants(&header, &ctx.ledger_rows))?;
    }
    if let Some(t) = &ctx.trace {
        put(TRACE_FILE, render_trace(&header, t))?;
    }
    put(SUMMARY_FILE, render_summary(&header, &ctx.summary))?;
    Ok(RunOutcome {
        artifacts,
        reports: ctx.reports,
        summary: ctx.summary,
        constants: ctx.constants,
        trace: ctx.trace,
    })
}

fn constants_stage(ctx: &mut Ctx<'_>) -> CliResult<()> {
    let cfg = ctx.cfg;
    let p = p_constants_ledger(cfg.n, cfg.p, cfg.gamma_harnack, cfg.eps_star).stage("constants")?;
    ctx.ledger("p_laplacian", &p);
    merge(&mut ctx.constants, &p);
    if cfg.equation == Equation::DoublyNonlinear {
        let d = dnl_constants_ledger(cfg.n, cfg.p, cfg.m, cfg.gamma_harnack, cfg.nu, cfg.eta_dnl).stage("constants")?;
        ctx.ledger("doubly_nonlinear", &d);
        merge(&mut ctx.constants, &d);
    }
    Ok(())
}

fn solve_stage(ctx: &mut Ctx<'_>) -> CliResult<()> {
    let cfg = ctx.cfg;
    let grid = cfg.grid().stage("solve")?;
    let params = cfg.params();
    let solver = cfg.solver_config().stage("solve")?;
    let u0 = initial_slice(cfg, &grid, &params).stage("initial_data")?;
    info!("solving {} steps on {} nodes", grid.n_steps, grid.nodes_per_slice());
    let res = solve(&u0, &solver, &grid, &params).stage("solve")?;
    let m0 = res.mass_history[0];
    let m1 = *res.mass_history.last().expect("mass history");
    ctx.note(
        "solve",
        "newton_iterations",
        res.newton_iteration_counts.iter().sum::<usize>(),
    );
    ctx.note(
        "solve",
        "max_final_residual",
        res.final_residuals.iter().cloned().fold(0.0, f64::max),
    );
    ctx.note("solve", "mass_initial", m0);
    ctx.note("solve", "mass_final", m1);
    ctx.note("solve", "clamp_activations", res.clamp_activations);
    ctx.note("solve", "flux_regularization_eps", solver.flux_regularization_eps);
    let mut field = res.field;
    ctx.note("solve", "sup_abs", field.sup_abs());
    field.label = "solution".into();
    ctx.field = Some(field);
    Ok(())
}

fn harnack_stage(ctx: &mut Ctx<'_>, field: &SpaceTimeField) -> CliResult<()> {
    let cfg = ctx.cfg;
    let (t0, t1) = (cfg.window_start(), cfg.window_end());
    let r = match cfg.equation {
        Equation::PLaplacian => check_integral_harnack_p(field, &cfg.center, cfg.rho, t0, t1, cfg.gamma_cap),
        Equation::DoublyNonlinear => check_integral_harnack_dnl(field, &cfg.center, cfg.rho, t0, t1, cfg.gamma_cap),
    }
    .stage("harnack")?;
    ctx.report(r);
    Ok(())
}

/// Minimum of the field over `B_rho(center)` on the slice at `t`.
fn ball_min(field: &SpaceTimeField, center: &[f64], rho: f64, t: f64) -> holderlab::Result<f64> {
    let k = field.grid.slice_index(t).ok_or(Error::NotOnSlice(t))?;
    let s = field.slice(k);
    let nodes = ball_nodes(&field.grid, center, rho);
    if nodes.is_empty() {
        return Err(Error::EmptyBall);
    }
    Ok(nodes.iter().map(|&i| s[i]).fold(f64::INFINITY, f64::min))
}

fn expansion_stage(ctx: &mut Ctx<'_>, field: &SpaceTimeField) -> CliResult<()> {
    let cfg = ctx.cfg;
    let r = match cfg.equation {
        Equation::PLaplacian => {
            let s = cfg.window_end();
            let m = match cfg.level_m {
                Some(m) => m,
                None => 0.5 * ball_min(field, &cfg.center, cfg.rho, s).stage("expansion")?,
            };
            check_expansion_positivity_p(field, &cfg.center, cfg.rho, s, m, cfg.alpha, cfg.eps, cfg.m_expand)
        }
        Equation::DoublyNonlinear => {
            let s = cfg.window_start();
            let m = match cfg.level_m {
                Some(m) => m,
                None => 0.5 * ball_min(field, &cfg.center, cfg.rho, s).stage("expansion")?,
            };
            check_expansion_positivity_dnl(field, &cfg.center, cfg.rho, s, m, cfg.alpha, cfg.delta, cfg.eps)
        }
    }
    .stage("expansion")?;
    ctx.constants.alpha_measure = Some(cfg.alpha);
    ctx.report(r);
    Ok(())
}

fn critical_mass_stage(ctx: &mut Ctx<'_>, field: &SpaceTimeField) -> CliResult<()> {
    let cfg = ctx.cfg;
    let top = cfg.window_end();
    let p = cfg.p;
    let m = match cfg.level_m {
        Some(m) => m,
        None => {
            let q = Cylinder::new(cfg.center.clone(), top, cfg.rho, cfg.rho.powf(p)).stage("critical_mass")?;
            0.5 * min_max(field, &q).stage("critical_mass")?.1
        }
    };
    let th = cfg.theta.unwrap_or_else(|| theta(m, cfg.m, p));
    let r = check_critical_mass_dnl(field, &cfg.center, top, cfg.rho, th, m, cfg.nu).stage("critical_mass")?;
    ctx.constants.nu = Some(cfg.nu);
    ctx.constants.theta = Some(th);
    ctx.report(r);
    Ok(())
}

fn fit_stage(ctx: &mut Ctx<'_>, field: &SpaceTimeField, top: f64) -> CliResult<()> {
    let cfg = ctx.cfg;
    let fit = fit_holder_exponent(field, &cfg.center, top, cfg.rho, &cfg.fit_radii()).stage("holder_fit")?;
    ctx.note("holder_fit", "alpha", fit.alpha);
    ctx.note("holder_fit", "r_squared", fit.r_squared);
    ctx.note("holder_fit", "omega", fit.omega);
    ctx.note("holder_fit", "radii_used", fit.radii.len());
    Ok(())
}

fn weak_gate(ctx: &mut Ctx<'_>, field: &SpaceTimeField, solver: &SolverConfig) -> CliResult<()> {
    let cfg = ctx.cfg;
    let g = &field.grid;
    let l = g.domain_half_width;
    let t_end = g.final_time();
    let reach = cfg.center.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let window = Cylinder::new(vec![0.0; g.dim_n], t_end, l, t_end).stage("weak_residual")?;
    let bump = Bump::new(cfg.center.clone(), 0.5 * (l - reach), 0.5 * t_end, 0.4 * t_end);
    let opts = WeakFormOptions {
        flux_regularization_eps: solver.flux_regularization_eps,
        source: None,
    };
    let r = weak_residual(field, &TestFunction::bump(bump), &window, &opts).stage("weak_residual")?;
    ctx.note("weak_residual", "value", r);
    ctx.note("weak_residual", "tolerance", cfg.weak_tol);
    if r.abs() > cfg.weak_tol {
        return Err(Error::Precondition(format!(
            "weak residual {r:e} exceeds the gate {:e}",
            cfg.weak_tol
        )))
        .stage("weak_residual");
    }
    Ok(())
}

/// `(mu_minus, omega)` with `omega` at least the oscillation over the
/// intrinsic cylinder it defines, widened by one cell diagonal so that
/// nearest-node resampling stays inside the measured set.
fn intrinsic_oscillation(field: &SpaceTimeField, center: &[f64], top: f64, rho: f64) -> holderlab::Result<(f64, f64)> {
    let g = &field.grid;
    let p = field.params.p;
    let e = field.params.intrinsic_exponent();
    let len = (rho.powf(p) + g.dt).min(top);
    let standard = Cylinder::new(center.to_vec(), top, rho, len)?;
    let (lo0, hi0) = min_max(field, &standard)?;
    let omega0 = hi0 - lo0;
    if omega0 == 0.0 {
        return Err(Error::DegenerateOscillation);
    }
    let pad = g.spacing() * (g.dim_n as f64).sqrt();
    let wide = Cylinder::new(center.to_vec(), top, omega0.powf(e) * rho + pad, len)?;
    let (lo1, hi1) = min_max(field, &wide)?;
    let lo = lo0.min(lo1);
    let hi = hi0.max(hi1);
    Ok((lo, hi - lo))
}

fn iteration_params(cfg: &RunConfig, a_measured: Option<f64>) -> IterationParams {
    let a = cfg
        .a_iter
        .or(a_measured.filter(|a| *a > 0.0 && *a < 1.0))
        .unwrap_or(IterationParams::default().a);
    IterationParams {
        a,
        b: cfg.b_iter,
        gamma: cfg.gamma_iter,
        eps_star: cfg.eps_star_iter,
    }
}

fn trace_stage(
    ctx: &mut Ctx<'_>,
    field: &SpaceTimeField,
    top: f64,
    omega: f64,
    params: IterationParams,
) -> CliResult<()> {
    let cfg = ctx.cfg;
    let t = build_trace(field, &cfg.center, top, cfg.rho, omega, params, cfg.n_max).stage("oscillation_trace")?;
    ctx.note("oscillation_trace", "levels", t.len());
    ctx.note("oscillation_trace", "all_nested", t.all_nested);
    ctx.note("oscillation_trace", "all_bounded", t.all_bounded);
    ctx.constants.a_iter = Some(params.a);
    ctx.constants.b_iter = Some(params.b);
    ctx.constants.gamma_iter = Some(params.gamma);
    ctx.constants.eps_star_iter = Some(params.eps_star);
    ctx.trace = Some(t);
    Ok(())
}

/// Slice time at most `span` before `top` (the window stays inside `span`).
fn snap_back(grid: &Grid, top: f64, span: f64) -> f64 {
    let k_top = grid.slice_index(top).unwrap_or(grid.n_steps);
    let back = ((span / grid.dt) * (1.0 + 1e-12)).floor() as usize;
    grid.time(k_top.saturating_sub(back))
}

/// Latest slice time `s` with `s + span <= top`.
fn snap_before(grid: &Grid, top: f64, span: f64) -> f64 {
    let k_top = grid.slice_index(top).unwrap_or(grid.n_steps);
    let back = ((span / grid.dt) * (1.0 - 1e-12)).ceil() as usize;
    grid.time(k_top.saturating_sub(back))
}

/// p-Laplacian certification: weak-form gate, intrinsic normalization,
/// alternative (with `1 - v` when mostly below), integral Harnack,
/// expansion of positivity, oscillation trace, Hölder fit.
fn certify_p(ctx: &mut Ctx<'_>, field: &SpaceTimeField) -> CliResult<()> {
    let cfg = ctx.cfg;
    let solver = cfg.solver_config().stage("solve")?;
    weak_gate(ctx, field, &solver)?;

    let top = cfg.window_end();
    let (mu_minus, omega) = intrinsic_oscillation(field, &cfg.center, top, cfg.rho).stage("intrinsic_cylinder")?;
    let spec = IntrinsicCylinderSpec {
        rho: cfg.rho,
        omega,
        p: cfg.p,
    };
    ctx.note("intrinsic_cylinder", "mu_minus", mu_minus);
    ctx.note("intrinsic_cylinder", "omega", omega);
    ctx.note("intrinsic_cylinder", "c0", spec.c0());

    let extent = (8.0 * f64::from(cfg.m_expand) * cfg.expand_rho).max(2.0);
    let (v, _) = normalize_p_laplacian(field, &spec, &cfg.center, top, mu_minus, extent).stage("normalize")?;
    let unit_top = v.grid.final_time();

    let ledger = p_constants_ledger(cfg.n, cfg.p, cfg.gamma_harnack, cfg.eps_star).stage("constants")?;
    ctx.ledger("p_laplacian", &ledger);
    merge(&mut ctx.constants, &ledger);
    let t0 = ledger.t0.expect("ledger t0");
    let eta = ledger.eta_small.expect("ledger eta");

    let q_alt = Cylinder::new(vec![0.0; cfg.n], unit_top, 0.5, unit_top.max(v.grid.dt)).stage("alternative")?;
    let alt = classify_alternative(&v, &q_alt, 0.5, 0.5, AlternativeMode::Slice).stage("alternative")?;
    let w = match alt {
        Alternative::MostlyAbove => v,
        Alternative::MostlyBelow => {
            let flipped = v.values().iter().map(|x| 1.0 - x).collect();
            v.with_values("one minus normalized", flipped).stage("alternative")?
        }
    };
    ctx.note("alternative", "branch", format!("{alt:?}"));

    let h_start = snap_back(&w.grid, unit_top, t0.abs());
    let harnack =
        check_integral_harnack_p(&w, &vec![0.0; cfg.n], 0.5, h_start, unit_top, cfg.gamma_cap).stage("harnack")?;
    ctx.report(harnack);

    let level = cfg.level_m.unwrap_or(eta);
    let expansion = check_expansion_positivity_p(
        &w,
        &vec![0.0; cfg.n],
        cfg.expand_rho,
        unit_top,
        level,
        cfg.alpha,
        cfg.eps,
        cfg.m_expand,
    )
    .stage("expansion")?;
    let sigma = expansion.constant("sigma_hat").unwrap_or(0.0);
    ctx.constants.sigma = Some(sigma);
    ctx.constants.alpha_measure = Some(cfg.alpha);
    ctx.constants.m_expand = Some(cfg.m_expand);
    ctx.report(expansion);

    let params = iteration_params(cfg, Some(1.0 - sigma * level));
    trace_stage(ctx, field, top, omega, params)?;
    fit_stage(ctx, field, top)
}

/// Doubly nonlinear certification: weak-form gate, normalization by the
/// supremum, space-time alternative at level 1/2, then either Harnack plus
/// expansion of positivity or the critical-mass lemma, oscillation trace,
/// Hölder fit.
fn certify_dnl(ctx: &mut Ctx<'_>, field: &SpaceTimeField) -> CliResult<()> {
    let cfg = ctx.cfg;
    let solver = cfg.solver_config().stage("solve")?;
    weak_gate(ctx, field, &solver)?;

    let top = cfg.window_end();
    let p = cfg.p;
    let len = cfg.rho.powf(p).min(top);
    let q = Cylinder::new(cfg.center.clone(), top, cfg.rho, len).stage("normalize")?;
    let sup = min_max(field, &q).stage("normalize")?.1;
    let v = normalize_dnl(field, sup).stage("normalize")?;
    ctx.note("normalize", "sup", sup);

    let ledger = dnl_constants_ledger(cfg.n, p, cfg.m, cfg.gamma_harnack, cfg.nu, cfg.eta_dnl).stage("constants")?;
    ctx.ledger("doubly_nonlinear", &ledger);
    merge(&mut ctx.constants, &ledger);

    let alt = classify_alternative(&v, &q, 0.5, cfg.nu, AlternativeMode::SpaceTime).stage("alternative")?;
    ctx.note("alternative", "branch", format!("{alt:?}"));
    let mut a_measured = None;
    match alt {
        Alternative::MostlyAbove => {
            let start = snap_back(&v.grid, top, len);
            let h = check_integral_harnack_dnl(&v, &cfg.center, cfg.rho, start, top, cfg.gamma_cap).stage("harnack")?;
            ctx.report(h);
            let rho_e = cfg.expand_rho * cfg.rho;
            let span = cfg.delta * 0.5f64.powf(3.0 - cfg.m - p) * rho_e.powf(p);
            let s = snap_before(&v.grid, top, span);
            let e = check_expansion_positivity_dnl(&v, &cfg.center, rho_e, s, 0.5, cfg.alpha, cfg.delta, cfg.eps)
                .stage("expansion")?;
            let eta_hat = e.constant("eta_hat").unwrap_or(0.0);
            a_measured = Some(1.0 - 0.5 * eta_hat);
            ctx.constants.delta_dnl = Some(cfg.delta);
            ctx.constants.eps_dnl = Some(cfg.eps);
            ctx.constants.alpha_measure = Some(cfg.alpha);
            ctx.report(e);
        }
        Alternative::MostlyBelow => {
            let r = check_critical_mass_dnl(&v, &cfg.center, top, cfg.rho, 1.0, 0.5, cfg.nu).stage("critical_mass")?;
            ctx.report(r);
        }
    }

    let (_, omega) = intrinsic_oscillation(field, &cfg.center, top, cfg.rho).stage("intrinsic_cylinder")?;
    ctx.note("intrinsic_cylinder", "omega", omega);
    let params = iteration_params(cfg, a_measured);
    trace_stage(ctx, field, top, omega, params)?;
    fit_stage(ctx, field, top)
}
