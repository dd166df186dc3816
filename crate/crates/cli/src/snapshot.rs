//! `SPFIELD v1` snapshot files.
//!
//! Line 1 is `SPFIELD v1`, line 2 the grid and equation header
//! `N=.. cells=.. L=.. dt=.. steps=.. p=.. m=.. eq=plap|dnl`, then one line
//! per time slice of space-separated values with 17 significant digits.
//! The header does not record the boundary condition; reading yields a
//! Dirichlet grid.

use std::fmt::Write as _;
use std::path::Path;

use holderlab::model::{BoundaryCondition, DirichletData, Equation, Grid, ProblemParams, SpaceTimeField};

use crate::error::{CliError, CliResult};
use crate::io::write_atomic;

pub const MAGIC: &str = "SPFIELD v1";

/// Renders a field in the snapshot format.
pub fn render_snapshot(field: &SpaceTimeField) -> String {
    let g = &field.grid;
    let pr = &field.params;
    let mut out = String::with_capacity(field.values().len() * 25 + 128);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(
        out,
        "N={} cells={} L={} dt={} steps={} p={} m={} eq={}",
        g.dim_n,
        g.cells_per_axis,
        g.domain_half_width,
        g.dt,
        g.n_steps,
        pr.p,
        pr.m,
        pr.equation.tag()
    );
    for k in 0..field.n_slices() {
        for (i, v) in field.slice(k).iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_snapshot(field: &SpaceTimeField, path: &Path) -> CliResult<()> {
    write_atomic(path, render_snapshot(field).as_bytes())
}

fn format_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Format {
        line,
        message: message.into(),
    }
}

/// Parses a snapshot document; `label` names the resulting field.
pub fn parse_snapshot(text: &str, label: &str) -> CliResult<SpaceTimeField> {
    let mut lines = text.lines();
    match lines.next() {
        Some(MAGIC) => {}
        Some(other) if other.starts_with("SPFIELD") => {
            return Err(format_err(
                1,
                format!("unsupported version `{other}`; supported: `{MAGIC}`"),
            ))
        }
        _ => return Err(format_err(1, format!("missing `{MAGIC}` header"))),
    }
    let header = lines.next().ok_or_else(|| format_err(2, "missing grid header"))?;
    let mut fields = header.split_whitespace();
    let mut take = |key: &str| -> CliResult<&str> {
        let tok = fields
            .next()
            .ok_or_else(|| format_err(2, format!("header `{header}` is missing `{key}`")))?;
        tok.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| format_err(2, format!("header `{header}`: expected `{key}=`, found `{tok}`")))
    };
    let num = |key: &str, v: &str| -> CliResult<f64> {
        v.parse()
            .map_err(|_| format_err(2, format!("header `{header}`: bad value for {key}")))
    };
    let int = |key: &str, v: &str| -> CliResult<usize> {
        v.parse()
            .map_err(|_| format_err(2, format!("header `{header}`: bad value for {key}")))
    };
    let dim = int("N", take("N")?)?;
    let cells = int("cells", take("cells")?)?;
    let l = num("L", take("L")?)?;
    let dt = num("dt", take("dt")?)?;
    let steps = int("steps", take("steps")?)?;
    let p = num("p", take("p")?)?;
    let m = num("m", take("m")?)?;
    let eq_tag = take("eq")?;
    let equation = Equation::from_tag(eq_tag)
        .ok_or_else(|| format_err(2, format!("header `{header}`: unknown equation `{eq_tag}`")))?;
    let grid = Grid::new(
        dim,
        cells,
        l,
        dt,
        steps,
        BoundaryCondition::Dirichlet(DirichletData::FrozenInitial),
    )
    .map_err(|e| format_err(2, format!("header `{header}`: {e}")))?;
    let params = match equation {
        Equation::PLaplacian => {
            let mut pr = ProblemParams::p_laplacian(dim, p);
            pr.m = m;
            pr
        }
        Equation::DoublyNonlinear => ProblemParams::doubly_nonlinear(dim, p, m),
    };

    let per_slice = grid.nodes_per_slice();
    let mut values = Vec::with_capacity(per_slice * grid.n_slices());
    for k in 0..grid.n_slices() {
        let line_no = k + 3;
        let line = lines.next().ok_or_else(|| {
            format_err(
                line_no,
                format!("truncated: expected {} slices, found {k}", grid.n_slices()),
            )
        })?;
        let before = values.len();
        for tok in line.split_whitespace() {
            values.push(
                tok.parse::<f64>()
                    .map_err(|_| format_err(line_no, format!("bad value `{tok}`")))?,
            );
        }
        if values.len() - before != per_slice {
            return Err(format_err(
                line_no,
                format!("expected {per_slice} values, found {}", values.len() - before),
            ));
        }
    }
    if let Some((i, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(format_err(
            grid.n_slices() + 3 + i,
            "unexpected data after the last slice",
        ));
    }
    SpaceTimeField::new(grid, params, label, values).map_err(|e| format_err(3, e.to_string()))
}

pub fn read_snapshot(path: &Path) -> CliResult<SpaceTimeField> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_snapshot(&text, &label)
}
