//! Initial slices for runs.
//!
//! `random_nodal(lo, hi)` draws one value per node, in flat node order, from
//! ChaCha8 seeded with the run seed via `seed_from_u64`, using
//! `gen_range(lo..hi)`. The same seed always gives the same data.

use holderlab::model::{Equation, Grid, ProblemParams};
use holderlab::oracles::{barenblatt_reference, SelfSimilarProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{InitialData, RunConfig};
use crate::error::{CliError, CliResult};
use crate::snapshot::read_snapshot;

pub fn random_nodal(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut x = [0.0; 3];
    (0..grid.nodes_per_slice())
        .map(|i| {
            grid.node_coord(i, &mut x);
            f(&x[..grid.dim_n])
        })
        .collect()
}

/// Builds the first time slice on the configured grid.
pub fn initial_slice(cfg: &RunConfig, grid: &Grid, params: &ProblemParams) -> CliResult<Vec<f64>> {
    let l = grid.domain_half_width;
    Ok(match &cfg.initial_data {
        InitialData::Constant(c) => vec![*c; grid.nodes_per_slice()],
        InitialData::LinearRamp => {
            let inv_beta = 1.0 / params.beta();
            from_fn(grid, |x| (1.0 + (x[0] + l) / (2.0 * l)).powf(inv_beta))
        }
        InitialData::Bump => from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (-8.0 * r2 / (l * l)).exp()
        }),
        InitialData::Barenblatt(t) => {
            if params.equation != Equation::PLaplacian {
                return Err(holderlab::Error::InvalidInput(
                    "barenblatt data is the p-Laplacian source solution".into(),
                )
                .into());
            }
            let profile = SelfSimilarProfile::new(params.p, params.dim_n, cfg.mass)?;
            barenblatt_reference(&profile, *t, grid)?
        }
        InitialData::RandomNodal(lo, hi) => random_nodal(grid.nodes_per_slice(), *lo, *hi, cfg.seed),
        InitialData::FromSnapshot(path) => {
            let snap = read_snapshot(path)?;
            if snap.grid.dim_n != grid.dim_n || snap.grid.cells_per_axis != grid.cells_per_axis {
                return Err(CliError::Format {
                    line: 2,
                    message: format!("{} does not match the configured grid", path.display()),
                });
            }
            let last = snap.n_slices() - 1;
            snap.slice(last).to_vec()
        }
    })
}
