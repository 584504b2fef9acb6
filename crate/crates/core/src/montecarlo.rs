//! Seeded Monte Carlo estimates of `E[T_X]`, `E[T_1]` and `Cov(T_X, T_1)`.
//!
//! Sample `i` draws its graph with seed `mix(seed, i)`. Samples are grouped into
//! fixed-size chunks; each chunk is accumulated sequentially and the chunk
//! accumulators are merged in chunk order, so the result is bit-identical for
//! any number of workers.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{sample_gnp, ModelParams};
use crate::index::topo_index;
use crate::moments::{MomentReport, SeriesControl};
use crate::stats::{jackknife_cov_stderr, CoMoment};
use crate::vfunc::VertexFunction;

const CHUNK: usize = 1024;

/// SplitMix64 finaliser.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `(seed, index)`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MCConfig {
    pub params: ModelParams,
    pub f: VertexFunction,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Param(format!(
                "need at least 2 samples for a covariance, got {}",
                self.samples
            )));
        }
        if self.workers == 0 {
            return Err(Error::Param("workers must be at least 1".into()));
        }
        if self.params.p() > 1.0 {
            return Err(Error::Param("edge probability exceeds 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCResult {
    pub mean_tx: f64,
    pub mean_t1: f64,
    pub cov_tx_t1: f64,
    pub var_tx: f64,
    pub var_t1: f64,
    pub stderr_mean_tx: f64,
    pub stderr_mean_t1: f64,
    /// Delete-one jackknife.
    pub stderr_cov: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn run(cfg: &MCConfig) -> Result<MCResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Param(format!("cannot start worker pool: {e}")))?;

    let chunks: Vec<(Vec<(f64, f64)>, CoMoment)> = pool.install(|| {
        (0..cfg.samples.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let range = c * CHUNK..((c + 1) * CHUNK).min(cfg.samples);
                let mut acc = CoMoment::new();
                let mut values = Vec::with_capacity(range.len());
                for i in range {
                    let g = sample_gnp(&cfg.params, mix(cfg.seed, i as u64));
                    let t = topo_index(&g, &cfg.f);
                    let pair = (t.value, t.edge_count as f64);
                    acc.push(pair.0, pair.1);
                    values.push(pair);
                }
                (values, acc)
            })
            .collect()
    });

    let mut total = CoMoment::new();
    let mut values = Vec::with_capacity(cfg.samples);
    for (chunk_values, acc) in chunks {
        total.merge(&acc);
        values.extend(chunk_values);
    }

    let n = cfg.samples as f64;
    let var_tx = total.var_x().expect("samples >= 2");
    let var_t1 = total.var_y().expect("samples >= 2");
    Ok(MCResult {
        mean_tx: total.mean_x(),
        mean_t1: total.mean_y(),
        cov_tx_t1: total.cov().expect("samples >= 2"),
        var_tx,
        var_t1,
        stderr_mean_tx: (var_tx / n).sqrt(),
        stderr_mean_t1: (var_t1 / n).sqrt(),
        stderr_cov: jackknife_cov_stderr(&values, &total).expect("samples >= 2"),
        samples: cfg.samples,
        seed: cfg.seed,
    })
}

/// One `(n, alpha)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub params: ModelParams,
    pub cell_seed: u64,
    pub moments: MomentReport,
    pub mc: MCResult,
}

/// Runs every `(n, alpha)` cell with seed `mix(seed, cell_index)`.
pub fn sweep(
    grid: &[(usize, f64)],
    f: &VertexFunction,
    samples: usize,
    seed: u64,
    workers: usize,
    ctl: &SeriesControl,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Param("sweep grid is empty".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &(n, alpha))| {
            let params = ModelParams::from_alpha(n, alpha)?;
            let cell_seed = mix(seed, i as u64);
            let moments = MomentReport::compute(f, &params, ctl)?;
            let mc = run(&MCConfig {
                params,
                f: f.clone(),
                samples,
                seed: cell_seed,
                workers,
            })?;
            Ok(SweepRow {
                params,
                cell_seed,
                moments,
                mc,
            })
        })
        .collect()
}
