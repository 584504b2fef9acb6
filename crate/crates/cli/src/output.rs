//! Sweep/simulate CSV rows and the run manifest written next to them.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use degcov::montecarlo::SweepRow;
use serde::{Deserialize, Serialize};

use crate::SimArgs;

/// Column order is fixed; the header row is always written.
#[derive(Debug, Serialize)]
pub struct CsvRow {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub d1_exact: f64,
    pub d2_exact: Option<f64>,
    pub d1_poisson: f64,
    pub d2_poisson: f64,
    pub e_tx_closed: f64,
    pub cov_exact: f64,
    pub cov_asym_coeff: f64,
    pub mc_mean_tx: f64,
    pub mc_cov: f64,
    pub mc_stderr_cov: f64,
    pub samples: usize,
    pub seed: u64,
}

impl From<&SweepRow> for CsvRow {
    fn from(row: &SweepRow) -> Self {
        Self {
            n: row.params.n(),
            alpha: row.params.alpha(),
            p: row.params.p(),
            d1_exact: row.moments.d1,
            d2_exact: row.moments.d2,
            d1_poisson: row.moments.d1_poisson,
            d2_poisson: row.moments.d2_poisson,
            e_tx_closed: row.moments.e_tx,
            cov_exact: row.moments.cov_exact,
            cov_asym_coeff: row.moments.cov_asymptotic_coeff.value(),
            mc_mean_tx: row.mc.mean_tx,
            mc_cov: row.mc.cov_tx_t1,
            mc_stderr_cov: row.mc.stderr_cov,
            samples: row.mc.samples,
            seed: row.cell_seed,
        }
    }
}

pub fn to_csv(rows: &[SweepRow]) -> anyhow::Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(CsvRow::from(row))?;
    }
    Ok(wtr.into_inner()?)
}

/// Everything needed to regenerate a CSV. The timestamp is informational only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: SimArgs,
    pub seed: u64,
    pub version: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, args: &SimArgs) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            args: args.clone(),
            seed: args.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
