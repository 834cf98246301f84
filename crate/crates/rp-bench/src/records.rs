//! CSV result schema. One record per (configuration, trial, metric);
//! aggregate rows use trial = -1. Column names and order are the contract
//! downstream plotting relies on, so they change only with SCHEMA_VERSION.

use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Trial index used for per-configuration aggregate rows.
pub const AGGREGATE_TRIAL: i64 = -1;

/// Rank column value for families without a rank parameter.
pub const NO_RANK: usize = 0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub experiment: String,
    pub regime: String,
    pub family: String,
    pub rank: usize,
    pub k: usize,
    pub trial: i64,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub wall_time_s: f64,
    pub rng: String,
    pub threads: usize,
}

impl ResultRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: &str,
        regime: &str,
        family: &str,
        rank: usize,
        k: usize,
        trial: i64,
        seed: u64,
        metric: &str,
        value: f64,
        wall_time_s: f64,
        threads: usize,
    ) -> Self {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            regime: regime.to_string(),
            family: family.to_string(),
            rank,
            k,
            trial,
            seed,
            metric: metric.to_string(),
            value,
            wall_time_s,
            rng: tensor_rp::RNG_TAG.to_string(),
            threads,
        }
    }
}

/// Writes all records in the given order, header first.
pub fn write_records(path: &Path, records: &[ResultRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| anyhow::anyhow!("cannot open {}: {e}", path.display()))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a result file back, in row order.
pub fn read_records(path: &Path) -> anyhow::Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| anyhow::anyhow!("cannot open {}: {e}", path.display()))?;
    Ok(r.deserialize().collect::<Result<Vec<_>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_schema_contract() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let rec = ResultRecord::new("distortion", "small", "tt", 2, 5, 0, 42, "distortion", 0.5, 0.01, 4);
        write_records(&path, &[rec]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "schema_version,experiment,regime,family,rank,k,trial,seed,metric,value,wall_time_s,rng,threads"
        );
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("1,distortion,small,tt,2,5,0,42,distortion,0.5,"));
        assert!(row.contains("chacha8"));
    }
}
