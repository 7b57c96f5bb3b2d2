//! Result records and their text rendering.

use std::collections::BTreeMap;

use flipcc::{Clustering, Cost};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub label: String,
    pub cost_halves: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub algorithm: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    /// Cost in half units, exact.
    pub cost_halves: i64,
    /// Decimal rendering of the cost.
    pub cost: String,
    pub num_clusters: usize,
    pub runtime_ms: u64,
    pub instance: String,
    pub clusters: Vec<Vec<usize>>,
    /// Every solution of a pipeline in execution order; empty otherwise.
    #[serde(default)]
    pub trace: Vec<TraceStep>,
}

impl RunReport {
    pub fn new(
        algorithm: &str,
        params: BTreeMap<String, String>,
        seed: u64,
        instance: &str,
        clustering: &Clustering,
        cost: Cost,
        runtime_ms: u64,
    ) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            algorithm: algorithm.to_string(),
            params,
            seed,
            cost_halves: cost.halves(),
            cost: cost.to_string(),
            num_clusters: clustering.num_clusters(),
            runtime_ms,
            instance: instance.to_string(),
            clusters: clustering.clusters().to_vec(),
            trace: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Trial indices that failed, at most the first 20.
    pub failures: Vec<usize>,
    pub runtime_ms: u64,
}

/// Left-aligned first column, right-aligned others, two spaces apart.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (i, cell) in r.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{:<w$}", c, w = widths[i]) } else { format!("{:>w$}", c, w = widths[i]) })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn run_rows(reports: &[RunReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.algorithm.clone(),
                r.cost.clone(),
                r.cost_halves.to_string(),
                r.num_clusters.to_string(),
                r.runtime_ms.to_string(),
            ]
        })
        .collect();
    table(&["algorithm", "cost", "cost_halves", "clusters", "ms"], &rows)
}

pub fn suite_rows(reports: &[SuiteReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.suite.clone(),
                r.trials.to_string(),
                r.passed.to_string(),
                r.failed.to_string(),
                r.runtime_ms.to_string(),
            ]
        })
        .collect();
    table(&["suite", "trials", "passed", "failed", "ms"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips() {
        let c = Clustering::from_clusters(3, &[vec![0, 2], vec![1]]).unwrap();
        let mut params = BTreeMap::new();
        params.insert("epsilon".into(), "0.1".into());
        let mut r = RunReport::new("acn", params, 7, "cliques:2,1", &c, Cost::from_halves(3), 12);
        r.trace.push(TraceStep { label: "Ls1".into(), cost_halves: 3 });
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<RunReport>(&s).unwrap(), r);
        assert_eq!(r.cost, "1.5");
    }

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\nxyz   1\n");
    }
}
