use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub eval_index: usize,
    pub fitness: f64,
    pub best_so_far: f64,
    pub stage: String,
}

/// Every evaluation of one optimizer run, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algo: String,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn best_so_far(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_so_far).collect()
    }

    /// Stage tags in order of first appearance of each contiguous block.
    pub fn stage_blocks(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if out.last() != Some(&r.stage.as_str()) {
                out.push(&r.stage);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("eval_index,fitness,best_so_far,stage\n");
        for r in &self.records {
            s.push_str(&format!("{},{},{},{}\n", r.eval_index, r.fitness, r.best_so_far, r.stage));
        }
        s
    }

    pub fn parse_csv(algo: &str, seed: u64, text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut records = Vec::new();
        for (row, rec) in reader.deserialize::<TraceRecord>().enumerate() {
            records.push(rec.map_err(|e| Error::data(algo, Some(row + 1), e.to_string()))?);
        }
        let best_fitness = records.last().map_or(f64::INFINITY, |r: &TraceRecord| r.best_so_far);
        Ok(Self {
            algo: algo.to_string(),
            seed,
            records,
            best_position: Vec::new(),
            best_fitness,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv().as_bytes()).map_err(|e| Error::io(path, e))
    }
}
