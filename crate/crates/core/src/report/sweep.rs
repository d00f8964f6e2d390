use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{set_param, RunConfig};
use super::run::{
    run_corpus, CorpusResult, RunMode, SweepPoint, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK,
    EXIT_VIOLATION,
};
use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param: String,
    pub values: Vec<Value>,
    pub runs: Vec<CorpusResult>,
    pub exit_code: i32,
}

/// Splits a comma list; each item is read as JSON when possible (numbers,
/// booleans) and as a bare string otherwise.
pub fn parse_values(list: &str) -> Result<Vec<Value>> {
    let items: Vec<Value> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_owned())))
        .collect();
    if items.is_empty() {
        return Err(Error::Config("--values: empty list".into()));
    }
    Ok(items)
}

/// Worst code across runs: violations first, then numerical failures, then
/// input errors.
fn combine(codes: impl Iterator<Item = i32>) -> i32 {
    let codes: Vec<i32> = codes.collect();
    [EXIT_VIOLATION, EXIT_NUMERICAL, EXIT_CONFIG]
        .into_iter()
        .find(|c| codes.contains(c))
        .unwrap_or(EXIT_OK)
}

/// Runs the static pipeline once per value of `param`.
pub fn run_sweep(
    raw: &Value,
    param: &str,
    values: &[Value],
    seed: Option<u64>,
    exec: Exec,
) -> Result<SweepResult> {
    let mut runs = Vec::with_capacity(values.len());
    for v in values {
        let mut doc = raw.clone();
        set_param(&mut doc, param, v.clone())?;
        let mut cfg =
            RunConfig::from_value(doc).map_err(|e| Error::Config(format!("{param} = {v}: {e}")))?;
        if let Some(s) = seed {
            cfg = cfg.with_seed(s);
        }
        cfg.exec = exec;
        let mut res = run_corpus(&cfg, RunMode::Verify)?;
        res.sweep = Some(SweepPoint {
            param: param.to_owned(),
            value: v.clone(),
        });
        runs.push(res);
    }
    Ok(SweepResult {
        param: param.to_owned(),
        values: values.to_vec(),
        exit_code: combine(runs.iter().map(|r| r.exit_code())),
        runs,
    })
}
