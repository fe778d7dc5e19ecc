//! Log transform, Pearson correlation, and the join between pair scores and
//! a performance table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::table::{Linguistic, PerformanceTable};
use crate::measures::{Measure, PairScore};
use crate::{Error, Result};

/// Natural log of strictly positive values.
pub fn log_transform(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::invalid(format!("cannot log-transform value {v} at position {i}")))
            }
        })
        .collect()
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("pearson: lengths {} and {} differ", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::invalid(format!("pearson needs at least 3 points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("pearson: zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Unordered pair key.
pub(crate) fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// A performance row together with the measure values of its language pair.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinedRow {
    pub source: String,
    pub target: String,
    pub score: f64,
    pub measures: BTreeMap<Measure, f64>,
    pub linguistic: BTreeMap<Linguistic, f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Joined {
    pub rows: Vec<JoinedRow>,
    /// Directed (source, target) keys with no measure value at all.
    pub unmatched: Vec<(String, String)>,
}

impl Joined {
    /// Measures present in at least one row.
    pub fn measures(&self) -> Vec<Measure> {
        let mut ms: Vec<Measure> = self.rows.iter().flat_map(|r| r.measures.keys().copied()).collect();
        ms.sort();
        ms.dedup();
        ms
    }
}

pub(crate) fn index_scores(pairs: &[PairScore]) -> Result<BTreeMap<(String, String), BTreeMap<Measure, f64>>> {
    let mut out: BTreeMap<(String, String), BTreeMap<Measure, f64>> = BTreeMap::new();
    for p in pairs {
        let slot = out.entry(pair_key(&p.lang_a, &p.lang_b)).or_default();
        if let Some(old) = slot.insert(p.measure, p.value) {
            if old != p.value {
                return Err(Error::invalid(format!(
                    "conflicting {} values for ({}, {}): {old} and {}",
                    p.measure, p.lang_a, p.lang_b, p.value
                )));
            }
        }
    }
    Ok(out)
}

/// Joins each directed performance row to its unordered pair's scores.
pub fn join(pairs: &[PairScore], perf: &PerformanceTable, task: Option<&str>) -> Result<Joined> {
    let index = index_scores(pairs)?;
    let mut out = Joined::default();
    for r in perf.filter_task(task) {
        match index.get(&pair_key(&r.source, &r.target)) {
            Some(m) => out.rows.push(JoinedRow {
                source: r.source.clone(),
                target: r.target.clone(),
                score: r.score,
                measures: m.clone(),
                linguistic: Linguistic::ALL
                    .into_iter()
                    .filter_map(|l| r.linguistic(l).map(|v| (l, v)))
                    .collect(),
            }),
            None => out.unmatched.push((r.source.clone(), r.target.clone())),
        }
    }
    if out.rows.is_empty() {
        let sample: Vec<String> = out
            .unmatched
            .iter()
            .take(5)
            .map(|(s, t)| format!("{s}->{t}"))
            .collect();
        return Err(Error::invalid(format!(
            "0 joined rows; unmatched keys (first {}): {}",
            sample.len(),
            sample.join(", ")
        )));
    }
    Ok(out)
}

/// Natural logs with errors naming the offending pair.
pub(crate) fn log_named(values: &[(f64, &str, &str)], what: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&(v, s, t)| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::invalid(format!("cannot log-transform {what} {v} for {s}->{t}")))
            }
        })
        .collect()
}

/// Which column a correlation row describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Variable {
    Measure(Measure),
    Linguistic(Linguistic),
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Measure(m) => m.name(),
            Variable::Linguistic(l) => l.name(),
        }
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub variable: Variable,
    pub n: usize,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub rows: Vec<CorrelationRow>,
    pub n_joined: usize,
    pub unmatched: Vec<(String, String)>,
}

/// Paired (x, y) values for one variable over the joined rows where it is
/// present. Measures and scores are logged; linguistic distances are not.
pub(crate) fn variable_xy(rows: &[&JoinedRow], v: Variable) -> Result<(Vec<f64>, Vec<f64>)> {
    let present: Vec<(&JoinedRow, f64)> = rows
        .iter()
        .filter_map(|r| {
            let x = match v {
                Variable::Measure(m) => r.measures.get(&m),
                Variable::Linguistic(l) => r.linguistic.get(&l),
            };
            x.map(|&x| (*r, x))
        })
        .collect();
    let y = log_named(
        &present.iter().map(|(r, _)| (r.score, r.source.as_str(), r.target.as_str())).collect::<Vec<_>>(),
        "score",
    )?;
    let x = match v {
        Variable::Measure(m) => log_named(
            &present
                .iter()
                .map(|(r, x)| (*x, r.source.as_str(), r.target.as_str()))
                .collect::<Vec<_>>(),
            m.name(),
        )?,
        Variable::Linguistic(_) => present.iter().map(|(_, x)| *x).collect(),
    };
    Ok((x, y))
}

/// Pearson r per measure (and per linguistic distance column, when
/// present) against task scores, after log-transforming measures and scores.
pub fn correlate_measures(pairs: &[PairScore], perf: &PerformanceTable, task: Option<&str>) -> Result<CorrelationTable> {
    let joined = join(pairs, perf, task)?;
    let rows: Vec<&JoinedRow> = joined.rows.iter().collect();
    let mut vars: Vec<Variable> = joined.measures().into_iter().map(Variable::Measure).collect();
    vars.extend(
        Linguistic::ALL
            .into_iter()
            .filter(|l| rows.iter().any(|r| r.linguistic.contains_key(l)))
            .map(Variable::Linguistic),
    );
    let mut out = Vec::new();
    for v in vars {
        let (x, y) = variable_xy(&rows, v)?;
        let r = pearson(&x, &y).map_err(|e| Error::invalid(format!("{v}: {e}")))?;
        out.push(CorrelationRow { variable: v, n: x.len(), r });
    }
    Ok(CorrelationTable {
        rows: out,
        n_joined: joined.rows.len(),
        unmatched: joined.unmatched,
    })
}
