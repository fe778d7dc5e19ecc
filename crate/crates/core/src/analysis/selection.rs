//! Source and target language selection analyses.
//!
//! For source selection the target language is fixed and candidate source
//! languages are ranked; target selection fixes the source. Each fixed
//! language forms a group, and measures are compared by their per-group
//! correlation with task scores.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::correlation::{join, log_named, pearson, JoinedRow};
use super::regression::ols_named;
use super::table::{Linguistic, PerformanceTable};
use crate::measures::{Measure, PairScore};
use crate::{Error, Exec, Result};

/// Minimum complete rows a group needs.
pub const GROUP_FLOOR: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Fixed target, ranking sources.
    SourceSelection,
    /// Fixed source, ranking targets.
    TargetSelection,
}

impl SelectionMode {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMode::SourceSelection => "source_selection",
            SelectionMode::TargetSelection => "target_selection",
        }
    }

    fn group_of(self, row: &JoinedRow) -> &str {
        match self {
            SelectionMode::SourceSelection => &row.target,
            SelectionMode::TargetSelection => &row.source,
        }
    }
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "source" | "source_selection" => Ok(SelectionMode::SourceSelection),
            "target" | "target_selection" => Ok(SelectionMode::TargetSelection),
            _ => Err(Error::invalid(format!("unknown selection mode {s:?} (expected source or target)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    /// The fixed language.
    pub group: String,
    pub n: usize,
    pub correlations: BTreeMap<Measure, f64>,
    /// Measures sharing the largest |r|.
    pub winners: Vec<Measure>,
    /// r̂ of the multiple regression, when it could be fitted.
    pub multi_r_hat: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedGroup {
    pub group: String,
    pub n: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub mode: SelectionMode,
    pub measures: Vec<Measure>,
    pub per_group: Vec<GroupResult>,
    pub skipped: Vec<SkippedGroup>,
    pub mean_correlation: BTreeMap<Measure, f64>,
    /// Percentage of groups won; tied winners share a group.
    pub win_pct: BTreeMap<Measure, f64>,
    /// Measure with the largest mean |r|, used for the multiple regression.
    pub best_measure: Measure,
    /// Regressors of the multiple regression, in design order.
    pub multi_regressors: Vec<String>,
    /// Mean per-group r̂ of the multiple regression.
    pub multi_r_hat: Option<f64>,
}

fn analyse_group(
    group: &str,
    rows: &[&JoinedRow],
    measures: &[Measure],
) -> std::result::Result<(usize, BTreeMap<Measure, f64>), String> {
    let complete: Vec<&JoinedRow> = rows
        .iter()
        .copied()
        .filter(|r| measures.iter().all(|m| r.measures.contains_key(m)))
        .collect();
    if complete.len() < GROUP_FLOOR {
        return Err(format!("{} complete rows, need {GROUP_FLOOR}", complete.len()));
    }
    let named = |f: &dyn Fn(&JoinedRow) -> f64| -> Vec<(f64, String, String)> {
        complete.iter().map(|r| (f(r), r.source.clone(), r.target.clone())).collect()
    };
    let logs = |v: Vec<(f64, String, String)>, what: &str| {
        let refs: Vec<(f64, &str, &str)> = v.iter().map(|(x, s, t)| (*x, s.as_str(), t.as_str())).collect();
        log_named(&refs, what).map_err(|e| e.to_string())
    };
    let y = logs(named(&|r| r.score), "score")?;
    let mut out = BTreeMap::new();
    for &m in measures {
        let x = logs(named(&|r| r.measures[&m]), m.name())?;
        let r = pearson(&x, &y).map_err(|e| format!("{group}: {m}: {e}"))?;
        out.insert(m, r);
    }
    Ok((complete.len(), out))
}

/// Per-group OLS of log score on log(best) plus the linguistic distances
/// every complete row carries.
fn group_multi_r_hat(rows: &[&JoinedRow], best: Measure, measures: &[Measure]) -> (Vec<String>, Result<f64>) {
    let complete: Vec<&JoinedRow> = rows
        .iter()
        .copied()
        .filter(|r| measures.iter().all(|m| r.measures.contains_key(m)))
        .collect();
    let ling: Vec<Linguistic> = Linguistic::ALL
        .into_iter()
        .filter(|l| complete.iter().all(|r| r.linguistic.contains_key(l)))
        .collect();
    let mut names = vec![best.name().to_string()];
    names.extend(ling.iter().map(|l| l.name().to_string()));
    let fit = || -> Result<f64> {
        let triples = |f: &dyn Fn(&JoinedRow) -> f64| -> Vec<(f64, &str, &str)> {
            complete.iter().map(|r| (f(r), r.source.as_str(), r.target.as_str())).collect()
        };
        let y = log_named(&triples(&|r| r.score), "score")?;
        let mut cols = vec![(best.name().to_string(), log_named(&triples(&|r| r.measures[&best]), best.name())?)];
        for &l in &ling {
            cols.push((l.name().to_string(), complete.iter().map(|r| r.linguistic[&l]).collect()));
        }
        Ok(ols_named(&cols, &y)?.r_hat)
    };
    (names, fit())
}

/// Per-group correlations, mean r, win percentages and the multiple
/// regression r̂. `measures` empty means every measure present in `pairs`.
pub fn selection_analysis(
    pairs: &[PairScore],
    perf: &PerformanceTable,
    task: Option<&str>,
    mode: SelectionMode,
    measures: &[Measure],
) -> Result<SelectionReport> {
    let joined = join(pairs, perf, task)?;
    let mut measures: Vec<Measure> = if measures.is_empty() {
        joined.measures()
    } else {
        measures.to_vec()
    };
    measures.sort();
    measures.dedup();
    if measures.is_empty() {
        return Err(Error::invalid("no measures to analyse"));
    }

    let mut groups: BTreeMap<&str, Vec<&JoinedRow>> = BTreeMap::new();
    for r in &joined.rows {
        groups.entry(mode.group_of(r)).or_default().push(r);
    }
    let groups: Vec<(&str, Vec<&JoinedRow>)> = groups.into_iter().collect();
    let results = Exec::default().map_slice(&groups, |(g, rows)| analyse_group(g, rows, &measures));

    let mut kept: Vec<(&str, &Vec<&JoinedRow>, usize, BTreeMap<Measure, f64>)> = Vec::new();
    let mut skipped = Vec::new();
    for ((g, rows), res) in groups.iter().zip(results) {
        match res {
            Ok((n, corr)) => kept.push((g, rows, n, corr)),
            Err(reason) => {
                log::warn!("{mode}: skipping group {g}: {reason}");
                skipped.push(SkippedGroup {
                    group: g.to_string(),
                    n: rows.len(),
                    reason,
                });
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::invalid(format!(
            "no usable groups: all {} groups have fewer than {GROUP_FLOOR} complete rows or failed",
            skipped.len()
        )));
    }

    let ng = kept.len() as f64;
    let mean_correlation: BTreeMap<Measure, f64> = measures
        .iter()
        .map(|&m| (m, kept.iter().map(|k| k.3[&m]).sum::<f64>() / ng))
        .collect();
    let mut wins: BTreeMap<Measure, f64> = measures.iter().map(|&m| (m, 0.0)).collect();
    let mut per_group = Vec::with_capacity(kept.len());
    for (g, _, n, corr) in &kept {
        let top = corr.values().fold(0.0f64, |a, r| a.max(r.abs()));
        let winners: Vec<Measure> = corr.iter().filter(|(_, r)| r.abs() == top).map(|(&m, _)| m).collect();
        for m in &winners {
            *wins.get_mut(m).expect("known measure") += 1.0 / winners.len() as f64;
        }
        per_group.push(GroupResult {
            group: g.to_string(),
            n: *n,
            correlations: corr.clone(),
            winners,
            multi_r_hat: None,
        });
    }
    let win_pct = wins.into_iter().map(|(m, w)| (m, 100.0 * w / ng)).collect();

    let mean_abs = |m: Measure| kept.iter().map(|k| k.3[&m].abs()).sum::<f64>() / ng;
    let best_measure = measures
        .iter()
        .copied()
        .fold(None, |best: Option<Measure>, m| match best {
            Some(b) if mean_abs(b) >= mean_abs(m) => Some(b),
            _ => Some(m),
        })
        .expect("nonempty");

    let fits = Exec::default().map_slice(&kept, |(_, rows, _, _)| group_multi_r_hat(rows, best_measure, &measures));
    let mut multi_regressors = Vec::new();
    let mut r_hats = Vec::new();
    for (gr, (names, fit)) in per_group.iter_mut().zip(fits) {
        if names.len() > multi_regressors.len() {
            multi_regressors = names;
        }
        match fit {
            Ok(r) => {
                gr.multi_r_hat = Some(r);
                r_hats.push(r);
            }
            Err(e) => log::warn!("{mode}: multiple regression for group {} failed: {e}", gr.group),
        }
    }
    let multi_r_hat = (!r_hats.is_empty()).then(|| r_hats.iter().sum::<f64>() / r_hats.len() as f64);

    Ok(SelectionReport {
        mode,
        measures,
        per_group,
        skipped,
        mean_correlation,
        win_pct,
        best_measure,
        multi_regressors,
        multi_r_hat,
    })
}
