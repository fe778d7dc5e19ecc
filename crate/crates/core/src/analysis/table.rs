//! Task performance tables keyed by directed (source, target) pairs.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Precomputed linguistic distance columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Linguistic {
    #[serde(rename = "PHY")]
    Phy,
    #[serde(rename = "TYP")]
    Typ,
    #[serde(rename = "GEO")]
    Geo,
}

impl Linguistic {
    pub const ALL: [Linguistic; 3] = [Linguistic::Phy, Linguistic::Typ, Linguistic::Geo];

    pub fn name(self) -> &'static str {
        match self {
            Linguistic::Phy => "PHY",
            Linguistic::Typ => "TYP",
            Linguistic::Geo => "GEO",
        }
    }
}

impl fmt::Display for Linguistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfRow {
    pub source: String,
    pub target: String,
    pub task: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub typ: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<f64>,
}

impl PerfRow {
    pub fn new(source: &str, target: &str, task: &str, score: f64) -> Self {
        PerfRow {
            source: source.to_string(),
            target: target.to_string(),
            task: task.to_string(),
            score,
            phy: None,
            typ: None,
            geo: None,
        }
    }

    pub fn with_distances(mut self, phy: f64, typ: f64, geo: f64) -> Self {
        self.phy = Some(phy);
        self.typ = Some(typ);
        self.geo = Some(geo);
        self
    }

    pub fn linguistic(&self, which: Linguistic) -> Option<f64> {
        match which {
            Linguistic::Phy => self.phy,
            Linguistic::Typ => self.typ,
            Linguistic::Geo => self.geo,
        }
    }
}

/// Scores for (source, target, task) triples, with optional PHY/TYP/GEO.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PerfRow>", into = "Vec<PerfRow>")]
pub struct PerformanceTable {
    rows: Vec<PerfRow>,
}

impl TryFrom<Vec<PerfRow>> for PerformanceTable {
    type Error = Error;

    fn try_from(rows: Vec<PerfRow>) -> Result<Self> {
        PerformanceTable::new(rows)
    }
}

impl From<PerformanceTable> for Vec<PerfRow> {
    fn from(t: PerformanceTable) -> Self {
        t.rows
    }
}

impl PerformanceTable {
    /// Rejects duplicate keys, non-finite scores and negative or
    /// non-finite distances.
    pub fn new(rows: Vec<PerfRow>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &rows {
            let key = (r.source.as_str(), r.target.as_str(), r.task.as_str());
            if !seen.insert(key) {
                return Err(Error::invalid(format!(
                    "duplicate performance row {} -> {} ({})",
                    r.source, r.target, r.task
                )));
            }
            if !r.score.is_finite() {
                return Err(Error::invalid(format!("score for {} -> {} is {}", r.source, r.target, r.score)));
            }
            for l in Linguistic::ALL {
                if let Some(v) = r.linguistic(l) {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::invalid(format!("{l} for {} -> {} is {v}", r.source, r.target)));
                    }
                }
            }
        }
        Ok(PerformanceTable { rows })
    }

    pub fn rows(&self) -> &[PerfRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct task names in first-seen order.
    pub fn tasks(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.task.as_str()) {
                out.push(&r.task);
            }
        }
        out
    }

    /// Rows for `task`, or all rows when `task` is `None`.
    pub fn filter_task<'a>(&'a self, task: Option<&'a str>) -> impl Iterator<Item = &'a PerfRow> + 'a {
        self.rows.iter().filter(move |r| task.map_or(true, |t| r.task == t))
    }

    /// Reads `source,target,task,score[,phy,typ,geo]`. Distance cells may be
    /// left empty.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (Some(src), Some(tgt), Some(task), Some(score)) = (col("source"), col("target"), col("task"), col("score"))
        else {
            return Err(Error::invalid(format!(
                "performance table header must contain source,target,task,score; got {}",
                headers.join(",")
            )));
        };
        let (phy, typ, geo) = (col("phy"), col("typ"), col("geo"));
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let text = |k: usize| rec.get(k).unwrap_or("");
            let num = |k: usize, name: &str| -> Result<f64> {
                text(k)
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("performance table line {line}: bad {name} {:?}", text(k))))
            };
            let opt = |k: Option<usize>, name: &str| -> Result<Option<f64>> {
                match k {
                    Some(k) if !text(k).is_empty() => num(k, name).map(Some),
                    _ => Ok(None),
                }
            };
            rows.push(PerfRow {
                source: text(src).to_string(),
                target: text(tgt).to_string(),
                task: text(task).to_string(),
                score: num(score, "score")?,
                phy: opt(phy, "phy")?,
                typ: opt(typ, "typ")?,
                geo: opt(geo, "geo")?,
            });
        }
        Self::new(rows)
    }

    /// Writes the distance columns only if some row has them.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let with_dist = self.rows.iter().any(|r| r.phy.is_some() || r.typ.is_some() || r.geo.is_some());
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let mut header = vec!["source", "target", "task", "score"];
        if with_dist {
            header.extend(["phy", "typ", "geo"]);
        }
        w.write_record(&header)?;
        let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![r.source.clone(), r.target.clone(), r.task.clone(), r.score.to_string()];
            if with_dist {
                rec.extend([cell(r.phy), cell(r.typ), cell(r.geo)]);
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
