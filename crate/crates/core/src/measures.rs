//! Pairwise isomorphism measures between embedding spaces.
//!
//! SVG compares the log singular spectra directly; COND-HM and ECOND-HM
//! combine the two spaces' (effective) condition numbers with a harmonic
//! mean. IS and GH from [`crate::baselines`] are scored through the same
//! batch machinery so every measure ends up as a [`PairScore`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baselines::{self, IsParams, LaplacianSpectrum, PersistenceDiagram};
use crate::spectral::{singular_values_with, Spectrum};
use crate::{EmbeddingSpace, Error, Exec, Result};

/// The five distance measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "SVG")]
    Svg,
    #[serde(rename = "COND-HM")]
    CondHm,
    #[serde(rename = "ECOND-HM")]
    EcondHm,
    #[serde(rename = "GH")]
    Gh,
    #[serde(rename = "IS")]
    Is,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::Svg, Measure::CondHm, Measure::EcondHm, Measure::Gh, Measure::Is];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Svg => "SVG",
            Measure::CondHm => "COND-HM",
            Measure::EcondHm => "ECOND-HM",
            Measure::Gh => "GH",
            Measure::Is => "IS",
        }
    }

    /// Whether the measure is computed from singular spectra.
    pub fn is_spectral(self) -> bool {
        matches!(self, Measure::Svg | Measure::CondHm | Measure::EcondHm)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown measure {s:?} (expected svg, cond-hm, econd-hm, gh, is)")))
    }
}

/// How two per-space condition numbers are combined into one distance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    /// Harmonic mean; leans towards the smaller value.
    #[default]
    Hm,
    Min,
    Max,
}

impl Combiner {
    pub fn combine(self, a: f64, b: f64) -> Result<f64> {
        match self {
            Combiner::Hm => harmonic_mean(a, b),
            Combiner::Min => Ok(a.min(b)),
            Combiner::Max => Ok(a.max(b)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Combiner::Hm => "hm",
            Combiner::Min => "min",
            Combiner::Max => "max",
        }
    }
}

impl FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hm" | "harmonic" => Ok(Combiner::Hm),
            "min" => Ok(Combiner::Min),
            "max" => Ok(Combiner::Max),
            _ => Err(Error::invalid(format!("unknown combiner {s:?} (expected hm, min, max)"))),
        }
    }
}

/// 2ab / (a + b) for positive a, b.
pub fn harmonic_mean(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("harmonic mean needs positive finite inputs, got {a} and {b}")));
    }
    // a·b can overflow for huge condition numbers; this form cannot
    Ok(2.0 / (1.0 / a + 1.0 / b))
}

/// How many leading singular values SVG compares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopK {
    #[default]
    All,
    First(usize),
}

impl TopK {
    fn to_value(self) -> Value {
        match self {
            TopK::All => Value::from("all"),
            TopK::First(k) => Value::from(k),
        }
    }
}

impl fmt::Display for TopK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopK::All => f.write_str("all"),
            TopK::First(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for TopK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(TopK::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(TopK::First(k)),
            _ => Err(Error::invalid(format!("top-k must be a positive integer or \"all\", got {s:?}"))),
        }
    }
}

/// One measure value for an unordered pair of spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub lang_a: String,
    pub lang_b: String,
    pub measure: Measure,
    pub value: f64,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl PairScore {
    /// Builds a score with the pair in lexicographic order.
    pub fn new(
        lang_a: &str,
        lang_b: &str,
        measure: Measure,
        value: f64,
        params: BTreeMap<String, Value>,
    ) -> Result<Self> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Numerical(format!(
                "{measure} for ({lang_a}, {lang_b}) is {value}, expected a finite nonnegative value"
            )));
        }
        let (a, b) = if lang_a <= lang_b { (lang_a, lang_b) } else { (lang_b, lang_a) };
        Ok(PairScore {
            lang_a: a.to_string(),
            lang_b: b.to_string(),
            measure,
            value,
            params,
        })
    }

    fn sort_key(&self) -> (&str, &str, Measure) {
        (&self.lang_a, &self.lang_b, self.measure)
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Condition numbers combined with `combiner`.
pub fn cond_combined(a: &Spectrum, b: &Spectrum, combiner: Combiner) -> Result<PairScore> {
    let v = combiner.combine(a.condition_number()?, b.condition_number()?)?;
    PairScore::new(a.lang(), b.lang(), Measure::CondHm, v, params(&[("combiner", combiner.name().into())]))
}

/// Harmonic mean of the two condition numbers.
pub fn cond_hm(a: &Spectrum, b: &Spectrum) -> Result<PairScore> {
    cond_combined(a, b, Combiner::Hm)
}

pub fn econd_combined(a: &Spectrum, b: &Spectrum, combiner: Combiner) -> Result<PairScore> {
    let v = combiner.combine(a.effective_condition_number()?, b.effective_condition_number()?)?;
    PairScore::new(a.lang(), b.lang(), Measure::EcondHm, v, params(&[("combiner", combiner.name().into())]))
}

/// Harmonic mean of the two effective condition numbers.
pub fn econd_hm(a: &Spectrum, b: &Spectrum) -> Result<PairScore> {
    econd_combined(a, b, Combiner::Hm)
}

fn log_prefix(s: &Spectrum, k: usize) -> Result<Vec<f64>> {
    let floor = s.floor();
    s.sigma()[..k]
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v <= floor {
                Err(Error::Singular { index: i + 1, value: v, floor })
            } else {
                Ok(v.ln())
            }
        })
        .collect()
}

/// Singular value gap: Σᵢ (ln σᵢᵃ − ln σᵢᵇ)² over the first k values.
pub fn svg(a: &Spectrum, b: &Spectrum, top_k: TopK) -> Result<PairScore> {
    let common = a.d().min(b.d());
    let k = match top_k {
        TopK::All => common,
        TopK::First(k) => k.min(common),
    };
    if a.d() != b.d() && (top_k == TopK::All || k < match top_k {
        TopK::First(k) => k,
        TopK::All => usize::MAX,
    }) {
        log::warn!(
            "SVG({}, {}): spectra have {} and {} values; comparing the first {k}",
            a.lang(),
            b.lang(),
            a.d(),
            b.d()
        );
    }
    let la = log_prefix(a, k)?;
    let lb = log_prefix(b, k)?;
    let v = la.iter().zip(&lb).map(|(x, y)| (x - y) * (x - y)).sum();
    PairScore::new(a.lang(), b.lang(), Measure::Svg, v, params(&[("svg_top_k", top_k.to_value())]))
}

/// Parameters for batch scoring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairwiseParams {
    pub svg_top_k: TopK,
    pub combiner: Combiner,
    pub is: IsParams,
    pub gh_sample: usize,
    /// Mean-center spaces before computing spectra.
    pub center: bool,
    pub exec: Exec,
}

impl Default for PairwiseParams {
    fn default() -> Self {
        PairwiseParams {
            svg_top_k: TopK::All,
            combiner: Combiner::Hm,
            is: IsParams::default(),
            gh_sample: baselines::GH_SAMPLE,
            center: true,
            exec: Exec::default(),
        }
    }
}

/// Per-space quantities the requested measures need, each computed once.
/// Failures are kept as messages so they can be reported per pair.
#[derive(Clone, Debug)]
pub struct SpaceSummary {
    pub lang: String,
    pub spectrum: Option<std::result::Result<Spectrum, String>>,
    pub laplacian: Option<std::result::Result<LaplacianSpectrum, String>>,
    pub diagram: Option<std::result::Result<PersistenceDiagram, String>>,
}

impl SpaceSummary {
    /// Computes what `measures` need from one space. The graph and distance
    /// based quantities use the space as given; the spectrum is taken after
    /// mean centering when `params.center` is set.
    pub fn compute(space: EmbeddingSpace, measures: &BTreeSet<Measure>, params: &PairwiseParams) -> Self {
        let lang = space.lang().to_string();
        let laplacian = measures
            .contains(&Measure::Is)
            .then(|| baselines::space_laplacian(&space, &params.is, params.exec).map_err(|e| e.to_string()));
        let diagram = measures
            .contains(&Measure::Gh)
            .then(|| baselines::space_diagram(&space, params.gh_sample, params.exec).map_err(|e| e.to_string()));
        let spectrum = measures.iter().any(|m| m.is_spectral()).then(|| {
            let space = if params.center && !space.is_mean_centered() {
                space.mean_center()
            } else {
                space
            };
            singular_values_with(&space, params.exec).map_err(|e| e.to_string())
        });
        SpaceSummary {
            lang,
            spectrum,
            laplacian,
            diagram,
        }
    }

    /// Summary with a precomputed spectrum.
    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        SpaceSummary {
            lang: spectrum.lang().to_string(),
            spectrum: Some(Ok(spectrum)),
            laplacian: None,
            diagram: None,
        }
    }
}

/// A pair/measure cell that could not be computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub lang_a: String,
    pub lang_b: String,
    pub measure: Measure,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairwiseResult {
    pub scores: Vec<PairScore>,
    pub failures: Vec<PairFailure>,
}

fn need<'a, T>(slot: &'a Option<std::result::Result<T, String>>, lang: &str, what: &str) -> Result<&'a T> {
    match slot {
        Some(Ok(v)) => Ok(v),
        Some(Err(e)) => Err(Error::invalid(format!("{lang}: {e}"))),
        None => Err(Error::invalid(format!("{lang}: {what} was not computed"))),
    }
}

fn score_pair(a: &SpaceSummary, b: &SpaceSummary, measure: Measure, p: &PairwiseParams) -> Result<PairScore> {
    match measure {
        Measure::Svg => svg(need(&a.spectrum, &a.lang, "spectrum")?, need(&b.spectrum, &b.lang, "spectrum")?, p.svg_top_k),
        Measure::CondHm => cond_combined(
            need(&a.spectrum, &a.lang, "spectrum")?,
            need(&b.spectrum, &b.lang, "spectrum")?,
            p.combiner,
        ),
        Measure::EcondHm => econd_combined(
            need(&a.spectrum, &a.lang, "spectrum")?,
            need(&b.spectrum, &b.lang, "spectrum")?,
            p.combiner,
        ),
        Measure::Gh => {
            let v = baselines::bottleneck_distance(
                need(&a.diagram, &a.lang, "persistence diagram")?,
                need(&b.diagram, &b.lang, "persistence diagram")?,
            );
            PairScore::new(&a.lang, &b.lang, measure, v, params(&[("gh_sample", p.gh_sample.into())]))
        }
        Measure::Is => {
            let v = baselines::isospectrality_from_spectra(
                need(&a.laplacian, &a.lang, "Laplacian spectrum")?,
                need(&b.laplacian, &b.lang, "Laplacian spectrum")?,
                p.is.mass,
            )?;
            PairScore::new(
                &a.lang,
                &b.lang,
                measure,
                v,
                params(&[
                    ("is_top_n", p.is.top_n.into()),
                    ("is_k", p.is.k.into()),
                    ("is_mass", p.is.mass.into()),
                ]),
            )
        }
    }
}

/// Scores every unordered pair of summaries for every requested measure.
/// Output is sorted by (lang_a, lang_b, measure).
pub fn pairwise_from_summaries(
    summaries: &[SpaceSummary],
    measures: &BTreeSet<Measure>,
    params: &PairwiseParams,
) -> PairwiseResult {
    let cells: Vec<(usize, usize, Measure)> = (0..summaries.len())
        .flat_map(|i| (i + 1..summaries.len()).map(move |j| (i, j)))
        .flat_map(|(i, j)| measures.iter().map(move |&m| (i, j, m)))
        .collect();
    let results = params
        .exec
        .map_slice(&cells, |&(i, j, m)| score_pair(&summaries[i], &summaries[j], m, params));
    let mut out = PairwiseResult::default();
    for (&(i, j, m), r) in cells.iter().zip(results) {
        match r {
            Ok(s) => out.scores.push(s),
            Err(e) => {
                let (a, b) = (&summaries[i].lang, &summaries[j].lang);
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                out.failures.push(PairFailure {
                    lang_a: a.clone(),
                    lang_b: b.clone(),
                    measure: m,
                    reason: e.to_string(),
                });
            }
        }
    }
    out.scores.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    out.failures
        .sort_by(|x, y| (&x.lang_a, &x.lang_b, x.measure).cmp(&(&y.lang_a, &y.lang_b, y.measure)));
    out
}

/// Summarizes each space once, then scores all pairs.
pub fn pairwise_matrix(
    spaces: &[EmbeddingSpace],
    measures: &BTreeSet<Measure>,
    params: &PairwiseParams,
) -> Result<PairwiseResult> {
    if spaces.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 spaces, got {}", spaces.len())));
    }
    if measures.is_empty() {
        return Err(Error::invalid("no measures requested"));
    }
    let summaries = params
        .exec
        .map_slice(spaces, |s| SpaceSummary::compute(s.clone(), measures, params));
    Ok(pairwise_from_summaries(&summaries, measures, params))
}

/// Writes scores as CSV: `lang_a,lang_b,measure,value,params_json`.
pub fn write_scores_csv<W: Write>(w: W, scores: &[PairScore]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    w.write_record(["lang_a", "lang_b", "measure", "value", "params_json"])?;
    for s in scores {
        w.write_record([
            s.lang_a.as_str(),
            s.lang_b.as_str(),
            s.measure.name(),
            &s.value.to_string(),
            &serde_json::to_string(&s.params)?,
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_scores_csv<R: Read>(r: R) -> Result<Vec<PairScore>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |k: usize, name: &str| {
            rec.get(k)
                .ok_or_else(|| Error::invalid(format!("pair scores line {line}: missing {name}")))
        };
        let measure: Measure = field(2, "measure")?.parse()?;
        let value: f64 = field(3, "value")?
            .parse()
            .map_err(|_| Error::invalid(format!("pair scores line {line}: bad value")))?;
        let params = match rec.get(4) {
            Some(s) if !s.is_empty() => serde_json::from_str(s)?,
            _ => BTreeMap::new(),
        };
        out.push(PairScore::new(field(0, "lang_a")?, field(1, "lang_b")?, measure, value, params)?);
    }
    Ok(out)
}
