use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use isospec::analysis::{
    correlate_measures, join, selection_analysis, stepwise_regression, Joined, JoinedRow, Linguistic,
    PerformanceTable, RegressionReport, SelectionReport,
};
use isospec::embedio::{lang_from_path, load_embeddings, LoadOptions};
use isospec::measures::{
    pairwise_from_summaries, read_scores_csv, write_scores_csv, PairFailure, PairwiseParams, SpaceSummary,
};
use isospec::spectral::singular_values_with;
use isospec::{EmbeddingSpace, Error, Exec, Measure, PairScore, Spectrum};
use serde::Serialize;

use crate::cache::SpectrumCache;
use crate::config::{Format, InputSpec, RunConfig};
use crate::plot::scatter_svg;
use crate::CliError;

/// What a command produced: the report bytes and how many pair
/// computations failed.
pub struct Outcome {
    pub body: Vec<u8>,
    pub failures: usize,
}

impl Outcome {
    fn ok(body: Vec<u8>) -> Self {
        Outcome { body, failures: 0 }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    use crate::config::Command::*;
    match cfg.command {
        Stats => stats(cfg),
        Distance => distance(cfg),
        Correlate => correlate(cfg),
        Regress => regress(cfg),
        Select => select(cfg),
    }
}

fn label(input: &InputSpec) -> String {
    input.lang.clone().unwrap_or_else(|| lang_from_path(&input.path))
}

fn load(cfg: &RunConfig, input: &InputSpec, lang: &str, limit: usize) -> Result<EmbeddingSpace, CliError> {
    let opts = LoadOptions {
        limit: Some(limit),
        lang: Some(lang.to_string()),
        ..Default::default()
    };
    let loaded = load_embeddings(&input.path, &opts)?;
    if loaded.duplicates > 0 {
        log::warn!("{}: dropped {} duplicate tokens", input.path.display(), loaded.duplicates);
    }
    let space = loaded.space;
    log::info!("{}: loaded {} x {}", input.path.display(), space.n(), space.d());
    Ok(if cfg.normalize {
        space.length_normalize_with(Exec::default())?
    } else {
        space
    })
}

fn cache_of(cfg: &RunConfig) -> Option<SpectrumCache> {
    cfg.cache.then(|| SpectrumCache::new(cfg.cache_dir.clone()))
}

fn cache_key(cfg: &RunConfig, cache: Option<&SpectrumCache>, path: &Path) -> Option<String> {
    cache?;
    let params = format!(
        "limit={} normalize={} center={}",
        cfg.limit, cfg.normalize, cfg.center
    );
    SpectrumCache::key(path, &params)
        .map_err(|e| log::debug!("no cache key for {}: {e}", path.display()))
        .ok()
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn json_body<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
    body.push(b'\n');
    Ok(body)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::internal(format!("writing csv: {e}"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct StatsRow {
    lang: String,
    path: String,
    n: usize,
    d: usize,
    entropy: f64,
    erank: usize,
    numerical_rank: usize,
    /// Absent when the spectrum is singular.
    kappa: Option<f64>,
    kappa_ecn: Option<f64>,
    sigma: Vec<f64>,
}

const TOP_SIGMA: usize = 10;

fn stats_row(lang: String, path: &Path, n: usize, s: &Spectrum) -> Result<StatsRow, CliError> {
    let finite = |r: isospec::Result<f64>, what: &str| match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ Error::Singular { .. }) => {
            log::warn!("{lang}: {what} undefined: {e}");
            Ok(None)
        }
        Err(e) => Err(e),
    };
    Ok(StatsRow {
        path: path.display().to_string(),
        n,
        d: s.d(),
        entropy: s.entropy()?,
        erank: s.effective_rank()?,
        numerical_rank: s.numerical_rank(),
        kappa: finite(s.condition_number(), "kappa")?,
        kappa_ecn: finite(s.effective_condition_number(), "kappa_ecn")?,
        sigma: s.sigma().iter().take(TOP_SIGMA).copied().collect(),
        lang,
    })
}

fn stats(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cache = cache_of(cfg);
    let mut rows = Vec::with_capacity(cfg.inputs.len());
    for input in &cfg.inputs {
        let lang = label(input);
        let key = cache_key(cfg, cache.as_ref(), &input.path);
        let hit = key
            .as_deref()
            .and_then(|k| cache.as_ref()?.get(&input.path, k, &lang));
        let (n, spectrum) = match hit {
            Some(c) => (c.n, c.spectrum),
            None => {
                let space = load(cfg, input, &lang, cfg.limit)?;
                let n = space.n();
                let space = if cfg.center { space.mean_center() } else { space };
                let s = singular_values_with(&space, Exec::default())?;
                if let (Some(c), Some(k)) = (&cache, &key) {
                    c.put(&input.path, k, n, &s);
                }
                (n, s)
            }
        };
        rows.push(stats_row(lang, &input.path, n, &spectrum)?);
    }

    let body = match cfg.format {
        Format::Json => json_body(&rows)?,
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv_writer(&mut buf);
                let mut header: Vec<String> = [
                    "lang",
                    "path",
                    "n",
                    "d",
                    "entropy",
                    "erank",
                    "numerical_rank",
                    "kappa",
                    "kappa_ecn",
                ]
                .map(String::from)
                .to_vec();
                header.extend((1..=TOP_SIGMA).map(|i| format!("sigma_{i}")));
                w.write_record(&header).map_err(csv_err)?;
                for r in &rows {
                    let mut rec = vec![
                        r.lang.clone(),
                        r.path.clone(),
                        r.n.to_string(),
                        r.d.to_string(),
                        r.entropy.to_string(),
                        r.erank.to_string(),
                        r.numerical_rank.to_string(),
                        opt(r.kappa),
                        opt(r.kappa_ecn),
                    ];
                    rec.extend((0..TOP_SIGMA).map(|i| opt(r.sigma.get(i).copied())));
                    w.write_record(&rec).map_err(csv_err)?;
                }
                w.flush().map_err(|e| CliError::internal(e.to_string()))?;
            }
            buf
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let k = |v: Option<f64>| v.map_or("inf".to_string(), |v| format!("{v:.4}"));
                s.push_str(&format!(
                    "{}  n={} d={} entropy={:.4} erank={} rank={} kappa={} kappa_ecn={}\n",
                    r.lang,
                    r.n,
                    r.d,
                    r.entropy,
                    r.erank,
                    r.numerical_rank,
                    k(r.kappa),
                    k(r.kappa_ecn)
                ));
            }
            s.into_bytes()
        }
    };
    Ok(Outcome::ok(body))
}

/// Labels made unique by suffixing repeats with `#2`, `#3`, ...
fn unique_labels(inputs: &[InputSpec]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    inputs
        .iter()
        .map(|i| {
            let base = label(i);
            let count = seen.entry(base.clone()).or_insert(0);
            *count += 1;
            if *count == 1 {
                base
            } else {
                let l = format!("{base}#{count}");
                log::warn!("language tag {base:?} repeats; using {l:?} for {}", i.path.display());
                l
            }
        })
        .collect()
}

#[derive(Serialize)]
struct DistanceReport<'a> {
    scores: &'a [PairScore],
    failures: &'a [PairFailure],
}

fn distance(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let measures: BTreeSet<Measure> = cfg.measures.iter().copied().collect();
    let spectral = measures.iter().any(|m| m.is_spectral());
    let baseline: BTreeSet<Measure> = measures.iter().copied().filter(|m| !m.is_spectral()).collect();
    let baseline_rows = baseline
        .iter()
        .map(|m| match m {
            Measure::Gh => cfg.gh_sample,
            Measure::Is => cfg.is.top_n,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let params = PairwiseParams {
        svg_top_k: cfg.svg_top_k,
        combiner: cfg.combiner,
        is: cfg.is,
        gh_sample: cfg.gh_sample,
        center: cfg.center,
        exec: Exec::default(),
    };
    let cache = if spectral { cache_of(cfg) } else { None };

    let mut summaries = Vec::with_capacity(cfg.inputs.len());
    for (input, lang) in cfg.inputs.iter().zip(unique_labels(&cfg.inputs)) {
        let key = cache_key(cfg, cache.as_ref(), &input.path);
        let hit = key
            .as_deref()
            .and_then(|k| cache.as_ref()?.get(&input.path, k, &lang));
        let summary = match hit {
            Some(c) if baseline.is_empty() => SpaceSummary::from_spectrum(c.spectrum),
            Some(c) => {
                let space = load(cfg, input, &lang, cfg.limit.min(baseline_rows))?;
                let mut s = SpaceSummary::compute(space, &baseline, &params);
                s.spectrum = Some(Ok(c.spectrum));
                s
            }
            None => {
                let limit = if spectral { cfg.limit } else { cfg.limit.min(baseline_rows) };
                let space = load(cfg, input, &lang, limit)?;
                let n = space.n();
                let s = SpaceSummary::compute(space, &measures, &params);
                if let (Some(c), Some(k), Some(Ok(sp))) = (&cache, &key, &s.spectrum) {
                    c.put(&input.path, k, n, sp);
                }
                s
            }
        };
        summaries.push(summary);
    }

    let result = pairwise_from_summaries(&summaries, &measures, &params);
    for f in &result.failures {
        log::warn!("{} {}-{}: {}", f.measure, f.lang_a, f.lang_b, f.reason);
    }
    if result.scores.is_empty() {
        let first = result.failures.first().map_or(String::new(), |f| format!("; first: {}", f.reason));
        return Err(CliError::input(format!(
            "all {} pair computations failed{first}",
            result.failures.len()
        )));
    }
    let body = match cfg.format {
        Format::Json => json_body(&DistanceReport {
            scores: &result.scores,
            failures: &result.failures,
        })?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_scores_csv(&mut buf, &result.scores)?;
            buf
        }
        Format::Text => {
            let mut s = String::new();
            for p in &result.scores {
                s.push_str(&format!("{}-{}  {:<8} {:.6}\n", p.lang_a, p.lang_b, p.measure.name(), p.value));
            }
            for f in &result.failures {
                s.push_str(&format!("{}-{}  {:<8} failed: {}\n", f.lang_a, f.lang_b, f.measure.name(), f.reason));
            }
            s.into_bytes()
        }
    };
    Ok(Outcome {
        body,
        failures: result.failures.len(),
    })
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn with_path(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

/// Pair scores as written by `distance`, in CSV or JSON.
fn read_pairs(path: &Path) -> Result<Vec<PairScore>, CliError> {
    let reader = open(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum PairsJson {
            Report { scores: Vec<PairScore> },
            List(Vec<PairScore>),
        }
        let parsed: PairsJson = serde_json::from_reader(reader).map_err(|e| with_path(path)(e.into()))?;
        let scores = match parsed {
            PairsJson::Report { scores } | PairsJson::List(scores) => scores,
        };
        // re-validate through the constructor
        scores
            .into_iter()
            .map(|s| PairScore::new(&s.lang_a, &s.lang_b, s.measure, s.value, s.params))
            .collect::<isospec::Result<_>>()
            .map_err(with_path(path))
    } else {
        read_scores_csv(reader).map_err(with_path(path))
    }
}

struct Tables {
    pairs: Vec<PairScore>,
    perf: PerformanceTable,
}

fn read_tables(cfg: &RunConfig) -> Result<Tables, CliError> {
    let (Some(pp), Some(fp)) = (&cfg.pairs, &cfg.perf) else {
        return Err(CliError::input("--pairs and --perf are required"));
    };
    let pairs = read_pairs(pp)?;
    let perf = PerformanceTable::read_csv(open(fp)?).map_err(with_path(fp))?;
    if cfg.task.is_none() {
        let tasks = perf.tasks();
        if tasks.len() > 1 {
            return Err(CliError::input(format!(
                "performance table has several tasks ({}); choose one with --task",
                tasks.join(", ")
            )));
        }
    }
    Ok(Tables { pairs, perf })
}

fn warn_unmatched(unmatched: &[(String, String)]) {
    if !unmatched.is_empty() {
        let sample: Vec<String> = unmatched.iter().take(5).map(|(s, t)| format!("{s}->{t}")).collect();
        log::warn!(
            "{} performance rows had no pair scores (first: {})",
            unmatched.len(),
            sample.join(", ")
        );
    }
}

fn ln_named(v: f64, r: &JoinedRow, what: &str) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(CliError::input(format!(
            "cannot take the log of {what} = {v} for {}->{}",
            r.source, r.target
        )))
    }
}

fn correlate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = read_tables(cfg)?;
    let task = cfg.task.as_deref();
    let table = correlate_measures(&t.pairs, &t.perf, task)?;
    warn_unmatched(&table.unmatched);

    if let Some(plot_path) = &cfg.plot {
        let joined = join(&t.pairs, &t.perf, task)?;
        let measure = match cfg.plot_measure {
            Some(m) => m,
            None => *joined
                .measures()
                .first()
                .ok_or_else(|| CliError::input("no measures to plot"))?,
        };
        let r = table
            .rows
            .iter()
            .find(|row| row.variable.name() == measure.name())
            .map(|row| row.r)
            .ok_or_else(|| CliError::input(format!("no correlation for {measure} to plot")))?;
        let mut points = Vec::new();
        for row in joined.rows.iter() {
            if let Some(&v) = row.measures.get(&measure) {
                points.push((ln_named(v, row, measure.name())?, ln_named(row.score, row, "score")?));
            }
        }
        let svg = scatter_svg(&points, &format!("ln {measure}"), "ln score", r);
        std::fs::write(plot_path, svg).map_err(|source| Error::Io {
            path: plot_path.clone(),
            source,
        })?;
        log::info!("wrote {}", plot_path.display());
    }

    let body = match cfg.format {
        Format::Json => json_body(&table)?,
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv_writer(&mut buf);
                w.write_record(["variable", "n", "r"]).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record([row.variable.name(), &row.n.to_string(), &row.r.to_string()])
                        .map_err(csv_err)?;
                }
                w.flush().map_err(|e| CliError::internal(e.to_string()))?;
            }
            buf
        }
        Format::Text => {
            let mut s = String::new();
            for row in &table.rows {
                s.push_str(&format!("{:<9} r = {:.3}  (n = {})\n", row.variable.name(), row.r, row.n));
            }
            s.into_bytes()
        }
    };
    Ok(Outcome::ok(body))
}

/// Candidate column name resolved against the joined rows.
#[derive(Clone, Copy)]
enum Column {
    Measure(Measure),
    Linguistic(Linguistic),
}

impl Column {
    fn name(self) -> &'static str {
        match self {
            Column::Measure(m) => m.name(),
            Column::Linguistic(l) => l.name(),
        }
    }

    fn parse(s: &str) -> Option<Column> {
        if let Some(l) = Linguistic::ALL.into_iter().find(|l| l.name().eq_ignore_ascii_case(s)) {
            return Some(Column::Linguistic(l));
        }
        s.parse().ok().map(Column::Measure)
    }

    fn value(self, r: &JoinedRow) -> Option<f64> {
        match self {
            Column::Measure(m) => r.measures.get(&m).copied(),
            Column::Linguistic(l) => r.linguistic.get(&l).copied(),
        }
    }
}

fn default_columns(joined: &Joined) -> Vec<Column> {
    let mut cols: Vec<Column> = joined.measures().into_iter().map(Column::Measure).collect();
    cols.extend(
        Linguistic::ALL
            .into_iter()
            .filter(|l| joined.rows.iter().any(|r| r.linguistic.contains_key(l)))
            .map(Column::Linguistic),
    );
    cols
}

/// Compresses sorted indices into `1,3,6-8`.
fn index_list(mut idx: Vec<usize>) -> String {
    idx.sort_unstable();
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && idx[j + 1] == idx[j] + 1 {
            j += 1;
        }
        parts.push(match j - i {
            0 => idx[i].to_string(),
            1 => format!("{},{}", idx[i], idx[j]),
            _ => format!("{}-{}", idx[i], idx[j]),
        });
        i = j + 1;
    }
    parts.join(",")
}

#[derive(Serialize)]
struct RegressOutput<'a> {
    candidates: Vec<&'static str>,
    #[serde(flatten)]
    report: &'a RegressionReport,
}

fn regress(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = read_tables(cfg)?;
    let joined = join(&t.pairs, &t.perf, cfg.task.as_deref())?;
    warn_unmatched(&joined.unmatched);
    let cols: Vec<Column> = if cfg.candidates.is_empty() {
        default_columns(&joined)
    } else {
        cfg.candidates
            .iter()
            .map(|c| Column::parse(c).ok_or_else(|| CliError::input(format!("unknown regression candidate {c:?}"))))
            .collect::<Result<_, _>>()?
    };
    if cols.is_empty() {
        return Err(CliError::input("no regression candidates"));
    }
    let complete: Vec<&JoinedRow> = joined
        .rows
        .iter()
        .filter(|r| cols.iter().all(|c| c.value(r).is_some()))
        .collect();
    if complete.len() < joined.rows.len() {
        log::warn!(
            "{} of {} joined rows lack some candidate column and were dropped",
            joined.rows.len() - complete.len(),
            joined.rows.len()
        );
    }
    let y: Vec<f64> = complete
        .iter()
        .map(|r| ln_named(r.score, r, "score"))
        .collect::<Result<_, _>>()?;
    let mut candidates = Vec::with_capacity(cols.len());
    for &c in &cols {
        let values: Vec<f64> = complete
            .iter()
            .map(|r| {
                let v = c.value(r).expect("complete row");
                match c {
                    Column::Measure(_) => ln_named(v, r, c.name()),
                    Column::Linguistic(_) => Ok(v),
                }
            })
            .collect::<Result<_, _>>()?;
        candidates.push((c.name().to_string(), values));
    }
    let report = stepwise_regression(&candidates, &y, cfg.alpha)?;
    let names: Vec<&'static str> = cols.iter().map(|c| c.name()).collect();

    let body = match cfg.format {
        Format::Json => json_body(&RegressOutput {
            candidates: names,
            report: &report,
        })?,
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv_writer(&mut buf);
                w.write_record([
                    "term",
                    "beta",
                    "std_error",
                    "p_value",
                    "entry_p_value",
                    "r_squared",
                    "r_hat",
                    "n_obs",
                ])
                .map_err(csv_err)?;
                let terms = std::iter::once("(intercept)").chain(report.selected.iter().map(String::as_str));
                for (i, term) in terms.enumerate() {
                    let p = |v: &[f64]| if i == 0 { String::new() } else { opt(v.get(i - 1).copied()) };
                    w.write_record([
                        term.to_string(),
                        opt(report.beta.get(i).copied()),
                        opt(report.std_errors.get(i).copied()),
                        p(&report.p_values),
                        p(&report.entry_p_values),
                        report.r_squared.to_string(),
                        report.r_hat.to_string(),
                        report.n_obs.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
                w.flush().map_err(|e| CliError::internal(e.to_string()))?;
            }
            buf
        }
        Format::Text => {
            let idx: Vec<usize> = report
                .selected
                .iter()
                .filter_map(|s| names.iter().position(|n| n == s).map(|p| p + 1))
                .collect();
            let sup = if idx.is_empty() { String::new() } else { format!("^{{{}}}", index_list(idx)) };
            let mut s = format!(
                "r̂ = {:.3}{sup}  (R² = {:.3}, n = {})\n",
                report.r_hat, report.r_squared, report.n_obs
            );
            if report.selected.is_empty() {
                s.push_str("no candidate entered the model\n");
            }
            for (i, term) in report.selected.iter().enumerate() {
                s.push_str(&format!(
                    "  {:<9} beta = {:+.4}  p = {:.2e}\n",
                    term,
                    report.beta.get(i + 1).copied().unwrap_or(f64::NAN),
                    report.p_values.get(i).copied().unwrap_or(f64::NAN)
                ));
            }
            let listing: Vec<String> = names.iter().enumerate().map(|(i, n)| format!("{} {n}", i + 1)).collect();
            s.push_str(&format!("candidates: {}\n", listing.join(", ")));
            s.into_bytes()
        }
    };
    Ok(Outcome::ok(body))
}

fn select(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = read_tables(cfg)?;
    let report: SelectionReport = selection_analysis(&t.pairs, &t.perf, cfg.task.as_deref(), cfg.mode, &cfg.measures)?;
    for s in &report.skipped {
        log::warn!("skipped group {} (n = {}): {}", s.group, s.n, s.reason);
    }
    let body = match cfg.format {
        Format::Json => json_body(&report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            {
                let mut w = csv_writer(&mut buf);
                w.write_record(["scope", "group", "n", "measure", "r", "win_pct"])
                    .map_err(csv_err)?;
                let total: usize = report.per_group.iter().map(|g| g.n).sum();
                for m in &report.measures {
                    w.write_record([
                        "mean",
                        "",
                        &total.to_string(),
                        m.name(),
                        &opt(report.mean_correlation.get(m).copied()),
                        &opt(report.win_pct.get(m).copied()),
                    ])
                    .map_err(csv_err)?;
                }
                w.write_record(["multi", "", &total.to_string(), "r_hat", &opt(report.multi_r_hat), ""])
                    .map_err(csv_err)?;
                for g in &report.per_group {
                    for m in &report.measures {
                        let won = if g.winners.contains(m) { 100.0 / g.winners.len() as f64 } else { 0.0 };
                        w.write_record([
                            "group",
                            g.group.as_str(),
                            &g.n.to_string(),
                            m.name(),
                            &opt(g.correlations.get(m).copied()),
                            &won.to_string(),
                        ])
                        .map_err(csv_err)?;
                    }
                    w.write_record(["group_multi", g.group.as_str(), &g.n.to_string(), "r_hat", &opt(g.multi_r_hat), ""])
                        .map_err(csv_err)?;
                }
                w.flush().map_err(|e| CliError::internal(e.to_string()))?;
            }
            buf
        }
        Format::Text => {
            let mut s = format!(
                "{} over {} groups ({} skipped)\n",
                report.mode.name(),
                report.per_group.len(),
                report.skipped.len()
            );
            for m in &report.measures {
                s.push_str(&format!(
                    "{:<9} mean r = {:+.3}  wins = {:.1}%\n",
                    m.name(),
                    report.mean_correlation.get(m).copied().unwrap_or(f64::NAN),
                    report.win_pct.get(m).copied().unwrap_or(0.0)
                ));
            }
            match report.multi_r_hat {
                Some(r) => s.push_str(&format!(
                    "multi r̂ = {r:.3}  ({})\n",
                    report.multi_regressors.join(" + ")
                )),
                None => s.push_str("multi r̂ unavailable\n"),
            }
            s.into_bytes()
        }
    };
    Ok(Outcome::ok(body))
}

/// Writes `body` to the configured output, or stdout.
pub fn emit(cfg: &RunConfig, body: &[u8]) -> Result<(), CliError> {
    match &cfg.output {
        Some(p) => std::fs::write(p, body).map_err(|source| {
            Error::Io {
                path: p.clone(),
                source,
            }
            .into()
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::internal(format!("writing stdout: {e}")))
        }
    }
}
