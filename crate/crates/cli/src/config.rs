//! Resolved run configuration and its flat `key = value` file form.
//!
//! Values are layered: built-in defaults, then the config file, then
//! environment variables and flags (clap merges those two, flags winning).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use isospec::analysis::{Linguistic, SelectionMode};
use isospec::baselines::{IsParams, GH_SAMPLE};
use isospec::measures::{Combiner, Measure, TopK};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Stats,
    Distance,
    Correlate,
    Regress,
    Select,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Stats => "stats",
            Command::Distance => "distance",
            Command::Correlate => "correlate",
            Command::Regress => "regress",
            Command::Select => "select",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Command::Stats, Command::Distance, Command::Correlate, Command::Regress, Command::Select]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?} (expected csv, json or text)")),
        }
    }
}

/// An embedding file, optionally tagged `LANG=PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSpec {
    pub lang: Option<String>,
    pub path: PathBuf,
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty input path".into());
        }
        match s.split_once('=') {
            Some((lang, path)) if !lang.is_empty() && !lang.contains(['/', '\\']) => {
                if path.is_empty() {
                    return Err(format!("input {s:?} has no path"));
                }
                Ok(InputSpec {
                    lang: Some(lang.to_string()),
                    path: path.into(),
                })
            }
            _ => Ok(InputSpec {
                lang: None,
                path: s.into(),
            }),
        }
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lang {
            Some(l) => write!(f, "{l}={}", self.path.display()),
            None => write!(f, "{}", self.path.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<InputSpec>,
    pub pairs: Option<PathBuf>,
    pub perf: Option<PathBuf>,
    pub task: Option<String>,
    /// Measures to compute (distance) or compare (select). Empty for select
    /// means every measure in the pair table.
    pub measures: Vec<Measure>,
    pub limit: usize,
    pub normalize: bool,
    pub center: bool,
    pub svg_top_k: TopK,
    pub combiner: Combiner,
    pub is: IsParams,
    pub gh_sample: usize,
    pub alpha: f64,
    pub mode: SelectionMode,
    /// Regression candidates; empty means every available column.
    pub candidates: Vec<String>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub plot_measure: Option<Measure>,
    pub workers: Option<usize>,
    pub cache: bool,
    pub cache_dir: Option<PathBuf>,
}

pub const DEFAULT_LIMIT: usize = 200_000;

/// Every key the file form accepts.
pub const KEYS: &[&str] = &[
    "command",
    "inputs",
    "pairs",
    "perf",
    "task",
    "measures",
    "limit",
    "normalize",
    "center",
    "svg_top_k",
    "combiner",
    "is_top_n",
    "is_k",
    "is_mass",
    "gh_sample",
    "alpha",
    "mode",
    "candidates",
    "format",
    "output",
    "plot",
    "plot_measure",
    "workers",
    "cache",
    "cache_dir",
];

fn default_measures(command: Command) -> Vec<Measure> {
    match command {
        Command::Distance => vec![Measure::Svg, Measure::CondHm, Measure::EcondHm],
        _ => Vec::new(),
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError>
where
    T::Err: fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::input(format!("{key}: {e}"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    v.trim()
        .parse::<T>()
        .map_err(|e| CliError::input(format!("invalid value {v:?} for {key}: {e}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::input(format!("invalid value {v:?} for {key}: expected true or false"))),
    }
}

fn opt_path(v: &str) -> Option<PathBuf> {
    let v = v.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            inputs: Vec::new(),
            pairs: None,
            perf: None,
            task: None,
            measures: default_measures(command),
            limit: DEFAULT_LIMIT,
            normalize: true,
            center: true,
            svg_top_k: TopK::All,
            combiner: Combiner::Hm,
            is: IsParams::default(),
            gh_sample: GH_SAMPLE,
            alpha: 0.01,
            mode: SelectionMode::SourceSelection,
            candidates: Vec::new(),
            format: Format::Csv,
            output: None,
            plot: None,
            plot_measure: None,
            workers: None,
            cache: true,
            cache_dir: None,
        }
    }

    /// Builds a config from string values; `command` must be present.
    pub fn from_kv(kv: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let command: Command = match kv.get("command") {
            Some(c) => parse_one("command", c)?,
            None => return Err(CliError::input("no command given")),
        };
        let mut c = RunConfig::defaults(command);
        for (key, v) in kv {
            let key = key.as_str();
            match key {
                "command" => {}
                "inputs" => c.inputs = parse_list(key, v)?,
                "pairs" => c.pairs = opt_path(v),
                "perf" => c.perf = opt_path(v),
                "task" => c.task = Some(v.trim().to_string()).filter(|s| !s.is_empty()),
                "measures" => c.measures = parse_list(key, v)?,
                "limit" => c.limit = parse_one(key, v)?,
                "normalize" => c.normalize = parse_bool(key, v)?,
                "center" => c.center = parse_bool(key, v)?,
                "svg_top_k" => c.svg_top_k = parse_one(key, v)?,
                "combiner" => c.combiner = parse_one(key, v)?,
                "is_top_n" => c.is.top_n = parse_one(key, v)?,
                "is_k" => c.is.k = parse_one(key, v)?,
                "is_mass" => c.is.mass = parse_one(key, v)?,
                "gh_sample" => c.gh_sample = parse_one(key, v)?,
                "alpha" => c.alpha = parse_one(key, v)?,
                "mode" => c.mode = parse_one(key, v)?,
                "candidates" => c.candidates = parse_list(key, v)?,
                "format" => c.format = parse_one(key, v)?,
                "output" => c.output = opt_path(v),
                "plot" => c.plot = opt_path(v),
                "plot_measure" => c.plot_measure = if v.trim().is_empty() { None } else { Some(parse_one(key, v)?) },
                "workers" => c.workers = if v.trim().is_empty() { None } else { Some(parse_one(key, v)?) },
                "cache" => c.cache = parse_bool(key, v)?,
                "cache_dir" => c.cache_dir = opt_path(v),
                _ => return Err(CliError::input(format!("unknown config key {key:?}"))),
            }
        }
        Ok(c)
    }

    /// Every setting as strings; `from_kv` inverts this exactly.
    pub fn to_kv(&self) -> BTreeMap<String, String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            kv.insert(k.to_string(), v);
        };
        put("command", self.command.name().into());
        put("inputs", join(&self.inputs));
        put("measures", join(&self.measures));
        put("limit", self.limit.to_string());
        put("normalize", self.normalize.to_string());
        put("center", self.center.to_string());
        put("svg_top_k", self.svg_top_k.to_string());
        put("combiner", self.combiner.name().into());
        put("is_top_n", self.is.top_n.to_string());
        put("is_k", self.is.k.to_string());
        put("is_mass", self.is.mass.to_string());
        put("gh_sample", self.gh_sample.to_string());
        put("alpha", self.alpha.to_string());
        put("mode", self.mode.name().into());
        put("candidates", self.candidates.join(","));
        put("format", self.format.name().into());
        put("cache", self.cache.to_string());
        for (k, v) in [
            ("pairs", path(&self.pairs)),
            ("perf", path(&self.perf)),
            ("task", self.task.clone()),
            ("output", path(&self.output)),
            ("plot", path(&self.plot)),
            ("plot_measure", self.plot_measure.map(|m| m.name().to_string())),
            ("workers", self.workers.map(|w| w.to_string())),
            ("cache_dir", path(&self.cache_dir)),
        ] {
            if let Some(v) = v {
                put(k, v);
            }
        }
        kv
    }

    pub fn to_file_string(&self) -> String {
        self.to_kv().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Checks parameter ranges and per-command requirements. Runs before
    /// any file is opened.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::input(m));
        if self.limit == 0 {
            return bad("limit must be positive".into());
        }
        if self.is.k == 0 {
            return bad("is_k must be positive".into());
        }
        if self.is.top_n <= self.is.k {
            return bad(format!("is_top_n ({}) must exceed is_k ({})", self.is.top_n, self.is.k));
        }
        if !(self.is.mass > 0.0 && self.is.mass <= 1.0) {
            return bad(format!("is_mass must be in (0, 1], got {}", self.is.mass));
        }
        if self.gh_sample < 2 {
            return bad("gh_sample must be at least 2".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        for c in &self.candidates {
            if c.parse::<Measure>().is_err() && !Linguistic::ALL.iter().any(|l| l.name().eq_ignore_ascii_case(c)) {
                return bad(format!("unknown regression candidate {c:?}"));
            }
        }
        match self.command {
            Command::Stats if self.inputs.is_empty() => bad("stats needs at least one embedding file".into()),
            Command::Distance if self.inputs.len() < 2 => {
                bad(format!("distance needs at least two embedding files, got {}", self.inputs.len()))
            }
            Command::Distance if self.measures.is_empty() => bad("no measures requested".into()),
            Command::Correlate | Command::Regress | Command::Select if self.pairs.is_none() || self.perf.is_none() => {
                bad(format!("{} needs --pairs and --perf", self.command.name()))
            }
            _ => Ok(()),
        }
    }
}

/// Parses the file form: `key = value` lines, `#` comments, blank lines.
pub fn parse_config_text(text: &str, origin: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut kv = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::input(format!("{origin}:{}: expected key = value", i + 1)));
        };
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::input(format!("{origin}:{}: unknown key {k:?}", i + 1)));
        }
        kv.insert(k, v.trim().to_string());
    }
    Ok(kv)
}
