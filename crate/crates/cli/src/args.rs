//! Command-line flags. Every flag can also be set through an `ISOSPEC_`
//! environment variable; both override the config file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "isospec", version, about = "Spectral isomorphism measures between word embedding spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    /// Settings file with `key = value` lines
    #[arg(long, global = true, env = "ISOSPEC_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output format: csv, json or text
    #[arg(long, global = true, env = "ISOSPEC_FORMAT")]
    pub format: Option<String>,

    /// Write results here instead of stdout
    #[arg(short, long, global = true, env = "ISOSPEC_OUTPUT", value_name = "FILE")]
    pub output: Option<String>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "ISOSPEC_WORKERS")]
    pub workers: Option<String>,

    /// Print the resolved configuration in config-file form and exit
    #[arg(long, global = true)]
    pub print_config: bool,

    /// More log output (repeatable)
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Spectral statistics of each embedding space
    Stats(SpaceArgs),
    /// Pairwise isomorphism measures between embedding spaces
    Distance {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Pearson correlation of each measure with task scores
    Correlate {
        #[command(flatten)]
        table: TableArgs,
        /// Write a scatter plot (SVG) of one measure against scores
        #[arg(long, env = "ISOSPEC_PLOT", value_name = "FILE")]
        plot: Option<String>,
        /// Measure to plot (default: first in the table)
        #[arg(long, env = "ISOSPEC_PLOT_MEASURE")]
        plot_measure: Option<String>,
    },
    /// Forward stepwise regression of task scores on measures and
    /// linguistic distances
    Regress {
        #[command(flatten)]
        table: TableArgs,
        /// Comma-separated candidate columns (default: all available)
        #[arg(long, env = "ISOSPEC_CANDIDATES")]
        candidates: Option<String>,
        /// Entry threshold for the t-test p-value
        #[arg(long, env = "ISOSPEC_ALPHA")]
        alpha: Option<String>,
    },
    /// Source or target language selection analysis
    Select {
        #[command(flatten)]
        table: TableArgs,
        /// source (fixed target) or target (fixed source)
        #[arg(long, env = "ISOSPEC_MODE")]
        mode: Option<String>,
        /// Comma-separated measures to compare (default: all in the table)
        #[arg(long, env = "ISOSPEC_MEASURES")]
        measures: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct SpaceArgs {
    /// Embedding files in word2vec text format, as PATH or LANG=PATH
    pub inputs: Vec<String>,
    /// Keep only the first N words of each file
    #[arg(long, env = "ISOSPEC_LIMIT")]
    pub limit: Option<String>,
    /// Skip length normalization
    #[arg(long, env = "ISOSPEC_NO_NORMALIZE")]
    pub no_normalize: bool,
    /// Skip mean centering before the spectrum
    #[arg(long, env = "ISOSPEC_NO_CENTER")]
    pub no_center: bool,
    /// Do not read or write cached spectra
    #[arg(long, env = "ISOSPEC_NO_CACHE")]
    pub no_cache: bool,
    /// Keep cached spectra here instead of next to the inputs
    #[arg(long, env = "ISOSPEC_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<String>,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    /// Comma-separated: svg, cond-hm, econd-hm, gh, is
    #[arg(long, env = "ISOSPEC_MEASURES")]
    pub measures: Option<String>,
    /// Singular values compared by SVG: a count or "all"
    #[arg(long, env = "ISOSPEC_SVG_TOP_K")]
    pub svg_top_k: Option<String>,
    /// Condition number combiner: hm, min or max
    #[arg(long, env = "ISOSPEC_COMBINER")]
    pub combiner: Option<String>,
    /// Words in the IS nearest-neighbour graph
    #[arg(long, env = "ISOSPEC_IS_TOP_N")]
    pub is_top_n: Option<String>,
    /// Neighbours per word in the IS graph
    #[arg(long, env = "ISOSPEC_IS_K")]
    pub is_k: Option<String>,
    /// Laplacian spectral mass compared by IS
    #[arg(long, env = "ISOSPEC_IS_MASS")]
    pub is_mass: Option<String>,
    /// Words sampled for GH
    #[arg(long, env = "ISOSPEC_GH_SAMPLE")]
    pub gh_sample: Option<String>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Pair scores from `isospec distance` (CSV or JSON)
    #[arg(long, env = "ISOSPEC_PAIRS", value_name = "FILE")]
    pub pairs: Option<String>,
    /// Performance table: source,target,task,score[,phy,typ,geo]
    #[arg(long, env = "ISOSPEC_PERF", value_name = "FILE")]
    pub perf: Option<String>,
    /// Use only rows of this task
    #[arg(long, env = "ISOSPEC_TASK")]
    pub task: Option<String>,
}

impl Cli {
    pub fn command_name(&self) -> &'static str {
        match self.command {
            Sub::Stats(_) => "stats",
            Sub::Distance { .. } => "distance",
            Sub::Correlate { .. } => "correlate",
            Sub::Regress { .. } => "regress",
            Sub::Select { .. } => "select",
        }
    }

    /// Settings given on the command line or through the environment.
    pub fn to_kv(&self) -> BTreeMap<String, String> {
        let mut kv = BTreeMap::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                kv.insert(k.to_string(), v.clone());
            }
        };
        put("command", &Some(self.command_name().to_string()));
        put("format", &self.format);
        put("output", &self.output);
        put("workers", &self.workers);
        match &self.command {
            Sub::Stats(s) => space_kv(s, &mut put),
            Sub::Distance { space, measure } => {
                space_kv(space, &mut put);
                put("measures", &measure.measures);
                put("svg_top_k", &measure.svg_top_k);
                put("combiner", &measure.combiner);
                put("is_top_n", &measure.is_top_n);
                put("is_k", &measure.is_k);
                put("is_mass", &measure.is_mass);
                put("gh_sample", &measure.gh_sample);
            }
            Sub::Correlate {
                table,
                plot,
                plot_measure,
            } => {
                table_kv(table, &mut put);
                put("plot", plot);
                put("plot_measure", plot_measure);
            }
            Sub::Regress {
                table,
                candidates,
                alpha,
            } => {
                table_kv(table, &mut put);
                put("candidates", candidates);
                put("alpha", alpha);
            }
            Sub::Select { table, mode, measures } => {
                table_kv(table, &mut put);
                put("mode", mode);
                put("measures", measures);
            }
        }
        kv
    }
}

fn space_kv(s: &SpaceArgs, put: &mut impl FnMut(&str, &Option<String>)) {
    if !s.inputs.is_empty() {
        put("inputs", &Some(s.inputs.join(",")));
    }
    put("limit", &s.limit);
    let off = Some("false".to_string());
    if s.no_normalize {
        put("normalize", &off);
    }
    if s.no_center {
        put("center", &off);
    }
    if s.no_cache {
        put("cache", &off);
    }
    put("cache_dir", &s.cache_dir);
}

fn table_kv(t: &TableArgs, put: &mut impl FnMut(&str, &Option<String>)) {
    put("pairs", &t.pairs);
    put("perf", &t.perf);
    put("task", &t.task);
}
