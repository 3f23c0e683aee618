//! Run configuration: defaults, an optional JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use freeprob_core::rmt::{SuiteOptions, UnitaryMode, VerdictRule, WeakFcKind};
use freeprob_core::{parse_ratio, Rational};
use serde::{Deserialize, Serialize};

pub const MIN_TRIALS: usize = freeprob_core::rmt::freeness::MIN_TRIALS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindSelection {
    Product,
    Conjugated,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Structured,
    Haar,
}

/// Every setting a suite may read. Each field is optional so that a config
/// file and the flags can be layered; `resolve` fills in defaults.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Master seed of every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Matrix dimension.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub dim: Option<usize>,
    /// Monte Carlo trials per pattern.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Projection trace, e.g. 1/3 or 0.25.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Number of factors (reassemble) or Haar unitaries (radial).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Report path; `-` writes the report to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Absolute floor of the freeness verdict rule.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Longest alternating pattern.
    #[arg(long = "max-len", global = true)]
    pub max_len: Option<usize>,
    /// Projection traces of the reassembly, comma separated.
    #[arg(long, global = true)]
    pub traces: Option<String>,
    /// Intertwining unitaries of the reassembly.
    #[arg(long, value_enum, global = true)]
    pub mode: Option<ModeSelection>,
    /// Dimension of the generation check.
    #[arg(long = "gen-N", global = true)]
    #[serde(rename = "gen_N")]
    pub gen_dim: Option<usize>,
    /// Seeds of the generation check.
    #[arg(long = "gen-seeds", global = true)]
    pub gen_seeds: Option<usize>,
    /// First index of the radial suite's V = W_i W_j.
    #[arg(long, global = true)]
    pub i: Option<usize>,
    /// Second index of the radial suite's V = W_i W_j.
    #[arg(long, global = true)]
    pub j: Option<usize>,
    /// Test unitary of the weak-fc suite.
    #[arg(long, value_enum, global = true)]
    pub kind: Option<KindSelection>,
    /// First coefficient vector of the semicircular suite, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Second coefficient vector, perpendicular to the first.
    #[arg(long = "t-prime", global = true, allow_hyphen_values = true)]
    pub t_prime: Option<String>,
    /// JSON word literal for exact-trace.
    #[arg(long, global = true)]
    pub word: Option<String>,
    /// Quadrature nodes of the two-projection model.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
}

impl Settings {
    /// Reads a JSON config file; unknown keys are an error.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(seed, dim, trials, alpha, n, out, format, tolerance, max_len, traces, mode, gen_dim, gen_seeds, i, j, kind, t, t_prime, word, nodes)
    }
}

/// Fully resolved configuration, embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: String,
    pub seed: u64,
    #[serde(rename = "N")]
    pub dim: usize,
    pub trials: usize,
    pub alpha: String,
    pub n: usize,
    pub format: Format,
    pub tolerance: f64,
    pub max_len: usize,
    pub traces: Vec<String>,
    pub mode: ModeSelection,
    #[serde(rename = "gen_N")]
    pub gen_dim: usize,
    pub gen_seeds: usize,
    pub i: usize,
    pub j: usize,
    pub kind: KindSelection,
    pub t: Vec<f64>,
    pub t_prime: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    pub nodes: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn parse_list<T>(text: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| f(s.trim()).with_context(|| format!("cannot parse {what} entry {s:?}")))
        .collect()
}

impl RunConfig {
    pub fn resolve(suite: &str, s: Settings, exact_only: bool) -> Result<Self> {
        let (n, traces) = match (&s.traces, s.n) {
            (Some(t), n) => {
                let traces = parse_list(t, "trace", parse_ratio)?;
                if n.is_some_and(|n| n != traces.len()) {
                    bail!("--n = {} disagrees with {} traces", n.unwrap_or(0), traces.len());
                }
                (traces.len(), traces)
            }
            (None, n) => {
                let n = n.unwrap_or(2);
                if n == 0 {
                    bail!("--n must be positive");
                }
                (n, vec![Rational::new(1.into(), (n as i64).into()); n])
            }
        };
        let alpha = s.alpha.unwrap_or_else(|| "1/2".into());
        let alpha_value = parse_ratio(&alpha).with_context(|| format!("cannot parse alpha {alpha:?}"))?;
        let cfg = RunConfig {
            suite: suite.to_string(),
            seed: s.seed.unwrap_or(7),
            dim: s.dim.unwrap_or(512),
            trials: s.trials.unwrap_or(100),
            alpha: alpha_value.to_string(),
            n,
            format: s.format.unwrap_or(Format::Json),
            tolerance: s.tolerance.unwrap_or(VerdictRule::default().abs_floor),
            max_len: s.max_len.unwrap_or(if traces.len() > 2 { 5 } else { 6 }),
            traces: traces.iter().map(|t| t.to_string()).collect(),
            mode: s.mode.unwrap_or(ModeSelection::Structured),
            gen_dim: s.gen_dim.unwrap_or(64),
            gen_seeds: s.gen_seeds.unwrap_or(20),
            i: s.i.unwrap_or(1),
            j: s.j.unwrap_or(2),
            kind: s.kind.unwrap_or(KindSelection::Both),
            t: parse_list(s.t.as_deref().unwrap_or("1,1"), "t", |x| x.parse().ok())?,
            t_prime: parse_list(s.t_prime.as_deref().unwrap_or("1,-1"), "t'", |x| x.parse().ok())?,
            word: s.word,
            nodes: s.nodes.unwrap_or(freeprob_core::twoproj::DEFAULT_NODE_COUNT),
            out: s.out,
        };
        if cfg.dim < 2 {
            bail!("N must be at least 2, got {}", cfg.dim);
        }
        if !exact_only && cfg.trials < MIN_TRIALS {
            bail!("trials must be at least {MIN_TRIALS}, got {}", cfg.trials);
        }
        if !(cfg.tolerance >= 0.0) {
            bail!("tolerance must be nonnegative");
        }
        if cfg.max_len == 0 {
            bail!("max-len must be positive");
        }
        Ok(cfg)
    }

    pub fn alpha(&self) -> Rational {
        parse_ratio(&self.alpha).expect("validated at resolve")
    }

    pub fn trace_values(&self) -> Vec<Rational> {
        self.traces.iter().map(|t| parse_ratio(t).expect("validated at resolve")).collect()
    }

    pub fn rule(&self) -> VerdictRule {
        VerdictRule { abs_floor: self.tolerance, ..VerdictRule::default() }
    }

    pub fn options(&self) -> SuiteOptions {
        SuiteOptions { dim: self.dim, trials: self.trials, seed: self.seed, max_len: self.max_len, rule: self.rule() }
    }

    pub fn unitary_mode(&self) -> UnitaryMode {
        match self.mode {
            ModeSelection::Structured => UnitaryMode::Structured,
            ModeSelection::Haar => UnitaryMode::Haar,
        }
    }

    pub fn kinds(&self) -> Vec<WeakFcKind> {
        match self.kind {
            KindSelection::Product => vec![WeakFcKind::Product],
            KindSelection::Conjugated => vec![WeakFcKind::Conjugated],
            KindSelection::Both => vec![WeakFcKind::Product, WeakFcKind::Conjugated],
        }
    }
}
