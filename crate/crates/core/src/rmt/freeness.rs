//! Statistical freeness test: normalized traces of alternating words of
//! centered random elements should vanish up to finite-size effects.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{matmul, ntrace, trace_product, CMat};
use super::rng::stream;
use super::sampler::{center_and_normalize, ElementSampler};
use super::scene::MatrixScene;
use super::RmtError;
use crate::numeric::compensated_sum;
use crate::C64;

pub const MIN_TRIALS: usize = 30;

/// How one slot of a word is filled.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SlotRecipe {
    /// A fresh centered sample from the slot's family.
    RandomCentered,
    /// A named scene matrix, centered and normalized.
    Specific(String),
}

/// Family tags (1-based) of consecutive letters, with a recipe per slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordPattern {
    tags: Vec<usize>,
    recipes: Vec<SlotRecipe>,
}

impl WordPattern {
    pub fn new(tags: Vec<usize>) -> Result<Self, RmtError> {
        let recipes = vec![SlotRecipe::RandomCentered; tags.len()];
        Self::with_recipes(tags, recipes)
    }

    pub fn with_recipes(tags: Vec<usize>, recipes: Vec<SlotRecipe>) -> Result<Self, RmtError> {
        if tags.is_empty() || tags.len() != recipes.len() {
            return Err(RmtError::InvalidArgument("pattern needs one recipe per nonempty slot".into()));
        }
        if tags.contains(&0) {
            return Err(RmtError::InvalidArgument("family tags are 1-based".into()));
        }
        if tags.windows(2).any(|w| w[0] == w[1]) {
            return Err(RmtError::InvalidArgument(format!("pattern {tags:?} does not alternate")));
        }
        Ok(Self { tags, recipes })
    }

    pub fn tags(&self) -> &[usize] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

impl fmt::Display for WordPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tags
            .iter()
            .zip(&self.recipes)
            .map(|(t, r)| match r {
                SlotRecipe::RandomCentered => t.to_string(),
                SlotRecipe::Specific(name) => format!("{t}:{name}"),
            })
            .collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// All alternating patterns over `families` tags with lengths in `min_len..=max_len`.
pub fn alternating_patterns(families: usize, min_len: usize, max_len: usize) -> Vec<WordPattern> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = (1..=families).map(|t| vec![t]).collect();
    for len in 1..=max_len {
        if len >= min_len.max(1) {
            out.extend(current.iter().map(|t| WordPattern::new(t.clone()).expect("alternating by construction")));
        }
        current = current
            .iter()
            .flat_map(|t| {
                let last = *t.last().expect("nonempty");
                (1..=families).filter(move |&f| f != last).map(move |f| {
                    let mut next = t.clone();
                    next.push(f);
                    next
                })
            })
            .collect();
    }
    out
}

/// `pass iff mean <= max(abs_floor, z_mult * stderr + bias_term / N)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRule {
    pub abs_floor: f64,
    pub z_mult: f64,
    pub bias_term: f64,
}

impl Default for VerdictRule {
    fn default() -> Self {
        Self { abs_floor: 0.04, z_mult: 4.0, bias_term: 10.0 }
    }
}

impl VerdictRule {
    pub fn threshold(&self, stderr: f64, n: usize) -> f64 {
        self.abs_floor.max(self.z_mult * stderr + self.bias_term / n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub pattern: String,
    pub mean_abs_trace: f64,
    pub stderr: f64,
    pub trials: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub label: String,
    pub families: Vec<String>,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub rule: VerdictRule,
    pub rows: Vec<PatternRow>,
    pub verdict: Verdict,
}

impl FreenessReport {
    /// Largest row mean.
    pub fn max_mean(&self) -> f64 {
        self.rows.iter().map(|r| r.mean_abs_trace).fold(0.0, f64::max)
    }

    /// Rows as CSV records: pattern, mean_abs_trace, stderr, trials, N, verdict.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.pattern.clone(),
                    format!("{:e}", r.mean_abs_trace),
                    format!("{:e}", r.stderr),
                    r.trials.to_string(),
                    r.n.to_string(),
                    r.verdict.to_string(),
                ]
            })
            .collect()
    }
}

/// Prefix trie of patterns: shared prefixes share their matrix products.
#[derive(Default)]
struct TrieNode {
    children: BTreeMap<(usize, SlotRecipe), TrieNode>,
    ends: Vec<usize>,
}

impl TrieNode {
    fn insert(&mut self, pattern: &WordPattern, index: usize) {
        let mut node = self;
        for (t, r) in pattern.tags.iter().zip(&pattern.recipes) {
            node = node.children.entry((*t, r.clone())).or_default();
        }
        node.ends.push(index);
    }
}

struct TrialContext<'a> {
    scene: &'a MatrixScene,
    families: &'a [Arc<dyn ElementSampler>],
    label: &'a str,
    trial: u64,
    cache: BTreeMap<(usize, usize, SlotRecipe), Arc<CMat>>,
}

impl TrialContext<'_> {
    fn element(&mut self, slot: usize, tag: usize, recipe: &SlotRecipe) -> Result<Arc<CMat>, RmtError> {
        let key = (slot, tag, recipe.clone());
        if let Some(m) = self.cache.get(&key) {
            return Ok(m.clone());
        }
        let m = match recipe {
            SlotRecipe::RandomCentered => {
                let family = &self.families[tag - 1];
                // Redraw in the rare event of a sample with no centered part.
                let mut attempt = 0u64;
                loop {
                    let mut rng = stream(
                        self.scene.seed(),
                        &format!("freeness/{}", self.label),
                        &[self.trial, slot as u64, tag as u64, attempt],
                    );
                    if let Some(c) = center_and_normalize(&family.sample(&mut rng)) {
                        break c;
                    }
                    attempt += 1;
                    if attempt > 8 {
                        return Err(RmtError::InvalidArgument(format!(
                            "family {} keeps producing scalar samples",
                            family.label()
                        )));
                    }
                }
            }
            SlotRecipe::Specific(name) => center_and_normalize(self.scene.get(name)?).ok_or_else(|| {
                RmtError::InvalidArgument(format!("scene matrix {name} has no centered part"))
            })?,
        };
        let m = Arc::new(m);
        self.cache.insert(key, m.clone());
        Ok(m)
    }

    fn walk(&mut self, node: &TrieNode, depth: usize, prefix: Option<&CMat>, out: &mut [C64]) -> Result<(), RmtError> {
        for ((tag, recipe), child) in &node.children {
            let a = self.element(depth, *tag, recipe)?;
            for &i in &child.ends {
                out[i] = match prefix {
                    None => ntrace(&a),
                    Some(p) => trace_product(p, &a),
                };
            }
            if !child.children.is_empty() {
                let next = match prefix {
                    None => (*a).clone(),
                    Some(p) => matmul(p, &a),
                };
                self.walk(child, depth + 1, Some(&next), out)?;
            }
        }
        Ok(())
    }
}

/// Runs `trials` independent trials of every pattern and applies `rule`.
///
/// Trial `k` draws slot `s` of family `f` from the stream
/// `(seed, label, k, s, f)`, so results are independent of scheduling.
pub fn freeness_test(
    scene: &MatrixScene,
    label: &str,
    families: &[Arc<dyn ElementSampler>],
    patterns: &[WordPattern],
    trials: usize,
    rule: &VerdictRule,
) -> Result<FreenessReport, RmtError> {
    if trials < MIN_TRIALS {
        return Err(RmtError::InvalidArgument(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    if patterns.is_empty() {
        return Err(RmtError::InvalidArgument("no patterns".into()));
    }
    for p in patterns {
        if let Some(t) = p.tags.iter().find(|t| **t > families.len()) {
            return Err(RmtError::InvalidArgument(format!("pattern {p} uses unknown family {t}")));
        }
    }
    if let Some(f) = families.iter().find(|f| f.dim() != scene.dim()) {
        return Err(RmtError::InvalidArgument(format!("family {} has the wrong dimension", f.label())));
    }
    let mut root = TrieNode::default();
    for (i, p) in patterns.iter().enumerate() {
        root.insert(p, i);
    }
    let per_trial: Vec<Vec<C64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut ctx = TrialContext { scene, families, label, trial, cache: BTreeMap::new() };
            let mut out = vec![C64::new(0.0, 0.0); patterns.len()];
            ctx.walk(&root, 0, None, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_, RmtError>>()?;

    let n = scene.dim();
    let rows: Vec<PatternRow> = patterns
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let abs: Vec<f64> = per_trial.iter().map(|t| t[i].norm()).collect();
            let mean = compensated_sum(abs.iter().copied()) / trials as f64;
            let var = compensated_sum(abs.iter().map(|x| (x - mean) * (x - mean))) / (trials as f64 - 1.0);
            let stderr = (var / trials as f64).sqrt();
            let threshold = rule.threshold(stderr, n);
            PatternRow {
                pattern: p.to_string(),
                mean_abs_trace: mean,
                stderr,
                trials,
                n,
                threshold,
                verdict: Verdict::from_bool(mean <= threshold),
            }
        })
        .collect();
    let verdict = Verdict::from_bool(rows.iter().all(|r| r.verdict.passed()));
    Ok(FreenessReport {
        label: label.to_string(),
        families: families.iter().map(|f| f.label().to_string()).collect(),
        seed: scene.seed(),
        n,
        trials,
        rule: *rule,
        rows,
        verdict,
    })
}
