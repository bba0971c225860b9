//! Executable checks for localisation: tame symbols, the compatibility of
//! `rho_t` with tame symbols, the co-Cartesian square and short exact
//! sequence for `R -> R_t`, stability predicates, and the standing
//! assumptions on the pair `(R, t)`.

pub mod assumptions;
pub mod identities;
pub mod lemma;
pub mod remark;
pub mod square;
pub mod stability;
pub mod tame;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value as Json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Process exit code for the status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// A concrete counterexample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub inputs: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReportParams {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub window: Json,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Json>,
}

/// Outcome of a verification run. `counts` holds per-branch tallies and
/// `evidence` a bounded list of witnesses and derivations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub ring: String,
    pub params: ReportParams,
    pub cases_run: u64,
    pub failures: Vec<Failure>,
    pub status: Status,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<Json>,
}

/// How many witnesses a report keeps.
pub const EVIDENCE_LIMIT: usize = 20;

impl VerificationReport {
    pub fn new(check: &str, ring: impl ToString) -> Self {
        VerificationReport {
            check: check.to_string(),
            ring: ring.to_string(),
            params: ReportParams { window: Json::Null, ..Default::default() },
            cases_run: 0,
            failures: Vec::new(),
            status: Status::Pass,
            counts: BTreeMap::new(),
            evidence: Vec::new(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.params.seed = Some(seed);
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.params.budget = Some(budget);
        self
    }

    pub fn window(mut self, window: Json) -> Self {
        self.params.window = window;
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<Json>) -> Self {
        self.params.extra.insert(key.to_string(), value.into());
        self
    }

    pub fn fail(&mut self, inputs: Vec<String>, detail: impl ToString) {
        self.failures.push(Failure { inputs, detail: detail.to_string() });
    }

    pub fn count(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_default() += by;
    }

    pub fn counted(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn evidence(&mut self, item: Json) {
        if self.evidence.len() < EVIDENCE_LIMIT {
            self.evidence.push(item);
        }
    }

    /// Marks a case whose outcome could not be decided within the limits.
    pub fn inconclusive(&mut self, by: u64) {
        self.count("inconclusive", by);
    }

    /// Sets the status from the collected data: any failure fails the
    /// report, otherwise undecided cases make it inconclusive.
    pub fn finish(mut self) -> Self {
        self.status = if !self.failures.is_empty() {
            Status::Fail
        } else if self.counted("inconclusive") > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        self
    }

    /// Absorbs a sub-report run as one leg of this check.
    pub fn absorb(&mut self, leg: &str, other: VerificationReport) {
        self.cases_run += other.cases_run;
        for f in other.failures {
            self.failures.push(Failure { inputs: f.inputs, detail: format!("{leg}: {}", f.detail) });
        }
        for (k, v) in other.counts {
            if k == "inconclusive" {
                self.count(&k, v);
            }
            self.count(&format!("{leg}.{k}"), v);
        }
        self.count(&format!("{leg}.cases"), other.cases_run);
        for e in other.evidence {
            self.evidence(serde_json::json!({ "leg": leg, "item": e }));
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "check:  {}", self.check);
        let _ = writeln!(s, "ring:   {}", self.ring);
        let _ = writeln!(s, "status: {}", self.status.as_str());
        let _ = writeln!(s, "cases:  {}", self.cases_run);
        if let Some(seed) = self.params.seed {
            let _ = writeln!(s, "seed:   {seed}");
        }
        if let Some(b) = self.params.budget {
            let _ = writeln!(s, "budget: {b}");
        }
        if !self.params.window.is_null() {
            let _ = writeln!(s, "window: {}", self.params.window);
        }
        for (k, v) in &self.params.extra {
            let _ = writeln!(s, "{k}: {v}");
        }
        for (k, v) in &self.counts {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for f in &self.failures {
            let _ = writeln!(s, "FAIL [{}]: {}", f.inputs.join(", "), f.detail);
        }
        for e in &self.evidence {
            let _ = writeln!(s, "  evidence: {e}");
        }
        s
    }
}

/// Picks at most `budget` items, keeping their original relative order.
/// Returns the chosen items and whether the whole list was taken.
pub fn sample<T: Clone>(items: &[T], budget: usize, seed: u64) -> (Vec<T>, bool) {
    if items.len() <= budget {
        return (items.to_vec(), true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = index::sample(&mut rng, items.len(), budget).into_vec();
    idx.sort_unstable();
    (idx.into_iter().map(|i| items[i].clone()).collect(), false)
}

/// Seeded random generator shared by the samplers.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs independent cases on the rayon pool, returning results in input
/// order regardless of completion order.
pub fn run_cases<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}
