//! Randomized verification campaigns over `Spec ℤ` with reproducible seeds.
//!
//! Trial `k` of a campaign draws all of its randomness from the ChaCha8
//! stream `k` of the campaign seed, so any trial can be replayed alone.
//! Trials run in parallel and are reported in index order.

mod checks;

pub use checks::{
    bogomolov_comparisons, check_bogomolov, check_bost_kunnemann, check_main_theorem,
    check_reduction_chain, check_slope_inequalities, FlagBudget,
};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::LogValue;
use crate::lattice::{Lattice, DEFAULT_RANK_LIMIT};
use crate::linalg::{self, IMat};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SLOPE_LAB_THREADS";

/// Bits of the decimal renderings in CSV reports.
pub const DECIMAL_BITS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub ranks: Vec<usize>,
    pub entry_bound: i64,
    pub trials: usize,
    /// Width of archimedean brackets, as `2^-tolerance_bits`.
    pub tolerance_bits: u32,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            seed: 0,
            ranks: vec![2, 2],
            entry_bound: 3,
            trials: 100,
            tolerance_bits: 64,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.entry_bound < 1 {
            return Err(Error::invalid("entry bound must be positive"));
        }
        if self.tolerance_bits == 0 {
            return Err(Error::invalid("tolerance bits must be positive"));
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return Err(Error::invalid("ranks must be a nonempty list of positive integers"));
        }
        if let Some(&r) = self.ranks.iter().find(|&&r| r > DEFAULT_RANK_LIMIT) {
            return Err(Error::PreconditionViolated(format!(
                "rank {r} exceeds the exact search limit {DEFAULT_RANK_LIMIT}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
}

/// `lhs rel rhs`, where `rhs` may be a bracket `[rhs, rhs_upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub relation: Relation,
    pub lhs: LogValue,
    pub rhs: LogValue,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs_upper: Option<LogValue>,
    pub verdict: Verdict,
}

impl Comparison {
    pub fn exact(label: impl Into<String>, lhs: LogValue, relation: Relation, rhs: LogValue) -> Self {
        let ord = lhs.cmp(&rhs);
        let holds = match relation {
            Relation::Le => ord != Ordering::Greater,
            Relation::Lt => ord == Ordering::Less,
            Relation::Eq => ord == Ordering::Equal,
        };
        Comparison {
            label: label.into(),
            relation,
            lhs,
            rhs,
            rhs_upper: None,
            verdict: if holds { Verdict::Pass } else { Verdict::Fail },
        }
    }

    /// `lhs <= t` for an unknown `t` in `[lower, upper]`.
    pub fn le_bracket(label: impl Into<String>, lhs: LogValue, lower: LogValue, upper: LogValue) -> Self {
        let verdict = if lhs <= lower {
            Verdict::Pass
        } else if lhs > upper {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        };
        Comparison {
            label: label.into(),
            relation: Relation::Le,
            lhs,
            rhs: lower,
            rhs_upper: Some(upper),
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    /// Everything needed to replay the trial, such as Gram matrices.
    pub inputs: serde_json::Value,
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub branches: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub verdict: Verdict,
}

impl TrialRecord {
    pub fn new(index: usize, inputs: serde_json::Value, comparisons: Vec<Comparison>) -> Self {
        let mut r = TrialRecord {
            index,
            inputs,
            comparisons,
            branches: Vec::new(),
            note: None,
            verdict: Verdict::Pass,
        };
        r.settle();
        r
    }

    fn inconclusive(index: usize, inputs: serde_json::Value, note: String) -> Self {
        TrialRecord {
            index,
            inputs,
            comparisons: Vec::new(),
            branches: Vec::new(),
            note: Some(note),
            verdict: Verdict::Inconclusive,
        }
    }

    /// Recomputes the verdict from the comparisons: any failure fails the
    /// trial, otherwise any inconclusive comparison makes it inconclusive.
    fn settle(&mut self) {
        let vs: Vec<Verdict> = self.comparisons.iter().map(|c| c.verdict).collect();
        self.verdict = if vs.contains(&Verdict::Fail) {
            Verdict::Fail
        } else if vs.contains(&Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
    }

    /// The comparison shown in one-line summaries: the first failing one,
    /// else the first inconclusive one, else the first.
    pub fn headline(&self) -> Option<&Comparison> {
        self.comparisons
            .iter()
            .find(|c| c.verdict == Verdict::Fail)
            .or_else(|| self.comparisons.iter().find(|c| c.verdict == Verdict::Inconclusive))
            .or_else(|| self.comparisons.first())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub check: Check,
    pub config: TrialConfig,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub trials: Vec<TrialRecord>,
}

impl TrialReport {
    fn new(check: Check, config: &TrialConfig, trials: Vec<TrialRecord>) -> Self {
        let count = |v| trials.iter().filter(|t| t.verdict == v).count();
        TrialReport {
            check,
            config: config.clone(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            trials,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.inconclusive == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.trials.iter().filter(|t| t.verdict == Verdict::Fail)
    }

    /// One row per trial with decimal and exact renderings of the headline
    /// comparison.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        w.write_record([
            "check", "seed", "trial", "verdict", "label", "lhs", "rhs", "rhs_upper", "lhs_exact", "rhs_exact",
            "rhs_upper_exact",
        ])
        .map_err(io)?;
        for t in &self.trials {
            let h = t.headline();
            let dec = |v: Option<&LogValue>| v.map(|v| v.decimal(DECIMAL_BITS)).unwrap_or_default();
            let exact = |v: Option<&LogValue>| v.map(ToString::to_string).unwrap_or_default();
            let upper = h.and_then(|c| c.rhs_upper.as_ref());
            w.write_record([
                self.check.to_string(),
                self.config.seed.to_string(),
                t.index.to_string(),
                t.verdict.to_string(),
                h.map(|c| c.label.clone()).unwrap_or_default(),
                dec(h.map(|c| &c.lhs)),
                dec(h.map(|c| &c.rhs)),
                dec(upper),
                exact(h.map(|c| &c.lhs)),
                exact(h.map(|c| &c.rhs)),
                exact(upper),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    MainTheorem,
    BostKunnemann,
    Bogomolov,
    SlopeInequalities,
    ReductionChain,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::MainTheorem,
        Check::BostKunnemann,
        Check::Bogomolov,
        Check::SlopeInequalities,
        Check::ReductionChain,
    ];

    pub fn run(self, config: &TrialConfig) -> Result<TrialReport> {
        match self {
            Check::MainTheorem => check_main_theorem(config),
            Check::BostKunnemann => check_bost_kunnemann(config),
            Check::Bogomolov => check_bogomolov(config),
            Check::SlopeInequalities => check_slope_inequalities(config),
            Check::ReductionChain => check_reduction_chain(config),
        }
    }

    /// Reruns trial `index` of the campaign `config` on its own.
    pub fn replay(self, config: &TrialConfig, index: usize) -> Result<TrialRecord> {
        let single = TrialConfig {
            trials: index + 1,
            ..config.clone()
        };
        single.validate()?;
        let run = match self {
            Check::MainTheorem => checks::main_theorem_trial,
            Check::BostKunnemann => checks::bost_kunnemann_trial,
            Check::Bogomolov => checks::bogomolov_trial,
            Check::SlopeInequalities => checks::slope_trial,
            Check::ReductionChain => checks::reduction_trial,
        };
        guarded(index, &mut trial_rng(config.seed, index), config, run)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::MainTheorem => "main",
            Check::BostKunnemann => "bk",
            Check::Bogomolov => "bogomolov",
            Check::SlopeInequalities => "slopes",
            Check::ReductionChain => "reduction",
        })
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::invalid(format!("unknown check {s:?}")))
    }
}

/// The random stream of trial `index`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Gram matrix `BᵀB` of a uniformly random nonsingular integer matrix `B`
/// with entries in `[-entry_bound, entry_bound]`.
pub fn random_lattice<R: Rng + ?Sized>(rank: usize, entry_bound: i64, rng: &mut R) -> Lattice {
    assert!(rank >= 1 && entry_bound >= 1, "rank and entry bound must be positive");
    loop {
        let b = random_matrix(rank, rank, entry_bound, rng);
        if !linalg::int_determinant(&b).eq(&BigInt::from(0)) {
            return Lattice::from_basis_matrix(&b).expect("nonsingular basis gives a positive definite Gram");
        }
    }
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, bound: i64, rng: &mut R) -> IMat {
    (0..rows)
        .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
        .collect()
}

/// Worker pool sized by `SLOPE_LAB_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

type TrialFn = fn(usize, &mut ChaCha8Rng, &TrialConfig) -> Result<TrialRecord>;

/// Runs one trial; search failures become inconclusive records.
fn guarded(index: usize, rng: &mut ChaCha8Rng, config: &TrialConfig, run: TrialFn) -> Result<TrialRecord> {
    match run(index, rng, config) {
        Err(e @ (Error::SearchNotConverged(_) | Error::EnumerationBudget(_))) => Ok(TrialRecord::inconclusive(
            index,
            serde_json::json!({ "seed": config.seed }),
            e.to_string(),
        )),
        other => other,
    }
}

fn campaign(check: Check, config: &TrialConfig, run: TrialFn) -> Result<TrialReport> {
    config.validate()?;
    let pool = thread_pool()?;
    let trials = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|k| guarded(k, &mut trial_rng(config.seed, k), config, run))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(TrialReport::new(check, config, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn unit_lattices() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..10 {
            assert_eq!(random_lattice(1, 1, &mut rng).gram(), &vec![vec![rat(1)]]);
        }
    }

    #[test]
    fn seeded_lattices_repeat() {
        let a = random_lattice(3, 5, &mut trial_rng(42, 3));
        let b = random_lattice(3, 5, &mut trial_rng(42, 3));
        assert_eq!(a, b);
        let c = random_lattice(3, 5, &mut trial_rng(42, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn random_grams_are_positive_definite() {
        let mut rng = trial_rng(7, 0);
        for _ in 0..20 {
            let l = random_lattice(2, 3, &mut rng);
            let g = l.gram();
            assert!(g[0][0] > rat(0));
            assert!(linalg::determinant(g) > rat(0));
        }
    }

    #[test]
    fn bracket_comparisons() {
        let z = LogValue::zero();
        let l2 = LogValue::ln(&rat(2));
        let c = Comparison::le_bracket("x", l2.scale(&rat(1)), z.clone(), l2.scale(&rat(2)));
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(Comparison::le_bracket("x", z.clone(), z.clone(), l2.clone()).verdict, Verdict::Pass);
        assert_eq!(Comparison::exact("x", l2.clone(), Relation::Lt, l2.clone()).verdict, Verdict::Fail);
        assert_eq!(Comparison::exact("x", l2.clone(), Relation::Eq, l2).verdict, Verdict::Pass);
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.to_string().parse::<Check>().unwrap(), c);
        }
        assert!("nope".parse::<Check>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrialConfig::default().validate().is_ok());
        let bad = TrialConfig {
            trials: 0,
            ..TrialConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
