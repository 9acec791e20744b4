//! Seeded Monte Carlo experiments over the hard-instance constructions.

mod output;
mod sampling;
mod stats;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use output::{write_curve, write_outputs, write_summary_csv, write_trials_jsonl};
pub use sampling::{required_n, sample_from, Sampler};
pub use stats::{mean_se, wilson_interval, Proportion, Z95};

use crate::adversaries::{Construction, PreparedConstruction, Scenario};
use crate::concepts::ConceptFamily;
use crate::error::{Error, Result};
use crate::learners::{effective_eps, learn, FixedChoice, LearnerSpec};
use crate::measure::{info, Dist, InfoMeasure, COMPARE_TOL};
use crate::rng;

pub const CONFIG_VERSION: &str = "v1";

/// Marker for "take this from the construction".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FromConstruction {
    Construction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConceptSource {
    Construction(FromConstruction),
    Explicit(ConceptFamily),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HypothesisSource {
    Construction(FromConstruction),
    Explicit(Arc<Vec<Dist>>),
}

impl Default for ConceptSource {
    fn default() -> Self {
        ConceptSource::Construction(FromConstruction::Construction)
    }
}

impl Default for HypothesisSource {
    fn default() -> Self {
        HypothesisSource::Construction(FromConstruction::Construction)
    }
}

/// A learner whose concept and hypothesis classes may be resolved per
/// drawn instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerConfig {
    Empirical,
    ImproperMaxInfo {
        measure: InfoMeasure,
        /// Defaults to the experiment's `epsilon`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
        #[serde(default)]
        concepts: ConceptSource,
    },
    ProperMaxInfo {
        measure: InfoMeasure,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
        #[serde(default)]
        concepts: ConceptSource,
        #[serde(default)]
        hypotheses: HypothesisSource,
    },
    Fixed {
        #[serde(default)]
        hypotheses: HypothesisSource,
        choice: FixedChoice,
    },
}

impl LearnerConfig {
    fn eps(&self, default: f64) -> f64 {
        match self {
            LearnerConfig::ImproperMaxInfo { eps, .. } | LearnerConfig::ProperMaxInfo { eps, .. } => {
                eps.unwrap_or(default)
            }
            _ => default,
        }
    }

    fn measure(&self) -> Option<InfoMeasure> {
        match self {
            LearnerConfig::ImproperMaxInfo { measure, .. } | LearnerConfig::ProperMaxInfo { measure, .. } => {
                Some(*measure)
            }
            _ => None,
        }
    }

    /// The concrete learner for one drawn scenario.
    pub fn resolve(&self, scenario: &Scenario, default_eps: f64) -> Result<LearnerSpec> {
        let concepts = |src: &ConceptSource| match src {
            ConceptSource::Construction(_) => scenario.concepts.clone(),
            ConceptSource::Explicit(f) => f.clone(),
        };
        let hypotheses = |src: &HypothesisSource| match src {
            HypothesisSource::Construction(_) => scenario
                .hypotheses
                .clone()
                .ok_or_else(|| Error::Config("construction provides no hypothesis class".into())),
            HypothesisSource::Explicit(h) => Ok(h.clone()),
        };
        let eps = self.eps(default_eps);
        Ok(match self {
            LearnerConfig::Empirical => LearnerSpec::Empirical,
            LearnerConfig::ImproperMaxInfo { measure, concepts: c, .. } => LearnerSpec::ImproperMaxInfo {
                measure: *measure,
                eps,
                concepts: concepts(c),
            },
            LearnerConfig::ProperMaxInfo {
                measure,
                concepts: c,
                hypotheses: h,
                ..
            } => LearnerSpec::ProperMaxInfo {
                measure: *measure,
                eps,
                concepts: concepts(c),
                hypotheses: hypotheses(h)?,
            },
            LearnerConfig::Fixed { hypotheses: h, choice } => LearnerSpec::Fixed {
                hypotheses: hypotheses(h)?,
                choice: *choice,
            },
        })
    }
}

fn default_version() -> String {
    CONFIG_VERSION.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: String,
    pub construction: Construction,
    pub learner: LearnerConfig,
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default)]
    pub gamma: f64,
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; the rayon default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Measure recorded for learner and demonstrator; defaults to the
    /// learner's own measure, else out-of-sample mass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_measure: Option<InfoMeasure>,
    /// Adds wall-clock times to trial records. Breaks byte-identity.
    #[serde(default)]
    pub record_timing: bool,
    /// Free-form notes carried into the outputs unchanged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported config version {:?}", self.version));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1], got {}", self.gamma));
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        let eps = self.learner.eps(self.epsilon);
        if !(0.0..=1.0).contains(&eps) {
            return bad(format!("learner eps must lie in [0, 1], got {eps}"));
        }
        Ok(())
    }

    fn info_measure(&self) -> InfoMeasure {
        self.info_measure
            .or_else(|| self.learner.measure())
            .unwrap_or(InfoMeasure::OutOfSample)
    }
}

/// Seed of trial `trial_index` at sample size `n`.
pub fn trial_seed(base_seed: u64, n: usize, trial_index: u64) -> u64 {
    rng::derive_seed(base_seed, &[n as u64, trial_index])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hall_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_learned: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_demonstrator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_space_size: Option<u64>,
    /// The demonstrator itself meets the learner's constraints.
    #[serde(default)]
    pub feasibility_flag: bool,
    #[serde(default)]
    pub relaxed_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// Learner at least as informative as the demonstrator.
    pub fn dominates(&self) -> Option<bool> {
        Some(self.info_learned? >= self.info_demonstrator? - COMPARE_TOL)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub completed: u64,
    pub failures: u64,
    /// Pr[hall ≥ ε].
    pub hall_rate: Proportion,
    pub mean_hall: f64,
    pub se_hall: f64,
    pub feasible: u64,
    /// Among feasible trials, fraction where the learner is at least as
    /// informative as the demonstrator.
    pub dominance: Proportion,
    pub relaxed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub epsilon: f64,
    pub delta: f64,
    pub rows: Vec<SummaryRow>,
}

impl SummaryStats {
    pub fn from_records(records: &[TrialRecord], n_values: &[usize], epsilon: f64, delta: f64) -> Self {
        let rows = n_values
            .iter()
            .map(|&n| {
                let at_n: Vec<_> = records.iter().filter(|r| r.n == n).collect();
                let ok: Vec<_> = at_n.iter().filter(|r| r.is_ok()).collect();
                let halls: Vec<f64> = ok.iter().filter_map(|r| r.hall_value).collect();
                let hits = halls.iter().filter(|&&h| h >= epsilon).count() as u64;
                let (mean_hall, se_hall) = mean_se(&halls);
                let feasible: Vec<_> = ok.iter().filter(|r| r.feasibility_flag).collect();
                let dom = feasible.iter().filter(|r| r.dominates() == Some(true)).count() as u64;
                SummaryRow {
                    n,
                    completed: ok.len() as u64,
                    failures: (at_n.len() - ok.len()) as u64,
                    hall_rate: Proportion::new(hits, ok.len() as u64),
                    mean_hall,
                    se_hall,
                    feasible: feasible.len() as u64,
                    dominance: Proportion::new(dom, feasible.len() as u64),
                    relaxed: ok.iter().filter(|r| r.relaxed_flag).count() as u64,
                }
            })
            .collect();
        SummaryStats { epsilon, delta, rows }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summary: SummaryStats,
}

struct TrialContext<'a> {
    cfg: &'a ExperimentConfig,
    prepared: &'a PreparedConstruction,
    measure: InfoMeasure,
}

impl TrialContext<'_> {
    fn run(&self, n: usize, trial_index: u64) -> TrialRecord {
        let seed = trial_seed(self.cfg.base_seed, n, trial_index);
        let start = Instant::now();
        let mut rec = TrialRecord {
            trial_index,
            seed,
            n,
            hall_value: None,
            info_learned: None,
            info_demonstrator: None,
            version_space_size: None,
            feasibility_flag: false,
            relaxed_flag: false,
            wall_time: None,
            error: None,
        };
        match self.evaluate(seed, n) {
            Ok(done) => rec = TrialRecord { wall_time: None, ..done(rec) },
            Err(e) => rec.error = Some(e.to_string()),
        }
        if self.cfg.record_timing {
            rec.wall_time = Some(start.elapsed().as_secs_f64());
        }
        rec
    }

    fn evaluate(&self, seed: u64, n: usize) -> Result<impl FnOnce(TrialRecord) -> TrialRecord> {
        let scenario = self.prepared.draw(seed)?;
        let q = &scenario.instance.q;
        let s = sample_from(q, n, seed)?;
        let spec = self.cfg.learner.resolve(&scenario, self.cfg.epsilon)?;
        let model = learn(&spec, &s)?;
        let (_, h) = scenario.adversarial_facts(&model.dist)?;

        let vs = scenario.concepts.version_space(&s)?;
        let eps = self.cfg.learner.eps(self.cfg.epsilon);
        let q_worst = vs.max_hall(q)?.map_or(0.0, |(v, _)| v);
        let info_learned = info(self.measure, &model.dist, &s)?;
        let info_demonstrator = info(self.measure, q, &s)?;
        let vs_size = u64::try_from(vs.len()).unwrap_or(u64::MAX);
        Ok(move |rec: TrialRecord| TrialRecord {
            hall_value: Some(h),
            info_learned: Some(info_learned),
            info_demonstrator: Some(info_demonstrator),
            version_space_size: Some(vs_size),
            feasibility_flag: q_worst <= effective_eps(eps) + COMPARE_TOL,
            relaxed_flag: model.relaxed,
            ..rec
        })
    }
}

/// Runs every `(n, trial)` pair. Records come back ordered by `n` (in config
/// order) and then by trial index, whatever the worker count.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let prepared = cfg.construction.prepare()?;
    let ctx = TrialContext {
        cfg,
        prepared: &prepared,
        measure: cfg.info_measure(),
    };
    let jobs: Vec<(usize, u64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let run = || jobs.par_iter().map(|&(n, t)| ctx.run(n, t)).collect::<Vec<_>>();
    let records = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?
            .install(run),
        None => run(),
    };
    let summary = SummaryStats::from_records(&records, &cfg.n_values, cfg.epsilon, cfg.delta);
    Ok(ExperimentResult { records, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub hall_rate: f64,
    pub hall_rate_lower: f64,
    pub hall_rate_upper: f64,
    pub dominance_rate: f64,
    pub completed: u64,
    pub failures: u64,
}

impl From<&SummaryRow> for CurveRow {
    fn from(r: &SummaryRow) -> Self {
        CurveRow {
            n: r.n,
            hall_rate: r.hall_rate.estimate,
            hall_rate_lower: r.hall_rate.lower,
            hall_rate_upper: r.hall_rate.upper,
            dominance_rate: r.dominance.estimate,
            completed: r.completed,
            failures: r.failures,
        }
    }
}

/// Empirical `Pr[hall ≥ ε]` across increasing sample sizes.
pub fn complexity_curve(cfg: &ExperimentConfig) -> Result<(Vec<CurveRow>, ExperimentResult)> {
    if cfg.n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("n_values must be strictly increasing".into()));
    }
    let result = run_trials(cfg)?;
    let rows = result.summary.rows.iter().map(CurveRow::from).collect();
    Ok((rows, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(construction: Construction, learner: LearnerConfig) -> ExperimentConfig {
        ExperimentConfig {
            version: CONFIG_VERSION.into(),
            construction,
            learner,
            n_values: vec![5, 20],
            trials: 30,
            epsilon: 0.1,
            delta: 0.1,
            gamma: 0.0,
            base_seed: 11,
            output_dir: None,
            workers: None,
            info_measure: None,
            record_timing: false,
            provenance: None,
        }
    }

    fn improper() -> LearnerConfig {
        LearnerConfig::ImproperMaxInfo {
            measure: InfoMeasure::OutOfSample,
            eps: None,
            concepts: ConceptSource::default(),
        }
    }

    #[test]
    fn empirical_never_hallucinates() {
        for c in [
            Construction::Theorem3 { d: 3, eps_prime: 0.3 },
            Construction::Example4,
            Construction::Appendix {
                d: 8,
                packing_seed: 2,
                max_tries: 1000,
            },
        ] {
            let res = run_trials(&config(c, LearnerConfig::Empirical)).unwrap();
            for r in &res.records {
                assert_eq!(r.hall_value, Some(0.0));
            }
        }
    }

    #[test]
    fn improper_learner_respects_eps_and_dominates() {
        let res = run_trials(&config(Construction::Theorem3 { d: 3, eps_prime: 0.05 }, improper())).unwrap();
        for r in &res.records {
            assert!(r.is_ok(), "{:?}", r.error);
            assert!(r.hall_value.unwrap() < 0.1);
            if r.feasibility_flag {
                assert_eq!(r.dominates(), Some(true));
            }
        }
        let row = &res.summary.rows[0];
        assert_eq!(row.completed, 30);
        assert_eq!(row.hall_rate.successes, 0);
        assert!(row.feasible > 0);
    }

    #[test]
    fn order_and_workers_do_not_matter() {
        let mut cfg = config(Construction::Theorem3 { d: 3, eps_prime: 0.2 }, improper());
        cfg.workers = Some(1);
        let a = run_trials(&cfg).unwrap();
        cfg.workers = Some(3);
        let b = run_trials(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        let single = trial_seed(cfg.base_seed, 20, 7);
        assert_eq!(b.records[37].seed, single);
        assert_eq!(b.records[37].trial_index, 7);
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let cfg = config(
            Construction::Theorem3 { d: 3, eps_prime: 0.2 },
            LearnerConfig::Fixed {
                hypotheses: HypothesisSource::default(),
                choice: FixedChoice::Constant { index: 0 },
            },
        );
        let res = run_trials(&cfg).unwrap();
        assert!(res.records.iter().all(|r| r.error.is_some()));
        assert_eq!(res.summary.rows[1].failures, 30);
        assert_eq!(res.summary.rows[1].completed, 0);
    }

    #[test]
    fn curve_matches_summary() {
        let mut cfg = config(Construction::Theorem3 { d: 3, eps_prime: 0.2 }, improper());
        cfg.n_values = vec![4];
        let (curve, res) = complexity_curve(&cfg).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0], CurveRow::from(&res.summary.rows[0]));
        cfg.n_values = vec![4, 4];
        assert!(complexity_curve(&cfg).is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let text = r#"{
            "version": "v1",
            "construction": {"name": "theorem3", "params": {"d": 8, "eps_prime": 0.01}},
            "learner": {"kind": "improper_max_info", "measure": {"kind": "out_of_sample"}, "concepts": "construction"},
            "n_values": [100], "trials": 5, "epsilon": 0.1, "delta": 0.1, "base_seed": 3
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.learner, improper());
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(ExperimentConfig::from_json(&text.replace("\"v1\"", "\"v2\"")).is_err());
        assert!(ExperimentConfig::from_json(&text.replace("\"trials\": 5", "\"trials\": 0")).is_err());
    }
}
