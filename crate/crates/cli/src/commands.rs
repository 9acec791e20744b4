use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use halluc_core::adversaries::{entropy_threshold, fano_bound, Construction};
use halluc_core::concepts::{packing_construct, vc_dimension, ConceptFamily};
use halluc_core::harness::{complexity_curve, required_n, run_trials, write_curve, write_outputs, ExperimentConfig};
use halluc_core::learners::{learn, FixedChoice, LearnerSpec};
use halluc_core::measure::{hall, hall_eps, info, kl, tv, Dist, EventSet, InfoMeasure, LogBase, Sample};
use halluc_core::solvers::{max_info, FeasibleRegion};

use crate::emit::{emit, CliError, CliResult};
use crate::{
    AdversaryCmd, Base, BoundsCmd, Cli, Command, ConceptsCmd, ExperimentCmd, Format, Global, LearnArgs, LearnerKind,
    MeasureCmd, SolveCmd,
};

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn parse_measure(s: &str) -> CliResult<InfoMeasure> {
    s.parse().map_err(|e: halluc_core::Error| CliError(e.to_string()))
}

fn sample_or_empty(path: Option<&PathBuf>, like: &Dist) -> CliResult<Sample> {
    match path {
        Some(p) => read_json(p),
        None => Ok(Sample::empty(like.universe())),
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Measure(m) => emit(g, &measure(m)?),
        Command::Concepts(c) => emit(g, &concepts(c, g)?),
        Command::Solve(s) => emit(g, &solve(s)?),
        Command::Learn(a) => emit(g, &learner(a, g)?),
        Command::Adversary(a) => emit(g, &adversary(a, g)?),
        Command::Experiment(e) => experiment(e, g),
        Command::Bounds(b) => emit(g, &bounds(b)?),
    }
}

fn measure(cmd: &MeasureCmd) -> CliResult<Value> {
    Ok(match cmd {
        MeasureCmd::Hall { p, facts } => {
            let p: Dist = read_json(p)?;
            let t: EventSet = read_json(facts)?;
            json!({"hall": hall(&p, &t)?})
        }
        MeasureCmd::HallEps { p, q, eps } => {
            let (p, q): (Dist, Dist) = (read_json(p)?, read_json(q)?);
            json!({"eps": eps, "hall_eps": hall_eps(&p, &q, *eps)?})
        }
        MeasureCmd::Tv { p, q } => {
            let (p, q): (Dist, Dist) = (read_json(p)?, read_json(q)?);
            json!({"tv": tv(&p, &q)?})
        }
        MeasureCmd::Kl { p, q } => {
            let (p, q): (Dist, Dist) = (read_json(p)?, read_json(q)?);
            let v = kl(&p, &q)?;
            // JSON has no infinity.
            json!({"kl": if v.is_finite() { json!(v) } else { json!("inf") }})
        }
        MeasureCmd::Entropy { p, measure, sample } => {
            let p: Dist = read_json(p)?;
            let m = parse_measure(measure)?;
            if m == InfoMeasure::OutOfSample && sample.is_none() {
                return Err(CliError("out-of-sample needs --sample".into()));
            }
            let s = sample_or_empty(sample.as_ref(), &p)?;
            json!({"measure": m.to_string(), "value": info(m, &p, &s)?})
        }
    })
}

fn concepts(cmd: &ConceptsCmd, g: &Global) -> CliResult<Value> {
    Ok(match cmd {
        ConceptsCmd::Vc { class, cap } => {
            let family: ConceptFamily = read_json(class)?;
            let explicit = family.to_explicit(1 << 20)?;
            let vc = vc_dimension(&explicit, *cap)?;
            json!({"vc_dimension": vc.value, "at_least": vc.at_least, "concepts": explicit.len()})
        }
        ConceptsCmd::VersionSpace { class, sample } => {
            let family: ConceptFamily = read_json(class)?;
            let s: Sample = read_json(sample)?;
            let vs = family.version_space(&s)?;
            json!({"size": vs.len().to_string(), "version_space": vs})
        }
        ConceptsCmd::Packing { d, max_tries } => {
            let (class, prov) = packing_construct(*d, g.seed.unwrap_or(0), *max_tries)?;
            if g.format == Format::Csv {
                json!(prov)
            } else {
                json!({"class": class, "provenance": prov})
            }
        }
    })
}

fn solve(cmd: &SolveCmd) -> CliResult<Value> {
    let SolveCmd::MaxInfo {
        class,
        eps,
        measure,
        sample,
    } = cmd;
    let family: ConceptFamily = read_json(class)?;
    let region = FeasibleRegion::from_family(&family, *eps)?;
    let m = parse_measure(measure)?;
    let s = match sample {
        Some(p) => read_json(p)?,
        None => Sample::empty(family.universe()),
    };
    Ok(json!(max_info(m, &region, &s)?))
}

fn learner(a: &LearnArgs, g: &Global) -> CliResult<Value> {
    let s: Sample = read_json(&a.sample)?;
    let need = |p: &Option<PathBuf>, what: &str| -> CliResult<PathBuf> {
        p.clone().ok_or_else(|| CliError(format!("{:?} learner needs --{what}", a.kind)))
    };
    let eps = || a.eps.ok_or_else(|| CliError("this learner needs --eps".into()));
    let spec = match a.kind {
        LearnerKind::Empirical => LearnerSpec::Empirical,
        LearnerKind::Improper => LearnerSpec::ImproperMaxInfo {
            measure: parse_measure(&a.measure)?,
            eps: eps()?,
            concepts: read_json(&need(&a.class, "class")?)?,
        },
        LearnerKind::Proper => LearnerSpec::ProperMaxInfo {
            measure: parse_measure(&a.measure)?,
            eps: eps()?,
            concepts: read_json(&need(&a.class, "class")?)?,
            hypotheses: Arc::new(read_json(&need(&a.hypotheses, "hypotheses")?)?),
        },
        LearnerKind::Fixed => LearnerSpec::Fixed {
            hypotheses: Arc::new(read_json(&need(&a.hypotheses, "hypotheses")?)?),
            choice: match a.index {
                Some(index) => FixedChoice::Constant { index },
                None => FixedChoice::Hashed {
                    seed: g.seed.unwrap_or(0),
                },
            },
        },
    };
    Ok(json!(learn(&spec, &s)?))
}

fn adversary(cmd: &AdversaryCmd, g: &Global) -> CliResult<Value> {
    let AdversaryCmd::Gen { name, params } = cmd;
    let params: Value = serde_json::from_str(params)?;
    let construction: Construction = serde_json::from_value(json!({"name": name, "params": params}))
        .or_else(|_| serde_json::from_value(json!({ "name": name })))
        .map_err(|e| CliError(format!("bad construction {name}: {e}")))?;
    let scenario = construction.prepare()?.draw(g.seed.unwrap_or(0))?;
    Ok(json!({
        "construction": construction,
        "instance": scenario.instance,
        "concepts": scenario.concepts,
        "hypotheses": scenario.hypotheses,
    }))
}

fn load_config(path: &Path, g: &Global) -> CliResult<(ExperimentConfig, PathBuf)> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = g.seed {
        cfg.base_seed = seed;
    }
    if g.workers.is_some() {
        cfg.workers = g.workers;
    }
    let dir = g
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CliError("no output directory: set output_dir or pass --out".into()))?;
    cfg.validate()?;
    Ok((cfg, dir))
}

fn experiment(cmd: &ExperimentCmd, g: &Global) -> CliResult<()> {
    let (path, curve) = match cmd {
        ExperimentCmd::Run { config } => (config, false),
        ExperimentCmd::Curve { config } => (config, true),
    };
    let (cfg, dir) = load_config(path, g)?;
    let (rows, result) = if curve {
        let (rows, result) = complexity_curve(&cfg)?;
        (Some(rows), result)
    } else {
        (None, run_trials(&cfg)?)
    };
    write_outputs(&dir, &result)?;
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(&cfg)? + "\n")?;
    if let Some(rows) = &rows {
        write_curve(&dir.join("curve.csv"), rows)?;
    }
    let text = match g.format {
        Format::Csv => fs::read_to_string(dir.join(if curve { "curve.csv" } else { "summary.csv" }))?,
        Format::Json => {
            let v = match &rows {
                Some(r) => json!(r),
                None => json!(result.summary),
            };
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    print!("{text}");
    Ok(())
}

fn bounds(cmd: &BoundsCmd) -> CliResult<Value> {
    Ok(match cmd {
        BoundsCmd::Fano { n, class_size, kl } => json!({"fano_bound": fano_bound(*n, *class_size, *kl)?}),
        BoundsCmd::RequiredN { d, eps, delta } => json!({"required_n": required_n(*d, *eps, *delta)?}),
        BoundsCmd::EntropyThreshold { base, tol } => {
            let b = match base {
                Base::Bits => LogBase::Bits,
                Base::Nats => LogBase::Nats,
            };
            json!({"threshold": entropy_threshold(b, *tol)?})
        }
    })
}
