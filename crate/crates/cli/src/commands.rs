use std::io::Write;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sitewise::domination::{
    check_local_domination_over, check_pairwise_domination, check_stochastic_domination, exchangeable_reduce, MaskRange, Mode,
};
use sitewise::mask::{all_masks, ordering_string};
use sitewise::montecarlo::{estimate_one_arm, fit_decay, pseudo_critical, scan_parameter, BisectionOptions, Estimate};
use sitewise::oracle::{exact_one_arm, verify_interpolation_monotonicity};
use sitewise::thresholds::report_thresholds;
use sitewise::{DegreeDistribution, LawBuilder, LocalLaw, NeighborMask, OracleOptions, Rational, SamplingConfig, Weight, VERSION};

use crate::args::{parse_list, Cli, Command, GlobalArgs, PairArgs, TableFormat};
use crate::config::load_job;

/// Whether the checked condition holds; decides the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Violated,
}

impl From<bool> for Outcome {
    fn from(holds: bool) -> Self {
        if holds {
            Outcome::Holds
        } else {
            Outcome::Violated
        }
    }
}

fn emit(global: &GlobalArgs, text: &str) -> Result<()> {
    match &global.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json(global: &GlobalArgs, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(global, &text)
}

fn emit_estimates(global: &GlobalArgs, rows: &[Estimate], format: TableFormat) -> Result<()> {
    match format {
        TableFormat::Json => emit_json(global, &rows),
        TableFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in rows {
                writer.serialize(row)?;
            }
            emit(global, &String::from_utf8(writer.into_inner()?)?)
        }
    }
}

fn sampling(global: &GlobalArgs, samples: u64) -> SamplingConfig {
    SamplingConfig::new(samples, global.seed).with_workers(global.workers)
}

fn oracle_options(global: &GlobalArgs) -> OracleOptions {
    OracleOptions { budget: global.budget as u128, workers: global.workers }
}

fn tolerance<T: Weight>(tol: f64) -> Result<T> {
    if T::EXACT {
        Ok(T::zero())
    } else {
        Ok(T::parse_value(&tol.to_string())?)
    }
}

fn with_header(header: Value, body: impl Serialize) -> Result<Value> {
    let mut value = serde_json::to_value(body)?;
    if let (Value::Object(target), Value::Object(extra)) = (&mut value, header) {
        for (k, v) in extra {
            target.insert(k, v);
        }
    }
    Ok(value)
}

fn hitting_profile<T: Weight>(global: &GlobalArgs, law: &LawBuilder, d: usize) -> Result<Outcome> {
    let built: LocalLaw<T> = law.build(d)?;
    let profile = built.hitting_profile();
    let hits: Vec<Value> = all_masks(d)
        .map(|mask| {
            let hit = profile.hit(mask);
            let mut row = json!({ "mask": mask.bits(), "directions": mask.names(), "hit": hit.to_f64() });
            if T::EXACT {
                row["hit_exact"] = json!(hit.to_string());
            }
            row
        })
        .collect();
    emit_json(
        global,
        &json!({ "law": law.to_string(), "d": d, "exact": T::EXACT, "ordering": ordering_string(d), "hits": hits, "version": VERSION }),
    )?;
    Ok(Outcome::Holds)
}

fn check_domination<T: Weight>(global: &GlobalArgs, pair: &PairArgs, mode: Mode, range: MaskRange) -> Result<Outcome> {
    let p: LocalLaw<T> = pair.p.build(pair.d)?;
    let q: LocalLaw<T> = pair.q.build(pair.d)?;
    let report = check_local_domination_over(&p, &q, mode, &tolerance::<T>(pair.tol)?, range)?;
    let holds = report.holds;
    emit_json(global, &with_header(json!({ "p": pair.p.to_string(), "q": pair.q.to_string(), "d": pair.d }), report)?)?;
    Ok(holds.into())
}

fn check_pairwise<T: Weight>(global: &GlobalArgs, pair: &PairArgs) -> Result<Outcome> {
    let p: LocalLaw<T> = pair.p.build(pair.d)?;
    let q: LocalLaw<T> = pair.q.build(pair.d)?;
    let report = check_pairwise_domination(&p, &q, &tolerance::<T>(pair.tol)?)?;
    let holds = report.holds;
    emit_json(global, &with_header(json!({ "p": pair.p.to_string(), "q": pair.q.to_string(), "d": pair.d }), report)?)?;
    Ok(holds.into())
}

fn check_stochastic<T: Weight>(global: &GlobalArgs, pair: &PairArgs) -> Result<Outcome> {
    let p: LocalLaw<T> = pair.p.build(pair.d)?;
    let q: LocalLaw<T> = pair.q.build(pair.d)?;
    let verdict = check_stochastic_domination(&p, &q, &tolerance::<T>(pair.tol)?)?;
    let witness_sets: Option<Vec<String>> =
        verdict.witness.as_ref().map(|w| w.masks.iter().map(|&m| NeighborMask(m).to_string()).collect());
    let dominated = verdict.dominated;
    let header = json!({ "p": pair.p.to_string(), "q": pair.q.to_string(), "d": pair.d, "exact": T::EXACT, "witness_sets": witness_sets });
    emit_json(global, &with_header(header, verdict)?)?;
    Ok(dominated.into())
}

fn reduce_exchangeable<T: Weight>(global: &GlobalArgs, d: usize, alphas: &str) -> Result<Outcome> {
    let alphas = alphas
        .split(',')
        .map(|a| T::parse_value(a).map_err(|e| anyhow!("alphas: {e}")))
        .collect::<Result<Vec<T>>>()?;
    let dd = DegreeDistribution::new(d, alphas)?;
    let chain = exchangeable_reduce(&dd)?;
    let steps: Vec<Vec<f64>> = chain.steps.iter().map(|s| s.alphas().iter().map(Weight::to_f64).collect()).collect();
    let mut doc = json!({
        "d": d,
        "mean_degree": dd.mean().to_f64(),
        "steps": steps,
        "terminal": steps.last(),
        "ranges": chain.steps.iter().map(|s| s.range()).collect::<Vec<_>>(),
        "matches_dng": true,
    });
    if T::EXACT {
        doc["steps_exact"] = json!(chain
            .steps
            .iter()
            .map(|s| s.alphas().iter().map(|a| a.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>());
    }
    emit_json(global, &doc)?;
    Ok(Outcome::Holds)
}

fn exact<T: Weight>(global: &GlobalArgs, law: &LawBuilder, d: usize, n: u64, sem: sitewise::EdgeSemantics) -> Result<Outcome> {
    let built: LocalLaw<T> = if sem.uses_law() { law.build(d)? } else { LocalLaw::empty(d)? };
    let value = exact_one_arm(&built, n, sem, &oracle_options(global))?;
    emit_json(global, &value.report(&law.to_string(), d, n, sem))?;
    Ok(Outcome::Holds)
}

pub fn execute(cli: Cli) -> Result<Outcome> {
    let global = &cli.global;
    match cli.command {
        Command::HittingProfile { law, d, exact, emit_law } => {
            if let Some(path) = emit_law {
                let built: LocalLaw = law.build(d)?;
                std::fs::write(&path, built.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            if exact {
                hitting_profile::<Rational>(global, &law, d)
            } else {
                hitting_profile::<f64>(global, &law, d)
            }
        }
        Command::CheckDomination { pair, strict, all_masks } => {
            let mode = if strict { Mode::Strict } else { Mode::Weak };
            let range = if all_masks { MaskRange::All } else { MaskRange::Proper };
            if pair.exact {
                check_domination::<Rational>(global, &pair, mode, range)
            } else {
                check_domination::<f64>(global, &pair, mode, range)
            }
        }
        Command::CheckPairwise { pair } => {
            if pair.exact {
                check_pairwise::<Rational>(global, &pair)
            } else {
                check_pairwise::<f64>(global, &pair)
            }
        }
        Command::CheckStochastic { pair } => {
            if pair.exact {
                check_stochastic::<Rational>(global, &pair)
            } else {
                check_stochastic::<f64>(global, &pair)
            }
        }
        Command::ReduceExchangeable { d, alphas, exact } => {
            if exact {
                reduce_exchangeable::<Rational>(global, d, &alphas)
            } else {
                reduce_exchangeable::<f64>(global, d, &alphas)
            }
        }
        Command::Estimate { law, model, sampling: s, format } => {
            let built: LocalLaw = if model.sem.uses_law() { law.build(model.d)? } else { LocalLaw::empty(model.d)? };
            let est = estimate_one_arm(&built, model.n, model.sem, &sampling(global, s.samples))?.labeled(law.to_string());
            emit_estimates(global, &[est], format)?;
            Ok(Outcome::Holds)
        }
        Command::Scan { family, grid, model, sampling: s, crn, format } => {
            let grid: Vec<f64> = parse_list(&grid, "grid")?;
            let rows = scan_parameter(&family, &grid, model.d, model.n, model.sem, &sampling(global, s.samples), crn)?;
            emit_estimates(global, &rows, format)?;
            Ok(Outcome::Holds)
        }
        Command::FitDecay { law, d, radii, sem, sampling: s } => {
            let radii: Vec<u64> = parse_list(&radii, "radius")?;
            let built: LocalLaw = if sem.uses_law() { law.build(d)? } else { LocalLaw::empty(d)? };
            let mut fit = fit_decay(&built, &radii, sem, &sampling(global, s.samples))?;
            for est in &mut fit.estimates {
                est.model = law.to_string();
            }
            emit_json(global, &with_header(json!({ "model": law.to_string(), "d": d, "version": VERSION }), fit)?)?;
            Ok(Outcome::Holds)
        }
        Command::PseudoCritical { family, model, sampling: s, threshold, tol, lo, hi, crn } => {
            let opts = BisectionOptions { threshold, tol, bracket: lo.zip(hi), common_random_numbers: crn };
            let res = pseudo_critical(&family, model.d, model.n, model.sem, &sampling(global, s.samples), &opts)?;
            emit_json(
                global,
                &with_header(json!({ "seed": global.seed, "samples": s.samples, "version": VERSION }), res)?,
            )?;
            Ok(Outcome::Holds)
        }
        Command::VerifyInterpolation { p, q, d, n, sem, tol } => {
            let lp: LocalLaw = p.build(d)?;
            let lq: LocalLaw = q.build(d)?;
            let verdict = verify_interpolation_monotonicity(&lp, &lq, n, sem, &tol, &oracle_options(global))?;
            let holds = verdict.holds;
            emit_json(global, &with_header(json!({ "p": p.to_string(), "q": q.to_string(), "version": VERSION }), verdict)?)?;
            Ok(holds.into())
        }
        Command::Exact { law, model, exact: rational } => {
            if rational {
                exact::<Rational>(global, &law, model.d, model.n, model.sem)
            } else {
                exact::<f64>(global, &law, model.d, model.n, model.sem)
            }
        }
        Command::ReportThresholds { d, pc_upper, json } => {
            let report = report_thresholds(d, pc_upper.as_deref())?;
            if json {
                emit_json(global, &report)?;
            } else {
                emit(global, &report.to_string())?;
            }
            Ok(Outcome::Holds)
        }
        Command::Run { config } => {
            let argv = load_job(&config)?;
            let mut job = <Cli as clap::Parser>::try_parse_from(&argv)
                .map_err(|e| anyhow!("job file {}: {}", config.display(), e.to_string().trim_end()))?;
            if matches!(job.command, Command::Run { .. }) {
                return Err(anyhow!("job file {}: nested run", config.display()));
            }
            if job.global.output.is_none() {
                job.global.output = cli.global.output.clone();
            }
            execute(job)
        }
    }
}
