use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cmj_core::criterion::{
    assknmu_ratio, classify_closed_form, conservative_bound_check, iyer_condition, liminflb_ratio, path_series,
    star_series, BoundCheckConfig, CriterionReport, Example, Expectation, SeriesConfig, Verdict,
};
use cmj_core::fitness::{check_assumption_s, FitnessSpec, GFamily, GrowthCertificate, SFamily, SeqTable};
use cmj_core::treegen::{collect_stats, estimate_explosion_time, grow_replicas, write_tree_csv, Mode, Persistence};
use cmj_core::weights::{WeightFamily, WeightModel};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::Output;
use crate::CliError;

fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:e}")
    }
}

/// Weight family paired with each built-in fitness family by the examples.
fn paired_weights(fitness: &str) -> &'static str {
    match fitness {
        "case_i" | "case_iv" => "weibullish",
        "case_ii" => "double_exp_log",
        "case_iii" => "double_exp",
        _ => "constant",
    }
}

pub fn fitness(cfg: &Config) -> Result<FitnessSpec, CliError> {
    let family = cfg
        .str_opt("fitness.family")?
        .ok_or_else(|| CliError::Config("missing required key `fitness.family` (flag --fitness)".into()))?;
    let s = if family == "custom_table" {
        let path = cfg
            .str_opt("fitness.table")?
            .ok_or_else(|| CliError::Config("custom_table needs `fitness.table`".into()))?;
        SFamily::table(SeqTable::from_file(Path::new(&path), cfg.f64_opt("fitness.tail_exponent")?)?)
    } else {
        let mut params = BTreeMap::new();
        for key in ["sigma", "nu", "alpha", "r"] {
            if let Some(v) = cfg.f64_opt(&format!("fitness.{key}"))? {
                params.insert(key.to_string(), v);
            }
        }
        SFamily::from_id(&family, &params)?
    };
    let mut spec = match cfg.str_or("fitness.form", "multiplicative")?.as_str() {
        "multiplicative" => FitnessSpec::multiplicative(GFamily::from_id(&cfg.str_or("fitness.g", "shifted")?)?, s),
        "additive" => FitnessSpec::additive(s),
        other => {
            return Err(CliError::Config(format!(
                "unknown fitness form `{other}`; expected multiplicative or additive"
            )))
        }
    };
    let cert_keys = ["fitness.beta", "fitness.p", "fitness.growth_c", "fitness.growth_n"];
    if cert_keys[1..].iter().any(|k| cfg.has(k)) {
        let cert = GrowthCertificate::new(
            cfg.f64_req("fitness.beta")?,
            cfg.f64_req("fitness.p")?,
            cfg.f64_req("fitness.growth_c")?,
            cfg.u64_opt("fitness.growth_n")?
                .ok_or_else(|| CliError::Config("missing required key `fitness.growth_n`".into()))?,
        )?;
        spec = spec.with_growth(cert);
    }
    Ok(spec)
}

pub fn weights(cfg: &Config, spec: &FitnessSpec) -> Result<WeightModel, CliError> {
    let family = cfg.str_or("weights.family", paired_weights(spec.s().id()))?;
    let model = match family.as_str() {
        "empirical" => {
            let path = cfg
                .str_opt("weights.table")?
                .ok_or_else(|| CliError::Config("empirical weights need `weights.table`".into()))?;
            WeightModel::empirical_from_file(Path::new(&path))?
        }
        "weibullish" | "double_exp" => WeightModel::new(if family == "weibullish" {
            WeightFamily::Weibullish { kappa: cfg.f64_or("weights.kappa", 1.0)? }
        } else {
            WeightFamily::DoubleExp { kappa: cfg.f64_or("weights.kappa", 1.0)? }
        })?,
        "double_exp_log" => WeightModel::new(WeightFamily::DoubleExpLog { gamma: cfg.f64_or("weights.gamma", 2.0)? })?,
        "constant" => WeightModel::constant(cfg.f64_or("weights.value", 1.0)?)?,
        other => WeightModel::from_id(other, &BTreeMap::new())?,
    };
    match (cfg.f64_opt("weights.c_lo")?, cfg.f64_opt("weights.c_hi")?) {
        (None, None) => Ok(model),
        (lo, hi) => {
            let (d_lo, d_hi) = model.tail_constants;
            Ok(model.clone().with_tail_constants(lo.unwrap_or(d_lo), hi.unwrap_or(d_hi))?)
        }
    }
}

fn expectation(cfg: &Config) -> Result<Expectation, CliError> {
    Ok(match cfg.str_or("criterion.expectation", "stieltjes")?.as_str() {
        "stieltjes" => Expectation::Stieltjes { h: cfg.f64_or("criterion.h", 1.0 / 64.0)? },
        "monte_carlo" => Expectation::MonteCarlo {
            draws: cfg.u64_or("criterion.draws", 100_000)? as usize,
            seed: cfg.u64_or("run.seed", 0)?,
        },
        "importance" => Expectation::Importance {
            draws: cfg.u64_or("criterion.draws", 100_000)? as usize,
            seed: cfg.u64_or("run.seed", 0)?,
            theta: cfg.f64_or("criterion.theta", 0.5)?,
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown expectation method `{other}`; expected stieltjes, monte_carlo or importance"
            )))
        }
    })
}

fn series_config(cfg: &Config, lo: u64, hi: u64) -> Result<SeriesConfig, CliError> {
    let mut sc = SeriesConfig::new(cfg.u64_or("run.nmin", lo)?, cfg.u64_or("run.nmax", hi)?);
    sc.per_decade = cfg.u64_or("criterion.per_decade", 10)? as usize;
    sc.mgf_tol = cfg.f64_or("criterion.mgf_tol", 1e-6)?;
    sc.expectation = expectation(cfg)?;
    Ok(sc)
}

fn write_report(out: &mut Output, cfg: &Config, stem: &str, report: &CriterionReport) -> Result<(), CliError> {
    if out.json {
        out.write_json(
            &format!("{stem}.json"),
            cfg,
            "report",
            serde_json::to_value(report).map_err(|e| CliError::Io(e.to_string()))?,
        )?;
    }
    if out.csv {
        let mut f = out.file(&format!("{stem}.csv"))?;
        report.write_csv(&cfg.header_lines(), &mut f)?;
        std::io::Write::flush(&mut f)?;
    }
    println!("{stem}: {}{}", report.verdict.id(), exponent_note(report));
    Ok(())
}

fn exponent_note(report: &CriterionReport) -> String {
    match report.summary.get("fitted_exponent") {
        Some(b) if b.is_finite() => {
            format!(" (fitted exponent {b:.3} ± {:.3})", report.summary["fitted_exponent_spread"])
        }
        _ => String::new(),
    }
}

pub fn grow(cfg: &Config, force: bool, embed: bool) -> Result<PathBuf, CliError> {
    let spec = fitness(cfg)?;
    let wmodel = weights(cfg, &spec)?;
    let n = cfg.u64_or("run.n", 1000)? as usize;
    let replicas = cfg.u64_or("run.replicas", 1)?;
    let seed = cfg.u64_or("run.seed", 0)?;
    let l = cfg.u64_or("run.l", 2)? as u32;
    let mode = if embed {
        Mode::Continuous
    } else {
        match cfg.str_or("run.mode", "discrete")?.as_str() {
            "discrete" => Mode::Discrete,
            "continuous" => Mode::Continuous,
            other => return Err(CliError::Config(format!("unknown mode `{other}`; expected discrete or continuous"))),
        }
    };
    let alpha = if mode == Mode::Continuous { Some(cfg.f64_or("run.explosion_alpha", 0.05)?) } else { None };
    let trees_wanted = cfg.bool_or("run.trees", true)?;
    if n == 0 {
        return Err(CliError::Config("run.n must be at least 1".into()));
    }
    let command = if embed { "embed" } else { "grow" };
    let mut out = Output::open(cfg, &format!("cmj-{command}"), force)?;

    let trees = grow_replicas(&spec, &wmodel, n, seed, replicas, mode)?;
    let rows: Vec<(Value, Vec<String>)> = trees
        .par_iter()
        .map(|t| {
            let stats = collect_stats(t, l);
            let bracket = alpha.map(|a| estimate_explosion_time(t, &spec, a)).transpose()?;
            let share = stats.max_deg_share.values().last().copied().unwrap_or(0.0);
            let argmax = stats.argmax_history.values().last().copied().unwrap_or(1);
            let persistence = match stats.persistence_point {
                Persistence::At(n) => n.to_string(),
                Persistence::Unstable => "unstable".to_string(),
            };
            let mut row = vec![
                t.replica.to_string(),
                t.len().to_string(),
                fmt(share),
                argmax.to_string(),
                stats.last_argmax_change.to_string(),
                persistence,
                stats.height.to_string(),
                stats.moderate_count.to_string(),
            ];
            if let Some(b) = bracket {
                row.extend([fmt(b.tau_lo), fmt(b.tau_hi)]);
            }
            let doc =
                json!({ "replica": t.replica, "scaled_arithmetic": t.scaled, "stats": stats, "explosion": bracket });
            Ok((doc, row))
        })
        .collect::<Result<_, cmj_core::Error>>()?;

    let mut columns = vec![
        "replica",
        "n",
        "max_deg_share",
        "argmax",
        "last_argmax_change",
        "persistence",
        "height",
        "moderate_count",
    ];
    if alpha.is_some() {
        columns.extend(["tau_lo", "tau_hi"]);
    }
    if out.json {
        out.write_json("stats.json", cfg, "replicas", Value::Array(rows.iter().map(|r| r.0.clone()).collect()))?;
    }
    if out.csv {
        let table: Vec<Vec<String>> = rows.iter().map(|r| r.1.clone()).collect();
        out.write_csv("summary.csv", cfg, &columns, &table)?;
        if trees_wanted {
            let header = cfg.header_lines();
            for t in &trees {
                let mut f = out.file(&format!("trees/tree_{:04}.csv", t.replica))?;
                write_tree_csv(t, &header, &mut f)?;
                std::io::Write::flush(&mut f)?;
            }
        }
    }
    let shares: Vec<f64> = rows.iter().filter_map(|r| r.1[2].parse().ok()).collect();
    println!(
        "{command}: {} replicas of n = {n}, mean max_deg_share {:.4}",
        trees.len(),
        shares.iter().sum::<f64>() / shares.len().max(1) as f64
    );
    out.finish(command)
}

pub enum CriterionCmd {
    Star,
    Path,
    Ratio,
    Iyer,
    ClosedForm,
}

fn example_params(cfg: &Config, ex: Example) -> Result<BTreeMap<String, f64>, CliError> {
    let mut params = BTreeMap::new();
    for name in ex.param_names() {
        let key = match *name {
            "kappa" | "gamma" => format!("weights.{name}"),
            _ => format!("fitness.{name}"),
        };
        params.insert(name.to_string(), cfg.f64_req(&key)?);
    }
    Ok(params)
}

fn example_from(cfg: &Config) -> Result<Example, CliError> {
    if let Some(id) = cfg.str_opt("criterion.example")? {
        return Ok(Example::from_id(&id)?);
    }
    match cfg.str_opt("fitness.family")?.as_deref() {
        Some(f) if f.starts_with("case_") => Ok(Example::from_id(&f["case_".len()..])?),
        _ => Err(CliError::Config("closed-form classification needs `criterion.example` (i, ii, iii or iv)".into())),
    }
}

pub fn criterion(cfg: &Config, force: bool, which: CriterionCmd) -> Result<PathBuf, CliError> {
    if let CriterionCmd::ClosedForm = which {
        let ex = example_from(cfg)?;
        let params = example_params(cfg, ex)?;
        let mut out = Output::open(cfg, "cmj-criterion", force)?;
        let report = classify_closed_form(ex, &params)?;
        write_report(&mut out, cfg, "closed_form", &report)?;
        return out.finish("criterion closed-form");
    }
    let spec = fitness(cfg)?;
    let (stem, reports): (&str, Vec<(String, CriterionReport)>) = match which {
        CriterionCmd::Star => {
            let wmodel = weights(cfg, &spec)?;
            let delta = cfg.f64_or("criterion.delta", 0.05)?;
            let sc = series_config(cfg, 100, 100_000)?;
            ("star", vec![("star".into(), star_series(&spec, &wmodel, delta, &sc)?)])
        }
        CriterionCmd::Path => {
            let wmodel = weights(cfg, &spec)?;
            let c = cfg.f64_or("criterion.c", 1.1)?;
            let ws = cfg.f64_list_or("criterion.w", &[spec.w_star])?;
            let sc = series_config(cfg, 100, 100_000)?;
            let mut reps = Vec::new();
            for (k, w) in ws.iter().enumerate() {
                let name = if ws.len() == 1 { "path".to_string() } else { format!("path_w{k}") };
                reps.push((name, path_series(&spec, &wmodel, c, *w, &sc)?));
            }
            ("path", reps)
        }
        CriterionCmd::Ratio => {
            let beta = cfg.f64_opt("fitness.beta")?;
            let lo = cfg.u64_or("run.nmin", 10_000)?;
            let hi = cfg.u64_or("run.nmax", 100_000_000)?;
            let report = match cfg.str_or("criterion.ratio_form", "assknmu")?.as_str() {
                "assknmu" => {
                    let wmodel = weights(cfg, &spec)?;
                    let delta = cfg.f64_or("criterion.delta", 0.05)?;
                    let eps = cfg.f64_or("criterion.eps", 0.5)?;
                    assknmu_ratio(&spec, &wmodel, delta, eps, beta, lo, hi)?
                }
                "liminflb" => liminflb_ratio(&spec, beta, lo, hi)?,
                other => {
                    return Err(CliError::Config(format!("unknown ratio form `{other}`; expected assknmu or liminflb")))
                }
            };
            ("ratio", vec![("ratio".into(), report)])
        }
        CriterionCmd::Iyer => {
            let lo = cfg.u64_or("run.nmin", 1)?;
            let hi = cfg.u64_or("run.nmax", 1_000_000)?;
            let kmax = cfg.f64_or("criterion.kappa_max", 10.0)?;
            ("iyer", vec![("iyer".into(), iyer_condition(&spec, lo, hi, kmax)?)])
        }
        CriterionCmd::ClosedForm => unreachable!(),
    };
    let mut out = Output::open(cfg, &format!("cmj-criterion-{stem}"), force)?;
    for (name, r) in &reports {
        write_report(&mut out, cfg, name, r)?;
    }
    out.finish(&format!("criterion {stem}"))
}

/// The fitness rule and weight law of an example at one parameter point.
fn example_model(ex: Example, p: &BTreeMap<String, f64>) -> Result<(FitnessSpec, WeightModel), cmj_core::Error> {
    let (s, w) = match ex {
        Example::I => (SFamily::CaseI { sigma: p["sigma"] }, WeightFamily::Weibullish { kappa: p["kappa"] }),
        Example::II => (SFamily::CaseII { nu: p["nu"] }, WeightFamily::DoubleExpLog { gamma: p["gamma"] }),
        Example::III => (SFamily::CaseIII { sigma: p["sigma"] }, WeightFamily::DoubleExp { kappa: p["kappa"] }),
        Example::IV => {
            (SFamily::CaseIV { sigma: p["sigma"], alpha: p["alpha"] }, WeightFamily::Weibullish { kappa: p["kappa"] })
        }
    };
    s.validate()?;
    Ok((FitnessSpec::multiplicative(GFamily::Shifted, s), WeightModel::new(w)?))
}

struct ScanSettings {
    delta: f64,
    c: f64,
    series: SeriesConfig,
    simulate: Option<(usize, u64, u64)>,
}

fn verdict_cell(r: Result<CriterionReport, cmj_core::Error>) -> (String, String, Option<String>) {
    match r {
        Ok(r) => (r.verdict.id().to_string(), fmt(r.summary.get("fitted_exponent").copied().unwrap_or(f64::NAN)), None),
        Err(e) => ("ERROR".into(), String::new(), Some(e.to_string())),
    }
}

fn scan_cell(ex: Example, p: &BTreeMap<String, f64>, set: &ScanSettings) -> (Vec<String>, Value) {
    let mut errors = Vec::new();
    let (closed, value) = match classify_closed_form(ex, p) {
        Ok(r) => (r.verdict.id().to_string(), fmt(r.summary["criterion_value"])),
        Err(e) => {
            errors.push(format!("closed form: {e}"));
            ("ERROR".into(), String::new())
        }
    };
    let mut row = vec![closed.clone(), value];
    let mut doc = json!({ "params": p, "closed_form": closed });
    match example_model(ex, p) {
        Ok((spec, wmodel)) => {
            let (sv, se, serr) = verdict_cell(star_series(&spec, &wmodel, set.delta, &set.series));
            let (pv, pe, perr) = verdict_cell(path_series(&spec, &wmodel, set.c, spec.w_star, &set.series));
            errors.extend(serr.map(|e| format!("star: {e}")));
            errors.extend(perr.map(|e| format!("path: {e}")));
            doc["star"] = json!({ "verdict": sv, "fitted_exponent": se });
            doc["path"] = json!({ "verdict": pv, "fitted_exponent": pe });
            row.extend([sv, se, pv, pe]);
            if let Some((n, reps, seed)) = set.simulate {
                let share = grow_replicas(&spec, &wmodel, n, seed, reps, Mode::Discrete).map(|trees| {
                    trees
                        .iter()
                        .map(|t| *t.outdeg.iter().max().unwrap_or(&0) as f64 / (n.max(2) - 1) as f64)
                        .sum::<f64>()
                        / reps as f64
                });
                match share {
                    Ok(s) => {
                        doc["max_deg_share"] = json!(s);
                        row.push(fmt(s));
                    }
                    Err(e) => {
                        errors.push(format!("simulation: {e}"));
                        row.push("ERROR".into());
                    }
                }
            }
        }
        Err(e) => {
            errors.push(format!("model: {e}"));
            row.extend(["ERROR".into(), String::new(), "ERROR".into(), String::new()]);
            if set.simulate.is_some() {
                row.push("ERROR".into());
            }
        }
    }
    doc["errors"] = json!(errors);
    row.push(errors.join("; "));
    (row, doc)
}

pub fn phase_scan(cfg: &Config, force: bool) -> Result<PathBuf, CliError> {
    let ex = Example::from_id(
        &cfg.str_opt("criterion.example")?
            .ok_or_else(|| CliError::Config("phase-scan needs `criterion.example` (i, ii, iii or iv)".into()))?,
    )?;
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    for name in ex.param_names() {
        let key = match *name {
            "kappa" | "gamma" => format!("weights.{name}"),
            _ => format!("fitness.{name}"),
        };
        let values = cfg.range(&key)?.ok_or_else(|| {
            CliError::Config(format!("phase-scan of example {} needs `{key}` (a value or a:b:step)", ex.id()))
        })?;
        axes.push((name.to_string(), values));
    }
    let simulate = if cfg.bool_or("run.simulate", false)? {
        Some((cfg.u64_or("run.n", 10_000)? as usize, cfg.u64_or("run.replicas", 4)?, cfg.u64_or("run.seed", 0)?))
    } else {
        None
    };
    let set = ScanSettings {
        delta: cfg.f64_or("criterion.delta", 0.05)?,
        c: cfg.f64_or("criterion.c", 1.1)?,
        series: series_config(cfg, 100, 100_000)?,
        simulate,
    };
    let mut cells: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new()];
    for (name, values) in &axes {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.insert(name.clone(), *v);
                    c
                })
            })
            .collect();
    }
    let mut out = Output::open(cfg, "cmj-phase-scan", force)?;
    let results: Vec<(Vec<String>, Value)> = cells.par_iter().map(|p| scan_cell(ex, p, &set)).collect();

    let mut columns: Vec<&str> = vec!["example"];
    columns.extend(ex.param_names());
    columns.extend(["criterion_value", "closed_form", "star", "star_exponent", "path", "path_exponent"]);
    if simulate.is_some() {
        columns.push("max_deg_share");
    }
    columns.push("error");
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&results)
        .map(|(p, (cols, _))| {
            let mut row = vec![ex.id().to_string()];
            row.extend(ex.param_names().iter().map(|n| p[*n].to_string()));
            row.push(cols[1].clone());
            row.push(cols[0].clone());
            row.extend(cols[2..].iter().cloned());
            row
        })
        .collect();
    if out.csv {
        out.write_csv("grid.csv", cfg, &columns, &rows)?;
    }
    if out.json {
        out.write_json("grid.json", cfg, "cells", Value::Array(results.into_iter().map(|r| r.1).collect()))?;
    }
    let errors = rows.iter().filter(|r| !r.last().unwrap().is_empty()).count();
    println!("phase-scan: {} cells, {errors} with errors", rows.len());
    out.finish("phase-scan")
}

pub fn validate_bound(cfg: &Config, force: bool) -> Result<PathBuf, CliError> {
    let spec = fitness(cfg)?;
    let wmodel = weights(cfg, &spec)?;
    let a1s = cfg.f64_list_or("criterion.a1", &[20.0, 40.0, 80.0])?;
    let ms = cfg.f64_list_or("criterion.m", &[1.0, 2.0])?;
    let delta = cfg.f64_or("criterion.delta", 0.05)?;
    let replicas = cfg.u64_or("run.replicas", 100_000)?;
    let seed = cfg.u64_or("run.seed", 0)?;
    let eps_b = cfg.f64_or("criterion.eps_b", 1e-10)?;
    let expectation = expectation(cfg)?;
    let as_int = |x: f64, key: &str| {
        if x >= 1.0 && x.fract() == 0.0 {
            Ok(x as u64)
        } else {
            Err(CliError::Config(format!("`{key}` entries must be positive integers, got {x}")))
        }
    };
    let mut out = Output::open(cfg, "cmj-validate-bound", force)?;
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    let mut failures = 0;
    for a1 in &a1s {
        for m in &ms {
            let mut bc = BoundCheckConfig::new(
                as_int(*a1, "criterion.a1")?,
                as_int(*m, "criterion.m")? as u32,
                delta,
                replicas,
                seed,
            );
            bc.eps_b = eps_b;
            bc.expectation = expectation;
            let r = conservative_bound_check(&spec, &wmodel, &bc)?;
            if r.verdict != Verdict::Pass {
                failures += 1;
            }
            let s = &r.summary;
            rows.push(vec![
                bc.a1.to_string(),
                bc.m.to_string(),
                fmt(s["lambda"]),
                fmt(s["bound"]),
                fmt(s["estimate"]),
                fmt(s["ci_lower"]),
                fmt(s["ci_upper"]),
                (s["hit_replicas"] as u64).to_string(),
                r.verdict.id().to_string(),
            ]);
            println!(
                "a1 = {}, m = {}: {} (upper CI {:e} vs bound {:e})",
                bc.a1,
                bc.m,
                r.verdict.id(),
                s["ci_upper"],
                s["bound"]
            );
            docs.push(serde_json::to_value(&r).map_err(|e| CliError::Io(e.to_string()))?);
        }
    }
    if out.csv {
        let columns = ["a1", "m", "lambda", "bound", "estimate", "ci_lower", "ci_upper", "hit_replicas", "verdict"];
        out.write_csv("bound.csv", cfg, &columns, &rows)?;
    }
    if out.json {
        out.write_json("bound.json", cfg, "cells", Value::Array(docs))?;
    }
    println!("validate-bound: {} cells, {failures} not passing", rows.len());
    out.finish("validate-bound")
}

pub fn check_assumptions(cfg: &Config, force: bool) -> Result<PathBuf, CliError> {
    let spec = fitness(cfg)?;
    let lo = cfg.u64_or("run.nmin", 1000)?;
    let hi = cfg.u64_or("run.nmax", 100_000)?;
    let mut out = Output::open(cfg, "cmj-check-assumptions", force)?;
    let report = check_assumption_s(&spec, lo, hi)?;
    if out.json {
        out.write_json(
            "assumptions.json",
            cfg,
            "report",
            serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?,
        )?;
    }
    if out.csv {
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| vec![r.n.to_string(), fmt(r.s_over_n_beta), fmt(r.s_over_n_p), fmt(r.ratio)])
            .collect();
        out.write_csv("assumptions.csv", cfg, &["n", "s_over_n_beta", "s_over_n_p", "ratio"], &rows)?;
    }
    println!(
        "check-assumptions: {:?} (lower limit {}, upper limit {}, max ratio {:.4} at n = {})",
        report.verdict, report.lower_limit.pass, report.upper_limit.pass, report.max_ratio, report.max_ratio_at
    );
    out.finish("check-assumptions")
}
