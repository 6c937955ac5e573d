use std::fs;
use std::io::Write;

use ebb::estimation::{
    fit_beta, fit_ebb_joint, fit_ebb_profile, fit_kumaraswamy, fit_margins, lr_from_logliks, FitResult, Model,
};
use ebb::fgm::sample_z;
use ebb::montecarlo::{emit_histogram_data, run_scenario, McScenario, McSummary};
use ebb::stats::Descriptive;
use ebb::RngSeed;
use serde_json::{json, Map, Value};

use crate::data::{self, Format};
use crate::error::{CliError, Result};
use crate::report::{self, long_rows, sink_name, OutFormat, Rounder};
use crate::{CurveArgs, FitArgs, MarginsArgs, SampleArgs, SimulateArgs, Which};

fn fit_json(f: &FitResult, n_dropped: usize, r: Rounder) -> Value {
    let params: Map<String, Value> = f
        .model
        .param_names()
        .iter()
        .zip(&f.params)
        .map(|(k, &v)| (k.to_string(), r.num(v)))
        .collect();
    json!({
        "model": f.model.to_string(),
        "params": params,
        "loglik": r.num(f.loglik),
        "aic": r.num(f.aic),
        "bic": r.num(f.bic),
        "converged": f.converged,
        "n_dropped": n_dropped,
    })
}

fn descriptive_json(d: &Descriptive, r: Rounder) -> Value {
    json!({
        "n": d.n,
        "min": r.num(d.min),
        "q1": r.num(d.q1),
        "median": r.num(d.median),
        "mean": r.num(d.mean),
        "q3": r.num(d.q3),
        "max": r.num(d.max),
        "sd": r.num(d.sd),
        "skewness": r.num(d.skewness),
        "kurtosis": r.num(d.kurtosis),
    })
}

fn emit(v: &Value, path: Option<&std::path::Path>, format: OutFormat) -> Result<()> {
    match format {
        OutFormat::Json => report::write_json(path, v),
        OutFormat::Csv => report::write_csv(path, &["section", "key", "value"], &long_rows(v)),
    }
}

pub fn fit(a: &FitArgs) -> Result<()> {
    let ctl = a.numeric.series()?;
    let r = a.numeric.rounder();
    let d = data::load(&a.data.spec(a.format)?)?;
    let desc = Descriptive::from_sample(&d.z)?;

    let mut models: Vec<Model> = a.model.iter().map(|&m| m.into()).collect();
    models.dedup();
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for &m in &models {
        let res = match m {
            Model::Beta => fit_beta(&d.z),
            Model::Kumaraswamy => fit_kumaraswamy(&d.z),
            Model::Ebb if a.joint => fit_ebb_joint(&d.z, &ctl),
            Model::Ebb => fit_ebb_profile(&d.z, &ctl),
        };
        match res {
            Ok(f) if f.converged => fits.push(f),
            Ok(f) => {
                failures.push((m, "did not converge".to_string()));
                fits.push(f);
            }
            Err(e) => failures.push((m, e.to_string())),
        }
    }
    fits.sort_by(|x, y| x.aic.total_cmp(&y.aic));

    let get = |m: Model| fits.iter().find(|f| f.model == m);
    let lr = match (get(Model::Ebb), get(Model::Beta)) {
        (Some(e), Some(b)) => {
            let t = lr_from_logliks(e.loglik, b.loglik)?;
            json!({"statistic": r.num(t.statistic), "df": t.df, "p_value": r.num(t.p_value)})
        }
        _ => Value::Null,
    };
    let report = json!({
        "n": d.z.len(),
        "n_dropped": d.n_dropped,
        "ebb_estimator": if a.joint { "joint" } else { "profile" },
        "descriptive": descriptive_json(&desc, r),
        "fits": fits.iter().map(|f| fit_json(f, d.n_dropped, r)).collect::<Vec<_>>(),
        "lr_test": lr,
        "failures": failures.iter().map(|(m, e)| json!({"model": m.to_string(), "error": e})).collect::<Vec<_>>(),
    });
    emit(&report, a.out.as_deref(), a.out_format)?;

    if failures.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = failures.iter().map(|(m, e)| format!("{m}: {e}")).collect();
        Err(CliError::Numerical(format!("fit failed for {}", list.join("; "))))
    }
}

pub fn sample(a: &SampleArgs) -> Result<()> {
    let p = a.params.params()?;
    if a.n == 0 {
        return Err(CliError::Validation("--n must be positive".into()));
    }
    let z = sample_z(&p, a.n, RngSeed::new(a.seed, 0))?;
    let path = a.out.as_deref();
    let name = sink_name(path);
    let mut w = report::open_sink(path)?;
    for v in z {
        // Display prints the shortest string that parses back to the same f64
        writeln!(w, "{v}").map_err(|e| CliError::io(&name, e))?;
    }
    w.flush().map_err(|e| CliError::io(&name, e))
}

pub fn curve(a: &CurveArgs) -> Result<()> {
    let p = a.params.params()?;
    let ctl = a.numeric.series()?;
    let q = a.numeric.quadrature()?;
    let r = a.numeric.rounder();
    if a.points < 2 {
        return Err(CliError::Validation(format!("--points must be at least 2, got {}", a.points)));
    }
    let h = 1.0 / (a.points as f64 + 1.0);
    let rows = (1..=a.points)
        .map(|k| {
            let z = k as f64 * h;
            let v = match a.which {
                Which::Pdf => p.pdf(z, &ctl),
                Which::Cdf => p.cdf_with(z, &ctl, &q),
            }
            .map_err(|e| CliError::Numerical(format!("at z = {z}: {e}")))?;
            Ok(vec![z.to_string(), r.cell(Some(v))])
        })
        .collect::<Result<Vec<_>>>()?;
    let col = match a.which {
        Which::Pdf => "pdf",
        Which::Cdf => "cdf",
    };
    report::write_csv(a.out.as_deref(), &["z", col], &rows)
}

/// Scenarios from a JSON object or array. A missing `master_seed` becomes
/// `(seed, index)` so that scenarios sharing the fallback seed use distinct streams.
pub fn parse_scenarios(text: &str, seed: u64) -> Result<Vec<McScenario>> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))?;
    let items = match v {
        Value::Array(a) => a,
        obj @ Value::Object(_) => vec![obj],
        _ => return Err(CliError::Parse("config must be a scenario object or a list of them".into())),
    };
    if items.is_empty() {
        return Err(CliError::Parse("config lists no scenarios".into()));
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, mut item)| {
            if let Value::Object(m) = &mut item {
                m.entry("master_seed")
                    .or_insert_with(|| json!({"seed": seed, "stream_id": i}));
            }
            serde_json::from_value(item).map_err(|e| CliError::Parse(format!("config scenario {i}: {e}")))
        })
        .collect()
}

fn summary_row(i: usize, s: &McScenario, m: &McSummary, r: Rounder) -> Vec<String> {
    let p = &s.params;
    let mut row = vec![
        i.to_string(),
        p.alpha().to_string(),
        p.beta().to_string(),
        p.rho().to_string(),
        m.n.to_string(),
        m.replications.to_string(),
        m.failure_count.to_string(),
    ];
    for field in 0..4 {
        for ps in &m.params {
            row.push(match field {
                0 => r.cell(ps.rb),
                1 => r.cell(ps.abs_bias),
                2 => r.cell(Some(ps.rmse)),
                _ => r.cell(Some(ps.root_mse)),
            });
        }
    }
    row
}

const SUMMARY_HEADER: [&str; 19] = [
    "scenario", "alpha", "beta", "rho", "n", "replications", "failures",
    "rb_alpha", "rb_beta", "rb_rho",
    "bias_alpha", "bias_beta", "bias_rho",
    "rmse_alpha", "rmse_beta", "rmse_rho",
    "root_rmse_alpha", "root_rmse_beta", "root_rmse_rho",
];

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let ctl = a.numeric.series()?;
    let r = a.numeric.rounder();
    if a.bins == 0 {
        return Err(CliError::Validation("--bins must be positive".into()));
    }
    let text = fs::read_to_string(&a.config).map_err(|e| CliError::io(&a.config, e))?;
    let scenarios = parse_scenarios(&text, a.seed)?;
    if let Some(dir) = &a.histograms {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }

    let mut rows = Vec::new();
    let mut skew_rows = Vec::new();
    let mut failed = Vec::new();
    for (i, s) in scenarios.iter().enumerate() {
        let summaries = match run_scenario(s, &ctl) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("ebb: scenario {i} failed: {e}");
                failed.push(i);
                continue;
            }
        };
        for m in &summaries {
            rows.push(summary_row(i, s, m, r));
            let Some(dir) = &a.histograms else { continue };
            for h in emit_histogram_data(m, a.bins)? {
                let path = dir.join(format!("scenario{i}_n{}_{}.csv", m.n, h.param));
                let hist_rows: Vec<Vec<String>> = h
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(b, c)| vec![r.cell(Some(h.edges[b])), r.cell(Some(h.edges[b + 1])), c.to_string()])
                    .collect();
                report::write_csv(Some(&path), &["lower", "upper", "count"], &hist_rows)?;
                skew_rows.push(vec![i.to_string(), m.n.to_string(), h.param.clone(), r.cell(h.skewness)]);
            }
        }
    }
    report::write_csv(a.out.as_deref(), &SUMMARY_HEADER, &rows)?;
    if let Some(dir) = &a.histograms {
        report::write_csv(Some(&dir.join("skewness.csv")), &["scenario", "n", "param", "skewness"], &skew_rows)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{} of {} scenarios failed: {failed:?}", failed.len(), scenarios.len())))
    }
}

pub fn margins(a: &MarginsArgs) -> Result<()> {
    let ctl = a.numeric.series()?;
    let q = a.numeric.quadrature()?;
    let r = a.numeric.rounder();
    let d = data::load(&a.data.spec(Format::Xy)?)?;
    let m = fit_margins(&d.x, &d.y, &q)?;
    let profile = fit_ebb_profile(&d.z, &ctl)?;
    let report = json!({
        "n": d.z.len(),
        "n_dropped": d.n_dropped,
        "x": {"shape": r.num(m.shape_x), "rate": r.num(m.rate_x), "gini_integral": r.num(m.rho.beta_x), "sd": r.num(m.rho.sd_x)},
        "y": {"shape": r.num(m.shape_y), "rate": r.num(m.rate_y), "gini_integral": r.num(m.rho.beta_y), "sd": r.num(m.rho.sd_y)},
        "correlation": r.num(m.rho.correlation),
        "rho_moment": r.num(m.rho.rho),
        "rho_moment_unclipped": r.num(m.rho.raw),
        "rho_clipped": m.rho.clipped,
        "rho_profile": r.num(profile.params[2]),
    });
    emit(&report, a.out.as_deref(), a.out_format)
}
