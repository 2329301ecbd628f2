use std::fmt::Write as _;

use alcove::alcove_markov::{
    build_kernel, enumerate_alcove, invariant_measure, is_minuscule, spectrum_to_json, AsymptoticEstimate,
};
use alcove::fusion::FusionEngine;
use alcove::rational::format_rational;
use alcove::scaling::{
    brownian_exponent_fit, character_moment_residuals, convolution_measure_with, moment_identity_residual,
    simulate_trajectory, su2_density_comparison,
};
use alcove::walks::{count_walks_from, walk_report, write_walk_report, StepSet};
use alcove::{Error, Family, RootSystem, Weight};
use serde_json::{json, Value};

use crate::{CliError, Command, Format, Report, RunConfig};

type Out = Result<Report, CliError>;

const DEFAULT_TOLERANCE: f64 = 1e-9;

pub fn execute(command: Command, cfg: &RunConfig) -> Out {
    let rs = cfg.root_system()?;
    let format = cfg.format.unwrap_or(Format::Json);
    match command {
        Command::Fusion => fusion(&rs, cfg, format),
        Command::Kernel => kernel(&rs, cfg, format),
        Command::Spectrum => spectrum(&rs, cfg, format),
        Command::Measure => measure(&rs, cfg, format),
        Command::Count => count(&rs, cfg, format),
        Command::Asymptotics => asymptotics(&rs, cfg),
        Command::Simulate => simulate(&rs, cfg),
        Command::Convolve => convolve(&rs, cfg, format),
        Command::Fit => fit(&rs, cfg),
        Command::Verify => verify(&rs, cfg),
    }
}

fn json_report(v: &Value) -> Out {
    let mut body = serde_json::to_string(v)?;
    body.push('\n');
    Ok(Report {
        body,
        extension: "json",
        failure: None,
    })
}

fn csv_report(bytes: Vec<u8>) -> Out {
    Ok(Report {
        body: String::from_utf8(bytes).expect("csv writers emit utf-8"),
        extension: "csv",
        failure: None,
    })
}

fn coords(w: &Weight) -> String {
    w.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

fn fusion(rs: &RootSystem, cfg: &RunConfig, format: Format) -> Out {
    let level = cfg.level()?;
    let engine = FusionEngine::new(rs, level)?;
    let n = u32::try_from(cfg.n.unwrap_or(1)).map_err(|_| Error::InvalidInput("n is too large".into()))?;
    let mut table = engine.table(cfg.gamma()?, n)?;
    if let Some(lambda) = &cfg.lambda {
        engine.check_in_alcove(lambda, "λ")?;
        table.entries.retain(|(l, _, _), _| l == lambda);
    }
    match format {
        Format::Json => {
            let mut body = table.to_json()?;
            body.push('\n');
            Ok(Report {
                body,
                extension: "json",
                failure: None,
            })
        }
        Format::Csv => {
            let mut buf = vec![];
            table.write_csv(&mut buf)?;
            csv_report(buf)
        }
    }
}

fn kernel(rs: &RootSystem, cfg: &RunConfig, format: Format) -> Out {
    let k = build_kernel(rs, cfg.gamma()?, cfg.level()?)?;
    if format == Format::Csv {
        let mut buf = vec![];
        k.write_csv(&mut buf)?;
        return csv_report(buf);
    }
    let info = k.period_info();
    json_report(&json!({
        "family": rs.family(),
        "rank": rs.rank(),
        "level": k.level(),
        "gamma": cfg.gamma()?,
        "weights": k.alcove().weights(),
        "matrix": k.matrix(),
        "fusion": k.fusion_matrix(),
        "period": info.period,
        "irreducible": info.irreducible,
        "classes": info.classes,
    }))
}

fn spectrum(rs: &RootSystem, cfg: &RunConfig, format: Format) -> Out {
    let k = build_kernel(rs, cfg.gamma()?, cfg.level()?)?;
    let spec = k.spectrum()?;
    match format {
        Format::Json => {
            let mut body = spectrum_to_json(spec)?;
            body.push('\n');
            Ok(Report {
                body,
                extension: "json",
                failure: None,
            })
        }
        Format::Csv => {
            let mut s = String::from("sigma,eigenvalue_re,eigenvalue_im\n");
            for p in spec {
                writeln!(s, "{},{:.16e},{:.16e}", coords(&p.sigma), p.eigenvalue.re, p.eigenvalue.im).unwrap();
            }
            csv_report(s.into_bytes())
        }
    }
}

fn measure(rs: &RootSystem, cfg: &RunConfig, format: Format) -> Out {
    let pi = invariant_measure(rs, cfg.level()?)?;
    match format {
        Format::Json => json_report(&json!({
            "family": rs.family(),
            "rank": rs.rank(),
            "level": cfg.level()?,
            "lattice_index": pi.lattice_index.to_string(),
            "weights": pi.weights,
            "values": pi.values,
        })),
        Format::Csv => {
            let mut s = String::from("weight,value\n");
            for (w, v) in pi.weights.iter().zip(&pi.values) {
                writeln!(s, "{},{v:.16e}", coords(w)).unwrap();
            }
            csv_report(s.into_bytes())
        }
    }
}

fn count(rs: &RootSystem, cfg: &RunConfig, format: Format) -> Out {
    let level = cfg.level()?;
    let lambda = cfg.lambda.clone().unwrap_or_else(|| rs.zero());
    let n = u32::try_from(cfg.n.unwrap_or(1)).map_err(|_| Error::InvalidInput("n is too large".into()))?;
    let rows = walk_report(rs, &lambda, cfg.gamma()?, n, level)?;
    match format {
        Format::Csv => {
            let mut buf = vec![];
            write_walk_report(&mut buf, rs.family(), rs.rank(), level, &rows)?;
            csv_report(buf)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "lambda": r.lambda,
                        "beta": r.beta,
                        "n": r.n,
                        "exact_count": r.exact_count.to_string(),
                        "fusion_count": r.fusion_count.to_string(),
                        "asymptotic_value": r.asymptotic_value,
                        "ratio": r.ratio(),
                    })
                })
                .collect();
            json_report(&json!({
                "family": rs.family(),
                "rank": rs.rank(),
                "level": level,
                "gamma": cfg.gamma()?,
                "rows": rows,
            }))
        }
    }
}

fn asymptotics(rs: &RootSystem, cfg: &RunConfig) -> Out {
    let k = build_kernel(rs, cfg.gamma()?, cfg.level()?)?;
    let lambda = cfg.lambda.clone().unwrap_or_else(|| rs.zero());
    let beta = cfg.beta.clone().ok_or(CliError::Missing("beta"))?;
    let n = u32::try_from(cfg.n.ok_or(CliError::Missing("n"))?)
        .map_err(|_| Error::InvalidInput("n is too large".into()))?;
    let mut v = json!({"lambda": lambda, "beta": beta, "n": n});
    match k.asymptotic_estimate(&lambda, &beta, n)? {
        AsymptoticEstimate::WrongResidue { residue, period } => {
            v["wrong_residue"] = json!(true);
            v["residue"] = json!(residue);
            v["period"] = json!(period);
            v["exact"] = json!("0");
        }
        AsymptoticEstimate::Value {
            estimate,
            ln_estimate,
            exact,
            ratio,
        } => {
            v["wrong_residue"] = json!(false);
            v["residue"] = json!(k.residue(&lambda, &beta)?);
            v["estimate"] = json!(estimate);
            v["ln_estimate"] = json!(ln_estimate);
            v["exact"] = json!(exact.to_string());
            v["ratio"] = json!(ratio);
        }
    }
    json_report(&v)
}

fn simulate(rs: &RootSystem, cfg: &RunConfig) -> Out {
    let seed = cfg.seed.ok_or(CliError::Missing("seed"))?;
    let n = cfg.n.ok_or(CliError::Missing("n"))?;
    let traj = simulate_trajectory(rs, cfg.gamma()?, n, cfg.t.unwrap_or(1.0), seed)?;
    Ok(Report {
        body: traj.to_jsonl()?,
        extension: "jsonl",
        failure: None,
    })
}

fn convolve(rs: &RootSystem, cfg: &RunConfig, format: Format) -> Out {
    let level = cfg.level()?;
    let gamma = cfg.gamma()?;
    let xi = cfg.xi.clone().ok_or(CliError::Missing("xi"))?;
    let k = build_kernel(rs, gamma, level)?;
    let mu = convolution_measure_with(&k, &xi)?;
    let density = if rs.family() == Family::A && rs.rank() == 1 {
        Some(su2_density_comparison(xi[0], gamma[0], level, cfg.bins.unwrap_or(10))?)
    } else {
        None
    };
    if format == Format::Csv {
        let mut buf = vec![];
        match &density {
            Some(d) => d.write_csv(&mut buf)?,
            None => {
                let mut s = String::from("beta,point,mass\n");
                for (b, p, m) in &mu.atoms {
                    let p: Vec<String> = p.iter().map(format_rational).collect();
                    writeln!(s, "{},{},{m:.16e}", coords(b), p.join(";")).unwrap();
                }
                buf = s.into_bytes();
            }
        }
        return csv_report(buf);
    }
    let atoms: Vec<Value> = mu
        .atoms
        .iter()
        .map(|(b, p, m)| json!({"beta": b, "point": p.iter().map(format_rational).collect::<Vec<_>>(), "mass": m}))
        .collect();
    let mut v = json!({
        "level": level,
        "xi": xi,
        "gamma": gamma,
        "total_mass": mu.total_mass(),
        "moment_residual": moment_identity_residual(rs, &mu)?,
        "atoms": atoms,
    });
    if let Some(d) = density {
        v["density"] = json!({
            "support": [d.support.0, d.support.1],
            "total_variation": d.total_variation,
            "outside_mass": d.outside_mass,
            "bins": d.bins,
        });
    }
    json_report(&v)
}

fn fit(rs: &RootSystem, cfg: &RunConfig) -> Out {
    let n = cfg.n.ok_or(CliError::Missing("n"))?;
    let sigmas = cfg
        .sigmas
        .clone()
        .unwrap_or_else(|| (1..=3).map(|j| Weight::fundamental(rs.rank(), 0).scale(j)).collect());
    let fit = brownian_exponent_fit(rs, cfg.gamma()?, n, cfg.t.unwrap_or(1.0), &sigmas)?;
    let mut body = fit.to_json()?;
    body.push('\n');
    Ok(Report {
        body,
        extension: "json",
        failure: None,
    })
}

/// Runs the invariant checks on one root system and level.
fn verify(rs: &RootSystem, cfg: &RunConfig) -> Out {
    let level = cfg.level()?;
    let tol = cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let alcove = enumerate_alcove(rs, level)?;
    let gammas: Vec<Weight> = match &cfg.gamma {
        Some(g) => vec![g.clone()],
        None => alcove.weights().to_vec(),
    };
    let engine = FusionEngine::new(rs, level)?;
    let pi = invariant_measure(rs, level)?;
    let mut checks = vec![];
    let mut push = |name: String, value: f64| {
        checks.push(json!({"name": name, "value": value, "tolerance": tol, "pass": value <= tol}));
    };
    push("measure normalization".into(), (pi.values.iter().sum::<f64>() - 1.0).abs());
    for g in &gammas {
        push(format!("character identity γ={g}"), engine.verify_identity(g)?);
        let k = build_kernel(rs, g, level)?;
        push(format!("eigen-relation γ={g}"), k.spectral_residual()?);
        push(format!("invariance γ={g}"), k.invariance_residual(&pi));
        let moments = character_moment_residuals(&k, alcove.weights(), 10)?;
        push(format!("character moments γ={g}"), moments.into_iter().fold(0.0, f64::max));
        if is_minuscule(rs, g)? {
            let steps = StepSet::from_gamma(rs, g)?;
            let mut mismatches = 0u32;
            for lambda in alcove.weights() {
                for n in 0..=4 {
                    let walks = count_walks_from(rs, lambda, &steps, n, level)?;
                    let power = engine.power(lambda, g, n)?;
                    mismatches += alcove
                        .weights()
                        .iter()
                        .filter(|b| walks.get(*b).cloned().unwrap_or_default() != power.get(*b).cloned().unwrap_or_default())
                        .count() as u32;
                }
            }
            push(format!("walk counts γ={g}"), mismatches as f64);
        }
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c["pass"] == json!(false))
        .map(|c| c["name"].as_str().unwrap_or_default().to_string())
        .collect();
    let mut report = json_report(&json!({
        "family": rs.family(),
        "rank": rs.rank(),
        "level": level,
        "checks": checks,
        "passed": failed.is_empty(),
    }))?;
    if !failed.is_empty() {
        report.failure = Some(failed.join(", "));
    }
    Ok(report)
}
