//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use alcove::alcove_markov::{
    build_kernel, dirichlet_spectrum, enumerate_alcove, invariant_measure, lattice_index, AsymptoticEstimate,
};
use alcove::charlib::{tensor_decompose, weight_multiplicities};
use alcove::fusion::{dual_weight, FusionEngine};
use alcove::scaling::{brownian_exponent_fit, character_moment_residuals, su2_density_comparison};
use alcove::walks::{count_littelmann_paths, count_walks_from, step_model_report, StepModel, StepSet};
use alcove::{Family, RootSystem, Weight};
use num_traits::Zero;

const DIRICHLET_EIGENVALUE_TOL: f64 = 1e-10;
const DIRICHLET_EIGENFUNCTION_TOL: f64 = 1e-9;
const DIRICHLET_RUNTIME: Duration = Duration::from_secs(1);
const MEASURE_TOL: f64 = 1e-12;
const WALK_RUNTIME: Duration = Duration::from_secs(300);
const FUSION_IDENTITY_TOL: f64 = 1e-8;
const ASYMPTOTIC_RATIO_TOL: f64 = 0.01;
const CLOSED_FORM_TOL: f64 = 1e-9;
const MOMENT_TOL: f64 = 1e-10;
const TV_TOL: f64 = 0.05;
const TV_BINS: usize = 10;
const LINEARITY_TOL: f64 = 0.05;
const C_STABILITY_TOL: f64 = 0.05;
const FIT_RUNTIME: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn w(c: &[i64]) -> Weight {
    Weight::new(c.to_vec())
}

fn rs(f: Family, r: usize) -> RootSystem {
    RootSystem::new(f, r).expect("supported root system")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// sin(π(i+1)(m+1)/(k+2)) / sin(π(m+1)/(k+2))
fn su2_chi(i: i64, m: i64, k: i64) -> f64 {
    let l = (k + 2) as f64;
    (PI * ((i + 1) * (m + 1)) as f64 / l).sin() / (PI * (m + 1) as f64 / l).sin()
}

fn su2_dirichlet() -> Outcome {
    let start = Instant::now();
    let a1 = rs(Family::A, 1);
    let (mut worst_val, mut worst_fn) = (0.0f64, 0.0f64);
    for k in 1..=20i64 {
        let pairs = dirichlet_spectrum(&a1, &w(&[1]), k).map_err(e)?;
        ensure(pairs.len() == k as usize + 1, || format!("k={k}: {} eigenpairs", pairs.len()))?;
        for (m, p) in pairs.iter().enumerate() {
            let m = m as i64;
            let expect = 1.0 - (PI * (m + 1) as f64 / (k + 2) as f64).cos();
            worst_val = worst_val.max((p.eigenvalue - expect).norm());
            // compare up to scale: normalize both at the first entry, which is 1
            let f0 = p.eigenfunction[0];
            for (i, f) in p.eigenfunction.iter().enumerate() {
                let oracle = su2_chi(i as i64, m, k) / su2_chi(0, m, k);
                worst_fn = worst_fn.max((f / f0 - oracle).norm());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(worst_val < DIRICHLET_EIGENVALUE_TOL, || format!("eigenvalue error {worst_val:.3e}"))?;
    ensure(worst_fn < DIRICHLET_EIGENFUNCTION_TOL, || format!("eigenfunction error {worst_fn:.3e}"))?;
    ensure(elapsed < DIRICHLET_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("max eigenvalue err {worst_val:.1e}, eigenfunction err {worst_fn:.1e}, {elapsed:.2?}"))
}

fn su2_measure() -> Outcome {
    let a1 = rs(Family::A, 1);
    let mut worst = 0.0f64;
    for k in 1..=50i64 {
        let pi = invariant_measure(&a1, k).map_err(e)?;
        for (i, v) in pi.values.iter().enumerate() {
            let oracle = 2.0 / (2 + k) as f64 * (PI * (i + 1) as f64 / (k + 2) as f64).sin().powi(2);
            worst = worst.max((v - oracle).abs());
        }
        let index = lattice_index(&a1, k).map_err(e)?;
        ensure(index == 2 * (k as u128 + 2), || format!("k={k}: index {index}"))?;
    }
    ensure(worst < MEASURE_TOL, || format!("measure error {worst:.3e}"))?;
    Ok(format!("max err {worst:.1e}; index = 2(k+2) for k <= 50"))
}

fn su2_fusion() -> Outcome {
    let a1 = rs(Family::A, 1);
    let mut checked = 0;
    for k in 1..=8i64 {
        let engine = FusionEngine::new(&a1, k).map_err(e)?;
        for i in 0..=k {
            for j in 0..=k {
                let c = engine.coeffs(&w(&[i]), &w(&[j])).map_err(e)?;
                for s in 0..=k {
                    let rule = (i - j).abs() <= s && s <= (i + j).min(2 * k - i - j) && (i + j + s) % 2 == 0;
                    let got = c.get(&w(&[s])).copied().unwrap_or(0);
                    ensure(got == rule as u64, || format!("k={k} N_{{{i},{j}}}^{s} = {got}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} coefficients"))
}

/// (family, rank, minuscule weights) of the walk sweep.
fn minuscule_sweep() -> Vec<(Family, usize, Vec<Weight>)> {
    vec![
        (Family::A, 2, vec![w(&[1, 0]), w(&[0, 1])]),
        (Family::A, 3, vec![w(&[1, 0, 0]), w(&[0, 1, 0]), w(&[0, 0, 1])]),
        (Family::C, 2, vec![w(&[1, 0])]),
        (Family::C, 3, vec![w(&[1, 0, 0])]),
        (Family::D, 4, vec![w(&[1, 0, 0, 0]), w(&[0, 0, 1, 0]), w(&[0, 0, 0, 1])]),
    ]
}

fn walks_vs_fusion() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for (f, r, gammas) in minuscule_sweep() {
        let root = rs(f, r);
        for gamma in &gammas {
            let steps = StepSet::from_gamma(&root, gamma).map_err(e)?;
            for k in 1..=3 {
                let engine = FusionEngine::new(&root, k).map_err(e)?;
                let table = engine.table(gamma, 8).map_err(e)?;
                for lambda in engine.alcove().weights() {
                    for n in 0..=8u32 {
                        let walks = count_walks_from(&root, lambda, &steps, n, k).map_err(e)?;
                        for beta in engine.alcove().weights() {
                            let a = walks.get(beta).cloned().unwrap_or_default();
                            let b = table.get(lambda, n, beta);
                            ensure(a == b, || format!("{f}{r} γ={gamma} k={k} {lambda}->{beta} n={n}: {a} vs {b}"))?;
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < WALK_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("{checked} entries equal, {elapsed:.2?}"))
}

fn littelmann_vs_fusion() -> Outcome {
    let mut checked = 0usize;
    for r in [2usize, 3] {
        let root = rs(Family::B, r);
        let gamma = Weight::fundamental(r, 0);
        for k in 1..=3 {
            let engine = FusionEngine::new(&root, k).map_err(e)?;
            let table = engine.table(&gamma, 5).map_err(e)?;
            for lambda in engine.alcove().weights() {
                for beta in engine.alcove().weights() {
                    for n in 0..=5u32 {
                        let a = count_littelmann_paths(&root, lambda, beta, &gamma, n, k).map_err(e)?;
                        let b = table.get(lambda, n, beta);
                        ensure(a == b, || format!("B{r} k={k} {lambda}->{beta} n={n}: {a} vs {b}"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} entries equal"))
}

fn fusion_identity() -> Outcome {
    let systems = [
        (Family::A, 1),
        (Family::A, 2),
        (Family::A, 3),
        (Family::B, 2),
        (Family::B, 3),
        (Family::C, 2),
        (Family::C, 3),
        (Family::D, 3),
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for (f, r) in systems {
        let root = rs(f, r);
        for k in 1..=4 {
            let engine = FusionEngine::new(&root, k).map_err(e)?;
            for gamma in engine.alcove().weights() {
                worst = worst.max(engine.verify_identity(gamma).map_err(e)?);
                count += 1;
            }
        }
    }
    ensure(worst < FUSION_IDENTITY_TOL, || format!("residual {worst:.3e}"))?;
    Ok(format!("{count} (system, k, γ) cases, max residual {worst:.1e}"))
}

fn duality_and_chain() -> Outcome {
    let mut checked = 0usize;
    for (f, r, gammas) in minuscule_sweep() {
        let root = rs(f, r);
        for gamma in &gammas {
            let dual = dual_weight(&root, gamma).map_err(e)?;
            let k_gamma = weight_multiplicities(&root, gamma).map_err(e)?;
            for k in 1..=3 {
                let engine = FusionEngine::new(&root, k).map_err(e)?;
                let mut dual_rows = BTreeMap::new();
                for beta in engine.alcove().weights() {
                    dual_rows.insert(beta.clone(), engine.coeffs(beta, &dual).map_err(e)?);
                }
                for lambda in engine.alcove().weights() {
                    let n = engine.coeffs(lambda, gamma).map_err(e)?;
                    let m = tensor_decompose(&root, lambda, gamma).map_err(e)?;
                    for beta in engine.alcove().weights() {
                        let nv = n.get(beta).copied().unwrap_or(0);
                        let dv = dual_rows[beta].get(lambda).copied().unwrap_or(0);
                        let mv = m.get(beta);
                        let kv = k_gamma.get(&(beta - lambda));
                        ensure(nv == dv, || format!("{f}{r} γ={gamma} k={k}: N={nv} but dual {dv}"))?;
                        ensure(nv <= mv && mv <= kv, || {
                            format!("{f}{r} γ={gamma} k={k} {lambda}->{beta}: N={nv} M={mv} K={kv}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} triples"))
}

fn long_time_asymptotics() -> Outcome {
    let cases = [(rs(Family::A, 1), w(&[1]), 4), (rs(Family::A, 2), w(&[1, 0]), 2)];
    let mut worst = 0.0f64;
    let mut zeros = 0;
    for (root, gamma, k) in &cases {
        let kernel = build_kernel(root, gamma, *k).map_err(e)?;
        let d = kernel.period_info().period as u32;
        for lambda in kernel.alcove().weights() {
            for beta in kernel.alcove().weights() {
                let r = kernel.residue(lambda, beta).map_err(e)? as u32;
                let n = 200 * d + r;
                match kernel.asymptotic_estimate(lambda, beta, n).map_err(e)? {
                    AsymptoticEstimate::Value { ratio, .. } => worst = worst.max((ratio - 1.0).abs()),
                    other => return Err(format!("n={n} in the right class gave {other:?}")),
                }
                for wrong in 1..d {
                    let n = 200 * d + (r + wrong) % d;
                    match kernel.asymptotic_estimate(lambda, beta, n).map_err(e)? {
                        AsymptoticEstimate::WrongResidue { .. } => {}
                        other => return Err(format!("n={n} in a wrong class gave {other:?}")),
                    }
                    ensure(kernel.exact_count(lambda, beta, n).map_err(e)?.is_zero(), || {
                        format!("nonzero count in a wrong class at n={n}")
                    })?;
                    zeros += 1;
                }
            }
        }
    }
    ensure(worst < ASYMPTOTIC_RATIO_TOL, || format!("max |ratio − 1| = {worst:.4}"))?;
    Ok(format!("max |ratio − 1| = {worst:.2e}; {zeros} wrong-class counts are exactly 0"))
}

fn closed_form_constants() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    let mut garbled_reports: BTreeMap<StepModel, usize> = BTreeMap::new();
    for case in StepModel::ALL {
        let ranks: Vec<usize> = match case.family() {
            Family::A => vec![1, 2, 3, 4],
            Family::D => vec![3, 4],
            _ => vec![2, 3, 4],
        };
        for r in ranks {
            let root = rs(case.family(), r);
            for k in 1..=3 {
                let alcove = enumerate_alcove(&root, k).map_err(e)?;
                for x in alcove.weights() {
                    for y in alcove.weights() {
                        let rep = step_model_report(&root, case, k, x, y).map_err(e)?;
                        worst = worst.max(rep.machinery_deviation);
                        if !rep.mismatches.is_empty() {
                            *garbled_reports.entry(case).or_default() += 1;
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    ensure(worst < CLOSED_FORM_TOL, || format!("closed forms deviate from the kernel machinery by {worst:.3e}"))?;
    for case in [StepModel::CStandard, StepModel::DStandard] {
        ensure(garbled_reports.get(&case).copied().unwrap_or(0) > 0, || {
            format!("no mismatch report produced for {case}")
        })?;
    }
    let report: Vec<String> = garbled_reports.iter().map(|(c, n)| format!("{c}:{n}")).collect();
    Ok(format!(
        "{cases} instances, max deviation {worst:.1e}; printed-form mismatches {}",
        report.join(" ")
    ))
}

fn character_moments() -> Outcome {
    let mut worst = 0.0f64;
    let a1 = rs(Family::A, 1);
    for k in 1..=100 {
        let kernel = build_kernel(&a1, &w(&[1]), k).map_err(e)?;
        let sigmas = kernel.alcove().weights().to_vec();
        let res = character_moment_residuals(&kernel, &sigmas, 50).map_err(e)?;
        worst = worst.max(res.into_iter().fold(0.0, f64::max));
    }
    let c2 = rs(Family::C, 2);
    for k in 1..=5 {
        let kernel = build_kernel(&c2, &w(&[1, 0]), k).map_err(e)?;
        let sigmas = kernel.alcove().weights().to_vec();
        let res = character_moment_residuals(&kernel, &sigmas, 50).map_err(e)?;
        worst = worst.max(res.into_iter().fold(0.0, f64::max));
    }
    ensure(worst < MOMENT_TOL, || format!("residual {worst:.3e}"))?;
    Ok(format!("max residual {worst:.1e} (A1 k<=100, C2 k<=5, m<=50, all σ)"))
}

fn su2_density() -> Outcome {
    let k = 100;
    let cmp = su2_density_comparison(k / 2, k / 2, k, TV_BINS).map_err(e)?;
    ensure(cmp.total_variation < TV_TOL, || format!("TV = {:.4}", cmp.total_variation))?;
    // every atom lies in the limiting support up to (h^∨+1)/(k+h^∨)
    let a1 = rs(Family::A, 1);
    let tol = 3.0 / (k + 2) as f64;
    for (xi, gamma) in [(50, 50), (10, 30), (80, 70)] {
        let cmp = su2_density_comparison(xi, gamma, k, TV_BINS).map_err(e)?;
        let mu = alcove::scaling::convolution_measure(&a1, &w(&[xi]), &w(&[gamma]), k).map_err(e)?;
        for (_, p, _) in &mu.atoms {
            let z = alcove::rational::to_f64(&p[0]);
            ensure(z >= cmp.support.0 - tol && z <= cmp.support.1 + tol, || {
                format!("atom {z} outside [{}, {}]", cmp.support.0, cmp.support.1)
            })?;
        }
    }
    Ok(format!("TV = {:.4} with {TV_BINS} bins at k = {k}", cmp.total_variation))
}

fn brownian_fit() -> Outcome {
    let start = Instant::now();
    let a1 = rs(Family::A, 1);
    let sigmas = [w(&[1]), w(&[2]), w(&[3])];
    let fit = brownian_exponent_fit(&a1, &w(&[1]), 10_000, 1.0, &sigmas).map_err(e)?;
    let fit4 = brownian_exponent_fit(&a1, &w(&[1]), 40_000, 1.0, &sigmas).map_err(e)?;
    let elapsed = start.elapsed();
    let drift = (fit4.c - fit.c).abs() / fit.c;
    ensure(fit.residual < LINEARITY_TOL, || format!("linearity deviation {:.4}", fit.residual))?;
    ensure(drift < C_STABILITY_TOL, || format!("c moved by {drift:.4}"))?;
    ensure(elapsed < FIT_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "c = {:.5} (n=1e4), {:.5} (n=4e4), drift {:.2}%, linearity dev {:.2e}, {elapsed:.2?}",
        fit.c,
        fit4.c,
        100.0 * drift,
        fit.residual
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("SU(2) Dirichlet spectrum", su2_dirichlet),
        ("SU(2) invariant measure and lattice index", su2_measure),
        ("SU(2) fusion closed form", su2_fusion),
        ("walk counts equal fusion powers (minuscule)", walks_vs_fusion),
        ("Littelmann path counts equal fusion powers (B standard)", littelmann_vs_fusion),
        ("character identity residual", fusion_identity),
        ("duality and N <= M <= K", duality_and_chain),
        ("long-time asymptotics", long_time_asymptotics),
        ("closed-form constants", closed_form_constants),
        ("character moment identity", character_moments),
        ("SU(2) convolution density", su2_density),
        ("Brownian exponent linearity", brownian_fit),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
