//! Convolution measures on the rescaled alcove and scaling-limit diagnostics
//! for walks at level ⌊√n⌋.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alcove_markov::{build_kernel, AlcoveKernel};
use crate::charlib::DiscretizedCharacterEvaluator;
use crate::error::{invalid, Error, Result};
use crate::rational::{to_f64, Rational};
use crate::rootsys::{Family, RootSystem};
use crate::fusion::FusionEngine;
use crate::weight::Weight;

/// μ_k = Σ_β q_γ(ξ, β) δ_{(β+ρ)/(k+h^∨)}, points in fundamental-weight coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionMeasure {
    pub level: i64,
    pub xi: Weight,
    pub gamma: Weight,
    /// (β, rescaled point, mass), zero masses omitted, in alcove order.
    pub atoms: Vec<(Weight, Vec<Rational>, f64)>,
}

pub fn convolution_measure(rs: &RootSystem, xi: &Weight, gamma: &Weight, level: i64) -> Result<ConvolutionMeasure> {
    let kernel = build_kernel(rs, gamma, level)?;
    convolution_measure_with(&kernel, xi)
}

pub fn convolution_measure_with(kernel: &AlcoveKernel<'_>, xi: &Weight) -> Result<ConvolutionMeasure> {
    let rs = kernel.root_system();
    let i = kernel
        .alcove()
        .position(xi)
        .ok_or_else(|| Error::InvalidInput(format!("ξ = {xi} is outside the level-{} alcove", kernel.level())))?;
    let shifted = kernel.level() + rs.dual_coxeter();
    let atoms = kernel.sparse_rows()[i]
        .iter()
        .map(|&(j, q)| {
            let beta = kernel.alcove().weights()[j].clone();
            let point = (&beta + rs.rho())
                .coords()
                .iter()
                .map(|&c| Rational::new(c, shifted))
                .collect();
            (beta, point, q)
        })
        .collect();
    Ok(ConvolutionMeasure {
        level: kernel.level(),
        xi: xi.clone(),
        gamma: kernel.gammas()[0].clone(),
        atoms,
    })
}

impl ConvolutionMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.2).sum()
    }

    /// Whether every atom lies in the closed rescaled alcove {x ≥ 0, ⟨x, θ^∨⟩ ≤ 1}.
    pub fn atoms_in_alcove(&self, rs: &RootSystem) -> bool {
        self.atoms.iter().all(|(_, p, _)| {
            let t: Rational = p.iter().zip(rs.theta_coroot()).map(|(x, &m)| x * m).sum();
            p.iter().all(|x| *x >= Rational::from_integer(0)) && t <= Rational::from_integer(1)
        })
    }

    /// Mean vector and matrix of second moments of the atom positions.
    pub fn moments(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let r = self.xi.rank();
        let mut mean = vec![0.0; r];
        let mut second = vec![vec![0.0; r]; r];
        for (_, p, m) in &self.atoms {
            let p: Vec<f64> = p.iter().map(to_f64).collect();
            for a in 0..r {
                mean[a] += m * p[a];
                for b in 0..r {
                    second[a][b] += m * p[a] * p[b];
                }
            }
        }
        (mean, second)
    }
}

/// max over λ ∈ P₊^k of |χ_λ(ξ)χ_λ(γ) − χ_λ(0) Σ_β μ_k(β) χ_λ(β)|, the finite-k
/// moment identity behind the convolution correspondence.
pub fn moment_identity_residual(rs: &RootSystem, measure: &ConvolutionMeasure) -> Result<f64> {
    let ev = DiscretizedCharacterEvaluator::new(rs, measure.level)?;
    let alcove = crate::alcove_markov::enumerate_alcove(rs, measure.level)?;
    let per_lambda: Vec<Result<f64>> = alcove
        .weights()
        .par_iter()
        .map(|lambda| {
            let lhs = ev.chi(lambda, &measure.xi)? * ev.chi(lambda, &measure.gamma)?;
            let mut rhs = Complex64::new(0.0, 0.0);
            for (beta, _, m) in &measure.atoms {
                rhs += ev.chi(lambda, beta)? * *m;
            }
            rhs *= ev.asymptotic_dim(lambda)?;
            Ok((lhs - rhs).norm())
        })
        .collect();
    per_lambda.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

/// One bin of a histogram-versus-density comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    pub lo: f64,
    pub hi: f64,
    pub empirical: f64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityComparison {
    /// Support [u, v] of the limiting density.
    pub support: (f64, f64),
    pub bins: Vec<DensityBin>,
    /// Atom mass falling outside [u, v].
    pub outside_mass: f64,
    pub total_variation: f64,
}

impl DensityComparison {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lo,hi,empirical,density")?;
        for b in &self.bins {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", b.lo, b.hi, b.empirical, b.density)?;
        }
        Ok(())
    }
}

/// SU(2): compares μ_k with the density ½π sin(πz)/(sin(πx) sin(πy)) on [u, v],
/// x = (ξ+1)/(k+2), y = (γ+1)/(k+2). Atoms of μ_k are spaced 2/(k+2) apart
/// and each is spread uniformly over its cell of that width before binning.
pub fn su2_density_comparison(xi: i64, gamma: i64, level: i64, bins: usize) -> Result<DensityComparison> {
    if bins == 0 {
        return invalid("at least one bin is needed");
    }
    let a1 = RootSystem::new(Family::A, 1)?;
    let mu = convolution_measure(&a1, &Weight::new(vec![xi]), &Weight::new(vec![gamma]), level)?;
    let l = (level + 2) as f64;
    let (x, y) = ((xi + 1) as f64 / l, (gamma + 1) as f64 / l);
    let s = (x + y).min(2.0 - x - y);
    let (u, v) = ((x - y).abs().min(s), (x - y).abs().max(s));
    let pi = std::f64::consts::PI;
    let norm = (pi * x).sin() * (pi * y).sin();
    // ∫_a^b ½π sin(πz) dz / norm
    let mass = |a: f64, b: f64| 0.5 * ((pi * a).cos() - (pi * b).cos()) / norm;
    let width = (v - u) / bins as f64;
    let mut out: Vec<DensityBin> = (0..bins)
        .map(|b| {
            let lo = u + b as f64 * width;
            let hi = if b + 1 == bins { v } else { lo + width };
            DensityBin {
                lo,
                hi,
                empirical: 0.0,
                density: mass(lo, hi),
            }
        })
        .collect();
    let half = 1.0 / l;
    let mut outside = 0.0;
    for (_, p, m) in &mu.atoms {
        let z = to_f64(&p[0]);
        let (a, b) = (z - half, z + half);
        let mut placed = 0.0;
        for bin in out.iter_mut() {
            let overlap = (b.min(bin.hi) - a.max(bin.lo)).max(0.0);
            bin.empirical += m * overlap / (b - a);
            placed += overlap / (b - a);
        }
        outside += m * (1.0 - placed);
    }
    let tv = 0.5 * (out.iter().map(|b| (b.empirical - b.density).abs()).sum::<f64>() + outside);
    Ok(DensityComparison {
        support: (u, v),
        bins: out,
        outside_mass: outside,
        total_variation: tv,
    })
}

/// A sampled walk Λ_0 = 0, Λ_1, … at level ⌊√n⌋.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub n: u64,
    pub level: i64,
    pub gamma: Weight,
    pub seed: u64,
    pub samples: Vec<Weight>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleLine {
    m: u64,
    weight: Weight,
}

impl Trajectory {
    /// One JSON object per line: {"m": step, "weight": [..]}.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        for (m, w) in self.samples.iter().enumerate() {
            s.push_str(&serde_json::to_string(&SampleLine {
                m: m as u64,
                weight: w.clone(),
            })?);
            s.push('\n');
        }
        Ok(s)
    }
}

/// Parses trajectory samples; steps must run 0, 1, 2, … with equal ranks.
pub fn parse_trajectory_jsonl(s: &str) -> Result<Vec<Weight>> {
    let mut out: Vec<Weight> = vec![];
    for line in s.lines().filter(|l| !l.trim().is_empty()) {
        let rec: SampleLine = serde_json::from_str(line)?;
        if rec.m != out.len() as u64 {
            return Err(Error::Parse(format!("expected step {}, found {}", out.len(), rec.m)));
        }
        if rec.weight.rank() == 0 || out.first().is_some_and(|w| w.rank() != rec.weight.rank()) {
            return Err(Error::Parse(format!("step {} has the wrong rank", rec.m)));
        }
        out.push(rec.weight);
    }
    Ok(out)
}

/// ⌊√n⌋
pub fn scaling_level(n: u64) -> i64 {
    n.isqrt() as i64
}

struct Sampler {
    dists: Vec<Option<WeightedIndex<f64>>>,
    targets: Vec<Vec<usize>>,
}

impl Sampler {
    fn new(kernel: &AlcoveKernel<'_>) -> Self {
        let rows = kernel.sparse_rows();
        Sampler {
            dists: rows
                .iter()
                .map(|r| WeightedIndex::new(r.iter().map(|&(_, q)| q)).ok())
                .collect(),
            targets: rows.iter().map(|r| r.iter().map(|&(j, _)| j).collect()).collect(),
        }
    }

    fn step(&self, state: usize, rng: &mut ChaCha8Rng) -> usize {
        let d = self.dists[state].as_ref().expect("kernel rows are stochastic");
        self.targets[state][d.sample(rng)]
    }
}

/// Rows of the kernel computed on first visit, so long trajectories at high
/// level never touch the full alcove.
struct LazyRows<'a> {
    engine: FusionEngine<'a>,
    ev: DiscretizedCharacterEvaluator<'a>,
    gamma: Weight,
    gamma_asym: f64,
    rows: HashMap<Weight, (Vec<Weight>, WeightedIndex<f64>)>,
}

impl<'a> LazyRows<'a> {
    fn new(rs: &'a RootSystem, gamma: &Weight, level: i64) -> Result<Self> {
        if level == 0 && !gamma.is_zero() {
            return invalid("at level 0 only γ = 0 is allowed");
        }
        let engine = FusionEngine::new(rs, level)?;
        engine.check_in_alcove(gamma, "γ")?;
        let ev = DiscretizedCharacterEvaluator::new(rs, level)?;
        let gamma_asym = ev.asymptotic_dim(gamma)?;
        Ok(LazyRows {
            engine,
            ev,
            gamma: gamma.clone(),
            gamma_asym,
            rows: HashMap::new(),
        })
    }

    fn step(&mut self, state: &Weight, rng: &mut ChaCha8Rng) -> Result<Weight> {
        if !self.rows.contains_key(state) {
            let from = self.ev.asymptotic_dim(state)?;
            let mut targets = vec![];
            let mut probs = vec![];
            for (beta, c) in self.engine.coeffs(state, &self.gamma)? {
                probs.push(c as f64 * self.ev.asymptotic_dim(&beta)? / (from * self.gamma_asym));
                targets.push(beta);
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::Consistency(format!("row {state} of the kernel sums to {total}")));
            }
            let dist = WeightedIndex::new(&probs).map_err(|e| Error::Consistency(format!("row {state}: {e}")))?;
            self.rows.insert(state.clone(), (targets, dist));
        }
        let (targets, dist) = &self.rows[state];
        Ok(targets[dist.sample(rng)].clone())
    }
}

/// Samples ⌊n·t_max⌋ steps of the level-⌊√n⌋ kernel from 0.
pub fn simulate_trajectory(rs: &RootSystem, gamma: &Weight, n: u64, t_max: f64, seed: u64) -> Result<Trajectory> {
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return invalid(format!("horizon {t_max} must be finite and nonnegative"));
    }
    let level = scaling_level(n);
    let mut rows = LazyRows::new(rs, gamma, level)?;
    let steps = (n as f64 * t_max).floor() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![rs.zero()];
    for _ in 0..steps {
        let next = rows.step(samples.last().expect("nonempty"), &mut rng)?;
        samples.push(next);
    }
    Ok(Trajectory {
        n,
        level,
        gamma: gamma.clone(),
        seed,
        samples,
    })
}

/// Final alcove positions of independent replicas after `steps` steps from 0.
/// Replica r draws from stream r of the seeded generator, so the result does
/// not depend on the number of worker threads.
pub fn simulate_endpoints(kernel: &AlcoveKernel<'_>, steps: u64, replicas: usize, seed: u64) -> Vec<usize> {
    let sampler = Sampler::new(kernel);
    let start = kernel
        .alcove()
        .position(&kernel.root_system().zero())
        .expect("0 is in every alcove");
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut s = start;
            for _ in 0..steps {
                s = sampler.step(s, &mut rng);
            }
            s
        })
        .collect()
}

/// |E[χ_Λ(σ)/χ_Λ(0)] − (χ_γ(σ)/χ_γ(0))^m| for Λ after m steps from 0, the
/// expectation taken exactly from kernel powers.
pub fn character_moment_check(rs: &RootSystem, gamma: &Weight, level: i64, sigma: &Weight, m: u64) -> Result<f64> {
    let kernel = build_kernel(rs, gamma, level)?;
    let res = character_moment_residuals(&kernel, std::slice::from_ref(sigma), m)?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// Residuals for every m' ≤ m, maximized over the given σ; entry m' of the result.
pub fn character_moment_residuals(kernel: &AlcoveKernel<'_>, sigmas: &[Weight], m: u64) -> Result<Vec<f64>> {
    let rs = kernel.root_system();
    let ev = DiscretizedCharacterEvaluator::new(rs, kernel.level())?;
    let w = kernel.alcove().weights();
    let gamma = &kernel.gammas()[0];
    let g0 = ev.asymptotic_dim(gamma)?;
    let mut f: Vec<(Vec<Complex64>, Complex64)> = vec![];
    for sigma in sigmas {
        if kernel.alcove().position(sigma).is_none() {
            return invalid(format!("σ = {sigma} is outside the level-{} alcove", kernel.level()));
        }
        let vals = w
            .iter()
            .zip(kernel.asymptotic_dims())
            .map(|(l, a)| Ok(ev.chi(l, sigma)? / *a))
            .collect::<Result<Vec<_>>>()?;
        f.push((vals, ev.chi(gamma, sigma)? / g0));
    }
    let mut dist = kernel.distribution_after(&rs.zero(), 0)?;
    let mut out = Vec::with_capacity(m as usize + 1);
    for step in 0..=m {
        if step > 0 {
            dist = kernel.step_distribution(&dist);
        }
        let mut worst: f64 = 0.0;
        for (vals, ratio) in &f {
            let lhs: Complex64 = dist.iter().zip(vals).map(|(p, v)| v * *p).sum();
            worst = worst.max((lhs - ratio.powu(step as u32)).norm());
        }
        out.push(worst);
    }
    Ok(out)
}

/// Least-squares fit of −log E[ψ_σ] against (‖σ+ρ‖² − ‖ρ‖²)·t through the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianFit {
    pub c: f64,
    /// max_j |y_j − c x_j| / |y_j|
    pub residual: f64,
    pub n: u64,
    pub level: i64,
    pub sigmas: Vec<Weight>,
    pub points: Vec<(f64, f64)>,
}

impl BrownianFit {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// F_j = E[ψ_{σ_j}] at time t for the walk at level ⌊√n⌋ started at 0, where
/// ψ_σ(Λ) = χ_σ(Λ)/dim σ = (χ_σ(0)/dim σ)·χ_Λ(σ)/χ_Λ(0), computed by exact
/// kernel powers over ⌊n t⌋ steps.
pub fn brownian_exponent_fit(rs: &RootSystem, gamma: &Weight, n: u64, t: f64, sigmas: &[Weight]) -> Result<BrownianFit> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("time {t} must be positive"));
    }
    if gamma.is_zero() {
        return invalid("γ = 0 gives a constant walk; the fit is rank-deficient");
    }
    if sigmas.is_empty() {
        return invalid("no test weights");
    }
    let level = scaling_level(n);
    let kernel = build_kernel(rs, gamma, level)?;
    let ev = DiscretizedCharacterEvaluator::new(rs, level)?;
    let steps = (n as f64 * t).floor() as u64;
    let dist = kernel.distribution_after(&rs.zero(), steps)?;
    let rho = rs.rho();
    let rho2 = rs.inner_product(rho, rho);
    let mut points = vec![];
    for sigma in sigmas {
        if kernel.alcove().position(sigma).is_none() {
            return invalid(format!("σ = {sigma} is outside the level-{level} alcove (n too small)"));
        }
        // the kernel-power moment is checked against the product form, whose
        // logarithm stays accurate after the moment itself underflows
        let mut e = Complex64::new(0.0, 0.0);
        for ((l, a), p) in kernel.alcove().weights().iter().zip(kernel.asymptotic_dims()).zip(&dist) {
            if *p != 0.0 {
                e += ev.chi(l, sigma)? / *a * *p;
            }
        }
        let ratio = ev.chi(gamma, sigma)? / ev.asymptotic_dim(gamma)?;
        if ratio.re <= 0.0 || ratio.im.abs() > 1e-12 * ratio.re {
            return Err(Error::Consistency(format!("χ_γ(σ)/χ_γ(0) = {ratio} is not a positive real for σ = {sigma}")));
        }
        let drift = (e - ratio.powf(steps as f64)).norm();
        if drift > 1e-9 {
            return Err(Error::Consistency(format!("kernel moment for σ = {sigma} is off by {drift:e}")));
        }
        let correction = ev.asymptotic_dim(sigma)? / rs.dim(sigma)? as f64;
        let log_f = steps as f64 * ratio.re.ln() + correction.ln();
        let sr = sigma + rho;
        let x = to_f64(&(rs.inner_product(&sr, &sr) - rho2)) * t;
        points.push((x, -log_f));
    }
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    if sxx == 0.0 {
        return invalid("all test weights are zero; the fit is rank-deficient");
    }
    let c = points.iter().map(|p| p.0 * p.1).sum::<f64>() / sxx;
    let residual = points
        .iter()
        .map(|&(x, y)| (y - c * x).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(BrownianFit {
        c,
        residual,
        n,
        level,
        sigmas: sigmas.to_vec(),
        points,
    })
}
