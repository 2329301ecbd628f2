//! The level-k alcove, the fusion Markov kernel q_γ on it, its invariant
//! measure, spectrum, Dirichlet problem, period and long-time asymptotics.

use std::collections::HashMap;
use std::io::Write;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::charlib::{self, DiscretizedCharacterEvaluator};
use crate::error::{invalid, Error, Result};
use crate::fusion::{power_rows, FusionEngine};
use crate::rootsys::RootSystem;
use crate::snf;
use crate::weight::Weight;

/// The alcove P₊^k in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlcoveIndex {
    level: i64,
    weights: Vec<Weight>,
    position: HashMap<Weight, usize>,
}

impl AlcoveIndex {
    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn position(&self, w: &Weight) -> Option<usize> {
        self.position.get(w).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Largest alcove that will be enumerated.
pub const MAX_ALCOVE_STATES: u128 = 1_000_000;
/// Largest alcove on which a dense kernel is built.
pub const MAX_KERNEL_STATES: u128 = 2048;

/// |P₊^k|, counted without enumerating (saturating).
pub fn alcove_size(rs: &RootSystem, level: i64) -> Result<u128> {
    if level < 0 {
        return invalid(format!("level {level} is negative"));
    }
    // ways[b] = number of points using budget exactly b
    let mut ways = vec![0u128; level as usize + 1];
    ways[0] = 1;
    for &m in rs.theta_coroot() {
        let m = m as usize;
        for b in m..ways.len() {
            ways[b] = ways[b].saturating_add(ways[b - m]);
        }
    }
    Ok(ways.iter().fold(0u128, |a, &b| a.saturating_add(b)))
}

pub fn enumerate_alcove(rs: &RootSystem, level: i64) -> Result<AlcoveIndex> {
    let size = alcove_size(rs, level)?;
    if size > MAX_ALCOVE_STATES {
        return Err(Error::BoundExceeded {
            what: "alcove size",
            value: size,
            bound: MAX_ALCOVE_STATES,
        });
    }
    let marks = rs.theta_coroot();
    let mut weights = vec![];
    let mut cur = vec![0i64; rs.rank()];
    fn rec(i: usize, budget: i64, marks: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if i == marks.len() {
            out.push(Weight::new(cur.clone()));
            return;
        }
        for c in 0..=budget / marks[i] {
            cur[i] = c;
            rec(i + 1, budget - c * marks[i], marks, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, level, marks, &mut cur, &mut weights);
    let position = weights.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(AlcoveIndex {
        level,
        weights,
        position,
    })
}

/// |P/(k+h^∨)M| where M = ν(Q^∨) is spanned by α_i/d_i, d_i = |α_i|²/2.
pub fn lattice_index(rs: &RootSystem, level: i64) -> Result<u128> {
    if level < 0 {
        return invalid(format!("level {level} is negative"));
    }
    let shifted = level + rs.dual_coxeter();
    let basis: Vec<Vec<i64>> = rs
        .simple_roots()
        .iter()
        .zip(rs.half_norms())
        .map(|(alpha, d)| {
            let inv = d.recip();
            assert!(inv.is_integer(), "half norms are 1 or 1/2");
            alpha.coords().iter().map(|c| c * inv.to_integer() * shifted).collect()
        })
        .collect();
    snf::lattice_index(&basis)?
        .ok_or_else(|| Error::Consistency("coroot lattice embedding is degenerate".into()))
}

/// The Weyl-group-invariant probability π(λ) ∝ Π_{α>0} 4 sin²(π(λ+ρ|α)/(k+h^∨)).
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMeasure {
    pub weights: Vec<Weight>,
    pub values: Vec<f64>,
    pub lattice_index: u128,
}

impl InvariantMeasure {
    pub fn get(&self, w: &Weight) -> Option<f64> {
        self.weights.iter().position(|x| x == w).map(|i| self.values[i])
    }
}

pub fn invariant_measure(rs: &RootSystem, level: i64) -> Result<InvariantMeasure> {
    let alcove = enumerate_alcove(rs, level)?;
    let index = lattice_index(rs, level)?;
    let shifted = level + rs.dual_coxeter();
    let scale = 4f64.powi(rs.positive_roots().len() as i32) / index as f64;
    let values: Vec<f64> = alcove
        .weights()
        .iter()
        .map(|l| {
            let s = charlib::sine_product(rs, l, shifted);
            scale * s * s
        })
        .collect();
    Ok(InvariantMeasure {
        weights: alcove.weights().to_vec(),
        values,
        lattice_index: index,
    })
}

/// One eigenpair of q_γ, indexed by σ ∈ P₊^k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub sigma: Weight,
    #[serde(with = "complex_json")]
    pub eigenvalue: Complex64,
    #[serde(with = "complex_vec_json")]
    pub eigenvector: Vec<Complex64>,
}

/// Complex numbers are written as bare reals when the imaginary part is
/// exactly zero and as [re, im] otherwise.
mod complex_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(super) enum Raw {
        Real(f64),
        Pair([f64; 2]),
    }

    pub(super) fn to_raw(z: &Complex64) -> Raw {
        if z.im == 0.0 {
            Raw::Real(z.re)
        } else {
            Raw::Pair([z.re, z.im])
        }
    }

    pub(super) fn from_raw(r: Raw) -> Complex64 {
        match r {
            Raw::Real(x) => Complex64::new(x, 0.0),
            Raw::Pair([a, b]) => Complex64::new(a, b),
        }
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_raw(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        Raw::deserialize(d).map(from_raw)
    }
}

mod complex_vec_json {
    use super::complex_json::{from_raw, to_raw, Raw};
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(to_raw))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<Raw>::deserialize(d)?.into_iter().map(from_raw).collect())
    }
}

pub fn spectrum_to_json(spectrum: &[SpectralPair]) -> Result<String> {
    Ok(serde_json::to_string(spectrum)?)
}

pub fn spectrum_from_json(s: &str) -> Result<Vec<SpectralPair>> {
    Ok(serde_json::from_str(s)?)
}

/// Period and communication classes of a kernel's support graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodInfo {
    /// gcd of the class periods; the period of the chain when irreducible.
    pub period: u64,
    pub irreducible: bool,
    /// Strongly connected components, each sorted, ordered by first state.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub class_period: Vec<u64>,
    /// Cyclic subclass of each state: BFS depth within its class mod the class period.
    pub cyclic_class: Vec<u64>,
}

/// The fusion kernel q(λ, β) = N_{λ,γ}^β χ_β(0) / (χ_λ(0) χ_γ(0)).
///
/// A kernel may also mix several γ_m with weights proportional to χ_{γ_m}(0),
/// i.e. q = Σ_m N_{γ_m} χ_β(0) / (χ_λ(0) Σ_m χ_{γ_m}(0)).
#[derive(Debug)]
pub struct AlcoveKernel<'a> {
    rs: &'a RootSystem,
    alcove: AlcoveIndex,
    gammas: Vec<Weight>,
    fusion: Vec<Vec<u64>>,
    matrix: Vec<Vec<f64>>,
    rows: Vec<Vec<(usize, f64)>>,
    asym: Vec<f64>,
    gamma_asym: f64,
    period: PeriodInfo,
    spectrum: OnceLock<Vec<SpectralPair>>,
}

pub fn build_kernel<'a>(rs: &'a RootSystem, gamma: &Weight, level: i64) -> Result<AlcoveKernel<'a>> {
    build_composite_kernel(rs, std::slice::from_ref(gamma), level)
}

pub fn build_composite_kernel<'a>(rs: &'a RootSystem, gammas: &[Weight], level: i64) -> Result<AlcoveKernel<'a>> {
    if gammas.is_empty() {
        return invalid("a kernel needs at least one step weight");
    }
    if level == 0 && gammas.iter().any(|g| !g.is_zero()) {
        return invalid("at level 0 only γ = 0 is allowed");
    }
    let size = alcove_size(rs, level)?;
    if size > MAX_KERNEL_STATES {
        return Err(Error::BoundExceeded {
            what: "kernel state count",
            value: size,
            bound: MAX_KERNEL_STATES,
        });
    }
    let engine = FusionEngine::new(rs, level)?;
    let alcove = engine.alcove().clone();
    let n = alcove.len();
    let ev = DiscretizedCharacterEvaluator::new(rs, level)?;
    let mut fusion = vec![vec![0u64; n]; n];
    let mut gamma_asym = 0.0;
    for g in gammas {
        engine.check_in_alcove(g, "γ")?;
        gamma_asym += ev.asymptotic_dim(g)?;
        for (row, add) in fusion.iter_mut().zip(engine.matrix(g)?) {
            for (x, y) in row.iter_mut().zip(add) {
                *x += y;
            }
        }
    }
    let asym: Vec<f64> = alcove
        .weights()
        .iter()
        .map(|w| ev.asymptotic_dim(w))
        .collect::<Result<_>>()?;
    let mut matrix = vec![vec![0.0; n]; n];
    let mut rows = vec![vec![]; n];
    for i in 0..n {
        for j in 0..n {
            if fusion[i][j] > 0 {
                let q = fusion[i][j] as f64 * asym[j] / (asym[i] * gamma_asym);
                matrix[i][j] = q;
                rows[i].push((j, q));
            }
        }
        let s: f64 = matrix[i].iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::Consistency(format!(
                "row {} of the kernel sums to {s}",
                alcove.weights()[i]
            )));
        }
    }
    let period = support_period(&rows);
    Ok(AlcoveKernel {
        rs,
        alcove,
        gammas: gammas.to_vec(),
        fusion,
        matrix,
        rows,
        asym,
        gamma_asym,
        period,
        spectrum: OnceLock::new(),
    })
}

fn support_period(rows: &[Vec<(usize, f64)>]) -> PeriodInfo {
    let n = rows.len();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in rows.iter().enumerate() {
        for &(j, _) in row {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    classes.sort();
    let irreducible = classes.len() == 1;

    let mut class_of = vec![0usize; n];
    for (c, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = c;
        }
    }
    let mut period = 0u64;
    let mut class_period = vec![0u64; classes.len()];
    let mut cyclic_class = vec![0u64; n];
    for (c, class) in classes.iter().enumerate() {
        let mut depth: HashMap<usize, i64> = HashMap::new();
        depth.insert(class[0], 0);
        let mut queue = std::collections::VecDeque::from([class[0]]);
        let mut d = 0i64;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &rows[u] {
                if class_of[v] != c {
                    continue;
                }
                match depth.get(&v) {
                    Some(&dv) => d = d.gcd(&(depth[&u] + 1 - dv)),
                    None => {
                        depth.insert(v, depth[&u] + 1);
                        queue.push_back(v);
                    }
                }
            }
        }
        let d = d as u64;
        class_period[c] = d;
        period = period.gcd(&d);
        if d > 0 {
            for (&v, &dv) in &depth {
                cyclic_class[v] = dv as u64 % d;
            }
        }
    }
    PeriodInfo {
        period,
        irreducible,
        classes,
        class_of,
        class_period,
        cyclic_class,
    }
}

/// Closed-form long-time behaviour of N_{λ,γ,n}^β for an irreducible kernel.
#[derive(Clone, Debug, PartialEq)]
pub enum AsymptoticEstimate {
    /// n lies in the wrong residue class modulo the period: N is exactly 0.
    WrongResidue { residue: u64, period: u64 },
    Value {
        estimate: f64,
        /// ln of the estimate, usable when `estimate` overflows.
        ln_estimate: f64,
        exact: BigUint,
        /// exact / estimate, computed in log space.
        ratio: f64,
    },
}

impl<'a> AlcoveKernel<'a> {
    pub fn root_system(&self) -> &RootSystem {
        self.rs
    }

    pub fn alcove(&self) -> &AlcoveIndex {
        &self.alcove
    }

    pub fn level(&self) -> i64 {
        self.alcove.level
    }

    pub fn gammas(&self) -> &[Weight] {
        &self.gammas
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// Summed fusion matrix Σ_m N_{γ_m}.
    pub fn fusion_matrix(&self) -> &[Vec<u64>] {
        &self.fusion
    }

    /// χ_λ(0) in alcove order.
    pub fn asymptotic_dims(&self) -> &[f64] {
        &self.asym
    }

    /// Σ_m χ_{γ_m}(0).
    pub fn gamma_asymptotic_dim(&self) -> f64 {
        self.gamma_asym
    }

    pub fn period_info(&self) -> &PeriodInfo {
        &self.period
    }

    pub fn get(&self, lambda: &Weight, beta: &Weight) -> Option<f64> {
        Some(self.matrix[self.alcove.position(lambda)?][self.alcove.position(beta)?])
    }

    /// One step of a distribution: v ↦ v q.
    pub fn step_distribution(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                for &(j, q) in &self.rows[i] {
                    out[j] += vi * q;
                }
            }
        }
        out
    }

    /// One step of a function: f ↦ q f.
    pub fn apply_function(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, q)| f[j] * q).sum())
            .collect()
    }

    /// Row λ of q^m.
    pub fn distribution_after(&self, lambda: &Weight, m: u64) -> Result<Vec<f64>> {
        let i = self
            .alcove
            .position(lambda)
            .ok_or_else(|| Error::InvalidInput(format!("{lambda} is outside the alcove")))?;
        let mut v = vec![0.0; self.alcove.len()];
        v[i] = 1.0;
        for _ in 0..m {
            v = self.step_distribution(&v);
        }
        Ok(v)
    }

    /// Sparse rows of q: (column, probability).
    pub fn sparse_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Eigenpairs (χ_γ(σ)/χ_γ(0), (χ_β(σ)/χ_β(0))_β) for every σ in the alcove.
    pub fn spectrum(&self) -> Result<&[SpectralPair]> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let ev = DiscretizedCharacterEvaluator::new(self.rs, self.level())?;
        let w = self.alcove.weights();
        let table = ev.table(w)?;
        let mut out = Vec::with_capacity(w.len());
        for (s, sigma) in w.iter().enumerate() {
            let mut num = Complex64::zero();
            for g in &self.gammas {
                num += ev.chi(g, sigma)?;
            }
            out.push(SpectralPair {
                sigma: sigma.clone(),
                eigenvalue: num / self.gamma_asym,
                eigenvector: (0..w.len()).map(|b| table[b][s] / self.asym[b]).collect(),
            });
        }
        Ok(self.spectrum.get_or_init(|| out))
    }

    /// max_σ ‖q v_σ − ε_σ v_σ‖∞.
    pub fn spectral_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in self.spectrum()? {
            let qv = self.apply_function(&p.eigenvector);
            for (a, b) in qv.iter().zip(&p.eigenvector) {
                worst = worst.max((a - b * p.eigenvalue).norm());
            }
        }
        Ok(worst)
    }

    /// Eigenvalues from a dense numerical eigensolver, for cross-checking.
    pub fn numerical_eigenvalues(&self) -> Vec<Complex64> {
        let n = self.alcove.len();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        m.complex_eigenvalues().iter().copied().collect()
    }

    /// max |π(λ)q(λ,β) − π(β)q(β,λ)|.
    pub fn detailed_balance_residual(&self, pi: &InvariantMeasure) -> f64 {
        let n = self.alcove.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = pi.values[i] * self.matrix[i][j] - pi.values[j] * self.matrix[j][i];
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// max |(π q)(β) − π(β)|.
    pub fn invariance_residual(&self, pi: &InvariantMeasure) -> f64 {
        self.step_distribution(&pi.values)
            .iter()
            .zip(&pi.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Exact N_{λ,γ,n}^β (with the summed fusion matrix for composite kernels).
    pub fn exact_count(&self, lambda: &Weight, beta: &Weight, n: u32) -> Result<BigUint> {
        let (i, j) = self.positions(lambda, beta)?;
        Ok(power_rows(&self.fusion, i, n).swap_remove(j))
    }

    fn positions(&self, lambda: &Weight, beta: &Weight) -> Result<(usize, usize)> {
        let f = |w: &Weight| {
            self.alcove
                .position(w)
                .ok_or_else(|| Error::InvalidInput(format!("{w} is outside the level-{} alcove", self.level())))
        };
        Ok((f(lambda)?, f(beta)?))
    }

    /// The residue class r with N_{λ,γ,n}^β = 0 unless n ≡ r mod d, d the
    /// period of λ's communication class.
    pub fn residue(&self, lambda: &Weight, beta: &Weight) -> Result<u64> {
        let (i, j) = self.positions(lambda, beta)?;
        let p = &self.period;
        if p.class_of[i] != p.class_of[j] {
            return invalid(format!("{beta} is not reachable from {lambda}"));
        }
        let d = p.class_period[p.class_of[i]];
        if d == 0 {
            return invalid(format!("{lambda} lies on no cycle"));
        }
        let c = &p.cyclic_class;
        Ok((c[j] + d - c[i]) % d)
    }

    /// N ~ d (Σχ_γ(0))^n 4^{|R₊|} s(λ)s(β) / (|P/(k+h^∨)M| π(C)) for n ≡ r mod d,
    /// where C is the communication class of λ and d its period. For an
    /// irreducible kernel π(C) = 1.
    pub fn asymptotic_estimate(&self, lambda: &Weight, beta: &Weight, n: u32) -> Result<AsymptoticEstimate> {
        let r = self.residue(lambda, beta)?;
        let p = &self.period;
        let class = p.class_of[self.alcove.position(lambda).expect("checked")];
        let d = p.class_period[class];
        if n as u64 % d != r {
            return Ok(AsymptoticEstimate::WrongResidue { residue: r, period: d });
        }
        let pi = invariant_measure(self.rs, self.level())?;
        let mass: f64 = p.classes[class].iter().map(|&v| pi.values[v]).sum();
        let shifted = self.level() + self.rs.dual_coxeter();
        let s = |w: &Weight| charlib::sine_product(self.rs, w, shifted);
        let ln_estimate = (d as f64).ln()
            + n as f64 * self.gamma_asym.ln()
            + self.rs.positive_roots().len() as f64 * 4f64.ln()
            + (s(lambda) * s(beta)).ln()
            - (pi.lattice_index as f64).ln()
            - mass.ln();
        let exact = self.exact_count(lambda, beta, n)?;
        let ratio = (ln_big(&exact) - ln_estimate).exp();
        Ok(AsymptoticEstimate::Value {
            estimate: ln_estimate.exp(),
            ln_estimate,
            exact,
            ratio,
        })
    }

    /// CSV dump: header row of alcove weights, then one row per λ.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let label = |w: &Weight| {
            w.coords()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        write!(out, "lambda")?;
        for w in self.alcove.weights() {
            write!(out, ",{}", label(w))?;
        }
        writeln!(out)?;
        for (w, row) in self.alcove.weights().iter().zip(&self.matrix) {
            write!(out, "{}", label(w))?;
            for q in row {
                write!(out, ",{q:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Natural log of a big integer (−∞ for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Dirichlet eigenpair for a minuscule step: the free walk killed on leaving
/// the alcove has (1/dim γ)·N_γ f_σ = (χ_γ(σ)/dim γ) f_σ with f_σ = χ_·(σ).
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletPair {
    pub sigma: Weight,
    /// 1 − χ_γ(σ)/dim γ.
    pub eigenvalue: Complex64,
    pub eigenfunction: Vec<Complex64>,
}

pub fn is_minuscule(rs: &RootSystem, gamma: &Weight) -> Result<bool> {
    let ws = charlib::weight_multiplicities(rs, gamma)?;
    Ok(ws.entries.len() == rs.orbit(gamma).len())
}

pub fn dirichlet_spectrum(rs: &RootSystem, gamma: &Weight, level: i64) -> Result<Vec<DirichletPair>> {
    if !is_minuscule(rs, gamma)? {
        return invalid(format!("γ = {gamma} is not minuscule"));
    }
    let alcove = enumerate_alcove(rs, level)?;
    let ev = DiscretizedCharacterEvaluator::new(rs, level)?;
    let d = rs.dim(gamma)? as f64;
    let w = alcove.weights();
    let table = ev.table(w)?;
    w.iter()
        .enumerate()
        .map(|(s, sigma)| {
            Ok(DirichletPair {
                sigma: sigma.clone(),
                eigenvalue: Complex64::new(1.0, 0.0) - ev.chi(gamma, sigma)? / d,
                eigenfunction: (0..w.len()).map(|b| table[b][s]).collect(),
            })
        })
        .collect()
}

/// max over σ of ‖(1/dim γ) N_γ f_σ − (1 − ε_σ) f_σ‖∞.
pub fn dirichlet_residual(rs: &RootSystem, gamma: &Weight, level: i64, pairs: &[DirichletPair]) -> Result<f64> {
    let n = FusionEngine::new(rs, level)?.matrix(gamma)?;
    let d = rs.dim(gamma)? as f64;
    let mut worst: f64 = 0.0;
    for p in pairs {
        let mu = Complex64::new(1.0, 0.0) - p.eigenvalue;
        for (i, row) in n.iter().enumerate() {
            let pf: Complex64 = row
                .iter()
                .zip(&p.eigenfunction)
                .map(|(&c, f)| f * (c as f64 / d))
                .sum();
            worst = worst.max((pf - p.eigenfunction[i] * mu).norm());
        }
    }
    Ok(worst)
}
