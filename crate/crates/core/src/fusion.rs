//! Level-k fusion coefficients by affine folding (the Kac-Walton route) and
//! their iterated powers.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::alcove_markov::{enumerate_alcove, AlcoveIndex};
use crate::charlib::{self, DiscretizedCharacterEvaluator, WeightMultiplicityMap, DEFAULT_DIM_BOUND};
use crate::error::{invalid, Error, Result};
use crate::rational::Rational;
use crate::rootsys::{Family, RootSystem};
use crate::weight::Weight;

/// Result of folding x+ρ into the fundamental domain A_k of the affine Weyl group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFoldResult {
    /// μ with w(x+ρ) = μ+ρ; meaningful only when `sign != 0`.
    pub folded: Weight,
    pub sign: i8,
    pub reflection_count: usize,
}

/// Folds the ρ-shifted weight x+ρ into A_k = {y : y_i ≥ 0, ⟨y, θ^∨⟩ ≤ k+h^∨}
/// by alternating finite reflections with the affine reflection in the
/// θ-wall. Sign 0 means x+ρ is fixed by a wall.
pub fn fold_affine(rs: &RootSystem, x: &Weight, level: i64) -> Result<AffineFoldResult> {
    rs.check_weight(x)?;
    if level < 0 {
        return invalid(format!("level {level} is negative"));
    }
    let shifted = level + rs.dual_coxeter();
    let mut y = x + rs.rho();
    let mut count = 0usize;
    loop {
        count += rs.fold_to_dominant(&mut y);
        let t = rs.theta_pairing(&y);
        if t > shifted {
            // s_0: y ↦ y − (⟨y,θ^∨⟩ − (k+h^∨)) θ
            let excess = t - shifted;
            for (yi, ti) in y.coords_mut().iter_mut().zip(rs.theta().coords()) {
                *yi -= excess * ti;
            }
            count += 1;
        } else {
            let on_wall = y.coords().contains(&0) || t == shifted;
            let sign = if on_wall {
                0
            } else if count % 2 == 0 {
                1
            } else {
                -1
            };
            return Ok(AffineFoldResult {
                folded: &y - rs.rho(),
                sign,
                reflection_count: count,
            });
        }
    }
}

/// −w₀(γ): the highest weight of the dual module.
pub fn dual_weight(rs: &RootSystem, gamma: &Weight) -> Result<Weight> {
    rs.check_weight(gamma)?;
    if !gamma.is_dominant() {
        return invalid(format!("dual_weight: {gamma} is not dominant"));
    }
    Ok(rs.dominant_representative(&-gamma))
}

/// Fusion-coefficient engine at a fixed level, caching weight systems.
#[derive(Debug)]
pub struct FusionEngine<'a> {
    rs: &'a RootSystem,
    level: i64,
    alcove: AlcoveIndex,
    bound: u128,
    weights: std::sync::Mutex<HashMap<Weight, std::sync::Arc<WeightMultiplicityMap>>>,
}

impl<'a> FusionEngine<'a> {
    pub fn new(rs: &'a RootSystem, level: i64) -> Result<Self> {
        if level < 0 {
            return invalid(format!("level {level} is negative"));
        }
        Ok(Self {
            rs,
            level,
            alcove: enumerate_alcove(rs, level)?,
            bound: DEFAULT_DIM_BOUND,
            weights: Default::default(),
        })
    }

    pub fn with_dim_bound(mut self, bound: u128) -> Self {
        self.bound = bound;
        self
    }

    pub fn root_system(&self) -> &RootSystem {
        self.rs
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn alcove(&self) -> &AlcoveIndex {
        &self.alcove
    }

    pub fn check_in_alcove(&self, w: &Weight, what: &str) -> Result<()> {
        self.rs.check_weight(w)?;
        if !w.is_dominant() {
            return invalid(format!("{what} = {w} is not dominant"));
        }
        let t = self.rs.theta_pairing(w);
        if t > self.level {
            return invalid(format!(
                "{what} = {w} violates the alcove constraint ⟨{what}, θ^∨⟩ = {t} <= k = {}",
                self.level
            ));
        }
        Ok(())
    }

    pub fn weight_system(&self, gamma: &Weight) -> Result<std::sync::Arc<WeightMultiplicityMap>> {
        if let Some(m) = self.weights.lock().unwrap().get(gamma) {
            return Ok(m.clone());
        }
        let m = std::sync::Arc::new(charlib::weight_multiplicities_bounded(self.rs, gamma, self.bound)?);
        self.weights.lock().unwrap().insert(gamma.clone(), m.clone());
        Ok(m)
    }

    /// {β ↦ N_{λ,γ}^β}: Brauer-Klimyk over the weights of V_γ, each term
    /// folded by the affine Weyl group.
    pub fn coeffs(&self, lambda: &Weight, gamma: &Weight) -> Result<BTreeMap<Weight, u64>> {
        self.check_in_alcove(lambda, "λ")?;
        self.check_in_alcove(gamma, "γ")?;
        let ws = self.weight_system(gamma)?;
        let mut acc: BTreeMap<Weight, i64> = BTreeMap::new();
        for (beta, &k) in &ws.entries {
            let f = fold_affine(self.rs, &(lambda + beta), self.level)?;
            if f.sign != 0 {
                *acc.entry(f.folded).or_insert(0) += f.sign as i64 * k as i64;
            }
        }
        let mut out = BTreeMap::new();
        for (b, c) in acc {
            if c < 0 {
                return Err(Error::Consistency(format!(
                    "negative fusion coefficient {c} at β = {b} for λ = {lambda}, γ = {gamma}"
                )));
            }
            if c > 0 {
                out.insert(b, c as u64);
            }
        }
        Ok(out)
    }

    /// Dense fusion matrix N_γ over the alcove order: `m[i][j] = N_{λ_i,γ}^{λ_j}`.
    pub fn matrix(&self, gamma: &Weight) -> Result<Vec<Vec<u64>>> {
        let n = self.alcove.len();
        let mut m = vec![vec![0u64; n]; n];
        for (i, lambda) in self.alcove.weights().iter().enumerate() {
            for (beta, c) in self.coeffs(lambda, gamma)? {
                let j = self.alcove.position(&beta).ok_or_else(|| {
                    Error::Consistency(format!("fusion product left the alcove at {beta}"))
                })?;
                m[i][j] = c;
            }
        }
        Ok(m)
    }

    /// {β ↦ N_{λ,γ,n}^β} by iterating single-step fusion over the alcove.
    pub fn power(&self, lambda: &Weight, gamma: &Weight, n: u32) -> Result<BTreeMap<Weight, BigUint>> {
        self.check_in_alcove(lambda, "λ")?;
        let m = self.matrix(gamma)?;
        let start = self.alcove.position(lambda).expect("checked");
        let rows = power_rows(&m, start, n);
        Ok(self
            .alcove
            .weights()
            .iter()
            .zip(rows)
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| (w.clone(), c))
            .collect())
    }

    /// Builds the table {(λ, n, β) ↦ N_{λ,γ,n}^β} for every λ in the alcove and n ≤ max_n.
    pub fn table(&self, gamma: &Weight, max_n: u32) -> Result<FusionTable> {
        self.check_in_alcove(gamma, "γ")?;
        let m = self.matrix(gamma)?;
        let mut entries = BTreeMap::new();
        for (i, lambda) in self.alcove.weights().iter().enumerate() {
            let mut v: Vec<BigUint> = vec![BigUint::zero(); m.len()];
            v[i] = BigUint::from(1u8);
            for n in 0..=max_n {
                if n > 0 {
                    v = step(&m, &v);
                }
                for (j, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        entries.insert(
                            (lambda.clone(), n, self.alcove.weights()[j].clone()),
                            c.clone(),
                        );
                    }
                }
            }
        }
        Ok(FusionTable {
            family: self.rs.family(),
            rank: self.rs.rank(),
            level: self.level,
            gamma: gamma.clone(),
            entries,
        })
    }

    /// The literal affine Weyl group sum
    /// N_{λ,γ,n}^β = Σ_{w ∈ W_k} det(w) K_{γ,n}^{w(β+ρ) − (λ+ρ)},
    /// evaluated by solving for the translation part of each contributing term.
    pub fn group_sum(&self, lambda: &Weight, gamma: &Weight, beta: &Weight, n: u32) -> Result<i64> {
        self.check_in_alcove(lambda, "λ")?;
        self.check_in_alcove(beta, "β")?;
        let k_n = charlib::tensor_power_multiplicities(self.rs, gamma, n, self.bound)?;
        Ok(group_sum_with(self.rs, self.level, lambda, beta, &k_n))
    }

    /// max over λ, σ of |χ_λ(σ)χ_γ(σ) − Σ_β N_{λ,γ}^β χ_β(σ)|.
    pub fn verify_identity(&self, gamma: &Weight) -> Result<f64> {
        let ev = DiscretizedCharacterEvaluator::new(self.rs, self.level)?;
        let weights = self.alcove.weights();
        let table = ev.table(weights)?;
        let g = self.alcove.position(gamma).ok_or_else(|| {
            Error::InvalidInput(format!("γ = {gamma} is outside the level-{} alcove", self.level))
        })?;
        let m = self.matrix(gamma)?;
        let mut worst: f64 = 0.0;
        for (i, row) in m.iter().enumerate() {
            for s in 0..weights.len() {
                let lhs = table[i][s] * table[g][s];
                let rhs: Complex64 = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(j, &c)| table[j][s] * c as f64)
                    .sum();
                worst = worst.max((lhs - rhs).norm());
            }
        }
        Ok(worst)
    }
}

pub(crate) fn group_sum_with(
    rs: &RootSystem,
    level: i64,
    lambda: &Weight,
    beta: &Weight,
    weights: &WeightMultiplicityMap,
) -> i64 {
    let shifted = Rational::from_integer(level + rs.dual_coxeter());
    let lr = lambda + rs.rho();
    let br = beta + rs.rho();
    let r = rs.rank();
    let mut total = 0i64;
    for w in rs.weyl_group().elements() {
        let wb = w.apply(&br);
        for (v, &k) in &weights.entries {
            // (k+h^∨) x = v + (λ+ρ) − w(β+ρ) must lie in (k+h^∨)·ν(Q^∨); its
            // coordinates on the basis ν(α_i^∨) are the pairings with ω_i.
            let u = &(v + &lr) - &wb;
            let integral = (0..r).all(|j| {
                let fw = Weight::fundamental(r, j);
                (rs.inner_product(&u, &fw) / shifted).is_integer()
            });
            if integral {
                total += w.det() * k as i64;
            }
        }
    }
    total
}

fn step(m: &[Vec<u64>], v: &[BigUint]) -> Vec<BigUint> {
    let n = m.len();
    let mut out = vec![BigUint::zero(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, &c) in m[i].iter().enumerate() {
            if c > 0 {
                out[j] += vi * c;
            }
        }
    }
    out
}

/// Row `start` of m^n, exactly.
pub(crate) fn power_rows(m: &[Vec<u64>], start: usize, n: u32) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); m.len()];
    v[start] = BigUint::from(1u8);
    for _ in 0..n {
        v = step(m, &v);
    }
    v
}

pub fn fusion_coeffs(rs: &RootSystem, lambda: &Weight, gamma: &Weight, level: i64) -> Result<BTreeMap<Weight, u64>> {
    FusionEngine::new(rs, level)?.coeffs(lambda, gamma)
}

pub fn fusion_power(
    rs: &RootSystem,
    lambda: &Weight,
    gamma: &Weight,
    n: u32,
    level: i64,
) -> Result<BTreeMap<Weight, BigUint>> {
    FusionEngine::new(rs, level)?.power(lambda, gamma, n)
}

pub fn verify_fusion_identity(rs: &RootSystem, gamma: &Weight, level: i64) -> Result<f64> {
    FusionEngine::new(rs, level)?.verify_identity(gamma)
}

/// Exact table {(λ, n, β) ↦ N_{λ,γ,n}^β}; zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionTable {
    pub family: Family,
    pub rank: usize,
    pub level: i64,
    pub gamma: Weight,
    pub entries: BTreeMap<(Weight, u32, Weight), BigUint>,
}

/// Coefficients are written as JSON numbers when they fit in a u64 and as
/// decimal strings otherwise.
mod big_coeff {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v.to_u64() {
            Some(x) => s.serialize_u64(x),
            None => s.serialize_str(&v.to_str_radix(10)),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(BigUint::from(x)),
            Raw::Str(s) => {
                if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(serde::de::Error::custom(format!("bad coefficient {s:?}")));
                }
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad coefficient {s:?}")))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FusionEntryJson {
    lambda: Weight,
    n: u32,
    beta: Weight,
    #[serde(with = "big_coeff")]
    coeff: BigUint,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FusionTableJson {
    family: Family,
    rank: usize,
    level: i64,
    gamma: Weight,
    entries: Vec<FusionEntryJson>,
}

impl FusionTable {
    pub fn get(&self, lambda: &Weight, n: u32, beta: &Weight) -> BigUint {
        self.entries
            .get(&(lambda.clone(), n, beta.clone()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = FusionTableJson {
            family: self.family,
            rank: self.rank,
            level: self.level,
            gamma: self.gamma.clone(),
            entries: self
                .entries
                .iter()
                .map(|((l, n, b), c)| FusionEntryJson {
                    lambda: l.clone(),
                    n: *n,
                    beta: b.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&raw)?)
    }

    /// Parses and validates a table; the root system must exist and every
    /// weight must lie in the level-k alcove.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FusionTableJson = serde_json::from_str(s)?;
        let rs = RootSystem::new(raw.family, raw.rank)?;
        if raw.level < 0 {
            return invalid(format!("negative level {}", raw.level));
        }
        let in_alcove = |w: &Weight| {
            w.rank() == rs.rank() && w.is_dominant() && rs.theta_pairing(w) <= raw.level
        };
        if !in_alcove(&raw.gamma) {
            return invalid(format!("γ = {} is outside the alcove", raw.gamma));
        }
        let mut entries = BTreeMap::new();
        for e in raw.entries {
            if !in_alcove(&e.lambda) || !in_alcove(&e.beta) {
                return invalid(format!("entry ({}, {}) is outside the alcove", e.lambda, e.beta));
            }
            if e.coeff.is_zero() {
                return invalid("zero coefficients are never stored");
            }
            if entries.insert((e.lambda, e.n, e.beta), e.coeff).is_some() {
                return invalid("duplicate fusion table entry");
            }
        }
        Ok(FusionTable {
            family: raw.family,
            rank: raw.rank,
            level: raw.level,
            gamma: raw.gamma,
            entries,
        })
    }

    /// One row per entry: family,rank,level,gamma,lambda,n,beta,coeff with
    /// weight coordinates separated by `;`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let fmt = |w: &Weight| {
            w.coords()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        writeln!(out, "family,rank,level,gamma,lambda,n,beta,coeff")?;
        for ((l, n, b), c) in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.family,
                self.rank,
                self.level,
                fmt(&self.gamma),
                fmt(l),
                n,
                fmt(b),
                c
            )?;
        }
        Ok(())
    }
}
