//! Dimensions, weight multiplicities, characters and tensor product
//! decompositions.
//!
//! Weight multiplicities come from Freudenthal's recursion over the dominant
//! weights of the module; everything else is built on top of them.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{self, Rational};
use crate::rootsys::RootSystem;
use crate::weight::Weight;

/// Default ceiling on module dimensions handled by the multiplicity routines.
pub const DEFAULT_DIM_BOUND: u128 = 2_000_000;

/// Weight multiplicities K_λ^β of an irreducible module (or a tensor power).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMultiplicityMap {
    pub highest_weight: Weight,
    pub entries: BTreeMap<Weight, u64>,
}

impl WeightMultiplicityMap {
    pub fn get(&self, beta: &Weight) -> u64 {
        self.entries.get(beta).copied().unwrap_or(0)
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> u128 {
        self.entries.values().map(|&m| m as u128).sum()
    }

    /// The support S_γ as a sorted list.
    pub fn support(&self) -> Vec<Weight> {
        self.entries.keys().cloned().collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&MultiplicityJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: MultiplicityJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiplicityEntryJson {
    weight: Weight,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiplicityJson {
    highest_weight: Weight,
    entries: Vec<MultiplicityEntryJson>,
}

impl From<&WeightMultiplicityMap> for MultiplicityJson {
    fn from(m: &WeightMultiplicityMap) -> Self {
        MultiplicityJson {
            highest_weight: m.highest_weight.clone(),
            entries: m
                .entries
                .iter()
                .map(|(w, &mult)| MultiplicityEntryJson {
                    weight: w.clone(),
                    mult,
                })
                .collect(),
        }
    }
}

impl TryFrom<MultiplicityJson> for WeightMultiplicityMap {
    type Error = Error;
    fn try_from(raw: MultiplicityJson) -> Result<Self> {
        let rank = raw.highest_weight.rank();
        let mut entries = BTreeMap::new();
        for e in raw.entries {
            if e.weight.rank() != rank {
                return invalid(format!("weight {} has the wrong rank", e.weight));
            }
            if e.mult == 0 {
                return invalid(format!("zero multiplicity stored for {}", e.weight));
            }
            if entries.insert(e.weight.clone(), e.mult).is_some() {
                return invalid(format!("duplicate weight {}", e.weight));
            }
        }
        Ok(WeightMultiplicityMap {
            highest_weight: raw.highest_weight,
            entries,
        })
    }
}

/// Tensor product decomposition {β ↦ M_{λ,γ}^β}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub lambda: Weight,
    pub gamma: Weight,
    pub entries: BTreeMap<Weight, u64>,
}

impl Decomposition {
    pub fn get(&self, beta: &Weight) -> u64 {
        self.entries.get(beta).copied().unwrap_or(0)
    }
}

fn require_dominant(rs: &RootSystem, lambda: &Weight, what: &str) -> Result<()> {
    rs.check_weight(lambda)?;
    if !lambda.is_dominant() {
        return invalid(format!("{what}: {lambda} is not dominant"));
    }
    Ok(())
}

/// Weyl dimension formula.
pub fn dim(rs: &RootSystem, lambda: &Weight) -> Result<u128> {
    rs.dim(lambda)
}

/// Coordinates of a weight in the simple-root basis, if it lies in the root lattice.
fn root_coordinates(rs: &RootSystem, cartan_inv: &[Vec<Rational>], w: &Weight) -> Option<Vec<i64>> {
    // w = Σ c_i α_i with α_i = Σ_j a_ij ω_j, so c = w · a^{-1}
    let r = rs.rank();
    let mut out = Vec::with_capacity(r);
    for j in 0..r {
        let mut s = Rational::from_integer(0);
        for i in 0..r {
            s += cartan_inv[i][j] * Rational::from_integer(w[i]);
        }
        if !s.is_integer() {
            return None;
        }
        out.push(s.to_integer());
    }
    Some(out)
}

pub(crate) fn cartan_inverse(rs: &RootSystem) -> Vec<Vec<Rational>> {
    let q: Vec<Vec<Rational>> = rs
        .cartan()
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect();
    rational::invert(&q).expect("Cartan matrices are invertible")
}

/// Dominant weights μ ≤ λ, each with its depth (height of λ − μ).
fn dominant_weights_below(rs: &RootSystem, lambda: &Weight) -> Vec<(Weight, i64)> {
    // Dominant weights below λ are connected to λ by positive-root steps
    // through dominant weights, so a search over such steps is complete.
    let cinv = cartan_inverse(rs);
    let mut seen: BTreeSet<Weight> = BTreeSet::new();
    let mut out = vec![];
    let mut stack = vec![lambda.clone()];
    seen.insert(lambda.clone());
    while let Some(mu) = stack.pop() {
        let depth: i64 = root_coordinates(rs, &cinv, &(lambda - &mu))
            .expect("λ − μ lies in the root lattice")
            .iter()
            .sum();
        out.push((mu.clone(), depth));
        for root in rs.positive_roots() {
            let nu = &mu - &root.weight;
            if nu.is_dominant() && !seen.contains(&nu) {
                seen.insert(nu.clone());
                stack.push(nu);
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
    out
}

/// Multiplicities of the dominant weights of V_λ via Freudenthal's formula.
pub fn dominant_multiplicities(rs: &RootSystem, lambda: &Weight) -> Result<BTreeMap<Weight, u64>> {
    require_dominant(rs, lambda, "weight multiplicities")?;
    let doms = dominant_weights_below(rs, lambda);
    let rho = rs.rho();
    let lr = lambda + rho;
    let norm_lr = rs.inner_product_numerator(&lr, &lr);
    let mut mult: BTreeMap<Weight, u64> = BTreeMap::new();
    for (mu, depth) in doms {
        if depth == 0 {
            mult.insert(mu, 1);
            continue;
        }
        let mr = &mu + rho;
        let lhs = norm_lr - rs.inner_product_numerator(&mr, &mr);
        // 2 Σ_{α>0} Σ_{j≥1} (μ+jα|α) m(μ+jα), all scaled by the Gram denominator
        let mut rhs: i128 = 0;
        for root in rs.positive_roots() {
            let mut j = 1i64;
            loop {
                let nu = &mu + &root.weight.scale(j);
                let dom = rs.dominant_representative(&nu);
                let m = match mult.get(&dom) {
                    Some(&m) => m,
                    None => break,
                };
                let ip = rs.inner_product_numerator(&nu, &root.weight);
                rhs += 2 * (ip as i128) * (m as i128);
                j += 1;
            }
        }
        if lhs <= 0 || rhs % (lhs as i128) != 0 {
            return Err(Error::Consistency(format!(
                "Freudenthal recursion gave a non-integral multiplicity at {mu} in V_{lambda}"
            )));
        }
        let m = rhs / lhs as i128;
        if m > 0 {
            mult.insert(mu, m as u64);
        }
    }
    Ok(mult)
}

/// All weight multiplicities K_λ^β of V_λ, refusing modules above `bound`.
pub fn weight_multiplicities_bounded(
    rs: &RootSystem,
    lambda: &Weight,
    bound: u128,
) -> Result<WeightMultiplicityMap> {
    require_dominant(rs, lambda, "weight multiplicities")?;
    let d = rs.dim(lambda)?;
    if d > bound {
        return Err(Error::BoundExceeded {
            what: "module dimension",
            value: d,
            bound,
        });
    }
    let dominant = dominant_multiplicities(rs, lambda)?;
    let mut entries = BTreeMap::new();
    for (mu, m) in dominant {
        for w in rs.orbit(&mu) {
            entries.insert(w, m);
        }
    }
    let map = WeightMultiplicityMap {
        highest_weight: lambda.clone(),
        entries,
    };
    if map.total() != d {
        return Err(Error::Consistency(format!(
            "multiplicities of V_{lambda} sum to {} but dim is {d}",
            map.total()
        )));
    }
    Ok(map)
}

pub fn weight_multiplicities(rs: &RootSystem, lambda: &Weight) -> Result<WeightMultiplicityMap> {
    weight_multiplicities_bounded(rs, lambda, DEFAULT_DIM_BOUND)
}

/// Weight multiplicities of V_γ^{⊗n} by repeated convolution.
pub fn tensor_power_multiplicities(
    rs: &RootSystem,
    gamma: &Weight,
    n: u32,
    bound: u128,
) -> Result<WeightMultiplicityMap> {
    require_dominant(rs, gamma, "tensor power")?;
    let d = rs.dim(gamma)?;
    let total = d.checked_pow(n).unwrap_or(u128::MAX);
    if total > bound {
        return Err(Error::BoundExceeded {
            what: "tensor power dimension",
            value: total,
            bound,
        });
    }
    let base = weight_multiplicities_bounded(rs, gamma, bound)?;
    let mut acc: BTreeMap<Weight, u64> = BTreeMap::new();
    acc.insert(rs.zero(), 1);
    for _ in 0..n {
        let mut next: BTreeMap<Weight, u64> = BTreeMap::new();
        for (w, &m) in &acc {
            for (s, &k) in &base.entries {
                *next.entry(w + s).or_insert(0) += m * k;
            }
        }
        acc = next;
    }
    Ok(WeightMultiplicityMap {
        highest_weight: gamma.scale(n as i64),
        entries: acc,
    })
}

/// Littlewood-Richardson decomposition of V_λ ⊗ V_γ by the Brauer-Klimyk
/// rule: ch_λ ch_γ = Σ_β K_γ^β ch_{λ+β}, each term folded by the shifted
/// Weyl action.
pub fn tensor_decompose(rs: &RootSystem, lambda: &Weight, gamma: &Weight) -> Result<Decomposition> {
    tensor_decompose_bounded(rs, lambda, gamma, DEFAULT_DIM_BOUND)
}

pub fn tensor_decompose_bounded(
    rs: &RootSystem,
    lambda: &Weight,
    gamma: &Weight,
    bound: u128,
) -> Result<Decomposition> {
    require_dominant(rs, lambda, "tensor_decompose")?;
    let weights = weight_multiplicities_bounded(rs, gamma, bound)?;
    let mut acc: BTreeMap<Weight, i64> = BTreeMap::new();
    for (beta, &k) in &weights.entries {
        let (mu, sign) = rs.fold_finite(&(lambda + beta));
        if sign != 0 {
            *acc.entry(mu).or_insert(0) += sign as i64 * k as i64;
        }
    }
    let mut entries = BTreeMap::new();
    for (mu, c) in acc {
        if c < 0 {
            return Err(Error::Consistency(format!(
                "negative multiplicity {c} for {mu} in {lambda} ⊗ {gamma}"
            )));
        }
        if c > 0 {
            entries.insert(mu, c as u64);
        }
    }
    Ok(Decomposition {
        lambda: lambda.clone(),
        gamma: gamma.clone(),
        entries,
    })
}

/// exp(-2πi p/q) with p reduced modulo q before converting to floating point.
pub(crate) fn phase(p: i64, q: i64) -> Complex64 {
    let r = p.rem_euclid(q);
    let angle = -2.0 * std::f64::consts::PI * (r as f64) / (q as f64);
    Complex64::from_polar(1.0, angle)
}

/// Alternating sum Σ_w det(w) e^{-2πi (w μ | ν)/L}, with ν a weight and the
/// inner product scaled to integers.
fn alternating_sum(rs: &RootSystem, mu: &Weight, nu: &Weight, level: i64) -> Complex64 {
    let q = rs.gram_denominator() * level;
    let mut s = Complex64::new(0.0, 0.0);
    for w in rs.weyl_group().elements() {
        let p = rs.inner_product_numerator(&w.apply(mu), nu);
        s += phase(p, q) * (w.det() as f64);
    }
    s
}

/// Evaluates ch_λ at the torus point −ν^{-1}(p/L), where `p` is an integral
/// weight and p/L is regular. Returns `None` at non-regular points.
pub fn character_at(rs: &RootSystem, lambda: &Weight, point: &Weight, scale: i64) -> Option<Complex64> {
    let rho = rs.rho();
    let den = alternating_sum(rs, rho, point, scale);
    if den.norm() < 1e-9 {
        return None;
    }
    Some(alternating_sum(rs, &(lambda + rho), point, scale) / den)
}

/// Precomputed data for level-k discretized characters.
#[derive(Debug)]
pub struct DiscretizedCharacterEvaluator<'a> {
    rs: &'a RootSystem,
    level: i64,
    shifted_level: i64,
}

impl<'a> DiscretizedCharacterEvaluator<'a> {
    pub fn new(rs: &'a RootSystem, level: i64) -> Result<Self> {
        if level < 0 {
            return invalid(format!("level {level} is negative"));
        }
        // warm the Weyl group once so concurrent users share it
        rs.weyl_group();
        Ok(Self {
            rs,
            level,
            shifted_level: level + rs.dual_coxeter(),
        })
    }

    pub fn root_system(&self) -> &RootSystem {
        self.rs
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// k + h^∨
    pub fn shifted_level(&self) -> i64 {
        self.shifted_level
    }

    pub fn in_alcove(&self, w: &Weight) -> bool {
        w.is_dominant() && self.rs.theta_pairing(w) <= self.level
    }

    /// χ_λ(σ) = ch_λ(−ν^{-1}((σ+ρ)/(k+h^∨))) for any weight λ and σ ∈ P₊^k.
    /// Returns exact zero when λ+ρ lies on a wall of the level-k alcove.
    pub fn chi(&self, lambda: &Weight, sigma: &Weight) -> Result<Complex64> {
        self.rs.check_weight(lambda)?;
        self.rs.check_weight(sigma)?;
        if !self.in_alcove(sigma) {
            return invalid(format!(
                "σ = {sigma} is outside the level-{} alcove",
                self.level
            ));
        }
        let fold = crate::fusion::fold_affine(self.rs, lambda, self.level)?;
        if fold.sign == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let point = sigma + self.rs.rho();
        let v = character_at(self.rs, &fold.folded, &point, self.shifted_level)
            .ok_or_else(|| Error::Consistency(format!("σ+ρ = {point} is not regular")))?;
        Ok(v * fold.sign as f64)
    }

    /// χ_λ(σ) forced to a real number; fails if the imaginary part is not negligible.
    pub fn chi_real(&self, lambda: &Weight, sigma: &Weight) -> Result<f64> {
        let v = self.chi(lambda, sigma)?;
        if v.im.abs() > 1e-10 * (1.0 + v.re.abs()) {
            return Err(Error::Consistency(format!(
                "χ_{lambda}({sigma}) = {v} is not real"
            )));
        }
        Ok(v.re)
    }

    /// χ_λ(0) from the sine product, in log space for large root systems.
    pub fn asymptotic_dim(&self, lambda: &Weight) -> Result<f64> {
        self.rs.check_weight(lambda)?;
        if !self.in_alcove(lambda) {
            return invalid(format!(
                "asymptotic_dim: {lambda} is outside the level-{} alcove",
                self.level
            ));
        }
        Ok(sine_product_ratio(self.rs, lambda, self.shifted_level))
    }

    /// s(λ) = Π_{α>0} sin(π(λ+ρ|α)/(k+h^∨)).
    pub fn s(&self, lambda: &Weight) -> f64 {
        sine_product(self.rs, lambda, self.shifted_level)
    }

    /// Dense table `t[β][σ] = χ_β(σ)` over an ordered list of alcove weights.
    pub fn table(&self, weights: &[Weight]) -> Result<Vec<Vec<Complex64>>> {
        use rayon::prelude::*;
        weights
            .par_iter()
            .map(|b| weights.iter().map(|s| self.chi(b, s)).collect())
            .collect()
    }
}

/// (λ+ρ|α)/(k+h^∨) as an exact fraction.
fn shifted_angle(rs: &RootSystem, lambda: &Weight, alpha: &Weight, shifted_level: i64) -> Ratio<i64> {
    let lr = lambda + rs.rho();
    Ratio::new(
        rs.inner_product_numerator(&lr, alpha),
        rs.gram_denominator() * shifted_level,
    )
}

fn sin_pi(r: &Ratio<i64>) -> f64 {
    (std::f64::consts::PI * rational::to_f64(r)).sin()
}

pub(crate) fn sine_product(rs: &RootSystem, lambda: &Weight, shifted_level: i64) -> f64 {
    rs.positive_roots()
        .iter()
        .map(|root| sin_pi(&shifted_angle(rs, lambda, &root.weight, shifted_level)))
        .product()
}

fn sine_product_ratio(rs: &RootSystem, lambda: &Weight, shifted_level: i64) -> f64 {
    let zero = rs.zero();
    let roots = rs.positive_roots();
    if roots.len() > 20 {
        let log: f64 = roots
            .iter()
            .map(|root| {
                let a = sin_pi(&shifted_angle(rs, lambda, &root.weight, shifted_level));
                let b = sin_pi(&shifted_angle(rs, &zero, &root.weight, shifted_level));
                a.ln() - b.ln()
            })
            .sum();
        log.exp()
    } else {
        roots
            .iter()
            .map(|root| {
                sin_pi(&shifted_angle(rs, lambda, &root.weight, shifted_level))
                    / sin_pi(&shifted_angle(rs, &zero, &root.weight, shifted_level))
            })
            .product()
    }
}

/// χ_λ(0) at level k.
pub fn asymptotic_dim(rs: &RootSystem, lambda: &Weight, level: i64) -> Result<f64> {
    DiscretizedCharacterEvaluator::new(rs, level)?.asymptotic_dim(lambda)
}

/// χ_λ(σ) at level k.
pub fn discretized_character(rs: &RootSystem, lambda: &Weight, sigma: &Weight, level: i64) -> Result<Complex64> {
    DiscretizedCharacterEvaluator::new(rs, level)?.chi(lambda, sigma)
}
