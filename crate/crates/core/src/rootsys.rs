//! Classical root systems A, B, C, D in the fundamental-weight basis.
//!
//! The metric is normalized so that long roots have squared length 2, which
//! is the same as asking (θ^∨|θ^∨) = 2 for the highest coroot. Every stored
//! quantity is an integer or an exact rational.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{self, Rational};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// A positive root with its coordinates in both bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    /// Coordinates in the fundamental-weight basis.
    pub weight: Weight,
    /// Coefficients on the simple roots (all nonnegative).
    pub simple_coeffs: Vec<i64>,
    /// Pairing vector of the coroot: `⟨λ, α^∨⟩ = λ · coroot`.
    pub coroot: Vec<i64>,
    /// (α|α) in the normalized metric: 2 for long roots, 1 for short ones.
    pub norm2: Rational,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.simple_coeffs.iter().sum()
    }
}

/// A Weyl group element as an integer matrix on fundamental-weight
/// coordinates (row-major, acting on column vectors).
#[derive(Clone, Debug)]
pub struct WeylElement {
    matrix: Vec<i64>,
    rank: usize,
    /// Length of a reduced word.
    pub length: usize,
}

impl WeylElement {
    pub fn det(&self) -> i64 {
        if self.length % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        let r = self.rank;
        let c = w.coords();
        Weight::new(
            (0..r)
                .map(|i| (0..r).map(|j| self.matrix[i * r + j] * c[j]).sum())
                .collect(),
        )
    }
}

/// The finite Weyl group, enumerated once per root system.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    longest: usize,
}

impl WeylGroup {
    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn longest(&self) -> &WeylElement {
        &self.elements[self.longest]
    }
}

#[derive(Debug)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    half_norms: Vec<Rational>,
    simple_roots: Vec<Weight>,
    positive_roots: Vec<Root>,
    gram: Vec<Vec<Rational>>,
    gram_den: i64,
    gram_num: Vec<Vec<i64>>,
    rho: Weight,
    theta: Weight,
    theta_coroot: Vec<i64>,
    dual_coxeter: i64,
    weyl_order: u64,
    weyl: OnceLock<WeylGroup>,
}

fn cartan_matrix(family: Family, rank: usize) -> Vec<Vec<i64>> {
    let n = rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let chain_end = match family {
        Family::D => n - 1,
        _ => n,
    };
    for i in 0..chain_end.saturating_sub(1) {
        a[i][i + 1] = -1;
        a[i + 1][i] = -1;
    }
    match family {
        Family::A => {}
        // a_ij = ⟨α_i, α_j^∨⟩; α_n short in B, long in C.
        Family::B => a[n - 2][n - 1] = -2,
        Family::C => a[n - 1][n - 2] = -2,
        Family::D => {
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
    }
    a
}

/// |α_i|²/2 with long roots normalized to 1.
fn half_norms(family: Family, rank: usize) -> Vec<Rational> {
    let half = Rational::new(1, 2);
    (0..rank)
        .map(|i| match family {
            Family::A | Family::D => Rational::one(),
            Family::B if i == rank - 1 => half,
            Family::B => Rational::one(),
            Family::C if i == rank - 1 => Rational::one(),
            Family::C => half,
        })
        .collect()
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

impl RootSystem {
    /// Builds A_rank (the Lie algebra of SU(rank+1)), B_rank, C_rank or D_rank.
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let min_rank = match family {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
        };
        if rank < min_rank {
            return invalid(format!(
                "{family}_{rank} is not supported: {family} requires rank >= {min_rank}"
            ));
        }
        if rank > 12 {
            return invalid(format!("{family}_{rank}: rank above 12 is not supported"));
        }
        let cartan = cartan_matrix(family, rank);
        let d = half_norms(family, rank);

        // (α_i|α_j) = a_ij d_j
        let root_gram: Vec<Vec<Rational>> = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| Rational::from_integer(cartan[i][j]) * d[j])
                    .collect()
            })
            .collect();
        for i in 0..rank {
            for j in 0..rank {
                if root_gram[i][j] != root_gram[j][i] {
                    return Err(Error::Consistency(format!(
                        "Cartan matrix of {family}_{rank} not symmetrized by root lengths"
                    )));
                }
            }
        }

        let simple_roots: Vec<Weight> = cartan.iter().map(|row| Weight::new(row.clone())).collect();
        let positive_roots = Self::generate_positive_roots(&cartan, &d, &root_gram, rank)?;

        // (ω_i|ω_j) = (a^{-1})_{ij} d_j
        let cartan_q: Vec<Vec<Rational>> = cartan
            .iter()
            .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect();
        let inv = rational::invert(&cartan_q)?;
        let gram: Vec<Vec<Rational>> = (0..rank)
            .map(|i| (0..rank).map(|j| inv[i][j] * d[j]).collect())
            .collect();
        let gram_den = rational::common_denominator(gram.iter().flatten());
        let gram_num: Vec<Vec<i64>> = gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| (q * Rational::from_integer(gram_den)).to_integer())
                    .collect()
            })
            .collect();

        let theta_root = positive_roots
            .iter()
            .max_by_key(|r| r.height())
            .expect("nonempty root system");
        let theta = theta_root.weight.clone();
        let theta_coroot = theta_root.coroot.clone();
        let rho = Weight::new(vec![1; rank]);
        let dual_coxeter = 1 + rho.pair(&theta_coroot);

        let n = rank as u64;
        let weyl_order = match family {
            Family::A => factorial(n + 1),
            Family::B | Family::C => (1u64 << n) * factorial(n),
            Family::D => (1u64 << (n - 1)) * factorial(n),
        };

        let rs = RootSystem {
            family,
            rank,
            cartan,
            half_norms: d,
            simple_roots,
            positive_roots,
            gram,
            gram_den,
            gram_num,
            rho,
            theta,
            theta_coroot,
            dual_coxeter,
            weyl_order,
            weyl: OnceLock::new(),
        };
        rs.check_invariants()?;
        Ok(rs)
    }

    fn generate_positive_roots(
        cartan: &[Vec<i64>],
        d: &[Rational],
        root_gram: &[Vec<Rational>],
        rank: usize,
    ) -> Result<Vec<Root>> {
        let mut known: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut layers: Vec<Vec<Vec<i64>>> = vec![];
        let simple: Vec<Vec<i64>> = (0..rank)
            .map(|i| {
                let mut c = vec![0; rank];
                c[i] = 1;
                c
            })
            .collect();
        known.extend(simple.iter().cloned());
        layers.push(simple);
        loop {
            let mut next: BTreeSet<Vec<i64>> = BTreeSet::new();
            for beta in layers.last().unwrap() {
                for i in 0..rank {
                    // ⟨β, α_i^∨⟩ = Σ_j c_j a_ji
                    let pairing: i64 = (0..rank).map(|j| beta[j] * cartan[j][i]).sum();
                    let mut p = 0;
                    let mut down = beta.clone();
                    loop {
                        down[i] -= 1;
                        if known.contains(&down) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let q = p - pairing;
                    if q > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if !known.contains(&up) {
                            next.insert(up);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            known.extend(next.iter().cloned());
            layers.push(next.into_iter().collect());
        }

        let mut roots = Vec::new();
        for coeffs in layers.into_iter().flatten() {
            let weight = Weight::new(
                (0..rank)
                    .map(|j| (0..rank).map(|i| coeffs[i] * cartan[i][j]).sum())
                    .collect(),
            );
            let mut norm2 = Rational::zero();
            for i in 0..rank {
                for j in 0..rank {
                    norm2 += root_gram[i][j] * Rational::from_integer(coeffs[i] * coeffs[j]);
                }
            }
            let half = norm2 / Rational::from_integer(2);
            let coroot = (0..rank)
                .map(|j| {
                    let c = Rational::from_integer(coeffs[j]) * d[j] / half;
                    if !c.is_integer() {
                        return Err(Error::Consistency("non-integral coroot".into()));
                    }
                    Ok(c.to_integer())
                })
                .collect::<Result<Vec<_>>>()?;
            roots.push(Root {
                weight,
                simple_coeffs: coeffs,
                coroot,
                norm2,
            });
        }
        Ok(roots)
    }

    fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Consistency(m));
        if self.theta.pair(&self.theta_coroot) != 2 {
            return fail("⟨θ, θ^∨⟩ != 2".into());
        }
        if self.inner_product(&self.theta, &self.theta) != Rational::from_integer(2) {
            return fail("(θ|θ) != 2".into());
        }
        let expected_h = match self.family {
            Family::A => self.rank as i64 + 1,
            Family::B => 2 * self.rank as i64 - 1,
            Family::C => self.rank as i64 + 1,
            Family::D => 2 * self.rank as i64 - 2,
        };
        if self.dual_coxeter != expected_h {
            return fail(format!("h^∨ = {} but expected {}", self.dual_coxeter, expected_h));
        }
        let n = self.rank;
        let expected_roots = match self.family {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * (n - 1),
        };
        if self.positive_roots.len() != expected_roots {
            return fail(format!(
                "{} positive roots, expected {}",
                self.positive_roots.len(),
                expected_roots
            ));
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// |α_i|²/2 for each simple root.
    pub fn half_norms(&self) -> &[Rational] {
        &self.half_norms
    }

    pub fn simple_roots(&self) -> &[Weight] {
        &self.simple_roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    /// Pairing vectors of the simple coroots: the unit vectors.
    pub fn simple_coroots(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|i| Weight::fundamental(self.rank, i).into_coords())
            .collect()
    }

    pub fn fundamental_weights(&self) -> Vec<Weight> {
        (0..self.rank).map(|i| Weight::fundamental(self.rank, i)).collect()
    }

    /// (ω_i|ω_j) in the normalized metric.
    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    /// Common denominator of the Gram matrix and the integer numerators,
    /// `gram = gram_numerators / gram_denominator`.
    pub fn gram_denominator(&self) -> i64 {
        self.gram_den
    }

    pub fn gram_numerators(&self) -> &[Vec<i64>] {
        &self.gram_num
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn theta(&self) -> &Weight {
        &self.theta
    }

    /// Integer vector giving λ ↦ ⟨λ, θ^∨⟩.
    pub fn theta_coroot(&self) -> &[i64] {
        &self.theta_coroot
    }

    pub fn dual_coxeter(&self) -> i64 {
        self.dual_coxeter
    }

    pub fn weyl_order(&self) -> u64 {
        self.weyl_order
    }

    pub fn zero(&self) -> Weight {
        Weight::zero(self.rank)
    }

    pub fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank {
            return invalid(format!(
                "weight {w} has {} coordinates but {}_{} has rank {}",
                w.rank(),
                self.family,
                self.rank,
                self.rank
            ));
        }
        Ok(())
    }

    /// ⟨λ, α_i^∨⟩.
    pub fn pairing(&self, lambda: &Weight, i: usize) -> i64 {
        lambda[i]
    }

    /// ⟨λ, θ^∨⟩, the level of λ.
    pub fn theta_pairing(&self, lambda: &Weight) -> i64 {
        lambda.pair(&self.theta_coroot)
    }

    /// (λ|μ) as an exact rational.
    pub fn inner_product(&self, a: &Weight, b: &Weight) -> Rational {
        Rational::new(self.inner_product_numerator(a, b), self.gram_den)
    }

    /// (λ|μ) · gram_denominator, an exact integer.
    pub fn inner_product_numerator(&self, a: &Weight, b: &Weight) -> i64 {
        let (a, b) = (a.coords(), b.coords());
        let mut s = 0i64;
        for i in 0..self.rank {
            if a[i] == 0 {
                continue;
            }
            let row: i64 = (0..self.rank).map(|j| self.gram_num[i][j] * b[j]).sum();
            s += a[i] * row;
        }
        s
    }

    /// s_i(x) = x − ⟨x, α_i^∨⟩ α_i.
    pub fn reflect(&self, x: &mut Weight, i: usize) {
        let c = x[i];
        if c == 0 {
            return;
        }
        let alpha = &self.simple_roots[i];
        for (xj, aj) in x.coords_mut().iter_mut().zip(alpha.coords()) {
            *xj -= c * aj;
        }
    }

    /// Reflects `x` into the dominant chamber, choosing at every step the most
    /// negative coordinate (lowest index on ties). Returns the number of
    /// reflections used.
    pub fn fold_to_dominant(&self, x: &mut Weight) -> usize {
        let mut count = 0;
        loop {
            let mut best: Option<(usize, i64)> = None;
            for (i, &c) in x.coords().iter().enumerate() {
                if c < 0 && best.is_none_or(|(_, b)| c < b) {
                    best = Some((i, c));
                }
            }
            match best {
                Some((i, _)) => {
                    self.reflect(x, i);
                    count += 1;
                }
                None => return count,
            }
        }
    }

    /// The dominant weight in the Weyl orbit of `x`.
    pub fn dominant_representative(&self, x: &Weight) -> Weight {
        let mut y = x.clone();
        self.fold_to_dominant(&mut y);
        y
    }

    /// Folds the ρ-shifted weight x+ρ into the dominant chamber: returns
    /// (μ, det w) with w(μ+ρ) = x+ρ, or sign 0 when x+ρ lies on a wall.
    pub fn fold_finite(&self, x: &Weight) -> (Weight, i8) {
        let mut y = x + &self.rho;
        let count = self.fold_to_dominant(&mut y);
        if y.coords().contains(&0) {
            let mu = &y - &self.rho;
            return (mu, 0);
        }
        let sign = if count % 2 == 0 { 1 } else { -1 };
        (&y - &self.rho, sign)
    }

    /// The Weyl orbit of `x`, sorted lexicographically.
    pub fn orbit(&self, x: &Weight) -> Vec<Weight> {
        let start = self.dominant_representative(x);
        let mut seen: BTreeSet<Weight> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(w) = queue.pop_front() {
            for i in 0..self.rank {
                if w[i] > 0 {
                    let mut v = w.clone();
                    self.reflect(&mut v, i);
                    if seen.insert(v.clone()) {
                        queue.push_back(v);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The Weyl group, enumerated on first use.
    pub fn weyl_group(&self) -> &WeylGroup {
        self.weyl.get_or_init(|| self.enumerate_weyl_group())
    }

    fn enumerate_weyl_group(&self) -> WeylGroup {
        let r = self.rank;
        let mut identity = vec![0i64; r * r];
        for i in 0..r {
            identity[i * r + i] = 1;
        }
        let gens: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                // s_i = I − α_i e_iᵀ
                let mut m = identity.clone();
                for row in 0..r {
                    m[row * r + i] -= self.simple_roots[i][row];
                }
                m
            })
            .collect();
        let mul = |a: &[i64], b: &[i64]| -> Vec<i64> {
            let mut c = vec![0i64; r * r];
            for i in 0..r {
                for k in 0..r {
                    let aik = a[i * r + k];
                    if aik != 0 {
                        for j in 0..r {
                            c[i * r + j] += aik * b[k * r + j];
                        }
                    }
                }
            }
            c
        };
        let mut elements = vec![WeylElement {
            matrix: identity,
            rank: r,
            length: 0,
        }];
        let mut index: HashMap<Weight, usize> = HashMap::new();
        index.insert(self.rho.clone(), 0);
        let mut frontier = 0;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            for g in &gens {
                let m = mul(g, &current.matrix);
                let cand = WeylElement {
                    matrix: m,
                    rank: r,
                    length: current.length + 1,
                };
                let image = cand.apply(&self.rho);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(image) {
                    e.insert(elements.len());
                    elements.push(cand);
                }
            }
            frontier += 1;
        }
        let neg_rho = -&self.rho;
        let longest = index[&neg_rho];
        WeylGroup { elements, longest }
    }

    /// Weyl dimension formula, computed exactly. Fails on non-dominant input.
    pub fn dim(&self, lambda: &Weight) -> Result<u128> {
        self.check_weight(lambda)?;
        if !lambda.is_dominant() {
            return invalid(format!("dim: {lambda} is not dominant"));
        }
        let shifted = lambda + &self.rho;
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for root in &self.positive_roots {
            // (λ+ρ|α)/(ρ|α) = ⟨λ+ρ, α^∨⟩/⟨ρ, α^∨⟩
            let a = shifted.pair(&root.coroot) as u128;
            let b = self.rho.pair(&root.coroot) as u128;
            num = num.checked_mul(a).ok_or(Error::BoundExceeded {
                what: "Weyl dimension numerator",
                value: u128::MAX,
                bound: u128::MAX,
            })?;
            den *= b;
            let g = num_integer::gcd(num, den);
            num /= g;
            den /= g;
        }
        if den != 1 {
            return Err(Error::Consistency(format!("dim({lambda}) is not integral")));
        }
        Ok(num)
    }

    /// Exports the descriptor used for debugging and golden files.
    pub fn descriptor(&self) -> RootSystemDescriptor {
        RootSystemDescriptor {
            family: self.family,
            rank: self.rank,
            h_dual: self.dual_coxeter,
            gram: self
                .gram
                .iter()
                .map(|row| row.iter().map(rational::format_rational).collect())
                .collect(),
            rho: self.rho.clone(),
            theta: self.theta.clone(),
        }
    }
}

/// JSON form `{family, rank, h_dual, gram, rho, theta}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemDescriptor {
    pub family: Family,
    pub rank: usize,
    pub h_dual: i64,
    pub gram: Vec<Vec<String>>,
    pub rho: Weight,
    pub theta: Weight,
}

impl RootSystemDescriptor {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Rebuilds the root system and checks that the descriptor matches it.
    pub fn resolve(&self) -> Result<RootSystem> {
        let rs = RootSystem::new(self.family, self.rank)?;
        let mut gram = Vec::with_capacity(self.gram.len());
        for row in &self.gram {
            gram.push(
                row.iter()
                    .map(|s| rational::parse_rational(s))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        if rs.dual_coxeter != self.h_dual
            || gram != rs.gram
            || rs.rho != self.rho
            || rs.theta != self.theta
        {
            return invalid(format!(
                "descriptor for {}_{} does not match the constructed root system",
                self.family, self.rank
            ));
        }
        Ok(rs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(c: &[i64]) -> Weight {
        Weight::new(c.to_vec())
    }

    #[test]
    fn a1_basics() {
        let rs = RootSystem::new(Family::A, 1).unwrap();
        assert_eq!(rs.dual_coxeter(), 2);
        assert_eq!(rs.positive_roots().len(), 1);
        assert_eq!(rs.rho().coords(), &[1]);
        assert_eq!(rs.theta().coords(), &[2]);
        // (ρ|θ) = 1
        assert_eq!(rs.inner_product(rs.rho(), rs.theta()), Rational::one());
        assert_eq!(rs.pairing(&w(&[5]), 0), 5);
    }

    #[test]
    fn family_invariants_sweep() {
        for (fam, lo) in [(Family::A, 1), (Family::B, 2), (Family::C, 2), (Family::D, 3)] {
            for rank in lo..=6 {
                let rs = RootSystem::new(fam, rank).unwrap();
                for i in 0..rank {
                    assert_eq!(rs.pairing(rs.rho(), i), 1);
                }
                assert_eq!(rs.theta_pairing(rs.theta()), 2);
                assert_eq!(rs.dual_coxeter(), 1 + rs.theta_pairing(rs.rho()));
                assert_eq!(rs.dim(&rs.zero()).unwrap(), 1);
                // gram symmetric, positive on each basis vector
                for i in 0..rank {
                    for j in 0..rank {
                        assert_eq!(rs.gram()[i][j], rs.gram()[j][i]);
                    }
                    assert!(rs.gram()[i][i] > Rational::zero());
                }
                if rank <= 4 {
                    assert_eq!(rs.weyl_group().len() as u64, rs.weyl_order());
                }
            }
        }
    }

    #[test]
    fn gram_is_positive_definite() {
        // Sylvester: leading principal minors positive, computed via rational elimination.
        for (fam, rank) in [(Family::A, 4), (Family::B, 3), (Family::C, 4), (Family::D, 5)] {
            let rs = RootSystem::new(fam, rank).unwrap();
            let mut a: Vec<Vec<Rational>> = rs.gram().to_vec();
            for k in 0..rank {
                assert!(a[k][k] > Rational::zero(), "{fam}{rank} minor {k}");
                for i in k + 1..rank {
                    let f = a[i][k] / a[k][k];
                    for j in k..rank {
                        let v = a[k][j];
                        a[i][j] -= f * v;
                    }
                }
            }
        }
    }

    #[test]
    fn type_c_gram_is_min_over_two() {
        for n in 2..=5 {
            let rs = RootSystem::new(Family::C, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expected = Rational::new((i.min(j) + 1) as i64, 2);
                    assert_eq!(rs.gram()[i][j], expected);
                }
            }
            assert_eq!(rs.dual_coxeter(), n as i64 + 1);
            // θ = 2ω_1 (long root 2e_1), θ^∨ pairing is the sum of coordinates
            assert_eq!(rs.theta_coroot(), vec![1; n].as_slice());
        }
    }

    #[test]
    fn type_d_theta_coroot_is_e1_plus_e2() {
        // In orthogonal coordinates λ_1 + λ_2 = ω-coords (1,2,...,2,1,1).
        let rs = RootSystem::new(Family::D, 5).unwrap();
        assert_eq!(rs.theta_coroot(), &[1, 2, 2, 1, 1]);
        assert_eq!(rs.dual_coxeter(), 8);
        let rs = RootSystem::new(Family::B, 4).unwrap();
        assert_eq!(rs.theta_coroot(), &[1, 2, 2, 1]);
        assert_eq!(rs.dual_coxeter(), 7);
    }

    #[test]
    fn unsupported_ranks_rejected() {
        assert!(RootSystem::new(Family::A, 0).is_err());
        assert!(RootSystem::new(Family::B, 1).is_err());
        assert!(RootSystem::new(Family::C, 1).is_err());
        let err = RootSystem::new(Family::D, 2).unwrap_err().to_string();
        assert!(err.contains("rank >= 3"), "{err}");
    }

    #[test]
    fn fold_finite_examples() {
        let rs = RootSystem::new(Family::A, 1).unwrap();
        assert_eq!(rs.fold_finite(&w(&[3])), (w(&[3]), 1));
        assert_eq!(rs.fold_finite(&w(&[-2])), (w(&[0]), -1));
        assert_eq!(rs.fold_finite(&w(&[-1])).1, 0);
        let rs = RootSystem::new(Family::A, 2).unwrap();
        // s_1(λ+ρ) − ρ for λ = 0 gives −α_1
        let minus_alpha = -&rs.simple_roots()[0];
        assert_eq!(rs.fold_finite(&minus_alpha), (w(&[0, 0]), -1));
    }

    #[test]
    fn fold_finite_reflection_flips_sign() {
        let rs = RootSystem::new(Family::B, 3).unwrap();
        let x = w(&[2, -3, 1]);
        let (mu, s) = rs.fold_finite(&x);
        for i in 0..3 {
            // x' = s_i(x+ρ) − ρ
            let mut y = &x + rs.rho();
            rs.reflect(&mut y, i);
            let xi = &y - rs.rho();
            let (mu2, s2) = rs.fold_finite(&xi);
            assert_eq!(mu2, mu);
            assert_eq!(s2, -s);
        }
        // idempotent on dominant output
        if s != 0 {
            assert_eq!(rs.fold_finite(&mu), (mu.clone(), 1));
        }
    }

    #[test]
    fn longest_element_sends_rho_to_minus_rho() {
        for (fam, rank) in [(Family::A, 3), (Family::C, 3), (Family::D, 4)] {
            let rs = RootSystem::new(fam, rank).unwrap();
            let w0 = rs.weyl_group().longest();
            assert_eq!(w0.apply(rs.rho()), -rs.rho());
            assert_eq!(w0.length, rs.positive_roots().len());
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let rs = RootSystem::new(Family::C, 3).unwrap();
        let json = rs.descriptor().to_json().unwrap();
        assert!(json.contains("\"gram\":[[\"1/2\",\"1/2\",\"1/2\"]"), "{json}");
        let back = RootSystemDescriptor::from_json(&json).unwrap();
        assert_eq!(back, rs.descriptor());
        let rebuilt = back.resolve().unwrap();
        assert_eq!(rebuilt.dual_coxeter(), 4);
        let mut tampered = back.clone();
        tampered.h_dual = 9;
        assert!(tampered.resolve().is_err());
    }
}
