//! Root system combinatorics for the simple Lie algebras.
//!
//! Everything downstream (phase spaces, rank certificates, invariant
//! families) is driven by the data assembled here: the Cartan matrix, the
//! positive roots as integer vectors over the simple roots, the height
//! profile d_k, and the exponents.
//!
//! Enumeration is type-uniform: the root set is the reflection closure of
//! the simple roots under the simple reflections read off the Cartan
//! matrix. The classical per-type root listings are used as independent
//! test oracles, not as the construction.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven families of simple Lie algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        match c.to_ascii_uppercase() {
            'A' => Some(Family::A),
            'B' => Some(Family::B),
            'C' => Some(Family::C),
            'D' => Some(Family::D),
            'E' => Some(Family::E),
            'F' => Some(Family::F),
            'G' => Some(Family::G),
            _ => None,
        }
    }
}

/// A validated (family, rank) pair naming a simple Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraType {
    family: Family,
    rank: usize,
}

impl AlgebraType {
    /// Validates the family/rank combination.
    ///
    /// Accepted ranks: A ℓ≥1, B ℓ≥2, C ℓ≥2, D ℓ≥3 (D_3 ≅ A_3 is allowed
    /// and useful for cross-checks), E ℓ∈{6,7,8}, F ℓ=4, G ℓ=2.
    pub fn new(family: Family, rank: usize) -> Result<AlgebraType> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !ok {
            let reason = match family {
                Family::A => "rank must be >= 1",
                Family::B | Family::C => "rank must be >= 2",
                Family::D => "rank must be >= 3",
                Family::E => "rank must be 6, 7, or 8",
                Family::F => "rank must be 4",
                Family::G => "rank must be 2",
            };
            return Err(Error::InvalidAlgebra {
                family: family.letter(),
                rank,
                reason: reason.to_string(),
            });
        }
        Ok(AlgebraType { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// dim g from the classical formulas; cross-checked in tests against
    /// the enumeration count ℓ + 2|Φ₊|.
    pub fn dim(&self) -> usize {
        let l = self.rank;
        match self.family {
            Family::A => l * l + 2 * l,
            Family::B | Family::C => 2 * l * l + l,
            Family::D => 2 * l * l - l,
            Family::E => match l {
                6 => 78,
                7 => 133,
                _ => 248,
            },
            Family::F => 52,
            Family::G => 14,
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(self.family, Family::A | Family::B | Family::C | Family::D)
    }

    /// Cartan matrix with the convention c_{ij} = α_i(h_j), in the
    /// standard (Bourbaki) node numbering.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        fn link(c: &mut [Vec<i64>], i: usize, j: usize, cij: i64, cji: i64) {
            c[i][j] = cij;
            c[j][i] = cji;
        }
        let l = self.rank;
        let mut c = vec![vec![0i64; l]; l];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        match self.family {
            Family::A => {
                for i in 0..l.saturating_sub(1) {
                    link(&mut c, i, i + 1, -1, -1);
                }
            }
            Family::B => {
                // α_ℓ is the short root; the double edge points at it.
                for i in 0..l - 2 {
                    link(&mut c, i, i + 1, -1, -1);
                }
                link(&mut c, l - 2, l - 1, -2, -1);
            }
            Family::C => {
                // Dual of B: α_ℓ is the long root.
                for i in 0..l - 2 {
                    link(&mut c, i, i + 1, -1, -1);
                }
                link(&mut c, l - 2, l - 1, -1, -2);
            }
            Family::D => {
                // Chain 1..ℓ-1 with the last node forking off node ℓ-2.
                for i in 0..l - 2 {
                    link(&mut c, i, i + 1, -1, -1);
                }
                link(&mut c, l - 3, l - 1, -1, -1);
            }
            Family::E => {
                // Chain 1-3-4-5-6(-7)(-8) with node 2 attached to node 4.
                let chain: &[usize] = match l {
                    6 => &[0, 2, 3, 4, 5],
                    7 => &[0, 2, 3, 4, 5, 6],
                    _ => &[0, 2, 3, 4, 5, 6, 7],
                };
                for w in chain.windows(2) {
                    link(&mut c, w[0], w[1], -1, -1);
                }
                link(&mut c, 1, 3, -1, -1);
            }
            Family::F => {
                link(&mut c, 0, 1, -1, -1);
                link(&mut c, 1, 2, -2, -1);
                link(&mut c, 2, 3, -1, -1);
            }
            Family::G => {
                link(&mut c, 0, 1, -1, -3);
            }
        }
        c
    }
}

impl fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

/// A root written in the basis of simple roots: α = Σ a_i α_i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub coeffs: Vec<i64>,
}

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Root {
        Root { coeffs }
    }

    /// Height |α| = Σ a_i (the paper calls it the length of the root).
    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&a| a >= 0) && self.coeffs.iter().any(|&a| a > 0)
    }

    pub fn negated(&self) -> Root {
        Root::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

/// Complete root-system data for one simple algebra.
///
/// Serializes to JSON for the CLI; deserialization is intentionally not
/// offered because the membership index is derived state.
#[derive(Debug, Clone, Serialize)]
pub struct RootSystem {
    algebra: AlgebraType,
    cartan: Vec<Vec<i64>>,
    /// Positive roots ordered by height, then reverse-lexicographic on
    /// coeffs so the simple roots appear as α_1, …, α_ℓ.
    positives: Vec<Root>,
    /// d_k = number of positive roots of height k, for k = 1..=m_ℓ.
    heights: Vec<usize>,
    /// Exponents m_1 ≤ … ≤ m_ℓ, computed as the dual partition of d.
    exponents: Vec<usize>,
    /// The highest root β (unique root of maximal height m_ℓ).
    longest: Root,
    #[serde(skip)]
    index: HashMap<Vec<i64>, usize>,
}

impl RootSystem {
    /// Enumerates the root system of the given type.
    ///
    /// The full root set is the saturation of the simple roots under the
    /// simple reflections s_j(α) = α − α(h_j) α_j, with α(h_j) read off
    /// the Cartan matrix. Positives are the members with nonnegative
    /// coordinates.
    pub fn build(algebra: AlgebraType) -> Result<RootSystem> {
        let l = algebra.rank();
        let cartan = algebra.cartan_matrix();

        let mut all: HashSet<Vec<i64>> = HashSet::new();
        let mut work: Vec<Vec<i64>> = Vec::new();
        for i in 0..l {
            let mut v = vec![0i64; l];
            v[i] = 1;
            all.insert(v.clone());
            work.push(v);
        }
        while let Some(a) = work.pop() {
            for j in 0..l {
                // α(h_j) = Σ_i a_i c_{ij}
                let pairing: i64 = (0..l).map(|i| a[i] * cartan[i][j]).sum();
                let mut r = a.clone();
                r[j] -= pairing;
                if !all.contains(&r) {
                    all.insert(r.clone());
                    work.push(r);
                }
            }
        }

        let mut positives: Vec<Root> = all
            .iter()
            .filter(|v| v.iter().all(|&a| a >= 0))
            .map(|v| Root::new(v.clone()))
            .collect();
        positives.sort_by(|p, q| p.height().cmp(&q.height()).then(q.coeffs.cmp(&p.coeffs)));

        // Sanity: the closure must split exactly into Φ₊ ∪ −Φ₊.
        if 2 * positives.len() != all.len() {
            return Err(Error::Internal(format!(
                "reflection closure of {algebra} has {} elements but {} positives",
                all.len(),
                positives.len()
            )));
        }
        let expected_pos = (algebra.dim() - l) / 2;
        if positives.len() != expected_pos {
            return Err(Error::Internal(format!(
                "{algebra}: enumerated {} positive roots, dimension formula requires {}",
                positives.len(),
                expected_pos
            )));
        }

        let m_top = positives.last().map(|r| r.height()).unwrap_or(0) as usize;
        let mut heights = vec![0usize; m_top];
        for r in &positives {
            heights[(r.height() - 1) as usize] += 1;
        }
        let top_count = *heights.last().unwrap_or(&0);
        if top_count != 1 {
            return Err(Error::Internal(format!(
                "{algebra}: {top_count} roots of maximal height, expected a unique highest root"
            )));
        }
        let longest = positives.last().unwrap().clone();
        let exponents = exponents_from_heights(&heights)?;

        let index = positives
            .iter()
            .enumerate()
            .map(|(i, r)| (r.coeffs.clone(), i))
            .collect();

        Ok(RootSystem {
            algebra,
            cartan,
            positives,
            heights,
            exponents,
            longest,
            index,
        })
    }

    pub fn algebra(&self) -> AlgebraType {
        self.algebra
    }

    pub fn rank(&self) -> usize {
        self.algebra.rank()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// c_{ij} = α_i(h_j).
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positives(&self) -> &[Root] {
        &self.positives
    }

    pub fn n_positive(&self) -> usize {
        self.positives.len()
    }

    /// Height profile d_1..d_{m_ℓ}; `heights()[k-1]` is d_k.
    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn d(&self, k: usize) -> usize {
        self.heights[k - 1]
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    /// The largest exponent m_ℓ = height of the highest root.
    pub fn m_top(&self) -> usize {
        self.heights.len()
    }

    pub fn longest(&self) -> &Root {
        &self.longest
    }

    /// Index of a positive root in the canonical order, if present.
    pub fn position_of(&self, coeffs: &[i64]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    pub fn is_positive_root(&self, coeffs: &[i64]) -> bool {
        self.index.contains_key(coeffs)
    }

    /// Evaluates α(h_j) for a root given by coefficients.
    pub fn pairing(&self, coeffs: &[i64], j: usize) -> i64 {
        (0..self.rank())
            .map(|i| coeffs[i] * self.cartan[i][j])
            .sum()
    }

    /// Indices (into `positives`) of the roots of height k.
    pub fn roots_of_height(&self, k: usize) -> Vec<usize> {
        self.positives
            .iter()
            .enumerate()
            .filter(|(_, r)| r.height() as usize == k)
            .map(|(i, _)| i)
            .collect()
    }

    /// All ways to peel a simple root off a height-(k+1) root: triples
    /// (β, γ, p) with β = γ + α_p, β of height k+1, γ of height k.
    ///
    /// Every height-(k+1) root admits at least one such splitting; the
    /// method errors if the enumeration ever violates that.
    pub fn root_sum_decompositions(&self, k: usize) -> Result<Vec<(usize, usize, usize)>> {
        let max = self.m_top().saturating_sub(1);
        if k < 1 || k > max {
            return Err(Error::LevelOutOfRange { k, max });
        }
        let mut out = Vec::new();
        for b in self.roots_of_height(k + 1) {
            let beta = &self.positives[b];
            let mut found = false;
            for p in 0..self.rank() {
                let mut g = beta.coeffs.clone();
                g[p] -= 1;
                if g.iter().all(|&a| a >= 0) {
                    if let Some(gi) = self.position_of(&g) {
                        out.push((b, gi, p));
                        found = true;
                    }
                }
            }
            if !found {
                return Err(Error::Internal(format!(
                    "root {:?} of height {} has no simple-root splitting",
                    beta.coeffs,
                    k + 1
                )));
            }
        }
        Ok(out)
    }
}

/// Exponents as the dual partition of the height profile: m appears with
/// multiplicity d_m − d_{m+1} (with d_{m_ℓ+1} := 0). Output ascending.
pub fn exponents_from_heights(d: &[usize]) -> Result<Vec<usize>> {
    if d.is_empty() {
        return Err(Error::InvalidInput("empty height profile".to_string()));
    }
    for w in d.windows(2) {
        if w[1] > w[0] {
            return Err(Error::InvalidInput(format!(
                "height profile not weakly decreasing: {d:?}"
            )));
        }
    }
    let mut exps = Vec::new();
    for (i, &dk) in d.iter().enumerate() {
        let next = if i + 1 < d.len() { d[i + 1] } else { 0 };
        for _ in 0..dk - next {
            exps.push(i + 1);
        }
    }
    exps.sort_unstable();
    Ok(exps)
}
