//! Smale's lower bound and the cup-length count behind it.
//!
//! Generators `g_{m,k}` (`m >= 1`, `k >= 0`) square to zero, and a product of
//! distinct generators survives while `sum (m_i + k_i) <= log2 d`. The cup
//! length is therefore the largest number of distinct pairs whose weights
//! fit in that budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(log2 d)^(2/3) - 1`.
pub fn smale_bound(d: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::BoundUndefined(d));
    }
    let l = (d as f64).log2();
    Ok((l * l).cbrt() - 1.0)
}

/// Number of pairs `(m, k)` with `m >= 1`, `k >= 0`, `m + k <= n`.
pub fn pairs_within_weight(n: u64) -> u64 {
    n * (n + 1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct GeneratorPair {
    pub m: u32,
    pub k: u32,
}

impl From<(u32, u32)> for GeneratorPair {
    fn from((m, k): (u32, u32)) -> Self {
        Self { m, k }
    }
}

impl From<GeneratorPair> for (u32, u32) {
    fn from(g: GeneratorPair) -> Self {
        (g.m, g.k)
    }
}

impl GeneratorPair {
    pub fn weight(self) -> u32 {
        self.m + self.k
    }

    /// Cohomological degree `2^k * 2^(m-1)`.
    pub fn cohomology_degree(self) -> u64 {
        1u64 << (self.m - 1 + self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CupLengthCertificate {
    pub d: u64,
    /// `log2 d`; only its floor constrains integer weights.
    pub budget: f64,
    pub pairs: Vec<GeneratorPair>,
    pub total_weight: u32,
    pub cardinality: usize,
    pub smale_bound: f64,
}

impl CupLengthCertificate {
    pub fn cohomology_degrees(&self) -> Vec<u64> {
        self.pairs.iter().map(|g| g.cohomology_degree()).collect()
    }

    /// Re-check distinctness, the weight budget and the stored totals.
    pub fn is_valid(&self) -> bool {
        let mut sorted = self.pairs.clone();
        sorted.sort();
        sorted.dedup();
        let total: u32 = self.pairs.iter().map(|g| g.weight()).sum();
        sorted.len() == self.pairs.len()
            && self.pairs.iter().all(|g| g.m >= 1)
            && total == self.total_weight
            && total as u64 <= self.d.ilog2() as u64
            && self.cardinality == self.pairs.len()
    }
}

/// Largest set of distinct pairs within the budget `floor(log2 d)`, built by
/// taking weight-1 pairs, then weight-2 pairs, and so on, ascending `m`
/// within a weight.
pub fn max_cup_length(d: u64) -> Result<CupLengthCertificate> {
    let bound = smale_bound(d)?;
    let budget = d.ilog2();
    let mut pairs = Vec::new();
    let mut total = 0;
    'outer: for w in 1..=budget {
        for m in 1..=w {
            if total + w > budget {
                break 'outer;
            }
            pairs.push(GeneratorPair { m, k: w - m });
            total += w;
        }
    }
    Ok(CupLengthCertificate {
        d,
        budget: (d as f64).log2(),
        cardinality: pairs.len(),
        pairs,
        total_weight: total,
        smale_bound: bound,
    })
}

/// Whether the greedy cup length reaches `(log2 d)^(2/3)`.
pub fn verify_lemma_claim(d: u64) -> Result<bool> {
    let cert = max_cup_length(d)?;
    let l = (d as f64).log2();
    Ok(cert.cardinality as f64 >= (l * l).cbrt())
}
