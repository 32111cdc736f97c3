//! Offspring laws on the nonnegative integers.
//!
//! Every law is held as a finite pmf table. Poisson and geometric laws are
//! cut where the remaining tail mass drops below [`TAIL_MASS`] and then
//! renormalized; sampling is by inversion of the cumulative table, so draws
//! depend only on the uniform stream and not on any library sampler.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const TAIL_MASS: f64 = 1e-14;
/// Tolerance on the total mass of an explicit pmf.
pub const PMF_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance used when checking that `(P, rho)` is a unimodular pair.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OffspringKind {
    Poisson { mean: f64 },
    Fixed { k: usize },
    /// Number of failures before the first success: `p (1 - p)^k`.
    Geometric { p: f64 },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringDistribution {
    kind: OffspringKind,
    pmf: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
    mean: f64,
}

impl OffspringDistribution {
    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean >= 0.0) {
            return Err(Error::InvalidDistribution(format!("poisson mean {mean}")));
        }
        if mean == 0.0 {
            return Ok(Self::build(OffspringKind::Poisson { mean }, vec![1.0], 0.0));
        }
        let ln_c = mean.ln();
        let mut ln_p = -mean;
        let mut pmf = vec![ln_p.exp()];
        let mut k = 0usize;
        loop {
            k += 1;
            ln_p += ln_c - (k as f64).ln();
            let p = ln_p.exp();
            pmf.push(p);
            let kf = k as f64;
            // Remaining tail after k is bounded by a geometric series with ratio c/(k+2).
            if kf + 2.0 > mean && p * (mean / (kf + 1.0)) / (1.0 - mean / (kf + 2.0)) < TAIL_MASS {
                break;
            }
        }
        Ok(Self::build(OffspringKind::Poisson { mean }, pmf, mean))
    }

    pub fn fixed(k: usize) -> Self {
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        Self::build(OffspringKind::Fixed { k }, pmf, k as f64)
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidDistribution(format!("geometric p = {p}")));
        }
        if p == 1.0 {
            return Ok(Self::build(OffspringKind::Geometric { p }, vec![1.0], 0.0));
        }
        let q = 1.0 - p;
        let mut pmf = Vec::new();
        let mut term = p;
        let mut tail = 1.0;
        while tail >= TAIL_MASS {
            pmf.push(term);
            tail *= q;
            term *= q;
        }
        Ok(Self::build(OffspringKind::Geometric { p }, pmf, q / p))
    }

    /// Explicit pmf `pmf[k] = P(k)`; must be nonnegative and sum to one.
    pub fn explicit(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidDistribution("empty pmf".into()));
        }
        if let Some(p) = pmf.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("pmf entry {p}")));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("pmf sums to {total}")));
        }
        let mut pmf = pmf;
        while pmf.len() > 1 && pmf[pmf.len() - 1] == 0.0 {
            pmf.pop();
        }
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        Ok(Self::build(OffspringKind::Explicit, pmf, mean))
    }

    fn build(kind: OffspringKind, mut pmf: Vec<f64>, mean: f64) -> Self {
        let total: f64 = pmf.iter().sum();
        if !matches!(kind, OffspringKind::Explicit) {
            pmf.iter_mut().for_each(|p| *p /= total);
        }
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for p in &pmf {
            acc += p;
            cdf.push(acc);
        }
        OffspringDistribution { kind, pmf, cdf, mean }
    }

    pub fn kind(&self) -> &OffspringKind {
        &self.kind
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    /// Largest value with nonzero table mass.
    pub fn truncation_point(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn second_moment(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| (k * k) as f64 * p).sum()
    }

    pub fn is_deterministic(&self) -> Option<usize> {
        match self.kind {
            OffspringKind::Fixed { k } => Some(k),
            _ => None,
        }
    }

    /// Inversion sampling; fixed laws consume no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if let OffspringKind::Fixed { k } = self.kind {
            return k;
        }
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c <= u).min(self.pmf.len() - 1)
    }

    /// Size-biased shift `rho_k = (k + 1) P_{k+1} / mean(P)`.
    pub fn unimodular_offspring(&self) -> Result<Self> {
        if !(self.mean > 0.0) {
            return Err(Error::ZeroMean);
        }
        match self.kind {
            OffspringKind::Poisson { mean } => return Self::poisson(mean),
            OffspringKind::Fixed { k } => return Ok(Self::fixed(k - 1)),
            _ => {}
        }
        let mut rho: Vec<f64> =
            (1..self.pmf.len()).map(|k| k as f64 * self.pmf[k] / self.mean).collect();
        let total: f64 = rho.iter().sum();
        rho.iter_mut().for_each(|p| *p /= total);
        Self::explicit(rho)
    }

    /// Same law as an explicit table.
    pub fn to_explicit(&self) -> Self {
        Self::build(OffspringKind::Explicit, self.pmf.clone(), self.mean)
    }
}

/// Total-variation distance between two laws on the nonnegative integers.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    0.5 * (0..len)
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Checks `rho` is the unimodular offspring law of `p`; returns the TV gap.
///
/// When `p` is concentrated at 0 the tree is a lone root and `rho` never
/// matters, so any `rho` is accepted.
pub fn check_unimodular_pair(p: &OffspringDistribution, rho: &OffspringDistribution) -> Result<f64> {
    if p.mean() == 0.0 {
        return Ok(0.0);
    }
    let expected = p.unimodular_offspring()?;
    let tv = total_variation(expected.pmf(), rho.pmf());
    if tv > UNIMODULAR_TOLERANCE {
        return Err(Error::NotUnimodular { tv });
    }
    Ok(tv)
}

impl fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OffspringKind::Poisson { mean } => write!(f, "poisson:{mean}"),
            OffspringKind::Fixed { k } => write!(f, "fixed:{k}"),
            OffspringKind::Geometric { p } => write!(f, "geom:{p}"),
            OffspringKind::Explicit => {
                let entries: Vec<String> = self.pmf.iter().map(|p| p.to_string()).collect();
                write!(f, "pmf:[{}]", entries.join(","))
            }
        }
    }
}

/// Parses `poisson:c`, `fixed:k`, `geom:p` or `pmf:FILE`.
///
/// A pmf file holds the probabilities `P(0), P(1), ...` as a JSON array or
/// separated by commas/whitespace. `pmf:[a,b,...]` is accepted inline.
impl FromStr for OffspringDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected NAME:VALUE, got {s:?}")))?;
        let number = |a: &str| a.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{a:?}: {e}")));
        match name.trim() {
            "poisson" => Self::poisson(number(arg)?),
            "fixed" => arg
                .trim()
                .parse::<usize>()
                .map(Self::fixed)
                .map_err(|e| Error::Parse(format!("{arg:?}: {e}"))),
            "geom" | "geometric" => Self::geometric(number(arg)?),
            "pmf" => {
                let text = if arg.trim_start().starts_with('[') {
                    arg.to_string()
                } else {
                    std::fs::read_to_string(arg.trim())?
                };
                Self::explicit(parse_pmf_text(&text)?)
            }
            other => Err(Error::Parse(format!("unknown distribution {other:?}"))),
        }
    }
}

fn parse_pmf_text(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect()
}
