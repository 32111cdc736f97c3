use rand::Rng;
use serde::Serialize;

use super::{mean_se, monte_carlo, root_density, solve_fixed_point, Population};
use crate::offspring::{check_unimodular_pair, OffspringDistribution};
use crate::rng::Domain;
use crate::{Error, FloatScalar, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureFormula {
    General,
    ErdosRenyi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub x: f64,
    pub value: f64,
    #[serde(rename = "stderr")]
    pub standard_error: f64,
    pub formula: PressureFormula,
}

impl PressureEstimate {
    /// `log x <= p <= log x + (mean_degree / 2) log(1 + 1/x^2)`, allowing
    /// `k` standard errors.
    pub fn within_bounds(&self, mean_degree: f64, k: f64) -> bool {
        let slack = k * self.standard_error + 1e-12;
        let lo = self.x.ln();
        let hi = lo + 0.5 * mean_degree * (1.0 / (self.x * self.x)).ln_1p();
        self.value >= lo - slack && self.value <= hi + slack
    }
}

/// Per-draw terms of the general pressure formula:
/// `a_j = log(x + sum_{i<=D} X_i / x)` with `D ~ P`, and
/// `b_j = log(1 + X_1 X_2 / x^2)`. Draw `j` depends only on `(seed, j)` and
/// the pool, so terms at two activities can be paired.
pub struct PressureTerms {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub half_mean_degree: f64,
}

impl PressureTerms {
    fn estimate(&self, x: f64) -> PressureEstimate {
        let c = self.half_mean_degree;
        let (a, a_se) = mean_se(self.a.iter().copied());
        let (b, b_se) = mean_se(self.b.iter().copied());
        PressureEstimate {
            x,
            value: a - c * b,
            standard_error: (a_se * a_se + c * c * b_se * b_se).sqrt(),
            formula: PressureFormula::General,
        }
    }
}

fn sample_pool<F: FloatScalar>(pop: &Population<F>, rng: &mut impl Rng) -> f64 {
    pop.samples()[rng.gen_range(0..pop.len())].to_f64().unwrap()
}

pub fn pressure_general_terms<F: FloatScalar>(
    root_law: &OffspringDistribution,
    rho: &OffspringDistribution,
    pop: &Population<F>,
    m: usize,
    seed: u64,
) -> Result<PressureTerms> {
    check_unimodular_pair(root_law, rho)?;
    let x = pop.activity().to_f64().unwrap();
    let pairs = monte_carlo(m, seed, Domain::Pressure, 0, |rng| {
        let d = root_law.sample(rng);
        let sum: f64 = (0..d).map(|_| sample_pool(pop, rng)).sum();
        let a = (x + sum / x).ln();
        let (x1, x2) = (sample_pool(pop, rng), sample_pool(pop, rng));
        (a, (x1 * x2 / (x * x)).ln_1p())
    });
    let (a, b) = pairs.into_iter().unzip();
    Ok(PressureTerms { a, b, half_mean_degree: 0.5 * root_law.mean() })
}

/// `E[log(x + sum_{i<=D} X_i / x)] - (mean(P)/2) E[log(1 + X_1 X_2 / x^2)]`.
/// The pair must be unimodular.
pub fn pressure_general<F: FloatScalar>(
    root_law: &OffspringDistribution,
    rho: &OffspringDistribution,
    pop: &Population<F>,
    m: usize,
    seed: u64,
) -> Result<PressureEstimate> {
    let terms = pressure_general_terms(root_law, rho, pop, m, seed)?;
    Ok(terms.estimate(pop.activity().to_f64().unwrap()))
}

/// Erdős–Rényi form `-E[log(Y/x)] - (c/2) E[log(1 + Y_1 Y_2 / x^2)]`.
///
/// For `P = rho = Poisson(c)` the root variable `Y` has the law of the
/// cavity variable itself, so `Y` is drawn straight from the pool.
pub fn pressure_er<F: FloatScalar>(c: f64, pop: &Population<F>, m: usize, seed: u64) -> Result<PressureEstimate> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c}")));
    }
    let x = pop.activity().to_f64().unwrap();
    let pairs = monte_carlo(m, seed, Domain::PressureEr, 0, |rng| {
        let y = sample_pool(pop, rng);
        let (y1, y2) = (sample_pool(pop, rng), sample_pool(pop, rng));
        (-(y / x).ln(), (y1 * y2 / (x * x)).ln_1p())
    });
    let (a, a_se) = mean_se(pairs.iter().map(|p| p.0));
    let (b, b_se) = mean_se(pairs.iter().map(|p| p.1));
    let h = 0.5 * c;
    Ok(PressureEstimate {
        x,
        value: a - h * b,
        standard_error: (a_se * a_se + h * h * b_se * b_se).sqrt(),
        formula: PressureFormula::ErdosRenyi,
    })
}

/// Central difference of the general pressure against `E[Y]/x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub x: f64,
    pub h: f64,
    pub finite_difference: f64,
    pub finite_difference_se: f64,
    pub density_over_x: f64,
    pub density_over_x_se: f64,
    pub z_score: f64,
}

/// Solves pools at `x - h`, `x` and `x + h` to depth `depth` with a shared
/// seed, so the pools and the pressure draws at `x +- h` are coupled and the
/// difference quotient is estimated from paired per-draw terms.
#[allow(clippy::too_many_arguments)]
pub fn pressure_derivative_check(
    root_law: &OffspringDistribution,
    rho: &OffspringDistribution,
    x: f64,
    h: f64,
    n: usize,
    depth: usize,
    m: usize,
    seed: u64,
) -> Result<DerivativeCheck> {
    if !(h > 0.0 && h < x) {
        return Err(Error::InvalidParameter(format!("step h = {h} must lie in (0, x)")));
    }
    let pool = |x: f64| solve_fixed_point::<f64>(rho, x, n, depth, f64::NEG_INFINITY, seed).map(|run| run.last().clone());
    let (lo, mid, hi) = (pool(x - h)?, pool(x)?, pool(x + h)?);
    let minus = pressure_general_terms(root_law, rho, &lo, m, seed)?;
    let plus = pressure_general_terms(root_law, rho, &hi, m, seed)?;
    let c = plus.half_mean_degree;
    let diffs = (0..m).map(|j| ((plus.a[j] - minus.a[j]) - c * (plus.b[j] - minus.b[j])) / (2.0 * h));
    let (finite_difference, finite_difference_se) = mean_se(diffs);
    let density = root_density(root_law, &mid, m, seed);
    let density_over_x = density.mean / x;
    let density_over_x_se = density.standard_error / x;
    let se = finite_difference_se.hypot(density_over_x_se);
    Ok(DerivativeCheck {
        x,
        h,
        finite_difference,
        finite_difference_se,
        density_over_x,
        density_over_x_se,
        z_score: z_score(finite_difference - density_over_x, se),
    })
}

/// Monte-Carlo check of
/// `E[S / (x + S)] = mean(P) E[t / (1 + t)]` with `S = sum_{i<=D} X_i / x`,
/// `D ~ P`, and `t = X_1 X_2 / x^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnimodularityCheck {
    pub x: f64,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    pub z_score: f64,
}

pub fn unimodularity_identity_check<F: FloatScalar>(
    root_law: &OffspringDistribution,
    rho: &OffspringDistribution,
    pop: &Population<F>,
    m: usize,
    seed: u64,
) -> Result<UnimodularityCheck> {
    check_unimodular_pair(root_law, rho)?;
    let x = pop.activity().to_f64().unwrap();
    let mean_degree = root_law.mean();
    let pairs = monte_carlo(m, seed, Domain::Unimodular, 0, |rng| {
        let d = root_law.sample(rng);
        let s: f64 = (0..d).map(|_| sample_pool(pop, rng)).sum::<f64>() / x;
        let t = sample_pool(pop, rng) * sample_pool(pop, rng) / (x * x);
        (s / (x + s), mean_degree * t / (1.0 + t))
    });
    let (lhs, lhs_se) = mean_se(pairs.iter().map(|p| p.0));
    let (rhs, rhs_se) = mean_se(pairs.iter().map(|p| p.1));
    Ok(UnimodularityCheck { x, lhs, lhs_se, rhs, rhs_se, z_score: z_score(lhs - rhs, lhs_se.hypot(rhs_se)) })
}

/// `diff / se`; a zero-variance comparison is 0 when the values agree to
/// rounding and infinite otherwise.
pub(crate) fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}
