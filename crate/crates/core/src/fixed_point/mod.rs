//! Population dynamics for the cavity equation `X = x^2 / (x^2 + sum_{i<=K} X_i)`,
//! `K ~ rho`, on Galton-Watson trees.
//!
//! Starting from the constant-one pool, the pool at depth `r` is the law of
//! the root probability of a `rho`-tree truncated at depth `r`. Even depths
//! bound the fixed point from above and odd depths from below.
//!
//! Randomness for generation `g` is drawn in fixed chunks of
//! [`CHUNK`] samples, chunk `j` using stream `(seed, g, j)`. Results therefore
//! do not depend on the number of threads, and two pools of equal size
//! iterated with the same seed see identical `K` and index draws (this is the
//! coupling used by [`contraction_diagnostic`]).

mod contraction;
mod pressure;

pub use contraction::{contraction_diagnostic, ContractionReport};
pub use pressure::{
    pressure_derivative_check, pressure_er, pressure_general, pressure_general_terms, unimodularity_identity_check,
    DerivativeCheck, PressureEstimate, PressureFormula, UnimodularityCheck,
};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::offspring::OffspringDistribution;
use crate::rng::{stream2, Domain, StreamRng};
use crate::{Error, FloatScalar, Result};

/// Samples per random stream.
pub const CHUNK: usize = 4096;
/// Default pool size.
pub const DEFAULT_POPULATION: usize = 100_000;
/// Default pool size for the bound curves.
pub const CURVE_POPULATION: usize = 10_000;
/// At or below this activity the contraction bound is useless and the
/// solver only reports a bracket.
pub const BRACKET_ONLY_ACTIVITY: f64 = 0.1;

/// A pool of samples of the cavity variable at a given depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<F = f64> {
    samples: Vec<F>,
    activity: F,
    depth: usize,
    constant_one_init: bool,
}

impl<F: FloatScalar> Population<F> {
    /// Depth-0 pool of `n` copies of `value` (1 is the isolated root).
    pub fn constant(x: F, n: usize, value: F) -> Result<Self> {
        check_float_activity(x)?;
        if n == 0 {
            return Err(Error::InvalidParameter("population size must be positive".into()));
        }
        if !(value >= F::zero() && value <= F::one()) {
            return Err(Error::InvalidParameter("initial value must lie in [0, 1]".into()));
        }
        Ok(Population { samples: vec![value; n], activity: x, depth: 0, constant_one_init: value == F::one() })
    }

    pub fn constant_one(x: F, n: usize) -> Result<Self> {
        Self::constant(x, n, F::one())
    }

    pub fn from_samples(x: F, samples: Vec<F>, depth: usize) -> Result<Self> {
        check_float_activity(x)?;
        if samples.is_empty() || samples.iter().any(|s| !(*s >= F::zero() && *s <= F::one())) {
            return Err(Error::InvalidParameter("samples must be nonempty and lie in [0, 1]".into()));
        }
        Ok(Population { samples, activity: x, depth, constant_one_init: false })
    }

    pub fn samples(&self) -> &[F] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn activity(&self) -> F {
        self.activity
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_constant_one_init(&self) -> bool {
        self.constant_one_init
    }

    /// Parity of the depth; with constant-one init, even pools are upper bounds.
    pub fn is_even(&self) -> bool {
        self.depth.is_multiple_of(2)
    }

    pub fn mean(&self) -> f64 {
        mean_se(self.samples.iter().map(|s| s.to_f64().unwrap())).0
    }

    /// Standard error of the pool mean.
    pub fn standard_error(&self) -> f64 {
        mean_se(self.samples.iter().map(|s| s.to_f64().unwrap())).1
    }

    fn draw(&self, rng: &mut StreamRng) -> F {
        self.samples[rng.gen_range(0..self.samples.len())]
    }

    /// `x^2 / (x^2 + X_1 + .. + X_k)` with the `X_i` drawn from the pool.
    fn push(&self, k: usize, rng: &mut StreamRng) -> F {
        let x2 = self.activity * self.activity;
        let mut sum = F::zero();
        for _ in 0..k {
            sum = sum + self.draw(rng);
        }
        x2 / (x2 + sum)
    }
}

fn check_float_activity<F: FloatScalar>(x: F) -> Result<()> {
    if x > F::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidActivity(format!("{x:?}")))
    }
}

/// Runs `f` on `m` draws, chunk `j` using stream `(seed, outer, j)`.
pub(crate) fn monte_carlo<T, G>(m: usize, seed: u64, domain: Domain, outer: u64, f: G) -> Vec<T>
where
    T: Send,
    G: Fn(&mut StreamRng) -> T + Sync,
{
    let chunks = m.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut rng = stream2(seed, domain, outer, j as u64);
            let len = CHUNK.min(m - j * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

pub(crate) fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let first = values.clone().next().unwrap();
    if values.clone().all(|v| v == first) {
        // keep degenerate (deterministic) cases exact
        return (first, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// One synchronized generation: every new sample uses its own `K ~ rho` and
/// `K` draws with replacement from the old pool.
pub fn iterate_population<F: FloatScalar>(pop: &Population<F>, rho: &OffspringDistribution, seed: u64) -> Population<F> {
    let generation = pop.depth as u64;
    let mut samples = vec![F::zero(); pop.len()];
    samples.par_chunks_mut(CHUNK).enumerate().for_each(|(j, chunk)| {
        let mut rng = stream2(seed, Domain::Population, generation, j as u64);
        for s in chunk {
            let k = rho.sample(&mut rng);
            *s = pop.push(k, &mut rng);
        }
    });
    Population { samples, activity: pop.activity, depth: pop.depth + 1, constant_one_init: pop.constant_one_init }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceStatus {
    Converged,
    /// `r_max` reached with the gap still above tolerance.
    MaxDepth,
    /// Small activity: only the bracket is meaningful.
    BracketOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub x: f64,
    pub mean_even: f64,
    pub mean_odd: f64,
    pub estimate: f64,
    pub gap: f64,
    /// `gap / 2` plus the larger pool standard error.
    pub uncertainty: f64,
    #[serde(rename = "N")]
    pub population_size: usize,
    pub depth: usize,
    pub seed: u64,
    pub status: ConvergenceStatus,
    /// Pool mean at every depth from 0.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// The result plus the final even and odd pools.
#[derive(Debug, Clone)]
pub struct FixedPointRun<F = f64> {
    pub result: FixedPointResult,
    pub even: Population<F>,
    pub odd: Population<F>,
}

impl<F: FloatScalar> FixedPointRun<F> {
    /// The deeper of the two final pools.
    pub fn last(&self) -> &Population<F> {
        if self.even.depth() > self.odd.depth() { &self.even } else { &self.odd }
    }
}

/// Iterates from the constant-one pool until the even/odd gap drops below
/// `tol` (checked from depth 2) or `r_max` is reached.
pub fn solve_fixed_point<F: FloatScalar>(
    rho: &OffspringDistribution,
    x: F,
    n: usize,
    r_max: usize,
    tol: f64,
    seed: u64,
) -> Result<FixedPointRun<F>> {
    if r_max < 2 {
        return Err(Error::InvalidParameter("r_max must be at least 2".into()));
    }
    let mut pop = Population::constant_one(x, n)?;
    let mut history = vec![pop.mean()];
    let mut even = pop.clone();
    let mut odd = pop.clone();
    let mut converged = false;
    while pop.depth() < r_max {
        pop = iterate_population(&pop, rho, seed);
        history.push(pop.mean());
        if pop.is_even() {
            even = pop.clone();
        } else {
            odd = pop.clone();
        }
        if pop.depth() >= 2 && even.mean() - odd.mean() < tol {
            converged = true;
            break;
        }
    }
    let (mean_even, mean_odd) = (even.mean(), odd.mean());
    let gap = mean_even - mean_odd;
    let x64 = x.to_f64().unwrap();
    let status = if x64 <= BRACKET_ONLY_ACTIVITY {
        ConvergenceStatus::BracketOnly
    } else if converged {
        ConvergenceStatus::Converged
    } else {
        ConvergenceStatus::MaxDepth
    };
    let result = FixedPointResult {
        x: x64,
        mean_even,
        mean_odd,
        estimate: 0.5 * (mean_even + mean_odd),
        gap,
        uncertainty: 0.5 * gap.abs() + even.standard_error().max(odd.standard_error()),
        population_size: n,
        depth: pop.depth(),
        seed,
        status,
        history,
    };
    Ok(FixedPointRun { result, even, odd })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub mean: f64,
    #[serde(rename = "stderr")]
    pub standard_error: f64,
}

/// Monte-Carlo `E[Y]`, `Y = x^2 / (x^2 + sum_{i<=D} X_i)` with `D ~ P` and
/// the `X_i` drawn from `pop`.
pub fn root_density<F: FloatScalar>(
    root_law: &OffspringDistribution,
    pop: &Population<F>,
    m: usize,
    seed: u64,
) -> DensityEstimate {
    root_density_at(root_law, pop, m, seed, 0)
}

fn root_density_at<F: FloatScalar>(
    root_law: &OffspringDistribution,
    pop: &Population<F>,
    m: usize,
    seed: u64,
    outer: u64,
) -> DensityEstimate {
    let ys = monte_carlo(m, seed, Domain::RootPush, outer, |rng| {
        let d = root_law.sample(rng);
        pop.push(d, rng).to_f64().unwrap()
    });
    let (mean, standard_error) = mean_se(ys.iter().copied());
    DensityEstimate { mean, standard_error }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub x: f64,
    pub r: usize,
    pub parity: Parity,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(r: usize) -> Self {
        if r.is_multiple_of(2) { Parity::Even } else { Parity::Odd }
    }
}

/// Depth-`r` bounds on the limiting density: the depth-`(r-1)` pool pushed
/// through the root law, i.e. the root of `T(P, rho, r)`. Even `r` gives
/// upper bounds, odd `r` lower bounds. `m` root draws per entry.
pub fn bounds_curve(
    root_law: &OffspringDistribution,
    rho: &OffspringDistribution,
    x_grid: &[f64],
    r_list: &[usize],
    n: usize,
    m: usize,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    let r_max = r_list.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::with_capacity(x_grid.len() * r_list.len());
    for &x in x_grid {
        let mut pop = Population::constant_one(x, n)?;
        let mut by_depth = Vec::with_capacity(r_max + 1);
        for r in 0..=r_max {
            by_depth.push(if r == 0 {
                DensityEstimate { mean: 1.0, standard_error: 0.0 }
            } else {
                let est = root_density_at(root_law, &pop, m, seed, r as u64);
                pop = iterate_population(&pop, rho, seed);
                est
            });
        }
        for &r in r_list {
            let est = by_depth[r];
            rows.push(CurveRow { x, r, parity: Parity::of(r), mean: est.mean, stderr: est.standard_error });
        }
    }
    Ok(rows)
}

/// `start, start + step, ..` up to `stop` (inclusive, with slack for rounding).
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(start > 0.0) || stop < start {
        return Err(Error::InvalidParameter(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Default activity grid for the bound curves: 0.01, then 0.1 to 2 in steps of 0.1.
pub fn default_curve_grid() -> Vec<f64> {
    std::iter::once(0.01).chain((1..=20).map(|i| i as f64 / 10.0)).collect()
}
