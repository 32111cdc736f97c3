use serde::Serialize;

use super::{iterate_population, mean_se, Population};
use crate::offspring::OffspringDistribution;
use crate::{Error, Result};

/// Decay of the coupled difference between the constant-one and
/// constant-zero pools, per double step, against `mean(rho)^2 / x^4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub x: f64,
    /// Geometric mean of `D(t+2) / D(t)` over the double steps measured,
    /// `D(t)` being the mean absolute difference at depth `t`.
    pub empirical_rate: f64,
    pub standard_error: f64,
    pub bound: f64,
    pub double_steps: usize,
    /// `D(t)` for `t = 0, 1, ..`.
    pub differences: Vec<f64>,
}

/// Runs both pools for up to `steps` generations with shared draws. Double
/// steps are measured while `D` stays above `floor` (relative to `D(0) = 1`).
pub fn contraction_diagnostic(
    rho: &OffspringDistribution,
    x: f64,
    n: usize,
    steps: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if steps < 2 {
        return Err(Error::InvalidParameter("need at least two steps".into()));
    }
    const FLOOR: f64 = 1e-12;
    let mut hi = Population::constant(x, n, 1.0)?;
    let mut lo = Population::constant(x, n, 0.0)?;
    let mut diffs = vec![1.0];
    let mut ses = vec![0.0];
    for _ in 0..steps {
        hi = iterate_population(&hi, rho, seed);
        lo = iterate_population(&lo, rho, seed);
        let (d, se) = mean_se(hi.samples().iter().zip(lo.samples()).map(|(a, b)| (a - b).abs()));
        diffs.push(d);
        ses.push(se);
        if d < FLOOR {
            break;
        }
    }
    // log-ratios over double steps t -> t+2, starting from t = 0
    let mut log_sum = 0.0;
    let mut var_sum = 0.0;
    let mut double_steps = 0;
    let mut t = 0;
    while t + 2 < diffs.len() && diffs[t] >= FLOOR {
        if diffs[t + 2] == 0.0 {
            // exact collapse
            return Ok(ContractionReport {
                x,
                empirical_rate: 0.0,
                standard_error: 0.0,
                bound: rho.mean().powi(2) / x.powi(4),
                double_steps: double_steps + 1,
                differences: diffs,
            });
        }
        log_sum += (diffs[t + 2] / diffs[t]).ln();
        var_sum += (ses[t + 2] / diffs[t + 2]).powi(2) + (ses[t] / diffs[t]).powi(2);
        double_steps += 1;
        t += 2;
    }
    if double_steps == 0 && diffs.last() == Some(&0.0) {
        // collapsed within the first double step
        return Ok(ContractionReport {
            x,
            empirical_rate: 0.0,
            standard_error: 0.0,
            bound: rho.mean().powi(2) / x.powi(4),
            double_steps: 1,
            differences: diffs,
        });
    }
    if double_steps == 0 {
        return Err(Error::InvalidParameter("difference vanished before a double step".into()));
    }
    let rate = (log_sum / double_steps as f64).exp();
    Ok(ContractionReport {
        x,
        empirical_rate: rate,
        standard_error: rate * var_sum.sqrt() / double_steps as f64,
        bound: rho.mean().powi(2) / x.powi(4),
        double_steps,
        differences: diffs,
    })
}
