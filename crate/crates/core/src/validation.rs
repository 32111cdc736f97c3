//! Self-check suites behind `monodimer validate`.
//!
//! Each suite runs a fixed battery of cases derived from one seed and reports
//! its case count, the documented minimum, and every failure with the seed
//! needed to reproduce it.

use rand::Rng;
use serde::Serialize;

use crate::exact::{
    enumerate_matchings, marginals, monomer_density, pressure_bounds, pressure_per_particle, ActivityWeights,
    ExactModel, MatchingPolynomial,
};
use crate::fixed_point::{pressure_er, pressure_general, solve_fixed_point, Population};
use crate::graph::generators::{all_connected_graphs, gnp, random_connected, random_tree};
use crate::graph::{sample_galton_watson, Graph};
use crate::offspring::OffspringDistribution;
use crate::rng::{stream, Domain, StreamRng};
use crate::tree::{
    correlation_sign_report, localisation_bounds, regular_tree_fixed_point, truncated_sequence,
    tree_fundamental_check, ProbeSelection,
};
use crate::{Complex, Rational, Result};

pub const SUITES: &[&str] = &[
    "oracle",
    "recursions",
    "identities",
    "complex",
    "truncation",
    "localisation",
    "appendix",
    "fixed-point",
    "pressure",
];

#[derive(Debug, Clone, Default)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Suite names to run; empty runs all.
    pub suites: Vec<String>,
    /// Negates every covariance before the sign check (negative control).
    pub inject_sign_flip: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub case: String,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub minimum_cases: usize,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

struct Suite {
    name: &'static str,
    minimum: usize,
    seed: u64,
    cases: usize,
    failures: Vec<Failure>,
}

impl Suite {
    fn new(name: &'static str, minimum: usize, seed: u64) -> Self {
        Suite { name, minimum, seed, cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, case: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure { case: case(), seed: self.seed, detail: detail() });
        }
    }

    fn error(&mut self, case: String, err: crate::Error) {
        self.cases += 1;
        self.failures.push(Failure { case, seed: self.seed, detail: err.to_string() });
    }

    fn finish(self) -> SuiteReport {
        let passed = self.failures.is_empty() && self.cases >= self.minimum;
        SuiteReport {
            name: self.name.to_string(),
            cases: self.cases,
            minimum_cases: self.minimum,
            failures: self.failures,
            passed,
        }
    }
}

pub fn run(options: &ValidationOptions) -> Result<ValidationReport> {
    let wanted = |name: &str| options.suites.is_empty() || options.suites.iter().any(|s| s == name);
    for s in &options.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(crate::Error::InvalidParameter(format!("unknown suite {s:?}")));
        }
    }
    let seed = options.seed;
    let mut suites = Vec::new();
    if wanted("oracle") {
        suites.push(oracle(seed));
    }
    if wanted("recursions") {
        suites.push(recursions(seed));
    }
    if wanted("identities") {
        suites.push(identities(seed));
    }
    if wanted("complex") {
        suites.push(complex(seed));
    }
    if wanted("truncation") {
        suites.push(truncation(seed));
    }
    if wanted("localisation") {
        suites.push(localisation(seed));
    }
    if wanted("appendix") {
        suites.push(appendix(seed, options.inject_sign_flip));
    }
    if wanted("fixed-point") {
        suites.push(fixed_point(seed));
    }
    if wanted("pressure") {
        suites.push(pressure(seed));
    }
    let passed = suites.iter().all(|s| s.passed);
    Ok(ValidationReport { seed, suites, passed })
}

fn rng(seed: u64, index: u64) -> StreamRng {
    stream(seed, Domain::Validation, index)
}

/// Connected graphs on up to five vertices plus random graphs up to `max_n`.
fn graph_sample(seed: u64, random: usize, max_n: usize) -> Vec<Graph> {
    let mut graphs = all_connected_graphs(5);
    let mut r = rng(seed, 1);
    for _ in 0..random {
        let n = r.gen_range(1..=max_n);
        graphs.push(gnp(n, r.gen_range(0.1..0.6), &mut r));
    }
    graphs
}

fn describe(g: &Graph) -> String {
    format!("n={} edges={:?}", g.vertex_count(), g.edges())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn oracle(seed: u64) -> SuiteReport {
    let mut s = Suite::new("oracle", 500, seed);
    for g in graph_sample(seed, 60, 10) {
        let matchings = match enumerate_matchings(&g) {
            Ok(m) => m,
            Err(e) => {
                s.error(describe(&g), e);
                continue;
            }
        };
        let poly = MatchingPolynomial::of(&g).expect("within cap");
        let counted = MatchingPolynomial::from_matchings(g.vertex_count(), &matchings);
        s.check(poly == counted, || describe(&g), || format!("{:?} vs {:?}", poly.coefficients(), counted.coefficients()));
        for x in [0.3, 1.0, 2.0] {
            let w = ActivityWeights::uniform(&g, x);
            let brute: f64 = matchings.iter().map(|m| m.weight(&w)).sum();
            let z = ExactModel::new(&g, w).unwrap().partition_function();
            s.check(rel_close(z, brute, 1e-12), || format!("{} x={x}", describe(&g)), || format!("{z} vs {brute}"));
        }
    }
    s.finish()
}

/// Both cavity recursions at vertex `o`, relative error.
pub fn recursion_errors(model: &mut ExactModel<f64>, g: &Graph, o: usize, x: f64) -> (f64, f64) {
    let full = model.full_mask();
    let r = model.monomer_probability_in(full, o);
    let without_o = full & !(1 << o);
    let x2 = x * x;
    let s1: f64 = g.neighbors(o).map(|v| model.monomer_probability_in(without_o, v)).sum();
    let r1 = x2 / (x2 + s1);
    let mut s2 = 0.0;
    for v in g.neighbors(o) {
        let rest = without_o & !(1 << v);
        let inner: f64 = g.neighbors(v).filter(|&u| u != o).map(|u| model.monomer_probability_in(rest, u)).sum();
        s2 += 1.0 / (x2 + inner);
    }
    let r2 = 1.0 / (1.0 + s2);
    ((r - r1).abs() / r, (r - r2).abs() / r)
}

fn recursions(seed: u64) -> SuiteReport {
    let mut s = Suite::new("recursions", 500, seed);
    for g in graph_sample(seed, 60, 10) {
        for x in [0.3, 1.0, 2.0] {
            let mut model = ExactModel::uniform(&g, x).unwrap();
            for o in 0..g.vertex_count() {
                let (e1, e2) = recursion_errors(&mut model, &g, o, x);
                s.check(e1 < 1e-12 && e2 < 1e-12, || format!("{} o={o} x={x}", describe(&g)), || format!("errors {e1:e} {e2:e}"));
            }
        }
    }
    s.finish()
}

fn identities(seed: u64) -> SuiteReport {
    let mut s = Suite::new("identities", 300, seed);
    let graphs = graph_sample(seed, 60, 12);
    for g in graphs.iter().filter(|g| g.vertex_count() > 0) {
        for x in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let m = marginals(g, x).unwrap();
            let n = g.vertex_count() as f64;
            let sum = m.monomer.iter().sum::<f64>() / n + 2.0 * m.dimer.iter().sum::<f64>() / n;
            s.check((sum - 1.0).abs() < 1e-12, || format!("sum rule {} x={x}", describe(g)), || format!("{sum}"));
            let p = pressure_per_particle(g, x).unwrap();
            let (lo, hi) = pressure_bounds(g, x).unwrap();
            s.check(p >= lo - 1e-12 && p <= hi + 1e-12, || format!("pressure {} x={x}", describe(g)), || format!("{lo} <= {p} <= {hi}"));
            let h = 1e-6 * x;
            let fd = x * (pressure_per_particle(g, x + h).unwrap() - pressure_per_particle(g, x - h).unwrap()) / (2.0 * h);
            let eps = monomer_density(g, x).unwrap();
            s.check((fd - eps).abs() < 1e-6, || format!("derivative {} x={x}", describe(g)), || format!("{fd} vs {eps}"));
        }
    }
    // Z(x, w) = w^(|V|/2) Z(x / sqrt w, 1)
    let mut r = rng(seed, 2);
    for g in graphs.iter().take(200) {
        let (x, w): (f64, f64) = (r.gen_range(0.1..3.0), r.gen_range(0.1..3.0));
        let weighted = ActivityWeights { vertex: vec![x; g.vertex_count()], edge: vec![w; g.edge_count()] };
        let lhs = ExactModel::new(g, weighted).unwrap().partition_function();
        let rhs = w.powf(g.vertex_count() as f64 / 2.0) * ExactModel::uniform(g, x / w.sqrt()).unwrap().partition_function();
        s.check(rel_close(lhs, rhs, 1e-12), || format!("scaling {} x={x} w={w}", describe(g)), || format!("{lhs} vs {rhs}"));
    }
    s.finish()
}

fn complex(seed: u64) -> SuiteReport {
    let mut s = Suite::new("complex", 1000, seed);
    let mut r = rng(seed, 3);
    for i in 0..50 {
        let n = r.gen_range(1..=12);
        let g: Graph = gnp(n, r.gen_range(0.1..0.6), &mut r);
        for _ in 0..20 {
            let z = Complex::new(r.gen_range(1e-3..=3.0), r.gen_range(-5.0..5.0));
            let mut model = ExactModel::uniform(&g, z).unwrap();
            for o in 0..n {
                let rz = model.monomer_probability(o).unwrap();
                let ok = rz.norm() <= z.norm() / z.re * (1.0 + 1e-12) && (rz / z).re > 0.0;
                s.check(ok, || format!("graph {i} {} z={z} o={o}", describe(&g)), || format!("R={rz}"));
            }
        }
    }
    s.finish()
}

fn truncation(seed: u64) -> SuiteReport {
    let mut s = Suite::new("truncation", 60, seed);
    let p = OffspringDistribution::poisson(2.0).unwrap();
    for i in 0..20 {
        let t = match sample_galton_watson(&p, &p, 10, seed.wrapping_add(i)) {
            Ok(t) => t,
            Err(e) => {
                s.error(format!("tree {i}"), e);
                continue;
            }
        };
        for x in [0.5, 1.0, 2.0] {
            let seq = truncated_sequence(&t, x, 10).unwrap();
            let v = seq.parity_violations();
            s.check(v.is_empty(), || format!("tree {i} x={x}"), || format!("{v:?}"));
        }
    }
    s.finish()
}

fn localisation(seed: u64) -> SuiteReport {
    let mut s = Suite::new("localisation", 200, seed);
    let mut r = rng(seed, 4);
    for i in 0..50 {
        let n = r.gen_range(2..=14);
        let g: Graph = random_connected(n, r.gen_range(0.0..0.3), &mut r);
        let x = r.gen_range(0.2..3.0);
        let exact = ExactModel::uniform(&g, x).unwrap().monomer_probabilities();
        for o in 0..n {
            for radius in 0..2 {
                let b = localisation_bounds(&g, o, radius, x).unwrap();
                let ok = b.lower.is_none_or(|l| l <= exact[o] + 1e-12) && b.upper.is_none_or(|u| exact[o] <= u + 1e-12);
                s.check(ok, || format!("graph {i} {} o={o} r={radius} x={x}", describe(&g)), || format!("{b:?} vs {}", exact[o]));
            }
        }
    }
    s.finish()
}

pub fn random_weighted_tree(n: usize, rng: &mut StreamRng) -> Graph<Rational> {
    let q = |rng: &mut StreamRng| Rational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=9).into());
    let t: Graph<Rational> = random_tree(n, rng);
    let x = (0..n).map(|_| q(rng)).collect();
    let w = (0..t.edge_count()).map(|_| q(rng)).collect();
    t.with_vertex_weights(x).unwrap().with_edge_weights(w).unwrap()
}

fn appendix(seed: u64, inject_sign_flip: bool) -> SuiteReport {
    let mut s = Suite::new("appendix", 1000, seed);
    let mut r = rng(seed, 5);
    for i in 0..20 {
        let n = r.gen_range(1..=10);
        let t = random_weighted_tree(n, &mut r);
        match correlation_sign_report(&t, &ProbeSelection::All) {
            Ok(records) => {
                for rec in records {
                    let cov = if inject_sign_flip { -rec.covariance.clone() } else { rec.covariance.clone() };
                    s.check(rec.expected.admits(&cov), || format!("tree {i} {:?}", rec.pair), || format!("cov {cov} expected {:?}", rec.expected));
                }
            }
            Err(e) => s.error(format!("tree {i}"), e),
        }
        for c0 in 0..n {
            for cl in 0..n {
                match tree_fundamental_check(&t, c0, cl) {
                    Ok(c) => s.check(c.holds, || format!("tree {i} c0={c0} cl={cl}"), || format!("l={} lhs={} rhs={}", c.l, c.lhs, c.rhs)),
                    Err(e) => s.error(format!("tree {i} c0={c0} cl={cl}"), e),
                }
            }
        }
    }
    s.finish()
}

fn fixed_point(seed: u64) -> SuiteReport {
    let mut s = Suite::new("fixed-point", 10, seed);
    for k in 1..=3 {
        for x in [0.5, 1.0, 2.0] {
            let rho = OffspringDistribution::fixed(k);
            let run = solve_fixed_point::<f64>(&rho, x, 1000, 400, 1e-13, seed).unwrap();
            let target = regular_tree_fixed_point(k, x);
            let e = (run.result.estimate - target).abs();
            s.check(e < 1e-9, || format!("fixed({k}) x={x}"), || format!("{} vs {target}", run.result.estimate));
        }
    }
    let run = solve_fixed_point::<f64>(&OffspringDistribution::fixed(0), 0.4, 1000, 4, 1e-12, seed).unwrap();
    s.check(run.result.estimate == 1.0, || "fixed(0)".into(), || format!("{}", run.result.estimate));
    s.finish()
}

fn pressure(seed: u64) -> SuiteReport {
    let mut s = Suite::new("pressure", 6, seed);
    let p = OffspringDistribution::poisson(2.0).unwrap();
    for x in [0.5, 1.0, 2.0] {
        let run = solve_fixed_point::<f64>(&p, x, 20_000, 40, 1e-3, seed).unwrap();
        let pop: &Population = run.last();
        let g = pressure_general(&p, &p, pop, 50_000, seed).unwrap();
        let e = pressure_er(2.0, pop, 50_000, seed).unwrap();
        let se = g.standard_error.hypot(e.standard_error);
        s.check((g.value - e.value).abs() <= 4.0 * se, || format!("two formulas x={x}"), || format!("{} vs {} (se {se})", g.value, e.value));
        s.check(g.within_bounds(2.0, 3.0) && e.within_bounds(2.0, 3.0), || format!("bounds x={x}"), || format!("{g:?} {e:?}"));
    }
    s.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appendix_negative_control_fails() {
        let opts = ValidationOptions { seed: 1, suites: vec!["appendix".into()], inject_sign_flip: true };
        let report = run(&opts).unwrap();
        assert!(!report.passed);
        let opts = ValidationOptions { inject_sign_flip: false, ..opts };
        assert!(run(&opts).unwrap().passed);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        let opts = ValidationOptions { suites: vec!["nope".into()], ..Default::default() };
        assert!(run(&opts).is_err());
    }
}
