//! Oracle-versus-estimator suites.
//!
//! Each suite walks a deterministic corpus, compares the estimator against the
//! exact oracle or against an analytic bound, and reports the number of checks,
//! the number of violations and the worst observation. Everything is seeded, so
//! a report can be replayed bit for bit.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{connected_graphs, random_corpus, RandomGraphParams};
use crate::counter::{estimate_count, Accuracy};
use crate::estimator::{dangling_combine, estimate_marginal, normal_combine, Depth};
use crate::graph::{EdgeKind, Endpoints, Graph, VertexId};
use crate::oracle::{CoverProfile, Oracle};

/// Float slack added to every analytic bound.
pub const BOUND_SLACK: f64 = 1e-9;
/// Allowed overshoot of an estimate above 1/2.
pub const HALF_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub random_graphs: usize,
    pub random_max_edges: usize,
    pub max_depth: i64,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub sensitivity_trials: usize,
    pub identity_instances: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_vertices: 7,
            max_edges: 12,
            random_graphs: 500,
            random_max_edges: 14,
            max_depth: 12,
            epsilons: vec![0.5, 0.2, 0.1],
            seed: 0,
            sensitivity_trials: 100_000,
            identity_instances: 200,
        }
    }
}

/// The single worst check of a suite: the one using the largest share of its
/// allowance `bound + slack`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub error: f64,
    pub bound: f64,
    pub slack: f64,
}

impl Observation {
    /// `error / (bound + slack)`; above 1 means a violation. A zero allowance
    /// scores 0 when met exactly and infinity otherwise.
    pub fn usage(&self) -> f64 {
        let allowance = self.bound + self.slack;
        if self.error.is_nan() {
            f64::INFINITY
        } else if allowance > 0.0 {
            self.error / allowance
        } else if self.error <= allowance {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub name: String,
    pub checks: u64,
    pub violations: u64,
    pub worst: Option<Observation>,
}

impl InvariantReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checks: 0,
            violations: 0,
            worst: None,
        }
    }

    /// Records one check of `error <= bound + slack`.
    pub fn record(&mut self, error: f64, bound: f64, slack: f64) {
        self.checks += 1;
        // NaN errors count as violations.
        if error.is_nan() || error > bound + slack {
            self.violations += 1;
        }
        let obs = Observation {
            error,
            bound,
            slack,
        };
        let worse = match self.worst {
            None => true,
            Some(w) => obs.usage() > w.usage(),
        };
        if worse {
            self.worst = Some(obs);
        }
    }

    /// Records a check that either holds or not, with no magnitude.
    pub fn record_exact(&mut self, holds: bool) {
        self.record(if holds { 0.0 } else { 1.0 }, 0.0, 0.0);
    }

    pub fn merge(mut self, other: InvariantReport) -> Self {
        self.checks += other.checks;
        self.violations += other.violations;
        self.worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(if b.usage() > a.usage() { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} checks={} violations={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.violations
        )?;
        if let Some(w) = self.worst {
            write!(
                f,
                " worst_error={:.3e} bound_there={:.3e}",
                w.error, w.bound
            )?;
        }
        Ok(())
    }
}

/// A corpus graph together with its exact cover profile.
#[derive(Clone, Debug)]
pub struct PreparedGraph {
    pub graph: Graph,
    pub profile: CoverProfile,
}

/// Exhaustive connected graphs followed by seeded random multigraphs.
pub fn standard_corpus(config: &VerifyConfig) -> Vec<PreparedGraph> {
    let params = RandomGraphParams {
        max_edges: config.random_max_edges,
        ..RandomGraphParams::default()
    };
    let mut graphs = connected_graphs(config.max_vertices, config.max_edges);
    graphs.extend(random_corpus(config.seed, config.random_graphs, &params));
    prepare(graphs)
}

pub fn prepare(graphs: Vec<Graph>) -> Vec<PreparedGraph> {
    let oracle = Oracle::default();
    graphs
        .into_par_iter()
        .map(|graph| {
            let profile = oracle
                .profile(&graph)
                .expect("corpus graphs fit the oracle");
            PreparedGraph { graph, profile }
        })
        .collect()
}

fn decay_bound(depth: i64) -> f64 {
    3.0 * 0.5f64.powi(depth as i32 + 1)
}

fn tight_bound(depth: i64) -> f64 {
    0.5f64.powi(depth as i32 + 1)
}

/// Reports for the decay bound, the tighter dangling/free bound and the
/// `[0, 1/2]` range, over every edge and every depth `0..=max_depth`.
pub fn decay_suite(corpus: &[PreparedGraph], max_depth: i64) -> [InvariantReport; 3] {
    let empty = || {
        [
            InvariantReport::new("decay-bound"),
            InvariantReport::new("decay-bound-dangling-free"),
            InvariantReport::new("half-bound"),
        ]
    };
    corpus
        .par_iter()
        .map(|prepared| {
            let [mut decay, mut tight, mut half] = empty();
            let g = &prepared.graph;
            for e in g.edge_ids() {
                let exact = prepared
                    .profile
                    .marginal(e)
                    .expect("corpus graphs have covers");
                let exact_value = exact.to_f64();
                half.record_exact(exact.is_at_most_half());
                let kind = g.classify(e).unwrap();
                for l in 0..=max_depth {
                    let est = estimate_marginal(g, e, Depth(l)).unwrap().value();
                    let err = (est - exact_value).abs();
                    decay.record(err, decay_bound(l), BOUND_SLACK);
                    if kind != EdgeKind::Normal {
                        tight.record(err, tight_bound(l), BOUND_SLACK);
                    }
                    half.record_exact((0.0..=0.5 + HALF_SLACK).contains(&est));
                }
            }
            [decay, tight, half]
        })
        .reduce(empty, |[a, b, c], [x, y, z]| {
            [a.merge(x), b.merge(y), c.merge(z)]
        })
}

/// Relative count error `|estimate / exact - 1| <= ε`, plus the range of every
/// marginal the counter produced.
pub fn fptas_suite(corpus: &[PreparedGraph], epsilon: f64) -> [InvariantReport; 2] {
    let accuracy = Accuracy::new(epsilon).expect("epsilon in (0, 1)");
    let empty = || {
        [
            InvariantReport::new(format!("fptas eps={epsilon}")),
            InvariantReport::new(format!("half-bound counter eps={epsilon}")),
        ]
    };
    corpus
        .par_iter()
        .map(|prepared| {
            let [mut rel, mut half] = empty();
            let approx = estimate_count(&prepared.graph, accuracy).unwrap();
            let exact = prepared.profile.total as f64;
            rel.record((approx.value / exact - 1.0).abs(), epsilon, 0.0);
            for m in &approx.marginals {
                half.record_exact((0.0..=0.5 + HALF_SLACK).contains(&m.estimate));
            }
            [rel, half]
        })
        .reduce(empty, |[a, b], [x, y]| [a.merge(x), b.merge(y)])
}

fn random_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(0.0..=0.5)).collect()
}

/// Either an independent point or a small perturbation of `x`, clamped to
/// `[0, 1/2]`.
fn perturb<R: Rng>(rng: &mut R, x: &[f64]) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        return random_point(rng, x.len());
    }
    let scale = 10f64.powi(-rng.gen_range(1..=8));
    x.iter()
        .map(|&v| (v + rng.gen_range(-scale..=scale)).clamp(0.0, 0.5))
        .collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `|f(x̂) - f(x)| <= min{1/2, d (1/2)^(d-1)} · max|x_i - x̂_i|` for the
/// dangling combinator, `d` in `0..=8`.
pub fn dangling_sensitivity(seed: u64, trials: usize) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd4a6_1e55);
    let mut report = InvariantReport::new("dangling-combine-sensitivity");
    for _ in 0..trials {
        let d = rng.gen_range(0..=8usize);
        let x = random_point(&mut rng, d);
        let x_hat = perturb(&mut rng, &x);
        let eps = max_gap(&x, &x_hat);
        let gain = if d == 0 {
            0.0
        } else {
            f64::min(0.5, d as f64 * 0.5f64.powi(d as i32 - 1))
        };
        let diff = (dangling_combine(&x_hat).unwrap() - dangling_combine(&x).unwrap()).abs();
        report.record(diff, gain * eps, BOUND_SLACK);
    }
    report
}

fn product(v: &[f64]) -> f64 {
    v.iter().product()
}

/// `|g(x̂, ŷ, ẑ) - g(x, y, z)| <= 3 · max coordinate gap` for the normal
/// combinator, with `d1, d2` in `0..=8`. When `d1 = 0` the recursion always
/// produces `Y = Z`, so those trials use `y = z` and `ŷ = ẑ`.
pub fn normal_sensitivity(seed: u64, trials: usize) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a3b_c0de);
    let mut report = InvariantReport::new("normal-combine-sensitivity");
    for _ in 0..trials {
        let d1 = rng.gen_range(0..=8usize);
        let d2 = rng.gen_range(0..=8usize);
        let x = random_point(&mut rng, d1);
        let y = random_point(&mut rng, d2);
        let x_hat = perturb(&mut rng, &x);
        let y_hat = perturb(&mut rng, &y);
        let (z, z_hat) = if d1 == 0 {
            (y.clone(), y_hat.clone())
        } else {
            let z = random_point(&mut rng, d2);
            let z_hat = perturb(&mut rng, &z);
            (z, z_hat)
        };
        let eps = max_gap(&x, &x_hat)
            .max(max_gap(&y, &y_hat))
            .max(max_gap(&z, &z_hat));
        let g = |x: &[f64], y: &[f64], z: &[f64]| {
            normal_combine(product(x), product(y), product(z)).unwrap()
        };
        let diff = (g(&x_hat, &y_hat, &z_hat) - g(&x, &y, &z)).abs();
        report.record(diff, 3.0 * eps, BOUND_SLACK);
    }
    report
}

/// Exact identities on seeded random multigraphs:
/// appending a free edge doubles the count, `Z(G) = Z(G - e) + Z(G - e - u - v)`
/// for every normal edge, and a disjoint single-edge component (normal or
/// dangling) leaves the count unchanged with marginal 0 for that edge.
pub fn identity_suite(seed: u64, instances: usize) -> [InvariantReport; 3] {
    let oracle = Oracle::default();
    let corpus = random_corpus(
        seed.wrapping_add(0x1de7),
        instances,
        &RandomGraphParams {
            max_edges: 12,
            ..RandomGraphParams::default()
        },
    );
    let mut doubling = InvariantReport::new("free-edge-doubling");
    let mut split = InvariantReport::new("split-identity");
    let mut forced = InvariantReport::new("forced-edges");
    for g in corpus {
        let base = oracle.count(&g).unwrap();

        let mut h = g.clone();
        h.add_free();
        doubling.record_exact(oracle.count(&h).unwrap().0 == &base.0 * 2u32);

        for (e, ends) in g.edges() {
            if let Endpoints::Normal(u, v) = ends {
                let minus = g.remove_edge(e).unwrap();
                let inner = minus.detach_vertex(u).unwrap().detach_vertex(v).unwrap();
                let sum = oracle.count(&minus).unwrap().0 + oracle.count(&inner).unwrap().0;
                split.record_exact(sum == base.0);
            }
        }

        let mut h = g.clone();
        let (a, b) = (h.add_vertex(), h.add_vertex());
        let normal = h.add_normal(a, b).unwrap();
        let c = h.add_vertex();
        let dangling = h.add_dangling(c).unwrap();
        forced.record_exact(oracle.count(&h).unwrap() == base);
        for e in [normal, dangling] {
            let exact = oracle.marginal(&h, e).unwrap();
            forced.record_exact(exact.to_f64() == 0.0);
            forced.record_exact(estimate_marginal(&h, e, Depth(3)).unwrap().value() == 0.0);
        }
        let mut lone = Graph::with_vertices(2);
        lone.add_normal(VertexId(0), VertexId(1)).unwrap();
        forced.record_exact(oracle.count(&lone).unwrap().0 == 1u32.into());
        let mut lone = Graph::with_vertices(1);
        lone.add_dangling(VertexId(0)).unwrap();
        forced.record_exact(oracle.count(&lone).unwrap().0 == 1u32.into());
    }
    [doubling, split, forced]
}

/// Runs every suite at `config`.
pub fn run_all(config: &VerifyConfig) -> Vec<InvariantReport> {
    let corpus = standard_corpus(config);
    let [decay, tight, half] = decay_suite(&corpus, config.max_depth);
    let mut half = half;
    let mut reports = vec![decay, tight];
    for &eps in &config.epsilons {
        let [rel, h] = fptas_suite(&corpus, eps);
        reports.push(rel);
        half = half.merge(h);
    }
    reports.push(half);
    reports.push(dangling_sensitivity(config.seed, config.sensitivity_trials));
    reports.push(normal_sensitivity(config.seed, config.sensitivity_trials));
    reports.extend(identity_suite(config.seed, config.identity_instances));
    reports
}
