//! Approximate edge-cover counting by a telescoping product of marginals.
//!
//! With edges `e_1 < … < e_m` and `G_1 = G`, `G_i = G_{i-1} - e_{i-1}` minus
//! whichever endpoints of `e_{i-1}` are still present,
//! `Z(G) = 1 / Π (1 - P(G_i, e_i))`. Replacing each `P` by its truncated
//! estimate at depth `ceil(log2(6m / ε))` keeps the product within a factor
//! `1 ± ε` of the true count.

use rayon::prelude::*;
use thiserror::Error;

use crate::estimator::{estimate_marginal_traced, Depth, EstimateError, NodeCounter};
use crate::graph::{EdgeId, Graph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

/// Target relative error, strictly inside `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Accuracy(f64);

impl Accuracy {
    pub fn new(epsilon: f64) -> Result<Self, CountError> {
        if epsilon > 0.0 && epsilon < 1.0 {
            Ok(Self(epsilon))
        } else {
            Err(CountError::BadEpsilon(epsilon))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

/// `ceil(log2 m + log2(6 / ε))`, computed as one logarithm.
pub fn depth_for(m: usize, accuracy: Accuracy) -> Depth {
    let m = m.max(1) as f64;
    Depth((6.0 * m / accuracy.0).log2().ceil() as i64)
}

/// One factor of the telescoping product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeMarginal {
    pub edge: EdgeId,
    pub estimate: f64,
    /// Computation-tree nodes expanded for this marginal.
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxCount {
    pub value: f64,
    /// Natural log of `value`; `-inf` when there are no covers.
    pub log_value: f64,
    pub depth_used: Depth,
    pub epsilon: f64,
    pub marginals: Vec<EdgeMarginal>,
    pub vertices: usize,
    pub edges: usize,
    /// Set when some vertex has no incident edge, so the count is 0.
    pub isolated: bool,
}

impl ApproxCount {
    pub fn nodes_expanded(&self) -> u64 {
        self.marginals.iter().map(|m| m.nodes).sum()
    }

    pub fn max_nodes_per_marginal(&self) -> u64 {
        self.marginals.iter().map(|m| m.nodes).max().unwrap_or(0)
    }
}

/// The elimination chain `[(G_1, e_1), …, (G_m, e_m)]`. It depends only on the
/// edge order, never on marginal values.
pub fn elimination_chain(g: &Graph) -> Vec<(Graph, EdgeId)> {
    let order = g.edge_ids();
    let mut chain = Vec::with_capacity(order.len());
    let mut work = g.clone();
    for (i, &e) in order.iter().enumerate() {
        if i + 1 < order.len() {
            let next = {
                let mut next = work.clone();
                next.remove_edge_and_endpoints_in_place(e)
                    .expect("edge ids come from the graph itself");
                next
            };
            chain.push((std::mem::replace(&mut work, next), e));
        } else {
            chain.push((std::mem::take(&mut work), e));
        }
    }
    chain
}

/// Approximates |EC(G)| within a factor `1 ± ε`.
pub fn estimate_count(g: &Graph, accuracy: Accuracy) -> Result<ApproxCount, CountError> {
    let depth = depth_for(g.edge_count(), accuracy);
    let mut count = estimate_count_at_depth(g, depth)?;
    count.epsilon = accuracy.0;
    Ok(count)
}

/// The telescoping product with every marginal truncated at `depth`.
///
/// Marginals along the chain are evaluated in parallel on the current rayon
/// pool and multiplied in edge order, so the result does not depend on the
/// number of threads. The product is kept as a mantissa in `[1/2, 1)` and a
/// binary exponent, which cannot underflow and makes a factor of exactly 1/2
/// an exact shift.
pub fn estimate_count_at_depth(g: &Graph, depth: Depth) -> Result<ApproxCount, CountError> {
    let mut result = ApproxCount {
        value: 0.0,
        log_value: f64::NEG_INFINITY,
        depth_used: depth,
        epsilon: f64::NAN,
        marginals: Vec::new(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        isolated: g.has_isolated_vertex(),
    };
    if result.isolated {
        return Ok(result);
    }

    let marginals = elimination_chain(g)
        .into_par_iter()
        .map(|(gi, ei)| {
            let mut counter = NodeCounter::default();
            let p = estimate_marginal_traced(&gi, ei, depth, &mut counter)?;
            Ok(EdgeMarginal {
                edge: ei,
                estimate: p.value(),
                nodes: counter.0,
            })
        })
        .collect::<Result<Vec<_>, EstimateError>>()?;

    let mut mantissa = 1.0f64;
    let mut exponent = 0i32;
    for m in &marginals {
        // 1 - p >= 1/2, so one doubling restores the range.
        mantissa *= 1.0 - m.estimate;
        if mantissa < 0.5 {
            mantissa *= 2.0;
            exponent -= 1;
        }
    }
    // Z = 1 / (mantissa * 2^exponent)
    result.log_value = -(mantissa.ln() + exponent as f64 * std::f64::consts::LN_2);
    result.value = scale_by_power_of_two(1.0 / mantissa, -exponent);
    result.marginals = marginals;
    Ok(result)
}

fn scale_by_power_of_two(x: f64, k: i32) -> f64 {
    // powi of 2 is exact inside the normal range; split to stay inside it.
    let mut x = x;
    let mut k = k;
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    x * 2f64.powi(k)
}
