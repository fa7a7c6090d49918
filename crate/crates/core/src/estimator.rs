//! Truncated computation-tree estimate of the probability that an edge is
//! left out of a uniformly random edge cover.
//!
//! The recursion has three cases. A free edge is omitted with probability
//! exactly 1/2. A dangling edge `e = (u, _)` with other edges `e_1 < … < e_d`
//! at `u` recurses on the chain `G_1 = G - e - u`, `G_i = G_{i-1} - e_{i-1}`,
//! where every `e_i` is dangling or free, and pays `ceil(log_6(d + 1))` units
//! of depth to do so. A normal edge `e = (u, v)` is expanded once into three
//! such chains inside `G - e - u - v` and combined with [`normal_combine`];
//! it does not consume depth. Any call reaching depth `<= 0` answers 1/2.
//!
//! Truncating at depth `L` moves a dangling or free marginal by at most
//! `(1/2)^(L+1)` and a normal one by at most `3 * (1/2)^(L+1)`.

use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::graph::{EdgeId, EdgeKind, Endpoints, Graph, GraphError, VertexId};

/// Slack for float rounding when checking combinator contracts.
const CONTRACT_TOLERANCE: f64 = 1e-12;

/// Branching budget used by the dangling recursion: a vertex with `d + 1`
/// incident edges costs `ceil(log_M(d + 1))` depth units.
pub const DEPTH_BASE: usize = 6;

/// Recursion depth. May go negative after a discount; the base case catches
/// every value `<= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Depth(pub i64);

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A truncated marginal. Always in `[0, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct MarginalEstimate(f64);

impl MarginalEstimate {
    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("combinator input {0} is outside [0, 1/2]")]
    InputOutOfRange(f64),
    #[error("normal combinator inputs X={x}, Y={y}, Z={z} violate X*Y - X - Z <= 0 with a denominator >= 1")]
    NormalContract { x: f64, y: f64, z: f64 },
    #[error("edge {0} is not dangling")]
    NotDangling(EdgeId),
    #[error("edge {0} is not normal")]
    NotNormal(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `(1 - Π) / (2 - Π)` where `Π` is the product of `ps` (1 when empty).
pub fn dangling_combine(ps: &[f64]) -> Result<f64, EstimateError> {
    let mut product = 1.0;
    for &p in ps {
        if !(0.0..=0.5).contains(&p) {
            return Err(EstimateError::InputOutOfRange(p));
        }
        product *= p;
    }
    Ok(combine_product(product))
}

/// `(1 - Π) / (2 - Π)` written as `a / (1 + a)` with `a = 1 - Π`, which
/// rounds to at most 1/2 for every `Π` in `[0, 1]`.
fn combine_product(product: f64) -> f64 {
    let a = 1.0 - product;
    a / (1.0 + a)
}

/// `1 - 1 / (2 + X*Y - X - Z)`.
///
/// Evaluated as `n / (1 + n)` with `n = (1 - Z) - X*(1 - Y)`. When `X = 1` and
/// `Y = Z` (no other edges at `u`) this gives exactly 0.
pub fn normal_combine(x: f64, y: f64, z: f64) -> Result<f64, EstimateError> {
    for v in [x, y, z] {
        if !(0.0..=1.0).contains(&v) {
            return Err(EstimateError::NormalContract { x, y, z });
        }
    }
    let numer = (1.0 - z) - x * (1.0 - y);
    if numer < -CONTRACT_TOLERANCE {
        return Err(EstimateError::NormalContract { x, y, z });
    }
    let numer = numer.max(0.0);
    Ok(numer / (1.0 + numer))
}

/// Smallest `k` with `6^k >= n`, for `n >= 1`.
fn ceil_log_base(n: usize) -> i64 {
    let mut k = 0;
    let mut power = 1usize;
    while power < n {
        power = power.saturating_mul(DEPTH_BASE);
        k += 1;
    }
    k
}

/// `L - ceil(log_6(d + 1))`.
pub fn depth_discount(depth: Depth, d: usize) -> Depth {
    Depth(depth.0 - ceil_log_base(d + 1))
}

/// `G - e - u` and the edges `e_1 < … < e_d` whose chain it starts.
struct DanglingPlan {
    base: Graph,
    others: Vec<EdgeId>,
}

fn dangling_plan(g: &Graph, e: EdgeId, u: VertexId) -> Result<DanglingPlan, GraphError> {
    let others: Vec<EdgeId> = g
        .incident_edges(u)?
        .iter()
        .copied()
        .filter(|&f| f != e)
        .collect();
    let mut base = g.clone();
    base.remove_edge_in_place(e)?;
    base.detach_vertex_in_place(u)?;
    Ok(DanglingPlan { base, others })
}

/// `G'' = G - e - u - v` with the edges at `u` (`e_i`) and at `v` (`f_i`).
///
/// A parallel edge between `u` and `v` shows up in both lists. Once every
/// `e_i` is conditioned to be absent such an edge is absent too, so its
/// factor in `Y` is exactly 1 and it is left out of `y_edges`.
struct NormalPlan {
    inner: Graph,
    at_u: Vec<EdgeId>,
    at_v: Vec<EdgeId>,
    y_edges: Vec<EdgeId>,
}

fn normal_plan(g: &Graph, e: EdgeId, u: VertexId, v: VertexId) -> Result<NormalPlan, GraphError> {
    let others = |w: VertexId| -> Result<Vec<EdgeId>, GraphError> {
        Ok(g.incident_edges(w)?
            .iter()
            .copied()
            .filter(|&f| f != e)
            .collect())
    };
    let at_u = others(u)?;
    let at_v = others(v)?;
    let y_edges = at_v
        .iter()
        .copied()
        .filter(|f| at_u.binary_search(f).is_err())
        .collect();
    let mut inner = g.clone();
    inner.remove_edge_in_place(e)?;
    inner.detach_vertex_in_place(u)?;
    inner.detach_vertex_in_place(v)?;
    Ok(NormalPlan {
        inner,
        at_u,
        at_v,
        y_edges,
    })
}

impl NormalPlan {
    /// Starting graph of the `Y` chain: `G''` without any `e_i`.
    fn y_base(&self) -> Result<Graph, GraphError> {
        let mut base = self.inner.clone();
        for &f in &self.at_u {
            base.remove_edge_in_place(f)?;
        }
        Ok(base)
    }
}

/// Visits `(G_1, f_1), (G_2, f_2), …` where `G_1 = start` and
/// `G_{i+1} = G_i - f_i`.
fn walk_chain<E, F>(mut work: Graph, edges: &[EdgeId], mut visit: F) -> Result<(), E>
where
    E: From<GraphError>,
    F: FnMut(&Graph, EdgeId) -> Result<(), E>,
{
    for (i, &f) in edges.iter().enumerate() {
        visit(&work, f)?;
        if i + 1 < edges.len() {
            work.remove_edge_in_place(f)?;
        }
    }
    Ok(())
}

fn materialize(start: Graph, edges: &[EdgeId]) -> Result<Vec<(Graph, EdgeId)>, GraphError> {
    let mut out = Vec::with_capacity(edges.len());
    walk_chain(start, edges, |h, f| {
        out.push((h.clone(), f));
        Ok::<_, GraphError>(())
    })?;
    Ok(out)
}

/// The chain `[(G_1, e_1), …, (G_d, e_d)]` for a dangling edge.
pub fn dangling_subinstances(g: &Graph, e: EdgeId) -> Result<Vec<(Graph, EdgeId)>, EstimateError> {
    match g.endpoints(e)? {
        Endpoints::Dangling(u) => {
            let plan = dangling_plan(g, e, u)?;
            Ok(materialize(plan.base, &plan.others)?)
        }
        _ => Err(EstimateError::NotDangling(e)),
    }
}

/// The three chains behind the `X`, `Y` and `Z` products of a normal edge.
#[derive(Clone, Debug)]
pub struct NormalSubinstances {
    /// `G''` itself.
    pub inner: Graph,
    pub x: Vec<(Graph, EdgeId)>,
    pub y: Vec<(Graph, EdgeId)>,
    pub z: Vec<(Graph, EdgeId)>,
}

/// For `e = (u, v)` with `u < v`: `x` walks the edges at `u` inside `G''`,
/// `z` walks the edges at `v` inside `G''`, and `y` walks the edges at `v`
/// inside `G''` with every edge at `u` already removed.
pub fn normal_subinstances(g: &Graph, e: EdgeId) -> Result<NormalSubinstances, EstimateError> {
    match g.endpoints(e)? {
        Endpoints::Normal(u, v) => {
            let plan = normal_plan(g, e, u, v)?;
            Ok(NormalSubinstances {
                x: materialize(plan.inner.clone(), &plan.at_u)?,
                y: materialize(plan.y_base()?, &plan.y_edges)?,
                z: materialize(plan.inner.clone(), &plan.at_v)?,
                inner: plan.inner,
            })
        }
        _ => Err(EstimateError::NotNormal(e)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Base,
    Free,
    Dangling,
    Normal,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Base => "base",
            Branch::Free => "free",
            Branch::Dangling => "dangling",
            Branch::Normal => "normal",
        }
    }
}

/// One node of the computation tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceNode {
    pub depth: Depth,
    pub edge: EdgeId,
    pub kind: EdgeKind,
    pub branch: Branch,
}

impl fmt::Display for TraceNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "depth={} edge={} kind={} branch={}",
            self.depth,
            self.edge,
            self.kind.code(),
            self.branch.name()
        )
    }
}

/// Observer called once per computation-tree node, in pre-order.
pub trait Tracer {
    fn visit(&mut self, node: &TraceNode);
}

/// Counts expanded nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeCounter(pub u64);

impl Tracer for NodeCounter {
    fn visit(&mut self, _: &TraceNode) {
        self.0 += 1;
    }
}

/// Writes one line per node. Write errors are ignored.
pub struct TraceWriter<W: Write>(pub W);

impl<W: Write> Tracer for TraceWriter<W> {
    fn visit(&mut self, node: &TraceNode) {
        let _ = writeln!(self.0, "{node}");
    }
}

impl<T: Tracer + ?Sized> Tracer for &mut T {
    fn visit(&mut self, node: &TraceNode) {
        (**self).visit(node)
    }
}

struct Silent;

impl Tracer for Silent {
    fn visit(&mut self, _: &TraceNode) {}
}

/// Truncated estimate of `P(G, e)` at depth `depth`.
pub fn estimate_marginal(
    g: &Graph,
    e: EdgeId,
    depth: Depth,
) -> Result<MarginalEstimate, EstimateError> {
    estimate_marginal_traced(g, e, depth, &mut Silent)
}

/// As [`estimate_marginal`], reporting every computation-tree node to `tracer`.
pub fn estimate_marginal_traced<T: Tracer + ?Sized>(
    g: &Graph,
    e: EdgeId,
    depth: Depth,
    tracer: &mut T,
) -> Result<MarginalEstimate, EstimateError> {
    recurse(g, e, depth, tracer).map(MarginalEstimate)
}

fn product_along<T: Tracer + ?Sized>(
    start: Graph,
    edges: &[EdgeId],
    depth: Depth,
    tracer: &mut T,
) -> Result<f64, EstimateError> {
    let mut product = 1.0;
    walk_chain(start, edges, |h, f| {
        product *= recurse(h, f, depth, tracer)?;
        Ok::<_, EstimateError>(())
    })?;
    Ok(product)
}

fn recurse<T: Tracer + ?Sized>(
    g: &Graph,
    e: EdgeId,
    depth: Depth,
    tracer: &mut T,
) -> Result<f64, EstimateError> {
    let ends = g.endpoints(e)?;
    let mut note = |branch| {
        tracer.visit(&TraceNode {
            depth,
            edge: e,
            kind: ends.kind(),
            branch,
        })
    };
    if depth.0 <= 0 {
        note(Branch::Base);
        return Ok(0.5);
    }
    match ends {
        Endpoints::Free => {
            note(Branch::Free);
            Ok(0.5)
        }
        Endpoints::Dangling(u) => {
            note(Branch::Dangling);
            let plan = dangling_plan(g, e, u)?;
            let child_depth = depth_discount(depth, plan.others.len());
            let product = product_along(plan.base, &plan.others, child_depth, tracer)?;
            Ok(combine_product(product))
        }
        Endpoints::Normal(u, v) => {
            note(Branch::Normal);
            let plan = normal_plan(g, e, u, v)?;
            let x = product_along(plan.inner.clone(), &plan.at_u, depth, tracer)?;
            let y = product_along(plan.y_base()?, &plan.y_edges, depth, tracer)?;
            let z = product_along(plan.inner.clone(), &plan.at_v, depth, tracer)?;
            normal_combine(x, y, z)
        }
    }
}
