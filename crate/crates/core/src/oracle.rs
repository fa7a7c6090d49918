//! Brute-force ground truth: enumerate every edge subset and keep the covers.
//!
//! Edges are indexed in ascending id order and subsets are visited as a binary
//! counter, so the oracle is deterministic. All results are exact integers or
//! rationals.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{EdgeId, Endpoints, Graph, GraphError};

pub const DEFAULT_EDGE_CAP: usize = 24;

/// Subsets are held in a `u64`; anything near this is far beyond reach anyway.
const HARD_EDGE_LIMIT: usize = 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle too large: {edges} edges exceeds the cap of {cap}")]
    TooLarge { edges: usize, cap: usize },
    #[error("graph has no edge covers")]
    NoCovers,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// |EC(G)|, the number of edge covers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCount(pub BigUint);

impl ExactCount {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl std::fmt::Display for ExactCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Probability, over a uniform edge cover, that a given edge is left out.
/// Always reduced; always in `[0, 1/2]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactMarginal(pub Ratio<BigUint>);

impl ExactMarginal {
    pub fn new(numer: BigUint, denom: BigUint) -> Self {
        Self(Ratio::new(numer, denom))
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_at_most_half(&self) -> bool {
        self.numer() * 2u32 <= *self.denom()
    }
}

impl std::fmt::Display for ExactMarginal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Total cover count together with, for every edge, how many covers omit it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverProfile {
    pub total: u64,
    pub omitting: Vec<(EdgeId, u64)>,
}

impl CoverProfile {
    pub fn count(&self) -> ExactCount {
        ExactCount(BigUint::from(self.total))
    }

    pub fn marginal(&self, e: EdgeId) -> Result<ExactMarginal, OracleError> {
        if self.total == 0 {
            return Err(OracleError::NoCovers);
        }
        let (_, omit) = self
            .omitting
            .iter()
            .find(|(id, _)| *id == e)
            .ok_or(GraphError::UnknownEdge(e))?;
        Ok(ExactMarginal::new((*omit).into(), self.total.into()))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            cap: DEFAULT_EDGE_CAP,
        }
    }
}

/// Per-vertex bitmasks over the live edges of `g`, indexed in id order.
struct CoverMasks {
    edges: Vec<EdgeId>,
    vertex_masks: Vec<u64>,
}

impl CoverMasks {
    fn covers(&self, subset: u64) -> bool {
        self.vertex_masks.iter().all(|&m| m & subset != 0)
    }

    fn uncoverable(&self) -> bool {
        self.vertex_masks.contains(&0)
    }

    fn subsets(&self) -> std::ops::Range<u64> {
        0..1u64 << self.edges.len()
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn masks(&self, g: &Graph) -> Result<CoverMasks, OracleError> {
        let edges = g.edge_ids();
        let limit = self.cap.min(HARD_EDGE_LIMIT);
        if edges.len() > limit {
            return Err(OracleError::TooLarge {
                edges: edges.len(),
                cap: limit,
            });
        }
        let mut slot_masks = vec![0u64; g.vertex_slots()];
        for (bit, &e) in edges.iter().enumerate() {
            match g.endpoints(e)? {
                Endpoints::Free => {}
                Endpoints::Dangling(u) => slot_masks[u.0] |= 1 << bit,
                Endpoints::Normal(a, b) => {
                    slot_masks[a.0] |= 1 << bit;
                    slot_masks[b.0] |= 1 << bit;
                }
            }
        }
        let vertex_masks = g.vertices().map(|v| slot_masks[v.0]).collect();
        Ok(CoverMasks {
            edges,
            vertex_masks,
        })
    }

    /// Number of edge subsets covering every vertex. Free edges are
    /// unconstrained and dangling edges cover their single endpoint.
    pub fn count(&self, g: &Graph) -> Result<ExactCount, OracleError> {
        let masks = self.masks(g)?;
        if masks.uncoverable() {
            return Ok(ExactCount(BigUint::zero()));
        }
        let total = masks
            .subsets()
            .into_par_iter()
            .filter(|&s| masks.covers(s))
            .count();
        Ok(ExactCount(BigUint::from(total)))
    }

    /// `|EC(G - e)| / |EC(G)|`: covers of `G` without `e` are exactly the
    /// covers of `G - e`.
    pub fn marginal(&self, g: &Graph, e: EdgeId) -> Result<ExactMarginal, OracleError> {
        let without = g.remove_edge(e)?;
        let total = self.count(g)?;
        if total.is_zero() {
            return Err(OracleError::NoCovers);
        }
        let omitting = self.count(&without)?;
        Ok(ExactMarginal::new(omitting.0, total.0))
    }

    /// One enumeration pass yielding the count and every edge's omission count.
    pub fn profile(&self, g: &Graph) -> Result<CoverProfile, OracleError> {
        let masks = self.masks(g)?;
        let m = masks.edges.len();
        let tallies = if masks.uncoverable() {
            vec![0u64; m + 1]
        } else {
            masks
                .subsets()
                .into_par_iter()
                .filter(|&s| masks.covers(s))
                .fold(
                    || vec![0u64; m + 1],
                    |mut acc, s| {
                        acc[m] += 1;
                        for (bit, slot) in acc[..m].iter_mut().enumerate() {
                            if s & (1 << bit) == 0 {
                                *slot += 1;
                            }
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![0u64; m + 1],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        };
        Ok(CoverProfile {
            total: tallies[m],
            omitting: masks.edges.iter().copied().zip(tallies).collect(),
        })
    }
}

/// [`Oracle::count`] with the default edge cap.
pub fn exact_count(g: &Graph) -> Result<ExactCount, OracleError> {
    Oracle::default().count(g)
}

/// [`Oracle::marginal`] with the default edge cap.
pub fn exact_marginal(g: &Graph, e: EdgeId) -> Result<ExactMarginal, OracleError> {
    Oracle::default().marginal(g, e)
}
