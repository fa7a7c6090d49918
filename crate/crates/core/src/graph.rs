//! Multigraphs whose edges may have two, one or zero endpoints.
//!
//! A *normal* edge joins two distinct vertices, a *dangling* edge hangs off a
//! single vertex, and a *free* edge touches nothing at all. Parallel edges are
//! allowed; self-loops are not.
//!
//! Vertex and edge identifiers are dense indices handed out in insertion order
//! and never reused. Removing an edge or detaching a vertex leaves every other
//! identifier untouched, which is what lets the recursions refer to "the same"
//! edge across a whole family of subinstances.

use std::fmt;

use thiserror::Error;

/// Identifier of a vertex slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Identifier of an edge slot. The total order on ids fixes the order in which
/// neighbouring edges are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Normal,
    Dangling,
    Free,
}

impl EdgeKind {
    /// Single-letter code used in trace output.
    pub fn code(self) -> char {
        match self {
            EdgeKind::Normal => 'N',
            EdgeKind::Dangling => 'D',
            EdgeKind::Free => 'F',
        }
    }
}

/// The endpoint multiset of an edge. A normal edge stores its endpoints in
/// ascending order, so `(u, v)` and `(v, u)` are the same value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoints {
    Free,
    Dangling(VertexId),
    Normal(VertexId, VertexId),
}

impl Endpoints {
    pub fn kind(self) -> EdgeKind {
        match self {
            Endpoints::Free => EdgeKind::Free,
            Endpoints::Dangling(_) => EdgeKind::Dangling,
            Endpoints::Normal(..) => EdgeKind::Normal,
        }
    }

    pub fn contains(self, v: VertexId) -> bool {
        match self {
            Endpoints::Free => false,
            Endpoints::Dangling(u) => u == v,
            Endpoints::Normal(a, b) => a == v || b == v,
        }
    }

    /// Number of occupied endpoint slots.
    pub fn arity(self) -> usize {
        match self {
            Endpoints::Free => 0,
            Endpoints::Dangling(_) => 1,
            Endpoints::Normal(..) => 2,
        }
    }

    /// `e - v`: drop the slot occupied by `v`, if any.
    fn without(self, v: VertexId) -> Endpoints {
        match self {
            Endpoints::Dangling(u) if u == v => Endpoints::Free,
            Endpoints::Normal(a, b) if a == v => Endpoints::Dangling(b),
            Endpoints::Normal(a, b) if b == v => Endpoints::Dangling(a),
            other => other,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0} is not supported")]
    SelfLoop(VertexId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    present: Vec<bool>,
    edges: Vec<Option<Endpoints>>,
    /// Incident edges per vertex slot, ascending by id.
    adjacency: Vec<Vec<EdgeId>>,
    vertex_count: usize,
    edge_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// A graph with `n` vertices `0..n` and no edges.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    /// Builds a graph on vertices `0..n` with the given normal edges, in order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            g.add_normal(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.present.len());
        self.present.push(true);
        self.adjacency.push(Vec::new());
        self.vertex_count += 1;
        id
    }

    pub fn add_normal(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(self.push_edge(Endpoints::Normal(u.min(v), u.max(v))))
    }

    pub fn add_dangling(&mut self, u: VertexId) -> Result<EdgeId, GraphError> {
        self.check_vertex(u)?;
        Ok(self.push_edge(Endpoints::Dangling(u)))
    }

    pub fn add_free(&mut self) -> EdgeId {
        self.push_edge(Endpoints::Free)
    }

    fn push_edge(&mut self, ends: Endpoints) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push(Some(ends));
        // Fresh ids are the largest so far, so pushing keeps the lists sorted.
        match ends {
            Endpoints::Free => {}
            Endpoints::Dangling(u) => self.adjacency[u.0].push(id),
            Endpoints::Normal(a, b) => {
                self.adjacency[a.0].push(id);
                self.adjacency[b.0].push(id);
            }
        }
        self.edge_count += 1;
        id
    }

    fn check_vertex(&self, u: VertexId) -> Result<(), GraphError> {
        if self.contains_vertex(u) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(u))
        }
    }

    pub fn contains_vertex(&self, u: VertexId) -> bool {
        self.present.get(u.0).copied().unwrap_or(false)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(e.0), Some(Some(_)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Upper bound (exclusive) on edge ids ever issued by this graph.
    pub fn edge_slots(&self) -> usize {
        self.edges.len()
    }

    /// Upper bound (exclusive) on vertex ids ever issued by this graph.
    pub fn vertex_slots(&self) -> usize {
        self.present.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| VertexId(i))
    }

    /// Live edges in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Endpoints)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|ends| (EdgeId(i), ends)))
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges().map(|(id, _)| id).collect()
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<Endpoints, GraphError> {
        self.edges
            .get(e.0)
            .copied()
            .flatten()
            .ok_or(GraphError::UnknownEdge(e))
    }

    pub fn classify(&self, e: EdgeId) -> Result<EdgeKind, GraphError> {
        self.endpoints(e).map(Endpoints::kind)
    }

    /// Edges incident to `u`, strictly ascending by id. Parallel edges appear
    /// once each.
    pub fn incident_edges(&self, u: VertexId) -> Result<&[EdgeId], GraphError> {
        self.check_vertex(u)?;
        Ok(&self.adjacency[u.0])
    }

    pub fn degree(&self, u: VertexId) -> Result<usize, GraphError> {
        self.incident_edges(u).map(<[EdgeId]>::len)
    }

    pub fn max_degree(&self) -> usize {
        self.vertices()
            .map(|v| self.adjacency[v.0].len())
            .max()
            .unwrap_or(0)
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.vertices().any(|v| self.adjacency[v.0].is_empty())
    }

    /// `G - e`. Vertices are untouched, so an endpoint may become isolated.
    pub fn remove_edge(&self, e: EdgeId) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.remove_edge_in_place(e)?;
        Ok(g)
    }

    /// `G - u`. Every edge incident to `u` loses that endpoint slot: normal
    /// edges become dangling and dangling edges become free.
    pub fn detach_vertex(&self, u: VertexId) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.detach_vertex_in_place(u)?;
        Ok(g)
    }

    pub(crate) fn remove_edge_in_place(&mut self, e: EdgeId) -> Result<(), GraphError> {
        let ends = self.endpoints(e)?;
        let mut unlink = |v: VertexId| {
            let list = &mut self.adjacency[v.0];
            if let Ok(pos) = list.binary_search(&e) {
                list.remove(pos);
            }
        };
        match ends {
            Endpoints::Free => {}
            Endpoints::Dangling(u) => unlink(u),
            Endpoints::Normal(a, b) => {
                unlink(a);
                unlink(b);
            }
        }
        self.edges[e.0] = None;
        self.edge_count -= 1;
        Ok(())
    }

    pub(crate) fn detach_vertex_in_place(&mut self, u: VertexId) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        let incident = std::mem::take(&mut self.adjacency[u.0]);
        for e in incident {
            if let Some(ends) = self.edges[e.0].as_mut() {
                *ends = ends.without(u);
            }
        }
        self.present[u.0] = false;
        self.vertex_count -= 1;
        Ok(())
    }

    /// Removes `e` and detaches whichever of its endpoints are still present.
    pub(crate) fn remove_edge_and_endpoints_in_place(
        &mut self,
        e: EdgeId,
    ) -> Result<(), GraphError> {
        let ends = self.endpoints(e)?;
        self.remove_edge_in_place(e)?;
        match ends {
            Endpoints::Free => {}
            Endpoints::Dangling(u) => self.detach_vertex_in_place(u)?,
            Endpoints::Normal(a, b) => {
                self.detach_vertex_in_place(a)?;
                self.detach_vertex_in_place(b)?;
            }
        }
        Ok(())
    }
}

/// A graph read from the text format, together with the labels the file used.
///
/// Internal ids are assigned densely in declaration order; the labels are the
/// integers written in the file.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub vertex_labels: Vec<u64>,
    pub edge_labels: Vec<u64>,
}

impl LabeledGraph {
    pub fn edge_by_label(&self, label: u64) -> Option<EdgeId> {
        self.edge_labels
            .iter()
            .position(|&l| l == label)
            .map(EdgeId)
    }
}

/// Parses the line-oriented graph format:
///
/// ```text
/// # comment
/// v <id>            vertex
/// e <id> <u> <v>    normal edge
/// d <id> <u>        dangling edge
/// f <id>            free edge
/// ```
///
/// Vertex lines are processed before edge lines, so declarations may appear
/// anywhere in the file.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let err = |line: usize, message: String| GraphError::Parse { line, message };

    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        let nums = tokens
            .map(|t| {
                t.parse::<u64>().map_err(|_| {
                    err(
                        line_no,
                        format!("expected a nonnegative integer, found `{t}`"),
                    )
                })
            })
            .collect::<Result<Vec<u64>, _>>()?;
        let expected = match tag {
            "v" | "f" => 1,
            "d" => 2,
            "e" => 3,
            other => return Err(err(line_no, format!("unknown item `{other}`"))),
        };
        if nums.len() != expected {
            return Err(err(
                line_no,
                format!("`{tag}` takes {expected} integer(s), found {}", nums.len()),
            ));
        }
        items.push((line_no, tag, nums));
    }

    let mut graph = Graph::new();
    let mut vertex_labels = Vec::new();
    let mut vertex_index = std::collections::HashMap::new();
    for (line_no, tag, nums) in &items {
        if *tag != "v" {
            continue;
        }
        if vertex_index.contains_key(&nums[0]) {
            return Err(err(*line_no, format!("duplicate vertex id {}", nums[0])));
        }
        vertex_index.insert(nums[0], graph.add_vertex());
        vertex_labels.push(nums[0]);
    }

    let mut edge_labels: Vec<u64> = Vec::new();
    let mut seen_edges = std::collections::HashSet::new();
    for (line_no, tag, nums) in &items {
        if *tag == "v" {
            continue;
        }
        if !seen_edges.insert(nums[0]) {
            return Err(err(*line_no, format!("duplicate edge id {}", nums[0])));
        }
        let vertex = |label: u64| {
            vertex_index
                .get(&label)
                .copied()
                .ok_or_else(|| err(*line_no, format!("undeclared vertex {label}")))
        };
        match *tag {
            "e" => {
                let (u, v) = (vertex(nums[1])?, vertex(nums[2])?);
                graph
                    .add_normal(u, v)
                    .map_err(|e| err(*line_no, e.to_string()))?;
            }
            "d" => {
                graph.add_dangling(vertex(nums[1])?)?;
            }
            _ => {
                graph.add_free();
            }
        }
        edge_labels.push(nums[0]);
    }

    Ok(LabeledGraph {
        graph,
        vertex_labels,
        edge_labels,
    })
}

/// Writes `g` in the text format using its internal ids as labels.
pub fn render_graph(g: &Graph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        out.push_str(&format!("v {v}\n"));
    }
    for (id, ends) in g.edges() {
        let line = match ends {
            Endpoints::Free => format!("f {id}\n"),
            Endpoints::Dangling(u) => format!("d {id} {u}\n"),
            Endpoints::Normal(a, b) => format!("e {id} {a} {b}\n"),
        };
        out.push_str(&line);
    }
    out
}
