//! Weighted directed graphs: edge-list I/O, in-weight normalization,
//! strongly connected components and a seeded generator.
//!
//! **Orientation.** The weight matrix is indexed `a[(i, j)]` for an edge
//! *from node `j` to node `i`*. Row `i` therefore collects the in-edges of
//! node `i`, and the edge-list line `src dst w` is stored as
//! `a[(dst, src)] = w`. Many graph libraries use the transpose, so be careful
//! when importing matrices from elsewhere.
//!
//! The edge-list text format is one edge per line, `src dst [weight]`, with
//! whitespace-separated tokens, 0-based integer ids and `#` starting a
//! comment. A missing weight means `1.0` and repeated edges add up. A comment
//! of the form `# nodes N` declares the node count explicitly so graphs with
//! trailing isolated nodes survive a round trip; [`Graph::to_edge_list`]
//! always emits it.

use std::fmt::Write as _;

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

/// Upper limit on the node count accepted from text input. Graphs are stored
/// densely, so an id like `4000000000` would otherwise try to allocate an
/// impossible matrix.
pub const MAX_NODES: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge list contains no nodes")]
    EmptyGraph,
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("line {line}: malformed edge `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("node {node} has no incoming edges")]
    ZeroInDegree { node: usize },
    #[error("node count {0} exceeds the supported maximum of {MAX_NODES}")]
    TooManyNodes(usize),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::EmptyGraph => "EmptyGraph",
            GraphError::NegativeWeight { .. } => "NegativeWeight",
            GraphError::MalformedLine { .. } => "MalformedLine",
            GraphError::ZeroInDegree { .. } => "ZeroInDegree",
            GraphError::TooManyNodes(_) => "TooManyNodes",
        }
    }
}

/// Weighted directed graph with `a[(i, j)] > 0` iff there is an edge `j -> i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    weights: Matrix,
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Wraps a weight matrix. Returns `None` if it is empty or has a negative
    /// entry.
    pub fn from_weights(weights: Matrix) -> Option<Self> {
        if weights.dim() == 0 || !weights.is_nonnegative() {
            return None;
        }
        Some(Graph {
            weights,
            labels: None,
        })
    }

    /// Builds a graph from `(src, dst, weight)` triples over `n` nodes.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Option<Self> {
        let mut weights = Matrix::zeros(n);
        for &(src, dst, w) in edges {
            if src >= n || dst >= n || !(w >= 0.0) {
                return None;
            }
            weights[(dst, src)] += w;
        }
        Self::from_weights(weights)
    }

    pub fn n(&self) -> usize {
        self.weights.dim()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    /// Weight of the edge `src -> dst`.
    pub fn weight(&self, src: usize, dst: usize) -> f64 {
        self.weights[(dst, src)]
    }

    /// External identifier of an internal node. Parsed graphs use the
    /// identity map; induced subgraphs remember their parent ids.
    pub fn label(&self, node: usize) -> u64 {
        match &self.labels {
            Some(l) => l[node],
            None => node as u64,
        }
    }

    pub fn labels(&self) -> Vec<u64> {
        (0..self.n()).map(|i| self.label(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.entries().filter(|&(_, _, w)| w > 0.0).count()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.weights.row(node).iter().filter(|&&w| w > 0.0).count()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        (0..self.n())
            .filter(|&i| self.weights[(i, node)] > 0.0)
            .count()
    }

    /// Serializes to the edge-list format, sorted by `(dst, src)`, weights at
    /// 17 significant digits.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# nodes {}", self.n()).unwrap();
        for (dst, src, w) in self.weights.entries() {
            if w > 0.0 {
                writeln!(out, "{src} {dst} {w:.16e}").unwrap();
            }
        }
        out
    }

    /// Induced subgraph on `nodes` (in the given order), keeping weights and
    /// recording the external labels.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let k = nodes.len();
        let mut weights = Matrix::zeros(k);
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate() {
                weights[(a, b)] = self.weights[(i, j)];
            }
        }
        Graph {
            weights,
            labels: Some(nodes.iter().map(|&i| self.label(i)).collect()),
        }
    }
}

/// Parses the edge-list format described in the module docs.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut declared: Option<usize> = None;
    let mut max_id: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut toks = c.split_whitespace();
            if toks.next() == Some("nodes") {
                if let (Some(v), None) = (toks.next(), toks.next()) {
                    if let Ok(v) = v.parse::<usize>() {
                        declared = Some(declared.map_or(v, |d| d.max(v)));
                    }
                }
            }
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let malformed = || GraphError::MalformedLine {
            line: line_no,
            text: raw.trim().to_string(),
        };
        if toks.len() != 2 && toks.len() != 3 {
            return Err(malformed());
        }
        let src: usize = toks[0].parse().map_err(|_| malformed())?;
        let dst: usize = toks[1].parse().map_err(|_| malformed())?;
        let weight = match toks.get(2) {
            Some(t) => t.parse::<f64>().map_err(|_| malformed())?,
            None => 1.0,
        };
        if !weight.is_finite() {
            return Err(malformed());
        }
        if weight < 0.0 {
            return Err(GraphError::NegativeWeight {
                line: line_no,
                weight,
            });
        }
        let hi = src.max(dst);
        if hi >= MAX_NODES {
            return Err(GraphError::TooManyNodes(hi.saturating_add(1)));
        }
        max_id = Some(max_id.map_or(hi, |m| m.max(hi)));
        edges.push((src, dst, weight));
    }

    let n = match (max_id, declared) {
        (None, None) | (None, Some(0)) => return Err(GraphError::EmptyGraph),
        (Some(m), d) => (m + 1).max(d.unwrap_or(0)),
        (None, Some(d)) => d,
    };
    if n > MAX_NODES {
        return Err(GraphError::TooManyNodes(n));
    }
    let mut weights = Matrix::zeros(n);
    for (src, dst, w) in edges {
        weights[(dst, src)] += w;
    }
    Ok(Graph {
        weights,
        labels: None,
    })
}

/// Scales every row so the in-weights of each node sum to one.
pub fn normalize_in_weights(g: &Graph) -> Result<Graph, GraphError> {
    let mut weights = g.weights.clone();
    for i in 0..g.n() {
        let sum = g.weights.row_sum(i);
        if sum <= 0.0 {
            return Err(GraphError::ZeroInDegree { node: i });
        }
        for w in weights.row_mut(i) {
            *w /= sum;
        }
    }
    Ok(Graph {
        weights,
        labels: g.labels.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SccAnalysis {
    pub is_strongly_connected: bool,
    /// Components with sorted members, ordered by their smallest node id.
    pub components: Vec<Vec<usize>>,
    /// Index into `components` of the largest one (ties: smallest min id).
    pub largest: usize,
    pub largest_component_subgraph: Graph,
}

impl SccAnalysis {
    pub fn largest_component(&self) -> &[usize] {
        &self.components[self.largest]
    }
}

/// Strongly connected components of the zero pattern of `succ` (Tarjan,
/// iterative). Components come back sorted internally and by min id.
pub fn scc_components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components.sort_by_key(|c| c[0]);
    components
}

pub fn strongly_connected_analysis(g: &Graph) -> SccAnalysis {
    let components = scc_components(&g.weights.pattern_successors());
    let mut largest = 0;
    for (idx, c) in components.iter().enumerate() {
        if c.len() > components[largest].len() {
            largest = idx;
        }
    }
    let largest_component_subgraph = g.induced_subgraph(&components[largest]);
    SccAnalysis {
        is_strongly_connected: components.len() == 1,
        components,
        largest,
        largest_component_subgraph,
    }
}

pub fn is_strongly_connected(g: &Graph) -> bool {
    scc_components(&g.weights.pattern_successors()).len() == 1
}

/// Seeded random strongly connected graph: a Hamiltonian cycle over a
/// shuffled node order, plus every other ordered pair (no self-loops) with
/// probability `extra_edge_prob`. All weights are `1.0`. For `n == 1` the
/// result is a single self-loop.
pub fn random_strongly_connected(n: usize, extra_edge_prob: f64, seed: u64) -> Graph {
    assert!(n >= 1, "random_strongly_connected needs at least one node");
    let p = extra_edge_prob.clamp(0.0, 1.0);
    let mut weights = Matrix::zeros(n);
    if n == 1 {
        weights[(0, 0)] = 1.0;
        return Graph {
            weights,
            labels: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for k in 0..n {
        let src = order[k];
        let dst = order[(k + 1) % n];
        weights[(dst, src)] = 1.0;
    }
    for src in 0..n {
        for dst in 0..n {
            if src == dst || weights[(dst, src)] > 0.0 {
                continue;
            }
            if rng.gen_bool(p) {
                weights[(dst, src)] = 1.0;
            }
        }
    }
    Graph {
        weights,
        labels: None,
    }
}
