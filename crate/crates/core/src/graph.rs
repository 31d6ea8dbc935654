//! Weighted graphs, edge-list ingestion and deterministic fixture generators.
//!
//! Node ids are 1-based in every file format and in error messages, and
//! 0-based everywhere inside the crate.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("edge {src}->{dst}: weight {weight} is not positive")]
    NonPositiveWeight { src: usize, dst: usize, weight: f64 },

    #[error("duplicate edge {src}->{dst}")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("node {node} out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("node {0} has zero weighted degree")]
    IsolatedNode(usize),

    #[error("undirected graph is missing the mirror of edge {src}->{dst} (weight {weight})")]
    Asymmetric { src: usize, dst: usize, weight: f64 },

    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),

    #[error("empty graph")]
    Empty,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A directed link `src -> dst` with a positive weight. Ids are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Immutable weighted graph.
///
/// Undirected graphs store both orientations of every link, so the edge list
/// always describes the adjacency matrix row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    directed: bool,
}

impl Graph {
    /// Validates and builds a graph from directed links (0-based ids).
    ///
    /// For `directed == false` the caller must pass both orientations; use
    /// [`Graph::undirected`] to mirror a one-sided list.
    pub fn new(n: usize, edges: Vec<Edge>, directed: bool) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut by_pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &edges {
            for node in [e.src, e.dst] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node: node + 1, n });
                }
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src + 1));
            }
            if !e.weight.is_finite() || e.weight <= 0.0 {
                return Err(GraphError::NonPositiveWeight {
                    src: e.src + 1,
                    dst: e.dst + 1,
                    weight: e.weight,
                });
            }
            if by_pair.insert((e.src, e.dst), e.weight).is_some() {
                return Err(GraphError::DuplicateEdge { src: e.src + 1, dst: e.dst + 1 });
            }
        }
        if !directed {
            for (&(i, j), &w) in &by_pair {
                if by_pair.get(&(j, i)) != Some(&w) {
                    return Err(GraphError::Asymmetric { src: i + 1, dst: j + 1, weight: w });
                }
            }
        }
        let edges: Vec<Edge> = by_pair
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        let graph = Graph { n, edges, directed };
        if let Some(i) = graph.degrees().iter().position(|&d| d <= 0.0) {
            return Err(GraphError::IsolatedNode(i + 1));
        }
        Ok(graph)
    }

    /// Builds an undirected graph from a one-sided list of `(i, j, w)` links
    /// (0-based), mirroring each one.
    pub fn undirected(n: usize, links: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let edges = links
            .iter()
            .flat_map(|&(i, j, w)| {
                [Edge { src: i, dst: j, weight: w }, Edge { src: j, dst: i, weight: w }]
            })
            .collect();
        Graph::new(n, edges, false)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Weighted nodal degrees: row sums of the adjacency matrix.
    pub fn degrees(&self) -> DVector<f64> {
        let mut d = DVector::zeros(self.n);
        for e in &self.edges {
            d[e.src] += e.weight;
        }
        d
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.src, e.dst)] = e.weight;
        }
        a
    }

    /// True when every node has the same weighted degree (within `tol`).
    pub fn is_regular(&self, tol: f64) -> bool {
        let d = self.degrees();
        let d0 = d[0];
        d.iter().all(|&di| (di - d0).abs() <= tol * (1.0 + d0.abs()))
    }

    /// Serializes to the edge-list text format. Undirected graphs list each
    /// link once (`src < dst`).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} graph, n = {}",
            if self.directed { "directed" } else { "undirected" },
            self.n
        );
        for e in &self.edges {
            if self.directed || e.src < e.dst {
                let _ = writeln!(out, "{} {} {}", e.src + 1, e.dst + 1, e.weight);
            }
        }
        out
    }
}

/// Parses edge-list text: one `src dst weight` triple per line, `#` comments.
///
/// The node count is the largest id that appears; every id below it must
/// carry at least one outgoing link.
pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph, GraphError> {
    let mut links = Vec::new();
    let mut n = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected \"src dst weight\", got {} fields", fields.len()),
            });
        }
        let node = |s: &str| -> Result<usize, GraphError> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(GraphError::Parse {
                    line: line_no,
                    message: format!("invalid node id {s:?} (ids are 1-based)"),
                }),
            }
        };
        let src = node(fields[0])?;
        let dst = node(fields[1])?;
        let weight: f64 = fields[2].parse().map_err(|_| GraphError::Parse {
            line: line_no,
            message: format!("invalid weight {:?}", fields[2]),
        })?;
        if weight.is_nan() || weight <= 0.0 {
            return Err(GraphError::NonPositiveWeight { src, dst, weight });
        }
        n = n.max(src).max(dst);
        links.push((src - 1, dst - 1, weight));
    }
    if n == 0 {
        return Err(GraphError::Empty);
    }
    if directed {
        let edges = links
            .into_iter()
            .map(|(src, dst, weight)| Edge { src, dst, weight })
            .collect();
        Graph::new(n, edges, true)
    } else {
        Graph::undirected(n, &links)
    }
}

pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, directed)
}

/// Deterministic undirected graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path,
    Cycle,
    Complete,
    /// Ring lattice: node `i` links to its `degree / 2` neighbours on each side.
    RegularRing { degree: usize },
}

pub fn generate(kind: GraphKind, n: usize, weight: f64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameters(format!("n = {n}, need n >= 2")));
    }
    if !weight.is_finite() || weight <= 0.0 {
        return Err(GraphError::InvalidParameters(format!("weight {weight} must be positive")));
    }
    let mut links = Vec::new();
    match kind {
        GraphKind::Path => links.extend((0..n - 1).map(|i| (i, i + 1, weight))),
        GraphKind::Cycle => {
            if n < 3 {
                return Err(GraphError::InvalidParameters("cycle needs n >= 3".into()));
            }
            links.extend((0..n).map(|i| (i, (i + 1) % n, weight)));
        }
        GraphKind::Complete => {
            for i in 0..n {
                links.extend((i + 1..n).map(|j| (i, j, weight)));
            }
        }
        GraphKind::RegularRing { degree } => {
            if degree == 0 || degree % 2 != 0 || degree >= n {
                return Err(GraphError::InvalidParameters(format!(
                    "ring degree {degree} must be even, positive and < n = {n}"
                )));
            }
            for i in 0..n {
                for k in 1..=degree / 2 {
                    // k <= degree/2 < n/2, so no pair is emitted twice
                    links.push((i, (i + k) % n, weight));
                }
            }
        }
    }
    Graph::undirected(n, &links)
}

/// Connected undirected graph with a random spanning tree plus extra links
/// added with probability `edge_prob`. Weights are uniform in `[0.5, 2.0)`.
/// Same `(n, edge_prob, seed)` gives the same graph.
pub fn random_connected(n: usize, edge_prob: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameters(format!("n = {n}, need n >= 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = HashSet::new();
    let mut links = Vec::new();
    for j in 1..n {
        let i = rng.random_range(0..j);
        tree.insert((i, j));
        links.push((i, j, rng.random_range(0.5..2.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !tree.contains(&(i, j)) && rng.random_bool(edge_prob.clamp(0.0, 1.0)) {
                links.push((i, j, rng.random_range(0.5..2.0)));
            }
        }
    }
    Graph::undirected(n, &links)
}

/// Six-node sparse network with unequal degrees, the non-regular showcase
/// fixture. Links (1-based): 1-2, 1-3, 2-3, 2-4, 3-4, 4-5, 5-6.
pub fn six_node_network() -> Graph {
    Graph::undirected(
        6,
        &[
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 1.0),
            (1, 3, 1.0),
            (2, 3, 1.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
        ],
    )
    .expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_from_text() {
        let g = parse_edge_list("1 2 1.0", false).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.degrees().as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn p3_from_text_with_comments() {
        let g = parse_edge_list("# path\n1 2 1.0\n\n2 3 1.0\n", false).unwrap();
        assert_eq!(g.degrees().as_slice(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn rejects_zero_weight() {
        let err = parse_edge_list("1 2 0.0", false).unwrap_err();
        assert!(matches!(err, GraphError::NonPositiveWeight { .. }), "{err}");
    }

    #[test]
    fn parse_error_reports_line() {
        let err = parse_edge_list("1 2 1.0\n2 x 1.0", false).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_isolated_node() {
        // node 2 never appears
        let err = parse_edge_list("1 3 1.0", false).unwrap_err();
        assert!(matches!(err, GraphError::IsolatedNode(2)), "{err}");
    }

    #[test]
    fn directed_sink_is_isolated() {
        let err = parse_edge_list("1 2 1.0", true).unwrap_err();
        assert!(matches!(err, GraphError::IsolatedNode(2)), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_self_loops() {
        assert!(matches!(
            parse_edge_list("1 2 1.0\n2 1 1.0", false).unwrap_err(),
            GraphError::DuplicateEdge { .. }
        ));
        assert!(matches!(
            parse_edge_list("1 2 1.0\n2 2 1.0", false).unwrap_err(),
            GraphError::SelfLoop(2)
        ));
    }

    #[test]
    fn rejects_asymmetric_undirected() {
        let edges = vec![
            Edge { src: 0, dst: 1, weight: 1.0 },
            Edge { src: 1, dst: 0, weight: 2.0 },
        ];
        assert!(matches!(Graph::new(2, edges, false), Err(GraphError::Asymmetric { .. })));
    }

    #[test]
    fn weighted_k2_degrees() {
        let g = parse_edge_list("1 2 2.5", false).unwrap();
        assert_eq!(g.degrees().as_slice(), &[2.5, 2.5]);
    }

    #[test]
    fn generator_degrees() {
        let k3 = generate(GraphKind::Cycle, 3, 1.0).unwrap();
        assert!(k3.degrees().iter().all(|&d| d == 2.0));
        assert_eq!(k3, generate(GraphKind::Complete, 3, 1.0).unwrap());

        let k4 = generate(GraphKind::Complete, 4, 1.0).unwrap();
        assert!(k4.degrees().iter().all(|&d| d == 3.0));

        let p3 = generate(GraphKind::Path, 3, 1.0).unwrap();
        assert_eq!(p3.degrees().as_slice(), &[1.0, 2.0, 1.0]);

        let ring = generate(GraphKind::RegularRing { degree: 4 }, 9, 0.5).unwrap();
        assert!(ring.degrees().iter().all(|&d| d == 2.0));
        assert!(ring.is_regular(0.0));
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        assert!(generate(GraphKind::Path, 1, 1.0).is_err());
        assert!(generate(GraphKind::Cycle, 2, 1.0).is_err());
        assert!(generate(GraphKind::RegularRing { degree: 3 }, 8, 1.0).is_err());
        assert!(generate(GraphKind::RegularRing { degree: 8 }, 8, 1.0).is_err());
        assert!(generate(GraphKind::Complete, 4, -1.0).is_err());
    }

    #[test]
    fn six_node_fixture_is_not_regular() {
        let g = six_node_network();
        assert_eq!(g.degrees().as_slice(), &[2.0, 3.0, 3.0, 3.0, 2.0, 1.0]);
        assert!(!g.is_regular(1e-12));
    }

    #[test]
    fn random_graphs_are_deterministic() {
        let a = random_connected(15, 0.2, 7).unwrap();
        let b = random_connected(15, 0.2, 7).unwrap();
        assert_eq!(a, b);
    }
}
