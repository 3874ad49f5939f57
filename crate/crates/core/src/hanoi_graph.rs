//! Explicit generalized Tower of Hanoi graphs TH_d(n).
//!
//! Stage 0 is the complete graph on `d + 1` vertices. Stage `n + 1` joins
//! `d + 1` copies of stage `n`: copy `i` supplies its corner `i` as global
//! corner `i`, and for every pair `i < j` one edge joins corner `j` of copy
//! `i` to corner `i` of copy `j`. Vertices are numbered copy-major.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

/// Simple undirected graph on vertices `0..num_vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops and repeated edges are
    /// rejected.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) out of range for {num_vertices} vertices"
                )));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("parallel edge {:?}", w[0])));
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in &list {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph { num_vertices, edges: list, adjacency })
    }

    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
        Graph::new(k, edges).expect("complete graph is simple")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HanoiGraph {
    d: usize,
    n: usize,
    graph: Graph,
    corners: Vec<usize>,
}

/// One connecting edge of the stage-`n + 1` assembly: copy `copies.0` uses
/// its corner `corners.0`, copy `copies.1` its corner `corners.1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConnectorEdge {
    pub copies: (usize, usize),
    pub corners: (usize, usize),
}

pub fn connector_edges(d: usize) -> Vec<ConnectorEdge> {
    let mut out = Vec::with_capacity((d + 1) * d / 2);
    for i in 0..=d {
        for j in i + 1..=d {
            out.push(ConnectorEdge { copies: (i, j), corners: (j, i) });
        }
    }
    out
}

/// `(d+1)^(n+1)`, or `None` on overflow.
pub fn vertex_count(d: usize, n: usize) -> Option<u128> {
    (d as u128 + 1).checked_pow(u32::try_from(n + 1).ok()?)
}

/// `(d+1)((d+1)^(n+1) - 1)/2`, or `None` on overflow.
pub fn edge_count(d: usize, n: usize) -> Option<u128> {
    let v = vertex_count(d, n)?;
    (d as u128 + 1).checked_mul(v - 1).map(|x| x / 2)
}

impl HanoiGraph {
    pub fn build(d: usize, n: usize) -> Result<Self> {
        Self::build_capped(d, n, DEFAULT_VERTEX_CAP)
    }

    pub fn build_capped(d: usize, n: usize, vertex_cap: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("dimension d must be at least 2, got {d}")));
        }
        let vertices = vertex_count(d, n).unwrap_or(u128::MAX);
        if vertices > vertex_cap as u128 {
            return Err(Error::VertexCap { d, n, vertices, cap: vertex_cap });
        }
        let k = d + 1;
        let mut size = k;
        let mut edges: Vec<(usize, usize)> = Graph::complete(k).edges().to_vec();
        let mut corners: Vec<usize> = (0..k).collect();
        for _ in 0..n {
            let mut next = Vec::with_capacity(edges.len() * k + k * d / 2);
            for copy in 0..k {
                let off = copy * size;
                next.extend(edges.iter().map(|&(u, v)| (u + off, v + off)));
            }
            for c in connector_edges(d) {
                let (i, j) = c.copies;
                next.push((i * size + corners[c.corners.0], j * size + corners[c.corners.1]));
            }
            corners = (0..k).map(|i| i * size + corners[i]).collect();
            edges = next;
            size *= k;
        }
        let graph = Graph::new(size, edges)?;
        Ok(HanoiGraph { d, n, graph, corners })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Global corner vertices, indexed by corner label `0..=d`.
    pub fn corners(&self) -> &[usize] {
        &self.corners
    }

    /// Edge list as CSV preceded by a `# d=.. n=.. corners=..` comment line.
    pub fn to_csv(&self) -> String {
        let corners: Vec<String> = self.corners.iter().map(|c| c.to_string()).collect();
        let mut out = format!("# d={} n={} corners={}\nu,v\n", self.d, self.n, corners.join(","));
        for &(u, v) in self.graph.edges() {
            writeln!(out, "{u},{v}").unwrap();
        }
        out
    }
}
