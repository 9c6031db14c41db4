//! Undirected multigraphs with loops.

use std::collections::HashSet;

/// An undirected multigraph on vertices `0..n`.
///
/// Edges are stored as unordered pairs with the smaller endpoint first.
/// A loop contributes two to the degree of its vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

#[inline]
pub(crate) fn canonical(u: u32, v: u32) -> (u32, u32) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Multigraph {
    /// Builds a multigraph, canonicalising and sorting the edge list.
    ///
    /// # Panics
    /// If an endpoint is not below `n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| {
                assert!(
                    (u as usize) < n && (v as usize) < n,
                    "edge ({u}, {v}) out of range for n = {n}"
                );
                canonical(u, v)
            })
            .collect();
        edges.sort_unstable();
        Self { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let n32 = n as u32;
        Self::new(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))))
    }

    /// Cycle `C_n` for `n ≥ 3`.
    pub fn cycle(n: usize) -> Self {
        let n32 = n as u32;
        Self::new(n, (0..n32).map(|u| (u, (u + 1) % n32)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// Number of vertices with at least one incident edge.
    pub fn non_isolated_count(&self) -> usize {
        self.degrees().iter().filter(|&&d| d > 0).count()
    }

    /// True iff the graph has no loops and no repeated edges.
    pub fn is_simple(&self) -> bool {
        // Edges are sorted, so repeats are adjacent.
        self.edges.iter().all(|&(u, v)| u != v) && self.edges.windows(2).all(|w| w[0] != w[1])
    }

    /// The same graph with the edge at `index` removed.
    pub fn without_edge(&self, index: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.remove(index);
        Self { n: self.n, edges }
    }

    /// Half-edge adjacency in CSR form: `(offsets, neighbours)`.
    /// A loop at `v` lists `v` twice among its own neighbours.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<u32>) {
        let deg = self.degrees();
        let mut offsets = Vec::with_capacity(self.n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..self.n].to_vec();
        let mut nbrs = vec![0u32; offsets[self.n]];
        for &(u, v) in &self.edges {
            nbrs[fill[u as usize]] = v;
            fill[u as usize] += 1;
            nbrs[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        (offsets, nbrs)
    }

    /// Subgraph induced by `keep`, with kept vertices relabelled `0..`
    /// in increasing order.
    pub fn induced_compact(&self, keep: &[bool]) -> Self {
        let mut label = vec![u32::MAX; self.n];
        let mut next = 0u32;
        for (v, &k) in keep.iter().enumerate() {
            if k {
                label[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u as usize] && keep[v as usize])
            .map(|&(u, v)| (label[u as usize], label[v as usize]));
        Self::new(next as usize, edges)
    }

    /// Distinct vertex pairs present as edges.
    pub fn edge_set(&self) -> HashSet<(u32, u32)> {
        self.edges.iter().copied().collect()
    }
}
