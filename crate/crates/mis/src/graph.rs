//! Undirected graph in compressed sparse row form.
//!
//! Every edge is stored in both endpoint rows so neighbor scans are a single
//! slice lookup. Rows are sorted ascending and contain no duplicates or
//! self-loops.

use crate::MisError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl CsrGraph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    /// Builds a graph from an undirected edge list. Duplicate edges (in either
    /// orientation) collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, MisError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(MisError::VertexOutOfRange {
                        vertex: x as u64,
                        vertices: n,
                    });
                }
            }
            if u == v {
                return Err(MisError::SelfLoop(u));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Self { offsets, targets })
    }

    /// Builds a graph from per-vertex neighbor lists that are already sorted,
    /// deduplicated and symmetric. Only checked in debug builds.
    pub(crate) fn from_sorted_rows(rows: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut targets = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        offsets.push(0);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0] < w[1]));
            targets.extend_from_slice(row);
            offsets.push(targets.len());
        }
        let g = Self { offsets, targets };
        debug_assert!(g.is_symmetric());
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices() as u32)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_vertices() as u32).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Subgraph induced by `keep` (any order, no duplicates). Vertex `i` of the
    /// result corresponds to `mapping[i]` of `self`; `mapping` is sorted.
    pub fn induced(&self, keep: &[u32]) -> (CsrGraph, Vec<u32>) {
        let mut mapping = keep.to_vec();
        mapping.sort_unstable();
        let mut index = vec![u32::MAX; self.num_vertices()];
        for (i, &v) in mapping.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let rows: Vec<Vec<u32>> = mapping
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&u| {
                        let j = index[u as usize];
                        (j != u32::MAX).then_some(j)
                    })
                    .collect()
            })
            .collect();
        (CsrGraph::from_sorted_rows(&rows), mapping)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n as u32 {
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in self.neighbors(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True when no edge joins two members of `set`.
    pub fn is_independent(&self, set: &[u32]) -> bool {
        let mut member = vec![false; self.num_vertices()];
        for &v in set {
            match member.get_mut(v as usize) {
                Some(m) => *m = true,
                None => return false,
            }
        }
        set.iter()
            .all(|&v| self.neighbors(v).iter().all(|&u| !member[u as usize]))
    }

    /// True when every vertex outside `set` has a neighbor inside it.
    pub fn is_maximal(&self, set: &[u32]) -> bool {
        let mut member = vec![false; self.num_vertices()];
        for &v in set {
            member[v as usize] = true;
        }
        (0..self.num_vertices() as u32)
            .all(|v| member[v as usize] || self.neighbors(v).iter().any(|&u| member[u as usize]))
    }

    fn is_symmetric(&self) -> bool {
        self.edges().all(|(u, v)| self.neighbors(v).binary_search(&u).is_ok())
    }
}
