//! Two-way node separators from breadth-first bisection.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::CsrGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    First,
    Second,
    Separator,
}

/// Partition `V = V1 ∪ V2 ∪ Vs` with no edge between `V1` and `V2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    parts: Vec<Part>,
}

impl Separation {
    pub fn part(&self, v: u32) -> Part {
        self.parts[v as usize]
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    fn members(&self, p: Part) -> Vec<u32> {
        self.parts
            .iter()
            .enumerate()
            .filter_map(|(v, &q)| (q == p).then_some(v as u32))
            .collect()
    }

    pub fn first(&self) -> Vec<u32> {
        self.members(Part::First)
    }

    pub fn second(&self) -> Vec<u32> {
        self.members(Part::Second)
    }

    pub fn separator(&self) -> Vec<u32> {
        self.members(Part::Separator)
    }
}

/// Splits the graph at the midpoint of a breadth-first order.
///
/// Components are visited in a random order; inside each component the
/// traversal starts from the vertex farthest from a random start vertex. The
/// first `ceil(n/2)` vertices form one side. Whichever side has the smaller
/// boundary (vertices with a neighbor across the cut) supplies the separator.
pub fn partition_separator<R: Rng + ?Sized>(graph: &CsrGraph, rng: &mut R) -> Separation {
    let n = graph.num_vertices();
    let mut roots: Vec<u32> = (0..n as u32).collect();
    roots.shuffle(rng);

    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut dist_seen = vec![u32::MAX; n];
    let mut epoch = 0u32;
    for &root in &roots {
        if seen[root as usize] {
            continue;
        }
        // One sweep from the random root; the last vertex reached is far from it.
        epoch += 1;
        let start = *bfs(graph, root, |v| {
            let fresh = dist_seen[v as usize] != epoch;
            dist_seen[v as usize] = epoch;
            fresh
        })
        .last()
        .expect("bfs visits its root");
        for v in bfs(graph, start, |v| {
            let fresh = !seen[v as usize];
            seen[v as usize] = true;
            fresh
        }) {
            order.push(v);
        }
    }

    let half = n.div_ceil(2);
    let mut first = vec![false; n];
    for &v in &order[..half] {
        first[v as usize] = true;
    }
    let boundary = |side: bool| -> Vec<u32> {
        (0..n as u32)
            .filter(|&v| first[v as usize] == side && graph.neighbors(v).iter().any(|&u| first[u as usize] != side))
            .collect()
    };
    let a = boundary(true);
    let b = boundary(false);
    let sep = if a.len() <= b.len() { a } else { b };

    let mut parts: Vec<Part> = first
        .iter()
        .map(|&f| if f { Part::First } else { Part::Second })
        .collect();
    for v in sep {
        parts[v as usize] = Part::Separator;
    }
    Separation { parts }
}

fn bfs(graph: &CsrGraph, root: u32, mut visit: impl FnMut(u32) -> bool) -> Vec<u32> {
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    if visit(root) {
        queue.push_back(root);
    }
    while let Some(v) = queue.pop_front() {
        out.push(v);
        for &u in graph.neighbors(v) {
            if visit(u) {
                queue.push_back(u);
            }
        }
    }
    out
}
