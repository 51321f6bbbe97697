//! 1- and 2-improvement local search.
//!
//! A 2-improvement removes one solution vertex `x` and inserts two
//! non-adjacent vertices whose only solution neighbor is `x`. Candidates are
//! found through the tightness count (number of solution neighbors) of each
//! vertex, so one attempt around `x` costs time linear in the edges incident to
//! its 1-tight neighborhood.

use std::collections::VecDeque;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{CsrGraph, IndependentSetSolution, MisError};

/// Runs 1- and 2-improvements on `solution` until neither exists.
///
/// `rng` only decides the order in which solution vertices are examined.
pub fn two_improvement<R: Rng + ?Sized>(
    graph: &CsrGraph,
    solution: &IndependentSetSolution,
    rng: &mut R,
) -> Result<IndependentSetSolution, MisError> {
    let vertices = solution.vertices();
    if !graph.is_independent(vertices) {
        return Err(MisError::InvalidSolution(
            "input is not an independent set of this graph".into(),
        ));
    }
    let mut state = LocalSearch::new(graph, vertices);
    state.run(rng, None);
    let out = IndependentSetSolution::new(graph, state.vertices(), "two_improvement")?;
    Ok(out.with_iterations(state.swaps))
}

/// Mutable search state shared with the evolutionary driver.
pub(crate) struct LocalSearch<'g> {
    graph: &'g CsrGraph,
    in_set: Vec<bool>,
    tight: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
    pub(crate) swaps: u64,
}

impl<'g> LocalSearch<'g> {
    pub(crate) fn new(graph: &'g CsrGraph, vertices: &[u32]) -> Self {
        let n = graph.num_vertices();
        let mut s = Self {
            graph,
            in_set: vec![false; n],
            tight: vec![0; n],
            mark: vec![0; n],
            stamp: 0,
            swaps: 0,
        };
        for &v in vertices {
            s.insert(v);
        }
        s
    }

    pub(crate) fn from_mask(graph: &'g CsrGraph, mask: &[bool]) -> Self {
        let vertices: Vec<u32> = mask
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v as u32))
            .collect();
        Self::new(graph, &vertices)
    }

    pub(crate) fn into_mask(self) -> Vec<bool> {
        self.in_set
    }

    pub(crate) fn vertices(&self) -> Vec<u32> {
        self.in_set
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v as u32))
            .collect()
    }

    fn insert(&mut self, v: u32) {
        debug_assert!(!self.in_set[v as usize]);
        self.in_set[v as usize] = true;
        for &u in self.graph.neighbors(v) {
            self.tight[u as usize] += 1;
        }
    }

    fn remove(&mut self, v: u32) {
        debug_assert!(self.in_set[v as usize]);
        self.in_set[v as usize] = false;
        for &u in self.graph.neighbors(v) {
            self.tight[u as usize] -= 1;
        }
    }

    fn is_free(&self, v: u32) -> bool {
        !self.in_set[v as usize] && self.tight[v as usize] == 0
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.fill(0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// Two non-adjacent 1-tight neighbors of solution vertex `x`, if any.
    fn find_two_improvement(&mut self, x: u32) -> Option<(u32, u32)> {
        let graph = self.graph;
        let candidates: Vec<u32> = graph
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&u| self.tight[u as usize] == 1)
            .collect();
        if candidates.len() < 2 {
            return None;
        }
        let stamp = self.next_stamp();
        for &c in &candidates {
            self.mark[c as usize] = stamp;
        }
        for (i, &u) in candidates.iter().enumerate() {
            // u is adjacent to x plus `hits` other candidates.
            let hits = graph
                .neighbors(u)
                .iter()
                .filter(|&&w| self.mark[w as usize] == stamp)
                .count();
            if hits + 1 < candidates.len() {
                let w = candidates
                    .iter()
                    .enumerate()
                    .find(|&(j, &w)| j != i && !graph.has_edge(u, w))
                    .map(|(_, &w)| w)
                    .expect("a non-neighbor candidate exists");
                return Some((u, w));
            }
        }
        None
    }

    /// Inserts every free vertex (1-improvements) in id order.
    fn insert_free(&mut self) {
        for v in 0..self.graph.num_vertices() as u32 {
            if self.is_free(v) {
                self.insert(v);
            }
        }
    }

    /// Runs to a local optimum, or until `deadline` passes. Returns false when
    /// stopped by the deadline.
    pub(crate) fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, deadline: Option<Instant>) -> bool {
        let graph = self.graph;
        self.insert_free();
        let n = graph.num_vertices();
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        let mut pops = 0u64;
        loop {
            let mut order: Vec<u32> = (0..n as u32).filter(|&v| self.in_set[v as usize]).collect();
            order.shuffle(rng);
            for v in order {
                queued[v as usize] = true;
                queue.push_back(v);
            }
            let mut improved = false;
            while let Some(x) = queue.pop_front() {
                queued[x as usize] = false;
                pops += 1;
                if pops.is_multiple_of(512) {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            return false;
                        }
                    }
                }
                if !self.in_set[x as usize] {
                    continue;
                }
                let Some((u, w)) = self.find_two_improvement(x) else {
                    continue;
                };
                improved = true;
                self.swaps += 1;
                self.remove(x);
                self.insert(u);
                self.insert(w);
                let mut touched = vec![u, w];
                for &y in graph.neighbors(x) {
                    if self.is_free(y) {
                        self.insert(y);
                        touched.push(y);
                    }
                }
                // Solution vertices near x may have gained 1-tight neighbors.
                for &y in graph.neighbors(x) {
                    for &z in graph.neighbors(y) {
                        if self.in_set[z as usize] && !queued[z as usize] {
                            queued[z as usize] = true;
                            queue.push_back(z);
                        }
                    }
                }
                for t in touched {
                    if !queued[t as usize] {
                        queued[t as usize] = true;
                        queue.push_back(t);
                    }
                }
            }
            if !improved {
                return true;
            }
        }
    }
}
