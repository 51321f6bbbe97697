//! Exact reductions for maximum independent set.
//!
//! Rules, applied to a fixpoint:
//! - isolated vertex: take it;
//! - pendant vertex: take it, drop its neighbor;
//! - degree-2 fold: a vertex `v` with non-adjacent neighbors `u`, `w` is
//!   contracted with them into a new vertex adjacent to `N(u) ∪ N(w) \ {v}`;
//!   the kernel optimum grows by exactly one when lifted;
//! - domination: for adjacent `u`, `v` with `N[v] ⊆ N[u]`, drop `u`.
//!
//! Fold vertices get ids past the original vertex range. The trace records
//! every step so a kernel solution can be lifted back.

use std::collections::VecDeque;

use crate::{CsrGraph, ReductionSummary, ReductionToggles};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Isolated,
    Pendant,
    Fold,
    Domination,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Isolated => "isolated",
            Rule::Pendant => "pendant",
            Rule::Fold => "fold",
            Rule::Domination => "domination",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    Include {
        vertex: u32,
        rule: Rule,
    },
    Exclude {
        vertex: u32,
        rule: Rule,
    },
    Fold {
        center: u32,
        left: u32,
        right: u32,
        merged: u32,
    },
}

#[derive(Debug, Clone)]
pub struct Kernel {
    graph: CsrGraph,
    kernel_to_ext: Vec<u32>,
    original_vertices: usize,
    extended_vertices: usize,
    trace: Vec<Reduction>,
    summary: Vec<ReductionSummary>,
}

impl Kernel {
    /// The reduced graph, with vertices relabeled densely.
    pub fn graph(&self) -> &CsrGraph {
        &self.graph
    }

    pub fn trace(&self) -> &[Reduction] {
        &self.trace
    }

    /// Per-rule application counts.
    pub fn summary(&self) -> &[ReductionSummary] {
        &self.summary
    }

    /// Vertices committed to the solution by a rule. Ids at or above the
    /// original vertex count refer to fold vertices.
    pub fn forced_in(&self) -> Vec<u32> {
        self.trace
            .iter()
            .filter_map(|r| match r {
                Reduction::Include { vertex, .. } => Some(*vertex),
                _ => None,
            })
            .collect()
    }

    /// Vertices removed without being taken.
    pub fn excluded(&self) -> Vec<u32> {
        self.trace
            .iter()
            .filter_map(|r| match r {
                Reduction::Exclude { vertex, .. } => Some(*vertex),
                _ => None,
            })
            .collect()
    }

    /// Amount a lifted solution exceeds the kernel solution it came from.
    pub fn offset(&self) -> usize {
        self.trace
            .iter()
            .filter(|r| matches!(r, Reduction::Include { .. } | Reduction::Fold { .. }))
            .count()
    }

    /// Maps an independent set of the kernel to one of the original graph
    /// with `kernel_solution.len() + self.offset()` vertices.
    pub fn lift(&self, kernel_solution: &[u32]) -> Vec<u32> {
        let mut taken = vec![false; self.extended_vertices];
        for &k in kernel_solution {
            taken[self.kernel_to_ext[k as usize] as usize] = true;
        }
        for step in self.trace.iter().rev() {
            match *step {
                Reduction::Include { vertex, .. } => taken[vertex as usize] = true,
                Reduction::Exclude { .. } => {}
                Reduction::Fold {
                    center,
                    left,
                    right,
                    merged,
                } => {
                    if taken[merged as usize] {
                        taken[merged as usize] = false;
                        taken[left as usize] = true;
                        taken[right as usize] = true;
                    } else {
                        taken[center as usize] = true;
                    }
                }
            }
        }
        debug_assert!(taken[self.original_vertices..].iter().all(|&t| !t));
        taken[..self.original_vertices]
            .iter()
            .enumerate()
            .filter_map(|(v, &t)| t.then_some(v as u32))
            .collect()
    }
}

/// Reduces `graph` with every rule enabled.
pub fn kernelize(graph: &CsrGraph) -> Kernel {
    kernelize_with(graph, ReductionToggles::default())
}

pub fn kernelize_with(graph: &CsrGraph, rules: ReductionToggles) -> Kernel {
    Reducer::new(graph, rules).run()
}

struct Reducer {
    rules: ReductionToggles,
    adj: Vec<Vec<u32>>,
    alive: Vec<bool>,
    alive_count: usize,
    original: usize,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    mark: Vec<u32>,
    stamp: u32,
    trace: Vec<Reduction>,
    counts: [(usize, usize); 4],
}

impl Reducer {
    fn new(graph: &CsrGraph, rules: ReductionToggles) -> Self {
        let n = graph.num_vertices();
        let adj = (0..n as u32).map(|v| graph.neighbors(v).to_vec()).collect();
        Self {
            rules,
            adj,
            alive: vec![true; n],
            alive_count: n,
            original: n,
            queue: (0..n as u32).collect(),
            queued: vec![true; n],
            mark: vec![0; n],
            stamp: 0,
            trace: Vec::new(),
            counts: [(0, n); 4],
        }
    }

    fn push(&mut self, v: u32) {
        if self.alive[v as usize] && !self.queued[v as usize] {
            self.queued[v as usize] = true;
            self.queue.push_back(v);
        }
    }

    fn delete(&mut self, v: u32) {
        let nbrs = std::mem::take(&mut self.adj[v as usize]);
        for &u in &nbrs {
            let row = &mut self.adj[u as usize];
            if let Ok(i) = row.binary_search(&v) {
                row.remove(i);
            }
        }
        self.alive[v as usize] = false;
        self.alive_count -= 1;
        for u in nbrs {
            self.push(u);
        }
    }

    fn record(&mut self, step: Reduction, rule: Rule) {
        self.trace.push(step);
        let slot = &mut self.counts[rule as usize];
        slot.0 += 1;
        slot.1 = self.alive_count;
    }

    fn include(&mut self, v: u32, rule: Rule) {
        self.delete(v);
        self.record(Reduction::Include { vertex: v, rule }, rule);
    }

    fn exclude(&mut self, v: u32, rule: Rule) {
        self.delete(v);
        self.record(Reduction::Exclude { vertex: v, rule }, rule);
    }

    fn fold(&mut self, v: u32, u: u32, w: u32) {
        let mut merged_nbrs: Vec<u32> = self.adj[u as usize]
            .iter()
            .chain(&self.adj[w as usize])
            .copied()
            .filter(|&x| x != v)
            .collect();
        merged_nbrs.sort_unstable();
        merged_nbrs.dedup();
        self.delete(v);
        self.delete(u);
        self.delete(w);

        let z = self.adj.len() as u32;
        for &x in &merged_nbrs {
            // z exceeds every existing id, so rows stay sorted.
            self.adj[x as usize].push(z);
        }
        self.adj.push(merged_nbrs);
        self.alive.push(true);
        self.queued.push(false);
        self.mark.push(0);
        self.alive_count += 1;
        self.push(z);
        for i in 0..self.adj[z as usize].len() {
            let x = self.adj[z as usize][i];
            self.push(x);
        }
        self.record(
            Reduction::Fold {
                center: v,
                left: u,
                right: w,
                merged: z,
            },
            Rule::Fold,
        );
    }

    /// Whether `N[v] ⊆ N[u]` for adjacent `u`, `v`.
    fn dominates(&mut self, u: u32, v: u32) -> bool {
        if self.adj[u as usize].len() < self.adj[v as usize].len() {
            return false;
        }
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.fill(0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        for &x in &self.adj[u as usize] {
            self.mark[x as usize] = stamp;
        }
        self.adj[v as usize]
            .iter()
            .all(|&x| x == u || self.mark[x as usize] == stamp)
    }

    fn step(&mut self, v: u32) {
        let degree = self.adj[v as usize].len();
        if degree == 0 && self.rules.isolated {
            self.include(v, Rule::Isolated);
            return;
        }
        if degree == 1 && self.rules.pendant {
            let u = self.adj[v as usize][0];
            self.exclude(u, Rule::Pendant);
            self.include(v, Rule::Pendant);
            return;
        }
        if degree == 2 && self.rules.fold {
            let (u, w) = (self.adj[v as usize][0], self.adj[v as usize][1]);
            if self.adj[u as usize].binary_search(&w).is_err() {
                self.fold(v, u, w);
                return;
            }
        }
        if self.rules.domination && degree > 0 {
            let nbrs = self.adj[v as usize].clone();
            let mut removed = false;
            for u in nbrs {
                if self.alive[u as usize] && self.dominates(u, v) {
                    self.exclude(u, Rule::Domination);
                    removed = true;
                }
            }
            if removed {
                self.push(v);
            }
        }
    }

    fn run(mut self) -> Kernel {
        while let Some(v) = self.queue.pop_front() {
            self.queued[v as usize] = false;
            if self.alive[v as usize] {
                self.step(v);
            }
        }

        let kernel_to_ext: Vec<u32> = (0..self.adj.len() as u32).filter(|&v| self.alive[v as usize]).collect();
        let mut index = vec![u32::MAX; self.adj.len()];
        for (i, &v) in kernel_to_ext.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let rows: Vec<Vec<u32>> = kernel_to_ext
            .iter()
            .map(|&v| {
                let mut row: Vec<u32> = self.adj[v as usize].iter().map(|&u| index[u as usize]).collect();
                row.sort_unstable();
                row
            })
            .collect();

        let summary = [Rule::Isolated, Rule::Pendant, Rule::Fold, Rule::Domination]
            .into_iter()
            .filter(|&r| self.counts[r as usize].0 > 0)
            .map(|r| ReductionSummary {
                rule: r.name().to_string(),
                applications: self.counts[r as usize].0,
                vertices_after: self.counts[r as usize].1,
            })
            .collect();

        Kernel {
            graph: CsrGraph::from_sorted_rows(&rows),
            kernel_to_ext,
            original_vertices: self.original,
            extended_vertices: self.adj.len(),
            trace: self.trace,
            summary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_mis(g: &CsrGraph) -> usize {
        let n = g.num_vertices();
        (0u32..1 << n)
            .filter(|mask| g.edges().all(|(u, v)| mask & (1 << u) == 0 || mask & (1 << v) == 0))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn path_of_five_reduces_completely() {
        let g = CsrGraph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let k = kernelize(&g);
        assert_eq!(k.graph().num_vertices(), 0);
        let mut forced = k.forced_in();
        forced.sort_unstable();
        assert_eq!(forced, vec![0, 2, 4]);
        let lifted = k.lift(&[]);
        assert_eq!(lifted.len(), 3);
        assert!(g.is_independent(&lifted));
    }

    #[test]
    fn four_cycle_folds() {
        let g = CsrGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(brute_force_mis(&g), 2);
        let k = kernelize(&g);
        assert!(k.trace().iter().any(|r| matches!(r, Reduction::Fold { .. })));
        assert_eq!(k.graph().num_vertices(), 0);
        let lifted = k.lift(&[]);
        assert_eq!(lifted.len(), 2);
        assert!(g.is_independent(&lifted));
    }

    #[test]
    fn triangle_is_removed_by_domination() {
        let g = CsrGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let k = kernelize(&g);
        assert_eq!(k.graph().num_vertices(), 0);
        assert_eq!(k.lift(&[]).len(), 1);
    }

    #[test]
    fn disabled_rules_leave_graph_alone() {
        let g = CsrGraph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let none = ReductionToggles {
            isolated: false,
            pendant: false,
            fold: false,
            domination: false,
        };
        let k = kernelize_with(&g, none);
        assert_eq!(k.graph(), &g);
        assert_eq!(k.offset(), 0);
        assert!(k.summary().is_empty());
    }

    #[test]
    fn lifting_a_kernel_solution_keeps_independence() {
        // Petersen graph is 3-regular and has no dominated vertices.
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = CsrGraph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap();
        let k = kernelize(&g);
        assert_eq!(k.graph().num_vertices(), 10);
        let lifted = k.lift(&[0, 2, 8]);
        assert!(g.is_independent(&lifted));
    }
}
