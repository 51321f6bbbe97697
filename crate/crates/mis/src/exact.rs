//! Branch-and-reduce maximum independent set.
//!
//! Every search node is kernelized, split into connected components, bounded
//! by a greedy clique cover and, if still open, branched on a vertex of
//! maximum degree (take it and drop its neighbors, or drop it).

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::greedy::greedy_seed;
use crate::kernel::kernelize;
use crate::local_search::two_improvement;
use crate::{CsrGraph, IndependentSetSolution, Termination};

struct Search {
    deadline: Option<Instant>,
    timed_out: bool,
    nodes: u64,
}

impl Search {
    fn out_of_time(&mut self) -> bool {
        if !self.timed_out && self.nodes.is_multiple_of(64) {
            if let Some(d) = self.deadline {
                self.timed_out = Instant::now() >= d;
            }
        }
        self.timed_out
    }

    /// A maximum independent set of `g` if its size exceeds `floor`.
    fn solve(&mut self, g: &CsrGraph, floor: i64) -> Option<Vec<u32>> {
        self.nodes += 1;
        if self.out_of_time() {
            return None;
        }
        let kernel = kernelize(g);
        let kg = kernel.graph();
        let offset = kernel.offset() as i64;
        let need = floor - offset;
        if kg.num_vertices() == 0 {
            return (offset > floor).then(|| kernel.lift(&[]));
        }
        if clique_cover_bound(kg) as i64 <= need {
            return None;
        }

        let components = kg.components();
        let inner = if components.len() > 1 {
            let mut total = Vec::new();
            let mut remaining_bound: i64 = components
                .iter()
                .map(|c| clique_cover_bound(&kg.induced(c).0) as i64)
                .sum();
            let mut found = 0i64;
            for comp in &components {
                let (sub, map) = kg.induced(comp);
                let sub_bound = clique_cover_bound(&sub) as i64;
                remaining_bound -= sub_bound;
                // Give up early when even optimal components cannot beat `need`.
                let sub_floor = (need - found - remaining_bound).max(-1);
                let best = self.solve(&sub, sub_floor)?;
                found += best.len() as i64;
                total.extend(best.into_iter().map(|v| map[v as usize]));
            }
            (found > need).then_some(total)
        } else {
            self.branch(kg, need)
        }?;
        Some(kernel.lift(&inner))
    }

    fn branch(&mut self, g: &CsrGraph, floor: i64) -> Option<Vec<u32>> {
        let n = g.num_vertices() as u32;
        let v = (0..n)
            .max_by(|&a, &b| g.degree(a).cmp(&g.degree(b)).then(b.cmp(&a)))
            .expect("non-empty graph");

        let mut best: Option<Vec<u32>> = None;
        let mut floor = floor;

        let mut closed: Vec<u32> = g.neighbors(v).to_vec();
        closed.push(v);
        let rest: Vec<u32> = (0..n).filter(|u| !closed.contains(u)).collect();
        let (sub, map) = g.induced(&rest);
        if let Some(sol) = self.solve(&sub, floor - 1) {
            let mut sol: Vec<u32> = sol.into_iter().map(|u| map[u as usize]).collect();
            sol.push(v);
            floor = sol.len() as i64;
            best = Some(sol);
        }
        if self.timed_out {
            return best;
        }

        let rest: Vec<u32> = (0..n).filter(|&u| u != v).collect();
        let (sub, map) = g.induced(&rest);
        if let Some(sol) = self.solve(&sub, floor) {
            best = Some(sol.into_iter().map(|u| map[u as usize]).collect());
        }
        best
    }
}

/// Number of cliques in a greedy clique cover: an upper bound on the
/// independence number.
pub fn clique_cover_bound(g: &CsrGraph) -> usize {
    let n = g.num_vertices() as u32;
    let mut order: Vec<u32> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut cliques: Vec<Vec<u32>> = Vec::new();
    for v in order {
        match cliques.iter_mut().find(|c| c.iter().all(|&u| g.has_edge(u, v))) {
            Some(c) => c.push(v),
            None => cliques.push(vec![v]),
        }
    }
    cliques.len()
}

/// Maximum independent set by branch and reduce.
///
/// Returns a certified optimum with termination `Converged`, or on timeout the
/// best set found so far with termination `TimeLimit`.
pub fn exact_bnb(graph: &CsrGraph, time_limit: Option<Duration>) -> IndependentSetSolution {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let incumbent =
        two_improvement(graph, &greedy_seed(graph, &mut rng), &mut rng).expect("greedy output is independent");

    let mut search = Search {
        deadline: time_limit.map(|t| start + t),
        timed_out: false,
        nodes: 0,
    };
    let improved = search.solve(graph, incumbent.objective() as i64);
    let vertices = match improved {
        Some(v) if v.len() > incumbent.objective() => v,
        _ => incumbent.vertices().to_vec(),
    };
    let termination = if search.timed_out {
        Termination::TimeLimit
    } else {
        Termination::Converged
    };
    IndependentSetSolution::new(graph, vertices, "exact")
        .expect("branch and reduce returns independent sets")
        .with_iterations(search.nodes)
        .with_termination(termination)
        .with_wall_time(start.elapsed())
}
