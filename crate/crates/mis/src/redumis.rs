//! Reduce, evolve, lift.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evolve::{evolve_until, mask_to_vertices};
use crate::greedy::greedy_seed;
use crate::kernel::kernelize_with;
use crate::local_search::{two_improvement, LocalSearch};
use crate::{CsrGraph, IndependentSetSolution, SolverConfig, Termination};

/// Kernelizes the graph, evolves a population on the kernel with whatever
/// time is left, lifts the best member and polishes it with local search.
///
/// A greedy seed improved by local search on the full graph (same seed as
/// `config.seed`) serves as incumbent, so the result is never smaller than
/// that. Reaching `config.upper_bound` stops the search at once.
pub fn redumis_solve(graph: &CsrGraph, config: &SolverConfig) -> IndependentSetSolution {
    let start = Instant::now();
    let deadline = config.time_limit().map(|t| start + t);
    let bound_hit = |size: usize| config.upper_bound.is_some_and(|b| size >= b);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let incumbent =
        two_improvement(graph, &greedy_seed(graph, &mut rng), &mut rng).expect("greedy output is independent");

    let kernel = kernelize_with(graph, config.reductions);
    if bound_hit(incumbent.objective()) {
        return incumbent
            .with_solver("mis")
            .with_iterations(0)
            .with_reductions(kernel.summary().to_vec())
            .with_termination(Termination::OptimalBoundHit)
            .with_wall_time(start.elapsed());
    }

    let kernel_graph = kernel.graph();
    let (kernel_solution, generations, mut termination) = if kernel_graph.num_vertices() == 0 {
        (Vec::new(), 0, Termination::Converged)
    } else {
        let kernel_bound = config.upper_bound.map(|b| b.saturating_sub(kernel.offset()));
        let out = evolve_until(kernel_graph, config, deadline, kernel_bound);
        (mask_to_vertices(&out.mask), out.generations, out.termination)
    };

    let lifted = kernel.lift(&kernel_solution);
    let mut ls = LocalSearch::new(graph, &lifted);
    if !ls.run(&mut rng, deadline) {
        termination = Termination::TimeLimit;
    }
    let mut vertices = ls.vertices();
    if vertices.len() < incumbent.objective() {
        vertices = incumbent.vertices().to_vec();
    }
    if bound_hit(vertices.len()) {
        termination = Termination::OptimalBoundHit;
    }

    IndependentSetSolution::new(graph, vertices, "mis")
        .expect("lifted kernel solutions are independent")
        .with_iterations(generations)
        .with_reductions(kernel.summary().to_vec())
        .with_termination(termination)
        .with_wall_time(start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_kernel_needs_no_evolution() {
        let g = CsrGraph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let s = redumis_solve(&g, &SolverConfig::default());
        assert_eq!(s.objective(), 3);
        assert_eq!(s.iterations(), 0);
        assert_eq!(s.termination(), Termination::Converged);
        assert!(!s.reductions().is_empty());
    }

    #[test]
    fn reaching_the_bound_is_reported() {
        let g = CsrGraph::from_edges(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        let cfg = SolverConfig {
            upper_bound: Some(3),
            ..SolverConfig::default()
        };
        let s = redumis_solve(&g, &cfg);
        assert_eq!(s.objective(), 3);
        assert_eq!(s.termination(), Termination::OptimalBoundHit);
    }
}
