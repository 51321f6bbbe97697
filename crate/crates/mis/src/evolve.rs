//! Evolutionary search over a population of independent sets.
//!
//! Offspring are built by cutting the graph with a node separator and taking
//! one parent's vertices on each side. Removing the separator leaves an
//! independent set, which is repaired to maximality and then improved by
//! 2-improvement local search before it competes for a population slot.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::greedy::{extend_min_degree, greedy_seed};
use crate::local_search::LocalSearch;
use crate::separator::{partition_separator, Part, Separation};
use crate::{CsrGraph, IndependentSetSolution, SolverConfig, Termination};

#[derive(Clone)]
struct Member {
    mask: Vec<bool>,
    size: usize,
}

impl Member {
    fn from_mask(mask: Vec<bool>) -> Self {
        let size = mask.iter().filter(|&&b| b).count();
        Self { mask, size }
    }

    fn overlap(&self, other: &Member) -> usize {
        self.mask.iter().zip(&other.mask).filter(|(a, b)| **a && **b).count()
    }
}

pub(crate) struct EvolveOutcome {
    pub mask: Vec<bool>,
    pub generations: u64,
    pub termination: Termination,
}

/// Runs the evolutionary search with the limits in `config`.
pub fn evolve(graph: &CsrGraph, config: &SolverConfig) -> IndependentSetSolution {
    let start = Instant::now();
    let deadline = config.time_limit().map(|t| start + t);
    let out = evolve_until(graph, config, deadline, config.upper_bound);
    let vertices = mask_to_vertices(&out.mask);
    IndependentSetSolution::new(graph, vertices, "evolve")
        .expect("population members are independent")
        .with_iterations(out.generations)
        .with_termination(out.termination)
        .with_wall_time(start.elapsed())
}

pub(crate) fn mask_to_vertices(mask: &[bool]) -> Vec<u32> {
    mask.iter()
        .enumerate()
        .filter_map(|(v, &b)| b.then_some(v as u32))
        .collect()
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

fn improve(graph: &CsrGraph, mask: Vec<bool>, rng: &mut ChaCha8Rng, deadline: Option<Instant>) -> Member {
    let mut ls = LocalSearch::from_mask(graph, &mask);
    ls.run(rng, deadline);
    Member::from_mask(ls.into_mask())
}

fn combine(graph: &CsrGraph, sep: &Separation, left: &Member, right: &Member, keys: &[u64]) -> Vec<bool> {
    let mut mask: Vec<bool> = sep
        .parts()
        .iter()
        .enumerate()
        .map(|(v, p)| match p {
            Part::First => left.mask[v],
            Part::Second => right.mask[v],
            Part::Separator => false,
        })
        .collect();
    extend_min_degree(graph, &mut mask, keys);
    mask
}

fn tournament(pop: &[Member], rng: &mut ChaCha8Rng, not: Option<usize>) -> usize {
    let pick = |rng: &mut ChaCha8Rng| loop {
        let i = rng.random_range(0..pop.len());
        if Some(i) != not {
            return i;
        }
    };
    let a = pick(rng);
    let b = pick(rng);
    if pop[b].size > pop[a].size {
        b
    } else {
        a
    }
}

/// Index of the member to replace with `child`: among strictly smaller
/// members, the one sharing the most vertices with the child (then smallest,
/// then lowest index).
fn eviction_slot(pop: &[Member], child: &Member) -> Option<usize> {
    if pop.iter().any(|m| m.mask == child.mask) {
        return None;
    }
    pop.iter()
        .enumerate()
        .filter(|(_, m)| m.size < child.size)
        .map(|(i, m)| (i, m.overlap(child), m.size))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)).then(b.0.cmp(&a.0)))
        .map(|(i, _, _)| i)
}

pub(crate) fn evolve_until(
    graph: &CsrGraph,
    config: &SolverConfig,
    deadline: Option<Instant>,
    bound: Option<usize>,
) -> EvolveOutcome {
    let n = graph.num_vertices();
    let pop_size = config.population_size.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pop: Vec<Member> = Vec::with_capacity(pop_size);
    for i in 0..pop_size {
        let mut stream = ChaCha8Rng::seed_from_u64(config.seed);
        stream.set_stream(i as u64 + 1);
        let seed = greedy_seed(graph, &mut stream);
        let mut mask = vec![false; n];
        for &v in seed.vertices() {
            mask[v as usize] = true;
        }
        pop.push(improve(graph, mask, &mut stream, deadline));
        if expired(deadline) {
            break;
        }
    }

    let best_of = |pop: &[Member]| -> usize {
        (0..pop.len())
            .max_by(|&a, &b| pop[a].size.cmp(&pop[b].size).then(b.cmp(&a)))
            .expect("population is not empty")
    };
    let mut best = best_of(&pop);
    let hit = |size: usize| bound.is_some_and(|b| size >= b);

    let mut generations = 0u64;
    let mut unsuccessful = 0usize;
    let termination = loop {
        if hit(pop[best].size) {
            break Termination::OptimalBoundHit;
        }
        if expired(deadline) {
            break Termination::TimeLimit;
        }
        if unsuccessful >= config.max_unsuccessful_generations || pop.len() < 2 || n == 0 {
            break Termination::Converged;
        }
        generations += 1;

        let p1 = tournament(&pop, &mut rng, None);
        let p2 = tournament(&pop, &mut rng, Some(p1));
        let sep = partition_separator(graph, &mut rng);
        let keys: Vec<u64> = (0..n).map(|_| rng.random()).collect();
        let a = improve(
            graph,
            combine(graph, &sep, &pop[p1], &pop[p2], &keys),
            &mut rng,
            deadline,
        );
        let b = improve(
            graph,
            combine(graph, &sep, &pop[p2], &pop[p1], &keys),
            &mut rng,
            deadline,
        );
        let child = if b.size > a.size { b } else { a };

        if child.size > pop[best].size {
            unsuccessful = 0;
        } else {
            unsuccessful += 1;
        }
        if let Some(slot) = eviction_slot(&pop, &child) {
            pop[slot] = child;
            best = best_of(&pop);
        }
    };

    EvolveOutcome {
        mask: pop[best].mask.clone(),
        generations,
        termination,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_graph_is_solved_immediately() {
        let g = CsrGraph::empty(12);
        let s = evolve(&g, &SolverConfig::default());
        assert_eq!(s.objective(), 12);
        assert!(s.iterations() <= 101);
    }

    #[test]
    fn bound_stops_search() {
        let g = CsrGraph::empty(12);
        let cfg = SolverConfig {
            upper_bound: Some(12),
            ..SolverConfig::default()
        };
        let s = evolve(&g, &cfg);
        assert_eq!(s.termination(), Termination::OptimalBoundHit);
        assert_eq!(s.iterations(), 0);
    }

    #[test]
    fn eviction_prefers_closest_smaller_member() {
        let m = |bits: &[u8]| Member::from_mask(bits.iter().map(|&b| b == 1).collect());
        let pop = vec![m(&[1, 0, 0, 0]), m(&[0, 1, 1, 0]), m(&[1, 0, 1, 0])];
        let child = m(&[1, 0, 1, 1]);
        // Members 1 and 2 both have size 2; member 2 shares two vertices.
        assert_eq!(eviction_slot(&pop, &child), Some(2));
        // Duplicates never enter.
        assert_eq!(eviction_slot(&pop, &pop[1].clone()), None);
        // Nothing smaller: no eviction.
        assert_eq!(eviction_slot(&pop, &m(&[0, 0, 0, 1])), None);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut edges = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for u in 0..60u32 {
            for v in u + 1..60 {
                if rng.random_bool(0.07) {
                    edges.push((u, v));
                }
            }
        }
        let g = CsrGraph::from_edges(60, edges).unwrap();
        let cfg = SolverConfig {
            seed: 11,
            ..SolverConfig::default()
        };
        assert_eq!(evolve(&g, &cfg).vertices(), evolve(&g, &cfg).vertices());
    }
}
