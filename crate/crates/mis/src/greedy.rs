//! Minimum-residual-degree greedy construction.

use std::collections::BTreeSet;

use rand::Rng;

use crate::{CsrGraph, IndependentSetSolution};

/// Greedy maximal independent set: repeatedly take a vertex of minimum degree
/// in the remaining graph and delete its closed neighborhood.
///
/// Ties on degree are broken by a random key drawn from `rng`, then by lower
/// id, so different generator states give different (equally greedy) seeds.
pub fn greedy_seed<R: Rng + ?Sized>(graph: &CsrGraph, rng: &mut R) -> IndependentSetSolution {
    let keys: Vec<u64> = (0..graph.num_vertices()).map(|_| rng.random()).collect();
    let mut selected = vec![false; graph.num_vertices()];
    extend_min_degree(graph, &mut selected, &keys);
    finish(graph, &selected, "greedy")
}

/// Same construction with pure lowest-id tie-breaking.
pub fn greedy_min_degree(graph: &CsrGraph) -> IndependentSetSolution {
    let keys = vec![0u64; graph.num_vertices()];
    let mut selected = vec![false; graph.num_vertices()];
    extend_min_degree(graph, &mut selected, &keys);
    finish(graph, &selected, "greedy")
}

fn finish(graph: &CsrGraph, selected: &[bool], name: &str) -> IndependentSetSolution {
    let vertices = selected
        .iter()
        .enumerate()
        .filter_map(|(v, &s)| s.then_some(v as u32))
        .collect();
    IndependentSetSolution::new(graph, vertices, name).expect("greedy output is independent")
}

/// Extends the independent set `selected` to a maximal one by min-residual-degree
/// insertion over the vertices not yet dominated by it.
pub(crate) fn extend_min_degree(graph: &CsrGraph, selected: &mut [bool], keys: &[u64]) {
    let n = graph.num_vertices();
    let mut blocked = vec![false; n];
    for v in 0..n as u32 {
        if selected[v as usize] {
            blocked[v as usize] = true;
            for &u in graph.neighbors(v) {
                blocked[u as usize] = true;
            }
        }
    }
    let mut degree = vec![0u32; n];
    let mut queue = BTreeSet::new();
    for v in 0..n as u32 {
        if blocked[v as usize] {
            continue;
        }
        let d = graph.neighbors(v).iter().filter(|&&u| !blocked[u as usize]).count() as u32;
        degree[v as usize] = d;
        queue.insert((d, keys[v as usize], v));
    }

    while let Some((_, _, v)) = queue.pop_first() {
        selected[v as usize] = true;
        blocked[v as usize] = true;
        for &u in graph.neighbors(v) {
            if blocked[u as usize] {
                continue;
            }
            blocked[u as usize] = true;
            queue.remove(&(degree[u as usize], keys[u as usize], u));
            for &w in graph.neighbors(u) {
                if blocked[w as usize] {
                    continue;
                }
                let wi = w as usize;
                queue.remove(&(degree[wi], keys[wi], w));
                degree[wi] -= 1;
                queue.insert((degree[wi], keys[wi], w));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complete(n: u32) -> CsrGraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        CsrGraph::from_edges(n as usize, edges).unwrap()
    }

    #[test]
    fn edgeless_graph_takes_everything() {
        let g = CsrGraph::empty(7);
        let s = greedy_seed(&g, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(s.objective(), 7);
    }

    #[test]
    fn complete_graph_takes_one() {
        let s = greedy_seed(&complete(5), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(s.objective(), 1);
    }

    #[test]
    fn path_takes_endpoints() {
        let g = CsrGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        for seed in 0..10 {
            let s = greedy_seed(&g, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(s.vertices(), &[0, 2]);
        }
        assert_eq!(greedy_min_degree(&g).vertices(), &[0, 2]);
    }

    #[test]
    fn lowest_id_tie_break() {
        // 4-cycle: every vertex has degree 2, so vertex 0 goes first, then 2.
        let g = CsrGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(greedy_min_degree(&g).vertices(), &[0, 2]);
    }

    #[test]
    fn result_is_maximal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = 40;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.1) {
                        edges.push((u, v));
                    }
                }
            }
            let g = CsrGraph::from_edges(n as usize, edges).unwrap();
            let s = greedy_seed(&g, &mut rng);
            assert!(g.is_maximal(s.vertices()));
        }
    }
}
