use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::{CsrGraph, MisError};

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Search exhausted its own stopping rule. For the exact solver this means
    /// the result is a certified optimum.
    Converged,
    TimeLimit,
    /// The objective reached the supplied upper bound.
    OptimalBoundHit,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::TimeLimit => "time_limit",
            Termination::OptimalBoundHit => "optimal_bound_hit",
        })
    }
}

/// One line of the reduction trace: how often a rule fired and how many
/// vertices were left once it had been applied for the last time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub rule: String,
    pub applications: usize,
    pub vertices_after: usize,
}

/// An independent set together with solver telemetry.
///
/// Construction checks independence against the graph, so a value of this type
/// is always a valid independent set of the graph it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentSetSolution {
    vertices: Vec<u32>,
    solver: String,
    wall_time_s: f64,
    iterations: u64,
    reductions: Vec<ReductionSummary>,
    termination: Termination,
}

impl IndependentSetSolution {
    pub fn new(graph: &CsrGraph, mut vertices: Vec<u32>, solver: impl Into<String>) -> Result<Self, MisError> {
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(MisError::InvalidSolution(format!("vertex {} listed twice", w[0])));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v as usize >= graph.num_vertices()) {
            return Err(MisError::VertexOutOfRange {
                vertex: v as u64,
                vertices: graph.num_vertices(),
            });
        }
        if !graph.is_independent(&vertices) {
            let bad = vertices
                .iter()
                .flat_map(|&v| graph.neighbors(v).iter().map(move |&u| (v, u)))
                .find(|(_, u)| vertices.binary_search(u).is_ok())
                .expect("dependent set has an internal edge");
            return Err(MisError::InvalidSolution(format!(
                "edge ({}, {}) inside the set",
                bad.0, bad.1
            )));
        }
        Ok(Self {
            vertices,
            solver: solver.into(),
            wall_time_s: 0.0,
            iterations: 0,
            reductions: Vec::new(),
            termination: Termination::Converged,
        })
    }

    /// Sorted vertex ids.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Cardinality (unit vertex weights).
    pub fn objective(&self) -> usize {
        self.vertices.len()
    }

    pub fn solver(&self) -> &str {
        &self.solver
    }

    pub fn wall_time(&self) -> Duration {
        Duration::from_secs_f64(self.wall_time_s)
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn reductions(&self) -> &[ReductionSummary] {
        &self.reductions
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn with_solver(mut self, solver: impl Into<String>) -> Self {
        self.solver = solver.into();
        self
    }

    pub fn with_wall_time(mut self, t: Duration) -> Self {
        self.wall_time_s = t.as_secs_f64();
        self
    }

    pub fn with_iterations(mut self, n: u64) -> Self {
        self.iterations = n;
        self
    }

    pub fn with_reductions(mut self, r: Vec<ReductionSummary>) -> Self {
        self.reductions = r;
        self
    }

    pub fn with_termination(mut self, t: Termination) -> Self {
        self.termination = t;
        self
    }
}

/// Which kernelization rules are enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReductionToggles {
    pub isolated: bool,
    pub pendant: bool,
    pub fold: bool,
    pub domination: bool,
}

impl Default for ReductionToggles {
    fn default() -> Self {
        Self {
            isolated: true,
            pendant: true,
            fold: true,
            domination: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Wall-clock budget in seconds.
    pub time_limit_s: Option<f64>,
    pub seed: u64,
    pub population_size: usize,
    /// Generations without improving the best member before stopping.
    pub max_unsuccessful_generations: usize,
    /// Known upper bound on the optimum; reaching it stops the search.
    pub upper_bound: Option<usize>,
    pub reductions: ReductionToggles,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit_s: None,
            seed: 0,
            population_size: 8,
            max_unsuccessful_generations: 100,
            upper_bound: None,
            reductions: ReductionToggles::default(),
        }
    }
}

impl SolverConfig {
    pub fn time_limit(&self) -> Option<Duration> {
        self.time_limit_s.map(Duration::from_secs_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_dependent_sets() {
        let g = CsrGraph::from_edges(3, [(0, 1)]).unwrap();
        assert!(IndependentSetSolution::new(&g, vec![0, 2], "t").is_ok());
        assert!(matches!(
            IndependentSetSolution::new(&g, vec![1, 0], "t"),
            Err(MisError::InvalidSolution(_))
        ));
        assert!(IndependentSetSolution::new(&g, vec![2, 2], "t").is_err());
        assert!(IndependentSetSolution::new(&g, vec![3], "t").is_err());
    }

    #[test]
    fn vertices_come_back_sorted() {
        let g = CsrGraph::empty(4);
        let s = IndependentSetSolution::new(&g, vec![3, 0, 2], "t").unwrap();
        assert_eq!(s.vertices(), &[0, 2, 3]);
        assert_eq!(s.objective(), 3);
    }
}
