//! Pairwise scheduling constraints and the graphs built from them.

use std::collections::BTreeMap;
use std::io::Write;

use constel_mis::{io as mis_io, CsrGraph, MisError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astro::{attitude_angle, Attitude, Epoch, SatId};
use crate::tasking::{Collect, RequestId, TileId};

#[derive(Debug, Error)]
pub enum SchedError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("expected a {expected} graph")]
    KindMismatch { expected: GraphKind },
    #[error("graphs are over different collect sets: {0}")]
    VertexMismatch(String),
    #[error(transparent)]
    Mis(#[from] MisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgilityModel {
    pub slew_rate_deg_s: f64,
    pub settle_s: f64,
}

impl Default for AgilityModel {
    fn default() -> Self {
        Self {
            slew_rate_deg_s: 1.0,
            settle_s: 15.0,
        }
    }
}

impl AgilityModel {
    pub fn new(slew_rate_deg_s: f64, settle_s: f64) -> Result<Self, SchedError> {
        let m = Self {
            slew_rate_deg_s,
            settle_s,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), SchedError> {
        if !(self.slew_rate_deg_s > 0.0 && self.slew_rate_deg_s.is_finite()) {
            return Err(SchedError::InvalidInput(format!(
                "slew rate {} must be positive",
                self.slew_rate_deg_s
            )));
        }
        if !(self.settle_s >= 0.0 && self.settle_s.is_finite()) {
            return Err(SchedError::InvalidInput(format!(
                "settle time {} must be non-negative",
                self.settle_s
            )));
        }
        Ok(())
    }

    /// Slew time for a half-turn, the largest any maneuver can need.
    pub fn max_slew_time(&self) -> f64 {
        180.0 / self.slew_rate_deg_s + self.settle_s
    }
}

/// Time to slew between two attitudes and settle, s.
pub fn slew_time(q1: &Attitude, q2: &Attitude, m: &AgilityModel) -> f64 {
    attitude_angle(q1, q2) / m.slew_rate_deg_s + m.settle_s
}

fn time_ordered<'a>(a: &'a Collect, b: &'a Collect) -> (&'a Collect, &'a Collect) {
    if (b.t_s, b.id) < (a.t_s, a.id) {
        (b, a)
    } else {
        (a, b)
    }
}

/// Whether one satellite can take both collects: the gap between them covers
/// the slew from the end attitude of the earlier one to the start attitude of
/// the later one.
pub fn k_agility(xi: &Collect, xj: &Collect, m: &AgilityModel) -> bool {
    let (a, b) = time_ordered(xi, xj);
    let gap = b.t_s - a.t_e;
    gap >= 0.0 && slew_time(&a.q_e, &b.q_s, m) <= gap
}

pub fn k_repetition(xi: &Collect, xj: &Collect) -> bool {
    xi.tile != xj.tile
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SchedulingConstraint {
    /// Applies to same-satellite pairs only.
    Agility(AgilityModel),
    Repetition,
}

impl SchedulingConstraint {
    pub fn compatible(&self, a: &Collect, b: &Collect) -> bool {
        match self {
            SchedulingConstraint::Agility(m) => a.sat != b.sat || k_agility(a, b, m),
            SchedulingConstraint::Repetition => k_repetition(a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Infeasibility,
    Feasibility,
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphKind::Infeasibility => "infeasibility",
            GraphKind::Feasibility => "feasibility",
        })
    }
}

/// Directed graph in CSR form with sorted out-neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Digraph {
    fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            targets.extend(row);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.successors(u).binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_vertices() as u32).flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    /// Kahn's algorithm; `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<u32>> {
        let n = self.num_vertices();
        let mut indeg = vec![0usize; n];
        for &v in &self.targets {
            indeg[v as usize] += 1;
        }
        let mut stack: Vec<u32> = (0..n as u32).rev().filter(|&v| indeg[v as usize] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in self.successors(u) {
                indeg[v as usize] -= 1;
                if indeg[v as usize] == 0 {
                    stack.push(v);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexInfo {
    pub collect: u32,
    pub sat: SatId,
    pub tile: TileId,
    pub request: RequestId,
    pub t_s: Epoch,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Adjacency {
    Undirected(CsrGraph),
    Directed(Digraph),
}

/// Collects as vertices, scheduling conflicts or transitions as edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleGraph {
    adjacency: Adjacency,
    vertices: Vec<VertexInfo>,
}

impl ScheduleGraph {
    pub fn kind(&self) -> GraphKind {
        match self.adjacency {
            Adjacency::Undirected(_) => GraphKind::Infeasibility,
            Adjacency::Directed(_) => GraphKind::Feasibility,
        }
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn undirected(&self) -> Option<&CsrGraph> {
        match &self.adjacency {
            Adjacency::Undirected(g) => Some(g),
            Adjacency::Directed(_) => None,
        }
    }

    pub fn directed(&self) -> Option<&Digraph> {
        match &self.adjacency {
            Adjacency::Directed(g) => Some(g),
            Adjacency::Undirected(_) => None,
        }
    }

    pub fn vertices(&self) -> &[VertexInfo] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        match &self.adjacency {
            Adjacency::Undirected(g) => g.num_edges(),
            Adjacency::Directed(g) => g.num_edges(),
        }
    }

    /// Whether `u` and `v` are joined, ignoring direction.
    pub fn connected(&self, u: u32, v: u32) -> bool {
        match &self.adjacency {
            Adjacency::Undirected(g) => g.has_edge(u, v),
            Adjacency::Directed(g) => g.has_edge(u, v) || g.has_edge(v, u),
        }
    }

    /// Edges as `(u, v)`: `u < v` when undirected, tail first when directed.
    pub fn edges(&self) -> Box<dyn Iterator<Item = (u32, u32)> + '_> {
        match &self.adjacency {
            Adjacency::Undirected(g) => Box::new(g.edges()),
            Adjacency::Directed(g) => Box::new(g.edges()),
        }
    }
}

fn vertex_payload(collects: &[Collect], weights: Option<&[f64]>) -> Result<Vec<VertexInfo>, SchedError> {
    if let Some(w) = weights {
        if w.len() != collects.len() {
            return Err(SchedError::InvalidInput("one weight per collect is required".into()));
        }
    }
    collects
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.id as usize != i {
                return Err(SchedError::InvalidInput(format!(
                    "collect ids must be dense and ordered; position {i} holds id {}",
                    c.id
                )));
            }
            Ok(VertexInfo {
                collect: c.id,
                sat: c.sat,
                tile: c.tile,
                request: c.request,
                t_s: c.t_s,
                weight: weights.map_or(1.0, |w| w[i]),
            })
        })
        .collect()
}

/// Collect indices per satellite, each list sorted by `(t_s, id)`.
fn by_satellite(collects: &[Collect]) -> BTreeMap<SatId, Vec<u32>> {
    let mut groups: BTreeMap<SatId, Vec<u32>> = BTreeMap::new();
    for c in collects {
        groups.entry(c.sat).or_default().push(c.id);
    }
    for list in groups.values_mut() {
        list.sort_by(|&a, &b| (collects[a as usize].t_s, a).cmp(&(collects[b as usize].t_s, b)));
    }
    groups
}

/// Undirected graph joining every pair of mutually exclusive collects.
///
/// Same-satellite pairs are checked only within the worst-case slew time of
/// each other; beyond it the agility constraint always holds. Repetition
/// edges come from grouping by tile.
pub fn build_infeasibility_graph(collects: &[Collect], m: &AgilityModel) -> Result<ScheduleGraph, SchedError> {
    build_infeasibility_graph_weighted(collects, m, None)
}

pub fn build_infeasibility_graph_weighted(
    collects: &[Collect],
    m: &AgilityModel,
    weights: Option<&[f64]>,
) -> Result<ScheduleGraph, SchedError> {
    m.validate()?;
    let vertices = vertex_payload(collects, weights)?;
    let window = m.max_slew_time();

    let groups: Vec<Vec<u32>> = by_satellite(collects).into_values().collect();
    let mut edges: Vec<(u32, u32)> = groups
        .par_iter()
        .flat_map_iter(|ids| {
            let mut out = Vec::new();
            for (i, &a) in ids.iter().enumerate() {
                let xa = &collects[a as usize];
                for &b in &ids[i + 1..] {
                    let xb = &collects[b as usize];
                    if xb.t_s - xa.t_e >= window {
                        break;
                    }
                    if !k_agility(xa, xb, m) {
                        out.push((a, b));
                    }
                }
            }
            out
        })
        .collect();

    let mut tiles: BTreeMap<TileId, Vec<u32>> = BTreeMap::new();
    for c in collects {
        tiles.entry(c.tile).or_default().push(c.id);
    }
    for ids in tiles.values() {
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    let g = CsrGraph::from_edges(collects.len(), edges)?;
    Ok(ScheduleGraph {
        adjacency: Adjacency::Undirected(g),
        vertices,
    })
}

/// Reference builder checking every pair. Quadratic; for tests.
pub fn build_infeasibility_graph_brute(collects: &[Collect], m: &AgilityModel) -> Result<ScheduleGraph, SchedError> {
    m.validate()?;
    let vertices = vertex_payload(collects, None)?;
    let mut edges = Vec::new();
    for (i, a) in collects.iter().enumerate() {
        for b in &collects[i + 1..] {
            if (a.sat == b.sat && !k_agility(a, b, m)) || !k_repetition(a, b) {
                edges.push((a.id, b.id));
            }
        }
    }
    Ok(ScheduleGraph {
        adjacency: Adjacency::Undirected(CsrGraph::from_edges(collects.len(), edges)?),
        vertices,
    })
}

/// Directed acyclic graph of allowed same-satellite transitions, earlier to later.
pub fn build_feasibility_graph(collects: &[Collect], m: &AgilityModel) -> Result<ScheduleGraph, SchedError> {
    m.validate()?;
    let vertices = vertex_payload(collects, None)?;
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); collects.len()];
    for ids in by_satellite(collects).values() {
        for (i, &a) in ids.iter().enumerate() {
            let xa = &collects[a as usize];
            for &b in &ids[i + 1..] {
                let xb = &collects[b as usize];
                if k_agility(xa, xb, m) && k_repetition(xa, xb) {
                    rows[a as usize].push(b);
                }
            }
        }
    }
    Ok(ScheduleGraph {
        adjacency: Adjacency::Directed(Digraph::from_rows(rows)),
        vertices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub u: u32,
    pub v: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementarityReport {
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub feasible_pairs: usize,
    pub infeasible_same_satellite: usize,
    pub same_satellite_pairs: usize,
    pub cross_repetition: usize,
    pub cross_compatible: usize,
}

/// Checks that the two graphs split the pairs of collects consistently.
///
/// Every same-satellite pair must be in exactly one of the two graphs. A
/// cross-satellite pair is never feasible-graph edge, and is an
/// infeasibility edge exactly when both collects share a tile. The counts
/// confirm `|E_feas| + |E_infeas on same-satellite pairs| = sum C(n_s, 2)`.
pub fn verify_complementarity(gf: &ScheduleGraph, gi: &ScheduleGraph) -> Result<ComplementarityReport, SchedError> {
    let (Some(feas), Some(infeas)) = (gf.directed(), gi.undirected()) else {
        return Err(SchedError::KindMismatch {
            expected: if gf.directed().is_none() {
                GraphKind::Feasibility
            } else {
                GraphKind::Infeasibility
            },
        });
    };
    if gf.vertices.len() != gi.vertices.len() {
        return Err(SchedError::VertexMismatch(format!(
            "{} vs {} vertices",
            gf.vertices.len(),
            gi.vertices.len()
        )));
    }
    if let Some((i, _)) = gf
        .vertices
        .iter()
        .zip(&gi.vertices)
        .enumerate()
        .find(|(_, (a, b))| a != b)
    {
        return Err(SchedError::VertexMismatch(format!("vertex {i} differs")));
    }

    let vs = &gi.vertices;
    let n = vs.len() as u32;
    let mut report = ComplementarityReport {
        passed: true,
        counterexample: None,
        feasible_pairs: 0,
        infeasible_same_satellite: 0,
        same_satellite_pairs: 0,
        cross_repetition: 0,
        cross_compatible: 0,
    };
    let fail = |r: &mut ComplementarityReport, u, v, reason: &str| {
        if r.passed {
            r.passed = false;
            r.counterexample = Some(Counterexample {
                u,
                v,
                reason: reason.to_string(),
            });
        }
    };
    for u in 0..n {
        for v in u + 1..n {
            let f = feas.has_edge(u, v) || feas.has_edge(v, u);
            let i = infeas.has_edge(u, v);
            let (a, b) = (&vs[u as usize], &vs[v as usize]);
            if a.sat == b.sat {
                report.same_satellite_pairs += 1;
                report.feasible_pairs += f as usize;
                report.infeasible_same_satellite += i as usize;
                match (f, i) {
                    (true, true) => fail(&mut report, u, v, "same-satellite pair in both graphs"),
                    (false, false) => fail(&mut report, u, v, "same-satellite pair in neither graph"),
                    _ => {}
                }
            } else {
                if f {
                    fail(&mut report, u, v, "feasibility edge between satellites");
                }
                let same_tile = a.tile == b.tile;
                if i != same_tile {
                    fail(
                        &mut report,
                        u,
                        v,
                        if same_tile {
                            "cross-satellite repetition pair missing from infeasibility graph"
                        } else {
                            "cross-satellite compatible pair in infeasibility graph"
                        },
                    );
                }
                if same_tile {
                    report.cross_repetition += 1;
                } else {
                    report.cross_compatible += 1;
                }
            }
        }
    }
    let feas_total = feas.num_edges();
    if report.passed && feas_total != report.feasible_pairs {
        report.passed = false;
        report.counterexample = Some(Counterexample {
            u: 0,
            v: 0,
            reason: format!(
                "{feas_total} feasibility edges but {} feasible pairs",
                report.feasible_pairs
            ),
        });
    }
    if report.passed && report.feasible_pairs + report.infeasible_same_satellite != report.same_satellite_pairs {
        report.passed = false;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    /// Edges over unordered vertex pairs.
    pub density: f64,
    pub max_degree: usize,
    /// `degree_histogram[d]` vertices have degree `d` (in plus out when directed).
    pub degree_histogram: Vec<usize>,
}

pub fn graph_stats(g: &ScheduleGraph) -> GraphStats {
    let n = g.num_vertices();
    let mut degree = vec![0usize; n];
    for (u, v) in g.edges() {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut degree_histogram = vec![0usize; max_degree + 1];
    for d in degree {
        degree_histogram[d] += 1;
    }
    if n == 0 {
        degree_histogram.clear();
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let edges = g.num_edges();
    GraphStats {
        vertices: n,
        edges,
        density: if pairs == 0 { 0.0 } else { edges as f64 / pairs as f64 },
        max_degree,
        degree_histogram,
    }
}

/// Writes an infeasibility graph as `p edge n m` / `e u v` with 1-based ids.
pub fn export_dimacs<W: Write>(g: &ScheduleGraph, out: W) -> Result<(), SchedError> {
    let graph = g.undirected().ok_or(SchedError::KindMismatch {
        expected: GraphKind::Infeasibility,
    })?;
    mis_io::write_dimacs(graph, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn collect(id: u32, sat: u32, tile: u32, t_s: f64, t_e: f64, q_s: Attitude, q_e: Attitude) -> Collect {
        Collect {
            id,
            sat: SatId(sat),
            tile: TileId(tile),
            request: RequestId(tile),
            t_s: Epoch::from_seconds(t_s),
            t_e: Epoch::from_seconds(t_e),
            q_s,
            q_e,
        }
    }

    fn plain(id: u32, sat: u32, tile: u32, t_s: f64, t_e: f64) -> Collect {
        collect(id, sat, tile, t_s, t_e, Attitude::IDENTITY, Attitude::IDENTITY)
    }

    fn flipped() -> Attitude {
        Attitude::from_axis_angle(Vector3::x(), 180.0)
    }

    #[test]
    fn slew_examples() {
        let m = AgilityModel::default();
        assert_eq!(slew_time(&Attitude::IDENTITY, &flipped(), &m), 195.0);
        assert_eq!(slew_time(&flipped(), &flipped(), &m), 15.0);
        let q = Attitude::from_axis_angle(Vector3::y(), 90.0);
        let m2 = AgilityModel::new(2.0, 10.0).unwrap();
        assert!((slew_time(&Attitude::IDENTITY, &q, &m2) - 55.0).abs() < 1e-9);
        assert_eq!(m.max_slew_time(), 195.0);
        assert!(AgilityModel::new(0.0, 1.0).is_err());
    }

    #[test]
    fn agility_examples() {
        let m = AgilityModel::default();
        let a = collect(0, 0, 0, 0.0, 10.0, Attitude::IDENTITY, Attitude::IDENTITY);
        let b = collect(1, 0, 1, 210.0, 220.0, flipped(), flipped());
        assert!(k_agility(&a, &b, &m));
        assert!(k_agility(&b, &a, &m));
        let c = collect(2, 0, 1, 110.0, 120.0, flipped(), flipped());
        assert!(!k_agility(&a, &c, &m));
        let d = plain(3, 0, 2, 5.0, 30.0);
        assert!(!k_agility(&a, &d, &m));
    }

    #[test]
    fn repetition_examples() {
        assert!(!k_repetition(&plain(0, 0, 4, 0.0, 1.0), &plain(1, 1, 4, 0.0, 1.0)));
        assert!(k_repetition(&plain(0, 0, 4, 0.0, 1.0), &plain(1, 0, 5, 500.0, 501.0)));
        assert!(!k_repetition(
            &plain(0, 0, 4, 0.0, 1.0),
            &plain(1, 0, 4, 6000.0, 6001.0)
        ));
    }

    fn sample() -> Vec<Collect> {
        vec![
            plain(0, 0, 0, 0.0, 10.0),
            plain(1, 0, 1, 20.0, 30.0),
            plain(2, 0, 2, 1000.0, 1010.0),
            plain(3, 1, 0, 5.0, 15.0),
            plain(4, 1, 3, 7000.0, 7010.0),
        ]
    }

    #[test]
    fn graphs_on_sample() {
        let m = AgilityModel::default();
        let xs = sample();
        let gi = build_infeasibility_graph(&xs, &m).unwrap();
        let gi_edges: Vec<_> = gi.edges().collect();
        assert_eq!(gi_edges, vec![(0, 1), (0, 3)]);
        assert_eq!(gi, build_infeasibility_graph_brute(&xs, &m).unwrap());

        let gf = build_feasibility_graph(&xs, &m).unwrap();
        let gf_edges: Vec<_> = gf.edges().collect();
        assert_eq!(gf_edges, vec![(0, 2), (1, 2), (3, 4)]);
        assert!(gf.directed().unwrap().topological_order().is_some());

        let r = verify_complementarity(&gf, &gi).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.feasible_pairs + r.infeasible_same_satellite, r.same_satellite_pairs);
        assert_eq!(r.same_satellite_pairs, 3 + 1);
    }

    #[test]
    fn injected_fault_is_reported() {
        let m = AgilityModel::default();
        let xs = sample();
        let gf = build_feasibility_graph(&xs, &m).unwrap();
        let gi = build_infeasibility_graph(&xs, &m).unwrap();
        let pruned: Vec<(u32, u32)> = gi.edges().filter(|&e| e != (0, 3)).collect();
        let broken = ScheduleGraph {
            adjacency: Adjacency::Undirected(CsrGraph::from_edges(xs.len(), pruned).unwrap()),
            vertices: gi.vertices.clone(),
        };
        let r = verify_complementarity(&gf, &broken).unwrap();
        assert!(!r.passed);
        let c = r.counterexample.unwrap();
        assert_eq!((c.u, c.v), (0, 3));
    }

    #[test]
    fn single_satellite_pair_count() {
        let m = AgilityModel::default();
        let xs: Vec<Collect> = (0..12)
            .map(|i| plain(i, 0, i % 5, 100.0 * i as f64, 100.0 * i as f64 + 20.0))
            .collect();
        let gi = build_infeasibility_graph(&xs, &m).unwrap();
        let gf = build_feasibility_graph(&xs, &m).unwrap();
        assert_eq!(gi.num_edges() + gf.num_edges(), 12 * 11 / 2);
        assert!(verify_complementarity(&gf, &gi).unwrap().passed);
    }

    #[test]
    fn rejects_non_dense_ids() {
        let mut xs = sample();
        xs[2].id = 7;
        assert!(matches!(
            build_infeasibility_graph(&xs, &AgilityModel::default()),
            Err(SchedError::InvalidInput(_))
        ));
    }

    fn undirected(n: usize, edges: Vec<(u32, u32)>) -> ScheduleGraph {
        let xs: Vec<Collect> = (0..n as u32).map(|i| plain(i, 0, i, 0.0, 1.0)).collect();
        ScheduleGraph {
            adjacency: Adjacency::Undirected(CsrGraph::from_edges(n, edges).unwrap()),
            vertices: vertex_payload(&xs, None).unwrap(),
        }
    }

    #[test]
    fn stats_examples() {
        let s = graph_stats(&undirected(10, vec![]));
        assert_eq!((s.edges, s.density, s.max_degree), (0, 0.0, 0));
        let k5 = (0..5u32).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let s = graph_stats(&undirected(5, k5));
        assert_eq!((s.edges, s.density), (10, 1.0));
        let s = graph_stats(&undirected(7, (1..7).map(|v| (0, v)).collect()));
        assert_eq!(s.max_degree, 6);
        assert_eq!(s.degree_histogram, vec![0, 6, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn dimacs_export() {
        let g = undirected(3, vec![(0, 1), (1, 2)]);
        let mut buf = Vec::new();
        export_dimacs(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("p edge 3 2"));
        assert!(text.contains("e 1 2") && text.contains("e 2 3"));
        let back = mis_io::read_dimacs(text.as_bytes()).unwrap();
        assert_eq!(&back, g.undirected().unwrap());
    }
}
