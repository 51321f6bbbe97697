//! Comparison schedulers, integer-program export and schedule validation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::time::Instant;

use constel_mis::{CsrGraph, IndependentSetSolution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astro::{Horizon, SatId};
use crate::schedcore::{k_agility, slew_time, AgilityModel, GraphKind, ScheduleGraph};
use crate::tasking::{Collect, TileId};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("expected a {expected} graph")]
    KindMismatch { expected: GraphKind },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("collect id {0} is out of range")]
    UnknownCollect(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub solver: String,
    pub wall_time_s: f64,
    #[serde(default)]
    pub config: serde_json::Value,
}

/// The selected collects, grouped per satellite in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Sorted ascending.
    pub collect_ids: Vec<u32>,
    pub per_satellite: BTreeMap<SatId, Vec<u32>>,
    pub objective: usize,
    pub provenance: Provenance,
}

impl Schedule {
    fn from_ids(mut ids: Vec<u32>, collects: &[Collect], provenance: Provenance) -> Result<Self, BaselineError> {
        ids.sort_unstable();
        ids.dedup();
        let mut per_satellite: BTreeMap<SatId, Vec<u32>> = BTreeMap::new();
        for &id in &ids {
            let c = collects.get(id as usize).ok_or(BaselineError::UnknownCollect(id))?;
            per_satellite.entry(c.sat).or_default().push(id);
        }
        for seq in per_satellite.values_mut() {
            seq.sort_by(|&a, &b| (collects[a as usize].t_s, a).cmp(&(collects[b as usize].t_s, b)));
        }
        Ok(Self {
            objective: ids.len(),
            collect_ids: ids,
            per_satellite,
            provenance,
        })
    }
}

/// Groups a solver's vertices into a schedule. Vertex ids are collect ids.
pub fn solution_to_schedule(sol: &IndependentSetSolution, collects: &[Collect]) -> Result<Schedule, BaselineError> {
    Schedule::from_ids(
        sol.vertices().to_vec(),
        collects,
        Provenance {
            solver: sol.solver().to_string(),
            wall_time_s: sol.wall_time().as_secs_f64(),
            config: serde_json::json!({
                "termination": sol.termination().to_string(),
                "iterations": sol.iterations(),
            }),
        },
    )
}

/// Longest path per satellite through the feasibility graph, satellites in turn.
///
/// Each satellite only considers collects of tiles not claimed by an earlier
/// satellite. A path may revisit a tile through non-adjacent collects, so each
/// path is pruned to its first visit of every tile, keeping only collects the
/// satellite can still reach from the previous kept one.
pub fn graph_traversal_schedule(
    gf: &ScheduleGraph,
    collects: &[Collect],
    order: Option<&[SatId]>,
) -> Result<Schedule, BaselineError> {
    let start = Instant::now();
    let dag = gf.directed().ok_or(BaselineError::KindMismatch {
        expected: GraphKind::Feasibility,
    })?;
    if gf.num_vertices() != collects.len() {
        return Err(BaselineError::InvalidInput(format!(
            "graph has {} vertices for {} collects",
            gf.num_vertices(),
            collects.len()
        )));
    }
    let mut groups: BTreeMap<SatId, Vec<u32>> = BTreeMap::new();
    for c in collects {
        groups.entry(c.sat).or_default().push(c.id);
    }
    let default_order: Vec<SatId> = groups.keys().copied().collect();
    let order = order.unwrap_or(&default_order);

    let mut claimed: HashSet<TileId> = HashSet::new();
    let mut chosen = Vec::new();
    let mut dp = vec![0usize; collects.len()];
    let mut pred: Vec<Option<u32>> = vec![None; collects.len()];
    for sat in order {
        let Some(ids) = groups.get_mut(sat) else { continue };
        ids.sort_by(|&a, &b| (collects[a as usize].t_s, a).cmp(&(collects[b as usize].t_s, b)));
        let open = |v: u32| !claimed.contains(&collects[v as usize].tile);
        for &v in ids.iter() {
            dp[v as usize] = open(v) as usize;
            pred[v as usize] = None;
        }
        // Edges point from earlier to later start, so start order is topological.
        for &u in ids.iter() {
            if dp[u as usize] == 0 {
                continue;
            }
            for &w in dag.successors(u) {
                if open(w) && dp[u as usize] + 1 > dp[w as usize] {
                    dp[w as usize] = dp[u as usize] + 1;
                    pred[w as usize] = Some(u);
                }
            }
        }
        let Some(&end) = ids
            .iter()
            .filter(|&&v| dp[v as usize] > 0)
            .max_by(|&&a, &&b| dp[a as usize].cmp(&dp[b as usize]).then(b.cmp(&a)))
        else {
            continue;
        };
        let mut path = vec![end];
        while let Some(p) = pred[*path.last().expect("non-empty") as usize] {
            path.push(p);
        }
        path.reverse();

        let mut kept: Vec<u32> = Vec::with_capacity(path.len());
        let mut seen: HashSet<TileId> = HashSet::new();
        for v in path {
            let x = &collects[v as usize];
            if seen.contains(&x.tile) {
                continue;
            }
            // With distinct tiles, an edge is exactly the agility check.
            if kept.last().is_some_and(|&last| !dag.has_edge(last, v)) {
                continue;
            }
            seen.insert(x.tile);
            kept.push(v);
        }
        claimed.extend(seen);
        chosen.extend(kept);
    }
    Schedule::from_ids(
        chosen,
        collects,
        Provenance {
            solver: "greedy".into(),
            wall_time_s: start.elapsed().as_secs_f64(),
            config: serde_json::json!({ "order": order.iter().map(|s| s.0).collect::<Vec<_>>() }),
        },
    )
}

/// Writes the independent-set integer program in LP format.
pub fn export_ilp<W: Write>(gi: &ScheduleGraph, out: W) -> Result<(), BaselineError> {
    let g = gi.undirected().ok_or(BaselineError::KindMismatch {
        expected: GraphKind::Infeasibility,
    })?;
    write_lp(g, out)?;
    Ok(())
}

pub fn write_lp<W: Write>(g: &CsrGraph, mut out: W) -> std::io::Result<()> {
    let n = g.num_vertices();
    writeln!(
        out,
        "\\ maximum independent set, {} vertices, {} edges",
        n,
        g.num_edges()
    )?;
    writeln!(out, "Maximize")?;
    write!(out, " obj:")?;
    if n == 0 {
        write!(out, " 0 x0")?;
    }
    for v in 0..n {
        if v > 0 && v % 16 == 0 {
            write!(out, "\n     ")?;
        }
        write!(out, " {}x{v}", if v == 0 { "" } else { "+ " })?;
    }
    writeln!(out)?;
    writeln!(out, "Subject To")?;
    for (k, (u, v)) in g.edges().enumerate() {
        writeln!(out, " c{k}: x{u} + x{v} <= 1")?;
    }
    writeln!(out, "Binary")?;
    for v in 0..n {
        writeln!(out, " x{v}")?;
    }
    writeln!(out, "End")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownCollect {
        id: u32,
    },
    DuplicateCollect {
        id: u32,
    },
    Agility {
        sat: SatId,
        first: u32,
        second: u32,
        gap_s: f64,
        required_s: f64,
    },
    Repetition {
        tile: TileId,
        first: u32,
        second: u32,
    },
    OutsideHorizon {
        id: u32,
    },
    Inconsistent {
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks a schedule against the raw collects, independently of any graph.
pub fn validate_schedule(
    sched: &Schedule,
    collects: &[Collect],
    m: &AgilityModel,
    horizon: &Horizon,
) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    let mut selected: Vec<&Collect> = Vec::new();
    for &id in &sched.collect_ids {
        if !seen.insert(id) {
            violations.push(Violation::DuplicateCollect { id });
            continue;
        }
        match collects.get(id as usize).filter(|c| c.id == id) {
            Some(c) => selected.push(c),
            None => violations.push(Violation::UnknownCollect { id }),
        }
    }

    for c in &selected {
        if !(horizon.contains(c.t_s) && horizon.contains(c.t_e) && c.t_s < c.t_e) {
            violations.push(Violation::OutsideHorizon { id: c.id });
        }
    }

    let mut by_sat: BTreeMap<SatId, Vec<&Collect>> = BTreeMap::new();
    for c in &selected {
        by_sat.entry(c.sat).or_default().push(c);
    }
    for (sat, seq) in by_sat.iter_mut() {
        seq.sort_by_key(|a| (a.t_s, a.id));
        for w in seq.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !k_agility(a, b, m) {
                violations.push(Violation::Agility {
                    sat: *sat,
                    first: a.id,
                    second: b.id,
                    gap_s: b.t_s - a.t_e,
                    required_s: slew_time(&a.q_e, &b.q_s, m),
                });
            }
        }
        let ids: Vec<u32> = seq.iter().map(|c| c.id).collect();
        if sched.per_satellite.get(sat) != Some(&ids) {
            violations.push(Violation::Inconsistent {
                detail: format!("per-satellite sequence for satellite {sat} does not match the collect list"),
            });
        }
    }
    if sched.per_satellite.keys().any(|s| !by_sat.contains_key(s)) {
        violations.push(Violation::Inconsistent {
            detail: "per-satellite sequences name a satellite with no selected collect".into(),
        });
    }

    let mut first_of_tile: HashMap<TileId, u32> = HashMap::new();
    let mut ordered = selected.clone();
    ordered.sort_by_key(|c| c.id);
    for c in ordered {
        if let Some(&first) = first_of_tile.get(&c.tile) {
            violations.push(Violation::Repetition {
                tile: c.tile,
                first,
                second: c.id,
            });
        } else {
            first_of_tile.insert(c.tile, c.id);
        }
    }

    if sched.objective != selected.len() {
        violations.push(Violation::Inconsistent {
            detail: format!("objective {} but {} valid collects", sched.objective, selected.len()),
        });
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCollect {
    pub id: u32,
    pub sat: SatId,
    pub tile: TileId,
    pub request: crate::tasking::RequestId,
    pub t_s: f64,
    pub t_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub solver: String,
    pub objective: usize,
    pub wall_time_s: f64,
    pub collects: Vec<ScheduledCollect>,
}

impl ScheduleFile {
    pub fn new(sched: &Schedule, collects: &[Collect]) -> Self {
        let mut rows: Vec<ScheduledCollect> = sched
            .collect_ids
            .iter()
            .filter_map(|&id| collects.get(id as usize))
            .map(|c| ScheduledCollect {
                id: c.id,
                sat: c.sat,
                tile: c.tile,
                request: c.request,
                t_s: c.t_s.seconds(),
                t_e: c.t_e.seconds(),
            })
            .collect();
        rows.sort_by(|a, b| a.sat.cmp(&b.sat).then(a.t_s.total_cmp(&b.t_s)).then(a.id.cmp(&b.id)));
        Self {
            solver: sched.provenance.solver.clone(),
            objective: sched.objective,
            wall_time_s: sched.provenance.wall_time_s,
            collects: rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::{Attitude, Epoch};
    use crate::schedcore::{build_feasibility_graph, build_infeasibility_graph};
    use crate::tasking::RequestId;
    use chrono::{DateTime, Utc};
    use constel_mis::exact_bnb;
    use nalgebra::Vector3;

    fn horizon() -> Horizon {
        Horizon::new(
            DateTime::parse_from_rfc3339("2020-07-23T00:00:00Z")
                .unwrap()
                .with_timezone(&Utc),
            86_400.0,
        )
    }

    fn collect(id: u32, sat: u32, tile: u32, t_s: f64, t_e: f64) -> Collect {
        Collect {
            id,
            sat: SatId(sat),
            tile: TileId(tile),
            request: RequestId(tile),
            t_s: Epoch::from_seconds(t_s),
            t_e: Epoch::from_seconds(t_e),
            q_s: Attitude::IDENTITY,
            q_e: Attitude::IDENTITY,
        }
    }

    #[test]
    fn chain_is_fully_scheduled() {
        let m = AgilityModel::default();
        let xs = vec![
            collect(0, 0, 0, 0.0, 10.0),
            collect(1, 0, 1, 100.0, 110.0),
            collect(2, 0, 2, 200.0, 210.0),
        ];
        let gf = build_feasibility_graph(&xs, &m).unwrap();
        let s = graph_traversal_schedule(&gf, &xs, None).unwrap();
        assert_eq!(s.collect_ids, vec![0, 1, 2]);
        assert_eq!(s.objective, 3);
        assert!(validate_schedule(&s, &xs, &m, &horizon()).is_valid());
    }

    #[test]
    fn first_satellite_claims_shared_tile() {
        let m = AgilityModel::default();
        let xs = vec![collect(0, 0, 0, 0.0, 10.0), collect(1, 1, 0, 50.0, 60.0)];
        let gf = build_feasibility_graph(&xs, &m).unwrap();
        let s = graph_traversal_schedule(&gf, &xs, None).unwrap();
        assert_eq!(s.collect_ids, vec![0]);
        let s = graph_traversal_schedule(&gf, &xs, Some(&[SatId(1), SatId(0)])).unwrap();
        assert_eq!(s.collect_ids, vec![1]);
    }

    #[test]
    fn traversal_drops_repeated_tiles_on_a_path() {
        let m = AgilityModel::default();
        // 0 -> 1 -> 2 is a path in the graph but 0 and 2 share a tile.
        let xs = vec![
            collect(0, 0, 0, 0.0, 10.0),
            collect(1, 0, 1, 100.0, 110.0),
            collect(2, 0, 0, 200.0, 210.0),
        ];
        let gf = build_feasibility_graph(&xs, &m).unwrap();
        let s = graph_traversal_schedule(&gf, &xs, None).unwrap();
        assert_eq!(s.objective, 2);
        assert!(validate_schedule(&s, &xs, &m, &horizon()).is_valid());
    }

    #[test]
    fn traversal_requires_feasibility_graph() {
        let xs = vec![collect(0, 0, 0, 0.0, 10.0)];
        let gi = build_infeasibility_graph(&xs, &AgilityModel::default()).unwrap();
        assert!(matches!(
            graph_traversal_schedule(&gi, &xs, None),
            Err(BaselineError::KindMismatch { .. })
        ));
    }

    #[test]
    fn lp_export() {
        let tri = CsrGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut buf = Vec::new();
        write_lp(&tri, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(" obj: x0 + x1 + x2"));
        assert_eq!(text.matches("<= 1").count(), 3);
        assert!(text.contains("Binary\n x0\n x1\n x2\nEnd"));

        let mut buf = Vec::new();
        write_lp(&CsrGraph::empty(4), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("x0 + x1 + x2 + x3"));
        assert_eq!(text.matches("<= 1").count(), 0);
    }

    #[test]
    fn validator_detects_faults() {
        let m = AgilityModel::default();
        let h = horizon();
        let flipped = Attitude::from_axis_angle(Vector3::x(), 180.0);
        let mut b = collect(1, 0, 1, 20.0, 30.0);
        b.q_s = flipped;
        let xs = vec![collect(0, 0, 0, 0.0, 10.0), b, collect(2, 1, 0, 500.0, 510.0)];
        let prov = Provenance {
            solver: "manual".into(),
            wall_time_s: 0.0,
            config: serde_json::Value::Null,
        };

        let s = Schedule::from_ids(vec![0, 1], &xs, prov.clone()).unwrap();
        let r = validate_schedule(&s, &xs, &m, &h);
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(
            r.violations[0],
            Violation::Agility {
                first: 0,
                second: 1,
                ..
            }
        ));

        let s = Schedule::from_ids(vec![0, 2], &xs, prov.clone()).unwrap();
        let r = validate_schedule(&s, &xs, &m, &h);
        assert_eq!(
            r.violations,
            vec![Violation::Repetition {
                tile: TileId(0),
                first: 0,
                second: 2
            }]
        );

        let mut s = Schedule::from_ids(vec![0], &xs, prov).unwrap();
        s.collect_ids.push(9);
        let r = validate_schedule(&s, &xs, &m, &h);
        assert!(r.violations.contains(&Violation::UnknownCollect { id: 9 }));
    }

    #[test]
    fn solution_to_schedule_examples() {
        let xs = vec![
            collect(0, 1, 0, 300.0, 310.0),
            collect(1, 0, 1, 0.0, 10.0),
            collect(2, 1, 2, 0.0, 10.0),
        ];
        let m = AgilityModel::default();
        let gi = build_infeasibility_graph(&xs, &m).unwrap();
        let g = gi.undirected().unwrap();
        let empty = IndependentSetSolution::new(g, vec![], "none").unwrap();
        let s = solution_to_schedule(&empty, &xs).unwrap();
        assert_eq!(s.objective, 0);
        assert!(s.per_satellite.is_empty());

        let sol = exact_bnb(g, None);
        let s = solution_to_schedule(&sol, &xs).unwrap();
        assert_eq!(s.objective, 3);
        assert_eq!(s.per_satellite[&SatId(1)], vec![2, 0]);
        assert_eq!(s, solution_to_schedule(&sol, &xs).unwrap());
        assert!(validate_schedule(&s, &xs, &m, &horizon()).is_valid());

        let other = CsrGraph::empty(5);
        let bad = IndependentSetSolution::new(&other, vec![4], "x").unwrap();
        assert!(matches!(
            solution_to_schedule(&bad, &xs),
            Err(BaselineError::UnknownCollect(4))
        ));
    }
}
