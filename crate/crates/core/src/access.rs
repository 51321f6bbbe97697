//! Collect-opportunity search: coarse scan plus boundary bisection.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astro::{
    compute_attitude, is_visible, EcefState, Epoch, GeodeticPoint, Horizon, KeplerPropagator, OrbitElements,
    Propagator, EARTH_RADIUS_KM, EARTH_ROTATION_RATE,
};
use crate::tasking::{check_access_constraints, Collect, Request, RequestId, Tile};

#[derive(Debug, Error)]
pub enum AccessError {
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
    #[error("tile {tile} references unknown request {request}")]
    UnknownRequest { tile: u32, request: RequestId },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    /// Coarse step while outside access, s.
    pub t_micro: f64,
    /// Skip after a found collect, s.
    pub t_macro: f64,
    /// Boundary tolerance, s.
    pub tol: f64,
    pub min_collect_duration: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            t_micro: 10.0,
            t_macro: 60.0,
            tol: 0.5,
            min_collect_duration: 1.0,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), AccessError> {
        let ok = 0.0 < self.tol
            && self.tol < self.t_micro
            && self.t_micro <= self.t_macro
            && self.min_collect_duration >= self.tol
            && self.t_macro.is_finite();
        if ok {
            Ok(())
        } else {
            Err(AccessError::InvalidParams(format!(
                "need 0 < tol < t_micro <= t_macro and min duration >= tol, got {self:?}"
            )))
        }
    }
}

/// Locates where `access` changes value, starting from `t` and stepping by `dt`.
///
/// Steps while the value is unchanged, then reverses with half the step, until
/// the last bracket is no wider than `tol`. Returns the end of that bracket on
/// which `access` holds, so the result is within `tol` of the crossing. Steps
/// are clamped to `[lo, hi]`; if the value never changes before an edge, the
/// edge is returned.
pub fn find_collect_boundary(
    access: impl Fn(Epoch) -> bool,
    t: Epoch,
    dt: f64,
    tol: f64,
    lo: Epoch,
    hi: Epoch,
) -> Epoch {
    let mut t = t;
    let mut dt = dt;
    let mut v = access(t);
    loop {
        let prev;
        loop {
            let next = Epoch::from_seconds((t + dt).seconds().clamp(lo.seconds(), hi.seconds()));
            if next == t {
                return t;
            }
            let before = t;
            t = next;
            let w = access(t);
            if w != v {
                v = w;
                prev = before;
                break;
            }
        }
        if dt.abs() <= tol {
            return if v { t } else { prev };
        }
        dt = -dt / 2.0;
    }
}

/// Upper bound on how fast the sub-satellite point moves over the ground, rad/s.
fn ground_rate(orbit: &OrbitElements) -> f64 {
    orbit.mean_motion() * 1.01 + EARTH_ROTATION_RATE
}

/// Seconds that certainly pass before `target` can rise above the horizon.
fn time_to_rise(state: &EcefState, target: &GeodeticPoint, orbit: &OrbitElements) -> f64 {
    let r = state.position.norm();
    let reach = (EARTH_RADIUS_KM / r).acos();
    let t = target.to_ecef();
    let central = state.position.cross(&t).norm().atan2(state.position.dot(&t));
    ((central - reach) / ground_rate(orbit)).max(0.0)
}

/// All collects of one satellite on one tile, ordered by start time.
///
/// Collect ids are left at zero; `collect_search_all` assigns them.
pub fn tile_collect_search(
    orbit: &OrbitElements,
    propagator: &impl Propagator,
    tile: &Tile,
    request: &Request,
    horizon: &Horizon,
    params: &SearchParams,
) -> Vec<Collect> {
    let access = |t: Epoch| {
        let s = propagator.state_at(t);
        is_visible(&s, &tile.location) && check_access_constraints(t, &s, tile, request, horizon)
    };
    let end = horizon.end();
    let mut out: Vec<Collect> = Vec::new();
    let mut floor = horizon.start();
    let mut t = horizon.start();
    while t <= end {
        let state = propagator.state_at(t);
        if is_visible(&state, &tile.location) && check_access_constraints(t, &state, tile, request, horizon) {
            let t_s = find_collect_boundary(access, t, -params.t_micro, params.tol, floor, end);
            let t_e = find_collect_boundary(access, t, params.t_micro, params.tol, t, end);
            if t_e - t_s >= params.min_collect_duration {
                let s0 = propagator.state_at(t_s);
                let s1 = propagator.state_at(t_e);
                match (
                    compute_attitude(&s0, &tile.location),
                    compute_attitude(&s1, &tile.location),
                ) {
                    (Ok(q_s), Ok(q_e)) => out.push(Collect {
                        id: 0,
                        sat: orbit.sat,
                        tile: tile.id,
                        request: request.id,
                        t_s,
                        t_e,
                        q_s,
                        q_e,
                    }),
                    _ => log::warn!(
                        "sat {} tile {}: boundary state occluded, window dropped",
                        orbit.sat,
                        tile.id
                    ),
                }
            }
            floor = t_e;
            t = t_e + params.t_macro;
        } else {
            // Skip whole coarse steps while the target is certainly below the horizon.
            let skip = (time_to_rise(&state, &tile.location, orbit) / params.t_micro).floor();
            t = t + params.t_micro * skip.max(1.0);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    /// Secular J2 drift in propagation.
    pub j2: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            j2: true,
            workers: None,
        }
    }
}

/// The action space: collects of every satellite on every tile.
///
/// Output is sorted by `(satellite, tile, t_s)` and ids are assigned densely in
/// that order, so the result does not depend on the worker count.
pub fn collect_search_all(
    orbits: &[OrbitElements],
    tiles: &[Tile],
    requests: &[Request],
    horizon: &Horizon,
    params: &SearchParams,
    options: &SearchOptions,
) -> Result<Vec<Collect>, AccessError> {
    params.validate()?;
    let by_id: HashMap<RequestId, &Request> = requests.iter().map(|r| (r.id, r)).collect();
    let mut pairs = Vec::with_capacity(orbits.len() * tiles.len());
    for tile in tiles {
        let request = *by_id.get(&tile.request).ok_or(AccessError::UnknownRequest {
            tile: tile.id.0,
            request: tile.request,
        })?;
        for orbit in orbits {
            pairs.push((orbit, tile, request));
        }
    }

    let search = || -> Vec<Collect> {
        pairs
            .par_iter()
            .flat_map_iter(|&(orbit, tile, request)| {
                let prop = KeplerPropagator::new(*orbit, horizon, options.j2);
                tile_collect_search(orbit, &prop, tile, request, horizon, params)
            })
            .collect()
    };
    let mut collects = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| AccessError::ThreadPool(e.to_string()))?
            .install(search),
        None => search(),
    };
    collects.sort_by_key(|a| (a.sat, a.tile, a.t_s));
    for (i, c) in collects.iter_mut().enumerate() {
        c.id = i as u32;
    }
    Ok(collects)
}

/// One JSON object per line; times in seconds from the horizon start.
pub fn write_collects_jsonl<W: Write>(mut out: W, collects: &[Collect]) -> std::io::Result<()> {
    for c in collects {
        writeln!(
            out,
            "{{\"id\":{},\"sat\":{},\"tile\":{},\"request\":{},\"t_s\":{:.3},\"t_e\":{:.3},\"q_s\":{},\"q_e\":{}}}",
            c.id,
            c.sat.0,
            c.tile.0,
            c.request.0,
            c.t_s.seconds(),
            c.t_e.seconds(),
            serde_json::to_string(&c.q_s.components())?,
            serde_json::to_string(&c.q_e.components())?,
        )?;
    }
    Ok(())
}
