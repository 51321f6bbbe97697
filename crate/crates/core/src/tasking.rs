//! Tasking requests, request constraints, tiles and collects.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astro::{
    is_visible, local_solar_time, look_angle, Attitude, EcefState, Epoch, GeodeticPoint, Horizon, OrbitElements, SatId,
    EARTH_RADIUS_KM,
};
use crate::schedcore::SchedulingConstraint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequestId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TileId(pub u32);

impl std::fmt::Display for RequestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for TileId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Geometry {
    Point(GeodeticPoint),
    /// Accepted by the data model only so it can be rejected with a reason.
    Polygon {
        vertices: Vec<GeodeticPoint>,
    },
}

/// A single acquisition predicate over `(t, state, tile, request)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RequestConstraint {
    /// Look angle in degrees. Also requires the target to be above the horizon.
    LookAngleRange {
        min_deg: f64,
        max_deg: f64,
    },
    /// Mean local solar time in hours. Wraps midnight when `start_h > end_h`.
    LocalTimeRange {
        start_h: f64,
        end_h: f64,
    },
    ValidityWindow {
        start: Epoch,
        end: Epoch,
    },
}

impl RequestConstraint {
    pub fn evaluate(&self, t: Epoch, state: &EcefState, tile: &Tile, horizon: &Horizon) -> bool {
        match *self {
            RequestConstraint::LookAngleRange { min_deg, max_deg } => {
                if !is_visible(state, &tile.location) {
                    return false;
                }
                let a = look_angle(state, &tile.location);
                a >= min_deg && a <= max_deg
            }
            RequestConstraint::LocalTimeRange { start_h, end_h } => {
                let h = local_solar_time(&tile.location, t, horizon);
                if start_h <= end_h {
                    h >= start_h && h <= end_h
                } else {
                    h >= start_h || h <= end_h
                }
            }
            RequestConstraint::ValidityWindow { start, end } => t >= start && t <= end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    #[serde(default)]
    pub name: Option<String>,
    pub geometry: Geometry,
    pub valid_from: Epoch,
    pub valid_until: Epoch,
    #[serde(default)]
    pub constraints: Vec<RequestConstraint>,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl Request {
    /// Point request valid over the whole horizon with unit weight.
    pub fn point(
        id: RequestId,
        location: GeodeticPoint,
        horizon: &Horizon,
        constraints: Vec<RequestConstraint>,
    ) -> Self {
        Self {
            id,
            name: None,
            geometry: Geometry::Point(location),
            valid_from: horizon.start(),
            valid_until: horizon.end(),
            constraints,
            weight: 1.0,
        }
    }

    pub fn location(&self) -> Option<&GeodeticPoint> {
        match &self.geometry {
            Geometry::Point(p) => Some(p),
            Geometry::Polygon { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    Geometry,
    Contradiction,
    OutOfHorizon,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RejectReason::Geometry => "geometry",
            RejectReason::Contradiction => "contradiction",
            RejectReason::OutOfHorizon => "out-of-horizon",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("request {request} rejected ({reason}): {detail}")]
pub struct Rejection {
    pub request: RequestId,
    pub reason: RejectReason,
    pub detail: String,
}

/// Intervals of `[0, 24)` hours covered by a local-time range.
fn local_time_intervals(start: f64, end: f64) -> Vec<(f64, f64)> {
    if start <= end {
        vec![(start, end)]
    } else {
        vec![(start, 24.0), (0.0, end)]
    }
}

fn intersect_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Checks geometry and constraint consistency against the horizon.
pub fn validate_request(r: Request, horizon: &Horizon) -> Result<Request, Rejection> {
    let reject = |reason, detail: String| {
        Err(Rejection {
            request: r.id,
            reason,
            detail,
        })
    };

    match &r.geometry {
        Geometry::Polygon { .. } => return reject(RejectReason::Geometry, "polygon requests are not supported".into()),
        Geometry::Point(p) => {
            if !(-90.0..=90.0).contains(&p.lat_deg) || !(-180.0..180.0).contains(&p.lon_deg) {
                return reject(
                    RejectReason::Geometry,
                    format!("coordinates ({}, {}) out of range", p.lat_deg, p.lon_deg),
                );
            }
        }
    }
    if !(r.weight > 0.0 && r.weight.is_finite()) {
        return reject(
            RejectReason::Contradiction,
            format!("weight {} is not positive", r.weight),
        );
    }
    if !(r.valid_from < r.valid_until) {
        return reject(RejectReason::Contradiction, "validity window is empty".into());
    }

    let mut look = (0.0f64, 90.0f64);
    let mut hours = vec![(0.0, 24.0)];
    let mut window = (r.valid_from, r.valid_until);
    for c in &r.constraints {
        match *c {
            RequestConstraint::LookAngleRange { min_deg, max_deg } => {
                if !(0.0 <= min_deg && min_deg < max_deg && max_deg <= 90.0) {
                    return reject(
                        RejectReason::Contradiction,
                        format!("look angle range [{min_deg}, {max_deg}] is empty or outside [0, 90]"),
                    );
                }
                look = (look.0.max(min_deg), look.1.min(max_deg));
            }
            RequestConstraint::LocalTimeRange { start_h, end_h } => {
                let ok = |h: f64| (0.0..24.0).contains(&h);
                if !ok(start_h) || !ok(end_h) || start_h == end_h {
                    return reject(
                        RejectReason::Contradiction,
                        format!("local time range [{start_h}, {end_h}] is empty or invalid"),
                    );
                }
                hours = intersect_intervals(&hours, &local_time_intervals(start_h, end_h));
            }
            RequestConstraint::ValidityWindow { start, end } => {
                window = (window.0.max(start), window.1.min(end));
            }
        }
    }
    if look.0 >= look.1 {
        return reject(RejectReason::Contradiction, "look angle ranges do not intersect".into());
    }
    if hours.is_empty() {
        return reject(RejectReason::Contradiction, "local time ranges do not intersect".into());
    }
    if window.0 >= window.1 {
        return reject(RejectReason::Contradiction, "validity windows do not intersect".into());
    }
    if window.1 < horizon.start() || window.0 > horizon.end() {
        return reject(
            RejectReason::OutOfHorizon,
            format!(
                "validity [{:.1}, {:.1}] s is outside the horizon [0, {:.1}] s",
                window.0.seconds(),
                window.1.seconds(),
                horizon.duration_s
            ),
        );
    }
    Ok(r)
}

/// Highest latitude any satellite can image, deg: ground-track latitude limit
/// plus the Earth-central angle to the horizon.
pub fn reachable_latitude(orbits: &[OrbitElements]) -> f64 {
    orbits
        .iter()
        .map(|o| {
            let track = o.inclination_deg.min(180.0 - o.inclination_deg);
            let margin = (EARTH_RADIUS_KM / o.semi_major_axis_km).acos().to_degrees();
            track + margin
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Drops point requests no satellite can ever see. Order is preserved.
pub fn filter_requests(requests: Vec<Request>, orbits: &[OrbitElements]) -> Vec<Request> {
    let limit = reachable_latitude(orbits);
    requests
        .into_iter()
        .filter(|r| r.location().is_some_and(|p| p.lat_deg.abs() <= limit))
        .collect()
}

/// Atomic capture unit. Point requests have exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub id: TileId,
    pub request: RequestId,
    pub location: GeodeticPoint,
}

/// Tiles for one request, numbered from `first_id`.
pub fn tessellate(r: &Request, first_id: u32) -> Vec<Tile> {
    match &r.geometry {
        Geometry::Point(p) => vec![Tile {
            id: TileId(first_id),
            request: r.id,
            location: *p,
        }],
        Geometry::Polygon { .. } => Vec::new(),
    }
}

/// Tiles for all requests with ids assigned in request order.
pub fn tessellate_all(requests: &[Request]) -> Vec<Tile> {
    let mut tiles = Vec::with_capacity(requests.len());
    for r in requests {
        let next = tiles.len() as u32;
        tiles.extend(tessellate(r, next));
    }
    tiles
}

/// Whether every constraint of `r` (and its validity window) holds.
pub fn check_access_constraints(t: Epoch, state: &EcefState, tile: &Tile, r: &Request, horizon: &Horizon) -> bool {
    if t < r.valid_from || t > r.valid_until {
        return false;
    }
    for k in &r.constraints {
        if !k.evaluate(t, state, tile, horizon) {
            return false;
        }
    }
    true
}

/// One imaging opportunity. `id` doubles as the graph vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collect {
    pub id: u32,
    pub sat: SatId,
    pub tile: TileId,
    pub request: RequestId,
    pub t_s: Epoch,
    pub t_e: Epoch,
    pub q_s: Attitude,
    pub q_e: Attitude,
}

impl Collect {
    pub fn duration(&self) -> f64 {
        self.t_e - self.t_s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForceError {
    #[error("forced-in collects {0} and {1} cannot both be scheduled")]
    InfeasibleForceIn(u32, u32),
    #[error("invalid force sets: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcedCollects {
    pub collects: Vec<Collect>,
    /// Ids of retained collects that must be scheduled.
    pub preselected: BTreeSet<u32>,
}

/// Removes forced-out collects and everything incompatible with a forced-in one.
pub fn apply_force_constraints(
    collects: Vec<Collect>,
    force_in: &BTreeSet<u32>,
    force_out: &BTreeSet<u32>,
    ks: &[SchedulingConstraint],
) -> Result<ForcedCollects, ForceError> {
    if let Some(id) = force_in.intersection(force_out).next() {
        return Err(ForceError::InvalidInput(format!(
            "collect {id} is both forced in and out"
        )));
    }
    let known: HashSet<u32> = collects.iter().map(|c| c.id).collect();
    if let Some(id) = force_in.iter().chain(force_out).find(|id| !known.contains(id)) {
        return Err(ForceError::InvalidInput(format!("unknown collect id {id}")));
    }
    let compatible = |a: &Collect, b: &Collect| ks.iter().all(|k| k.compatible(a, b));

    let forced: Vec<&Collect> = collects.iter().filter(|c| force_in.contains(&c.id)).collect();
    for (i, a) in forced.iter().enumerate() {
        for b in &forced[i + 1..] {
            if !compatible(a, b) {
                return Err(ForceError::InfeasibleForceIn(a.id, b.id));
            }
        }
    }
    let forced: Vec<Collect> = forced.into_iter().copied().collect();
    let kept = collects
        .into_iter()
        .filter(|x| !force_out.contains(&x.id))
        .filter(|x| force_in.contains(&x.id) || forced.iter().all(|f| compatible(x, f)))
        .collect();
    Ok(ForcedCollects {
        collects: kept,
        preselected: force_in.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::{propagate_ecef, walker_constellation};
    use crate::schedcore::AgilityModel;
    use chrono::{DateTime, Utc};
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn horizon() -> Horizon {
        Horizon::new(
            DateTime::parse_from_rfc3339("2020-07-23T00:00:00Z")
                .unwrap()
                .with_timezone(&Utc),
            86_400.0,
        )
    }

    fn look(min_deg: f64, max_deg: f64) -> RequestConstraint {
        RequestConstraint::LookAngleRange { min_deg, max_deg }
    }

    fn point(id: u32, lat: f64, lon: f64, cs: Vec<RequestConstraint>) -> Request {
        Request::point(RequestId(id), GeodeticPoint::new(lat, lon).unwrap(), &horizon(), cs)
    }

    #[test]
    fn validation_examples() {
        let h = horizon();
        assert!(validate_request(point(0, 10.0, 10.0, vec![look(25.0, 50.0)]), &h).is_ok());
        let e = validate_request(point(0, 10.0, 10.0, vec![look(50.0, 25.0)]), &h).unwrap_err();
        assert_eq!(e.reason, RejectReason::Contradiction);
        let mut early = point(0, 10.0, 10.0, vec![]);
        early.valid_from = Epoch::from_seconds(-7200.0);
        early.valid_until = Epoch::from_seconds(-3600.0);
        assert_eq!(
            validate_request(early, &h).unwrap_err().reason,
            RejectReason::OutOfHorizon
        );
    }

    #[test]
    fn validation_intersects_constraints() {
        let h = horizon();
        let r = point(1, 0.0, 0.0, vec![look(0.0, 20.0), look(30.0, 50.0)]);
        assert_eq!(validate_request(r, &h).unwrap_err().reason, RejectReason::Contradiction);
        let lt = |s, e| RequestConstraint::LocalTimeRange { start_h: s, end_h: e };
        let r = point(1, 0.0, 0.0, vec![lt(22.0, 2.0), lt(1.0, 5.0)]);
        assert!(validate_request(r, &h).is_ok());
        let r = point(1, 0.0, 0.0, vec![lt(22.0, 2.0), lt(3.0, 5.0)]);
        assert_eq!(validate_request(r, &h).unwrap_err().reason, RejectReason::Contradiction);
        let poly = Request {
            geometry: Geometry::Polygon { vertices: vec![] },
            ..point(2, 0.0, 0.0, vec![])
        };
        assert_eq!(validate_request(poly, &h).unwrap_err().reason, RejectReason::Geometry);
    }

    #[test]
    fn filtering() {
        let polar = walker_constellation(4, 4, 1, 500.0, 90.0).unwrap();
        let reqs = vec![point(0, 89.0, 0.0, vec![]), point(1, -80.0, 0.0, vec![])];
        assert_eq!(filter_requests(reqs.clone(), &polar), reqs);

        let inclined = walker_constellation(4, 4, 1, 500.0, 53.0).unwrap();
        // 53 deg plus a horizon margin of about 22 deg.
        let margin = (EARTH_RADIUS_KM / 6878.137f64).acos().to_degrees();
        assert!((margin - 21.98).abs() < 0.01, "{margin}");
        let reqs = vec![point(0, 80.0, 0.0, vec![]), point(1, 70.0, 0.0, vec![])];
        let kept = filter_requests(reqs, &inclined);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, RequestId(1));
        assert!(filter_requests(vec![], &inclined).is_empty());
    }

    #[test]
    fn tiles_are_one_per_point() {
        let reqs = vec![point(7, 1.0, 2.0, vec![]), point(9, 3.0, 4.0, vec![])];
        let tiles = tessellate_all(&reqs);
        assert_eq!(tiles.len(), 2);
        assert_eq!(tiles[0].id, TileId(0));
        assert_eq!(tiles[1].request, RequestId(9));
        assert_eq!(tiles[1].location, *reqs[1].location().unwrap());
        assert_eq!(tessellate_all(&reqs), tiles);
    }

    fn state_over(lat: f64, lon: f64) -> EcefState {
        let p = GeodeticPoint::new(lat, lon).unwrap().to_ecef() * (6878.137 / EARTH_RADIUS_KM);
        EcefState {
            position: p,
            velocity: Vector3::new(0.0, 0.0, 7.6),
            epoch: Epoch::ZERO,
        }
    }

    #[test]
    fn constraint_examples() {
        let h = horizon();
        let r = point(0, 0.0, 0.0, vec![]);
        let tile = tessellate(&r, 0)[0];
        let s = state_over(0.0, 0.0);
        assert!(check_access_constraints(Epoch::ZERO, &s, &tile, &r, &h));

        // About 60 degrees off nadir.
        let rs = 6878.137f64;
        let z = ((rs / EARTH_RADIUS_KM) * 60f64.to_radians().sin()).asin().to_degrees();
        let s = state_over(0.0, z - 60.0);
        let r = point(0, 0.0, 0.0, vec![look(25.0, 50.0)]);
        assert!(!check_access_constraints(Epoch::ZERO, &s, &tile, &r, &h));
        let r = point(
            0,
            0.0,
            0.0,
            vec![
                look(25.0, 65.0),
                RequestConstraint::LocalTimeRange {
                    start_h: 23.0,
                    end_h: 1.0,
                },
            ],
        );
        assert!(check_access_constraints(Epoch::ZERO, &s, &tile, &r, &h));
    }

    #[test]
    fn short_circuit_matches_full_and() {
        let h = horizon();
        let orbits = walker_constellation(4, 2, 1, 500.0, 97.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let lo = rng.random_range(0.0..40.0);
            let cs = vec![
                look(lo, lo + rng.random_range(1.0..50.0)),
                RequestConstraint::LocalTimeRange {
                    start_h: rng.random_range(0.0..24.0),
                    end_h: rng.random_range(0.0..24.0),
                },
                RequestConstraint::ValidityWindow {
                    start: Epoch::from_seconds(rng.random_range(0.0..40_000.0)),
                    end: Epoch::from_seconds(rng.random_range(40_000.0..86_400.0)),
                },
            ];
            let r = point(0, rng.random_range(-80.0..80.0), rng.random_range(-180.0..180.0), cs);
            let tile = tessellate(&r, 0)[0];
            let t = Epoch::from_seconds(rng.random_range(0.0..86_400.0));
            let o = &orbits[rng.random_range(0..orbits.len())];
            let s = propagate_ecef(o, t, true, h.gmst_at_start());
            let full = r
                .constraints
                .iter()
                .fold(true, |acc, k| acc & k.evaluate(t, &s, &tile, &h));
            assert_eq!(check_access_constraints(t, &s, &tile, &r, &h), full);
        }
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
    fn force_constraints() {
        let ks = [
            SchedulingConstraint::Agility(AgilityModel::default()),
            SchedulingConstraint::Repetition,
        ];
        let xs = vec![
            collect(0, 0, 0, 0.0, 10.0),
            collect(1, 0, 1, 12.0, 20.0),
            collect(2, 1, 0, 500.0, 510.0),
            collect(3, 0, 2, 1000.0, 1010.0),
        ];
        let none = BTreeSet::new();
        let out = apply_force_constraints(xs.clone(), &none, &none, &ks).unwrap();
        assert_eq!(out.collects, xs);

        let out = apply_force_constraints(xs.clone(), &none, &BTreeSet::from([3]), &ks).unwrap();
        assert_eq!(out.collects.iter().map(|c| c.id).collect::<Vec<_>>(), vec![0, 1, 2]);

        let out = apply_force_constraints(xs.clone(), &BTreeSet::from([0]), &none, &ks).unwrap();
        let ids: Vec<u32> = out.collects.iter().map(|c| c.id).collect();
        // 1 is too close on the same satellite, 2 repeats the tile.
        assert_eq!(ids, vec![0, 3]);
        assert!(out.preselected.contains(&0));
        for x in &out.collects {
            assert!(ks.iter().all(|k| x.id == 0 || k.compatible(x, &xs[0])));
        }

        assert_eq!(
            apply_force_constraints(xs.clone(), &BTreeSet::from([0, 1]), &none, &ks),
            Err(ForceError::InfeasibleForceIn(0, 1))
        );
        assert!(matches!(
            apply_force_constraints(xs, &BTreeSet::from([1]), &BTreeSet::from([1]), &ks),
            Err(ForceError::InvalidInput(_))
        ));
    }
}
