//! Orbits, Earth-fixed states and pointing geometry.
//!
//! Earth is a sphere of equatorial radius for all visibility and pointing
//! computations. Orbits are propagated as two-body Keplerian motion with
//! optional J2 secular drift of the node, perigee and mean anomaly.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Sub};

use chrono::{DateTime, Timelike, Utc};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EARTH_RADIUS_KM: f64 = 6378.137;
/// km^3 / s^2
pub const EARTH_MU: f64 = 398_600.441_8;
pub const EARTH_J2: f64 = 1.082_626_68e-3;
/// rad / s
pub const EARTH_ROTATION_RATE: f64 = 7.292_115_9e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AstroError {
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),
    #[error("invalid orbit elements: {0}")]
    InvalidElements(String),
    #[error("target is below the horizon")]
    OccludedTarget,
}

/// Seconds since the start of the scheduling horizon.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Epoch(f64);

impl Epoch {
    pub const ZERO: Epoch = Epoch(0.0);

    pub fn from_seconds(s: f64) -> Self {
        debug_assert!(s.is_finite(), "epoch must be finite");
        Epoch(s)
    }

    pub fn seconds(self) -> f64 {
        self.0
    }
}

impl PartialEq for Epoch {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Epoch {}

impl PartialOrd for Epoch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Epoch {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add<f64> for Epoch {
    type Output = Epoch;
    fn add(self, s: f64) -> Epoch {
        Epoch(self.0 + s)
    }
}

impl Sub for Epoch {
    type Output = f64;
    fn sub(self, other: Epoch) -> f64 {
        self.0 - other.0
    }
}

/// The planning interval `[t0, t0 + duration]` anchored to a UTC instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub start_utc: DateTime<Utc>,
    pub duration_s: f64,
}

impl Horizon {
    pub fn new(start_utc: DateTime<Utc>, duration_s: f64) -> Self {
        Self { start_utc, duration_s }
    }

    pub fn start(&self) -> Epoch {
        Epoch::ZERO
    }

    pub fn end(&self) -> Epoch {
        Epoch(self.duration_s)
    }

    pub fn contains(&self, t: Epoch) -> bool {
        t >= self.start() && t <= self.end()
    }

    /// Hours since UTC midnight at `t`, in `[0, 24)`.
    pub fn utc_hours(&self, t: Epoch) -> f64 {
        let s = self.start_utc.num_seconds_from_midnight() as f64 + self.start_utc.nanosecond() as f64 * 1e-9;
        ((s + t.seconds()) / 3600.0).rem_euclid(24.0)
    }

    /// Greenwich mean sidereal angle at `t0`, radians.
    pub fn gmst_at_start(&self) -> f64 {
        let j2000 = DateTime::parse_from_rfc3339("2000-01-01T12:00:00Z")
            .expect("valid constant")
            .with_timezone(&Utc);
        let dt = self.start_utc - j2000;
        let days = dt.num_milliseconds() as f64 / 86_400_000.0;
        (280.460_618_37 + 360.985_647_366_29 * days)
            .rem_euclid(360.0)
            .to_radians()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SatId(pub u32);

impl std::fmt::Display for SatId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitElements {
    pub sat: SatId,
    pub semi_major_axis_km: f64,
    #[serde(default)]
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    #[serde(default)]
    pub arg_perigee_deg: f64,
    /// Argument of latitude (perigee argument plus true anomaly) at `t0`.
    pub arg_latitude_deg: f64,
}

impl OrbitElements {
    /// Circular orbit at `altitude_km` above the equatorial radius.
    pub fn circular(
        sat: SatId,
        altitude_km: f64,
        inclination_deg: f64,
        raan_deg: f64,
        arg_latitude_deg: f64,
    ) -> Result<Self, AstroError> {
        Self {
            sat,
            semi_major_axis_km: EARTH_RADIUS_KM + altitude_km,
            eccentricity: 0.0,
            inclination_deg,
            raan_deg: raan_deg.rem_euclid(360.0),
            arg_perigee_deg: 0.0,
            arg_latitude_deg: arg_latitude_deg.rem_euclid(360.0),
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, AstroError> {
        let bad = |m: &str| Err(AstroError::InvalidElements(format!("satellite {}: {m}", self.sat)));
        if self.semi_major_axis_km.is_nan() || self.semi_major_axis_km <= EARTH_RADIUS_KM {
            return bad("semi-major axis must exceed the Earth radius");
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return bad("eccentricity must be in [0, 1)");
        }
        if self.semi_major_axis_km * (1.0 - self.eccentricity) <= EARTH_RADIUS_KM {
            return bad("perigee is below the surface");
        }
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return bad("inclination must be in [0, 180]");
        }
        let angles = [self.raan_deg, self.arg_perigee_deg, self.arg_latitude_deg];
        if angles.iter().any(|a| !a.is_finite()) {
            return bad("angles must be finite");
        }
        Ok(Self {
            raan_deg: self.raan_deg.rem_euclid(360.0),
            arg_perigee_deg: self.arg_perigee_deg.rem_euclid(360.0),
            arg_latitude_deg: self.arg_latitude_deg.rem_euclid(360.0),
            ..self
        })
    }

    pub fn altitude_km(&self) -> f64 {
        self.semi_major_axis_km - EARTH_RADIUS_KM
    }

    /// Mean motion, rad/s.
    pub fn mean_motion(&self) -> f64 {
        (EARTH_MU / self.semi_major_axis_km.powi(3)).sqrt()
    }

    pub fn period_s(&self) -> f64 {
        TAU / self.mean_motion()
    }
}

/// Walker delta constellation `total/planes/phasing`.
///
/// Satellites are numbered plane by plane. Plane `p` has right ascension
/// `p * 360/planes`; satellite `k` of that plane sits at argument of latitude
/// `k * 360/(total/planes) + p * phasing * 360/total`.
pub fn walker_constellation(
    total: u32,
    planes: u32,
    phasing: u32,
    altitude_km: f64,
    inclination_deg: f64,
) -> Result<Vec<OrbitElements>, AstroError> {
    if total == 0 || planes == 0 {
        return Err(AstroError::InvalidConstellation(
            "total and planes must be positive".into(),
        ));
    }
    if !total.is_multiple_of(planes) {
        return Err(AstroError::InvalidConstellation(format!(
            "{planes} planes do not divide {total} satellites"
        )));
    }
    if phasing >= planes {
        return Err(AstroError::InvalidConstellation(format!(
            "phasing {phasing} must be below the plane count {planes}"
        )));
    }
    let per_plane = total / planes;
    let mut out = Vec::with_capacity(total as usize);
    for p in 0..planes {
        for k in 0..per_plane {
            let raan = 360.0 * p as f64 / planes as f64;
            let u = 360.0 * k as f64 / per_plane as f64 + 360.0 * (p * phasing) as f64 / total as f64;
            out.push(OrbitElements::circular(
                SatId(p * per_plane + k),
                altitude_km,
                inclination_deg,
                raan,
                u,
            )?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcefState {
    /// km
    pub position: Vector3<f64>,
    /// km/s, relative to the rotating frame
    pub velocity: Vector3<f64>,
    pub epoch: Epoch,
}

/// Anything that can produce Earth-fixed states over time.
pub trait Propagator {
    fn state_at(&self, t: Epoch) -> EcefState;
}

/// Two-body propagation with optional J2 secular rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerPropagator {
    pub elements: OrbitElements,
    pub j2: bool,
    /// Earth rotation angle at `t0`, radians.
    pub gmst_at_start: f64,
}

impl KeplerPropagator {
    pub fn new(elements: OrbitElements, horizon: &Horizon, j2: bool) -> Self {
        Self {
            elements,
            j2,
            gmst_at_start: horizon.gmst_at_start(),
        }
    }
}

impl Propagator for KeplerPropagator {
    fn state_at(&self, t: Epoch) -> EcefState {
        propagate_ecef(&self.elements, t, self.j2, self.gmst_at_start)
    }
}

/// Secular J2 rates `(raan, perigee, mean anomaly)` in rad/s.
fn j2_rates(el: &OrbitElements) -> (f64, f64, f64) {
    let n = el.mean_motion();
    let e2 = el.eccentricity * el.eccentricity;
    let p = el.semi_major_axis_km * (1.0 - e2);
    let k = 1.5 * n * EARTH_J2 * (EARTH_RADIUS_KM / p).powi(2);
    let ci = el.inclination_deg.to_radians().cos();
    let raan = -k * ci;
    let perigee = 0.5 * k * (5.0 * ci * ci - 1.0);
    let mean = 0.5 * k * (1.0 - e2).sqrt() * (3.0 * ci * ci - 1.0);
    (raan, perigee, mean)
}

fn solve_kepler(mean: f64, e: f64) -> f64 {
    if e == 0.0 {
        return mean;
    }
    let mut ecc = if e < 0.8 { mean } else { PI };
    for _ in 0..50 {
        let f = ecc - e * ecc.sin() - mean;
        let step = f / (1.0 - e * ecc.cos());
        ecc -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    ecc
}

fn rot_z(angle: f64) -> Matrix3<f64> {
    // Frame rotation: components of a fixed vector in a frame turned by `angle`.
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Inertial position and velocity at `t`.
fn propagate_inertial(el: &OrbitElements, t: Epoch, j2: bool) -> (Vector3<f64>, Vector3<f64>) {
    let dt = t.seconds();
    let (raan_rate, perigee_rate, mean_rate) = if j2 { j2_rates(el) } else { (0.0, 0.0, 0.0) };
    let e = el.eccentricity;
    let a = el.semi_major_axis_km;
    let n = el.mean_motion();

    let raan = el.raan_deg.to_radians() + raan_rate * dt;
    let perigee = el.arg_perigee_deg.to_radians() + perigee_rate * dt;
    let inc = el.inclination_deg.to_radians();

    let nu0 = el.arg_latitude_deg.to_radians() - el.arg_perigee_deg.to_radians();
    let ecc0 = 2.0 * (((1.0 - e) / (1.0 + e)).sqrt() * (nu0 / 2.0).tan()).atan();
    let mean0 = ecc0 - e * ecc0.sin();
    let mean = (mean0 + (n + mean_rate) * dt).rem_euclid(TAU);
    let ecc = solve_kepler(mean, e);
    let nu = 2.0 * (((1.0 + e) / (1.0 - e)).sqrt() * (ecc / 2.0).tan()).atan();
    let r = a * (1.0 - e * ecc.cos());
    let p = a * (1.0 - e * e);
    let vscale = (EARTH_MU / p).sqrt();

    let u = perigee + nu;
    let (su, cu) = u.sin_cos();
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    // Unit vectors along the node line direction rotated by u, and normal.
    let radial = Vector3::new(co * cu - so * su * ci, so * cu + co * su * ci, su * si);
    let along = Vector3::new(-co * su - so * cu * ci, -so * su + co * cu * ci, cu * si);
    let normal = Vector3::new(so * si, -co * si, ci);

    let position = radial * r;
    let vr = vscale * e * nu.sin();
    let vt = vscale * (1.0 + e * nu.cos());
    let mut velocity = radial * vr + along * vt;
    if j2 {
        velocity += Vector3::z().cross(&position) * raan_rate + normal.cross(&position) * perigee_rate;
    }
    (position, velocity)
}

/// Earth-fixed state at `t`. The Earth rotation angle is
/// `gmst_at_start + EARTH_ROTATION_RATE * t`.
pub fn propagate_ecef(el: &OrbitElements, t: Epoch, j2: bool, gmst_at_start: f64) -> EcefState {
    let (r, v) = propagate_inertial(el, t, j2);
    let rot = rot_z(gmst_at_start + EARTH_ROTATION_RATE * t.seconds());
    let position = rot * r;
    let omega = Vector3::new(0.0, 0.0, EARTH_ROTATION_RATE);
    let velocity = rot * v - omega.cross(&position);
    EcefState {
        position,
        velocity,
        epoch: t,
    }
}

/// Point on the spherical Earth model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    pub lat_deg: f64,
    /// In `[-180, 180)`.
    pub lon_deg: f64,
    #[serde(default)]
    pub alt_km: f64,
}

impl GeodeticPoint {
    /// Ground point; longitude is wrapped into `[-180, 180)`.
    pub fn new(lat_deg: f64, lon_deg: f64) -> Option<Self> {
        if !(-90.0..=90.0).contains(&lat_deg) || !lon_deg.is_finite() {
            return None;
        }
        Some(Self {
            lat_deg,
            lon_deg: wrap_longitude(lon_deg),
            alt_km: 0.0,
        })
    }

    pub fn to_ecef(&self) -> Vector3<f64> {
        let r = EARTH_RADIUS_KM + self.alt_km;
        let (slat, clat) = self.lat_deg.to_radians().sin_cos();
        let (slon, clon) = self.lon_deg.to_radians().sin_cos();
        Vector3::new(r * clat * clon, r * clat * slon, r * slat)
    }

    pub fn from_ecef(p: &Vector3<f64>) -> Self {
        let lat = p.z.atan2(p.x.hypot(p.y)).to_degrees();
        let lon = p.y.atan2(p.x).to_degrees();
        Self {
            lat_deg: lat,
            lon_deg: wrap_longitude(lon),
            alt_km: p.norm() - EARTH_RADIUS_KM,
        }
    }
}

fn wrap_longitude(lon: f64) -> f64 {
    (lon + 180.0).rem_euclid(360.0) - 180.0
}

fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Angle between the nadir direction and the line of sight to `target`, deg.
pub fn look_angle(state: &EcefState, target: &GeodeticPoint) -> f64 {
    let los = target.to_ecef() - state.position;
    angle_between(&(-state.position), &los).to_degrees()
}

/// Elevation of the satellite above the target's local horizon, deg.
pub fn elevation(state: &EcefState, target: &GeodeticPoint) -> f64 {
    let t = target.to_ecef();
    let up = t.normalize();
    let to_sat = state.position - t;
    90.0 - angle_between(&up, &to_sat).to_degrees()
}

/// Whether the line of sight to the target clears the Earth.
pub fn is_visible(state: &EcefState, target: &GeodeticPoint) -> bool {
    elevation(state, target) > 0.0
}

/// Mean local solar time at the target, hours in `[0, 24)`.
pub fn local_solar_time(target: &GeodeticPoint, t: Epoch, horizon: &Horizon) -> f64 {
    (horizon.utc_hours(t) + target.lon_deg / 15.0).rem_euclid(24.0)
}

/// Unit quaternion, scalar first, with non-negative scalar part.
///
/// Rotates body-frame components into the reference frame. The reference
/// frame is Earth-fixed frozen at `t0` (non-rotating), so attitudes taken at
/// different epochs are directly comparable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attitude([f64; 4]);

impl Attitude {
    pub const IDENTITY: Attitude = Attitude([1.0, 0.0, 0.0, 0.0]);

    /// Normalizes and picks the sign with a positive scalar part (or, when the
    /// scalar is zero, a positive first non-zero vector component).
    pub fn new(q: [f64; 4]) -> Self {
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut q = q.map(|x| x / norm);
        let lead = q.iter().copied().find(|&x| x != 0.0).unwrap_or(1.0);
        if lead < 0.0 {
            q = q.map(|x| -x);
        }
        Attitude(q)
    }

    pub fn from_axis_angle(axis: Vector3<f64>, angle_deg: f64) -> Self {
        let a = axis.normalize();
        let (s, c) = (angle_deg.to_radians() / 2.0).sin_cos();
        Self::new([c, a.x * s, a.y * s, a.z * s])
    }

    /// From a rotation matrix whose columns are the body axes expressed in the
    /// reference frame.
    pub fn from_rotation_matrix(m: &Matrix3<f64>) -> Self {
        let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if tr > 0.0 {
            let s = (tr + 1.0).sqrt() * 2.0;
            [
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            ]
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            [
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            ]
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            [
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            ]
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            [
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            ]
        };
        Self::new(q)
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    /// Rotates a body-frame vector into the reference frame.
    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let [w, x, y, z] = self.0;
        let u = Vector3::new(x, y, z);
        let t = u.cross(v) * 2.0;
        v + t * w + u.cross(&t)
    }
}

/// Rotation angle between two attitudes, deg, in `[0, 180]`.
///
/// Equals `2 acos |<q1, q2>|`, evaluated through the relative quaternion so it
/// stays accurate for nearly equal attitudes.
pub fn attitude_angle(q1: &Attitude, q2: &Attitude) -> f64 {
    let [w1, x1, y1, z1] = q1.0;
    let [w2, x2, y2, z2] = q2.0;
    // conj(q1) * q2
    let w = w1 * w2 + x1 * x2 + y1 * y2 + z1 * z2;
    let x = w1 * x2 - x1 * w2 - (y1 * z2 - z1 * y2);
    let y = w1 * y2 - y1 * w2 - (z1 * x2 - x1 * z2);
    let z = w1 * z2 - z1 * w2 - (x1 * y2 - y1 * x2);
    let v = (x * x + y * y + z * z).sqrt();
    (2.0 * v.atan2(w.abs())).to_degrees()
}

/// Body frame with +z along `boresight` and +x along `velocity` projected
/// orthogonally to it, in the non-rotating reference frame.
fn pointing_frame(state: &EcefState, boresight: Vector3<f64>) -> Attitude {
    let back = rot_z(-EARTH_ROTATION_RATE * state.epoch.seconds());
    let omega = Vector3::new(0.0, 0.0, EARTH_ROTATION_RATE);
    let inertial_velocity = back * (state.velocity + omega.cross(&state.position));
    let z = (back * boresight).normalize();
    let mut x = inertial_velocity - z * inertial_velocity.dot(&z);
    if x.norm() < 1e-12 {
        x = Vector3::z() - z * z.z;
        if x.norm() < 1e-12 {
            x = Vector3::x();
        }
    }
    let x = x.normalize();
    let y = z.cross(&x);
    Attitude::from_rotation_matrix(&Matrix3::from_columns(&[x, y, z]))
}

/// Attitude pointing the body +z axis at `target`.
pub fn compute_attitude(state: &EcefState, target: &GeodeticPoint) -> Result<Attitude, AstroError> {
    if !is_visible(state, target) {
        return Err(AstroError::OccludedTarget);
    }
    Ok(pointing_frame(state, target.to_ecef() - state.position))
}

/// Nadir-pointing attitude with the same secondary-axis convention.
pub fn nadir_attitude(state: &EcefState) -> Attitude {
    pointing_frame(state, -state.position)
}
