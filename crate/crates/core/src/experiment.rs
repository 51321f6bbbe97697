//! Scenario files, request ingestion, the end-to-end pipeline and result tables.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use constel_mis::{exact_bnb, redumis_solve, IndependentSetSolution, ReductionToggles, SolverConfig, Termination};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::access::{collect_search_all, SearchOptions, SearchParams};
use crate::astro::{walker_constellation, GeodeticPoint, Horizon, OrbitElements, SatId};
use crate::baselines::{graph_traversal_schedule, solution_to_schedule, validate_schedule, Schedule};
use crate::schedcore::{build_feasibility_graph, build_infeasibility_graph, graph_stats, AgilityModel, ScheduleGraph};
use crate::tasking::{
    filter_requests, tessellate_all, validate_request, Collect, Rejection, Request, RequestConstraint, RequestId, Tile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Constellation,
    Requests,
    Access,
    Graph,
    Solve,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Constellation => "constellation",
            Stage::Requests => "requests",
            Stage::Access => "access",
            Stage::Graph => "graph",
            Stage::Solve => "solve",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage}: {message}")]
pub struct ExperimentError {
    pub stage: Stage,
    pub message: String,
}

impl ExperimentError {
    pub fn new(stage: Stage, message: impl fmt::Display) -> Self {
        Self {
            stage,
            message: message.to_string(),
        }
    }
}

fn at<E: fmt::Display>(stage: Stage) -> impl FnOnce(E) -> ExperimentError {
    move |e| ExperimentError::new(stage, e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstellationSpec {
    Walker {
        total: u32,
        planes: u32,
        phasing: u32,
        altitude_km: f64,
        inclination_deg: f64,
    },
    Elements {
        satellites: Vec<OrbitElements>,
    },
}

impl ConstellationSpec {
    pub fn build(&self) -> Result<Vec<OrbitElements>, ExperimentError> {
        match self {
            ConstellationSpec::Walker {
                total,
                planes,
                phasing,
                altitude_km,
                inclination_deg,
            } => walker_constellation(*total, *planes, *phasing, *altitude_km, *inclination_deg)
                .map_err(at(Stage::Constellation)),
            ConstellationSpec::Elements { satellites } => {
                let mut ids = HashSet::new();
                satellites
                    .iter()
                    .map(|e| {
                        if !ids.insert(e.sat) {
                            return Err(ExperimentError::new(
                                Stage::Constellation,
                                format!("duplicate satellite id {}", e.sat),
                            ));
                        }
                        e.validated().map_err(at(Stage::Constellation))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InlinePoint {
    pub lat: f64,
    pub lon: f64,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum RequestSource {
    /// Largest cities of a `city,lat,lng,population` table. Relative paths
    /// resolve against the scenario file.
    Cities {
        path: PathBuf,
        count: usize,
    },
    Inline {
        points: Vec<InlinePoint>,
    },
    /// Uniform on the sphere between the latitude bounds.
    Random {
        count: usize,
        #[serde(default = "default_lat_range")]
        lat_range: [f64; 2],
        #[serde(default = "default_lon_range")]
        lon_range: [f64; 2],
    },
    /// Points scattered uniformly within `spread_deg` of random centers.
    Clustered {
        count: usize,
        clusters: usize,
        spread_deg: f64,
        #[serde(default = "default_lat_range")]
        lat_range: [f64; 2],
    },
}

fn default_lat_range() -> [f64; 2] {
    [-60.0, 60.0]
}

fn default_lon_range() -> [f64; 2] {
    [-180.0, 180.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HorizonSpec {
    pub start_utc: DateTime<Utc>,
    pub duration_s: f64,
}

impl Default for HorizonSpec {
    fn default() -> Self {
        Self {
            start_utc: DateTime::parse_from_rfc3339("2020-07-23T00:00:00Z")
                .expect("valid constant")
                .with_timezone(&Utc),
            duration_s: 86_400.0,
        }
    }
}

/// Constraints given to every request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstraintDefaults {
    pub look_angle_deg: [f64; 2],
    pub local_time_h: Option<[f64; 2]>,
}

impl Default for ConstraintDefaults {
    fn default() -> Self {
        Self {
            look_angle_deg: [0.0, 50.0],
            local_time_h: None,
        }
    }
}

impl ConstraintDefaults {
    pub fn constraints(&self) -> Vec<RequestConstraint> {
        let mut out = vec![RequestConstraint::LookAngleRange {
            min_deg: self.look_angle_deg[0],
            max_deg: self.look_angle_deg[1],
        }];
        if let Some([start_h, end_h]) = self.local_time_h {
            out.push(RequestConstraint::LocalTimeRange { start_h, end_h });
        }
        out
    }
}

/// Solver choice: `mis`, `mis:<seconds>`, `greedy`, `exact` or `exact:<seconds>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SolverSpec {
    Mis { time_limit_s: Option<f64> },
    Greedy,
    Exact { time_limit_s: Option<f64> },
}

impl FromStr for SolverSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, limit) = match s.split_once(':') {
            Some((n, l)) => {
                let secs: f64 = l.parse().map_err(|_| format!("bad time limit in solver '{s}'"))?;
                if !(secs > 0.0 && secs.is_finite()) {
                    return Err(format!("time limit in solver '{s}' must be positive"));
                }
                (n, Some(secs))
            }
            None => (s, None),
        };
        match (name, limit) {
            ("mis", l) => Ok(SolverSpec::Mis { time_limit_s: l }),
            ("exact", l) => Ok(SolverSpec::Exact { time_limit_s: l }),
            ("greedy", None) => Ok(SolverSpec::Greedy),
            _ => Err(format!("unknown solver '{s}' (expected mis, mis:<s>, greedy, exact)")),
        }
    }
}

impl TryFrom<String> for SolverSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<SolverSpec> for String {
    fn from(s: SolverSpec) -> String {
        s.to_string()
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverSpec::Mis { time_limit_s: None } => f.write_str("mis"),
            SolverSpec::Mis { time_limit_s: Some(t) } => write!(f, "mis:{t}"),
            SolverSpec::Greedy => f.write_str("greedy"),
            SolverSpec::Exact { time_limit_s: None } => f.write_str("exact"),
            SolverSpec::Exact { time_limit_s: Some(t) } => write!(f, "exact:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub population_size: usize,
    pub max_unsuccessful_generations: usize,
    pub reductions: ReductionToggles,
    /// Satellite order for the traversal baseline; ascending ids if absent.
    pub satellite_order: Option<Vec<u32>>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let c = SolverConfig::default();
        Self {
            population_size: c.population_size,
            max_unsuccessful_generations: c.max_unsuccessful_generations,
            reductions: c.reductions,
            satellite_order: None,
        }
    }
}

fn default_solvers() -> Vec<SolverSpec> {
    vec![
        SolverSpec::Mis {
            time_limit_s: Some(60.0),
        },
        SolverSpec::Greedy,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub constellation: ConstellationSpec,
    #[serde(default)]
    pub horizon: HorizonSpec,
    pub requests: RequestSource,
    #[serde(default)]
    pub constraints: ConstraintDefaults,
    #[serde(default)]
    pub agility: AgilityModel,
    #[serde(default)]
    pub search: SearchParams,
    #[serde(default)]
    pub propagation: SearchOptions,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub solver: SolverSettings,
}

impl Scenario {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut sc: Scenario = toml::from_str(text).map_err(at(Stage::Config))?;
        if let RequestSource::Cities { path, .. } = &mut sc.requests {
            if path.is_relative() {
                *path = base_dir.join(&*path);
            }
        }
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ExperimentError::new(Stage::Config, format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
            .map_err(|e| ExperimentError::new(e.stage, format!("{}: {}", path.display(), e.message)))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::new(Stage::Config, m));
        if !(self.horizon.duration_s > 0.0 && self.horizon.duration_s.is_finite()) {
            return bad(format!("horizon duration {} must be positive", self.horizon.duration_s));
        }
        let n = match &self.requests {
            RequestSource::Cities { count, .. }
            | RequestSource::Random { count, .. }
            | RequestSource::Clustered { count, .. } => *count,
            RequestSource::Inline { points } => points.len(),
        };
        if n == 0 {
            return bad("at least one request is required".into());
        }
        if let RequestSource::Clustered { clusters, .. } = &self.requests {
            if *clusters == 0 {
                return bad("clustered requests need at least one cluster".into());
            }
        }
        if self.solvers.is_empty() {
            return bad("no solvers selected".into());
        }
        self.agility.validate().map_err(at(Stage::Config))?;
        self.search.validate().map_err(at(Stage::Config))?;
        if self.solver.population_size < 2 {
            return bad("population size must be at least 2".into());
        }
        Ok(())
    }

    pub fn horizon(&self) -> Horizon {
        Horizon::new(self.horizon.start_utc, self.horizon.duration_s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityRequests {
    pub requests: Vec<Request>,
    /// Malformed rows that were skipped.
    pub skipped: usize,
}

#[derive(Debug, Clone)]
struct City {
    name: String,
    lat: f64,
    lng: f64,
    population: f64,
}

/// The `n` most populous cities as point requests.
///
/// Rows with a missing name, unparsable numbers, out-of-range coordinates or
/// a negative population are skipped and counted.
pub fn load_cities(
    path: &Path,
    n: usize,
    constraints: &[RequestConstraint],
    horizon: &Horizon,
) -> Result<CityRequests, ExperimentError> {
    let fail = |m: String| ExperimentError::new(Stage::Requests, m);
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| fail(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| fail(format!("{}: missing column '{name}'", path.display())))
    };
    let (ci, lai, loi, pi) = (col("city")?, col("lat")?, col("lng")?, col("population")?);

    let mut cities = Vec::new();
    let mut skipped = 0usize;
    for (line, record) in reader.records().enumerate() {
        let parsed = record.ok().and_then(|r| {
            let field = |i: usize| r.get(i).map(str::trim);
            let name = field(ci).filter(|s| !s.is_empty())?.to_string();
            let lat: f64 = field(lai)?.parse().ok()?;
            let lng: f64 = field(loi)?.parse().ok()?;
            let population: f64 = field(pi)?.parse().ok()?;
            let ok = (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lng) && population >= 0.0;
            ok.then_some(City {
                name,
                lat,
                lng,
                population,
            })
        });
        match parsed {
            Some(c) => cities.push(c),
            None => {
                skipped += 1;
                log::warn!("{}: skipping malformed row {}", path.display(), line + 2);
            }
        }
    }
    if cities.len() < n {
        return Err(fail(format!(
            "{}: {n} cities requested but only {} valid rows available",
            path.display(),
            cities.len()
        )));
    }
    cities.sort_by(|a, b| b.population.total_cmp(&a.population).then_with(|| a.name.cmp(&b.name)));
    let requests = cities
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(i, c)| {
            let p = GeodeticPoint::new(c.lat, c.lng).expect("range checked");
            let mut r = Request::point(RequestId(i as u32), p, horizon, constraints.to_vec());
            r.name = Some(c.name);
            r
        })
        .collect();
    Ok(CityRequests { requests, skipped })
}

fn random_point(rng: &mut ChaCha8Rng, lat: [f64; 2], lon: [f64; 2]) -> GeodeticPoint {
    let (s0, s1) = (lat[0].to_radians().sin(), lat[1].to_radians().sin());
    let la = rng.random_range(s0.min(s1)..=s0.max(s1)).asin().to_degrees();
    let lo = rng.random_range(lon[0].min(lon[1])..=lon[0].max(lon[1]));
    GeodeticPoint::new(la, lo).expect("finite")
}

/// Builds the request list of a scenario before validation.
pub fn generate_requests(sc: &Scenario) -> Result<(Vec<Request>, usize), ExperimentError> {
    let horizon = sc.horizon();
    let cs = sc.constraints.constraints();
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    rng.set_stream(1);
    let points: Vec<(GeodeticPoint, Option<String>)> = match &sc.requests {
        RequestSource::Cities { path, count } => {
            let c = load_cities(path, *count, &cs, &horizon)?;
            return Ok((c.requests, c.skipped));
        }
        RequestSource::Inline { points } => points
            .iter()
            .map(|p| {
                GeodeticPoint::new(p.lat, p.lon)
                    .map(|g| (g, p.name.clone()))
                    .ok_or_else(|| {
                        ExperimentError::new(Stage::Requests, format!("bad coordinates ({}, {})", p.lat, p.lon))
                    })
            })
            .collect::<Result<_, _>>()?,
        RequestSource::Random {
            count,
            lat_range,
            lon_range,
        } => (0..*count)
            .map(|_| (random_point(&mut rng, *lat_range, *lon_range), None))
            .collect(),
        RequestSource::Clustered {
            count,
            clusters,
            spread_deg,
            lat_range,
        } => {
            let centers: Vec<GeodeticPoint> = (0..*clusters)
                .map(|_| random_point(&mut rng, *lat_range, default_lon_range()))
                .collect();
            (0..*count)
                .map(|i| {
                    let c = centers[i % centers.len()];
                    let lat = (c.lat_deg + rng.random_range(-spread_deg..=*spread_deg)).clamp(-89.0, 89.0);
                    let lon = c.lon_deg + rng.random_range(-spread_deg..=*spread_deg);
                    (GeodeticPoint::new(lat, lon).expect("finite"), None)
                })
                .collect()
        }
    };
    let requests = points
        .into_iter()
        .enumerate()
        .map(|(i, (p, name))| {
            let mut r = Request::point(RequestId(i as u32), p, &horizon, cs.clone());
            r.name = name;
            r
        })
        .collect();
    Ok((requests, 0))
}

/// Everything computed before any solver runs.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub horizon: Horizon,
    pub orbits: Vec<OrbitElements>,
    pub requests: Vec<Request>,
    pub rejected: Vec<Rejection>,
    /// Requests dropped as out of the constellation's reach.
    pub unreachable: usize,
    pub skipped_rows: usize,
    pub tiles: Vec<Tile>,
    pub collects: Vec<Collect>,
    pub infeasibility: ScheduleGraph,
    pub feasibility: ScheduleGraph,
}

impl Prepared {
    /// Tiles with at least one collect.
    pub fn tiles_with_access(&self) -> usize {
        self.collects.iter().map(|c| c.tile).collect::<HashSet<_>>().len()
    }

    /// Upper bound on any schedule: one collect per request with access.
    pub fn objective_bound(&self) -> usize {
        self.requests.len().min(self.tiles_with_access())
    }
}

/// Constellation, requests, collects and both graphs for a scenario.
pub fn prepare(sc: &Scenario) -> Result<Prepared, ExperimentError> {
    sc.validate()?;
    let horizon = sc.horizon();
    let orbits = sc.constellation.build()?;
    let (raw, skipped_rows) = generate_requests(sc)?;
    let mut valid = Vec::with_capacity(raw.len());
    let mut rejected = Vec::new();
    for r in raw {
        match validate_request(r, &horizon) {
            Ok(r) => valid.push(r),
            Err(e) => {
                log::warn!("{e}");
                rejected.push(e);
            }
        }
    }
    let before = valid.len();
    let requests = filter_requests(valid, &orbits);
    let unreachable = before - requests.len();
    let tiles = tessellate_all(&requests);
    let collects = collect_search_all(&orbits, &tiles, &requests, &horizon, &sc.search, &sc.propagation)
        .map_err(at(Stage::Access))?;
    let infeasibility = build_infeasibility_graph(&collects, &sc.agility).map_err(at(Stage::Graph))?;
    let feasibility = build_feasibility_graph(&collects, &sc.agility).map_err(at(Stage::Graph))?;
    Ok(Prepared {
        horizon,
        orbits,
        requests,
        rejected,
        unreachable,
        skipped_rows,
        tiles,
        collects,
        infeasibility,
        feasibility,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRow {
    pub solver: String,
    pub objective: usize,
    pub solve_time_s: f64,
    pub termination: Termination,
    pub violations: usize,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub seed: u64,
    pub start_utc: DateTime<Utc>,
    pub horizon_s: f64,
    pub look_angle_deg: [f64; 2],
    pub local_time_h: Option<[f64; 2]>,
    pub agility: AgilityModel,
    pub search: SearchParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub scenario: String,
    pub satellites: usize,
    pub requests: usize,
    pub collects: usize,
    pub tiles_with_access: usize,
    pub infeasibility_edges: usize,
    pub infeasibility_density: f64,
    pub rows: Vec<SolverRow>,
    pub valid: bool,
    pub metadata: ResultMetadata,
}

impl ExperimentResult {
    /// Copy with solver times zeroed, for comparing runs.
    pub fn without_times(&self) -> Self {
        let mut r = self.clone();
        for row in &mut r.rows {
            row.solve_time_s = 0.0;
        }
        r
    }
}

/// A finished scenario with the schedules behind each solver row.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub result: ExperimentResult,
    pub schedules: Vec<Schedule>,
    pub prepared: Prepared,
}

/// Runs one solver on a prepared scenario. Time is measured around the solver call only.
pub fn run_solver(
    spec: &SolverSpec,
    sc: &Scenario,
    prep: &Prepared,
) -> Result<(Schedule, Termination, Duration), ExperimentError> {
    let graph = prep
        .infeasibility
        .undirected()
        .expect("infeasibility graph is undirected");
    let to_schedule =
        |sol: &IndependentSetSolution| solution_to_schedule(sol, &prep.collects).map_err(at(Stage::Solve));
    match *spec {
        SolverSpec::Mis { time_limit_s } => {
            let config = SolverConfig {
                time_limit_s,
                seed: sc.seed,
                population_size: sc.solver.population_size,
                max_unsuccessful_generations: sc.solver.max_unsuccessful_generations,
                upper_bound: Some(prep.objective_bound()),
                reductions: sc.solver.reductions,
            };
            let start = Instant::now();
            let sol = redumis_solve(graph, &config);
            let elapsed = start.elapsed();
            Ok((to_schedule(&sol)?, sol.termination(), elapsed))
        }
        SolverSpec::Exact { time_limit_s } => {
            let start = Instant::now();
            let sol = exact_bnb(graph, time_limit_s.map(Duration::from_secs_f64));
            let elapsed = start.elapsed();
            Ok((to_schedule(&sol)?, sol.termination(), elapsed))
        }
        SolverSpec::Greedy => {
            let order: Option<Vec<SatId>> = sc
                .solver
                .satellite_order
                .as_ref()
                .map(|o| o.iter().map(|&s| SatId(s)).collect());
            let start = Instant::now();
            let sched = graph_traversal_schedule(&prep.feasibility, &prep.collects, order.as_deref())
                .map_err(at(Stage::Solve))?;
            let elapsed = start.elapsed();
            Ok((sched, Termination::Converged, elapsed))
        }
    }
}

/// The full pipeline, keeping schedules and intermediate data.
pub fn execute_scenario(sc: &Scenario) -> Result<ScenarioRun, ExperimentError> {
    let prep = prepare(sc)?;
    let bound = prep.requests.len().min(prep.collects.len());
    let mut rows = Vec::new();
    let mut schedules = Vec::new();
    for spec in &sc.solvers {
        let (mut sched, termination, elapsed) = run_solver(spec, sc, &prep)?;
        sched.provenance.solver = spec.to_string();
        sched.provenance.wall_time_s = elapsed.as_secs_f64();
        let report = validate_schedule(&sched, &prep.collects, &sc.agility, &prep.horizon);
        for v in &report.violations {
            log::error!("{}: {spec}: {v:?}", sc.name);
        }
        let within_bound = sched.objective <= bound;
        if !within_bound {
            log::error!(
                "{}: {spec}: objective {} exceeds bound {bound}",
                sc.name,
                sched.objective
            );
        }
        rows.push(SolverRow {
            solver: spec.to_string(),
            objective: sched.objective,
            solve_time_s: elapsed.as_secs_f64(),
            termination,
            violations: report.violations.len(),
            valid: report.is_valid() && within_bound,
        });
        schedules.push(sched);
    }
    let stats = graph_stats(&prep.infeasibility);
    let result = ExperimentResult {
        scenario: sc.name.clone(),
        satellites: prep.orbits.len(),
        requests: prep.requests.len(),
        collects: prep.collects.len(),
        tiles_with_access: prep.tiles_with_access(),
        infeasibility_edges: stats.edges,
        infeasibility_density: stats.density,
        valid: rows.iter().all(|r| r.valid),
        rows,
        metadata: ResultMetadata {
            seed: sc.seed,
            start_utc: sc.horizon.start_utc,
            horizon_s: sc.horizon.duration_s,
            look_angle_deg: sc.constraints.look_angle_deg,
            local_time_h: sc.constraints.local_time_h,
            agility: sc.agility,
            search: sc.search,
        },
    };
    Ok(ScenarioRun {
        result,
        schedules,
        prepared: prep,
    })
}

pub fn run_scenario(sc: &Scenario) -> Result<ExperimentResult, ExperimentError> {
    execute_scenario(sc).map(|r| r.result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub scenario: String,
    pub result: Option<ExperimentResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn all_valid(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.error.is_none() && e.result.as_ref().is_some_and(|r| r.valid))
    }

    /// Solver columns in order of first appearance.
    fn solvers(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in self.entries.iter().filter_map(|e| e.result.as_ref()) {
            for row in &r.rows {
                if !out.contains(&row.solver) {
                    out.push(row.solver.clone());
                }
            }
        }
        out
    }

    /// Header and rows of the results table.
    pub fn table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let solvers = self.solvers();
        let mut header: Vec<String> = ["scenario", "|S|", "|R|", "|X|"].map(String::from).to_vec();
        for s in &solvers {
            header.push(format!("{s} |X^S|"));
            header.push(format!("{s} t_solve"));
        }
        header.push("best".into());
        header.push("status".into());

        let rows = self
            .entries
            .iter()
            .map(|e| {
                let mut row = vec![e.scenario.clone()];
                match &e.result {
                    Some(r) => {
                        row.extend([r.satellites, r.requests, r.collects].map(|v| v.to_string()));
                        for s in &solvers {
                            match r.rows.iter().find(|x| &x.solver == s) {
                                Some(x) => {
                                    row.push(x.objective.to_string());
                                    row.push(format!("{:.3}", x.solve_time_s));
                                }
                                None => row.extend([String::new(), String::new()]),
                            }
                        }
                        let best = r.rows.iter().map(|x| x.objective).max();
                        let marked: Vec<&str> = r
                            .rows
                            .iter()
                            .filter(|x| Some(x.objective) == best)
                            .map(|x| x.solver.as_str())
                            .collect();
                        row.push(marked.join("+"));
                        row.push(if r.valid { "ok" } else { "invalid" }.into());
                    }
                    None => {
                        row.extend(std::iter::repeat_n(String::new(), 3 + 2 * solvers.len() + 1));
                        row.push(format!("failed: {}", e.error.as_deref().unwrap_or("unknown")));
                    }
                }
                row
            })
            .collect();
        (header, rows)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let (header, rows) = self.table();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (header, rows) = self.table();
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(&header).trim_end())?;
        writeln!(
            out,
            "{}",
            widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")
        )?;
        for r in &rows {
            writeln!(out, "{}", line(r).trim_end())?;
        }
        Ok(())
    }
}

/// Runs every scenario and writes `results.csv`, `results.txt` and `results.json`.
/// A failing scenario is recorded and the suite continues.
pub fn run_benchmark_suite(scenarios: &[Scenario], out_dir: &Path) -> Result<SuiteReport, ExperimentError> {
    let entries = scenarios
        .iter()
        .map(|sc| {
            log::info!("running scenario {}", sc.name);
            match run_scenario(sc) {
                Ok(r) => SuiteEntry {
                    scenario: sc.name.clone(),
                    result: Some(r),
                    error: None,
                },
                Err(e) => {
                    log::error!("scenario {} failed: {e}", sc.name);
                    SuiteEntry {
                        scenario: sc.name.clone(),
                        result: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    let report = SuiteReport { entries };
    write_suite_outputs(&report, out_dir)?;
    Ok(report)
}

pub fn write_suite_outputs(report: &SuiteReport, out_dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(out_dir).map_err(at(Stage::Output))?;
    let csv_file = fs::File::create(out_dir.join("results.csv")).map_err(at(Stage::Output))?;
    report.write_csv(csv_file).map_err(at(Stage::Output))?;
    let txt = fs::File::create(out_dir.join("results.txt")).map_err(at(Stage::Output))?;
    report.write_text(txt).map_err(at(Stage::Output))?;
    let json = serde_json::to_string_pretty(report).map_err(at(Stage::Output))?;
    fs::write(out_dir.join("results.json"), json).map_err(at(Stage::Output))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFile {
    /// Scenario files, relative to the suite file.
    pub scenarios: Vec<PathBuf>,
}

pub fn load_suite(path: &Path) -> Result<Vec<Scenario>, ExperimentError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ExperimentError::new(Stage::Config, format!("{}: {e}", path.display())))?;
    let suite: SuiteFile =
        toml::from_str(&text).map_err(|e| ExperimentError::new(Stage::Config, format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    suite.scenarios.iter().map(|p| Scenario::load(&base.join(p))).collect()
}
