use std::path::Path;

use constel_core::access::{collect_search_all, SearchOptions, SearchParams};
use constel_core::astro::{
    is_visible, walker_constellation, Epoch, GeodeticPoint, Horizon, KeplerPropagator, OrbitElements, Propagator, SatId,
};
use constel_core::experiment::{execute_scenario, prepare, run_benchmark_suite, Scenario};
use constel_core::schedcore::{
    build_infeasibility_graph, build_infeasibility_graph_brute, k_agility, k_repetition, AgilityModel,
};
use constel_core::tasking::{
    filter_requests, reachable_latitude, tessellate_all, Request, RequestConstraint, RequestId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn horizon() -> Horizon {
    Horizon::new("2020-07-23T00:00:00Z".parse().unwrap(), 86_400.0)
}

fn random_requests(rng: &mut ChaCha8Rng, n: usize, h: &Horizon) -> Vec<Request> {
    (0..n as u32)
        .map(|i| {
            let loc = GeodeticPoint::new(rng.random_range(-60.0..60.0), rng.random_range(-180.0..180.0)).unwrap();
            let cs = vec![RequestConstraint::LookAngleRange {
                min_deg: 0.0,
                max_deg: 50.0,
            }];
            Request::point(RequestId(i), loc, h, cs)
        })
        .collect()
}

fn scenario_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

#[test]
fn filtered_requests_are_never_visible() {
    let h = horizon();
    let orbits = vec![OrbitElements::circular(SatId(0), 600.0, 45.0, 30.0, 0.0).unwrap()];
    let limit = reachable_latitude(&orbits);
    let reqs: Vec<Request> = (0..40u32)
        .map(|i| {
            let lat = limit - 2.0 + i as f64 * 0.25;
            let loc = GeodeticPoint::new(lat.min(90.0), i as f64 * 9.0).unwrap();
            Request::point(RequestId(i), loc, &h, vec![])
        })
        .collect();
    let kept: Vec<RequestId> = filter_requests(reqs.clone(), &orbits).iter().map(|r| r.id).collect();
    let prop = KeplerPropagator::new(orbits[0], &h, true);
    for r in reqs.iter().filter(|r| !kept.contains(&r.id)) {
        let loc = r.location().unwrap();
        let seen = (0..=8640).any(|k| is_visible(&prop.state_at(Epoch::from_seconds(k as f64 * 10.0)), loc));
        assert!(!seen, "dropped request {:?} at lat {} is visible", r.id, loc.lat_deg);
    }
    assert!(!kept.is_empty() && kept.len() < reqs.len());
}

#[test]
fn sweep_builder_matches_pairwise_builder() {
    let h = horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let orbits = walker_constellation(3, 3, 1, 500.0, 97.4).unwrap();
    let reqs = random_requests(&mut rng, 150, &h);
    let tiles = tessellate_all(&reqs);
    let collects = collect_search_all(
        &orbits,
        &tiles,
        &reqs,
        &h,
        &SearchParams::default(),
        &SearchOptions::default(),
    )
    .unwrap();
    assert!(collects.len() > 300);
    for m in [
        AgilityModel::default(),
        AgilityModel::new(0.2, 60.0).unwrap(),
        AgilityModel::new(5.0, 0.0).unwrap(),
    ] {
        let fast = build_infeasibility_graph(&collects, &m).unwrap();
        let slow = build_infeasibility_graph_brute(&collects, &m).unwrap();
        let mut a: Vec<_> = fast.edges().collect();
        let mut b: Vec<_> = slow.edges().collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }
}

#[test]
fn random_pairs_have_edges_exactly_when_incompatible() {
    let h = horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let orbits = walker_constellation(2, 1, 0, 500.0, 97.4).unwrap();
    let reqs = random_requests(&mut rng, 200, &h);
    let tiles = tessellate_all(&reqs);
    let collects = collect_search_all(
        &orbits,
        &tiles,
        &reqs,
        &h,
        &SearchParams::default(),
        &SearchOptions::default(),
    )
    .unwrap();
    let m = AgilityModel::default();
    let g = build_infeasibility_graph(&collects, &m).unwrap();
    let n = collects.len();
    for _ in 0..1000 {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i == j {
            continue;
        }
        let (a, b) = (&collects[i], &collects[j]);
        let compatible = k_repetition(a, b) && (a.sat != b.sat || k_agility(a, b, &m));
        assert_eq!(g.connected(i as u32, j as u32), !compatible, "pair {i} {j}");
    }
}

#[test]
fn worker_count_does_not_change_collects() {
    let h = horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let orbits = walker_constellation(2, 2, 1, 550.0, 97.6).unwrap();
    let reqs = random_requests(&mut rng, 60, &h);
    let tiles = tessellate_all(&reqs);
    let run = |workers| {
        let opts = SearchOptions {
            j2: true,
            workers: Some(workers),
        };
        collect_search_all(&orbits, &tiles, &reqs, &h, &SearchParams::default(), &opts).unwrap()
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn shipped_scenarios_load() {
    for name in [
        "walker4_cities100.toml",
        "walker8_cities175.toml",
        "single_clustered.toml",
    ] {
        let sc = Scenario::load(&scenario_dir().join(name)).unwrap();
        assert!(!sc.solvers.is_empty(), "{name}");
    }
}

#[test]
fn cities_scenario_end_to_end() {
    let mut sc = Scenario::load(&scenario_dir().join("walker4_cities100.toml")).unwrap();
    sc.solvers = vec!["mis:10".parse().unwrap(), "greedy".parse().unwrap()];
    let run = execute_scenario(&sc).unwrap();
    let r = &run.result;
    assert!(r.valid);
    assert_eq!(r.requests, 100);
    for row in &r.rows {
        assert!(row.objective <= r.requests.min(r.collects));
        assert!(row.objective <= r.tiles_with_access);
    }
    assert!(r.rows[0].objective >= r.rows[1].objective);

    let again = execute_scenario(&sc).unwrap();
    assert_eq!(r.without_times(), again.result.without_times());
    assert_eq!(run.prepared.collects, again.prepared.collects);
}

#[test]
fn empty_scenario_yields_zero() {
    let text = r#"
        name = "out-of-reach"
        solvers = ["mis:1", "greedy", "exact"]
        [constellation]
        kind = "walker"
        total = 1
        planes = 1
        phasing = 0
        altitude_km = 500.0
        inclination_deg = 20.0
        [requests]
        source = "inline"
        points = [{ lat = 80.0, lon = 0.0 }, { lat = -85.0, lon = 40.0 }]
    "#;
    let sc = Scenario::from_toml_str(text, Path::new(".")).unwrap();
    let prep = prepare(&sc).unwrap();
    assert!(prep.collects.is_empty());
    let r = execute_scenario(&sc).unwrap().result;
    assert_eq!(r.collects, 0);
    assert!(r.rows.iter().all(|row| row.objective == 0 && row.valid));
}

#[test]
fn suite_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = Scenario::load(&scenario_dir().join("single_clustered.toml")).unwrap();
    sc.solvers = vec!["mis:2".parse().unwrap(), "greedy".parse().unwrap()];
    let report = run_benchmark_suite(&[sc], dir.path()).unwrap();
    assert!(report.all_valid());
    for f in ["results.csv", "results.txt", "results.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}
