use envderiv::extremes::{exhaustive_extremes, randomized_search, SearchConfig};
use envderiv::lanes::{embed_lanes, LaneSpec};
use envderiv::lattice::{Environment, Lattice, LatticeSpec};
use envderiv::passage::passage_time;
use envderiv::variance::{exact_moments, monte_carlo_variance, BernoulliParam};
use num_rational::Ratio;

fn square(a: i64, b: i64) -> Lattice<i64> {
    Lattice::build(LatticeSpec::reduced(vec![(0, 2), (0, 2)], a, b).with_endpoints(vec![0, 0], vec![2, 2])).unwrap()
}

#[test]
fn random_search_is_dominated_by_exhaustive() {
    let l = Lattice::build(LatticeSpec::reduced(vec![(0, 3), (0, 1)], 1i64, 3).with_endpoints(vec![0, 0], vec![3, 1]))
        .unwrap();
    for k in 2..=4 {
        let exact = exhaustive_extremes(&l, k).unwrap();
        for seed in 0..3 {
            let r = randomized_search(&l, k, &SearchConfig::new(500, seed)).unwrap();
            assert!(r.max_normalized <= exact.max_normalized && r.min_normalized >= exact.min_normalized);
        }
    }
}

#[test]
fn search_keeps_lane_witness() {
    let e = embed_lanes(&LaneSpec::new(2, 2, 0, 0).unwrap(), 1i64, 2).unwrap();
    let mut cfg = SearchConfig::new(300, 3);
    cfg.start = Some(e.env.clone());
    cfg.start_subset = Some(e.subset.clone());
    let r = randomized_search(&e.lattice, 4, &cfg).unwrap();
    assert!(r.max_normalized >= Ratio::from_integer(2));
    assert!(r.within_envelope());
}

#[test]
fn start_subset_needs_matching_order() {
    let e = embed_lanes(&LaneSpec::new(1, 1, 0, 0).unwrap(), 1i64, 2).unwrap();
    let mut cfg = SearchConfig::new(10, 0);
    cfg.start_subset = Some(e.subset.clone());
    assert!(randomized_search(&e.lattice, 2, &cfg).is_err());
    cfg.start = Some(e.env.clone());
    assert!(randomized_search(&e.lattice, 3, &cfg).is_err());
    assert!(randomized_search(&e.lattice, 2, &cfg).is_ok());
}

#[test]
fn monte_carlo_within_four_standard_errors() {
    let l = square(1, 3);
    for p in [0.3f64, 0.5] {
        let param = BernoulliParam::new(p).unwrap();
        let exact = exact_moments(&l, param).unwrap();
        let mc = monte_carlo_variance(&l, param, 100_000, 2024).unwrap();
        assert!((mc.variance - exact.variance).abs() <= 4.0 * mc.standard_error, "p = {p}: {mc:?} vs {exact:?}");
        assert!(mc.standard_error > 0.0);
    }
}

#[test]
fn degenerate_p_limits() {
    let l = square(1, 3);
    let all_a = passage_time(&l, &Environment::uniform(l.edge_count(), envderiv::lattice::Value::A)) as f64;
    let m = exact_moments(&l, BernoulliParam::new(1.0f64 - 1e-9).unwrap()).unwrap();
    assert!((m.mean - all_a).abs() < 1e-6);
    let mc = monte_carlo_variance(&l, BernoulliParam::new(1e-9f64).unwrap(), 2000, 1).unwrap();
    assert!(mc.variance < 1e-6);
}

#[test]
fn symmetric_two_path_mean() {
    // two disjoint two-edge routes; f = min of the route sums
    let l = Lattice::build(LatticeSpec::reduced(vec![(0, 1), (0, 1)], 1i64, 2).with_endpoints(vec![0, 0], vec![1, 1]))
        .unwrap();
    let mut total = 0;
    for mask in 0..16u32 {
        let r1 = 2 + (mask & 0b0011).count_ones() as i64;
        let r2 = 2 + (mask & 0b1100).count_ones() as i64;
        total += r1.min(r2);
    }
    let m = exact_moments(&l, BernoulliParam::new(0.5).unwrap()).unwrap();
    assert!((m.mean - total as f64 / 16.0).abs() < 1e-12);
}
