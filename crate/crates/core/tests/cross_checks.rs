use facprod::density::{self, quadrature_with_error, RatioMode, RegionSpec, QUADRATURE_MAX_DIM};
use facprod::equations::{verify, FactorialEquation};
use facprod::factorint::{delta_expvec, factorial_expvec};
use facprod::par;
use facprod::search::{
    search_delta, search_factorial_products, DeltaSearchSpec, ResourceGuards, SearchSpec,
};
use facprod::ExpVec;

fn matrix() -> Vec<RegionSpec> {
    let mut specs = Vec::new();
    for t in 2..=4 {
        for s in 1..=t.min(3) {
            for c in [1.0, 2.0, 3.5, 5.0] {
                specs.push(RegionSpec::new(t, s, c).unwrap());
            }
        }
    }
    for pairing in [vec![3], vec![4]] {
        specs.push(RegionSpec::with_pairing(4, 2, 2.0, pairing).unwrap());
    }
    specs
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let mut compared = 0;
    for spec in matrix() {
        if spec.dim() > QUADRATURE_MAX_DIM {
            continue;
        }
        let q = quadrature_with_error(&spec, 6).unwrap();
        let est = density::mc_only(&spec, 200_000, 3).unwrap();
        assert!(
            (est.mc_mean - q.value).abs() <= 4.0 * est.mc_stderr.max(1e-9),
            "{spec:?}: mc {} ± {}, quadrature {}",
            est.mc_mean,
            est.mc_stderr,
            q.value
        );
        compared += 1;
    }
    assert!(compared >= 30);
}

#[test]
fn dropped_splits_into_bounded_and_exceeded() {
    for (t, s, c) in [(3, 2, 1.0), (4, 2, 2.5), (3, 3, 1.0)] {
        let base = RegionSpec::new(t, s, c).unwrap();
        let v =
            |mode| density::quadrature_density(&base.clone().with_mode(mode).unwrap(), 4).unwrap();
        let (b, d, e) = (
            v(RatioMode::Bounded),
            v(RatioMode::Dropped),
            v(RatioMode::Exceeded),
        );
        assert!((b + e - d).abs() < 1e-12);
        // Each MC point lands in exactly one of the two parts.
        let hits = |mode| {
            density::mc_only(&base.clone().with_mode(mode).unwrap(), 50_000, 9)
                .unwrap()
                .hits
        };
        assert_eq!(
            hits(RatioMode::Bounded) + hits(RatioMode::Exceeded),
            hits(RatioMode::Dropped)
        );
    }
}

#[test]
fn search_is_worker_independent() {
    let spec = SearchSpec::new(14, 4, 2);
    let runs: Vec<Vec<String>> = [1, 2, 8]
        .iter()
        .map(|&w| {
            par::with_workers(w, || {
                search_factorial_products(&spec, &ResourceGuards::default())
                    .unwrap()
                    .iter()
                    .map(|r| r.to_json_line())
                    .collect()
            })
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn every_record_verifies_and_is_canonical() {
    let recs =
        search_factorial_products(&SearchSpec::new(16, 5, 2), &ResourceGuards::default()).unwrap();
    let mut keys = Vec::new();
    for r in &recs {
        let strict: FactorialEquation =
            r.eq.literal().parse().expect("record satisfies invariants");
        let again = verify(&strict).unwrap();
        assert!(again.holds);
        assert_eq!(again.classification, r.classification);
        keys.push((r.eq.rhs().to_vec(), r.eq.lhs().to_vec()));
    }
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(keys, sorted);
}

#[test]
fn delta_solutions_are_factorial_identities() {
    for k_list in [vec![1], vec![2], vec![3], vec![2, 1]] {
        let spec = DeltaSearchSpec {
            k_list: k_list.clone(),
            x_max: 40,
            t_max: 4,
            c: None,
        };
        let sols = search_delta(&spec, &ResourceGuards::default()).unwrap();
        assert!(!sols.is_empty(), "{k_list:?}");
        for sol in sols {
            let blocks: ExpVec = sol
                .x
                .iter()
                .zip(&sol.k)
                .map(|(&x, &k)| delta_expvec(x, k))
                .sum();
            let lhs: ExpVec = sol.a.iter().map(|&a| factorial_expvec(a)).sum();
            assert_eq!(blocks, lhs, "{sol:?}");
        }
    }
}
