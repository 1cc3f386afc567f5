use std::sync::LazyLock;

use proptest::prelude::*;

use fixpoint_core::analysis::{eta_over_sample, remark1_chain, remark2_chain, sequence_bound};
use fixpoint_core::catalog;
use fixpoint_core::sampling::{self, Sample};
use fixpoint_core::{
    convex_combine, domain_contains, ConvexityFunction, DomainSpec, MapKind, MappingSpec, Point, SequenceRule,
};

static POWER_MAPS: LazyLock<Vec<MappingSpec>> = LazyLock::new(|| {
    vec![
        MappingSpec::sahu_step(),
        MappingSpec::scale(0.5, DomainSpec::interval(-1.0, 1.0)).unwrap(),
        MappingSpec::scale(3.0, DomainSpec::real_line()).unwrap(),
        catalog::four_dim_contractions().unwrap().remove(1),
    ]
});

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let drift = 1.0 - w.iter().sum::<f64>();
        w[0] += drift;
        w
    })
}

fn points(count: usize, dim: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::collection::vec(-100.0f64..100.0, dim), count)
        .prop_map(|v| v.into_iter().map(|c| Point::new(c).unwrap()).collect())
}

fn weighted_points() -> impl Strategy<Value = (Vec<f64>, Vec<Point>)> {
    (1usize..7, 1usize..5).prop_flat_map(|(k, d)| (simplex(k), points(k, d)))
}

proptest! {
    #[test]
    fn convex_combine_is_permutation_invariant(
        (w, pts) in weighted_points(),
        rot in 0usize..7,
    ) {
        let a = convex_combine(&w, &pts).unwrap();
        let k = w.len();
        let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).rev().collect();
        let w2: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
        let p2: Vec<Point> = perm.iter().map(|&i| pts[i].clone()).collect();
        let b = convex_combine(&w2, &p2).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn convex_combine_stays_in_hull((w, pts) in weighted_points()) {
        let c = convex_combine(&w, &pts).unwrap();
        for (axis, v) in c.coords().iter().enumerate() {
            let lo = pts.iter().map(|p| p.coords()[axis]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p.coords()[axis]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
        }
    }

    #[test]
    fn convex_domains_are_closed_under_combination(
        w in simplex(4),
        raw in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 4),
        radius in 0.1f64..2.0,
    ) {
        let domains = [
            DomainSpec::Box { lo: vec![-1.0, 0.0, 0.5], hi: vec![1.0, 0.25, 2.0] },
            DomainSpec::Ball { center: Point::new(vec![0.5, -0.5, 1.0]).unwrap(), radius },
        ];
        for k in &domains {
            let pts: Vec<Point> = raw.iter().map(|c| k.project(&Point::new(c.clone()).unwrap())).collect();
            let c = convex_combine(&w, &pts).unwrap();
            prop_assert!(domain_contains(k, &c, 1e-9).unwrap());
        }
    }

    #[test]
    fn square_gauge_is_strictly_increasing(a in 0.0f64..1e3, b in 0.0f64..1e3) {
        let g = ConvexityFunction::Square;
        prop_assert_eq!(g.evaluate(0.0), 0.0);
        if a < b {
            prop_assert!(g.evaluate(a) < g.evaluate(b));
        }
    }

    #[test]
    fn powers_compose(m in 1usize..12, n in 1usize..12, t in 0.0f64..1.0, which in 0usize..4) {
        let map = &POWER_MAPS[which];
        let x = match which {
            1 => Point::scalar(2.0 * t - 1.0).unwrap(),
            3 => catalog::four_dim_box().project(&Point::new(vec![t, -t, 2.0 * t, 0.5 - t]).unwrap()),
            _ => Point::scalar(t).unwrap(),
        };
        let whole = map.apply_power(m + n, &x).unwrap();
        let split = map.apply_power(m, &map.apply_power(n, &x).unwrap()).unwrap();
        let scale = fixpoint_core::norm(&whole).max(1e-300);
        prop_assert!(whole.distance(&split).unwrap() <= 1e-9 * scale.max(1.0), "{whole} vs {split}");
    }
}

#[test]
fn known_fixed_points_are_preserved_by_powers() {
    let mut maps = catalog::four_dim_contractions().unwrap();
    maps.push(MappingSpec::sahu_step());
    maps.push(MappingSpec::scale(3.0, DomainSpec::real_line()).unwrap());
    maps.push(catalog::nilpotent_shear().unwrap().0);
    for map in &maps {
        assert!(!map.known_fixed_points().is_empty());
        for p in map.known_fixed_points() {
            for n in 1..=32 {
                let d = map.apply_power(n, p).unwrap().distance(p).unwrap();
                assert!(d <= n as f64 * 1e-9, "n={n} d={d}");
            }
        }
    }
}

#[test]
fn contractions_share_the_declared_fixed_point() {
    // per-map Banach iteration from several starts
    let p = Point::new(catalog::FOUR_DIM_FIXED_POINT.to_vec()).unwrap();
    let k = catalog::four_dim_box();
    for map in catalog::four_dim_contractions().unwrap() {
        for start in [[1.0, 1.0, 1.0, 1.0], [-1.0, 0.5, -0.3, 0.9], [0.0; 4]] {
            let mut x = k.project(&Point::new(start.to_vec()).unwrap());
            for _ in 0..500 {
                x = map.apply(&x).unwrap();
            }
            assert!(x.distance(&p).unwrap() < 1e-12, "{x}");
        }
    }
}

#[test]
fn remark1_chain_holds_on_shipped_examples() {
    for (name, map, mu) in catalog::asymptotically_nonexpansive_examples().unwrap() {
        let rep = remark1_chain(&map, &mu, 8, 2000, 17).unwrap();
        assert!(rep.holds(), "{name}: {rep:?}");
    }
}

#[test]
fn remark1_conclusion_is_tight_for_the_shear() {
    // the shear expands by exactly 3/2 along y, so the premise is attained
    let (map, mu) = catalog::nilpotent_shear().unwrap();
    let rep = remark1_chain(&map, &mu, 1, 2000, 3).unwrap();
    assert!(rep.holds());
    let x = Point::new(vec![0.0, 0.0]).unwrap();
    let y = Point::new(vec![0.0, 0.5]).unwrap();
    let lhs = map.apply(&x).unwrap().distance(&map.apply(&y).unwrap()).unwrap();
    assert_eq!(lhs, 0.75);
    assert!(lhs > x.distance(&y).unwrap());
}

#[test]
fn remark2_chain_holds_on_shipped_examples() {
    let a = SequenceRule::geometric(1.0, 0.5);
    let sahu = MappingSpec::sahu_step();
    for k in [None, Some(SequenceRule::Constant { value: 1.0 })] {
        let rep = remark2_chain(&sahu, &a, k.as_ref(), 10, 5000, 8).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }
    for (name, map, _) in catalog::asymptotically_nonexpansive_examples().unwrap() {
        let rep = remark2_chain(&map, &a, None, 6, 2000, 8).unwrap();
        assert!(rep.holds(), "{name}: {rep:?}");
    }
}

fn sahu_sample(samples: usize, seed: u64) -> Sample {
    sampling::stratified(&DomainSpec::unit_interval(), samples, seed, &[0.5]).unwrap()
}

#[test]
fn eta_bounds_every_sampled_pair() {
    let maps = [
        MappingSpec::sahu_step(),
        MappingSpec::scale(0.5, DomainSpec::interval(0.0, 1.0)).unwrap(),
        MappingSpec::new(
            MapKind::Composed {
                maps: vec![MapKind::SahuStep, MapKind::Scale { factor: 0.5 }],
            },
            DomainSpec::unit_interval(),
            vec![],
        )
        .unwrap(),
    ];
    let sample = sahu_sample(3000, 5);
    for map in &maps {
        for n in 1..4 {
            let a_n = 0.5f64.powi(n as i32);
            let est = eta_over_sample(map, n, a_n, &sample).unwrap();
            for &(i, j) in &sample.pairs {
                let (x, y) = (&sample.points[i], &sample.points[j]);
                let lhs = map
                    .apply_power(n, x)
                    .unwrap()
                    .distance(&map.apply_power(n, y).unwrap())
                    .unwrap();
                assert!(lhs <= est.eta_hat * (x.distance(y).unwrap() + a_n) + 1e-12);
            }
        }
    }
}

#[test]
fn eta_never_decreases_when_pairs_are_added() {
    let map = MappingSpec::sahu_step();
    let full = sahu_sample(4000, 2);
    let mut prev = 0.0;
    for len in [10, 100, 1000, full.pairs.len()] {
        let part = Sample {
            points: full.points.clone(),
            pairs: full.pairs[..len].to_vec(),
        };
        let eta = eta_over_sample(&map, 1, 0.5, &part).unwrap().eta_hat;
        assert!(eta >= prev);
        prev = eta;
    }
}

#[test]
fn eta_respects_declared_constant() {
    // the step map satisfies the nearly Lipschitz inequality with k_n = 1
    let map = MappingSpec::sahu_step();
    let sample = sahu_sample(4000, 9);
    for n in 1..6 {
        let a_n = 0.5f64.powi(n as i32);
        let holds = sample.pairs.iter().all(|&(i, j)| {
            let (x, y) = (&sample.points[i], &sample.points[j]);
            let lhs = map
                .apply_power(n, x)
                .unwrap()
                .distance(&map.apply_power(n, y).unwrap())
                .unwrap();
            lhs <= x.distance(y).unwrap() + a_n
        });
        assert!(holds);
        assert!(eta_over_sample(&map, n, a_n, &sample).unwrap().eta_hat <= 1.0 + 1e-10);
    }
}

#[test]
fn envelope_dominates_random_sequences() {
    use rand::{Rng, SeedableRng};
    let alpha = SequenceRule::inverse_square(0.7);
    let b = SequenceRule::geometric(2.0, 0.8);
    let env = sequence_bound(1.5, &alpha, &b, 2000).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let mut a = 1.5;
        for n in 1..=2000 {
            assert!(a <= env.value_at(n).unwrap() * (1.0 + 1e-14), "n={n}");
            let u: f64 = rng.random();
            a = (1.0 + alpha.value(n)) * a + b.value(n) * u;
        }
    }
}
