mod common;

use cat0lab::geodesy::{distance, DistanceStatus, DEFAULT_BUDGET};
use common::{corpus, random_point, EpsNet};
use rand::rngs::StdRng;
use rand::SeedableRng;

const EPS: f64 = 0.01;

#[test]
fn distances_match_eps_net() {
    let mut rng = StdRng::seed_from_u64(11);
    for name in ["cone3", "mixed", "cone5"] {
        let cx = corpus(name);
        let net = EpsNet::new(&cx, EPS);
        for _ in 0..3 {
            let x = random_point(&cx, &mut rng);
            let ys: Vec<_> = (0..5).map(|_| random_point(&cx, &mut rng)).collect();
            for (y, oracle) in ys.iter().zip(net.distances(x, &ys)) {
                let d = distance(&cx, x, *y, DEFAULT_BUDGET).unwrap();
                assert_eq!(d.status, DistanceStatus::Exact);
                // the net only sees real paths, so it can never beat the geodesic
                assert!(d.length <= oracle + 1e-9, "{name}: {} > net {oracle}", d.length);
                assert!(oracle - d.length <= 2.0 * EPS, "{name}: {} vs net {oracle}", d.length);
                assert!((d.trace.length - d.length).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn metric_axioms() {
    let mut rng = StdRng::seed_from_u64(5);
    for name in ["tripod", "hyperbolic"] {
        let cx = corpus(name);
        for _ in 0..10 {
            let [x, y, z] = [(); 3].map(|_| random_point(&cx, &mut rng));
            let d = |a, b| distance(&cx, a, b, DEFAULT_BUDGET).unwrap().exact().unwrap();
            let (xy, yx, yz, xz) = (d(x, y), d(y, x), d(y, z), d(x, z));
            assert!((xy - yx).abs() < 1e-9, "{name}: asymmetric {xy} {yx}");
            assert!(xz <= xy + yz + 1e-9, "{name}: triangle inequality");
            assert_eq!(d(x, x), 0.0);
        }
    }
}

/// Points on a geodesic move the distance to a third point by at most the
/// length travelled.
#[test]
fn distance_is_one_lipschitz_along_geodesics() {
    let mut rng = StdRng::seed_from_u64(8);
    for name in ["cone5", "hyperbolic", "mixed"] {
        let cx = corpus(name);
        for _ in 0..8 {
            let [x, y, z] = [(); 3].map(|_| random_point(&cx, &mut rng));
            let g = distance(&cx, x, y, DEFAULT_BUDGET).unwrap().trace;
            let steps = 6;
            let mut prev: Option<(f64, f64)> = None;
            for k in 0..=steps {
                let t = g.length * k as f64 / steps as f64;
                let dz = distance(&cx, g.point_at(&cx, t), z, DEFAULT_BUDGET).unwrap().length;
                if let Some((t0, d0)) = prev {
                    assert!(
                        (dz - d0).abs() <= t - t0 + 1e-9,
                        "{name}: jump {d0} -> {dz} over {}",
                        t - t0
                    );
                }
                prev = Some((t, dz));
            }
        }
    }
}
