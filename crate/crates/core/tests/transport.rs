use fikit::space::{build_grid_1d, gaussian_measure, MetricSpace, Point, ProbabilityMeasure, SpaceKind};
use fikit::transport::{wasserstein_1d, wasserstein_p};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn planar_space(rng: &mut ChaCha8Rng, n: usize) -> MetricSpace {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
        }
    }
    let points = pts.iter().enumerate().map(|(id, p)| Point { id, coords: Some(vec![p.0, p.1]) }).collect();
    MetricSpace::from_parts(SpaceKind::Custom, points, dist, vec![], 0.0).unwrap()
}

fn random_measure(rng: &mut ChaCha8Rng, n: usize, zero_fraction: f64) -> ProbabilityMeasure {
    let mut w: Vec<f64> = (0..n).map(|_| if rng.gen::<f64>() < zero_fraction { 0.0 } else { rng.gen::<f64>() }).collect();
    if w.iter().all(|x| *x == 0.0) {
        w[0] = 1.0;
    }
    ProbabilityMeasure::normalized(w).unwrap()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(k - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

#[test]
fn uniform_assignment_matches_permutation_brute_force() {
    // Between two uniform measures on k points each, some permutation is optimal.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let k = 6;
        let space = planar_space(&mut rng, 2 * k);
        let mut a = vec![0.0; 2 * k];
        let mut b = vec![0.0; 2 * k];
        a[..k].iter_mut().for_each(|x| *x = 1.0);
        b[k..].iter_mut().for_each(|x| *x = 1.0);
        let mu = ProbabilityMeasure::normalized(a).unwrap();
        let nu = ProbabilityMeasure::normalized(b).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let best = permutations(k)
                .iter()
                .map(|perm| {
                    perm.iter().enumerate().map(|(i, &j)| space.dist(i, k + j).powf(p) / p).sum::<f64>() / k as f64
                })
                .fold(f64::INFINITY, f64::min);
            let plan = wasserstein_p(&mu, &nu, &space, p).unwrap();
            assert!((plan.value() - best).abs() < 1e-12, "p={p}: {} vs {best}", plan.value());
        }
    }
}

#[test]
fn random_instances_are_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..50 {
        let space = planar_space(&mut rng, 50);
        let mu = random_measure(&mut rng, 50, 0.2);
        let nu = random_measure(&mut rng, 50, 0.2);
        let p = [1.0, 2.0, 3.0][case % 3];
        let plan = wasserstein_p(&mu, &nu, &space, p).unwrap();
        let cert = plan.certify(&mu, &nu, &space);
        assert!(cert.holds(), "case {case}: {cert:?}");
    }
}

#[test]
fn line_instances_match_quantile_coupling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let space = build_grid_1d(-1.0, 1.0, 80).unwrap();
    for case in 0..20 {
        let mu = random_measure(&mut rng, 80, 0.3);
        let nu = random_measure(&mut rng, 80, 0.3);
        let p = if case % 2 == 0 { 2.0 } else { 3.0 };
        let lp = wasserstein_p(&mu, &nu, &space, p).unwrap().value();
        let q = wasserstein_1d(&mu, &nu, &space, p).unwrap();
        assert!((lp - q).abs() <= 1e-8, "case {case}: {lp} vs {q}");
    }
}

#[test]
fn symmetry_and_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let space = planar_space(&mut rng, 30);
    for _ in 0..10 {
        let (a, b, c) = (random_measure(&mut rng, 30, 0.1), random_measure(&mut rng, 30, 0.1), random_measure(&mut rng, 30, 0.1));
        for p in [1.0, 2.0] {
            let ab = wasserstein_p(&a, &b, &space, p).unwrap().distance();
            let ba = wasserstein_p(&b, &a, &space, p).unwrap().distance();
            let bc = wasserstein_p(&b, &c, &space, p).unwrap().distance();
            let ac = wasserstein_p(&a, &c, &space, p).unwrap().distance();
            assert!((ab - ba).abs() <= 1e-9);
            assert!(ac <= ab + bc + 1e-8);
        }
    }
}

#[test]
fn large_gaussian_grid_solves_quickly() {
    let space = build_grid_1d(-6.0, 6.0, 1201).unwrap();
    let mu = gaussian_measure(&space, 1.0, &[0.0]).unwrap();
    let nu = mu.reweighted(&space.points().iter().map(|pt| 1.0 + 0.3 * pt.coords.as_ref().unwrap()[0].sin()).collect::<Vec<_>>()).unwrap();
    let start = std::time::Instant::now();
    let plan = wasserstein_p(&nu, &mu, &space, 2.0).unwrap();
    let q = wasserstein_1d(&nu, &mu, &space, 2.0).unwrap();
    assert!((plan.value() - q).abs() <= 1e-8);
    assert!(start.elapsed().as_secs_f64() < 30.0);
}
