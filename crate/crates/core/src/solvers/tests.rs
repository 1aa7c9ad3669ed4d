use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::geom::{ratio, Point};
use crate::rng::rng_from_seed;
use crate::sepsys::{PointSet, SeparationMode::*};

fn pts(v: &[(i64, i64)]) -> PointSet {
    PointSet::new(v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()).unwrap()
}

fn perturbed_grid3() -> PointSet {
    let ps = pts(&[(0, 0), (0, 11), (1, 23), (10, 2), (12, 10), (9, 21), (20, 1), (22, 13), (21, 20)]);
    assert!(ps.general_position());
    ps
}

fn random_set(seed: u64, n: usize) -> PointSet {
    let mut rng = rng_from_seed(seed);
    loop {
        let v: Vec<[i64; 2]> = (0..n).map(|_| [rng.gen_range(0..1 << 20), rng.gen_range(0..1 << 20)]).collect();
        if let Ok(ps) = PointSet::from_scaled(1 << 20, v) {
            if n > 512 || ps.general_position() {
                return ps;
            }
        }
    }
}

#[test]
fn verify_examples() {
    let two = pts(&[(0, 0), (2, 0)]);
    let bis = crate::geom::perpendicular_bisector(&two.point(0), &two.point(1)).unwrap();
    assert!(verify(&two, &[bis], Strict));
    let corners = pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
    assert!(!verify(&corners, &[crate::geom::CanonicalLine::vertical(&ratio(1, 2))], Strict));
}

#[test]
fn exact_fixtures() {
    assert_eq!(exact_separability(&pts(&[(0, 0), (3, 1)]), Strict).unwrap().0, 1);
    assert_eq!(exact_separability(&pts(&[(0, 0), (3, 1)]), Relaxed).unwrap().0, 1);
    assert_eq!(exact_separability(&pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]), Strict).unwrap().0, 2);
    assert_eq!(exact_separability(&pts(&[(0, 0), (7, 1), (3, 5), (9, 8), (2, 9)]), Strict).unwrap().0, 3);
    assert_eq!(exact_separability(&perturbed_grid3(), Strict).unwrap().0, 4);
    // Collinear points need one line per gap.
    assert_eq!(exact_separability(&pts(&[(0, 0), (1, 1), (2, 2), (3, 3)]), Strict).unwrap().0, 3);
    assert!(matches!(
        exact_separability(&random_set(1, 15), Strict),
        Err(crate::Error::SizeCap { cap: 14, got: 15 })
    ));
}

#[test]
fn face_bounds() {
    assert_eq!(cell_bound(5, Strict), 3);
    assert_eq!(cell_bound(9, Strict), 4);
    assert_eq!(cell_bound(7, Strict), 3);
    assert_eq!(cell_bound(3, Relaxed), 1);
    assert_eq!(cell_bound(4, Relaxed), 2);
}

#[test]
fn greedy_examples() {
    assert_eq!(greedy_hitting_set(&pts(&[(0, 0), (1, 5)]), Strict).unwrap().len(), 1);
    let c = pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
    for mode in [Strict, Relaxed] {
        let g = greedy_hitting_set(&c, mode).unwrap();
        assert!(g.len() <= 4 && verify(&c, &g, mode));
    }
}

#[test]
fn halving_examples() {
    assert_eq!(halving_separator(&pts(&[(0, 0), (1, 1)])).unwrap().len(), 1);
    assert_eq!(halving_separator(&pts(&[(0, 0), (0, 1), (1, 0), (1, 1)])).unwrap().len(), 2);
    let ps = random_set(9, 9);
    let l = halving_separator(&ps).unwrap();
    assert_eq!(l.len(), 5);
    assert!(verify(&ps, &l, Strict));
    assert!(matches!(halving_separator(&pts(&[(0, 0), (1, 1), (2, 2)])), Err(crate::Error::GeneralPosition(0, 1, 2))));
}

#[test]
fn halving_all_sizes() {
    for n in 2..=40 {
        let ps = random_set(100 + n as u64, n);
        let l = halving_separator(&ps).unwrap();
        assert_eq!(l.len(), n.div_ceil(2), "n = {n}");
    }
}

#[test]
fn halving_on_convex_position() {
    // Points on a parabola are in convex position.
    for n in 2..=16 {
        let v: Vec<(i64, i64)> = (0..n).map(|i| (i, i * i)).collect();
        let ps = pts(&v);
        assert_eq!(halving_separator(&ps).unwrap().len(), (n as usize).div_ceil(2));
    }
}

#[test]
fn grid_examples() {
    let q = |a: i64, b: i64| Point::new(ratio(a, 4), ratio(b, 4));
    let corners = PointSet::new(vec![q(1, 1), q(1, 3), q(3, 1), q(3, 3)]).unwrap();
    let g = grid_separation(&corners, 2).unwrap();
    assert_eq!(g.lines.len(), 2);
    assert_eq!(g.colliding_pairs, 0);
    let pair = PointSet::new(vec![q(1, 1), Point::new(ratio(1, 3), ratio(1, 5)), q(3, 3)]).unwrap();
    let g = grid_separation(&pair, 2).unwrap();
    assert_eq!(g.lines.len(), 3);
    assert_eq!(g.colliding_pairs, 1);
    assert!(verify(&pair, &g.lines, Strict));
    let outside = pts(&[(0, 0), (2, 0)]);
    assert!(matches!(grid_separation(&outside, 2), Err(crate::Error::Precondition(_))));
}

#[test]
fn grid_boundary_points_are_repaired() {
    // (1/2, 1/4) lies on x = 1/2 and is assigned to the left column.
    let ps = PointSet::new(vec![
        Point::new(ratio(1, 2), ratio(1, 4)),
        Point::new(ratio(1, 4), ratio(1, 4)),
        Point::new(ratio(3, 4), ratio(1, 4)),
    ])
    .unwrap();
    let cells = grid_cells(&ps, 2).unwrap();
    assert_eq!(cells[0], (0, 0, true));
    let g = grid_separation(&ps, 2).unwrap();
    assert_eq!(g.boundary_points, vec![0]);
    assert!(verify(&ps, &g.lines, Strict));
}

#[test]
fn grid_size_is_ceiling_cube_root() {
    assert_eq!(grid_size_for(4096), 256);
    assert_eq!(grid_size_for(100_000), 2155);
    assert_eq!(grid_size_for(1024), 102);
    for n in 1..2000usize {
        let g = grid_size_for(n) as u128;
        let n2 = (n * n) as u128;
        assert!(g * g * g >= n2 && (g - 1).pow(3) < n2);
    }
}

#[test]
fn grid_random_verifies() {
    let ps = random_set(5, 3000);
    let n = grid_size_for(ps.len());
    let g = grid_separation(&ps, n).unwrap();
    assert!(verify(&ps, &g.lines, Strict));
    assert_eq!(g.grid_lines, 2 * (n - 1));
    assert_eq!(g.repair_lines, 0);
}

#[test]
fn reweight_examples() {
    let cfg = SolverConfig { rng_seed: 42, ..SolverConfig::default() };
    let r = reweight_approx(&pts(&[(0, 0), (4, 1)]), &cfg).unwrap();
    assert_eq!(r.lines.len(), 1);
    let g = perturbed_grid3();
    let r = reweight_approx(&g, &cfg).unwrap();
    assert!(verify(&g, &r.lines, Relaxed));
    assert!(r.lines.len() >= exact_separability(&g, Relaxed).unwrap().0);
    let ps = random_set(42, 100);
    let a = reweight_approx(&ps, &cfg).unwrap();
    let b = reweight_approx(&ps, &cfg).unwrap();
    assert!(verify(&ps, &a.lines, Relaxed));
    assert_eq!(a.lines, b.lines);
    assert_eq!(a.rounds_used, b.rounds_used);
    assert!(a.lines.len() <= a.sample_size);
}

#[test]
fn weight_state_tracks_total() {
    let mut w = WeightState::new(1000);
    let mut rng = rng_from_seed(3);
    for _ in 0..20_000 {
        let i = rng.gen_range(0..20);
        w.double(i);
        let exact = w.resummed_total();
        assert!((w.total_weight() - exact).abs() <= 1e-9 * exact);
    }
    assert!(w.rescale_exponent() > 0);
    // Ratios survive rescaling: weight(i)/weight(j) = 2^(hit_i - hit_j).
    let (a, b) = (w.hit_count(0) as i32, w.hit_count(500) as i32);
    let r = w.weight(0) / w.weight(500);
    if w.weight(500) > 0.0 {
        assert_eq!(r, libm::ldexp(1.0, a - b));
    }
}

#[test]
fn weighted_sampling_follows_weights() {
    let mut w = WeightState::new(4);
    for _ in 0..3 {
        w.double(2);
    }
    let mut rng = rng_from_seed(11);
    let s = w.sample(&mut rng, 110_000);
    let c2 = s.iter().filter(|&&i| i == 2).count() as f64 / s.len() as f64;
    assert!((c2 - 8.0 / 11.0).abs() < 0.01, "{c2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_is_a_lower_bound(v in proptest::collection::btree_set((0i64..30, 0i64..30), 3..9)) {
        let ps = pts(&v.into_iter().collect::<Vec<_>>());
        for mode in [Strict, Relaxed] {
            let (sigma, w) = exact_separability(&ps, mode).unwrap();
            prop_assert!(verify(&ps, &w, mode));
            prop_assert!(sigma >= cell_bound(ps.len(), mode));
            prop_assert!(greedy_hitting_set(&ps, mode).unwrap().len() >= sigma);
        }
        let (strict, _) = exact_separability(&ps, Strict).unwrap();
        let (relaxed, _) = exact_separability(&ps, Relaxed).unwrap();
        prop_assert!(relaxed <= strict);
    }
}
