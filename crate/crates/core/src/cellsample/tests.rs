use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::geom::{int, ratio};
use crate::rng::rng_from_seed;

/// Pairs of lines meeting strictly inside the cell, by testing every pair.
fn brute_force(cell: &ConvexCell, lines: &[CanonicalLine]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].intersection(&lines[j]) {
                let inside = (0..cell.len()).all(|e| {
                    let a = &cell.vertices()[e];
                    let b = &cell.vertices()[(e + 1) % cell.len()];
                    orient(a, b, &p) == Sign::Positive
                });
                if inside {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

fn unit_square() -> ConvexCell {
    ConvexCell::square(int(0), int(0), int(1))
}

fn line(a: i64, b: i64, c: i64) -> CanonicalLine {
    CanonicalLine::from_i64(a, b, c).unwrap()
}

#[test]
fn spec_examples() {
    // y = x + 1/10 and x = 1/2 cross at (1/2, 3/5).
    let idx = build_index(&unit_square(), &[line(10, -10, 1), line(2, 0, -1)]).unwrap();
    assert_eq!(count_vertices(&idx), 1);
    let parallel = [line(0, 4, -1), line(0, 2, -1), line(0, 4, -3)];
    assert_eq!(count_vertices(&build_index(&unit_square(), &parallel).unwrap()), 0);
    let mut rng = rng_from_seed(50);
    let (cell, lines) = random_instance(&mut rng, 4, 50);
    let idx = build_index(&cell, &lines).unwrap();
    assert_eq!(idx.total() as usize, brute_force(&cell, &lines).len());
    assert!(idx.total() > 0);
}

#[test]
fn degeneracies_are_reported() {
    // y = x passes through (0,0) and (1,1).
    assert!(matches!(build_index(&unit_square(), &[line(1, -1, 0)]), Err(Error::CellDegeneracy(_))));
    // x = 1/2 and x + y = 1/2 meet at (1/2, 0) on the boundary.
    assert!(matches!(
        build_index(&unit_square(), &[line(2, 0, -1), line(2, 2, -1)]),
        Err(Error::CellDegeneracy(_))
    ));
    // A line missing the cell is fine.
    let idx = build_index(&unit_square(), &[line(1, 0, 5)]).unwrap();
    assert_eq!(idx.interval(0), None);
    assert_eq!(idx.crossings().events.len(), 0);
}

#[test]
fn invalid_cells() {
    let p = |x, y| Point::from_ints(x, y);
    assert!(ConvexCell::new(vec![p(0, 0), p(1, 0)]).is_err());
    // Clockwise.
    assert!(ConvexCell::new(vec![p(0, 0), p(0, 1), p(1, 1), p(1, 0)]).is_err());
    // Collinear vertex.
    assert!(ConvexCell::new(vec![p(0, 0), p(1, 0), p(2, 0), p(1, 1)]).is_err());
    // Pentagram: every turn is a left turn but the boundary winds twice.
    let star = vec![p(0, 10), p(-6, -8), p(10, 3), p(-10, 3), p(6, -8)];
    assert!(ConvexCell::new(star.into_iter().rev().collect()).is_err());
    let too_many: Vec<Point> = (0..17).map(|i| p(i, i * i)).collect();
    assert!(ConvexCell::new(too_many).is_err());
}

#[test]
fn crossing_sequence_is_counterclockwise() {
    // x = 1/2 crosses the bottom edge (edge 0) then the top edge (edge 2).
    let seq = CrossingSequence::new(&unit_square(), &[line(2, 0, -1), line(0, 4, -1)]).unwrap();
    let got: Vec<(usize, usize)> = seq.events.iter().map(|e| (e.position.edge, e.line)).collect();
    assert_eq!(got, vec![(0, 0), (1, 1), (2, 0), (3, 1)]);
    assert_eq!(seq.events[0].position.t, ratio(1, 2));
    assert_eq!(seq.events[1].position.point(&unit_square()), Point::new(int(1), ratio(1, 4)));
}

#[test]
fn random_instances_match_brute_force() {
    let mut rng = rng_from_seed(7);
    for trial in 0..60 {
        let sides = [3, 4, 6, 16][trial % 4];
        let m = rng.gen_range(2..=60);
        let (cell, lines) = random_instance(&mut rng, sides, m);
        let idx = build_index(&cell, &lines).unwrap();
        let brute = brute_force(&cell, &lines);
        assert_eq!(idx.total() as usize, brute.len());
        assert_eq!(idx.vertices(), brute);
    }
}

#[test]
fn snapshots_hold_lines_open_at_second_event() {
    let mut rng = rng_from_seed(8);
    let (cell, lines) = random_instance(&mut rng, 6, 40);
    let idx = build_index(&cell, &lines).unwrap();
    let before: Vec<Vec<usize>> = (0..lines.len()).map(|l| idx.snapshot_keys(l)).collect();
    for l in 0..lines.len() {
        let Some((_, j)) = idx.interval(l) else {
            assert!(idx.snapshot_keys(l).is_empty());
            continue;
        };
        // Stored at rank j: lines entered before j and leaving at or after j.
        let mut want: Vec<usize> = (0..lines.len())
            .filter_map(|o| idx.interval(o))
            .filter(|&(i2, j2)| i2 < j && j2 >= j)
            .map(|(i2, _)| i2)
            .collect();
        want.sort_unstable();
        assert_eq!(before[l], want);
        for (r, &k) in want.iter().enumerate() {
            assert_eq!(idx.snapshot_rank(l, k), r);
            assert_eq!(idx.snapshot_select(l, r), Some(k));
        }
    }
    // Sampling touches no snapshot.
    for _ in 0..1000 {
        sample_vertex(&idx, &mut rng).unwrap();
    }
    let after: Vec<Vec<usize>> = (0..lines.len()).map(|l| idx.snapshot_keys(l)).collect();
    assert_eq!(before, after);
}

#[test]
fn pair_counts_follow_interleaving() {
    let mut rng = rng_from_seed(9);
    let (cell, lines) = random_instance(&mut rng, 4, 50);
    let idx = build_index(&cell, &lines).unwrap();
    for l in 0..lines.len() {
        let want = match idx.interval(l) {
            None => 0,
            Some((i, j)) => (0..lines.len())
                .filter_map(|o| idx.interval(o))
                .filter(|&(i2, j2)| i < i2 && i2 < j && j2 > j)
                .count() as u64,
        };
        assert_eq!(idx.pair_count(l), want);
    }
}

#[test]
fn pick_line_is_proportional_to_pair_count() {
    let mut rng = rng_from_seed(10);
    let (cell, lines) = random_instance(&mut rng, 4, 30);
    let idx = build_index(&cell, &lines).unwrap();
    let draws = 100_000;
    let mut seen = vec![0u64; lines.len()];
    for _ in 0..draws {
        seen[idx.pick_line(&mut rng).unwrap()] += 1;
    }
    for l in 0..lines.len() {
        let p = idx.pair_count(l) as f64 / idx.total() as f64;
        let f = seen[l] as f64 / draws as f64;
        assert!((f - p).abs() < 0.01, "line {l}: {f} vs {p}");
        if idx.pair_count(l) == 0 {
            assert_eq!(seen[l], 0);
        }
    }
}

#[test]
fn sampling_small_cases() {
    let mut rng = rng_from_seed(11);
    let idx = build_index(&unit_square(), &[line(10, -10, 1), line(2, 0, -1)]).unwrap();
    for _ in 0..100 {
        assert_eq!(sample_vertex(&idx, &mut rng).unwrap(), (0, 1));
    }
    // x = 1/2 meets y = 1/3 and y = 2/3 inside.
    let idx = build_index(&unit_square(), &[line(2, 0, -1), line(0, 3, -1), line(0, 3, -2)]).unwrap();
    assert_eq!(idx.total(), 2);
    let hits = (0..10_000).filter(|_| sample_vertex(&idx, &mut rng).unwrap() == (0, 1)).count();
    assert!((hits as f64 / 10_000.0 - 0.5).abs() <= 0.02);
    let empty = build_index(&unit_square(), &[line(2, 0, -1)]).unwrap();
    assert_eq!(sample_vertex(&empty, &mut rng), Err(Error::Empty));
}

#[test]
fn sampling_is_uniform() {
    let mut rng = rng_from_seed(12);
    let (cell, lines) = random_instance(&mut rng, 4, 50);
    let brute = brute_force(&cell, &lines);
    let idx = build_index(&cell, &lines).unwrap();
    let draws = 50_000;
    let mut counts: BTreeMap<(usize, usize), u64> = brute.iter().map(|&p| (p, 0)).collect();
    for _ in 0..draws {
        *counts.get_mut(&sample_vertex(&idx, &mut rng).unwrap()).expect("sampled pair is a vertex") += 1;
    }
    let u = 1.0 / brute.len() as f64;
    let tvd: f64 = counts.values().map(|&c| (c as f64 / draws as f64 - u).abs()).sum::<f64>() / 2.0;
    assert!(tvd <= 0.05, "tvd = {tvd}");
}

#[test]
fn index_space_is_near_linearithmic() {
    let mut rng = rng_from_seed(13);
    let (cell, lines) = random_instance(&mut rng, 4, 128);
    let idx = build_index(&cell, &lines).unwrap();
    let m = lines.len() as f64;
    assert!((idx.tree_nodes() as f64) < 8.0 * m * libm::log2(m));
}

#[test]
fn mass_tree_examples() {
    let mut rng = rng_from_seed(14);
    let mut t = MassTree::new();
    assert_eq!(t.sample_cell(&mut rng), Err(Error::Empty));
    t.insert(7, 3, 2);
    assert_eq!(t.root_mass(), 12.0);
    for _ in 0..50 {
        assert_eq!(t.sample_cell(&mut rng).unwrap(), 7);
    }
    t.insert(1, 1, 0);
    t.update(7, 3, 0).unwrap();
    let ones = (0..10_000).filter(|_| t.sample_cell(&mut rng).unwrap() == 1).count();
    assert!((ones as f64 / 10_000.0 - 0.25).abs() <= 0.02);
    assert!(t.remove(1));
    assert!(!t.remove(1));
    for _ in 0..100 {
        assert_eq!(t.sample_cell(&mut rng).unwrap(), 7);
    }
    assert!(t.update(99, 1, 1).is_err());
    t.insert(3, 0, 5);
    for _ in 0..100 {
        assert_eq!(t.sample_cell(&mut rng).unwrap(), 7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_matches_oracle(seed in any::<u64>(), m in 2usize..40, sides in 3usize..=8) {
        let mut rng = rng_from_seed(seed);
        let (cell, lines) = random_instance(&mut rng, sides, m);
        let idx = build_index(&cell, &lines).unwrap();
        prop_assert_eq!(idx.vertices(), brute_force(&cell, &lines));
    }

    #[test]
    fn mass_tree_tracks_model(ops in proptest::collection::vec((0u64..30, 0u64..5, 0u32..12, any::<bool>()), 1..300)) {
        let mut t = MassTree::new();
        let mut model: BTreeMap<u64, f64> = BTreeMap::new();
        for (cell, support, depth, ins) in ops {
            if ins {
                t.insert(cell, support, depth);
                model.insert(cell, (support << depth) as f64);
            } else {
                prop_assert_eq!(t.remove(cell), model.remove(&cell).is_some());
            }
            let sum: f64 = model.values().sum();
            prop_assert_eq!(t.root_mass(), sum);
            prop_assert_eq!(t.len(), model.len());
        }
        for (&c, &m) in &model {
            prop_assert_eq!(t.mass(c), Some(m));
        }
    }
}
