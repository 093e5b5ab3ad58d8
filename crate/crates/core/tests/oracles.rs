use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use turan::geometry::{ConvexBody, Lattice};
use turan::solver::{dense_oracle, solve_turan, verify_solution, SolveStatus, TuranProblem};
use turan::tiling::ft_indicator;
use turan::torus::{periodize, Domain, GridFunction, TorusGrid};

#[test]
fn cutting_planes_match_the_dense_program() {
    let p = TuranProblem::new(ConvexBody::cube(1, 1.0).unwrap(), TorusGrid::new(1, 32, 4.0).unwrap()).unwrap();
    assert!((solve_turan(&p).unwrap().value - dense_oracle(&p).unwrap().value).abs() <= 1e-6);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..3 {
        let pairs = rng.gen_range(2..=5);
        let body = ConvexBody::random_symmetric_polygon(&mut rng, pairs).unwrap();
        let reach = body.extent().iter().fold(0.0f64, |a, e| a.max(*e));
        let p = TuranProblem::new(body, TorusGrid::new(2, 16, 4.0 * reach).unwrap()).unwrap();
        let cut = solve_turan(&p).unwrap();
        let dense = dense_oracle(&p).unwrap();
        assert_eq!(cut.status, SolveStatus::Certified);
        assert!(verify_solution(&cut, &p).all());
        assert!((cut.value - dense.value).abs() <= 1e-6, "{} vs {}", cut.value, dense.value);
    }
}

// On (tL, N) the program for tΩ is the program for Ω with h^d scaled by t^d.
#[test]
fn value_scales_with_the_cell_volume() {
    let hex = ConvexBody::regular_polygon(6, 1.0).unwrap();
    let base = solve_turan(&TuranProblem::new(hex.clone(), TorusGrid::new(2, 24, 5.0).unwrap()).unwrap()).unwrap();
    for t in [0.5, 2.0] {
        let grid = TorusGrid::new(2, 24, 5.0 * t).unwrap();
        let s = solve_turan(&TuranProblem::new(hex.scale(t).unwrap(), grid).unwrap()).unwrap();
        assert!((s.value - t * t * base.value).abs() <= 1e-9 * s.value, "t={t}");
        assert!((s.ratio - base.ratio).abs() <= 1e-9);
    }
}

// (1 - |x|)_+ has transform sinc²(πξ), which vanishes on Z \ {0}, so its
// integer translates sum to 1.
#[test]
fn triangle_tiles_the_line_at_level_one() {
    let grid = TorusGrid::new(1, 64, 4.0).unwrap();
    let tri = GridFunction::from_fn(grid, Domain::Space, |x| (1.0 - x[0].abs()).max(0.0));
    let p = periodize(&tri, &Lattice::integer(1)).unwrap();
    assert!(p.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
    let half = ConvexBody::cube(1, 0.5).unwrap();
    for k in 1..6 {
        let chi = ft_indicator(&half, &[k as f64], None).unwrap();
        assert_eq!(chi.norm_sqr(), 0.0, "k={k}");
    }
}
