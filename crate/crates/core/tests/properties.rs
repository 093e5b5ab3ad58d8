use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use turan::candidate::turan_candidate;
use turan::geometry::{distance_lemma_residual, ConvexBody, Lattice};
use turan::radial::chain_check;
use turan::torus::{autocorrelate, dft_complex, idft, min_spectrum, periodize, Domain, GridFunction, TorusGrid};

fn polygon(seed: u64) -> ConvexBody {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = rng.gen_range(2..=6);
    ConvexBody::random_symmetric_polygon(&mut rng, pairs).unwrap()
}

// Uniform values in [-1, 1) where `inside` holds, zero elsewhere.
fn random_g(grid: TorusGrid, rng: &mut ChaCha8Rng, inside: impl Fn(&[f64]) -> bool) -> GridFunction {
    let values = (0..grid.len()).map(|i| if inside(&grid.node(i)) { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
    GridFunction::new(grid, values, Domain::Space).unwrap()
}

// Spectrum in [0, 1), symmetrized, pushed back to space and normalized.
fn synthesized_pd(grid: TorusGrid, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..grid.len()).map(|_| rng.gen::<f64>()).collect();
    let sym: Vec<f64> = (0..grid.len()).map(|i| 0.5 * (raw[i] + raw[grid.negate(i)])).collect();
    let f = idft(&GridFunction::new(grid, sym, Domain::Frequency).unwrap()).unwrap();
    let f0 = f.at_origin();
    GridFunction::new(grid, f.values().iter().map(|v| v / f0).collect(), Domain::Space).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_is_symmetric(seed in any::<u64>(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let body = polygon(seed);
        prop_assert_eq!(body.contains(&[x, y]).unwrap(), body.contains(&[-x, -y]).unwrap());
        let disk = ConvexBody::ball(2, 1.3).unwrap();
        prop_assert_eq!(disk.contains(&[x, y]).unwrap(), disk.contains(&[-x, -y]).unwrap());
    }

    #[test]
    fn inradius_scales_linearly(seed in any::<u64>(), t in 0.01f64..10.0) {
        let body = polygon(seed);
        let r = body.inradius();
        prop_assert!((body.scale(t).unwrap().inradius() - t * r).abs() <= 1e-12 * t * r);
        let ball = ConvexBody::boxed(vec![0.3, 1.7]).unwrap();
        prop_assert!((ball.scale(t).unwrap().inradius() - 0.3 * t).abs() <= 1e-12 * t);
    }

    #[test]
    fn dual_of_dual_is_the_lattice(a in 0.2f64..3.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in 0.2f64..3.0) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let lat = Lattice::from_columns(&[vec![a, b], vec![c, d]]).unwrap();
        let dd = lat.dual().unwrap().dual().unwrap();
        prop_assert!(lat.same_points(&dd, 1e-9));
        prop_assert!((lat.dual().unwrap().density() * lat.density() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn parseval_identity(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 16, 32]), l in 1.0f64..10.0) {
        let grid = TorusGrid::new(2, n, l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<num_complex::Complex64> =
            (0..grid.len()).map(|_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let spectrum = dft_complex(&grid, &values);
        let space = grid.cell_volume() * values.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let freq = spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() / l.powi(2);
        prop_assert!((space - freq).abs() <= 1e-10 * space.max(1.0));
    }

    #[test]
    fn autocorrelations_are_positive_definite(seed in any::<u64>()) {
        let grid = TorusGrid::new(2, 32, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_g(grid, &mut rng, |x| x[0].abs() < 0.8 && x[1].abs() < 0.8);
        let ac = autocorrelate(&g).unwrap();
        prop_assert!(min_spectrum(&ac.function).unwrap().value >= -1e-9);
    }

    #[test]
    fn pd_functions_peak_at_the_origin(seed in any::<u64>()) {
        let f = synthesized_pd(TorusGrid::new(2, 16, 3.0).unwrap(), seed);
        prop_assert!(f.values().iter().all(|v| v.abs() <= f.at_origin() + 1e-9));
    }

    #[test]
    fn periodization_keeps_the_total_mass(seed in any::<u64>(), s in prop::sample::select(vec![1.0f64, 0.5, 2.0])) {
        let grid = TorusGrid::new(2, 16, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_g(grid, &mut rng, |_| true);
        let lat = Lattice::scaled_integer(2, s).unwrap();
        let p = periodize(&f, &lat).unwrap();
        let translates = 16.0 / (s * s);
        let mass: f64 = f.values().iter().map(|v| v.abs()).sum();
        prop_assert!((p.sum() - translates * f.sum()).abs() <= 1e-12 * translates * mass);
    }

    #[test]
    fn candidate_is_scale_covariant(k in 0i32..3, pick in 0usize..3) {
        let t = 2f64.powi(k);
        let body = [ConvexBody::ball(2, 1.0).unwrap(), ConvexBody::regular_polygon(6, 1.0).unwrap(), ConvexBody::boxed(vec![1.0, 0.5]).unwrap()][pick].clone();
        let a = turan_candidate(&body, &TorusGrid::new(2, 32, 5.0).unwrap()).unwrap();
        let b = turan_candidate(&body.scale(t).unwrap(), &TorusGrid::new(2, 32, 5.0 * t).unwrap()).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert!((b.integral() - t * t * a.integral()).abs() <= 1e-12 * b.integral());
    }
}

#[test]
fn distance_lemma_on_random_polygons() {
    let grid = TorusGrid::new(2, 128, 6.0).unwrap();
    let bound = 2.0 * 2f64.sqrt() * grid.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let pairs = rng.gen_range(2..=6);
        let body = ConvexBody::random_symmetric_polygon(&mut rng, pairs).unwrap();
        let reach = body.extent().iter().fold(0.0f64, |a, e| a.max(*e));
        let beta = rng.gen_range(0.05..(2.9 / reach).min(2.0));
        let alpha = rng.gen_range(0.0..beta);
        let r = distance_lemma_residual(&body, alpha, beta, &grid).unwrap();
        assert!(r.residual <= bound, "{body:?} α={alpha} β={beta}: {r:?}");
    }
}

#[test]
fn chain_holds_for_random_g_on_the_half_square() {
    let grid = TorusGrid::new(2, 32, 4.0).unwrap();
    let k = ConvexBody::cube(2, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let g = random_g(grid, &mut rng, |x| x[0].abs() <= 0.5 && x[1].abs() <= 0.5);
        let r = chain_check(&g, &k).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.a - r.a_identity).abs() <= 1e-9 * r.a_identity.max(1.0));
    }
}

// K - K = 2K, so the node count of 2K is 4 times that of K up to boundary
// terms of size perimeter·h.
#[test]
fn difference_body_volume_on_the_grid() {
    let grid = TorusGrid::new(2, 256, 12.0).unwrap();
    let h = grid.spacing();
    for seed in 0..10 {
        let k = polygon(seed);
        let r = k.extent().iter().fold(0.0f64, |a, e| a.max(*e));
        let perimeter = 2.0 * std::f64::consts::PI * 2.0 * r;
        let lhs = k.scale(2.0).unwrap().grid_volume(&grid).unwrap();
        let rhs = 4.0 * k.grid_volume(&grid).unwrap();
        assert!((lhs - rhs).abs() <= 3.0 * perimeter * h, "seed {seed}: {lhs} vs {rhs}");
    }
}
