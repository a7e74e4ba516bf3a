use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruclab::lattice::LatticeVector;
use ruclab::random::{random_metzler, random_vector, with_spectral_bound};
use ruclab::ruc::{certify_theorem21, maximal_function, regulator_from_dom_a, CertifyOptions};
use ruclab::schedule::{Schedule, TimeGrid};
use ruclab::semigroup::{Boundary, Grid, GridFunction, HeatGrid, SemigroupHandle};

fn matrix_case(seed: u64) -> (SemigroupHandle, LatticeVector, LatticeVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=8);
    let a = random_metzler(&mut rng, n, 0.6);
    let x = LatticeVector::new(random_vector(&mut rng, n));
    let x2 = LatticeVector::new(random_vector(&mut rng, n));
    (SemigroupHandle::Matrix(a), x, x2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orbit_bound_grows_with_horizon(seed in 0u64..10_000, cut in 10usize..250) {
        let (handle, x, _) = matrix_case(seed);
        let grid = TimeGrid::log_spaced(1e-6, 2.0, 256).unwrap();
        let t0 = grid.times()[cut];
        let short = maximal_function(&handle, &x, &grid.truncated(t0).unwrap()).unwrap();
        let long = maximal_function(&handle, &x, &grid).unwrap();
        prop_assert!(short.y.le(&long.y).unwrap());
    }

    #[test]
    fn maximal_function_is_sublinear(seed in 0u64..10_000) {
        let (handle, x, x2) = matrix_case(seed);
        let grid = TimeGrid::log_spaced(1e-6, 1.0, 128).unwrap();
        let sum = maximal_function(&handle, &x.add(&x2).unwrap(), &grid).unwrap().y;
        let a = maximal_function(&handle, &x, &grid).unwrap().y;
        let b = maximal_function(&handle, &x2, &grid).unwrap().y;
        let bound = a.add(&b).unwrap();
        for (s, m) in sum.iter().zip(bound.iter()) {
            prop_assert!(*s <= m * (1.0 + 1e-14) + 1e-300);
        }
    }

    #[test]
    fn maximal_function_is_homogeneous_under_binary_scaling(seed in 0u64..10_000, k in -8i32..8, negative in any::<bool>()) {
        let (handle, x, _) = matrix_case(seed);
        let c = if negative { -(2f64.powi(k)) } else { 2f64.powi(k) };
        let grid = TimeGrid::log_spaced(1e-6, 1.0, 128).unwrap();
        let scaled = maximal_function(&handle, &x.scale(c), &grid).unwrap().y;
        let base = maximal_function(&handle, &x, &grid).unwrap().y;
        prop_assert_eq!(scaled, base.scale(c.abs()));
    }

    #[test]
    fn heat_maximal_function_is_homogeneous(k in -6i32..6, width in 0.1..1.0f64) {
        let g = Grid::new(1, 4.0, 256).unwrap();
        let handle = SemigroupHandle::Heat(HeatGrid::new(g, Boundary::Periodic).unwrap());
        let x = LatticeVector::new(GridFunction::bump(g, 0.5, width).values).scale(-1.0);
        let grid = TimeGrid::log_spaced(g.min_resolved_time(), 1.0, 64).unwrap();
        let c = 2f64.powi(k);
        let scaled = maximal_function(&handle, &x.scale(c), &grid).unwrap().y;
        let base = maximal_function(&handle, &x, &grid).unwrap().y;
        prop_assert_eq!(scaled, base.scale(c));
    }
}

#[test]
fn domain_regulators_are_positive_and_dominate() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..30 {
        let n = rng.random_range(1..=10);
        let a = with_spectral_bound(&random_metzler(&mut rng, n, 0.5), -0.5).unwrap();
        let ys: Vec<LatticeVector> = (0..3).map(|_| LatticeVector::new(random_vector(&mut rng, n))).collect();
        let rep = regulator_from_dom_a(&a, &ys).unwrap();
        assert!(rep.all_dominated());
        assert!(rep.regulators.iter().all(|r| r.z.is_nonnegative()));
    }
}

#[test]
fn certified_regulator_bounds_the_orbit() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10 {
        let n = rng.random_range(1..=6);
        let handle = SemigroupHandle::Matrix(random_metzler(&mut rng, n, 0.6));
        let xs: Vec<LatticeVector> = (0..2).map(|_| LatticeVector::new(random_vector(&mut rng, n))).collect();
        let cert = certify_theorem21(&handle, &xs, 1.0, &Schedule::default(), &CertifyOptions::default()).unwrap();
        for s in &cert.samples {
            if s.conditions.i.holds() {
                assert_eq!(s.implication_violations, 0);
            }
        }
        assert!(cert.consistent);
    }
}
