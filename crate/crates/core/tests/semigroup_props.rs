use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruclab::random::random_metzler;
use ruclab::semigroup::{expm, resolvent, Boundary, Grid, GridFunction, HeatGrid, MetzlerGenerator, ShiftGrid};
use ruclab::spectral::spectral_bound;

fn sample_matrices(seed: u64, count: usize, max_n: usize) -> Vec<MetzlerGenerator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            let density = rng.random_range(0.2..1.0);
            random_metzler(&mut rng, n, density)
        })
        .collect()
}

#[test]
fn expm_is_positive() {
    for a in sample_matrices(11, 100, 12) {
        for t in [0.1, 1.0, 10.0] {
            let e = expm(&a, t).unwrap();
            assert!(e.min() >= -1e-12, "min entry {} at t = {t}", e.min());
        }
    }
}

#[test]
fn expm_semigroup_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for a in sample_matrices(13, 100, 12) {
        let s = rng.random_range(0.0..2.0);
        let t = rng.random_range(0.0..2.0);
        let whole = expm(&a, s + t).unwrap();
        let product = expm(&a, s).unwrap() * expm(&a, t).unwrap();
        let scale = 1.0 + whole.amax();
        assert!((&whole - &product).amax() <= 1e-9 * scale, "{} vs {}", (&whole - &product).amax(), scale);
    }
}

#[test]
fn resolvent_inverts_and_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for a in sample_matrices(15, 100, 12) {
        let s = spectral_bound(&a).unwrap();
        let lambda = s + 1e-6 + rng.random_range(0.0..3.0);
        let r = resolvent(&a, lambda).unwrap();
        assert!(r.min() >= -1e-12, "min entry {}", r.min());
        let n = a.dim();
        let residual = (DMatrix::identity(n, n) * lambda - a.matrix()) * &r - DMatrix::identity(n, n);
        // the residual scales with the conditioning near s(A)
        assert!(residual.amax() <= 1e-10 * r.amax().max(1.0), "residual {}", residual.amax());
    }
}

#[test]
fn resolvent_identity_at_comfortable_distance() {
    for a in sample_matrices(16, 100, 12) {
        let s = spectral_bound(&a).unwrap();
        let r = resolvent(&a, s + 1.0).unwrap();
        let n = a.dim();
        let residual = (DMatrix::identity(n, n) * (s + 1.0) - a.matrix()) * &r - DMatrix::identity(n, n);
        assert!(residual.amax() <= 1e-10, "residual {}", residual.amax());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heat_conserves_mass(centre in -2.0..2.0f64, width in 0.05..1.0f64, t in 0.001..2.0f64) {
        let g = Grid::new(1, 5.0, 512).unwrap();
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let f = GridFunction::bump(g, centre, width);
        let out = GridFunction::new(g, heat.apply(t, &f.values).unwrap()).unwrap();
        prop_assert!((out.mass() - f.mass()).abs() <= 1e-12 * f.mass());
    }

    #[test]
    fn heat_steps_compose(s in 0.01..0.5f64, t in 0.01..0.5f64, width in 0.1..1.0f64) {
        let g = Grid::new(1, 10.0, 2048).unwrap();
        let heat = HeatGrid::new(g, Boundary::Periodic).unwrap();
        let f = GridFunction::bump(g, 0.3, width).values;
        let whole = heat.apply(s + t, &f).unwrap();
        let composed = heat.apply(t, &heat.apply(s, &f).unwrap()).unwrap();
        let scale = whole.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = whole.iter().zip(&composed).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(diff <= 1e-6 * scale, "{} vs {}", diff, scale);
    }

    #[test]
    fn shift_composes(a in 0usize..200, b in 0usize..200, seed in 0u64..1000) {
        let g = Grid::new(1, 1.0, 128).unwrap();
        let h = g.spacing();
        let shift = ShiftGrid::new(g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
        let whole = shift.apply((a + b) as f64 * h, &f).unwrap();
        let composed = shift.apply(b as f64 * h, &shift.apply(a as f64 * h, &f).unwrap()).unwrap();
        prop_assert_eq!(whole, composed);
    }
}
