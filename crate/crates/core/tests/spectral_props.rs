use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruclab::lattice::LatticeVector;
use ruclab::random::{random_metzler, random_vector, with_spectral_bound};
use ruclab::semigroup::resolvent_apply;
use ruclab::spectral::{orbit_bound_to_norm_bound, perron_bound, spectral_bound};

#[test]
fn eigenvalue_and_perron_bounds_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..200 {
        let n = rng.random_range(1..=20);
        let density = rng.random_range(0.1..1.0);
        let a = random_metzler(&mut rng, n, density);
        let s = spectral_bound(&a).unwrap();
        let p = perron_bound(&a);
        assert!((s - p).abs() <= 1e-8, "draw {k} (n = {n}): {s} vs {p}");
    }
}

#[test]
fn shift_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let n = rng.random_range(1..=12);
        let a = random_metzler(&mut rng, n, 0.6);
        let omega = rng.random_range(-5.0..5.0);
        let s = spectral_bound(&a).unwrap();
        let shifted = spectral_bound(&a.shifted(omega)).unwrap();
        // exact up to the eigenvalue solver's backward error
        assert!((shifted - (s - omega)).abs() <= 1e-10 * (1.0 + s.abs() + omega.abs()), "{shifted} vs {}", s - omega);
    }
}

#[test]
fn orbit_domination_transfers_to_norm_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let ts: Vec<f64> = (0..50).map(|k| 1.0 + k as f64 * 0.5).collect();
    let mut checked = 0;
    for _ in 0..60 {
        let n = rng.random_range(2..=8);
        let a = with_spectral_bound(&random_metzler(&mut rng, n, 0.5), -0.5).unwrap();
        let x = LatticeVector::new(random_vector(&mut rng, n)).abs();
        let ax = a.apply(&x).unwrap().abs();
        let z = resolvent_apply(&a, &ax).unwrap().add(&x).unwrap();
        match orbit_bound_to_norm_bound(&a, &x, &z, &ts) {
            Ok(rep) => {
                checked += 1;
                assert!(rep.certified, "{:?}", rep.entries.iter().map(|e| e.violation).fold(0.0f64, f64::max));
            }
            Err(ruclab::Error::Precondition(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(checked > 0);
}
