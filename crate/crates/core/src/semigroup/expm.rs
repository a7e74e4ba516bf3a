use nalgebra::DMatrix;

use super::MetzlerGenerator;
use crate::error::{Error, Result};

/// Entries of `e^{tA}` in `[-NEGATIVE_BAND, 0)` are roundoff and clamped to 0.
pub const NEGATIVE_BAND: f64 = 1e-12;

/// Norm bound for the Taylor core after scaling.
const CORE_THETA: f64 = 0.5;
const MAX_TAYLOR_TERMS: usize = 40;

/// Matrix exponential `e^{tA}` of a Metzler generator.
///
/// Writes `A = B - cI` with `B ≥ 0` and computes
/// `e^{τA} = e^{-cτ} Σ_k (τB)^k / k!` for `τ = t / 2^s` small enough that
/// `τ·max(‖B‖₁, c) ≤ 1/2`, then squares `s` times. Every Taylor term and every
/// intermediate product is entrywise nonnegative, so there is no cancellation
/// and the result is positive up to rounding in the last bits.
pub fn expm(a: &MetzlerGenerator, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("need finite t ≥ 0, got {t}")));
    }
    let n = a.dim();
    if t == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    let m = a.matrix();
    let c = (0..n).map(|i| -m[(i, i)]).fold(0.0f64, f64::max);
    let mut b = m.clone();
    for i in 0..n {
        b[(i, i)] += c;
        // exact zero where -a_ii = c can come out as a tiny negative
        if b[(i, i)] < 0.0 {
            b[(i, i)] = 0.0;
        }
    }
    let b_norm = (0..n).map(|j| b.column(j).sum()).fold(0.0f64, f64::max);
    let theta = t * b_norm.max(c);
    let s = if theta > CORE_THETA { (theta / CORE_THETA).log2().ceil() as i32 } else { 0 };
    let tau = t / 2f64.powi(s);

    let tb = b * tau;
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = &term * &tb / k as f64;
        sum += &term;
        let tmax = term.iter().fold(0.0f64, |acc, v| acc.max(*v));
        if tmax <= 1e-18 {
            break;
        }
    }
    let mut e = sum * (-c * tau).exp();
    for _ in 0..s {
        e = &e * &e;
    }
    for v in e.iter_mut() {
        if *v < 0.0 && *v >= -NEGATIVE_BAND {
            *v = 0.0;
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(rows: &[[f64; 2]]) -> MetzlerGenerator {
        MetzlerGenerator::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Independent oracle: 30-term power series at the unscaled argument.
    fn power_series(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
        let n = a.nrows();
        let mut sum = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..=30 {
            term = &term * a * t / k as f64;
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_generator_is_identity() {
        let e = expm(&MetzlerGenerator::zero(2), 3.7).unwrap();
        assert_eq!(e, DMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal_decay() {
        let e = expm(&gen(&[[-1.0, 0.0], [0.0, -1.0]]), 1.0).unwrap();
        let expected = (-1.0f64).exp();
        assert!((e[(0, 0)] - expected).abs() < 1e-15);
        assert!((e[(1, 1)] - expected).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn jordan_block_matches_power_series_and_closed_form() {
        let a = gen(&[[-1.0, 1.0], [0.0, -1.0]]);
        for &t in &[0.1, 0.5, 1.0, 1.5, 2.0] {
            let e = expm(&a, t).unwrap();
            let oracle = power_series(a.matrix(), t);
            let closed = DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]) * (-t).exp();
            assert!((&e - &oracle).amax() < 1e-12, "t={t}");
            assert!((&e - &closed).amax() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn negative_time_rejected() {
        assert!(matches!(
            expm(&MetzlerGenerator::zero(1), -1.0),
            Err(Error::InvalidParameter { name: "t", .. })
        ));
    }
}
