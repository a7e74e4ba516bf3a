use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::expm::{expm, NEGATIVE_BAND};
use super::generator::mat_vec;
use super::MetzlerGenerator;
use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeVector;
use crate::spectral::spectral_bound;

/// Gaussian elimination without pivoting on a Z-matrix (nonpositive
/// off-diagonal). Returns the packed LU factors if every pivot is positive.
///
/// For `M = λI - A` with `A` Metzler, all pivots are positive exactly when `M`
/// is a nonsingular M-matrix, i.e. when `λ > s(A)`.
pub(crate) fn z_matrix_lu(mut m: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    for k in 0..n {
        let pivot = m[(k, k)];
        if !(pivot > 0.0) {
            return None;
        }
        for i in k + 1..n {
            let l = m[(i, k)] / pivot;
            if l == 0.0 {
                continue;
            }
            m[(i, k)] = l;
            for j in k + 1..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= l * mkj;
            }
        }
    }
    Some(m)
}

/// Whether `λI - A` is a nonsingular M-matrix, i.e. `λ > s(A)`.
pub fn exceeds_spectral_bound(a: &MetzlerGenerator, lambda: f64) -> bool {
    z_matrix_lu(shifted_negative(a, lambda)).is_some()
}

fn shifted_negative(a: &MetzlerGenerator, lambda: f64) -> DMatrix<f64> {
    let n = a.dim();
    DMatrix::identity(n, n) * lambda - a.matrix()
}

/// `(λI - A)^{-1}`, defined (and entrywise nonnegative) for `λ > s(A)`.
pub fn resolvent(a: &MetzlerGenerator, lambda: f64) -> Result<DMatrix<f64>> {
    if !lambda.is_finite() {
        return Err(Error::param("lambda", "must be finite"));
    }
    let lu = z_matrix_lu(shifted_negative(a, lambda)).ok_or(Error::ResolventUndefined { lambda })?;
    let n = a.dim();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        // forward substitution with unit lower factor
        for i in 0..n {
            let mut s = inv[(i, col)];
            for k in 0..i {
                s -= lu[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s;
        }
        for i in (0..n).rev() {
            let mut s = inv[(i, col)];
            for k in i + 1..n {
                s -= lu[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / lu[(i, i)];
        }
    }
    for v in inv.iter_mut() {
        if *v < 0.0 && *v >= -NEGATIVE_BAND {
            *v = 0.0;
        }
    }
    Ok(inv)
}

/// `R(0, A)·z = (-A)^{-1} z`.
pub fn resolvent_apply(a: &MetzlerGenerator, z: &LatticeVector) -> Result<LatticeVector> {
    check_dim(a.dim(), z.len())?;
    mat_vec(&resolvent(a, 0.0)?, z)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
            break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Panel length; `None` picks `min(1/2, 1/(2‖A‖₁))`.
    pub panel_length: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: 8, panel_length: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceReport {
    pub spectral_bound: f64,
    /// Upper integration limit `T` with `e^{T·s(A)} = 1e-10`.
    pub horizon: f64,
    pub panels: usize,
    pub integral: LatticeVector,
    pub resolvent_z: LatticeVector,
    /// `max_i |∫₀^T e^{sA}z ds - R(0,A)z|_i`.
    pub residual: f64,
    /// `max_i |e^{TA} R(0,A) z|_i`, the exact size of the truncated tail.
    pub tail: f64,
}

/// Compares the truncated Laplace integral `∫₀^T e^{sA} z ds` against
/// `R(0,A) z`; requires `s(A) < 0`.
pub fn laplace_resolvent_check(a: &MetzlerGenerator, z: &LatticeVector, quad: &QuadratureSpec) -> Result<LaplaceReport> {
    check_dim(a.dim(), z.len())?;
    let s = spectral_bound(a)?;
    if s >= 0.0 {
        return Err(Error::NeedsRescaling { spectral_bound: s, shift: s + 1.0 });
    }
    let horizon = 1e10f64.ln() / s.abs();
    let a_norm = (0..a.dim()).map(|j| a.matrix().column(j).abs().sum()).fold(0.0f64, f64::max);
    let target = quad.panel_length.unwrap_or_else(|| if a_norm > 0.0 { (0.5 / a_norm).min(0.5) } else { 0.5 });
    if !(target > 0.0) {
        return Err(Error::param("panel_length", "must be positive"));
    }
    let panels = (horizon / target).ceil().max(1.0) as usize;
    let h = horizon / panels as f64;
    let (nodes, weights) = gauss_legendre(quad.order);
    let node_maps = nodes
        .iter()
        .map(|x| expm(a, 0.5 * h * (1.0 + x)))
        .collect::<Result<Vec<_>>>()?;
    let step = expm(a, h)?;

    let n = a.dim();
    let mut acc = vec![0.0; n];
    let mut v = z.clone();
    for _ in 0..panels {
        for (map, w) in node_maps.iter().zip(&weights) {
            let y = mat_vec(map, &v)?;
            for (a, b) in acc.iter_mut().zip(y.iter()) {
                *a += 0.5 * h * w * b;
            }
        }
        v = mat_vec(&step, &v)?;
    }
    let integral = LatticeVector::new(acc);
    let resolvent_z = resolvent_apply(a, z)?;
    let residual = integral.sub(&resolvent_z)?.max_abs();
    let tail = mat_vec(&expm(a, horizon)?, &resolvent_z)?.max_abs();
    Ok(LaplaceReport { spectral_bound: s, horizon, panels, integral, resolvent_z, residual, tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(rows: &[[f64; 2]]) -> MetzlerGenerator {
        MetzlerGenerator::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn resolvent_examples() {
        let r = resolvent(&gen(&[[-1.0, 0.0], [0.0, -1.0]]), 0.0).unwrap();
        assert_eq!(r, DMatrix::identity(2, 2));

        // (1/3)·[[2,1],[1,2]], the hand inverse of [[2,-1],[-1,2]]
        let r = resolvent(&gen(&[[-2.0, 1.0], [1.0, -2.0]]), 0.0).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]) / 3.0;
        assert!((r - expected).amax() < 1e-15);

        assert_eq!(
            resolvent(&MetzlerGenerator::zero(2), 0.0),
            Err(Error::ResolventUndefined { lambda: 0.0 })
        );
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for order in 1..=10 {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "order {order}");
            let deg = 2 * order - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            // ∫_{-1}^{1} x^{deg-1} dx (deg - 1 is even)
            let exact = 2.0 / deg as f64;
            assert!((q - exact).abs() < 1e-13, "order {order}: {q} vs {exact}");
        }
    }

    #[test]
    fn laplace_scalar_case() {
        let a = gen(&[[-1.0, 0.0], [0.0, -1.0]]);
        let rep = laplace_resolvent_check(&a, &LatticeVector::constant(2, 1.0), &QuadratureSpec::default()).unwrap();
        assert!(rep.residual < 1e-9);
        let exact = 1.0 - (-rep.horizon).exp();
        assert!((rep.integral[0] - exact).abs() < 1e-13);
        assert_eq!(rep.resolvent_z, LatticeVector::constant(2, 1.0));
    }

    #[test]
    fn laplace_zero_vector_and_coupled_case() {
        let a = gen(&[[-2.0, 1.0], [1.0, -2.0]]);
        let zero = laplace_resolvent_check(&a, &LatticeVector::zeros(2), &QuadratureSpec::default()).unwrap();
        assert_eq!(zero.residual, 0.0);

        let rep = laplace_resolvent_check(&a, &LatticeVector::unit(2, 0), &QuadratureSpec::default()).unwrap();
        assert!((rep.resolvent_z[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((rep.resolvent_z[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(rep.residual < 1e-8, "{}", rep.residual);
    }

    #[test]
    fn laplace_requires_negative_bound() {
        let err = laplace_resolvent_check(&MetzlerGenerator::zero(2), &LatticeVector::zeros(2), &QuadratureSpec::default());
        assert!(matches!(err, Err(Error::NeedsRescaling { .. })));
    }
}
