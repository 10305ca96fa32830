//! Dense spectral kernel: extremal singular values and eigenvalues, Perron
//! vectors, inverses with rank-one updates, and frequency-response gains.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for iterative solves.
pub const TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 10_000;
/// Below this a smallest singular value counts as zero.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    pub vector: Option<DVector<f64>>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Symmetric,
    /// Nonsingular with an entrywise non-negative inverse.
    GroundedNonnegInverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateDirection {
    Add,
    Remove,
}

/// `M ± e_i (e_i - e_j)^T`: row `i` gains (or loses) an in-neighbor `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOneUpdate {
    pub i: usize,
    pub j: usize,
    pub direction: UpdateDirection,
}

fn ensure_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 {
        return Err(Error::BadParams("empty matrix".into()));
    }
    Ok(m.nrows())
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) })
        .0
}

/// Largest eigenpair of the symmetric part of `a`.
fn top_symmetric(a: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let idx = eig.eigenvalues.imax();
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).into_owned())
}

/// σ₁(M), computed as 1/sqrt(λ_max(M⁻ᵀM⁻¹)).
///
/// Working at the large end of the inverse keeps full relative accuracy in
/// σ₁, which the gain 1/σ₁ inherits; the small end of MᵀM only has absolute
/// accuracy of order eps·‖M‖².
pub fn smallest_singular_value(m: &DMatrix<f64>) -> Result<SpectralResult> {
    ensure_square(m)?;
    let inv = m.clone().try_inverse().ok_or(Error::Singular(0.0))?;
    let (mu, u) = top_symmetric(&(inv.transpose() * &inv));
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Singular(0.0));
    }
    let sigma = 1.0 / mu.sqrt();
    if sigma < SINGULAR_EPS {
        return Err(Error::Singular(sigma));
    }
    let v = (&inv * u).normalize();
    let gram = m.transpose() * m;
    let residual = (&gram * &v - &v * (sigma * sigma)).norm() / gram.norm().max(1.0);
    if residual > TOL {
        return Err(Error::NoConvergence { iterations: 1, residual });
    }
    Ok(SpectralResult { value: sigma, vector: Some(v), residual })
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::StructureViolated(format!("matrix not symmetric (|M - M^T| = {asym:e})")));
    }
    Ok(())
}

pub fn smallest_eigenvalue(m: &DMatrix<f64>, structure: Structure) -> Result<SpectralResult> {
    ensure_square(m)?;
    match structure {
        Structure::Symmetric => {
            check_symmetric(m)?;
            let eig = SymmetricEigen::new(m.clone());
            let idx = argmin(eig.eigenvalues.iter().copied());
            let mut lambda = eig.eigenvalues[idx];
            let mut v = eig.eigenvectors.column(idx).into_owned();
            // positive definite: take λ_min from the top of the inverse
            if lambda > 0.0 {
                if let Some(inv) = m.clone().try_inverse() {
                    let (mu, u) = top_symmetric(&inv);
                    if mu.is_finite() && mu > 0.0 {
                        lambda = 1.0 / mu;
                        v = u;
                    }
                }
            }
            let residual = (m * &v - &v * lambda).norm() / m.norm().max(1.0);
            Ok(SpectralResult { value: lambda, vector: Some(v), residual })
        }
        Structure::GroundedNonnegInverse => perron_root_of_inverse(m),
    }
}

/// 1/ρ(M⁻¹) by power iteration on M⁻¹ with a Collatz–Wielandt bracket.
///
/// Triangular grounded Laplacians have defective Perron roots where power
/// iteration only converges like 1/k; after `MAX_ITER` steps the bracket is
/// used to validate the root found by M-matrix bisection.
fn perron_root_of_inverse(m: &DMatrix<f64>) -> Result<SpectralResult> {
    let inv = inverse(m)?;
    let neg = inv.iter().copied().fold(0.0f64, f64::min);
    if neg < -1e-12 * inv.amax().max(1.0) {
        return Err(Error::StructureViolated(format!("inverse has negative entry {neg:e}")));
    }
    let k = m.nrows();
    let mut x = DVector::from_element(k, 1.0);
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..MAX_ITER {
        let y = &inv * &x;
        lo = f64::INFINITY;
        hi = 0.0f64;
        for (yi, xi) in y.iter().zip(x.iter()) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let ymax = y.max();
        x = y / ymax;
        if hi - lo <= TOL * hi {
            let rho = 0.5 * (lo + hi);
            return Ok(SpectralResult { value: 1.0 / rho, vector: Some(x), residual: (hi - lo) / hi });
        }
    }
    let lambda = m_matrix_root(m);
    let rho = 1.0 / lambda;
    let slack = 1e-8 * hi;
    if lambda.is_finite() && rho >= lo - slack && rho <= hi + slack {
        Ok(SpectralResult { value: lambda, vector: Some(x), residual: (hi - lo) / hi })
    } else {
        Err(Error::NoConvergence { iterations: MAX_ITER, residual: (hi - lo) / hi })
    }
}

/// Real eigenvalue of least real part of a Z-matrix, as the supremum of the
/// shifts `s` for which `M - sI` is a nonsingular M-matrix (all pivots of
/// unpivoted elimination positive). NaN when `m` is not a Z-matrix.
fn m_matrix_root(m: &DMatrix<f64>) -> f64 {
    let k = m.nrows();
    let z_matrix = (0..k).all(|i| (0..k).all(|j| i == j || m[(i, j)] <= 0.0));
    if !z_matrix {
        return f64::NAN;
    }
    let positive_pivots = |s: f64| {
        let mut a = m.clone();
        for i in 0..k {
            a[(i, i)] -= s;
        }
        for p in 0..k {
            let piv = a[(p, p)];
            if piv <= 0.0 {
                return false;
            }
            for r in p + 1..k {
                let f = a[(r, p)] / piv;
                if f != 0.0 {
                    for c in p..k {
                        a[(r, c)] -= f * a[(p, c)];
                    }
                }
            }
        }
        true
    };
    let (mut lo, mut hi) = (0.0, (0..k).map(|i| m[(i, i)]).fold(f64::INFINITY, f64::min));
    if !positive_pivots(lo) {
        return f64::NAN;
    }
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if positive_pivots(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest component of the λ₁ eigenvector of a symmetric grounded
/// Laplacian, scaled so its largest component is 1.
///
/// A repeated λ₁ is handled by projecting the all-ones vector onto the whole
/// eigenspace, which is where power iteration from all-ones would land.
pub fn perron_component_min(m: &DMatrix<f64>) -> Result<f64> {
    perron_vector(m).map(|x| x.min())
}

pub fn perron_vector(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    ensure_square(m)?;
    check_symmetric(m)?;
    let k = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let lambda = eig.eigenvalues.min();
    let tol = 1e-9 * m.amax().max(1.0);
    let ones = DVector::from_element(k, 1.0);
    let mut x = DVector::zeros(k);
    for (idx, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev - lambda <= tol {
            let col = eig.eigenvectors.column(idx);
            x += col * col.dot(&ones);
        }
    }
    let top = x.amax();
    if top < 1e-12 {
        return Err(Error::NoConvergence { iterations: 0, residual: top });
    }
    let sign = if x.sum() < 0.0 { -1.0 } else { 1.0 };
    Ok(x * (sign / top))
}

pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(m)?;
    m.clone().try_inverse().ok_or(Error::Singular(0.0))
}

/// Inverse of the updated matrix from the inverse of the original one.
pub fn sherman_morrison_update(m_inv: &DMatrix<f64>, u: RankOneUpdate) -> Result<DMatrix<f64>> {
    let k = ensure_square(m_inv)?;
    if u.i == u.j || u.i >= k || u.j >= k {
        return Err(Error::BadParams(format!("invalid update rows i={} j={} for dimension {k}", u.i, u.j)));
    }
    let s = match u.direction {
        UpdateDirection::Add => 1.0,
        UpdateDirection::Remove => -1.0,
    };
    // a = M⁻¹ e_i, b = e_ijᵀ M⁻¹
    let a = m_inv.column(u.i).into_owned();
    let b = m_inv.row(u.i) - m_inv.row(u.j);
    let denom = 1.0 + s * (a[u.i] - a[u.j]);
    if denom.abs() < SINGULAR_EPS {
        return Err(Error::SingularUpdate(denom));
    }
    Ok(m_inv - (a * b) * (s / denom))
}

/// Matrix after the same rank-one update, for checking.
pub fn apply_update(m: &DMatrix<f64>, u: RankOneUpdate) -> DMatrix<f64> {
    let s = match u.direction {
        UpdateDirection::Add => 1.0,
        UpdateDirection::Remove => -1.0,
    };
    let mut out = m.clone();
    out[(u.i, u.i)] += s;
    out[(u.i, u.j)] -= s;
    out
}

/// Real embedding of `L + jωI`.
pub fn complex_embedding(l: &DMatrix<f64>, omega: f64) -> DMatrix<f64> {
    let k = l.nrows();
    let mut e = DMatrix::zeros(2 * k, 2 * k);
    e.view_mut((0, 0), (k, k)).copy_from(l);
    e.view_mut((k, k), (k, k)).copy_from(l);
    for i in 0..k {
        e[(i, k + i)] = -omega;
        e[(k + i, i)] = omega;
    }
    e
}

/// σ_max((jωI + L)⁻¹) = 1/σ_min(jωI + L).
pub fn frequency_gain(l: &DMatrix<f64>, omega: f64) -> Result<f64> {
    ensure_square(l)?;
    let sigma = if omega == 0.0 {
        smallest_singular_value(l)?.value
    } else {
        smallest_singular_value(&complex_embedding(l, omega))?.value
    };
    Ok(1.0 / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, rows, data)
    }

    fn svd_min(a: &DMatrix<f64>) -> f64 {
        a.clone().svd(false, false).singular_values.min()
    }

    #[test]
    fn sigma_two_path() {
        let r = smallest_singular_value(&m(2, &[1.0, 0.0, -1.0, 1.0])).unwrap();
        assert!((r.value - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!(r.residual <= TOL);
    }

    #[test]
    fn sigma_identity_and_cycle() {
        for k in 1..6 {
            let r = smallest_singular_value(&DMatrix::identity(k, k)).unwrap();
            assert!((r.value - 1.0).abs() < 1e-14);
        }
        let a = m(3, &[2.0, 0.0, -1.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        let r = smallest_singular_value(&a).unwrap();
        assert!((r.value - svd_min(&a)).abs() < 1e-12);
        // smallest root of λ³ − 9λ² + 18λ − 1 for AᵀA
        let lam = r.value * r.value;
        assert!((lam.powi(3) - 9.0 * lam.powi(2) + 18.0 * lam - 1.0).abs() < 1e-12);
        assert!((r.value - 0.23912328).abs() < 1e-8);
    }

    #[test]
    fn sigma_singular() {
        let a = m(2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(matches!(smallest_singular_value(&a), Err(Error::Singular(_))));
        assert!(matches!(
            smallest_singular_value(&DMatrix::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        ));
    }

    #[test]
    fn eig_symmetric() {
        let a = m(3, &[3.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let r = smallest_eigenvalue(&a, Structure::Symmetric).unwrap();
        assert!((r.value - (2.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!(matches!(
            smallest_eigenvalue(&m(2, &[1.0, 0.0, -1.0, 1.0]), Structure::Symmetric),
            Err(Error::StructureViolated(_))
        ));
    }

    #[test]
    fn eig_grounded() {
        let a = m(3, &[3.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let r = smallest_eigenvalue(&a, Structure::GroundedNonnegInverse).unwrap();
        assert!((r.value - (2.0 - 3f64.sqrt())).abs() < 1e-9);
        let r = smallest_eigenvalue(&DMatrix::identity(4, 4), Structure::GroundedNonnegInverse).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // defective: unit lower bidiagonal
        let r = smallest_eigenvalue(&m(2, &[1.0, 0.0, -1.0, 1.0]), Structure::GroundedNonnegInverse).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        // directed 3-cycle: real eigenvalue of the companion structure
        let c = m(3, &[2.0, 0.0, -1.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        let r = smallest_eigenvalue(&c, Structure::GroundedNonnegInverse).unwrap();
        let l = r.value;
        // det(L - λI) = (2-λ)(1-λ)^2 - 1
        assert!(((2.0 - l) * (1.0 - l).powi(2) - 1.0).abs() < 1e-9);
        let bad = m(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            smallest_eigenvalue(&bad, Structure::GroundedNonnegInverse),
            Err(Error::StructureViolated(_))
        ));
    }

    #[test]
    fn perron_components() {
        assert_eq!(perron_component_min(&m(1, &[1.0])).unwrap(), 1.0);
        assert!((perron_component_min(&DMatrix::identity(4, 4)).unwrap() - 1.0).abs() < 1e-12);
        let path = m(3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        let want = (std::f64::consts::PI / 7.0).sin() / (3.0 * std::f64::consts::PI / 7.0).sin();
        let got = perron_component_min(&path).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        assert!((got - 0.445).abs() < 1e-3);
    }

    #[test]
    fn sherman_morrison() {
        let l = m(3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        let inv = inverse(&l).unwrap();
        let u = RankOneUpdate { i: 2, j: 0, direction: UpdateDirection::Add };
        let upd = sherman_morrison_update(&inv, u).unwrap();
        let want = m(3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, -1.0, -1.0, 2.0]);
        assert_eq!(apply_update(&l, u), want);
        assert!((upd - inverse(&want).unwrap()).amax() < 1e-12);
        let back = sherman_morrison_update(
            &sherman_morrison_update(&inv, u).unwrap(),
            RankOneUpdate { direction: UpdateDirection::Remove, ..u },
        )
        .unwrap();
        assert!((back - &inv).amax() < 1e-12);
    }

    #[test]
    fn sherman_morrison_singular() {
        // removing the only in-edge of row 1 leaves a zero row
        let l = m(2, &[1.0, 0.0, -1.0, 1.0]);
        let inv = inverse(&l).unwrap();
        let u = RankOneUpdate { i: 1, j: 0, direction: UpdateDirection::Remove };
        assert!(matches!(sherman_morrison_update(&inv, u), Err(Error::SingularUpdate(_))));
        let bad = RankOneUpdate { i: 1, j: 1, direction: UpdateDirection::Add };
        assert!(matches!(sherman_morrison_update(&inv, bad), Err(Error::BadParams(_))));
    }

    #[test]
    fn gains() {
        let l = m(3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        let dc = frequency_gain(&l, 0.0).unwrap();
        assert_eq!(dc, 1.0 / smallest_singular_value(&l).unwrap().value);
        assert!(frequency_gain(&l, 1e6).unwrap() < 2e-6);
        assert!(frequency_gain(&l, 0.5).unwrap() <= dc);
        // scalar check: |1/(1 + jω)|
        let one = m(1, &[1.0]);
        let g = frequency_gain(&one, 2.0).unwrap();
        assert!((g - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }
}
