//! Dense complex linear algebra used by the fitting stages: SVD-based rank
//! decisions, null spaces, principal angles and companion-matrix roots.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_traits::{Float, Zero};

pub type CMatrix = DMatrix<Complex64>;

/// Smallest acceptable ratio between the last kept and the first dropped
/// singular value at a rank cut.
pub const MIN_SPECTRAL_GAP: f64 = 10.0;

pub fn matrix_from_rows<R: AsRef<[Complex64]>>(rows: &[R], ncols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.as_ref().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    m
}

/// SVD with singular values in decreasing order; the matrix is padded with
/// zero rows so that a full set of right singular vectors is available.
struct SortedSvd {
    values: Vec<f64>,
    /// Right singular vectors as rows, aligned with `values`.
    right: Vec<Vec<Complex64>>,
}

fn sorted_svd(m: &CMatrix) -> SortedSvd {
    let ncols = m.ncols();
    let padded = if m.nrows() < ncols {
        let mut p = CMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let right = order
        .iter()
        .map(|&i| (0..ncols).map(|j| v_t[(i, j)]).collect())
        .collect();
    SortedSvd { values, right }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn rank_from_values(values: &[f64], rel_tol: f64) -> usize {
    let max = values.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel_tol * max).count()
}

pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    rank_from_values(&singular_values(m), rel_tol)
}

/// Ratio σ_{r−1}/σ_r at the cut after `rank` values, or `None` when there is
/// nothing on one side of the cut.
pub fn gap_at(values: &[f64], rank: usize) -> Option<f64> {
    if rank == 0 || rank >= values.len() {
        return None;
    }
    let below = values[rank];
    Some(if below == 0.0 { f64::INFINITY } else { values[rank - 1] / below })
}

#[derive(Clone, Debug)]
pub struct NullSpace {
    /// Orthonormal vectors `v` with `M v ≈ 0`.
    pub vectors: Vec<Vec<Complex64>>,
    /// All singular values (including the padded zeros), decreasing.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub gap: Option<f64>,
}

impl NullSpace {
    pub fn nullity(&self) -> usize {
        self.vectors.len()
    }

    pub fn gap_is_clean(&self) -> bool {
        self.gap.is_none_or(|g| g >= MIN_SPECTRAL_GAP)
    }
}

/// Numerical null space of `m` at threshold `rel_tol · σ_max`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> NullSpace {
    let svd = sorted_svd(m);
    let rank = rank_from_values(&svd.values, rel_tol);
    let gap = gap_at(&svd.values, rank);
    // rows of Vᴴ are conjugates of the right singular vectors
    let vectors = svd.right[rank..]
        .iter()
        .map(|row| row.iter().map(|c| c.conj()).collect())
        .collect();
    NullSpace { vectors, singular_values: svd.values, rank, gap }
}

/// Orthonormal basis of the row space of `m` (as rows), plus singular values.
pub fn row_space_basis(m: &CMatrix, rel_tol: f64) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let svd = sorted_svd(m);
    let rank = rank_from_values(&svd.values, rel_tol);
    (svd.right[..rank].to_vec(), svd.values)
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Largest principal angle (radians) between the row spans of `a` and `b`.
pub fn max_principal_angle<R: AsRef<[Complex64]>>(a: &[R], b: &[R], rel_tol: f64) -> f64 {
    let n = a.first().or(b.first()).map_or(0, |r| r.as_ref().len());
    let (qa, _) = row_space_basis(&matrix_from_rows(a, n), rel_tol);
    let (qb, _) = row_space_basis(&matrix_from_rows(b, n), rel_tol);
    let (small, big) = if qa.len() <= qb.len() { (qa, qb) } else { (qb, qa) };
    if small.is_empty() {
        return 0.0;
    }
    let residuals: Vec<Vec<Complex64>> = small
        .iter()
        .map(|v| {
            let mut r = v.clone();
            for w in &big {
                let c = inner(w, v);
                for (ri, wi) in r.iter_mut().zip(w) {
                    *ri -= c * wi;
                }
            }
            r
        })
        .collect();
    let sin = singular_values(&matrix_from_rows(&residuals, n))
        .first()
        .copied()
        .unwrap_or(0.0);
    sin.min(1.0).asin()
}

/// Evaluates `Σ coeffs[i] tⁱ`.
pub fn horner(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * t + c)
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

/// Roots of `Σ coeffs[i] tⁱ` (ascending coefficients) as eigenvalues of the
/// companion matrix, each polished by two Newton steps. Trailing exact zeros
/// are dropped, so the root count equals the formal degree.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1].is_zero() {
        deg -= 1;
    }
    if deg <= 1 {
        return Vec::new();
    }
    let coeffs = &coeffs[..deg];
    let n = deg - 1;
    let lead = coeffs[n];
    let mut comp = CMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i] / lead;
    }
    let eig = Schur::new(comp)
        .eigenvalues()
        .expect("complex Schur form is triangular");
    let d = derivative(coeffs);
    eig.iter()
        .map(|&r0| {
            let mut r = r0;
            for _ in 0..2 {
                let dv = horner(&d, r);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = horner(coeffs, r) / dv;
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                r -= step;
            }
            // keep the unpolished value if polishing wandered off
            if horner(coeffs, r).norm() <= horner(coeffs, r0).norm() { r } else { r0 }
        })
        .collect()
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Sine of the angle between the complex lines spanned by `x` and `y`.
pub fn projective_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    let nx = norm(x);
    let ny = norm(y);
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    let c = inner(x, y) / (nx * nx);
    let resid: Vec<Complex64> = y.iter().zip(x).map(|(yi, xi)| yi - c * xi).collect();
    (norm(&resid) / ny).min(1.0)
}

/// Zero vector of length `n`.
pub fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::zero(); n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        // third column = first + i·second
        let rows: Vec<Vec<Complex64>> = (0..6)
            .map(|k| {
                let a = c(k as f64, 1.0);
                let b = c(0.5, -(k as f64));
                alloc::vec![a, b, a + c(0.0, 1.0) * b]
            })
            .collect();
        let ns = null_space(&matrix_from_rows(&rows, 3), 1e-10);
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.nullity(), 1);
        assert!(ns.gap.unwrap() > 1e10);
        let v = &ns.vectors[0];
        for row in &rows {
            let r: Complex64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn wide_matrix_null_space_has_full_dimension() {
        let rows = alloc::vec![alloc::vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 3.0)]];
        let ns = null_space(&matrix_from_rows(&rows, 3), 1e-10);
        assert_eq!(ns.nullity(), 2);
    }

    #[test]
    fn roots_of_cubic() {
        // (t − 1)(t − i)(t + 2) = t³ + (1 − i)t² + (−2 − i)t + 2i
        let coeffs = [c(0.0, 2.0), c(-2.0, -1.0), c(1.0, -1.0), c(1.0, 0.0)];
        let mut roots = polynomial_roots(&coeffs);
        assert_eq!(roots.len(), 3);
        for expected in [c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.0)] {
            let pos = roots
                .iter()
                .position(|r| (r - expected).norm() < 1e-12)
                .expect("root found");
            roots.remove(pos);
        }
    }

    #[test]
    fn principal_angle_between_planes() {
        let e = |i: usize| {
            let mut v = zeros(3);
            v[i] = c(1.0, 0.0);
            v
        };
        let a = alloc::vec![e(0), e(1)];
        assert!(max_principal_angle(&a, &a, 1e-12) < 1e-12);
        let theta: f64 = 0.3;
        let tilted = alloc::vec![e(0), {
            let mut v = zeros(3);
            v[1] = c(theta.cos(), 0.0);
            v[2] = c(theta.sin(), 0.0);
            v
        }];
        assert!((max_principal_angle(&a, &tilted, 1e-12) - theta).abs() < 1e-12);
    }

    #[test]
    fn projective_distance_ignores_scale() {
        let x = alloc::vec![c(1.0, 2.0), c(-0.5, 0.1)];
        let y: Vec<Complex64> = x.iter().map(|v| v * c(0.3, -4.0)).collect();
        assert!(projective_distance(&x, &y) < 1e-15);
    }
}
