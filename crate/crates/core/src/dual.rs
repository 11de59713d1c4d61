//! The gradient map of the Coble cubic, its sextic dual hypersurface, and
//! the linear geometry of the translated theta divisors `X_a`.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};
use rand::Rng;

use crate::cyclo::CycloScalar;
use crate::fit::{self, FitError, FormFit, InvariantFit};
use crate::linalg;
use crate::poly::{self, MultiPoly, PolyError};
use crate::rng::complex_normal_vec;
use crate::theta::{ProjectivePoint9, ThetaError};

/// Minimum relative gradient for hypersurface samples kept away from the
/// singular locus.
pub const GRADIENT_FLOOR: f64 = 1e-3;

/// Relative gradient below which a point counts as a base point of the
/// gradient map.
pub const BASE_LOCUS_TOL: f64 = 1e-8;

/// Residual `|F(x)| / term_scale` accepted for hypersurface samples.
pub const SAMPLE_RESIDUAL: f64 = 1e-10;

pub const MIN_SPAN_SAMPLES: usize = 30;
pub const SPAN_TEST_POINTS: usize = 50;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DualError {
    #[error("relative gradient {relative:.3e} is below the base-locus threshold")]
    BaseLocus { relative: f64 },
    #[error("random lines met the hypersurface in differing numbers of points: {counts:?}")]
    Inconsistent { counts: Vec<usize> },
    #[error("sample span has dimension {dim}, expected {expected}")]
    WrongSpanDim { dim: usize, expected: usize },
    #[error("polynomial is zero or constant")]
    Degenerate,
    #[error("found {found} of {requested} hypersurface samples")]
    SamplingFailed { found: usize, requested: usize },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Point of the dual projective space, normalized like [`ProjectivePoint9`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualPoint9(ProjectivePoint9);

impl DualPoint9 {
    pub fn new(coords: [Complex64; 9]) -> Result<Self, ThetaError> {
        ProjectivePoint9::normalized(coords).map(DualPoint9)
    }

    pub fn coords(&self) -> &[Complex64; 9] {
        self.0.coords()
    }

    pub fn distance(&self, other: &DualPoint9) -> f64 {
        self.0.distance(&other.0)
    }
}

impl AsRef<[Complex64]> for DualPoint9 {
    fn as_ref(&self) -> &[Complex64] {
        self.0.as_ref()
    }
}

/// `p ↦ [∂F/∂x_i(p)]` with the gradient precomputed.
#[derive(Clone, Debug)]
pub struct DualMap {
    gradient: Vec<MultiPoly<Complex64>>,
    floor: f64,
}

impl DualMap {
    pub fn new(f: &MultiPoly<Complex64>) -> Self {
        Self::with_floor(f, BASE_LOCUS_TOL)
    }

    pub fn with_floor(f: &MultiPoly<Complex64>, floor: f64) -> Self {
        Self { gradient: f.gradient(), floor }
    }

    pub fn gradient(&self) -> &[MultiPoly<Complex64>] {
        &self.gradient
    }

    pub fn image(&self, p: &[Complex64]) -> Result<DualPoint9, DualError> {
        let relative = poly::relative_gradient_norm(&self.gradient, p);
        if !(relative > self.floor) {
            return Err(DualError::BaseLocus { relative });
        }
        let g = poly::evaluate_gradient(&self.gradient, p);
        Ok(DualPoint9::new(g.try_into().expect("nine partials"))?)
    }

    pub fn images<R: AsRef<[Complex64]>>(&self, points: &[R]) -> Result<Vec<DualPoint9>, DualError> {
        points.iter().map(|p| self.image(p.as_ref())).collect()
    }
}

pub fn dual_image(f: &MultiPoly<Complex64>, p: &[Complex64]) -> Result<DualPoint9, DualError> {
    DualMap::new(f).image(p)
}

/// Random line `p₀ + t·p₁` in `C^n`.
fn random_line<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    (complex_normal_vec(rng, n), complex_normal_vec(rng, n))
}

/// Points where random lines meet `{F = 0}`: roots of `F(p₀ + t·p₁)` from
/// the companion matrix, each refined by one Newton step along the line and
/// kept when the residual is small and the relative gradient exceeds
/// `gradient_floor`.
pub fn sample_on_hypersurface<R: Rng + ?Sized>(
    f: &MultiPoly<Complex64>,
    count: usize,
    rng: &mut R,
    gradient_floor: f64,
) -> Result<Vec<ProjectivePoint9>, DualError> {
    if f.nvars() != 9 || f.degree().unwrap_or(0) == 0 {
        return Err(DualError::Degenerate);
    }
    let grad = f.gradient();
    let mut out = Vec::with_capacity(count);
    for _ in 0..(20 * count + 20) {
        if out.len() == count {
            break;
        }
        let (p0, p1) = random_line(rng, 9);
        let coeffs = f.along_line(&p0, &p1);
        let deriv: Vec<Complex64> = coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        for t in linalg::polynomial_roots(&coeffs) {
            let d = linalg::horner(&deriv, t);
            let t = if d.is_zero() { t } else { t - linalg::horner(&coeffs, t) / d };
            let x: Vec<Complex64> = p0.iter().zip(&p1).map(|(a, b)| a + t * b).collect();
            let residual = f.evaluate(&x).norm() / f.term_scale(&x);
            if residual > SAMPLE_RESIDUAL || poly::relative_gradient_norm(&grad, &x) <= gradient_floor {
                continue;
            }
            out.push(ProjectivePoint9::normalized(x.try_into().expect("nine coordinates"))?);
            if out.len() == count {
                break;
            }
        }
    }
    if out.len() < count {
        return Err(DualError::SamplingFailed { found: out.len(), requested: count });
    }
    Ok(out)
}

/// Samples on `{P₃ = 0}` away from its singular locus.
pub fn sample_on_cubic<R: Rng + ?Sized>(
    cubic: &MultiPoly<Complex64>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<ProjectivePoint9>, DualError> {
    sample_on_hypersurface(cubic, count, rng, GRADIENT_FLOOR)
}

/// Invariant sextic vanishing on the given dual images: the null vector of
/// the `N × m₆` matrix `[B_j(y_n)]`. Needs at least `3·m₆` images.
pub fn fit_dual_sextic(
    images: &[DualPoint9],
    invariant_basis: &[MultiPoly<CycloScalar>],
    tol: f64,
) -> Result<InvariantFit, DualError> {
    let needed = 3 * invariant_basis.len();
    if images.len() < needed || invariant_basis.is_empty() {
        return Err(FitError::TooFewSamples { needed, got: images.len() }.into());
    }
    let basis: Vec<MultiPoly<Complex64>> = invariant_basis.iter().map(MultiPoly::to_complex).collect();
    Ok(fit::fit_in_basis(&basis, tol, |b| images.iter().map(|y| b.evaluate(y.coords())).collect())?)
}

/// Number of intersection points, with multiplicity, of `{F = 0}` with
/// random lines. A coefficient of `F(p₀ + t·p₁)` counts when it exceeds
/// `1e-10` times the largest.
pub fn hypersurface_degree<R: Rng + ?Sized>(
    f: &MultiPoly<Complex64>,
    trials: usize,
    rng: &mut R,
) -> Result<usize, DualError> {
    if f.is_zero() {
        return Err(DualError::Degenerate);
    }
    let counts: Vec<usize> = (0..trials.max(1))
        .map(|_| {
            let (p0, p1) = random_line(rng, f.nvars());
            let coeffs = f.along_line(&p0, &p1);
            let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let top = coeffs.iter().rposition(|c| c.norm() > 1e-10 * max).unwrap_or(0);
            linalg::polynomial_roots(&coeffs[..=top]).len()
        })
        .collect();
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(DualError::Inconsistent { counts });
    }
    Ok(counts[0])
}

#[derive(Clone, Debug)]
pub struct SpanCheck {
    /// Orthonormal basis (as rows) of the span of the samples.
    pub basis: Vec<Vec<Complex64>>,
    pub singular_values: Vec<f64>,
    pub gap: Option<f64>,
    /// Largest `|P₃| / term_scale` at random points of the span.
    pub max_residual: f64,
}

/// Linear span of the samples in C⁹; must be 5-dimensional.
pub fn sample_span<R: AsRef<[Complex64]>>(samples: &[R], tol: f64) -> Result<SpanCheck, DualError> {
    if samples.len() < MIN_SPAN_SAMPLES {
        return Err(FitError::TooFewSamples { needed: MIN_SPAN_SAMPLES, got: samples.len() }.into());
    }
    let (basis, singular_values) = linalg::row_space_basis(&linalg::matrix_from_rows(samples, 9), tol);
    if basis.len() != 5 {
        return Err(DualError::WrongSpanDim { dim: basis.len(), expected: 5 });
    }
    let gap = linalg::gap_at(&singular_values, 5);
    if let Some(g) = gap.filter(|&g| g < linalg::MIN_SPECTRAL_GAP) {
        return Err(FitError::RankAmbiguous { rank: 5, gap: g }.into());
    }
    Ok(SpanCheck { basis, singular_values, gap, max_residual: 0.0 })
}

/// Random points `Σ t_j b_j` of the span of `basis`.
pub fn random_span_points<R: Rng + ?Sized>(basis: &[Vec<Complex64>], count: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| {
            let t = complex_normal_vec(rng, basis.len());
            (0..9).map(|i| basis.iter().zip(&t).map(|(b, tj)| b[i] * tj).sum()).collect()
        })
        .collect()
}

/// The span of `X_a` and the largest relative value of `P₃` at 50 random
/// points of it.
pub fn span_and_containment<R: Rng + ?Sized>(
    xa_samples: &[ProjectivePoint9],
    cubic: &MultiPoly<Complex64>,
    rng: &mut R,
    tol: f64,
) -> Result<SpanCheck, DualError> {
    let mut check = sample_span(xa_samples, tol)?;
    let points = random_span_points(&check.basis, SPAN_TEST_POINTS, rng);
    check.max_residual = fit::max_relative_value(cubic, &points);
    Ok(check)
}

/// Coordinates `t_j = ⟨b_j, x⟩` of `x` in an orthonormal basis.
pub fn span_coordinates(basis: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    basis.iter().map(|b| b.iter().zip(x).map(|(bi, xi)| bi.conj() * xi).sum()).collect()
}

/// Quadrics in the span coordinates of `P⁴_a` through the `X_a` samples.
pub fn quadrics_through_xa(
    xa_samples: &[ProjectivePoint9],
    span_basis: &[Vec<Complex64>],
    tol: f64,
) -> Result<FormFit, DualError> {
    if xa_samples.len() < MIN_SPAN_SAMPLES {
        return Err(FitError::TooFewSamples { needed: MIN_SPAN_SAMPLES, got: xa_samples.len() }.into());
    }
    let coords: Vec<Vec<Complex64>> = xa_samples.iter().map(|x| span_coordinates(span_basis, x.coords())).collect();
    Ok(fit::forms_through(&coords, span_basis.len(), 2, tol)?)
}

/// Numerical rank and singular values of a set of dual points.
pub fn image_rank(images: &[DualPoint9], tol: f64) -> (usize, Vec<f64>) {
    let values = linalg::singular_values(&linalg::matrix_from_rows(images, 9));
    (linalg::rank_from_values(&values, tol), values)
}

/// Largest relative gradient of `S₆` over the images; small exactly when
/// they lie in the singular locus of `{S₆ = 0}`.
pub fn sigma_in_dual_singular(sextic: &MultiPoly<Complex64>, images: &[DualPoint9]) -> f64 {
    fit::max_relative_gradient(sextic, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::{fit_coble_cubic, DEFAULT_RANK_TOL};
    use crate::heisenberg::{act_contragredient, act_on_vector, semi_invariant_forms, CharacterLabel, HeisenbergElement};
    use crate::poly::Monomial;
    use crate::rng::{seeded, LabRng};
    use crate::theta::{embed_point, sample_theta_divisor, PeriodMatrix, DEFAULT_SERIES_TOL};

    fn coble_cubic(rng: &mut LabRng) -> MultiPoly<Complex64> {
        let tau = PeriodMatrix::reference();
        let samples: Vec<ProjectivePoint9> = (0..20)
            .map(|_| embed_point(&tau.random_point(rng), &tau, DEFAULT_SERIES_TOL).unwrap())
            .collect();
        let basis = semi_invariant_forms(3, &CharacterLabel::TRIVIAL).basis;
        fit_coble_cubic(&samples, &basis, DEFAULT_RANK_TOL).unwrap().form
    }

    fn xa_samples(rng: &mut LabRng, count: usize) -> Vec<ProjectivePoint9> {
        let tau = PeriodMatrix::reference();
        let a = tau.random_point(rng).z;
        sample_theta_divisor(&tau, a, count, rng, DEFAULT_SERIES_TOL)
            .unwrap()
            .iter()
            .map(|z| embed_point(z, &tau, DEFAULT_SERIES_TOL).unwrap())
            .collect()
    }

    fn sextic(rng: &mut LabRng, cubic: &MultiPoly<Complex64>) -> MultiPoly<Complex64> {
        let basis = semi_invariant_forms(6, &CharacterLabel::TRIVIAL).basis;
        let map = DualMap::new(cubic);
        let images = map.images(&sample_on_cubic(cubic, 3 * basis.len() + 20, rng).unwrap()).unwrap();
        fit_dual_sextic(&images, &basis, DEFAULT_RANK_TOL).unwrap().form
    }

    #[test]
    fn cubic_samples_are_on_the_cubic_and_smooth() {
        let mut rng = seeded(31);
        let cubic = coble_cubic(&mut rng);
        let pts = sample_on_cubic(&cubic, 50, &mut rng).unwrap();
        assert!(fit::max_relative_value(&cubic, &pts) <= SAMPLE_RESIDUAL);
        let grad = cubic.gradient();
        for p in &pts {
            assert!(poly::relative_gradient_norm(&grad, p.coords()) > GRADIENT_FLOOR);
        }
    }

    #[test]
    fn random_lines_meet_the_cubic_three_times() {
        let mut rng = seeded(32);
        let cubic = coble_cubic(&mut rng);
        assert_eq!(hypersurface_degree(&cubic, 5, &mut rng).unwrap(), 3);
        let (p0, p1) = random_line(&mut rng, 9);
        assert_eq!(linalg::polynomial_roots(&cubic.along_line(&p0, &p1)).len(), 3);
    }

    #[test]
    fn sixth_power_of_a_linear_form() {
        let mut rng = seeded(33);
        let coeffs = complex_normal_vec(&mut rng, 9);
        let l = MultiPoly::from_terms(9, (0..9).map(|i| (Monomial::var(i), coeffs[i]))).unwrap();
        let f = l.pow(6).unwrap();
        assert_eq!(hypersurface_degree(&f, 4, &mut rng).unwrap(), 6);
        let (p0, p1) = random_line(&mut rng, 9);
        let a: Complex64 = coeffs.iter().zip(&p0).map(|(c, x)| c * x).sum();
        let b: Complex64 = coeffs.iter().zip(&p1).map(|(c, x)| c * x).sum();
        let roots = linalg::polynomial_roots(&f.along_line(&p0, &p1));
        assert_eq!(roots.len(), 6);
        // a 6-fold root splits by about eps^(1/6); the centroid stays close
        let root = -a / b;
        let centroid = roots.iter().sum::<Complex64>() / 6.0;
        assert!((centroid - root).norm() < 1e-5 * root.norm().max(1.0));
        for r in roots {
            assert!((r - root).norm() < 0.1 * root.norm().max(1.0));
        }
        assert_eq!(hypersurface_degree(&MultiPoly::zero(9), 1, &mut rng), Err(DualError::Degenerate));
    }

    #[test]
    fn dual_image_is_projective_and_equivariant() {
        let mut rng = seeded(34);
        let cubic = coble_cubic(&mut rng);
        let map = DualMap::new(&cubic);
        for p in sample_on_cubic(&cubic, 20, &mut rng).unwrap() {
            let y = map.image(p.coords()).unwrap();
            let scaled: Vec<Complex64> = p.coords().iter().map(|c| c * Complex64::new(-1.7, 0.4)).collect();
            assert!(y.distance(&map.image(&scaled).unwrap()) < 1e-12);
            for g in HeisenbergElement::generators() {
                let moved = map.image(&act_on_vector(&g, p.coords())).unwrap();
                let expect = DualPoint9::new(act_contragredient(&g, y.coords())).unwrap();
                assert!(moved.distance(&expect) < 1e-9);
            }
        }
    }

    #[test]
    fn dual_coordinates_are_quadratic_along_lines() {
        let mut rng = seeded(35);
        let cubic = coble_cubic(&mut rng);
        let (p0, p1) = random_line(&mut rng, 9);
        for g in cubic.gradient() {
            assert!(g.along_line(&p0, &p1).len() <= 3);
        }
    }

    #[test]
    fn gradient_vanishes_on_the_jacobian_only() {
        let mut rng = seeded(36);
        let cubic = coble_cubic(&mut rng);
        let tau = PeriodMatrix::reference();
        let z = embed_point(&tau.random_point(&mut rng), &tau, DEFAULT_SERIES_TOL).unwrap();
        assert!(matches!(dual_image(&cubic, z.coords()), Err(DualError::BaseLocus { .. })));
        let off = sample_on_cubic(&cubic, 50, &mut rng).unwrap();
        let min = off
            .iter()
            .map(|p| poly::relative_gradient_norm(&cubic.gradient(), p.coords()))
            .fold(f64::INFINITY, f64::min);
        assert!(min > GRADIENT_FLOOR);
    }

    #[test]
    fn dual_sextic_fit() {
        let mut rng = seeded(37);
        let cubic = coble_cubic(&mut rng);
        let basis = semi_invariant_forms(6, &CharacterLabel::TRIVIAL).basis;
        let map = DualMap::new(&cubic);
        let images = map.images(&sample_on_cubic(&cubic, 3 * basis.len(), &mut rng).unwrap()).unwrap();
        let fit = fit_dual_sextic(&images, &basis, DEFAULT_RANK_TOL).unwrap();
        assert!(fit.gap.unwrap() > 1e3);
        let held_out = map.images(&sample_on_cubic(&cubic, 100, &mut rng).unwrap()).unwrap();
        assert!(fit::max_relative_value(&fit.form, &held_out) <= 1e-7);
        assert_eq!(hypersurface_degree(&fit.form, 5, &mut rng).unwrap(), 6);
        assert!(fit_dual_sextic(&images[..10], &basis, DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn span_of_xa_is_a_p4_inside_the_cubic() {
        let mut rng = seeded(38);
        let cubic = coble_cubic(&mut rng);
        let xa = xa_samples(&mut rng, 30);
        let check = span_and_containment(&xa, &cubic, &mut rng, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(check.basis.len(), 5);
        assert!(check.max_residual <= 1e-8);

        let other = sample_span(&xa_samples(&mut rng, 30), DEFAULT_RANK_TOL).unwrap();
        assert!(linalg::max_principal_angle(&check.basis, &other.basis, DEFAULT_RANK_TOL) > 0.01);
    }

    #[test]
    fn generic_points_span_everything() {
        let mut rng = seeded(39);
        let pts: Vec<Vec<Complex64>> = (0..30).map(|_| complex_normal_vec(&mut rng, 9)).collect();
        assert_eq!(sample_span(&pts, DEFAULT_RANK_TOL).unwrap_err(), DualError::WrongSpanDim { dim: 9, expected: 5 });
    }

    #[test]
    fn four_quadrics_through_xa() {
        let mut rng = seeded(40);
        let xa = xa_samples(&mut rng, 40);
        let span = sample_span(&xa[..30], DEFAULT_RANK_TOL).unwrap();
        let fit = quadrics_through_xa(&xa[..30], &span.basis, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(fit.nullity(), 4);
        let held_out: Vec<Vec<Complex64>> = xa[30..].iter().map(|x| span_coordinates(&span.basis, x.coords())).collect();
        for q in &fit.basis {
            assert!(fit::max_relative_value(q, &held_out) < 1e-8);
        }
        let generic: Vec<Vec<Complex64>> = (0..30).map(|_| complex_normal_vec(&mut rng, 5)).collect();
        assert_eq!(fit::forms_through(&generic, 5, 2, DEFAULT_RANK_TOL).unwrap().nullity(), 0);
    }

    #[test]
    fn span_images_lie_in_the_singular_locus_of_the_sextic() {
        let mut rng = seeded(41);
        let cubic = coble_cubic(&mut rng);
        let s6 = sextic(&mut rng, &cubic);
        let map = DualMap::new(&cubic);
        let mut planes = Vec::new();
        for _ in 0..2 {
            let span = sample_span(&xa_samples(&mut rng, 30), DEFAULT_RANK_TOL).unwrap();
            let images = map.images(&random_span_points(&span.basis, 20, &mut rng)).unwrap();
            let (rank, _) = image_rank(&images, DEFAULT_RANK_TOL);
            assert_eq!(rank, 4);
            assert!(sigma_in_dual_singular(&s6, &images) <= 1e-6);
            planes.push(images);
        }
        assert!(linalg::max_principal_angle(&planes[0], &planes[1], DEFAULT_RANK_TOL) > 0.01);

        let smooth = sample_on_hypersurface(&s6, 20, &mut rng, 0.0).unwrap();
        let grad = s6.gradient();
        for p in smooth {
            assert!(poly::relative_gradient_norm(&grad, p.coords()) > 1e-3);
        }
    }
}
