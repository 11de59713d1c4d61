//! Quadrics through the embedded Jacobian and the Heisenberg-invariant cubic
//! singular along it.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::cyclo::CycloScalar;
use crate::linalg::{self, NullSpace};
use crate::poly::{self, Monomial, MultiPoly, PolyError};
use crate::theta::ProjectivePoint9;

/// Relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;
pub const MIN_QUADRIC_SAMPLES: usize = 120;
pub const MIN_CUBIC_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("singular-value gap {gap:.3e} at rank {rank} is below the required ratio")]
    RankAmbiguous { rank: usize, gap: f64 },
    #[error("design matrix has trivial null space")]
    NoSolution,
    #[error("design matrix has null space of dimension {nullity}")]
    NonUnique { nullity: usize },
    #[error("invariant basis has {got} forms, expected {expected}")]
    WrongBasisSize { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Null space of an evaluation or design matrix, with its spectrum.
#[derive(Clone, Debug)]
pub struct FormFit {
    pub basis: Vec<MultiPoly<Complex64>>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub gap: Option<f64>,
}

impl FormFit {
    pub fn nullity(&self) -> usize {
        self.basis.len()
    }
}

fn checked_null_space(m: &linalg::CMatrix, tol: f64) -> Result<NullSpace, FitError> {
    let ns = linalg::null_space(m, tol);
    match ns.gap {
        Some(gap) if !ns.gap_is_clean() => Err(FitError::RankAmbiguous { rank: ns.rank, gap }),
        _ => Ok(ns),
    }
}

/// Rows `[m(x) for m in monomials]`, one per point.
pub fn evaluation_matrix<R: AsRef<[Complex64]>>(points: &[R], monomials: &[Monomial]) -> linalg::CMatrix {
    let rows: Vec<Vec<Complex64>> = points
        .iter()
        .map(|x| monomials.iter().map(|m| m.eval(x.as_ref())).collect())
        .collect();
    linalg::matrix_from_rows(&rows, monomials.len())
}

/// Degree-`d` forms in `nvars` variables vanishing at all `points`.
pub fn forms_through<R: AsRef<[Complex64]>>(
    points: &[R],
    nvars: usize,
    degree: u32,
    tol: f64,
) -> Result<FormFit, FitError> {
    let monomials = Monomial::all_of_degree(nvars, degree);
    let ns = checked_null_space(&evaluation_matrix(points, &monomials), tol)?;
    let basis = ns
        .vectors
        .iter()
        .map(|v| MultiPoly::from_terms(nvars, monomials.iter().copied().zip(v.iter().copied())))
        .collect::<Result<_, _>>()?;
    Ok(FormFit { basis, singular_values: ns.singular_values, rank: ns.rank, gap: ns.gap })
}

/// Quadrics in P⁸ through the given points (at least 120).
pub fn quadrics_through(points: &[ProjectivePoint9], tol: f64) -> Result<FormFit, FitError> {
    if points.len() < MIN_QUADRIC_SAMPLES {
        return Err(FitError::TooFewSamples { needed: MIN_QUADRIC_SAMPLES, got: points.len() });
    }
    let coords: Vec<&[Complex64]> = points.iter().map(|p| p.coords().as_slice()).collect();
    forms_through(&coords, 9, 2, tol)
}

/// A form fitted inside a space of invariant forms.
#[derive(Clone, Debug)]
pub struct InvariantFit {
    /// Unit coefficient norm, leading coefficient real and positive.
    pub form: MultiPoly<Complex64>,
    /// Coordinates of `form` in the invariant basis.
    pub coefficients: Vec<Complex64>,
    pub singular_values: Vec<f64>,
    pub gap: Option<f64>,
}

/// Invariant cubic `Σ c_j B_j` whose nine partials vanish at every sample:
/// the null vector of the `9N × 5` matrix `[∂_i B_j(x_n)]`.
pub fn fit_coble_cubic(
    samples: &[ProjectivePoint9],
    invariant_basis: &[MultiPoly<CycloScalar>],
    tol: f64,
) -> Result<InvariantFit, FitError> {
    if invariant_basis.len() != 5 {
        return Err(FitError::WrongBasisSize { expected: 5, got: invariant_basis.len() });
    }
    if samples.len() < MIN_CUBIC_SAMPLES {
        return Err(FitError::TooFewSamples { needed: MIN_CUBIC_SAMPLES, got: samples.len() });
    }
    let basis: Vec<MultiPoly<Complex64>> = invariant_basis.iter().map(MultiPoly::to_complex).collect();
    fit_in_basis(&basis, tol, |b| {
        let grad = b.gradient();
        samples.iter().flat_map(|x| poly::evaluate_gradient(&grad, x.coords())).collect()
    })
}

/// Unique null vector of the matrix whose column `j` is `column(basis[j])`,
/// combined and normalized projectively.
pub(crate) fn fit_in_basis<F>(
    basis: &[MultiPoly<Complex64>],
    tol: f64,
    mut column: F,
) -> Result<InvariantFit, FitError>
where
    F: FnMut(&MultiPoly<Complex64>) -> Vec<Complex64>,
{
    let columns: Vec<Vec<Complex64>> = basis.iter().map(&mut column).collect();
    let nrows = columns.first().map_or(0, Vec::len);
    let m = linalg::CMatrix::from_fn(nrows, basis.len(), |i, j| columns[j][i]);
    let ns = checked_null_space(&m, tol)?;
    match ns.nullity() {
        0 => return Err(FitError::NoSolution),
        1 => {}
        n => return Err(FitError::NonUnique { nullity: n }),
    }
    let c = &ns.vectors[0];
    let nvars = basis[0].nvars();
    let raw = MultiPoly::combination(nvars, c, basis)?;
    let normalized = raw.normalized_projectively();
    // the same rescaling applied to the basis coordinates
    let (m0, lead) = raw.leading_term().expect("nonzero combination");
    let factor = normalized.coefficient(m0) / lead;
    let coefficients = c.iter().map(|v| v * factor).collect();
    Ok(InvariantFit { form: normalized, coefficients, singular_values: ns.singular_values, gap: ns.gap })
}

/// Largest principal angle between `span{∂F/∂x_i}` and `span(quadrics)` in
/// the space of quadric coefficients, with the rank of the partials.
pub fn partials_span_check(
    cubic: &MultiPoly<Complex64>,
    quadrics: &[MultiPoly<Complex64>],
    tol: f64,
) -> (f64, usize) {
    let monomials = Monomial::all_of_degree(cubic.nvars(), 2);
    let partials: Vec<Vec<Complex64>> = cubic.gradient().iter().map(|g| g.coefficient_vector(&monomials)).collect();
    let quads: Vec<Vec<Complex64>> = quadrics.iter().map(|q| q.coefficient_vector(&monomials)).collect();
    let rank = linalg::numerical_rank(&linalg::matrix_from_rows(&partials, monomials.len()), tol);
    (linalg::max_principal_angle(&partials, &quads, tol), rank)
}

/// Largest `‖∇F(x)‖ / gradient_scale` over the points.
pub fn max_relative_gradient<R: AsRef<[Complex64]>>(f: &MultiPoly<Complex64>, points: &[R]) -> f64 {
    let grad = f.gradient();
    points
        .iter()
        .map(|x| poly::relative_gradient_norm(&grad, x.as_ref()))
        .fold(0.0, f64::max)
}

/// Largest `|F(x)| / term_scale` over the points.
pub fn max_relative_value<R: AsRef<[Complex64]>>(f: &MultiPoly<Complex64>, points: &[R]) -> f64 {
    points
        .iter()
        .map(|x| {
            let scale = f.term_scale(x.as_ref());
            if scale.is_zero() {
                0.0
            } else {
                f.evaluate(x.as_ref()).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{act_on_vector, semi_invariant_forms, CharacterLabel, HeisenbergElement};
    use crate::rng::{complex_normal_vec, seeded, LabRng};
    use crate::theta::{embed_point, PeriodMatrix, DEFAULT_SERIES_TOL};
    use rand::Rng;

    fn j_samples(rng: &mut LabRng, n: usize) -> Vec<ProjectivePoint9> {
        let tau = PeriodMatrix::reference();
        (0..n).map(|_| embed_point(&tau.random_point(rng), &tau, DEFAULT_SERIES_TOL).unwrap()).collect()
    }

    fn generic_points(rng: &mut LabRng, n: usize) -> Vec<ProjectivePoint9> {
        (0..n)
            .map(|_| ProjectivePoint9::normalized(complex_normal_vec(rng, 9).try_into().unwrap()).unwrap())
            .collect()
    }

    fn invariant_cubics() -> Vec<MultiPoly<CycloScalar>> {
        semi_invariant_forms(3, &CharacterLabel::TRIVIAL).basis
    }

    #[test]
    fn nine_quadrics_through_the_jacobian() {
        let mut rng = seeded(21);
        let fit = quadrics_through(&j_samples(&mut rng, 120), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(fit.nullity(), 9);
        assert!(fit.gap.unwrap() > 1e3);
        let held_out = j_samples(&mut rng, 50);
        for q in &fit.basis {
            assert!(max_relative_value(q, &held_out) < 1e-8);
        }
    }

    #[test]
    fn generic_points_impose_independent_conditions() {
        let fit = quadrics_through(&generic_points(&mut seeded(22), 120), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(fit.nullity(), 0);
        let few = j_samples(&mut seeded(22), 40);
        assert_eq!(
            quadrics_through(&few, DEFAULT_RANK_TOL).unwrap_err(),
            FitError::TooFewSamples { needed: 120, got: 40 }
        );
    }

    #[test]
    fn cubic_is_unique_and_singular_along_the_jacobian() {
        let mut rng = seeded(23);
        let fit = fit_coble_cubic(&j_samples(&mut rng, 20), &invariant_cubics(), DEFAULT_RANK_TOL).unwrap();
        assert!(fit.gap.unwrap() > 1e3);
        assert!((fit.form.coefficient_norm() - 1.0).abs() < 1e-12);
        assert!(max_relative_gradient(&fit.form, &j_samples(&mut rng, 50)) < 1e-8);
    }

    #[test]
    fn generic_points_admit_no_singular_cubic() {
        let err = fit_coble_cubic(&generic_points(&mut seeded(24), 20), &invariant_cubics(), DEFAULT_RANK_TOL);
        assert_eq!(err.unwrap_err(), FitError::NoSolution);
        let short = &invariant_cubics()[..4];
        assert!(matches!(
            fit_coble_cubic(&j_samples(&mut seeded(24), 20), short, DEFAULT_RANK_TOL),
            Err(FitError::WrongBasisSize { .. })
        ));
    }

    #[test]
    fn partials_span_the_quadrics() {
        let mut rng = seeded(25);
        let cubic = fit_coble_cubic(&j_samples(&mut rng, 20), &invariant_cubics(), DEFAULT_RANK_TOL)
            .unwrap()
            .form;
        let quads = quadrics_through(&j_samples(&mut rng, 120), DEFAULT_RANK_TOL).unwrap().basis;
        let (angle, rank) = partials_span_check(&cubic, &quads, DEFAULT_RANK_TOL);
        assert_eq!(rank, 9);
        assert!(angle < 1e-6, "angle {angle}");

        let mut perturbed = quads.clone();
        let mons = Monomial::all_of_degree(9, 2);
        perturbed[4] = MultiPoly::from_terms(9, mons.iter().copied().zip(complex_normal_vec(&mut rng, 45))).unwrap();
        let (angle, _) = partials_span_check(&cubic, &perturbed, DEFAULT_RANK_TOL);
        assert!(angle > 0.1, "angle {angle}");
    }

    #[test]
    fn fitted_cubic_is_heisenberg_invariant() {
        let mut rng = seeded(26);
        let cubic = fit_coble_cubic(&j_samples(&mut rng, 20), &invariant_cubics(), DEFAULT_RANK_TOL)
            .unwrap()
            .form;
        let all = HeisenbergElement::all();
        for _ in 0..10 {
            let g = all[rng.random_range(0..all.len())];
            let x: [Complex64; 9] = complex_normal_vec(&mut rng, 9).try_into().unwrap();
            let y = act_on_vector(&g, &x);
            let diff = (cubic.evaluate(&y) - cubic.evaluate(&x)).norm();
            assert!(diff <= 1e-10 * cubic.term_scale(&x));
        }
    }

    #[test]
    fn fit_is_deterministic_and_scale_free() {
        let samples = j_samples(&mut seeded(27), 20);
        let a = fit_coble_cubic(&samples, &invariant_cubics(), DEFAULT_RANK_TOL).unwrap();
        let b = fit_coble_cubic(&samples, &invariant_cubics(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(a.form, b.form);
        assert_eq!(a.coefficients, b.coefficients);

        let mut rng = seeded(28);
        let rotated: Vec<ProjectivePoint9> = samples
            .iter()
            .map(|p| {
                let phase = Complex64::from_polar(1.0, rng.random::<f64>() * 6.28);
                ProjectivePoint9::new(p.coords().map(|c| c * phase)).unwrap()
            })
            .collect();
        let c = fit_coble_cubic(&rotated, &invariant_cubics(), DEFAULT_RANK_TOL).unwrap();
        assert!((&a.form - &c.form).coefficient_norm() < 1e-9);
    }

    #[test]
    fn coefficients_reproduce_the_cubic() {
        let fit = fit_coble_cubic(&j_samples(&mut seeded(29), 20), &invariant_cubics(), DEFAULT_RANK_TOL).unwrap();
        let basis: Vec<MultiPoly<Complex64>> = invariant_cubics().iter().map(MultiPoly::to_complex).collect();
        let rebuilt = MultiPoly::combination(9, &fit.coefficients, &basis).unwrap();
        assert!((&rebuilt - &fit.form).coefficient_norm() < 1e-12);
    }
}
