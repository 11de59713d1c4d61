//! Sparse multivariate polynomials in at most nine variables and of total
//! degree at most six, over exact Q(ω) or complex floating coefficients.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

use crate::cyclo::{CycloScalar, HALF_SQRT3};
use crate::linalg;

pub const MAX_VARS: usize = 9;
pub const MAX_DEGREE: u32 = 6;

/// Dimension C(d+8, 8) of the space of degree-`d` forms in nine variables.
pub const FORM_SPACE_DIMS: [usize; 7] = [1, 9, 45, 165, 495, 1287, 3003];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("monomial degree {degree} exceeds the cap of {MAX_DEGREE}")]
    DegreeCap { degree: u32 },
    #[error("variable index {var} out of range for {nvars} variables")]
    VariableOutOfRange { var: usize, nvars: usize },
    #[error("substitution basis has rank {rank}, expected {expected}")]
    DegenerateBasis { rank: usize, expected: usize },
    #[error("polynomials live in different rings ({left} vs {right} variables)")]
    RingMismatch { left: usize, right: usize },
}

/// Exponent vector packed four bits per variable (variable 0 in the lowest
/// nibble).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(exps: &[u8]) -> Result<Self, PolyError> {
        if exps.len() > MAX_VARS {
            return Err(PolyError::VariableOutOfRange { var: exps.len() - 1, nvars: MAX_VARS });
        }
        let degree: u32 = exps.iter().map(|&e| e as u32).sum();
        if degree > MAX_DEGREE {
            return Err(PolyError::DegreeCap { degree });
        }
        let packed = exps
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &e)| acc | ((e as u64) << (4 * i)));
        Ok(Monomial(packed))
    }

    /// The monomial `x_i`.
    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        Monomial(1u64 << (4 * i))
    }

    pub fn exponent(self, i: usize) -> u8 {
        ((self.0 >> (4 * i)) & 0xf) as u8
    }

    pub fn exponents(self) -> [u8; MAX_VARS] {
        core::array::from_fn(|i| self.exponent(i))
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i) as u32).sum()
    }

    /// Index of the highest variable that occurs, if any.
    pub fn max_var(self) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&i| self.exponent(i) > 0)
    }

    pub fn checked_mul(self, other: Monomial) -> Result<Monomial, PolyError> {
        let degree = self.degree() + other.degree();
        if degree > MAX_DEGREE {
            return Err(PolyError::DegreeCap { degree });
        }
        // no nibble can overflow: every exponent is at most the total degree
        Ok(Monomial(self.0 + other.0))
    }

    /// `x^m / x_i` together with the exponent of `x_i`, if it occurs.
    pub fn divide_var(self, i: usize) -> Option<(u8, Monomial)> {
        let e = self.exponent(i);
        (e > 0).then(|| (e, Monomial(self.0 - (1u64 << (4 * i)))))
    }

    pub fn eval(self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::one();
        for (i, xi) in x.iter().enumerate().take(MAX_VARS) {
            for _ in 0..self.exponent(i) {
                acc *= xi;
            }
        }
        acc
    }

    /// All monomials of degree `d` in `nvars` variables, in canonical order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(var: usize, nvars: usize, left: u32, cur: &mut [u8; MAX_VARS], out: &mut Vec<Monomial>) {
            if var + 1 == nvars {
                cur[var] = left as u8;
                out.push(Monomial::from_exponents(&cur[..nvars]).expect("degree within cap"));
                cur[var] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur[var] = e as u8;
                rec(var + 1, nvars, left - e, cur, out);
            }
            cur[var] = 0;
        }
        assert!((1..=MAX_VARS).contains(&nvars) && d <= MAX_DEGREE);
        let mut out = Vec::new();
        rec(0, nvars, d, &mut [0; MAX_VARS], &mut out);
        out
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: lower degree first, then larger exponent of
    /// `x0`, then of `x1`, and so on.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exponents().cmp(&self.exponents()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..MAX_VARS {
            let e = self.exponent(i);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "x{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientKind {
    Exact,
    Float,
}

/// Coefficient field of a [`MultiPoly`].
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const KIND: CoefficientKind;
    fn from_u32(n: u32) -> Self;
    /// ω^k, ω = e^{2πi/3}.
    fn omega_pow(k: i64) -> Self;
    fn to_complex(&self) -> Complex64;
    /// Rank of the span of `rows`; exact for exact coefficients.
    fn rank(rows: &[Vec<Self>]) -> usize;
}

/// Relative threshold used for float ranks of substitution bases.
pub const FLOAT_BASIS_RANK_TOL: f64 = 1e-10;

impl Coefficient for Complex64 {
    const KIND: CoefficientKind = CoefficientKind::Float;

    fn from_u32(n: u32) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(-0.5, HALF_SQRT3),
            _ => Complex64::new(-0.5, -HALF_SQRT3),
        }
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn rank(rows: &[Vec<Self>]) -> usize {
        let ncols = rows.first().map_or(0, Vec::len);
        linalg::numerical_rank(&linalg::matrix_from_rows(rows, ncols), FLOAT_BASIS_RANK_TOL)
    }
}

impl Coefficient for CycloScalar {
    const KIND: CoefficientKind = CoefficientKind::Exact;

    fn from_u32(n: u32) -> Self {
        CycloScalar::from_integer(n as i64)
    }

    fn omega_pow(k: i64) -> Self {
        CycloScalar::omega_pow(k)
    }

    fn to_complex(&self) -> Complex64 {
        CycloScalar::to_complex(self)
    }

    fn rank(rows: &[Vec<Self>]) -> usize {
        exact_rank(rows)
    }
}

/// Gaussian elimination over Q(ω).
pub fn exact_rank(rows: &[Vec<CycloScalar>]) -> usize {
    let mut m: Vec<Vec<CycloScalar>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].inv().expect("pivot is nonzero");
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for c in col..ncols {
                let delta = &factor * &m[rank][c];
                m[r][c] = m[r][c].clone() - delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Polynomial with no stored zero coefficients.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(i), C::one());
        p
    }

    pub fn monomial(nvars: usize, m: Monomial, c: C) -> Result<Self, PolyError> {
        Self::from_terms(nvars, [(m, c)])
    }

    /// Sums duplicate monomials and drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, terms: I) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if let Some(v) = m.max_var().filter(|&v| v >= nvars) {
                return Err(PolyError::VariableOutOfRange { var: v, nvars });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Leading term in canonical monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// True when all terms share one degree (the zero polynomial included).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(PolyError::RingMismatch { left: self.nvars, right: other.nvars })
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(*m, v.clone() * c.clone());
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.checked_mul(*m2)?, c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, PolyError> {
        let mut out = Self::constant(self.nvars, C::one());
        for _ in 0..e {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Linear combination `Σ cᵢ Fᵢ` of polynomials in the same ring.
    pub fn combination(nvars: usize, coeffs: &[C], polys: &[Self]) -> Result<Self, PolyError> {
        let mut out = Self::zero(nvars);
        for (c, p) in coeffs.iter().zip(polys) {
            out = out.try_add(&p.scale(c))?;
        }
        Ok(out)
    }

    /// Replaces every monomial by `f(m) = (m', c')`, multiplying its
    /// coefficient by `c'`.
    pub fn map_monomials<F: FnMut(Monomial) -> (Monomial, C)>(&self, mut f: F) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let (m2, factor) = f(*m);
            out.add_term(m2, c.clone() * factor);
        }
        out
    }

    pub fn map_coefficients<D: Coefficient, F: FnMut(&C) -> D>(&self, mut f: F) -> MultiPoly<D> {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    pub fn to_complex(&self) -> MultiPoly<Complex64> {
        self.map_coefficients(C::to_complex)
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c.to_complex() * m.eval(x)).sum()
    }

    /// `Σ |c_m|·|x^m|`, the floating-point magnitude scale of `F(x)`.
    pub fn term_scale(&self, x: &[Complex64]) -> f64 {
        self.terms.iter().map(|(m, c)| c.to_complex().norm() * m.eval(x).norm()).sum()
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.divide_var(i) {
                out.add_term(rest, c.clone() * C::from_u32(e as u32));
            }
        }
        out
    }

    /// Formal partial derivatives with respect to every variable.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Coefficients on the given monomial list.
    pub fn coefficient_vector(&self, monomials: &[Monomial]) -> Vec<C> {
        monomials.iter().map(|m| self.coefficient(m)).collect()
    }

    /// Substitutes `x = Σ_j t_j basis[j]`, giving a polynomial in
    /// `basis.len()` variables `t`.
    pub fn restrict_to_span(&self, basis: &[Vec<C>]) -> Result<Self, PolyError> {
        let k = basis.len();
        if k == 0 || k > MAX_VARS {
            return Err(PolyError::DegenerateBasis { rank: 0, expected: k });
        }
        if let Some(bad) = basis.iter().find(|b| b.len() != self.nvars) {
            return Err(PolyError::VariableOutOfRange { var: bad.len(), nvars: self.nvars });
        }
        let rank = C::rank(basis);
        if rank < k {
            return Err(PolyError::DegenerateBasis { rank, expected: k });
        }
        let linear: Vec<MultiPoly<C>> = (0..self.nvars)
            .map(|i| {
                MultiPoly::from_terms(k, (0..k).map(|j| (Monomial::var(j), basis[j][i].clone())))
                    .expect("variables within range")
            })
            .collect();
        let mut powers: Vec<Vec<MultiPoly<C>>> =
            linear.iter().map(|_| vec![MultiPoly::constant(k, C::one())]).collect();
        let mut out = MultiPoly::zero(k);
        for (m, c) in &self.terms {
            let mut prod = MultiPoly::constant(k, c.clone());
            for (i, lin) in linear.iter().enumerate() {
                let e = m.exponent(i) as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = powers[i].last().expect("nonempty").try_mul(lin)?;
                    powers[i].push(next);
                }
                prod = prod.try_mul(&powers[i][e])?;
            }
            out = out.try_add(&prod)?;
        }
        Ok(out)
    }
}

impl MultiPoly<Complex64> {
    /// ℓ² norm of the coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Ascending coefficients of `t ↦ F(p0 + t·p1)`.
    pub fn along_line(&self, p0: &[Complex64], p1: &[Complex64]) -> Vec<Complex64> {
        let deg = self.degree().unwrap_or(0) as usize;
        let mut out = vec![Complex64::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut prod = vec![*c];
            for i in 0..self.nvars {
                for _ in 0..m.exponent(i) {
                    let mut next = vec![Complex64::zero(); prod.len() + 1];
                    for (j, v) in prod.iter().enumerate() {
                        next[j] += v * p0[i];
                        next[j + 1] += v * p1[i];
                    }
                    prod = next;
                }
            }
            for (j, v) in prod.into_iter().enumerate() {
                out[j] += v;
            }
        }
        out
    }

    /// Rescales to unit coefficient norm with the leading coefficient real
    /// and positive; the zero polynomial is returned unchanged.
    pub fn normalized_projectively(&self) -> Self {
        let Some((_, lead)) = self.leading_term() else {
            return self.clone();
        };
        let phase = lead.conj() / lead.norm();
        let factor = phase / self.coefficient_norm();
        self.map_coefficients(|c| c * factor)
    }
}

/// `sqrt(Σ_i term_scale(∂_i F, x)²)`, the magnitude scale of `∇F(x)`.
pub fn gradient_scale(gradient: &[MultiPoly<Complex64>], x: &[Complex64]) -> f64 {
    gradient.iter().map(|g| g.term_scale(x).powi(2)).sum::<f64>().sqrt()
}

/// `‖∇F(x)‖ / gradient_scale`: near machine epsilon where `F` is singular,
/// of order one at smooth points.
pub fn relative_gradient_norm(gradient: &[MultiPoly<Complex64>], x: &[Complex64]) -> f64 {
    let g = evaluate_gradient(gradient, x);
    linalg::norm(&g) / gradient_scale(gradient, x)
}

/// Evaluates a gradient (as returned by [`MultiPoly::gradient`]).
pub fn evaluate_gradient<C: Coefficient>(gradient: &[MultiPoly<C>], x: &[Complex64]) -> Vec<Complex64> {
    gradient.iter().map(|g| g.evaluate(x)).collect()
}

impl<C: Coefficient> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c:?})*{m}")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    /// Panics if the operands live in different rings.
    fn add(self, rhs: Self) -> MultiPoly<C> {
        self.try_add(rhs).expect("operands in the same ring")
    }
}

impl<C: Coefficient> Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: Self) -> MultiPoly<C> {
        self.try_add(&-rhs).expect("operands in the same ring")
    }
}

impl<C: Coefficient> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        self.scale(&-C::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal_vec, seeded};

    type CPoly = MultiPoly<Complex64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x0_cubed() -> CPoly {
        CPoly::monomial(9, Monomial::from_exponents(&[3]).unwrap(), c(1.0, 0.0)).unwrap()
    }

    fn random_form(rng: &mut crate::rng::LabRng, d: u32) -> CPoly {
        let mons = Monomial::all_of_degree(9, d);
        let coeffs = complex_normal_vec(rng, mons.len());
        CPoly::from_terms(9, mons.into_iter().zip(coeffs)).unwrap()
    }

    #[test]
    fn form_space_dimensions() {
        for d in 0..=6u32 {
            assert_eq!(Monomial::all_of_degree(9, d).len(), FORM_SPACE_DIMS[d as usize]);
        }
        assert_eq!(Monomial::all_of_degree(5, 2).len(), 15);
    }

    #[test]
    fn canonical_order_is_graded_lex() {
        let mons = Monomial::all_of_degree(3, 2);
        let mut sorted = mons.clone();
        sorted.sort();
        assert_eq!(mons, sorted);
        assert_eq!(mons[0], Monomial::from_exponents(&[2, 0, 0]).unwrap());
        assert!(Monomial::ONE < Monomial::var(8));
    }

    #[test]
    fn degree_cap_is_enforced() {
        assert_eq!(
            Monomial::from_exponents(&[4, 3]),
            Err(PolyError::DegreeCap { degree: 7 })
        );
        let cube = x0_cubed();
        assert!(cube.try_mul(&cube).is_ok());
        assert!(cube.try_mul(&cube).unwrap().try_mul(&CPoly::var(9, 1)).is_err());
    }

    #[test]
    fn evaluate_basic_and_homogeneity() {
        let mut e0 = [Complex64::zero(); 9];
        e0[0] = c(1.0, 0.0);
        assert_eq!(x0_cubed().evaluate(&e0), c(1.0, 0.0));

        let mut rng = seeded(3);
        let f = random_form(&mut rng, 3);
        let x = complex_normal_vec(&mut rng, 9);
        let lambda = c(0.7, -1.3);
        let scaled: Vec<Complex64> = x.iter().map(|v| v * lambda).collect();
        let lhs = f.evaluate(&scaled);
        let rhs = f.evaluate(&x) * lambda.powi(3);
        assert!((lhs - rhs).norm() <= 1e-12 * f.term_scale(&scaled));
    }

    #[test]
    fn euler_identity() {
        let mut rng = seeded(4);
        for d in 1..=4 {
            let f = random_form(&mut rng, d);
            let x = complex_normal_vec(&mut rng, 9);
            let grad = evaluate_gradient(&f.gradient(), &x);
            let euler: Complex64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
            let fx = f.evaluate(&x) * d as f64;
            assert!((euler - fx).norm() <= 1e-11 * f.term_scale(&x) * d as f64);
        }
    }

    #[test]
    fn gradient_examples() {
        let g = x0_cubed().gradient();
        let expect = CPoly::monomial(9, Monomial::from_exponents(&[2]).unwrap(), c(3.0, 0.0)).unwrap();
        assert_eq!(g[0], expect);
        assert!(g[1..].iter().all(MultiPoly::is_zero));

        let coeffs: Vec<Complex64> = (0..9).map(|i| c(i as f64, -1.0)).collect();
        let linear = CPoly::from_terms(9, (0..9).map(|i| (Monomial::var(i), coeffs[i]))).unwrap();
        for (i, gi) in linear.gradient().iter().enumerate() {
            assert_eq!(gi.coefficient(&Monomial::ONE), coeffs[i]);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = seeded(5);
        let f = random_form(&mut rng, 3);
        let grad = f.gradient();
        for _ in 0..10 {
            let x = complex_normal_vec(&mut rng, 9);
            let mut u = complex_normal_vec(&mut rng, 9);
            let nu = linalg::norm(&u);
            u.iter_mut().for_each(|v| *v /= nu);
            let h = 1e-5;
            let plus: Vec<Complex64> = x.iter().zip(&u).map(|(a, b)| a + b * h).collect();
            let minus: Vec<Complex64> = x.iter().zip(&u).map(|(a, b)| a - b * h).collect();
            let fd = (f.evaluate(&plus) - f.evaluate(&minus)) / (2.0 * h);
            let exact: Complex64 = evaluate_gradient(&grad, &x).iter().zip(&u).map(|(g, v)| g * v).sum();
            assert!((fd - exact).norm() <= 1e-6, "fd {fd} vs {exact}");
        }
    }

    #[test]
    fn restrict_examples() {
        let e = |i: usize| {
            let mut v = vec![Complex64::zero(); 9];
            v[i] = c(1.0, 0.0);
            v
        };
        let basis = vec![e(0), e(1)];
        let r = CPoly::var(9, 0).restrict_to_span(&basis).unwrap();
        assert_eq!(r, MultiPoly::var(2, 0));
        assert!(CPoly::zero(9).restrict_to_span(&basis).unwrap().is_zero());
        let degenerate = vec![e(0), e(0)];
        assert!(matches!(
            CPoly::var(9, 0).restrict_to_span(&degenerate),
            Err(PolyError::DegenerateBasis { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn restriction_commutes_with_evaluation() {
        let mut rng = seeded(6);
        let f = random_form(&mut rng, 3);
        let basis: Vec<Vec<Complex64>> = (0..4).map(|_| complex_normal_vec(&mut rng, 9)).collect();
        let r = f.restrict_to_span(&basis).unwrap();
        let t = complex_normal_vec(&mut rng, 4);
        let x: Vec<Complex64> = (0..9).map(|i| (0..4).map(|j| t[j] * basis[j][i]).sum()).collect();
        assert!((r.evaluate(&t) - f.evaluate(&x)).norm() < 1e-10 * f.term_scale(&x));
    }

    #[test]
    fn along_line_matches_evaluation() {
        let mut rng = seeded(7);
        let f = random_form(&mut rng, 4);
        let p0 = complex_normal_vec(&mut rng, 9);
        let p1 = complex_normal_vec(&mut rng, 9);
        let coeffs = f.along_line(&p0, &p1);
        assert_eq!(coeffs.len(), 5);
        let t = c(0.3, -0.8);
        let x: Vec<Complex64> = p0.iter().zip(&p1).map(|(a, b)| a + t * b).collect();
        assert!((linalg::horner(&coeffs, t) - f.evaluate(&x)).norm() < 1e-10 * f.term_scale(&x));
    }

    #[test]
    fn exact_rank_detects_dependence() {
        let w = CycloScalar::omega();
        let one = CycloScalar::from_integer(1);
        let rows = vec![
            vec![one.clone(), w.clone()],
            vec![w.clone(), &w * &w],
        ];
        assert_eq!(exact_rank(&rows), 1);
        let rows = vec![vec![one.clone(), w.clone()], vec![one.clone(), one]];
        assert_eq!(exact_rank(&rows), 2);
    }

    #[test]
    fn normalized_projectively_is_scale_free() {
        let mut rng = seeded(8);
        let f = random_form(&mut rng, 2);
        let g = f.scale(&c(-2.0, 0.5));
        let (nf, ng) = (f.normalized_projectively(), g.normalized_projectively());
        assert!((nf.coefficient_norm() - 1.0).abs() < 1e-14);
        assert!((&nf - &ng).coefficient_norm() < 1e-14);
        let (_, lead) = nf.leading_term().unwrap();
        assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
    }
}
