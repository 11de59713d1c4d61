//! Exact intersection numbers in a graded ring given by generators, monomial
//! relations and values on top-degree monomials, computed on a finite étale
//! cover and divided by its degree.

mod parser;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use parser::{parse_expression, parse_presentation};
use parser::{format_monomial, Terms};

/// Presentation of the cover `SU_X(2) × J → U_X(2,0)` shipped with the crate.
pub const SU2XJ_RING: &str = include_str!("../../data/su2xJ.ring");

pub fn su2xj() -> RingPresentation {
    parse_presentation(SU2XJ_RING).expect("shipped ring parses")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChowError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("degree error: {0}")]
    Degree(String),
    #[error("ring has no generator named '{0}'")]
    UnknownGenerator(String),
}

impl ChowError {
    fn parse(line: usize, column: usize, message: String) -> Self {
        ChowError::Parse { line, column, message }
    }
}

/// Linear combination of monomials with rational coefficients; exponent
/// vectors are indexed like the generators of the ring that built it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChowClass {
    terms: Terms,
}

impl ChowClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    fn insert(&mut self, m: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let sum = self.terms.remove(&m).unwrap_or_else(BigRational::zero) + c;
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.insert(m.clone(), v * c);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    generators: Vec<(String, u32)>,
    relations: Vec<Vec<u32>>,
    integrals: Vec<(Vec<u32>, BigRational)>,
    cover: BigInt,
    top_degree: Option<u32>,
}

impl RingPresentation {
    pub fn new(
        generators: Vec<(String, u32)>,
        relations: Vec<Vec<u32>>,
        integrals: Vec<(Vec<u32>, BigRational)>,
        cover: BigInt,
    ) -> Result<Self, ChowError> {
        if generators.is_empty() {
            return Err(ChowError::Degree("no generators declared".into()));
        }
        if !cover.is_positive() {
            return Err(ChowError::Degree("cover degree must be positive".into()));
        }
        let mut ring = Self { generators, relations, integrals: Vec::new(), cover, top_degree: None };
        for (m, value) in integrals {
            let d = ring.degree(&m);
            match ring.top_degree {
                Some(top) if top != d => {
                    return Err(ChowError::Degree(format!(
                        "integral of {} has degree {d}, expected {top}",
                        format_monomial(&ring.generators, &m)
                    )))
                }
                _ => ring.top_degree = Some(d),
            }
            if ring.killed(&m) {
                return Err(ChowError::Degree(format!(
                    "integral assigned to {}, which a relation kills",
                    format_monomial(&ring.generators, &m)
                )));
            }
            if ring.integrals.iter().any(|(n, _)| *n == m) {
                return Err(ChowError::Degree(format!(
                    "integral of {} given twice",
                    format_monomial(&ring.generators, &m)
                )));
            }
            ring.integrals.push((m, value));
        }
        Ok(ring)
    }

    pub fn generators(&self) -> &[(String, u32)] {
        &self.generators
    }

    pub fn cover_degree(&self) -> &BigInt {
        &self.cover
    }

    /// Degree of the monomials carrying integrals, if any are given.
    pub fn top_degree(&self) -> Option<u32> {
        self.top_degree
    }

    pub fn degree(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.generators).map(|(e, (_, d))| e * d).sum()
    }

    fn killed(&self, m: &[u32]) -> bool {
        self.relations.iter().any(|r| r.iter().zip(m).all(|(re, me)| me >= re))
            || self.top_degree.is_some_and(|top| self.degree(m) > top)
    }

    /// Drops monomials divisible by a relation or above the top degree.
    pub fn reduce(&self, class: &ChowClass) -> ChowClass {
        ChowClass { terms: class.terms.iter().filter(|(m, _)| !self.killed(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn constant(&self, c: BigRational) -> ChowClass {
        let mut out = ChowClass::zero();
        out.insert(vec![0; self.generators.len()], c);
        out
    }

    pub fn generator(&self, name: &str) -> Option<ChowClass> {
        let i = self.generators.iter().position(|(n, _)| n == name)?;
        let mut m = vec![0; self.generators.len()];
        m[i] = 1;
        let mut out = ChowClass::zero();
        out.insert(m, BigRational::one());
        Some(self.reduce(&out))
    }

    pub fn mul(&self, a: &ChowClass, b: &ChowClass) -> ChowClass {
        let mut out = ChowClass::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if !self.killed(&m) {
                    out.insert(m, ca * cb);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &ChowClass, e: u32) -> ChowClass {
        let mut out = self.constant(BigRational::one());
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        self.reduce(&out)
    }

    /// `Σ c_m ∫m / cover`; top monomials without a declared value and all
    /// lower-degree terms integrate to zero.
    pub fn integrate(&self, class: &ChowClass) -> BigRational {
        let total = self
            .reduce(class)
            .terms
            .iter()
            .filter_map(|(m, c)| self.integrals.iter().find(|(n, _)| n == m).map(|(_, v)| c * v))
            .fold(BigRational::zero(), |acc, v| acc + v);
        total / BigRational::from_integer(self.cover.clone())
    }

    pub fn format_class(&self, class: &ChowClass) -> String {
        if class.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = class
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mon = format_monomial(&self.generators, m);
                match (mon.as_str(), c.is_one()) {
                    ("1", _) => format!("{c}"),
                    (_, true) => mon,
                    _ => format!("{c}*{mon}"),
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn eval(&self, expr: &str) -> Result<BigRational, ChowError> {
        Ok(self.integrate(&parse_expression(expr, self)?))
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, d) in &self.generators {
            writeln!(f, "gen {name}:{d};")?;
        }
        for r in &self.relations {
            writeln!(f, "rel {};", format_monomial(&self.generators, r))?;
        }
        for (m, v) in &self.integrals {
            writeln!(f, "int {} = {v};", format_monomial(&self.generators, m))?;
        }
        writeln!(f, "cover {};", self.cover)
    }
}

/// One term `C(5,k)·∫[Θ_U]^{5−k}·[π*Θ]^k` of the expansion of `deg(Σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegSigmaTerm {
    pub k: u32,
    pub binomial: BigInt,
    pub integral: BigRational,
    pub contribution: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegSigma {
    pub total: BigRational,
    pub breakdown: Vec<DegSigmaTerm>,
    /// Whether every term with `[π*Θ]^k`, `k ≥ 3`, integrates to zero.
    pub higher_terms_vanish: bool,
}

/// `[Θ_U] = h + 2t` in a ring with generators `h`, `t`.
pub fn theta_u(ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    class_from(ring, "h + 2*t")
}

/// `[π*Θ] = 4t`.
pub fn pullback_theta(ring: &RingPresentation) -> Result<ChowClass, ChowError> {
    class_from(ring, "4*t")
}

fn class_from(ring: &RingPresentation, expr: &str) -> Result<ChowClass, ChowError> {
    for g in ["h", "t"] {
        if ring.generator(g).is_none() {
            return Err(ChowError::UnknownGenerator(g.into()));
        }
    }
    parse_expression(expr, ring)
}

/// `∫ ([Θ_U] + [π*Θ])⁵`, expanded binomially.
pub fn deg_sigma(ring: &RingPresentation) -> Result<DegSigma, ChowError> {
    let (u, p) = (theta_u(ring)?, pullback_theta(ring)?);
    let mut binomial = BigInt::one();
    let mut breakdown = Vec::with_capacity(6);
    for k in 0..=5u32 {
        let integral = ring.integrate(&ring.mul(&ring.pow(&u, 5 - k), &ring.pow(&p, k)));
        let contribution = &integral * BigRational::from_integer(binomial.clone());
        breakdown.push(DegSigmaTerm { k, binomial: binomial.clone(), integral, contribution });
        binomial = binomial * BigInt::from(5 - k) / BigInt::from(k + 1);
    }
    let higher_terms_vanish = breakdown[3..].iter().all(|t| t.integral.is_zero());
    let total = ring.integrate(&ring.pow(&u.add(&p), 5));
    debug_assert_eq!(total, breakdown.iter().fold(BigRational::zero(), |a, t| a + &t.contribution));
    Ok(DegSigma { total, breakdown, higher_terms_vanish })
}

/// `k` with `[n]*Θ₀ ≡ k·Θ₀`: from `∫([n]*Θ₀)² = deg[n]·∫Θ₀² = n⁴·2` and
/// `∫Θ₀² = 2`, `2k² = 2n⁴`. `None` for `n = 0`.
pub fn mult_pullback_coeff(n: i64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let n4 = (n.unsigned_abs() as u128).pow(4);
    let k = n4.sqrt();
    debug_assert_eq!(2 * k * k, 2 * n4);
    u64::try_from(k).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn shipped_ring_parses_and_round_trips() {
        let ring = su2xj();
        assert_eq!(ring.generators().len(), 2);
        assert_eq!(ring.top_degree(), Some(5));
        assert_eq!(*ring.cover_degree(), BigInt::from(16));
        let again = parse_presentation(&ring.to_string()).unwrap();
        assert_eq!(again, ring);
    }

    #[test]
    fn inline_presentation_matches_shipped_file() {
        let text = "gen h:1; gen t:1; rel h^4; rel t^3; int h^3*t^2 = 2; cover 16;";
        assert_eq!(parse_presentation(text).unwrap(), su2xj());
    }

    #[test]
    fn lemma_integrals() {
        let ring = su2xj();
        assert_eq!(ring.eval("(h + 2*t)^5").unwrap(), q(5));
        assert_eq!(ring.eval("(h + 2*t)^4 * (4*t)").unwrap(), q(4));
        assert_eq!(ring.eval("(h + 2*t)^3 * (4*t)^2").unwrap(), q(2));
        assert_eq!(ring.eval("((h+2*t)+4*t)^5").unwrap(), q(45));
        assert_eq!(ring.eval("(h+6*t)^5").unwrap(), q(45));
    }

    #[test]
    fn deg_sigma_breakdown() {
        let d = deg_sigma(&su2xj()).unwrap();
        assert_eq!(d.total, q(45));
        let binomials: Vec<BigInt> = d.breakdown.iter().map(|t| t.binomial.clone()).collect();
        assert_eq!(binomials, [1, 5, 10, 10, 5, 1].map(BigInt::from));
        let integrals: Vec<BigRational> = d.breakdown.iter().map(|t| t.integral.clone()).collect();
        assert_eq!(integrals, [5, 4, 2, 0, 0, 0].map(q));
        assert!(d.higher_terms_vanish);
    }

    #[test]
    fn t_cubed_reduces_to_zero() {
        let ring = su2xj();
        assert!(parse_expression("t^3", &ring).unwrap().is_zero());
        assert!(parse_expression("h*t^3 + h^4", &ring).unwrap().is_zero());
        assert_eq!(ring.eval("(4*t)^3 * h^2").unwrap(), q(0));
    }

    #[test]
    fn pullback_coefficient() {
        assert_eq!(mult_pullback_coeff(2), Some(4));
        assert_eq!(mult_pullback_coeff(1), Some(1));
        assert_eq!(mult_pullback_coeff(-3), Some(9));
        assert_eq!(mult_pullback_coeff(0), None);
        // brute-force integer solve of 2k² = 2·3⁴
        let k = (1u64..).find(|k| 2 * k * k == 2 * 81).unwrap();
        assert_eq!(mult_pullback_coeff(3), Some(k));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_presentation("gen h:1;\nrel h^") {
            Err(ChowError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 6)),
            other => panic!("{other:?}"),
        }
        match parse_presentation("gen h:1; rel h^") {
            Err(ChowError::Parse { line, column, .. }) => assert_eq!((line, column), (1, 15)),
            other => panic!("{other:?}"),
        }
        match parse_presentation("gen h:1;\nrel x^2;") {
            Err(ChowError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_presentation("gen h:1; frob h;"), Err(ChowError::Parse { column: 10, .. })));
        assert!(matches!(parse_presentation("gen h:1 rel h;"), Err(ChowError::Parse { column: 9, .. })));
        assert!(matches!(parse_expression("h +", &su2xj()), Err(ChowError::Parse { column: 4, .. })));
        assert!(matches!(parse_expression("h $ t", &su2xj()), Err(ChowError::Parse { column: 3, .. })));
    }

    #[test]
    fn degree_errors() {
        let text = "gen h:1; gen t:2; int h^3 = 1; int t^2 = 1;";
        assert!(matches!(parse_presentation(text), Err(ChowError::Degree(_))));
        assert!(matches!(parse_presentation("gen h:0;"), Err(ChowError::Degree(_))));
        assert!(matches!(parse_presentation("gen h:1; rel h^2; int h^2 = 1;"), Err(ChowError::Degree(_))));
        let ok = parse_presentation("gen h:1; gen t:2; int h^4 = 1; int t^2 = 3/2;").unwrap();
        assert_eq!(ok.eval("t^2").unwrap(), BigRational::new(BigInt::from(3), BigInt::from(2)));
    }

    #[test]
    fn comments_and_rationals() {
        let ring = parse_presentation("# P^2\ngen H:1; # hyperplane\nint H^2 = 1;").unwrap();
        assert_eq!(ring.eval("(1/2*H - 3*H)^2").unwrap(), BigRational::new(BigInt::from(25), BigInt::from(4)));
        assert_eq!(ring.eval("-H^2").unwrap(), q(-1));
        assert_eq!(*ring.cover_degree(), BigInt::one());
    }

    #[test]
    fn format_class_is_readable() {
        let ring = su2xj();
        let c = parse_expression("(h+2*t)^2", &ring).unwrap();
        assert_eq!(ring.format_class(&c), "h^2 + 4*h*t + 4*t^2");
    }

    fn class() -> impl Strategy<Value = ChowClass> {
        proptest::collection::vec((0u32..5, 0u32..4, -5i64..=5), 0..6).prop_map(|terms| {
            let mut c = ChowClass::zero();
            for (a, b, v) in terms {
                c.insert(vec![a, b], q(v));
            }
            c
        })
    }

    proptest! {
        #[test]
        fn reduction_is_confluent(a in class(), b in class(), c in class()) {
            let ring = su2xj();
            let left = ring.mul(&ring.mul(&a, &b), &c);
            let right = ring.mul(&a, &ring.mul(&b, &c));
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
            prop_assert_eq!(ring.mul(&ring.reduce(&a), &b), ring.mul(&a, &b));
            prop_assert_eq!(ring.reduce(&left), left);
        }

        #[test]
        fn killed_monomials_integrate_to_zero(h in 0u32..8, t in 0u32..8) {
            prop_assume!(h >= 4 || t >= 3);
            let ring = su2xj();
            let expr = format!("h^{h}*t^{t}");
            prop_assert_eq!(ring.eval(&expr).unwrap(), q(0));
        }
    }
}
