//! Integer bookkeeping: plane-curve nodes, arithmetic genera of complete
//! intersections, an adjunction bound on a blown-up sextic surface, the
//! enumeration of weighted degree decompositions, and the restriction of
//! invariant cubics to the even eigenspace of the involution.

use alloc::vec::Vec;

use num_integer::Integer;

use crate::cyclo::CycloScalar;
use crate::heisenberg::{involution_fixed_spaces, semi_invariant_forms, CharacterLabel};
use crate::poly::{exact_rank, Monomial, PolyError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CaseError {
    #[error("plane curves of degree {0} are not covered; need degree at least 3")]
    DegreeTooSmall(u32),
    #[error("genus {genus} exceeds the arithmetic genus {max} of a plane curve of degree {degree}")]
    NegativeNodes { degree: u32, genus: u32, max: u32 },
    #[error("exceptional multiplicity {value} at index {index} is below 2")]
    InvalidClass { index: usize, value: i64 },
    #[error("a complete intersection curve in P^{ambient} needs {expected} degrees, got {got}")]
    WrongCodimension { ambient: u32, expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Nodes of an irreducible nodal plane curve of degree `d` and geometric
/// genus `g`: `(d−1)(d−2)/2 − g`.
pub fn plane_curve_nodes(degree: u32, genus: u32) -> Result<u32, CaseError> {
    if degree < 3 {
        return Err(CaseError::DegreeTooSmall(degree));
    }
    let max = (degree - 1) * (degree - 2) / 2;
    max.checked_sub(genus).ok_or(CaseError::NegativeNodes { degree, genus, max })
}

/// Arithmetic genus of a complete-intersection curve in `P^n` cut out by
/// hypersurfaces of the given degrees: `2p_a − 2 = (Π dᵢ)(Σ dᵢ − n − 1)`.
pub fn complete_intersection_genus(degrees: &[u32], ambient: u32) -> Result<i64, CaseError> {
    let expected = ambient.saturating_sub(1) as usize;
    if degrees.len() != expected || ambient < 2 {
        return Err(CaseError::WrongCodimension { ambient, expected, got: degrees.len() });
    }
    let prod: i64 = degrees.iter().map(|&d| d as i64).product();
    let sum: i64 = degrees.iter().map(|&d| d as i64).sum();
    Ok((prod * (sum - ambient as i64 - 1) + 2) / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConicFiberIncidence {
    pub curve_degree: u32,
    pub curve_genus: i64,
    pub xa_degree: u32,
    pub xa_genus: i64,
    pub conic_degree: u32,
    pub conic_genus: i64,
    /// Points of `X_a ∩ Q`, from `p_a(C) = g(X_a) + g(Q) + k − 1`.
    pub incidence: i64,
}

/// The intersection of three quadrics through `X_a ⊂ P⁴` is a degree-8 curve
/// of arithmetic genus 5 that splits as `X_a` (genus 2, degree 6) plus a
/// residual conic.
pub fn conic_fiber_incidence() -> ConicFiberIncidence {
    let curve_genus = complete_intersection_genus(&[2, 2, 2], 4).expect("three quadrics in P^4");
    let (xa_genus, conic_genus) = (2, 0);
    // X_a is embedded by 3Θ restricted to Θ + a: degree 3·Θ² = 6
    let xa_degree = 6;
    ConicFiberIncidence {
        curve_degree: 8,
        curve_genus,
        xa_degree,
        xa_genus,
        conic_degree: 8 - xa_degree,
        conic_genus,
        incidence: curve_genus - xa_genus - conic_genus + 1,
    }
}

/// `bH − Σ aᵢEᵢ` on a sextic surface blown up at points, with `H² = 6`,
/// `Eᵢ² = −2`, `H·Eᵢ = 0` and canonical class `2H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceClass {
    pub b: i64,
    pub a: Vec<i64>,
}

pub const H_SQUARED: i64 = 6;
pub const E_SQUARED: i64 = -2;
pub const CANONICAL_H: i64 = 2;
pub const EXCEPTIONAL_CLASSES: usize = 45;

impl SurfaceClass {
    pub fn new(b: i64, a: Vec<i64>) -> Self {
        Self { b, a }
    }

    /// `6H − Σ a Eᵢ` over all 45 exceptional classes.
    pub fn uniform(b: i64, a: i64) -> Self {
        Self { b, a: alloc::vec![a; EXCEPTIONAL_CLASSES] }
    }

    pub fn intersect(&self, other: &SurfaceClass) -> i64 {
        let exc: i64 = self.a.iter().zip(&other.a).map(|(x, y)| x * y).sum();
        H_SQUARED * self.b * other.b + E_SQUARED * exc
    }

    /// `(K + D)·D`, without any validity check.
    pub fn adjunction_value(&self) -> i64 {
        let k_plus_d = SurfaceClass { b: self.b + CANONICAL_H, a: self.a.clone() };
        k_plus_d.intersect(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adjunction {
    /// `2p_a − 2 = (K + D)·D`.
    pub twice_genus_minus_two: i64,
    pub genus: i64,
}

/// Arithmetic genus of `D` by adjunction; every multiplicity must be at least
/// 2, so that the value bounds every admissible class with the same `b`.
pub fn adjunction_bound(class: &SurfaceClass) -> Result<Adjunction, CaseError> {
    if let Some((index, &value)) = class.a.iter().enumerate().find(|(_, &v)| v < 2) {
        return Err(CaseError::InvalidClass { index, value });
    }
    let v = class.adjunction_value();
    Ok(Adjunction { twice_genus_minus_two: v, genus: (v + 2).div_euclid(2) })
}

/// Multiset of pairs `(aᵢ, dᵢ)`, largest `dᵢ` first, ties by larger `aᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Decomposition {
    pub parts: Vec<(u64, u64)>,
    /// `gcd` of the `aᵢ`.
    pub gcd: u64,
}

impl Decomposition {
    /// Whether the `aᵢ` share a factor 2 or 3.
    pub fn has_common_factor_2_or_3(&self) -> bool {
        self.gcd.is_multiple_of(2) || self.gcd.is_multiple_of(3)
    }
}

/// All multisets `{(aᵢ, dᵢ)}` with `aᵢ ≥ a_min`, `dᵢ` a positive multiple of
/// `divisor` and `Σ aᵢdᵢ = total`, ordered by size and then by parts.
pub fn enumerate_decompositions(total: u64, divisor: u64, a_min: u64) -> Vec<Decomposition> {
    fn rec(left: u64, divisor: u64, a_min: u64, bound: (u64, u64), cur: &mut Vec<(u64, u64)>, out: &mut Vec<Vec<(u64, u64)>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        let mut d = divisor;
        while d <= left && d <= bound.0 {
            let mut a = a_min;
            while a * d <= left {
                if (d, a) <= bound {
                    cur.push((a, d));
                    rec(left - a * d, divisor, a_min, (d, a), cur, out);
                    cur.pop();
                }
                a += 1;
            }
            d += divisor;
        }
    }
    if total == 0 || divisor == 0 || a_min == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    rec(total, divisor, a_min, (u64::MAX, u64::MAX), &mut Vec::new(), &mut raw);
    let mut out: Vec<Decomposition> = raw
        .into_iter()
        .map(|parts| {
            let gcd = parts.iter().fold(0, |g, &(a, _)| g.gcd(&a));
            Decomposition { parts, gcd }
        })
        .collect();
    out.sort_by(|x, y| x.parts.len().cmp(&y.parts.len()).then_with(|| x.parts.cmp(&y.parts)));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionRank {
    pub rank: usize,
    pub dimension: usize,
}

/// Rank of the restriction map from invariant cubics to cubics on the
/// `+1` eigenspace of the involution, computed exactly.
pub fn even_restriction_rank() -> Result<RestrictionRank, CaseError> {
    let cubics = semi_invariant_forms(3, &CharacterLabel::TRIVIAL).basis;
    let (even, _) = involution_fixed_spaces();
    let monomials = Monomial::all_of_degree(even.len(), 3);
    let rows: Vec<Vec<CycloScalar>> = cubics
        .iter()
        .map(|f| Ok(f.restrict_to_span(&even)?.coefficient_vector(&monomials)))
        .collect::<Result<_, PolyError>>()?;
    Ok(RestrictionRank { rank: exact_rank(&rows), dimension: cubics.len() })
}
