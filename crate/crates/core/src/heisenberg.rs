//! The Heisenberg group of level 3 acting on C⁹ through its Schrödinger
//! representation, and exact spaces of semi-invariant forms.
//!
//! `ρ(p, q, k) = ω^{−k}·T_p·D_q` with `(D_q x)_σ = ω^{σ·q} x_σ` and
//! `(T_p x)_σ = x_{σ+p}`. With this sign on the center, ρ is a homomorphism
//! for the law `(p,q,k)(p′,q′,k′) = (p+p′, q+q′, k+k′+q·p′)`, and translation
//! by `τp/3 + q/3` on the Jacobian acts on theta coordinates as `ρ(p, q, 0)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::cyclo::CycloScalar;
use crate::poly::{Coefficient, Monomial, MultiPoly, FORM_SPACE_DIMS, MAX_DEGREE};
use crate::theta::{sigma_index, sigma_of, ProjectivePoint9};

fn dot(a: [u8; 2], b: [u8; 2]) -> u8 {
    ((a[0] as u32 * b[0] as u32 + a[1] as u32 * b[1] as u32) % 3) as u8
}

fn add(a: [u8; 2], b: [u8; 2]) -> [u8; 2] {
    [(a[0] + b[0]) % 3, (a[1] + b[1]) % 3]
}

fn neg(a: [u8; 2]) -> [u8; 2] {
    [(3 - a[0]) % 3, (3 - a[1]) % 3]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisenbergElement {
    pub p: [u8; 2],
    pub q: [u8; 2],
    pub k: u8,
}

impl HeisenbergElement {
    pub const IDENTITY: HeisenbergElement = HeisenbergElement { p: [0, 0], q: [0, 0], k: 0 };

    /// Reduces all components modulo 3.
    pub fn new(p: [i64; 2], q: [i64; 2], k: i64) -> Self {
        let r = |v: i64| v.rem_euclid(3) as u8;
        Self { p: [r(p[0]), r(p[1])], q: [r(q[0]), r(q[1])], k: r(k) }
    }

    pub fn translation(p: [u8; 2], q: [u8; 2]) -> Self {
        Self::new([p[0] as i64, p[1] as i64], [q[0] as i64, q[1] as i64], 0)
    }

    pub fn central(k: i64) -> Self {
        Self::new([0, 0], [0, 0], k)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            p: add(self.p, other.p),
            q: add(self.q, other.q),
            k: (self.k + other.k + dot(self.q, other.p)) % 3,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { p: neg(self.p), q: neg(self.q), k: (dot(self.q, self.p) + 3 - self.k) % 3 }
    }

    pub fn is_central(&self) -> bool {
        self.p == [0, 0] && self.q == [0, 0]
    }

    /// Pure-p and pure-q generators.
    pub fn generators() -> [Self; 4] {
        [
            Self::translation([1, 0], [0, 0]),
            Self::translation([0, 1], [0, 0]),
            Self::translation([0, 0], [1, 0]),
            Self::translation([0, 0], [0, 1]),
        ]
    }

    /// All 243 elements, ordered by `(p, q, k)`.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(243);
        for i in 0..81u8 {
            for k in 0..3 {
                out.push(Self { p: [i / 27, (i / 9) % 3], q: [(i / 3) % 3, i % 3], k });
            }
        }
        out
    }

    /// One representative `(p, q, 0)` of each coset of the center.
    pub fn coset_representatives() -> Vec<Self> {
        Self::all().into_iter().filter(|g| g.k == 0).collect()
    }
}

impl fmt::Display for HeisenbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}{}, q={}{}, k={})", self.p[0], self.p[1], self.q[0], self.q[1], self.k)
    }
}

/// Character `(p, q, k) ↦ ω^{a·p + b·q}` of the abelianization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterLabel {
    pub a: [u8; 2],
    pub b: [u8; 2],
}

impl CharacterLabel {
    pub const TRIVIAL: CharacterLabel = CharacterLabel { a: [0, 0], b: [0, 0] };

    pub fn new(a: [u8; 2], b: [u8; 2]) -> Self {
        Self { a: [a[0] % 3, a[1] % 3], b: [b[0] % 3, b[1] % 3] }
    }

    pub fn all() -> Vec<Self> {
        (0..81u8)
            .map(|i| Self { a: [i / 27, (i / 9) % 3], b: [(i / 3) % 3, i % 3] })
            .collect()
    }

    /// Exponent `e` with `χ(g) = ω^e`; the center is in the kernel.
    pub fn exponent(&self, g: &HeisenbergElement) -> u8 {
        (dot(self.a, g.p) + dot(self.b, g.q)) % 3
    }

    pub fn is_trivial(&self) -> bool {
        *self == Self::TRIVIAL
    }
}

impl fmt::Display for CharacterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.a[0], self.a[1], self.b[0], self.b[1])
    }
}

/// `ρ(g)·x`.
pub fn act_on_vector<C: Coefficient>(g: &HeisenbergElement, x: &[C; 9]) -> [C; 9] {
    core::array::from_fn(|i| {
        let src = add(sigma_of(i), g.p);
        let e = dot(src, g.q) as i64 - g.k as i64;
        C::omega_pow(e) * x[sigma_index(src)].clone()
    })
}

/// `ρ(g)^{−T}·y`, the action on the dual space.
pub fn act_contragredient<C: Coefficient>(g: &HeisenbergElement, y: &[C; 9]) -> [C; 9] {
    let dual = HeisenbergElement { p: g.p, q: neg(g.q), k: (3 - g.k) % 3 };
    act_on_vector(&dual, y)
}

/// Projective action on points; normalized inputs give normalized outputs.
pub fn act_on_point(g: &HeisenbergElement, x: &ProjectivePoint9) -> ProjectivePoint9 {
    let moved = ProjectivePoint9::new(act_on_vector(g, x.coords())).expect("ρ(g) is invertible");
    if x.is_normalized() {
        moved.normalize()
    } else {
        moved
    }
}

/// `F ∘ ρ(g)^{−1}`: monomial `x^e` goes to `ω^{d·k − q·Σ e_σ σ}·x^{e′}` with
/// `e′_τ = e_{τ+p}`.
///
/// Panics if `F` is not a form in nine variables.
pub fn act_on_form<C: Coefficient>(g: &HeisenbergElement, f: &MultiPoly<C>) -> MultiPoly<C> {
    assert_eq!(f.nvars(), 9, "Heisenberg forms live in nine variables");
    f.map_monomials(|m| {
        let (moved, e) = act_on_monomial(g, m);
        (moved, C::omega_pow(e as i64))
    })
}

fn act_on_monomial(g: &HeisenbergElement, m: Monomial) -> (Monomial, u8) {
    let e = m.exponents();
    let shifted: [u8; 9] = core::array::from_fn(|t| e[sigma_index(add(sigma_of(t), g.p))]);
    let mut weight = [0u32; 2];
    for (i, &ei) in e.iter().enumerate() {
        let s = sigma_of(i);
        weight[0] += ei as u32 * s[0] as u32;
        weight[1] += ei as u32 * s[1] as u32;
    }
    let qw = (weight[0] * g.q[0] as u32 + weight[1] * g.q[1] as u32) % 3;
    let phase = ((m.degree() * g.k as u32) % 3 + 3 - qw) % 3;
    let moved = Monomial::from_exponents(&shifted).expect("permutation preserves degree");
    (moved, phase as u8)
}

/// Involution `x_σ ↦ x_{−σ}`.
pub fn apply_involution<C: Clone>(x: &[C; 9]) -> [C; 9] {
    core::array::from_fn(|i| x[sigma_index(neg(sigma_of(i)))].clone())
}

/// Representatives σ of the four pairs `{σ, −σ}` with σ ≠ 0.
const PAIR_REPS: [[u8; 2]; 4] = [[0, 1], [1, 0], [1, 1], [1, 2]];

/// Bases of the `+1` and `−1` eigenspaces of the involution: `e₀₀` and the
/// four sums `e_σ + e_{−σ}`, then the four differences `e_σ − e_{−σ}`.
pub fn involution_fixed_spaces() -> (Vec<Vec<CycloScalar>>, Vec<Vec<CycloScalar>>) {
    let unit = |entries: &[(usize, i64)]| {
        let mut v = alloc::vec![CycloScalar::zero(); 9];
        for &(i, c) in entries {
            v[i] = CycloScalar::from_integer(c);
        }
        v
    };
    let mut even = alloc::vec![unit(&[(0, 1)])];
    let mut odd = Vec::with_capacity(4);
    for s in PAIR_REPS {
        let (i, j) = (sigma_index(s), sigma_index(neg(s)));
        even.push(unit(&[(i, 1), (j, 1)]));
        odd.push(unit(&[(i, 1), (j, -1)]));
    }
    (even, odd)
}

/// `(1/243)·Σ_g χ(g)^{−1}·act(g, F)` over the whole group, exactly.
pub fn reynolds(f: &MultiPoly<CycloScalar>, chi: &CharacterLabel) -> MultiPoly<CycloScalar> {
    let group = HeisenbergElement::all();
    let mut out = MultiPoly::zero(f.nvars());
    for (m, c) in f.terms() {
        let image = projected_monomial(*m, chi, &group);
        out = &out + &image.scale(c);
    }
    out
}

/// Exact image of a single monomial under the Reynolds projector. Phases
/// are tallied as integer counts of ω⁰, ω¹, ω² per target monomial.
fn projected_monomial(m: Monomial, chi: &CharacterLabel, group: &[HeisenbergElement]) -> MultiPoly<CycloScalar> {
    let mut counts: BTreeMap<Monomial, [i64; 3]> = BTreeMap::new();
    for g in group {
        let (moved, e) = act_on_monomial(g, m);
        let phase = (e + 3 - chi.exponent(g)) % 3;
        counts.entry(moved).or_insert([0; 3])[phase as usize] += 1;
    }
    let n = BigInt::from(group.len());
    let terms = counts.into_iter().map(|(mon, [c0, c1, c2])| {
        // c0 + c1·ω + c2·ω² with ω² = −1 − ω
        let a = BigRational::new(BigInt::from(c0 - c2), n.clone());
        let b = BigRational::new(BigInt::from(c1 - c2), n.clone());
        (mon, CycloScalar::new(a, b))
    });
    MultiPoly::from_terms(9, terms).expect("nine variables")
}

/// Why a semi-invariant space is forced to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// The center acts on degree-`d` forms by `ω^{−d·k}`, which no character
    /// of the abelianization matches unless `3 | d`.
    CentralCharacter { degree: u32 },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::CentralCharacter { degree } => {
                write!(f, "center acts nontrivially on degree-{degree} forms")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiInvariantSpace {
    pub degree: u32,
    pub character: CharacterLabel,
    /// Orbit sums with leading coefficient 1, in canonical monomial order.
    pub basis: Vec<MultiPoly<CycloScalar>>,
    pub obstruction: Option<Obstruction>,
}

impl SemiInvariantSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Exact basis of `{F of degree d : act(g, F) = χ(g)·F for all g}`.
///
/// Panics unless `1 ≤ d ≤ 6`.
pub fn semi_invariant_forms(degree: u32, chi: &CharacterLabel) -> SemiInvariantSpace {
    assert!((1..=MAX_DEGREE).contains(&degree), "degree {degree} outside 1..=6");
    let mut space = SemiInvariantSpace { degree, character: *chi, basis: Vec::new(), obstruction: None };
    if !degree.is_multiple_of(3) {
        space.obstruction = Some(Obstruction::CentralCharacter { degree });
        return space;
    }
    // with the center acting trivially the 81 coset representatives suffice
    let cosets = HeisenbergElement::coset_representatives();
    let mut covered: BTreeSet<Monomial> = BTreeSet::new();
    for m in Monomial::all_of_degree(9, degree) {
        if covered.contains(&m) {
            continue;
        }
        for g in &cosets {
            covered.insert(act_on_monomial(g, m).0);
        }
        let image = projected_monomial(m, chi, &cosets);
        let Some((_, lead)) = image.leading_term() else {
            continue;
        };
        let inv = lead.inv().expect("nonzero leading coefficient");
        space.basis.push(image.scale(&inv));
    }
    debug_assert!(space.basis.len() <= FORM_SPACE_DIMS[degree as usize]);
    space
}
