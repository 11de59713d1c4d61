//! Genus-2 Riemann theta functions, the nine level-3 theta coordinates and
//! the embedding of the Jacobian into P⁸ they define.
//!
//! Coordinates are indexed by σ ∈ (Z/3)², stored at position `3·σ₀ + σ₁`.
//! The level-3 basis is θ[σ/3, 0](3z, 3τ): lattice translations act on it by
//! a σ-independent factor, translation by q/3 multiplies coordinate σ by
//! ω^{σ·q}, and translation by τp/3 moves coordinate σ+p into slot σ.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Float, Zero};
use rand::Rng;

use crate::linalg;
use crate::rng::complex_normal;

/// Default absolute series tolerance, relative to the largest term.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// Residual bound `|θ(z − a)| / Σ|terms|` accepted for theta-divisor points.
pub const DIVISOR_RESIDUAL: f64 = 1e-13;

/// Two theta-divisor points closer than this modulo the lattice are the same.
pub const DEDUP_DISTANCE: f64 = 1e-6;

const SCAN_GRID: usize = 8;
const NEWTON_STEPS: usize = 60;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ThetaError {
    #[error("period matrix is not symmetric")]
    NotSymmetric,
    #[error("imaginary part of the period matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("tolerance {0} is outside (0, 1)")]
    InvalidTolerance(f64),
    #[error("projective point has all coordinates zero")]
    ZeroVector,
    #[error("all level-3 theta values vanish numerically")]
    NearBaseLocus,
    #[error("only {found} of {requested} theta-divisor points converged")]
    RootFindingFailed { found: usize, requested: usize },
}

pub fn sigma_index(sigma: [u8; 2]) -> usize {
    3 * (sigma[0] % 3) as usize + (sigma[1] % 3) as usize
}

pub fn sigma_of(index: usize) -> [u8; 2] {
    [(index / 3) as u8, (index % 3) as u8]
}

/// Symmetric 2×2 complex matrix with positive-definite imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    tau: [[Complex64; 2]; 2],
    imag_inv: [[f64; 2]; 2],
}

impl PeriodMatrix {
    pub fn new(tau: [[Complex64; 2]; 2]) -> Result<Self, ThetaError> {
        if tau[0][1] != tau[1][0] {
            return Err(ThetaError::NotSymmetric);
        }
        let y = [[tau[0][0].im, tau[0][1].im], [tau[1][0].im, tau[1][1].im]];
        let det = y[0][0] * y[1][1] - y[0][1] * y[1][0];
        if !(y[0][0] > 0.0 && det > 0.0) || !det.is_finite() {
            return Err(ThetaError::NotPositiveDefinite);
        }
        let imag_inv = [[y[1][1] / det, -y[0][1] / det], [-y[1][0] / det, y[0][0] / det]];
        Ok(Self { tau, imag_inv })
    }

    /// The period matrix used by default runs: generic, with moderate
    /// imaginary part so that all nine level-3 coordinates are comparable.
    pub fn reference() -> Self {
        let off = Complex64::new(0.21, 0.37);
        Self::new([
            [Complex64::new(0.13, 1.1), off],
            [off, Complex64::new(-0.17, 0.93)],
        ])
        .expect("reference period matrix is valid")
    }

    pub fn tau(&self) -> [[Complex64; 2]; 2] {
        self.tau
    }

    pub fn imag(&self) -> [[f64; 2]; 2] {
        [[self.tau[0][0].im, self.tau[0][1].im], [self.tau[1][0].im, self.tau[1][1].im]]
    }

    /// Smallest eigenvalue of Im(τ).
    pub fn min_imag_eigenvalue(&self) -> f64 {
        let y = self.imag();
        let mean = 0.5 * (y[0][0] + y[1][1]);
        let half_diff = 0.5 * (y[0][0] - y[1][1]);
        mean - (half_diff * half_diff + y[0][1] * y[0][1]).sqrt()
    }

    /// τ·v for a real or complex 2-vector.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.tau[0][0] * v[0] + self.tau[0][1] * v[1],
            self.tau[1][0] * v[0] + self.tau[1][1] * v[1],
        ]
    }

    /// The point `x + τ·y` of C² for real `x`, `y`.
    pub fn point(&self, x: [f64; 2], y: [f64; 2]) -> JacobianPoint {
        let ty = self.apply([Complex64::new(y[0], 0.0), Complex64::new(y[1], 0.0)]);
        JacobianPoint { z: [ty[0] + x[0], ty[1] + x[1]] }
    }

    /// Real coordinates `(x, y)` with `z = x + τ·y`.
    pub fn real_coordinates(&self, z: &JacobianPoint) -> ([f64; 2], [f64; 2]) {
        let im = [z.z[0].im, z.z[1].im];
        let y = mat_vec(self.imag_inv, im);
        let x = [
            z.z[0].re - self.tau[0][0].re * y[0] - self.tau[0][1].re * y[1],
            z.z[1].re - self.tau[1][0].re * y[0] - self.tau[1][1].re * y[1],
        ];
        (x, y)
    }

    /// Representative of `z` modulo Z² + τZ² in the half-open unit
    /// parallelogram.
    pub fn reduce(&self, z: &JacobianPoint) -> JacobianPoint {
        let (x, y) = self.real_coordinates(z);
        self.point(x.map(|v| v - v.floor()), y.map(|v| v - v.floor()))
    }

    /// Length of the shortest representative of `z₁ − z₂` modulo the lattice.
    pub fn lattice_distance(&self, z1: &JacobianPoint, z2: &JacobianPoint) -> f64 {
        let diff = JacobianPoint { z: [z1.z[0] - z2.z[0], z1.z[1] - z2.z[1]] };
        let (x, y) = self.real_coordinates(&diff);
        let mut best = f64::INFINITY;
        let y0 = y.map(|v| v - v.round());
        let x0 = x.map(|v| v - v.round());
        // the rounded representative may sit across a cell boundary
        for dy in [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            for dx in [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
                let p = self.point([x0[0] + dx[0], x0[1] + dx[1]], [y0[0] + dy[0], y0[1] + dy[1]]);
                best = best.min(linalg::norm(&p.z));
            }
        }
        best
    }

    /// Uniformly random point of the fundamental parallelogram.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> JacobianPoint {
        let x = [rng.random::<f64>(), rng.random::<f64>()];
        let y = [rng.random::<f64>(), rng.random::<f64>()];
        self.point(x, y)
    }
}

fn mat_vec(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Point of the universal cover C² of the Jacobian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobianPoint {
    pub z: [Complex64; 2],
}

impl JacobianPoint {
    pub fn new(z0: Complex64, z1: Complex64) -> Self {
        Self { z: [z0, z1] }
    }

    pub fn origin() -> Self {
        Self { z: [Complex64::zero(); 2] }
    }

    pub fn translate(&self, by: [Complex64; 2]) -> Self {
        Self { z: [self.z[0] + by[0], self.z[1] + by[1]] }
    }

    pub fn negate(&self) -> Self {
        Self { z: [-self.z[0], -self.z[1]] }
    }
}

/// Nine homogeneous coordinates indexed by σ ∈ (Z/3)².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectivePoint9 {
    coords: [Complex64; 9],
    normalized: bool,
}

impl ProjectivePoint9 {
    /// Wraps raw coordinates without rescaling.
    pub fn new(coords: [Complex64; 9]) -> Result<Self, ThetaError> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(ThetaError::ZeroVector);
        }
        Ok(Self { coords, normalized: false })
    }

    /// Rescales so that the coordinate of largest modulus equals 1.
    pub fn normalized(coords: [Complex64; 9]) -> Result<Self, ThetaError> {
        let p = Self::new(coords)?;
        Ok(p.normalize())
    }

    pub fn normalize(&self) -> Self {
        if self.normalized {
            return *self;
        }
        let pivot = self
            .coords
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nine coordinates");
        Self { coords: self.coords.map(|c| c / pivot), normalized: true }
    }

    pub fn coords(&self) -> &[Complex64; 9] {
        &self.coords
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Sine of the angle between the two points as lines in C⁹.
    pub fn distance(&self, other: &ProjectivePoint9) -> f64 {
        linalg::projective_distance(&self.coords, &other.coords)
    }
}

impl AsRef<[Complex64]> for ProjectivePoint9 {
    fn as_ref(&self) -> &[Complex64] {
        &self.coords
    }
}

/// Value of a truncated lattice series and the sum of the moduli of its
/// terms, the scale against which its rounding and truncation errors are
/// measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub magnitude: f64,
}

/// Smallest `R ≥ 1` with `exp(−πλ(R−1)²)·(8R + C) < tol`, where
/// `C = 8/(1 − e^{−πλ})²` and `λ` bounds the Gaussian decay of the series.
fn radius_for_decay(lambda: f64, tol: f64) -> u32 {
    let c = 8.0 / (1.0 - (-PI * lambda).exp()).powi(2);
    let mut r = 1u32;
    loop {
        let rf = r as f64;
        let bound = (-PI * lambda * (rf - 1.0).powi(2)).exp() * (8.0 * rf + c);
        if bound < tol || r >= 100_000 {
            return r;
        }
        r += 1;
    }
}

fn check_tol(tol: f64) -> Result<(), ThetaError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(ThetaError::InvalidTolerance(tol))
    }
}

/// Truncation radius for the level-3 series: the sum over `‖n‖∞ ≤ R` around
/// the Gaussian peak misses at most `tol` times the peak term. Decay is
/// governed by the smallest eigenvalue of `3·Im(τ)`.
pub fn truncation_radius(tau: &PeriodMatrix, tol: f64) -> Result<u32, ThetaError> {
    check_tol(tol)?;
    Ok(radius_for_decay(3.0 * tau.min_imag_eigenvalue(), tol))
}

/// Sums `exp(πi·s·vᵀτv + 2πi·s·vᵀz)` over `v = n + shift`, `‖n − n₀‖∞ ≤ R`,
/// where `n₀` is the lattice point nearest the peak of the Gaussian.
/// Optionally also returns the derivative along direction `w`.
fn lattice_series(
    tau: &PeriodMatrix,
    level: f64,
    shift: [f64; 2],
    z: &JacobianPoint,
    radius: u32,
    direction: Option<[Complex64; 2]>,
) -> (SeriesValue, Complex64) {
    let peak = mat_vec(tau.imag_inv, [z.z[0].im, z.z[1].im]);
    let n0 = [(-peak[0] - shift[0]).round(), (-peak[1] - shift[1]).round()];
    let t = tau.tau;
    let i_pi = Complex64::new(0.0, PI * level);
    let r = radius as i64;
    let mut value = Complex64::zero();
    let mut deriv = Complex64::zero();
    let mut magnitude = 0.0;
    for a in -r..=r {
        let v0 = n0[0] + a as f64 + shift[0];
        for b in -r..=r {
            let v1 = n0[1] + b as f64 + shift[1];
            let quad = t[0][0] * (v0 * v0) + t[0][1] * (2.0 * v0 * v1) + t[1][1] * (v1 * v1);
            let lin = z.z[0] * v0 + z.z[1] * v1;
            let term = (i_pi * (quad + lin * 2.0)).exp();
            value += term;
            magnitude += term.norm();
            if let Some(w) = direction {
                deriv += term * i_pi * 2.0 * (w[0] * v0 + w[1] * v1);
            }
        }
    }
    (SeriesValue { value, magnitude }, deriv)
}

fn level1_radius(tau: &PeriodMatrix, tol: f64) -> u32 {
    radius_for_decay(tau.min_imag_eigenvalue(), tol)
}

/// Riemann theta θ(z, τ) = Σ_{n∈Z²} exp(πi nᵀτn + 2πi nᵀz), with its term
/// magnitude.
pub fn riemann_theta_series(z: &JacobianPoint, tau: &PeriodMatrix, tol: f64) -> SeriesValue {
    lattice_series(tau, 1.0, [0.0; 2], z, level1_radius(tau, tol), None).0
}

pub fn riemann_theta(z: &JacobianPoint, tau: &PeriodMatrix, tol: f64) -> Complex64 {
    riemann_theta_series(z, tau, tol).value
}

/// θ[σ/3, 0](3z, 3τ) with its term magnitude.
pub fn theta_level3_series(sigma: [u8; 2], z: &JacobianPoint, tau: &PeriodMatrix, tol: f64) -> SeriesValue {
    let shift = [(sigma[0] % 3) as f64 / 3.0, (sigma[1] % 3) as f64 / 3.0];
    let radius = radius_for_decay(3.0 * tau.min_imag_eigenvalue(), tol);
    lattice_series(tau, 3.0, shift, z, radius, None).0
}

pub fn theta_level3(sigma: [u8; 2], z: &JacobianPoint, tau: &PeriodMatrix, tol: f64) -> Complex64 {
    theta_level3_series(sigma, z, tau, tol).value
}

/// The nine unnormalized level-3 theta values at `z`.
pub fn level3_vector(z: &JacobianPoint, tau: &PeriodMatrix, tol: f64) -> ([Complex64; 9], f64) {
    let mut out = [Complex64::zero(); 9];
    let mut scale: f64 = 0.0;
    for (i, slot) in out.iter_mut().enumerate() {
        let s = theta_level3_series(sigma_of(i), z, tau, tol);
        *slot = s.value;
        scale = scale.max(s.magnitude);
    }
    (out, scale)
}

/// Image of `z` in P⁸ under the level-3 theta coordinates, normalized.
pub fn embed_point(z: &JacobianPoint, tau: &PeriodMatrix, tol: f64) -> Result<ProjectivePoint9, ThetaError> {
    check_tol(tol)?;
    let (coords, scale) = level3_vector(z, tau, tol);
    let max = coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(max > 1e3 * tol * scale) {
        return Err(ThetaError::NearBaseLocus);
    }
    ProjectivePoint9::normalized(coords)
}

/// Points `z` of `X_a = Θ + a`, i.e. zeros of `θ(z − a)`, found along random
/// complex lines: a coarse 8×8 scan picks a start, damped Newton in one
/// complex variable refines it. Results are reduced so that `z − a` lies in
/// the fundamental parallelogram and are pairwise distinct modulo the
/// lattice.
pub fn sample_theta_divisor<R: Rng + ?Sized>(
    tau: &PeriodMatrix,
    a: [Complex64; 2],
    count: usize,
    rng: &mut R,
    tol: f64,
) -> Result<Vec<JacobianPoint>, ThetaError> {
    check_tol(tol)?;
    let accept = tol.max(DIVISOR_RESIDUAL);
    let radius = level1_radius(tau, tol.min(DEFAULT_SERIES_TOL));
    let mut found: Vec<JacobianPoint> = Vec::with_capacity(count);
    let max_lines = 64 * count + 64;
    for _ in 0..max_lines {
        if found.len() == count {
            break;
        }
        let base = tau.random_point(rng);
        let mut dir = [complex_normal(rng), complex_normal(rng)];
        let n = linalg::norm(&dir);
        dir.iter_mut().for_each(|d| *d /= n);
        let Some(w) = newton_on_line(tau, &base, dir, radius, accept) else {
            continue;
        };
        let w = tau.reduce(&w);
        if found
            .iter()
            .any(|p| tau.lattice_distance(&p.translate([-a[0], -a[1]]), &w) < DEDUP_DISTANCE)
        {
            continue;
        }
        found.push(w.translate(a));
    }
    if found.len() < count {
        return Err(ThetaError::RootFindingFailed { found: found.len(), requested: count });
    }
    Ok(found)
}

/// Zero of `s ↦ θ(base + s·dir)` near the best point of a coarse scan.
fn newton_on_line(
    tau: &PeriodMatrix,
    base: &JacobianPoint,
    dir: [Complex64; 2],
    radius: u32,
    accept: f64,
) -> Option<JacobianPoint> {
    let at = |s: Complex64| base.translate([dir[0] * s, dir[1] * s]);
    let eval = |s: Complex64| lattice_series(tau, 1.0, [0.0; 2], &at(s), radius, Some(dir));
    let rel = |v: &SeriesValue| v.value.norm() / v.magnitude;

    let mut best = (f64::INFINITY, Complex64::zero());
    for i in 0..SCAN_GRID {
        for j in 0..SCAN_GRID {
            let s = Complex64::new(
                (i as f64 + 0.5) / SCAN_GRID as f64 - 0.5,
                (j as f64 + 0.5) / SCAN_GRID as f64 - 0.5,
            );
            let r = rel(&eval(s).0);
            if r < best.0 {
                best = (r, s);
            }
        }
    }
    let mut s = best.1;
    let (mut cur, mut d) = eval(s);
    for _ in 0..NEWTON_STEPS {
        if rel(&cur) <= accept * 0.01 {
            break;
        }
        if d.norm() == 0.0 {
            return None;
        }
        let mut step = cur.value / d;
        let mut accepted = false;
        for _ in 0..12 {
            let (next, nd) = eval(s - step);
            if next.value.norm() < cur.value.norm() {
                s -= step;
                cur = next;
                d = nd;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || s.norm() > 10.0 {
            break;
        }
    }
    (rel(&cur) <= accept).then(|| at(s))
}
