//! End-to-end verification: every check becomes one [`ClaimReport`].

use std::time::Instant;

use coble_core::cases::{self, Decomposition, SurfaceClass};
use coble_core::chow;
use coble_core::cyclo::CycloScalar;
use coble_core::dual::{self, DualMap, DualPoint9};
use coble_core::fit::{self, FormFit, InvariantFit};
use coble_core::heisenberg::{
    act_contragredient, act_on_point, reynolds, semi_invariant_forms, CharacterLabel, HeisenbergElement,
};
use coble_core::linalg;
use coble_core::poly::{self, Monomial, MultiPoly};
use coble_core::rng::{stage_rng, LabRng};
use coble_core::theta::{embed_point, sample_theta_divisor, JacobianPoint, PeriodMatrix, ProjectivePoint9};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{ClaimReport, Report};

pub const NULLITY_GAP: f64 = 1e3;
pub const SINGULAR_ON_J: f64 = 1e-8;
pub const SMOOTH_FLOOR: f64 = 1e-3;
pub const PARTIALS_ANGLE: f64 = 1e-6;
pub const SPAN_CONTAINMENT: f64 = 1e-8;
pub const SEXTIC_RESIDUAL: f64 = 1e-7;
pub const SIGMA_GRADIENT: f64 = 1e-6;
pub const EQUIVARIANCE: f64 = 1e-9;
pub const DISTINCT_ANGLE: f64 = 0.01;
pub const INVARIANT_SEXTICS: usize = 43;

/// The expected listing of weighted decompositions `Σ aᵢdᵢ = 36`, grouped by
/// the number of parts.
pub const EXPECTED_DECOMPOSITIONS: [&[(u64, u64)]; 6] = [
    &[(2, 18)],
    &[(3, 12)],
    &[(6, 6)],
    &[(2, 12), (2, 6)],
    &[(3, 6), (3, 6)],
    &[(2, 6), (2, 6), (2, 6)],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Invariants,
    Embedding,
    Quadrics,
    Cubic,
    Dual,
    Spans,
    Chow,
    Cases,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Invariants,
        Stage::Embedding,
        Stage::Quadrics,
        Stage::Cubic,
        Stage::Dual,
        Stage::Spans,
        Stage::Chow,
        Stage::Cases,
    ];
}

// RNG streams, one per independent random choice
const S_QUADRIC: u64 = 1;
const S_CUBIC: u64 = 2;
const S_HELD_OUT: u64 = 3;
const S_OFF_J: u64 = 4;
const S_SHIFTS: u64 = 5;
const S_EQUIVARIANCE: u64 = 6;
const S_SEXTIC: u64 = 7;
const S_SEXTIC_HELD_OUT: u64 = 8;
const S_DEGREE: u64 = 9;
const S_SEXTIC_POINTS: u64 = 10;
const S_XA_BASE: u64 = 100;

/// Sampled data kept for file dumps.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub jacobian_samples: Vec<(JacobianPoint, ProjectivePoint9)>,
    pub quadrics: Option<FormFit>,
    pub cubic: Option<InvariantFit>,
    pub sextic: Option<InvariantFit>,
    pub xa_samples: Vec<Vec<(JacobianPoint, ProjectivePoint9)>>,
}

pub struct Pipeline<'a> {
    config: &'a RunConfig,
    tau: PeriodMatrix,
    timings: bool,
    claims: Vec<ClaimReport>,
    pub artifacts: Artifacts,
    cubic: Result<InvariantFit, String>,
    sextic: Result<InvariantFit, String>,
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn least(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

impl<'a> Pipeline<'a> {
    /// The config must already be validated.
    pub fn new(config: &'a RunConfig, timings: bool) -> Self {
        let tau = config.period_matrix().expect("validated config");
        Self {
            config,
            tau,
            timings,
            claims: Vec::new(),
            artifacts: Artifacts::default(),
            cubic: Err("cubic stage not run".into()),
            sextic: Err("sextic stage not run".into()),
        }
    }

    fn rng(&self, stream: u64) -> LabRng {
        stage_rng(self.config.seed, stream)
    }

    fn embed_random(&self, rng: &mut LabRng, n: usize) -> Result<Vec<(JacobianPoint, ProjectivePoint9)>, String> {
        (0..n)
            .map(|_| {
                let z = self.tau.random_point(rng);
                embed_point(&z, &self.tau, self.config.tol_series).map(|x| (z, x)).map_err(|e| e.to_string())
            })
            .collect()
    }

    fn push(&mut self, claim: ClaimReport) {
        self.claims.push(claim);
    }

    pub fn run(mut self, stages: &[Stage]) -> (Report, Artifacts) {
        for &stage in stages {
            let start = Instant::now();
            let before = self.claims.len();
            match stage {
                Stage::Invariants => self.invariants(),
                Stage::Embedding => self.embedding(),
                Stage::Quadrics => self.quadrics(),
                Stage::Cubic => self.cubic(),
                Stage::Dual => self.dual(),
                Stage::Spans => self.spans(),
                Stage::Chow => self.chow(),
                Stage::Cases => self.cases(),
            }
            if self.timings {
                let ms = start.elapsed().as_secs_f64() * 1e3;
                self.claims[before..].iter_mut().for_each(|c| c.runtime_ms = Some(ms));
            }
        }
        (Report::new(self.claims, self.config), self.artifacts)
    }

    fn invariants(&mut self) {
        let trivial = CharacterLabel::TRIVIAL;
        let dims: Vec<usize> = (1..=3).map(|d| semi_invariant_forms(d, &trivial).dimension()).collect();
        self.push(ClaimReport::new(
            "invariant-dimensions",
            "invariant forms of degree 1, 2, 3 have dimensions 0, 0, 5",
            dims == [0, 0, 5],
            json!(dims),
            json!([0, 0, 5]),
        ));

        // full-group average of every monomial, for every character
        let mut surviving = 0usize;
        for chi in CharacterLabel::all() {
            for d in 1..=2 {
                for m in Monomial::all_of_degree(9, d) {
                    let f = MultiPoly::monomial(9, m, CycloScalar::from_integer(1)).expect("degree within cap");
                    if !reynolds(&f, &chi).is_zero() {
                        surviving += 1;
                    }
                }
            }
        }
        self.push(ClaimReport::new(
            "semi-invariants-low-degree",
            "no semi-invariant linear or quadratic forms for any of the 81 characters",
            surviving == 0,
            json!(surviving),
            json!(0),
        ));

        let m6 = semi_invariant_forms(6, &trivial).dimension();
        self.push(ClaimReport::new(
            "invariant-sextic-dimension",
            "invariant sextics form a 43-dimensional space",
            m6 == INVARIANT_SEXTICS,
            json!(m6),
            json!(INVARIANT_SEXTICS),
        ));

        let claim = match cases::even_restriction_rank() {
            Ok(r) => ClaimReport::new(
                "even-p4-restriction",
                "invariant cubics restrict injectively to the even P^4",
                r.rank == 5 && r.dimension == 5,
                json!(r.rank),
                json!(5),
            ),
            Err(e) => ClaimReport::skipped("even-p4-restriction", "restriction rank", json!(5), &e.to_string()),
        };
        self.push(claim);
    }

    fn embedding(&mut self) {
        let mut rng = self.rng(S_EQUIVARIANCE);
        let id = "embedding-equivariance";
        let anchor = "translation by tau p/3 + q/3 acts as the Schroedinger element (p, q)";
        let samples = match self.embed_random(&mut rng, self.config.samples.equivariance) {
            Ok(s) => s,
            Err(e) => return self.push(ClaimReport::skipped(id, anchor, json!({ "max": EQUIVARIANCE }), &e)),
        };
        let third = |v: u8| Complex64::new(v as f64 / 3.0, 0.0);
        let mut max = 0.0f64;
        for (z, x) in &samples {
            for g in HeisenbergElement::coset_representatives() {
                let tp = self.tau.apply([third(g.p[0]), third(g.p[1])]);
                let moved = z.translate([tp[0] + third(g.q[0]), tp[1] + third(g.q[1])]);
                match embed_point(&moved, &self.tau, self.config.tol_series) {
                    Ok(y) => max = max.max(act_on_point(&g, x).distance(&y)),
                    Err(e) => return self.push(ClaimReport::skipped(id, anchor, json!({ "max": EQUIVARIANCE }), &e.to_string())),
                }
            }
        }
        self.push(
            ClaimReport::new(id, anchor, max <= EQUIVARIANCE, json!(max), json!({ "max": EQUIVARIANCE })).with_residual(max),
        );
    }

    fn quadrics(&mut self) {
        let id = "quadrics-through-j";
        let anchor = "quadrics through the embedded Jacobian form a 9-dimensional space";
        let expected = json!({ "nullity": 9, "min_gap": NULLITY_GAP, "max_held_out": SINGULAR_ON_J });
        let mut rng = self.rng(S_QUADRIC);
        let samples = match self.embed_random(&mut rng, self.config.samples.quadric) {
            Ok(s) => s,
            Err(e) => return self.push(ClaimReport::skipped(id, anchor, expected, &e)),
        };
        let points: Vec<ProjectivePoint9> = samples.iter().map(|s| s.1).collect();
        self.artifacts.jacobian_samples = samples;
        let fit = match fit::quadrics_through(&points, self.config.tol_rank) {
            Ok(f) => f,
            Err(e) => return self.push(ClaimReport::skipped(id, anchor, expected, &e.to_string())),
        };
        let held_out = match self.embed_random(&mut self.rng(S_HELD_OUT), self.config.samples.held_out) {
            Ok(s) => s.into_iter().map(|s| s.1).collect::<Vec<_>>(),
            Err(e) => return self.push(ClaimReport::skipped(id, anchor, expected, &e)),
        };
        let residual = worst(fit.basis.iter().map(|q| fit::max_relative_value(q, &held_out)));
        let gap = fit.gap;
        let ok = fit.nullity() == 9 && gap.is_some_and(|g| g >= NULLITY_GAP) && residual <= SINGULAR_ON_J;
        self.push(
            ClaimReport::new(id, anchor, ok, json!({ "nullity": fit.nullity(), "held_out": residual }), expected)
                .with_gap(gap)
                .with_residual(residual),
        );
        self.artifacts.quadrics = Some(fit);
    }

    fn cubic(&mut self) {
        let basis = semi_invariant_forms(3, &CharacterLabel::TRIVIAL).basis;
        let fitted = self
            .embed_random(&mut self.rng(S_CUBIC), self.config.samples.cubic)
            .and_then(|s| {
                let pts: Vec<ProjectivePoint9> = s.into_iter().map(|p| p.1).collect();
                fit::fit_coble_cubic(&pts, &basis, self.config.tol_rank).map_err(|e| e.to_string())
            });
        self.cubic = fitted.clone();

        let ids = [
            ("cubic-unique", "exactly one invariant cubic is singular along the Jacobian"),
            ("cubic-singular-on-j", "the cubic is singular along the Jacobian"),
            ("cubic-smooth-off-j", "the cubic is smooth away from the Jacobian"),
            ("partials-span-quadrics", "the nine partials of the cubic span the quadrics through the Jacobian"),
        ];
        let fit = match fitted {
            Ok(f) => f,
            Err(e) => {
                for (id, anchor) in ids {
                    self.push(ClaimReport::skipped(id, anchor, Value::Null, &e));
                }
                return;
            }
        };
        let gap_ok = fit.gap.is_some_and(|g| g >= NULLITY_GAP);
        self.push(
            ClaimReport::new(ids[0].0, ids[0].1, gap_ok, json!({ "nullity": 1 }), json!({ "nullity": 1, "min_gap": NULLITY_GAP }))
                .with_gap(fit.gap),
        );

        let claim = match self.embed_random(&mut self.rng(S_HELD_OUT), self.config.samples.held_out) {
            Ok(s) => {
                let pts: Vec<ProjectivePoint9> = s.into_iter().map(|p| p.1).collect();
                let g = fit::max_relative_gradient(&fit.form, &pts);
                ClaimReport::new(ids[1].0, ids[1].1, g <= SINGULAR_ON_J, json!(g), json!({ "max": SINGULAR_ON_J }))
                    .with_residual(g)
            }
            Err(e) => ClaimReport::skipped(ids[1].0, ids[1].1, json!({ "max": SINGULAR_ON_J }), &e),
        };
        self.push(claim);

        // no gradient floor here: the sampler must not pre-select smooth points
        let claim = match dual::sample_on_hypersurface(&fit.form, self.config.samples.held_out, &mut self.rng(S_OFF_J), 0.0) {
            Ok(pts) => {
                let grad = fit.form.gradient();
                let g = least(pts.iter().map(|p| poly::relative_gradient_norm(&grad, p.coords())));
                ClaimReport::new(ids[2].0, ids[2].1, g >= SMOOTH_FLOOR, json!(g), json!({ "min": SMOOTH_FLOOR }))
            }
            Err(e) => ClaimReport::skipped(ids[2].0, ids[2].1, json!({ "min": SMOOTH_FLOOR }), &e.to_string()),
        };
        self.push(claim);

        let claim = match &self.artifacts.quadrics {
            Some(q) => {
                let (angle, rank) = fit::partials_span_check(&fit.form, &q.basis, self.config.tol_rank);
                ClaimReport::new(
                    ids[3].0,
                    ids[3].1,
                    angle <= PARTIALS_ANGLE && rank == 9,
                    json!({ "max_angle": angle, "partials_rank": rank }),
                    json!({ "max_angle": PARTIALS_ANGLE, "partials_rank": 9 }),
                )
                .with_residual(angle)
            }
            None => ClaimReport::skipped(ids[3].0, ids[3].1, json!({ "max_angle": PARTIALS_ANGLE }), "no quadric basis"),
        };
        self.push(claim);
        self.artifacts.cubic = Some(fit);
    }

    fn dual(&mut self) {
        let ids = [
            ("dual-equivariance", "the dual map intertwines the action with its contragredient"),
            ("dual-sextic-unique", "exactly one invariant sextic vanishes on the dual variety"),
            ("dual-sextic-residual", "the sextic vanishes on held-out dual images"),
            ("dual-sextic-degree", "the dual hypersurface has degree 6"),
            ("sextic-smooth-generic", "the sextic is smooth at generic points"),
        ];
        let cubic = match &self.cubic {
            Ok(c) => c.form.clone(),
            Err(e) => {
                let e = e.clone();
                for (id, anchor) in ids {
                    self.push(ClaimReport::skipped(id, anchor, Value::Null, &e));
                }
                self.sextic = Err(e);
                return;
            }
        };
        let map = DualMap::new(&cubic);
        let n = self.config.samples.equivariance;
        let claim = match dual::sample_on_cubic(&cubic, n, &mut self.rng(S_EQUIVARIANCE)) {
            Ok(pts) => {
                let mut max = 0.0f64;
                let mut failure = None;
                for p in &pts {
                    for g in HeisenbergElement::coset_representatives() {
                        let moved = act_on_point(&g, p);
                        match (map.image(p.coords()), map.image(moved.coords())) {
                            (Ok(y), Ok(gy)) => {
                                let expect = DualPoint9::new(act_contragredient(&g, y.coords())).expect("nonzero");
                                max = max.max(gy.distance(&expect));
                            }
                            (Err(e), _) | (_, Err(e)) => failure = Some(e.to_string()),
                        }
                    }
                }
                match failure {
                    Some(e) => ClaimReport::skipped(ids[0].0, ids[0].1, json!({ "max": EQUIVARIANCE }), &e),
                    None => ClaimReport::new(ids[0].0, ids[0].1, max <= EQUIVARIANCE, json!(max), json!({ "max": EQUIVARIANCE }))
                        .with_residual(max),
                }
            }
            Err(e) => ClaimReport::skipped(ids[0].0, ids[0].1, json!({ "max": EQUIVARIANCE }), &e.to_string()),
        };
        self.push(claim);

        let basis = semi_invariant_forms(6, &CharacterLabel::TRIVIAL).basis;
        let count = self.config.samples.sextic_factor * basis.len();
        let fitted = dual::sample_on_cubic(&cubic, count, &mut self.rng(S_SEXTIC))
            .and_then(|pts| map.images(&pts))
            .and_then(|images| dual::fit_dual_sextic(&images, &basis, self.config.tol_rank))
            .map_err(|e| e.to_string());
        self.sextic = fitted.clone();
        let fit = match fitted {
            Ok(f) => f,
            Err(e) => {
                for (id, anchor) in &ids[1..] {
                    self.push(ClaimReport::skipped(id, anchor, Value::Null, &e));
                }
                return;
            }
        };
        let gap_ok = fit.gap.is_some_and(|g| g >= NULLITY_GAP);
        self.push(
            ClaimReport::new(
                ids[1].0,
                ids[1].1,
                gap_ok,
                json!({ "nullity": 1, "basis_dimension": basis.len(), "images": count }),
                json!({ "nullity": 1, "min_gap": NULLITY_GAP }),
            )
            .with_gap(fit.gap),
        );

        let claim = match dual::sample_on_cubic(&cubic, 2 * self.config.samples.held_out, &mut self.rng(S_SEXTIC_HELD_OUT))
            .and_then(|pts| map.images(&pts))
        {
            Ok(images) => {
                let r = fit::max_relative_value(&fit.form, &images);
                ClaimReport::new(ids[2].0, ids[2].1, r <= SEXTIC_RESIDUAL, json!(r), json!({ "max": SEXTIC_RESIDUAL }))
                    .with_residual(r)
            }
            Err(e) => ClaimReport::skipped(ids[2].0, ids[2].1, json!({ "max": SEXTIC_RESIDUAL }), &e.to_string()),
        };
        self.push(claim);

        let mut rng = self.rng(S_DEGREE);
        let trials = self.config.samples.degree_trials;
        let degrees = (dual::hypersurface_degree(&cubic, trials, &mut rng), dual::hypersurface_degree(&fit.form, trials, &mut rng));
        let claim = match degrees {
            (Ok(c), Ok(s)) => ClaimReport::new(
                ids[3].0,
                ids[3].1,
                c == 3 && s == 6,
                json!({ "cubic": c, "sextic": s }),
                json!({ "cubic": 3, "sextic": 6 }),
            ),
            (Err(e), _) | (_, Err(e)) => ClaimReport::skipped(ids[3].0, ids[3].1, json!({ "sextic": 6 }), &e.to_string()),
        };
        self.push(claim);

        let claim = match dual::sample_on_hypersurface(&fit.form, self.config.samples.span_images, &mut self.rng(S_SEXTIC_POINTS), 0.0) {
            Ok(pts) => {
                let grad = fit.form.gradient();
                let g = least(pts.iter().map(|p| poly::relative_gradient_norm(&grad, p.coords())));
                ClaimReport::new(ids[4].0, ids[4].1, g >= SMOOTH_FLOOR, json!(g), json!({ "min": SMOOTH_FLOOR }))
            }
            Err(e) => ClaimReport::skipped(ids[4].0, ids[4].1, json!({ "min": SMOOTH_FLOOR }), &e.to_string()),
        };
        self.push(claim);
        self.artifacts.sextic = Some(fit);
    }

    fn shifts(&self) -> Vec<[Complex64; 2]> {
        if !self.config.a_shifts.is_empty() {
            return self.config.a_shifts.iter().map(|a| a.map(Complex64::from)).collect();
        }
        let mut rng = self.rng(S_SHIFTS);
        (0..self.config.random_shifts).map(|_| self.tau.random_point(&mut rng).z).collect()
    }

    fn spans(&mut self) {
        let tol = self.config.tol_rank;
        let shifts = self.shifts();
        let mut ranks = Vec::new();
        let mut containment = Vec::new();
        let mut nullities = Vec::new();
        let mut dual_ranks = Vec::new();
        let mut sigma = Vec::new();
        let mut spans = Vec::new();
        let mut planes = Vec::new();
        let mut failures = Vec::new();
        let cubic = self.cubic.as_ref().map(|c| c.form.clone()).map_err(String::clone);
        let sextic = self.sextic.as_ref().map(|s| s.form.clone()).map_err(String::clone);

        for (i, a) in shifts.iter().enumerate() {
            let mut rng = self.rng(S_XA_BASE + i as u64);
            let samples: Result<Vec<(JacobianPoint, ProjectivePoint9)>, String> =
                sample_theta_divisor(&self.tau, *a, self.config.samples.theta_divisor, &mut rng, self.config.tol_series)
                    .map_err(|e| e.to_string())
                    .and_then(|zs| {
                        zs.into_iter()
                            .map(|z| embed_point(&z, &self.tau, self.config.tol_series).map(|x| (z, x)).map_err(|e| e.to_string()))
                            .collect()
                    });
            let samples = match samples {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("shift {i}: {e}"));
                    continue;
                }
            };
            let points: Vec<ProjectivePoint9> = samples.iter().map(|s| s.1).collect();
            self.artifacts.xa_samples.push(samples);

            let (basis, values) = linalg::row_space_basis(&linalg::matrix_from_rows(&points, 9), tol);
            ranks.push(basis.len());
            if basis.len() != 5 {
                failures.push(format!("shift {i}: span rank {}", basis.len()));
                continue;
            }
            let _ = values;
            match dual::quadrics_through_xa(&points, &basis, tol) {
                Ok(f) => nullities.push(json!(f.nullity())),
                Err(e) => nullities.push(json!(e.to_string())),
            }
            let span_points = dual::random_span_points(&basis, self.config.samples.span_images, &mut rng);
            if let Ok(c) = &cubic {
                containment.push(fit::max_relative_value(c, &span_points));
                match DualMap::new(c).images(&span_points) {
                    Ok(images) => {
                        dual_ranks.push(dual::image_rank(&images, tol).0);
                        if let Ok(s) = &sextic {
                            sigma.push(dual::sigma_in_dual_singular(s, &images));
                        }
                        planes.push(images);
                    }
                    Err(e) => failures.push(format!("shift {i}: {e}")),
                }
            }
            spans.push(basis);
        }

        let n = shifts.len();
        let note = (!failures.is_empty()).then(|| failures.join("; "));
        let finish = |c: ClaimReport| match &note {
            Some(d) => c.with_detail(d.clone()),
            None => c,
        };

        self.push(finish(ClaimReport::new(
            "xa-span-rank",
            "each translated theta divisor spans a P^4",
            ranks.len() == n && ranks.iter().all(|&r| r == 5),
            json!(ranks),
            json!(vec![5; n]),
        )));
        self.push(match &cubic {
            Ok(_) => finish(
                ClaimReport::new(
                    "xa-span-in-cubic",
                    "the span of each translated theta divisor lies in the cubic",
                    containment.len() == n && worst(containment.iter().copied()) <= SPAN_CONTAINMENT,
                    json!(containment),
                    json!({ "max": SPAN_CONTAINMENT }),
                )
                .with_residual(worst(containment.iter().copied())),
            ),
            Err(e) => ClaimReport::skipped("xa-span-in-cubic", "span lies in the cubic", json!({ "max": SPAN_CONTAINMENT }), e),
        });
        self.push(finish(ClaimReport::new(
            "quadrics-through-xa",
            "quadrics in P^4 through each translated theta divisor form a 4-dimensional space",
            nullities.len() == n && nullities.iter().all(|v| *v == json!(4)),
            json!(nullities),
            json!(vec![4; n]),
        )));
        self.push(match &cubic {
            Ok(_) => finish(ClaimReport::new(
                "restricted-dual-rank",
                "the dual map sends each P^4 onto a P^3",
                dual_ranks.len() == n && dual_ranks.iter().all(|&r| r == 4),
                json!(dual_ranks),
                json!(vec![4; n]),
            )),
            Err(e) => ClaimReport::skipped("restricted-dual-rank", "dual images span a P^3", json!(vec![4; n]), e),
        });
        self.push(match (&cubic, &sextic) {
            (Ok(_), Ok(_)) => finish(
                ClaimReport::new(
                    "sigma-in-dual-singular",
                    "the images of each P^4 lie in the singular locus of the sextic",
                    sigma.len() == n && worst(sigma.iter().copied()) <= SIGMA_GRADIENT,
                    json!(sigma),
                    json!({ "max": SIGMA_GRADIENT }),
                )
                .with_residual(worst(sigma.iter().copied())),
            ),
            (Err(e), _) | (_, Err(e)) => {
                ClaimReport::skipped("sigma-in-dual-singular", "Sigma lies in Sing", json!({ "max": SIGMA_GRADIENT }), e)
            }
        });

        let pairwise = |sets: &[Vec<Vec<Complex64>>]| {
            let mut min = f64::INFINITY;
            for i in 0..sets.len() {
                for j in i + 1..sets.len() {
                    min = min.min(linalg::max_principal_angle(&sets[i], &sets[j], tol));
                }
            }
            min
        };
        let span_angle = pairwise(&spans);
        let plane_rows: Vec<Vec<Vec<Complex64>>> =
            planes.iter().map(|imgs| imgs.iter().map(|y| y.coords().to_vec()).collect()).collect();
        let plane_angle = pairwise(&plane_rows);
        let ok = n < 2 || (spans.len() == n && planes.len() == n && span_angle > DISTINCT_ANGLE && plane_angle > DISTINCT_ANGLE);
        self.push(finish(ClaimReport::new(
            "xa-spans-distinct",
            "different shifts give different P^4's and different P^3's",
            ok,
            json!({ "min_span_angle": span_angle.min(f64::MAX), "min_image_angle": plane_angle.min(f64::MAX) }),
            json!({ "min": DISTINCT_ANGLE }),
        )));
    }

    fn chow(&mut self) {
        let ring = chow::su2xj();
        let d = match chow::deg_sigma(&ring) {
            Ok(d) => d,
            Err(e) => {
                for id in ["chow-deg-sigma", "chow-lemma-integrals"] {
                    self.push(ClaimReport::skipped(id, "intersection numbers", Value::Null, &e.to_string()));
                }
                return;
            }
        };
        let as_i64 = |r: &num_rational::BigRational| {
            if r.is_integer() {
                json!(r.to_integer().to_i64())
            } else {
                json!(r.to_string())
            }
        };
        let contributions: Vec<Value> = d.breakdown.iter().map(|t| as_i64(&t.contribution)).collect();
        let total = as_i64(&d.total);
        self.push(ClaimReport::new(
            "chow-deg-sigma",
            "deg Sigma = 5 + 5*4 + 10*2 = 45",
            total == json!(45) && contributions == [json!(5), json!(20), json!(20), json!(0), json!(0), json!(0)] && d.higher_terms_vanish,
            json!({ "total": total, "contributions": contributions }),
            json!({ "total": 45, "contributions": [5, 20, 20, 0, 0, 0] }),
        ));
        let lemmas: Vec<Value> = d.breakdown[..3].iter().map(|t| as_i64(&t.integral)).collect();
        self.push(ClaimReport::new(
            "chow-lemma-integrals",
            "Theta_U^5 = 5, Theta_U^4 pi*Theta = 4, Theta_U^3 (pi*Theta)^2 = 2",
            lemmas == [json!(5), json!(4), json!(2)],
            json!(lemmas),
            json!([5, 4, 2]),
        ));
        let k = chow::mult_pullback_coeff(2);
        self.push(ClaimReport::new(
            "mult-pullback-coeff",
            "[2]* Theta_0 = 4 Theta_0",
            k == Some(4),
            json!(k),
            json!(4),
        ));
    }

    fn cases(&mut self) {
        let nodes = cases::plane_curve_nodes(6, 2).ok();
        self.push(ClaimReport::new(
            "plane-curve-nodes",
            "a plane sextic of geometric genus 2 has 8 nodes",
            nodes == Some(8),
            json!(nodes),
            json!(8),
        ));
        let c = cases::conic_fiber_incidence();
        self.push(ClaimReport::new(
            "conic-fiber-incidence",
            "the residual conic meets the curve in 4 points",
            c.curve_genus == 5 && c.incidence == 4 && c.curve_degree == c.xa_degree + c.conic_degree,
            json!({ "curve_genus": c.curve_genus, "incidence": c.incidence, "degrees": [c.curve_degree, c.xa_degree, c.conic_degree] }),
            json!({ "curve_genus": 5, "incidence": 4, "degrees": [8, 6, 2] }),
        ));
        let adj = cases::adjunction_bound(&SurfaceClass::uniform(6, 2));
        self.push(match adj {
            Ok(a) => ClaimReport::new(
                "adjunction-bound",
                "2 p_a - 2 = -72, so p_a <= -35",
                a.twice_genus_minus_two == -72 && a.genus == -35,
                json!({ "twice_genus_minus_two": a.twice_genus_minus_two, "genus": a.genus }),
                json!({ "twice_genus_minus_two": -72, "genus": -35 }),
            ),
            Err(e) => ClaimReport::skipped("adjunction-bound", "adjunction", json!(-35), &e.to_string()),
        });

        let all = cases::enumerate_decompositions(36, 6, 2);
        let gcds: Vec<u64> = all.iter().map(|d| d.gcd).collect();
        self.push(ClaimReport::new(
            "decomposition-gcd",
            "in every decomposition the multiplicities share a factor 2, 3 or 6",
            all.iter().all(Decomposition::has_common_factor_2_or_3),
            json!(gcds),
            json!("each gcd divisible by 2 or 3"),
        ));
        let listed: Vec<Vec<(u64, u64)>> = all.iter().map(|d| d.parts.clone()).collect();
        let expected: Vec<Vec<(u64, u64)>> = EXPECTED_DECOMPOSITIONS.iter().map(|p| p.to_vec()).collect();
        let extra: Vec<&Vec<(u64, u64)>> = listed.iter().filter(|p| !expected.contains(p)).collect();
        let missing: Vec<&Vec<(u64, u64)>> = expected.iter().filter(|p| !listed.contains(p)).collect();
        let mut claim = ClaimReport::new(
            "decomposition-list",
            "the complete list of decompositions sum a_i d_i = 36 with a_i >= 2, 6 | d_i",
            listed == expected,
            json!(listed),
            json!(expected),
        );
        if !extra.is_empty() || !missing.is_empty() {
            claim = claim.with_detail(format!("complete enumeration differs: extra {extra:?}, missing {missing:?}"));
        }
        self.push(claim);
    }
}

pub fn run_all(config: &RunConfig, timings: bool) -> (Report, Artifacts) {
    Pipeline::new(config, timings).run(&Stage::ALL)
}
