//! Geodesic vectors: the defining residual, closed-form families for the
//! non-unimodular algebras, an independent numeric solver, counts of
//! independent homogeneous geodesics, null existence and the g.o. /
//! naturally reductive classification.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{causal_character, inner, CausalCharacter, FrameVector, StructureConstants, METRIC_DIAG};
use crate::connection::levi_civita;
use crate::exact::{rational_to_f64, BoundaryAmbiguous, Decider, Rational, Sign};
use crate::families::{invariant_d_exact, is_symmetric_by_params, AlgebraInstance, FamilyTag};
use crate::isotropy::{compute_l_instance, SkewMap};
use crate::linalg::{lstsq, vector_rank};

/// Default acceptance threshold on the normalised residual.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// `|x1² + x2² - x3²| <= NULL_TOL` on a unit vector counts as null.
pub const NULL_TOL: f64 = 1e-9;
/// Projective distance below which two numeric roots are merged.
pub const CLUSTER_TOL: f64 = 1e-6;

const NEWTON_MAX_ITER: usize = 100;
const NULL_SCAN_POINTS: usize = 1440;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeodesicError {
    #[error("{0}: the instance is symmetric; every geodesic is homogeneous and no family table applies")]
    SymmetricInstance(FamilyTag),
    #[error("{0}: closed-form geodesic families are only available for g5, g6, g7")]
    UnsupportedFamily(FamilyTag),
    #[error(transparent)]
    Ambiguous(#[from] BoundaryAmbiguous),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicVector {
    pub xm: FrameVector,
    pub k: f64,
    /// Coefficients of the isotropy completion over the `l` basis.
    pub isotropy_part: Vec<f64>,
    pub causal: CausalCharacter,
}

/// `r_i = <[X, e_i] + A e_i, X> - k <X, e_i>` with `A = Σ t_j l_j`.
pub fn geodesic_residual(
    c: &StructureConstants,
    l_basis: &[SkewMap],
    xm: &FrameVector,
    k: f64,
    coeffs: &[f64],
) -> [f64; 3] {
    std::array::from_fn(|i| {
        let ei = FrameVector::basis(i);
        let mut r = inner(&c.bracket(xm, &ei), xm) - k * inner(xm, &ei);
        for (a, t) in l_basis.iter().zip(coeffs) {
            r += t * inner(&a.apply(&ei), xm);
        }
        r
    })
}

fn param_scale(c: &StructureConstants) -> f64 {
    c.raw().iter().flatten().flatten().fold(1.0f64, |m, x| m.max(x.abs()))
}

fn is_null_unit(x: &FrameVector) -> bool {
    causal_character(x, NULL_TOL) == CausalCharacter::Null
}

/// Solves for `k` (null `xm` only) and the isotropy coefficients. The
/// residual is measured on `xm / |xm|` relative to the bracket scale.
pub fn is_geodesic_vector(
    c: &StructureConstants,
    l_basis: &[SkewMap],
    xm: &FrameVector,
    tol: f64,
) -> Option<GeodesicVector> {
    let n = xm.euclidean_norm();
    if n == 0.0 {
        return None;
    }
    let x = *xm * (1.0 / n);
    let null = is_null_unit(&x);
    let base = geodesic_residual(c, &[], &x, 0.0, &[]);
    let mut cols: Vec<[f64; 3]> = Vec::new();
    if null {
        cols.push(std::array::from_fn(|i| -inner(&x, &FrameVector::basis(i))));
    }
    for a in l_basis {
        cols.push(std::array::from_fn(|i| inner(&a.apply(&FrameVector::basis(i)), &x)));
    }
    let (sol, res) = if cols.is_empty() {
        (Vec::new(), base.iter().fold(0.0f64, |m, r| m.max(r.abs())))
    } else {
        let a: Vec<Vec<f64>> = (0..3).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
        let b: Vec<f64> = base.iter().map(|r| -r).collect();
        lstsq(&a, &b)
    };
    if res > tol * param_scale(c) {
        return None;
    }
    let (k, coeffs) = if null { (sol[0] * n, sol[1..].to_vec()) } else { (0.0, sol) };
    Some(GeodesicVector {
        xm: *xm,
        k,
        isotropy_part: coeffs.iter().map(|t| t * n).collect(),
        causal: if null { CausalCharacter::Null } else { causal_character(&x, NULL_TOL) },
    })
}

/// Independent oracle: with zero isotropy part, `X` is a geodesic vector
/// iff `∇_X X + k X = 0`.
pub fn nabla_parallel_check(c: &StructureConstants, gv: &GeodesicVector, tol: f64) -> bool {
    if gv.isotropy_part.iter().any(|t| *t != 0.0) {
        return false;
    }
    let n = gv.xm.euclidean_norm();
    if n == 0.0 {
        return true;
    }
    let x = gv.xm * (1.0 / n);
    let conn = levi_civita(c);
    (conn.nabla(&x, &x) + x * (gv.k / n)).max_abs() <= tol * param_scale(c)
}

/// The `k` that best fits `∇_X X = -k X`, if the fit is exact to `tol`.
pub fn nabla_geodesic_k(c: &StructureConstants, xm: &FrameVector, tol: f64) -> Option<f64> {
    let n = xm.euclidean_norm();
    if n == 0.0 {
        return None;
    }
    let x = *xm * (1.0 / n);
    let v = levi_civita(c).nabla(&x, &x);
    let k = -v.dot(&x);
    ((v + x * k).max_abs() <= tol * param_scale(c)).then_some(k * n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// A single fixed direction.
    Axis,
    /// Lines in a coordinate plane cut out by a quadratic form.
    PlaneConic,
    /// A two-dimensional span, present only on a parameter sublocus.
    IsotropyLine,
    /// Null directions selected by a quadratic condition.
    NullCone,
}

/// `a·u² + b·u·v + c·v² = 0` in the named coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticConstraint {
    pub variables: [String; 2],
    pub coefficients: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    Line(FrameVector),
    Plane(FrameVector, FrameVector),
    /// The whole light cone.
    Cone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicFamily {
    pub kind: FamilyKind,
    pub label: String,
    pub constraint: Option<QuadraticConstraint>,
    /// Real solution set as lines and planes; empty when the row has no
    /// real nonzero members.
    pub pieces: Vec<Piece>,
}

impl GeodesicFamily {
    fn new(kind: FamilyKind, label: &str, pieces: Vec<Piece>) -> Self {
        GeodesicFamily { kind, label: label.to_string(), constraint: None, pieces }
    }

    fn with_constraint(mut self, vars: [&str; 2], coeffs: [&Rational; 3]) -> Self {
        self.constraint = Some(QuadraticConstraint {
            variables: vars.map(str::to_string),
            coefficients: coeffs.map(rational_to_f64),
        });
        self
    }

    /// A random nonzero member, or `None` for an empty row.
    pub fn sample_member<R: Rng>(&self, rng: &mut R) -> Option<FrameVector> {
        if self.pieces.is_empty() {
            return None;
        }
        let scale = |rng: &mut R| {
            let s: f64 = rng.gen_range(0.1..10.0);
            if rng.gen_bool(0.5) {
                s
            } else {
                -s
            }
        };
        let v = match &self.pieces[rng.gen_range(0..self.pieces.len())] {
            Piece::Line(v) => *v * scale(rng),
            Piece::Plane(u, w) => loop {
                let s: f64 = rng.sample(StandardNormal);
                let t: f64 = rng.sample(StandardNormal);
                let v = *u * s + *w * t;
                if v.euclidean_norm() > 1e-3 * (u.euclidean_norm() + w.euclidean_norm()) {
                    break v;
                }
            },
            Piece::Cone => {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                FrameVector::new(th.cos(), th.sin(), if rng.gen_bool(0.5) { 1.0 } else { -1.0 }) * scale(rng)
            }
        };
        Some(v)
    }

    /// Euclidean distance from the unit direction of `x` to the row.
    pub fn direction_distance(&self, x: &FrameVector) -> f64 {
        let n = x.euclidean_norm();
        if n == 0.0 {
            return 0.0;
        }
        let x = *x * (1.0 / n);
        self.pieces.iter().map(|p| piece_distance(p, &x)).fold(f64::INFINITY, f64::min)
    }

    /// Spanning vectors used for rank counting.
    fn representatives(&self) -> Vec<[f64; 3]> {
        self.pieces
            .iter()
            .flat_map(|p| match p {
                Piece::Line(v) => vec![v.0],
                Piece::Plane(u, w) => vec![u.0, w.0],
                Piece::Cone => vec![[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 0.0, -1.0]],
            })
            .collect()
    }

    fn contains_null(&self) -> bool {
        self.pieces.iter().any(|p| match p {
            Piece::Line(v) => is_null_unit(&(*v * (1.0 / v.euclidean_norm()))),
            Piece::Plane(u, w) => {
                let (u, w) = (*u * (1.0 / u.euclidean_norm()), *w * (1.0 / w.euclidean_norm()));
                let (a, b, d) = (inner(&u, &u), inner(&u, &w), inner(&w, &w));
                a * d - b * b <= NULL_TOL
            }
            Piece::Cone => true,
        })
    }
}

fn piece_distance(p: &Piece, x: &FrameVector) -> f64 {
    match p {
        Piece::Line(v) => {
            let v = *v * (1.0 / v.euclidean_norm());
            (*x - v).euclidean_norm().min((*x + v).euclidean_norm())
        }
        Piece::Plane(u, w) => {
            // Gram-Schmidt, then the orthogonal remainder
            let u = *u * (1.0 / u.euclidean_norm());
            let w = *w - u * w.dot(&u);
            let w = w * (1.0 / w.euclidean_norm());
            (*x - u * x.dot(&u) - w * x.dot(&w)).euclidean_norm()
        }
        Piece::Cone => {
            let q = x.0[0] * x.0[0] + x.0[1] * x.0[1] - x.0[2] * x.0[2];
            q.abs() / 2.0
        }
    }
}

/// Distance from `x` to the nearest family.
pub fn distance_to_families(families: &[GeodesicFamily], x: &FrameVector) -> f64 {
    families.iter().map(|f| f.direction_distance(x)).fold(f64::INFINITY, f64::min)
}

/// Real lines of `a u² + b u v + c v² = 0` as `(u, v)` directions, or
/// `None` if the form vanishes identically.
fn quadratic_lines(
    d: &Decider,
    what: &str,
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Result<Option<Vec<[f64; 2]>>, BoundaryAmbiguous> {
    if d.is_zero(a) && d.is_zero(b) && d.is_zero(c) {
        return Ok(None);
    }
    let four = Rational::from_integer(4.into());
    let disc = b * b - four * a * c;
    let sign = d.sign(&format!("discriminant of {what}"), &disc)?;
    let (af, bf, cf) = (rational_to_f64(a), rational_to_f64(b), rational_to_f64(c));
    if sign == Sign::Negative {
        return Ok(Some(Vec::new()));
    }
    if d.is_zero(a) {
        // v (b u + c v) = 0
        let mut out = vec![[1.0, 0.0]];
        if !d.is_zero(b) {
            out.push([cf, -bf]);
        }
        return Ok(Some(out));
    }
    if sign == Sign::Zero {
        return Ok(Some(vec![[-bf / (2.0 * af), 1.0]]));
    }
    let sq = rational_to_f64(&disc).sqrt();
    let q = -0.5 * (bf + if bf >= 0.0 { sq } else { -sq });
    // roots of a t² + b t + c with t = u / v
    let t1 = q / af;
    let lines = if q == 0.0 { vec![[t1, 1.0], [1.0, 0.0]] } else { vec![[t1, 1.0], [cf / q, 1.0]] };
    Ok(Some(lines))
}

fn fv(v: [&Rational; 3]) -> FrameVector {
    FrameVector(v.map(rational_to_f64))
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Closed-form geodesic vector families of a non-symmetric `g5`, `g6`, `g7`.
pub fn enumerate_families(instance: &AlgebraInstance) -> Result<Vec<GeodesicFamily>, GeodesicError> {
    if instance.tag.is_unimodular_family() {
        return Err(GeodesicError::UnsupportedFamily(instance.tag));
    }
    if is_symmetric_by_params(instance) {
        return Err(GeodesicError::SymmetricInstance(instance.tag));
    }
    let d = instance.params.decider();
    let p = instance.params.rationals();
    let (a, b, g, dl) = (&p.alpha, &p.beta, &p.gamma, &p.delta);
    let z = |x: &Rational| d.is_zero(x);
    let zero = Rational::zero();
    let e1 = FrameVector::basis(0);
    let e3 = FrameVector::basis(2);
    let mut out = Vec::new();
    match instance.tag {
        FamilyTag::G5 => {
            out.push(GeodesicFamily::new(FamilyKind::Axis, "x3 e3", vec![Piece::Line(e3)]));
            let bg = b + g;
            let lines = quadratic_lines(&d, "alpha x1^2 + (beta+gamma) x1 x2 + delta x2^2", a, &bg, dl)?;
            let pieces = match lines {
                None => vec![Piece::Plane(e1, FrameVector::basis(1))],
                Some(ls) => ls.iter().map(|l| Piece::Line(FrameVector::new(l[0], l[1], 0.0))).collect(),
            };
            out.push(
                GeodesicFamily::new(FamilyKind::PlaneConic, "x1 e1 + x2 e2, alpha x1^2 + (beta+gamma) x1 x2 + delta x2^2 = 0", pieces)
                    .with_constraint(["x1", "x2"], [a, &bg, dl]),
            );
            if z(a) && z(b) {
                out.push(GeodesicFamily::new(
                    FamilyKind::IsotropyLine,
                    "x1 (delta e1 - gamma e2) + x3 e3 [alpha = beta = 0]",
                    vec![Piece::Plane(fv([dl, &-g.clone(), &zero]), e3)],
                ));
            }
            if z(g) && z(dl) {
                out.push(GeodesicFamily::new(
                    FamilyKind::IsotropyLine,
                    "x2 (-beta e1 + alpha e2) + x3 e3 [gamma = delta = 0]",
                    vec![Piece::Plane(fv([&-b.clone(), a, &zero]), e3)],
                ));
            }
            let da = dl - a;
            let nb = -b.clone();
            let lines = quadratic_lines(&d, "gamma x1^2 + (delta-alpha) x1 x2 - beta x2^2", g, &da, &nb)?;
            let pieces = match lines {
                None => vec![Piece::Cone],
                Some(ls) => ls
                    .iter()
                    .flat_map(|l| {
                        let h = l[0].hypot(l[1]);
                        [Piece::Line(FrameVector::new(l[0], l[1], h)), Piece::Line(FrameVector::new(l[0], l[1], -h))]
                    })
                    .collect(),
            };
            out.push(
                GeodesicFamily::new(
                    FamilyKind::NullCone,
                    "x1 e1 + x2 e2 +- sqrt(x1^2 + x2^2) e3, gamma x1^2 + (delta-alpha) x1 x2 - beta x2^2 = 0",
                    pieces,
                )
                .with_constraint(["x1", "x2"], [g, &da, &nb]),
            );
        }
        FamilyTag::G6 => {
            out.push(GeodesicFamily::new(FamilyKind::Axis, "x1 e1", vec![Piece::Line(e1)]));
            let gb = g - b;
            let nd = -dl.clone();
            let lines = quadratic_lines(&d, "alpha x2^2 + (gamma-beta) x2 x3 - delta x3^2", a, &gb, &nd)?;
            let pieces = match lines {
                None => vec![Piece::Plane(FrameVector::basis(1), e3)],
                Some(ls) => ls.iter().map(|l| Piece::Line(FrameVector::new(0.0, l[0], l[1]))).collect(),
            };
            out.push(
                GeodesicFamily::new(FamilyKind::PlaneConic, "x2 e2 + x3 e3, alpha x2^2 + (gamma-beta) x2 x3 - delta x3^2 = 0", pieces)
                    .with_constraint(["x2", "x3"], [a, &gb, &nd]),
            );
            if z(a) && z(b) {
                out.push(GeodesicFamily::new(
                    FamilyKind::IsotropyLine,
                    "x1 e1 + x2 (delta e2 + gamma e3) [alpha = beta = 0]",
                    vec![Piece::Plane(e1, fv([&zero, dl, g]))],
                ));
            }
            if z(g) && z(dl) {
                out.push(GeodesicFamily::new(
                    FamilyKind::IsotropyLine,
                    "x1 e1 + x3 (beta e2 + alpha e3) [gamma = delta = 0]",
                    vec![Piece::Plane(e1, fv([&zero, b, a]))],
                ));
            }
            let ad = a - dl;
            let nb = -b.clone();
            let lines = quadratic_lines(&d, "gamma x2^2 + (alpha-delta) x2 x3 - beta x3^2", g, &ad, &nb)?;
            let pieces = match lines {
                None => vec![Piece::Cone],
                Some(ls) => ls
                    .iter()
                    .flat_map(|l| {
                        let (u, v) = (l[0], l[1]);
                        let s = v * v - u * u;
                        if s < -1e-12 * v.hypot(u).powi(2) {
                            // x1² = x3² - x2² has no real solution on this line
                            vec![]
                        } else if s <= 1e-12 * v.hypot(u).powi(2) {
                            vec![Piece::Line(FrameVector::new(0.0, u, v))]
                        } else {
                            let x1 = s.sqrt();
                            vec![Piece::Line(FrameVector::new(x1, u, v)), Piece::Line(FrameVector::new(-x1, u, v))]
                        }
                    })
                    .collect(),
            };
            out.push(
                GeodesicFamily::new(
                    FamilyKind::NullCone,
                    "+-sqrt(x3^2 - x2^2) e1 + x2 e2 + x3 e3, gamma x2^2 + (alpha-delta) x2 x3 - beta x3^2 = 0",
                    pieces,
                )
                .with_constraint(["x2", "x3"], [g, &ad, &nb]),
            );
        }
        FamilyTag::G7 if z(a) => {
            out.push(GeodesicFamily::new(FamilyKind::Axis, "x1 e1", vec![Piece::Line(e1)]));
            out.push(GeodesicFamily::new(FamilyKind::Axis, "x2 (e2 + e3)", vec![Piece::Line(FrameVector::new(0.0, 1.0, 1.0))]));
            if z(b) {
                let dg = rational_to_f64(&(dl / g));
                out.push(GeodesicFamily::new(
                    FamilyKind::IsotropyLine,
                    "-(delta/gamma)(x2 - x3) e1 + x2 e2 + x3 e3 [beta = 0]",
                    vec![Piece::Plane(FrameVector::new(-dg, 1.0, 0.0), FrameVector::new(dg, 0.0, 1.0))],
                ));
            }
            let bpg = b + g;
            let bmg = b - g;
            let qa = &bpg * &bpg + dl * dl;
            let qb = r(-2) * (b * b - g * g);
            let qc = &bmg * &bmg - dl * dl;
            let lines = quadratic_lines(&d, "null condition on (x2, x3)", &qa, &qb, &qc)?;
            let (p2, p3) = (rational_to_f64(&(&bpg / dl)), rational_to_f64(&(&bmg / dl)));
            let pieces = lines
                .unwrap_or_default()
                .iter()
                .map(|l| Piece::Line(FrameVector::new(p2 * l[0] - p3 * l[1], l[0], l[1])))
                .collect();
            out.push(
                GeodesicFamily::new(
                    FamilyKind::NullCone,
                    "((beta+gamma) x2 - (beta-gamma) x3)/delta e1 + x2 e2 + x3 e3, null",
                    pieces,
                )
                .with_constraint(["x2", "x3"], [&qa, &qb, &qc]),
            );
        }
        FamilyTag::G7 => {
            out.push(GeodesicFamily::new(FamilyKind::Axis, "x2 (e2 + e3)", vec![Piece::Line(FrameVector::new(0.0, 1.0, 1.0))]));
            if z(b) {
                out.push(GeodesicFamily::new(
                    FamilyKind::Axis,
                    "x2 (e2 - e3) [beta = 0]",
                    vec![Piece::Line(FrameVector::new(0.0, 1.0, -1.0))],
                ));
            }
            let am = a - dl;
            let v = [r(2) * b * &am, b * b - &am * &am, b * b + &am * &am];
            out.push(GeodesicFamily::new(
                FamilyKind::NullCone,
                "x3 (2 beta (alpha-delta) e1 + (beta^2 - (alpha-delta)^2) e2 + (beta^2 + (alpha-delta)^2) e3)",
                vec![Piece::Line(fv([&v[0], &v[1], &v[2]]))],
            ));
        }
        _ => unreachable!("unimodular families rejected above"),
    }
    Ok(out)
}

/// Number of linearly independent directions spanned by the families.
pub fn families_rank(families: &[GeodesicFamily]) -> usize {
    let reps: Vec<[f64; 3]> = families.iter().flat_map(GeodesicFamily::representatives).collect();
    vector_rank(&reps, 1e-9)
}

/// Maximal number of linearly independent homogeneous geodesics through a
/// point, derived from the enumerated families.
pub fn count_independent(instance: &AlgebraInstance) -> Result<usize, GeodesicError> {
    Ok(families_rank(&enumerate_families(instance)?))
}

pub fn families_have_null(families: &[GeodesicFamily]) -> bool {
    families.iter().any(GeodesicFamily::contains_null)
}

/// Null homogeneous geodesic existence, derived from the enumerated families.
pub fn has_null_homogeneous(instance: &AlgebraInstance) -> Result<bool, GeodesicError> {
    Ok(families_have_null(&enumerate_families(instance)?))
}

/// Case branch of the counting statement an instance falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountBranch {
    G5Generic,
    G5CaseI,
    G5CaseII,
    G6Generic,
    G6CaseI,
    G6CaseII,
    G7ABetaZero,
    G7ADAtMostOne,
    G7ADAboveOne,
    G7BBetaZero,
    G7BBetaNonzero,
}

impl CountBranch {
    pub const ALL: [CountBranch; 11] = [
        CountBranch::G5Generic,
        CountBranch::G5CaseI,
        CountBranch::G5CaseII,
        CountBranch::G6Generic,
        CountBranch::G6CaseI,
        CountBranch::G6CaseII,
        CountBranch::G7ABetaZero,
        CountBranch::G7ADAtMostOne,
        CountBranch::G7ADAboveOne,
        CountBranch::G7BBetaZero,
        CountBranch::G7BBetaNonzero,
    ];

    /// The count stated for this branch.
    pub fn stated_count(self) -> usize {
        match self {
            CountBranch::G5CaseI | CountBranch::G6CaseI => 2,
            CountBranch::G5CaseII | CountBranch::G6CaseII => 1,
            CountBranch::G7ADAboveOne | CountBranch::G7BBetaNonzero => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CountBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CountBranch::G5Generic => "g5 generic",
            CountBranch::G5CaseI => "g5 case (i)",
            CountBranch::G5CaseII => "g5 case (ii)",
            CountBranch::G6Generic => "g6 generic",
            CountBranch::G6CaseI => "g6 case (i)",
            CountBranch::G6CaseII => "g6 case (ii)",
            CountBranch::G7ABetaZero => "g7 alpha=0!=gamma, beta=0",
            CountBranch::G7ADAtMostOne => "g7 alpha=0!=gamma, beta!=0, D<=1",
            CountBranch::G7ADAboveOne => "g7 alpha=0!=gamma, beta!=0, D>1",
            CountBranch::G7BBetaZero => "g7 alpha!=0=gamma, beta=0",
            CountBranch::G7BBetaNonzero => "g7 alpha!=0=gamma, beta!=0",
        };
        f.write_str(s)
    }
}

/// Branch of the counting statement; sign decisions are exact for rational input.
pub fn count_branch(instance: &AlgebraInstance) -> Result<CountBranch, GeodesicError> {
    if instance.tag.is_unimodular_family() {
        return Err(GeodesicError::UnsupportedFamily(instance.tag));
    }
    if is_symmetric_by_params(instance) {
        return Err(GeodesicError::SymmetricInstance(instance.tag));
    }
    let d = instance.params.decider();
    let p = instance.params.rationals();
    let (a, b, g, dl) = (&p.alpha, &p.beta, &p.gamma, &p.delta);
    let four = r(4);
    let pairs_nonzero = !(d.is_zero(a) && d.is_zero(b)) && !(d.is_zero(g) && d.is_zero(dl));
    Ok(match instance.tag {
        FamilyTag::G5 | FamilyTag::G6 => {
            let g5 = instance.tag == FamilyTag::G5;
            let d1 = (a - dl) * (a - dl) + &four * b * g;
            let d2 = if g5 { (b + g) * (b + g) - &four * a * dl } else { (b - g) * (b - g) + &four * a * dl };
            let mut branch = if g5 { CountBranch::G5Generic } else { CountBranch::G6Generic };
            if pairs_nonzero && d.sign("(alpha-delta)^2+4 beta gamma", &d1)?.is_negative() {
                match d.sign("second discriminant", &d2)? {
                    Sign::Zero => branch = if g5 { CountBranch::G5CaseI } else { CountBranch::G6CaseI },
                    Sign::Negative => branch = if g5 { CountBranch::G5CaseII } else { CountBranch::G6CaseII },
                    Sign::Positive => {}
                }
            }
            branch
        }
        _ if d.is_zero(a) => {
            if d.is_zero(b) {
                CountBranch::G7ABetaZero
            } else {
                let dv = invariant_d_exact(&p).map_err(|_| GeodesicError::UnsupportedFamily(instance.tag))?;
                if d.sign("D - 1", &(dv - r(1)))? != Sign::Positive {
                    CountBranch::G7ADAtMostOne
                } else {
                    CountBranch::G7ADAboveOne
                }
            }
        }
        _ => {
            if d.is_zero(b) {
                CountBranch::G7BBetaZero
            } else {
                CountBranch::G7BBetaNonzero
            }
        }
    })
}

/// Null existence exactly as stated (without consulting the families).
pub fn stated_has_null(instance: &AlgebraInstance) -> Result<bool, GeodesicError> {
    if is_symmetric_by_params(instance) {
        return Err(GeodesicError::SymmetricInstance(instance.tag));
    }
    let d = instance.params.decider();
    let p = instance.params.rationals();
    let (a, b, g, dl) = (&p.alpha, &p.beta, &p.gamma, &p.delta);
    let four = r(4);
    let pairs_nonzero = !(d.is_zero(a) && d.is_zero(b)) && !(d.is_zero(g) && d.is_zero(dl));
    let d1 = (a - dl) * (a - dl) + &four * b * g;
    Ok(match instance.tag {
        FamilyTag::G5 => !(pairs_nonzero && d.sign("(alpha-delta)^2+4 beta gamma", &d1)?.is_negative()),
        FamilyTag::G6 => {
            let d2 = (b - g) * (b - g) + &four * a * dl;
            !(pairs_nonzero
                && d.sign("(alpha-delta)^2+4 beta gamma", &d1)?.is_negative()
                && d.sign("(beta-gamma)^2+4 alpha delta", &d2)?.is_negative())
        }
        FamilyTag::G7 => true,
        t => return Err(GeodesicError::UnsupportedFamily(t)),
    })
}

/// Derived and stated counts side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub branch: CountBranch,
    pub independent_count: usize,
    pub stated_count: usize,
    pub has_null_homogeneous: bool,
    pub stated_has_null: bool,
    /// Set when the derivation disagrees with the stated value.
    pub theorem_discrepancy: Option<String>,
}

pub fn count_summary(instance: &AlgebraInstance) -> Result<CountSummary, GeodesicError> {
    let families = enumerate_families(instance)?;
    let branch = count_branch(instance)?;
    let independent_count = families_rank(&families);
    let has_null = families_have_null(&families);
    let stated_null = stated_has_null(instance)?;
    let stated_count = branch.stated_count();
    let mut notes = Vec::new();
    if independent_count != stated_count {
        notes.push(format!("{branch}: derived count {independent_count}, stated {stated_count}"));
    }
    if has_null != stated_null {
        notes.push(format!("{}: derived null existence {has_null}, stated {stated_null}", instance.tag));
    }
    Ok(CountSummary {
        branch,
        independent_count,
        stated_count,
        has_null_homogeneous: has_null,
        stated_has_null: stated_null,
        theorem_discrepancy: if notes.is_empty() { None } else { Some(notes.join("; ")) },
    })
}

// ---------------------------------------------------------------------------
// numeric solver

/// Double-double number (Dekker splitting, no fused multiply-add needed).
/// Some geodesic roots on the light cone have high multiplicity; with plain
/// double arithmetic the cancellation noise leaves Newton about `eps^(1/3)`
/// away from them.
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    (s, (a - (s - bp)) + (b - bp))
}

fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// `a * b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd { hi: s, lo: lo - (s - hi) }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::renorm(s, e + self.lo + o.lo)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

/// Polynomial form of the residual: `r_i(x) = Σ W[i][a][b] x_a x_b - k η_i x_i
/// + Σ_j t_j Σ_b P[j][i][b] x_b`.
struct ResidualSystem {
    w: [[[f64; 3]; 3]; 3],
    /// `P[j][i][b]`: `<A_j e_i, x> = Σ_b P[j][i][b] x_b`.
    iso: Vec<[[f64; 3]; 3]>,
    scale: f64,
}

impl ResidualSystem {
    fn new(c: &StructureConstants, l_basis: &[SkewMap]) -> Self {
        let w = std::array::from_fn(|i| {
            std::array::from_fn(|a| std::array::from_fn(|b| c.get(a, i, b) * METRIC_DIAG[b]))
        });
        let iso = l_basis
            .iter()
            .map(|s| {
                let m = s.matrix();
                std::array::from_fn(|i| std::array::from_fn(|b| m[b][i] * METRIC_DIAG[b]))
            })
            .collect();
        ResidualSystem { w, iso, scale: param_scale(c) }
    }

    fn residual(&self, x: [Dd; 3], k: f64, coeffs: &[f64]) -> [Dd; 3] {
        std::array::from_fn(|i| {
            let mut acc = Dd::default();
            for a in 0..3 {
                for b in 0..3 {
                    if self.w[i][a][b] != 0.0 {
                        acc = acc + Dd::new(self.w[i][a][b]) * x[a] * x[b];
                    }
                }
            }
            acc = acc - Dd::new(k * METRIC_DIAG[i]) * x[i];
            for (t, p) in coeffs.iter().zip(&self.iso) {
                for b in 0..3 {
                    if p[i][b] != 0.0 {
                        acc = acc + Dd::new(*t) * Dd::new(p[i][b]) * x[b];
                    }
                }
            }
            acc
        })
    }

    /// Rows `∂r_i/∂(x, k, t)` in plain double precision.
    fn jacobian(&self, x: [f64; 3], k: f64, coeffs: &[f64]) -> [Vec<f64>; 3] {
        std::array::from_fn(|i| {
            let mut row = vec![0.0; 4 + self.iso.len()];
            for a in 0..3 {
                for b in 0..3 {
                    row[a] += (self.w[i][a][b] + self.w[i][b][a]) * x[b];
                }
            }
            row[i] -= k * METRIC_DIAG[i];
            row[3] = -METRIC_DIAG[i] * x[i];
            for (j, (t, p)) in coeffs.iter().zip(&self.iso).enumerate() {
                for b in 0..3 {
                    row[b] += t * p[i][b];
                }
                row[4 + j] = (0..3).map(|b| p[i][b] * x[b]).sum();
            }
            row
        })
    }
}

/// A square or overdetermined system solved by damped Gauss-Newton.
trait NewtonSystem {
    fn residual(&self, z: &[f64], f: &mut Vec<f64>);
    fn jacobian(&self, z: &[f64], jac: &mut Vec<Vec<f64>>);
}

/// Unit-sphere chart: `z = (x, k, t)`, residuals plus `|x|² - 1`.
struct SphereChart<'a>(&'a ResidualSystem);

impl NewtonSystem for SphereChart<'_> {
    fn residual(&self, z: &[f64], f: &mut Vec<f64>) {
        let x = [z[0], z[1], z[2]].map(Dd::new);
        f.clear();
        f.extend(self.0.residual(x, z[3], &z[4..]).iter().map(|r| r.value() / self.0.scale));
        let q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - Dd::new(1.0);
        f.push(q.value());
    }

    fn jacobian(&self, z: &[f64], jac: &mut Vec<Vec<f64>>) {
        let x = [z[0], z[1], z[2]];
        jac.clear();
        for row in self.0.jacobian(x, z[3], &z[4..]) {
            jac.push(row.into_iter().map(|v| v / self.0.scale).collect());
        }
        let mut row = vec![0.0; z.len()];
        row[..3].copy_from_slice(&[2.0 * x[0], 2.0 * x[1], 2.0 * x[2]]);
        jac.push(row);
    }
}

/// Exactly null chart `x(u) = (s(1 - u²), 2u, 1 + u²)`: `z = (u, k, t)`.
struct ConeChart<'a> {
    sys: &'a ResidualSystem,
    s: f64,
}

impl ConeChart<'_> {
    fn point(&self, u: f64) -> [Dd; 3] {
        let (p, e) = two_prod(u, u);
        let u2 = Dd { hi: p, lo: e };
        [Dd::new(self.s) * (Dd::new(1.0) - u2), Dd::new(2.0 * u), Dd::new(1.0) + u2]
    }

    fn norm2(u: f64) -> f64 {
        2.0 * (1.0 + u * u) * (1.0 + u * u)
    }

    /// Chart and parameter of a (nearly) null direction.
    fn locate<'s>(sys: &'s ResidualSystem, x: &FrameVector) -> (ConeChart<'s>, f64) {
        let x = if x.0[2] < 0.0 { *x * -1.0 } else { *x };
        let s = if x.0[0] >= 0.0 { 1.0 } else { -1.0 };
        let u = x.0[1] / (x.0[2] + s * x.0[0]);
        (ConeChart { sys, s }, u)
    }

    fn direction(&self, u: f64) -> FrameVector {
        FrameVector(self.point(u).map(Dd::value))
    }
}

impl NewtonSystem for ConeChart<'_> {
    fn residual(&self, z: &[f64], f: &mut Vec<f64>) {
        let n = self.sys.scale * Self::norm2(z[0]);
        f.clear();
        f.extend(self.sys.residual(self.point(z[0]), z[1], &z[2..]).iter().map(|r| r.value() / n));
    }

    fn jacobian(&self, z: &[f64], jac: &mut Vec<Vec<f64>>) {
        let u = z[0];
        let x = self.point(u).map(Dd::value);
        let dx = [-2.0 * self.s * u, 2.0, 2.0 * u];
        let n = self.sys.scale * Self::norm2(u);
        jac.clear();
        for row in self.sys.jacobian(x, z[1], &z[2..]) {
            let mut r = Vec::with_capacity(z.len());
            r.push((0..3).map(|a| row[a] * dx[a]).sum::<f64>() / n);
            r.extend(row[3..].iter().map(|v| v / n));
            jac.push(r);
        }
    }
}

/// With no isotropy, `w(x) ⊥ x` and `ηx ⊥ x` on the cone, so `x` is a null
/// geodesic direction iff `det(x, ηx, w(x)) = 0`: one equation in `u`.
struct ConeScalar<'a>(ConeChart<'a>);

fn det3<T>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Sub<Output = T> + std::ops::Add<Output = T>,
{
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

impl ConeScalar<'_> {
    fn norm(&self, u: f64) -> f64 {
        let q = 1.0 + u * u;
        self.0.sys.scale * 4.0 * q * q * q * q
    }
}

impl NewtonSystem for ConeScalar<'_> {
    fn residual(&self, z: &[f64], f: &mut Vec<f64>) {
        let x = self.0.point(z[0]);
        let y = [x[0], x[1], -x[2]];
        let w = self.0.sys.residual(x, 0.0, &[]);
        f.clear();
        f.push(det3(x, y, w).value() / self.norm(z[0]));
    }

    fn jacobian(&self, z: &[f64], jac: &mut Vec<Vec<f64>>) {
        let u = z[0];
        let x = self.0.point(u).map(Dd::value);
        let dx = [-2.0 * self.0.s * u, 2.0, 2.0 * u];
        let y = [x[0], x[1], -x[2]];
        let dy = [dx[0], dx[1], -dx[2]];
        let w = self.0.sys.residual(self.0.point(u), 0.0, &[]).map(Dd::value);
        let jw = self.0.sys.jacobian(x, 0.0, &[]);
        let dw: [f64; 3] = std::array::from_fn(|i| (0..3).map(|a| jw[i][a] * dx[a]).sum());
        let d = det3(dx, y, w) + det3(x, dy, w) + det3(x, y, dw);
        jac.clear();
        jac.push(vec![d / self.norm(u)]);
    }
}

/// Gauss-Newton step: minimum-norm for square/underdetermined systems,
/// least squares otherwise. Small Gram systems are solved directly; an SVD
/// solve is the fallback for (near-)singular ones.
fn gauss_newton_step(jac: &[Vec<f64>], f: &[f64]) -> Option<Vec<f64>> {
    let (m, n) = (f.len(), jac[0].len());
    let direct = if m <= n {
        let g: Vec<Vec<f64>> =
            (0..m).map(|i| (0..m).map(|j| jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum()).collect()).collect();
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        solve_small(g, rhs).map(|y| (0..n).map(|k| (0..m).map(|i| jac[i][k] * y[i]).sum()).collect())
    } else {
        let g: Vec<Vec<f64>> =
            (0..n).map(|a| (0..n).map(|b| (0..m).map(|i| jac[i][a] * jac[i][b]).sum()).collect()).collect();
        let rhs: Vec<f64> = (0..n).map(|a| -(0..m).map(|i| jac[i][a] * f[i]).sum::<f64>()).collect();
        solve_small(g, rhs)
    };
    direct.or_else(|| {
        let a = DMatrix::from_fn(m, n, |i, j| jac[i][j]);
        let b = DVector::from_iterator(m, f.iter().map(|v| -v));
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        svd.solve(&b, smax * 1e-12).ok().map(|s| s.iter().copied().collect())
    })
}

/// Gaussian elimination with partial pivoting; `None` when numerically
/// singular.
fn solve_small(mut g: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let m = rhs.len();
    let gmax = (0..m).fold(0.0f64, |acc, i| acc.max(g[i][i].abs()));
    for col in 0..m {
        let piv = (col..m).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))?;
        if g[piv][col].abs() <= gmax * 1e-13 {
            return None;
        }
        g.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..m {
            if r != col {
                let factor = g[r][col] / g[col][col];
                for k in col..m {
                    g[r][k] -= factor * g[col][k];
                }
                rhs[r] -= factor * rhs[col];
            }
        }
    }
    Some((0..m).map(|i| rhs[i] / g[i][i]).collect())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Damped Gauss-Newton with step halving. Linear convergence with ratio ρ
/// signals a root of multiplicity about `1/(1-ρ)`; the correspondingly
/// scaled (Schröder) step is tried first.
fn newton<S: NewtonSystem>(sys: &S, mut z: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let (mut f, mut jac, mut scratch) = (Vec::with_capacity(5), Vec::with_capacity(5), Vec::with_capacity(5));
    let merit = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    sys.residual(&z, &mut f);
    let mut m0 = merit(&f);
    let mut prev_step: Option<f64> = None;
    for it in 0..NEWTON_MAX_ITER {
        if m0 == 0.0 {
            break;
        }
        // hopeless starts are abandoned early
        if it == 10 && max_abs(&f) > 1e-4 {
            return None;
        }
        sys.jacobian(&z, &mut jac);
        let step = gauss_newton_step(&jac, &f)?;
        let snorm = max_abs(&step);
        // below the resolution of the iterate
        if snorm <= 4.0 * f64::EPSILON * z.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
            break;
        }
        let mult = match prev_step {
            Some(p) if p > 0.0 && (0.3..0.99).contains(&(snorm / p)) => (1.0 / (1.0 - snorm / p)).min(16.0),
            _ => 1.0,
        };
        prev_step = Some(snorm);
        let scaled = (mult > 1.5).then_some(mult);
        let mut accepted = false;
        for lambda in scaled.into_iter().chain((0..12).map(|i| 0.5f64.powi(i))) {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(zi, s)| zi + lambda * s).collect();
            sys.residual(&trial, &mut scratch);
            let mt = merit(&scratch);
            if mt < m0 {
                z = trial;
                std::mem::swap(&mut f, &mut scratch);
                m0 = mt;
                accepted = true;
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    Some((z, max_abs(&f)))
}

fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let th = golden * i as f64;
            [r * th.cos(), y, r * th.sin()]
        })
        .collect()
}

fn cluster_key(x: &FrameVector) -> Option<(FrameVector, [i64; 3])> {
    let (v, _) = x.projective_normal()?;
    let key = v.0.map(|c| (c / CLUSTER_TOL).round() as i64);
    Some((v, key))
}

/// Nearly null unit vectors are re-solved on the exactly null chart.
const NEAR_NULL: f64 = 1e-6;
/// Newton stalls short of a degenerate null root; such points are re-solved
/// on the cone when they lie this close to it.
const NEAR_CONE: f64 = 1e-2;
/// Residual reached at simple roots; anything above signals a stalled solve.
const CONVERGED: f64 = 1e-13;

/// Independent numeric search for geodesic directions: Fibonacci-sphere
/// starts with Gaussian jitter refined by Newton, plus a scan of the light
/// cone for isolated null roots. Roots that land (nearly) on the light cone
/// are polished on an exactly null parametrisation. Results are
/// projectively normalised, clustered and deterministic for a fixed seed.
pub fn numeric_search(
    c: &StructureConstants,
    l_basis: &[SkewMap],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Vec<GeodesicVector> {
    let sys = ResidualSystem::new(c, l_basis);
    let nl = l_basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = 0.5 / (samples.max(1) as f64).sqrt();
    let starts: Vec<[f64; 3]> = fibonacci_sphere(samples.max(1))
        .into_iter()
        .map(|p| {
            let q: [f64; 3] = std::array::from_fn(|i| p[i] + sigma * rng.sample::<f64, _>(StandardNormal));
            let m = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
            q.map(|v| v / m)
        })
        .collect();

    let accept = |x: FrameVector| -> Option<GeodesicVector> {
        let (x, _) = x.projective_normal()?;
        is_geodesic_vector(c, l_basis, &x, tol.max(RESIDUAL_TOL))
    };
    let on_cone = |x: &FrameVector| -> Option<FrameVector> {
        let (chart, u) = ConeChart::locate(&sys, x);
        let u = if nl == 0 {
            let scalar = ConeScalar(chart);
            let (z, res) = newton(&scalar, vec![u])?;
            (res <= tol).then_some(z[0])?
        } else {
            let mut z = vec![0.0; 2 + nl];
            z[0] = u;
            let (z, res) = newton(&chart, z)?;
            (res <= tol).then_some(z[0])?
        };
        Some(ConeChart::locate(&sys, x).0.direction(u))
    };

    let mut found: Vec<GeodesicVector> = starts
        .par_iter()
        .filter_map(|p| {
            let mut z = vec![0.0; 4 + nl];
            z[..3].copy_from_slice(p);
            let (z, res) = newton(&SphereChart(&sys), z)?;
            if res > tol {
                return None;
            }
            let x = FrameVector::new(z[0], z[1], z[2]);
            let q = x.quadratic().abs();
            let x = if q <= NEAR_NULL || (q <= NEAR_CONE && res > CONVERGED) { on_cone(&x).unwrap_or(x) } else { x };
            accept(x)
        })
        .collect();

    // light-cone scan: local minima of the best-fit residual along the circle
    // (one sheet suffices projectively)
    let m = NULL_SCAN_POINTS;
    let pts: Vec<FrameVector> = (0..m)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / m as f64;
            FrameVector::new(th.cos(), th.sin(), 1.0) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|x| {
            let mut cols: Vec<[f64; 3]> = vec![std::array::from_fn(|i| -inner(x, &FrameVector::basis(i)))];
            for a in l_basis {
                cols.push(std::array::from_fn(|i| inner(&a.apply(&FrameVector::basis(i)), x)));
            }
            let base = geodesic_residual(c, &[], x, 0.0, &[]);
            let a: Vec<Vec<f64>> = (0..3).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
            let b: Vec<f64> = base.iter().map(|v| -v).collect();
            lstsq(&a, &b).1
        })
        .collect();
    let minima: Vec<usize> = (0..m)
        .filter(|&j| {
            let (l, r) = ((j + m - 1) % m, (j + 1) % m);
            vals[j] <= vals[l] && vals[j] <= vals[r]
        })
        .collect();
    found.extend(minima.par_iter().filter_map(|&j| on_cone(&pts[j]).and_then(accept)).collect::<Vec<_>>());

    let mut seen = HashSet::new();
    let mut out: Vec<(FrameVector, [i64; 3], GeodesicVector)> = Vec::new();
    for gv in found {
        if let Some((v, key)) = cluster_key(&gv.xm) {
            if seen.insert(key) {
                out.push((v, key, gv));
            }
        }
    }
    out.sort_by_key(|a| a.1);
    out.into_iter().map(|(_, _, gv)| gv).collect()
}

/// Rank of the m-components of numerically found geodesic vectors.
pub fn numeric_rank(found: &[GeodesicVector]) -> usize {
    let v: Vec<[f64; 3]> = found.iter().map(|g| g.xm.0).collect();
    vector_rank(&v, 1e-6)
}

pub fn numeric_has_null(found: &[GeodesicVector]) -> bool {
    found.iter().any(|g| g.causal == CausalCharacter::Null)
}

// ---------------------------------------------------------------------------
// g.o. and naturally reductive classification

/// Reductive split `m = {X + φ(X)}` of `g ⊕ h`, `h` spanned by skew derivations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductiveSplit {
    pub h_basis: Vec<SkewMap>,
    /// `φ(e_i)` as a skew map in `h`.
    pub phi: [SkewMap; 3],
}

impl ReductiveSplit {
    pub fn trivial() -> Self {
        ReductiveSplit { h_basis: Vec::new(), phi: [SkewMap::new(0.0, 0.0, 0.0); 3] }
    }
}

fn phi_of(split: &ReductiveSplit, x: &FrameVector) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        let p = split.phi[i].matrix();
        for r in 0..3 {
            for s in 0..3 {
                m[r][s] += x.0[i] * p[r][s];
            }
        }
    }
    m
}

fn mat_apply(m: &[[f64; 3]; 3], x: &FrameVector) -> FrameVector {
    FrameVector(std::array::from_fn(|i| (0..3).map(|j| m[i][j] * x.0[j]).sum()))
}

/// `m`-component (as an element of `g`) of `[X + φX, Y + φY]`.
fn m_bracket(c: &StructureConstants, split: &ReductiveSplit, x: &FrameVector, y: &FrameVector) -> FrameVector {
    c.bracket(x, y) + mat_apply(&phi_of(split, x), y) - mat_apply(&phi_of(split, y), x)
}

/// Residuals of the reductivity and natural-reductivity conditions.
fn nr_residuals(c: &StructureConstants, split: &ReductiveSplit) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let (ei, ej, ek) = (FrameVector::basis(i), FrameVector::basis(j), FrameVector::basis(k));
                out.push(inner(&m_bracket(c, split, &ei, &ej), &ek) + inner(&m_bracket(c, split, &ei, &ek), &ej));
            }
        }
    }
    // [A, φ(Y)] = φ(A Y) for A in h
    for a in &split.h_basis {
        let am = a.matrix();
        for i in 0..3 {
            let p = split.phi[i].matrix();
            let ay = mat_apply(&am, &FrameVector::basis(i));
            let rhs = phi_of(split, &ay);
            for r in 0..3 {
                for s in 0..3 {
                    let comm: f64 = (0..3).map(|t| am[r][t] * p[t][s] - p[r][t] * am[t][s]).sum();
                    out.push(comm - rhs[r][s]);
                }
            }
        }
    }
    out
}

/// Checks `<[X,Y]_m, Z> + <[X,Z]_m, Y> = 0` on the frame for a reductive split.
pub fn check_nr_condition(c: &StructureConstants, split: &ReductiveSplit, tol: f64) -> bool {
    nr_residuals(c, split).iter().all(|r| r.abs() <= tol * param_scale(c))
}

/// Searches for a naturally reductive split with `h ⊆ l`, solving the
/// conditions (linear in `φ`) by least squares.
pub fn find_nr_split(c: &StructureConstants, l_basis: &[SkewMap], tol: f64) -> Option<ReductiveSplit> {
    let m = l_basis.len();
    let build = |p: &[f64]| {
        let phi = std::array::from_fn(|i| {
            let mut v = [0.0; 3];
            for (j, a) in l_basis.iter().enumerate() {
                for (vc, ac) in v.iter_mut().zip(a.coords()) {
                    *vc += p[i * m + j] * ac;
                }
            }
            SkewMap::from_coords(v)
        });
        ReductiveSplit { h_basis: l_basis.to_vec(), phi }
    };
    let zero = vec![0.0; 3 * m];
    let r0 = nr_residuals(c, &build(&zero));
    if m == 0 {
        return check_nr_condition(c, &build(&zero), tol).then(|| build(&zero));
    }
    let cols: Vec<Vec<f64>> = (0..3 * m)
        .map(|u| {
            let mut p = zero.clone();
            p[u] = 1.0;
            nr_residuals(c, &build(&p)).iter().zip(&r0).map(|(a, b)| a - b).collect()
        })
        .collect();
    let a: Vec<Vec<f64>> = (0..r0.len()).map(|row| cols.iter().map(|col| col[row]).collect()).collect();
    let b: Vec<f64> = r0.iter().map(|v| -v).collect();
    let (p, _) = lstsq(&a, &b);
    let split = build(&p);
    check_nr_condition(c, &split, tol).then_some(split)
}

/// Membership in the g.o. loci for the unimodular families; non-unimodular
/// instances are g.o. only when symmetric.
pub fn go_by_classification(instance: &AlgebraInstance) -> bool {
    if is_symmetric_by_params(instance) {
        return true;
    }
    let d = instance.params.decider();
    let p = instance.params.rationals();
    let (a, b, g) = (&p.alpha, &p.beta, &p.gamma);
    let eq = |x: &Rational, y: &Rational| d.is_zero(&(x - y));
    match instance.tag {
        FamilyTag::G3 => (eq(a, b) && !eq(a, g)) || (eq(a, g) && !eq(a, b)) || (eq(b, g) && !eq(b, a)),
        FamilyTag::G4 => {
            let eps = Rational::from_integer(instance.params.epsilon.unwrap_or(1).into());
            eq(a, &(b - eps))
        }
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoReport {
    pub is_go: bool,
    pub is_naturally_reductive: bool,
    pub symmetric: bool,
    /// Classification shortcut.
    pub go_by_classification: bool,
    /// Every sampled direction admitted a completion.
    pub go_by_sampling: bool,
    pub paths_agree: bool,
    pub independent_count: usize,
    pub has_null_homogeneous: bool,
    pub witnesses: Vec<GeodesicVector>,
    pub failures: Vec<FrameVector>,
    pub nr_split: Option<ReductiveSplit>,
}

const MAX_LISTED: usize = 5;

/// g.o. classification by the shortcut, cross-checked by sampling tangent
/// directions for a geodesic-vector completion over `l`.
pub fn is_go(instance: &AlgebraInstance, samples: usize, tol: f64, seed: u64) -> Result<GoReport, GeodesicError> {
    let c = &instance.constants;
    let shortcut = go_by_classification(instance);
    if is_symmetric_by_params(instance) {
        return Ok(GoReport {
            is_go: true,
            is_naturally_reductive: true,
            symmetric: true,
            go_by_classification: true,
            go_by_sampling: true,
            paths_agree: true,
            independent_count: 3,
            has_null_homogeneous: true,
            witnesses: Vec::new(),
            failures: Vec::new(),
            nr_split: None,
        });
    }
    let l = compute_l_instance(instance).basis;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<FrameVector> = (0..samples)
        .map(|_| FrameVector(std::array::from_fn(|_| rng.sample(StandardNormal))))
        .collect();
    let results: Vec<Option<GeodesicVector>> =
        dirs.par_iter().map(|x| is_geodesic_vector(c, &l, x, tol)).collect();
    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    for (x, r) in dirs.iter().zip(results) {
        match r {
            Some(gv) if witnesses.len() < MAX_LISTED => witnesses.push(gv),
            Some(_) => {}
            None => failures.push(*x),
        }
    }
    let go_by_sampling = failures.is_empty();
    failures.truncate(MAX_LISTED);
    let nr_split = find_nr_split(c, &l, 1e-8);
    let (independent_count, has_null) = if instance.tag.is_unimodular_family() {
        let found = numeric_search(c, &l, 2000, RESIDUAL_TOL, seed);
        (numeric_rank(&found), numeric_has_null(&found))
    } else {
        let fams = enumerate_families(instance)?;
        (families_rank(&fams), families_have_null(&fams))
    };
    Ok(GoReport {
        is_go: go_by_sampling,
        is_naturally_reductive: nr_split.is_some(),
        symmetric: false,
        go_by_classification: shortcut,
        go_by_sampling,
        paths_agree: shortcut == go_by_sampling,
        independent_count,
        has_null_homogeneous: has_null,
        witnesses,
        failures,
        nr_split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilyParams};

    fn inst(tag: FamilyTag, a: f64, b: f64, g: f64, d: f64) -> AlgebraInstance {
        build_family(tag, FamilyParams::float(a, b, g, d)).unwrap()
    }

    fn exact(tag: FamilyTag, p: [&str; 4]) -> AlgebraInstance {
        build_family(tag, FamilyParams::parse_exact(p[0], p[1], p[2], p[3]).unwrap()).unwrap()
    }

    #[test]
    fn degenerate_null_root_is_resolved() {
        // γ = 0: e2 ± e3 is a high-multiplicity root of the null equation
        let g7 = exact(FamilyTag::G7, ["8", "0", "0", "-1"]);
        let fams = enumerate_families(&g7).unwrap();
        let found = numeric_search(&g7.constants, &[], 4000, RESIDUAL_TOL, 5);
        assert!(!found.is_empty());
        for g in &found {
            assert!(distance_to_families(&fams, &g.xm) <= 1e-6, "{:?}", g.xm);
        }
    }

    #[test]
    fn residual_examples() {
        let g5 = inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0);
        assert_eq!(geodesic_residual(&g5.constants, &[], &FrameVector::basis(2), 0.0, &[]), [0.0; 3]);
        assert_eq!(geodesic_residual(&g5.constants, &[], &FrameVector::basis(0), 0.0, &[]), [0.0, 0.0, 1.0]);
        assert_eq!(geodesic_residual(&g5.constants, &[], &FrameVector::ZERO, 0.0, &[]), [0.0; 3]);
    }

    #[test]
    fn geodesic_vector_examples() {
        let g7 = inst(FamilyTag::G7, 0.0, 0.0, 1.0, 1.0);
        let gv = is_geodesic_vector(&g7.constants, &[], &FrameVector::basis(0), RESIDUAL_TOL).unwrap();
        assert_eq!(gv.k, 0.0);
        let g5 = inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0);
        assert!(is_geodesic_vector(&g5.constants, &[], &FrameVector::basis(0), RESIDUAL_TOL).is_none());
        // (α,β,γ,δ) = (1,2,0,0) lies on the symmetric locus γ = δ = 0 ≠ α; the
        // Pythagorean row still gives a null geodesic vector there
        let g7s = inst(FamilyTag::G7, 1.0, 2.0, 0.0, 0.0);
        let x = FrameVector::new(4.0, 3.0, 5.0);
        let gv = is_geodesic_vector(&g7s.constants, &[], &x, RESIDUAL_TOL).unwrap();
        assert_eq!(gv.causal, CausalCharacter::Null);
        assert!(nabla_parallel_check(&g7s.constants, &gv, 1e-12));
        // non-symmetric (δ ≠ α): (2β(α-δ), β²-(α-δ)², β²+(α-δ)²) = (-8, 0, 8)
        let g7b = inst(FamilyTag::G7, 1.0, 2.0, 0.0, 3.0);
        let gv = is_geodesic_vector(&g7b.constants, &[], &FrameVector::new(-8.0, 0.0, 8.0), RESIDUAL_TOL).unwrap();
        assert_eq!(gv.causal, CausalCharacter::Null);
        assert!(gv.k.abs() > 1e-6);
        assert!(nabla_parallel_check(&g7b.constants, &gv, 1e-12));
        let e3 = GeodesicVector { xm: FrameVector::basis(2), k: 0.0, isotropy_part: vec![], causal: CausalCharacter::Timelike };
        assert!(nabla_parallel_check(&g5.constants, &e3, 1e-12));
        let e1 = GeodesicVector { xm: FrameVector::basis(0), k: 0.0, isotropy_part: vec![], causal: CausalCharacter::Spacelike };
        assert!(!nabla_parallel_check(&g5.constants, &e1, 1e-8));
    }

    #[test]
    fn residual_scales_quadratically() {
        let g = inst(FamilyTag::G6, 1.0, 2.0, 4.0, 2.0);
        let x = FrameVector::new(0.3, -1.1, 0.7);
        let r1 = geodesic_residual(&g.constants, &[], &x, 0.4, &[]);
        let r2 = geodesic_residual(&g.constants, &[], &(x * 3.0), 1.2, &[]);
        for i in 0..3 {
            assert!((r2[i] - 9.0 * r1[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn g5_enumeration_example() {
        let fams = enumerate_families(&exact(FamilyTag::G5, ["1", "0", "0", "2"])).unwrap();
        let kinds: Vec<FamilyKind> = fams.iter().map(|f| f.kind).collect();
        assert_eq!(kinds, vec![FamilyKind::Axis, FamilyKind::PlaneConic, FamilyKind::NullCone]);
        assert!(fams[1].pieces.is_empty());
        assert_eq!(fams[2].pieces.len(), 4);
        for x in [[1.0, 0.0, 1.0], [1.0, 0.0, -1.0], [0.0, 1.0, 1.0], [0.0, 1.0, -1.0]] {
            assert!(fams[2].direction_distance(&FrameVector(x)) < 1e-12);
        }
        assert_eq!(families_rank(&fams), 3);
    }

    #[test]
    fn g7_enumeration_example() {
        // β = 0 collapses the Pythagorean row onto e2 - e3
        let fams = enumerate_families(&exact(FamilyTag::G7, ["1", "0", "0", "3"])).unwrap();
        assert_eq!(fams.len(), 3);
        assert!(fams[2].direction_distance(&FrameVector::new(0.0, 1.0, -1.0)) < 1e-12);
        assert_eq!(families_rank(&fams), 2);
        assert!(matches!(
            enumerate_families(&exact(FamilyTag::G7, ["1", "0", "0", "0"])),
            Err(GeodesicError::SymmetricInstance(FamilyTag::G7))
        ));
        // (0,0,1,1) is on the symmetric locus β = α, γ = δ; (0,0,1,2) is not
        let g6 = enumerate_families(&exact(FamilyTag::G6, ["0", "0", "1", "2"])).unwrap();
        assert!(g6.iter().any(|f| f.label.starts_with("x1 e1 + x2 (delta e2 + gamma e3)")));
        assert!(matches!(
            enumerate_families(&exact(FamilyTag::G3, ["1", "1", "2", "0"])),
            Err(GeodesicError::UnsupportedFamily(FamilyTag::G3))
        ));
        assert!(matches!(
            enumerate_families(&exact(FamilyTag::G5, ["1", "0", "0", "1"])),
            Err(GeodesicError::SymmetricInstance(FamilyTag::G5))
        ));
    }

    #[test]
    fn counts_and_null_examples() {
        let g5 = exact(FamilyTag::G5, ["1", "2", "-4", "2"]);
        assert_eq!(count_independent(&g5).unwrap(), 1);
        assert!(!has_null_homogeneous(&g5).unwrap());
        assert_eq!(count_branch(&g5).unwrap(), CountBranch::G5CaseII);
        assert_eq!(count_independent(&exact(FamilyTag::G5, ["1", "0", "0", "2"])).unwrap(), 3);
        let g7 = exact(FamilyTag::G7, ["1", "2", "0", "3"]);
        assert_eq!(count_independent(&g7).unwrap(), 2);
        assert!(has_null_homogeneous(&g7).unwrap());
        assert!(has_null_homogeneous(&exact(FamilyTag::G6, ["0", "0", "1", "2"])).unwrap());
    }

    #[test]
    fn float_boundary_is_refused() {
        // the null-row discriminant (δ-α)² = 1e-12 sits inside the ambiguity band
        let g5 = inst(FamilyTag::G5, 1.0, 0.0, 0.0, 1.0 + 1e-6);
        let err = count_independent(&g5);
        assert!(matches!(err, Err(GeodesicError::Ambiguous(_))), "{err:?}");
    }

    #[test]
    fn numeric_search_examples() {
        let g5 = inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0);
        let found = numeric_search(&g5.constants, &[], 2000, RESIDUAL_TOL, 7);
        assert_eq!(found.len(), 1);
        assert!((found[0].xm - FrameVector::basis(2)).max_abs() < 1e-9);

        let g5b = inst(FamilyTag::G5, 1.0, 0.0, 0.0, 2.0);
        let fams = enumerate_families(&g5b).unwrap();
        let found = numeric_search(&g5b.constants, &[], 2000, RESIDUAL_TOL, 7);
        assert_eq!(found.len(), 5);
        for gv in &found {
            assert!(distance_to_families(&fams, &gv.xm) < 1e-6);
        }
        let again = numeric_search(&g5b.constants, &[], 2000, RESIDUAL_TOL, 7);
        assert_eq!(found, again);
    }

    #[test]
    fn abelian_everything_is_geodesic() {
        let c = StructureConstants::zero();
        let found = numeric_search(&c, &[], 200, RESIDUAL_TOL, 1);
        assert!(found.len() > 100);
    }

    #[test]
    fn go_examples() {
        let g3 = inst(FamilyTag::G3, 1.0, 1.0, 2.0, 0.0);
        let rep = is_go(&g3, 200, RESIDUAL_TOL, 3).unwrap();
        assert!(rep.is_go && rep.is_naturally_reductive && rep.paths_agree, "{rep:?}");
        let g5 = inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0);
        let rep = is_go(&g5, 200, RESIDUAL_TOL, 3).unwrap();
        assert!(!rep.is_go && !rep.is_naturally_reductive && !rep.failures.is_empty());
        let g4 = build_family(FamilyTag::G4, FamilyParams::float(1.0, 2.0, 0.0, 0.0).with_epsilon(1)).unwrap();
        let rep = is_go(&g4, 200, RESIDUAL_TOL, 3).unwrap();
        assert!(rep.is_go && rep.is_naturally_reductive, "{rep:?}");
    }

    #[test]
    fn nr_condition_examples() {
        let t = ReductiveSplit::trivial();
        assert!(check_nr_condition(&inst(FamilyTag::G3, 1.0, 1.0, 1.0, 0.0).constants, &t, 1e-12));
        assert!(!check_nr_condition(&inst(FamilyTag::G3, 1.0, 1.0, 2.0, 0.0).constants, &t, 1e-12));
        assert!(check_nr_condition(&StructureConstants::zero(), &t, 1e-12));
    }
}
