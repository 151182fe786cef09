//! The canonical Lorentzian Lie algebras `g1`–`g7`, their parameter
//! constraints, the isomorphism invariant `D`, the symmetric parameter loci
//! of the non-unimodular families and group identification.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{is_unimodular, jacobi_residual, StructureConstants};
use crate::connection::{is_locally_symmetric, max_nabla_riemann};
use crate::exact::{lit, parse_rational, rational_from_f64, rational_to_f64, Decider, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 7] =
        [FamilyTag::G1, FamilyTag::G2, FamilyTag::G3, FamilyTag::G4, FamilyTag::G5, FamilyTag::G6, FamilyTag::G7];

    pub fn is_unimodular_family(self) -> bool {
        matches!(self, FamilyTag::G1 | FamilyTag::G2 | FamilyTag::G3 | FamilyTag::G4)
    }

    /// Parameter names the bracket table depends on.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            FamilyTag::G1 => &["alpha", "beta"],
            FamilyTag::G2 | FamilyTag::G3 => &["alpha", "beta", "gamma"],
            FamilyTag::G4 => &["alpha", "beta", "epsilon"],
            _ => &["alpha", "beta", "gamma", "delta"],
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = *self as usize + 1;
        write!(f, "g{n}")
    }
}

impl FromStr for FamilyTag {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g1" => Ok(FamilyTag::G1),
            "g2" => Ok(FamilyTag::G2),
            "g3" => Ok(FamilyTag::G3),
            "g4" => Ok(FamilyTag::G4),
            "g5" => Ok(FamilyTag::G5),
            "g6" => Ok(FamilyTag::G6),
            "g7" => Ok(FamilyTag::G7),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FamilyError {
    #[error("unknown family {0:?} (expected g1..g7)")]
    UnknownFamily(String),
    #[error("{family}: constraint violated: {relation}")]
    ConstraintViolation { family: FamilyTag, relation: String },
    #[error("{family}: epsilon must be +1 or -1")]
    InvalidEpsilon { family: FamilyTag },
    #[error("{family}: missing parameter {name}")]
    MissingParameter { family: FamilyTag, name: &'static str },
    #[error("{family}: parameter {name}: {reason}")]
    InvalidParameter { family: FamilyTag, name: String, reason: String },
    #[error("{family}: bracket table fails the Jacobi identity (residual {residual:e})")]
    JacobiFailure { family: FamilyTag, residual: f64 },
    #[error("invariant D undefined: alpha+delta=0")]
    DivisionGuard,
}

/// Exact copies of the four real parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub delta: Rational,
}

/// Real parameters `α, β, γ, δ` and the sign `ε` (g4 only).
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: Option<i8>,
    exact: Option<ExactParams>,
}

impl FamilyParams {
    pub fn float(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        FamilyParams { alpha, beta, gamma, delta, epsilon: None, exact: None }
    }

    pub fn exact(alpha: Rational, beta: Rational, gamma: Rational, delta: Rational) -> Self {
        FamilyParams {
            alpha: rational_to_f64(&alpha),
            beta: rational_to_f64(&beta),
            gamma: rational_to_f64(&gamma),
            delta: rational_to_f64(&delta),
            epsilon: None,
            exact: Some(ExactParams { alpha, beta, gamma, delta }),
        }
    }

    /// Exact parameters from `"p/q"` or decimal literals.
    pub fn parse_exact(alpha: &str, beta: &str, gamma: &str, delta: &str) -> Result<Self, FamilyError> {
        let p = |name: &str, s: &str| {
            parse_rational(s).map_err(|e| FamilyError::InvalidParameter {
                family: FamilyTag::G5,
                name: name.to_string(),
                reason: e.to_string(),
            })
        };
        Ok(Self::exact(p("alpha", alpha)?, p("beta", beta)?, p("gamma", gamma)?, p("delta", delta)?))
    }

    pub fn with_epsilon(mut self, epsilon: i8) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_values(&self) -> Option<&ExactParams> {
        self.exact.as_ref()
    }

    /// Rational view of the parameters; float inputs convert exactly.
    pub fn rationals(&self) -> ExactParams {
        match &self.exact {
            Some(e) => e.clone(),
            None => ExactParams {
                alpha: rational_from_f64(self.alpha),
                beta: rational_from_f64(self.beta),
                gamma: rational_from_f64(self.gamma),
                delta: rational_from_f64(self.delta),
            },
        }
    }

    pub fn decider(&self) -> Decider {
        Decider::new(self.is_exact())
    }

    pub fn values(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Multiplies `α, β, γ, δ` by `s`; exact parameters stay exact.
    pub fn scaled(&self, s: &Rational) -> Self {
        let e = self.rationals();
        let mut out = Self::exact(&e.alpha * s, &e.beta * s, &e.gamma * s, &e.delta * s);
        out.epsilon = self.epsilon;
        if !self.is_exact() {
            out.exact = None;
        }
        out
    }

    pub fn scale(&self) -> f64 {
        self.values().iter().fold(1.0f64, |m, x| m.max(x.abs()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraInstance {
    pub tag: FamilyTag,
    pub params: FamilyParams,
    pub constants: StructureConstants,
}

impl AlgebraInstance {
    pub fn is_unimodular(&self) -> bool {
        is_unimodular(&self.constants, 1e-12 * self.params.scale())
    }

    /// `max |∇R|` for this instance.
    pub fn max_nabla_riemann(&self) -> f64 {
        max_nabla_riemann(&self.constants)
    }

    /// Tolerance for `∇R = 0`, relative to the cube of the parameter scale.
    pub fn symmetry_tol(&self, tol: f64) -> f64 {
        tol * self.params.scale().powi(3)
    }
}

fn violation(family: FamilyTag, relation: &str) -> FamilyError {
    FamilyError::ConstraintViolation { family, relation: relation.to_string() }
}

/// Checks the per-family constraints of the normal forms.
pub fn validate(tag: FamilyTag, params: &FamilyParams) -> Result<(), FamilyError> {
    let d = params.decider();
    let p = params.rationals();
    match tag {
        FamilyTag::G1 if d.is_zero(&p.alpha) => Err(violation(tag, "alpha=0")),
        FamilyTag::G2 if d.is_zero(&p.gamma) => Err(violation(tag, "gamma=0")),
        FamilyTag::G4 => match params.epsilon {
            Some(1) | Some(-1) => Ok(()),
            _ => Err(FamilyError::InvalidEpsilon { family: tag }),
        },
        FamilyTag::G5 | FamilyTag::G6 | FamilyTag::G7 => {
            if d.is_zero(&(&p.alpha + &p.delta)) {
                return Err(violation(tag, "alpha+delta=0"));
            }
            let (rel, name) = match tag {
                FamilyTag::G5 => (&p.alpha * &p.gamma + &p.beta * &p.delta, "alpha*gamma+beta*delta!=0"),
                FamilyTag::G6 => (&p.alpha * &p.gamma - &p.beta * &p.delta, "alpha*gamma-beta*delta!=0"),
                _ => (&p.alpha * &p.gamma, "alpha*gamma!=0"),
            };
            let ok = if params.is_exact() {
                rel.is_zero()
            } else {
                rational_to_f64(&rel).abs() <= 1e-12 * params.scale().powi(2)
            };
            if ok {
                Ok(())
            } else {
                Err(violation(tag, name))
            }
        }
        _ => Ok(()),
    }
}

/// The three basic brackets `[e1,e2]`, `[e1,e3]`, `[e2,e3]` over any scalar.
pub fn bracket_rows<T: Scalar>(tag: FamilyTag, p: [T; 4], epsilon: i8) -> [[T; 3]; 3] {
    let [a, b, g, d] = p;
    let z = || T::zero();
    match tag {
        FamilyTag::G1 => [[a.clone(), z(), -b.clone()], [-a.clone(), -b.clone(), z()], [b, a.clone(), a]],
        // [e1,e3] = -βe2 - γe3: the sign that makes the table a unimodular Lie algebra
        FamilyTag::G2 => [[z(), g.clone(), -b.clone()], [z(), -b, -g], [a, z(), z()]],
        FamilyTag::G3 => [[z(), z(), -g], [z(), -b, z()], [a, z(), z()]],
        FamilyTag::G4 => {
            let eps: T = lit(i64::from(epsilon));
            [[z(), -T::one(), eps.clone() + eps - b.clone()], [z(), -b, T::one()], [a, z(), z()]]
        }
        FamilyTag::G5 => [[z(), z(), z()], [a, b, z()], [g, d, z()]],
        FamilyTag::G6 => [[z(), a, b], [z(), g, d], [z(), z(), z()]],
        FamilyTag::G7 => [[-a.clone(), -b.clone(), -b.clone()], [a, b.clone(), b], [g, d.clone(), d]],
    }
}

/// Full antisymmetric table `c[i][j][k]` from the basic brackets.
pub fn bracket_table<T: Scalar>(rows: [[T; 3]; 3]) -> [[[T; 3]; 3]; 3] {
    let mut c: [[[T; 3]; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| T::zero())));
    for (n, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        for k in 0..3 {
            c[i][j][k] = rows[n][k].clone();
            c[j][i][k] = -rows[n][k].clone();
        }
    }
    c
}

/// Structure constants of a family, without validation.
pub fn structure_constants(tag: FamilyTag, params: &FamilyParams) -> StructureConstants {
    let [r12, r13, r23] = bracket_rows(tag, params.values(), params.epsilon.unwrap_or(1));
    StructureConstants::from_brackets(r12, r13, r23)
}

impl AlgebraInstance {
    /// Exact bracket table; float parameters convert exactly.
    pub fn rational_table(&self) -> [[[Rational; 3]; 3]; 3] {
        let e = self.params.rationals();
        bracket_table(bracket_rows(self.tag, [e.alpha, e.beta, e.gamma, e.delta], self.params.epsilon.unwrap_or(1)))
    }
}

pub fn build_family(tag: FamilyTag, params: FamilyParams) -> Result<AlgebraInstance, FamilyError> {
    validate(tag, &params)?;
    let constants = structure_constants(tag, &params);
    let residual = jacobi_residual(&constants);
    if residual > 1e-12 * params.scale().powi(2) {
        return Err(FamilyError::JacobiFailure { family: tag, residual });
    }
    Ok(AlgebraInstance { tag, params, constants })
}

pub fn invariant_d_exact(p: &ExactParams) -> Result<Rational, FamilyError> {
    let s = &p.alpha + &p.delta;
    if s.is_zero() {
        return Err(FamilyError::DivisionGuard);
    }
    let four = Rational::from_integer(4.into());
    Ok(four * (&p.alpha * &p.delta - &p.beta * &p.gamma) / (&s * &s))
}

/// `D = 4(αδ - βγ)/(α + δ)²`.
pub fn invariant_d(params: &FamilyParams) -> Result<f64, FamilyError> {
    let s = params.alpha + params.delta;
    if s == 0.0 || (!params.is_exact() && s.abs() <= 1e-12 * params.scale()) {
        return Err(FamilyError::DivisionGuard);
    }
    if params.is_exact() {
        return invariant_d_exact(&params.rationals()).map(|d| rational_to_f64(&d));
    }
    Ok(4.0 * (params.alpha * params.delta - params.beta * params.gamma) / (s * s))
}

/// Membership in the symmetric parameter loci of `g5`, `g6`, `g7`.
/// Returns `None` for the unimodular families.
pub fn symmetric_locus(tag: FamilyTag, params: &FamilyParams) -> Option<bool> {
    let d = params.decider();
    let p = params.rationals();
    let z = |x: &Rational| d.is_zero(x);
    let (a, b, g, dl) = (&p.alpha, &p.beta, &p.gamma, &p.delta);
    let hit = match tag {
        FamilyTag::G5 => {
            (z(a) && z(b) && z(g) && !z(dl))
                || (z(b) && z(g) && z(dl) && !z(a))
                || (z(&(b + g)) && z(&(a - dl)) && !z(a))
        }
        FamilyTag::G6 => {
            (z(a) && z(b) && z(g) && !z(dl))
                || (z(b) && z(g) && z(dl) && !z(a))
                || (z(&(b - g)) && z(&(a - dl)) && !z(a))
                || (z(&(b - a)) && z(&(g - dl)))
                || (z(&(b + a)) && z(&(g + dl)))
        }
        FamilyTag::G7 => (z(a) && z(g) && !z(dl)) || (z(g) && z(dl) && !z(a)) || (z(&(a - dl)) && z(g)),
        _ => return None,
    };
    Some(hit)
}

/// Symmetric-space test: exact loci for `g5`–`g7`, numeric `∇R = 0` for `g1`–`g4`.
pub fn is_symmetric_by_params(instance: &AlgebraInstance) -> bool {
    symmetric_locus(instance.tag, &instance.params)
        .unwrap_or_else(|| is_locally_symmetric(&instance.constants, instance.symmetry_tol(1e-9)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupName {
    #[serde(rename = "O(1,2) or SL(2,R)")]
    SlTwo,
    #[serde(rename = "SO(3) or SU(2)")]
    SuTwo,
    #[serde(rename = "E(2)")]
    Euclidean,
    #[serde(rename = "E(1,1)")]
    Poincare,
    #[serde(rename = "H3")]
    Heisenberg,
    #[serde(rename = "R^3")]
    Abelian,
    #[serde(rename = "non-unimodular solvable")]
    NonUnimodularSolvable,
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupName::SlTwo => "O(1,2) or SL(2,R)",
            GroupName::SuTwo => "SO(3) or SU(2)",
            GroupName::Euclidean => "E(2)",
            GroupName::Poincare => "E(1,1)",
            GroupName::Heisenberg => "H3",
            GroupName::Abelian => "R^3",
            GroupName::NonUnimodularSolvable => "non-unimodular solvable",
        };
        f.write_str(s)
    }
}

fn sgn(d: &Decider, x: &Rational) -> i8 {
    if d.is_zero(x) {
        0
    } else if x > &Rational::zero() {
        1
    } else {
        -1
    }
}

/// Identifies the simply connected group (up to the covering ambiguities
/// listed in the tables) carrying the given algebra.
pub fn identify_group(tag: FamilyTag, params: &FamilyParams) -> GroupName {
    let d = params.decider();
    let p = params.rationals();
    match tag {
        FamilyTag::G1 => {
            if d.is_zero(&p.beta) {
                GroupName::Poincare
            } else {
                GroupName::SlTwo
            }
        }
        FamilyTag::G2 => {
            if d.is_zero(&p.alpha) {
                GroupName::Poincare
            } else {
                GroupName::SlTwo
            }
        }
        FamilyTag::G3 => {
            // [e2,e3] = λ1 e1, [e3,e1] = λ2 e2, [e1,e2] = λ3 e3 with λ = (α, β, -γ):
            // the group depends on the signs of λ up to order and overall sign.
            let lam = [sgn(&d, &p.alpha), sgn(&d, &p.beta), -sgn(&d, &p.gamma)];
            let pos = lam.iter().filter(|&&s| s > 0).count();
            let neg = lam.iter().filter(|&&s| s < 0).count();
            let (more, fewer) = (pos.max(neg), pos.min(neg));
            match (more, fewer) {
                (0, 0) => GroupName::Abelian,
                (1, 0) => GroupName::Heisenberg,
                (1, 1) => GroupName::Poincare,
                (2, 0) => GroupName::Euclidean,
                (3, 0) => GroupName::SuTwo,
                _ => GroupName::SlTwo,
            }
        }
        FamilyTag::G4 => {
            let eps = params.epsilon.unwrap_or(1);
            let beta_is_eps = d.is_zero(&(&p.beta - Rational::from_integer(eps.into())));
            let a = sgn(&d, &p.alpha);
            match (a, beta_is_eps) {
                (0, true) => GroupName::Heisenberg,
                (0, false) => GroupName::Poincare,
                (_, false) => GroupName::SlTwo,
                (s, true) => {
                    if s == eps {
                        GroupName::Euclidean
                    } else {
                        GroupName::Poincare
                    }
                }
            }
        }
        _ => GroupName::NonUnimodularSolvable,
    }
}

/// Parameter value as it appears in an algebra specification document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamInput {
    Number(f64),
    Text(String),
}

/// `{"family": "g5", "alpha": …, "beta": …, "gamma": …, "delta": …, "epsilon": …}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ParamInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ParamInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ParamInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<ParamInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<ParamInput>,
}

enum Parsed {
    Exact(Rational),
    Float(f64),
}

fn parse_input(tag: FamilyTag, name: &str, v: &ParamInput) -> Result<Parsed, FamilyError> {
    let bad = |reason: String| FamilyError::InvalidParameter { family: tag, name: name.to_string(), reason };
    match v {
        ParamInput::Number(x) if !x.is_finite() => Err(bad("not finite".into())),
        ParamInput::Number(x) if x.fract() == 0.0 => Ok(Parsed::Exact(rational_from_f64(*x))),
        ParamInput::Number(x) => Ok(Parsed::Float(*x)),
        ParamInput::Text(s) => match parse_rational(s) {
            Ok(r) => Ok(Parsed::Exact(r)),
            Err(_) => s
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Parsed::Float)
                .ok_or_else(|| bad(format!("cannot parse {s:?} as a number"))),
        },
    }
}

impl AlgebraSpec {
    /// Resolves the document into a validated instance. Integer and
    /// rational-literal parameters keep the instance in exact mode; any
    /// non-integer JSON number switches it to float mode.
    pub fn to_instance(&self) -> Result<AlgebraInstance, FamilyError> {
        let tag: FamilyTag = self.family.parse()?;
        let needed = tag.parameter_names();
        let slots: [(&'static str, &Option<ParamInput>); 4] =
            [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma), ("delta", &self.delta)];
        let mut exact = true;
        let mut vals: Vec<Rational> = Vec::with_capacity(4);
        let mut floats = [0.0; 4];
        for (i, (name, slot)) in slots.iter().enumerate() {
            let parsed = match slot {
                Some(v) => parse_input(tag, name, v)?,
                None if needed.contains(name) => return Err(FamilyError::MissingParameter { family: tag, name }),
                None => Parsed::Exact(Rational::zero()),
            };
            match parsed {
                Parsed::Exact(r) => {
                    floats[i] = rational_to_f64(&r);
                    vals.push(r);
                }
                Parsed::Float(x) => {
                    exact = false;
                    floats[i] = x;
                    vals.push(rational_from_f64(x));
                }
            }
        }
        let mut params = if exact {
            let mut it = vals.into_iter();
            let mut next = || it.next().unwrap_or_else(Rational::zero);
            FamilyParams::exact(next(), next(), next(), next())
        } else {
            FamilyParams::float(floats[0], floats[1], floats[2], floats[3])
        };
        if tag == FamilyTag::G4 {
            let eps = match &self.epsilon {
                None => return Err(FamilyError::MissingParameter { family: tag, name: "epsilon" }),
                Some(v) => match parse_input(tag, "epsilon", v)? {
                    Parsed::Exact(r) if r.is_one() => 1,
                    Parsed::Exact(r) if (-r.clone()).is_one() => -1,
                    _ => return Err(FamilyError::InvalidEpsilon { family: tag }),
                },
            };
            params = params.with_epsilon(eps);
        }
        build_family(tag, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FrameVector;

    fn f(a: f64, b: f64, g: f64, d: f64) -> FamilyParams {
        FamilyParams::float(a, b, g, d)
    }

    #[test]
    fn g5_table() {
        let inst = build_family(FamilyTag::G5, f(1.0, 2.0, -4.0, 2.0)).unwrap();
        let c = &inst.constants;
        assert_eq!(c.basis_bracket(0, 1), FrameVector::ZERO);
        assert_eq!(c.basis_bracket(0, 2), FrameVector::new(1.0, 2.0, 0.0));
        assert_eq!(c.basis_bracket(1, 2), FrameVector::new(-4.0, 2.0, 0.0));
        assert!(!inst.is_unimodular());
    }

    #[test]
    fn g5_constraint_violation_names_relation() {
        let err = build_family(FamilyTag::G5, f(1.0, 0.0, 0.0, -1.0)).unwrap_err();
        assert_eq!(err, FamilyError::ConstraintViolation { family: FamilyTag::G5, relation: "alpha+delta=0".into() });
        assert!(matches!(
            build_family(FamilyTag::G5, f(1.0, 1.0, 1.0, 1.0)),
            Err(FamilyError::ConstraintViolation { .. })
        ));
        assert!(matches!(build_family(FamilyTag::G1, f(0.0, 1.0, 0.0, 0.0)), Err(FamilyError::ConstraintViolation { .. })));
        assert!(matches!(build_family(FamilyTag::G2, f(1.0, 1.0, 0.0, 0.0)), Err(FamilyError::ConstraintViolation { .. })));
        assert!(matches!(build_family(FamilyTag::G4, f(1.0, 1.0, 0.0, 0.0)), Err(FamilyError::InvalidEpsilon { .. })));
    }

    #[test]
    fn g7_table() {
        let inst = build_family(FamilyTag::G7, f(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(inst.constants.basis_bracket(0, 1), FrameVector::ZERO);
        assert_eq!(inst.constants.basis_bracket(0, 2), FrameVector::ZERO);
        assert_eq!(inst.constants.basis_bracket(1, 2), FrameVector::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn unimodular_split() {
        for tag in FamilyTag::ALL {
            let p = match tag {
                FamilyTag::G5 => f(1.0, 2.0, -4.0, 2.0),
                FamilyTag::G6 => f(1.0, 2.0, 4.0, 2.0),
                FamilyTag::G7 => f(0.0, 1.0, 2.0, 3.0),
                _ => f(1.5, -0.5, 2.5, 0.0).with_epsilon(-1),
            };
            let inst = build_family(tag, p).unwrap();
            assert_eq!(inst.is_unimodular(), tag.is_unimodular_family(), "{tag}");
        }
    }

    #[test]
    fn invariant_d_values() {
        let p = FamilyParams::parse_exact("1", "2", "-4", "2").unwrap();
        assert_eq!(invariant_d_exact(&p.rationals()).unwrap(), Rational::new(40.into(), 9.into()));
        assert!((invariant_d(&f(1.0, 2.0, -4.0, 2.0)).unwrap() - 40.0 / 9.0).abs() < 1e-15);
        assert_eq!(invariant_d(&f(1.0, 0.0, 0.0, 1.0)).unwrap(), 1.0);
        let (b, g, d) = (1.5, -0.75, 2.0);
        assert!((invariant_d(&f(0.0, b, g, d)).unwrap() - (-4.0 * b * g / (d * d))).abs() < 1e-15);
        assert_eq!(invariant_d(&f(1.0, 0.0, 0.0, -1.0)), Err(FamilyError::DivisionGuard));
    }

    #[test]
    fn symmetric_loci_examples() {
        let sym = |tag, p| symmetric_locus(tag, &p).unwrap();
        assert!(sym(FamilyTag::G5, f(1.0, 0.0, 0.0, 1.0)));
        assert!(!sym(FamilyTag::G5, f(1.0, 2.0, -4.0, 2.0)));
        assert!(sym(FamilyTag::G6, f(1.0, 0.0, 0.0, 0.0)));
        assert!(sym(FamilyTag::G6, f(2.0, -2.0, 3.0, -3.0)));
        assert!(sym(FamilyTag::G7, f(1.0, 5.0, 0.0, 1.0)));
        assert!(!sym(FamilyTag::G7, f(1.0, 0.0, 0.0, 2.0)));
    }

    #[test]
    fn group_tables() {
        let g3 = |a, b, c| identify_group(FamilyTag::G3, &f(a, b, c, 0.0));
        assert_eq!(g3(1.0, 1.0, 1.0), GroupName::SlTwo);
        assert_eq!(g3(1.0, -1.0, -1.0), GroupName::SlTwo);
        assert_eq!(g3(1.0, 1.0, -1.0), GroupName::SuTwo);
        assert_eq!(g3(1.0, 1.0, 0.0), GroupName::Euclidean);
        assert_eq!(g3(1.0, 0.0, -1.0), GroupName::Euclidean);
        assert_eq!(g3(1.0, -1.0, 0.0), GroupName::Poincare);
        assert_eq!(g3(1.0, 0.0, 1.0), GroupName::Poincare);
        assert_eq!(g3(1.0, 0.0, 0.0), GroupName::Heisenberg);
        assert_eq!(g3(0.0, 0.0, -1.0), GroupName::Heisenberg);
        assert_eq!(g3(0.0, 0.0, 0.0), GroupName::Abelian);

        let g4 = |e: i8, a, b| identify_group(FamilyTag::G4, &f(a, b, 0.0, 0.0).with_epsilon(e));
        assert_eq!(g4(1, 2.0, 3.0), GroupName::SlTwo);
        assert_eq!(g4(1, 0.0, 3.0), GroupName::Poincare);
        assert_eq!(g4(1, -1.0, 1.0), GroupName::Poincare);
        assert_eq!(g4(1, 1.0, 1.0), GroupName::Euclidean);
        assert_eq!(g4(1, 0.0, 1.0), GroupName::Heisenberg);
        assert_eq!(g4(-1, 2.0, 3.0), GroupName::SlTwo);
        assert_eq!(g4(-1, 0.0, 3.0), GroupName::Poincare);
        assert_eq!(g4(-1, 1.0, -1.0), GroupName::Poincare);
        assert_eq!(g4(-1, -1.0, -1.0), GroupName::Euclidean);
        assert_eq!(g4(-1, 0.0, -1.0), GroupName::Heisenberg);

        assert_eq!(identify_group(FamilyTag::G1, &f(2.0, 0.0, 0.0, 0.0)), GroupName::Poincare);
        assert_eq!(identify_group(FamilyTag::G1, &f(2.0, 1.0, 0.0, 0.0)), GroupName::SlTwo);
        assert_eq!(identify_group(FamilyTag::G2, &f(0.0, 1.0, 1.0, 0.0)), GroupName::Poincare);
        assert_eq!(identify_group(FamilyTag::G5, &f(1.0, 2.0, -4.0, 2.0)), GroupName::NonUnimodularSolvable);
    }

    #[test]
    fn spec_document_parsing() {
        let spec: AlgebraSpec =
            serde_json::from_str(r#"{"family":"g5","alpha":1,"beta":2,"gamma":"-4","delta":2}"#).unwrap();
        let inst = spec.to_instance().unwrap();
        assert!(inst.params.is_exact());
        let spec: AlgebraSpec =
            serde_json::from_str(r#"{"family":"g5","alpha":0.5,"beta":2,"gamma":-4,"delta":1}"#).unwrap();
        assert!(!spec.to_instance().unwrap().params.is_exact());
        let missing: AlgebraSpec = serde_json::from_str(r#"{"family":"g5","alpha":1,"beta":2,"gamma":-4}"#).unwrap();
        assert_eq!(
            missing.to_instance().unwrap_err(),
            FamilyError::MissingParameter { family: FamilyTag::G5, name: "delta" }
        );
        let g4: AlgebraSpec = serde_json::from_str(r#"{"family":"g4","alpha":1,"beta":2}"#).unwrap();
        assert!(matches!(g4.to_instance(), Err(FamilyError::MissingParameter { name: "epsilon", .. })));
        let g4: AlgebraSpec = serde_json::from_str(r#"{"family":"g4","alpha":1,"beta":2,"epsilon":-1}"#).unwrap();
        assert_eq!(g4.to_instance().unwrap().params.epsilon, Some(-1));
        assert!(serde_json::from_str::<AlgebraSpec>(r#"{"family":"g5","zeta":1}"#).is_err());
    }
}
