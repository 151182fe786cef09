//! Report assembly and serialization shared by the command-line front end.

use std::io;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::algebra::FrameVector;
use crate::exact::{format_rational, parse_rational, BoundaryAmbiguous, Rational, Sig17};
use crate::families::{
    identify_group, invariant_d, invariant_d_exact, is_symmetric_by_params, AlgebraInstance, AlgebraSpec,
    FamilyError, FamilyTag, GroupName, ParamInput,
};
use crate::geodesics::{
    count_summary, distance_to_families, enumerate_families, is_go, numeric_has_null, numeric_rank, numeric_search,
    GeodesicError, GeodesicFamily, GeodesicVector, GoReport,
};
use crate::isotropy::{compute_l_instance, isotropy_algebra, isotropy_report, IsotropyReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Directions listed in a geodesics report (the CSV output lists all).
const LISTED_DIRECTIONS: usize = 20;
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Ambiguous(#[from] BoundaryAmbiguous),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ReportError {
    /// Process exit code: 2 for bad input, 1 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Input(_) | ReportError::Family(_) | ReportError::Ambiguous(_) => 2,
            ReportError::Internal(_) | ReportError::Io(_) | ReportError::Csv(_) => 1,
        }
    }
}

impl From<GeodesicError> for ReportError {
    fn from(e: GeodesicError) -> Self {
        match e {
            GeodesicError::Ambiguous(b) => ReportError::Ambiguous(b),
            other => ReportError::Internal(other.to_string()),
        }
    }
}

/// Exact values are written as `"p/q"` strings, floats as numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportValue {
    Exact(String),
    Float(f64),
}

impl ReportValue {
    fn new(exact: bool, r: &Rational, x: f64) -> Self {
        if exact {
            ReportValue::Exact(format_rational(r))
        } else {
            ReportValue::Float(x)
        }
    }
}

impl std::fmt::Display for ReportValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportValue::Exact(s) => f.write_str(s),
            ReportValue::Float(x) => write!(f, "{}", Sig17(*x)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsReport {
    pub alpha: ReportValue,
    pub beta: ReportValue,
    pub gamma: ReportValue,
    pub delta: ReportValue,
    pub epsilon: Option<i8>,
}

/// Family, mode and parameters; leads every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema: u32,
    pub family: FamilyTag,
    pub mode: Mode,
    pub params: ParamsReport,
}

impl Header {
    pub fn of(inst: &AlgebraInstance) -> Self {
        let p = &inst.params;
        let r = p.rationals();
        let e = p.is_exact();
        Header {
            schema: SCHEMA_VERSION,
            family: inst.tag,
            mode: if e { Mode::Exact } else { Mode::Float },
            params: ParamsReport {
                alpha: ReportValue::new(e, &r.alpha, p.alpha),
                beta: ReportValue::new(e, &r.beta, p.beta),
                gamma: ReportValue::new(e, &r.gamma, p.gamma),
                delta: ReportValue::new(e, &r.delta, p.delta),
                epsilon: p.epsilon,
            },
        }
    }
}

/// Knobs shared by the analyses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { tol: 1e-9, samples: 500, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(flatten)]
    pub header: Header,
    pub d: Option<ReportValue>,
    pub unimodular: bool,
    pub symmetric: bool,
    pub isotropy_dim: usize,
    pub independent_geodesic_count: usize,
    pub has_null_homogeneous: bool,
    pub is_go: bool,
    pub is_naturally_reductive: bool,
    pub group_name: GroupName,
    pub count_branch: Option<String>,
    pub stated_count: Option<usize>,
    pub stated_has_null: Option<bool>,
    pub theorem_discrepancy: Option<String>,
    /// Set when the isotropy filtration does not reach `l` where expected.
    pub filtration_issue: Option<String>,
    pub geodesic_families: Vec<GeodesicFamily>,
    pub witnesses: Vec<GeodesicVector>,
    pub failures: Vec<FrameVector>,
    /// Internal cross-checks that did not hold (empty on a sound run).
    pub consistency_issues: Vec<String>,
}

fn d_value(inst: &AlgebraInstance) -> Option<ReportValue> {
    if inst.tag.is_unimodular_family() {
        return None;
    }
    let exact = inst.params.is_exact();
    let d = invariant_d(&inst.params).ok()?;
    let r = if exact { invariant_d_exact(&inst.params.rationals()).ok()? } else { Rational::zero() };
    Some(ReportValue::new(exact, &r, d))
}

pub fn classify(inst: &AlgebraInstance, cfg: &AnalysisConfig) -> Result<ClassificationReport, ReportError> {
    let go: GoReport = is_go(inst, cfg.samples, cfg.tol, cfg.seed)?;
    let symmetric = go.symmetric;
    let isotropy_dim = compute_l_instance(inst).dim();
    let (families, summary) = if symmetric || inst.tag.is_unimodular_family() {
        (Vec::new(), None)
    } else {
        (enumerate_families(inst)?, Some(count_summary(inst)?))
    };
    let mut issues = Vec::new();
    if go.is_go != go.is_naturally_reductive {
        issues.push(format!("g.o. ({}) and natural reductivity ({}) disagree", go.is_go, go.is_naturally_reductive));
    }
    if !go.paths_agree {
        issues.push("sampled g.o. check disagrees with the classification loci".to_string());
    }
    Ok(ClassificationReport {
        header: Header::of(inst),
        d: d_value(inst),
        unimodular: inst.is_unimodular(),
        symmetric,
        isotropy_dim,
        independent_geodesic_count: go.independent_count,
        has_null_homogeneous: go.has_null_homogeneous,
        is_go: go.is_go,
        is_naturally_reductive: go.is_naturally_reductive,
        group_name: identify_group(inst.tag, &inst.params),
        count_branch: summary.as_ref().map(|s| s.branch.to_string()),
        stated_count: summary.as_ref().map(|s| s.stated_count),
        stated_has_null: summary.as_ref().map(|s| s.stated_has_null),
        theorem_discrepancy: summary.and_then(|s| s.theorem_discrepancy),
        filtration_issue: if symmetric { None } else { isotropy_algebra(inst).err().map(|e| e.to_string()) },
        geodesic_families: families,
        witnesses: go.witnesses,
        failures: go.failures,
        consistency_issues: issues,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub samples: usize,
    pub seed: u64,
    pub found: usize,
    pub rank: usize,
    pub has_null: bool,
    /// Largest distance of a found direction from the symbolic families.
    pub max_family_distance: Option<f64>,
    pub directions: Vec<GeodesicVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicsReport {
    #[serde(flatten)]
    pub header: Header,
    pub symmetric: bool,
    pub geodesic_families: Vec<GeodesicFamily>,
    pub count_branch: Option<String>,
    pub independent_geodesic_count: usize,
    pub stated_count: Option<usize>,
    pub has_null_homogeneous: bool,
    pub stated_has_null: Option<bool>,
    pub theorem_discrepancy: Option<String>,
    pub numeric: NumericSummary,
}

/// Symbolic families plus an independent numeric search; also returns the
/// full list of found directions.
pub fn geodesics(
    inst: &AlgebraInstance,
    cfg: &AnalysisConfig,
) -> Result<(GeodesicsReport, Vec<GeodesicVector>), ReportError> {
    let symmetric = is_symmetric_by_params(inst);
    let l = compute_l_instance(inst);
    let found = numeric_search(&inst.constants, &l.basis, cfg.samples, cfg.tol, cfg.seed);
    let rank = numeric_rank(&found);
    let has_null = numeric_has_null(&found);
    let symbolic = !(symmetric || inst.tag.is_unimodular_family());
    let (families, summary) =
        if symbolic { (enumerate_families(inst)?, Some(count_summary(inst)?)) } else { (Vec::new(), None) };
    let max_family_distance = symbolic.then(|| {
        found.iter().map(|g| distance_to_families(&families, &g.xm)).fold(0.0, f64::max)
    });
    let (count, null) = match (&summary, symmetric) {
        (Some(s), _) => (s.independent_count, s.has_null_homogeneous),
        (None, true) => (3, true),
        (None, false) => (rank, has_null),
    };
    let report = GeodesicsReport {
        header: Header::of(inst),
        symmetric,
        geodesic_families: families,
        count_branch: summary.as_ref().map(|s| s.branch.to_string()),
        independent_geodesic_count: count,
        stated_count: summary.as_ref().map(|s| s.stated_count),
        has_null_homogeneous: null,
        stated_has_null: summary.as_ref().map(|s| s.stated_has_null),
        theorem_discrepancy: summary.and_then(|s| s.theorem_discrepancy),
        numeric: NumericSummary {
            samples: cfg.samples,
            seed: cfg.seed,
            found: found.len(),
            rank,
            has_null,
            max_family_distance,
            directions: spread_sample(&found, LISTED_DIRECTIONS),
        },
    };
    Ok((report, found))
}

/// Up to `n` entries spread evenly over `v`.
fn spread_sample<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    if v.len() <= n {
        return v.to_vec();
    }
    (0..n).map(|i| v[i * v.len() / n].clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoCheckReport {
    #[serde(flatten)]
    pub header: Header,
    pub samples: usize,
    pub seed: u64,
    pub go: GoReport,
}

pub fn go_check(inst: &AlgebraInstance, cfg: &AnalysisConfig) -> Result<GoCheckReport, ReportError> {
    Ok(GoCheckReport {
        header: Header::of(inst),
        samples: cfg.samples,
        seed: cfg.seed,
        go: is_go(inst, cfg.samples, cfg.tol, cfg.seed)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropyCmdReport {
    #[serde(flatten)]
    pub header: Header,
    pub symmetric: bool,
    pub isotropy: IsotropyReport,
    /// Set when the filtration does not reach `l` where expected.
    pub filtration_issue: Option<String>,
}

pub fn isotropy(inst: &AlgebraInstance) -> IsotropyCmdReport {
    let symmetric = is_symmetric_by_params(inst);
    IsotropyCmdReport {
        header: Header::of(inst),
        symmetric,
        isotropy: isotropy_report(inst),
        filtration_issue: if symmetric { None } else { isotropy_algebra(inst).err().map(|e| e.to_string()) },
    }
}

// ---------------------------------------------------------------------------
// JSON

/// Pretty printer that writes every float with 17 significant digits.
struct Sig17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", Sig17(value))
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{}", Sig17(value.into()))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with a trailing newline. Re-parsing and re-emitting the
/// output reproduces it byte for byte.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, ReportError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| ReportError::Internal(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| ReportError::Internal(e.to_string()))
}

/// Reads an algebra specification document, reporting the line and column
/// of syntax errors.
pub fn parse_spec(text: &str) -> Result<AlgebraSpec, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Input(format!("spec document: {e}")))
}

// ---------------------------------------------------------------------------
// CSV rows and parameter sweeps

/// One table row; the column order follows [`ClassificationReport`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub delta: String,
    pub epsilon: String,
    pub d: String,
    pub unimodular: String,
    pub symmetric: String,
    pub isotropy_dim: String,
    pub independent_geodesic_count: String,
    pub has_null_homogeneous: String,
    pub is_go: String,
    pub is_naturally_reductive: String,
    pub group_name: String,
    pub count_branch: String,
    pub stated_count: String,
    pub theorem_discrepancy: String,
    pub reason: String,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SummaryRow {
    pub fn from_report(r: &ClassificationReport) -> Self {
        let p = &r.header.params;
        SummaryRow {
            family: r.header.family.to_string(),
            alpha: p.alpha.to_string(),
            beta: p.beta.to_string(),
            gamma: p.gamma.to_string(),
            delta: p.delta.to_string(),
            epsilon: opt(p.epsilon),
            d: opt(r.d.as_ref()),
            unimodular: r.unimodular.to_string(),
            symmetric: r.symmetric.to_string(),
            isotropy_dim: r.isotropy_dim.to_string(),
            independent_geodesic_count: r.independent_geodesic_count.to_string(),
            has_null_homogeneous: r.has_null_homogeneous.to_string(),
            is_go: r.is_go.to_string(),
            is_naturally_reductive: r.is_naturally_reductive.to_string(),
            group_name: serde_json::to_value(r.group_name)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            count_branch: opt(r.count_branch.as_ref()),
            stated_count: opt(r.stated_count),
            theorem_discrepancy: opt(r.theorem_discrepancy.as_ref()),
            reason: r.consistency_issues.join("; "),
        }
    }

    fn invalid(family: &str, spec: &AlgebraSpec, reason: String) -> Self {
        let show = |v: &Option<ParamInput>| match v {
            Some(ParamInput::Text(s)) => s.clone(),
            Some(ParamInput::Number(x)) => Sig17(*x).to_string(),
            None => String::new(),
        };
        SummaryRow {
            family: family.to_string(),
            alpha: show(&spec.alpha),
            beta: show(&spec.beta),
            gamma: show(&spec.gamma),
            delta: show(&spec.delta),
            epsilon: show(&spec.epsilon),
            reason,
            ..Default::default()
        }
    }
}

pub fn write_csv<W: io::Write, T: Serialize>(w: W, rows: &[T]) -> Result<(), ReportError> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub const PARAM_NAMES: [&str; 4] = ["alpha", "beta", "gamma", "delta"];

/// `name=start:stop:step` with exact rational endpoints; a bare
/// `name=value` is a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub name: &'static str,
    pub values: Vec<Rational>,
}

fn param_name(s: &str) -> Result<&'static str, ReportError> {
    PARAM_NAMES
        .iter()
        .copied()
        .find(|n| *n == s.trim())
        .ok_or_else(|| ReportError::Input(format!("unknown grid parameter {s:?} (expected alpha, beta, gamma or delta)")))
}

impl std::str::FromStr for GridAxis {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| ReportError::Input(format!("grid axis {s:?}: {m}"));
        let (name, range) = s.split_once('=').ok_or_else(|| bad("expected name=start:stop:step".into()))?;
        let name = param_name(name)?;
        let num = |t: &str| parse_rational(t.trim()).map_err(|e| bad(e.to_string()));
        let parts: Vec<&str> = range.split(':').collect();
        let values = match parts.as_slice() {
            [v] => vec![num(v)?],
            [a, b, st] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(st)?);
                if !step.is_positive() {
                    return Err(bad("step must be positive".into()));
                }
                if stop < start {
                    return Err(bad("empty range".into()));
                }
                let n = ((&stop - &start) / &step).floor();
                if n > Rational::from_integer((MAX_GRID_POINTS as i64).into()) {
                    return Err(bad(format!("more than {MAX_GRID_POINTS} points")));
                }
                let n: usize = n.to_integer().try_into().map_err(|_| bad("range too large".into()))?;
                (0..=n).map(|i| &start + &step * Rational::from_integer((i as i64).into())).collect()
            }
            _ => return Err(bad("expected name=start:stop:step".into())),
        };
        Ok(GridAxis { name, values })
    }
}

/// A sweep over a base specification.
#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub base: AlgebraSpec,
    pub axes: Vec<GridAxis>,
    /// Parameter recomputed from the g5/g6 linear constraint at each point.
    pub solve: Option<&'static str>,
}

impl ScanSpec {
    pub fn new(base: AlgebraSpec, axes: Vec<GridAxis>, solve: Option<&str>) -> Result<Self, ReportError> {
        if axes.is_empty() {
            return Err(ReportError::Input("empty grid: give at least one --grid axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(ReportError::Input(format!("grid parameter {} given twice", a.name)));
            }
        }
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()));
        if total.is_none_or(|t| t > MAX_GRID_POINTS) {
            return Err(ReportError::Input(format!("grid exceeds {MAX_GRID_POINTS} points")));
        }
        let solve = solve.map(param_name).transpose()?;
        if let Some(s) = solve {
            if axes.iter().any(|a| a.name == s) {
                return Err(ReportError::Input(format!("{s} is both swept and solved for")));
            }
        }
        Ok(ScanSpec { base, axes, solve })
    }

    /// Grid points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<AlgebraSpec> {
        let mut out = vec![self.base.clone()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|spec| {
                    axis.values.iter().map(move |v| {
                        let mut s = spec.clone();
                        *slot(&mut s, axis.name) = Some(ParamInput::Text(format_rational(v)));
                        s
                    })
                })
                .collect();
        }
        out
    }
}

fn slot<'a>(spec: &'a mut AlgebraSpec, name: &str) -> &'a mut Option<ParamInput> {
    match name {
        "alpha" => &mut spec.alpha,
        "beta" => &mut spec.beta,
        "gamma" => &mut spec.gamma,
        _ => &mut spec.delta,
    }
}

/// Solves `αγ ± βδ = 0` (g5: +, g6: −) for one parameter.
fn solve_constraint(spec: &mut AlgebraSpec, name: &str) -> Result<(), String> {
    let sign = match spec.family.trim() {
        "g5" => Rational::from_integer(1.into()),
        "g6" => Rational::from_integer((-1).into()),
        f => return Err(format!("--solve applies to g5/g6 only, not {f}")),
    };
    let get = |v: &Option<ParamInput>, n: &str| -> Result<Rational, String> {
        match v {
            Some(ParamInput::Text(s)) => parse_rational(s).map_err(|e| format!("{n}: {e}")),
            Some(ParamInput::Number(x)) => Ok(crate::exact::rational_from_f64(*x)),
            None => Ok(Rational::zero()),
        }
    };
    let (a, b, g, d) = (
        get(&spec.alpha, "alpha")?,
        get(&spec.beta, "beta")?,
        get(&spec.gamma, "gamma")?,
        get(&spec.delta, "delta")?,
    );
    // αγ + s·βδ = 0
    let (num, den) = match name {
        "alpha" => (-&sign * &b * &d, g),
        "beta" => (-&a * &g, &sign * &d),
        "gamma" => (-&sign * &b * &d, a),
        _ => (-&a * &g, &sign * &b),
    };
    if den.is_zero() {
        return Err(format!("cannot solve the constraint for {name}: zero coefficient"));
    }
    *slot(spec, name) = Some(ParamInput::Text(format_rational(&(num / den))));
    Ok(())
}

/// Evaluates every grid point (in parallel) and returns rows in grid order.
pub fn scan(spec: &ScanSpec, cfg: &AnalysisConfig) -> Vec<SummaryRow> {
    spec.points()
        .par_iter()
        .map(|point| {
            let mut point = point.clone();
            let family = point.family.clone();
            if let Some(name) = spec.solve {
                if let Err(reason) = solve_constraint(&mut point, name) {
                    return SummaryRow::invalid(&family, &point, reason);
                }
            }
            match point.to_instance() {
                Err(e) => SummaryRow::invalid(&family, &point, e.to_string()),
                Ok(inst) => match classify(&inst, cfg) {
                    Ok(r) => SummaryRow::from_report(&r),
                    Err(e) => SummaryRow::invalid(&family, &point, e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: &str, p: [&str; 4]) -> AlgebraSpec {
        let t = |s: &str| Some(ParamInput::Text(s.to_string()));
        AlgebraSpec { family: family.into(), alpha: t(p[0]), beta: t(p[1]), gamma: t(p[2]), delta: t(p[3]), epsilon: None }
    }

    #[test]
    fn classify_examples() {
        let cfg = AnalysisConfig::default();
        let r = classify(&spec("g5", ["1", "2", "-4", "2"]).to_instance().unwrap(), &cfg).unwrap();
        assert_eq!(r.d, Some(ReportValue::Exact("40/9".into())));
        assert!(!r.symmetric && !r.is_go && !r.has_null_homogeneous);
        assert_eq!(r.independent_geodesic_count, 1);
        assert!(r.consistency_issues.is_empty());

        let r = classify(&spec("g3", ["1", "1", "2", "0"]).to_instance().unwrap(), &cfg).unwrap();
        assert!(r.unimodular && r.is_go && r.is_naturally_reductive);
        assert_eq!(r.d, None);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let cfg = AnalysisConfig { samples: 50, ..Default::default() };
        for s in [spec("g5", ["1", "2", "-4", "2"]), spec("g7", ["1", "2", "0", "3"])] {
            let r = classify(&s.to_instance().unwrap(), &cfg).unwrap();
            let text = to_json(&r).unwrap();
            let back: ClassificationReport = serde_json::from_str(&text).unwrap();
            assert_eq!(to_json(&back).unwrap(), text);
        }
        let mut float = spec("g5", ["1", "0", "0", "3"]);
        float.delta = Some(ParamInput::Number(2.5));
        let r = classify(&float.to_instance().unwrap(), &cfg).unwrap();
        assert_eq!(r.header.mode, Mode::Float);
        let text = to_json(&r).unwrap();
        let back: ClassificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn grid_axes() {
        let a: GridAxis = "beta=-2:2:1/2".parse().unwrap();
        assert_eq!(a.values.len(), 9);
        assert_eq!(a.values[8], Rational::from_integer(2.into()));
        let a: GridAxis = "delta=0.5".parse().unwrap();
        assert_eq!(a.values.len(), 1);
        assert!("beta=2:1:1".parse::<GridAxis>().is_err());
        assert!("beta=0:1:0".parse::<GridAxis>().is_err());
        assert!("eta=0:1:1".parse::<GridAxis>().is_err());
        assert!(ScanSpec::new(spec("g5", ["1", "0", "0", "1"]), vec![], None).is_err());
    }

    #[test]
    fn scan_solves_constraint_and_reports_reasons() {
        let base = spec("g5", ["1", "0", "0", "1"]);
        let axes = vec!["beta=1:2:1".parse().unwrap(), "delta=-1:2:1".parse().unwrap()];
        let s = ScanSpec::new(base, axes, Some("gamma")).unwrap();
        let cfg = AnalysisConfig { samples: 20, ..Default::default() };
        let rows = scan(&s, &cfg);
        assert_eq!(rows.len(), 8);
        // δ = -1 makes α + δ = 0
        assert!(!rows[0].reason.is_empty() && rows[0].is_go.is_empty());
        // β = 1, δ = 2: γ = -βδ/α = -2
        assert_eq!(rows[3].gamma, "-2");
        assert!(rows[3].reason.is_empty(), "{:?}", rows[3]);
    }
}
