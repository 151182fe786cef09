//! Isotropy candidates: metric-skew derivations `l` and the curvature
//! filtration `h_0 ⊇ h_1 ⊇ h_2` (annihilators of `ρ, ∇ρ, ∇²ρ`).

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{FrameVector, StructureConstants};
use crate::connection::CurvatureData;
use crate::exact::{rational_to_f64, Rational, Scalar};
use crate::families::{is_symmetric_by_params, AlgebraInstance, FamilyTag};
use crate::linalg::{kernel, rank, PIVOT_TOL};
use crate::tensor::Tensor;

/// `A e1 = b e2 + c e3`, `A e2 = -b e1 + a e3`, `A e3 = c e1 + a e2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SkewMap {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        SkewMap { a, b, c }
    }

    pub fn from_coords(v: [f64; 3]) -> Self {
        SkewMap { a: v[0], b: v[1], c: v[2] }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// `m[i][j]` is the `e_i` component of `A e_j`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        skew_matrix([self.a, self.b, self.c])
    }

    pub fn apply(&self, x: &FrameVector) -> FrameVector {
        let m = self.matrix();
        FrameVector(std::array::from_fn(|i| (0..3).map(|j| m[i][j] * x.0[j]).sum()))
    }
}

fn skew_matrix<T: Scalar>(v: [T; 3]) -> [[T; 3]; 3] {
    let [a, b, c] = v;
    let z = T::zero();
    [[z.clone(), -b.clone(), c.clone()], [b, z.clone(), a.clone()], [c, a, z]]
}

/// A subspace of skew maps, given by a basis in `(a, b, c)` coordinates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IsotropySubspace {
    pub basis: Vec<SkewMap>,
}

impl IsotropySubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether every basis vector of `self` lies in `other`.
    pub fn is_contained_in(&self, other: &IsotropySubspace) -> bool {
        let base: Vec<Vec<f64>> = other.basis.iter().map(|m| m.coords().to_vec()).collect();
        let r = rank(&base, 3, PIVOT_TOL);
        self.basis.iter().all(|m| {
            let mut rows = base.clone();
            rows.push(m.coords().to_vec());
            rank(&rows, 3, PIVOT_TOL) == r
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IsotropyError {
    #[error("{0}: the instance is locally symmetric; its isotropy is not determined by l")]
    SymmetricInstance(FamilyTag),
    #[error("tensor rank {0} is not supported (expected 2, 3 or 4)")]
    UnsupportedRank(usize),
    #[error("{family}: expected h_{predicted} = l, found dim h_{predicted} = {found} vs dim l = {l_dim}")]
    FiltrationMismatch { family: FamilyTag, predicted: usize, found: usize, l_dim: usize },
}

/// The nine components of `A[e_i,e_j] - [A e_i, e_j] - [e_i, A e_j]` over
/// the pairs `(1,2), (1,3), (2,3)`.
fn derivation_defect<T: Scalar>(c: &[[[T; 3]; 3]; 3], v: [T; 3]) -> Vec<T> {
    let m = skew_matrix(v);
    let mut out = Vec::with_capacity(9);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for k in 0..3 {
            let mut s = T::zero();
            for l in 0..3 {
                // A[e_i,e_j]
                s = s + m[k][l].clone() * c[i][j][l].clone();
                // [A e_i, e_j] and [e_i, A e_j]
                s = s - m[l][i].clone() * c[l][j][k].clone();
                s = s - m[l][j].clone() * c[i][l][k].clone();
            }
            out.push(s);
        }
    }
    out
}

pub fn derivation_residual(a: &SkewMap, c: &StructureConstants) -> f64 {
    derivation_defect(c.raw(), a.coords()).iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// The 9×3 coefficient matrix of the derivation condition in `(a, b, c)`.
fn derivation_system<T: Scalar>(c: &[[[T; 3]; 3]; 3]) -> Vec<Vec<T>> {
    let cols: Vec<Vec<T>> = (0..3)
        .map(|n| derivation_defect(c, std::array::from_fn(|i| if i == n { T::one() } else { T::zero() })))
        .collect();
    (0..9).map(|r| (0..3).map(|n| cols[n][r].clone()).collect()).collect()
}

fn subspace_from(basis: Vec<Vec<f64>>) -> IsotropySubspace {
    IsotropySubspace { basis: basis.into_iter().map(|v| SkewMap::from_coords([v[0], v[1], v[2]])).collect() }
}

/// Skew derivations of the bracket, by float elimination.
pub fn compute_l(c: &StructureConstants) -> IsotropySubspace {
    subspace_from(kernel(&derivation_system(c.raw()), 3, PIVOT_TOL))
}

/// Skew derivations of an instance; exact elimination when the parameters are rational.
pub fn compute_l_instance(instance: &AlgebraInstance) -> IsotropySubspace {
    if !instance.params.is_exact() {
        return compute_l(&instance.constants);
    }
    let table = instance.rational_table();
    let k: Vec<Vec<Rational>> = kernel(&derivation_system(&table), 3, 0.0);
    subspace_from(k.iter().map(|v| v.iter().map(rational_to_f64).collect()).collect())
}

/// `(A·T)(X_1, …, X_r) = -Σ_s T(…, A X_s, …)`.
pub fn act_on_tensor(a: &SkewMap, t: &Tensor) -> Result<Tensor, IsotropyError> {
    let r = t.rank();
    if !(2..=4).contains(&r) {
        return Err(IsotropyError::UnsupportedRank(r));
    }
    let m = a.matrix();
    Ok(Tensor::from_fn(r, |idx| {
        let mut s = 0.0;
        let mut j = idx.to_vec();
        for slot in 0..r {
            let i = idx[slot];
            for (l, row) in m.iter().enumerate() {
                if row[i] != 0.0 {
                    j[slot] = l;
                    s -= row[i] * t.get(&j);
                }
            }
            j[slot] = i;
        }
        s
    }))
}

/// Rows of the linear conditions `A·T = 0` in `(a, b, c)`, scaled by `1/scale`.
fn annihilator_rows(t: &Tensor, scale: f64) -> Vec<Vec<f64>> {
    let cols: Vec<Tensor> = (0..3)
        .map(|n| {
            let mut v = [0.0; 3];
            v[n] = 1.0;
            act_on_tensor(&SkewMap::from_coords(v), t).expect("rank checked by caller")
        })
        .collect();
    (0..t.data().len()).map(|e| cols.iter().map(|c| c.data()[e] / scale).collect()).collect()
}

/// `h_0, …, h_{k_max}` (annihilators of `ρ, ∇ρ, …, ∇^k ρ`); `k_max <= 2`.
pub fn compute_h_chain(instance: &AlgebraInstance, k_max: usize) -> Vec<IsotropySubspace> {
    let data = CurvatureData::compute(&instance.constants);
    let s = instance.params.scale();
    let tensors: Vec<&Tensor> = std::iter::once(&data.ricci).chain(data.nabla_ricci.iter()).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut chain = Vec::new();
    for (k, t) in tensors.iter().enumerate().take(k_max.min(2) + 1) {
        // ∇^k ρ is homogeneous of degree k + 2 in the parameters
        rows.extend(annihilator_rows(t, s.powi(k as i32 + 2)));
        chain.push(subspace_from(kernel(&rows, 3, PIVOT_TOL)));
    }
    chain
}

/// The `k` with `h_k = l` for `g5`, `g6`, `g7` away from the symmetric loci.
pub fn predicted_k(instance: &AlgebraInstance) -> Option<usize> {
    let p = instance.params.rationals();
    let d = instance.params.decider();
    let z = |x: &Rational| d.is_zero(x);
    let (a, b, g, dl) = (&p.alpha, &p.beta, &p.gamma, &p.delta);
    match instance.tag {
        FamilyTag::G5 => Some(if !z(&(b * dl)) {
            1
        } else if (z(a) && z(b) && !z(g) && !z(dl)) || (z(g) && z(dl) && !z(a) && !z(b)) {
            2
        } else {
            0
        }),
        FamilyTag::G6 => Some(if !z(&(b * (b * b - a * a))) { 2 } else { 0 }),
        FamilyTag::G7 => Some(if z(g) && !z(&(a * dl * (a * a - dl * dl))) {
            1
        } else if z(a) && z(b) && !z(g) {
            2
        } else {
            0
        }),
        _ => None,
    }
}

/// Summary of the isotropy computation for one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub l: IsotropySubspace,
    pub h_dims: Vec<usize>,
    /// Smallest `k` with `dim h_k = dim l`, if any `k <= 2`.
    pub first_k: Option<usize>,
    pub predicted_k: Option<usize>,
    pub max_derivation_residual: f64,
}

pub fn isotropy_report(instance: &AlgebraInstance) -> IsotropyReport {
    let l = compute_l_instance(instance);
    let chain = compute_h_chain(instance, 2);
    let h_dims: Vec<usize> = chain.iter().map(IsotropySubspace::dim).collect();
    let first_k = h_dims.iter().position(|&d| d == l.dim());
    let max_derivation_residual =
        l.basis.iter().map(|m| derivation_residual(m, &instance.constants)).fold(0.0, f64::max);
    IsotropyReport { l, h_dims, first_k, predicted_k: predicted_k(instance), max_derivation_residual }
}

/// The isotropy algebra `h = l` of a non-symmetric instance, checked against
/// the filtration at the predicted step (at any step for `g1`–`g4`).
pub fn isotropy_algebra(instance: &AlgebraInstance) -> Result<IsotropySubspace, IsotropyError> {
    if is_symmetric_by_params(instance) {
        return Err(IsotropyError::SymmetricInstance(instance.tag));
    }
    let report = isotropy_report(instance);
    if let Some(k) = report.predicted_k {
        if report.h_dims[k] != report.l.dim() {
            return Err(IsotropyError::FiltrationMismatch {
                family: instance.tag,
                predicted: k,
                found: report.h_dims[k],
                l_dim: report.l.dim(),
            });
        }
    }
    Ok(report.l)
}

/// Whether a rational skew map is a derivation of an exact table.
pub fn is_exact_derivation(table: &[[[Rational; 3]; 3]; 3], v: [Rational; 3]) -> bool {
    derivation_defect(table, v).iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::ricci;
    use crate::connection::{curvature, levi_civita};
    use crate::families::{build_family, FamilyParams};
    use crate::tensor::metric_tensor;

    fn inst(tag: FamilyTag, a: f64, b: f64, g: f64, d: f64) -> AlgebraInstance {
        build_family(tag, FamilyParams::float(a, b, g, d)).unwrap()
    }

    #[test]
    fn skew_maps_preserve_metric() {
        let a = SkewMap::new(0.3, -1.2, 2.0);
        let g = act_on_tensor(&a, &metric_tensor()).unwrap();
        assert!(g.max_abs() < 1e-15);
        assert!(act_on_tensor(&a, &Tensor::zeros(3)).unwrap().max_abs() == 0.0);
        assert_eq!(act_on_tensor(&a, &Tensor::zeros(1)), Err(IsotropyError::UnsupportedRank(1)));
    }

    #[test]
    fn derivation_residuals() {
        let sym = inst(FamilyTag::G5, 1.0, 2.0, -2.0, 1.0);
        assert!(derivation_residual(&SkewMap::new(0.0, 1.0, 0.0), &sym.constants) < 1e-15);
        assert_eq!(derivation_residual(&SkewMap::new(0.0, 0.0, 0.0), &sym.constants), 0.0);
        let generic = inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0);
        // (β+γ)b = -2 is one of the defect components
        let r = derivation_residual(&SkewMap::new(0.0, 1.0, 0.0), &generic.constants);
        assert!(r >= 2.0 - 1e-12, "{r}");
    }

    #[test]
    fn l_dimensions() {
        assert_eq!(compute_l(&inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0).constants).dim(), 0);
        let l = compute_l(&inst(FamilyTag::G5, 1.0, 2.0, -2.0, 1.0).constants);
        assert_eq!(l.dim(), 1);
        let v = l.basis[0].coords();
        assert!(v[0].abs() < 1e-12 && v[2].abs() < 1e-12 && v[1].abs() > 0.5);
        assert_eq!(compute_l(&inst(FamilyTag::G6, 1.0, 2.0, 4.0, 2.0).constants).dim(), 0);
        let g3 = inst(FamilyTag::G3, 1.0, 1.0, 2.0, 0.0);
        assert_eq!(compute_l_instance(&g3).dim(), 1);
        let exact = build_family(FamilyTag::G3, FamilyParams::parse_exact("1/3", "1/3", "2", "0").unwrap()).unwrap();
        assert_eq!(compute_l_instance(&exact).dim(), 1);
    }

    #[test]
    fn ricci_invariant_under_rotation() {
        let c = inst(FamilyTag::G5, 1.0, 0.0, 0.0, 1.0).constants;
        let conn = levi_civita(&c);
        let (rho, _) = ricci(&curvature(&c, &conn));
        assert!(act_on_tensor(&SkewMap::new(0.0, 1.0, 0.0), &rho).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn h_chain_examples() {
        let g5 = inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0);
        let chain = compute_h_chain(&g5, 2);
        assert_eq!(chain[1].dim(), 0);
        for w in chain.windows(2) {
            assert!(w[1].is_contained_in(&w[0]));
        }
        // the filtration stabilises at dimension 1 here although l = 0
        // (cross-checked with exact symbolic elimination)
        let g5b = inst(FamilyTag::G5, 0.0, 0.0, 1.0, 1.0);
        let dims: Vec<usize> = compute_h_chain(&g5b, 2).iter().map(IsotropySubspace::dim).collect();
        assert_eq!(dims, vec![1, 1, 1]);
        assert_eq!(compute_l(&g5b.constants).dim(), 0);
        let sym = inst(FamilyTag::G5, 1.0, 0.0, 0.0, 1.0);
        assert!(compute_h_chain(&sym, 2)[0].dim() >= 1);
    }

    #[test]
    fn isotropy_algebra_examples() {
        assert_eq!(isotropy_algebra(&inst(FamilyTag::G5, 1.0, 2.0, -4.0, 2.0)).unwrap().dim(), 0);
        assert_eq!(
            isotropy_algebra(&inst(FamilyTag::G7, 0.0, 0.0, 1.0, 1.0)),
            Err(IsotropyError::FiltrationMismatch { family: FamilyTag::G7, predicted: 2, found: 1, l_dim: 0 })
        );
        let report = isotropy_report(&inst(FamilyTag::G7, 0.0, 0.0, 1.0, 1.0));
        assert_eq!(report.l.dim(), 0);
        assert_eq!(report.first_k, None);
        assert_eq!(isotropy_algebra(&inst(FamilyTag::G3, 1.0, 1.0, 2.0, 0.0)).unwrap().dim(), 1);
        assert_eq!(
            isotropy_algebra(&inst(FamilyTag::G5, 1.0, 0.0, 0.0, 1.0)),
            Err(IsotropyError::SymmetricInstance(FamilyTag::G5))
        );
    }
}
