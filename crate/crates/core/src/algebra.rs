//! Frame vectors, the Lorentzian product of signature (+,+,-) and the
//! structure constants of a three-dimensional Lie algebra.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Diagonal of the metric in the pseudo-orthonormal frame; `e3` is timelike.
pub const METRIC_DIAG: [f64; 3] = [1.0, 1.0, -1.0];

/// Default absolute tolerance for residual-zero tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Components of a vector with respect to the frame `{e1, e2, e3}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameVector(pub [f64; 3]);

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector([0.0; 3]);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        FrameVector([x1, x2, x3])
    }

    /// The frame vector `e_{i+1}`.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        FrameVector(v)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Euclidean norm of the components (not the Lorentzian one).
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn dot(&self, other: &FrameVector) -> f64 {
        (0..3).map(|i| self.0[i] * other.0[i]).sum()
    }

    /// Lorentzian self product `q(X) = x1² + x2² - x3²`.
    pub fn quadratic(&self) -> f64 {
        inner(self, self)
    }

    /// Representative of the projective class: unit Euclidean norm with
    /// the first nonzero component positive. Returns the sign that was
    /// applied so scale-covariant companions (such as `k`) can follow.
    pub fn projective_normal(&self) -> Option<(FrameVector, f64)> {
        let n = self.euclidean_norm();
        if n == 0.0 {
            return None;
        }
        let u = *self * (1.0 / n);
        let lead = u.0.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        let s = if lead < 0.0 { -1.0 } else { 1.0 };
        Some((u * s, s / n))
    }
}

impl Index<usize> for FrameVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for FrameVector {
    type Output = FrameVector;
    fn mul(self, s: f64) -> FrameVector {
        FrameVector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl fmt::Display for FrameVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// `<x, y> = x1 y1 + x2 y2 - x3 y3`.
pub fn inner(x: &FrameVector, y: &FrameVector) -> f64 {
    (0..3).map(|i| METRIC_DIAG[i] * x.0[i] * y.0[i]).sum()
}

/// Lowers the index of a frame vector: the covector `<x, ·>`.
pub fn lower(x: &FrameVector) -> [f64; 3] {
    [x.0[0], x.0[1], -x.0[2]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Null,
    Zero,
}

impl fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalCharacter::Spacelike => "spacelike",
            CausalCharacter::Timelike => "timelike",
            CausalCharacter::Null => "null",
            CausalCharacter::Zero => "zero",
        };
        f.write_str(s)
    }
}

pub fn causal_character(x: &FrameVector, tol: f64) -> CausalCharacter {
    if x.max_abs() <= tol {
        return CausalCharacter::Zero;
    }
    let q = x.quadratic();
    if q.abs() <= tol {
        CausalCharacter::Null
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

/// Bracket table `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants {
    c: [[[f64; 3]; 3]; 3],
}

impl StructureConstants {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds the table from the three basic brackets `[e1,e2]`, `[e1,e3]`,
    /// `[e2,e3]`; antisymmetry fills in the rest.
    pub fn from_brackets(e12: [f64; 3], e13: [f64; 3], e23: [f64; 3]) -> Self {
        let mut s = Self::zero();
        s.set(0, 1, e12);
        s.set(0, 2, e13);
        s.set(1, 2, e23);
        s
    }

    /// Sets `[e_i, e_j]` and `[e_j, e_i]` together (0-based indices).
    pub fn set(&mut self, i: usize, j: usize, v: [f64; 3]) {
        for k in 0..3 {
            self.c[i][j][k] = v[k];
            self.c[j][i][k] = -v[k];
        }
    }

    /// Raw component write; may break antisymmetry (used for fault injection).
    pub fn set_component(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.c[i][j][k] = v;
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> FrameVector {
        FrameVector(self.c[i][j])
    }

    pub fn raw(&self) -> &[[[f64; 3]; 3]; 3] {
        &self.c
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.c[i][j][k] *= s;
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        bracket(self, x, y)
    }

    /// Matrix of `ad_{e_i}`: column `j` holds `[e_i, e_j]`.
    pub fn ad_matrix(&self, i: usize) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                m[k][j] = self.c[i][j][k];
            }
        }
        m
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    worst = worst.max((self.c[i][j][k] + self.c[j][i][k]).abs());
                }
            }
        }
        worst
    }
}

pub fn bracket(c: &StructureConstants, x: &FrameVector, y: &FrameVector) -> FrameVector {
    let mut out = [0.0; 3];
    for i in 0..3 {
        if x.0[i] == 0.0 {
            continue;
        }
        for j in 0..3 {
            let s = x.0[i] * y.0[j];
            if s == 0.0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += s * c.c[i][j][k];
            }
        }
    }
    FrameVector(out)
}

/// Max-norm of the cyclic sum `[e1,[e2,e3]] + [e2,[e3,e1]] + [e3,[e1,e2]]`.
pub fn jacobi_residual(c: &StructureConstants) -> f64 {
    let e = |i| FrameVector::basis(i);
    let t1 = bracket(c, &e(0), &c.basis_bracket(1, 2));
    let t2 = bracket(c, &e(1), &c.basis_bracket(2, 0));
    let t3 = bracket(c, &e(2), &c.basis_bracket(0, 1));
    (t1 + t2 + t3).max_abs()
}

/// Traces of `ad_{e1}`, `ad_{e2}`, `ad_{e3}`.
pub fn ad_traces(c: &StructureConstants) -> [f64; 3] {
    let mut t = [0.0; 3];
    for (i, ti) in t.iter_mut().enumerate() {
        *ti = (0..3).map(|j| c.c[i][j][j]).sum();
    }
    t
}

pub fn is_unimodular(c: &StructureConstants, tol: f64) -> bool {
    ad_traces(c).iter().all(|t| t.abs() <= tol)
}
