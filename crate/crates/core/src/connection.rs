//! Levi-Civita connection, curvature and covariant derivatives of
//! left-invariant tensors.
//!
//! Left-invariant tensors have constant frame components, so every
//! covariant derivative reduces to a contraction with the connection
//! coefficients:
//!
//! `(∇_{e_m} T)(e_{i1}, …, e_{ir}) = -Σ_s T(…, ∇_{e_m} e_{is}, …)`.
//!
//! Sign conventions: `R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_{[X,Y]}Z` and
//! `ρ(X,Y) = tr(Z ↦ R(Z,X)Y)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{inner, FrameVector, StructureConstants, METRIC_DIAG};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConnectionError {
    #[error("covariant derivative order {0} unsupported (expected 1 or 2)")]
    UnsupportedOrder(usize),
}

/// `∇_{e_i} e_j = Σ_k gamma[i][j][k] e_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCoeffs {
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl ConnectionCoeffs {
    pub fn nabla_basis(&self, i: usize, j: usize) -> FrameVector {
        FrameVector(self.gamma[i][j])
    }

    /// `∇_X Y` for left-invariant fields.
    pub fn nabla(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let s = x.0[i] * y.0[j];
                if s == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += s * self.gamma[i][j][k];
                }
            }
        }
        FrameVector(out)
    }

    /// Max violation of `∇_{e_i} e_j - ∇_{e_j} e_i = [e_i, e_j]`.
    pub fn torsion_residual(&self, c: &StructureConstants) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let t = self.nabla_basis(i, j) - self.nabla_basis(j, i) - c.basis_bracket(i, j);
                worst = worst.max(t.max_abs());
            }
        }
        worst
    }

    /// Max violation of `<∇_{e_i} e_j, e_k> + <e_j, ∇_{e_i} e_k> = 0`.
    pub fn metric_residual(&self) -> f64 {
        let e = FrameVector::basis;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let r = inner(&self.nabla_basis(i, j), &e(k)) + inner(&e(j), &self.nabla_basis(i, k));
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }
}

/// Koszul formula for left-invariant fields:
/// `2<∇_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>`.
pub fn levi_civita(c: &StructureConstants) -> ConnectionCoeffs {
    let e = FrameVector::basis;
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let low = 0.5
                    * (inner(&c.basis_bracket(i, j), &e(k)) - inner(&c.basis_bracket(j, k), &e(i))
                        + inner(&c.basis_bracket(k, i), &e(j)));
                gamma[i][j][k] = low * METRIC_DIAG[k];
            }
        }
    }
    ConnectionCoeffs { gamma }
}

/// Components `R[i][j][k][l]` of `R(e_i, e_j) e_k = Σ_l R[i][j][k][l] e_l`.
pub fn curvature(c: &StructureConstants, conn: &ConnectionCoeffs) -> Tensor {
    let e = FrameVector::basis;
    let mut r = Tensor::zeros(4);
    for i in 0..3 {
        for j in 0..3 {
            let bij = c.basis_bracket(i, j);
            for k in 0..3 {
                let v = conn.nabla(&e(i), &conn.nabla_basis(j, k)) - conn.nabla(&e(j), &conn.nabla_basis(i, k))
                    - conn.nabla(&bij, &e(k));
                for l in 0..3 {
                    r.set(&[i, j, k, l], v.0[l]);
                }
            }
        }
    }
    r
}

/// `R(e_i, e_j, e_k, e_l) = <R(e_i, e_j) e_k, e_l>`.
pub fn lower_riemann(riemann: &Tensor) -> Tensor {
    Tensor::from_fn(4, |x| riemann.get(x) * METRIC_DIAG[x[3]])
}

/// Ricci tensor and Ricci operator `Q` (`ρ(X,Y) = <QX, Y>`, `Q[i][j]` is the
/// `e_j` component of `Q e_i`).
pub fn ricci(riemann: &Tensor) -> (Tensor, [[f64; 3]; 3]) {
    let rho = Tensor::from_fn(2, |x| (0..3).map(|l| riemann.get(&[l, x[0], x[1], l])).sum());
    let mut q = [[0.0; 3]; 3];
    for (i, row) in q.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = rho.get(&[i, j]) * METRIC_DIAG[j];
        }
    }
    (rho, q)
}

/// One covariant derivative of a left-invariant covariant tensor; the
/// derivative index comes first.
pub fn nabla_once(t: &Tensor, conn: &ConnectionCoeffs) -> Tensor {
    let r = t.rank();
    Tensor::from_fn(r + 1, |x| {
        let m = x[0];
        let idx = &x[1..];
        let mut s = 0.0;
        let mut j = idx.to_vec();
        for slot in 0..r {
            let orig = idx[slot];
            for q in 0..3 {
                let g = conn.gamma[m][orig][q];
                if g != 0.0 {
                    j[slot] = q;
                    s -= g * t.get(&j);
                }
            }
            j[slot] = orig;
        }
        s
    })
}

/// The chain `[∇T, ∇²T, …]` up to `order` (1 or 2).
pub fn covariant_derivative(t: &Tensor, conn: &ConnectionCoeffs, order: usize) -> Result<Vec<Tensor>, ConnectionError> {
    if !(1..=2).contains(&order) {
        return Err(ConnectionError::UnsupportedOrder(order));
    }
    let mut chain = Vec::with_capacity(order);
    let mut cur = t.clone();
    for _ in 0..order {
        cur = nabla_once(&cur, conn);
        chain.push(cur.clone());
    }
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData {
    pub connection: ConnectionCoeffs,
    /// `R(e_i,e_j)e_k` components.
    pub riemann: Tensor,
    /// `<R(e_i,e_j)e_k, e_l>`.
    pub riemann_lowered: Tensor,
    pub ricci: Tensor,
    pub ricci_operator: [[f64; 3]; 3],
    /// `[∇ρ, ∇²ρ]`.
    pub nabla_ricci: Vec<Tensor>,
    /// `∇R` of the lowered curvature tensor.
    pub nabla_riemann: Tensor,
}

impl CurvatureData {
    pub fn compute(c: &StructureConstants) -> Self {
        let connection = levi_civita(c);
        let riemann = curvature(c, &connection);
        let riemann_lowered = lower_riemann(&riemann);
        let (ricci, ricci_operator) = ricci(&riemann);
        let nabla_ricci = covariant_derivative(&ricci, &connection, 2).expect("order 2 is supported");
        let nabla_riemann = nabla_once(&riemann_lowered, &connection);
        CurvatureData { connection, riemann, riemann_lowered, ricci, ricci_operator, nabla_ricci, nabla_riemann }
    }

    /// First Bianchi identity residual on the basis.
    pub fn bianchi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let s = self.riemann.get(&[i, j, k, l])
                            + self.riemann.get(&[j, k, i, l])
                            + self.riemann.get(&[k, i, j, l]);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_nabla_riemann(&self) -> f64 {
        self.nabla_riemann.max_abs()
    }
}

/// Local symmetry test `max |∇R| <= tol`.
pub fn is_locally_symmetric(c: &StructureConstants, tol: f64) -> bool {
    max_nabla_riemann(c) <= tol
}

pub fn max_nabla_riemann(c: &StructureConstants) -> f64 {
    let conn = levi_civita(c);
    let r = lower_riemann(&curvature(c, &conn));
    nabla_once(&r, &conn).max_abs()
}

/// `∇_X X`, used by the parallel-transport geodesic oracle.
pub fn nabla_self(c: &StructureConstants, x: &FrameVector) -> FrameVector {
    levi_civita(c).nabla(x, x)
}

/// Sanity helper: the bracket recovered from the connection.
pub fn bracket_from_connection(conn: &ConnectionCoeffs, x: &FrameVector, y: &FrameVector) -> FrameVector {
    conn.nabla(x, y) - conn.nabla(y, x)
}
