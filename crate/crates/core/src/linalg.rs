//! Small dense linear algebra: rank-revealing elimination over `f64` and
//! exact rationals, plus minimum-norm least squares.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default pivot threshold, relative to the largest entry of the matrix.
pub const PIVOT_TOL: f64 = 1e-10;

/// Scalars that Gauss-Jordan elimination can run on.
pub trait ElimScalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn magnitude(&self) -> f64;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Whether a candidate pivot counts as zero, given the matrix scale.
    fn negligible(&self, scale: f64, tol: f64) -> bool;
}

impl ElimScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale.max(1.0)
    }
}

impl ElimScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }
}

/// Reduced row echelon form. Returns the pivot columns; `rows` is reduced in place.
pub fn rref<T: ElimScalar>(rows: &mut [Vec<T>], cols: usize, tol: f64) -> Vec<usize> {
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.magnitude())
        .fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows.len() {
            break;
        }
        // partial pivoting on the largest magnitude
        let (best, mag) = (r..rows.len())
            .map(|i| (i, rows[i][col].magnitude()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 0.0 || rows[best][col].negligible(scale, tol) {
            for row in rows.iter_mut().skip(r) {
                row[col] = T::zero();
            }
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = x.div(&p);
        }
        for i in 0..rows.len() {
            if i == r {
                continue;
            }
            let f = rows[i][col].clone();
            if f == T::zero() {
                continue;
            }
            for j in 0..cols {
                let v = rows[i][j].sub(&f.mul(&rows[r][j]));
                rows[i][j] = v;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Basis of the null space of the `rows × cols` matrix, one vector per free column.
pub fn kernel<T: ElimScalar>(matrix: &[Vec<T>], cols: usize, tol: f64) -> Vec<Vec<T>> {
    let mut rows = matrix.to_vec();
    let pivots = rref(&mut rows, cols, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = rows[r][f].neg();
            }
            v
        })
        .collect()
}

pub fn rank<T: ElimScalar>(matrix: &[Vec<T>], cols: usize, tol: f64) -> usize {
    let mut rows = matrix.to_vec();
    rref(&mut rows, cols, tol).len()
}

/// Minimum-norm least-squares solution of `a x = b`, with the residual max-norm.
pub fn lstsq(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    if n == 0 {
        let res = b.iter().fold(0.0f64, |w, x| w.max(x.abs()));
        return (Vec::new(), res);
    }
    let mat = DMatrix::from_fn(m, n, |i, j| a[i][j]);
    let rhs = DVector::from_column_slice(b);
    let svd = mat.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(&rhs, (smax * 1e-12).max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(n));
    let r = &mat * &x - rhs;
    (x.iter().copied().collect(), r.amax())
}

/// Rank of a set of vectors, by elimination relative to the largest entry.
pub fn vector_rank(vectors: &[[f64; 3]], tol: f64) -> usize {
    let rows: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n == 0.0 {
                vec![0.0; 3]
            } else {
                v.iter().map(|x| x / n).collect()
            }
        })
        .collect();
    rank(&rows, 3, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn float_kernel_of_rank_two() {
        let a = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]];
        let k = kernel(&a, 3, PIVOT_TOL);
        assert_eq!(k.len(), 1);
        for row in &a {
            let s: f64 = row.iter().zip(&k[0]).map(|(x, y)| x * y).sum();
            assert!(s.abs() < 1e-12);
        }
        assert_eq!(rank(&a, 3, PIVOT_TOL), 2);
    }

    #[test]
    fn exact_kernel() {
        let a = vec![vec![q(1, 3), q(2, 3), q(0, 1)], vec![q(1, 1), q(2, 1), q(0, 1)]];
        let k = kernel(&a, 3, 0.0);
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], vec![q(-2, 1), q(1, 1), q(0, 1)]);
        assert_eq!(k[1], vec![q(0, 1), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn full_rank_has_empty_kernel() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1e-3]];
        assert!(kernel(&a, 2, PIVOT_TOL).is_empty());
        let z = vec![vec![0.0; 3]; 9];
        assert_eq!(kernel(&z, 3, PIVOT_TOL).len(), 3);
    }

    #[test]
    fn least_squares() {
        let a = vec![vec![1.0], vec![1.0], vec![1.0]];
        let (x, r) = lstsq(&a, &[1.0, 2.0, 3.0]);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
        // underdetermined: minimum norm
        let a = vec![vec![1.0, 1.0]];
        let (x, r) = lstsq(&a, &[2.0]);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12 && r < 1e-12);
    }
}
