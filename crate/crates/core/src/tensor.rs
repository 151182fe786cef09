//! Dense covariant tensors on the three-dimensional frame.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rank: usize) -> Self {
        Tensor { rank, data: vec![0.0; 3usize.pow(rank as u32)] }
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Tensor::zeros(rank);
        let mut idx = vec![0usize; rank];
        for flat in 0..t.data.len() {
            unflatten(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Tensor::from_fn(2, |i| m[i[0]][i[1]])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = flatten(idx);
        self.data[f] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.rank, other.rank);
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Iterates over all multi-indices with their values.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.data.iter().enumerate().map(move |(flat, &v)| {
            let mut idx = vec![0; self.rank];
            unflatten(flat, &mut idx);
            (idx, v)
        })
    }
}

fn flatten(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 3 + i)
}

fn unflatten(mut flat: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % 3;
        flat /= 3;
    }
}

/// The metric `diag(1, 1, -1)` as a rank-2 tensor.
pub fn metric_tensor() -> Tensor {
    Tensor::from_fn(2, |i| if i[0] != i[1] { 0.0 } else if i[0] == 2 { -1.0 } else { 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_round_trips() {
        let t = Tensor::from_fn(3, |i| (i[0] * 100 + i[1] * 10 + i[2]) as f64);
        assert_eq!(t.get(&[2, 0, 1]), 201.0);
        for (idx, v) in t.entries() {
            assert_eq!(t.get(&idx), v);
        }
        assert_eq!(metric_tensor().get(&[2, 2]), -1.0);
    }
}
