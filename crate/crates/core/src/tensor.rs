//! Dense row-major tensors of small rank. Shapes here never exceed a few
//! thousand entries, so everything is a flat `Vec<f64>` with explicit
//! odometer iteration; no sparsity, no views.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

/// Advance a row-major multi-index; returns false after the last one.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

pub(crate) fn offset(idx: &[usize], shape: &[usize]) -> usize {
    let mut off = 0;
    for (i, s) in idx.iter().zip(shape) {
        off = off * s + i;
    }
    off
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: data.len() });
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Tensor { shape, data: vec![0.0; len] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[offset(idx, &self.shape)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let off = offset(idx, &self.shape);
        self.data[off] = v;
    }

    /// Contract one axis against a coefficient slice, dropping that axis.
    pub fn contract_axis(&self, axis: usize, coeffs: &[f64]) -> Result<Tensor> {
        if axis >= self.shape.len() {
            return Err(Error::SlotOutOfRange { slot: axis, degree: self.shape.len() });
        }
        let n = self.shape[axis];
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: coeffs.len() });
        }
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut out = vec![0.0; outer * inner];
        for o in 0..outer {
            for k in 0..n {
                let c = coeffs[k];
                if c == 0.0 {
                    continue;
                }
                let base = (o * n + k) * inner;
                let dst = o * inner;
                for i in 0..inner {
                    out[dst + i] += c * self.data[base + i];
                }
            }
        }
        let mut shape = self.shape.clone();
        shape.remove(axis);
        Ok(Tensor { shape, data: out })
    }

    /// Replace one axis by its image under a matrix: with `m` of size
    /// old_dim x new_dim (row-major), out[..., j, ...] = sum_i t[..., i, ...] m[i][j].
    pub fn transform_axis(&self, axis: usize, m: &[f64], new_dim: usize) -> Result<Tensor> {
        if axis >= self.shape.len() {
            return Err(Error::SlotOutOfRange { slot: axis, degree: self.shape.len() });
        }
        let old = self.shape[axis];
        if m.len() != old * new_dim {
            return Err(Error::DimensionMismatch { expected: old * new_dim, got: m.len() });
        }
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut out = vec![0.0; outer * new_dim * inner];
        for o in 0..outer {
            for i in 0..old {
                let src = (o * old + i) * inner;
                for j in 0..new_dim {
                    let c = m[i * new_dim + j];
                    if c == 0.0 {
                        continue;
                    }
                    let dst = (o * new_dim + j) * inner;
                    for t in 0..inner {
                        out[dst + t] += c * self.data[src + t];
                    }
                }
            }
        }
        let mut shape = self.shape.clone();
        shape[axis] = new_dim;
        Ok(Tensor { shape, data: out })
    }

    /// Append a new last axis carrying the coefficients: out[..., j] = t[...] * coeffs[j].
    pub fn outer_last(&self, coeffs: &[f64]) -> Tensor {
        let mut shape = self.shape.clone();
        shape.push(coeffs.len());
        let mut data = Vec::with_capacity(self.data.len() * coeffs.len());
        for &v in &self.data {
            for &c in coeffs {
                data.push(v * c);
            }
        }
        Tensor { shape, data }
    }

    /// Largest absolute entry difference under permutations of the listed axes.
    pub fn symmetry_deviation(&self, axes: &[usize]) -> f64 {
        if axes.len() < 2 {
            return 0.0;
        }
        let perms = permutations(axes.len());
        let mut worst = 0.0f64;
        let mut idx = vec![0usize; self.shape.len()];
        let mut src = vec![0usize; self.shape.len()];
        loop {
            let here = self.data[offset(&idx, &self.shape)];
            for perm in &perms {
                src.copy_from_slice(&idx);
                for (slot, &p) in perm.iter().enumerate() {
                    src[axes[slot]] = idx[axes[p]];
                }
                worst = worst.max((here - self.data[offset(&src, &self.shape)]).abs());
            }
            if !increment(&mut idx, &self.shape) {
                break;
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// All permutations of 0..n in a deterministic order (Heap's algorithm).
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contract_matrix_vector() {
        // 2x3 matrix as tensor, contract the column axis.
        let t = Tensor::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let r = t.contract_axis(1, &[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(r.shape(), &[2]);
        assert_eq!(r.data(), &[-2.0, -2.0]);
    }

    #[test]
    fn contract_middle_axis() {
        let t = Tensor::new(vec![2, 2, 2], (1..=8).map(|v| v as f64).collect()).unwrap();
        let r = t.contract_axis(1, &[1.0, 1.0]).unwrap();
        assert_eq!(r.shape(), &[2, 2]);
        // [f][i] = t[f][0][i] + t[f][1][i]
        assert_eq!(r.data(), &[4.0, 6.0, 12.0, 14.0]);
    }

    #[test]
    fn transform_axis_matches_manual() {
        let t = Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // Replace the column axis via m (2x1): columns combined into one.
        let r = t.transform_axis(1, &[2.0, -1.0], 1).unwrap();
        assert_eq!(r.shape(), &[2, 1]);
        assert_eq!(r.data(), &[0.0, 2.0]);
    }

    #[test]
    fn symmetry_deviation_detects_asymmetry() {
        let t = Tensor::new(vec![1, 2, 2], vec![0.0, 1.0, 3.0, 0.0]).unwrap();
        assert!(t.symmetry_deviation(&[1, 2]) == 2.0);
        let s = Tensor::new(vec![1, 2, 2], vec![0.0, 2.0, 2.0, 0.0]).unwrap();
        assert!(s.symmetry_deviation(&[1, 2]) == 0.0);
    }

    #[test]
    fn permutations_count() {
        assert_eq!(permutations(1).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn outer_last_shape() {
        let t = Tensor::new(vec![2], vec![1.0, 2.0]).unwrap();
        let r = t.outer_last(&[3.0, 4.0, 5.0]);
        assert_eq!(r.shape(), &[2, 3]);
        assert_eq!(r.data(), &[3.0, 4.0, 5.0, 6.0, 8.0, 10.0]);
    }
}
