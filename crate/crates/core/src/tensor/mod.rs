//! Dense tensors over an exact or floating scalar field.
//!
//! Entries are stored flat in lexicographic index order with the first index
//! most significant, so entry `(i1, ..., im)` of an `n`-dimensional cubical
//! tensor sits at `i1 * n^(m-1) + ... + im`. Indices are zero-based.

mod matrix;

pub use matrix::Matrix;

use crate::error::{shape, usage, Result};
use crate::scalar::Scalar;

/// Upper bound on the number of stored entries.
pub const MAX_ENTRIES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

/// `value` is the full contraction `A x^m`; `partial` is the vector
/// `A x^(m-1)` obtained by contracting every mode but the first.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue<T> {
    pub value: T,
    pub partial: Vec<T>,
}

fn checked_len(shape: &[usize]) -> Result<usize> {
    let mut len = 1usize;
    for &e in shape {
        len = len
            .checked_mul(e)
            .filter(|&l| l <= MAX_ENTRIES)
            .ok_or_else(|| shape_too_large(shape))?;
    }
    Ok(len)
}

fn shape_too_large(s: &[usize]) -> crate::Error {
    usage(format!("tensor of shape {s:?} exceeds {MAX_ENTRIES} entries"))
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(usage(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(usage(format!("{perm:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Advances `idx` as an odometer over `shape`; returns false after the last index.
pub(crate) fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < shape[pos] {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let len = checked_len(&shape)?;
        Ok(Tensor {
            shape,
            data: vec![T::zero(); len],
        })
    }

    pub fn from_vec(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let len = checked_len(&shape)?;
        if data.len() != len {
            return Err(crate::error::shape(format!(
                "shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn cubical_zeros(order: usize, dim: usize) -> Result<Self> {
        Tensor::zeros(vec![dim; order])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    /// Common extent of every mode, or `None` for non-cubical shapes.
    pub fn dim(&self) -> Option<usize> {
        let first = *self.shape.first()?;
        self.shape.iter().all(|&e| e == first).then_some(first)
    }

    pub(crate) fn cubical_dim(&self) -> Result<usize> {
        self.dim()
            .ok_or_else(|| shape(format!("expected a cubical tensor, got shape {:?}", self.shape)))
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &e)| acc * e + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let k = self.flat_index(idx);
        self.data[k] = v;
    }

    /// Calls `f(index, entry)` for every entry in storage order.
    pub fn for_each_indexed(&self, mut f: impl FnMut(&[usize], &T)) {
        if self.data.is_empty() {
            return;
        }
        let mut idx = vec![0; self.order()];
        let mut k = 0;
        loop {
            f(&idx, &self.data[k]);
            k += 1;
            if !next_index(&mut idx, &self.shape) {
                break;
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        if self.dim().is_none() {
            return false;
        }
        let mut sorted = vec![0; self.order()];
        let mut symmetric = true;
        self.for_each_indexed(|idx, v| {
            if !symmetric {
                return;
            }
            sorted.copy_from_slice(idx);
            sorted.sort_unstable();
            if self.get(&sorted) != v {
                symmetric = false;
            }
        });
        symmetric
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise `f`; the first failing entry aborts the map.
    pub fn try_map<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Tensor<U>> {
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn zip_with(&self, other: &Tensor<T>, op: &str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape != other.shape {
            return Err(shape(format!(
                "{op} of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, other: &Tensor<T>) -> Result<Self> {
        self.zip_with(other, "hadamard product", |a, b| a.clone() * b.clone())
    }

    pub fn add(&self, other: &Tensor<T>) -> Result<Self> {
        self.zip_with(other, "sum", |a, b| a.clone() + b.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    /// `v ⊗ v ⊗ ... ⊗ v` (`order` factors).
    pub fn outer_power(v: &[T], order: usize) -> Result<Self> {
        let mut t = Tensor::cubical_zeros(order, v.len())?;
        if order == 0 {
            t.data[0] = T::one();
            return Ok(t);
        }
        // prefix products: data[k] for the first j modes, then extend by one mode
        let mut acc: Vec<T> = v.to_vec();
        for _ in 1..order {
            let mut next = Vec::with_capacity(acc.len() * v.len());
            for a in &acc {
                for x in v {
                    next.push(a.clone() * x.clone());
                }
            }
            acc = next;
        }
        t.data = acc;
        Ok(t)
    }

    pub fn diagonal(d: &[T], order: usize) -> Result<Self> {
        let n = d.len();
        let mut t = Tensor::cubical_zeros(order, n)?;
        for (i, di) in d.iter().enumerate() {
            let k = t.flat_index(&vec![i; order]);
            t.data[k] = di.clone();
        }
        Ok(t)
    }

    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        Tensor::diagonal(&vec![T::one(); dim], order)
    }

    /// `self ×_mode b`: contracts mode `mode` (zero-based) against the
    /// columns of `b`, whose row count becomes the new extent of that mode.
    pub fn k_mode_product(&self, b: &Matrix<T>, mode: usize) -> Result<Self> {
        if mode >= self.order() {
            return Err(usage(format!(
                "mode {mode} out of range for an order-{} tensor",
                self.order()
            )));
        }
        let ik = self.shape[mode];
        if b.cols() != ik {
            return Err(shape(format!(
                "mode {mode} has extent {ik} but the matrix has {} columns",
                b.cols()
            )));
        }
        let outer: usize = self.shape[..mode].iter().product();
        let inner: usize = self.shape[mode + 1..].iter().product();
        let j_ext = b.rows();
        let mut out_shape = self.shape.clone();
        out_shape[mode] = j_ext;
        let mut out: Tensor<T> = Tensor::zeros(out_shape)?;
        for o in 0..outer {
            for j in 0..j_ext {
                let brow = b.row(j);
                let dst = (o * j_ext + j) * inner;
                for (i, bji) in brow.iter().enumerate() {
                    if bji.is_zero() {
                        continue;
                    }
                    let src = (o * ik + i) * inner;
                    for r in 0..inner {
                        let a = &self.data[src + r];
                        if a.is_zero() {
                            continue;
                        }
                        let v = out.data[dst + r].clone() + a.clone() * bji.clone();
                        out.data[dst + r] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self ×_1 e ×_2 e ... ×_m e`.
    pub fn multi_mode_product(&self, e: &Matrix<T>) -> Result<Self> {
        let mut t = self.clone();
        for mode in 0..self.order() {
            t = t.k_mode_product(e, mode)?;
        }
        Ok(t)
    }

    /// General product of a cubical order-`m` tensor with a cubical
    /// order-`k` tensor of the same dimension, giving order `(m-1)(k-1)+1`:
    ///
    /// `(A·B)[i, α1, ..., α(m-1)] = Σ_{j2..jm} a[i, j2, ..., jm] b[j2, α1] ... b[jm, α(m-1)]`
    ///
    /// with each `α` a multi-index of length `k-1`. At `m = k = 2` this is the
    /// matrix product.
    pub fn general_product(&self, other: &Tensor<T>) -> Result<Self> {
        let n = self.cubical_dim()?;
        let n_b = other.cubical_dim()?;
        if n != n_b {
            return Err(shape(format!("general product of dimensions {n} and {n_b}")));
        }
        let m = self.order();
        let k = other.order();
        if m < 1 || k < 1 {
            return Err(usage("general product needs tensors of order at least 1"));
        }
        let out_order = (m - 1) * (k - 1) + 1;
        let mut out = Tensor::cubical_zeros(out_order, n)?;
        // b viewed as an n × n^(k-1) matrix
        let block = other.len() / n.max(1);
        let b_at = |j: usize, alpha: usize| &other.data[j * block + alpha];
        let alpha_shape = vec![block; m - 1];
        let j_shape = vec![n; m - 1];
        let a_stride = self.len() / n.max(1);

        for i in 0..n {
            let a_row = &self.data[i * a_stride..(i + 1) * a_stride];
            let mut alpha = vec![0usize; m - 1];
            let mut out_k = i * alpha_shape.iter().product::<usize>();
            loop {
                let mut sum = T::zero();
                let mut j = vec![0usize; m - 1];
                let mut a_k = 0;
                loop {
                    let a = &a_row[a_k];
                    if !a.is_zero() {
                        let mut term = a.clone();
                        for (jt, at) in j.iter().zip(&alpha) {
                            term = term * b_at(*jt, *at).clone();
                        }
                        sum = sum + term;
                    }
                    a_k += 1;
                    if !next_index(&mut j, &j_shape) {
                        break;
                    }
                }
                out.data[out_k] = sum;
                out_k += 1;
                if !next_index(&mut alpha, &alpha_shape) {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Evaluates the homogeneous form `A x^m` and the vector `A x^(m-1)`.
    /// Modes are contracted from the last one inward in a fixed order.
    pub fn eval_form(&self, x: &[T]) -> Result<FormValue<T>> {
        let n = self.cubical_dim()?;
        if x.len() != n {
            return Err(shape(format!("vector of length {} for dimension {n}", x.len())));
        }
        if self.order() == 0 {
            return Err(usage("form of an order-0 tensor"));
        }
        let mut cur = self.data.clone();
        for _ in 1..self.order() {
            cur = cur
                .chunks(n)
                .map(|chunk| {
                    chunk
                        .iter()
                        .zip(x)
                        .fold(T::zero(), |acc, (a, xi)| acc + a.clone() * xi.clone())
                })
                .collect();
        }
        let value = cur
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (g, xi)| acc + g.clone() * xi.clone());
        Ok(FormValue {
            value,
            partial: cur,
        })
    }

    /// `self ×_1 P ×_2 P ... ×_m P` for the permutation matrix of `perm`;
    /// entry `(i1, ..., im)` of the result is `t[perm[i1], ..., perm[im]]`.
    pub fn permute_congruence(&self, perm: &[usize]) -> Result<Self> {
        let n = self.cubical_dim()?;
        check_permutation(perm, n)?;
        let mut out = self.clone();
        let mut src = vec![0usize; self.order()];
        let mut k = 0;
        self.for_each_indexed(|idx, _| {
            for (s, &i) in src.iter_mut().zip(idx) {
                *s = perm[i];
            }
            out.data[k] = self.get(&src).clone();
            k += 1;
        });
        Ok(out)
    }

    /// Explicit conversion to floating point.
    pub fn to_f64(&self) -> Tensor<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.data.iter().map(|a| a.to_f64().abs()).fold(0.0, f64::max)
    }
}
