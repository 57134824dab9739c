//! Dense complex tensors: contraction, reshaping, and matrix factorizations.
//!
//! A [`DenseTensor`] is an n-index array of `Complex64` stored row-major over
//! the declared index order. Contraction is the generalization of the matrix
//! product: paired indices are summed, unpaired indices of the left operand
//! are followed by those of the right operand. Splitting (SVD or QR) works
//! through an [`IndexMap`] that fuses the tensor's indices into two
//! meta-indices, factorizes the resulting matrix, and maps the factors back
//! to tensors.
//!
//! All tensors are immutable after construction; operations return new
//! values, so instances can be shared freely across threads.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dims {dims:?} hold {expect} values but {got} were provided")]
    ShapeMismatch {
        dims: Vec<usize>,
        expect: usize,
        got: usize,
    },
    #[error("index extents must be at least 1")]
    ZeroDim,
    #[error("axis {axis} out of range for a rank-{rank} tensor")]
    AxisOutOfRange { axis: usize, rank: usize },
    #[error("axis {0} listed twice")]
    DuplicateAxis(usize),
    #[error("paired axes have extents {left} != {right}")]
    ExtentMismatch { left: usize, right: usize },
    #[error("cannot reshape {from} values into {to}")]
    ReshapeSize { from: usize, to: usize },
    #[error("split axes must form a proper nonempty subset of the tensor's axes")]
    BadSplit,
    #[error("singular value decomposition did not converge")]
    SvdFailure,
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Dense multi-index array of complex values in row-major order.
#[derive(Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<C64>,
    labels: Option<Vec<u64>>,
}

impl std::fmt::Debug for DenseTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DenseTensor{:?}", self.dims)?;
        if self.len() <= 8 {
            write!(f, " {:?}", self.data)?;
        }
        Ok(())
    }
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(TensorError::ZeroDim);
        }
        let expect: usize = dims.iter().product();
        if expect != data.len() {
            return Err(TensorError::ShapeMismatch {
                dims,
                expect,
                got: data.len(),
            });
        }
        Ok(Self {
            dims,
            data,
            labels: None,
        })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            dims,
            data: vec![C64::new(0.0, 0.0); n],
            labels: None,
        }
    }

    /// Rank-0 tensor holding a single value.
    pub fn scalar(z: C64) -> Self {
        Self {
            dims: vec![],
            data: vec![z],
            labels: None,
        }
    }

    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let n: usize = dims.iter().product();
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..n {
            data.push(f(&idx));
            for ax in (0..dims.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < dims[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Self {
            dims,
            data,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Self {
        assert_eq!(labels.len(), self.dims.len());
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut lin = 0usize;
        for (i, (&x, &d)) in idx.iter().zip(&self.dims).enumerate() {
            debug_assert!(x < d, "index {x} out of bound {d} on axis {i}");
            lin = lin * d + x;
        }
        lin
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.linear_index(idx)]
    }

    /// Sum of squared magnitudes of all entries.
    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|z| z * c).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(TensorError::ShapeMismatch {
                dims: other.dims.clone(),
                expect: self.len(),
                got: other.len(),
            });
        }
        Ok(Self {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            labels: None,
        })
    }

    /// Reinterpret the stored values under new extents. Pure relabeling of
    /// the canonical row-major order; no data movement.
    pub fn reshape(&self, new_dims: Vec<usize>) -> Result<Self> {
        if new_dims.iter().any(|&d| d == 0) {
            return Err(TensorError::ZeroDim);
        }
        let to: usize = new_dims.iter().product();
        if to != self.len() {
            return Err(TensorError::ReshapeSize {
                from: self.len(),
                to,
            });
        }
        Ok(Self {
            dims: new_dims,
            data: self.data.clone(),
            labels: None,
        })
    }

    /// Permute the index order; `perm[k]` is the axis of `self` that becomes
    /// axis `k` of the result. This moves data, unlike [`reshape`](Self::reshape).
    pub fn transpose(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.rank();
        if perm.len() != rank {
            return Err(TensorError::BadSplit);
        }
        let mut seen = vec![false; rank];
        for &p in perm {
            if p >= rank {
                return Err(TensorError::AxisOutOfRange { axis: p, rank });
            }
            if seen[p] {
                return Err(TensorError::DuplicateAxis(p));
            }
            seen[p] = true;
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        // strides of the source axes in the destination's iteration order
        let mut src_strides = vec![1usize; rank];
        for ax in (0..rank.saturating_sub(1)).rev() {
            src_strides[ax] = src_strides[ax + 1] * self.dims[ax + 1];
        }
        let dst_src_strides: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();
        let mut data = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; rank];
        let mut src = 0usize;
        for _ in 0..self.len() {
            data.push(self.data[src]);
            for ax in (0..rank).rev() {
                idx[ax] += 1;
                src += dst_src_strides[ax];
                if idx[ax] < new_dims[ax] {
                    break;
                }
                idx[ax] = 0;
                src -= dst_src_strides[ax] * new_dims[ax];
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| perm.iter().map(|&p| ls[p]).collect());
        Ok(Self {
            dims: new_dims,
            data,
            labels,
        })
    }
}

/// Fusion of a tensor's axes into two meta-indices `(i, j)`.
///
/// The map is a bijection between the original multi-index and the pair
/// `(i, j)`: `i` runs row-major over `row_axes`, `j` over `col_axes`.
#[derive(Clone, Debug)]
pub struct IndexMap {
    row_axes: Vec<usize>,
    col_axes: Vec<usize>,
    row_dim: usize,
    col_dim: usize,
}

impl IndexMap {
    /// Split the axes of `t` into rows (`left_axes`, in the given order) and
    /// columns (remaining axes, in the tensor's order).
    pub fn split(t: &DenseTensor, left_axes: &[usize]) -> Result<Self> {
        let rank = t.rank();
        if left_axes.is_empty() || left_axes.len() >= rank {
            return Err(TensorError::BadSplit);
        }
        let mut seen = vec![false; rank];
        for &ax in left_axes {
            if ax >= rank {
                return Err(TensorError::AxisOutOfRange { axis: ax, rank });
            }
            if seen[ax] {
                return Err(TensorError::DuplicateAxis(ax));
            }
            seen[ax] = true;
        }
        let col_axes: Vec<usize> = (0..rank).filter(|ax| !seen[*ax]).collect();
        let row_dim = left_axes.iter().map(|&ax| t.dims()[ax]).product();
        let col_dim = col_axes.iter().map(|&ax| t.dims()[ax]).product();
        Ok(Self {
            row_axes: left_axes.to_vec(),
            col_axes,
            row_dim,
            col_dim,
        })
    }

    pub fn row_axes(&self) -> &[usize] {
        &self.row_axes
    }

    pub fn col_axes(&self) -> &[usize] {
        &self.col_axes
    }

    pub fn row_dim(&self) -> usize {
        self.row_dim
    }

    pub fn col_dim(&self) -> usize {
        self.col_dim
    }

    /// Lay out `t` as the matrix indexed by the two meta-indices.
    pub fn matricize(&self, t: &DenseTensor) -> DMatrix<C64> {
        let perm: Vec<usize> = self
            .row_axes
            .iter()
            .chain(self.col_axes.iter())
            .copied()
            .collect();
        let tp = t.transpose(&perm).expect("validated axes");
        row_major_to_dmatrix(self.row_dim, self.col_dim, tp.data())
    }
}

/// Row-major slice -> nalgebra matrix (which stores column-major).
fn row_major_to_dmatrix(rows: usize, cols: usize, data: &[C64]) -> DMatrix<C64> {
    // A row-major (rows x cols) buffer is the column-major layout of the
    // transpose, so build that and transpose once.
    DMatrix::from_column_slice(cols, rows, data).transpose()
}

fn dmatrix_to_row_major(m: &DMatrix<C64>) -> Vec<C64> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Contract `a` and `b` over the given `(axis_of_a, axis_of_b)` pairs.
///
/// The result carries the unpaired indices of `a` (in order) followed by the
/// unpaired indices of `b`. Contracting with no pairs is the tensor product.
pub fn contract(a: &DenseTensor, b: &DenseTensor, pairs: &[(usize, usize)]) -> Result<DenseTensor> {
    let mut a_paired = vec![false; a.rank()];
    let mut b_paired = vec![false; b.rank()];
    for &(ax, bx) in pairs {
        if ax >= a.rank() {
            return Err(TensorError::AxisOutOfRange {
                axis: ax,
                rank: a.rank(),
            });
        }
        if bx >= b.rank() {
            return Err(TensorError::AxisOutOfRange {
                axis: bx,
                rank: b.rank(),
            });
        }
        if a_paired[ax] {
            return Err(TensorError::DuplicateAxis(ax));
        }
        if b_paired[bx] {
            return Err(TensorError::DuplicateAxis(bx));
        }
        if a.dims()[ax] != b.dims()[bx] {
            return Err(TensorError::ExtentMismatch {
                left: a.dims()[ax],
                right: b.dims()[bx],
            });
        }
        a_paired[ax] = true;
        b_paired[bx] = true;
    }

    let a_free: Vec<usize> = (0..a.rank()).filter(|&ax| !a_paired[ax]).collect();
    let b_free: Vec<usize> = (0..b.rank()).filter(|&bx| !b_paired[bx]).collect();

    let a_perm: Vec<usize> = a_free
        .iter()
        .copied()
        .chain(pairs.iter().map(|&(ax, _)| ax))
        .collect();
    let b_perm: Vec<usize> = pairs
        .iter()
        .map(|&(_, bx)| bx)
        .chain(b_free.iter().copied())
        .collect();

    let at = a.transpose(&a_perm)?;
    let bt = b.transpose(&b_perm)?;

    let m: usize = a_free.iter().map(|&ax| a.dims()[ax]).product();
    let k: usize = pairs.iter().map(|&(ax, _)| a.dims()[ax]).product();
    let n: usize = b_free.iter().map(|&bx| b.dims()[bx]).product();

    // Row-major buffers read as column-major give the transposed matrices,
    // so compute C^T = B^T * A^T; its column-major layout is row-major C.
    let at_mat = DMatrix::from_column_slice(k, m, at.data()); // A^T
    let bt_mat = DMatrix::from_column_slice(n, k, bt.data()); // B^T
    let ct = bt_mat * at_mat;

    let mut dims: Vec<usize> = a_free.iter().map(|&ax| a.dims()[ax]).collect();
    dims.extend(b_free.iter().map(|&bx| b.dims()[bx]));
    let data = ct.as_slice().to_vec();
    let mut out = if dims.is_empty() {
        DenseTensor::scalar(data[0])
    } else {
        DenseTensor::new(dims, data)?
    };
    if let (Some(la), Some(lb)) = (a.labels(), b.labels()) {
        let labels: Vec<u64> = a_free
            .iter()
            .map(|&ax| la[ax])
            .chain(b_free.iter().map(|&bx| lb[bx]))
            .collect();
        if !labels.is_empty() {
            out = out.with_labels(labels);
        }
    }
    Ok(out)
}

/// Singular value decomposition across the bipartition picked by `left_axes`.
///
/// Returns `(U, S, V)` with `U` carrying the left indices plus a new bond,
/// `V` the bond plus the remaining indices, and `S` sorted descending.
/// `max_rank` keeps at most that many singular values; `cutoff` then drops
/// any `S[k]` with `S[k]/S[0] < cutoff`.
pub fn split_svd(
    t: &DenseTensor,
    left_axes: &[usize],
    max_rank: Option<usize>,
    cutoff: Option<f64>,
) -> Result<(DenseTensor, Vec<f64>, DenseTensor)> {
    let map = IndexMap::split(t, left_axes)?;
    let mat = map.matricize(t);
    let svd = mat
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(TensorError::SvdFailure)?;
    let u = svd.u.ok_or(TensorError::SvdFailure)?;
    let vt = svd.v_t.ok_or(TensorError::SvdFailure)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();

    // nalgebra returns the values sorted descending already; take that order
    // as-is (ties keep their relative positions) and only truncate.
    let full = s.len();
    let mut keep = full.min(max_rank.unwrap_or(full)).max(1);
    if let Some(cut) = cutoff {
        let s0 = s[0];
        if s0 > 0.0 {
            while keep > 1 && s[keep - 1] / s0 < cut {
                keep -= 1;
            }
        }
    }
    s.truncate(keep);

    let left_dims: Vec<usize> = map.row_axes().iter().map(|&ax| t.dims()[ax]).collect();
    let right_dims: Vec<usize> = map.col_axes().iter().map(|&ax| t.dims()[ax]).collect();

    let mut u_dims = left_dims;
    u_dims.push(keep);
    let u_trunc = u.columns(0, keep).into_owned();
    let u_tensor = DenseTensor::new(u_dims, dmatrix_to_row_major(&u_trunc))?;

    let mut v_dims = vec![keep];
    v_dims.extend(right_dims);
    let vt_trunc = vt.rows(0, keep).into_owned();
    let v_tensor = DenseTensor::new(v_dims, dmatrix_to_row_major(&vt_trunc))?;

    Ok((u_tensor, s, v_tensor))
}

/// Rebuild the tensor `U * diag(S) * V` produced by [`split_svd`].
pub fn svd_recombine(u: &DenseTensor, s: &[f64], v: &DenseTensor) -> Result<DenseTensor> {
    let bond = u.rank() - 1;
    let mut us = u.clone();
    let stride: usize = 1;
    // bond is the last axis of u: scale each column slice
    let k = *u.dims().last().expect("u has a bond axis");
    debug_assert_eq!(k, s.len());
    let mut data = us.data.clone();
    for (i, z) in data.iter_mut().enumerate() {
        *z *= s[i % k];
    }
    let _ = stride;
    us.data = data;
    contract(&us, v, &[(bond, 0)])
}

/// QR factorization across the bipartition picked by `left_axes`.
///
/// `Q` has orthonormal meta-columns (`Q^dagger Q = I`), `R` is the remaining
/// factor; contracting `Q` with `R` over the new bond rebuilds `t`.
pub fn split_qr(t: &DenseTensor, left_axes: &[usize]) -> Result<(DenseTensor, DenseTensor)> {
    let map = IndexMap::split(t, left_axes)?;
    let mat = map.matricize(t);
    let k = map.row_dim().min(map.col_dim());
    let qr = mat.qr();
    let q = qr.q();
    let r = qr.r();

    let left_dims: Vec<usize> = map.row_axes().iter().map(|&ax| t.dims()[ax]).collect();
    let right_dims: Vec<usize> = map.col_axes().iter().map(|&ax| t.dims()[ax]).collect();

    let mut q_dims = left_dims;
    q_dims.push(k);
    let q_tensor = DenseTensor::new(q_dims, dmatrix_to_row_major(&q))?;
    let mut r_dims = vec![k];
    r_dims.extend(right_dims);
    let r_tensor = DenseTensor::new(r_dims, dmatrix_to_row_major(&r))?;
    Ok((q_tensor, r_tensor))
}
