//! Dense multi-index tensor values at a point with variance tracking.
//!
//! Components are stored row-major; dimensions stay at n <= 4 and ranks at
//! r <= 6, so the largest array a check ever touches has a few thousand
//! entries and no sparsity machinery is warranted.

use crate::error::TensorError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    pub fn flip(self) -> Variance {
        match self {
            Variance::Upper => Variance::Lower,
            Variance::Lower => Variance::Upper,
        }
    }
}

/// Rank-r, dimension-n component array with per-slot variance.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<T>,
}

/// Iterate all multi-indices of the given rank in row-major order.
pub fn each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        let mut slot = rank;
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            idx[slot] += 1;
            if idx[slot] < dim {
                break;
            }
            idx[slot] = 0;
        }
    }
}

impl<T: Scalar> DenseTensor<T> {
    pub fn new(dim: usize, variance: Vec<Variance>, data: Vec<T>) -> DenseTensor<T> {
        assert_eq!(data.len(), dim.pow(variance.len() as u32));
        DenseTensor {
            dim,
            variance,
            data,
        }
    }

    pub fn zeros(dim: usize, variance: Vec<Variance>, proto: &T) -> DenseTensor<T> {
        let len = dim.pow(variance.len() as u32);
        DenseTensor {
            dim,
            variance,
            data: vec![proto.zero_like(); len],
        }
    }

    pub fn from_fn(
        dim: usize,
        variance: Vec<Variance>,
        mut f: impl FnMut(&[usize]) -> T,
    ) -> DenseTensor<T> {
        let rank = variance.len();
        let mut data = Vec::with_capacity(dim.pow(rank as u32));
        each_index(dim, rank, |idx| data.push(f(idx)));
        DenseTensor {
            dim,
            variance,
            data,
        }
    }

    /// Scalar result of a fully contracted computation, as a rank-0 tensor.
    pub fn scalar(value: T) -> DenseTensor<T> {
        DenseTensor {
            dim: 1,
            variance: vec![],
            data: vec![value],
        }
    }

    /// Mixed Kronecker delta (upper, lower).
    pub fn kronecker(dim: usize, proto: &T) -> DenseTensor<T> {
        DenseTensor::from_fn(dim, vec![Variance::Upper, Variance::Lower], |idx| {
            if idx[0] == idx[1] {
                proto.one_like()
            } else {
                proto.zero_like()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    /// A representative scalar for shape/context (base point, jet order).
    pub fn proto(&self) -> &T {
        &self.data[0]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DenseTensor<U> {
        DenseTensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Order-0 values of every component.
    pub fn values(&self) -> DenseTensor<f64> {
        self.map(|t| t.value())
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|t| t.value().abs())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &DenseTensor<T>) -> DenseTensor<T> {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &DenseTensor<T>) -> DenseTensor<T> {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, other: &DenseTensor<T>, f: impl Fn(&T, &T) -> T) -> DenseTensor<T> {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
        assert_eq!(self.variance, other.variance, "tensor variance mismatch");
        DenseTensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> DenseTensor<T> {
        self.map(|t| -t.clone())
    }

    pub fn scale(&self, f: f64) -> DenseTensor<T> {
        self.map(|t| t.scale(f))
    }

    /// Multiply every component by a scalar (jet-valued factors allowed).
    pub fn scale_scalar(&self, s: &T) -> DenseTensor<T> {
        self.map(|t| t.clone() * s.clone())
    }

    /// Tensor (outer) product.
    pub fn outer(&self, other: &DenseTensor<T>) -> DenseTensor<T> {
        assert_eq!(self.dim, other.dim);
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a.clone() * b.clone());
            }
        }
        DenseTensor {
            dim: self.dim,
            variance,
            data,
        }
    }

    /// Reorder slots: output slot `s` takes input slot `perm[s]`.
    pub fn permute(&self, perm: &[usize]) -> DenseTensor<T> {
        assert_eq!(perm.len(), self.rank());
        let variance = perm.iter().map(|&p| self.variance[p]).collect();
        let rank = self.rank();
        let mut data = Vec::with_capacity(self.data.len());
        let mut src = vec![0usize; rank];
        each_index(self.dim, rank, |idx| {
            for s in 0..rank {
                src[perm[s]] = idx[s];
            }
            data.push(self.get(&src).clone());
        });
        DenseTensor {
            dim: self.dim,
            variance,
            data,
        }
    }

    pub fn swap_slots(&self, a: usize, b: usize) -> DenseTensor<T> {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Sum over a paired upper/lower slot.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<DenseTensor<T>, TensorError> {
        assert!(slot_a != slot_b && slot_a < self.rank() && slot_b < self.rank());
        if self.variance[slot_a] == self.variance[slot_b] {
            return Err(TensorError::VarianceMismatch {
                a: slot_a,
                b: slot_b,
            });
        }
        let (lo, hi) = (slot_a.min(slot_b), slot_a.max(slot_b));
        let rank = self.rank();
        let out_variance: Vec<Variance> = (0..rank)
            .filter(|s| *s != lo && *s != hi)
            .map(|s| self.variance[s])
            .collect();
        let proto = self.proto();
        let mut out = DenseTensor::zeros(self.dim, out_variance, proto);
        let mut full = vec![0usize; rank];
        let out_rank = rank - 2;
        let dim = self.dim;
        let mut data: Vec<T> = Vec::with_capacity(dim.pow(out_rank as u32));
        each_index(dim, out_rank, |idx| {
            let mut pos = 0;
            for s in 0..rank {
                if s != lo && s != hi {
                    full[s] = idx[pos];
                    pos += 1;
                }
            }
            let mut acc = proto.zero_like();
            for p in 0..dim {
                full[lo] = p;
                full[hi] = p;
                acc = acc + self.get(&full).clone();
            }
            data.push(acc);
        });
        out.data = data;
        Ok(out)
    }

    /// Contract `slot` against the second slot of a rank-2 `metric2` tensor
    /// (either g with two lower slots, or its inverse with two upper slots),
    /// replacing the slot's variance.
    fn metric_transform(
        &self,
        slot: usize,
        metric2: &DenseTensor<T>,
        new_variance: Variance,
    ) -> DenseTensor<T> {
        assert_eq!(metric2.rank(), 2);
        assert_eq!(metric2.dim, self.dim);
        let rank = self.rank();
        let mut variance = self.variance.clone();
        variance[slot] = new_variance;
        let proto = self.proto();
        let dim = self.dim;
        let mut src = vec![0usize; rank];
        let mut data: Vec<T> = Vec::with_capacity(self.data.len());
        each_index(dim, rank, |idx| {
            src.copy_from_slice(idx);
            let mut acc = proto.zero_like();
            for p in 0..dim {
                src[slot] = p;
                acc = acc + metric2.get(&[idx[slot], p]).clone() * self.get(&src).clone();
            }
            data.push(acc);
        });
        DenseTensor {
            dim,
            variance,
            data,
        }
    }

    /// Raise a lower slot with the inverse metric.
    pub fn raise(
        &self,
        slot: usize,
        g_inv: &DenseTensor<T>,
    ) -> Result<DenseTensor<T>, TensorError> {
        if self.variance[slot] != Variance::Lower {
            return Err(TensorError::VarianceMismatch { a: slot, b: slot });
        }
        Ok(self.metric_transform(slot, g_inv, Variance::Upper))
    }

    /// Lower an upper slot with the metric.
    pub fn lower(&self, slot: usize, g: &DenseTensor<T>) -> Result<DenseTensor<T>, TensorError> {
        if self.variance[slot] != Variance::Upper {
            return Err(TensorError::VarianceMismatch { a: slot, b: slot });
        }
        Ok(self.metric_transform(slot, g, Variance::Lower))
    }
}

/// Determinant and inverse of a rank-2 all-lower tensor by Gauss-Jordan with
/// partial pivoting on coefficient values. The inverse carries both slots
/// upper. Fails when |det| < 1e-12.
pub fn invert_metric<T: Scalar>(
    g: &DenseTensor<T>,
) -> Result<(DenseTensor<T>, T), TensorError> {
    assert_eq!(g.rank(), 2);
    let n = g.dim();
    let proto = g.proto();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { proto.one_like() } else { proto.zero_like() })
                .collect()
        })
        .collect();
    let mut det = proto.one_like();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .value()
                    .abs()
                    .partial_cmp(&a[r2][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        if pivot_row != col {
            a.swap(pivot_row, col);
            inv.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det = det * pivot.clone();
        let pivot_inv = pivot
            .try_recip()
            .ok_or(TensorError::SingularMetric { det: 0.0 })?;
        for j in 0..n {
            a[col][j] = a[col][j].clone() * pivot_inv.clone();
            inv[col][j] = inv[col][j].clone() * pivot_inv.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            if factor.value() == 0.0 && factor.value().abs() == 0.0 {
                // still subtract jets with zero value but nonzero derivatives
            }
            for j in 0..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
                inv[row][j] = inv[row][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    if det.value().abs() < 1e-12 {
        return Err(TensorError::SingularMetric { det: det.value() });
    }
    let out = DenseTensor::from_fn(n, vec![Variance::Upper, Variance::Upper], |idx| {
        inv[idx[0]][idx[1]].clone()
    });
    Ok((out, det))
}

/// Sign of a permutation given as an index array; 0 when an index repeats.
pub fn permutation_sign(idx: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in (i + 1)..idx.len() {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// All-lower Levi-Civita tensor: sqrt|det g| times the permutation sign,
/// oriented so the ascending-index component is positive.
pub fn levi_civita<T: Scalar>(g: &DenseTensor<T>) -> Result<DenseTensor<T>, TensorError> {
    assert_eq!(g.rank(), 2);
    let n = g.dim();
    let (_, det) = invert_metric(g)?;
    let abs_det = if det.value() < 0.0 { -det } else { det };
    let root = abs_det
        .try_sqrt()
        .ok_or(TensorError::SingularMetric { det: 0.0 })?;
    let proto = g.proto();
    Ok(DenseTensor::from_fn(
        n,
        vec![Variance::Lower; n],
        |idx| match permutation_sign(idx) {
            0 => proto.zero_like(),
            s => root.scale(s as f64),
        },
    ))
}

/// Wedge of two vectors: the rank-2 antisymmetric tensor
/// `x^i y^j - x^j y^i` (variance taken from the inputs, which must agree).
pub fn antisymmetrize_pair<T: Scalar>(
    x: &DenseTensor<T>,
    y: &DenseTensor<T>,
) -> DenseTensor<T> {
    assert_eq!(x.rank(), 1);
    assert_eq!(y.rank(), 1);
    assert_eq!(x.dim(), y.dim());
    assert_eq!(x.variance()[0], y.variance()[0]);
    let variance = vec![x.variance()[0]; 2];
    DenseTensor::from_fn(x.dim(), variance, |idx| {
        x.get(&[idx[0]]).clone() * y.get(&[idx[1]]).clone()
            - x.get(&[idx[1]]).clone() * y.get(&[idx[0]]).clone()
    })
}
