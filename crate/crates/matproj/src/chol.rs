//! Row-packed lower-triangular Cholesky factors that grow by appending blocks.
//!
//! The solvers extend a factorization one candidate block at a time, so the
//! factor is stored row-packed (row `i` holds `i + 1` entries) and extension
//! appends rows without touching existing data.

/// Lower-triangular matrix in row-packed storage.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct PackedLower {
    dim: usize,
    data: Vec<f64>,
}

impl PackedLower {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn row_start(i: usize) -> usize {
        i * (i + 1) / 2
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[Self::row_start(i)..Self::row_start(i) + i + 1]
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.data[Self::row_start(i) + i]
    }

    /// Solves `L y = b` in place by forward substitution.
    pub fn forward_solve(&self, b: &mut [f64]) {
        debug_assert_eq!(b.len(), self.dim);
        for i in 0..self.dim {
            let row = self.row(i);
            let mut s = b[i];
            for (t, &l) in row[..i].iter().enumerate() {
                s -= l * b[t];
            }
            b[i] = s / row[i];
        }
    }

    /// Sum of the logarithms of the diagonal entries (half the log-determinant
    /// of `L Lᵀ`).
    pub fn sum_log_diag(&self) -> f64 {
        (0..self.dim).map(|i| self.diag(i).ln()).sum()
    }

    /// Appends a block row `[l21 | l22]` producing the factor of the bordered
    /// matrix. `l21` is `b × k` row-major with `k = self.dim()`.
    pub fn extended(&self, l21: &[f64], l22: &PackedLower) -> PackedLower {
        let k = self.dim;
        let b = l22.dim;
        debug_assert_eq!(l21.len(), b * k);
        let mut data = Vec::with_capacity(Self::row_start(k + b));
        data.extend_from_slice(&self.data);
        for j in 0..b {
            data.extend_from_slice(&l21[j * k..(j + 1) * k]);
            data.extend_from_slice(l22.row(j));
        }
        PackedLower { dim: k + b, data }
    }
}

/// Cholesky of a dense symmetric matrix given row-major (only the lower
/// triangle is read). Returns `None` when a pivot is not strictly positive.
pub(crate) fn cholesky_packed(a: &[f64], n: usize) -> Option<PackedLower> {
    debug_assert_eq!(a.len(), n * n);
    let mut data = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            let ri = PackedLower::row_start(i);
            let rj = PackedLower::row_start(j);
            for t in 0..j {
                s -= data[ri + t] * data[rj + t];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                data[ri + j] = s.sqrt();
            } else {
                data[ri + j] = s / data[rj + j];
            }
        }
    }
    Some(PackedLower { dim: n, data })
}
