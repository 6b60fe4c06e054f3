//! Compressed sparse row storage for real symmetric operators.

use ndarray::Array2;

use crate::scalar::Real;

/// Real symmetric matrix in CSR form. Both triangles are stored and column
/// indices within a row are sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<T>,
}

impl<T: Real> SparseSym<T> {
    /// Builds a matrix row by row. `row(i, push)` must call `push(j, v)` for
    /// each stored entry of row `i`; duplicates are summed.
    pub fn from_rows(n: usize, mut row: impl FnMut(usize, &mut dyn FnMut(usize, T))) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut scratch: Vec<(usize, T)> = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            scratch.clear();
            row(i, &mut |j, v| scratch.push((j, v)));
            scratch.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < scratch.len() {
                let (j, mut v) = scratch[k];
                k += 1;
                while k < scratch.len() && scratch[k].0 == j {
                    v += scratch[k].1;
                    k += 1;
                }
                assert!(j < n, "column {j} out of range {n}");
                cols.push(j as u32);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseSym {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_dense(a: &Array2<T>) -> Self {
        let n = a.nrows();
        Self::from_rows(n, |i, push| {
            for j in 0..n {
                if a[(i, j)] != T::zero() {
                    push(j, a[(i, j)]);
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entries `(column, value)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&j, &v)| (j as usize, v))
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Adds `d[i]` to each diagonal entry, inserting entries where needed.
    pub fn add_diagonal(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.n);
        Self::from_rows(self.n, |i, push| {
            for (j, v) in self.row(i) {
                push(j, v);
            }
            if d[i] != T::zero() {
                push(i, d[i]);
            }
        })
    }

    /// Entrywise map over stored entries, dropping those mapped to zero.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, T) -> T) -> Self {
        Self::from_rows(self.n, |i, push| {
            for (j, v) in self.row(i) {
                let w = f(i, j, v);
                if w != T::zero() {
                    push(j, w);
                }
            }
        })
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    /// `Y = A X` for `r` vectors stored row-major (`x[i * r + c]`).
    pub fn matvec_block(&self, r: usize, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n * r);
        assert_eq!(y.len(), self.n * r);
        for i in 0..self.n {
            let yi = &mut y[i * r..(i + 1) * r];
            yi.iter_mut().for_each(|v| *v = T::zero());
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let a = self.vals[k];
                let j = self.cols[k] as usize;
                let xj = &x[j * r..(j + 1) * r];
                for (yv, &xv) in yi.iter_mut().zip(xj) {
                    *yv += a * xv;
                }
            }
        }
    }

    pub fn to_dense(&self) -> Array2<T> {
        let mut a = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                a[(i, j)] = v;
            }
        }
        a
    }

    /// Principal submatrix on the sorted index list `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut pos = vec![u32::MAX; self.n];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k as u32;
        }
        Self::from_rows(idx.len(), |k, push| {
            for (j, v) in self.row(idx[k]) {
                if pos[j] != u32::MAX {
                    push(pos[j] as usize, v);
                }
            }
        })
    }

    /// Dense `rows x cols` block with the given index lists.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Array2<T> {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &j) in cols.iter().enumerate() {
            pos[j] = k;
        }
        let mut b = Array2::zeros((rows.len(), cols.len()));
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if pos[j] != usize::MAX {
                    b[(r, pos[j])] = v;
                }
            }
        }
        b
    }

    /// `max |A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> T {
        (0..self.n)
            .map(|i| {
                let mut d = T::zero();
                let mut off = T::zero();
                for (j, v) in self.row(i) {
                    if j == i {
                        d = v;
                    } else {
                        off += v.abs();
                    }
                }
                d - off
            })
            .fold(T::infinity(), T::min)
    }

    /// `max_i sum_j |A_ij|`, an upper bound for the spectral norm.
    pub fn max_row_sum(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}
