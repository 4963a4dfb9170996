//! Minimal complex matrix containers and a preconditioned Krylov solver.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(Complex::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// max |A - A†|
    pub fn hermiticity_error(&self) -> T {
        let mut err = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn determinant(&self) -> Complex<T> {
        assert_eq!(self.rows, self.cols);
        determinant(self.rows, self.data.clone())
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant of a small row-major matrix by partial-pivot elimination.
pub fn determinant<T: Real>(n: usize, mut a: Vec<Complex<T>>) -> Complex<T> {
    let mut det = Complex::<T>::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x * n + c].norm().partial_cmp(&a[y * n + c].norm()).unwrap())
            .unwrap();
        if a[p * n + c].is_zero() {
            return Complex::zero();
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            det = -det;
        }
        let piv = a[c * n + c];
        det *= piv;
        for r in c + 1..n {
            let f = a[r * n + c] / piv;
            for k in c..n {
                let v = a[c * n + k];
                a[r * n + k] -= f * v;
            }
        }
    }
    det
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, Complex<T>)>) -> Self {
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<Complex<T>> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex::zero(),
        }
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|r| self.row_entries(r).fold(Complex::zero(), |acc, (c, v)| acc + v * x[c]))
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row_entries(r) {
                d[(r, c)] = v;
            }
        }
        d
    }
}

pub fn norm2<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
}

fn dotc<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

/// Jacobi-preconditioned BiCGSTAB for `apply(x) = b`.
pub fn bicgstab<T: Real>(
    apply: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    diag: &[Complex<T>],
    b: &[Complex<T>],
    tol: T,
    max_iter: usize,
) -> Result<Vec<Complex<T>>> {
    let n = b.len();
    let inv_d: Vec<Complex<T>> = diag
        .iter()
        .map(|d| if d.is_zero() { Complex::<T>::one() } else { Complex::<T>::one() / *d })
        .collect();
    let precond = |v: &[Complex<T>]| -> Vec<Complex<T>> { v.iter().zip(&inv_d).map(|(a, d)| *a * *d).collect() };
    let bnorm = norm2(b);
    if bnorm.is_zero() {
        return Ok(vec![Complex::zero(); n]);
    }
    let mut x = precond(b);
    let ax = apply(&x);
    let mut r: Vec<_> = b.iter().zip(&ax).map(|(a, c)| *a - *c).collect();
    let r_hat = r.clone();
    let mut rho = Complex::<T>::one();
    let mut alpha = Complex::<T>::one();
    let mut omega = Complex::<T>::one();
    let mut v = vec![Complex::<T>::zero(); n];
    let mut p = vec![Complex::<T>::zero(); n];
    let mut res = norm2(&r) / bnorm;
    for it in 0..max_iter {
        if res < tol {
            return Ok(x);
        }
        let rho_new = dotc(&r_hat, &r);
        if rho_new.norm() < T::min_positive_value() {
            return Err(Error::NoConvergence { iterations: it, residual: res.f64() });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        let y = precond(&p);
        v = apply(&y);
        alpha = rho / dotc(&r_hat, &v);
        let s: Vec<_> = (0..n).map(|k| r[k] - alpha * v[k]).collect();
        for k in 0..n {
            x[k] += alpha * y[k];
        }
        if norm2(&s) / bnorm < tol {
            let ax = apply(&x);
            r = b.iter().zip(&ax).map(|(a, c)| *a - *c).collect();
            res = norm2(&r) / bnorm;
            continue;
        }
        let z = precond(&s);
        let t = apply(&z);
        let tt = dotc(&t, &t);
        omega = if tt.is_zero() { Complex::zero() } else { dotc(&t, &s) / tt };
        for k in 0..n {
            x[k] += omega * z[k];
            r[k] = s[k] - omega * t[k];
        }
        res = norm2(&r) / bnorm;
    }
    // Recompute the true residual before giving up.
    let ax = apply(&x);
    let true_res = norm2(&b.iter().zip(&ax).map(|(a, c)| *a - *c).collect::<Vec<_>>()) / bnorm;
    if true_res < tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence { iterations: max_iter, residual: true_res.f64() })
    }
}
