//! Scalar abstraction. All physics is written against [`Real`]; the dense
//! eigen/LU kernels are supplied per concrete float by the faer backend.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon scaled for "exact" comparisons in algorithms.
    const EPS: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("finite float")
    }

    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Hermitian eigendecomposition, eigenvalues ascending, eigenvectors as columns.
    fn eigh(a: &DenseMatrix<Self>) -> Result<(Vec<Self>, DenseMatrix<Self>)>;

    /// Hermitian eigenvalues only, ascending.
    fn eigvalsh(a: &DenseMatrix<Self>) -> Result<Vec<Self>>;

    /// Solve `a x = b` for every right-hand side in `rhs` with one LU factorization.
    fn lu_solve(a: &DenseMatrix<Self>, rhs: &[Vec<Complex<Self>>]) -> Result<Vec<Vec<Complex<Self>>>>;
}

pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// e^{i 2π x}
pub fn cis_cycles<T: Real>(x: T) -> Complex<T> {
    cis(x * T::two_pi())
}

macro_rules! faer_backend {
    ($t:ty, $eps:expr) => {
        impl Real for $t {
            const EPS: f64 = $eps;

            fn eigh(a: &DenseMatrix<Self>) -> Result<(Vec<Self>, DenseMatrix<Self>)> {
                let n = a.n_rows();
                let m = Mat::<Complex<$t>>::from_fn(n, n, |i, j| a[(i, j)]);
                let evd = m
                    .self_adjoint_eigen(Side::Lower)
                    .map_err(|e| Error::Eigen(format!("{e:?}")))?;
                let s = evd.S();
                let u = evd.U();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&x, &y| s[x].re.partial_cmp(&s[y].re).unwrap());
                let vals = order.iter().map(|&k| s[k].re).collect();
                let vecs = DenseMatrix::from_fn(n, n, |i, k| u[(i, order[k])]);
                Ok((vals, vecs))
            }

            fn eigvalsh(a: &DenseMatrix<Self>) -> Result<Vec<Self>> {
                let n = a.n_rows();
                let m = Mat::<Complex<$t>>::from_fn(n, n, |i, j| a[(i, j)]);
                let mut v = m
                    .self_adjoint_eigenvalues(Side::Lower)
                    .map_err(|e| Error::Eigen(format!("{e:?}")))?;
                v.sort_by(|x, y| x.partial_cmp(y).unwrap());
                Ok(v)
            }

            fn lu_solve(
                a: &DenseMatrix<Self>,
                rhs: &[Vec<Complex<Self>>],
            ) -> Result<Vec<Vec<Complex<Self>>>> {
                let n = a.n_rows();
                if rhs.is_empty() {
                    return Ok(Vec::new());
                }
                let m = Mat::<Complex<$t>>::from_fn(n, n, |i, j| a[(i, j)]);
                let lu = m.partial_piv_lu();
                let b = Mat::<Complex<$t>>::from_fn(n, rhs.len(), |i, k| rhs[k][i]);
                let x = lu.solve(&b);
                Ok((0..rhs.len()).map(|k| (0..n).map(|i| x[(i, k)]).collect()).collect())
            }
        }
    };
}

faer_backend!(f64, f64::EPSILON);
faer_backend!(f32, f32::EPSILON as f64);
