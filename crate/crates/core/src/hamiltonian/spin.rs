use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// 2×2 complex block acting on polarization space; row-major.
pub type Block<T> = [[Complex<T>; 2]; 2];

pub fn block_zero<T: Real>() -> Block<T> {
    [[Complex::zero(); 2]; 2]
}

pub fn block_identity<T: Real>() -> Block<T> {
    [[Complex::one(), Complex::zero()], [Complex::zero(), Complex::one()]]
}

pub fn block_scale<T: Real>(b: &Block<T>, s: Complex<T>) -> Block<T> {
    [[b[0][0] * s, b[0][1] * s], [b[1][0] * s, b[1][1] * s]]
}

pub fn block_mul<T: Real>(a: &Block<T>, b: &Block<T>) -> Block<T> {
    let mut out = block_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn block_adjoint<T: Real>(a: &Block<T>) -> Block<T> {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn block_det<T: Real>(a: &Block<T>) -> Complex<T> {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn pauli_x<T: Real>() -> Block<T> {
    let (o, z) = (Complex::one(), Complex::zero());
    [[z, o], [o, z]]
}

pub fn pauli_y<T: Real>() -> Block<T> {
    let z = Complex::zero();
    [[z, Complex::new(T::zero(), -T::one())], [Complex::new(T::zero(), T::one()), z]]
}

pub fn pauli_z<T: Real>() -> Block<T> {
    let z = Complex::zero();
    [[Complex::one(), z], [z, -Complex::<T>::one()]]
}

/// Unit vector `n` selecting σ·n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinAxis<T> {
    n: [T; 3],
}

impl<T: Real> SpinAxis<T> {
    pub fn new(nx: T, ny: T, nz: T) -> Result<Self> {
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        let tol = T::lit(1e-12).max(T::lit(16.0 * T::EPS));
        if (norm - T::one()).abs() > tol {
            return Err(Error::InvalidParameter(format!("spin axis norm {norm} is not 1")));
        }
        Ok(Self { n: [nx, ny, nz] })
    }

    pub fn x() -> Self {
        Self { n: [T::one(), T::zero(), T::zero()] }
    }

    pub fn y() -> Self {
        Self { n: [T::zero(), T::one(), T::zero()] }
    }

    pub fn z() -> Self {
        Self { n: [T::zero(), T::zero(), T::one()] }
    }

    pub fn components(&self) -> [T; 3] {
        self.n
    }

    /// σ·n
    pub fn sigma(&self) -> Block<T> {
        let [x, y, z] = self.n;
        let i = Complex::new(T::zero(), T::one());
        [
            [Complex::from(z), Complex::from(x) - i * y],
            [Complex::from(x) + i * y, Complex::from(-z)],
        ]
    }
}

/// e^{i2πφ σ·n} = cos(2πφ) I + i sin(2πφ) σ·n
pub fn jones_exp<T: Real>(phi: T, axis: &SpinAxis<T>) -> Block<T> {
    let th = phi * T::two_pi();
    let (s, c) = th.sin_cos();
    let sn = axis.sigma();
    let is = Complex::new(T::zero(), s);
    let mut out = block_zero();
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = sn[a][b] * is + if a == b { Complex::from(c) } else { Complex::zero() };
        }
    }
    out
}
