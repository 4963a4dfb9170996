//! Tight-binding Hamiltonians in units of κ over the site ⊗ polarization basis.

mod builders;
mod spin;

pub use builders::{
    apply_onsite_disorder, build_dirac, build_landau_hofstadter, build_non_abelian, build_oam_gauge_hofstadter,
    build_qsh, qsh_gauge, GaugeConfig, Model, PerCavity,
};
pub use spin::{
    block_adjoint, block_det, block_identity, block_mul, block_scale, block_zero, jones_exp, pauli_x, pauli_y,
    pauli_z, Block, SpinAxis,
};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{Axis, LatticeSpec};
use crate::linalg::{CsrMatrix, DenseMatrix};
use crate::scalar::Real;

/// Matrices above this dimension are stored sparse.
pub const SPARSE_THRESHOLD: usize = 4096;

/// One directed hop `a†_to · block · a_from` (the Hermitian partner is implied).
#[derive(Clone, Debug)]
pub struct Link<T> {
    pub axis: Axis,
    pub from: (usize, i64),
    pub to: (usize, i64),
    pub block: Block<T>,
    pub wraps: bool,
}

/// Hop-level description of a Hamiltonian before assembly. Disorder sampling
/// perturbs this form so every bond is touched exactly once.
#[derive(Clone, Debug)]
pub struct TightBinding<T> {
    pub spec: LatticeSpec,
    pub links: Vec<Link<T>>,
    /// Onsite block per cell, indexed `j * n_l + (l - l_min)`.
    pub onsite: Vec<Block<T>>,
}

impl<T: Real> TightBinding<T> {
    pub fn cell(&self, j: usize, l: i64) -> usize {
        j * self.spec.n_l() + (l - self.spec.l_min) as usize
    }

    pub fn assemble(&self) -> HamiltonianMatrix<T> {
        let spec = self.spec;
        let sd = spec.spin_dim;
        let mut trip: Vec<(usize, usize, Complex<T>)> = Vec::with_capacity(self.links.len() * 2 * sd * sd + spec.dim());
        for link in &self.links {
            let f = spec.index_unchecked(link.from.0, link.from.1, 0);
            let t = spec.index_unchecked(link.to.0, link.to.1, 0);
            for a in 0..sd {
                for b in 0..sd {
                    let v = link.block[a][b];
                    if v.is_zero() {
                        continue;
                    }
                    trip.push((t + a, f + b, v));
                    trip.push((f + b, t + a, v.conj()));
                }
            }
        }
        for j in 0..spec.n_x {
            for l in spec.l_min..=spec.l_max {
                let blk = &self.onsite[self.cell(j, l)];
                let base = spec.index_unchecked(j, l, 0);
                for a in 0..sd {
                    for b in 0..sd {
                        if !blk[a][b].is_zero() {
                            trip.push((base + a, base + b, blk[a][b]));
                        }
                    }
                }
            }
        }
        HamiltonianMatrix::from_triplets(spec, trip)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage<T> {
    Dense(DenseMatrix<T>),
    Sparse(CsrMatrix<T>),
}

/// Hermitian matrix with its lattice index map.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix<T> {
    spec: LatticeSpec,
    storage: Storage<T>,
}

impl<T: Real> HamiltonianMatrix<T> {
    pub fn from_triplets(spec: LatticeSpec, trip: Vec<(usize, usize, Complex<T>)>) -> Self {
        let n = spec.dim();
        let storage = if n > SPARSE_THRESHOLD {
            Storage::Sparse(CsrMatrix::from_triplets(n, trip))
        } else {
            let mut d = DenseMatrix::zeros(n, n);
            for (r, c, v) in trip {
                d[(r, c)] += v;
            }
            Storage::Dense(d)
        };
        Self { spec, storage }
    }

    pub fn from_dense(spec: LatticeSpec, m: DenseMatrix<T>) -> Result<Self> {
        if m.n_rows() != spec.dim() || m.n_cols() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), got: m.n_rows() });
        }
        Ok(Self { spec, storage: Storage::Dense(m) })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn storage(&self) -> &Storage<T> {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        match &self.storage {
            Storage::Dense(d) => d[(r, c)],
            Storage::Sparse(s) => s.get(r, c),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        match &self.storage {
            Storage::Dense(d) => d.matvec(x),
            Storage::Sparse(s) => s.matvec(x),
        }
    }

    pub fn hermiticity_error(&self) -> T {
        match &self.storage {
            Storage::Dense(d) => d.hermiticity_error(),
            Storage::Sparse(s) => {
                let mut err = T::zero();
                for r in 0..s.dim() {
                    for (c, v) in s.row_entries(r) {
                        err = err.max((v - s.get(c, r).conj()).norm());
                    }
                }
                err
            }
        }
    }

    /// Adds `d[i]` to the i-th diagonal entry.
    pub fn add_diagonal(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: d.len() });
        }
        let storage = match &self.storage {
            Storage::Dense(m) => {
                let mut m = m.clone();
                for (i, v) in d.iter().enumerate() {
                    m[(i, i)] += Complex::from(*v);
                }
                Storage::Dense(m)
            }
            Storage::Sparse(s) => {
                let mut trip = Vec::with_capacity(s.nnz() + d.len());
                for r in 0..s.dim() {
                    trip.extend(s.row_entries(r).map(|(c, v)| (r, c, v)));
                }
                trip.extend(d.iter().enumerate().map(|(i, v)| (i, i, Complex::from(*v))));
                Storage::Sparse(CsrMatrix::from_triplets(s.dim(), trip))
            }
        };
        Ok(Self { spec: self.spec, storage })
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        T::eigvalsh(&self.to_dense())
    }

    pub fn eigh(&self) -> Result<(Vec<T>, DenseMatrix<T>)> {
        T::eigh(&self.to_dense())
    }
}
