//! Steady-state input-output scattering: T = −i √Γ (ω − H + iΓ/2)⁻¹ √Γ.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::hamiltonian::{build_landau_hofstadter, HamiltonianMatrix};
use crate::lattice::{LatticeSpec, SiteIndex};
use crate::linalg::{bicgstab, norm2, DenseMatrix};
use crate::scalar::Real;

/// Above this dimension solves switch from LU to preconditioned Krylov.
pub const DIRECT_SOLVE_LIMIT: usize = 6000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DecaySpec<T> {
    Uniform(T),
    /// One rate per flat index.
    PerMode(Vec<T>),
}

impl<T: Real> DecaySpec<T> {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            DecaySpec::Uniform(g) if *g > T::zero() => Ok(()),
            DecaySpec::Uniform(g) => Err(Error::InvalidParameter(format!("loss must be positive, got {g}"))),
            DecaySpec::PerMode(v) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
                }
                match v.iter().position(|g| !(*g > T::zero())) {
                    Some(i) => Err(Error::InvalidParameter(format!("loss rate at index {i} is not positive"))),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn rate(&self, idx: usize) -> T {
        match self {
            DecaySpec::Uniform(g) => *g,
            DecaySpec::PerMode(v) => v[idx],
        }
    }

    pub fn uniform(&self) -> Option<T> {
        match self {
            DecaySpec::Uniform(g) => Some(*g),
            DecaySpec::PerMode(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Spectral for uniform loss, LU otherwise, Krylov above the direct limit.
    #[default]
    Auto,
    /// Eigendecomposition once, then G e_n = V (ω − E + iγ/2)⁻¹ V† e_n. Uniform loss only.
    Spectral,
    /// LU factorization per ω.
    Direct,
    /// BiCGSTAB with a diagonal preconditioner.
    Iterative,
}

enum Backend<T> {
    Spectral { energies: Vec<T>, vectors: DenseMatrix<T>, gamma: T },
    Direct,
    Iterative,
}

/// Resolvent (ω − H + iΓ/2)⁻¹ applied to unit vectors.
pub struct Propagator<'a, T> {
    h: &'a HamiltonianMatrix<T>,
    decay: DecaySpec<T>,
    backend: Backend<T>,
}

fn solve_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::lit(1e3 * T::EPS))
}

impl<'a, T: Real> Propagator<'a, T> {
    pub fn new(h: &'a HamiltonianMatrix<T>, decay: &DecaySpec<T>, kind: SolverKind) -> Result<Self> {
        decay.validate(h.dim())?;
        let big = h.dim() > DIRECT_SOLVE_LIMIT;
        let kind = match kind {
            SolverKind::Auto if big => SolverKind::Iterative,
            SolverKind::Auto if decay.uniform().is_some() => SolverKind::Spectral,
            SolverKind::Auto => SolverKind::Direct,
            k => k,
        };
        let backend = match kind {
            SolverKind::Spectral => {
                let gamma = decay.uniform().ok_or_else(|| {
                    Error::InvalidParameter("spectral solver requires uniform loss".into())
                })?;
                let (energies, vectors) = h.eigh()?;
                Backend::Spectral { energies, vectors, gamma }
            }
            SolverKind::Direct => Backend::Direct,
            _ => Backend::Iterative,
        };
        Ok(Self { h, decay: decay.clone(), backend })
    }

    pub fn hamiltonian(&self) -> &HamiltonianMatrix<T> {
        self.h
    }

    pub fn decay(&self) -> &DecaySpec<T> {
        &self.decay
    }

    /// Eigenpairs when the spectral backend is active.
    pub fn eigensystem(&self) -> Option<(&[T], &DenseMatrix<T>)> {
        match &self.backend {
            Backend::Spectral { energies, vectors, .. } => Some((energies, vectors)),
            _ => None,
        }
    }

    fn shifted_diag(&self, omega: T) -> Vec<Complex<T>> {
        let half = T::lit(0.5);
        self.h
            .diagonal()
            .iter()
            .enumerate()
            .map(|(i, d)| Complex::new(omega, self.decay.rate(i) * half) - *d)
            .collect()
    }

    fn apply_shifted(&self, omega: T, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let hx = self.h.matvec(x);
        let half = T::lit(0.5);
        x.iter()
            .zip(hx)
            .enumerate()
            .map(|(i, (xi, hxi))| *xi * Complex::new(omega, self.decay.rate(i) * half) - hxi)
            .collect()
    }

    /// Relative residual ‖(ω − H + iΓ/2)x − e_input‖ / ‖e_input‖.
    pub fn residual(&self, omega: T, input: usize, x: &[Complex<T>]) -> T {
        let mut r = self.apply_shifted(omega, x);
        r[input] -= Complex::one();
        norm2(&r)
    }

    /// Columns x_n = (ω − H + iΓ/2)⁻¹ e_n for every n in `inputs`.
    pub fn solve(&self, omega: T, inputs: &[usize]) -> Result<Vec<Vec<Complex<T>>>> {
        let n = self.h.dim();
        match &self.backend {
            Backend::Spectral { energies, vectors, gamma } => {
                let shift = Complex::new(T::zero(), *gamma * T::lit(0.5));
                let inv: Vec<Complex<T>> =
                    energies.iter().map(|e| Complex::<T>::one() / (Complex::from(omega - *e) + shift)).collect();
                Ok(inputs
                    .iter()
                    .map(|&a| {
                        let row_a = vectors.row(a);
                        let coef: Vec<Complex<T>> = row_a.iter().zip(&inv).map(|(v, g)| v.conj() * *g).collect();
                        (0..n)
                            .map(|i| vectors.row(i).iter().zip(&coef).fold(Complex::zero(), |s, (v, c)| s + *v * *c))
                            .collect()
                    })
                    .collect())
            }
            Backend::Direct => {
                let mut a = self.h.to_dense().scale(-Complex::<T>::one());
                let d = self.shifted_diag(omega);
                for (i, di) in d.into_iter().enumerate() {
                    a[(i, i)] = di;
                }
                let rhs: Vec<Vec<Complex<T>>> = inputs.iter().map(|&k| unit(n, k)).collect();
                T::lu_solve(&a, &rhs)
            }
            Backend::Iterative => {
                let diag = self.shifted_diag(omega);
                inputs
                    .iter()
                    .map(|&k| {
                        bicgstab(|x| self.apply_shifted(omega, x), &diag, &unit(n, k), solve_tol::<T>() * T::lit(0.1), 20 * n.max(100))
                    })
                    .collect()
            }
        }
    }

    /// Transmission amplitudes T_{input → n} = −i √γ_n x_n √γ_input.
    pub fn amplitudes(&self, omega: T, inputs: &[usize]) -> Result<Vec<Vec<Complex<T>>>> {
        let cols = self.solve(omega, inputs)?;
        let neg_i = Complex::new(T::zero(), -T::one());
        Ok(cols
            .into_iter()
            .zip(inputs)
            .map(|(x, &a)| {
                let ga = self.decay.rate(a).sqrt();
                x.into_iter()
                    .enumerate()
                    .map(|(i, v)| v * neg_i * (self.decay.rate(i).sqrt() * ga))
                    .collect()
            })
            .collect())
    }

    /// Σ_inputs Σ_outputs |T|² at one frequency.
    pub fn total_transmission(&self, omega: T, inputs: &[usize]) -> Result<T> {
        match &self.backend {
            Backend::Spectral { energies, vectors, gamma } => {
                let g2 = *gamma * *gamma;
                let quarter = g2 * T::lit(0.25);
                let mut total = T::zero();
                for &a in inputs {
                    for (k, e) in energies.iter().enumerate() {
                        let d = omega - *e;
                        total += g2 * vectors[(a, k)].norm_sqr() / (d * d + quarter);
                    }
                }
                Ok(total)
            }
            _ => Ok(self
                .amplitudes(omega, inputs)?
                .iter()
                .map(|col| col.iter().map(|v| v.norm_sqr()).sum::<T>())
                .sum()),
        }
    }
}

fn unit<T: Real>(n: usize, k: usize) -> Vec<Complex<T>> {
    let mut e = vec![Complex::zero(); n];
    e[k] = Complex::one();
    e
}

/// Amplitudes from one input mode at one probe frequency. The reflection
/// δ-term is kept out of `amplitudes`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringResult<T> {
    pub omega: T,
    pub input: SiteIndex,
    pub amplitudes: Vec<Complex<T>>,
    pub includes_reflection_delta: bool,
}

impl<T: Real> ScatteringResult<T> {
    /// Row of S = δ + T.
    pub fn s_row(&self, spec: &LatticeSpec) -> Vec<Complex<T>> {
        let mut row = self.amplitudes.clone();
        if !self.includes_reflection_delta {
            let k = spec.flat_index(&self.input).expect("input validated");
            row[k] += Complex::one();
        }
        row
    }

    pub fn intensities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// x solving (ω − H + iΓ/2) x = e_input, with a residual check.
pub fn greens_apply<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega: T,
    input: &SiteIndex,
) -> Result<Vec<Complex<T>>> {
    let k = h.spec().flat_index(input)?;
    let kind = if h.dim() > DIRECT_SOLVE_LIMIT { SolverKind::Iterative } else { SolverKind::Direct };
    let prop = Propagator::new(h, decay, kind)?;
    let x = prop.solve(omega, &[k])?.pop().unwrap();
    let res = prop.residual(omega, k, &x);
    if res > solve_tol::<T>() {
        return Err(Error::NoConvergence { iterations: 0, residual: res.f64() });
    }
    Ok(x)
}

pub fn transmission<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega: T,
    input: &SiteIndex,
) -> Result<ScatteringResult<T>> {
    let k = h.spec().flat_index(input)?;
    let x = greens_apply(h, decay, omega, input)?;
    let neg_i = Complex::new(T::zero(), -T::one());
    let gi = decay.rate(k).sqrt();
    let amplitudes = x.into_iter().enumerate().map(|(i, v)| v * neg_i * (decay.rate(i).sqrt() * gi)).collect();
    Ok(ScatteringResult { omega, input: *input, amplitudes, includes_reflection_delta: false })
}

/// Row of the S-matrix; unit norm for uniform loss and Hermitian H.
pub fn s_matrix_row<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega: T,
    input: &SiteIndex,
) -> Result<Vec<Complex<T>>> {
    Ok(transmission(h, decay, omega, input)?.s_row(h.spec()))
}

/// 𝒯(ω) = Σ_inputs Σ_outputs |T|², same-mode term included, δ excluded.
pub fn total_transmission_spectrum<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    inputs: &[SiteIndex],
    omega_grid: &[T],
) -> Result<Vec<(T, T)>> {
    if omega_grid.is_empty() {
        return Err(Error::InvalidParameter("empty frequency grid".into()));
    }
    let idx: Vec<usize> = inputs.iter().map(|s| h.spec().flat_index(s)).collect::<Result<_>>()?;
    let kind = if decay.uniform().is_some() && h.dim() <= DIRECT_SOLVE_LIMIT && omega_grid.len() > 4 {
        SolverKind::Spectral
    } else {
        SolverKind::Auto
    };
    let prop = Propagator::new(h, decay, kind)?;
    omega_grid
        .par_iter()
        .map(|&w| prop.total_transmission(w, &idx).map(|t| (w, t)))
        .collect()
}

/// Default probe grid: 400 points spanning [−4.5κ, 4.5κ].
pub fn default_omega_grid<T: Real>() -> Vec<T> {
    linspace(T::lit(-4.5), T::lit(4.5), 400)
}

pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / T::lit((n - 1) as f64);
    (0..n).map(|i| a + step * T::lit(i as f64)).collect()
}

/// Inputs at l = 0 in every cavity and polarization.
pub fn column_inputs(spec: &LatticeSpec, l: i64) -> Vec<SiteIndex> {
    (0..spec.n_x)
        .flat_map(|j| (0..spec.spin_dim).map(move |s| SiteIndex::new(j, l, s)))
        .collect()
}

/// Flux × frequency map of 𝒯 for the Landau-gauge Hofstadter model.
#[derive(Clone, Debug, PartialEq)]
pub struct Butterfly<T> {
    pub phi0: Vec<Flux>,
    pub omega: Vec<T>,
    /// `values[i][k]` is 𝒯 at `phi0[i]`, `omega[k]`.
    pub values: Vec<Vec<T>>,
}

/// Rows of 𝒯(ω) summed over inputs (j, 0) for j = 0..N−1.
pub fn butterfly_scan<T: Real>(
    spec: &LatticeSpec,
    phi0_list: &[Flux],
    omega_grid: &[T],
    decay: &DecaySpec<T>,
) -> Result<Butterfly<T>> {
    let inputs = column_inputs(spec, if spec.l_min <= 0 && spec.l_max >= 0 { 0 } else { spec.l_min });
    let values = phi0_list
        .iter()
        .map(|phi| {
            let h = build_landau_hofstadter::<T>(spec, *phi)?;
            Ok(total_transmission_spectrum(&h, decay, &inputs, omega_grid)?.into_iter().map(|(_, t)| t).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Butterfly { phi0: phi0_list.to_vec(), omega: omega_grid.to_vec(), values })
}
