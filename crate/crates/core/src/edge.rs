//! Edge-state transport: transmission maps, the average OAM displacement l̄_e,
//! and the cylinder (Harper) edge-mode prediction.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::hamiltonian::HamiltonianMatrix;
use crate::lattice::{Boundary, LatticeSpec, SiteIndex};
use crate::linalg::DenseMatrix;
use crate::scalar::{cis, Real};
use crate::scattering::{DecaySpec, Propagator, SolverKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeSide {
    Left,
    Right,
}

/// Cavity columns treated as "the edge" when pumping and summing l̄_e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRegion {
    pub side: EdgeSide,
    pub depth: usize,
}

impl Default for EdgeRegion {
    /// Right edge, three columns. With this choice l̄_e equals +Σ C of the
    /// bands below the probed gap.
    fn default() -> Self {
        Self { side: EdgeSide::Right, depth: 3 }
    }
}

impl EdgeRegion {
    pub fn new(side: EdgeSide, depth: usize) -> Self {
        Self { side, depth }
    }

    pub fn columns(&self, n_x: usize) -> Result<Vec<usize>> {
        if self.depth == 0 || 2 * self.depth > n_x {
            return Err(Error::InvalidParameter(format!(
                "edge depth {} outside [1, n_x/2] for n_x = {n_x}",
                self.depth
            )));
        }
        Ok(match self.side {
            EdgeSide::Left => (0..self.depth).collect(),
            EdgeSide::Right => (n_x - self.depth..n_x).collect(),
        })
    }
}

/// Which input polarizations are pumped for spinful lattices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinInput {
    #[default]
    Both,
    Only(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementOptions {
    /// Input OAM l_i; displacements are measured as l_o − l_i.
    pub input_l: i64,
    pub spin: SpinInput,
}

impl Default for DisplacementOptions {
    fn default() -> Self {
        Self { input_l: 0, spin: SpinInput::Both }
    }
}

/// |T|² from one input to every mode.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionMap<T> {
    pub spec: LatticeSpec,
    pub input: SiteIndex,
    pub omega: T,
    /// Indexed by flat index.
    pub weights: Vec<T>,
}

impl<T: Real> TransmissionMap<T> {
    pub fn weight(&self, site: &SiteIndex) -> Result<T> {
        Ok(self.weights[self.spec.flat_index(site)?])
    }

    pub fn total(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Weight summed over polarizations, as rows j and columns l.
    pub fn jl_grid(&self) -> Vec<Vec<T>> {
        let sd = self.spec.spin_dim;
        (0..self.spec.n_x)
            .map(|j| {
                (self.spec.l_min..=self.spec.l_max)
                    .map(|l| (0..sd).map(|s| self.weights[self.spec.index_unchecked(j, l, s)]).sum())
                    .collect()
            })
            .collect()
    }

    /// Distance of a site to the nearest open boundary (∞ if none).
    fn boundary_distance(&self, j: usize, l: i64) -> usize {
        let mut d = usize::MAX;
        if self.spec.bc_x == Boundary::Open {
            d = d.min(j).min(self.spec.n_x - 1 - j);
        }
        if self.spec.bc_y == Boundary::Open {
            d = d.min((l - self.spec.l_min) as usize).min((self.spec.l_max - l) as usize);
        }
        d
    }

    /// Total weight on sites within `depth` columns/rows of an open boundary
    /// (distance < depth).
    pub fn edge_weight(&self, depth: usize) -> T {
        self.select(|d| d < depth)
    }

    /// Total weight on sites farther than `distance` from every open boundary.
    pub fn interior_weight(&self, distance: usize) -> T {
        self.select(|d| d > distance)
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> T {
        let mut acc = T::zero();
        for (idx, w) in self.weights.iter().enumerate() {
            let s = self.spec.site_of(idx).expect("in range");
            if keep(self.boundary_distance(s.j, s.l)) {
                acc += *w;
            }
        }
        acc
    }
}

/// |T_{input}^{j,l,s}|² over the whole lattice.
pub fn transmission_map<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega: T,
    input: &SiteIndex,
) -> Result<TransmissionMap<T>> {
    let k = h.spec().flat_index(input)?;
    let prop = Propagator::new(h, decay, single_shot_kind(h))?;
    let amp = prop.amplitudes(omega, &[k])?.pop().unwrap();
    Ok(TransmissionMap { spec: *h.spec(), input: *input, omega, weights: amp.iter().map(|a| a.norm_sqr()).collect() })
}

fn single_shot_kind<T: Real>(h: &HamiltonianMatrix<T>) -> SolverKind {
    if h.dim() > crate::scattering::DIRECT_SOLVE_LIMIT {
        SolverKind::Iterative
    } else {
        SolverKind::Direct
    }
}

/// Flat indices pumped for l̄_e: l = l_i in every region column and selected polarization.
pub fn region_inputs(spec: &LatticeSpec, region: &EdgeRegion, opts: &DisplacementOptions) -> Result<Vec<usize>> {
    let cols = region.columns(spec.n_x)?;
    let spins: Vec<usize> = match opts.spin {
        SpinInput::Both => (0..spec.spin_dim).collect(),
        SpinInput::Only(s) => vec![s],
    };
    let mut out = Vec::new();
    for j in cols {
        for &s in &spins {
            out.push(spec.flat_index(&SiteIndex::new(j, opts.input_l, s))?);
        }
    }
    Ok(out)
}

/// l̄_e from a prepared propagator: Σ_inputs Σ_outputs |T|² (l_o − l_i).
pub fn displacement_with<T: Real>(prop: &Propagator<'_, T>, omega: T, inputs: &[usize], input_l: i64) -> Result<T> {
    let spec = prop.hamiltonian().spec();
    let lv = spec.l_values();
    let amps = prop.amplitudes(omega, inputs)?;
    Ok(amps
        .iter()
        .map(|col| {
            col.iter()
                .zip(&lv)
                .map(|(a, l)| a.norm_sqr() * T::lit((*l - input_l) as f64))
                .sum::<T>()
        })
        .sum())
}

pub fn oam_displacement<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega: T,
    region: &EdgeRegion,
    opts: &DisplacementOptions,
) -> Result<T> {
    let inputs = region_inputs(h.spec(), region, opts)?;
    let prop = Propagator::new(h, decay, single_shot_kind(h))?;
    displacement_with(&prop, omega, &inputs, opts.input_l)
}

/// l̄_e over a frequency grid, evaluated in parallel and returned in grid order.
pub fn displacement_spectrum<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega_grid: &[T],
    region: &EdgeRegion,
    opts: &DisplacementOptions,
) -> Result<Vec<(T, T)>> {
    let inputs = region_inputs(h.spec(), region, opts)?;
    let kind = if omega_grid.len() > 4 { SolverKind::Auto } else { single_shot_kind(h) };
    let prop = Propagator::new(h, decay, kind)?;
    omega_grid
        .par_iter()
        .map(|&w| displacement_with(&prop, w, &inputs, opts.input_l).map(|d| (w, d)))
        .collect()
}

/// Harper matrix of the Landau-gauge model on a cylinder at OAM momentum k_y:
/// −(ψ_{j+1} + ψ_{j−1}) − 2cos(k_y − 2πjφ₀) ψ_j.
pub fn harper_matrix<T: Real>(phi0: Flux, n_x: usize, ky: T) -> DenseMatrix<T> {
    let mut m = DenseMatrix::zeros(n_x, n_x);
    for j in 0..n_x {
        let arg = ky - phi0.frac_times::<T>(j as i64) * T::two_pi();
        m[(j, j)] = Complex::from(-T::lit(2.0) * arg.cos());
        if j + 1 < n_x {
            m[(j, j + 1)] = Complex::from(-T::one());
            m[(j + 1, j)] = Complex::from(-T::one());
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMode<T> {
    /// Resonant momentum 𝕜_y where the branch crosses ω.
    pub ky: T,
    pub band: usize,
    /// dE/dk_y in κ per radian.
    pub velocity: T,
    pub side: EdgeSide,
    /// Weight on the outer 20% of columns of `side`.
    pub side_weight: T,
    /// Normalized amplitude per cavity.
    pub psi: Vec<Complex<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeModeSet<T> {
    pub omega: T,
    pub gamma: T,
    pub n_x: usize,
    pub modes: Vec<EdgeMode<T>>,
}

impl<T: Real> EdgeModeSet<T> {
    pub fn on_side(&self, side: EdgeSide) -> impl Iterator<Item = &EdgeMode<T>> {
        self.modes.iter().filter(move |m| m.side == side)
    }

    /// Σ sgn(v_m) over modes on `side`: the number of up- minus down-moving edge states.
    pub fn predicted_displacement(&self, side: EdgeSide) -> i64 {
        self.on_side(side).map(|m| if m.velocity > T::zero() { 1 } else { -1 }).sum()
    }
}

fn harper_band<T: Real>(phi0: Flux, n_x: usize, ky: T, band: usize) -> Result<T> {
    Ok(T::eigvalsh(&harper_matrix(phi0, n_x, ky))?[band])
}

/// Edge branches of the Harper spectrum crossing ω. Crossings are bracketed on
/// `ky_grid` (taken as periodic with period 2π), refined by bisection, and
/// classified by their weight on the outer 20% of columns.
pub fn harper_edge_modes<T: Real>(phi0: Flux, n_x: usize, ky_grid: &[T], omega: T, gamma: T) -> Result<EdgeModeSet<T>> {
    if ky_grid.len() < 2 {
        return Err(Error::InvalidParameter("ky grid needs at least two points".into()));
    }
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter("loss must be positive".into()));
    }
    let spectra: Vec<Vec<T>> = ky_grid
        .par_iter()
        .map(|&ky| T::eigvalsh(&harper_matrix(phi0, n_x, ky)))
        .collect::<Result<_>>()?;
    let outer = ((n_x as f64) * 0.2).ceil().max(1.0) as usize;
    let h = T::two_pi() / T::lit(512.0);
    let mut modes = Vec::new();
    let npts = ky_grid.len();
    for a in 0..npts {
        let b = (a + 1) % npts;
        let ka = ky_grid[a];
        let kb = if b == 0 { ky_grid[0] + T::two_pi() } else { ky_grid[b] };
        for band in 0..n_x {
            let fa = spectra[a][band] - omega;
            let fb = spectra[b][band] - omega;
            if !(fa == T::zero() || fa * fb < T::zero()) {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (ka, kb, fa);
            for _ in 0..60 {
                let mid = (lo + hi) * T::lit(0.5);
                let fm = harper_band(phi0, n_x, mid, band)? - omega;
                if (fm < T::zero()) == (flo < T::zero()) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let ky = (lo + hi) * T::lit(0.5);
            let (vals, vecs) = T::eigh(&harper_matrix(phi0, n_x, ky))?;
            if (vals[band] - omega).abs() >= gamma {
                continue;
            }
            let psi = vecs.column(band);
            let left: T = psi[..outer].iter().map(|c| c.norm_sqr()).sum();
            let right: T = psi[n_x - outer..].iter().map(|c| c.norm_sqr()).sum();
            let half = T::lit(0.5);
            let (side, side_weight) = if left > half {
                (EdgeSide::Left, left)
            } else if right > half {
                (EdgeSide::Right, right)
            } else {
                continue;
            };
            let velocity =
                (harper_band(phi0, n_x, ky + h, band)? - harper_band(phi0, n_x, ky - h, band)?) / (h + h);
            let ky = if ky >= T::two_pi() { ky - T::two_pi() } else { ky };
            modes.push(EdgeMode { ky, band, velocity, side, side_weight, psi });
        }
    }
    modes.sort_by(|x, y| x.ky.partial_cmp(&y.ky).unwrap());
    Ok(EdgeModeSet { omega, gamma, n_x, modes })
}

/// Closed-form in-gap transmission from column `j_in` (at l = 0) to column
/// `j_out` versus l_o, from linearized edge branches:
/// T = −Σ_m ψ_{j_out} ψ*_{j_in} (γ/|v|) Θ(l_o/v) e^{−γ l_o/(2v)} e^{i𝕜 l_o}.
pub fn analytic_gap_transmission<T: Real>(
    modes: &EdgeModeSet<T>,
    gamma: T,
    l_range: std::ops::RangeInclusive<i64>,
    j_in: usize,
    j_out: usize,
) -> Result<Vec<(i64, Complex<T>)>> {
    for m in &modes.modes {
        if m.velocity == T::zero() {
            return Err(Error::ZeroVelocity { ky: m.ky.f64() });
        }
    }
    Ok(l_range
        .map(|l| {
            let lf = T::lit(l as f64);
            let mut t = Complex::new(T::zero(), T::zero());
            for m in &modes.modes {
                let x = lf / m.velocity;
                let step = if l == 0 {
                    T::lit(0.5)
                } else if x > T::zero() {
                    T::one()
                } else {
                    continue;
                };
                let amp = gamma / m.velocity.abs() * step * (-(gamma * T::lit(0.5)) * x).exp();
                t -= m.psi[j_out] * m.psi[j_in].conj() * cis(m.ky * lf) * amp;
            }
            (l, t)
        })
        .collect())
}
