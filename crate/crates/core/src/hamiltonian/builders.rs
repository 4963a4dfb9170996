use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::spin::{block_identity, block_scale, block_zero, jones_exp, pauli_x, pauli_y, Block, SpinAxis};
use super::{HamiltonianMatrix, Link, TightBinding};
use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::lattice::{Axis, LatticeSpec};
use crate::scalar::{cis, cis_cycles, Real};

/// A per-cavity parameter: either one value for every cavity or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerCavity<T> {
    Uniform(T),
    Values(Vec<T>),
}

impl<T: Real> PerCavity<T> {
    pub fn at(&self, j: usize) -> T {
        match self {
            PerCavity::Uniform(v) => *v,
            PerCavity::Values(v) => v.get(j).copied().unwrap_or_else(T::zero),
        }
    }
}

impl<T: Real> Default for PerCavity<T> {
    fn default() -> Self {
        PerCavity::Uniform(T::zero())
    }
}

/// Tunneling phases θx = 2π(φx + α σ·n₁), θy(j) = 2π(φ₀ j + φ_j + β_j σ·n₂)
/// and onsite energies λ_j. Phases in cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig<T> {
    pub phi_x: T,
    pub phi_y_per_cavity: PerCavity<T>,
    pub phi0: Flux,
    pub alpha: T,
    pub beta_per_cavity: PerCavity<T>,
    pub axis1: SpinAxis<T>,
    pub axis2: SpinAxis<T>,
    pub lambda_per_cavity: PerCavity<T>,
}

impl<T: Real> Default for GaugeConfig<T> {
    fn default() -> Self {
        Self {
            phi_x: T::zero(),
            phi_y_per_cavity: PerCavity::default(),
            phi0: Flux::zero(),
            alpha: T::zero(),
            beta_per_cavity: PerCavity::default(),
            axis1: SpinAxis::x(),
            axis2: SpinAxis::z(),
            lambda_per_cavity: PerCavity::default(),
        }
    }
}

/// Gauge configuration of the quantum spin Hall model: β_j = j/4 + β₀ about σz,
/// α = 1/4 about σx, λ_j = λ₀ (j mod 4 − 1.5).
pub fn qsh_gauge<T: Real>(n_x: usize, beta0: T, lambda0: T) -> GaugeConfig<T> {
    let quarter = T::lit(0.25);
    GaugeConfig {
        alpha: quarter,
        axis1: SpinAxis::x(),
        axis2: SpinAxis::z(),
        beta_per_cavity: PerCavity::Values((0..n_x).map(|j| T::lit(j as f64) * quarter + beta0).collect()),
        lambda_per_cavity: PerCavity::Values(
            (0..n_x).map(|j| lambda0 * (T::lit((j % 4) as f64) - T::lit(1.5))).collect(),
        ),
        ..GaugeConfig::default()
    }
}

/// The lattice models. `Decoupled` has no hops (κ → 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Model<T> {
    Landau { phi0: Flux },
    OamGauge { phi0: Flux },
    NonAbelian(GaugeConfig<T>),
    Dirac { phi0: Flux },
    Qsh { beta0: T, lambda0: T },
    Decoupled,
}

impl<T: Real> Model<T> {
    pub fn spin_dim(&self) -> Option<usize> {
        match self {
            Model::Landau { .. } | Model::OamGauge { .. } => Some(1),
            Model::NonAbelian(_) | Model::Dirac { .. } | Model::Qsh { .. } => Some(2),
            Model::Decoupled => None,
        }
    }

    pub fn build(&self, spec: &LatticeSpec) -> Result<HamiltonianMatrix<T>> {
        Ok(self.tight_binding(spec, [T::zero(), T::zero()])?.assemble())
    }

    /// Hop list with twisted boundaries: every bond wrapping a periodic edge
    /// along x (y) picks up e^{-iθx} (e^{-iθy}). With θ = k·period this is the
    /// Bloch Hamiltonian of the supercell at momentum k for ψ ∝ e^{ik·r}.
    pub fn tight_binding(&self, spec: &LatticeSpec, twist: [T; 2]) -> Result<TightBinding<T>> {
        spec.validate()?;
        if let Some(sd) = self.spin_dim() {
            if spec.spin_dim != sd {
                return Err(Error::InvalidParameter(format!(
                    "model requires spin_dim {sd}, lattice has {}",
                    spec.spin_dim
                )));
            }
        }
        let gauge = match self {
            Model::Qsh { beta0, lambda0 } => Some(qsh_gauge(spec.n_x, *beta0, *lambda0)),
            Model::NonAbelian(g) => Some(g.clone()),
            _ => None,
        };
        let minus_one = -Complex::<T>::from(T::one());
        let neg_i = Complex::new(T::zero(), -T::one());
        let scalar = |v: Complex<T>| -> Block<T> {
            let mut b = block_zero();
            b[0][0] = v;
            b
        };
        let ncell = spec.n_x * spec.n_l();
        let mut onsite = vec![block_zero::<T>(); ncell];
        if let Some(g) = &gauge {
            for j in 0..spec.n_x {
                let lam = g.lambda_per_cavity.at(j);
                for c in 0..spec.n_l() {
                    onsite[j * spec.n_l() + c] = block_scale(&block_identity(), Complex::from(lam));
                }
            }
        }
        let x_block_na = gauge.as_ref().map(|g| {
            block_scale(&jones_exp(g.alpha, &g.axis1), cis_cycles(g.phi_x) * minus_one)
        });
        let mut links = Vec::new();
        for bond in spec.bonds() {
            let block = match (self, bond.axis) {
                (Model::Decoupled, _) => continue,
                (Model::Landau { phi0 }, Axis::Y) => scalar(cis_cycles(phi0.frac_times::<T>(bond.j as i64)) * minus_one),
                (Model::Landau { .. }, Axis::X) => scalar(minus_one),
                (Model::OamGauge { .. }, Axis::Y) => scalar(minus_one),
                (Model::OamGauge { phi0 }, Axis::X) => scalar(cis_cycles(phi0.frac_times::<T>(-bond.l)) * minus_one),
                (Model::Dirac { phi0 }, Axis::Y) => {
                    block_scale(&pauli_x(), cis_cycles(phi0.frac_times::<T>(bond.j as i64)) * neg_i)
                }
                (Model::Dirac { .. }, Axis::X) => block_scale(&pauli_y(), neg_i),
                (Model::NonAbelian(_) | Model::Qsh { .. }, Axis::X) => x_block_na.unwrap(),
                (Model::NonAbelian(_) | Model::Qsh { .. }, Axis::Y) => {
                    let g = gauge.as_ref().unwrap();
                    let ph = g.phi0.frac_times::<T>(bond.j as i64) + g.phi_y_per_cavity.at(bond.j);
                    block_scale(&jones_exp(g.beta_per_cavity.at(bond.j), &g.axis2), cis_cycles(ph) * minus_one)
                }
            };
            let block = if bond.wraps {
                let th = match bond.axis {
                    Axis::X => twist[0],
                    Axis::Y => twist[1],
                };
                block_scale(&block, cis(-th))
            } else {
                block
            };
            links.push(Link { axis: bond.axis, from: (bond.j, bond.l), to: (bond.j_to, bond.l_to), block, wraps: bond.wraps });
        }
        Ok(TightBinding { spec: *spec, links, onsite })
    }
}

/// H₁ = −Σ (e^{i2πjφ₀} a†_{j,l+1} a_{j,l} + a†_{j+1,l} a_{j,l} + h.c.)
pub fn build_landau_hofstadter<T: Real>(spec: &LatticeSpec, phi0: Flux) -> Result<HamiltonianMatrix<T>> {
    Model::Landau { phi0 }.build(spec)
}

/// H₅ = −Σ (a†_{j,l+1} a_{j,l} + e^{−i2πlφ₀} a†_{j+1,l} a_{j,l} + h.c.)
pub fn build_oam_gauge_hofstadter<T: Real>(spec: &LatticeSpec, phi0: Flux) -> Result<HamiltonianMatrix<T>> {
    Model::OamGauge { phi0 }.build(spec)
}

pub fn build_non_abelian<T: Real>(spec: &LatticeSpec, cfg: &GaugeConfig<T>) -> Result<HamiltonianMatrix<T>> {
    Model::NonAbelian(cfg.clone()).build(spec)
}

/// H₃ = −iΣ (a†_{j,l+1} e^{i2πjφ₀} σx a_{j,l} + a†_{j+1,l} σy a_{j,l}) + h.c.
pub fn build_dirac<T: Real>(spec: &LatticeSpec, phi0: Flux) -> Result<HamiltonianMatrix<T>> {
    Model::Dirac { phi0 }.build(spec)
}

pub fn build_qsh<T: Real>(spec: &LatticeSpec, beta0: T, lambda0: T) -> Result<HamiltonianMatrix<T>> {
    Model::Qsh { beta0, lambda0 }.build(spec)
}

/// Adds δλ_j to every diagonal entry belonging to cavity j.
pub fn apply_onsite_disorder<T: Real>(h: &HamiltonianMatrix<T>, deltas: &[T]) -> Result<HamiltonianMatrix<T>> {
    let spec = h.spec();
    if deltas.len() != spec.n_x {
        return Err(Error::DimensionMismatch { expected: spec.n_x, got: deltas.len() });
    }
    let d: Vec<T> = spec.j_values().into_iter().map(|j| deltas[j]).collect();
    h.add_diagonal(&d)
}
