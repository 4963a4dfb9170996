//! Monte Carlo robustness of l̄_e under Gaussian component errors.
//!
//! Each trial draws from `ChaCha20Rng::seed_from_u64(seed)` on stream `trial`,
//! so results depend only on (model, seed, trials) and never on scheduling.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edge::{displacement_with, region_inputs, DisplacementOptions, EdgeRegion};
use crate::error::{Error, Result};
use crate::hamiltonian::{block_scale, HamiltonianMatrix, Model};
use crate::lattice::{Axis, LatticeSpec};
use crate::scalar::{cis, Real};
use crate::scattering::{DecaySpec, Propagator, SolverKind};

/// Resamples allowed per mode before a non-positive loss rate is an error.
pub const LOSS_RESAMPLES: usize = 100;

/// How errors are shared between modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisorderScope {
    /// One error per physical component: per cavity for detuning and loss,
    /// per beam-splitter pair for couplings (shared by every OAM mode).
    #[default]
    PerCavityLink,
    /// Independent errors for each OAM mode and each OAM link.
    PerOAMLink,
    /// Independent errors for every site and bond, as in a 2d cavity array.
    PerSite,
}

/// F(x) = 1 − e^{−(x/w)²}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub width: T,
}

impl<T: Real> Envelope<T> {
    pub fn eval(&self, x: T) -> T {
        let r = x / self.width;
        T::one() - (-r * r).exp()
    }
}

impl<T: Real> Default for Envelope<T> {
    fn default() -> Self {
        Self { width: T::lit(30.0) }
    }
}

/// Standard deviations of the Gaussian errors. Detuning is in κ, the coupling
/// magnitude and loss are relative, the coupling phase is in radians.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderModel<T> {
    #[serde(default)]
    pub sigma_detuning: T,
    #[serde(default)]
    pub sigma_coupling_mag: T,
    #[serde(default)]
    pub sigma_coupling_phase: T,
    #[serde(default)]
    pub sigma_loss: T,
    #[serde(default)]
    pub oam_envelope: Option<Envelope<T>>,
    #[serde(default)]
    pub scope: DisorderScope,
}

impl<T: Real> DisorderModel<T> {
    pub fn detuning(sigma: T) -> Self {
        Self { sigma_detuning: sigma, ..Self::zero() }
    }

    pub fn zero() -> Self {
        Self {
            sigma_detuning: T::zero(),
            sigma_coupling_mag: T::zero(),
            sigma_coupling_phase: T::zero(),
            sigma_loss: T::zero(),
            oam_envelope: None,
            scope: DisorderScope::PerCavityLink,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sigmas = [
            ("sigma_detuning", self.sigma_detuning),
            ("sigma_coupling_mag", self.sigma_coupling_mag),
            ("sigma_coupling_phase", self.sigma_coupling_phase),
            ("sigma_loss", self.sigma_loss),
        ];
        for (name, s) in sigmas {
            if !(s >= T::zero()) || !s.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite and non-negative, got {s}")));
            }
        }
        if let Some(env) = &self.oam_envelope {
            if !(env.width > T::zero()) {
                return Err(Error::InvalidParameter(format!("envelope width must be positive, got {}", env.width)));
            }
        }
        Ok(())
    }

    /// Envelope weight at OAM coordinate `x` (1 without an envelope).
    pub fn weight(&self, x: T) -> T {
        self.oam_envelope.as_ref().map_or(T::one(), |e| e.eval(x))
    }
}

fn normal<T: Real>(rng: &mut ChaCha20Rng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Draws one Gaussian per key, reusing it for repeated keys.
struct KeyedDraws<T> {
    keys: Vec<(usize, i64)>,
    values: Vec<T>,
}

impl<T: Real> KeyedDraws<T> {
    fn new() -> Self {
        Self { keys: Vec::new(), values: Vec::new() }
    }

    fn get(&mut self, key: (usize, i64), rng: &mut ChaCha20Rng) -> T {
        match self.keys.iter().position(|k| *k == key) {
            Some(i) => self.values[i],
            None => {
                let v = normal(rng);
                self.keys.push(key);
                self.values.push(v);
                v
            }
        }
    }
}

/// The model Hamiltonian with one draw of detuning and coupling errors.
///
/// Every hop is perturbed once as κ → κ(1 + ε_m F)e^{iε_φ F} and its partner
/// is the conjugate, so the result stays Hermitian. F is evaluated at the
/// link midpoint in l (l + 1/2 for OAM links) and at l for detunings.
pub fn sample_disordered_hamiltonian<T: Real>(
    model: &Model<T>,
    spec: &LatticeSpec,
    disorder: &DisorderModel<T>,
    rng: &mut ChaCha20Rng,
) -> Result<HamiltonianMatrix<T>> {
    disorder.validate()?;
    let mut tb = model.tight_binding(spec, [T::zero(), T::zero()])?;
    let half = T::lit(0.5);

    let mut cavity = KeyedDraws::new();
    for j in 0..spec.n_x {
        for l in spec.l_min..=spec.l_max {
            let eps: T = match disorder.scope {
                DisorderScope::PerCavityLink => cavity.get((j, 0), rng),
                DisorderScope::PerOAMLink | DisorderScope::PerSite => normal(rng),
            };
            let shift = disorder.sigma_detuning * eps * disorder.weight(T::lit(l as f64));
            let c = tb.cell(j, l);
            for s in 0..spec.spin_dim {
                tb.onsite[c][s][s] += Complex::from(shift);
            }
        }
    }

    // Keys for shared coupling errors: x links by (j, 0), OAM links by (j, 1).
    let mut shared = KeyedDraws::new();
    let mut shared_phase = KeyedDraws::new();
    for link in tb.links.iter_mut() {
        let (em, ep): (T, T) = match disorder.scope {
            DisorderScope::PerCavityLink => {
                let key = (link.from.0, matches!(link.axis, Axis::Y) as i64);
                (shared.get(key, rng), shared_phase.get(key, rng))
            }
            DisorderScope::PerOAMLink | DisorderScope::PerSite => (normal(rng), normal(rng)),
        };
        let mid = match link.axis {
            Axis::X => T::lit(link.from.1 as f64),
            Axis::Y => T::lit(link.from.1 as f64) + half,
        };
        let f = disorder.weight(mid);
        let mag = T::one() + disorder.sigma_coupling_mag * em * f;
        let phase = disorder.sigma_coupling_phase * ep * f;
        link.block = block_scale(&link.block, cis(phase) * mag);
    }
    Ok(tb.assemble())
}

/// Per-mode loss γ(1 + ε F(l)), resampling each ε until the rate is positive.
pub fn loss_perturbed_decay<T: Real>(
    gamma: T,
    spec: &LatticeSpec,
    disorder: &DisorderModel<T>,
    rng: &mut ChaCha20Rng,
) -> Result<DecaySpec<T>> {
    disorder.validate()?;
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter(format!("loss must be positive, got {gamma}")));
    }
    let sigma = disorder.sigma_loss;
    let weights: Vec<T> = (spec.l_min..=spec.l_max).map(|l| disorder.weight(T::lit(l as f64))).collect();
    // 1 + σεF is linear in F with value 1 at F = 0, so checking the largest F suffices.
    let draw = |rng: &mut ChaCha20Rng, f: T| -> Result<T> {
        for _ in 0..LOSS_RESAMPLES {
            let eps: T = normal(rng);
            if T::one() + sigma * eps * f > T::zero() {
                return Ok(eps);
            }
        }
        Err(Error::NonPositiveLoss(LOSS_RESAMPLES))
    };
    let f_max = weights.iter().copied().fold(T::zero(), T::max);
    let mut rates = Vec::with_capacity(spec.dim());
    for _ in 0..spec.n_x {
        let shared = match disorder.scope {
            DisorderScope::PerCavityLink => Some(draw(rng, f_max)?),
            DisorderScope::PerOAMLink | DisorderScope::PerSite => None,
        };
        for &f in &weights {
            let eps = match shared {
                Some(e) => e,
                None => draw(rng, f)?,
            };
            rates.extend(std::iter::repeat_n(gamma * (T::one() + sigma * eps * f), spec.spin_dim));
        }
    }
    Ok(DecaySpec::PerMode(rates))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    pub trials: usize,
    pub seed: u64,
    /// l̄_e is averaged over these input OAM numbers.
    pub input_ls: Vec<i64>,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self { trials: 100, seed: 0, input_ls: vec![0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary<T> {
    pub omega_grid: Vec<T>,
    pub mean: Vec<T>,
    /// Sample standard deviation (n − 1).
    pub std: Vec<T>,
    pub trials: usize,
    pub seed: u64,
}

/// Generator for one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn trial_displacements<T: Real>(
    h: &HamiltonianMatrix<T>,
    decay: &DecaySpec<T>,
    omega_grid: &[T],
    region: &EdgeRegion,
    opts: &MonteCarloOptions,
) -> Result<Vec<T>> {
    let kind = if omega_grid.len() > 4 { SolverKind::Auto } else { SolverKind::Direct };
    let prop = Propagator::new(h, decay, kind)?;
    let n_in = T::lit(opts.input_ls.len() as f64);
    let inputs: Vec<Vec<usize>> = opts
        .input_ls
        .iter()
        .map(|&l| region_inputs(h.spec(), region, &DisplacementOptions { input_l: l, ..Default::default() }))
        .collect::<Result<_>>()?;
    omega_grid
        .iter()
        .map(|&w| {
            let mut acc = T::zero();
            for (idx, &l) in inputs.iter().zip(&opts.input_ls) {
                acc += displacement_with(&prop, w, idx, l)?;
            }
            Ok(acc / n_in)
        })
        .collect()
}

/// Mean and spread of l̄_e(ω) over disorder realizations.
pub fn displacement_robustness<T: Real>(
    model: &Model<T>,
    spec: &LatticeSpec,
    disorder: &DisorderModel<T>,
    gamma: T,
    omega_grid: &[T],
    region: &EdgeRegion,
    opts: &MonteCarloOptions,
) -> Result<MonteCarloSummary<T>> {
    disorder.validate()?;
    if opts.trials < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 trials, got {}", opts.trials)));
    }
    if opts.input_ls.is_empty() {
        return Err(Error::InvalidParameter("no input OAM numbers".into()));
    }
    let runs: Vec<Vec<T>> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(opts.seed, trial);
            let h = sample_disordered_hamiltonian(model, spec, disorder, &mut rng)?;
            let decay = if disorder.sigma_loss > T::zero() {
                loss_perturbed_decay(gamma, spec, disorder, &mut rng)?
            } else {
                DecaySpec::Uniform(gamma)
            };
            trial_displacements(&h, &decay, omega_grid, region, opts)
        })
        .collect::<Result<_>>()?;

    // Welford accumulation in trial order: identical runs give exactly zero spread.
    let mut mean = vec![T::zero(); omega_grid.len()];
    let mut m2 = vec![T::zero(); omega_grid.len()];
    for (k, run) in runs.iter().enumerate() {
        let n = T::lit((k + 1) as f64);
        for ((m, s), v) in mean.iter_mut().zip(m2.iter_mut()).zip(run) {
            let d = *v - *m;
            *m += d / n;
            *s += d * (*v - *m);
        }
    }
    let denom = T::lit((opts.trials - 1) as f64);
    let std = m2.into_iter().map(|s| (s / denom).max(T::zero()).sqrt()).collect();
    Ok(MonteCarloSummary { omega_grid: omega_grid.to_vec(), mean, std, trials: opts.trials, seed: opts.seed })
}
