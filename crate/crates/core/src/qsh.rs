//! Gap closing and polarized edge transport of the quantum spin Hall model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edge::TransmissionMap;
use crate::error::{Error, Result};
use crate::hamiltonian::Model;
use crate::lattice::{Boundary, LatticeSpec, SiteIndex};
use crate::scalar::Real;
use crate::scattering::DecaySpec;

/// Cavities per unit cell of the modulated lattice.
pub const QSH_PERIOD: usize = 4;

/// Band gap around a target energy for one β₀.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport<T> {
    pub beta0: T,
    /// Number of bands below the gap.
    pub bands_below: usize,
    pub e_low: T,
    pub e_high: T,
    /// max(0, e_high − e_low).
    pub width: T,
}

/// Band edges (min, max) of the 4 × 1 cell over an nk × nk momentum grid.
pub fn qsh_band_edges<T: Real>(beta0: T, lambda0: T, nk: usize) -> Result<Vec<(T, T)>> {
    if nk == 0 {
        return Err(Error::InvalidParameter("momentum grid must be non-empty".into()));
    }
    let cell = LatticeSpec::new(QSH_PERIOD, 0, 0, 2, Boundary::Periodic, Boundary::Periodic)?;
    let model = Model::Qsh { beta0, lambda0 };
    let step = T::two_pi() / T::lit(nk as f64);
    let spectra: Vec<Vec<T>> = (0..nk * nk)
        .into_par_iter()
        .map(|i| {
            let twist = [step * T::lit((i / nk) as f64), step * T::lit((i % nk) as f64)];
            let h = model.tight_binding(&cell, twist)?.assemble();
            T::eigvalsh(&h.to_dense())
        })
        .collect::<Result<_>>()?;
    let n = cell.dim();
    Ok((0..n)
        .map(|m| {
            spectra.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), e| (lo.min(e[m]), hi.max(e[m])))
        })
        .collect())
}

/// The gap between consecutive bands whose window lies nearest the target.
pub fn gap_near<T: Real>(edges: &[(T, T)], target: T) -> Result<(usize, T, T)> {
    if edges.len() < 2 {
        return Err(Error::InvalidParameter("need at least two bands".into()));
    }
    let mut best: Option<(T, usize)> = None;
    for m in 0..edges.len() - 1 {
        let (a, b) = (edges[m].1, edges[m + 1].0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let dist = if target < lo {
            lo - target
        } else if target > hi {
            target - hi
        } else {
            T::zero()
        };
        if best.is_none_or(|(d, _)| dist < d) {
            best = Some((dist, m));
        }
    }
    let m = best.unwrap().1;
    Ok((m + 1, edges[m].1, edges[m + 1].0))
}

/// Gap width around `target` for each β₀ (β₀ in cycles, so the OAM-hop
/// rotation is e^{i2π(j/4 + β₀)σz}).
pub fn qsh_gap_scan<T: Real>(lambda0: T, beta0_list: &[T], target: T, nk: usize) -> Result<Vec<GapReport<T>>> {
    beta0_list
        .par_iter()
        .map(|&beta0| {
            let edges = qsh_band_edges(beta0, lambda0, nk)?;
            let (bands_below, e_low, e_high) = gap_near(&edges, target)?;
            Ok(GapReport { beta0, bands_below, e_low, e_high, width: (e_high - e_low).max(T::zero()) })
        })
        .collect()
}

/// Transmission maps for the two input polarizations at (0, 0, s).
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizedEdgeMaps<T> {
    pub maps: [TransmissionMap<T>; 2],
    /// Σ |T|² (l_o − l_i) for each input polarization.
    pub displacement: [T; 2],
    /// Weight within `EDGE_DEPTH` columns of an open boundary.
    pub edge_weight: [T; 2],
}

/// Sites closer than this to an open boundary count as edge-confined.
pub const EDGE_DEPTH: usize = 2;

pub fn polarized_edge_maps<T: Real>(
    spec: &LatticeSpec,
    model: &Model<T>,
    decay: &DecaySpec<T>,
    omega: T,
) -> Result<PolarizedEdgeMaps<T>> {
    if spec.spin_dim != 2 {
        return Err(Error::InvalidParameter("polarized maps need spin_dim 2".into()));
    }
    let h = model.build(spec)?;
    let lv = spec.l_values();
    let input_l = 0;
    let maps: Vec<TransmissionMap<T>> = (0..2)
        .into_par_iter()
        .map(|s| crate::edge::transmission_map(&h, decay, omega, &SiteIndex::new(0, input_l, s)))
        .collect::<Result<_>>()?;
    let disp = |m: &TransmissionMap<T>| m.weights.iter().zip(&lv).map(|(w, l)| *w * T::lit((*l - input_l) as f64)).sum();
    let displacement = [disp(&maps[0]), disp(&maps[1])];
    let edge_weight = [maps[0].edge_weight(EDGE_DEPTH), maps[1].edge_weight(EDGE_DEPTH)];
    let [a, b]: [TransmissionMap<T>; 2] = maps.try_into().expect("two maps");
    Ok(PolarizedEdgeMaps { maps: [a, b], displacement, edge_weight })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate<T> {
    pub beta_c: T,
    /// Largest grid spacing adjacent to the minimizer.
    pub uncertainty: T,
    pub reports: Vec<GapReport<T>>,
}

/// β₀ of the smallest gap on the grid. The minimum must be interior.
pub fn transition_detector<T: Real>(lambda0: T, beta0_grid: &[T], target: T, nk: usize) -> Result<TransitionEstimate<T>> {
    if beta0_grid.len() < 3 {
        return Err(Error::NoTransition);
    }
    let reports = qsh_gap_scan(lambda0, beta0_grid, target, nk)?;
    let (i, _) = reports
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |(bi, bw), (i, r)| if r.width < bw { (i, r.width) } else { (bi, bw) });
    if i == 0 || i == reports.len() - 1 {
        return Err(Error::NoTransition);
    }
    let uncertainty = (beta0_grid[i] - beta0_grid[i - 1]).abs().max((beta0_grid[i + 1] - beta0_grid[i]).abs());
    Ok(TransitionEstimate { beta_c: beta0_grid[i], uncertainty, reports })
}
