//! Magnetic Bloch bands of the OAM-gauge Hofstadter model and Chern numbers.
//!
//! Two independent routes: the plaquette (Fukui–Hatsugai–Suzuki) lattice
//! field strength, and the winding of the phase mismatch χ = arg(u_{l*} ū_0)
//! along the boundary of a region B1 on which u_0 never vanishes.

use std::ops::Range;

use num_complex::Complex;
use num_integer::gcd;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec};
use crate::linalg::{determinant, DenseMatrix};
use crate::scalar::{cis, Real};

fn check_reduced(p: i64, q: i64) -> Result<()> {
    if q <= 0 || gcd(p, q) != 1 {
        return Err(Error::InvalidParameter(format!("flux {p}/{q} is not a reduced fraction with q > 0")));
    }
    Ok(())
}

/// q×q Bloch Hamiltonian of the OAM-gauge model on the 1×q magnetic cell for
/// ψ_{j,l} = e^{i(kx j + ky l)} u_{l mod q}:
/// diagonal −2cos(kx + 2π l_q p/q), hops −e^{±iky} between l_q and l_q ± 1 (cyclic).
pub fn magnetic_bloch_hamiltonian<T: Real>(p: i64, q: i64, kx: T, ky: T) -> Result<DenseMatrix<T>> {
    check_reduced(p, q)?;
    let n = q as usize;
    let two = T::lit(2.0);
    let mut h = DenseMatrix::zeros(n, n);
    let hop = -cis(ky);
    for a in 0..n {
        let frac = T::lit(((a as i64 * p).rem_euclid(q)) as f64) / T::lit(q as f64);
        h[(a, a)] += Complex::from(-two * (kx + T::two_pi() * frac).cos());
        let b = (a + 1) % n;
        h[(a, b)] += hop;
        h[(b, a)] += hop.conj();
    }
    Ok(h)
}

/// Uniform grid over the magnetic zone kx ∈ [−π, π), ky ∈ [0, 2π/q).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MagneticBZGrid {
    pub p: i64,
    pub q: i64,
    pub nkx: usize,
    pub nky: usize,
}

impl MagneticBZGrid {
    pub fn new(p: i64, q: i64, nkx: usize, nky: usize) -> Result<Self> {
        check_reduced(p, q)?;
        if nkx < 2 || nky < 2 {
            return Err(Error::InvalidParameter("magnetic zone grid needs at least 2×2 points".into()));
        }
        Ok(Self { p, q, nkx, nky })
    }

    pub fn kx<T: Real>(&self, i: usize) -> T {
        -T::PI() + T::two_pi() * T::lit(i as f64) / T::lit(self.nkx as f64)
    }

    pub fn ky<T: Real>(&self, i: usize) -> T {
        T::two_pi() / T::lit(self.q as f64) * T::lit(i as f64) / T::lit(self.nky as f64)
    }
}

/// Band energies and eigenvectors on a magnetic zone grid.
#[derive(Clone, Debug)]
pub struct BlochBandData<T> {
    pub grid: MagneticBZGrid,
    pub n_bands: usize,
    /// `energies[(ix * nky + iy) * n_bands + m]`
    energies: Vec<T>,
    /// Column m of `vectors[ix * nky + iy]` is u^m (length q).
    vectors: Vec<DenseMatrix<T>>,
}

impl<T: Real> BlochBandData<T> {
    pub fn from_parts(grid: MagneticBZGrid, n_bands: usize, energies: Vec<T>, vectors: Vec<DenseMatrix<T>>) -> Result<Self> {
        let npts = grid.nkx * grid.nky;
        if energies.len() != npts * n_bands || vectors.len() != npts {
            return Err(Error::DimensionMismatch { expected: npts * n_bands, got: energies.len() });
        }
        Ok(Self { grid, n_bands, energies, vectors })
    }

    pub fn energy(&self, m: usize, ix: usize, iy: usize) -> T {
        self.energies[(ix * self.grid.nky + iy) * self.n_bands + m]
    }

    pub fn band_range(&self, m: usize) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for ix in 0..self.grid.nkx {
            for iy in 0..self.grid.nky {
                let e = self.energy(m, ix, iy);
                lo = lo.min(e);
                hi = hi.max(e);
            }
        }
        (lo, hi)
    }

    /// u^m at integer grid coordinates; kx wraps periodically and ky past the
    /// zone edge picks up u(ky + 2π/q) = D u(ky), D = diag(e^{−i2π l_q/q}).
    pub fn u(&self, m: usize, ix: isize, iy: isize) -> Vec<Complex<T>> {
        let (nkx, nky) = (self.grid.nkx as isize, self.grid.nky as isize);
        let ix = ix.rem_euclid(nkx) as usize;
        let shift = iy.div_euclid(nky);
        let iy = iy.rem_euclid(nky) as usize;
        let col = self.vectors[ix * self.grid.nky + iy].column(m);
        if shift == 0 {
            return col;
        }
        let q = self.grid.q;
        col.into_iter()
            .enumerate()
            .map(|(l, v)| {
                let frac = T::lit(((l as i64 * shift as i64).rem_euclid(q)) as f64) / T::lit(q as f64);
                v * cis(-T::two_pi() * frac)
            })
            .collect()
    }

    /// Multiplies u^m(k) by e^{i f(m, kx, ky)}. `f` must respect the zone
    /// periodicity for smooth-gauge arguments; the lattice methods do not care.
    pub fn regauge(&self, f: impl Fn(usize, T, T) -> T) -> Self {
        let mut out = self.clone();
        for ix in 0..self.grid.nkx {
            for iy in 0..self.grid.nky {
                let (kx, ky) = (self.grid.kx::<T>(ix), self.grid.ky::<T>(iy));
                let v = &mut out.vectors[ix * self.grid.nky + iy];
                for m in 0..self.n_bands {
                    let ph = cis(f(m, kx, ky));
                    for l in 0..v.n_rows() {
                        v[(l, m)] = v[(l, m)] * ph;
                    }
                }
            }
        }
        out
    }
}

pub fn band_structure<T: Real>(grid: &MagneticBZGrid) -> Result<BlochBandData<T>> {
    let q = grid.q as usize;
    let pts: Vec<(usize, usize)> = (0..grid.nkx).flat_map(|i| (0..grid.nky).map(move |j| (i, j))).collect();
    let results: Vec<(Vec<T>, DenseMatrix<T>)> = pts
        .par_iter()
        .map(|&(i, j)| T::eigh(&magnetic_bloch_hamiltonian(grid.p, grid.q, grid.kx::<T>(i), grid.ky::<T>(j))?))
        .collect::<Result<_>>()?;
    let mut energies = Vec::with_capacity(pts.len() * q);
    let mut vectors = Vec::with_capacity(pts.len());
    for (e, v) in results {
        energies.extend(e);
        vectors.push(v);
    }
    BlochBandData::from_parts(*grid, q, energies, vectors)
}

/// Groups of mutually touching bands: m and m+1 share a group when their
/// direct gap min_k (E_{m+1} − E_m) is below `tol`.
pub fn band_groups<T: Real>(data: &BlochBandData<T>, tol: T) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for m in 0..data.n_bands {
        let touching = m + 1 < data.n_bands && {
            let mut gap = T::infinity();
            for ix in 0..data.grid.nkx {
                for iy in 0..data.grid.nky {
                    gap = gap.min(data.energy(m + 1, ix, iy) - data.energy(m, ix, iy));
                }
            }
            gap < tol
        };
        if !touching {
            groups.push(start..m + 1);
            start = m + 1;
        }
    }
    groups
}

/// Plaquette phases beyond this bound are treated as unresolved.
pub const ADMISSIBILITY_BOUND: f64 = 0.9 * std::f64::consts::PI;

fn overlap_det<T: Real>(a: &[Vec<Complex<T>>], b: &[Vec<Complex<T>>]) -> Complex<T> {
    let n = a.len();
    let mut m = Vec::with_capacity(n * n);
    for x in a {
        for y in b {
            m.push(x.iter().zip(y).fold(Complex::zero(), |s, (u, v)| s + u.conj() * *v));
        }
    }
    if n == 1 {
        m[0]
    } else {
        determinant(n, m)
    }
}

/// Lattice Chern number of the band group `bands` (a single band for `m..m+1`).
pub fn fukui_hatsugai_chern_group<T: Real>(data: &BlochBandData<T>, bands: Range<usize>) -> Result<i64> {
    let (nkx, nky) = (data.grid.nkx as isize, data.grid.nky as isize);
    let frame = |ix: isize, iy: isize| -> Vec<Vec<Complex<T>>> { bands.clone().map(|m| data.u(m, ix, iy)).collect() };
    let mut total = 0.0f64;
    let bound = T::lit(ADMISSIBILITY_BOUND);
    for ix in 0..nkx {
        let mut f00 = frame(ix, 0);
        let mut f10 = frame(ix + 1, 0);
        for iy in 0..nky {
            let f11 = frame(ix + 1, iy + 1);
            let f01 = frame(ix, iy + 1);
            let w = overlap_det(&f00, &f10) * overlap_det(&f10, &f11) * overlap_det(&f11, &f01) * overlap_det(&f01, &f00);
            let phase = w.arg();
            if phase.abs() > bound || w.norm() < T::lit(1e-12) {
                return Err(Error::GridTooCoarse { phase: phase.f64() });
            }
            total += phase.f64();
            f00 = f01;
            f10 = f11;
        }
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

pub fn fukui_hatsugai_chern<T: Real>(data: &BlochBandData<T>, m: usize) -> Result<i64> {
    fukui_hatsugai_chern_group(data, m..m + 1)
}

/// Chern number of every band group (touching bands merged).
pub fn chern_numbers<T: Real>(data: &BlochBandData<T>, touch_tol: T) -> Result<Vec<(Range<usize>, i64)>> {
    band_groups(data, touch_tol)
        .into_iter()
        .map(|g| fukui_hatsugai_chern_group(data, g.clone()).map(|c| (g, c)))
        .collect()
}

/// A closed kx-strip `[kx_start, kx_start + kx_len]` (grid indices, wrapping,
/// full ky range) on which u_{l*} is used as the gauge reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slab {
    pub kx_start: usize,
    pub kx_len: usize,
    pub l_star: usize,
}

impl Slab {
    fn offset(&self, ix: usize, nkx: usize) -> usize {
        (ix + nkx - self.kx_start % nkx) % nkx
    }

    pub fn contains(&self, ix: usize, nkx: usize) -> bool {
        self.offset(ix, nkx) <= self.kx_len
    }

    /// Plaquette between columns ix and ix + 1 lies in the strip.
    pub fn contains_cell(&self, ix: usize, nkx: usize) -> bool {
        self.offset(ix, nkx) < self.kx_len
    }

    pub fn left(&self, nkx: usize) -> usize {
        self.kx_start % nkx
    }

    pub fn right(&self, nkx: usize) -> usize {
        (self.kx_start + self.kx_len) % nkx
    }
}

/// B2 is a union of disjoint strips; B1 is the closed complement. No strips
/// means B1 is the whole zone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BZPartition {
    pub slabs: Vec<Slab>,
}

impl BZPartition {
    pub fn whole_zone() -> Self {
        Self { slabs: Vec::new() }
    }

    /// B1 = {kx ∈ [kx_lo, kx_hi]} snapped to the grid; B2 is the rest with
    /// reference component `l_star`.
    pub fn from_kx_range<T: Real>(grid: &MagneticBZGrid, kx_lo: T, kx_hi: T, l_star: usize) -> Self {
        let idx = |k: T| -> usize {
            let x = (k + T::PI()) / T::two_pi() * T::lit(grid.nkx as f64);
            x.round().to_usize().unwrap_or(0) % grid.nkx
        };
        let (a, b) = (idx(kx_lo), idx(kx_hi));
        let b1_len = (b + grid.nkx - a) % grid.nkx;
        Self { slabs: vec![Slab { kx_start: b, kx_len: grid.nkx - b1_len, l_star }] }
    }

    pub fn in_b1(&self, ix: usize, nkx: usize) -> bool {
        self.slabs.iter().all(|s| !s.contains(ix, nkx) || s.offset(ix, nkx) == 0 || s.offset(ix, nkx) == s.kx_len)
    }

    pub fn cell_in_b1(&self, ix: usize, nkx: usize) -> bool {
        self.slabs.iter().all(|s| !s.contains_cell(ix, nkx))
    }

    fn validate(&self, nkx: usize, q: usize) -> Result<()> {
        let mut covered = vec![0usize; nkx];
        for s in &self.slabs {
            if s.kx_len == 0 || s.kx_len >= nkx {
                return Err(Error::InvalidPartition(format!("strip width {} outside (0, {nkx})", s.kx_len)));
            }
            if s.l_star == 0 || s.l_star >= q {
                return Err(Error::InvalidPartition(format!("l* = {} outside [1, q)", s.l_star)));
            }
            for ix in 0..nkx {
                if s.contains_cell(ix, nkx) {
                    covered[ix] += 1;
                }
            }
        }
        if covered.iter().any(|&c| c > 1) {
            return Err(Error::InvalidPartition("B2 strips overlap".into()));
        }
        Ok(())
    }
}

pub const ZERO_TOLERANCE: f64 = 1e-3;

fn wrap_pi<T: Real>(x: T) -> T {
    let tau = T::two_pi();
    let mut y = x % tau;
    if y > T::PI() {
        y -= tau;
    } else if y <= -T::PI() {
        y += tau;
    }
    y
}

/// How much of the partition invariant is verified on the data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionCheck {
    /// u_0 has no zero on B1 and u_{l*} none on its strip (grid values and
    /// plaquette vortices).
    Full,
    /// As `Full` on B1, but u_{l*} is only checked on the strip edges. For
    /// vectors recovered from transmission, which carry a factor ū_0 and are
    /// undefined where u_0 = 0.
    Boundary,
}

/// Chern number from the winding of χ = arg(u_{l*} ū_0) around ∂B1
/// (counterclockwise in the kx–ky plane).
pub fn phase_mismatch_chern<T: Real>(data: &BlochBandData<T>, m: usize, partition: &BZPartition) -> Result<i64> {
    phase_mismatch_chern_with(data, m, partition, PartitionCheck::Full)
}

pub fn phase_mismatch_chern_with<T: Real>(
    data: &BlochBandData<T>,
    m: usize,
    partition: &BZPartition,
    check: PartitionCheck,
) -> Result<i64> {
    let (nkx, nky) = (data.grid.nkx, data.grid.nky);
    let tol = T::lit(ZERO_TOLERANCE);
    partition.validate(nkx, data.grid.q as usize)?;
    for ix in 0..nkx {
        for iy in 0..nky {
            let u = data.u(m, ix as isize, iy as isize);
            if partition.in_b1(ix, nkx) && u[0].norm() <= tol {
                return Err(Error::InvalidPartition(format!("u_0 vanishes in B1 at grid point ({ix}, {iy})")));
            }
            if partition.cell_in_b1(ix, nkx) && component_vortex(data, m, 0, ix, iy) != 0 {
                return Err(Error::InvalidPartition(format!("u_0 has a vortex in B1 at cell ({ix}, {iy})")));
            }
            for s in &partition.slabs {
                let ls = s.l_star;
                let edge = ix == s.left(nkx) || ix == s.right(nkx);
                let point = match check {
                    PartitionCheck::Full => s.contains(ix, nkx),
                    PartitionCheck::Boundary => edge,
                };
                if point && u[ls].norm() <= tol {
                    return Err(Error::InvalidPartition(format!("u_{ls} vanishes in B2 at grid point ({ix}, {iy})")));
                }
                if check == PartitionCheck::Full && s.contains_cell(ix, nkx) && component_vortex(data, m, ls, ix, iy) != 0 {
                    return Err(Error::InvalidPartition(format!("u_{ls} has a vortex in B2 at cell ({ix}, {iy})")));
                }
            }
        }
    }
    let winding = |ix: usize, ls: usize| -> T {
        let chi = |iy: isize| {
            let u = data.u(m, ix as isize, iy);
            (u[ls] * u[0].conj()).arg()
        };
        let mut w = T::zero();
        for iy in 0..nky as isize {
            w += wrap_pi(chi(iy + 1) - chi(iy));
        }
        w
    };
    // Counterclockwise around B1: up along each strip's left edge, down its right edge.
    let mut total = T::zero();
    for s in &partition.slabs {
        total += winding(s.left(nkx), s.l_star) - winding(s.right(nkx), s.l_star);
    }
    Ok((total / T::two_pi()).round().to_i64().unwrap())
}

/// Net vortex number of component l of u^m inside the plaquette at (ix, iy).
/// The phase of u_l is compared with the Berry link phases, which makes the
/// count gauge invariant. Each edge is evaluated in its +kx / +ky direction so
/// that neighbouring plaquettes cancel exactly, even when u_l changes sign on
/// an edge.
pub fn component_vortex<T: Real>(data: &BlochBandData<T>, m: usize, l: usize, ix: usize, iy: usize) -> i64 {
    let c = [(0, 0), (1, 0), (1, 1), (0, 1)].map(|(a, b)| data.u(m, ix as isize + a, iy as isize + b));
    let edge = |u: &[Complex<T>], v: &[Complex<T>]| -> (T, T) {
        let link = u.iter().zip(v).fold(Complex::<T>::zero(), |s, (a, b)| s + a.conj() * *b).arg();
        (wrap_pi((v[l] * u[l].conj()).arg() - link), link)
    };
    let (e0, a0) = edge(&c[0], &c[1]);
    let (e1, a1) = edge(&c[1], &c[2]);
    let (e2, a2) = edge(&c[3], &c[2]);
    let (e3, a3) = edge(&c[0], &c[3]);
    let mismatch = e0 + e1 - e2 - e3;
    let flux = wrap_pi(a0 + a1 - a2 - a3);
    ((mismatch + flux) / T::two_pi()).round().to_i64().unwrap()
}

fn component_clear<T: Real>(data: &BlochBandData<T>, m: usize, l: usize, slab: &Slab) -> Option<T> {
    let (nkx, nky) = (data.grid.nkx, data.grid.nky);
    let mut mn = T::infinity();
    for ix in (0..nkx).filter(|&ix| slab.contains(ix, nkx)) {
        for iy in 0..nky {
            mn = mn.min(data.u(m, ix as isize, iy as isize)[l].norm());
            if slab.contains_cell(ix, nkx) && component_vortex(data, m, l, ix, iy) != 0 {
                return None;
            }
        }
    }
    (mn > T::lit(ZERO_TOLERANCE)).then_some(mn)
}

/// Covers every zero of u^m_0 (grid values below the zero tolerance, or
/// plaquette vortices) with strips padded by one column, and picks for each
/// strip the component with the largest minimum modulus that has no zero
/// there. Strips are split at a zero-free column when no component fits.
pub fn auto_partition<T: Real>(data: &BlochBandData<T>, m: usize) -> Result<BZPartition> {
    let (nkx, nky, q) = (data.grid.nkx, data.grid.nky, data.grid.q as usize);
    let tol = T::lit(ZERO_TOLERANCE);
    // Cells (ix, ix+1) that must belong to B2.
    let mut cell = vec![false; nkx];
    for ix in 0..nkx {
        for iy in 0..nky {
            if data.u(m, ix as isize, iy as isize)[0].norm() <= tol {
                cell[(ix + nkx - 1) % nkx] = true;
                cell[ix] = true;
            } else if component_vortex(data, m, 0, ix, iy) != 0 {
                cell[ix] = true;
            }
        }
    }
    if !cell.iter().any(|&b| b) {
        return Ok(BZPartition::whole_zone());
    }
    if cell.iter().all(|&b| b) {
        return Err(Error::InvalidPartition("zeros of u_0 cover every kx".into()));
    }
    // Circular runs of required cells, padded by one cell per side.
    let mut runs = Vec::new();
    for start in 0..nkx {
        if cell[start] && !cell[(start + nkx - 1) % nkx] {
            let mut len = 0;
            while cell[(start + len) % nkx] {
                len += 1;
            }
            runs.push(((start + nkx - 1) % nkx, len + 2));
        }
    }
    // Merge runs whose padding collides.
    runs.sort();
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (s, len) in runs {
        if let Some(last) = merged.last_mut() {
            if s <= last.0 + last.1 {
                last.1 = last.1.max(s + len - last.0);
                continue;
            }
        }
        merged.push((s, len));
    }
    if merged.len() > 1 {
        let (first, last) = (merged[0], *merged.last().unwrap());
        if last.0 + last.1 >= first.0 + nkx {
            let len = first.0 + nkx + first.1 - last.0;
            merged.pop();
            merged[0] = (last.0, len.max(first.1));
        }
    }
    let mut slabs = Vec::new();
    for (start, len) in merged {
        if len >= nkx {
            return Err(Error::InvalidPartition("zeros of u_0 leave no room for B1".into()));
        }
        slabs.extend(fit_slab(data, m, start % nkx, len, q)?);
    }
    Ok(BZPartition { slabs })
}

fn fit_slab<T: Real>(data: &BlochBandData<T>, m: usize, start: usize, len: usize, q: usize) -> Result<Vec<Slab>> {
    let nkx = data.grid.nkx;
    let best = (1..q)
        .filter_map(|l| {
            let slab = Slab { kx_start: start, kx_len: len, l_star: l };
            component_clear(data, m, l, &slab).map(|mn| (l, mn))
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    if let Some((l_star, _)) = best {
        return Ok(vec![Slab { kx_start: start, kx_len: len, l_star }]);
    }
    // Split at an interior column where u_0 has no grid zero.
    let tol = T::lit(ZERO_TOLERANCE);
    let col_ok = |ix: usize| (0..data.grid.nky).all(|iy| data.u(m, ix as isize, iy as isize)[0].norm() > tol);
    let mid = len / 2;
    for d in 0..len / 2 {
        for cut in [mid + d, mid - d] {
            if cut == 0 || cut >= len || !col_ok((start + cut) % nkx) {
                continue;
            }
            let left = fit_slab(data, m, start, cut, q);
            let right = fit_slab(data, m, (start + cut) % nkx, len - cut, q);
            if let (Ok(mut a), Ok(b)) = (left, right) {
                a.extend(b);
                return Ok(a);
            }
        }
    }
    Err(Error::InvalidPartition(format!("no reference component is free of zeros on strip at kx index {start}")))
}

/// Per-k vectors ∝ u^m recovered from torus transmission data T_{(0,0)}^{(j,l)}
/// by T(kx, ky, l_q) = Σ_{j,l} T^{j,l} e^{−ikx j} e^{−iky l}, returned as a
/// one-band [`BlochBandData`] on the torus momenta.
pub fn bloch_from_transmission<T: Real>(
    spec: &LatticeSpec,
    amplitudes: &[Complex<T>],
    p: i64,
    q: i64,
    omega: T,
    gamma: T,
) -> Result<BlochBandData<T>> {
    check_reduced(p, q)?;
    if spec.bc_x != Boundary::Periodic || spec.bc_y != Boundary::Periodic || spec.spin_dim != 1 {
        return Err(Error::InvalidParameter("transmission data must come from a scalar torus".into()));
    }
    if amplitudes.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: amplitudes.len() });
    }
    let qu = q as usize;
    if spec.n_l() % qu != 0 {
        return Err(Error::InvalidParameter(format!("OAM window {} is not a multiple of q = {q}", spec.n_l())));
    }
    let grid = MagneticBZGrid::new(p, q, spec.n_x, spec.n_l() / qu)?;
    // Isolation: one band within γ of ω everywhere, every other band ≥ 3γ away.
    let check = band_structure::<T>(&grid)?;
    let three = T::lit(3.0) * gamma;
    let target = (0..qu).find(|&m| {
        let (lo, hi) = check.band_range(m);
        omega >= lo - gamma && omega <= hi + gamma
    });
    let band = target.ok_or_else(|| Error::BandNotIsolated { band: 0, detail: format!("no band within γ of ω = {omega}") })?;
    let (lo, hi) = check.band_range(band);
    if hi - lo > gamma {
        return Err(Error::BandNotIsolated { band, detail: format!("bandwidth {} exceeds γ", hi - lo) });
    }
    for m in (0..qu).filter(|&m| m != band) {
        let (a, b) = check.band_range(m);
        if (omega - b).abs().min((a - omega).abs()) < three || (a <= omega && omega <= b) {
            return Err(Error::BandNotIsolated { band, detail: format!("band {m} within 3γ of ω") });
        }
    }
    let pts: Vec<(usize, usize)> = (0..grid.nkx).flat_map(|i| (0..grid.nky).map(move |j| (i, j))).collect();
    let vectors: Vec<DenseMatrix<T>> = pts
        .par_iter()
        .map(|&(ix, iy)| {
            let (kx, ky) = (grid.kx::<T>(ix), grid.ky::<T>(iy));
            let mut v = vec![Complex::<T>::zero(); qu];
            for j in 0..spec.n_x {
                for l in spec.l_min..=spec.l_max {
                    let a = amplitudes[spec.index_unchecked(j, l, 0)];
                    let ph = cis(-(kx * T::lit(j as f64) + ky * T::lit(l as f64)));
                    v[l.rem_euclid(q) as usize] += a * ph;
                }
            }
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
            let inv = if norm > T::zero() { T::one() / norm } else { T::one() };
            DenseMatrix::from_fn(qu, 1, |l, _| v[l] * inv)
        })
        .collect();
    let energies = vec![omega; pts.len()];
    BlochBandData::from_parts(grid, 1, energies, vectors)
}
