//! Transfer-matrix model of the physical cavity network and its reduction to
//! the tight-binding coupling κ = Ω₀|r|²/(4π).
//!
//! Units: c = 1 and the unit spacing Λ = 1, so frequencies equal wave numbers
//! and Bloch momenta are in radians per site.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{block_det, block_mul, Block};
use crate::linalg::determinant;
use crate::scalar::{cis, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpticalParams<T> {
    /// |r| of every beam splitter, in (0, 1).
    pub r_mag: T,
    /// Carrier wave number k₀ (the ω₀ resonance).
    pub k_wave: T,
    /// Round-trip optical path of a main cavity.
    pub s_c: T,
    /// Round-trip optical path of a coupling cavity.
    pub s_a: T,
    /// Arm phase imbalances in cycles.
    pub phi_x: T,
    pub phi_y: T,
}

impl<T: Real> OpticalParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_mag > T::zero() && self.r_mag < T::one()) {
            return Err(Error::InvalidParameter(format!("|r| = {} outside (0, 1)", self.r_mag)));
        }
        if !(self.s_c > T::zero() && self.s_a > T::zero() && self.k_wave > T::zero()) {
            return Err(Error::InvalidParameter("path lengths and wave number must be positive".into()));
        }
        Ok(())
    }

    /// Main cavities resonant at k₀S_c = 2πn and coupling cavities
    /// anti-resonant at k₀S_a = (2m + 1)π. n + m must be odd: for even n + m
    /// the band is mirrored (ω − ω₀ → −(ω − ω₀)).
    pub fn resonant(r_mag: T, s_c: T, n: u32, m: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("main-cavity order n must be positive".into()));
        }
        if (n + m) % 2 == 0 {
            return Err(Error::InvalidParameter(format!("n + m = {} must be odd", n + m)));
        }
        let k_wave = T::two_pi() * T::lit(n as f64) / s_c;
        let s_a = T::PI() * T::lit((2 * m + 1) as f64) / k_wave;
        let p = Self { r_mag, k_wave, s_c, s_a, phi_x: T::zero(), phi_y: T::zero() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_phases(self, phi_x: T, phi_y: T) -> Self {
        Self { phi_x, phi_y, ..self }
    }

    pub fn t_mag(&self) -> T {
        (T::one() - self.r_mag * self.r_mag).sqrt()
    }

    /// Free spectral range Ω₀ = 2π/S_c.
    pub fn omega0(&self) -> T {
        T::two_pi() / self.s_c
    }
}

/// Paraxial ray transfer matrix [[A, B], [C, D]].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayMatrix<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> RayMatrix<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if (det - T::one()).abs() > T::lit(1e-12).max(T::lit(64.0 * T::EPS)) {
            return Err(Error::InvalidParameter(format!("ray matrix determinant {det} ≠ 1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn compose(&self, next: &Self) -> Self {
        Self {
            a: next.a * self.a + next.b * self.c,
            b: next.a * self.b + next.b * self.d,
            c: next.c * self.a + next.d * self.c,
            d: next.c * self.b + next.d * self.d,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        let tol = T::lit(1e-12).max(T::lit(64.0 * T::EPS));
        (self.a - T::one()).abs() < tol && (self.d - T::one()).abs() < tol && self.b.abs() < tol && self.c.abs() < tol
    }
}

/// Beam-splitter transfer matrix for r = i|r|, t = |t|.
pub fn bs_transfer_matrix<T: Real>(r_mag: T) -> Result<Block<T>> {
    if !(r_mag > T::zero() && r_mag < T::one()) {
        return Err(Error::InvalidParameter(format!("|r| = {r_mag} outside (0, 1)")));
    }
    let t = Complex::from((T::one() - r_mag * r_mag).sqrt());
    let ir = Complex::new(T::zero(), r_mag);
    let one = Complex::from(T::one());
    Ok([[one / (-ir), t / ir], [t / (-ir), one / ir]])
}

fn diag<T: Real>(a: Complex<T>, b: Complex<T>) -> Block<T> {
    [[a, Complex::zero()], [Complex::zero(), b]]
}

/// Field transfer across one coupling link at wave number k with arm imbalance φ.
pub fn field_transfer<T: Real>(params: &OpticalParams<T>, k: T, phi: T) -> Result<Block<T>> {
    let bs = bs_transfer_matrix(params.r_mag)?;
    let eighth = k * params.s_c / T::lit(8.0);
    let prop = diag(cis(-eighth), cis(eighth));
    let half = k * params.s_a / T::lit(2.0);
    let tp = T::two_pi() * phi;
    let arm = diag(cis(-(half + tp)), cis(half - tp));
    Ok(block_mul(&block_mul(&block_mul(&block_mul(&prop, &bs), &arm), &bs), &prop))
}

pub fn field_transfer_x<T: Real>(params: &OpticalParams<T>) -> Result<Block<T>> {
    field_transfer(params, params.k_wave, params.phi_x)
}

pub fn field_transfer_y<T: Real>(params: &OpticalParams<T>) -> Result<Block<T>> {
    field_transfer(params, params.k_wave, params.phi_y)
}

/// det of the homogeneous system for (a, b, c, d):
/// (a, d) = e^{iKx} M_x (b, c) and (d, c) = e^{iKy} M_y (a, b).
pub fn bloch_determinant<T: Real>(params: &OpticalParams<T>, detuning: T, kx: T, ky: T) -> Result<Complex<T>> {
    let k = params.k_wave + detuning;
    let mx = field_transfer(params, k, params.phi_x)?;
    let my = field_transfer(params, k, params.phi_y)?;
    let (ex, ey) = (cis(kx), cis(ky));
    let (o, z) = (Complex::from(T::one()), Complex::zero());
    #[rustfmt::skip]
    let m = vec![
        o, -ex * mx[0][0], -ex * mx[0][1], z,
        z, -ex * mx[1][0], -ex * mx[1][1], o,
        -ey * my[0][0], -ey * my[0][1], z, o,
        -ey * my[1][0], -ey * my[1][1], o, z,
    ];
    Ok(determinant(4, m))
}

/// Samples per free spectral range for the root bracketing scan.
pub const DISPERSION_SCAN_POINTS: usize = 16384;

/// Detuning ω − ω₀ of the Bloch mode at (Kx, Ky) closest to ω₀.
///
/// The determinant has a constant phase between roots (up to sign flips), so
/// after rotating out that phase it is a real function; roots are bracketed
/// on a scan over one free spectral range, bisected, then polished by secant.
pub fn bloch_dispersion<T: Real>(params: &OpticalParams<T>, kx: T, ky: T) -> Result<T> {
    params.validate()?;
    let fsr = params.omega0();
    let n = DISPERSION_SCAN_POINTS;
    let xs: Vec<T> = (0..=n).map(|i| fsr * (T::lit(i as f64) / T::lit(n as f64) - T::lit(0.5))).collect();
    let dets: Vec<Complex<T>> = xs.iter().map(|&x| bloch_determinant(params, x, kx, ky)).collect::<Result<_>>()?;
    let reference = dets.iter().fold(Complex::zero(), |best: Complex<T>, d| if d.norm() > best.norm() { *d } else { best });
    if reference.is_zero() {
        return Err(Error::NoRoot("determinant vanishes identically".into()));
    }
    let rot = reference.conj() / reference.norm();
    let f = |x: T| -> Result<T> { Ok((bloch_determinant(params, x, kx, ky)? * rot).re) };
    let vals: Vec<T> = dets.iter().map(|d| (*d * rot).re).collect();
    let mut best: Option<T> = None;
    for i in 0..n {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if !(fa == T::zero() || fa * fb < T::zero()) {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (xs[i], xs[i + 1], fa);
        for _ in 0..40 {
            let mid = (lo + hi) * T::lit(0.5);
            let fm = f(mid)?;
            if (fm < T::zero()) == (flo < T::zero()) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let root = secant(&f, lo, hi, T::lit(1e-12) * fsr)?;
        if best.is_none_or(|b| root.abs() < b.abs()) {
            best = Some(root);
        }
    }
    best.ok_or_else(|| Error::NoRoot(format!("no Bloch mode in the free spectral range at K = ({kx}, {ky})")))
}

fn secant<T: Real>(f: &impl Fn(T) -> Result<T>, a: T, b: T, tol: T) -> Result<T> {
    let (mut x0, mut x1) = (a, b);
    let (mut f0, mut f1) = (f(x0)?, f(x1)?);
    for _ in 0..50 {
        if (x1 - x0).abs() <= tol || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        // Stay inside the bracket.
        let x2 = x2.max(a.min(b)).min(a.max(b));
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1)?;
    }
    Ok(x1)
}

/// κ = Ω₀|r|²/(4π).
pub fn coupling_strength<T: Real>(params: &OpticalParams<T>) -> T {
    params.omega0() * params.r_mag * params.r_mag / (T::lit(4.0) * T::PI())
}

/// Tight-binding band −2κ[cos(Kx − 2πφ_x) + cos(Ky − 2πφ_y)].
pub fn tight_binding_band<T: Real>(params: &OpticalParams<T>, kx: T, ky: T) -> T {
    let tp = T::two_pi();
    -T::lit(2.0) * coupling_strength(params) * ((kx - tp * params.phi_x).cos() + (ky - tp * params.phi_y).cos())
}

/// Comparison of the numeric dispersion with the tight-binding band on an
/// n×n grid K = 2π(i, j)/n.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionCheck<T> {
    pub kappa: T,
    /// Least-squares amplitude fit of the numeric detuning to the cosine band.
    pub kappa_fit: T,
    /// max |numeric − band| / (4κ).
    pub max_relative_error: T,
    pub samples: Vec<(T, T, T)>,
}

pub fn dispersion_check<T: Real>(params: &OpticalParams<T>, n: usize) -> Result<DispersionCheck<T>> {
    let kappa = coupling_strength(params);
    let pts: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let samples: Vec<(T, T, T)> = pts
        .par_iter()
        .map(|&(i, j)| {
            let kx = T::two_pi() * T::lit(i as f64) / T::lit(n as f64);
            let ky = T::two_pi() * T::lit(j as f64) / T::lit(n as f64);
            bloch_dispersion(params, kx, ky).map(|d| (kx, ky, d))
        })
        .collect::<Result<_>>()?;
    let mut num = T::zero();
    let mut den = T::zero();
    let mut err = T::zero();
    for &(kx, ky, d) in &samples {
        let band = tight_binding_band(params, kx, ky);
        err = err.max((d - band).abs() / (T::lit(4.0) * kappa));
        let g = band / kappa;
        num += d * g;
        den += g * g;
    }
    Ok(DispersionCheck { kappa, kappa_fit: num / den, max_relative_error: err, samples })
}

/// kL₀ − (2p + |l| + 1)·arccos((A + D)/2), reduced to [0, 2π). Independent of
/// (p, l) exactly when the cavity is degenerate.
pub fn degenerate_mode_detuning<T: Real>(p_idx: u32, l: i64, l0: T, k_wave: T, ray: &RayMatrix<T>) -> Result<T> {
    let half = (ray.a + ray.d) / T::lit(2.0);
    if half.abs() > T::one() {
        return Err(Error::UnstableCavity(half.f64()));
    }
    let order = T::lit((2 * p_idx as u64 + l.unsigned_abs() + 1) as f64);
    let x = k_wave * l0 - order * half.acos();
    let tau = T::two_pi();
    let r = x % tau;
    Ok(if r < T::zero() { r + tau } else { r })
}

/// Unit-determinant check helper for composed transfer matrices.
pub fn transfer_determinant<T: Real>(m: &Block<T>) -> Complex<T> {
    block_det(m)
}
