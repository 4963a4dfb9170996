use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

/// Cavity index `j`, OAM number `l`, polarization `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteIndex {
    pub j: usize,
    pub l: i64,
    pub s: usize,
}

impl SiteIndex {
    pub fn new(j: usize, l: i64, s: usize) -> Self {
        Self { j, l, s }
    }
}

/// Geometry of the synthetic lattice: `n_x` cavities times the OAM window
/// `[l_min, l_max]` times `spin_dim` polarizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_x: usize,
    pub l_min: i64,
    pub l_max: i64,
    pub spin_dim: usize,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
}

impl LatticeSpec {
    pub fn new(n_x: usize, l_min: i64, l_max: i64, spin_dim: usize, bc_x: Boundary, bc_y: Boundary) -> Result<Self> {
        let s = Self { n_x, l_min, l_max, spin_dim, bc_x, bc_y };
        s.validate()?;
        Ok(s)
    }

    /// Open x, periodic y: the geometry used for edge transport.
    pub fn cylinder(n_x: usize, l_min: i64, l_max: i64, spin_dim: usize) -> Result<Self> {
        Self::new(n_x, l_min, l_max, spin_dim, Boundary::Open, Boundary::Periodic)
    }

    pub fn torus(n_x: usize, l_min: i64, l_max: i64, spin_dim: usize) -> Result<Self> {
        Self::new(n_x, l_min, l_max, spin_dim, Boundary::Periodic, Boundary::Periodic)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 {
            return Err(Error::InvalidLattice("n_x must be at least 1".into()));
        }
        if self.l_min > self.l_max {
            return Err(Error::InvalidLattice(format!("l_min {} > l_max {}", self.l_min, self.l_max)));
        }
        if !(1..=2).contains(&self.spin_dim) {
            return Err(Error::InvalidLattice(format!("spin_dim {} not in {{1,2}}", self.spin_dim)));
        }
        Ok(())
    }

    pub fn n_l(&self) -> usize {
        (self.l_max - self.l_min + 1) as usize
    }

    pub fn dim(&self) -> usize {
        self.n_x * self.n_l() * self.spin_dim
    }

    pub fn contains(&self, site: &SiteIndex) -> bool {
        site.j < self.n_x && site.l >= self.l_min && site.l <= self.l_max && site.s < self.spin_dim
    }

    pub fn flat_index(&self, site: &SiteIndex) -> Result<usize> {
        if !self.contains(site) {
            return Err(Error::SiteOutOfRange(format!("{site:?} outside {self:?}")));
        }
        Ok(self.index_unchecked(site.j, site.l, site.s))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, j: usize, l: i64, s: usize) -> usize {
        (j * self.n_l() + (l - self.l_min) as usize) * self.spin_dim + s
    }

    pub fn site_of(&self, idx: usize) -> Result<SiteIndex> {
        if idx >= self.dim() {
            return Err(Error::SiteOutOfRange(format!("flat index {idx} >= {}", self.dim())));
        }
        let s = idx % self.spin_dim;
        let rest = idx / self.spin_dim;
        let l = self.l_min + (rest % self.n_l()) as i64;
        Ok(SiteIndex { j: rest / self.n_l(), l, s })
    }

    /// OAM number of every flat index.
    pub fn l_values(&self) -> Vec<i64> {
        (0..self.dim()).map(|i| self.l_min + ((i / self.spin_dim) % self.n_l()) as i64).collect()
    }

    /// Cavity index of every flat index.
    pub fn j_values(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| i / (self.spin_dim * self.n_l())).collect()
    }

    fn step_x(&self, j: usize, forward: bool) -> Option<usize> {
        match (forward, self.bc_x) {
            (true, _) if j + 1 < self.n_x => Some(j + 1),
            (true, Boundary::Periodic) => Some(0),
            (false, _) if j > 0 => Some(j - 1),
            (false, Boundary::Periodic) => Some(self.n_x - 1),
            _ => None,
        }
    }

    fn step_y(&self, l: i64, forward: bool) -> Option<i64> {
        match (forward, self.bc_y) {
            (true, _) if l < self.l_max => Some(l + 1),
            (true, Boundary::Periodic) => Some(self.l_min),
            (false, _) if l > self.l_min => Some(l - 1),
            (false, Boundary::Periodic) => Some(self.l_max),
            _ => None,
        }
    }

    /// Nearest neighbours of `site` in the same polarization. Open edges omit
    /// the missing neighbour; periodic edges wrap.
    pub fn neighbors(&self, site: &SiteIndex) -> Result<Vec<(Direction, SiteIndex)>> {
        if !self.contains(site) {
            return Err(Error::SiteOutOfRange(format!("{site:?}")));
        }
        let mut out = Vec::with_capacity(4);
        if let Some(j) = self.step_x(site.j, true) {
            out.push((Direction::PlusX, SiteIndex { j, ..*site }));
        }
        if let Some(j) = self.step_x(site.j, false) {
            out.push((Direction::MinusX, SiteIndex { j, ..*site }));
        }
        if let Some(l) = self.step_y(site.l, true) {
            out.push((Direction::PlusY, SiteIndex { l, ..*site }));
        }
        if let Some(l) = self.step_y(site.l, false) {
            out.push((Direction::MinusY, SiteIndex { l, ..*site }));
        }
        Ok(out)
    }

    /// Forward bonds `(j,l) → (j+1,l)` and `(j,l) → (j,l+1)` respecting the
    /// boundary conditions. The flag marks bonds that wrap around a periodic edge.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::with_capacity(2 * self.n_x * self.n_l());
        for j in 0..self.n_x {
            for l in self.l_min..=self.l_max {
                if let Some(j2) = self.step_x(j, true) {
                    out.push(Bond { axis: Axis::X, j, l, j_to: j2, l_to: l, wraps: j2 <= j });
                }
                if let Some(l2) = self.step_y(l, true) {
                    out.push(Bond { axis: Axis::Y, j, l, j_to: j, l_to: l2, wraps: l2 <= l });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug)]
pub struct Bond {
    pub axis: Axis,
    pub j: usize,
    pub l: i64,
    pub j_to: usize,
    pub l_to: i64,
    pub wraps: bool,
}
