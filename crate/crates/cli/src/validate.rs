//! Schema and physics checks performed before any computation.

use serde::Serialize;

use crate::config::{BoundaryConfig, Config, ExperimentKind, ModelConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Fatal,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Fatal => "fatal",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

pub fn has_fatal(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Fatal)
}

pub fn validate(kind: ExperimentKind, cfg: &Config) -> Vec<Diagnostic> {
    let mut fatals = Vec::new();
    let mut warnings = Vec::new();
    let mut fatal = |m: String| fatals.push(m);

    if !(cfg.gamma > 0.0) || !cfg.gamma.is_finite() {
        fatal(format!("loss must be positive (gamma = {})", cfg.gamma));
    }
    let lat = &cfg.lattice;
    if let Err(e) = lat.spec(cfg.model.spin_dim()) {
        fatal(e.to_string());
    }
    let flux = match cfg.model.flux() {
        Some(Ok(f)) => Some(f),
        Some(Err(e)) => {
            fatal(format!("model.phi0: {e}"));
            None
        }
        None => None,
    };
    // The OAM-gauge phase e^{−i2πlφ₀} is only single valued on a periodic
    // OAM window whose length is a multiple of q.
    if let (ModelConfig::OamGauge { .. }, Some(f), BoundaryConfig::Periodic) = (&cfg.model, flux, lat.bc_y) {
        match f.pq() {
            Some((_, q)) if lat.window() % q != 0 => {
                fatal(format!("window not multiple of q: length {} with phi0 = {f}", lat.window()))
            }
            None => fatal("periodic OAM window needs a rational phi0".into()),
            _ => {}
        }
    }

    let grid = cfg.omega.grid();
    let uses_omega = matches!(kind, ExperimentKind::Spectrum | ExperimentKind::Butterfly | ExperimentKind::Displacement | ExperimentKind::Disorder);
    if uses_omega {
        if grid.is_empty() {
            fatal("omega grid is empty".into());
        }
        if grid.iter().any(|w| !w.is_finite()) {
            fatal("omega grid has non-finite values".into());
        }
    }

    match kind {
        ExperimentKind::Displacement | ExperimentKind::Disorder => {
            if cfg.edge.depth == 0 || 2 * cfg.edge.depth > lat.n_x {
                fatal(format!("edge.depth {} outside [1, n_x/2]", cfg.edge.depth));
            }
            if !(lat.l_min..=lat.l_max).contains(&cfg.edge.input_l) {
                fatal(format!("edge.input_l {} outside the OAM window", cfg.edge.input_l));
            }
            if lat.bc_y == BoundaryConfig::Open {
                warnings.push("open OAM window: edge modes reflect at l_min/l_max and bias the displacement".to_string());
            }
            if kind == ExperimentKind::Disorder && cfg.disorder.is_none() {
                fatal("disorder experiment needs a [disorder] table".into());
            }
            if let Some(d) = &cfg.disorder {
                if d.trials < 2 {
                    fatal(format!("disorder.trials must be at least 2, got {}", d.trials));
                }
                if d.input_ls.is_empty() {
                    fatal("disorder.input_ls is empty".into());
                }
                if let Err(e) = d.model().validate() {
                    fatal(format!("disorder: {e}"));
                }
            }
        }
        ExperimentKind::EdgeMap => {
            let m = &cfg.map;
            if m.j >= lat.n_x || !(lat.l_min..=lat.l_max).contains(&m.l) || m.s >= cfg.model.spin_dim() {
                fatal(format!("map input ({}, {}, {}) outside the lattice", m.j, m.l, m.s));
            }
        }
        ExperimentKind::Butterfly => {
            if cfg.butterfly.q_max < 1 {
                fatal("butterfly.q_max must be at least 1".into());
            }
        }
        ExperimentKind::Chern | ExperimentKind::Bands => {
            let c = &cfg.chern;
            if c.nkx < 2 || c.nky < 2 {
                fatal("chern grid needs at least 2 × 2 points".into());
            }
            match flux.and_then(|f| f.pq()) {
                Some((p, q)) if q >= 2 && p != 0 => {}
                _ => fatal("chern/bands need a rational phi0 = p/q with q ≥ 2 and p ≠ 0".into()),
            }
        }
        ExperimentKind::Qsh => {
            let q = &cfg.qsh;
            if q.beta0.is_empty() || q.nk == 0 {
                fatal("qsh needs beta0 values and nk ≥ 1".into());
            }
            if !q.map_beta0.is_empty() && lat.n_x % 4 != 0 && lat.bc_x == BoundaryConfig::Periodic {
                fatal("periodic x needs n_x to be a multiple of 4 for the qsh model".into());
            }
        }
        ExperimentKind::DispersionCheck => {
            let o = &cfg.optics;
            if o.r.is_empty() || o.r.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                fatal("optics.r values must lie in (0, 1)".into());
            }
            if o.n == 0 || (o.n + o.m) % 2 == 0 {
                fatal("optics needs n ≥ 1 and n + m odd".into());
            }
            if o.grid == 0 {
                fatal("optics.grid must be positive".into());
            }
        }
        ExperimentKind::Spectrum => {}
    }
    let tag = |severity| move |message| Diagnostic { severity, message };
    fatals.into_iter().map(tag(Severity::Fatal)).chain(warnings.into_iter().map(tag(Severity::Warning))).collect()
}
