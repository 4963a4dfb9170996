//! One function per experiment kind. Each returns the files to emit and a
//! JSON summary recorded in the manifest.

use oam_lattice::chern::{
    auto_partition, band_structure, chern_numbers, phase_mismatch_chern, MagneticBZGrid,
};
use oam_lattice::disorder::{displacement_robustness, MonteCarloOptions};
use oam_lattice::edge::{displacement_spectrum, transmission_map, DisplacementOptions, EdgeRegion};
use oam_lattice::flux::farey;
use oam_lattice::optics::{dispersion_check, OpticalParams};
use oam_lattice::qsh::{polarized_edge_maps, qsh_gap_scan, transition_detector};
use oam_lattice::scattering::{butterfly_scan, column_inputs, total_transmission_spectrum, DecaySpec, DIRECT_SOLVE_LIMIT};
use oam_lattice::{Error, LatticeSpec, SiteIndex};
use serde_json::{json, Value};

use crate::config::{Config, ExperimentKind};
use crate::output::{fmt_f64, grid_bytes, Outputs, Table};

pub type NumResult<T> = std::result::Result<T, Error>;

pub struct RunOutput {
    pub files: Outputs,
    pub results: Value,
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn spec(cfg: &Config) -> NumResult<LatticeSpec> {
    cfg.lattice.spec(cfg.model.spin_dim())
}

fn probe_l(spec: &LatticeSpec) -> i64 {
    if spec.l_min <= 0 && spec.l_max >= 0 {
        0
    } else {
        spec.l_min
    }
}

fn table(t: Table) -> anyhow::Result<Vec<u8>> {
    t.to_bytes()
}

pub fn run(kind: ExperimentKind, cfg: &Config) -> anyhow::Result<RunOutput> {
    match kind {
        ExperimentKind::Spectrum => spectrum(cfg),
        ExperimentKind::Butterfly => butterfly(cfg),
        ExperimentKind::EdgeMap => edge_map(cfg),
        ExperimentKind::Displacement | ExperimentKind::Disorder => displacement(cfg),
        ExperimentKind::Chern => chern(cfg),
        ExperimentKind::Bands => bands(cfg),
        ExperimentKind::Qsh => qsh(cfg),
        ExperimentKind::DispersionCheck => dispersion(cfg),
    }
}

fn spectrum(cfg: &Config) -> anyhow::Result<RunOutput> {
    let spec = spec(cfg)?;
    let h = cfg.model.model()?.build(&spec)?;
    let grid = cfg.omega.grid();
    let inputs = column_inputs(&spec, probe_l(&spec));
    let t = total_transmission_spectrum(&h, &DecaySpec::Uniform(cfg.gamma), &inputs, &grid)?;
    let mut files = Outputs::default();
    let mut tab = Table::new(&["omega", "transmission"]);
    for (w, v) in &t {
        tab.push(vec![f(*w), f(*v)]);
    }
    files.add("transmission.csv", table(tab)?);
    let mut results = json!({ "dim": spec.dim(), "points": grid.len() });
    if spec.dim() <= DIRECT_SOLVE_LIMIT {
        let e = h.eigenvalues()?;
        let mut tab = Table::new(&["index", "energy"]);
        for (i, v) in e.iter().enumerate() {
            tab.push(vec![i.to_string(), f(*v)]);
        }
        files.add("eigenvalues.csv", table(tab)?);
        results["energy_min"] = json!(e.first());
        results["energy_max"] = json!(e.last());
    }
    Ok(RunOutput { files, results })
}

fn butterfly(cfg: &Config) -> anyhow::Result<RunOutput> {
    let spec = cfg.lattice.spec(1)?;
    let phis = farey(cfg.butterfly.q_max);
    let grid = cfg.omega.grid();
    let b = butterfly_scan(&spec, &phis, &grid, &DecaySpec::Uniform(cfg.gamma))?;
    let mut files = Outputs::default();
    files.add("butterfly.grid", grid_bytes(&b.values, 0, 0));
    let mut rows = Table::new(&["row", "p", "q", "phi0"]);
    for (i, phi) in b.phi0.iter().enumerate() {
        let (p, q) = phi.pq().expect("rational");
        rows.push(vec![i.to_string(), p.to_string(), q.to_string(), f(phi.to_f64())]);
    }
    files.add("butterfly_phi0.csv", table(rows)?);
    let mut cols = Table::new(&["col", "omega"]);
    for (i, w) in b.omega.iter().enumerate() {
        cols.push(vec![i.to_string(), f(*w)]);
    }
    files.add("butterfly_omega.csv", table(cols)?);
    Ok(RunOutput { files, results: json!({ "fluxes": phis.len(), "points": grid.len() }) })
}

fn edge_map(cfg: &Config) -> anyhow::Result<RunOutput> {
    let spec = spec(cfg)?;
    let h = cfg.model.model()?.build(&spec)?;
    let m = &cfg.map;
    let input = SiteIndex::new(m.j, m.l, m.s);
    let map = transmission_map(&h, &DecaySpec::Uniform(cfg.gamma), m.omega, &input)?;
    let mut files = Outputs::default();
    files.add("edge_map.grid", grid_bytes(&map.jl_grid(), spec.l_min, 0));
    let mut tab = Table::new(&["j", "l", "s", "weight"]);
    for (idx, w) in map.weights.iter().enumerate() {
        let s = spec.site_of(idx)?;
        tab.push(vec![s.j.to_string(), s.l.to_string(), s.s.to_string(), f(*w)]);
    }
    files.add("edge_map.csv", table(tab)?);
    let lv = spec.l_values();
    let disp: f64 = map.weights.iter().zip(&lv).map(|(w, l)| w * (*l - m.l) as f64).sum();
    let results = json!({
        "total": map.total(),
        "edge_weight_depth2": map.edge_weight(2),
        "displacement": disp,
    });
    Ok(RunOutput { files, results })
}

fn displacement(cfg: &Config) -> anyhow::Result<RunOutput> {
    let spec = spec(cfg)?;
    let model = cfg.model.model()?;
    let grid = cfg.omega.grid();
    let region = EdgeRegion::new(cfg.edge.side, cfg.edge.depth);
    let (mean, std, trials) = match &cfg.disorder {
        Some(d) => {
            let opts = MonteCarloOptions { trials: d.trials, seed: cfg.seed, input_ls: d.input_ls.clone() };
            let s = displacement_robustness(&model, &spec, &d.model(), cfg.gamma, &grid, &region, &opts)?;
            (s.mean, s.std, d.trials)
        }
        None => {
            let h = model.build(&spec)?;
            let opts = DisplacementOptions { input_l: cfg.edge.input_l, ..Default::default() };
            let d = displacement_spectrum(&h, &DecaySpec::Uniform(cfg.gamma), &grid, &region, &opts)?;
            (d.iter().map(|p| p.1).collect(), vec![0.0; grid.len()], 1)
        }
    };
    let mut tab = Table::new(&["omega", "l_e_mean", "l_e_std"]);
    for i in 0..grid.len() {
        tab.push(vec![f(grid[i]), f(mean[i]), f(std[i])]);
    }
    let mut files = Outputs::default();
    files.add("displacement.csv", table(tab)?);
    Ok(RunOutput { files, results: json!({ "trials": trials, "points": grid.len() }) })
}

fn magnetic_grid(cfg: &Config) -> anyhow::Result<MagneticBZGrid> {
    let flux = cfg.model.flux().ok_or_else(|| Error::InvalidParameter("model has no flux".into()))??;
    let (p, q) = flux.pq().ok_or_else(|| Error::InvalidParameter("flux must be rational".into()))?;
    Ok(MagneticBZGrid::new(p, q, cfg.chern.nkx, cfg.chern.nky)?)
}

fn chern(cfg: &Config) -> anyhow::Result<RunOutput> {
    let grid = magnetic_grid(cfg)?;
    let data = band_structure::<f64>(&grid)?;
    let groups = chern_numbers(&data, cfg.chern.touch_tol)?;
    let mut tab = Table::new(&["band_first", "band_last", "chern_fhs", "chern_phase_mismatch"]);
    let mut bands = Vec::new();
    for (range, c) in &groups {
        // Bands are numbered from 1 in the outputs.
        let pm = if range.len() == 1 {
            auto_partition(&data, range.start).and_then(|part| phase_mismatch_chern(&data, range.start, &part)).ok()
        } else {
            None
        };
        tab.push(vec![
            (range.start + 1).to_string(),
            range.end.to_string(),
            c.to_string(),
            pm.map_or(String::new(), |v| v.to_string()),
        ]);
        bands.push(json!({ "first": range.start + 1, "last": range.end, "chern": c, "chern_phase_mismatch": pm }));
    }
    let sum: i64 = groups.iter().map(|g| g.1).sum();
    let mut files = Outputs::default();
    files.add("chern.csv", table(tab)?);
    Ok(RunOutput { files, results: json!({ "p": grid.p, "q": grid.q, "bands": bands, "chern_sum": sum }) })
}

fn bands(cfg: &Config) -> anyhow::Result<RunOutput> {
    let grid = magnetic_grid(cfg)?;
    let data = band_structure::<f64>(&grid)?;
    let mut tab = Table::new(&["ix", "iy", "kx", "ky", "band", "energy"]);
    for ix in 0..grid.nkx {
        for iy in 0..grid.nky {
            for m in 0..data.n_bands {
                tab.push(vec![
                    ix.to_string(),
                    iy.to_string(),
                    f(grid.kx::<f64>(ix)),
                    f(grid.ky::<f64>(iy)),
                    (m + 1).to_string(),
                    f(data.energy(m, ix, iy)),
                ]);
            }
        }
    }
    let ranges: Vec<Value> = (0..data.n_bands).map(|m| json!(data.band_range(m))).collect();
    let mut files = Outputs::default();
    files.add("bands.csv", table(tab)?);
    Ok(RunOutput { files, results: json!({ "band_ranges": ranges }) })
}

fn qsh(cfg: &Config) -> anyhow::Result<RunOutput> {
    let q = &cfg.qsh;
    let reports = qsh_gap_scan(q.lambda0, &q.beta0, q.target, q.nk)?;
    let mut tab = Table::new(&["beta0", "bands_below", "e_low", "e_high", "width"]);
    for r in &reports {
        tab.push(vec![f(r.beta0), r.bands_below.to_string(), f(r.e_low), f(r.e_high), f(r.width)]);
    }
    let mut files = Outputs::default();
    files.add("qsh_gaps.csv", table(tab)?);
    let transition = match transition_detector(q.lambda0, &q.beta0, q.target, q.nk) {
        Ok(t) => json!({ "beta_c": t.beta_c, "uncertainty": t.uncertainty }),
        Err(Error::NoTransition) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let spec = cfg.lattice.spec(2)?;
    let mut maps = Vec::new();
    let mut summary = Table::new(&["beta0", "input_s", "displacement", "edge_weight", "total"]);
    for (i, &beta0) in q.map_beta0.iter().enumerate() {
        let model = oam_lattice::hamiltonian::Model::Qsh { beta0, lambda0: q.lambda0 };
        let out = polarized_edge_maps(&spec, &model, &DecaySpec::Uniform(cfg.gamma), q.target)?;
        for s in 0..2 {
            files.add(&format!("qsh_map_{i}_s{s}.grid"), grid_bytes(&out.maps[s].jl_grid(), spec.l_min, 0));
            summary.push(vec![f(beta0), s.to_string(), f(out.displacement[s]), f(out.edge_weight[s]), f(out.maps[s].total())]);
        }
        maps.push(json!({ "beta0": beta0, "displacement": out.displacement, "edge_weight": out.edge_weight }));
    }
    if !q.map_beta0.is_empty() {
        files.add("qsh_maps.csv", table(summary)?);
    }
    Ok(RunOutput { files, results: json!({ "transition": transition, "maps": maps }) })
}

fn dispersion(cfg: &Config) -> anyhow::Result<RunOutput> {
    let o = &cfg.optics;
    let mut tab = Table::new(&["r", "kappa", "kappa_fit", "max_relative_error"]);
    let mut samples = Table::new(&["r", "kx", "ky", "detuning", "tight_binding"]);
    let mut results = Vec::new();
    for &r in &o.r {
        let params = OpticalParams::resonant(r, o.s_c, o.n, o.m)?.with_phases(o.phi_x, o.phi_y);
        let c = dispersion_check(&params, o.grid)?;
        tab.push(vec![f(r), f(c.kappa), f(c.kappa_fit), f(c.max_relative_error)]);
        for &(kx, ky, d) in &c.samples {
            let band = oam_lattice::optics::tight_binding_band(&params, kx, ky);
            samples.push(vec![f(r), f(kx), f(ky), f(d), f(band)]);
        }
        results.push(json!({ "r": r, "kappa": c.kappa, "max_relative_error": c.max_relative_error, "passes": c.max_relative_error < r * r }));
    }
    let mut files = Outputs::default();
    files.add("dispersion.csv", table(tab)?);
    files.add("dispersion_samples.csv", table(samples)?);
    Ok(RunOutput { files, results: json!({ "checks": results }) })
}
