use std::path::{Path, PathBuf};

use sqcav::evolve::{
    evolve_master_with, evolve_schrodinger_with, extract_period, DissipatorSpec, LindbladVariant,
    Trajectory, MASTER_RTOL, SCHRODINGER_RTOL,
};
use sqcav::fock_algebra::{AtomPair, HilbertSpace, QuantumState};
use sqcav::model::{
    effective_general, hamiltonian_eff_equal, hamiltonian_eff_zero_delta, hamiltonian_lab,
    hamiltonian_squeezed, Hamiltonian, ReservoirParams, SystemParams,
};
use sqcav::resonance::{
    effective_coupling, enhancement_factor, scan_avoided_crossing, solve_resonance,
    CouplingRegime, DetuningPolicy,
};
use sqcav::RkOptions;

use crate::config::{
    linspace, Delta2, Kind, PolicyConfig, ReservoirConfig, ScenarioConfig, SweepConfig,
    SweepObservable, VariantConfig,
};
use crate::error::{CliError, Result};
use crate::plot;
use crate::table::{Column, ResultTable};
use crate::units::{us_to_tau, FrequencyUnit};

/// Command-line knobs that override config defaults.
#[derive(Debug, Clone)]
pub struct Overrides {
    pub n_max: Option<usize>,
    pub tolerance: Option<f64>,
    pub jobs: usize,
    pub plot: bool,
}

impl Default for Overrides {
    fn default() -> Self {
        Overrides {
            n_max: None,
            tolerance: None,
            jobs: 1,
            plot: false,
        }
    }
}

pub struct RunOutput {
    pub table: ResultTable,
    pub summary: Vec<String>,
    pub csv_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

/// Dimensionless view of a config: every frequency divided by g1.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: SystemParams,
    pub hs: HilbertSpace,
    pub n_max: usize,
    /// Config-frequency-to-g1 divisor (g1 in MHz for lab configs, else 1).
    pub scale: f64,
}

pub fn atom_pair(label: &str) -> Result<AtomPair> {
    AtomPair::ALL
        .into_iter()
        .find(|p| p.label() == label)
        .ok_or_else(|| CliError::config("initial_state.atoms", format!("unknown label {label}")))
}

fn effective_n_max(cfg: &ScenarioConfig, ov: &Overrides) -> Result<usize> {
    let n_max = ov.n_max.unwrap_or(cfg.n_max());
    if !(1..=crate::config::MAX_N_MAX).contains(&n_max) {
        return Err(CliError::config(
            "--nmax",
            format!("must be in 1..={}", crate::config::MAX_N_MAX),
        ));
    }
    Ok(n_max)
}

/// Builds the dimensionless parameter record, solving the resonance
/// condition when delta_2 is given as "resonant".
pub fn resolve_params(cfg: &ScenarioConfig, n_max: usize) -> Result<Resolved> {
    let s = &cfg.system;
    let scale = match cfg.frequency_unit()? {
        FrequencyUnit::G1 => 1.0,
        FrequencyUnit::MegaHertz => s.g1,
    };
    let build = |delta_2: f64| -> Result<SystemParams> {
        let p = match (s.r_p, s.delta_s, s.delta_c, s.omega_p) {
            (Some(r_p), Some(delta_s), None, None) => SystemParams::from_squeezing(
                s.g1 / scale,
                s.g2 / scale,
                s.delta_1 / scale,
                delta_2,
                r_p,
                delta_s / scale,
                s.theta_p,
            ),
            (None, None, Some(delta_c), Some(omega_p)) => SystemParams::from_pump(
                s.g1 / scale,
                s.g2 / scale,
                s.delta_1 / scale,
                delta_2,
                delta_c / scale,
                omega_p / scale,
                s.theta_p,
            ),
            _ => unreachable!("validated: exactly one squeeze parameterization"),
        }?;
        Ok(p)
    };
    let params = match &s.delta_2 {
        Delta2::Value(v) => build(v / scale)?,
        Delta2::Rule(_) => {
            let seed = build(s.delta_1 / scale)?;
            let solution = solve_resonance(&seed)?;
            build(solution.delta_2)?
        }
    };
    Ok(Resolved {
        params,
        hs: HilbertSpace::new(n_max),
        n_max,
        scale,
    })
}

fn rk_options(base_rtol: f64, ov: &Overrides) -> RkOptions {
    RkOptions {
        rtol: ov.tolerance.unwrap_or(base_rtol),
        ..RkOptions::default()
    }
}

fn base_provenance(cfg: &ScenarioConfig, r: &Resolved, ov: &Overrides, table: &mut ResultTable) {
    table.note("tool", format!("sqcav-cli {}", env!("CARGO_PKG_VERSION")));
    table.note("scenario", &cfg.name);
    table.note("kind", cfg.kind.label());
    table.note("n_max", r.n_max);
    let (base_rtol, engine) = match cfg.kind {
        Kind::UnitaryDynamics | Kind::EffectiveDynamics | Kind::SpectrumScan => {
            (SCHRODINGER_RTOL, "schrodinger")
        }
        Kind::MasterDynamics | Kind::PhysicalUnits => (MASTER_RTOL, "master"),
        Kind::ParameterSweep => {
            if cfg.reservoir.is_some() {
                (MASTER_RTOL, "master")
            } else {
                (SCHRODINGER_RTOL, "schrodinger")
            }
        }
    };
    table.note("integrator", engine);
    table.note("rtol", ov.tolerance.unwrap_or(base_rtol));
    table.note("atol", RkOptions::default().atol);
    if r.scale != 1.0 {
        table.note("g1_mhz", r.scale);
    }
    let p = &r.params;
    table.note("g1", p.g1());
    table.note("g2", p.g2());
    table.note("delta_1", p.delta_1());
    table.note("delta_2", p.delta_2());
    table.note("theta_p", p.theta_p());
    table.note("r_p", p.r_p());
    table.note("delta_s", p.delta_s());
    table.note("delta_c", p.delta_c());
    table.note("omega_p", p.omega_p_amp());
    table.note("alpha", p.alpha());
    if let Some(res) = &cfg.reservoir {
        table.note("reservoir.variant", res.variant.label());
        table.note("reservoir.kappa", res.kappa / r.scale);
        table.note("reservoir.gamma", res.gamma / r.scale);
        table.note("reservoir.n_th", res.n_th);
        if let Some(r_e) = res.r_e {
            table.note("reservoir.r_e", r_e);
        }
        if let Some(theta_e) = res.theta_e {
            table.note("reservoir.theta_e", theta_e);
        }
    }
    if let Some(init) = &cfg.initial_state {
        table.note("initial_state", format!("{},{}", init.atoms, init.photons));
    }
    if let Some(grid) = &cfg.time_grid {
        table.note("time_grid.t_max", grid.t_max);
        table.note("time_grid.n_points", grid.n_points);
    }
    if let Some(sweep) = &cfg.sweep {
        table.note("sweep.parameter", &sweep.parameter);
        table.note("sweep.n_points", sweep.grid().len());
    }
}

fn population_columns() -> Vec<Column> {
    vec![
        Column::new("p_g1g2", "1"),
        Column::new("p_g1e2", "1"),
        Column::new("p_e1g2", "1"),
        Column::new("p_e1e2", "1"),
    ]
}

fn trajectory_rows(traj: &Trajectory, with_photon: bool, norm_name: &str) -> Vec<Vec<f64>> {
    let with_eig = norm_name == "trace";
    traj.points
        .iter()
        .map(|pt| {
            let mut row = vec![pt.t];
            row.extend_from_slice(&pt.populations);
            if with_photon {
                row.push(pt.mean_photon.unwrap_or(f64::NAN));
            }
            row.push(pt.norm_or_trace);
            if with_eig {
                row.push(pt.min_eigenvalue.unwrap_or(f64::NAN));
            }
            row
        })
        .collect()
}

fn dynamics_columns(time_unit: &str, with_photon: bool, norm_name: &str) -> Vec<Column> {
    let mut cols = vec![Column::new("t", time_unit)];
    cols.extend(population_columns());
    if with_photon {
        cols.push(Column::new("mean_photon", "1"));
    }
    cols.push(Column::new(norm_name, "1"));
    if norm_name == "trace" {
        cols.push(Column::new("min_eigenvalue", "1"));
    }
    cols
}

/// Full-space unitary trajectory on the squeezed-frame Hamiltonian.
pub fn unitary_trajectory(
    r: &Resolved,
    atoms: AtomPair,
    photons: usize,
    times: &[f64],
    ov: &Overrides,
) -> Result<Trajectory> {
    let h = Hamiltonian::from_static(hamiltonian_squeezed(&r.params, r.hs));
    let psi0 = QuantumState::basis_ket(r.hs, atoms, photons)?;
    Ok(evolve_schrodinger_with(
        &h,
        &psi0,
        times,
        &rk_options(SCHRODINGER_RTOL, ov),
    )?)
}

/// Atoms-only trajectory on the effective Hamiltonian; the regime is picked
/// from the detunings (zero / equal / general).
pub fn effective_trajectory(
    p: &SystemParams,
    atoms: AtomPair,
    times: &[f64],
    ov: &Overrides,
) -> Result<Trajectory> {
    let h = effective_hamiltonian(p)?;
    let psi0 = QuantumState::atoms_ket(atoms);
    Ok(evolve_schrodinger_with(
        &h,
        &psi0,
        times,
        &rk_options(SCHRODINGER_RTOL, ov),
    )?)
}

pub fn effective_hamiltonian(p: &SystemParams) -> Result<Hamiltonian> {
    if p.delta_1() == 0.0 && p.delta_2() == 0.0 {
        Ok(Hamiltonian::from_static(hamiltonian_eff_zero_delta(p)?))
    } else if p.g1() == p.g2() && p.delta_1() == p.delta_2() {
        Ok(Hamiltonian::from_static(hamiltonian_eff_equal(p)?))
    } else {
        Ok(effective_general(p)?)
    }
}

pub fn effective_regime(p: &SystemParams) -> CouplingRegime {
    if p.delta_1() == 0.0 && p.delta_2() == 0.0 {
        CouplingRegime::ZeroDetuning
    } else if p.g1() == p.g2() && p.delta_1() == p.delta_2() {
        CouplingRegime::Equal
    } else {
        CouplingRegime::General
    }
}

fn map_variant(v: VariantConfig) -> LindbladVariant {
    match v {
        VariantConfig::ThermalLab => LindbladVariant::ThermalLab,
        VariantConfig::SqueezedFrameThermal => LindbladVariant::SqueezedFrameThermal,
        VariantConfig::SqueezedReservoirLab => LindbladVariant::SqueezedReservoirLab,
        VariantConfig::SqueezedFrameSqueezedReservoir => {
            LindbladVariant::SqueezedFrameSqueezedReservoir
        }
        VariantConfig::MatchedLindblad => LindbladVariant::MatchedLindblad,
    }
}

fn build_reservoir(res: &ReservoirConfig, scale: f64) -> Result<ReservoirParams> {
    let r = match (res.r_e, res.theta_e) {
        (Some(r_e), Some(theta_e)) => ReservoirParams::with_drive(
            res.kappa / scale,
            res.gamma / scale,
            res.n_th,
            r_e,
            theta_e,
        ),
        _ => ReservoirParams::thermal(res.kappa / scale, res.gamma / scale, res.n_th),
    }?;
    Ok(r)
}

/// Open-system trajectory. Lab-frame dissipator variants pair with the lab
/// Hamiltonian, squeezed-frame variants with the squeezed-frame one.
pub fn master_trajectory(
    r: &Resolved,
    res_cfg: &ReservoirConfig,
    atoms: AtomPair,
    photons: usize,
    times: &[f64],
    ov: &Overrides,
) -> Result<Trajectory> {
    let variant = map_variant(res_cfg.variant);
    let reservoir = build_reservoir(res_cfg, r.scale)?;
    let spec = DissipatorSpec::new(variant, reservoir, r.params.r_p(), r.params.theta_p())?;
    let h = match variant {
        LindbladVariant::ThermalLab | LindbladVariant::SqueezedReservoirLab => {
            hamiltonian_lab(&r.params, r.hs)
        }
        _ => hamiltonian_squeezed(&r.params, r.hs),
    };
    let rho0 = QuantumState::basis_ket(r.hs, atoms, photons)?;
    Ok(evolve_master_with(
        &h,
        &spec,
        &rho0,
        times,
        &rk_options(MASTER_RTOL, ov),
    )?)
}

fn run_spectrum(cfg: &ScenarioConfig, r: &Resolved) -> Result<(ResultTable, Vec<String>)> {
    let scan_cfg = cfg.scan.as_ref().unwrap();
    let grid = linspace(scan_cfg.min, scan_cfg.max, scan_cfg.n_points);
    let scan = scan_avoided_crossing(&r.params, r.hs, &grid)?;
    let mut table = ResultTable::new(vec![
        Column::new("delta_2", "g1"),
        Column::new("e_eg_branch", "g1"),
        Column::new("e_ge_branch", "g1"),
        Column::new("gap", "g1"),
    ]);
    for (i, &d2) in scan.scan_values.iter().enumerate() {
        let (a, b) = scan.level_pairs[i];
        table.push_row(vec![d2, a, b, (a - b).abs()]);
    }
    let summary = vec![
        format!("min_gap = {}", scan.min_gap),
        format!("min_gap_location = {}", scan.min_gap_location),
    ];
    Ok((table, summary))
}

fn run_unitary_kind(
    cfg: &ScenarioConfig,
    r: &Resolved,
    ov: &Overrides,
) -> Result<(ResultTable, Vec<String>)> {
    let init = cfg.initial_state.as_ref().unwrap();
    let atoms = atom_pair(&init.atoms)?;
    let times = cfg.times();
    let traj = match cfg.kind {
        Kind::EffectiveDynamics => effective_trajectory(&r.params, atoms, &times, ov)?,
        _ => unitary_trajectory(r, atoms, init.photons, &times, ov)?,
    };
    let with_photon = cfg.kind != Kind::EffectiveDynamics;
    let mut table = ResultTable::new(dynamics_columns("1/g1", with_photon, "norm"));
    table.rows = trajectory_rows(&traj, with_photon, "norm");
    Ok((table, Vec::new()))
}

fn run_master_kind(
    cfg: &ScenarioConfig,
    r: &Resolved,
    ov: &Overrides,
) -> Result<(ResultTable, Vec<String>)> {
    let init = cfg.initial_state.as_ref().unwrap();
    let atoms = atom_pair(&init.atoms)?;
    let times = cfg.times();
    let traj = master_trajectory(r, cfg.reservoir.as_ref().unwrap(), atoms, init.photons, &times, ov)?;
    let mut table = ResultTable::new(dynamics_columns("1/g1", true, "trace"));
    table.rows = trajectory_rows(&traj, true, "trace");
    Ok((table, Vec::new()))
}

fn run_physical_units(
    cfg: &ScenarioConfig,
    r: &Resolved,
    ov: &Overrides,
) -> Result<(ResultTable, Vec<String>)> {
    let init = cfg.initial_state.as_ref().unwrap();
    let atoms = atom_pair(&init.atoms)?;
    let times_us = cfg.times();
    let g1_mhz = r.scale;
    let tau: Vec<f64> = times_us.iter().map(|&t| us_to_tau(t, g1_mhz)).collect();
    let traj = master_trajectory(r, cfg.reservoir.as_ref().unwrap(), atoms, init.photons, &tau, ov)?;

    let period = extract_period(&traj, AtomPair::GE)?;
    let period_us = crate::units::tau_to_us(period.period, g1_mhz);
    let p_ge = traj.population_series(AtomPair::GE);
    let first_peak = tau
        .iter()
        .zip(&p_ge)
        .filter(|(t, _)| **t <= period.period)
        .map(|(_, p)| *p)
        .fold(0.0_f64, f64::max);

    let mut table = ResultTable::new(dynamics_columns("us", true, "trace"));
    for (i, pt) in traj.points.iter().enumerate() {
        let mut row = vec![times_us[i]];
        row.extend_from_slice(&pt.populations);
        row.push(pt.mean_photon.unwrap_or(f64::NAN));
        row.push(pt.norm_or_trace);
        row.push(pt.min_eigenvalue.unwrap_or(f64::NAN));
        table.push_row(row);
    }
    let summary = vec![
        format!("period_us = {period_us}"),
        format!("first_period_peak_p_g1e2 = {first_peak}"),
        format!("period_uncertainty_us = {}", crate::units::tau_to_us(period.uncertainty, g1_mhz)),
    ];
    Ok((table, summary))
}

/// Applies one swept value to a copy of the config. Paths were validated.
fn apply_sweep_value(cfg: &ScenarioConfig, path: &str, value: f64) -> ScenarioConfig {
    let mut out = cfg.clone();
    match path {
        "reservoir.r_e" => out.reservoir.as_mut().unwrap().r_e = Some(value),
        "reservoir.theta_e" => out.reservoir.as_mut().unwrap().theta_e = Some(value),
        "system.delta_2" => out.system.delta_2 = Delta2::Value(value),
        "system.r_p" => out.system.r_p = Some(value),
        _ => unreachable!("validated sweep parameter"),
    }
    out
}

fn sweep_column(path: &str) -> Column {
    match path {
        "reservoir.r_e" => Column::new("r_e", "1"),
        "reservoir.theta_e" => Column::new("theta_e", "rad"),
        "system.delta_2" => Column::new("delta_2", "g1"),
        "system.r_p" => Column::new("r_p", "1"),
        _ => unreachable!("validated sweep parameter"),
    }
}

fn run_dynamics_sweep(
    cfg: &ScenarioConfig,
    sweep: &SweepConfig,
    n_max: usize,
    ov: &Overrides,
) -> Result<(ResultTable, Vec<String>)> {
    let values = sweep.grid();
    let init = cfg.initial_state.as_ref().unwrap();
    let atoms = atom_pair(&init.atoms)?;
    let times = cfg.times();
    let is_master = cfg.reservoir.is_some();

    let run_one = |value: f64| -> Result<Trajectory> {
        let point_cfg = apply_sweep_value(cfg, &sweep.parameter, value);
        let pr = resolve_params(&point_cfg, n_max)?;
        if is_master {
            master_trajectory(
                &pr,
                point_cfg.reservoir.as_ref().unwrap(),
                atoms,
                init.photons,
                &times,
                ov,
            )
        } else {
            unitary_trajectory(&pr, atoms, init.photons, &times, ov)
        }
    };

    // Order-stable: indexed parallel map, assembled in grid order by collect.
    let trajs: Vec<Trajectory> = if ov.jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ov.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
        pool.install(|| {
            values
                .par_iter()
                .map(|&v| run_one(v))
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        values
            .iter()
            .map(|&v| run_one(v))
            .collect::<Result<Vec<_>>>()?
    };

    let norm_name = if is_master { "trace" } else { "norm" };
    let mut cols = vec![sweep_column(&sweep.parameter)];
    cols.extend(dynamics_columns("1/g1", true, norm_name));
    let mut table = ResultTable::new(cols);
    for (value, traj) in values.iter().zip(&trajs) {
        for mut row in trajectory_rows(traj, true, norm_name) {
            row.insert(0, *value);
            table.rows.push(row);
        }
    }
    Ok((table, Vec::new()))
}

fn run_resonant_enhancement_sweep(
    cfg: &ScenarioConfig,
    sweep: &SweepConfig,
    n_max: usize,
) -> Result<(ResultTable, Vec<String>)> {
    let (Some(base_r_p), Some(base_delta_s)) = (cfg.system.r_p, cfg.system.delta_s) else {
        return Err(CliError::config(
            "system",
            "resonant_enhancement sweeps use the (r_p, delta_s) parameterization",
        ));
    };
    let ds_at = |r_p: f64| base_delta_s * r_p.cosh() / base_r_p.cosh();

    let point = |r_p: f64| -> Result<(f64, f64, f64)> {
        let mut cfg_v = cfg.clone();
        cfg_v.system.r_p = Some(r_p);
        cfg_v.system.delta_s = Some(ds_at(r_p));
        cfg_v.system.delta_2 = Delta2::Rule("resonant".into());
        let pr = resolve_params(&cfg_v, n_max)?;
        let g_eff = effective_coupling(&pr.params, CouplingRegime::General)?;
        Ok((pr.params.delta_2(), pr.params.delta_s(), g_eff))
    };

    let (_, _, g_eff_base) = point(0.0)?;
    let mut table = ResultTable::new(vec![
        Column::new("r_p", "1"),
        Column::new("delta_2", "g1"),
        Column::new("delta_s", "g1"),
        Column::new("g_eff", "g1"),
        Column::new("enhancement", "1"),
    ]);
    for r_p in sweep.grid() {
        let (d2, ds, g_eff) = point(r_p)?;
        table.push_row(vec![r_p, d2, ds, g_eff, g_eff / g_eff_base]);
    }
    let summary = vec![format!("g_eff_at_r_p_0 = {g_eff_base}")];
    Ok((table, summary))
}

fn run_enhancement_sweep(
    cfg: &ScenarioConfig,
    sweep: &SweepConfig,
    n_max: usize,
) -> Result<(ResultTable, Vec<String>)> {
    let policy = sweep.policy.unwrap();
    let base = resolve_params(cfg, n_max)?.params;
    let mut table = ResultTable::new(vec![
        Column::new("r_p", "1"),
        Column::new("delta_s", "g1"),
        Column::new("enhancement", "1"),
    ]);
    for r_p in sweep.grid() {
        let (delta_s, factor) = match policy {
            PolicyConfig::FixedDeltaC => (
                base.delta_c() / (2.0 * r_p).cosh(),
                enhancement_factor(r_p, DetuningPolicy::FixedDeltaC),
            ),
            PolicyConfig::ScaledDeltaS => (
                base.delta_s() * ((2.0 * r_p).cosh() / (2.0 * base.r_p()).cosh()).sqrt(),
                enhancement_factor(r_p, DetuningPolicy::ScaledDeltaS),
            ),
        };
        table.push_row(vec![r_p, delta_s, factor]);
    }
    Ok((table, Vec::new()))
}

fn run_sweep(
    cfg: &ScenarioConfig,
    r: &Resolved,
    ov: &Overrides,
) -> Result<(ResultTable, Vec<String>)> {
    let sweep = cfg.sweep.as_ref().unwrap();
    match sweep.observable {
        SweepObservable::Dynamics => run_dynamics_sweep(cfg, sweep, r.n_max, ov),
        SweepObservable::ResonantEnhancement => {
            run_resonant_enhancement_sweep(cfg, sweep, r.n_max)
        }
        SweepObservable::Enhancement => run_enhancement_sweep(cfg, sweep, r.n_max),
    }
}

/// Validates, runs, and writes one scenario. Returns the table and the
/// summary lines (also recorded in the CSV provenance block).
pub fn run_scenario(cfg: &ScenarioConfig, ov: &Overrides, out_dir: &Path) -> Result<RunOutput> {
    cfg.validate()?;
    let n_max = effective_n_max(cfg, ov)?;
    let r = resolve_params(cfg, n_max)?;

    let (mut table, summary) = match cfg.kind {
        Kind::SpectrumScan => run_spectrum(cfg, &r)?,
        Kind::UnitaryDynamics | Kind::EffectiveDynamics => run_unitary_kind(cfg, &r, ov)?,
        Kind::MasterDynamics => run_master_kind(cfg, &r, ov)?,
        Kind::PhysicalUnits => run_physical_units(cfg, &r, ov)?,
        Kind::ParameterSweep => run_sweep(cfg, &r, ov)?,
    };

    let mut provenance = Vec::new();
    std::mem::swap(&mut provenance, &mut table.provenance);
    base_provenance(cfg, &r, ov, &mut table);
    table.provenance.extend(provenance);
    table.provenance.extend(summary.iter().cloned());

    let csv_path = out_dir.join(&cfg.outputs.csv);
    table.write(&csv_path)?;

    let mut plot_path = None;
    if ov.plot {
        if let Some(name) = &cfg.outputs.plot {
            let svg = plot::render(cfg, &table)?;
            let path = out_dir.join(name);
            std::fs::write(&path, svg)
                .map_err(|e| CliError::io(path.display().to_string(), e))?;
            plot_path = Some(path);
        }
    }

    Ok(RunOutput {
        table,
        summary,
        csv_path,
        plot_path,
    })
}
