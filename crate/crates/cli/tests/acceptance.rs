// Acceptance gate for the workspace. One test per criterion; each prints a
// single "criterion N (...): PASS/FAIL; ..." line (visible under
// `--nocapture`) and then asserts, so a red criterion fails its own test
// without silencing the others.
//
// The tests share cached trajectories through a process-wide map, so the
// suite is meant to run in one process, single-threaded (the default on a
// one-CPU box; pass `--test-threads=1` elsewhere). Full runtime is dominated
// by the open-system truncation sweeps and is around half an hour.
//
// Values named FROZEN_* are self-regression pins: captured from the first
// verified run on this machine and asserted tightly ever since. They guard
// against silent numerical drift, not against first-principles error; the
// looser physical bounds next to them carry the actual meaning.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use ndarray as nd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqcav::evolve::{
    evolve_master_with, extract_period, lindblad_rhs, DissipatorSpec, LindbladVariant, Trajectory,
    MASTER_RTOL,
};
use sqcav::fock_algebra::{AtomPair, HilbertSpace, QuantumState};
use sqcav::model::{
    derive_squeezing, hamiltonian_lab, hamiltonian_squeezed, large_detuning_margin,
    large_detuning_ok, noise_coefficients, ReservoirParams, SystemParams,
};
use sqcav::resonance::{
    effective_coupling, enhancement_factor, scan_avoided_crossing, solve_resonance,
    CouplingRegime, DetuningPolicy,
};
use sqcav::{C64, RkOptions};

use sqcav_cli::config::{linspace, Kind};
use sqcav_cli::figures;
use sqcav_cli::run::{
    atom_pair, effective_regime, effective_trajectory, master_trajectory, resolve_params,
    run_scenario, unitary_trajectory, Overrides,
};
use sqcav_cli::units::us_to_tau;

const FROZEN_SUPPRESSION_RATIO: f64 = 0.41649743914861764;
const FROZEN_SUPPRESSED_PEAK: f64 = 0.3718917053836325;
const FROZEN_MATCHED_PEAK: f64 = 0.8929027418363823;
const FROZEN_RESILIENCE_FIRST_PEAK: f64 = 0.462899422623061;
const FROZEN_PHYSICAL_PERIOD_US: f64 = 2.128019214445955;
const FROZEN_PHYSICAL_FIRST_PEAK: f64 = 0.8708738764008074;
const FROZEN_TOL: f64 = 1e-9;

fn verdict(criterion: &str, ok: bool, details: String) {
    let flag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {flag}; {details}");
    assert!(ok, "criterion {criterion}: {flag}; {details}");
}

/// Reference parameter set used across several criteria: g2 = 1.5 g1,
/// delta_1 = 200, r_p = 2, delta_s = 10 cosh(2).
fn reference_params(delta_2: f64) -> SystemParams {
    SystemParams::from_squeezing(1.0, 1.5, 200.0, delta_2, 2.0, 10.0 * 2.0f64.cosh(), 0.0)
        .expect("reference params")
}

fn traj_cache() -> &'static Mutex<HashMap<(String, usize), Arc<Trajectory>>> {
    static CACHE: OnceLock<Mutex<HashMap<(String, usize), Arc<Trajectory>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Exact trajectory of a bundled dynamics scenario at the given truncation,
/// computed once per (id, n_max) and shared between criteria.
fn bundled_run(id: &str, n_max: usize) -> Arc<Trajectory> {
    let key = (id.to_string(), n_max);
    if let Some(t) = traj_cache().lock().unwrap().get(&key) {
        return t.clone();
    }
    let cfg = figures::bundled(id).expect("bundled config");
    let r = resolve_params(&cfg, n_max).expect("resolve params");
    let init = cfg.initial_state.clone().expect("initial state");
    let atoms = atom_pair(&init.atoms).expect("atom pair");
    let mut times = cfg.times();
    if cfg.kind == Kind::PhysicalUnits {
        times = times.iter().map(|&t| us_to_tau(t, r.scale)).collect();
    }
    let ov = Overrides::default();
    let traj = match cfg.kind {
        Kind::UnitaryDynamics => unitary_trajectory(&r, atoms, init.photons, &times, &ov),
        Kind::MasterDynamics | Kind::PhysicalUnits => master_trajectory(
            &r,
            cfg.reservoir.as_ref().expect("reservoir"),
            atoms,
            init.photons,
            &times,
            &ov,
        ),
        other => panic!("{id}: no exact run for {other:?}"),
    }
    .unwrap_or_else(|e| panic!("{id} at n_max={n_max}: {e}"));
    let arc = Arc::new(traj);
    traj_cache().lock().unwrap().insert(key, arc.clone());
    arc
}

fn max_series(traj: &Trajectory, pair: AtomPair, t_limit: f64) -> f64 {
    traj.points
        .iter()
        .filter(|pt| pt.t <= t_limit)
        .map(|pt| pt.populations[pair.block()])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Local maxima of `p` whose prominence (drop to the higher of the two
/// valley floors bounded by the nearest higher samples) reaches `min_prom`.
fn prominent_maxima(p: &[f64], min_prom: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for k in 1..p.len().saturating_sub(1) {
        if p[k] < p[k - 1] || p[k] < p[k + 1] {
            continue;
        }
        let mut left_min = p[k];
        let mut j = k;
        while j > 0 {
            j -= 1;
            if p[j] > p[k] {
                break;
            }
            left_min = left_min.min(p[j]);
        }
        let mut right_min = p[k];
        let mut j = k;
        while j + 1 < p.len() {
            j += 1;
            if p[j] > p[k] {
                break;
            }
            right_min = right_min.min(p[j]);
        }
        if p[k] - left_min.max(right_min) >= min_prom {
            out.push((k, p[k]));
        }
    }
    out
}

#[test]
fn criterion_01_resonance_condition() {
    let start = Instant::now();
    let sol = solve_resonance(&reference_params(200.0)).expect("resonance solve");
    let dt = start.elapsed().as_secs_f64();
    let in_band = (199.81..=199.83).contains(&sol.delta_2);
    verdict(
        "1 (resonance condition)",
        in_band && dt < 1.0,
        format!(
            "delta_2 = {:.12} (band [199.81, 199.83]), residual = {:.2e}, runtime {:.3} s (limit 1 s)",
            sol.delta_2, sol.residual, dt
        ),
    );
}

#[test]
fn criterion_02_avoided_crossing() {
    let cfg = figures::bundled("fig2a").expect("fig2a");
    let r = resolve_params(&cfg, 10).expect("resolve");
    let scan_cfg = cfg.scan.expect("scan block");
    let grid = linspace(scan_cfg.min, scan_cfg.max, scan_cfg.n_points);

    let start = Instant::now();
    let scan = scan_avoided_crossing(&r.params, r.hs, &grid).expect("crossing scan");
    let dt = start.elapsed().as_secs_f64();

    let sol = solve_resonance(&r.params).expect("resonance solve");
    let g_eff = effective_coupling(
        &r.params.with_delta_2(scan.min_gap_location),
        CouplingRegime::General,
    )
    .expect("effective coupling");

    let gap_dev = (scan.min_gap / 0.096 - 1.0).abs();
    let loc_dev = (scan.min_gap_location - sol.delta_2).abs();
    let twice_dev = (scan.min_gap / (2.0 * g_eff.abs()) - 1.0).abs();
    let ok = gap_dev <= 0.05 && loc_dev <= 0.01 && twice_dev <= 0.05 && dt < 30.0;
    verdict(
        "2 (avoided crossing)",
        ok,
        format!(
            "min_gap = {:.6} (0.096 within {:.2}%), location = {:.6} ({:.2e} from solver), \
             gap / (2 g_eff) = {:.4}, runtime {:.1} s (limit 30 s)",
            scan.min_gap,
            100.0 * gap_dev,
            scan.min_gap_location,
            loc_dev,
            scan.min_gap / (2.0 * g_eff.abs()),
            dt
        ),
    );
}

#[test]
fn criterion_03_effective_vs_exact() {
    let ids = [
        "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c",
        "fig4d",
    ];
    let start = Instant::now();
    let mut breaches = Vec::new();
    let mut worst_pass: f64 = 0.0;
    for id in ids {
        let cfg = figures::bundled(id).expect("bundled config");
        let r = resolve_params(&cfg, 10).expect("resolve");
        let init = cfg.initial_state.clone().expect("initial state");
        let atoms = atom_pair(&init.atoms).expect("atom pair");
        let times = cfg.times();
        let exact = bundled_run(id, 10);
        let eff = effective_trajectory(&r.params, atoms, &times, &Overrides::default())
            .expect("effective run");
        let g_eff = effective_coupling(&r.params, effective_regime(&r.params))
            .expect("effective coupling");
        let window = 2.0 * PI / g_eff.abs();

        let mut max_dev: f64 = 0.0;
        for (pe, pf) in exact.points.iter().zip(eff.points.iter()) {
            if pe.t > window {
                break;
            }
            for k in 0..4 {
                max_dev = max_dev.max((pe.populations[k] - pf.populations[k]).abs());
            }
        }
        if max_dev > 0.05 {
            let regime = if large_detuning_ok(&r.params) {
                "detuning check passes"
            } else {
                "detuning check already flags this point"
            };
            breaches.push(format!(
                "{id} max|dP| = {:.4} ({regime}, margin {:.2})",
                max_dev,
                large_detuning_margin(&r.params)
            ));
        } else {
            worst_pass = worst_pass.max(max_dev);
        }
    }
    let dt = start.elapsed().as_secs_f64();
    let ok = breaches.is_empty() && dt < 120.0;
    let summary = if breaches.is_empty() {
        format!(
            "all 11 configs within 0.05 over two exchange periods (worst {:.4}), runtime {:.1} s",
            worst_pass, dt
        )
    } else {
        format!(
            "{}/11 configs within 0.05 (worst passing {:.4}); breaches: {}; runtime {:.1} s (limit 120 s)",
            ids.len() - breaches.len(),
            worst_pass,
            breaches.join(", "),
            dt
        )
    };
    verdict("3 (effective vs exact dynamics)", ok, summary);
}

#[test]
fn criterion_04_period_scaling() {
    // Halving claim: the r_p = 2 run of the unequal-coupling resonance
    // family has close to half the period of its r_p = 1 counterpart.
    let slow = extract_period(&bundled_run("fig3a", 10), AtomPair::GE).expect("fig3a period");
    let fast = extract_period(&bundled_run("fig3c", 10), AtomPair::GE).expect("fig3c period");
    let ratio = fast.period / slow.period;

    // Scaling claim: T(r_p) * |g_eff(r_p)| is constant across r_p = 1, 2, 3.
    let mut consts = Vec::new();
    for id in ["fig2b", "fig2c", "fig2d"] {
        let cfg = figures::bundled(id).expect("bundled config");
        let r = resolve_params(&cfg, 10).expect("resolve");
        let est = extract_period(&bundled_run(id, 10), AtomPair::GE).expect("period");
        let g_eff = effective_coupling(&r.params, effective_regime(&r.params)).expect("coupling");
        consts.push(est.period * g_eff.abs());
    }
    let dev2 = (consts[1] / consts[0] - 1.0).abs();
    let dev3 = (consts[2] / consts[0] - 1.0).abs();

    let ok = (0.45..=0.55).contains(&ratio) && dev2 <= 0.05 && dev3 <= 0.05;
    verdict(
        "4 (period scaling)",
        ok,
        format!(
            "period ratio r_p 2 vs 1 = {:.4} (band [0.45, 0.55]); T |g_eff| constants \
             {:.4}/{:.4}/{:.4} for r_p = 1/2/3, drifts {:.2}% and {:.2}% (limit 5%)",
            ratio,
            consts[0],
            consts[1],
            consts[2],
            100.0 * dev2,
            100.0 * dev3
        ),
    );
}

#[test]
fn criterion_05_enhancement_values() {
    let enh = enhancement_factor(3.0, DetuningPolicy::FixedDeltaC);
    let omega = 1500.0 * 4.4f64.tanh();
    let (_, r_p, delta_s) = derive_squeezing(1500.0, omega).expect("derive squeezing");
    let ok = enh > 100.0 && (r_p - 2.2).abs() <= 1e-9 && (delta_s - 36.8).abs() <= 0.1;
    verdict(
        "5 (enhancement values)",
        ok,
        format!(
            "fixed-detuning enhancement at r_p = 3 is {:.1} (> 100); pump inversion gives \
             r_p = {:.6}, delta_s = {:.4} (36.8 within 0.1)",
            enh, r_p, delta_s
        ),
    );
}

#[test]
fn criterion_06_noise_coefficient_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let draws: Vec<(f64, f64, f64)> = (0..20)
        .map(|_| {
            (
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..10.0),
                rng.gen_range(-PI..PI),
            )
        })
        .collect();

    // Matched drive: the squeezed-frame coefficients collapse to a plain
    // thermal pair (n_th, 0).
    let mut worst_matched_n: f64 = 0.0;
    let mut worst_matched_m: f64 = 0.0;
    for &(r_p, n_th, theta_p) in &draws {
        let res = ReservoirParams::with_drive(1e-3, 1e-3, n_th, r_p, PI - theta_p)
            .expect("matched reservoir");
        let nc = noise_coefficients(&res, r_p, theta_p).expect("coefficients");
        worst_matched_n = worst_matched_n.max((nc.n_s - n_th).abs());
        worst_matched_m = worst_matched_m.max(nc.m_s.norm());
    }

    // Undriven reservoir: the general squeezed-frame pair must reduce to the
    // squeezed-frame thermal closed forms.
    let mut worst_reduction: f64 = 0.0;
    for &(r_p, n_th, theta_p) in &draws {
        let res = ReservoirParams::thermal(1e-3, 1e-3, n_th).expect("thermal reservoir");
        let nc = noise_coefficients(&res, r_p, theta_p).expect("coefficients");
        let n_ref = r_p.sinh().powi(2);
        let m_ref = C64::from_polar(r_p.cosh() * r_p.sinh(), -theta_p);
        let n_dev = (nc.n_s - ((2.0 * n_ref + 1.0) * n_th + n_ref)).abs();
        let m_dev = (nc.m_s - m_ref * (2.0 * n_th + 1.0)).norm();
        worst_reduction = worst_reduction.max(n_dev).max(m_dev);
    }

    // Generator identity: the general squeezed-frame dissipator and its
    // matched thermal abbreviation act identically on a full matrix-unit
    // basis of a small truncated space.
    let p = reference_params(199.822);
    let hs = HilbertSpace::new(3);
    let h = hamiltonian_squeezed(&p, hs);
    let res = ReservoirParams::with_drive(1e-3, 1e-3, 5.0, 2.0, PI).expect("matched reservoir");
    let general = DissipatorSpec::new(
        LindbladVariant::SqueezedFrameSqueezedReservoir,
        res.clone(),
        2.0,
        0.0,
    )
    .expect("general spec");
    let matched =
        DissipatorSpec::new(LindbladVariant::MatchedLindblad, res, 2.0, 0.0).expect("matched spec");
    let dim = hs.dim();
    let mut worst_generator: f64 = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            let mut rho = nd::Array2::<C64>::zeros((dim, dim));
            rho[(j, k)] = C64::new(1.0, 0.0);
            let dg = lindblad_rhs(&h, &general, &rho).expect("general rhs");
            let dm = lindblad_rhs(&h, &matched, &rho).expect("matched rhs");
            let dev = dg
                .iter()
                .zip(dm.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            worst_generator = worst_generator.max(dev);
        }
    }

    let ok = worst_matched_n <= 1e-12
        && worst_matched_m <= 1e-12
        && worst_reduction <= 1e-12
        && worst_generator <= 1e-12;
    verdict(
        "6 (noise-coefficient identities)",
        ok,
        format!(
            "20 matched draws: |N_s - n_th| <= {:.2e}, |M_s| <= {:.2e}; undriven reduction \
             <= {:.2e}; generator identity on {} matrix units <= {:.2e} (all limits 1e-12)",
            worst_matched_n,
            worst_matched_m,
            worst_reduction,
            dim * dim,
            worst_generator
        ),
    );
}

#[test]
fn criterion_07_noise_suppression() {
    let start = Instant::now();
    let cfg_a = figures::bundled("fig6a").expect("fig6a");
    let cfg_b = figures::bundled("fig6b").expect("fig6b");
    let times = linspace(0.0, 70.0, 351);
    let ov = Overrides::default();
    let ra = resolve_params(&cfg_a, 10).expect("resolve fig6a");
    let rb = resolve_params(&cfg_b, 10).expect("resolve fig6b");
    let suppressed = master_trajectory(
        &ra,
        cfg_a.reservoir.as_ref().expect("reservoir"),
        AtomPair::EG,
        0,
        &times,
        &ov,
    )
    .expect("suppressed run");
    let matched = master_trajectory(
        &rb,
        cfg_b.reservoir.as_ref().expect("reservoir"),
        AtomPair::EG,
        0,
        &times,
        &ov,
    )
    .expect("matched run");

    let g_eff = effective_coupling(&ra.params, CouplingRegime::General).expect("coupling");
    let period = PI / g_eff.abs();
    let peak_suppressed = max_series(&suppressed, AtomPair::GE, period);
    let peak_matched = max_series(&matched, AtomPair::GE, period);
    let ratio = peak_suppressed / peak_matched;
    let dt = start.elapsed().as_secs_f64();

    let ok = ratio < 0.5
        && (ratio - FROZEN_SUPPRESSION_RATIO).abs() <= FROZEN_TOL
        && (peak_suppressed - FROZEN_SUPPRESSED_PEAK).abs() <= FROZEN_TOL
        && (peak_matched - FROZEN_MATCHED_PEAK).abs() <= FROZEN_TOL
        && dt < 300.0;
    verdict(
        "7 (noise suppression and restoration)",
        ok,
        format!(
            "first-period peaks: bare squeezed-frame bath {:.6}, matched bath {:.6}, \
             ratio {:.6} (< 0.5, pinned {:.6}), runtime {:.0} s (limit 300 s)",
            peak_suppressed, peak_matched, ratio, FROZEN_SUPPRESSION_RATIO, dt
        ),
    );
}

#[test]
fn criterion_08_matched_sweep_structure() {
    let start = Instant::now();
    let p = reference_params(199.822);
    let hs = HilbertSpace::new(10);
    let h = hamiltonian_squeezed(&p, hs);
    let rho0 = QuantumState::basis_ket(hs, AtomPair::EG, 0).expect("initial state");
    let times = linspace(0.0, 70.0, 351);
    let opts = RkOptions {
        rtol: MASTER_RTOL,
        ..RkOptions::default()
    };
    let amplitude = |r_e: f64, theta_e: f64| -> f64 {
        let res =
            ReservoirParams::with_drive(1e-3, 1e-3, 5.0, r_e, theta_e).expect("reservoir");
        let spec = DissipatorSpec::new(
            LindbladVariant::SqueezedFrameSqueezedReservoir,
            res,
            p.r_p(),
            p.theta_p(),
        )
        .expect("spec");
        let traj = evolve_master_with(&h, &spec, &rho0, &times, &opts).expect("master run");
        max_series(&traj, AtomPair::GE, f64::INFINITY)
    };

    // Drive-strength scan across r_e / r_p in [0, 2] with step 0.25.
    let mut amps = Vec::new();
    for i in 0..=8 {
        let r_e = 0.5 * i as f64;
        amps.push((r_e, amplitude(r_e, PI)));
    }
    let (best_r_e, best_amp) = amps
        .iter()
        .cloned()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, cur| {
            if cur.1 > acc.1 {
                cur
            } else {
                acc
            }
        });
    let ratio = best_r_e / p.r_p();

    // Phase scan: equivalent matched phases must give identical dynamics.
    let phases = [-3.0 * PI, -PI, PI, 3.0 * PI];
    let phase_amps: Vec<f64> = phases.iter().map(|&th| amplitude(2.0, th)).collect();
    let mut phase_spread: f64 = 0.0;
    for a in &phase_amps {
        for b in &phase_amps {
            phase_spread = phase_spread.max((a - b).abs());
        }
    }
    let dt = start.elapsed().as_secs_f64();

    let ok = (ratio - 1.0).abs() <= 0.25 + 1e-12 && phase_spread <= 1e-6;
    verdict(
        "8 (matched-sweep structure)",
        ok,
        format!(
            "amplitude peaks at r_e / r_p = {:.2} (grid step 0.25) with P = {:.4}; \
             phase quadruple spread = {:.2e} (limit 1e-6); runtime {:.0} s",
            ratio, best_amp, phase_spread, dt
        ),
    );
}

#[test]
fn criterion_09_dissipation_resilience() {
    let traj = bundled_run("fig7b", 10);
    let series: Vec<f64> = traj
        .points
        .iter()
        .map(|pt| pt.populations[AtomPair::GE.block()])
        .collect();
    let maxima = prominent_maxima(&series, 0.01);
    let first_peak = maxima.first().map(|&(_, v)| v).unwrap_or(0.0);
    let ok = maxima.len() >= 3
        && first_peak >= 0.3
        && (first_peak - FROZEN_RESILIENCE_FIRST_PEAK).abs() <= FROZEN_TOL;
    verdict(
        "9 (dissipation resilience)",
        ok,
        format!(
            "{} prominent exchange maxima (need >= 3), first peak {:.6} (>= 0.3, pinned {:.6})",
            maxima.len(),
            first_peak,
            FROZEN_RESILIENCE_FIRST_PEAK
        ),
    );
}

#[test]
fn criterion_10_physical_units() {
    let cfg = figures::bundled("physical_units").expect("config");
    let dir = tempfile::tempdir().expect("tempdir");
    let out = run_scenario(&cfg, &Overrides::default(), dir.path()).expect("scenario run");

    let grab = |key: &str| -> f64 {
        out.summary
            .iter()
            .find_map(|line| line.strip_prefix(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("summary line {key} missing"))
            .parse()
            .expect("numeric summary value")
    };
    let period_us = grab("period_us");
    let first_peak = grab("first_period_peak_p_g1e2");

    let ok = (period_us - 2.1).abs() <= 0.105
        && (first_peak - 0.9).abs() <= 0.03
        && (period_us - FROZEN_PHYSICAL_PERIOD_US).abs() <= FROZEN_TOL
        && (first_peak - FROZEN_PHYSICAL_FIRST_PEAK).abs() <= FROZEN_TOL;
    verdict(
        "10 (physical-units scenario)",
        ok,
        format!(
            "period = {:.4} us (2.1 within 5%), first-period peak = {:.4} (0.9 within 0.03)",
            period_us, first_peak
        ),
    );
}

/// Every bundled dynamics scenario, grouped by how its exact run is driven.
fn dynamics_ids() -> (Vec<&'static str>, Vec<&'static str>) {
    let unitary = vec![
        "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c",
        "fig4d",
    ];
    let open = vec![
        "fig6a",
        "fig6b",
        "fig7a",
        "fig7b",
        "fig7c",
        "fig7d",
        "physical_units",
    ];
    (unitary, open)
}

#[test]
fn criterion_11a_hermiticity() {
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for id in figures::ids() {
        let cfg = figures::bundled(id).expect("bundled config");
        let r = resolve_params(&cfg, 10).expect("resolve");
        for (name, op) in [
            ("lab", hamiltonian_lab(&r.params, r.hs)),
            ("squeezed", hamiltonian_squeezed(&r.params, r.hs)),
        ] {
            let dev = op.hermiticity_deviation();
            if dev > worst {
                worst = dev;
                worst_at = format!("{id}/{name}");
            }
        }
        let eff = sqcav_cli::run::effective_hamiltonian(&r.params).expect("effective");
        for t in [0.0, 0.37, 1.9] {
            let dev = eff.at(t).hermiticity_deviation();
            if dev > worst {
                worst = dev;
                worst_at = format!("{id}/effective(t={t})");
            }
        }
    }
    let place = if worst_at.is_empty() {
        String::new()
    } else {
        format!(" at {worst_at}")
    };
    verdict(
        "11 (hermiticity)",
        worst <= 1e-12,
        format!("worst deviation {worst:.2e}{place} (limit 1e-12) across all bundled configs"),
    );
}

#[test]
fn criterion_11b_unitary_norm_drift() {
    let (unitary, _) = dynamics_ids();
    let mut worst: f64 = 0.0;
    let mut worst_at = "";
    for id in &unitary {
        let traj = bundled_run(id, 10);
        for pt in &traj.points {
            let drift = (pt.norm_or_trace - 1.0).abs();
            if drift > worst {
                worst = drift;
                worst_at = id;
            }
        }
    }
    verdict(
        "11 (unitary norm drift)",
        worst <= 1e-7,
        format!("worst |norm - 1| = {worst:.2e} at {worst_at} (limit 1e-7) over {} runs", unitary.len()),
    );
}

#[test]
fn criterion_11c_trace_and_positivity() {
    let (_, open) = dynamics_ids();
    let mut worst_trace: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    let mut at_trace = "";
    let mut at_eig = "";
    for id in &open {
        let traj = bundled_run(id, 10);
        for pt in &traj.points {
            let drift = (pt.norm_or_trace - 1.0).abs();
            if drift > worst_trace {
                worst_trace = drift;
                at_trace = id;
            }
            let eig = pt.min_eigenvalue.expect("density run records min eigenvalue");
            if -eig > worst_eig {
                worst_eig = -eig;
                at_eig = id;
            }
        }
    }
    verdict(
        "11 (trace and positivity)",
        worst_trace <= 1e-6 && worst_eig <= 1e-6,
        format!(
            "worst |trace - 1| = {worst_trace:.2e} at {at_trace} (limit 1e-6); \
             worst negative eigenvalue = {worst_eig:.2e} at {at_eig} (limit 1e-6) over {} runs",
            open.len()
        ),
    );
}

#[test]
fn criterion_11d_truncation_convergence() {
    let (unitary, open) = dynamics_ids();
    let start = Instant::now();
    let mut breaches = Vec::new();
    let mut worst_pass: f64 = 0.0;
    for id in unitary.iter().chain(open.iter()) {
        let coarse = bundled_run(id, 10);
        let fine = bundled_run(id, 15);
        let mut dev: f64 = 0.0;
        for (a, b) in coarse.points.iter().zip(fine.points.iter()) {
            for k in 0..4 {
                dev = dev.max((a.populations[k] - b.populations[k]).abs());
            }
        }
        if dev > 1e-6 {
            breaches.push(format!("{id} {dev:.2e}"));
        } else {
            worst_pass = worst_pass.max(dev);
        }
    }
    let dt = start.elapsed().as_secs_f64();
    let total = unitary.len() + open.len();
    let ok = breaches.is_empty();
    let summary = if ok {
        format!(
            "all {total} dynamics configs agree between n_max 10 and 15 within 1e-6 \
             (worst {worst_pass:.2e}), runtime {dt:.0} s"
        )
    } else {
        format!(
            "{}/{total} configs within 1e-6 (worst passing {worst_pass:.2e}); breaches: {}; \
             runtime {dt:.0} s",
            total - breaches.len(),
            breaches.join(", ")
        )
    };
    verdict("11 (truncation convergence)", ok, summary);
}
