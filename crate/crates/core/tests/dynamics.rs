//! Closed-system dynamics checked against the reduced two-atom pictures:
//! resonant excitation exchange with unequal couplings, pair creation at
//! zero detuning, and energy conservation on the adaptive integrator path.

use sqcav::evolve::{
    evolve_effective, evolve_schrodinger, evolve_schrodinger_states, extract_period,
    SCHRODINGER_RTOL,
};
use sqcav::fock_algebra::{AtomPair, HilbertSpace, Operator, QuantumState, Space};
use sqcav::model::{
    effective_general, hamiltonian_eff_zero_delta, hamiltonian_squeezed, large_detuning_ok,
    Hamiltonian, SystemParams,
};
use sqcav::resonance::solve_resonance;
use sqcav::{C64, RkOptions};

fn grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn resonant_exchange_with_unequal_couplings() {
    // g2 = 1.5 g1 exchanges excitation fully only when delta_2 solves the
    // Stark-shift balance; the effective two-atom picture must then track
    // the full squeezed-frame run through two Rabi periods.
    let hs = HilbertSpace::new(10);
    let delta_s = 10.0 * 1.0_f64.cosh();
    let p0 = SystemParams::from_squeezing(1.0, 1.5, 200.0, 199.9, 1.0, delta_s, 0.0).unwrap();
    let sol = solve_resonance(&p0).unwrap();
    let p = p0.with_delta_2(sol.delta_2);
    assert!(large_detuning_ok(&p));

    let period = std::f64::consts::PI / sol.g_eff.abs();
    let times = grid(2.05 * period, 1301);

    let h_full = Hamiltonian::from_static(hamiltonian_squeezed(&p, hs));
    let psi0 = QuantumState::basis_ket(hs, AtomPair::EG, 0).unwrap();
    let full = evolve_schrodinger(&h_full, &psi0, &times).unwrap();

    let h_eff = effective_general(&p).unwrap();
    let psi0_eff = QuantumState::atoms_ket(AtomPair::EG);
    let eff = evolve_effective(&h_eff, &psi0_eff, &times).unwrap();

    let full_ge = full.population_series(AtomPair::GE);
    let eff_ge = eff.population_series(AtomPair::GE);
    let max_transfer = full_ge.iter().cloned().fold(0.0, f64::max);
    assert!(max_transfer > 0.9, "max transfer {max_transfer}");

    let max_diff = full_ge
        .iter()
        .zip(&eff_ge)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(max_diff <= 0.05, "effective vs exact diff {max_diff}");

    let est = extract_period(&full, AtomPair::GE).unwrap();
    assert!(
        (est.period - period).abs() <= 0.05 * period,
        "period {} vs {period}",
        est.period
    );

    // probabilities stay physical and the norm holds to 1e-7
    for pt in &full.points {
        for &pop in &pt.populations {
            assert!((-1e-8..=1.0 + 1e-8).contains(&pop));
        }
        assert!((pt.norm_or_trace - 1.0).abs() <= 1e-7);
    }
}

#[test]
fn zero_detuning_pair_creation() {
    // At delta_1 = delta_2 = 0 the two-photon side of the exchange survives
    // and drives gg <-> ee directly; check against the reduced picture.
    let hs = HilbertSpace::new(10);
    let r_p: f64 = 2.0;
    let delta_c = 1500.0;
    let delta_s = delta_c / (2.0 * r_p).cosh();
    let p = SystemParams::from_squeezing(1.0, 1.0, 0.0, 0.0, r_p, delta_s, 0.0).unwrap();
    assert!(large_detuning_ok(&p));

    let eff_op = hamiltonian_eff_zero_delta(&p).unwrap();
    let m = eff_op.matrix().clone();
    let pair_coupling = m[(3, 0)].norm();
    assert!(
        (pair_coupling - 0.497).abs() < 0.01,
        "pair coupling {pair_coupling}"
    );
    // generalized Rabi frequency of the {gg, ee} two-level block
    let stark_gap = (m[(0, 0)].re - m[(3, 3)].re).abs();
    let omega = (pair_coupling.powi(2) + (stark_gap / 2.0).powi(2)).sqrt();
    let period = std::f64::consts::PI / omega;

    let times = grid(12.0, 241);
    let h_full = Hamiltonian::from_static(hamiltonian_squeezed(&p, hs));
    let psi0 = QuantumState::basis_ket(hs, AtomPair::GG, 0).unwrap();
    let full = evolve_schrodinger(&h_full, &psi0, &times).unwrap();

    let h_eff = Hamiltonian::from_static(eff_op);
    let eff = evolve_effective(&h_eff, &QuantumState::atoms_ket(AtomPair::GG), &times).unwrap();

    let full_ee = full.population_series(AtomPair::EE);
    let eff_ee = eff.population_series(AtomPair::EE);
    let max_pair = full_ee.iter().cloned().fold(0.0, f64::max);
    assert!(max_pair > 0.95, "max pair population {max_pair}");

    let max_diff = full_ee
        .iter()
        .zip(&eff_ee)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(max_diff <= 0.05, "effective vs exact diff {max_diff}");

    let est = extract_period(&full, AtomPair::EE).unwrap();
    assert!(
        (est.period - period).abs() <= (0.05 * period).max(est.uncertainty),
        "period {} vs {period}",
        est.period
    );
}

#[test]
fn energy_conserved_on_adaptive_path() {
    // force the RK path with a zero-amplitude oscillating term; <H> of the
    // static physics must stay constant along the whole run
    let hs = HilbertSpace::new(3);
    let p = SystemParams::from_squeezing(1.0, 1.3, 30.0, 29.5, 0.4, 6.0, 0.0).unwrap();
    let h_op = hamiltonian_squeezed(&p, hs);
    let h = Hamiltonian::from_static(h_op.clone())
        .with_phased_term(Operator::zeros(Space::Full(hs)), 1.0)
        .unwrap();
    assert!(!h.is_static());

    let psi0 = QuantumState::basis_ket(hs, AtomPair::EG, 0).unwrap();
    let times = grid(5.0, 26);
    let opts = RkOptions {
        rtol: SCHRODINGER_RTOL,
        ..RkOptions::default()
    };
    let states = evolve_schrodinger_states(&h, &psi0, &times, &opts).unwrap();
    let hm = h_op.matrix();
    let energy = |s: &QuantumState| -> f64 {
        let v = s.as_ket().unwrap();
        let mut e = C64::new(0.0, 0.0);
        for i in 0..v.len() {
            for j in 0..v.len() {
                e += v[i].conj() * hm[(i, j)] * v[j];
            }
        }
        e.re
    };
    let e0 = energy(&states[0]);
    for s in &states {
        assert!(
            (energy(s) - e0).abs() <= 1e-7 * e0.abs().max(1.0),
            "energy drifted from {e0}"
        );
    }
}
