//! Time evolution: unitary Schrodinger propagation and Lindblad
//! master-equation propagation.
//!
//! Static Hamiltonians are propagated exactly through their eigenbasis;
//! harmonically driven ones go through an adaptive Dormand-Prince RK45.
//! Density matrices always use the RK45 path on the master equation
//!
//!   d rho / dt = i [rho, H] - (1/2) sum_k w_k L_k(O_k) rho,
//!
//! where the dissipator forms are L(O) rho = O'O rho - 2 O rho O' + rho O'O
//! (ordinary) and L'(O) rho = OO rho - 2 O rho O + rho OO (two-photon
//! correlation), with weights w_k chosen by the [`LindbladVariant`].

use ndarray as nd;
use ndarray::linalg::{general_mat_mul, general_mat_vec_mul};
use num_complex::Complex64 as C64;

use crate::fock_algebra::{
    annihilation, atom_operator, dagger, eig_hermitian, eig_hermitian_mat, Atom, AtomOp, AtomPair,
    Operator, QuantumState, Space, StateRepr,
};
use crate::integrate::{integrate_rk45, RkOptions};
use crate::model::{noise_coefficients, Hamiltonian, NoiseCoefficients, ReservoirParams};
use crate::{Error, Result};

/// Schrodinger-path integration defaults.
pub const SCHRODINGER_RTOL: f64 = 1e-9;
/// Master-equation integration defaults.
pub const MASTER_RTOL: f64 = 1e-8;
const DEFAULT_ATOL: f64 = 1e-12;

const NORM_DRIFT_LIMIT: f64 = 1e-6;
const TRACE_DRIFT_LIMIT: f64 = 1e-5;
const POSITIVITY_LIMIT: f64 = -1e-5;

/// One recorded instant of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub t: f64,
    /// Atomic configuration probabilities, cavity traced out.
    /// Order [gg, ge, eg, ee] (same as `AtomPair::ALL`).
    pub populations: [f64; 4],
    /// Mean photon number; None for atoms-only spaces.
    pub mean_photon: Option<f64>,
    /// Ket norm or density-matrix trace.
    pub norm_or_trace: f64,
    /// Smallest density-matrix eigenvalue; None for ket runs.
    pub min_eigenvalue: Option<f64>,
}

/// Populations and diagnostics sampled on the requested time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub space: Space,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn population_series(&self, pair: AtomPair) -> Vec<f64> {
        let b = pair.block();
        self.points.iter().map(|p| p.populations[b]).collect()
    }

    /// Photon series, present only when every point recorded one.
    pub fn photon_series(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|p| p.mean_photon).collect()
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty output time grid".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "output time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn ket_point(space: Space, t: f64, v: &nd::Array1<C64>) -> Result<TrajectoryPoint> {
    let state = QuantumState::from_ket(space, v.clone())?;
    let norm = state.weight();
    let drift = (norm - 1.0).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::NormDrift { t, drift });
    }
    Ok(TrajectoryPoint {
        t,
        populations: state.atomic_populations(),
        mean_photon: state.mean_photon(),
        norm_or_trace: norm,
        min_eigenvalue: None,
    })
}

/// Propagates a ket under `h` across `times`, with the state taken as the
/// initial condition at `times[0]`. Static Hamiltonians are diagonalized
/// once and applied exactly; driven ones are integrated with RK45 at
/// relative tolerance [`SCHRODINGER_RTOL`].
pub fn evolve_schrodinger(
    h: &Hamiltonian,
    psi0: &QuantumState,
    times: &[f64],
) -> Result<Trajectory> {
    evolve_schrodinger_with(
        h,
        psi0,
        times,
        &RkOptions {
            rtol: SCHRODINGER_RTOL,
            atol: DEFAULT_ATOL,
            ..RkOptions::default()
        },
    )
}

/// [`evolve_schrodinger`] with explicit integrator options (driven path only;
/// static Hamiltonians are still propagated exactly).
pub fn evolve_schrodinger_with(
    h: &Hamiltonian,
    psi0: &QuantumState,
    times: &[f64],
    opts: &RkOptions,
) -> Result<Trajectory> {
    let space = h.space();
    let mut points = Vec::with_capacity(times.len());
    propagate_ket(h, psi0, times, opts, |t, v| {
        points.push(ket_point(space, t, v)?);
        Ok(())
    })?;
    Ok(Trajectory { space, points })
}

/// Like [`evolve_schrodinger`], but returns the full state at every grid
/// time instead of collapsing it to populations.
pub fn evolve_schrodinger_states(
    h: &Hamiltonian,
    psi0: &QuantumState,
    times: &[f64],
    opts: &RkOptions,
) -> Result<Vec<QuantumState>> {
    let space = h.space();
    let mut states = Vec::with_capacity(times.len());
    propagate_ket(h, psi0, times, opts, |_, v| {
        states.push(QuantumState::from_ket(space, v.clone())?);
        Ok(())
    })?;
    Ok(states)
}

fn propagate_ket(
    h: &Hamiltonian,
    psi0: &QuantumState,
    times: &[f64],
    opts: &RkOptions,
    mut sink: impl FnMut(f64, &nd::Array1<C64>) -> Result<()>,
) -> Result<()> {
    validate_times(times)?;
    if psi0.space() != h.space() {
        return Err(Error::Dimension {
            context: "evolve_schrodinger state vs Hamiltonian",
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    let v0 = psi0
        .as_ket()
        .ok_or_else(|| Error::Precondition("evolve_schrodinger requires a ket state".into()))?;
    let dim = h.dim();

    if let Some(op) = h.static_operator() {
        let eig = eig_hermitian(&op)?;
        // coefficients in the eigenbasis: c = V^dag psi0
        let mut coeff = nd::Array1::<C64>::zeros(dim);
        for k in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..dim {
                acc += eig.vectors[(j, k)].conj() * v0[j];
            }
            coeff[k] = acc;
        }
        let t0 = times[0];
        let mut psi = nd::Array1::<C64>::zeros(dim);
        for &t in times {
            let dt = t - t0;
            psi.fill(C64::new(0.0, 0.0));
            for k in 0..dim {
                let phase = C64::from_polar(1.0, -eig.values[k] * dt) * coeff[k];
                if phase.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    psi[j] += eig.vectors[(j, k)] * phase;
                }
            }
            sink(t, &psi)?;
        }
        return Ok(());
    }

    let mut h_scratch = nd::Array2::<C64>::zeros((dim, dim));
    let minus_i = C64::new(0.0, -1.0);
    let mut rhs = |t: f64, y: &nd::Array1<C64>, out: &mut nd::Array1<C64>| {
        h.write_at(t, &mut h_scratch);
        general_mat_vec_mul(minus_i, &h_scratch, y, C64::new(0.0, 0.0), out);
    };
    integrate_rk45(
        &mut rhs,
        v0.clone(),
        times[0],
        times,
        opts,
        |_, t, y| sink(t, y),
        |t, y| {
            let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let drift = (norm - 1.0).abs();
            if drift > NORM_DRIFT_LIMIT {
                return Err(Error::NormDrift { t, drift });
            }
            Ok(())
        },
    )
}

/// Propagates a two-atom ket under an atoms-only effective Hamiltonian.
pub fn evolve_effective(
    h: &Hamiltonian,
    psi0: &QuantumState,
    times: &[f64],
) -> Result<Trajectory> {
    if h.space() != Space::Atoms {
        return Err(Error::Precondition(
            "evolve_effective expects an atoms-only Hamiltonian".into(),
        ));
    }
    evolve_schrodinger(h, psi0, times)
}

/// Which Lindblad dissipator set accompanies the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LindbladVariant {
    /// Thermal cavity decay in the unsqueezed frame: weights (n_th+1, n_th)
    /// on a.
    ThermalLab,
    /// Thermal reservoir seen from the squeezed frame: the pump squeezing
    /// converts it into amplified thermal weights plus two-photon
    /// correlation terms on a_s.
    SqueezedFrameThermal,
    /// Squeezed-reservoir drive in the unsqueezed frame: weights
    /// (N'+1, N', -M', -M'*) on a.
    SqueezedReservoirLab,
    /// Squeezed-reservoir drive seen from the squeezed frame: weights
    /// (N_s+1, N_s, -M_s, -M_s*) on a_s.
    SqueezedFrameSqueezedReservoir,
    /// The matched case r_e = r_p, theta_e + theta_p = pi, where the
    /// squeezed-frame equation collapses to plain thermal weights
    /// (n_th+1, n_th) on a_s.
    MatchedLindblad,
}

/// Dissipator selection plus the pump squeezing it refers to.
#[derive(Debug, Clone, Copy)]
pub struct DissipatorSpec {
    variant: LindbladVariant,
    reservoir: ReservoirParams,
    r_p: f64,
    theta_p: f64,
}

const MATCHED_TOL: f64 = 1e-12;

fn matched_phase_deviation(theta_e: f64, theta_p: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (theta_e + theta_p - std::f64::consts::PI).rem_euclid(two_pi);
    d.min(two_pi - d)
}

impl DissipatorSpec {
    /// Validates the combination. `MatchedLindblad` demands r_e = r_p and
    /// theta_e + theta_p = pi (mod 2 pi) within 1e-12; anything else would
    /// misrepresent the squeezed-frame equation it abbreviates.
    pub fn new(
        variant: LindbladVariant,
        reservoir: ReservoirParams,
        r_p: f64,
        theta_p: f64,
    ) -> Result<Self> {
        reservoir.validate()?;
        if variant == LindbladVariant::MatchedLindblad {
            let (r_e, theta_e) = reservoir.drive();
            if (r_e - r_p).abs() > MATCHED_TOL {
                return Err(Error::Precondition(format!(
                    "matched Lindblad form requires r_e = r_p, got r_e = {r_e}, r_p = {r_p}"
                )));
            }
            let dev = matched_phase_deviation(theta_e, theta_p);
            if dev > MATCHED_TOL {
                return Err(Error::Precondition(format!(
                    "matched Lindblad form requires theta_e + theta_p = pi (mod 2 pi); \
                     deviation = {dev:.3e}"
                )));
            }
        }
        Ok(Self {
            variant,
            reservoir,
            r_p,
            theta_p,
        })
    }

    pub fn variant(&self) -> LindbladVariant {
        self.variant
    }

    pub fn reservoir(&self) -> &ReservoirParams {
        &self.reservoir
    }

    pub fn r_p(&self) -> f64 {
        self.r_p
    }

    pub fn theta_p(&self) -> f64 {
        self.theta_p
    }

    pub fn coefficients(&self) -> Result<NoiseCoefficients> {
        noise_coefficients(&self.reservoir, self.r_p, self.theta_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DissForm {
    /// L(O) rho = O'O rho - 2 O rho O' + rho O'O
    Ord,
    /// L'(O) rho = OO rho - 2 O rho O + rho OO
    Corr,
}

/// The weighted dissipator list for a variant: (operator, form, weight).
fn dissipator_terms(
    spec: &DissipatorSpec,
    space: Space,
) -> Result<Vec<(nd::Array2<C64>, DissForm, C64)>> {
    let hs = match space {
        Space::Full(hs) => hs,
        Space::Atoms => {
            return Err(Error::Precondition(
                "master-equation variants act on the full atom-cavity space".into(),
            ))
        }
    };
    let r = &spec.reservoir;
    let mut terms = Vec::new();
    if r.gamma > 0.0 {
        let sqrt_gamma = C64::new(r.gamma.sqrt(), 0.0);
        for atom in [Atom::One, Atom::Two] {
            let op = atom_operator(hs, atom, AtomOp::SigmaMinus)
                .matrix()
                .mapv(|z| z * sqrt_gamma);
            terms.push((op, DissForm::Ord, C64::new(1.0, 0.0)));
        }
    }
    if r.kappa > 0.0 {
        let a = annihilation(hs)
            .matrix()
            .mapv(|z| z * C64::new(r.kappa.sqrt(), 0.0));
        let ad = dagger(&a);
        let n_th = r.n_th;
        let nc = spec.coefficients()?;
        let re = |x: f64| C64::new(x, 0.0);
        let push = |terms: &mut Vec<_>, down: C64, up: C64, corr_up: C64, corr_down: C64| {
            terms.push((a.clone(), DissForm::Ord, down));
            terms.push((ad.clone(), DissForm::Ord, up));
            if corr_up.norm_sqr() > 0.0 || corr_down.norm_sqr() > 0.0 {
                terms.push((ad.clone(), DissForm::Corr, corr_up));
                terms.push((a.clone(), DissForm::Corr, corr_down));
            }
        };
        match spec.variant {
            LindbladVariant::ThermalLab | LindbladVariant::MatchedLindblad => {
                push(&mut terms, re(n_th + 1.0), re(n_th), re(0.0), re(0.0));
            }
            LindbladVariant::SqueezedFrameThermal => {
                let scale = 2.0 * n_th + 1.0;
                push(
                    &mut terms,
                    re((2.0 * nc.n + 1.0) * n_th + nc.n + 1.0),
                    re((2.0 * nc.n + 1.0) * n_th + nc.n),
                    -nc.m * scale,
                    -nc.m.conj() * scale,
                );
            }
            LindbladVariant::SqueezedReservoirLab => {
                push(
                    &mut terms,
                    re(nc.n_prime + 1.0),
                    re(nc.n_prime),
                    -nc.m_prime,
                    -nc.m_prime.conj(),
                );
            }
            LindbladVariant::SqueezedFrameSqueezedReservoir => {
                push(
                    &mut terms,
                    re(nc.n_s + 1.0),
                    re(nc.n_s),
                    -nc.m_s,
                    -nc.m_s.conj(),
                );
            }
        }
    }
    Ok(terms)
}

/// The master-equation right-hand side, written out term by term against the
/// printed dissipator forms. Linear in `rho`; no Hermiticity assumed, so it
/// doubles as the superoperator for identity tests.
pub fn lindblad_rhs(
    h: &Operator,
    spec: &DissipatorSpec,
    rho: &nd::Array2<C64>,
) -> Result<nd::Array2<C64>> {
    let dim = h.dim();
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::Dimension {
            context: "lindblad_rhs density matrix vs Hamiltonian",
            expected: dim,
            got: rho.nrows(),
        });
    }
    let hm = h.matrix();
    let i = C64::new(0.0, 1.0);
    let mut out = (rho.dot(hm) - hm.dot(rho)).mapv(|z| z * i);
    for (o, form, w) in dissipator_terms(spec, h.space())? {
        if w.norm_sqr() == 0.0 {
            continue;
        }
        let half_w = 0.5 * w;
        match form {
            DissForm::Ord => {
                let od = dagger(&o);
                let p = od.dot(&o);
                out = out - (p.dot(rho) + rho.dot(&p)).mapv(|z| z * half_w)
                    + o.dot(rho).dot(&od).mapv(|z| z * w);
            }
            DissForm::Corr => {
                let q = o.dot(&o);
                out = out - (q.dot(rho) + rho.dot(&q)).mapv(|z| z * half_w)
                    + o.dot(rho).dot(&o).mapv(|z| z * w);
            }
        }
    }
    Ok(out)
}

/// Sparse jump contribution: out[i][j] += sum L[i][k] rho[k][l] R[l][j],
/// with the weight folded into the left entries.
struct Jump {
    left: Vec<(usize, usize, C64)>,
    right: Vec<(usize, usize, C64)>,
}

/// Prebuilt fast evaluator for a fixed (H, dissipator) pair. Exploits that
/// every RK stage of a Hermitian initial matrix stays Hermitian: the drift
/// part -(A rho + rho A') is computed from a single product A rho. Only
/// valid on Hermitian inputs.
struct MasterOps {
    dim: usize,
    drift: nd::Array2<C64>,
    jumps: Vec<Jump>,
}

fn triplets(m: &nd::Array2<C64>) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for ((i, j), &v) in m.indexed_iter() {
        if v.norm_sqr() > 0.0 {
            out.push((i, j, v));
        }
    }
    out
}

impl MasterOps {
    fn new(h: &Operator, spec: &DissipatorSpec) -> Result<Self> {
        let dim = h.dim();
        let i = C64::new(0.0, 1.0);
        // drift A = iH + (1/2) sum_ord w O'O + (1/2) sum_corr w OO;
        // rhs = -(A rho + rho A') + jump terms
        let mut drift = h.matrix().mapv(|z| z * i);
        let mut jumps = Vec::new();
        for (o, form, w) in dissipator_terms(spec, h.space())? {
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let half_w = 0.5 * w;
            let (anticomm, right) = match form {
                DissForm::Ord => {
                    let od = dagger(&o);
                    // R = O': entry (l, j) = conj(O[j][l])
                    let right = triplets(&o)
                        .into_iter()
                        .map(|(r, c, v)| (c, r, v.conj()))
                        .collect();
                    (od.dot(&o), right)
                }
                DissForm::Corr => (o.dot(&o), triplets(&o)),
            };
            drift = drift + anticomm.mapv(|z| z * half_w);
            let left = triplets(&o)
                .into_iter()
                .map(|(r, c, v)| (r, c, v * w))
                .collect();
            jumps.push(Jump { left, right });
        }
        Ok(Self { dim, drift, jumps })
    }

    /// out = rhs(rho) for Hermitian rho; `scratch` holds A rho.
    fn rhs_into(
        &self,
        rho: &nd::Array2<C64>,
        out: &mut nd::Array2<C64>,
        scratch: &mut nd::Array2<C64>,
    ) {
        general_mat_mul(
            C64::new(1.0, 0.0),
            &self.drift,
            rho,
            C64::new(0.0, 0.0),
            scratch,
        );
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = -scratch[(i, j)] - scratch[(j, i)].conj();
            }
        }
        for jump in &self.jumps {
            for &(i, k, vl) in &jump.left {
                for &(l, j, vr) in &jump.right {
                    out[(i, j)] += vl * vr * rho[(k, l)];
                }
            }
        }
    }
}

fn density_point(
    space: Space,
    t: f64,
    m: &nd::Array2<C64>,
) -> Result<TrajectoryPoint> {
    let state = QuantumState::from_density(space, m.clone())?;
    let trace = state.weight();
    let min_eig = eig_hermitian_mat(m)?.values[0];
    if min_eig < POSITIVITY_LIMIT {
        return Err(Error::PositivityLost {
            t,
            eigenvalue: min_eig,
        });
    }
    Ok(TrajectoryPoint {
        t,
        populations: state.atomic_populations(),
        mean_photon: state.mean_photon(),
        norm_or_trace: trace,
        min_eigenvalue: Some(min_eig),
    })
}

/// Integrates the master equation for a static Hamiltonian across `times`
/// (initial condition at `times[0]`) at relative tolerance [`MASTER_RTOL`].
/// The state is re-symmetrized after every accepted step; the trace is never
/// renormalized, so trace drift stays visible and aborts past 1e-5.
/// A ket initial state is converted to its projector.
pub fn evolve_master(
    h: &Operator,
    spec: &DissipatorSpec,
    rho0: &QuantumState,
    times: &[f64],
) -> Result<Trajectory> {
    evolve_master_with(
        h,
        spec,
        rho0,
        times,
        &RkOptions {
            rtol: MASTER_RTOL,
            atol: DEFAULT_ATOL,
            ..RkOptions::default()
        },
    )
}

/// [`evolve_master`] with explicit integrator options.
pub fn evolve_master_with(
    h: &Operator,
    spec: &DissipatorSpec,
    rho0: &QuantumState,
    times: &[f64],
    opts: &RkOptions,
) -> Result<Trajectory> {
    validate_times(times)?;
    if rho0.space() != h.space() {
        return Err(Error::Dimension {
            context: "evolve_master state vs Hamiltonian",
            expected: h.dim(),
            got: rho0.dim(),
        });
    }
    let dim = h.dim();
    let density_state;
    let rho_init = match rho0.repr() {
        StateRepr::Density(m) => m,
        StateRepr::Ket(_) => {
            density_state = rho0.to_density();
            match density_state.repr() {
                StateRepr::Density(m) => m,
                StateRepr::Ket(_) => unreachable!("to_density returns a density matrix"),
            }
        }
    };
    let herm_dev = crate::fock_algebra::hermiticity_deviation(rho_init);
    if herm_dev > 1e-10 {
        return Err(Error::NonHermitian {
            deviation: herm_dev,
        });
    }
    let trace: f64 = rho_init.diag().iter().map(|z| z.re).sum();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "initial density matrix has trace {trace}, expected 1"
        )));
    }
    let mut rho = rho_init.clone();
    symmetrize(&mut rho);

    let ops = MasterOps::new(h, spec)?;
    let space = h.space();
    let mut points = Vec::with_capacity(times.len());
    let mut scratch = nd::Array2::<C64>::zeros((dim, dim));
    let mut rhs = |_t: f64, y: &nd::Array2<C64>, out: &mut nd::Array2<C64>| {
        ops.rhs_into(y, out, &mut scratch);
    };
    integrate_rk45(
        &mut rhs,
        rho,
        times[0],
        times,
        opts,
        |_, t, y| {
            points.push(density_point(space, t, y)?);
            Ok(())
        },
        |t, y| {
            symmetrize(y);
            let trace: f64 = y.diag().iter().map(|z| z.re).sum();
            let drift = (trace - 1.0).abs();
            if drift > TRACE_DRIFT_LIMIT {
                return Err(Error::TraceDrift { t, drift });
            }
            Ok(())
        },
    )?;
    Ok(Trajectory { space, points })
}

/// rho <- (rho + rho') / 2 in place.
fn symmetrize(m: &mut nd::Array2<C64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Oscillation period measured from successive population maxima.
#[derive(Debug, Clone, Copy)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Half the mean grid spacing.
    pub uncertainty: f64,
    pub maxima_count: usize,
}

/// Estimates the oscillation period of one atomic population from successive
/// maxima, each refined by a local quadratic fit. Maxima are accepted
/// through a hysteresis band (upper 40% of the range, re-armed below the
/// lower 40%) so that flat-topped sampling noise does not double-count.
pub fn extract_period(traj: &Trajectory, pair: AtomPair) -> Result<PeriodEstimate> {
    let series = traj.population_series(pair);
    let times = traj.times();
    if series.len() < 3 {
        return Err(Error::InsufficientOscillation { found: 0 });
    }
    let lo_v = series.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi_v = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi_v - lo_v;
    if range < 1e-9 {
        return Err(Error::InsufficientOscillation { found: 0 });
    }
    let hi_thresh = lo_v + 0.6 * range;
    let lo_thresh = lo_v + 0.4 * range;

    let mut maxima = Vec::new();
    let mut armed = true;
    for i in 1..series.len() - 1 {
        let p = series[i];
        if armed && p >= hi_thresh && p >= series[i - 1] && p >= series[i + 1] {
            // refine through the bracketing parabola
            let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
            let (p0, p1, p2) = (series[i - 1], series[i], series[i + 1]);
            let d1 = (p1 - p0) / (t1 - t0);
            let d2 = (p2 - p1) / (t2 - t1);
            let curv = (d2 - d1) / (t2 - t0);
            let t_star = if curv < 0.0 {
                (0.5 * (t0 + t1) - d1 / (2.0 * curv)).clamp(t0, t2)
            } else {
                t1
            };
            maxima.push(t_star);
            armed = false;
        } else if !armed && p <= lo_thresh {
            armed = true;
        }
    }
    if maxima.len() < 2 {
        return Err(Error::InsufficientOscillation {
            found: maxima.len(),
        });
    }
    let span = maxima.last().unwrap() - maxima.first().unwrap();
    let period = span / (maxima.len() - 1) as f64;
    let grid = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    Ok(PeriodEstimate {
        period,
        uncertainty: 0.5 * grid,
        maxima_count: maxima.len(),
    })
}
