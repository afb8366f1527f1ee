//! System parameters and constructors for every Hamiltonian and noise
//! coefficient of the two-atom squeezed-cavity model.
//!
//! Frequencies are dimensionless in units of g1. Atom detunings delta_1,
//! delta_2 and the cavity detuning delta_c are measured relative to half the
//! pump frequency. The parametric pump (amplitude omega_p_amp, phase theta_p)
//! squeezes the cavity mode: alpha = omega_p_amp / delta_c, r_p = artanh(alpha) / 2,
//! and the squeezed mode oscillates at delta_s = delta_c * sqrt(1 - alpha^2).

use ndarray as nd;
use num_complex::Complex64 as C64;

use crate::fock_algebra::{
    annihilation, atom_operator, atom_operator_atoms_only, dagger, Atom, AtomOp, HilbertSpace,
    Operator, Space,
};
use crate::{Error, Result};

fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// alpha, r_p and delta_s from the pump-side inputs. The inverse map is
/// [`pump_from_squeezing`].
pub fn derive_squeezing(delta_c: f64, omega_p_amp: f64) -> Result<(f64, f64, f64)> {
    if delta_c == 0.0 {
        return Err(Error::ZeroDetuning { name: "delta_c" });
    }
    let alpha = omega_p_amp / delta_c;
    if alpha.abs() >= 1.0 {
        return Err(Error::PumpTooStrong { alpha });
    }
    let r_p = 0.5 * alpha.atanh();
    let delta_s = delta_c * (1.0 - alpha * alpha).sqrt();
    Ok((alpha, r_p, delta_s))
}

/// (alpha, delta_c, omega_p_amp) from the squeezed-frame inputs; exact
/// inverse of [`derive_squeezing`].
pub fn pump_from_squeezing(r_p: f64, delta_s: f64) -> (f64, f64, f64) {
    let alpha = (2.0 * r_p).tanh();
    let delta_c = delta_s * (2.0 * r_p).cosh();
    let omega_p_amp = delta_s * (2.0 * r_p).sinh();
    (alpha, delta_c, omega_p_amp)
}

/// Complete parameter record. Constructed from either the pump-side inputs
/// (delta_c, omega_p_amp) or the squeezed-frame inputs (r_p, delta_s); the
/// other triple is derived so both views stay consistent.
#[derive(Debug, Clone, Copy)]
pub struct SystemParams {
    g1: f64,
    g2: f64,
    delta_1: f64,
    delta_2: f64,
    delta_c: f64,
    omega_p_amp: f64,
    theta_p: f64,
    alpha: f64,
    r_p: f64,
    delta_s: f64,
}

impl SystemParams {
    pub fn from_pump(
        g1: f64,
        g2: f64,
        delta_1: f64,
        delta_2: f64,
        delta_c: f64,
        omega_p_amp: f64,
        theta_p: f64,
    ) -> Result<Self> {
        check_couplings(g1, g2)?;
        let (alpha, r_p, delta_s) = derive_squeezing(delta_c, omega_p_amp)?;
        Ok(Self {
            g1,
            g2,
            delta_1,
            delta_2,
            delta_c,
            omega_p_amp,
            theta_p,
            alpha,
            r_p,
            delta_s,
        })
    }

    pub fn from_squeezing(
        g1: f64,
        g2: f64,
        delta_1: f64,
        delta_2: f64,
        r_p: f64,
        delta_s: f64,
        theta_p: f64,
    ) -> Result<Self> {
        check_couplings(g1, g2)?;
        if delta_s == 0.0 {
            return Err(Error::ZeroDetuning { name: "delta_s" });
        }
        let (alpha, delta_c, omega_p_amp) = pump_from_squeezing(r_p, delta_s);
        Ok(Self {
            g1,
            g2,
            delta_1,
            delta_2,
            delta_c,
            omega_p_amp,
            theta_p,
            alpha,
            r_p,
            delta_s,
        })
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }
    pub fn g2(&self) -> f64 {
        self.g2
    }
    pub fn delta_1(&self) -> f64 {
        self.delta_1
    }
    pub fn delta_2(&self) -> f64 {
        self.delta_2
    }
    pub fn delta_c(&self) -> f64 {
        self.delta_c
    }
    pub fn omega_p_amp(&self) -> f64 {
        self.omega_p_amp
    }
    pub fn theta_p(&self) -> f64 {
        self.theta_p
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn r_p(&self) -> f64 {
        self.r_p
    }
    pub fn delta_s(&self) -> f64 {
        self.delta_s
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_1 - self.delta_s
    }
    pub fn delta_y(&self) -> f64 {
        self.delta_2 - self.delta_s
    }
    pub fn delta_z(&self) -> f64 {
        self.delta_1 + self.delta_s
    }
    pub fn delta_w(&self) -> f64 {
        self.delta_2 + self.delta_s
    }

    /// Interaction-picture detunings [delta_x, delta_y, delta_z, delta_w].
    pub fn detunings(&self) -> [f64; 4] {
        [
            self.delta_x(),
            self.delta_y(),
            self.delta_z(),
            self.delta_w(),
        ]
    }

    /// Same parameters with the second atom retuned (used by the resonance
    /// solver).
    pub fn with_delta_2(mut self, delta_2: f64) -> Self {
        self.delta_2 = delta_2;
        self
    }

    /// Re-checks the derived-field consistency to 1e-12 relative.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        let ds = self.delta_c * (1.0 - self.alpha * self.alpha).sqrt();
        if (ds - self.delta_s).abs() > tol * self.delta_s.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_s = {} inconsistent with delta_c, alpha (expected {ds})",
                self.delta_s
            )));
        }
        let c2 = (2.0 * self.r_p).cosh();
        let c2_from_alpha = 1.0 / (1.0 - self.alpha * self.alpha).sqrt();
        if (c2 - c2_from_alpha).abs() > tol * c2.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "r_p = {} inconsistent with alpha = {}",
                self.r_p, self.alpha
            )));
        }
        if (self.alpha - self.omega_p_amp / self.delta_c).abs() > tol {
            return Err(Error::InvalidParameter(
                "alpha inconsistent with omega_p_amp / delta_c".into(),
            ));
        }
        Ok(())
    }
}

fn check_couplings(g1: f64, g2: f64) -> Result<()> {
    if !(g1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "g1 = {g1} must be positive (it sets the frequency unit)"
        )));
    }
    if g2 < 0.0 {
        return Err(Error::InvalidParameter(format!("g2 = {g2} must be >= 0")));
    }
    Ok(())
}

/// Hamiltonian with an optional harmonic time dependence:
/// H(t) = static + sum_k [ e^{i w_k t} T_k + e^{-i w_k t} T_k^dag ].
/// Terms with w_k = 0 are folded into the static part at construction.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    space: Space,
    static_part: nd::Array2<C64>,
    phased: Vec<PhasedTerm>,
}

#[derive(Debug, Clone)]
struct PhasedTerm {
    plus: nd::Array2<C64>,
    minus: nd::Array2<C64>,
    freq: f64,
}

impl Hamiltonian {
    pub fn from_static(op: Operator) -> Self {
        let space = op.space();
        Self {
            space,
            static_part: op.into_matrix(),
            phased: Vec::new(),
        }
    }

    /// Adds e^{i freq t} T + e^{-i freq t} T^dag on top of the existing
    /// Hamiltonian. A freq of exactly 0 folds T + T^dag into the static
    /// part instead.
    pub fn with_phased_term(mut self, term: Operator, freq: f64) -> Result<Self> {
        if term.space() != self.space {
            return Err(Error::Dimension {
                context: "Hamiltonian::with_phased_term",
                expected: self.dim(),
                got: term.dim(),
            });
        }
        let t = term.into_matrix();
        let td = dagger(&t);
        if freq == 0.0 {
            self.static_part = self.static_part + &t + &td;
        } else {
            self.phased.push(PhasedTerm {
                plus: t,
                minus: td,
                freq,
            });
        }
        Ok(self)
    }

    fn new(space: Space, mut static_part: nd::Array2<C64>, terms: Vec<(nd::Array2<C64>, f64)>) -> Self {
        let mut phased = Vec::new();
        for (t, freq) in terms {
            let td = dagger(&t);
            if freq == 0.0 {
                static_part = static_part + &t + &td;
            } else {
                phased.push(PhasedTerm {
                    plus: t,
                    minus: td,
                    freq,
                });
            }
        }
        Self {
            space,
            static_part,
            phased,
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_static(&self) -> bool {
        self.phased.is_empty()
    }

    /// The constant part alone, or None when oscillating terms remain.
    pub fn static_operator(&self) -> Option<Operator> {
        if self.is_static() {
            Some(
                Operator::new(self.space, self.static_part.clone())
                    .expect("construction kept shapes consistent"),
            )
        } else {
            None
        }
    }

    pub fn write_at(&self, t: f64, out: &mut nd::Array2<C64>) {
        out.assign(&self.static_part);
        for term in &self.phased {
            let ph = C64::from_polar(1.0, term.freq * t);
            let phc = ph.conj();
            nd::Zip::from(&mut *out)
                .and(&term.plus)
                .and(&term.minus)
                .for_each(|o, &p, &m| *o += ph * p + phc * m);
        }
    }

    pub fn at(&self, t: f64) -> Operator {
        let mut m = nd::Array2::zeros((self.dim(), self.dim()));
        self.write_at(t, &mut m);
        Operator::new(self.space, m).expect("construction kept shapes consistent")
    }
}

/// Full-space Hamiltonian in the unsqueezed frame: cavity + atoms +
/// Jaynes-Cummings couplings + the two-photon pump drive.
pub fn hamiltonian_lab(p: &SystemParams, hs: HilbertSpace) -> Operator {
    let a = annihilation(hs);
    let ad = a.dagger();
    let amat = a.matrix();
    let admat = ad.matrix();

    let mut h = admat.dot(amat).mapv(|z| z * p.delta_c);
    for (atom, g, delta) in [(Atom::One, p.g1, p.delta_1), (Atom::Two, p.g2, p.delta_2)] {
        let sz = atom_operator(hs, atom, AtomOp::SigmaZ);
        let sp = atom_operator(hs, atom, AtomOp::SigmaPlus);
        let sm = atom_operator(hs, atom, AtomOp::SigmaMinus);
        h = h + sz.matrix().mapv(|z| z * (delta / 2.0));
        let jc = sp.matrix().dot(amat) + admat.dot(sm.matrix());
        h = h + jc.mapv(|z| z * g);
    }
    let aa = amat.dot(amat);
    let half = 0.5 * p.omega_p_amp;
    let pump_phase = C64::from_polar(half, p.theta_p);
    h = h + aa.mapv(|z| z * pump_phase) + dagger(&aa).mapv(|z| z * pump_phase.conj());
    Operator::new(Space::Full(hs), h).expect("square by construction")
}

/// Full-space Hamiltonian in the squeezed (Bogoliubov) frame: the pump is
/// absorbed into a rescaled cavity detuning delta_s, and the couplings pick
/// up cosh/sinh amplification plus counter-rotating terms. The matrix acts
/// on the squeezed mode, represented by the same truncated ladder operator.
pub fn hamiltonian_squeezed(p: &SystemParams, hs: HilbertSpace) -> Operator {
    let a = annihilation(hs);
    let ad = a.dagger();
    let amat = a.matrix();
    let admat = ad.matrix();
    let ch = p.r_p.cosh();
    let sh = p.r_p.sinh();
    let phase = C64::from_polar(1.0, -p.theta_p);

    let mut h = admat.dot(amat).mapv(|z| z * p.delta_s);
    for (atom, g, delta) in [(Atom::One, p.g1, p.delta_1), (Atom::Two, p.g2, p.delta_2)] {
        let sz = atom_operator(hs, atom, AtomOp::SigmaZ);
        let sp = atom_operator(hs, atom, AtomOp::SigmaPlus);
        let sm = atom_operator(hs, atom, AtomOp::SigmaMinus);
        h = h + sz.matrix().mapv(|z| z * (delta / 2.0));
        let co = sp.matrix().dot(amat) + admat.dot(sm.matrix());
        h = h + co.mapv(|z| z * (g * ch));
        let counter = sp.matrix().dot(admat).mapv(|z| z * phase)
            + amat.dot(sm.matrix()).mapv(|z| z * phase.conj());
        h = h - counter.mapv(|z| z * (g * sh));
    }
    Operator::new(Space::Full(hs), h).expect("square by construction")
}

/// Squeezed-frame Hamiltonian in the interaction picture with respect to the
/// free part. Only defined in the theta_p = 0 gauge: a nonzero pump phase
/// would put phase factors on the counter-rotating terms that this form does
/// not carry.
pub fn interaction_picture(p: &SystemParams, hs: HilbertSpace) -> Result<Hamiltonian> {
    if p.theta_p != 0.0 {
        return Err(Error::PumpPhaseNotZero { theta_p: p.theta_p });
    }
    let a = annihilation(hs);
    let ad = a.dagger();
    let ch = p.r_p.cosh();
    let sh = p.r_p.sinh();
    let sp1 = atom_operator(hs, Atom::One, AtomOp::SigmaPlus);
    let sp2 = atom_operator(hs, Atom::Two, AtomOp::SigmaPlus);

    let terms = vec![
        (sp1.matrix().dot(a.matrix()).mapv(|z| z * (p.g1 * ch)), p.delta_x()),
        (sp2.matrix().dot(a.matrix()).mapv(|z| z * (p.g2 * ch)), p.delta_y()),
        (sp1.matrix().dot(ad.matrix()).mapv(|z| z * (-p.g1 * sh)), p.delta_z()),
        (sp2.matrix().dot(ad.matrix()).mapv(|z| z * (-p.g2 * sh)), p.delta_w()),
    ];
    Ok(Hamiltonian::new(
        Space::Full(hs),
        nd::Array2::zeros((hs.dim(), hs.dim())),
        terms,
    ))
}

/// Interaction-picture Hamiltonian evaluated at time t.
pub fn hamiltonian_interaction(p: &SystemParams, hs: HilbertSpace, t: f64) -> Result<Operator> {
    Ok(interaction_picture(p, hs)?.at(t))
}

fn atoms4(atom: Atom, op: AtomOp) -> nd::Array2<C64> {
    atom_operator_atoms_only(atom, op)
}

fn exchange_atoms4() -> nd::Array2<C64> {
    // sigma+_1 sigma-_2: |e1 g2> <g1 e2|
    atoms4(Atom::One, AtomOp::SigmaPlus).dot(&atoms4(Atom::Two, AtomOp::SigmaMinus))
}

fn pair_raise_atoms4() -> nd::Array2<C64> {
    // sigma+_1 sigma+_2: |e1 e2> <g1 g2|
    atoms4(Atom::One, AtomOp::SigmaPlus).dot(&atoms4(Atom::Two, AtomOp::SigmaPlus))
}

fn require_nonzero(value: f64, name: &'static str) -> Result<()> {
    if value == 0.0 {
        Err(Error::ZeroDetuning { name })
    } else {
        Ok(())
    }
}

/// Second-order atoms-only Hamiltonian for arbitrary couplings and
/// detunings: photon-number-independent Stark shifts plus the cavity-mediated
/// exchange term, whose two contributions beat at delta_x - delta_y and
/// delta_z - delta_w (both equal delta_1 - delta_2).
pub fn effective_general(p: &SystemParams) -> Result<Hamiltonian> {
    if p.theta_p != 0.0 {
        return Err(Error::PumpPhaseNotZero { theta_p: p.theta_p });
    }
    let [dx, dy, dz, dw] = p.detunings();
    require_nonzero(dx, "delta_x")?;
    require_nonzero(dy, "delta_y")?;
    require_nonzero(dz, "delta_z")?;
    require_nonzero(dw, "delta_w")?;
    let c2 = p.r_p.cosh().powi(2);
    let s2 = p.r_p.sinh().powi(2);

    let mut stark = nd::Array2::zeros((4, 4));
    stark = stark + atoms4(Atom::One, AtomOp::ProjectExcited).mapv(|z| z * (p.g1 * p.g1 * c2 / dx));
    stark = stark + atoms4(Atom::Two, AtomOp::ProjectExcited).mapv(|z| z * (p.g2 * p.g2 * c2 / dy));
    stark = stark - atoms4(Atom::One, AtomOp::ProjectGround).mapv(|z| z * (p.g1 * p.g1 * s2 / dz));
    stark = stark - atoms4(Atom::Two, AtomOp::ProjectGround).mapv(|z| z * (p.g2 * p.g2 * s2 / dw));

    let jc = 0.5 * p.g1 * p.g2 * c2 * (1.0 / dx + 1.0 / dy);
    let js = 0.5 * p.g1 * p.g2 * s2 * (1.0 / dz + 1.0 / dw);
    let ex = exchange_atoms4();
    let terms = vec![
        (ex.mapv(|z| z * jc), dx - dy),
        (ex.mapv(|z| z * (-js)), dz - dw),
    ];
    Ok(Hamiltonian::new(Space::Atoms, stark, terms))
}

/// [`effective_general`] evaluated at time t.
pub fn hamiltonian_eff_general(p: &SystemParams, t: f64) -> Result<Operator> {
    Ok(effective_general(p)?.at(t))
}

const EQUALITY_TOL: f64 = 1e-12;

/// Time-independent specialization of [`effective_general`] for identical
/// couplings and identical atom detunings.
pub fn hamiltonian_eff_equal(p: &SystemParams) -> Result<Operator> {
    if p.theta_p != 0.0 {
        return Err(Error::PumpPhaseNotZero { theta_p: p.theta_p });
    }
    if (p.g1 - p.g2).abs() > EQUALITY_TOL {
        return Err(Error::Precondition(format!(
            "equal-coupling form requires g1 = g2, got {} and {}",
            p.g1, p.g2
        )));
    }
    if (p.delta_1 - p.delta_2).abs() > EQUALITY_TOL {
        return Err(Error::Precondition(format!(
            "equal-coupling form requires delta_1 = delta_2, got {} and {}",
            p.delta_1, p.delta_2
        )));
    }
    let dx = p.delta_x();
    let dz = p.delta_z();
    require_nonzero(dx, "delta_x")?;
    require_nonzero(dz, "delta_z")?;
    let g2 = p.g1 * p.g1;
    let a = g2 * p.r_p.cosh().powi(2) / dx;
    let b = g2 * p.r_p.sinh().powi(2) / dz;

    let proj_e = atoms4(Atom::One, AtomOp::ProjectExcited) + atoms4(Atom::Two, AtomOp::ProjectExcited);
    let proj_g = atoms4(Atom::One, AtomOp::ProjectGround) + atoms4(Atom::Two, AtomOp::ProjectGround);
    let ex = exchange_atoms4();
    let h = proj_e.mapv(|z| z * a) - proj_g.mapv(|z| z * b)
        + (ex.clone() + dagger(&ex)).mapv(|z| z * (a - b));
    Operator::new(Space::Atoms, h)
}

/// Atoms-only Hamiltonian for resonant atoms (delta_1 = delta_2 = 0). On top
/// of the Stark shifts and the exchange term it carries the pair term
/// sigma+_1 sigma+_2 that opens the two-photon |g1 g2> <-> |e1 e2> channel.
pub fn hamiltonian_eff_zero_delta(p: &SystemParams) -> Result<Operator> {
    if p.theta_p != 0.0 {
        return Err(Error::PumpPhaseNotZero { theta_p: p.theta_p });
    }
    if p.delta_1.abs() > EQUALITY_TOL || p.delta_2.abs() > EQUALITY_TOL {
        return Err(Error::Precondition(format!(
            "zero-detuning form requires delta_1 = delta_2 = 0, got {} and {}",
            p.delta_1, p.delta_2
        )));
    }
    require_nonzero(p.delta_s, "delta_s")?;
    let q = p.g1 * p.g1 / p.delta_s;
    let c2 = p.r_p.cosh().powi(2);
    let s2 = p.r_p.sinh().powi(2);
    let ch2 = (2.0 * p.r_p).cosh();
    let sh2 = (2.0 * p.r_p).sinh();

    let proj_e = atoms4(Atom::One, AtomOp::ProjectExcited) + atoms4(Atom::Two, AtomOp::ProjectExcited);
    let proj_g = atoms4(Atom::One, AtomOp::ProjectGround) + atoms4(Atom::Two, AtomOp::ProjectGround);
    let ex = exchange_atoms4();
    let pair = pair_raise_atoms4();
    let h = proj_e.mapv(|z| z * (-q * c2)) + proj_g.mapv(|z| z * (-q * s2))
        + (ex.clone() + dagger(&ex)).mapv(|z| z * (q * ch2))
        - (pair.clone() + dagger(&pair)).mapv(|z| z * (q * sh2));
    Operator::new(Space::Atoms, h)
}

/// Detunings are "large" when they exceed the dressed coupling strengths by
/// this factor; below it the perturbative effective models degrade.
pub const LARGE_DETUNING_FACTOR: f64 = 10.0;

/// min(|delta_x..w|) / max(g_i cosh r_p, g_i |sinh r_p|). Values below
/// [`LARGE_DETUNING_FACTOR`] mean the effective models are outside their
/// validity region; callers are expected to warn, not reject.
pub fn large_detuning_margin(p: &SystemParams) -> f64 {
    let min_det = p
        .detunings()
        .iter()
        .map(|d| d.abs())
        .fold(f64::INFINITY, f64::min);
    let ch = p.r_p.cosh();
    let sh = p.r_p.sinh().abs();
    let max_g = (p.g1 * ch).max(p.g1 * sh).max(p.g2 * ch).max(p.g2 * sh);
    if max_g == 0.0 {
        f64::INFINITY
    } else {
        min_det / max_g
    }
}

pub fn large_detuning_ok(p: &SystemParams) -> bool {
    large_detuning_margin(p) >= LARGE_DETUNING_FACTOR
}

/// Squeezed input field driving the cavity, characterized as a broadband
/// squeezed reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedDrive {
    pub r_e: f64,
    pub theta_e: f64,
}

/// Dissipation inputs: cavity decay, atomic decay, thermal occupation, and
/// the optional squeezed drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirParams {
    pub kappa: f64,
    pub gamma: f64,
    pub n_th: f64,
    pub squeezed_drive: Option<SqueezedDrive>,
}

impl ReservoirParams {
    pub fn new(
        kappa: f64,
        gamma: f64,
        n_th: f64,
        squeezed_drive: Option<SqueezedDrive>,
    ) -> Result<Self> {
        let p = Self {
            kappa,
            gamma,
            n_th,
            squeezed_drive,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn thermal(kappa: f64, gamma: f64, n_th: f64) -> Result<Self> {
        Self::new(kappa, gamma, n_th, None)
    }

    pub fn with_drive(kappa: f64, gamma: f64, n_th: f64, r_e: f64, theta_e: f64) -> Result<Self> {
        Self::new(kappa, gamma, n_th, Some(SqueezedDrive { r_e, theta_e }))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("gamma", self.gamma), ("n_th", self.n_th)] {
            if !(v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be >= 0"
                )));
            }
        }
        Ok(())
    }

    /// (r_e, theta_e), with an absent drive meaning r_e = 0.
    pub fn drive(&self) -> (f64, f64) {
        match self.squeezed_drive {
            Some(d) => (d.r_e, d.theta_e),
            None => (0.0, 0.0),
        }
    }
}

/// The six noise coefficients used by the master-equation variants.
///
/// n, m: what a plain thermal environment looks like from the squeezed frame.
/// n_prime, m_prime: the squeezed drive seen from the unsqueezed frame.
/// n_s, m_s: the squeezed drive seen from the squeezed frame; under the
/// matched condition r_e = r_p, theta_e + theta_p = pi they collapse to
/// (n_th, 0).
#[derive(Debug, Clone, Copy)]
pub struct NoiseCoefficients {
    pub n: f64,
    pub m: C64,
    pub n_prime: f64,
    pub m_prime: C64,
    pub n_s: f64,
    pub m_s: C64,
}

/// Computes every noise coefficient for the given reservoir and pump
/// squeezing.
///
/// n_s and m_s are evaluated in a regrouped but algebraically identical form
/// (difference-angle hyperbolics plus (1 + cos) and sin terms) so that the
/// matched condition cancels exactly instead of through subtraction of large
/// floats. The overall sign of m_s is fixed by the r_e = 0 limit, where the
/// pair (n_s, m_s) must reproduce ((2n+1) n_th + n, m (2 n_th + 1)) -- the
/// squeezed-frame thermal coefficients -- so that both descriptions generate
/// the same dynamics.
pub fn noise_coefficients(r: &ReservoirParams, r_p: f64, theta_p: f64) -> Result<NoiseCoefficients> {
    r.validate()?;
    let n_th = r.n_th;
    let (r_e, theta_e) = r.drive();

    let n = r_p.sinh().powi(2);
    let m = C64::from_polar(r_p.cosh() * r_p.sinh(), -theta_p);

    let n_prime = n_th * (2.0 * r_e).cosh() + r_e.sinh().powi(2);
    let m_prime = C64::from_polar((2.0 * n_th + 1.0) * r_e.cosh() * r_e.sinh(), theta_e);

    let theta = theta_e + theta_p;
    let diff = 2.0 * (r_p - r_e);
    let one_plus_cos = 1.0 + theta.cos();
    let sh2e = (2.0 * r_e).sinh();
    let sh2p = (2.0 * r_p).sinh();
    let ch2p = (2.0 * r_p).cosh();

    let n_s = n_th * diff.cosh()
        + (r_p - r_e).sinh().powi(2)
        + (n_th + 0.5) * one_plus_cos * sh2e * sh2p;
    let inner = c64(
        0.5 * diff.sinh() + 0.5 * one_plus_cos * sh2e * ch2p,
        0.5 * theta.sin() * sh2e,
    );
    let m_s = C64::from_polar(2.0 * n_th + 1.0, -theta_p) * inner;

    Ok(NoiseCoefficients {
        n,
        m,
        n_prime,
        m_prime,
        n_s,
        m_s,
    })
}
