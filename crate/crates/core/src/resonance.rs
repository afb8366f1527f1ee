//! Resonance-condition solving, effective coupling strengths, enhancement
//! factors, and avoided-crossing spectroscopy of the squeezed-frame spectrum.
//!
//! With unequal couplings the photon-number-independent Stark shifts detune
//! the two atoms from each other. The exchange resonance requires the total
//! (bare + shifted) transition frequencies to match:
//!
//!   g1^2 c^2 / dx + g1^2 s^2 / dz + delta_1
//!     = g2^2 c^2 / dy + g2^2 s^2 / dw + delta_2,
//!
//! with c = cosh(r_p), s = sinh(r_p). [`solve_resonance`] finds the delta_2
//! root of this balance near delta_1.

use ndarray as nd;
use num_complex::Complex64 as C64;

use crate::fock_algebra::{eig_hermitian, AtomPair, HilbertSpace};
use crate::model::{
    hamiltonian_eff_equal, hamiltonian_eff_zero_delta, hamiltonian_squeezed, SystemParams,
};
use crate::{Error, Result};

/// Solved exchange resonance: the retuned atom-2 detuning, the effective
/// exchange coupling there, and the residual imbalance left by the solver.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceSolution {
    pub delta_2: f64,
    pub g_eff: f64,
    pub residual: f64,
}

/// Avoided-crossing scan: the tracked single-excitation level pair across a
/// delta_2 grid, with the refined minimum gap and its location.
#[derive(Debug, Clone)]
pub struct CrossingScan {
    pub scan_values: Vec<f64>,
    pub level_pairs: Vec<(f64, f64)>,
    pub min_gap: f64,
    pub min_gap_location: f64,
}

/// Left-minus-right imbalance of the Stark-shift balance at the given
/// parameters. Zero at resonance.
pub fn resonance_residual(p: &SystemParams) -> f64 {
    let c2 = p.r_p().cosh().powi(2);
    let s2 = p.r_p().sinh().powi(2);
    let shift1 = p.g1() * p.g1() * (c2 / p.delta_x() + s2 / p.delta_z());
    let shift2 = p.g2() * p.g2() * (c2 / p.delta_y() + s2 / p.delta_w());
    (shift1 + p.delta_1()) - (shift2 + p.delta_2())
}

fn general_g_eff(p: &SystemParams) -> f64 {
    let c2 = p.r_p().cosh().powi(2);
    let s2 = p.r_p().sinh().powi(2);
    0.5 * p.g1()
        * p.g2()
        * (c2 * (1.0 / p.delta_x() + 1.0 / p.delta_y())
            - s2 * (1.0 / p.delta_z() + 1.0 / p.delta_w()))
}

const POLE_GUARD: f64 = 1e-9;
const MAX_NEWTON_ITERS: usize = 100;

/// Finds the delta_2 near delta_1 that balances the Stark-shifted transition
/// frequencies, by damped Newton iteration with a numerical derivative. The
/// incoming delta_2 field of `p` is ignored; the seed is delta_2 = delta_1.
pub fn solve_resonance(p: &SystemParams) -> Result<ResonanceSolution> {
    if p.delta_x() == 0.0 {
        return Err(Error::ZeroDetuning { name: "delta_x" });
    }
    if p.delta_z() == 0.0 {
        return Err(Error::ZeroDetuning { name: "delta_z" });
    }
    let tol = 1e-10 * p.g1();
    let f = |d2: f64| -> Result<f64> {
        let q = p.with_delta_2(d2);
        if q.delta_y().abs() < POLE_GUARD || q.delta_w().abs() < POLE_GUARD {
            return Err(Error::Convergence(format!(
                "resonance root degenerate: |delta_y| or |delta_w| below {POLE_GUARD} at delta_2 = {d2}"
            )));
        }
        Ok(resonance_residual(&q))
    };

    let mut d2 = p.delta_1();
    let mut fv = f(d2)?;
    for _ in 0..MAX_NEWTON_ITERS {
        if fv.abs() <= tol {
            let solved = p.with_delta_2(d2);
            return Ok(ResonanceSolution {
                delta_2: d2,
                g_eff: general_g_eff(&solved),
                residual: fv,
            });
        }
        let h = 1e-7 * d2.abs().max(1.0);
        let deriv = (f(d2 + h)? - f(d2 - h)?) / (2.0 * h);
        if deriv == 0.0 || !deriv.is_finite() {
            return Err(Error::Convergence(format!(
                "resonance Newton derivative degenerate at delta_2 = {d2}"
            )));
        }
        let mut step = -fv / deriv;
        // damping: halve until the residual actually shrinks
        let mut accepted = false;
        for _ in 0..60 {
            match f(d2 + step) {
                Ok(fn_new) if fn_new.abs() < fv.abs() => {
                    d2 += step;
                    fv = fn_new;
                    accepted = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::Convergence(format!(
                "resonance Newton stalled at delta_2 = {d2}, residual = {fv}"
            )));
        }
    }
    Err(Error::Convergence(format!(
        "resonance Newton did not reach |residual| <= {tol} within {MAX_NEWTON_ITERS} iterations"
    )))
}

/// Which effective model the coupling coefficient refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingRegime {
    /// Arbitrary couplings and detunings.
    General,
    /// g1 = g2 and delta_1 = delta_2.
    Equal,
    /// delta_1 = delta_2 = 0.
    ZeroDetuning,
}

/// Exchange coefficient of the effective Hamiltonian in the selected regime.
/// Preconditions mirror the corresponding Hamiltonian constructors.
pub fn effective_coupling(p: &SystemParams, regime: CouplingRegime) -> Result<f64> {
    match regime {
        CouplingRegime::General => {
            if p.theta_p() != 0.0 {
                return Err(Error::PumpPhaseNotZero {
                    theta_p: p.theta_p(),
                });
            }
            for (value, name) in [
                (p.delta_x(), "delta_x"),
                (p.delta_y(), "delta_y"),
                (p.delta_z(), "delta_z"),
                (p.delta_w(), "delta_w"),
            ] {
                if value == 0.0 {
                    return Err(Error::ZeroDetuning { name });
                }
            }
            Ok(general_g_eff(p))
        }
        CouplingRegime::Equal => Ok(hamiltonian_eff_equal(p)?.matrix()[(2, 1)].re),
        CouplingRegime::ZeroDetuning => Ok(hamiltonian_eff_zero_delta(p)?.matrix()[(2, 1)].re),
    }
}

/// How the cavity detuning is chosen as the squeezing grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetuningPolicy {
    /// delta_c held fixed; delta_s shrinks as 1/cosh(2 r_p).
    FixedDeltaC,
    /// delta_s rescaled proportionally to sqrt(cosh(2 r_p)).
    ScaledDeltaS,
}

/// g_eff(r_p) / g_eff(0) under the selected detuning policy.
pub fn enhancement_factor(r_p: f64, policy: DetuningPolicy) -> f64 {
    let ch = (2.0 * r_p).cosh();
    match policy {
        // g_eff ~ cosh(2 r_p)/delta_s with delta_s = delta_c/cosh(2 r_p)
        DetuningPolicy::FixedDeltaC => ch * ch,
        // g_eff ~ cosh(2 r_p)/delta_s with delta_s ~ sqrt(cosh(2 r_p))
        DetuningPolicy::ScaledDeltaS => ch.sqrt(),
    }
}

/// Scans delta_2 across `delta_2_grid`, diagonalizing the squeezed-frame
/// Hamiltonian at each point and following the two levels adiabatically
/// connected to |e1 g2, 0> and |g1 e2, 0> by maximum eigenvector overlap
/// with the previous grid point. Reports the minimum gap between them,
/// refined by a local quadratic fit of the squared gap (exact for an
/// isolated two-level crossing).
pub fn scan_avoided_crossing(
    p: &SystemParams,
    hs: HilbertSpace,
    delta_2_grid: &[f64],
) -> Result<CrossingScan> {
    if delta_2_grid.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "crossing scan needs at least 3 grid points, got {}",
            delta_2_grid.len()
        )));
    }
    if delta_2_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "crossing scan grid must be strictly increasing".into(),
        ));
    }

    let dim = hs.dim();
    let idx_eg = hs.index(AtomPair::EG, 0);
    let idx_ge = hs.index(AtomPair::GE, 0);
    let mut ref_eg: Option<nd::Array1<C64>> = None;
    let mut ref_ge: Option<nd::Array1<C64>> = None;
    let mut level_pairs = Vec::with_capacity(delta_2_grid.len());

    for (i, &d2) in delta_2_grid.iter().enumerate() {
        let h = hamiltonian_squeezed(&p.with_delta_2(d2), hs);
        let eig = eig_hermitian(&h)?;
        let overlap = |reference: &Option<nd::Array1<C64>>, basis_idx: usize, k: usize| -> f64 {
            match reference {
                None => eig.vectors[(basis_idx, k)].norm_sqr(),
                Some(v) => {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..dim {
                        acc += v[j].conj() * eig.vectors[(j, k)];
                    }
                    acc.norm_sqr()
                }
            }
        };
        let pick = |reference: &Option<nd::Array1<C64>>,
                    basis_idx: usize,
                    exclude: Option<usize>|
         -> (usize, f64) {
            let mut best = (usize::MAX, -1.0);
            for k in 0..dim {
                if Some(k) == exclude {
                    continue;
                }
                let o = overlap(reference, basis_idx, k);
                if o > best.1 {
                    best = (k, o);
                }
            }
            best
        };

        let (k_eg, o_eg) = pick(&ref_eg, idx_eg, None);
        if o_eg < 0.5 {
            return Err(Error::TrackingAmbiguous {
                index: i,
                overlap: o_eg,
            });
        }
        let (k_ge, o_ge) = pick(&ref_ge, idx_ge, Some(k_eg));
        if o_ge < 0.5 {
            return Err(Error::TrackingAmbiguous {
                index: i,
                overlap: o_ge,
            });
        }
        ref_eg = Some(eig.vectors.column(k_eg).to_owned());
        ref_ge = Some(eig.vectors.column(k_ge).to_owned());
        level_pairs.push((eig.values[k_eg], eig.values[k_ge]));
    }

    let gaps: Vec<f64> = level_pairs.iter().map(|(a, b)| (a - b).abs()).collect();
    let mut j_min = 0;
    for (j, g) in gaps.iter().enumerate() {
        if *g < gaps[j_min] {
            j_min = j;
        }
    }
    if j_min == 0 || j_min == gaps.len() - 1 {
        return Err(Error::Precondition(format!(
            "minimum gap sits at the scan boundary (index {j_min}); widen the grid"
        )));
    }
    if gaps[j_min] == 0.0 {
        return Err(Error::Convergence(format!(
            "levels exactly degenerate at delta_2 = {}",
            delta_2_grid[j_min]
        )));
    }

    // quadratic fit of gap^2 through the bracketing triple
    let (x0, x1, x2) = (
        delta_2_grid[j_min - 1],
        delta_2_grid[j_min],
        delta_2_grid[j_min + 1],
    );
    let (y0, y1, y2) = (
        gaps[j_min - 1] * gaps[j_min - 1],
        gaps[j_min] * gaps[j_min],
        gaps[j_min + 1] * gaps[j_min + 1],
    );
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curv = (d2 - d1) / (x2 - x0);
    let (min_gap, min_gap_location) = if curv > 0.0 {
        let x_star = (0.5 * (x0 + x1) - d1 / (2.0 * curv)).clamp(x0, x2);
        let y_star = y0 + d1 * (x_star - x0) + curv * (x_star - x0) * (x_star - x1);
        if y_star > 0.0 {
            (y_star.sqrt(), x_star)
        } else {
            (gaps[j_min], x1)
        }
    } else {
        (gaps[j_min], x1)
    };

    Ok(CrossingScan {
        scan_values: delta_2_grid.to_vec(),
        level_pairs,
        min_gap,
        min_gap_location,
    })
}

/// Uniform grid of `n` points over [center - half_width, center + half_width].
pub fn symmetric_grid(center: f64, half_width: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| center - half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
        .collect()
}
