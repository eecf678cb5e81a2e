//! Static Josephson circuit model of the flux qubit and its tunable
//! coupler: total Josephson energy, persistent-current minima, junction
//! inductances, and the mutual inductance between qubit and oscillator.
//!
//! Units are fixed at nA / pH / fF / GHz. The qubit loop holds three
//! junctions in the upper branch (the third scaled by a3) closed by the
//! coupler, which enters as one effective junction of critical current
//! a_c(n_phi_c) I_c. Energies are expressed in units of E_J = Phi0 I_c / 2pi.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{FLUX_QUANTUM_WB, HBAR_JS, PLANCK_JS};
use crate::error::{Error, Result};

/// Coupler topology: four parallel junctions, or a two-junction SQUID.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplerKind {
    FourJunction,
    Squid,
}

/// Circuit parameters of the qubit-coupler loop and its oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerCircuit {
    /// Junction critical current, nA.
    pub i_c: f64,
    /// Critical-current ratio of the third (small) qubit junction.
    pub a3: f64,
    pub coupler_kind: CouplerKind,
    /// Qubit-loop to coupler-loop area ratio n_phi_q : n_phi_c.
    pub area_ratio: f64,
    /// Lead inductance of the LC oscillator, pH.
    pub l0: f64,
    /// Oscillator capacitance, fF.
    pub cap: f64,
}

impl CouplerCircuit {
    pub fn validate(&self) -> Result<()> {
        if !(self.i_c > 0.0) || !(self.a3 > 0.0 && self.a3 < 1.0) || !(self.area_ratio > 0.0) {
            return Err(Error::InvalidParams(format!(
                "require i_c > 0, 0 < a3 < 1, area_ratio > 0; got ({}, {}, {})",
                self.i_c, self.a3, self.area_ratio
            )));
        }
        Ok(())
    }

    fn coupler_ratio_at(&self, n_phi_q: f64) -> f64 {
        coupler_ratio(self.coupler_kind, n_phi_q / self.area_ratio)
    }
}

/// Default four-junction coupler with the tabulated junction parameters.
impl Default for CouplerCircuit {
    fn default() -> Self {
        Self {
            i_c: 460.0,
            a3: 0.705,
            coupler_kind: CouplerKind::FourJunction,
            area_ratio: 24.0,
            l0: 20.0,
            cap: 2000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    L,
    R,
}

/// One local minimum of the total Josephson energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub branch: Branch,
    /// Energy at the minimum, in units of E_J.
    pub energy: f64,
    pub n_phi_q: f64,
    pub delta_i: f64,
}

impl PhaseConfig {
    /// Phase across the upper branch of the qubit loop.
    pub fn phi_u(&self) -> f64 {
        self.phi1 + self.phi2 + self.phi3
    }

    /// Phase across the effective coupler junction.
    pub fn phi_coupler(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.n_phi_q - self.phi_u()
    }
}

/// Critical-current ratio of the coupler as a function of its normalized
/// flux bias: 4 cos(2 pi n) cos(pi n) for four parallel junctions,
/// 2 cos(pi n) for a SQUID. May be negative; callers interpret sign.
pub fn coupler_ratio(kind: CouplerKind, n_phi_c: f64) -> f64 {
    use std::f64::consts::PI;
    match kind {
        CouplerKind::FourJunction => 4.0 * (2.0 * PI * n_phi_c).cos() * (PI * n_phi_c).cos(),
        CouplerKind::Squid => 2.0 * (PI * n_phi_c).cos(),
    }
}

/// Bias-dependent Josephson inductance Phi0 / (2 pi sqrt(i_cm^2 - i_b^2))
/// of a junction with critical current i_cm carrying current i_b (nA -> pH).
pub fn coupler_inductance(i_cm: f64, i_b: f64) -> Result<f64> {
    if i_b.abs() >= i_cm {
        return Err(Error::CriticalCurrentExceeded { i_b, i_cm });
    }
    let denom = ((i_cm * 1e-9).powi(2) - (i_b * 1e-9).powi(2)).sqrt();
    Ok(FLUX_QUANTUM_WB / (2.0 * std::f64::consts::PI * denom) * 1e12)
}

/// Total Josephson energy in units of E_J:
/// -[cos phi1 + cos phi2 + a3 cos phi3 + a_c cos(2 pi n_phi_q - phi_u)]
/// - (delta_i / i_c)(phi_u + pi n_phi_q).
pub fn total_josephson_energy(
    c: &CouplerCircuit,
    phases: (f64, f64, f64),
    n_phi_q: f64,
    delta_i: f64,
) -> f64 {
    use std::f64::consts::PI;
    let (p1, p2, p3) = phases;
    let phi_u = p1 + p2 + p3;
    let a_c = c.coupler_ratio_at(n_phi_q);
    let phi_x = phi_u + PI * n_phi_q;
    -(p1.cos() + p2.cos() + c.a3 * p3.cos() + a_c * (2.0 * PI * n_phi_q - phi_u).cos())
        - delta_i / c.i_c * phi_x
}

fn energy_gradient(c: &CouplerCircuit, phi: &Vector3<f64>, n_phi_q: f64, delta_i: f64) -> Vector3<f64> {
    use std::f64::consts::PI;
    let phi_u = phi.sum();
    let a_c = c.coupler_ratio_at(n_phi_q);
    let coupler_term = a_c * (2.0 * PI * n_phi_q - phi_u).sin();
    let tilt = delta_i / c.i_c;
    Vector3::new(
        phi[0].sin() - coupler_term - tilt,
        phi[1].sin() - coupler_term - tilt,
        c.a3 * phi[2].sin() - coupler_term - tilt,
    )
}

fn numerical_hessian(c: &CouplerCircuit, phi: &Vector3<f64>, n_phi_q: f64, delta_i: f64) -> Matrix3<f64> {
    let h = 1e-6;
    let mut m = Matrix3::zeros();
    for k in 0..3 {
        let mut fwd = *phi;
        let mut bwd = *phi;
        fwd[k] += h;
        bwd[k] -= h;
        let gf = energy_gradient(c, &fwd, n_phi_q, delta_i);
        let gb = energy_gradient(c, &bwd, n_phi_q, delta_i);
        let col = (gf - gb) / (2.0 * h);
        m.set_column(k, &col);
    }
    // symmetrize
    (m + m.transpose()) * 0.5
}

const GRAD_TOL: f64 = 1e-11;

/// Damped Newton descent of the total Josephson energy from a seed.
fn minimize_from(
    c: &CouplerCircuit,
    seed: Vector3<f64>,
    n_phi_q: f64,
    delta_i: f64,
) -> Result<(Vector3<f64>, f64)> {
    let energy = |phi: &Vector3<f64>| {
        total_josephson_energy(c, (phi[0], phi[1], phi[2]), n_phi_q, delta_i)
    };
    let mut x = seed;
    let mut e = energy(&x);
    for _ in 0..200 {
        let g = energy_gradient(c, &x, n_phi_q, delta_i);
        if g.norm() < GRAD_TOL {
            break;
        }
        let h = numerical_hessian(c, &x, n_phi_q, delta_i);
        // damp until positive-definite; fall back to steepest descent
        let mut lambda = 0.0;
        let mut step = loop {
            let damped = h + Matrix3::identity() * lambda;
            if let Some(chol) = damped.cholesky() {
                break chol.solve(&(-g));
            }
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
            if lambda > 1e8 {
                break -g;
            }
        };
        // cap the step so the descent cannot hop basins or 2 pi sheets
        let max_step = 0.3;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        if g.norm() < 1e-6 {
            // endgame: energy differences are below f64 resolution, so take
            // plain Newton steps and let the gradient decide convergence
            x += step;
            e = energy(&x);
            continue;
        }
        // backtracking line search
        let mut t = 1.0;
        let slope = g.dot(&step);
        let mut stalled = true;
        while t >= 1e-8 {
            let cand = x + step * t;
            let e_cand = energy(&cand);
            if e_cand <= e + 1e-4 * t * slope {
                x = cand;
                e = e_cand;
                stalled = false;
                break;
            }
            t *= 0.5;
        }
        if stalled {
            break;
        }
    }
    let g = energy_gradient(c, &x, n_phi_q, delta_i);
    if g.norm() > 1e-9 {
        return Err(Error::NoConvergence(format!(
            "phase minimizer stalled with |grad| = {:.3e} at n_phi_q = {n_phi_q}",
            g.norm()
        )));
    }
    // canonicalize to the principal sheet
    for k in 0..3 {
        x[k] = wrap_phase(x[k]);
    }
    Ok((x, energy(&x)))
}

fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::PI;
    let mut p = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

fn nearest_half_integer(n_phi_q: f64) -> f64 {
    (n_phi_q - 0.5).round() + 0.5
}

/// Width of the flux window around a half-integer bias inside which the
/// model guarantees two wells.
pub const VALIDITY_WINDOW: f64 = 0.05;

fn check_window(n_phi_q: f64) -> Result<()> {
    if (n_phi_q - nearest_half_integer(n_phi_q)).abs() >= VALIDITY_WINDOW {
        return Err(Error::OutsideValidityWindow(n_phi_q));
    }
    Ok(())
}

/// The two persistent-current minima at a flux bias near a half-integer.
///
/// Branch labels follow the sign of the circulating current (sin phi1):
/// positive circulation is `L`.
pub fn find_persistent_states(
    c: &CouplerCircuit,
    n_phi_q: f64,
    delta_i: f64,
) -> Result<(PhaseConfig, PhaseConfig)> {
    c.validate()?;
    check_window(n_phi_q)?;
    let seeds = [
        Vector3::new(0.3, 0.3, 0.6),
        Vector3::new(-0.3, -0.3, -0.6),
    ];
    let mut found = Vec::with_capacity(2);
    for seed in seeds {
        let (x, e) = minimize_from(c, seed, n_phi_q, delta_i)?;
        found.push((x, e));
    }
    if (found[0].0 - found[1].0).norm() < 1e-6 {
        // both seeds drained into one basin; retry from the mirror image of
        // the well that was found before declaring the wells merged
        let mirror = -found[0].0;
        let (x, e) = minimize_from(c, mirror, n_phi_q, delta_i)?;
        if (x - found[0].0).norm() < 1e-6 {
            return Err(Error::WellsMerged(n_phi_q));
        }
        found[1] = (x, e);
    }
    let config = |x: Vector3<f64>, e: f64| PhaseConfig {
        phi1: x[0],
        phi2: x[1],
        phi3: x[2],
        // sign convention: |L> is the branch whose qubit-coupler inductance
        // decreases with increasing flux bias
        branch: if x[0].sin() < 0.0 { Branch::L } else { Branch::R },
        energy: e,
        n_phi_q,
        delta_i,
    };
    let a = config(found[0].0, found[0].1);
    let b = config(found[1].0, found[1].1);
    if a.branch == b.branch {
        return Err(Error::WellsMerged(n_phi_q));
    }
    Ok(if a.branch == Branch::L { (a, b) } else { (b, a) })
}

fn junction_inductance(i_c_eff: f64, cos_phi: f64, name: &'static str) -> Result<f64> {
    if cos_phi == 0.0 || i_c_eff <= 0.0 {
        return Err(Error::NonPositiveInductance(name));
    }
    // signed: a junction biased past |pi/2| contributes a negative
    // differential inductance to the series branch
    Ok(FLUX_QUANTUM_WB / (2.0 * std::f64::consts::PI * i_c_eff * 1e-9 * cos_phi) * 1e12)
}

/// Inductance of the effective coupler junction at a minimum, pH.
pub fn coupler_junction_inductance(c: &CouplerCircuit, config: &PhaseConfig) -> Result<f64> {
    let a_c = c.coupler_ratio_at(config.n_phi_q);
    let l = junction_inductance(a_c * c.i_c, config.phi_coupler().cos(), "coupler")?;
    if l <= 0.0 {
        return Err(Error::NonPositiveInductance("coupler"));
    }
    Ok(l)
}

/// Inductance across the qubit and coupler at a minimum: the coupler
/// junction in parallel with the series upper branch, pH.
///
/// Individual series junctions may sit past |pi/2| near the window edges;
/// the parallel combination passes smoothly through the resulting pole and
/// must itself stay positive.
pub fn qubit_coupler_inductance(c: &CouplerCircuit, config: &PhaseConfig) -> Result<f64> {
    let l1 = junction_inductance(c.i_c, config.phi1.cos(), "first")?;
    let l2 = junction_inductance(c.i_c, config.phi2.cos(), "second")?;
    let l3 = junction_inductance(c.a3 * c.i_c, config.phi3.cos(), "third")?;
    let l4 = coupler_junction_inductance(c, config)?;
    let series = l1 + l2 + l3;
    let l_qc = l4 * series / (series + l4);
    if !(l_qc > 0.0) {
        return Err(Error::NonPositiveInductance("parallel combination"));
    }
    Ok(l_qc)
}

/// Rotates branch inductances into the qubit energy eigenbasis:
/// l_g = cos^2(theta/2) l_L + sin^2(theta/2) l_R and the complement.
pub fn eigenbasis_inductances(l_l: f64, l_r: f64, theta: f64) -> (f64, f64) {
    let c2 = (theta / 2.0).cos().powi(2);
    let s2 = 1.0 - c2;
    (c2 * l_l + s2 * l_r, s2 * l_l + c2 * l_r)
}

/// Mutual inductance per branch from the shift of phi_u under a bias
/// current +-delta_i, converted through the flux derivative of phi_u:
/// M = Phi0 |delta n_phi_q / delta I|.
pub fn mutual_inductance_branches(
    c: &CouplerCircuit,
    n_phi_q: f64,
    delta_i: f64,
) -> Result<(f64, f64)> {
    if !(delta_i > 0.0) {
        return Err(Error::InvalidParams("delta_i must be positive".into()));
    }
    let (l0, r0) = find_persistent_states(c, n_phi_q, 0.0)?;
    let h = 1e-4;
    let m_for = |center: &PhaseConfig| -> Result<f64> {
        let seed = Vector3::new(center.phi1, center.phi2, center.phi3);
        let track = |nq: f64, di: f64| -> Result<f64> {
            let (x, _) = minimize_from(c, seed, nq, di)?;
            if (x - seed).norm() > 1.0 {
                return Err(Error::WellsMerged(nq));
            }
            Ok(x.sum())
        };
        let shift = (track(n_phi_q, delta_i)? - track(n_phi_q, -delta_i)?) / 2.0;
        let dphi_dn = (track(n_phi_q + h, 0.0)? - track(n_phi_q - h, 0.0)?) / (2.0 * h);
        let delta_n = shift / dphi_dn;
        Ok(FLUX_QUANTUM_WB * (delta_n / (delta_i * 1e-9)).abs() * 1e12)
    };
    Ok((m_for(&l0)?, m_for(&r0)?))
}

/// Branch-averaged mutual inductance, pH.
pub fn mutual_inductance(c: &CouplerCircuit, n_phi_q: f64, delta_i: f64) -> Result<f64> {
    let (ml, mr) = mutual_inductance_branches(c, n_phi_q, delta_i)?;
    Ok(0.5 * (ml + mr))
}

/// Maximum persistent current from the flux slope of the well energy
/// difference, nA.
pub fn persistent_current(c: &CouplerCircuit, n_phi_q: f64) -> Result<f64> {
    let h = 1e-4;
    let tilt = |nq: f64| -> Result<f64> {
        let (l, r) = find_persistent_states(c, nq, 0.0)?;
        Ok(l.energy - r.energy)
    };
    let slope = (tilt(n_phi_q + h)? - tilt(n_phi_q - h)?) / (2.0 * h);
    Ok(c.i_c * slope.abs() / (4.0 * std::f64::consts::PI))
}

/// Energy bias epsilon/2pi in GHz from the flux offset to the nearest
/// half-integer: 2 I_p Phi0 (n_phi_q - n_phi_q0) / h.
pub fn epsilon_from_flux(i_p_na: f64, n_phi_q: f64) -> f64 {
    let offset = n_phi_q - nearest_half_integer(n_phi_q);
    2.0 * i_p_na * 1e-9 * FLUX_QUANTUM_WB * offset / PLANCK_JS / 1e9
}

/// LC resonance 1 / (2 pi sqrt((l0 + l_qc) cap)) in GHz (pH, fF inputs).
pub fn oscillator_frequency(l0: f64, l_qc: f64, cap: f64) -> f64 {
    let l = (l0 + l_qc) * 1e-12;
    let c = cap * 1e-15;
    1.0 / (2.0 * std::f64::consts::PI * (l * c).sqrt()) / 1e9
}

/// Zero-point current fluctuation sqrt(hbar omega_o / 2 (l0 + l_qc)) in nA.
pub fn zero_point_current(l0: f64, l_qc: f64, omega_o_ghz: f64) -> f64 {
    let l = (l0 + l_qc) * 1e-12;
    let omega = 2.0 * std::f64::consts::PI * omega_o_ghz * 1e9;
    (HBAR_JS * omega / (2.0 * l)).sqrt() * 1e9
}

/// Branch inductances and mutual inductance at one flux bias.
#[derive(Debug, Clone, Copy)]
pub struct InductanceSet {
    pub l_c: f64,
    pub l_qc_l: f64,
    pub l_qc_r: f64,
    pub l_qc_g: f64,
    pub l_qc_e: f64,
    pub m: f64,
    pub n_phi_q: f64,
    pub delta_i: f64,
}

/// One point of a coupler sweep: the two minima plus derived inductances.
#[derive(Debug, Clone, Copy)]
pub struct CouplerSweepPoint {
    pub n_phi_q: f64,
    pub left: PhaseConfig,
    pub right: PhaseConfig,
    pub set: InductanceSet,
    pub m_l: f64,
    pub m_r: f64,
}

/// Inductances at one bias; `theta` rotates the branch values into the
/// qubit eigenbasis.
pub fn inductance_set(
    c: &CouplerCircuit,
    n_phi_q: f64,
    delta_i: f64,
    theta: f64,
) -> Result<InductanceSet> {
    let (l, r) = find_persistent_states(c, n_phi_q, 0.0)?;
    let l_qc_l = qubit_coupler_inductance(c, &l)?;
    let l_qc_r = qubit_coupler_inductance(c, &r)?;
    let (l_qc_g, l_qc_e) = eigenbasis_inductances(l_qc_l, l_qc_r, theta);
    let l_c = 0.5 * (coupler_junction_inductance(c, &l)? + coupler_junction_inductance(c, &r)?);
    let m = mutual_inductance(c, n_phi_q, delta_i)?;
    Ok(InductanceSet {
        l_c,
        l_qc_l,
        l_qc_r,
        l_qc_g,
        l_qc_e,
        m,
        n_phi_q,
        delta_i,
    })
}

/// Sweeps the flux bias across the two-well window.
pub fn coupler_sweep(
    c: &CouplerCircuit,
    n_lo: f64,
    n_hi: f64,
    steps: usize,
    delta_i: f64,
) -> Result<Vec<CouplerSweepPoint>> {
    if steps < 2 || !(n_hi > n_lo) {
        return Err(Error::InvalidParams("need n_hi > n_lo and >= 2 steps".into()));
    }
    let biases: Vec<f64> = (0..steps)
        .map(|k| n_lo + (n_hi - n_lo) * k as f64 / (steps - 1) as f64)
        .collect();
    biases
        .par_iter()
        .map(|&nq| {
            let (left, right) = find_persistent_states(c, nq, 0.0)?;
            let set = inductance_set(c, nq, delta_i, std::f64::consts::FRAC_PI_2)?;
            let (m_l, m_r) = mutual_inductance_branches(c, nq, delta_i)?;
            Ok(CouplerSweepPoint {
                n_phi_q: nq,
                left,
                right,
                set,
                m_l,
                m_r,
            })
        })
        .collect()
}

/// CSV export with columns `n_phi_q,phi1_L,phi2_L,phi3_L,phi1_R,phi2_R,
/// phi3_R,l_c,l_qc_L,l_qc_R,m`.
pub fn write_coupler_csv<P: AsRef<Path>>(path: P, points: &[CouplerSweepPoint]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "n_phi_q,phi1_L,phi2_L,phi3_L,phi1_R,phi2_R,phi3_R,l_c,l_qc_L,l_qc_R,m"
    )?;
    for p in points {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.n_phi_q,
            p.left.phi1,
            p.left.phi2,
            p.left.phi3,
            p.right.phi1,
            p.right.phi2,
            p.right.phi3,
            p.set.l_c,
            p.set.l_qc_l,
            p.set.l_qc_r,
            p.set.m
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn reference_circuit() -> CouplerCircuit {
        CouplerCircuit::default()
    }

    #[test]
    fn coupler_ratio_values() {
        assert_abs_diff_eq!(coupler_ratio(CouplerKind::FourJunction, 0.0), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            coupler_ratio(CouplerKind::FourJunction, 0.25),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            coupler_ratio(CouplerKind::Squid, 1.0 / 3.0),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn junction_inductance_values() {
        let l = coupler_inductance(460.0, 0.0).unwrap();
        assert_abs_diff_eq!(l, 715.45, epsilon = 0.01);
        // even in the bias current
        assert_abs_diff_eq!(
            coupler_inductance(460.0, 120.0).unwrap(),
            coupler_inductance(460.0, -120.0).unwrap(),
            epsilon = 1e-12
        );
        assert!(matches!(
            coupler_inductance(460.0, 460.0),
            Err(Error::CriticalCurrentExceeded { .. })
        ));
    }

    #[test]
    fn energy_at_zero_phases() {
        let c = reference_circuit();
        let e = total_josephson_energy(&c, (0.0, 0.0, 0.0), 0.0, 0.0);
        assert_abs_diff_eq!(e, -(2.0 + 0.705 + 4.0), epsilon = 1e-12);
    }

    #[test]
    fn energy_is_periodic_without_tilt() {
        let c = reference_circuit();
        let base = (0.31, -0.12, 0.47);
        let e0 = total_josephson_energy(&c, base, 0.48, 0.0);
        for k in 0..3 {
            let mut shifted = [base.0, base.1, base.2];
            shifted[k] += 2.0 * PI;
            let e =
                total_josephson_energy(&c, (shifted[0], shifted[1], shifted[2]), 0.48, 0.0);
            assert_abs_diff_eq!(e, e0, epsilon = 1e-10);
        }
    }

    #[test]
    fn fluxoid_chain_current_identity() {
        // four equal junctions with fluxoid-quantized phases sum to the
        // single effective junction form
        let mut s = 12345u64;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) as f64) / (u32::MAX as f64)
        };
        for _ in 0..50 {
            let phi_a = (next() - 0.5) * 2.0 * PI;
            let n_c = (next() - 0.5) * 0.2;
            let sum = (phi_a).sin()
                + (phi_a + 2.0 * PI * n_c).sin()
                + (phi_a + 4.0 * PI * n_c).sin()
                + (phi_a + 6.0 * PI * n_c).sin();
            let closed =
                4.0 * (phi_a + 3.0 * PI * n_c).sin() * (2.0 * PI * n_c).cos() * (PI * n_c).cos();
            assert_abs_diff_eq!(sum, closed, epsilon = 1e-12);
        }
    }

    #[test]
    fn persistent_minima_at_degeneracy_point() {
        let c = reference_circuit();
        let (l, r) = find_persistent_states(&c, 0.5, 0.0).unwrap();
        // mirror-symmetric wells with equal energy
        assert_abs_diff_eq!(l.phi1, -r.phi1, epsilon = 1e-7);
        assert_abs_diff_eq!(l.phi2, -r.phi2, epsilon = 1e-7);
        assert_abs_diff_eq!(l.phi3, -r.phi3, epsilon = 1e-7);
        assert_abs_diff_eq!(l.energy, r.energy, epsilon = 1e-10);
        assert!(l.branch == Branch::L && r.branch == Branch::R);

        // gradient vanishes and the Hessian is positive-definite
        for cfg in [&l, &r] {
            let phi = Vector3::new(cfg.phi1, cfg.phi2, cfg.phi3);
            let g = energy_gradient(&c, &phi, 0.5, 0.0);
            assert!(g.norm() < 1e-9);
            let h = numerical_hessian(&c, &phi, 0.5, 0.0);
            let eig = h.symmetric_eigen();
            for ev in eig.eigenvalues.iter() {
                assert!(*ev > 0.0, "Hessian eigenvalue {ev} not positive");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = reference_circuit();
        let phi = Vector3::new(0.21, 0.33, 0.52);
        let g = energy_gradient(&c, &phi, 0.49, 5.0);
        let h = 1e-6;
        for k in 0..3 {
            let mut fwd = phi;
            let mut bwd = phi;
            fwd[k] += h;
            bwd[k] -= h;
            let num = (total_josephson_energy(&c, (fwd[0], fwd[1], fwd[2]), 0.49, 5.0)
                - total_josephson_energy(&c, (bwd[0], bwd[1], bwd[2]), 0.49, 5.0))
                / (2.0 * h);
            assert_abs_diff_eq!(g[k], num, epsilon = 1e-8);
        }
    }

    #[test]
    fn well_tilt_crosses_linearly() {
        let c = reference_circuit();
        let biases: Vec<f64> = (0..9).map(|k| 0.46 + 0.01 * k as f64).collect();
        let tilts: Vec<f64> = biases
            .iter()
            .map(|&nq| {
                let (l, r) = find_persistent_states(&c, nq, 0.0).unwrap();
                l.energy - r.energy
            })
            .collect();
        // zero at the degeneracy point, linear slope elsewhere
        assert_abs_diff_eq!(tilts[4], 0.0, epsilon = 1e-9);
        let slope = (tilts[8] - tilts[0]) / 0.08;
        for k in 0..9 {
            let lin = slope * (biases[k] - 0.5);
            assert!((tilts[k] - lin).abs() < 0.01 * slope.abs());
        }
        // slope gives a persistent current of a few hundred nA
        let i_p = persistent_current(&c, 0.5).unwrap();
        assert!(i_p > 100.0 && i_p < 500.0, "I_p = {i_p} nA");
        let from_chord = c.i_c * slope.abs() / (4.0 * PI);
        assert!((i_p - from_chord).abs() / from_chord < 0.02);
    }

    #[test]
    fn wells_merge_outside_window() {
        let c = reference_circuit();
        assert!(matches!(
            find_persistent_states(&c, 0.2, 0.0),
            Err(Error::OutsideValidityWindow(_))
        ));
    }

    #[test]
    fn inductance_closed_form_at_zero_phases() {
        let c = reference_circuit();
        let cfg = PhaseConfig {
            phi1: 0.0,
            phi2: 0.0,
            phi3: 0.0,
            branch: Branch::L,
            energy: 0.0,
            n_phi_q: 0.0,
            delta_i: 0.0,
        };
        let lj = coupler_inductance(c.i_c, 0.0).unwrap();
        let l3 = lj / c.a3;
        let l4 = lj / c.coupler_ratio_at(0.0);
        let series = 2.0 * lj + l3;
        let want = l4 * series / (series + l4);
        let got = qubit_coupler_inductance(&c, &cfg).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        assert!(got < l4);
    }

    #[test]
    fn branch_inductances_are_linear_with_opposite_slopes() {
        let c = reference_circuit();
        let points = coupler_sweep(&c, 0.46, 0.54, 17, 10.0).unwrap();
        let x: Vec<f64> = points.iter().map(|p| p.n_phi_q - 0.5).collect();
        let l_l: Vec<f64> = points.iter().map(|p| p.set.l_qc_l).collect();
        let l_r: Vec<f64> = points.iter().map(|p| p.set.l_qc_r).collect();

        let lsq = |ys: &[f64]| {
            let n = ys.len() as f64;
            let sx: f64 = x.iter().sum();
            let sy: f64 = ys.iter().sum();
            let sxx: f64 = x.iter().map(|v| v * v).sum();
            let sxy: f64 = x.iter().zip(ys).map(|(a, b)| a * b).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            let icept = (sy - slope * sx) / n;
            (slope, icept)
        };
        let (s_l, b_l) = lsq(&l_l);
        let (s_r, _) = lsq(&l_r);
        assert!(s_l < 0.0, "L-branch slope {s_l}");
        assert!(s_r > 0.0, "R-branch slope {s_r}");
        assert!((s_l.abs() - s_r.abs()).abs() / s_l.abs() < 0.25);

        // approximately linear near the degeneracy point: line-fit residual
        // over the inner half-window stays well below the span (the edges
        // pick up visible curvature as the small junction nears |pi/2|)
        let inner: Vec<usize> = (3..=13).collect();
        let (s_in, b_in) = {
            let xs: Vec<f64> = inner.iter().map(|&k| x[k]).collect();
            let ys: Vec<f64> = inner.iter().map(|&k| l_l[k]).collect();
            let n = xs.len() as f64;
            let sx: f64 = xs.iter().sum();
            let sy: f64 = ys.iter().sum();
            let sxx: f64 = xs.iter().map(|v| v * v).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            ((slope), (sy - slope * sx) / n)
        };
        let inner_span = (l_l[3] - l_l[13]).abs();
        for &k in &inner {
            assert!((l_l[k] - (b_in + s_in * x[k])).abs() < 0.15 * inner_span);
        }
        let _ = b_l;

        // branches monotone in opposite directions, equal at the
        // degeneracy point
        for w in l_l.windows(2) {
            assert!(w[1] < w[0]);
        }
        for w in l_r.windows(2) {
            assert!(w[1] > w[0]);
        }
        let mid = &points[8];
        assert_abs_diff_eq!(mid.set.l_qc_l, mid.set.l_qc_r, epsilon = 1e-3);
    }

    #[test]
    fn eigenbasis_rotation() {
        let (g, e) = eigenbasis_inductances(300.0, 340.0, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(g, 320.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e, 320.0, epsilon = 1e-12);
        let (g0, e0) = eigenbasis_inductances(300.0, 340.0, 0.0);
        assert_eq!((g0, e0), (300.0, 340.0));
        // trace preservation
        for theta in [0.3, 1.1, 2.0, 2.9] {
            let (a, b) = eigenbasis_inductances(311.0, 347.0, theta);
            assert_abs_diff_eq!(a + b, 311.0 + 347.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenbasis_curves_are_lambda_and_v_shaped() {
        // linear branch inductances versus bias produce a peaked l_g and a
        // dipped l_e through the mixing angle
        let delta = 0.43;
        let l_at = |eps: f64| {
            let l_l = 320.0 - 40.0 * eps;
            let l_r = 320.0 + 40.0 * eps;
            let theta = crate::states::qubit_mixing_angle(delta, eps).unwrap();
            eigenbasis_inductances(l_l, l_r, theta)
        };
        let (g_mid, e_mid) = l_at(0.0);
        for eps in [-1.0, -0.4, 0.4, 1.0] {
            let (g, e) = l_at(eps);
            assert!(g < g_mid, "l_g not peaked at eps = {eps}");
            assert!(e > e_mid, "l_e not dipped at eps = {eps}");
        }
    }

    #[test]
    fn mutual_inductance_tracks_coupler_inductance() {
        let c = reference_circuit();
        let set = inductance_set(&c, 0.5, 10.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((set.m - set.l_c).abs() / set.l_c < 0.05, "M = {}, L_c = {}", set.m, set.l_c);

        let (m_l, m_r) = mutual_inductance_branches(&c, 0.505, 10.0).unwrap();
        let m = 0.5 * (m_l + m_r);
        assert!((m_l - m_r).abs() / m < 0.01);

        // discretization convergence in delta_i
        let m5 = mutual_inductance(&c, 0.505, 5.0).unwrap();
        assert!((m5 - m).abs() / m < 0.005);
    }

    #[test]
    fn sweep_is_smooth() {
        let c = reference_circuit();
        let points = coupler_sweep(&c, 0.47, 0.53, 13, 10.0).unwrap();
        for w in points.windows(2) {
            assert!((w[1].left.phi_u() - w[0].left.phi_u()).abs() < 0.2);
            assert!((w[1].set.m - w[0].set.m).abs() / w[0].set.m < 0.05);
        }
    }

    #[test]
    fn oscillator_formulas() {
        let f = oscillator_frequency(20.0, 380.0, 2000.0);
        let f2 = oscillator_frequency(20.0, 780.0, 2000.0);
        assert_abs_diff_eq!(f / f2, 2.0f64.sqrt(), epsilon = 1e-12);
        // l0 = 0 limit is finite and set by the remaining inductance
        let f3 = oscillator_frequency(0.0, 400.0, 2000.0);
        assert_abs_diff_eq!(f3, f, epsilon = 1e-12);

        let i1 = zero_point_current(20.0, 380.0, 6.3);
        let i2 = zero_point_current(20.0, 380.0, 12.6);
        assert_abs_diff_eq!(i2 / i1, 2.0f64.sqrt(), epsilon = 1e-12);
        let i3 = zero_point_current(80.0, 1520.0, 6.3);
        assert_abs_diff_eq!(i1 / i3, 2.0, epsilon = 1e-12);
        // tens of nA for realistic values
        assert!(i1 > 10.0 && i1 < 100.0, "I_zpf = {i1} nA");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn minima_have_positive_definite_hessians(nq in 0.46f64..0.54, di in -8.0f64..8.0) {
            let c = reference_circuit();
            match find_persistent_states(&c, nq, di) {
                Ok((l, r)) => {
                    for cfg in [l, r] {
                        let phi = Vector3::new(cfg.phi1, cfg.phi2, cfg.phi3);
                        let h = numerical_hessian(&c, &phi, nq, di);
                        let eig = h.symmetric_eigen();
                        for ev in eig.eigenvalues.iter() {
                            prop_assert!(*ev > 0.0);
                        }
                    }
                }
                Err(Error::WellsMerged(_)) => {}
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
            }
        }
    }
}
