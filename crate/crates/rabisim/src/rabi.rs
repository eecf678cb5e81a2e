//! Qubit-oscillator Hamiltonians in the persistent-current basis.
//!
//! All Hamiltonians are stored as H/h in GHz, so tabulated circuit
//! parameters plug in directly and hbar never appears. The model is
//!
//!   H/h = -(1/2)(delta sigma_x + epsilon sigma_z)
//!         + omega_o (a†a + 1/2) + g sigma_z (a + a†),
//!
//! optionally augmented with the quadratic-field term c_a2 g (a + a†)^2
//! produced by the coupler nonlinearity. That term is removable by a
//! Bogoliubov (squeezing) transformation which renormalizes
//! (omega_o, g) -> (omega_o', g').

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::consts::PLANCK_JS;
use crate::error::{Error, Result};
use crate::fock::{pauli, qubit_identity, CMatrix, FockSpace, PauliAxis};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Model parameters, all in GHz (frequency convention: delta = Delta/2pi and
/// so on).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    pub delta: f64,
    pub omega_o: f64,
    pub g: f64,
    pub epsilon: f64,
}

impl RabiParams {
    pub fn new(delta: f64, omega_o: f64, g: f64) -> Result<Self> {
        if !(delta > 0.0) || !(omega_o > 0.0) || !(g >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "require delta > 0, omega_o > 0, g >= 0; got ({delta}, {omega_o}, {g})"
            )));
        }
        Ok(Self {
            delta,
            omega_o,
            g,
            epsilon: 0.0,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Dimensionless displacement g / omega_o.
    pub fn alpha(&self) -> f64 {
        self.g / self.omega_o
    }
}

/// Dimensionless coupler-nonlinearity coefficients.
///
/// `c_a3` multiplies a cubic term that is small in the physical regime and is
/// reported only; it is never added to a Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearCoupling {
    pub c_a2: f64,
    pub c_a3: f64,
}

impl NonlinearCoupling {
    pub const NONE: Self = Self { c_a2: 0.0, c_a3: 0.0 };

    pub fn new(c_a2: f64, c_a3: f64) -> Self {
        Self { c_a2, c_a3 }
    }
}

/// Renormalized oscillator frequency and coupling after eliminating the
/// quadratic-field term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovFrame {
    pub omega_o_prime: f64,
    pub g_prime: f64,
}

/// H/h in GHz for the linear model; exactly Hermitian by construction.
pub fn build_hamiltonian(p: &RabiParams, space: FockSpace) -> CMatrix {
    let sx = pauli(PauliAxis::X);
    let sz = pauli(PauliAxis::Z);
    let iq = qubit_identity();
    let io = space.identity();
    let osc = space.number() + &io * re(0.5);
    let x = space.quadrature();

    sx.kronecker(&io) * re(-0.5 * p.delta)
        + sz.kronecker(&io) * re(-0.5 * p.epsilon)
        + iq.kronecker(&osc) * re(p.omega_o)
        + sz.kronecker(&x) * re(p.g)
}

fn stability_discriminant(p: &RabiParams, c: &NonlinearCoupling) -> f64 {
    p.omega_o * p.omega_o + 4.0 * c.c_a2 * p.g * p.omega_o
}

/// Linear model plus the quadratic-field term c_a2 g (a + a†)^2.
pub fn build_hamiltonian_a2(
    p: &RabiParams,
    c: &NonlinearCoupling,
    space: FockSpace,
) -> Result<CMatrix> {
    let disc = stability_discriminant(p, c);
    if disc <= 0.0 {
        return Err(Error::UnstableOscillator(disc));
    }
    let x = space.quadrature();
    let x2 = &x * &x;
    Ok(build_hamiltonian(p, space) + qubit_identity().kronecker(&x2) * re(c.c_a2 * p.g))
}

/// (omega_o', g') such that the quadratic-field model is unitarily equivalent
/// to the linear model with these parameters.
pub fn bogoliubov_frame(p: &RabiParams, c: &NonlinearCoupling) -> Result<BogoliubovFrame> {
    let disc = stability_discriminant(p, c);
    if disc <= 0.0 {
        return Err(Error::UnstableOscillator(disc));
    }
    let omega_o_prime = disc.sqrt();
    let g_prime = p.g * (p.omega_o / omega_o_prime).sqrt();
    Ok(BogoliubovFrame {
        omega_o_prime,
        g_prime,
    })
}

/// Nonlinearity coefficients of the coupler junction from the persistent
/// current, the oscillator zero-point current, and the coupler critical
/// current (all nA):
///
///   c_a2 = i_p i_zpf / (i_cm^2 - i_p^2),
///   c_a3 = (i_cm^2 + 2 i_p^2) i_zpf^2 / (2 (i_cm^2 - i_p^2)^2).
pub fn nonlinear_coefficients(i_p: f64, i_zpf: f64, i_cm: f64) -> Result<NonlinearCoupling> {
    if !(i_p > 0.0) || !(i_zpf >= 0.0) {
        return Err(Error::InvalidCurrents);
    }
    if i_cm <= i_p {
        return Err(Error::CriticalCurrentExceeded { i_b: i_p, i_cm });
    }
    let d = i_cm * i_cm - i_p * i_p;
    Ok(NonlinearCoupling {
        c_a2: i_p * i_zpf / d,
        c_a3: (i_cm * i_cm + 2.0 * i_p * i_p) * i_zpf * i_zpf / (2.0 * d * d),
    })
}

/// Coupling rate g/2pi in GHz from h g = M I_p I_zpf, with M in pH and the
/// currents in nA.
pub fn coupling_energy(m_ph: f64, i_p_na: f64, i_zpf_na: f64) -> f64 {
    (m_ph * 1e-12) * (i_p_na * 1e-9) * (i_zpf_na * 1e-9) / PLANCK_JS / 1e9
}

/// Summary of the superradiance criterion for a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperradianceReport {
    /// 2 g / sqrt(delta omega_o); > 1 signals the strongly coupled side of
    /// the bare criterion.
    pub ratio: f64,
    /// 4 g^2 >= delta * omega_o.
    pub bare_condition_met: bool,
    /// 4 g^2 >= delta * (omega_o + 4 c_a2 g).
    pub renormalized_condition_met: bool,
    /// c_a2 > g / delta, the premise under which no coupling strength can
    /// ever satisfy the renormalized condition.
    pub no_go_condition_holds: bool,
}

pub fn superradiance_report(p: &RabiParams, c: &NonlinearCoupling) -> SuperradianceReport {
    let ratio = 2.0 * p.g / (p.delta * p.omega_o).sqrt();
    let lhs = 4.0 * p.g * p.g;
    SuperradianceReport {
        ratio,
        bare_condition_met: lhs >= p.delta * p.omega_o,
        renormalized_condition_met: lhs >= p.delta * (p.omega_o + 4.0 * c.c_a2 * p.g),
        no_go_condition_holds: c.c_a2 > p.g / p.delta,
    }
}

/// Joint symmetry operator sigma_x (x) (-1)^(a†a); commutes with the
/// Hamiltonian at epsilon = 0 (current-inversion symmetry).
pub fn joint_parity(space: FockSpace) -> CMatrix {
    pauli(PauliAxis::X).kronecker(&space.parity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::hermiticity_deviation;
    use crate::spectrum::diagonalize;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn circuit_i_m1p5() -> RabiParams {
        RabiParams::new(0.430, 6.306, 4.92).unwrap()
    }

    #[test]
    fn decoupled_limit_gap_is_delta() {
        let space = FockSpace::new(24).unwrap();
        let p = RabiParams::new(0.430, 6.306, 0.0).unwrap();
        let h = build_hamiltonian(&p, space);
        let es = diagonalize(&h, 2).unwrap();
        assert_abs_diff_eq!(es.energies[1] - es.energies[0], 0.430, epsilon = 1e-10);
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian() {
        let space = FockSpace::new(30).unwrap();
        let h = build_hamiltonian(&circuit_i_m1p5().with_epsilon(1.3), space);
        assert_eq!(hermiticity_deviation(&h), 0.0);
    }

    #[test]
    fn lamb_shifted_qubit_gap() {
        let space = FockSpace::new(80).unwrap();
        let p = circuit_i_m1p5();
        let h = build_hamiltonian(&p, space);
        let es = diagonalize(&h, 2).unwrap();
        let omega01 = es.energies[1] - es.energies[0];
        // heavily suppressed from the bare 0.430 GHz
        assert_abs_diff_eq!(omega01, 0.13, epsilon = 0.005);
        assert_abs_diff_eq!(omega01 / p.delta, 0.30, epsilon = 0.01);
        // displaced-branch estimate delta * exp(-2 alpha^2)
        let approx_gap = p.delta * (-2.0 * p.alpha() * p.alpha()).exp();
        assert!((omega01 - approx_gap).abs() / approx_gap < 0.05);
    }

    #[test]
    fn a2_term_vanishes_with_zero_coefficient() {
        let space = FockSpace::new(20).unwrap();
        let p = circuit_i_m1p5();
        let h0 = build_hamiltonian(&p, space);
        let h2 = build_hamiltonian_a2(&p, &NonlinearCoupling::NONE, space).unwrap();
        assert_eq!((h0 - h2).norm(), 0.0);
    }

    #[test]
    fn a2_spectrum_matches_renormalized_linear_model() {
        let space = FockSpace::new(120).unwrap();
        let p = circuit_i_m1p5();
        let c = NonlinearCoupling::new(0.05, 0.0);
        let h_a2 = build_hamiltonian_a2(&p, &c, space).unwrap();
        let frame = bogoliubov_frame(&p, &c).unwrap();
        let p_prime = RabiParams::new(p.delta, frame.omega_o_prime, frame.g_prime).unwrap();
        let h_lin = build_hamiltonian(&p_prime, space);
        let e_a2 = diagonalize(&h_a2, 7).unwrap();
        let e_lin = diagonalize(&h_lin, 7).unwrap();
        for k in 1..7 {
            let gap_a2 = e_a2.energies[k] - e_a2.energies[0];
            let gap_lin = e_lin.energies[k] - e_lin.energies[0];
            assert!(
                (gap_a2 - gap_lin).abs() < 1e-6,
                "gap {k}: {gap_a2} vs {gap_lin}"
            );
        }
    }

    #[test]
    fn renormalized_frequency_value() {
        let p = circuit_i_m1p5();
        let c = NonlinearCoupling::new(0.01, 0.0);
        let frame = bogoliubov_frame(&p, &c).unwrap();
        assert_abs_diff_eq!(frame.omega_o_prime, 6.4036, epsilon = 1e-3);
        assert_abs_diff_eq!(frame.g_prime, 4.882, epsilon = 1e-3);
        // invariant g' sqrt(omega') = g sqrt(omega)
        assert_abs_diff_eq!(
            frame.g_prime * frame.omega_o_prime.sqrt(),
            p.g * p.omega_o.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn frame_is_identity_without_nonlinearity() {
        let p = circuit_i_m1p5();
        let frame = bogoliubov_frame(&p, &NonlinearCoupling::NONE).unwrap();
        assert_eq!(frame.omega_o_prime, p.omega_o);
        assert_eq!(frame.g_prime, p.g);
    }

    #[test]
    fn unstable_oscillator_is_rejected() {
        let p = RabiParams::new(1.0, 1.0, 10.0).unwrap();
        let c = NonlinearCoupling::new(-0.5, 0.0);
        assert!(matches!(
            bogoliubov_frame(&p, &c),
            Err(Error::UnstableOscillator(_))
        ));
        let space = FockSpace::new(10).unwrap();
        assert!(build_hamiltonian_a2(&p, &c, space).is_err());
    }

    #[test]
    fn nonlinear_coefficient_values() {
        let c = nonlinear_coefficients(300.0, 30.0, 460.0).unwrap();
        assert_abs_diff_eq!(c.c_a2, 9000.0 / 121_600.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c_a2, 0.074013, epsilon = 1e-5);
        assert_abs_diff_eq!(c.c_a3, 0.0119176, epsilon = 1e-6);
        assert!(c.c_a3 < c.c_a2 && c.c_a2 < 1.0);

        let zero = nonlinear_coefficients(300.0, 0.0, 460.0).unwrap();
        assert_eq!((zero.c_a2, zero.c_a3), (0.0, 0.0));

        assert!(matches!(
            nonlinear_coefficients(470.0, 30.0, 460.0),
            Err(Error::CriticalCurrentExceeded { .. })
        ));
    }

    #[test]
    fn coupling_energy_values() {
        assert_eq!(coupling_energy(300.0, 300.0, 0.0), 0.0);
        let g = coupling_energy(300.0, 300.0, 30.0);
        assert_abs_diff_eq!(g, 4.07, epsilon = 0.005);
        // linear in M
        assert_abs_diff_eq!(coupling_energy(600.0, 300.0, 30.0), 2.0 * g, epsilon = 1e-12);
    }

    #[test]
    fn superradiance_ratios() {
        let ii = RabiParams::new(0.441, 5.711, 7.63).unwrap();
        let iii = RabiParams::new(3.84, 5.588, 5.63).unwrap();
        let r2 = superradiance_report(&ii, &NonlinearCoupling::NONE);
        let r3 = superradiance_report(&iii, &NonlinearCoupling::NONE);
        assert_abs_diff_eq!(r2.ratio, 9.6, epsilon = 0.05);
        assert_abs_diff_eq!(r3.ratio, 2.4, epsilon = 0.05);
        assert!(r2.bare_condition_met && r3.bare_condition_met);
        assert!(!r2.no_go_condition_holds);

        let off = RabiParams::new(0.441, 5.711, 0.0).unwrap();
        let r0 = superradiance_report(&off, &NonlinearCoupling::NONE);
        assert_eq!(r0.ratio, 0.0);
        assert!(!r0.bare_condition_met && !r0.renormalized_condition_met);
    }

    #[test]
    fn ground_energy_non_increasing_in_g() {
        let space = FockSpace::new(60).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..8 {
            let g = 0.8 * k as f64;
            let p = RabiParams::new(0.430, 6.306, g).unwrap();
            let es = diagonalize(&build_hamiltonian(&p, space), 1).unwrap();
            assert!(es.energies[0] <= last + 1e-10, "E0 increased at g = {g}");
            last = es.energies[0];
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn parity_commutes_at_zero_bias(
            delta in 0.1f64..4.0,
            omega in 3.0f64..8.0,
            g in 0.0f64..8.0,
        ) {
            let space = FockSpace::new(24).unwrap();
            let p = RabiParams::new(delta, omega, g).unwrap();
            let h = build_hamiltonian(&p, space);
            let pi = joint_parity(space);
            let comm = &h * &pi - &pi * &h;
            let scale = h.norm().max(1.0);
            prop_assert!(comm.norm() / scale < 1e-12);
        }

        #[test]
        fn a2_gap_equivalence_random(
            c_a2 in 0.0f64..0.1,
            g in 2.0f64..6.0,
        ) {
            let space = FockSpace::new(120).unwrap();
            let p = RabiParams::new(0.5, 6.0, g).unwrap();
            let c = NonlinearCoupling::new(c_a2, 0.0);
            let frame = bogoliubov_frame(&p, &c).unwrap();
            let pp = RabiParams::new(p.delta, frame.omega_o_prime, frame.g_prime).unwrap();
            let e_a2 = diagonalize(&build_hamiltonian_a2(&p, &c, space).unwrap(), 7).unwrap();
            let e_lin = diagonalize(&build_hamiltonian(&pp, space), 7).unwrap();
            for k in 1..7 {
                let d = (e_a2.energies[k] - e_a2.energies[0])
                    - (e_lin.energies[k] - e_lin.energies[0]);
                prop_assert!(d.abs() < 1e-6);
            }
        }
    }
}
