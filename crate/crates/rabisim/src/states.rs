//! Closed-form approximations to the four lowest energy eigenstates at
//! epsilon = 0, and fidelity utilities.
//!
//! At strong coupling the low eigenstates are superpositions of the two
//! persistent-current branches with oppositely displaced oscillator states,
//!
//!   (|L> (x) D(-alpha)|n> + sign |R> (x) D(alpha)|n>) / norm,
//!
//! with alpha = g / omega_o, n = 0 for the lowest doublet and n = 1 for the
//! next one. Above g = omega_o / 2 the energy order of the n = 1 pair is
//! swapped relative to the sign order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CVector, FockSpace, JointState};
use crate::rabi::RabiParams;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Specification of one displaced-branch superposition state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatStateSpec {
    /// Row index 0..3 in sign order (+, -, +, -).
    pub level: usize,
    /// Real displacement of the branches.
    pub alpha: f64,
    /// Fock index of the displaced branch states (0 for rows 0/1, 1 for
    /// rows 2/3).
    pub fock_n: usize,
    /// Relative sign of the |R> branch, +1 or -1.
    pub sign: f64,
}

impl CatStateSpec {
    /// Row `level` of the four-state ladder in sign order: rows 0/1 use the
    /// displaced vacuum with signs +/-, rows 2/3 the displaced one-photon
    /// state with signs +/-.
    pub fn for_row(level: usize, alpha: f64) -> Result<Self> {
        if level > 3 {
            return Err(Error::IndexOutOfRange {
                index: level,
                available: 4,
            });
        }
        Ok(Self {
            level,
            alpha,
            fock_n: level / 2,
            sign: if level % 2 == 0 { 1.0 } else { -1.0 },
        })
    }
}

/// Normalized superposition of oppositely displaced branches.
pub fn cat_state(spec: &CatStateSpec, space: FockSpace) -> Result<JointState> {
    if spec.fock_n >= space.n_max() {
        return Err(Error::IndexOutOfRange {
            index: spec.fock_n,
            available: space.n_max(),
        });
    }
    let n_max = space.n_max();
    let fock = space.fock_state(spec.fock_n)?;
    let branch_l = space.displacement(re(-spec.alpha)) * &fock;
    let branch_r = space.displacement(re(spec.alpha)) * &fock;
    let mut amps = CVector::zeros(2 * n_max);
    for n in 0..n_max {
        amps[n] = branch_l[n];
        amps[n_max + n] = re(spec.sign) * branch_r[n];
    }
    JointState::normalized(space, amps)
}

/// Approximate eigenstate for energy level `level` at epsilon = 0.
///
/// For g > omega_o / 2 the n = 1 doublet is energy-ordered opposite to its
/// sign order, so rows 2 and 3 are swapped.
pub fn cat_state_for_eigenlevel(
    level: usize,
    p: &RabiParams,
    space: FockSpace,
) -> Result<JointState> {
    if level > 3 {
        return Err(Error::IndexOutOfRange {
            index: level,
            available: 4,
        });
    }
    let row = if level >= 2 && p.g > p.omega_o / 2.0 {
        5 - level
    } else {
        level
    };
    cat_state(&CatStateSpec::for_row(row, p.alpha())?, space)
}

/// Branch displacement estimate g / omega_o.
pub fn displacement_estimate(p: &RabiParams) -> f64 {
    p.alpha()
}

/// Squared overlap |<a|b>|^2.
pub fn fidelity(a: &JointState, b: &JointState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Mixing angle theta = arccos(epsilon / sqrt(delta^2 + epsilon^2)) between
/// the persistent-current basis and the qubit energy eigenbasis.
pub fn qubit_mixing_angle(delta: f64, epsilon: f64) -> Result<f64> {
    if delta == 0.0 && epsilon == 0.0 {
        return Err(Error::ZeroMixingInputs);
    }
    Ok((epsilon / (delta * delta + epsilon * epsilon).sqrt()).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rabi::joint_parity;
    use crate::spectrum::adaptive_truncation;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn zero_displacement_row0_is_product_ground() {
        let space = FockSpace::new(12).unwrap();
        let spec = CatStateSpec::for_row(0, 0.0).unwrap();
        let cat = cat_state(&spec, space).unwrap();
        // (|L> + |R>) / sqrt(2) (x) |0>
        let inv = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(cat.amplitude(0, 0).re, inv, epsilon = 1e-12);
        assert_abs_diff_eq!(cat.amplitude(1, 0).re, inv, epsilon = 1e-12);
        for n in 1..12 {
            assert!(cat.amplitude(0, n).norm() < 1e-12);
            assert!(cat.amplitude(1, n).norm() < 1e-12);
        }
    }

    #[test]
    fn opposite_sign_rows_are_orthogonal() {
        let space = FockSpace::new(40).unwrap();
        for alpha in [0.0, 0.3, 0.9, 1.7] {
            let a = cat_state(&CatStateSpec::for_row(0, alpha).unwrap(), space).unwrap();
            let b = cat_state(&CatStateSpec::for_row(1, alpha).unwrap(), space).unwrap();
            assert!(a.inner(&b).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn branch_overlap_for_circuit_ii_displacement() {
        let space = FockSpace::new(60).unwrap();
        let alpha = 1.335;
        let left = space.displacement(re(-alpha)) * space.fock_state(0).unwrap();
        let right = space.displacement(re(alpha)) * space.fock_state(0).unwrap();
        let overlap = left.dotc(&right);
        assert_abs_diff_eq!(overlap.re, 0.028, epsilon = 1e-3);
    }

    #[test]
    fn cat_states_have_unit_norm() {
        let space = FockSpace::new(80).unwrap();
        for level in 0..4 {
            for alpha in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
                let cat =
                    cat_state(&CatStateSpec::for_row(level, alpha).unwrap(), space).unwrap();
                assert_abs_diff_eq!(cat.norm(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn joint_parity_signs_of_rows() {
        // rows 0/3 are even, rows 1/2 odd under sigma_x (x) (-1)^(a†a)
        let space = FockSpace::new(60).unwrap();
        let pi_op = joint_parity(space);
        for alpha in [1.5, 2.0, 3.0] {
            let signs = [1.0, -1.0, -1.0, 1.0];
            for level in 0..4 {
                let cat =
                    cat_state(&CatStateSpec::for_row(level, alpha).unwrap(), space).unwrap();
                let p = cat.expectation(&pi_op).unwrap().re;
                assert_abs_diff_eq!(p, signs[level], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn displacement_estimates_match_tabulated_ratios() {
        let ii = RabiParams::new(0.441, 5.711, 7.63).unwrap();
        let i_a = RabiParams::new(0.505, 6.336, 4.57).unwrap();
        assert_abs_diff_eq!(displacement_estimate(&ii), 1.34, epsilon = 0.005);
        assert_abs_diff_eq!(displacement_estimate(&i_a), 0.72, epsilon = 0.005);
        let off = RabiParams::new(0.505, 6.336, 0.0).unwrap();
        assert_eq!(displacement_estimate(&off), 0.0);
    }

    #[test]
    fn fidelity_of_state_with_itself() {
        let space = FockSpace::new(30).unwrap();
        let cat = cat_state(&CatStateSpec::for_row(0, 0.8).unwrap(), space).unwrap();
        assert_abs_diff_eq!(fidelity(&cat, &cat).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelities_against_exact_eigenstates_circuit_iii() {
        let p = RabiParams::new(3.84, 5.588, 5.63).unwrap();
        let es = adaptive_truncation(&p, 4, 1e-9);
        let space = FockSpace::new(es.n_max_used).unwrap();
        let expected = [0.981, 0.985, 0.975, 0.967];
        for level in 0..4 {
            let cat = cat_state_for_eigenlevel(level, &p, space).unwrap();
            let f = fidelity(&cat, &es.states[level]).unwrap();
            assert_abs_diff_eq!(f, expected[level], epsilon = 0.002);
        }
    }

    #[test]
    fn ground_fidelity_circuit_ii() {
        let p = RabiParams::new(0.441, 5.711, 7.63).unwrap();
        let es = adaptive_truncation(&p, 1, 1e-9);
        let space = FockSpace::new(es.n_max_used).unwrap();
        let cat = cat_state_for_eigenlevel(0, &p, space).unwrap();
        let f = fidelity(&cat, &es.states[0]).unwrap();
        assert_abs_diff_eq!(f, 0.99994, epsilon = 2e-5);
    }

    #[test]
    fn ansatz_improves_with_oscillator_qubit_ratio() {
        // fixed alpha, growing omega_o / delta: ground fidelity is
        // non-decreasing
        let alpha = 1.0;
        let mut last = 0.0;
        for ratio in [2.0, 4.0, 8.0, 16.0, 32.0] {
            let p = RabiParams::new(1.0, ratio, alpha * ratio).unwrap();
            let es = adaptive_truncation(&p, 1, 1e-9);
            let space = FockSpace::new(es.n_max_used).unwrap();
            let cat = cat_state_for_eigenlevel(0, &p, space).unwrap();
            let f = fidelity(&cat, &es.states[0]).unwrap();
            assert!(
                f + 1e-9 >= last,
                "fidelity decreased at omega_o/delta = {ratio}: {f} < {last}"
            );
            last = f;
        }
    }

    #[test]
    fn mixing_angle_limits() {
        assert_abs_diff_eq!(qubit_mixing_angle(1.0, 0.0).unwrap(), FRAC_PI_2, epsilon = 1e-14);
        assert_abs_diff_eq!(qubit_mixing_angle(0.0, 2.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(qubit_mixing_angle(0.0, -2.0).unwrap(), PI, epsilon = 1e-14);
        assert_abs_diff_eq!(qubit_mixing_angle(1.5, 1.5).unwrap(), FRAC_PI_4, epsilon = 1e-14);
        assert!(matches!(
            qubit_mixing_angle(0.0, 0.0),
            Err(Error::ZeroMixingInputs)
        ));
    }
}
