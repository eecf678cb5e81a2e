//! Dense operators on a truncated Fock space and the joint qubit-oscillator
//! space.
//!
//! The oscillator is truncated to Fock states |0>..|n_max-1>; the qubit basis
//! is the persistent-current pair {|L>, |R>} with sigma_z |L> = +|L>. Joint
//! vectors use the index layout `s * n_max + n` (qubit index major), matching
//! the Kronecker product `qubit_op (x) osc_op`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Truncated oscillator Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::FockTooSmall(n_max));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the joint qubit-oscillator space, 2 * n_max.
    pub fn joint_dim(&self) -> usize {
        2 * self.n_max
    }

    /// Annihilation operator: a[n-1, n] = sqrt(n).
    pub fn annihilation(&self) -> CMatrix {
        let mut a = CMatrix::zeros(self.n_max, self.n_max);
        for n in 1..self.n_max {
            a[(n - 1, n)] = re((n as f64).sqrt());
        }
        a
    }

    /// Creation operator, the conjugate transpose of `annihilation`.
    pub fn creation(&self) -> CMatrix {
        self.annihilation().adjoint()
    }

    /// Number operator a†a, diagonal (0, 1, .., n_max-1).
    pub fn number(&self) -> CMatrix {
        CMatrix::from_fn(self.n_max, self.n_max, |i, j| {
            if i == j {
                re(i as f64)
            } else {
                re(0.0)
            }
        })
    }

    /// Quadrature a + a†.
    pub fn quadrature(&self) -> CMatrix {
        let a = self.annihilation();
        &a + a.adjoint()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.n_max, self.n_max)
    }

    /// Photon-number parity (-1)^(a†a), diagonal.
    pub fn parity(&self) -> CMatrix {
        CMatrix::from_fn(self.n_max, self.n_max, |i, j| {
            if i == j {
                re(if i % 2 == 0 { 1.0 } else { -1.0 })
            } else {
                re(0.0)
            }
        })
    }

    /// Basis Fock state |n>.
    pub fn fock_state(&self, n: usize) -> Result<CVector> {
        if n >= self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                available: self.n_max,
            });
        }
        let mut v = CVector::zeros(self.n_max);
        v[n] = re(1.0);
        Ok(v)
    }

    /// Normalized coherent state D(alpha)|0> from the closed-form Fock
    /// amplitudes, renormalized after truncation.
    pub fn coherent_state(&self, alpha: Complex64) -> CVector {
        let mut v = CVector::zeros(self.n_max);
        v[0] = re((-alpha.norm_sqr() / 2.0).exp());
        for n in 1..self.n_max {
            v[n] = v[n - 1] * alpha / re((n as f64).sqrt());
        }
        let norm = v.norm();
        v / re(norm)
    }

    /// Unitary displacement operator exp(alpha a† - alpha* a), computed by
    /// eigendecomposition of the Hermitian generator.
    ///
    /// Logs a warning when |alpha|^2 > n_max / 4, where truncation starts to
    /// bite.
    pub fn displacement(&self, alpha: Complex64) -> CMatrix {
        if alpha.norm_sqr() > self.n_max as f64 / 4.0 {
            log::warn!(
                "displacement amplitude |alpha|^2 = {:.3} is large for n_max = {}; expect truncation error",
                alpha.norm_sqr(),
                self.n_max
            );
        }
        let a = self.annihilation();
        // exp(alpha a† - alpha* a) = exp(i G) with G Hermitian
        let gen = a.adjoint() * alpha - &a * alpha.conj();
        let g_herm = gen.map(|z| z * Complex64::new(0.0, -1.0));
        let eig = g_herm.symmetric_eigen();
        let mut vd = eig.eigenvectors.clone();
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            let phase = Complex64::new(0.0, *lambda).exp();
            vd.column_mut(k).apply(|z| *z *= phase);
        }
        vd * eig.eigenvectors.adjoint()
    }
}

/// Pauli matrix axis in the persistent-current basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Z,
}

/// 2x2 Pauli matrix; sigma_z is diagonal with sigma_z |L> = +|L>.
pub fn pauli(axis: PauliAxis) -> CMatrix {
    match axis {
        PauliAxis::X => CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]),
        PauliAxis::Z => CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)]),
    }
}

pub fn qubit_identity() -> CMatrix {
    CMatrix::identity(2, 2)
}

/// Kronecker product qubit_op (x) osc_op with the joint index layout
/// `s * n_max + n`.
pub fn tensor(qubit_op: &CMatrix, osc_op: &CMatrix) -> Result<CMatrix> {
    if qubit_op.nrows() != 2 || qubit_op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: qubit_op.nrows(),
        });
    }
    if osc_op.nrows() != osc_op.ncols() {
        return Err(Error::DimensionMismatch {
            expected: osc_op.nrows(),
            found: osc_op.ncols(),
        });
    }
    Ok(qubit_op.kronecker(osc_op))
}

/// Max |A - A†| relative to max |A|.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            scale = scale.max(m[(i, j)].norm());
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        dev / scale
    }
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    hermiticity_deviation(m) < 1e-12
}

/// Pure state of the joint qubit-oscillator system.
///
/// Amplitudes are stored as a complex vector of length 2 * n_max with index
/// layout `s * n_max + n`, s in {0 = L, 1 = R}.
#[derive(Debug, Clone)]
pub struct JointState {
    amplitudes: CVector,
    n_max: usize,
}

impl JointState {
    pub fn new(space: FockSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.joint_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.joint_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            amplitudes,
            n_max: space.n_max(),
        })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(space: FockSpace, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParams("cannot normalize a zero state".into()));
        }
        Self::new(space, amplitudes / re(norm))
    }

    pub fn space(&self) -> FockSpace {
        FockSpace { n_max: self.n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, s: usize, n: usize) -> Complex64 {
        self.amplitudes[s * self.n_max + n]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &JointState) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Matrix element <self| op |other>.
    pub fn matrix_element(&self, op: &CMatrix, other: &JointState) -> Result<Complex64> {
        if op.nrows() != self.amplitudes.len() || op.ncols() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: op.nrows(),
            });
        }
        Ok(self.amplitudes.dotc(&(op * &other.amplitudes)))
    }

    /// Expectation value <self| op |self>.
    pub fn expectation(&self, op: &CMatrix) -> Result<Complex64> {
        self.matrix_element(op, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn annihilation_two_levels() {
        let space = FockSpace::new(2).unwrap();
        let a = space.annihilation();
        assert_eq!(a[(0, 1)], re(1.0));
        assert_eq!(a[(0, 0)], re(0.0));
        assert_eq!(a[(1, 0)], re(0.0));
        assert_eq!(a[(1, 1)], re(0.0));
    }

    #[test]
    fn number_operator_diagonal() {
        let space = FockSpace::new(3).unwrap();
        let n = space.creation() * space.annihilation();
        for (i, want) in [0.0, 1.0, 2.0].iter().enumerate() {
            assert_abs_diff_eq!(n[(i, i)].re, want, epsilon = 1e-14);
            assert_abs_diff_eq!(n[(i, i)].im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn commutator_is_identity_below_truncation() {
        let space = FockSpace::new(40).unwrap();
        let a = space.annihilation();
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        // last diagonal entry deviates by construction
        for i in 0..39 {
            for j in 0..39 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - re(want)).norm() < 1e-12);
            }
        }
        assert_abs_diff_eq!(comm[(39, 39)].re, -39.0, epsilon = 1e-9);
    }

    #[test]
    fn pauli_values_and_anticommutation() {
        let x = pauli(PauliAxis::X);
        let z = pauli(PauliAxis::Z);
        assert_eq!(x[(0, 1)], re(1.0));
        assert_eq!(z[(0, 0)], re(1.0));
        assert_eq!(z[(1, 1)], re(-1.0));
        let anti = &x * &z + &z * &x;
        assert!(anti.norm() < 1e-15);
    }

    #[test]
    fn tensor_identities() {
        let space = FockSpace::new(5).unwrap();
        let id = tensor(&qubit_identity(), &space.identity()).unwrap();
        assert!((id - CMatrix::identity(10, 10)).norm() < 1e-15);

        // mixed-product property: (sz (x) I)(I (x) a) = sz (x) a
        let sz = pauli(PauliAxis::Z);
        let a = space.annihilation();
        let lhs = tensor(&sz, &space.identity()).unwrap() * tensor(&qubit_identity(), &a).unwrap();
        let rhs = tensor(&sz, &a).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);

        // trace(sz (x) a†a) = trace(sz) * trace(a†a) = 0
        let t = tensor(&sz, &space.number()).unwrap().trace();
        assert!(t.norm() < 1e-13);
    }

    #[test]
    fn tensor_rejects_bad_dimensions() {
        let space = FockSpace::new(4).unwrap();
        let bad = CMatrix::zeros(3, 3);
        assert!(tensor(&bad, &space.identity()).is_err());
    }

    #[test]
    fn displacement_zero_is_identity() {
        let space = FockSpace::new(12).unwrap();
        let d = space.displacement(re(0.0));
        assert!((d - space.identity()).norm() < 1e-12);
    }

    #[test]
    fn displacement_gives_coherent_photon_number() {
        let space = FockSpace::new(40).unwrap();
        let d = space.displacement(re(1.0));
        let vac = space.fock_state(0).unwrap();
        let psi = &d * vac;
        let n_mean = psi.dotc(&(space.number() * &psi)).re;
        assert_abs_diff_eq!(n_mean, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn coherent_branch_overlap() {
        // <-alpha|alpha> = exp(-2 alpha^2) for real alpha; 0.028 at alpha = 1.335
        let space = FockSpace::new(60).unwrap();
        let alpha = 1.335;
        let d = space.displacement(re(alpha));
        let d_inv_dagger = space.displacement(re(-alpha)).adjoint();
        let vac = space.fock_state(0).unwrap();
        let overlap = (d_inv_dagger * &d * &vac).dotc(&vac).conj();
        let want = (-2.0 * alpha * alpha).exp();
        assert_abs_diff_eq!(overlap.re, want, epsilon = 1e-8);
        assert_abs_diff_eq!(overlap.re, 0.028, epsilon = 1e-3);
        assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn coherent_state_matches_displaced_vacuum() {
        let space = FockSpace::new(40).unwrap();
        let alpha = Complex64::new(0.7, -0.4);
        let via_op = space.displacement(alpha) * space.fock_state(0).unwrap();
        let closed = space.coherent_state(alpha);
        assert!((via_op - closed).norm() < 1e-9);
    }

    #[test]
    fn joint_state_layout_and_norm() {
        let space = FockSpace::new(3).unwrap();
        let mut amps = CVector::zeros(6);
        amps[0 * 3 + 2] = re(3.0);
        amps[1 * 3 + 1] = re(4.0);
        let psi = JointState::normalized(space, amps).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.amplitude(0, 2).re, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.amplitude(1, 1).re, 0.8, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn displacement_inverse_property(alpha_re in -1.5f64..1.5, alpha_im in -1.5f64..1.5) {
            let space = FockSpace::new(30).unwrap();
            let alpha = Complex64::new(alpha_re, alpha_im);
            prop_assume!(alpha.norm() <= (30.0f64).sqrt() / 3.0);
            let prod = space.displacement(alpha) * space.displacement(-alpha);
            prop_assert!((prod - space.identity()).norm() < 1e-8);
        }

        #[test]
        fn tensor_preserves_hermiticity(seed in 0u64..1000) {
            let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = move || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) as f64) / ((u32::MAX as f64) / 2.0) - 1.0
            };
            let mut q = CMatrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..=i {
                    let re_v = next();
                    let im_v = if i == j { 0.0 } else { next() };
                    q[(i, j)] = Complex64::new(re_v, im_v);
                    q[(j, i)] = Complex64::new(re_v, -im_v);
                }
            }
            let mut o = CMatrix::zeros(6, 6);
            for i in 0..6 {
                for j in 0..=i {
                    let re_v = next();
                    let im_v = if i == j { 0.0 } else { next() };
                    o[(i, j)] = Complex64::new(re_v, im_v);
                    o[(j, i)] = Complex64::new(re_v, -im_v);
                }
            }
            let t = tensor(&q, &o).unwrap();
            prop_assert_eq!(hermiticity_deviation(&t), 0.0);
        }
    }
}
