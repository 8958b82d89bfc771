//! Dense n-qubit pure states.

use num_complex::Complex64;

use crate::assignment::{index_of, qubit_bit, Assignment, QubitSet};
use crate::{MenError, Result, ToleranceConfig};

/// Largest register a dense state may hold.
pub const MAX_DENSE_QUBITS: usize = 30;

const NORM_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;

/// Unit-norm vector of `2^n` amplitudes, qubit 1 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps already-normalized amplitudes; the norm must be 1 within 1e-9.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_shape(num_qubits, &amplitudes)?;
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(MenError::InvalidState(format!(
                "norm {norm} deviates from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(PureState {
            num_qubits,
            amplitudes,
        })
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_shape(num_qubits, &amplitudes)?;
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(MenError::InvalidState(format!(
                "cannot normalize a vector of norm {norm}"
            )));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureState {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = checked_dim(num_qubits)?;
        if index >= dim {
            return Err(MenError::InvalidState(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(PureState {
            num_qubits,
            amplitudes,
        })
    }

    /// Real amplitudes, normalized.
    pub fn from_reals(num_qubits: usize, values: &[f64]) -> Result<Self> {
        Self::normalized(
            num_qubits,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn amplitude_at(&self, x: &Assignment) -> Result<Complex64> {
        Ok(self.amplitudes[index_of(x, self.num_qubits)?])
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    pub fn min_modulus(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every amplitude is strictly above the zero threshold.
    pub fn all_nonzero(&self, tol: &ToleranceConfig) -> bool {
        self.min_modulus() > tol.zero_amp_threshold
    }

    /// Index of the largest-modulus amplitude, smallest index on ties.
    pub fn argmax_modulus(&self) -> usize {
        let mut best = 0;
        let mut best_mod = f64::NEG_INFINITY;
        for (k, a) in self.amplitudes.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_mod {
                best = k;
                best_mod = m;
            }
        }
        best
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> PureState {
        let w = Complex64::from_polar(1.0, phase);
        PureState {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * w).collect(),
        }
    }

    /// `(U_1 ⊗ ... ⊗ U_n) |psi>`.
    pub fn apply_local_basis_change(&self, u: &LocalBasisChange) -> Result<PureState> {
        if u.num_qubits() != self.num_qubits {
            return Err(MenError::WrongArity {
                expected: self.num_qubits,
                found: u.num_qubits(),
            });
        }
        let mut amps = self.amplitudes.clone();
        for (k, m) in u.matrices.iter().enumerate() {
            apply_single_qubit(&mut amps, self.num_qubits, k + 1, m);
        }
        Ok(PureState {
            num_qubits: self.num_qubits,
            amplitudes: amps,
        })
    }

    /// Projects qubit `qubit` onto `outcome` and renormalizes.
    ///
    /// The collapsed state keeps all n qubits; amplitudes inconsistent with
    /// the outcome become exactly zero.
    pub fn measure_qubit(
        &self,
        qubit: usize,
        outcome: u8,
        tol: &ToleranceConfig,
    ) -> Result<(f64, PureState)> {
        let n = self.num_qubits;
        if qubit == 0 || qubit > n {
            return Err(MenError::InvalidQuery(format!(
                "qubit {qubit} is outside 1..={n}"
            )));
        }
        if outcome > 1 {
            return Err(MenError::InvalidQuery(format!(
                "measurement outcome {outcome} is not a bit"
            )));
        }
        let bit = qubit_bit(qubit, n);
        let want = if outcome == 1 { bit } else { 0 };
        let probability: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| k & bit == want)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if probability < tol.zero_amp_threshold * tol.zero_amp_threshold {
            return Err(MenError::ZeroProbabilityOutcome {
                qubit,
                outcome,
                probability,
            });
        }
        let scale = probability.sqrt().recip();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if k & bit == want {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok((
            probability.min(1.0),
            PureState {
                num_qubits: n,
                amplitudes,
            },
        ))
    }

    /// Reshapes the amplitudes into the `2^|rows| x 2^|N - rows|` matrix
    /// whose `(r, c)` entry is `a(x_rows = r, x_rest = c)`.
    pub fn reshape(&self, rows: &QubitSet) -> Vec<Vec<Complex64>> {
        let n = self.num_qubits;
        let row_off = rows.offsets(n);
        let col_off = rows.complement(n).offsets(n);
        row_off
            .iter()
            .map(|r| col_off.iter().map(|c| self.amplitudes[r | c]).collect())
            .collect()
    }
}

/// Kronecker product: `phi`'s qubits come first.
pub fn tensor_product(phi: &PureState, chi: &PureState) -> Result<PureState> {
    let n = phi.num_qubits + chi.num_qubits;
    checked_dim(n)?;
    let amplitudes = phi
        .amplitudes
        .iter()
        .flat_map(|a| chi.amplitudes.iter().map(move |b| a * b))
        .collect();
    Ok(PureState {
        num_qubits: n,
        amplitudes,
    })
}

/// Tensor product placing `phi` on the qubits of `m` and `chi` on the
/// complement of `m` within `1..=n`.
pub fn tensor_product_on(
    phi: &PureState,
    m: &QubitSet,
    chi: &PureState,
    n: usize,
) -> Result<PureState> {
    m.check_range(n)?;
    let rest = m.complement(n);
    if phi.num_qubits != m.len() || chi.num_qubits != rest.len() {
        return Err(MenError::InvalidPartition(format!(
            "factor sizes {} + {} do not match {m} and its complement in {n} qubits",
            phi.num_qubits, chi.num_qubits
        )));
    }
    let row_off = m.offsets(n);
    let col_off = rest.offsets(n);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (r, a) in row_off.iter().zip(&phi.amplitudes) {
        for (c, b) in col_off.iter().zip(&chi.amplitudes) {
            amplitudes[r | c] = a * b;
        }
    }
    Ok(PureState {
        num_qubits: n,
        amplitudes,
    })
}

/// `|<psi|chi>|`, which is 1 exactly when the states agree up to a global phase.
pub fn fidelity_up_to_phase(psi: &PureState, chi: &PureState) -> f64 {
    assert_eq!(
        psi.num_qubits, chi.num_qubits,
        "fidelity between states of different sizes"
    );
    let overlap: Complex64 = psi
        .amplitudes
        .iter()
        .zip(&chi.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum();
    overlap.norm().min(1.0)
}

pub type Mat2 = [[Complex64; 2]; 2];

/// One 2x2 unitary per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasisChange {
    matrices: Vec<Mat2>,
}

impl LocalBasisChange {
    pub fn new(matrices: Vec<Mat2>) -> Result<Self> {
        for (k, m) in matrices.iter().enumerate() {
            let deviation = unitarity_deviation(m);
            if !(deviation <= UNITARY_TOL) {
                return Err(MenError::InvalidUnitary {
                    qubit: k + 1,
                    deviation,
                });
            }
        }
        Ok(LocalBasisChange { matrices })
    }

    pub fn identity(n: usize) -> Self {
        LocalBasisChange {
            matrices: vec![identity2(); n],
        }
    }

    /// The same matrix on every qubit.
    pub fn uniform(m: Mat2, n: usize) -> Result<Self> {
        Self::new(vec![m; n])
    }

    /// Real rotation `[[cos t, -sin t], [sin t, cos t]]` on each qubit.
    pub fn rotations(angles: &[f64]) -> Self {
        LocalBasisChange {
            matrices: angles.iter().map(|&t| rotation(t)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.matrices
    }
}

pub fn identity2() -> Mat2 {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [[o, z], [z, o]]
}

pub fn hadamard() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Max entrywise deviation of `U U^dagger` from the identity.
pub fn unitarity_deviation(m: &Mat2) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let e: Complex64 = (0..2).map(|k| m[r][k] * m[c][k].conj()).sum();
            let target = if r == c { 1.0 } else { 0.0 };
            let d = (e - target).norm();
            if d.is_nan() {
                return f64::INFINITY;
            }
            dev = dev.max(d);
        }
    }
    dev
}

fn apply_single_qubit(amps: &mut [Complex64], n: usize, qubit: usize, m: &Mat2) {
    let bit = qubit_bit(qubit, n);
    for k in 0..amps.len() {
        if k & bit == 0 {
            let a0 = amps[k];
            let a1 = amps[k | bit];
            amps[k] = m[0][0] * a0 + m[0][1] * a1;
            amps[k | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn l2_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn checked_dim(num_qubits: usize) -> Result<usize> {
    if num_qubits == 0 || num_qubits > MAX_DENSE_QUBITS {
        return Err(MenError::InvalidState(format!(
            "qubit count {num_qubits} outside 1..={MAX_DENSE_QUBITS}"
        )));
    }
    Ok(1usize << num_qubits)
}

fn check_shape(num_qubits: usize, amps: &[Complex64]) -> Result<()> {
    let dim = checked_dim(num_qubits)?;
    if amps.len() != dim {
        return Err(MenError::InvalidState(format!(
            "expected {dim} amplitudes for {num_qubits} qubits, found {}",
            amps.len()
        )));
    }
    if let Some(k) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(MenError::InvalidState(format!(
            "amplitude {k} is not finite"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> PureState {
        PureState::from_reals(1, &[1.0, 1.0]).unwrap()
    }

    fn ghz() -> PureState {
        PureState::from_reals(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn tensor_product_examples() {
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        let t = tensor_product(&zero, &zero).unwrap();
        assert_eq!(t.amplitudes(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);

        let t = tensor_product(&plus(), &one).unwrap();
        let expect = [0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        for (a, e) in t.amplitudes().iter().zip(expect) {
            assert!((a - c(e)).norm() < 1e-15);
        }

        let bell = PureState::from_reals(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let t = tensor_product(&bell, &zero).unwrap();
        let nonzero: Vec<usize> = (0..8).filter(|&k| t.amplitude(k).norm() > 0.0).collect();
        assert_eq!(nonzero, vec![0, 6]);
        assert!((t.amplitude(6).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((t.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_product_on_interleaves() {
        // |1> on qubit 2, |0 0> on qubits {1,3}
        let one = PureState::basis(1, 1).unwrap();
        let zz = PureState::basis(2, 0).unwrap();
        let t = tensor_product_on(&one, &QubitSet::from([2]), &zz, 3).unwrap();
        assert_eq!(t.amplitude(0b010), c(1.0));
        assert!(tensor_product_on(&one, &QubitSet::from([1, 2]), &zz, 3).is_err());
    }

    #[test]
    fn local_basis_change_examples() {
        let psi = ghz();
        let same = psi
            .apply_local_basis_change(&LocalBasisChange::identity(3))
            .unwrap();
        assert_eq!(same, psi);

        let zero = PureState::basis(1, 0).unwrap();
        let h = zero
            .apply_local_basis_change(&LocalBasisChange::uniform(hadamard(), 1).unwrap())
            .unwrap();
        assert!((h.amplitude(0) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((h.amplitude(1) - c(FRAC_1_SQRT_2)).norm() < 1e-15);

        let rotated = psi
            .apply_local_basis_change(&LocalBasisChange::rotations(&[PI / 5.0; 3]))
            .unwrap();
        assert!(rotated.min_modulus() > 0.01);
        assert!((rotated.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = [[c(1.0), c(1.0)], [c(0.0), c(1.0)]];
        assert!(matches!(
            LocalBasisChange::new(vec![identity2(), m]),
            Err(MenError::InvalidUnitary { qubit: 2, .. })
        ));
        let nan = [[c(f64::NAN), c(0.0)], [c(0.0), c(1.0)]];
        assert!(LocalBasisChange::new(vec![nan]).is_err());
    }

    #[test]
    fn measurement_examples() {
        let tol = ToleranceConfig::default();
        let (p, collapsed) = ghz().measure_qubit(1, 0, &tol).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((collapsed.amplitude(0) - c(1.0)).norm() < 1e-15);
        assert!((1..8).all(|k| collapsed.amplitude(k).norm() == 0.0));

        let plus_zero = tensor_product(&plus(), &PureState::basis(1, 0).unwrap()).unwrap();
        let (p, collapsed) = plus_zero.measure_qubit(2, 0, &tol).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(fidelity_up_to_phase(&collapsed, &plus_zero) > 1.0 - 1e-15);

        let one = PureState::basis(1, 1).unwrap();
        assert!(matches!(
            one.measure_qubit(1, 0, &tol),
            Err(MenError::ZeroProbabilityOutcome { .. })
        ));
        assert!(one.measure_qubit(2, 0, &tol).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let p = plus();
        assert!((fidelity_up_to_phase(&p, &p) - 1.0).abs() < 1e-15);
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        assert_eq!(fidelity_up_to_phase(&zero, &one), 0.0);
        let phased = p.with_global_phase(PI / 3.0);
        assert!((fidelity_up_to_phase(&p, &phased) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_validates_shape_and_norm() {
        assert!(PureState::new(2, vec![c(1.0); 3]).is_err());
        assert!(PureState::new(1, vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::new(1, vec![c(f64::NAN), c(0.0)]).is_err());
        assert!(PureState::normalized(1, vec![c(0.0), c(0.0)]).is_err());
        assert!(PureState::new(0, vec![c(1.0)]).is_err());
    }

    #[test]
    fn reshape_rows_are_subsystem_configurations() {
        let bell = PureState::from_reals(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let m = bell.reshape(&QubitSet::from([2]));
        assert_eq!(m.len(), 2);
        assert_eq!(m[0][0], bell.amplitude(0));
        assert_eq!(m[1][1], bell.amplitude(3));
        assert_eq!(m[1][0], bell.amplitude(0b01));
    }

    #[test]
    fn argmax_prefers_smallest_index() {
        let pp = PureState::from_reals(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(pp.argmax_modulus(), 0);
        assert_eq!(ghz().argmax_modulus(), 0);
    }
}
