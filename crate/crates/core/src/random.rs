//! Seeded random states and local unitaries.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assignment::{qubit_bit, QubitSet};
use crate::state::{LocalBasisChange, Mat2, PureState};
use crate::{MenError, Result};

/// Deterministic generator for `(seed, stream)`.
///
/// Independent sub-tasks (census samples, test cases) use distinct streams
/// of the same seed so results do not depend on evaluation order.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Gaussian vector normalized to the unit sphere.
pub fn random_state(n: usize, seed: u64) -> Result<PureState> {
    random_state_with(n, &mut rng_for(seed, 0))
}

pub fn random_state_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    if n == 0 || n > crate::state::MAX_DENSE_QUBITS {
        return Err(MenError::InvalidState(format!("cannot draw a {n}-qubit state")));
    }
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(n, amps)
}

/// Random state whose every amplitude exceeds `zero_amp_threshold`.
pub fn random_nonzero_state(n: usize, seed: u64, zero_amp_threshold: f64) -> Result<PureState> {
    let mut rng = rng_for(seed, 0);
    loop {
        let psi = random_state_with(n, &mut rng)?;
        if psi.min_modulus() > zero_amp_threshold {
            return Ok(psi);
        }
    }
}

/// Tensor product of independent random states, one per block.
#[derive(Debug, Clone)]
pub struct ProductState {
    pub state: PureState,
    pub partition: Vec<QubitSet>,
}

/// Draws a random state for each block of `partition` and multiplies them.
///
/// The blocks must be nonempty, disjoint and cover `1..=n` for some `n`.
pub fn random_product_state(partition: &[QubitSet], seed: u64) -> Result<ProductState> {
    let n: usize = partition.iter().map(QubitSet::len).sum();
    let union = partition
        .iter()
        .fold(QubitSet::empty(), |acc, b| acc.union(b));
    if partition.iter().any(QubitSet::is_empty) || union != QubitSet::full(n) {
        return Err(MenError::InvalidPartition(
            "blocks must be nonempty, disjoint and cover 1..=n".into(),
        ));
    }
    let mut rng = rng_for(seed, 0);
    let factors = partition
        .iter()
        .map(|b| random_state_with(b.len(), &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let block_bits: Vec<Vec<usize>> = partition
        .iter()
        .map(|b| b.iter().map(|q| qubit_bit(q, n)).collect())
        .collect();
    let amps = (0..1usize << n)
        .map(|index| {
            factors
                .iter()
                .zip(&block_bits)
                .map(|(f, bits)| {
                    let local = bits
                        .iter()
                        .fold(0, |acc, b| (acc << 1) | usize::from(index & b != 0));
                    f.amplitude(local)
                })
                .product::<Complex64>()
        })
        .collect();
    Ok(ProductState {
        state: PureState::normalized(n, amps)?,
        partition: partition.to_vec(),
    })
}

/// Haar-distributed single-qubit unitary.
///
/// Uses `e^{i a} [[e^{i p} cos t, e^{i c} sin t], [-e^{-i c} sin t, e^{-i p} cos t]]`
/// with `t = asin(sqrt(u))` and `u`, `a`, `p`, `c` uniform.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let u: f64 = rng.gen();
    let alpha = rng.gen::<f64>() * TAU;
    let psi = rng.gen::<f64>() * TAU;
    let chi = rng.gen::<f64>() * TAU;
    let theta = u.sqrt().asin();
    let (s, c) = theta.sin_cos();
    let g = Complex64::from_polar(1.0, alpha);
    [
        [
            g * Complex64::from_polar(c, psi),
            g * Complex64::from_polar(s, chi),
        ],
        [
            -g * Complex64::from_polar(s, -chi),
            g * Complex64::from_polar(c, -psi),
        ],
    ]
}

pub fn random_local_basis_change<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LocalBasisChange {
    LocalBasisChange::new((0..n).map(|_| random_unitary(rng)).collect())
        .expect("Haar parametrization is unitary")
}
