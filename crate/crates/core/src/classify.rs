//! Three-qubit classes by network topology: fully separable, biseparable,
//! W-like and GHZ-like.
//!
//! Fully entangled states are told apart by searching local bases with no
//! near-zero amplitudes for one whose graph is not the triangle. Candidates
//! come from three sources:
//! - a structured grid of real rotations, angles `{0, pi/8, pi/5, pi/3}` per
//!   qubit;
//! - for each qubit, the two directions in which its amplitude slices combine
//!   to rank one, completed to an orthonormal basis and paired with Haar
//!   unitaries on the other qubits;
//! - `K` Haar-random local bases.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::assignment::{qubit_bit, QubitSet};
use crate::men::build_graph;
use crate::random::{random_local_basis_change, random_unitary, rng_for};
use crate::separability::is_separable;
use crate::state::{LocalBasisChange, Mat2, PureState};
use crate::{MenError, MenGraph, Result, ToleranceConfig};

pub const DEFAULT_CENSUS_SAMPLES: usize = 256;
pub const DEFAULT_CENSUS_SEED: u64 = 0x3c1a_5517;

const STRUCTURED_ANGLES: [f64; 4] = [0.0, PI / 8.0, PI / 5.0, PI / 3.0];
const PENCIL_STREAM_BASE: u64 = 1 << 32;
const INVARIANCE_STREAM_BASE: u64 = 1 << 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TripartiteClass {
    FullySeparable,
    Biseparable(usize),
    WLike,
    GhzLike,
}

impl fmt::Display for TripartiteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripartiteClass::FullySeparable => write!(f, "fully-separable"),
            TripartiteClass::Biseparable(i) => write!(f, "biseparable({i})"),
            TripartiteClass::WLike => write!(f, "W-like"),
            TripartiteClass::GhzLike => write!(f, "GHZ-like"),
        }
    }
}

/// Edge-set shape of a 3-node graph. Ordering follows the report layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Empty,
    OneEdge(usize, usize),
    Chain(usize),
    Triangle,
}

impl Shape {
    pub const ALL: [Shape; 8] = [
        Shape::Empty,
        Shape::OneEdge(1, 2),
        Shape::OneEdge(1, 3),
        Shape::OneEdge(2, 3),
        Shape::Chain(1),
        Shape::Chain(2),
        Shape::Chain(3),
        Shape::Triangle,
    ];

    pub fn of(g: &MenGraph) -> Result<Shape> {
        if g.num_nodes() != 3 {
            return Err(MenError::WrongArity {
                expected: 3,
                found: g.num_nodes(),
            });
        }
        Ok(match g.edges().as_slice() {
            [] => Shape::Empty,
            [(i, j)] => Shape::OneEdge(*i, *j),
            [_, _] => Shape::Chain((1..=3).find(|&v| g.degree(v) == 2).expect("path center")),
            _ => Shape::Triangle,
        })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Empty => write!(f, "empty"),
            Shape::OneEdge(i, j) => write!(f, "one-edge {{{i},{j}}}"),
            Shape::Chain(c) => write!(f, "chain center {c}"),
            Shape::Triangle => write!(f, "triangle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyCensus {
    pub counts: BTreeMap<Shape, usize>,
    pub bases_sampled: usize,
    pub bases_rejected_for_zeros: usize,
}

impl TopologyCensus {
    pub fn count(&self, shape: Shape) -> usize {
        self.counts.get(&shape).copied().unwrap_or(0)
    }

    pub fn accepted(&self) -> usize {
        self.bases_sampled - self.bases_rejected_for_zeros
    }

    pub fn has_non_triangle(&self) -> bool {
        self.counts
            .iter()
            .any(|(s, &k)| *s != Shape::Triangle && k > 0)
    }
}

impl fmt::Display for TopologyCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in Shape::ALL {
            writeln!(f, "{s}: {}", self.count(s))?;
        }
        writeln!(f, "rejected: {}", self.bases_rejected_for_zeros)?;
        write!(f, "sampled: {}", self.bases_sampled)
    }
}

/// Named three-qubit exemplars: `ghz`, `w`, `bell12_0`, `bell13_0`,
/// `bell23_0`, `product`.
pub fn canonical_state(name: &str) -> Result<PureState> {
    let mut amps = [0.0f64; 8];
    let set: &[usize] = match name {
        "ghz" => &[0, 7],
        "w" => &[1, 2, 4],
        "bell12_0" => &[0, 6],
        "bell13_0" => &[0, 5],
        "bell23_0" => &[0, 3],
        "product" => &[0],
        _ => {
            return Err(MenError::InvalidState(format!(
                "unknown canonical state `{name}`"
            )))
        }
    };
    for &k in set {
        amps[k] = 1.0;
    }
    PureState::from_reals(3, &amps)
}

fn require_three(psi: &PureState) -> Result<()> {
    if psi.num_qubits() == 3 {
        Ok(())
    } else {
        Err(MenError::WrongArity {
            expected: 3,
            found: psi.num_qubits(),
        })
    }
}

fn structured_bases() -> Vec<LocalBasisChange> {
    let mut out = Vec::with_capacity(64);
    for a in STRUCTURED_ANGLES {
        for b in STRUCTURED_ANGLES {
            for c in STRUCTURED_ANGLES {
                out.push(LocalBasisChange::rotations(&[a, b, c]));
            }
        }
    }
    out
}

/// Slices of `psi` along `center` as 2x2 matrices over the other two qubits.
fn slices(psi: &PureState, center: usize) -> [[[Complex64; 2]; 2]; 2] {
    let others: Vec<usize> = (1..=3).filter(|&q| q != center).collect();
    let mut m = [[[Complex64::new(0.0, 0.0); 2]; 2]; 2];
    for (k, slice) in m.iter_mut().enumerate() {
        for (r, row) in slice.iter_mut().enumerate() {
            for (s, entry) in row.iter_mut().enumerate() {
                let idx = k * qubit_bit(center, 3)
                    + r * qubit_bit(others[0], 3)
                    + s * qubit_bit(others[1], 3);
                *entry = psi.amplitude(idx);
            }
        }
    }
    m
}

fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Row vectors `u` with `det(u0 M0 + u1 M1) = 0`, normalized.
fn pencil_roots(psi: &PureState, center: usize) -> Vec<[Complex64; 2]> {
    let [m0, m1] = slices(psi, center);
    let c = det2(&m0);
    let a = det2(&m1);
    let b = m0[0][0] * m1[1][1] + m1[0][0] * m0[1][1] - m0[0][1] * m1[1][0] - m1[0][1] * m0[1][0];
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let solve = |p: Complex64, q: Complex64, r: Complex64| -> Vec<Complex64> {
        // p t^2 + q t + r = 0 with |p| the larger leading coefficient
        let disc = (q * q - 4.0 * p * r).sqrt();
        vec![(-q + disc) / (2.0 * p), (-q - disc) / (2.0 * p)]
    };
    let raw: Vec<[Complex64; 2]> = if a.norm() == 0.0 && c.norm() == 0.0 {
        vec![[one, zero], [zero, one]]
    } else if a.norm() >= c.norm() {
        solve(a, b, c).into_iter().map(|t| [one, t]).collect()
    } else {
        solve(c, b, a).into_iter().map(|s| [s, one]).collect()
    };
    raw.into_iter()
        .map(|[u0, u1]| {
            let n = (u0.norm_sqr() + u1.norm_sqr()).sqrt();
            [u0 / n, u1 / n]
        })
        .collect()
}

fn basis_with_first_row(u: [Complex64; 2]) -> Mat2 {
    [[u[0], u[1]], [-u[1].conj(), u[0].conj()]]
}

fn pencil_bases(psi: &PureState, seed: u64) -> Result<Vec<LocalBasisChange>> {
    let mut out = Vec::with_capacity(6);
    let mut stream = PENCIL_STREAM_BASE;
    for center in 1..=3 {
        for u in pencil_roots(psi, center) {
            let mut rng = rng_for(seed, stream);
            stream += 1;
            let mats = (1..=3)
                .map(|q| {
                    if q == center {
                        basis_with_first_row(u)
                    } else {
                        random_unitary(&mut rng)
                    }
                })
                .collect();
            out.push(LocalBasisChange::new(mats)?);
        }
    }
    Ok(out)
}

/// Graph shapes of `psi` across candidate local bases; bases whose smallest
/// amplitude is at or below the zero threshold are counted as rejected.
pub fn topology_census(
    psi: &PureState,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<TopologyCensus> {
    require_three(psi)?;
    let mut bases = structured_bases();
    bases.extend(pencil_bases(psi, seed)?);
    bases.extend((0..samples as u64).map(|k| random_local_basis_change(3, &mut rng_for(seed, k))));

    let mut counts = BTreeMap::new();
    let mut rejected = 0;
    for u in &bases {
        let rotated = psi.apply_local_basis_change(u)?;
        if !rotated.all_nonzero(tol) {
            rejected += 1;
            continue;
        }
        let shape = Shape::of(&build_graph(&rotated, tol).graph)?;
        *counts.entry(shape).or_insert(0) += 1;
    }
    Ok(TopologyCensus {
        counts,
        bases_sampled: bases.len(),
        bases_rejected_for_zeros: rejected,
    })
}

/// Singleton separability first; fully entangled states are GHZ-like iff
/// some accepted basis has a non-triangle graph.
pub fn classify(
    psi: &PureState,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<TripartiteClass> {
    require_three(psi)?;
    let mut separable = Vec::new();
    for i in 1..=3 {
        if is_separable(psi, &QubitSet::from([i]), tol)?.separable {
            separable.push(i);
        }
    }
    match separable.as_slice() {
        [i] => return Ok(TripartiteClass::Biseparable(*i)),
        [] => {}
        // two separable singletons force the third
        _ => return Ok(TripartiteClass::FullySeparable),
    }
    let census = topology_census(psi, samples, seed, tol)?;
    if census.accepted() == 0 {
        return Err(MenError::AllBasesRejected);
    }
    Ok(if census.has_non_triangle() {
        TripartiteClass::GhzLike
    } else {
        TripartiteClass::WLike
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub baseline: TripartiteClass,
    pub trials: Vec<TripartiteClass>,
}

impl InvarianceReport {
    /// `(trial index, class)` for every trial that disagrees with the baseline.
    pub fn changes(&self) -> Vec<(usize, TripartiteClass)> {
        self.trials
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != self.baseline)
            .map(|(k, c)| (k, *c))
            .collect()
    }

    pub fn invariant(&self) -> bool {
        self.changes().is_empty()
    }
}

/// Classifies `psi` and `trials` random local rotations of it.
pub fn class_invariance_check(
    psi: &PureState,
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<InvarianceReport> {
    let baseline = classify(psi, DEFAULT_CENSUS_SAMPLES, seed, tol)?;
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let u = random_local_basis_change(3, &mut rng_for(seed, INVARIANCE_STREAM_BASE + t));
        let rotated = psi.apply_local_basis_change(&u)?;
        out.push(classify(&rotated, DEFAULT_CENSUS_SAMPLES, seed, tol)?);
    }
    Ok(InvarianceReport {
        baseline,
        trials: out,
    })
}
