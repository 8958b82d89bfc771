//! Separability, a-independence and conditional separability of pure states.
//!
//! Every test reduces to 2x2 minors of a reshaped amplitude matrix. A minor
//! counts as vanishing under [`ToleranceConfig::minor`]. Minors are scanned in
//! lexicographic order of (context, row pair, column pair), so the reported
//! witness is the first violation in that order.

use num_complex::Complex64;

use crate::assignment::{assignment_of, Assignment, QubitSet};
use crate::state::PureState;
use crate::{MenError, Result, ToleranceConfig};

/// Marks a verdict computed on a state that has amplitudes at or below the
/// zero threshold, where slice-wise tests can disagree with the
/// unconditional structure of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroAmplitudeWarning {
    pub min_modulus: f64,
    pub zero_count: usize,
}

impl ZeroAmplitudeWarning {
    pub fn check(psi: &PureState, tol: &ToleranceConfig) -> Option<Self> {
        let zero_count = psi
            .amplitudes()
            .iter()
            .filter(|a| tol.is_zero_amplitude(**a))
            .count();
        (zero_count > 0).then(|| ZeroAmplitudeWarning {
            min_modulus: psi.min_modulus(),
            zero_count,
        })
    }
}

/// A violating 2x2 minor: rows and columns are read off the two corners.
///
/// The minor is `a(corner) a(opposite) - a(mixed_1) a(mixed_2)` where the
/// mixed entries swap the column part of the two corners.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorWitness {
    pub corner: Assignment,
    pub opposite: Assignment,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityVerdict {
    pub separable: bool,
    /// Present exactly when `separable` is false.
    pub witness: Option<MinorWitness>,
    pub max_minor_magnitude: f64,
    /// Reference point used by fixed-reference tests.
    pub reference: Option<Assignment>,
    pub zero_amplitude_warning: Option<ZeroAmplitudeWarning>,
}

/// How conditional separability is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparabilityMode {
    /// The fixed-reference amplitude identity, checked verbatim.
    Strict,
    /// Every context slice must have rank at most one.
    #[default]
    Robust,
}

#[derive(Default)]
struct Scan {
    max_minor: f64,
    first: Option<(usize, usize, f64)>,
}

impl Scan {
    fn record(&mut self, det: f64, vanishes: bool, corner: usize, opposite: usize) {
        if det > self.max_minor {
            self.max_minor = det;
        }
        if !vanishes && self.first.is_none() {
            self.first = Some((corner, opposite, det));
        }
    }

    fn into_verdict(
        self,
        n: usize,
        reference: Option<Assignment>,
        warning: Option<ZeroAmplitudeWarning>,
    ) -> SeparabilityVerdict {
        SeparabilityVerdict {
            separable: self.first.is_none(),
            witness: self.first.map(|(c, o, m)| MinorWitness {
                corner: assignment_of(c, n),
                opposite: assignment_of(o, n),
                magnitude: m,
            }),
            max_minor_magnitude: self.max_minor,
            reference,
            zero_amplitude_warning: warning,
        }
    }
}

/// All 2x2 minors of every slice `(ctx, rows, cols)`.
fn scan_all_minors(
    amps: &[Complex64],
    ctx_off: &[usize],
    row_off: &[usize],
    col_off: &[usize],
    tol: &ToleranceConfig,
) -> Scan {
    let mut scan = Scan::default();
    for &ctx in ctx_off {
        for (i, &r1) in row_off.iter().enumerate() {
            for &r2 in &row_off[i + 1..] {
                for (j, &c1) in col_off.iter().enumerate() {
                    for &c2 in &col_off[j + 1..] {
                        let corner = ctx | r1 | c1;
                        let opposite = ctx | r2 | c2;
                        let (det, ok) = tol.minor(
                            amps[corner],
                            amps[ctx | r1 | c2],
                            amps[ctx | r2 | c1],
                            amps[opposite],
                        );
                        scan.record(det, ok, corner, opposite);
                    }
                }
            }
        }
    }
    scan
}

/// Early-exit rank-one test over all slices, used by graph construction.
pub(crate) fn slices_rank_one(
    psi: &PureState,
    a: &QubitSet,
    b: &QubitSet,
    tol: &ToleranceConfig,
) -> bool {
    let n = psi.num_qubits();
    let amps = psi.amplitudes();
    let ctx_off = a.union(b).complement(n).offsets(n);
    let row_off = a.offsets(n);
    let col_off = b.offsets(n);
    for &ctx in &ctx_off {
        for (i, &r1) in row_off.iter().enumerate() {
            for &r2 in &row_off[i + 1..] {
                for (j, &c1) in col_off.iter().enumerate() {
                    for &c2 in &col_off[j + 1..] {
                        let (_, ok) = tol.minor(
                            amps[ctx | r1 | c1],
                            amps[ctx | r1 | c2],
                            amps[ctx | r2 | c1],
                            amps[ctx | r2 | c2],
                        );
                        if !ok {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

fn check_bipartition(m: &QubitSet, n: usize) -> Result<()> {
    m.check_range(n)?;
    if m.is_empty() || m.len() == n {
        return Err(MenError::InvalidPartition(format!(
            "subsystem {m} must be a nonempty proper subset of 1..={n}"
        )));
    }
    Ok(())
}

/// Default reference point: all zeros, unless that amplitude is at or below
/// the zero threshold, in which case the largest-modulus basis state.
pub fn reference_point(psi: &PureState, tol: &ToleranceConfig) -> Assignment {
    let n = psi.num_qubits();
    if tol.is_zero_amplitude(psi.amplitude(0)) {
        assignment_of(psi.argmax_modulus(), n)
    } else {
        Assignment::zeros(n)
    }
}

/// Checks the cross-product identity
/// `a(x_M, x_M') a(x0_M, x0_M') = a(x0_M, x_M') a(x_M, x0_M')` for every
/// `x_M, x_M'`, with the reference read from `x0`.
pub fn a_independent(
    psi: &PureState,
    m: &QubitSet,
    x0: &Assignment,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let n = psi.num_qubits();
    check_bipartition(m, n)?;
    let ref_bits = x0.full_bits(n)?;
    let reference = Assignment::from_bits(&ref_bits);
    let rest = m.complement(n);
    let r0 = reference.restricted(m).index_pattern(n).1;
    let c0 = reference.restricted(&rest).index_pattern(n).1;
    let amps = psi.amplitudes();
    for &r in &m.offsets(n) {
        for &c in &rest.offsets(n) {
            let (_, ok) = tol.minor(amps[r | c], amps[r | c0], amps[r0 | c], amps[r0 | c0]);
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Separability of `M` from its complement: every 2x2 minor of the
/// `2^|M| x 2^(n-|M|)` amplitude matrix vanishes.
pub fn is_separable(
    psi: &PureState,
    m: &QubitSet,
    tol: &ToleranceConfig,
) -> Result<SeparabilityVerdict> {
    let n = psi.num_qubits();
    check_bipartition(m, n)?;
    let scan = scan_all_minors(
        psi.amplitudes(),
        &[0],
        &m.offsets(n),
        &m.complement(n).offsets(n),
        tol,
    );
    Ok(scan.into_verdict(n, None, ZeroAmplitudeWarning::check(psi, tol)))
}

/// Splits a separable state into unit-norm factors on `M` and its complement.
///
/// The reference is the largest-modulus amplitude `a0`. The factors are the
/// reference column `alpha` and reference row `beta`, scaled by `c_alpha`,
/// `c_beta` with `c_alpha c_beta = 1/a0` and `|c_alpha| |alpha| = |c_beta| |beta|`.
pub fn extract_factors(
    psi: &PureState,
    m: &QubitSet,
    tol: &ToleranceConfig,
) -> Result<(PureState, PureState)> {
    let n = psi.num_qubits();
    if !is_separable(psi, m, tol)?.separable {
        return Err(MenError::NotSeparable);
    }
    let ref_index = psi.argmax_modulus();
    let a0 = psi.amplitude(ref_index);
    if tol.is_zero_amplitude(a0) {
        return Err(MenError::DegenerateState);
    }
    let rest = m.complement(n);
    let m_mask = m.mask(n);
    let r0 = ref_index & m_mask;
    let c0 = ref_index & !m_mask;
    let alpha: Vec<Complex64> = m.offsets(n).iter().map(|r| psi.amplitude(r | c0)).collect();
    let beta: Vec<Complex64> = rest.offsets(n).iter().map(|c| psi.amplitude(r0 | c)).collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let c_beta = (norm(&alpha) / (a0.norm() * norm(&beta))).sqrt();
    let c_alpha = (a0 * c_beta).inv();
    let phi = PureState::normalized(m.len(), alpha.iter().map(|z| z * c_alpha).collect())?;
    let chi = PureState::normalized(rest.len(), beta.iter().map(|z| z * c_beta).collect())?;
    Ok((phi, chi))
}

fn check_triple(a: &QubitSet, b: &QubitSet, c: &QubitSet, n: usize) -> Result<()> {
    a.check_range(n)?;
    b.check_range(n)?;
    c.check_range(n)?;
    if a.is_empty() || b.is_empty() {
        return Err(MenError::InvalidPartition(
            "conditionally separated sets must be nonempty".into(),
        ));
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(MenError::InvalidPartition(format!(
            "sets {a}, {b}, {c} overlap"
        )));
    }
    Ok(())
}

/// Conditional separability of `A` and `B` given `C`.
///
/// Qubits outside `A ∪ B ∪ C` are held fixed alongside `C`, so the test runs
/// over every configuration of the complement of `A ∪ B`. Strict mode uses
/// [`reference_point`] as the reference.
pub fn conditionally_separable(
    psi: &PureState,
    a: &QubitSet,
    b: &QubitSet,
    c: &QubitSet,
    tol: &ToleranceConfig,
    mode: SeparabilityMode,
) -> Result<SeparabilityVerdict> {
    match mode {
        SeparabilityMode::Robust => {
            let n = psi.num_qubits();
            check_triple(a, b, c, n)?;
            let ctx = a.union(b).complement(n);
            let scan = scan_all_minors(
                psi.amplitudes(),
                &ctx.offsets(n),
                &a.offsets(n),
                &b.offsets(n),
                tol,
            );
            Ok(scan.into_verdict(n, None, ZeroAmplitudeWarning::check(psi, tol)))
        }
        SeparabilityMode::Strict => {
            let x0 = reference_point(psi, tol);
            conditionally_separable_at(psi, a, b, c, &x0, tol)
        }
    }
}

/// Strict conditional separability against an explicit reference:
/// `a(xA, xB, ctx) a(xA0, xB0, ctx) = a(xA0, xB, ctx) a(xA, xB0, ctx)` for
/// every assignment.
pub fn conditionally_separable_at(
    psi: &PureState,
    a: &QubitSet,
    b: &QubitSet,
    c: &QubitSet,
    x0: &Assignment,
    tol: &ToleranceConfig,
) -> Result<SeparabilityVerdict> {
    let n = psi.num_qubits();
    check_triple(a, b, c, n)?;
    let reference = Assignment::from_bits(&x0.full_bits(n)?);
    let ra = reference.restricted(a).index_pattern(n).1;
    let rb = reference.restricted(b).index_pattern(n).1;
    let ctx = a.union(b).complement(n);
    let amps = psi.amplitudes();
    let mut scan = Scan::default();
    for &k in &ctx.offsets(n) {
        for &xa in &a.offsets(n) {
            for &xb in &b.offsets(n) {
                let corner = k | xa | xb;
                let opposite = k | ra | rb;
                let (det, ok) =
                    tol.minor(amps[corner], amps[k | xa | rb], amps[k | ra | xb], amps[opposite]);
                scan.record(det, ok, corner, opposite);
            }
        }
    }
    Ok(scan.into_verdict(
        n,
        Some(reference),
        ZeroAmplitudeWarning::check(psi, tol),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_nonzero_state, random_product_state};
    use crate::state::{fidelity_up_to_phase, tensor_product, tensor_product_on};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn bell() -> PureState {
        PureState::from_reals(2, &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn ghz() -> PureState {
        PureState::from_reals(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn w() -> PureState {
        PureState::from_reals(3, &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    fn plus() -> PureState {
        PureState::from_reals(1, &[1.0, 1.0]).unwrap()
    }

    /// Brute-force oracle: largest |det| over all 2x2 minors of the reshaped
    /// matrix, computed from `reshape` rather than index offsets.
    fn max_minor_oracle(psi: &PureState, m: &QubitSet) -> f64 {
        let mat = psi.reshape(m);
        let mut best: f64 = 0.0;
        for i in 0..mat.len() {
            for i2 in 0..mat.len() {
                for j in 0..mat[0].len() {
                    for j2 in 0..mat[0].len() {
                        let d = mat[i][j] * mat[i2][j2] - mat[i][j2] * mat[i2][j];
                        best = best.max(d.norm());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn bell_is_not_a_independent() {
        let x0 = Assignment::zeros(2);
        assert!(!a_independent(&bell(), &QubitSet::from([1]), &x0, &tol()).unwrap());
        // the single violated identity has magnitude 1/2
        assert!((max_minor_oracle(&bell(), &QubitSet::from([1])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_is_a_independent() {
        let psi = tensor_product(&plus(), &PureState::basis(1, 0).unwrap()).unwrap();
        let x0 = Assignment::zeros(2);
        assert!(a_independent(&psi, &QubitSet::from([1]), &x0, &tol()).unwrap());
    }

    #[test]
    fn reference_identity_is_trivial() {
        // only the reference row/column: every identity instance reads 0 = 0
        let psi = random_nonzero_state(3, 1, 1e-6).unwrap();
        let n = 3;
        let m = QubitSet::from([2]);
        let rest = m.complement(n);
        let amps = psi.amplitudes();
        for &c in &rest.offsets(n) {
            let (det, ok) = tol().minor(amps[c], amps[0], amps[c], amps[0]);
            assert!(ok);
            assert_eq!(det, 0.0);
        }
    }

    #[test]
    fn invalid_bipartitions() {
        let x0 = Assignment::zeros(2);
        for m in [QubitSet::empty(), QubitSet::from([1, 2]), QubitSet::from([3])] {
            assert!(matches!(
                is_separable(&bell(), &m, &tol()),
                Err(MenError::InvalidPartition(_))
            ));
            assert!(a_independent(&bell(), &m, &x0, &tol()).is_err());
        }
    }

    #[test]
    fn separability_examples() {
        let v = is_separable(&ghz(), &QubitSet::from([1]), &tol()).unwrap();
        assert!(!v.separable);
        assert!((v.max_minor_magnitude - 0.5).abs() < 1e-15);
        let wit = v.witness.unwrap();
        assert_eq!(wit.corner.to_bit_string(3), "000");
        assert_eq!(wit.opposite.to_bit_string(3), "111");

        let v = is_separable(&w(), &QubitSet::from([3]), &tol()).unwrap();
        assert!(!v.separable);
        assert!(v.witness.is_some());

        let zero_bell = tensor_product(&PureState::basis(1, 0).unwrap(), &bell()).unwrap();
        let v = is_separable(&zero_bell, &QubitSet::from([1]), &tol()).unwrap();
        assert!(v.separable);
        assert!(v.witness.is_none());
        assert_eq!(v.max_minor_magnitude, 0.0);
        assert_eq!(max_minor_oracle(&zero_bell, &QubitSet::from([1])), 0.0);
    }

    #[test]
    fn max_minor_matches_oracle_on_random_states() {
        for seed in 0..10 {
            let psi = crate::random::random_state(4, seed).unwrap();
            for mask in 1..15usize {
                let m = QubitSet::from_mask(mask, 4);
                let v = is_separable(&psi, &m, &tol()).unwrap();
                let o = max_minor_oracle(&psi, &m);
                assert!((v.max_minor_magnitude - o).abs() <= 1e-15 + 1e-12 * o);
            }
        }
    }

    #[test]
    fn extract_factors_examples() {
        let psi = tensor_product(&plus(), &PureState::basis(1, 1).unwrap()).unwrap();
        let (phi, chi) = extract_factors(&psi, &QubitSet::from([1]), &tol()).unwrap();
        assert!((fidelity_up_to_phase(&phi, &plus()) - 1.0).abs() < 1e-12);
        assert!(
            (fidelity_up_to_phase(&chi, &PureState::basis(1, 1).unwrap()) - 1.0).abs() < 1e-12
        );

        let blocks = [QubitSet::from([1, 2]), QubitSet::from([3])];
        let p = random_product_state(&blocks, 4).unwrap();
        let (phi, chi) = extract_factors(&p.state, &blocks[0], &tol()).unwrap();
        let back = tensor_product_on(&phi, &blocks[0], &chi, 3).unwrap();
        assert!(fidelity_up_to_phase(&back, &p.state) >= 1.0 - 1e-9);

        assert_eq!(
            extract_factors(&bell(), &QubitSet::from([1]), &tol()),
            Err(MenError::NotSeparable)
        );
    }

    #[test]
    fn extract_factors_on_interleaved_blocks() {
        let blocks = [QubitSet::from([1, 3]), QubitSet::from([2, 4])];
        for seed in 0..5 {
            let p = random_product_state(&blocks, seed).unwrap();
            let (phi, chi) = extract_factors(&p.state, &blocks[0], &tol()).unwrap();
            assert!((phi.norm() - 1.0).abs() < 1e-12 && (chi.norm() - 1.0).abs() < 1e-12);
            let back = tensor_product_on(&phi, &blocks[0], &chi, 4).unwrap();
            assert!(fidelity_up_to_phase(&back, &p.state) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn w_conditionally_entangled() {
        let s = |v: &[usize]| QubitSet::from(v);
        let v = conditionally_separable(
            &w(),
            &s(&[1]),
            &s(&[2]),
            &s(&[3]),
            &tol(),
            SeparabilityMode::Robust,
        )
        .unwrap();
        assert!(!v.separable);
        // slice x3 = 0: [[a000, a010], [a100, a110]] = [[0, 1], [1, 0]] / sqrt 3
        let wit = v.witness.unwrap();
        assert_eq!(wit.corner.to_bit_string(3), "000");
        assert_eq!(wit.opposite.to_bit_string(3), "110");
        assert!((wit.magnitude - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn product_conditionally_separable_in_both_modes() {
        let blocks = [QubitSet::from([1]), QubitSet::from([2]), QubitSet::from([3])];
        let p = random_product_state(&blocks, 11).unwrap();
        for mode in [SeparabilityMode::Robust, SeparabilityMode::Strict] {
            let v = conditionally_separable(
                &p.state,
                &blocks[0],
                &blocks[1],
                &blocks[2],
                &tol(),
                mode,
            )
            .unwrap();
            assert!(v.separable);
        }
    }

    #[test]
    fn ghz_pathology_is_flagged() {
        let s = |v: &[usize]| QubitSet::from(v);
        let v = conditionally_separable(
            &ghz(),
            &s(&[1]),
            &s(&[2]),
            &s(&[3]),
            &tol(),
            SeparabilityMode::Robust,
        )
        .unwrap();
        assert!(v.separable);
        let warn = v.zero_amplitude_warning.unwrap();
        assert_eq!(warn.zero_count, 6);
        // yet the state is unconditionally entangled
        assert!(!is_separable(&ghz(), &s(&[1]), &tol()).unwrap().separable);
    }

    #[test]
    fn strict_reference_falls_back_when_default_vanishes() {
        let x0 = reference_point(&w(), &tol());
        assert_eq!(x0.to_bit_string(3), "001");
        let x0 = reference_point(&ghz(), &tol());
        assert_eq!(x0.to_bit_string(3), "000");
    }

    #[test]
    fn overlapping_sets_rejected() {
        let s = |v: &[usize]| QubitSet::from(v);
        let r = conditionally_separable(
            &ghz(),
            &s(&[1]),
            &s(&[1, 2]),
            &s(&[3]),
            &tol(),
            SeparabilityMode::Robust,
        );
        assert!(matches!(r, Err(MenError::InvalidPartition(_))));
        let r = conditionally_separable(
            &ghz(),
            &s(&[]),
            &s(&[2]),
            &s(&[3]),
            &tol(),
            SeparabilityMode::Robust,
        );
        assert!(r.is_err());
    }
}
