//! Exhaustive checks of the perfect-map property and of the graphoid axioms.

use std::collections::HashMap;
use std::fmt;

use crate::assignment::QubitSet;
use crate::men::graph::MenGraph;
use crate::separability::{slices_rank_one, ZeroAmplitudeWarning};
use crate::state::PureState;
use crate::{MenError, Result, ToleranceConfig};

/// Largest register [`verify_perfect_map`] enumerates.
pub const PERFECT_MAP_MAX_QUBITS: usize = 6;
pub const DEFAULT_GRAPHOID_BOUND: usize = 4;

/// One split `(A, B, C)` where the state and the graph disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionDisagreement {
    pub a: QubitSet,
    pub b: QubitSet,
    pub c: QubitSet,
    pub conditionally_separable: bool,
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfectMapReport {
    pub num_qubits: usize,
    pub partitions_checked: usize,
    pub disagreements: Vec<PartitionDisagreement>,
    pub zero_amplitude_warning: Option<ZeroAmplitudeWarning>,
}

impl PerfectMapReport {
    pub fn passes(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Memoized `I(A, B | C)`.
///
/// Qubits outside `A ∪ B ∪ C` are held fixed together with `C`, so the value
/// depends on `A` and `B` only and the cache is keyed on those.
struct Independence<'a> {
    psi: &'a PureState,
    tol: &'a ToleranceConfig,
    cache: HashMap<(usize, usize), bool>,
}

impl<'a> Independence<'a> {
    fn new(psi: &'a PureState, tol: &'a ToleranceConfig) -> Self {
        Independence {
            psi,
            tol,
            cache: HashMap::new(),
        }
    }

    fn holds(&mut self, a: usize, b: usize, _c: usize) -> bool {
        let n = self.psi.num_qubits();
        let (psi, tol) = (self.psi, self.tol);
        *self.cache.entry((a, b)).or_insert_with(|| {
            slices_rank_one(psi, &QubitSet::from_mask(a, n), &QubitSet::from_mask(b, n), tol)
        })
    }
}

/// Compares conditional separability with graph separation on every split
/// of the qubits into `A`, `B`, `C` with `A`, `B` nonempty.
///
/// `C = ∅` is included, where conditional separability is plain
/// separability and separation means no path between `A` and `B`. Splits
/// that differ only by swapping `A` and `B` are checked once.
pub fn verify_perfect_map(
    psi: &PureState,
    g: &MenGraph,
    tol: &ToleranceConfig,
) -> Result<PerfectMapReport> {
    let n = psi.num_qubits();
    if n > PERFECT_MAP_MAX_QUBITS {
        return Err(MenError::EnumerationBoundExceeded {
            n,
            limit: PERFECT_MAP_MAX_QUBITS,
        });
    }
    if g.num_nodes() != n {
        return Err(MenError::WrongArity {
            expected: n,
            found: g.num_nodes(),
        });
    }
    let mut indep = Independence::new(psi, tol);
    let mut checked = 0;
    let mut disagreements = Vec::new();
    for (a, b, c) in labelings(n, 3).map(|m| (m[0], m[1], m[2])) {
        if a == 0 || b == 0 || a.leading_zeros() > b.leading_zeros() {
            // keep the split whose A holds the lowest-numbered qubit of A ∪ B
            continue;
        }
        checked += 1;
        let cs = indep.holds(a, b, c);
        let (sa, sb, sc) = (
            QubitSet::from_mask(a, n),
            QubitSet::from_mask(b, n),
            QubitSet::from_mask(c, n),
        );
        let sep = g.separates(&sa, &sb, &sc)?;
        if cs != sep {
            disagreements.push(PartitionDisagreement {
                a: sa,
                b: sb,
                c: sc,
                conditionally_separable: cs,
                separated: sep,
            });
        }
    }
    Ok(PerfectMapReport {
        num_qubits: n,
        partitions_checked: checked,
        disagreements,
        zero_amplitude_warning: ZeroAmplitudeWarning::check(psi, tol),
    })
}

/// Every way of labelling `n` qubits with one of `k` labels, as one mask
/// per label (masks use the MSB-first qubit convention).
fn labelings(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = k.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut masks = vec![0usize; k];
        for q in 1..=n {
            masks[code % k] |= 1 << (n - q);
            code /= k;
        }
        masks
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphoidAxiom {
    Symmetry,
    Decomposition,
    Intersection,
    StrongUnion,
    Transitivity,
}

impl GraphoidAxiom {
    pub const ALL: [GraphoidAxiom; 5] = [
        GraphoidAxiom::Symmetry,
        GraphoidAxiom::Decomposition,
        GraphoidAxiom::Intersection,
        GraphoidAxiom::StrongUnion,
        GraphoidAxiom::Transitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphoidAxiom::Symmetry => "symmetry",
            GraphoidAxiom::Decomposition => "decomposition",
            GraphoidAxiom::Intersection => "intersection",
            GraphoidAxiom::StrongUnion => "strong-union",
            GraphoidAxiom::Transitivity => "transitivity",
        }
    }
}

impl fmt::Display for GraphoidAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomTally {
    pub instances: usize,
    pub violations: usize,
    /// First few violating instances, rendered as text.
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphoidReport {
    pub num_qubits: usize,
    /// `None` when the register exceeds the enumeration bound.
    pub tallies: Option<Vec<(GraphoidAxiom, AxiomTally)>>,
    pub zero_amplitude_warning: Option<ZeroAmplitudeWarning>,
}

impl GraphoidReport {
    pub fn skipped(&self) -> bool {
        self.tallies.is_none()
    }

    pub fn passes(&self) -> bool {
        self.tallies
            .as_ref()
            .is_some_and(|t| t.iter().all(|(_, tally)| tally.violations == 0))
    }

    pub fn tally(&self, axiom: GraphoidAxiom) -> Option<&AxiomTally> {
        self.tallies
            .as_ref()?
            .iter()
            .find(|(a, _)| *a == axiom)
            .map(|(_, t)| t)
    }
}

const MAX_EXAMPLES: usize = 3;

/// Checks symmetry, decomposition, intersection, strong union and
/// transitivity of the conditional-separability relation (robust mode) on
/// every disjoint tuple of qubit subsets.
///
/// Forms checked, with `A`, `B`, `D` nonempty and `C` possibly empty:
/// - symmetry: `I(A,B|C) => I(B,A|C)`
/// - decomposition: `I(A,B∪D|C) => I(A,B|C) ∧ I(A,D|C)`
/// - intersection: `I(A,B|C∪D) ∧ I(A,D|C∪B) => I(A,B∪D|C)`
/// - strong union: `I(A,B|C) => I(A,B|C∪D)`
/// - transitivity: `I(A,B|C) => I(A,v|C) ∨ I(v,B|C)` for each qubit `v`
///   outside `A ∪ B ∪ C`
pub fn check_graphoid_axioms(
    psi: &PureState,
    tol: &ToleranceConfig,
    n_bound: usize,
) -> GraphoidReport {
    let n = psi.num_qubits();
    let warning = ZeroAmplitudeWarning::check(psi, tol);
    if n > n_bound {
        return GraphoidReport {
            num_qubits: n,
            tallies: None,
            zero_amplitude_warning: warning,
        };
    }
    let mut indep = Independence::new(psi, tol);
    let mut tallies: Vec<(GraphoidAxiom, AxiomTally)> = GraphoidAxiom::ALL
        .iter()
        .map(|&a| (a, AxiomTally::default()))
        .collect();
    let show = |m: usize| QubitSet::from_mask(m, n).to_string();

    let mut record = |axiom: GraphoidAxiom, ok: bool, describe: &dyn Fn() -> String| {
        let tally = &mut tallies[axiom as usize].1;
        tally.instances += 1;
        if !ok {
            tally.violations += 1;
            if tally.examples.len() < MAX_EXAMPLES {
                tally.examples.push(describe());
            }
        }
    };

    // labels: A, B, C, D, rest
    for masks in labelings(n, 5) {
        let (a, b, c, d, rest) = (masks[0], masks[1], masks[2], masks[3], masks[4]);
        if a == 0 || b == 0 {
            continue;
        }
        if d == 0 {
            let ab = indep.holds(a, b, c);
            let ba = indep.holds(b, a, c);
            record(GraphoidAxiom::Symmetry, ab == ba, &|| {
                format!("I({},{}|{}) = {ab}, reversed = {ba}", show(a), show(b), show(c))
            });
            for v in (0..n).map(|k| 1usize << k).filter(|v| rest & v != 0) {
                let ok = !ab || indep.holds(a, v, c) || indep.holds(v, b, c);
                record(GraphoidAxiom::Transitivity, ok, &|| {
                    format!(
                        "I({},{}|{}) holds but {} is dependent on both",
                        show(a),
                        show(b),
                        show(c),
                        show(v)
                    )
                });
            }
        } else {
            let ok = !indep.holds(a, b | d, c) || (indep.holds(a, b, c) && indep.holds(a, d, c));
            record(GraphoidAxiom::Decomposition, ok, &|| {
                format!("I({},{}|{})", show(a), show(b | d), show(c))
            });
            let ok = !(indep.holds(a, b, c | d) && indep.holds(a, d, c | b))
                || indep.holds(a, b | d, c);
            record(GraphoidAxiom::Intersection, ok, &|| {
                format!(
                    "I({},{}|{}) and I({},{}|{}) but not I({},{}|{})",
                    show(a),
                    show(b),
                    show(c | d),
                    show(a),
                    show(d),
                    show(c | b),
                    show(a),
                    show(b | d),
                    show(c)
                )
            });
            let ok = !indep.holds(a, b, c) || indep.holds(a, b, c | d);
            record(GraphoidAxiom::StrongUnion, ok, &|| {
                format!(
                    "I({},{}|{}) but not I({},{}|{})",
                    show(a),
                    show(b),
                    show(c),
                    show(a),
                    show(b),
                    show(c | d)
                )
            });
        }
    }
    GraphoidReport {
        num_qubits: n,
        tallies: Some(tallies),
        zero_amplitude_warning: warning,
    }
}
