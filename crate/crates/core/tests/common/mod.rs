#![allow(dead_code)]

use std::path::{Path, PathBuf};

use men_core::classify::canonical_state;
use men_core::format::{write_model, write_state};
use men_core::inference::random_chain_model;
use men_core::men::reconstruct_state;
use men_core::random::random_nonzero_state;
use men_core::PureState;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

/// Fixture files as `(name, contents)`, regenerated from library code.
pub fn fixtures() -> Vec<(&'static str, String)> {
    let plusplus = PureState::from_reals(2, &[1.0; 4]).unwrap();
    let chain = random_chain_model(4, 1, 1e-6).unwrap();
    let mut out = vec![("plusplus.state", write_state(&plusplus))];
    for name in ["ghz", "w", "bell12_0", "bell13_0", "bell23_0", "product"] {
        let file: &'static str = Box::leak(format!("{name}.state").into_boxed_str());
        out.push((file, write_state(&canonical_state(name).unwrap())));
    }
    out.push(("chain4.model", write_model(&chain)));
    out.push(("chain4.state", write_state(&reconstruct_state(&chain).unwrap())));
    out.push(("random3.state", write_state(&random_nonzero_state(3, 7, 1e-6).unwrap())));
    out.push(("random7.state", write_state(&random_nonzero_state(7, 2, 1e-6).unwrap())));
    out
}

/// Golden CLI cases: name and arguments after the program name. `{fx}`
/// expands to the fixture directory and `{tmp}` to a scratch directory.
pub const CASES: &[(&str, &[&str])] = &[
    ("graph_w", &["graph", "{fx}/w.state"]),
    ("graph_w_dot", &["graph", "{fx}/w.state", "--dot"]),
    ("graph_chain4", &["graph", "{fx}/chain4.state"]),
    ("graph_ghz_loose", &["graph", "{fx}/ghz.state", "--tolerance", "1e-6"]),
    ("extract_random3", &["extract", "{fx}/random3.state", "-o", "{tmp}/out.model"]),
    ("extract_w_zero", &["extract", "{fx}/w.state", "-o", "{tmp}/out.model"]),
    (
        "reconstruct_chain4",
        &["reconstruct", "{fx}/chain4.model", "-o", "{tmp}/out.state", "--check", "{fx}/chain4.state"],
    ),
    ("marginal_plusplus", &["marginal", "{fx}/plusplus.state", "--assign", "1=0"]),
    ("marginal_w", &["marginal", "{fx}/w.state", "--assign", "1=0"]),
    ("marginal_chain4_ratio", &["marginal", "{fx}/chain4.model", "--assign", "1=1,3=0", "--ratio"]),
    ("marginal_chain4", &["marginal", "{fx}/chain4.model", "--assign", "1=1,3=0"]),
    ("marginal_bad_qubit", &["marginal", "{fx}/plusplus.state", "--assign", "3=0"]),
    ("marginal_bad_syntax", &["marginal", "{fx}/plusplus.state", "--assign", "1=2"]),
    (
        "conditional_plusplus",
        &["conditional", "{fx}/plusplus.state", "--query", "1=0", "--evidence", "2=1"],
    ),
    (
        "conditional_chain4",
        &["conditional", "{fx}/chain4.model", "--query", "1=0", "--evidence", "3=1"],
    ),
    (
        "conditional_w_zero",
        &["conditional", "{fx}/w.state", "--query", "1=1", "--evidence", "2=1,3=1"],
    ),
    ("mle_chain4_model", &["mle", "{fx}/chain4.model"]),
    ("mle_chain4_state", &["mle", "{fx}/chain4.state"]),
    ("mle_plusplus", &["mle", "{fx}/plusplus.state"]),
    (
        "measure_ghz",
        &["measure", "{fx}/ghz.state", "--qubit", "1", "--outcome", "0", "-o", "{tmp}/m.state"],
    ),
    ("measure_chain4", &["measure", "{fx}/chain4.state", "--qubit", "2", "--outcome", "1"]),
    ("measure_product_zero", &["measure", "{fx}/product.state", "--qubit", "1", "--outcome", "1"]),
    ("classify_ghz", &["classify", "{fx}/ghz.state", "--samples", "256", "--seed", "7"]),
    ("classify_w", &["classify", "{fx}/w.state", "--samples", "256", "--seed", "7"]),
    ("classify_bell23_0", &["classify", "{fx}/bell23_0.state", "--samples", "16", "--seed", "7"]),
    ("classify_product", &["classify", "{fx}/product.state", "--samples", "16", "--seed", "7"]),
    ("classify_arity", &["classify", "{fx}/plusplus.state"]),
    ("verify_chain4", &["verify", "{fx}/chain4.state"]),
    ("verify_ghz", &["verify", "{fx}/ghz.state"]),
    ("verify_too_large", &["verify", "{fx}/random7.state"]),
    (
        "bench_small",
        &["bench", "--sizes", "4,8,16", "--seed", "1", "--repetitions", "1", "--mask-timing"],
    ),
    ("no_subcommand", &[]),
];

pub fn expand(args: &[&str], tmp: &Path) -> Vec<String> {
    let fx = fixtures_dir();
    std::iter::once("men".to_string())
        .chain(args.iter().map(|a| {
            a.replace("{fx}", fx.to_str().unwrap())
                .replace("{tmp}", tmp.to_str().unwrap())
        }))
        .collect()
}

/// Runs a case and renders exit code, stdout and stderr as one document.
pub fn render(args: &[&str], tmp: &Path) -> String {
    let out = men_core::cli::run(expand(args, tmp));
    format!(
        "exit: {}\n--- stdout\n{}--- stderr\n{}",
        out.code, out.stdout, out.stderr
    )
}

/// Compares every case against its golden file (writing them when
/// `UPDATE_GOLDEN` is set) and checks that a second run is byte-identical.
/// Returns one message per mismatch.
pub fn check_golden_cases() -> Vec<String> {
    let mut problems = Vec::new();
    for (name, contents) in fixtures() {
        let path = fixtures_dir().join(name);
        if updating() {
            std::fs::write(&path, &contents).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(contents.as_str()) {
            problems.push(format!("fixture {name} differs from its generator"));
        }
    }
    for (name, args) in CASES {
        let tmp = tempfile::tempdir().unwrap();
        let first = render(args, tmp.path());
        let second = render(args, tmp.path());
        if first != second {
            problems.push(format!("{name}: rerun output differs"));
        }
        let path = golden_dir().join(format!("{name}.out"));
        if updating() {
            std::fs::write(&path, &first).unwrap();
        } else {
            match std::fs::read_to_string(&path) {
                Ok(expected) if expected == first => {}
                Ok(_) => problems.push(format!("{name}: output differs from golden file")),
                Err(_) => problems.push(format!("{name}: golden file missing")),
            }
        }
    }
    problems
}
