//! Figure datasets pinned by SHA-256 digest, plus one small sweep kept in
//! full. Set `SPINWIRE_BLESS=1` to rewrite the files after an intended
//! change.

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use spinwire::figures::{self, Figure};
use spinwire::sweep::{run_sweep, Execution, SweepSpec};
use spinwire::Sector;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn bless() -> bool {
    std::env::var_os("SPINWIRE_BLESS").is_some()
}

fn check(name: &str, actual: &str) {
    let path = golden(name);
    if bless() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

#[test]
fn figure_digests() {
    for figure in Figure::ALL {
        let csv = figures::build(figure, Execution::Parallel).unwrap().to_csv();
        let digest = hex::encode(Sha256::digest(csv.as_bytes()));
        check(&format!("{}.sha256", figure.id()), &format!("{digest}\n"));
    }
}

#[test]
fn serial_and_parallel_agree() {
    for figure in Figure::ALL {
        let a = figures::build(figure, Execution::Serial).unwrap().to_csv();
        let b = figures::build(figure, Execution::Parallel).unwrap().to_csv();
        assert!(a == b, "{figure}");
    }
}

#[test]
fn coarse_fig4a_sweep() {
    let p = figures::params(Figure::Fig4a);
    let table = run_sweep(&p, &SweepSpec::energy(Sector::Mixed, -1.2, 2.8, 41)).unwrap();
    check("fig4a_coarse.csv", &table.to_csv());
}
