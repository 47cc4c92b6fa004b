//! The files under data/ are the engine's own catalog serialized; this test
//! keeps them in sync. `BLESS=1 cargo test -p courant-cli --test data_files`
//! rewrites them.

use std::fs;
use std::path::PathBuf;

use courant::algebroid::{catalog, Christoffel};
use courant::dorfman::{build_connection, build_example_mjl, build_port_hamiltonian_connections, PredualBundle};
use courant::{CourantAlgebroid, ScalarRing};
use courant_cli::input::{AlgebroidFile, ChristoffelFile, ConnectionFile, DiracFile, PredualFile};
use serde::Serialize;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn parse(n: usize, rows: &[&[&str]]) -> Christoffel {
    let ring = ScalarRing::new(n).unwrap();
    let v = rows.len() / n;
    Christoffel::from_fn(n, v, |i, a, b| ring.parse(rows[i * v + a][b]).unwrap())
}

/// Δ on standard(2) used for the curved Christoffel examples.
pub fn polynomial_christoffel() -> Christoffel {
    parse(2, &[&["x1", "0"], &["x2^2", "1/2"], &["x1*x2", "-1"], &["0", "x1 - 2"]])
}

fn port_hamiltonian_delta() -> Christoffel {
    parse(1, &[&["x1"]])
}

fn documents() -> Vec<(&'static str, String)> {
    fn j<T: Serialize>(v: &T) -> String {
        serde_json::to_string_pretty(v).unwrap() + "\n"
    }
    let alg = |e: &CourantAlgebroid| j(&AlgebroidFile::from_algebroid(e));
    let std = |n| CourantAlgebroid::standard(n).unwrap();
    let ph = port_hamiltonian_delta();
    let (nabla, nabla_prime) = build_port_hamiltonian_connections(&ph).unwrap();
    let dirac = |rows: &[[&str; 4]]| {
        j(&DiracFile { frame: rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect() })
    };
    let zero2 = Christoffel::trivial(2, 2);
    let poly2 = polynomial_christoffel();
    vec![
        ("standard1.json", alg(&std(1))),
        ("standard2.json", alg(&std(2))),
        ("standard3.json", alg(&std(3))),
        ("su2.json", alg(&catalog::su2())),
        ("su2_plus_line.json", alg(&catalog::su2_plus_line())),
        ("su2_bad_metric.json", alg(&catalog::su2_with_metric([1, 1, 2]))),
        ("abelian4.json", alg(&catalog::abelian(4))),
        ("port_hamiltonian.json", alg(&CourantAlgebroid::port_hamiltonian(&ph).unwrap())),
        ("port_hamiltonian_christoffel.json", j(&ChristoffelFile::from_christoffel(&ph))),
        ("port_hamiltonian_b.json", j(&PredualFile::from_bundle(nabla.bundle()))),
        ("port_hamiltonian_b_dual.json", j(&PredualFile::from_bundle(nabla_prime.bundle()))),
        ("port_hamiltonian_b_connection.json", j(&ConnectionFile::from_connection(&nabla))),
        ("port_hamiltonian_b_dual_connection.json", j(&ConnectionFile::from_connection(&nabla_prime))),
        ("christoffel_zero2.json", j(&ChristoffelFile::from_christoffel(&zero2))),
        ("christoffel_poly2.json", j(&ChristoffelFile::from_christoffel(&poly2))),
        ("mjl_zero2_connection.json", j(&ConnectionFile::from_connection(&build_example_mjl(&zero2).unwrap()))),
        ("mjl_poly2_connection.json", j(&ConnectionFile::from_connection(&build_example_mjl(&poly2).unwrap()))),
        (
            "standard2_connection.json",
            j(&ConnectionFile::from_connection(&build_connection(&PredualBundle::of_algebroid(&std(2))).unwrap())),
        ),
        ("dirac_tangent.json", dirac(&[["1", "0", "0", "0"], ["0", "1", "0", "0"]])),
        ("dirac_graph.json", dirac(&[["1", "0", "0", "3"], ["0", "1", "-3", "0"]])),
        ("bad_dirac.json", dirac(&[["1", "0", "1", "0"], ["0", "1", "0", "0"]])),
    ]
}

#[test]
fn data_files_match_the_catalog() {
    let dir = data_dir();
    let bless = std::env::var_os("BLESS").is_some();
    if bless {
        fs::create_dir_all(&dir).unwrap();
    }
    for (name, text) in documents() {
        let path = dir.join(name);
        if bless {
            fs::write(&path, &text).unwrap();
        } else {
            let on_disk = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(on_disk, text, "{name} is stale; rerun with BLESS=1");
        }
    }
}

#[test]
fn algebroid_files_round_trip() {
    for e in [CourantAlgebroid::standard(2).unwrap(), catalog::su2(), port_hamiltonian()] {
        let file = AlgebroidFile::from_algebroid(&e);
        let text = serde_json::to_string(&file).unwrap();
        let back: AlgebroidFile = serde_json::from_str(&text).unwrap();
        let d = back.parse().unwrap();
        let e2 = CourantAlgebroid::from_structure_data(d.n, d.rank, d.pairing, d.anchor, d.bracket).unwrap();
        assert_eq!(AlgebroidFile::from_algebroid(&e2), file);
    }
    let poly = polynomial_christoffel();
    assert_eq!(ChristoffelFile::from_christoffel(&poly).parse().unwrap(), poly);
}

fn port_hamiltonian() -> CourantAlgebroid {
    CourantAlgebroid::port_hamiltonian(&port_hamiltonian_delta()).unwrap()
}
