use std::time::Instant;

use courant::algebroid::{catalog, Christoffel};
use courant::battery::{Battery, BatteryConfig};
use courant::dorfman::{
    affine_combine, bianchi_check, bott_connection, build_connection, build_example_mjl,
    build_port_hamiltonian_connections, connection_flatness, covariant_laws, curvature_laws, curvature_r1,
    curvature_symbol_checks, difference_check, dual_connection, dual_curvature_check, endo_connection,
    endo_curvature_check, induced_linear_connection, verify_connection, AdaptedCase, BSection, Connection,
    DorfmanConnection, DorfmanError, PredualBundle, Splitting,
};
use courant::linalg::Matrix;
use courant::report::Report;
use courant::{CourantAlgebroid, Scalar, Section};

fn s(t: &str) -> Scalar {
    t.parse().unwrap()
}

fn mat(rows: &[&[&str]]) -> Matrix<Scalar> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|x| s(x)).collect()).collect())
}

fn sec(xs: &[&str]) -> Section {
    Section(xs.iter().map(|x| s(x)).collect())
}

fn assert_passes(what: &str, r: &Report) {
    for c in &r.checks {
        assert!(c.cases > 0 || c.name.contains("image"), "{what}: {} ran no cases", c.name);
    }
    assert!(r.passed(), "{what}:\n{r}");
}

fn default_battery(e: &CourantAlgebroid) -> Battery {
    Battery::new(e, BatteryConfig::default())
}

/// Degree ≤ 2 Christoffel symbols with no special structure.
fn random_delta() -> Christoffel {
    let table = ["x1", "x2^2", "1", "x1*x2", "0", "-x2", "2*x1 - 1", "x1^2"];
    Christoffel::from_fn(2, 2, |i, j, k| s(table[i * 4 + j * 2 + k]))
}

fn d(f: &Scalar, i: usize) -> Scalar {
    f.derivative(i)
}

fn along(x: &[Scalar], f: &Scalar) -> Scalar {
    x.iter().enumerate().fold(Scalar::zero(), |acc, (i, xi)| acc + xi * &d(f, i))
}

/// `(Δ_XY)^k`.
fn delta_apply(delta: &Christoffel, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let n = delta.n;
    (0..n)
        .map(|k| {
            let mut out = along(x, &y[k]);
            for i in 0..n {
                for j in 0..n {
                    out = out + &x[i] * &y[j] * delta.get(i, j, k);
                }
            }
            out
        })
        .collect()
}

/// `(Δ*_Xη)_k = X(η_k) − η(Δ_X∂_k)`.
fn dual_delta_apply(delta: &Christoffel, x: &[Scalar], eta: &[Scalar]) -> Vec<Scalar> {
    let n = delta.n;
    (0..n)
        .map(|k| {
            let mut out = along(x, &eta[k]);
            for i in 0..n {
                for j in 0..n {
                    out = out - &x[i] * delta.get(i, k, j) * &eta[j];
                }
            }
            out
        })
        .collect()
}

/// The displayed formula `(Δ_XY, 𝓛_Xη + ⟨Δ*_·ζ, Y⟩)` for arbitrary arguments.
fn mjl_oracle(delta: &Christoffel, e: &Section, b: &BSection) -> BSection {
    let n = delta.n;
    let (x, zeta) = (&e.0[..n], &e.0[n..]);
    let (y, eta) = (&b.0[..n], &b.0[n..]);
    let mut out = delta_apply(delta, x, y);
    let zeta_y = zeta.iter().zip(y).fold(Scalar::zero(), |a, (p, q)| a + p * q);
    for k in 0..n {
        let mut lie = along(x, &eta[k]);
        for i in 0..n {
            lie = lie + &eta[i] * &d(&x[i], k);
        }
        let mut unit = vec![Scalar::zero(); n];
        unit[k] = Scalar::one();
        let dy = delta_apply(delta, &unit, y);
        let mut pairing = d(&zeta_y, k);
        for m in 0..n {
            pairing = pairing - &zeta[m] * &dy[m];
        }
        out.push(lie + pairing);
    }
    BSection(out)
}

#[test]
fn mjl_connection_matches_displayed_formula() {
    for delta in [Christoffel::trivial(2, 2), random_delta()] {
        let conn = build_example_mjl(&delta).unwrap();
        let e = conn.algebroid().clone();
        let b = default_battery(&e);
        assert_passes("mjl verify", &verify_connection(&conn, &b));
        let bs = conn.bundle().battery_sections(&b);
        for i in 0..b.sections.len() {
            for j in 0..bs.len() {
                let (x, y) = (b.sections.value(i), bs.value(j));
                assert_eq!(conn.apply(x, y), mjl_oracle(&delta, x, y), "{} {}", b.sections.label(i), bs.label(j));
            }
        }
    }
}

#[test]
fn mjl_on_exact_forms_is_lie_derivative() {
    // ∇_{(X,ζ)}(0, df) = (0, 𝓛_X df) for flat coordinate Δ.
    let conn = build_example_mjl(&Christoffel::trivial(2, 2)).unwrap();
    let e = conn.algebroid().clone();
    let b = default_battery(&e);
    for i in 0..b.sections.len() {
        let x = b.sections.value(i);
        for f in &b.functions {
            let db = conn.bundle().d_b(&f.value);
            let xf = along(&x.0[..2], &f.value);
            let want = BSection(vec![Scalar::zero(), Scalar::zero(), d(&xf, 0), d(&xf, 1)]);
            assert_eq!(conn.apply(x, &db), want);
        }
    }
}

#[test]
fn r1_is_the_hessian() {
    for delta in [Christoffel::trivial(2, 2), random_delta()] {
        let conn = build_example_mjl(&delta).unwrap();
        let e = conn.algebroid().clone();
        let b = default_battery(&e);
        let bs = conn.bundle().battery_sections(&b);
        for f in &b.functions {
            for j in 0..bs.len() {
                let y = &bs.value(j).0[..2];
                // Hess_Δ f(∂_k, Y) = ∂_k(Yf) − (Δ_{∂_k}Y)f.
                let mut want = vec![Scalar::zero(), Scalar::zero()];
                for k in 0..2 {
                    let mut unit = vec![Scalar::zero(); 2];
                    unit[k] = Scalar::one();
                    want.push(d(&along(y, &f.value), k) - along(&delta_apply(&delta, &unit, y), &f.value));
                }
                assert_eq!(curvature_r1(&conn, &f.value, bs.value(j)), BSection(want), "{} {}", f.label, bs.label(j));
            }
        }
    }
}

#[test]
fn mjl_dual_matches_displayed_formula() {
    for delta in [Christoffel::trivial(2, 2), random_delta()] {
        let conn = build_example_mjl(&delta).unwrap();
        let dual = dual_connection(&conn);
        let e = conn.algebroid().clone();
        let b = default_battery(&e);
        assert_passes("dual", &dual.verify(&b));
        let betas = b.vectors(4, "b*", 9);
        for i in 0..b.sections.len() {
            let sec = b.sections.value(i);
            let (x, zeta) = (&sec.0[..2], &sec.0[2..]);
            for j in 0..betas.len() {
                let beta = betas.value(j);
                let (eta, y) = (&beta[..2], &beta[2..]);
                // (Δ*_Xη − Δ*_Yζ, Δ_XY + ⟨Δ*_X· − 𝓛_X·, Y⟩) with the second slot [X,Y].
                let mut want: Vec<Scalar> = dual_delta_apply(&delta, x, eta)
                    .into_iter()
                    .zip(dual_delta_apply(&delta, y, zeta))
                    .map(|(p, q)| p - q)
                    .collect();
                for k in 0..2 {
                    want.push(along(x, &y[k]) - along(y, &x[k]));
                }
                assert_eq!(dual.apply(sec, &BSection(beta.clone())), BSection(want));
            }
        }
    }
}

#[test]
fn mjl_curvature_laws() {
    for delta in [Christoffel::trivial(2, 2), random_delta()] {
        let conn = build_example_mjl(&delta).unwrap();
        let e = conn.algebroid().clone();
        let b = default_battery(&e);
        let t = Instant::now();
        assert_passes("curvature", &curvature_laws(&conn, &b).unwrap());
        let dl = induced_linear_connection(&conn, AdaptedCase::K).unwrap();
        assert_passes("linear", &dl.verify(&b));
        assert_passes("symbols", &curvature_symbol_checks(&conn, &dl, &b));
        eprintln!("curvature laws {:?}", t.elapsed());
    }
}

#[test]
fn mjl_covariant_operator_laws() {
    let conn = build_example_mjl(&random_delta()).unwrap();
    let e = conn.algebroid().clone();
    let b = default_battery(&e);
    let t = Instant::now();
    assert_passes("covariant", &covariant_laws(&conn, &b).unwrap());
    eprintln!("covariant laws {:?}", t.elapsed());
}

#[test]
fn bianchi_and_induced_curvatures() {
    for delta in [Christoffel::trivial(2, 2), random_delta()] {
        let conn = build_example_mjl(&delta).unwrap();
        let e = conn.algebroid().clone();
        let b = default_battery(&e);
        let t = Instant::now();
        assert_passes("bianchi", &bianchi_check(&conn, &b).unwrap());
        assert_passes("dual curvature", &dual_curvature_check(&dual_connection(&conn), &b));
        assert_passes("endo curvature", &endo_curvature_check(&conn, &b));
        assert_passes("endo", &endo_connection(&conn).verify(&b));
        eprintln!("bianchi {:?}", t.elapsed());
    }
    let conn = build_connection(&PredualBundle::of_algebroid(&CourantAlgebroid::standard(1).unwrap())).unwrap();
    let b = default_battery(conn.algebroid());
    assert_passes("bianchi standard(1)", &bianchi_check(&conn, &b).unwrap());
    // Gamma ≡ 0 is not flat: R₁(x₁²)(x₁∂) = ∇_{2x₁dx}(x₁∂) = 2x₁dx.
    let r = connection_flatness(&conn, &b);
    let r1 = r.get("flat-r1").unwrap();
    assert!(!r1.passed());
    assert_eq!(curvature_r1(&conn, &s("x1^2"), &BSection(vec![s("x1"), Scalar::zero()])).0, vec![Scalar::zero(), s("2*x1")]);
}

#[test]
fn mjl_with_curved_delta_is_not_flat() {
    let conn = build_example_mjl(&random_delta()).unwrap();
    let b = default_battery(conn.algebroid());
    let r = connection_flatness(&conn, &b);
    assert!(!r.get("flat-r1").unwrap().passed());
}

fn rank_deficient() -> PredualBundle {
    let e = CourantAlgebroid::standard(1).unwrap();
    PredualBundle::new(&e, mat(&[&["0", "1"], &["1", "-x1"]]), mat(&[&["x1"], &["1"]])).unwrap()
}

fn full_rank_polynomial() -> PredualBundle {
    let e = CourantAlgebroid::standard(2).unwrap();
    PredualBundle::new(&e, mat(&[&["1", "-x1", "0", "0"], &["0", "1", "0", "0"]]), mat(&[&["1", "0"], &["x1", "1"]]))
        .unwrap()
}

fn extension_k() -> PredualBundle {
    let e = CourantAlgebroid::standard(1).unwrap();
    PredualBundle::new(&e, mat(&[&["0", "1"], &["1", "0"], &["0", "0"]]), mat(&[&["0"], &["1"], &["x1"]])).unwrap()
}

fn quotient_f() -> PredualBundle {
    let delta = Christoffel::from_fn(1, 1, |_, _, _| s("x1"));
    let e = CourantAlgebroid::port_hamiltonian(&delta).unwrap();
    PredualBundle::new(&e, mat(&[&["0", "1", "0", "0"], &["1", "0", "0", "0"]]), mat(&[&["0"], &["1"]])).unwrap()
}

#[test]
fn built_connections_verify() {
    let mut bundles = vec![
        ("standard(1)", PredualBundle::of_algebroid(&CourantAlgebroid::standard(1).unwrap())),
        ("standard(2)", PredualBundle::of_algebroid(&CourantAlgebroid::standard(2).unwrap())),
        ("standard(3)", PredualBundle::of_algebroid(&CourantAlgebroid::standard(3).unwrap())),
        ("su2", PredualBundle::of_algebroid(&catalog::su2())),
        ("rank-deficient", rank_deficient()),
        ("full-rank", full_rank_polynomial()),
        ("extension", extension_k()),
        ("quotient", quotient_f()),
    ];
    let delta = Christoffel::from_fn(1, 2, |_, a, b| s(["x1", "1", "0", "2"][a * 2 + b]));
    let (p, q) = build_port_hamiltonian_connections(&delta).unwrap();
    bundles.push(("port-hamiltonian B", p.bundle().clone()));
    bundles.push(("port-hamiltonian B'", q.bundle().clone()));
    for (name, bundle) in bundles {
        let conn = build_connection(&bundle).unwrap();
        let b = default_battery(bundle.algebroid());
        assert_passes(name, &verify_connection(&conn, &b));
    }
}

#[test]
fn polynomial_alpha_needs_a_correction() {
    let bundle = full_rank_polynomial();
    let conn = build_connection(&bundle).unwrap();
    // The naive ∇⁰ has Gamma = d_B(P[j][k]) only; the correction is nonzero here.
    let naive = DorfmanConnection::from_fn(&bundle, |k, j| bundle.d_b(&bundle.pairing_matrix()[(j, k)]));
    let b = default_battery(bundle.algebroid());
    assert!(!verify_connection(&naive, &b).get("dorfman-axiom-3").unwrap().passed());
    assert_passes("corrected", &verify_connection(&conn, &b));
}

#[test]
fn perturbation_breaks_axiom_three() {
    let bundle = PredualBundle::of_algebroid(&CourantAlgebroid::standard(1).unwrap());
    let conn = DorfmanConnection::from_fn(&bundle, |i, j| {
        if (i, j) == (0, 1) {
            BSection(vec![Scalar::one(), Scalar::zero()])
        } else {
            BSection::zero(2)
        }
    });
    let b = default_battery(bundle.algebroid());
    let r = verify_connection(&conn, &b);
    assert!(r.get("dorfman-axiom-1").unwrap().passed());
    assert!(r.get("dorfman-axiom-2").unwrap().passed());
    let a3 = r.get("dorfman-axiom-3").unwrap();
    assert!(!a3.passed());
    assert!(a3.witness.is_some());
}

#[test]
fn affine_structure() {
    let bundle = PredualBundle::of_algebroid(&CourantAlgebroid::standard(1).unwrap());
    let b = default_battery(bundle.algebroid());
    let c0 = build_connection(&bundle).unwrap();
    // A tensorial shift vanishing on Im d_B = span{dx}: ∇_{∂}∂ += x1 ∂.
    let c1 = DorfmanConnection::from_fn(&bundle, |i, j| {
        if (i, j) == (0, 0) {
            BSection(vec![s("x1"), Scalar::zero()])
        } else {
            c0.gamma(i, j).clone()
        }
    });
    assert_passes("c1", &verify_connection(&c1, &b));
    assert_eq!(affine_combine(&c0, &c1, &Scalar::zero()).unwrap().gamma(0, 0), c0.gamma(0, 0));
    let mix = affine_combine(&c0, &c1, &s("x1")).unwrap();
    assert_passes("mix", &verify_connection(&mix, &b));
    assert_passes("difference", &difference_check(&c0, &c1, &b).unwrap());
    let other = build_connection(&rank_deficient()).unwrap();
    assert!(matches!(difference_check(&c0, &other, &b), Err(DorfmanError::BundleMismatch)));
}

#[test]
fn port_hamiltonian_connections_project_the_bracket() {
    let deltas = [
        Christoffel::trivial(1, 1),
        Christoffel::from_fn(1, 2, |_, a, b| s(["x1", "1", "0", "2"][a * 2 + b])),
        // Δ = d + d(x1 x2) on a line bundle over ℝ², flat.
        Christoffel::from_fn(2, 1, |i, _, _| s(["x2", "x1"][i])),
    ];
    for delta in deltas {
        let (nabla, nabla_p) = build_port_hamiltonian_connections(&delta).unwrap();
        let e = nabla.algebroid().clone();
        let b = default_battery(&e);
        let (n, v) = (delta.n, delta.v);
        let (ctm, vv, vd) = (n, 2 * n, 2 * n + v);
        for (conn, slot) in [(&nabla, vv), (&nabla_p, vd)] {
            assert_passes("port-hamiltonian", &verify_connection(conn, &b));
            let idx: Vec<usize> = (0..n).map(|i| ctm + i).chain((0..v).map(|a| slot + a)).collect();
            let bs = conn.bundle().battery_sections(&b);
            for i in 0..b.sections.len() {
                for j in 0..bs.len() {
                    let mut emb = Section::zero(e.rank());
                    for (q, &k) in idx.iter().enumerate() {
                        emb.0[k] = bs.value(j).0[q].clone();
                    }
                    let br = e.bracket(b.sections.value(i), &emb).unwrap();
                    let want = BSection(idx.iter().map(|&k| br.0[k].clone()).collect());
                    assert_eq!(conn.apply(b.sections.value(i), bs.value(j)), want);
                }
            }
        }
    }
}

#[test]
fn induced_linear_connection_cases() {
    for (bundle, case) in [
        (PredualBundle::of_algebroid(&CourantAlgebroid::standard(1).unwrap()), AdaptedCase::K),
        (extension_k(), AdaptedCase::K),
        (quotient_f(), AdaptedCase::F),
        (PredualBundle::of_algebroid(&catalog::su2()), AdaptedCase::F),
    ] {
        let conn = build_connection(&bundle).unwrap();
        let b = default_battery(bundle.algebroid());
        let d = induced_linear_connection(&conn, case).unwrap();
        assert_passes("linear", &d.verify(&b));
        assert_passes("symbols", &curvature_symbol_checks(&conn, &d, &b));
    }
    let conn = build_connection(&full_rank_polynomial()).unwrap();
    assert!(matches!(induced_linear_connection(&conn, AdaptedCase::F), Err(DorfmanError::AdaptedFrame { .. })));
    assert!(matches!(induced_linear_connection(&conn, AdaptedCase::K), Err(DorfmanError::AdaptedFrame { .. })));
}

#[test]
fn standard_line_linear_connection_is_minus_bracket() {
    let bundle = PredualBundle::of_algebroid(&CourantAlgebroid::standard(1).unwrap());
    let conn = DorfmanConnection::zero(&bundle);
    let d = induced_linear_connection(&conn, AdaptedCase::K).unwrap();
    let e = bundle.algebroid();
    // On frames D_{b_j}e_i = −⟦e_i, b_j⟧, which is 0 for the constant frame.
    for i in 0..2 {
        for j in 0..2 {
            let (x, y) = (e.frame(i), BSection::basis(2, j));
            assert_eq!(d.apply(&y, &x), e.bracket(&x, &e.frame(j)).unwrap().neg());
            assert_eq!(d.by_formula(&y, &x), d.apply(&y, &x));
        }
    }
    let b = default_battery(e);
    let x1 = s("x1");
    for i in 0..b.sections.len() {
        for j in 0..b.sections.len() {
            let (x, yb) = (b.sections.value(i), BSection(b.sections.value(j).0.clone()));
            assert_eq!(d.by_formula(&yb.scale(&x1), x), d.by_formula(&yb, x).scale(&x1));
        }
    }
}

#[test]
fn predual_diagnosis() {
    let cases = [
        (PredualBundle::of_algebroid(&CourantAlgebroid::standard(2).unwrap()), Splitting::Isomorphic, 0, 0),
        (extension_k(), Splitting::ExtendsE, 1, 0),
        (quotient_f(), Splitting::QuotientOfE, 0, 2),
        (full_rank_polynomial(), Splitting::QuotientOfE, 0, 2),
        (rank_deficient(), Splitting::Isomorphic, 0, 0),
    ];
    for (bundle, split, k, f) in cases {
        let d = bundle.diagnose();
        assert_eq!((d.splitting, d.k_rank, d.f_rank), (split, k, f));
    }
    assert!(extension_k().diagnose().case_k.is_none());
    assert!(quotient_f().diagnose().case_f.is_none());
    assert!(full_rank_polynomial().diagnose().case_f.is_some());
}

#[test]
fn bott_connection_of_tangent_lagrangian() {
    let e = CourantAlgebroid::standard(2).unwrap();
    let l = [sec(&["1", "0", "0", "0"]), sec(&["0", "1", "0", "0"])];
    let bott = bott_connection(&e, &l).unwrap();
    let b = default_battery(&e);
    assert_passes("bott", &bott.report(&b));
    // ∇_X η̄ = class of 𝓛_Xη; the complement is dx¹, dx².
    let ls = b.vectors(2, "X", 11);
    let cs = b.vectors(2, "η", 12);
    for i in 0..ls.len() {
        let x = ls.value(i);
        for j in 0..cs.len() {
            let eta = cs.value(j);
            let want: Vec<Scalar> =
                (0..2).map(|k| along(x, &eta[k]) + &eta[0] * &d(&x[0], k) + &eta[1] * &d(&x[1], k)).collect();
            let got = bott.apply(&bott.l_section(x), &BSection(eta.clone()));
            assert_eq!(got, BSection(want));
        }
    }
}

#[test]
fn bott_connection_of_closed_two_form_graphs() {
    let e = CourantAlgebroid::standard(2).unwrap();
    let b = default_battery(&e);
    for w in ["1", "x1*x2 - 3"] {
        // l_i = ∂_i + i_{∂_i}(w dx¹∧dx²)
        let l = [sec(&["1", "0", "0", w]), sec(&["0", "1", &format!("-({w})"), "0"])];
        let bott = bott_connection(&e, &l).unwrap();
        assert_passes(w, &bott.report(&b));
    }
}

#[test]
fn bott_preconditions() {
    let e = CourantAlgebroid::standard(2).unwrap();
    let bad = [sec(&["1", "0", "0", "0"]), sec(&["0", "0", "1", "0"])];
    match bott_connection(&e, &bad) {
        Err(DorfmanError::NotIsotropic { i: 1, j: 2, value }) => assert_eq!(value, "1"),
        other => panic!("expected isotropy failure, got {other:?}"),
    }
    assert!(matches!(
        bott_connection(&e, &[sec(&["1", "0", "0", "0"])]),
        Err(DorfmanError::WrongRank { got: 1, expected: 2 })
    ));
    let e3 = CourantAlgebroid::standard(3).unwrap();
    // Graph of x1 dx²∧dx³, which is not closed.
    let l = [
        sec(&["1", "0", "0", "0", "0", "0"]),
        sec(&["0", "1", "0", "0", "0", "x1"]),
        sec(&["0", "0", "1", "0", "-x1", "0"]),
    ];
    assert!(matches!(bott_connection(&e3, &l), Err(DorfmanError::NotInvolutive { .. })));
}
