//! Curvature `R = (R_0, R_1)` of Dorfman connections, its symbols, the
//! Bianchi identity and the induced curvatures on B* and End(B).

use std::rc::Rc;

use num_rational::BigRational;
use num_traits::One;

use crate::algebroid::{OneForm, Section};
use crate::battery::{index_tuples, Battery, Family};
use crate::cochain::{Cochain, CochainError, Fiber};
use crate::linalg::Matrix;
use crate::report::{Check, Report};
use crate::Scalar;

use super::induced::{dual_sections, endo_connection, pair, tensor, DualConnection, LinearConnection};
use super::valued::{compare_valued, ValuedCochain};
use super::{matrix_of, BSection, Connection, DorfmanConnection};

/// `R_0(e_1,e_2)v = ∇_{e_1}∇_{e_2}v − ∇_{e_2}∇_{e_1}v − ∇_{⟦e_1,e_2⟧}v`.
pub fn curvature_r0<C: Connection + ?Sized>(conn: &C, e1: &Section, e2: &Section, v: &C::Value) -> C::Value {
    let alg = conn.algebroid();
    let a = conn.apply(e1, &conn.apply(e2, v));
    let b = conn.apply(e2, &conn.apply(e1, v));
    a.sub(&b).sub(&conn.apply(&alg.brk(e1, e2), v))
}

/// `R_1(f)v = ∇_{d_Ef}v`.
pub fn curvature_r1<C: Connection + ?Sized>(conn: &C, f: &Scalar, v: &C::Value) -> C::Value {
    conn.apply(&conn.algebroid().d_e(f), v)
}

/// `R_0(e_1,e_2)` as an s×s matrix.
pub fn curvature_matrix_r0<C: Connection<Value = BSection> + ?Sized>(
    conn: &C,
    e1: &Section,
    e2: &Section,
) -> Matrix<Scalar> {
    matrix_of(conn.zero().len(), |b| curvature_r0(conn, e1, e2, b))
}

/// `R_1` on a one-form slot, `α ↦ ∇_{ρ*α}`, as an s×s matrix.
pub fn curvature_matrix_r1<C: Connection<Value = BSection> + ?Sized>(conn: &C, alpha: &OneForm) -> Matrix<Scalar> {
    let e = conn.algebroid().coanchor(alpha);
    matrix_of(conn.zero().len(), |b| conn.apply(&e, b))
}

/// The curvature as an End(B)-valued 2-cochain of order 2.
pub fn curvature_cochain<C>(conn: &C) -> ValuedCochain<Matrix<Scalar>>
where
    C: Connection<Value = BSection> + Clone + 'static,
{
    let c = conn.clone();
    ValuedCochain::defined(
        "R",
        2,
        2,
        Rc::new(move |k, secs: &[Section], forms: &[OneForm]| match k {
            0 => curvature_matrix_r0(&c, &secs[0], &secs[1]),
            _ => curvature_matrix_r1(&c, &forms[0]),
        }),
    )
}

fn frame_and_rotating(n: usize, count: usize, shift: usize) -> impl Iterator<Item = usize> {
    (0..count).map(move |i| (i * 7 + shift) % n.max(1))
}

/// The curvature laws for a Dorfman connection: C^∞-linearity of
/// `(d^∇)²`, the expressions of `R_0` and `R_1` through `(d^∇)²`, and
/// vanishing on `Im d_B`.
pub fn curvature_laws(conn: &DorfmanConnection, battery: &Battery) -> Result<Report, CochainError> {
    let alg = conn.algebroid();
    let bundle = conn.bundle();
    let bs = bundle.battery_sections(battery);
    let fs = &battery.functions;
    let es = &battery.sections;
    let mut report = Report::new();

    // (d^∇)²(fb) = f(d^∇)²b for each battery b, paired with rotating f.
    let mut linear = Check::new("curvature-c-linear", "(d^∇)²(fb) = f (d^∇)²b");
    for j in 0..bs.len() {
        let q = (3 * j + 1) % fs.len();
        let f = &fs[q].value;
        let b = bs.value(j);
        let lhs = ValuedCochain::leaf(b.scale(f)).covariant().covariant();
        let rhs = ValuedCochain::wedge(&Cochain::scalar(f.clone()), &ValuedCochain::leaf(b.clone()).covariant().covariant());
        let c = compare_valued(conn, &lhs, &rhs, battery, "c", "")?;
        absorb(&mut linear, c, || vec![bs.label(j).to_string(), fs[q].label.clone()]);
    }
    report.push(linear);

    let mut r0 = Check::new("curvature-r0", "i_{e₂}i_{e₁}((d^∇)²b) = ∇_{e₁}∇_{e₂}b − ∇_{e₂}∇_{e₁}b − ∇_{⟦e₁,e₂⟧}b");
    let mut r1 = Check::new("curvature-r1", "i_f((d^∇)²b) = ∇_{d_Ef}b");
    let mut img0 = Check::new("curvature-image-r0", "R₀(e₁,e₂)(d_Bg) = 0");
    let mut img1 = Check::new("curvature-image-r1", "R₁(f)(d_Bg) = 0");
    let tuples = battery.section_tuples(2);
    for (idx, t) in tuples.iter().enumerate() {
        let (e1, e2) = (es.value(t[0]), es.value(t[1]));
        let j = idx % bs.len();
        let b = bs.value(j);
        let square = ValuedCochain::leaf(b.clone()).covariant().covariant();
        let lhs = square.evaluate(conn, 0, &[e1.clone(), e2.clone()], &[])?;
        let args = || vec![es.label(t[0]).to_string(), es.label(t[1]).to_string(), bs.label(j).to_string()];
        r0.record_zero(&lhs.sub(&curvature_r0(conn, e1, e2, b)), args);
        let q = idx % fs.len();
        let db = bundle.d_b(&fs[q].value);
        img0.record_zero(&curvature_r0(conn, e1, e2, &db), || {
            vec![es.label(t[0]).to_string(), es.label(t[1]).to_string(), format!("d_B({})", fs[q].label)]
        });
    }
    for (q, f) in fs.iter().enumerate() {
        for j in frame_and_rotating(bs.len(), 3, q) {
            let b = bs.value(j);
            let square = ValuedCochain::leaf(b.clone()).covariant().covariant();
            let lhs = square.interior_f(&f.value).evaluate(conn, 0, &[], &[])?;
            r1.record_zero(&lhs.sub(&curvature_r1(conn, &f.value, b)), || {
                vec![f.label.clone(), bs.label(j).to_string()]
            });
        }
        for g in frame_and_rotating(fs.len(), 3, q + 1) {
            let db = bundle.d_b(&fs[g].value);
            img1.record_zero(&curvature_r1(conn, &f.value, &db), || {
                vec![f.label.clone(), format!("d_B({})", fs[g].label)]
            });
        }
    }
    report.push(r0);
    report.push(r1);
    report.push(img0);
    report.push(img1);
    let _ = alg;
    Ok(report)
}

/// Folds the outcome of a sub-comparison into an aggregate check.
fn absorb(total: &mut Check, part: Check, context: impl FnOnce() -> Vec<String>) {
    total.cases += part.cases;
    total.failures += part.failures;
    if !part.passed() {
        total.status = part.status;
        if total.witness.is_none() {
            let mut w = part.witness.unwrap_or_else(|| crate::report::Witness { args: vec![], residual: String::new() });
            let mut args = context();
            args.append(&mut w.args);
            w.args = args;
            total.witness = Some(w);
        }
    }
}

/// Operator identities of `d^∇` on B-valued cochains: the Leibniz rule
/// on `ω⊗b`, `∇_e(ω⊗b)`, `𝓛^∇_f(ω⊗b)` and `{∇_{e₁}, i_{e₂}} = i_{⟦e₁,e₂⟧}`.
pub fn covariant_laws(conn: &DorfmanConnection, battery: &Battery) -> Result<Report, CochainError> {
    let alg = conn.algebroid();
    let bs = conn.bundle().battery_sections(battery);
    let es = &battery.sections;
    let pick_e = |i: usize| es.value((es.frame_len + 5 * i) % es.len()).clone();
    let funcs: Vec<&Scalar> = battery.functions.iter().map(|f| &f.value).filter(|f| !f.is_constant()).collect();
    let (a, b2, f) = (pick_e(0), pick_e(1), funcs[funcs.len() / 2].clone());
    let omegas = [
        Cochain::scalar(funcs[0].clone()),
        Cochain::section(a.clone()),
        Cochain::section(a.clone()).d(),
        Cochain::section(a.clone()).mul(&Cochain::section(b2.clone())),
    ];
    let one = BigRational::one();
    let mut leibniz = Check::new("covariant-leibniz", "d^∇(ω⊗b) = dω⊗b + (−1)^p ω·d^∇b");
    let mut nabla = Check::new("nabla-tensor", "∇_e(ω⊗b) = (𝓛_eω)⊗b + ω·∇_eb");
    let mut lief = Check::new("lie-f-tensor", "𝓛^∇_f(ω⊗b) = (i_{d_Ef}ω)⊗b");
    let mut bracket = Check::new("nabla-interior", "{∇_{e₁}, i_{e₂}} = i_{⟦e₁,e₂⟧}");
    for (wi, w) in omegas.iter().enumerate() {
        let j = (wi * 5 + 2) % bs.len();
        let b = bs.value(j).clone();
        let e = pick_e(wi + 2);
        let ctx = || vec![format!("ω={w}"), bs.label(j).to_string()];
        let h = ValuedCochain::tensor(w, b.clone());
        let sign = if w.degree() % 2 == 0 { one.clone() } else { -one.clone() };
        let rhs = ValuedCochain::combination(vec![
            (one.clone(), ValuedCochain::tensor(&w.d(), b.clone())),
            (sign, ValuedCochain::wedge(w, &ValuedCochain::leaf(b.clone()).covariant())),
        ])?;
        absorb(&mut leibniz, compare_valued(conn, &h.covariant(), &rhs, battery, "", "")?, ctx);
        let rhs = ValuedCochain::tensor(&w.lie_e(&e), b.clone())
            .add(&ValuedCochain::wedge(w, &ValuedCochain::leaf(conn.apply(&e, &b))))?;
        absorb(&mut nabla, compare_valued(conn, &h.nabla_e(&e), &rhs, battery, "", "")?, ctx);
        let rhs = ValuedCochain::tensor(&w.interior_e(&alg.d_e(&f)), b.clone());
        absorb(&mut lief, compare_valued(conn, &h.lie_f(&f), &rhs, battery, "", "")?, ctx);
        if w.degree() >= 1 {
            let e2 = pick_e(wi + 3);
            let h2 = h.covariant();
            for g in [&h, &h2] {
                let lhs = g.interior_e(&e2).nabla_e(&e).sub(&g.nabla_e(&e).interior_e(&e2))?;
                let rhs = g.interior_e(&alg.brk(&e, &e2));
                absorb(&mut bracket, compare_valued(conn, &lhs, &rhs, battery, "", "")?, || {
                    vec![format!("H={g}")]
                });
            }
        }
    }
    Ok(Report { checks: vec![leibniz, nabla, lief, bracket] })
}

/// Symbols of `R_0` in its two E-slots:
/// `σ₁(R₀)(f)(e₁,e₂)b = ⟨e₁, D_be₂⟩d_Bf − ⟨⟨d_E⟨e₁,e₂⟩, b⟩⟩d_Bf − ∇_{⟨e₁,e₂⟩d_Ef}b` and
/// `σ₂(R₀)(f)(e₁,e₂)b = −⟨D_be₁, e₂⟩d_Bf`.
pub fn curvature_symbol_checks(conn: &DorfmanConnection, d: &LinearConnection, battery: &Battery) -> Report {
    let alg = conn.algebroid();
    let bundle = conn.bundle();
    let es = &battery.sections;
    let bs = bundle.battery_sections(battery);
    let fs = &battery.functions;
    let mut s1 = Check::new(
        "symbol-r0-first",
        "R₀(fe₁,e₂)b − fR₀(e₁,e₂)b = ⟨e₁, D_be₂⟩d_Bf − ⟨⟨d_E⟨e₁,e₂⟩, b⟩⟩d_Bf − ∇_{⟨e₁,e₂⟩d_Ef}b",
    );
    let mut s2 = Check::new("symbol-r0-second", "R₀(e₁,fe₂)b − fR₀(e₁,e₂)b = −⟨D_be₁, e₂⟩d_Bf");
    let tuples = battery.section_tuples(2);
    let mut cases: Vec<(usize, usize, usize)> = Vec::new();
    for (idx, _) in tuples.iter().enumerate() {
        cases.push((idx, idx % bs.len(), (3 * idx + 1) % fs.len()));
    }
    for q in 0..fs.len() {
        for j in frame_and_rotating(bs.len(), 2, q) {
            cases.push(((q * 11 + j) % tuples.len(), j, q));
        }
    }
    for (ti, j, q) in cases {
        let t = &tuples[ti];
        let (e1, e2, b, f) = (es.value(t[0]), es.value(t[1]), bs.value(j), &fs[q].value);
        let args = || {
            vec![es.label(t[0]).to_string(), es.label(t[1]).to_string(), bs.label(j).to_string(), fs[q].label.clone()]
        };
        let base = curvature_r0(conn, e1, e2, b).scale(f);
        let dbf = bundle.d_b(f);
        let lhs = curvature_r0(conn, &e1.scale(f), e2, b).sub(&base);
        let g12 = alg.pair(e1, e2);
        let coeff = alg.pair(e1, &d.apply(b, e2)) - bundle.coupling(&alg.d_e(&g12), b);
        let rhs = dbf.scale(&coeff).sub(&conn.apply(&alg.d_e(f).scale(&g12), b));
        s1.record_zero(&lhs.sub(&rhs), args);
        let lhs = curvature_r0(conn, e1, &e2.scale(f), b).sub(&base);
        let rhs = dbf.scale(&-alg.pair(&d.apply(b, e1), e2));
        s2.record_zero(&lhs.sub(&rhs), args);
    }
    Report { checks: vec![s1, s2] }
}

/// `(d^∇̃ R^∇)_0(e₁,e₂,e₃) = 0` and `(d^∇̃ R^∇)_1(e; f) = 0`, evaluated with
/// the generic differential on End(B)-valued cochains; `R_0` on bracket
/// arguments comes from its operator formula.
pub fn bianchi_check<C>(conn: &C, battery: &Battery) -> Result<Report, CochainError>
where
    C: Connection<Value = BSection> + Clone + 'static,
{
    let endo = endo_connection(conn);
    let dr = curvature_cochain(conn).covariant();
    let es = &battery.sections;
    let mut be = Check::new("bianchi-e", "(d^∇̃R^∇)₀(e₁,e₂,e₃) = 0");
    for t in battery.section_tuples(3) {
        let v = dr.evaluate(&endo, 0, &es.values(&t), &[])?;
        be.record_zero(&v, || es.labels(&t));
    }
    let mut bf = Check::new("bianchi-f", "(d^∇̃R^∇)₁(e; f) = R₀(d_Ef, e) + ∇̃_e(R₁(f)) = 0");
    for (t, fi) in battery.form_cases(1, 1) {
        let forms: Vec<OneForm> = fi.iter().map(|&j| battery.forms[j].value.clone()).collect();
        let v = dr.evaluate(&endo, 1, &es.values(&t), &forms)?;
        bf.record_zero(&v, || {
            let mut a = es.labels(&t);
            a.extend(fi.iter().map(|&j| battery.forms[j].label.clone()));
            a
        });
    }
    Ok(Report { checks: vec![be, bf] })
}

/// `⟨R^{∇*}(…)b*, b⟩ + ⟨b*, R^∇(…)b⟩ = 0` for both components.
pub fn dual_curvature_check(dual: &DualConnection, battery: &Battery) -> Report {
    let conn = dual.base();
    let bundle = conn.bundle();
    let es = &battery.sections;
    let bs = bundle.battery_sections(battery);
    let duals = dual_sections(bundle, battery);
    let fs = &battery.functions;
    let mut c0 = Check::new("dual-curvature-r0", "⟨R₀^{∇*}(e₁,e₂)b*, b⟩ + ⟨b*, R₀^∇(e₁,e₂)b⟩ = 0");
    let mut c1 = Check::new("dual-curvature-r1", "⟨R₁^{∇*}(f)b*, b⟩ + ⟨b*, R₁^∇(f)b⟩ = 0");
    for (idx, t) in battery.section_tuples(2).iter().enumerate() {
        let (e1, e2) = (es.value(t[0]), es.value(t[1]));
        let (j, q) = (idx % duals.len(), (idx * 3 + 1) % bs.len());
        let (beta, b) = (duals.value(j), bs.value(q));
        let res = pair(&curvature_r0(dual, e1, e2, beta), b) + pair(beta, &curvature_r0(conn, e1, e2, b));
        c0.record_zero(&res, || {
            vec![es.label(t[0]).to_string(), es.label(t[1]).to_string(), duals.label(j).to_string(), bs.label(q).to_string()]
        });
    }
    for (qf, f) in fs.iter().enumerate() {
        for j in frame_and_rotating(duals.len(), 3, qf) {
            let q = (j + qf) % bs.len();
            let (beta, b) = (duals.value(j), bs.value(q));
            let res = pair(&curvature_r1(dual, &f.value, beta), b) + pair(beta, &curvature_r1(conn, &f.value, b));
            c1.record_zero(&res, || vec![f.label.clone(), duals.label(j).to_string(), bs.label(q).to_string()]);
        }
    }
    Report { checks: vec![c0, c1] }
}

/// `R^{∇̃}(…)τ = [R^∇(…), τ]` on battery endomorphisms `b*⊗b`.
pub fn endo_curvature_check(conn: &DorfmanConnection, battery: &Battery) -> Report {
    let endo = endo_connection(conn);
    let bundle = conn.bundle();
    let es = &battery.sections;
    let bs = bundle.battery_sections(battery);
    let duals = dual_sections(bundle, battery);
    let fs = &battery.functions;
    let commutator = |r: &Matrix<Scalar>, tau: &Matrix<Scalar>| r.mul(tau).sub(&tau.mul(r));
    let mut c0 = Check::new("endo-curvature-r0", "R₀^{∇̃}(e₁,e₂)τ = R₀^∇(e₁,e₂)∘τ − τ∘R₀^∇(e₁,e₂)");
    let mut c1 = Check::new("endo-curvature-r1", "R₁^{∇̃}(f)τ = R₁^∇(f)∘τ − τ∘R₁^∇(f)");
    for (idx, t) in battery.section_tuples(2).iter().enumerate() {
        let (e1, e2) = (es.value(t[0]), es.value(t[1]));
        let (j, q) = (idx % duals.len(), (idx * 3 + 1) % bs.len());
        let tau = tensor(duals.value(j), bs.value(q));
        let lhs = curvature_r0(&endo, e1, e2, &tau);
        let rhs = commutator(&curvature_matrix_r0(conn, e1, e2), &tau);
        c0.record_zero(&lhs.sub(&rhs), || {
            vec![es.label(t[0]).to_string(), es.label(t[1]).to_string(), duals.label(j).to_string(), bs.label(q).to_string()]
        });
    }
    for (qf, f) in fs.iter().enumerate() {
        let j = (qf * 5 + 1) % duals.len();
        let q = (qf + 2) % bs.len();
        let tau = tensor(duals.value(j), bs.value(q));
        let lhs = curvature_r1(&endo, &f.value, &tau);
        let r1 = curvature_matrix_r1(conn, &OneForm::exact(conn.algebroid().n(), &f.value));
        c1.record_zero(&lhs.sub(&commutator(&r1, &tau)), || {
            vec![f.label.clone(), duals.label(j).to_string(), bs.label(q).to_string()]
        });
    }
    Report { checks: vec![c0, c1] }
}

/// `R_0 = 0` and `R_1 = 0` on the given acting sections and fiber values.
pub fn flatness_check<C: Connection + ?Sized>(
    conn: &C,
    acting: &Family<Section>,
    fiber: &Family<C::Value>,
    battery: &Battery,
    prefix: &str,
) -> Report {
    let mut c0 = Check::new(format!("{prefix}flat-r0"), "R₀(e₁,e₂)v = 0");
    let mut c1 = Check::new(format!("{prefix}flat-r1"), "R₁(f)v = ∇_{d_Ef}v = 0");
    if fiber.is_empty() {
        return Report { checks: vec![c0, c1] };
    }
    let tuples = index_tuples(acting.len(), acting.frame_len, 2, battery.config, 102);
    for (idx, t) in tuples.iter().enumerate() {
        for j in frame_and_rotating(fiber.len(), fiber.frame_len.max(1), idx) {
            let v = curvature_r0(conn, acting.value(t[0]), acting.value(t[1]), fiber.value(j));
            c0.record_zero(&v, || {
                vec![acting.label(t[0]).to_string(), acting.label(t[1]).to_string(), fiber.label(j).to_string()]
            });
        }
    }
    for (q, f) in battery.functions.iter().enumerate() {
        for j in frame_and_rotating(fiber.len(), fiber.frame_len.max(1), q) {
            let v = curvature_r1(conn, &f.value, fiber.value(j));
            c1.record_zero(&v, || vec![f.label.clone(), fiber.label(j).to_string()]);
        }
    }
    Report { checks: vec![c0, c1] }
}

/// Flatness of a Dorfman connection on its own battery families.
pub fn connection_flatness(conn: &DorfmanConnection, battery: &Battery) -> Report {
    let bs = conn.bundle().battery_sections(battery);
    flatness_check(conn, &battery.sections, &bs, battery, "")
}
