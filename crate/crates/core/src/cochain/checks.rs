//! Battery-relative comparisons and structural checks of cochains.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::algebroid::{CourantAlgebroid, OneForm, Section};
use crate::battery::Battery;
use crate::report::{Check, Report, Witness};
use crate::Scalar;

use super::{Cochain, CochainError};

/// Outcome of [`equal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub equal: bool,
    pub witness: Option<Witness>,
}

fn case_args(b: &Battery, k: usize, t: &[usize], fi: &[usize]) -> Vec<String> {
    let mut out = vec![format!("k={k}")];
    out.extend(b.sections.labels(t));
    out.extend(fi.iter().map(|&j| b.forms[j].label.clone()));
    out
}

fn forms_of(b: &Battery, fi: &[usize]) -> Vec<OneForm> {
    fi.iter().map(|&j| b.forms[j].value.clone()).collect()
}

/// Checks `lhs = rhs` componentwise on every battery tuple.
pub fn compare(
    alg: &CourantAlgebroid,
    lhs: &Cochain,
    rhs: &Cochain,
    battery: &Battery,
    name: &str,
    identity: &str,
) -> Result<Check, CochainError> {
    let mut check = Check::new(name, identity);
    if lhs.degree() != rhs.degree() {
        check.fail(vec![], format!("degree {} vs {}", lhs.degree(), rhs.degree()));
        return Ok(check);
    }
    let Ok(p) = usize::try_from(lhs.degree()) else {
        return Ok(check);
    };
    for w in [lhs, rhs] {
        if w.peak_degree() > super::MAX_DEGREE {
            return Err(CochainError::DegreeCap { degree: w.peak_degree() });
        }
    }
    for k in 0..=p / 2 {
        for (t, fi) in battery.form_cases(p - 2 * k, k) {
            let secs = battery.sections.values(&t);
            let forms = forms_of(battery, &fi);
            let res = lhs.eval(alg, k, &secs, &forms) - rhs.eval(alg, k, &secs, &forms);
            check.record_zero(&res, || case_args(battery, k, &t, &fi));
        }
    }
    Ok(check)
}

/// Battery-relative equality; degrees must agree.
pub fn equal(
    alg: &CourantAlgebroid,
    lhs: &Cochain,
    rhs: &Cochain,
    battery: &Battery,
) -> Result<Equality, CochainError> {
    let c = compare(alg, lhs, rhs, battery, "equal", "ω = η")?;
    Ok(Equality { equal: c.passed(), witness: c.witness })
}

/// `ω_k(…v_i, v_{i+1}…) + ω_k(…v_{i+1}, v_i…) = −ω_{k+1}(…v̂_i, v̂_{i+1}…; d⟨v_i,v_{i+1}⟩, …)`.
pub fn check_symmetry_condition(
    alg: &CourantAlgebroid,
    w: &Cochain,
    battery: &Battery,
) -> Result<Check, CochainError> {
    let mut check = Check::new(
        "symmetry-condition",
        "ω_k(…,v_i,v_{i+1},…) + ω_k(…,v_{i+1},v_i,…) = −ω_{k+1}(…,v̂_i,v̂_{i+1},…; d⟨v_i,v_{i+1}⟩,…)",
    );
    let Ok(p) = usize::try_from(w.degree()) else {
        return Ok(check);
    };
    if w.peak_degree() > super::MAX_DEGREE {
        return Err(CochainError::DegreeCap { degree: w.peak_degree() });
    }
    for k in 0..=p / 2 {
        let a = p - 2 * k;
        if a < 2 {
            continue;
        }
        for (t, fi) in battery.form_cases(a, k) {
            let secs = battery.sections.values(&t);
            let forms = forms_of(battery, &fi);
            for i in 0..a - 1 {
                let mut swapped = secs.clone();
                swapped.swap(i, i + 1);
                let lhs = w.eval(alg, k, &secs, &forms) + w.eval(alg, k, &swapped, &forms);
                let mut rest = secs.clone();
                rest.drain(i..i + 2);
                let mut f2 = vec![OneForm::exact(alg.n(), &alg.pair(&secs[i], &secs[i + 1]))];
                f2.extend(forms.iter().cloned());
                let rhs = -w.eval(alg, k + 1, &rest, &f2);
                check.record_zero(&(lhs - rhs), || {
                    let mut args = case_args(battery, k, &t, &fi);
                    args.push(format!("i={}", i + 1));
                    args
                });
            }
        }
    }
    Ok(check)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |mask| (0..n).map(|j| mask & (1 << j) != 0).collect())
}

fn product_of(fs: &[Scalar], mask: &[bool], inside: bool) -> Scalar {
    fs.iter()
        .zip(mask)
        .filter(|(_, &m)| m == inside)
        .fold(Scalar::one(), |acc, (f, _)| acc * f)
}

/// Iterated symbol in an E-slot: `σ(f_s)⋯σ(f_1)` applied to `ω_k`, by
/// inclusion–exclusion over the scaling functions.
fn iterated_e(
    alg: &CourantAlgebroid,
    w: &Cochain,
    k: usize,
    slot: usize,
    fs: &[Scalar],
    secs: &[Section],
    forms: &[OneForm],
) -> Scalar {
    let mut acc = Scalar::zero();
    for mask in subsets(fs.len()) {
        let inside = product_of(fs, &mask, true);
        let outside = product_of(fs, &mask, false);
        let mut s = secs.to_vec();
        s[slot] = s[slot].scale(&inside);
        let v = w.eval(alg, k, &s, forms);
        let odd = (fs.len() - mask.iter().filter(|&&m| m).count()) % 2 == 1;
        let term = v * outside;
        acc = if odd { acc - term } else { acc + term };
    }
    acc
}

fn iterated_omega(
    alg: &CourantAlgebroid,
    w: &Cochain,
    k: usize,
    slot: usize,
    fs: &[Scalar],
    secs: &[Section],
    forms: &[OneForm],
) -> Scalar {
    let mut acc = Scalar::zero();
    for mask in subsets(fs.len()) {
        let inside = product_of(fs, &mask, true);
        let outside = product_of(fs, &mask, false);
        let mut a = forms.to_vec();
        a[slot] = a[slot].scale(&inside);
        let v = w.eval(alg, k, secs, &a);
        let odd = (fs.len() - mask.iter().filter(|&&m| m).count()) % 2 == 1;
        let term = v * outside;
        acc = if odd { acc - term } else { acc + term };
    }
    acc
}

/// `σ_i(ω_k)(f)(e₁,…; α₁,…) = ω_k(…, f e_i, …) − f ω_k(…, e_i, …)`.
pub fn symbol_e(
    alg: &CourantAlgebroid,
    w: &Cochain,
    k: usize,
    slot: usize,
    f: &Scalar,
    secs: &[Section],
    forms: &[OneForm],
) -> Result<Scalar, CochainError> {
    w.validate(alg, k, secs, forms)?;
    if slot >= secs.len() {
        return Err(CochainError::SlotOutOfRange { slot, slots: secs.len() });
    }
    Ok(iterated_e(alg, w, k, slot, std::slice::from_ref(f), secs, forms))
}

/// `s_i(ω̄_k)(f)(…; α₁,…) = ω̄_k(…; …, f α_i, …) − f ω̄_k(…; …, α_i, …)`.
pub fn symbol_omega(
    alg: &CourantAlgebroid,
    w: &Cochain,
    k: usize,
    slot: usize,
    f: &Scalar,
    secs: &[Section],
    forms: &[OneForm],
) -> Result<Scalar, CochainError> {
    w.validate(alg, k, secs, forms)?;
    if slot >= forms.len() {
        return Err(CochainError::SlotOutOfRange { slot, slots: forms.len() });
    }
    Ok(iterated_omega(alg, w, k, slot, std::slice::from_ref(f), secs, forms))
}

/// Declared and observed differential order of one slot of one component.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SymbolReport {
    pub k: usize,
    /// `"E3"` for the third E-slot, `"Ω1"` for the first Ω¹-slot.
    pub slot: String,
    pub declared: u32,
    /// Smallest `s` whose `(s+1)`-fold iterated symbol vanished on every
    /// sampled case; `None` if even the declared bound was exceeded.
    pub observed: Option<u32>,
    pub check: Check,
}

const SYMBOL_CASES: usize = 48;
const SYMBOL_FUNCTION_TUPLES: usize = 24;

fn function_tuples(base: &[Scalar], s: usize) -> Vec<Vec<Scalar>> {
    // multisets of size s, in lexicographic order
    fn rec(base: &[Scalar], s: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..base.len() {
            cur.push(i);
            rec(base, s, i, cur, out);
            cur.pop();
        }
    }
    let mut idx = Vec::new();
    rec(base, s, 0, &mut Vec::new(), &mut idx);
    let step = idx.len().div_ceil(SYMBOL_FUNCTION_TUPLES).max(1);
    idx.into_iter()
        .step_by(step)
        .map(|t| t.into_iter().map(|i| base[i].clone()).collect())
        .collect()
}

/// Confirms the declared order bounds slot by slot: for E-slots before the
/// last `m`, the last E-slot `m − 1` (a lone E-slot of a degree-1 cochain
/// counts as first), and every Ω¹-slot `m`.
pub fn order_report(
    alg: &CourantAlgebroid,
    w: &Cochain,
    battery: &Battery,
) -> Result<Vec<SymbolReport>, CochainError> {
    let mut out = Vec::new();
    let Ok(p) = usize::try_from(w.degree()) else {
        return Ok(out);
    };
    if w.peak_degree() > super::MAX_DEGREE {
        return Err(CochainError::DegreeCap { degree: w.peak_degree() });
    }
    let m = w.order();
    let mut base: Vec<Scalar> = (0..alg.n()).map(Scalar::var).collect();
    base.extend(
        battery
            .functions
            .iter()
            .filter(|f| f.label.starts_with("rand_"))
            .map(|f| f.value.clone()),
    );
    for k in 0..=p / 2 {
        let a = p - 2 * k;
        let cases = battery.form_cases(a, k);
        let step = cases.len().div_ceil(SYMBOL_CASES).max(1);
        let cases: Vec<_> = cases.into_iter().step_by(step).collect();
        let slots = (0..a).map(|i| (true, i)).chain((0..k).map(|i| (false, i)));
        for (is_e, slot) in slots {
            let declared = if !is_e || p == 1 || slot + 1 < a { m } else { m - 1 };
            let label = if is_e { format!("E{}", slot + 1) } else { format!("Ω{}", slot + 1) };
            let mut check = Check::new(
                format!("order k={k} {label}"),
                format!("({}-fold iterated symbol) = 0", declared + 1),
            );
            let mut observed = None;
            for s in 1..=declared + 1 {
                // a vanishing fold implies every higher fold vanishes
                let last = s == declared + 1;
                let mut vanished = true;
                'tuples: for fs in function_tuples(&base, s as usize) {
                    for (t, fi) in &cases {
                        let secs = battery.sections.values(t);
                        let forms = forms_of(battery, fi);
                        let v = if is_e {
                            iterated_e(alg, w, k, slot, &fs, &secs, &forms)
                        } else {
                            iterated_omega(alg, w, k, slot, &fs, &secs, &forms)
                        };
                        vanished &= v.is_zero();
                        if last {
                            check.record_zero(&v, || {
                                let mut args = case_args(battery, k, t, fi);
                                args.extend(fs.iter().map(|f| format!("f={f}")));
                                args
                            });
                        } else if !vanished {
                            break 'tuples;
                        }
                    }
                }
                if vanished {
                    observed = Some(s - 1);
                    break;
                }
            }
            out.push(SymbolReport { k, slot: label, declared, observed, check });
        }
    }
    Ok(out)
}

/// Graded operators on cochains used by the Cartan relations.
#[derive(Clone, Debug)]
pub enum Operator {
    D,
    Ie(Section),
    If(Scalar),
    Le(Section),
    Lf(Scalar),
}

impl Operator {
    pub fn degree(&self) -> i32 {
        match self {
            Operator::D => 1,
            Operator::Ie(_) => -1,
            Operator::If(_) => -2,
            Operator::Le(_) => 0,
            Operator::Lf(_) => -1,
        }
    }

    pub fn apply(&self, w: &Cochain) -> Cochain {
        match self {
            Operator::D => w.d(),
            Operator::Ie(e) => w.interior_e(e),
            Operator::If(f) => w.interior_f(f),
            Operator::Le(e) => w.lie_e(e),
            Operator::Lf(f) => w.lie_f(f),
        }
    }

    /// `{P, Q}ω = P(Qω) − (−1)^{pq} Q(Pω)`.
    pub fn commutator(&self, other: &Operator, w: &Cochain) -> Cochain {
        let pq = self.degree() * other.degree();
        let a = self.apply(&other.apply(w));
        let b = other.apply(&self.apply(w));
        let c = if pq % 2 == 0 { -BigRational::one() } else { BigRational::one() };
        Cochain::combination(vec![(BigRational::one(), a), (c, b)]).expect("equal degrees")
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::D => write!(f, "d"),
            Operator::Ie(e) => write!(f, "i_{e}"),
            Operator::If(s) => write!(f, "i_[{s}]"),
            Operator::Le(e) => write!(f, "L_{e}"),
            Operator::Lf(s) => write!(f, "L_[{s}]"),
        }
    }
}

fn section_from(alg: &CourantAlgebroid, terms: &[(usize, Scalar)]) -> Section {
    let mut s = Section::zero(alg.rank());
    for (i, f) in terms {
        let i = i % alg.rank();
        s.0[i] = &s.0[i] + f;
    }
    s
}

/// Fixed family of test cochains of degree ≤ 4 covering every node kind.
pub fn generator_set(alg: &CourantAlgebroid) -> Vec<(String, Cochain)> {
    let x = |i: usize| if alg.n() == 0 { Scalar::from_int(i as i64 + 2) } else { Scalar::var(i % alg.n()) };
    let c = Scalar::from_int;
    let r = alg.rank();
    let a = section_from(alg, &[(0, c(1)), (r - 1, x(0))]);
    let b = section_from(alg, &[(1, x(1)), (r / 2, c(1))]);
    let cc = section_from(alg, &[(r / 2 + 1, &x(0) * &x(1)), (0, c(2))]);
    let e = section_from(alg, &[(r - 1, c(1)), (1, &x(0) + &c(1))]);
    let f = &(&x(0) * &x(0)) * &x(1) + c(1);
    let g = &x(1) - &(&x(0) * &c(3));

    let sf = Cochain::scalar(f.clone());
    let sa = Cochain::section(a.clone());
    let sb = Cochain::section(b.clone());
    let sc = Cochain::section(cc.clone());
    let ab = sa.mul(&sb);
    let q = |v: i64| BigRational::from_integer(v.into());
    let mut out = vec![
        ("f", sf.clone()),
        ("a", sa.clone()),
        ("b", sb.clone()),
        ("df", sf.d()),
        ("a·b", ab.clone()),
        ("da", sa.d()),
        ("f·(a·b)", sf.mul(&ab)),
        ("da·b", sa.d().mul(&sb)),
        ("a·b·c", ab.mul(&sc)),
        ("i_e(da·b)", sa.d().mul(&sb).interior_e(&e)),
        ("i_g(da·db)", sa.d().mul(&sb.d()).interior_f(&g)),
        ("L_c(a·b)", ab.lie_e(&cc)),
        ("L_g(da)", sa.d().lie_f(&g)),
        ("da·db", sa.d().mul(&sb.d())),
        ("a·b·dc", ab.mul(&sc.d())),
        ("2d(a·b) − a·db", Cochain::combination(vec![(q(2), ab.d()), (q(-1), sa.mul(&sb.d()))]).expect("degree 3")),
        ("i_a d(b·c)", sb.mul(&sc).d().interior_e(&a)),
        ("d(f·a)", sf.mul(&sa).d()),
        ("L_a f", sf.lie_e(&a)),
        ("i_g(da·b·c)", sa.d().mul(&sb).mul(&sc).interior_f(&g)),
        ("L_g(a·db)", sa.mul(&sb.d()).lie_f(&g)),
        ("d i_a(db·c)", sb.d().mul(&sc).interior_e(&a).d()),
        ("g·db", Cochain::scalar(g.clone()).mul(&sb.d())),
        ("L_e(dc)", sc.d().lie_e(&e)),
    ];
    out.retain(|(_, w)| w.peak_degree() <= 5);
    out.into_iter().map(|(n, w)| (n.to_string(), w)).collect()
}

/// The Cartan commutation relations and the bracket relations of the
/// interior products, as operator identities on the generator set.
pub fn cartan_suite(alg: &CourantAlgebroid, battery: &Battery) -> Result<Report, CochainError> {
    let gens: Vec<(String, Cochain)> =
        generator_set(alg).into_iter().filter(|(_, w)| w.degree() >= 1 && w.peak_degree() <= 4).collect();
    let tests: Vec<&(String, Cochain)> = {
        // one representative per degree and node shape keeps nesting cheap
        let picks = ["a", "a·b", "da", "da·b", "i_e(da·b)", "L_g(da)", "a·b·dc"];
        gens.iter().filter(|(n, _)| picks.contains(&n.as_str())).collect()
    };
    let fl = battery.sections.frame_len;
    let pick_section = |i: usize| battery.sections.value((fl + 1 + 7 * i) % battery.sections.len()).clone();
    let sections = [pick_section(0), pick_section(1), battery.sections.value(battery.sections.len() - 1).clone()];
    let funcs: Vec<Scalar> = {
        let mut v: Vec<Scalar> =
            battery.functions.iter().filter(|f| !f.value.is_constant()).map(|f| f.value.clone()).collect();
        let last = v.pop();
        v.truncate(2);
        v.extend(last);
        v
    };
    let pairs = [(0usize, 1usize), (1, 2), (2, 0)];
    let fpairs: Vec<(usize, usize)> = if funcs.len() >= 2 {
        vec![(0, funcs.len() - 1), (1, 0)]
    } else {
        Vec::new()
    };

    let mut report = Report::new();
    let mut run = |name: &str,
                   identity: &str,
                   cases: &mut dyn FnMut(&Cochain) -> Vec<(String, Cochain, Cochain)>|
     -> Result<(), CochainError> {
        let mut total = Check::new(name, identity);
        for (label, w) in &tests {
            for (params, lhs, rhs) in cases(w) {
                let c = compare(alg, &lhs, &rhs, battery, name, identity)?;
                total.cases += c.cases;
                total.failures += c.failures;
                if let Some(wit) = c.witness {
                    total.status = c.status;
                    if total.witness.is_none() {
                        let mut args = vec![format!("ω={label}"), params];
                        args.extend(wit.args);
                        total.witness = Some(Witness { args, residual: wit.residual });
                    }
                }
            }
        }
        report.push(total);
        Ok(())
    };

    let de = |f: &Scalar| alg.d_e(f);
    run("cartan-1", "𝓛_f = i_{d_E f}", &mut |w| {
        funcs.iter().map(|f| (format!("f={f}"), w.lie_f(f), w.interior_e(&de(f)))).collect()
    })?;
    run("cartan-2", "{𝓛_f, i_e} = i_{−⟨d_E f, e⟩}", &mut |w| {
        let mut out = Vec::new();
        for (fi, e) in funcs.iter().zip(sections.iter().cycle()) {
            let lhs = Operator::Lf(fi.clone()).commutator(&Operator::Ie(e.clone()), w);
            out.push((format!("f={fi}, e={e}"), lhs, w.interior_f(&-alg.pair(&de(fi), e))));
        }
        out
    })?;
    run("cartan-3", "{𝓛_e, i_f} = i_{⟨d_E f, e⟩}", &mut |w| {
        let mut out = Vec::new();
        for (fi, e) in funcs.iter().zip(sections.iter().cycle()) {
            let lhs = Operator::Le(e.clone()).commutator(&Operator::If(fi.clone()), w);
            out.push((format!("f={fi}, e={e}"), lhs, w.interior_f(&alg.pair(&de(fi), e))));
        }
        out
    })?;
    run("cartan-4", "{𝓛_{e1}, i_{e2}} = i_{⟦e1,e2⟧}", &mut |w| {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (e1, e2) = (&sections[i], &sections[j]);
                let lhs = Operator::Le(e1.clone()).commutator(&Operator::Ie(e2.clone()), w);
                (format!("e1={e1}, e2={e2}"), lhs, w.interior_e(&alg.brk(e1, e2)))
            })
            .collect()
    })?;
    run("cartan-5", "{𝓛_f, 𝓛_g} = 0", &mut |w| {
        fpairs
            .iter()
            .map(|&(i, j)| {
                let lhs = Operator::Lf(funcs[i].clone()).commutator(&Operator::Lf(funcs[j].clone()), w);
                let zero = Cochain::zero(lhs.degree());
                (format!("f={}, g={}", funcs[i], funcs[j]), lhs, zero)
            })
            .collect()
    })?;
    run("cartan-6", "{𝓛_e, 𝓛_f} = 𝓛_{⟨e, d_E f⟩}", &mut |w| {
        let mut out = Vec::new();
        for (fi, e) in funcs.iter().zip(sections.iter().cycle()) {
            let lhs = Operator::Le(e.clone()).commutator(&Operator::Lf(fi.clone()), w);
            out.push((format!("e={e}, f={fi}"), lhs, w.lie_f(&alg.pair(e, &de(fi)))));
        }
        out
    })?;
    run("cartan-7", "{𝓛_f, 𝓛_e} = −𝓛_{⟨e, d_E f⟩}", &mut |w| {
        let mut out = Vec::new();
        for (fi, e) in funcs.iter().zip(sections.iter().cycle()) {
            let lhs = Operator::Lf(fi.clone()).commutator(&Operator::Le(e.clone()), w);
            out.push((format!("f={fi}, e={e}"), lhs, w.lie_f(&alg.pair(e, &de(fi))).neg()));
        }
        out
    })?;
    run("cartan-8", "{𝓛_{e1}, 𝓛_{e2}} = 𝓛_{⟦e1,e2⟧}", &mut |w| {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (e1, e2) = (&sections[i], &sections[j]);
                let lhs = Operator::Le(e1.clone()).commutator(&Operator::Le(e2.clone()), w);
                (format!("e1={e1}, e2={e2}"), lhs, w.lie_e(&alg.brk(e1, e2)))
            })
            .collect()
    })?;
    run("interior-ee", "{i_{e1}, i_{e2}} = i_{−⟨e1,e2⟩}", &mut |w| {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (e1, e2) = (&sections[i], &sections[j]);
                let lhs = Operator::Ie(e1.clone()).commutator(&Operator::Ie(e2.clone()), w);
                (format!("e1={e1}, e2={e2}"), lhs, w.interior_f(&-alg.pair(e1, e2)))
            })
            .collect()
    })?;
    run("interior-ef", "{i_e, i_f} = 0", &mut |w| {
        let mut out = Vec::new();
        for (fi, e) in funcs.iter().zip(sections.iter().cycle()) {
            let lhs = Operator::Ie(e.clone()).commutator(&Operator::If(fi.clone()), w);
            let zero = Cochain::zero(lhs.degree());
            out.push((format!("e={e}, f={fi}"), lhs, zero));
        }
        out
    })?;
    run("interior-ff", "{i_f, i_g} = 0", &mut |w| {
        fpairs
            .iter()
            .map(|&(i, j)| {
                let lhs = Operator::If(funcs[i].clone()).commutator(&Operator::If(funcs[j].clone()), w);
                let zero = Cochain::zero(lhs.degree());
                (format!("f={}, g={}", funcs[i], funcs[j]), lhs, zero)
            })
            .collect()
    })?;
    Ok(report)
}
