//! Predual bundles of a Courant algebroid and E-Dorfman connections on them.
//!
//! With frames `e_1..e_r` of E and `b_1..b_s` of B: `⟨⟨e_j, b_i⟩⟩ = P[i][j]`,
//! `d_B f = Σ_i (Σ_l A[i][l] ∂_l f) b_i`, and a connection is given by
//! `∇_{e_i} b_j = Σ_q Gamma[i][j][q] b_q`, extended to all arguments by the
//! first two connection axioms.

mod curvature;
mod examples;
mod induced;
mod valued;

use std::fmt;

use thiserror::Error;

use crate::algebroid::{apply_vector_field, AlgebroidError, CourantAlgebroid, Section};
use crate::battery::{Battery, BatteryConfig, Family};
use crate::cochain::{CochainError, Fiber};
use crate::linalg::{self, Matrix};
use crate::report::{Check, IsZero, Report};
use crate::vector::frame_vector;
use crate::Scalar;

pub use curvature::{
    bianchi_check, connection_flatness, covariant_laws, curvature_cochain, curvature_laws, curvature_matrix_r0,
    curvature_matrix_r1, curvature_r0, curvature_r1, curvature_symbol_checks, dual_curvature_check,
    endo_curvature_check, flatness_check,
};
pub use examples::{bott_connection, build_example_mjl, build_port_hamiltonian_connections, BottConnection};
pub use induced::{
    dual_by_definition, dual_connection, endo_connection, induced_linear_connection, pair, tensor, AdaptedCase,
    DefiningDual, DualConnection, EndoConnection, LinearConnection,
};
pub use valued::{compare_valued, ValuedCochain, ValuedNode};

frame_vector!(
    /// A section `Σ h^j b_j` of the predual bundle (or of its dual, in the
    /// dual frame) by its frame components.
    BSection
);

impl Fiber for BSection {
    fn add(&self, other: &Self) -> Self {
        BSection::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        BSection::sub(self, other)
    }
    fn scale(&self, f: &Scalar) -> Self {
        BSection::scale(self, f)
    }
    fn is_zero(&self) -> bool {
        BSection::is_zero(self)
    }
    fn neg(&self) -> Self {
        BSection::neg(self)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DorfmanError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("AᵀP differs from the anchor at ({row}, {col}): residual {residual}")]
    Constraint { row: usize, col: usize, residual: String },
    #[error("scalar uses coordinate x{0} beyond the base dimension")]
    CoordinateOutOfRange(usize),
    #[error("AᵀC_k = N_k is inconsistent for k = {k} (column {column})")]
    Inconsistent { k: usize, column: usize },
    #[error("constructed connection fails {check} at ({args}): residual {residual}")]
    Defect { check: String, args: String, residual: String },
    #[error("connections live on different predual bundles")]
    BundleMismatch,
    #[error("adapted frame for case {case} does not match P: {detail}")]
    AdaptedFrame { case: AdaptedCase, detail: String },
    #[error("L is not isotropic: ⟨l{i}, l{j}⟩ = {value}")]
    NotIsotropic { i: usize, j: usize, value: String },
    #[error("L has rank {got}, expected {expected}")]
    WrongRank { got: usize, expected: usize },
    #[error("L is not involutive: ⟦l{i}, l{j}⟧ = {bracket} is not in L")]
    NotInvolutive { i: usize, j: usize, bracket: String },
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}

/// A bundle B with a predual structure of E: the coupling `⟨⟨·,·⟩⟩` and
/// `d_B = α ∘ d`, subject to `AᵀP = Rho`.
#[derive(Clone, Debug)]
pub struct PredualBundle {
    alg: CourantAlgebroid,
    s: usize,
    p: Matrix<Scalar>,
    a: Matrix<Scalar>,
}

fn check_vars<'a>(n: usize, entries: impl Iterator<Item = &'a Scalar>) -> Result<(), DorfmanError> {
    for e in entries {
        if let Some(v) = e.max_var().filter(|&v| v >= n) {
            return Err(DorfmanError::CoordinateOutOfRange(v + 1));
        }
    }
    Ok(())
}

impl PredualBundle {
    /// `p` is s×r, `a` is s×n.
    pub fn new(alg: &CourantAlgebroid, p: Matrix<Scalar>, a: Matrix<Scalar>) -> Result<PredualBundle, DorfmanError> {
        let (n, r, s) = (alg.n(), alg.rank(), p.rows());
        if p.cols() != r {
            return Err(DorfmanError::Shape(format!("P has {} columns, rank of E is {r}", p.cols())));
        }
        if a.rows() != s || a.cols() != n {
            return Err(DorfmanError::Shape(format!("A is {}×{}, expected {s}×{n}", a.rows(), a.cols())));
        }
        check_vars(n, p.entries().chain(a.entries()))?;
        let lhs = a.transpose().mul(&p);
        for row in 0..n {
            for col in 0..r {
                let res = &lhs[(row, col)] - &alg.anchor_matrix()[(row, col)];
                if !res.is_zero() {
                    return Err(DorfmanError::Constraint { row, col, residual: res.to_string() });
                }
            }
        }
        Ok(PredualBundle { alg: alg.clone(), s, p, a })
    }

    /// `B = E` with `⟨⟨·,·⟩⟩ = ⟨·,·⟩` and `d_B = d_E`.
    pub fn of_algebroid(alg: &CourantAlgebroid) -> PredualBundle {
        let p = alg.pairing_matrix().clone();
        let a = alg.coanchor_matrix().clone();
        PredualBundle::new(alg, p, a).expect("ρ G⁻¹ G = ρ")
    }

    pub fn algebroid(&self) -> &CourantAlgebroid {
        &self.alg
    }

    pub fn rank(&self) -> usize {
        self.s
    }

    pub fn pairing_matrix(&self) -> &Matrix<Scalar> {
        &self.p
    }

    pub fn alpha_matrix(&self) -> &Matrix<Scalar> {
        &self.a
    }

    pub fn frame(&self, j: usize) -> BSection {
        BSection::basis(self.s, j)
    }

    pub fn check_section(&self, b: &BSection) -> Result<(), DorfmanError> {
        if b.len() != self.s {
            return Err(DorfmanError::Shape(format!("B-section of length {}, expected {}", b.len(), self.s)));
        }
        Ok(())
    }

    /// `⟨⟨e, b⟩⟩`.
    pub fn coupling(&self, e: &Section, b: &BSection) -> Scalar {
        let pe = self.p.mul_vec(&e.0);
        crate::algebroid::dot(&b.0, &pe)
    }

    /// `⟨⟨e, ·⟩⟩` as a section of B* in the dual frame.
    pub fn coupling_form(&self, e: &Section) -> BSection {
        BSection(self.p.mul_vec(&e.0))
    }

    pub fn d_b(&self, f: &Scalar) -> BSection {
        if f.is_constant() {
            return BSection::zero(self.s);
        }
        let grad: Vec<Scalar> = (0..self.alg.n()).map(|l| f.derivative(l)).collect();
        BSection(self.a.mul_vec(&grad))
    }

    /// Ranks of the kernels K ⊂ B and F ⊂ E of the coupling and the
    /// resulting splitting type, over the fraction field.
    pub fn diagnose(&self) -> PredualDiagnosis {
        let rank_p = self.p.rank();
        let k_rank = self.s - rank_p;
        let f_rank = self.alg.rank() - rank_p;
        let splitting = match (k_rank, f_rank) {
            (0, 0) => Splitting::Isomorphic,
            (_, 0) => Splitting::ExtendsE,
            (0, _) => Splitting::QuotientOfE,
            _ => Splitting::General,
        };
        PredualDiagnosis {
            s: self.s,
            r: self.alg.rank(),
            rank_p,
            k_rank,
            f_rank,
            splitting,
            case_k: induced::check_adapted(self, AdaptedCase::K).err().map(|e| e.to_string()),
            case_f: induced::check_adapted(self, AdaptedCase::F).err().map(|e| e.to_string()),
        }
    }

    /// Battery sections of B.
    pub fn battery_sections(&self, battery: &Battery) -> Family<BSection> {
        battery.vectors(self.s, "b", 1).map(|v| BSection(v.clone()))
    }

    fn same_as(&self, other: &PredualBundle) -> bool {
        self.s == other.s
            && self.p == other.p
            && self.a == other.a
            && self.alg.pairing_matrix() == other.alg.pairing_matrix()
            && self.alg.anchor_matrix() == other.alg.anchor_matrix()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Splitting {
    /// `K = 0` and `F = 0`.
    Isomorphic,
    /// `F = 0`: `B ≅ E ⊕ K`.
    ExtendsE,
    /// `K = 0`: `E ≅ B ⊕ F`.
    QuotientOfE,
    General,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitting::Isomorphic => "B ≅ E",
            Splitting::ExtendsE => "B ≅ E ⊕ K",
            Splitting::QuotientOfE => "E ≅ B ⊕ F",
            Splitting::General => "K ≠ 0 and F ≠ 0",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PredualDiagnosis {
    pub s: usize,
    pub r: usize,
    pub rank_p: usize,
    pub k_rank: usize,
    pub f_rank: usize,
    pub splitting: Splitting,
    /// `None` when the frames are adapted to the case, else the reason.
    pub case_k: Option<String>,
    pub case_f: Option<String>,
}

/// An E-connection-like operator `(e, v) ↦ ∇_e v` on some fiber.
pub trait Connection {
    type Value: Fiber + IsZero;
    fn algebroid(&self) -> &CourantAlgebroid;
    fn zero(&self) -> Self::Value;
    fn apply(&self, e: &Section, v: &Self::Value) -> Self::Value;
}

/// Connections of Dorfman type: an acting family of E-sections, a fiber
/// of B-sections, a coupling and a `d_B`.
pub trait DorfmanLike: Connection<Value = BSection> {
    fn coupling(&self, e: &Section, b: &BSection) -> Scalar;
    fn d_b(&self, f: &Scalar) -> BSection;
    /// Battery family of the sections the connection acts along.
    fn acting_sections(&self, battery: &Battery) -> Family<Section>;
    fn fiber_sections(&self, battery: &Battery) -> Family<BSection>;
}

/// An E-Dorfman connection by its frame coefficients.
#[derive(Clone, Debug)]
pub struct DorfmanConnection {
    bundle: PredualBundle,
    /// `gamma[i * s + j] = ∇_{e_i} b_j`.
    gamma: Vec<BSection>,
}

impl DorfmanConnection {
    /// `gamma[i][j] = ∇_{e_i} b_j`.
    pub fn new(bundle: &PredualBundle, gamma: Vec<Vec<BSection>>) -> Result<DorfmanConnection, DorfmanError> {
        let (r, s) = (bundle.alg.rank(), bundle.s);
        if gamma.len() != r || gamma.iter().any(|row| row.len() != s) {
            return Err(DorfmanError::Shape(format!("Gamma must be {r}×{s} B-sections")));
        }
        let flat: Vec<BSection> = gamma.into_iter().flatten().collect();
        for b in &flat {
            bundle.check_section(b)?;
        }
        check_vars(bundle.alg.n(), flat.iter().flat_map(|b| b.0.iter()))?;
        Ok(DorfmanConnection { bundle: bundle.clone(), gamma: flat })
    }

    pub fn from_fn(bundle: &PredualBundle, f: impl Fn(usize, usize) -> BSection) -> DorfmanConnection {
        let (r, s) = (bundle.alg.rank(), bundle.s);
        let gamma = (0..r).flat_map(|i| (0..s).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        DorfmanConnection { bundle: bundle.clone(), gamma }
    }

    /// `Gamma ≡ 0`; a Dorfman connection only when `d_B` has constant
    /// coefficients relative to the anchor (see [`verify_connection`]).
    pub fn zero(bundle: &PredualBundle) -> DorfmanConnection {
        DorfmanConnection::from_fn(bundle, |_, _| BSection::zero(bundle.s))
    }

    pub fn bundle(&self) -> &PredualBundle {
        &self.bundle
    }

    pub fn gamma(&self, i: usize, j: usize) -> &BSection {
        &self.gamma[i * self.bundle.s + j]
    }

    /// `∇_σ b` by the extension formula.
    pub fn apply_checked(&self, e: &Section, b: &BSection) -> Result<BSection, DorfmanError> {
        self.bundle.alg.check_section(e)?;
        self.bundle.check_section(b)?;
        Ok(self.nabla(e, b))
    }

    /// `Σ g^i h^j Γ[i][j] + Σ ρ(σ)(h^j) b_j + Σ_i ⟨⟨e_i, b⟩⟩ d_B(g^i)`.
    fn nabla(&self, e: &Section, b: &BSection) -> BSection {
        let (alg, s) = (&self.bundle.alg, self.bundle.s);
        let mut out = BSection::zero(s);
        for (i, g) in e.0.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            for (j, h) in b.0.iter().enumerate() {
                if !h.is_zero() {
                    out.add_scaled(&(g * h), self.gamma(i, j));
                }
            }
        }
        if alg.n() == 0 {
            return out;
        }
        let x = alg.anchor_vector(e);
        for (j, h) in b.0.iter().enumerate() {
            let t = apply_vector_field(&x, h);
            if !t.is_zero() {
                out.0[j] = &out.0[j] + &t;
            }
        }
        // Σ_i c_i d_B(g^i) = A · (Σ_i c_i ∂g^i), c_i = ⟨⟨e_i, b⟩⟩
        let c = self.bundle.p.transpose().mul_vec(&b.0);
        let mut w = vec![Scalar::zero(); alg.n()];
        for (ci, g) in c.iter().zip(&e.0) {
            if ci.is_zero() || g.is_constant() {
                continue;
            }
            for (l, wl) in w.iter_mut().enumerate() {
                let d = g.derivative(l);
                if !d.is_zero() {
                    *wl = &*wl + &(ci * &d);
                }
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            out = out.add(&BSection(self.bundle.a.mul_vec(&w)));
        }
        out
    }

    pub fn curvature_r0(&self, e1: &Section, e2: &Section, b: &BSection) -> BSection {
        curvature_r0(self, e1, e2, b)
    }

    pub fn curvature_r1(&self, f: &Scalar, b: &BSection) -> BSection {
        curvature_r1(self, f, b)
    }
}

impl Connection for DorfmanConnection {
    type Value = BSection;
    fn algebroid(&self) -> &CourantAlgebroid {
        &self.bundle.alg
    }
    fn zero(&self) -> BSection {
        BSection::zero(self.bundle.s)
    }
    fn apply(&self, e: &Section, v: &BSection) -> BSection {
        self.nabla(e, v)
    }
}

impl DorfmanLike for DorfmanConnection {
    fn coupling(&self, e: &Section, b: &BSection) -> Scalar {
        self.bundle.coupling(e, b)
    }
    fn d_b(&self, f: &Scalar) -> BSection {
        self.bundle.d_b(f)
    }
    fn acting_sections(&self, battery: &Battery) -> Family<Section> {
        battery.sections.clone()
    }
    fn fiber_sections(&self, battery: &Battery) -> Family<BSection> {
        self.bundle.battery_sections(battery)
    }
}

/// Argument triples `(e, b, f)`: every e and every b against every
/// function, the other slot rotating.
pub(crate) fn triples(n_e: usize, n_b: usize, n_f: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    if n_e == 0 || n_b == 0 {
        return out;
    }
    for i in 0..n_e {
        for f in 0..n_f {
            out.push((i, (i + f) % n_b, f));
        }
    }
    for j in 0..n_b {
        for f in 0..n_f {
            out.push(((j + 2 * f + 1) % n_e, j, f));
        }
    }
    out
}

/// The three connection axioms on the battery:
/// `∇_{fe}b = f∇_eb + ⟨⟨e,b⟩⟩d_Bf`, `∇_e(fb) = f∇_eb + ρ(e)(f)b` and
/// `∇_e(d_Bf) = d_B(ρ(e)f)`.
pub fn verify_connection<C: DorfmanLike + ?Sized>(conn: &C, battery: &Battery) -> Report {
    let alg = conn.algebroid();
    let es = conn.acting_sections(battery);
    let bs = conn.fiber_sections(battery);
    let fs = &battery.functions;
    let mut a1 = Check::new("dorfman-axiom-1", "∇_{fe}b = f∇_eb + ⟨⟨e,b⟩⟩ d_Bf");
    let mut a2 = Check::new("dorfman-axiom-2", "∇_e(fb) = f∇_eb + ρ(e)(f) b");
    let mut a3 = Check::new("dorfman-axiom-3", "∇_e(d_Bf) = d_B(ρ(e)(f))");
    for (i, j, q) in triples(es.len(), bs.len(), fs.len()) {
        let (e, b, f) = (es.value(i), bs.value(j), &fs[q].value);
        let args = || vec![es.label(i).to_string(), bs.label(j).to_string(), fs[q].label.clone()];
        let base = conn.apply(e, b);
        let lhs = conn.apply(&e.scale(f), b);
        let rhs = base.scale(f).add(&conn.d_b(f).scale(&conn.coupling(e, b)));
        a1.record_zero(&lhs.sub(&rhs), args);
        let lhs = conn.apply(e, &b.scale(f));
        let rhs = base.scale(f).add(&b.scale(&alg.anchor_apply(e, f)));
        a2.record_zero(&lhs.sub(&rhs), args);
    }
    for i in 0..es.len() {
        let e = es.value(i);
        for f in fs {
            let res = conn.apply(e, &conn.d_b(&f.value)).sub(&conn.d_b(&alg.anchor_apply(e, &f.value)));
            a3.record_zero(&res, || vec![es.label(i).to_string(), f.label.clone()]);
        }
    }
    Report { checks: vec![a1, a2, a3] }
}

/// `Σ_{j,t} (A[q][j] ∂_j A[t][l] − A[t][j] ∂_j A[q][l]) P[t][k]` at `(l, q)`.
fn n_matrix(bundle: &PredualBundle, k: usize) -> Matrix<Scalar> {
    let (a, p, n, s) = (&bundle.a, &bundle.p, bundle.alg.n(), bundle.s);
    Matrix::from_fn(n, s, |l, q| {
        let mut acc = Scalar::zero();
        for t in 0..s {
            let ptk = &p[(t, k)];
            if ptk.is_zero() {
                continue;
            }
            let mut inner = Scalar::zero();
            for j in 0..n {
                let term = &a[(q, j)] * &a[(t, l)].derivative(j) - &a[(t, j)] * &a[(q, l)].derivative(j);
                inner = inner + term;
            }
            if !inner.is_zero() {
                acc = acc + inner * ptk;
            }
        }
        acc
    })
}

/// The connection `∇⁰ + C` with `∇⁰_{e_k} b_j = d_B(P[j][k])` and the
/// tensorial correction solving `AᵀC_k = N_k`, `C_k[i][q]` being the
/// `b_q`-coefficient of the correction to `∇_{e_k} b_i`. Free unknowns
/// are zero. Axiom 3 is re-verified on the default battery.
pub fn build_connection(bundle: &PredualBundle) -> Result<DorfmanConnection, DorfmanError> {
    let (r, s) = (bundle.alg.rank(), bundle.s);
    let at = bundle.a.transpose();
    let mut gamma = Vec::with_capacity(r * s);
    let mut corrections = Vec::with_capacity(r);
    for k in 0..r {
        let sol = linalg::solve(&at, &n_matrix(bundle, k))
            .map_err(|e| DorfmanError::Inconsistent { k: k + 1, column: e.column + 1 })?;
        corrections.push(sol.x);
    }
    for (k, c) in corrections.iter().enumerate() {
        for j in 0..s {
            let mut v = bundle.d_b(&bundle.p[(j, k)]);
            for (q, x) in v.0.iter_mut().enumerate() {
                *x = &*x + &c[(j, q)];
            }
            gamma.push(v);
        }
    }
    let conn = DorfmanConnection { bundle: bundle.clone(), gamma };
    let battery = Battery::new(&bundle.alg, BatteryConfig::default());
    ensure_connection(&conn, &battery)?;
    Ok(conn)
}

/// Turns a failed axiom check into a construction defect.
pub(crate) fn ensure_connection<C: DorfmanLike + ?Sized>(conn: &C, battery: &Battery) -> Result<(), DorfmanError> {
    let report = verify_connection(conn, battery);
    let Some(c) = report.failed().next() else {
        return Ok(());
    };
    let w = c.witness.clone().unwrap_or_else(|| crate::report::Witness { args: vec![], residual: String::new() });
    Err(DorfmanError::Defect { check: c.name.clone(), args: w.args.join(", "), residual: w.residual })
}

/// `(1 − g)∇⁰ + g∇¹`.
pub fn affine_combine(
    c0: &DorfmanConnection,
    c1: &DorfmanConnection,
    g: &Scalar,
) -> Result<DorfmanConnection, DorfmanError> {
    if !c0.bundle.same_as(&c1.bundle) {
        return Err(DorfmanError::BundleMismatch);
    }
    if g.is_zero() {
        return Ok(c0.clone());
    }
    let h = Scalar::one() - g;
    let gamma = c0.gamma.iter().zip(&c1.gamma).map(|(a, b)| a.scale(&h).add(&b.scale(g))).collect();
    Ok(DorfmanConnection { bundle: c0.bundle.clone(), gamma })
}

/// `S = ∇ − ∇′` is 𝓡-bilinear and vanishes on `Im d_B`.
pub fn difference_check(
    c: &DorfmanConnection,
    c2: &DorfmanConnection,
    battery: &Battery,
) -> Result<Report, DorfmanError> {
    if !c.bundle.same_as(&c2.bundle) {
        return Err(DorfmanError::BundleMismatch);
    }
    let diff = |e: &Section, b: &BSection| c.apply(e, b).sub(&c2.apply(e, b));
    let es = &battery.sections;
    let bs = c.bundle.battery_sections(battery);
    let fs = &battery.functions;
    let mut lin_e = Check::new("difference-linear-e", "(∇−∇′)(fe, b) = f(∇−∇′)(e, b)");
    let mut lin_b = Check::new("difference-linear-b", "(∇−∇′)(e, fb) = f(∇−∇′)(e, b)");
    let mut kills = Check::new("difference-on-image", "(∇−∇′)(e, d_Bf) = 0");
    for (i, j, q) in triples(es.len(), bs.len(), fs.len()) {
        let (e, b, f) = (es.value(i), bs.value(j), &fs[q].value);
        let args = || vec![es.label(i).to_string(), bs.label(j).to_string(), fs[q].label.clone()];
        let base = diff(e, b).scale(f);
        lin_e.record_zero(&diff(&e.scale(f), b).sub(&base), args);
        lin_b.record_zero(&diff(e, &b.scale(f)).sub(&base), args);
    }
    for i in 0..es.len() {
        for f in fs {
            let res = diff(es.value(i), &c.bundle.d_b(&f.value));
            kills.record_zero(&res, || vec![es.label(i).to_string(), f.label.clone()]);
        }
    }
    Ok(Report { checks: vec![lin_e, lin_b, kills] })
}

/// s×s matrix of a B-linear map given on frame sections; column `j` is
/// the image of `b_j`.
pub(crate) fn matrix_of(s: usize, f: impl Fn(&BSection) -> BSection) -> Matrix<Scalar> {
    let cols: Vec<BSection> = (0..s).map(|j| f(&BSection::basis(s, j))).collect();
    Matrix::from_fn(s, s, |i, j| cols[j].0[i].clone())
}
