//! Connections induced by a Dorfman connection: the B-linear connection D
//! on E, the dual connection on B* and the commutator connection on End(B).

use std::fmt;

use crate::algebroid::{apply_vector_field, CourantAlgebroid, Section};
use crate::battery::{Battery, Family};
use crate::linalg::Matrix;
use crate::report::{Check, Report};
use crate::Scalar;

use super::{matrix_of, triples, BSection, Connection, DorfmanConnection, DorfmanError, PredualBundle};

/// Frame adaptation declared for the induced linear connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum AdaptedCase {
    /// `B ≅ E ⊕ K`: B's frame starts with a copy of E's frame, `P = [G; 0]`.
    K,
    /// `E ≅ B ⊕ F`: E's frame starts with B's frame, G is block diagonal
    /// and `P = (G¹ 0)`.
    F,
}

impl fmt::Display for AdaptedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdaptedCase::K => "K",
            AdaptedCase::F => "F",
        })
    }
}

pub(crate) fn check_adapted(bundle: &PredualBundle, case: AdaptedCase) -> Result<(), DorfmanError> {
    let (g, p) = (bundle.algebroid().pairing_matrix(), bundle.pairing_matrix());
    let (r, s) = (g.rows(), p.rows());
    let bad = |detail: String| Err(DorfmanError::AdaptedFrame { case, detail });
    match case {
        AdaptedCase::K => {
            if s < r {
                return bad(format!("rank of B is {s} < {r}"));
            }
            for i in 0..s {
                for j in 0..r {
                    let want = if i < r { g[(i, j)].clone() } else { Scalar::zero() };
                    if p[(i, j)] != want {
                        return bad(format!("P[{}][{}] = {}, expected {want}", i + 1, j + 1, p[(i, j)]));
                    }
                }
            }
        }
        AdaptedCase::F => {
            if s > r {
                return bad(format!("rank of B is {s} > {r}"));
            }
            for i in 0..r {
                for j in 0..r {
                    if (i < s) != (j < s) && !g[(i, j)].is_zero() {
                        return bad(format!("G is not block diagonal at ({}, {})", i + 1, j + 1));
                    }
                }
            }
            for i in 0..s {
                for j in 0..r {
                    let want = if j < s { g[(i, j)].clone() } else { Scalar::zero() };
                    if p[(i, j)] != want {
                        return bad(format!("P[{}][{}] = {}, expected {want}", i + 1, j + 1, p[(i, j)]));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The B-linear connection `D` on E with anchor `a: B → TM`:
/// `D_b e = e_[∇_e b] − ⟦e, e_[b]⟧` (case K) or `D_b e = ∇_e b − ⟦e, b⟧`
/// (case F), stored by its frame values `D_{b_j} e_i`.
#[derive(Clone, Debug)]
pub struct LinearConnection {
    conn: DorfmanConnection,
    case: AdaptedCase,
    coeff: Vec<Section>,
}

pub fn induced_linear_connection(
    conn: &DorfmanConnection,
    case: AdaptedCase,
) -> Result<LinearConnection, DorfmanError> {
    check_adapted(conn.bundle(), case)?;
    let (r, s) = (conn.algebroid().rank(), conn.bundle().rank());
    let mut d = LinearConnection { conn: conn.clone(), case, coeff: Vec::with_capacity(r * s) };
    for j in 0..s {
        for i in 0..r {
            let v = d.by_formula(&BSection::basis(s, j), &Section::basis(r, i));
            d.coeff.push(v);
        }
    }
    Ok(d)
}

impl LinearConnection {
    pub fn case(&self) -> AdaptedCase {
        self.case
    }

    /// `e_[b]` in case K, the inclusion `B → E` in case F.
    pub fn to_e(&self, b: &BSection) -> Section {
        let r = self.conn.algebroid().rank();
        let mut v = vec![Scalar::zero(); r];
        for (x, y) in v.iter_mut().zip(&b.0) {
            *x = y.clone();
        }
        Section(v)
    }

    /// `a(b) = ρ(e_[b])`, resp. `ρ|_B`.
    pub fn anchor(&self, b: &BSection) -> Vec<Scalar> {
        self.conn.algebroid().anchor_vector(&self.to_e(b))
    }

    /// `D_b e` by the defining formula.
    pub fn by_formula(&self, b: &BSection, e: &Section) -> Section {
        let alg = self.conn.algebroid();
        let eb = self.to_e(b);
        self.to_e(&self.conn.apply(e, b)).sub(&alg.brk(e, &eb))
    }

    /// `D_b e` from the frame values and the two connection laws.
    pub fn apply(&self, b: &BSection, e: &Section) -> Section {
        let r = self.conn.algebroid().rank();
        let mut out = Section::zero(r);
        for (j, h) in b.0.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            for (i, g) in e.0.iter().enumerate() {
                if !g.is_zero() {
                    out.add_scaled(&(h * g), &self.coeff[j * r + i]);
                }
            }
        }
        if self.conn.algebroid().n() > 0 {
            let x = self.anchor(b);
            for (o, g) in out.0.iter_mut().zip(&e.0) {
                let t = apply_vector_field(&x, g);
                if !t.is_zero() {
                    *o = &*o + &t;
                }
            }
        }
        out
    }

    /// `D_{fb}e = fD_be`, `D_b(fe) = fD_be + a(b)(f)e`, agreement of the
    /// formula with the frame extension, and the compatibility identity
    /// `ρ(e)⟨⟨e′,b⟩⟩ = ⟨⟨⟦e,e′⟧,b⟩⟩ − ⟨D_be, e′⟩ + ⟨⟨e′, ∇_eb⟩⟩`.
    pub fn verify(&self, battery: &Battery) -> Report {
        let alg = self.conn.algebroid();
        let bundle = self.conn.bundle();
        let es = &battery.sections;
        let bs = bundle.battery_sections(battery);
        let fs = &battery.functions;
        let mut tensorial = Check::new("linear-connection-tensorial", "D_{fb}e = f D_be");
        let mut leibniz = Check::new("linear-connection-leibniz", "D_b(fe) = f D_be + a(b)(f) e");
        let mut frame = Check::new("linear-connection-frame", "D_be agrees with its frame extension");
        let mut compat = Check::new(
            "compatibility-d",
            "ρ(e)⟨⟨e′,b⟩⟩ = ⟨⟨⟦e,e′⟧,b⟩⟩ − ⟨D_be, e′⟩ + ⟨⟨e′, ∇_eb⟩⟩",
        );
        for (i, j, q) in triples(es.len(), bs.len(), fs.len()) {
            let (e, b, f) = (es.value(i), bs.value(j), &fs[q].value);
            let args = || vec![bs.label(j).to_string(), es.label(i).to_string(), fs[q].label.clone()];
            let base = self.by_formula(b, e);
            tensorial.record_zero(&self.by_formula(&b.scale(f), e).sub(&base.scale(f)), args);
            let rhs = base.scale(f).add(&e.scale(&apply_vector_field(&self.anchor(b), f)));
            leibniz.record_zero(&self.by_formula(b, &e.scale(f)).sub(&rhs), args);
            frame.record_zero(&self.apply(b, e).sub(&base), args);
            let e2 = es.value((i + 3 * q + 1) % es.len());
            let lhs = alg.anchor_apply(e, &bundle.coupling(e2, b));
            let rhs = bundle.coupling(&alg.brk(e, e2), b) - alg.pair(&base, e2)
                + bundle.coupling(e2, &self.conn.apply(e, b));
            compat.record_zero(&(lhs - rhs), args);
        }
        Report { checks: vec![tensorial, leibniz, frame, compat] }
    }
}

/// The dual connection `ρ(e)⟨b*, b⟩ = ⟨∇*_eb*, b⟩ + ⟨b*, ∇_eb⟩` on B*,
/// in the dual frame: `∇*_{e_i} b^j = Σ_q Γ*[i][j][q] b^q` with
/// `Γ*[i][j][q] = −Γ[i][q][j]`, extended by
/// `∇*_{fe}b* = f∇*_eb* − ⟨b*, d_Bf⟩⟨⟨e,·⟩⟩` and `∇*_e(fb*) = f∇*_eb* + ρ(e)(f)b*`.
#[derive(Clone, Debug)]
pub struct DualConnection {
    conn: DorfmanConnection,
    gamma: Vec<BSection>,
}

pub fn dual_connection(conn: &DorfmanConnection) -> DualConnection {
    let (r, s) = (conn.algebroid().rank(), conn.bundle().rank());
    let mut gamma = Vec::with_capacity(r * s);
    for i in 0..r {
        for j in 0..s {
            gamma.push(BSection((0..s).map(|q| -&conn.gamma(i, q).0[j]).collect()));
        }
    }
    DualConnection { conn: conn.clone(), gamma }
}

impl DualConnection {
    pub fn gamma(&self, i: usize, j: usize) -> &BSection {
        &self.gamma[i * self.conn.bundle().rank() + j]
    }

    pub fn base(&self) -> &DorfmanConnection {
        &self.conn
    }

    /// Defining identity and both derived laws on the battery.
    pub fn verify(&self, battery: &Battery) -> Report {
        let alg = self.conn.algebroid();
        let bundle = self.conn.bundle();
        let es = &battery.sections;
        let bs = bundle.battery_sections(battery);
        let duals = dual_sections(bundle, battery);
        let fs = &battery.functions;
        let mut defining = Check::new("dual-defining", "ρ(e)⟨b*, b⟩ = ⟨∇*_eb*, b⟩ + ⟨b*, ∇_eb⟩");
        let mut law1 = Check::new("dual-law-1", "∇*_{fe}b* = f∇*_eb* − ⟨b*, d_Bf⟩⟨⟨e,·⟩⟩");
        let mut law2 = Check::new("dual-law-2", "∇*_e(fb*) = f∇*_eb* + ρ(e)(f)b*");
        for (i, j, q) in triples(es.len(), duals.len(), bs.len().max(fs.len())) {
            let (e, beta) = (es.value(i), duals.value(j));
            let b = bs.value(q % bs.len());
            let f = &fs[q % fs.len()].value;
            let args = || vec![es.label(i).to_string(), duals.label(j).to_string(), bs.label(q % bs.len()).to_string()];
            let lhs = alg.anchor_apply(e, &pair(beta, b));
            let rhs = pair(&self.apply(e, beta), b) + pair(beta, &self.conn.apply(e, b));
            defining.record_zero(&(lhs - rhs), args);
            let fargs = || vec![es.label(i).to_string(), duals.label(j).to_string(), fs[q % fs.len()].label.clone()];
            let base = self.apply(e, beta);
            let rhs = base.scale(f).sub(&bundle.coupling_form(e).scale(&pair(beta, &bundle.d_b(f))));
            law1.record_zero(&self.apply(&e.scale(f), beta).sub(&rhs), fargs);
            let rhs = base.scale(f).add(&beta.scale(&alg.anchor_apply(e, f)));
            law2.record_zero(&self.apply(e, &beta.scale(f)).sub(&rhs), fargs);
        }
        Report { checks: vec![defining, law1, law2] }
    }
}

impl Connection for DualConnection {
    type Value = BSection;
    fn algebroid(&self) -> &CourantAlgebroid {
        self.conn.algebroid()
    }
    fn zero(&self) -> BSection {
        BSection::zero(self.conn.bundle().rank())
    }
    fn apply(&self, e: &Section, beta: &BSection) -> BSection {
        let alg = self.conn.algebroid();
        let bundle = self.conn.bundle();
        let mut out = self.zero();
        for (i, g) in e.0.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            for (j, h) in beta.0.iter().enumerate() {
                if !h.is_zero() {
                    out.add_scaled(&(g * h), self.gamma(i, j));
                }
            }
            if !g.is_constant() {
                let c = pair(beta, &bundle.d_b(g));
                out.add_scaled(&-c, &bundle.coupling_form(&alg.frame(i)));
            }
        }
        if alg.n() > 0 {
            let x = alg.anchor_vector(e);
            for (o, h) in out.0.iter_mut().zip(&beta.0) {
                let t = apply_vector_field(&x, h);
                if !t.is_zero() {
                    *o = &*o + &t;
                }
            }
        }
        out
    }
}

/// `⟨b*, b⟩` in dual frames.
pub fn pair(beta: &BSection, b: &BSection) -> Scalar {
    crate::algebroid::dot(&beta.0, &b.0)
}

pub(crate) fn dual_sections(bundle: &PredualBundle, battery: &Battery) -> Family<BSection> {
    battery.vectors(bundle.rank(), "b*", 2).map(|v| BSection(v.clone()))
}

/// `∇̃_eτ = [∇_e, τ]` on End(B), with τ an s×s matrix acting on frame
/// components.
#[derive(Clone, Debug)]
pub struct EndoConnection<C> {
    inner: C,
    s: usize,
}

pub fn endo_connection<C: Connection<Value = BSection> + Clone>(conn: &C) -> EndoConnection<C> {
    let s = conn.zero().len();
    EndoConnection { inner: conn.clone(), s }
}

/// `b* ⊗ b` as the endomorphism `x ↦ ⟨b*, x⟩ b`.
pub fn tensor(beta: &BSection, b: &BSection) -> Matrix<Scalar> {
    Matrix::from_fn(b.len(), beta.len(), |i, j| &b.0[i] * &beta.0[j])
}

impl<C: Connection<Value = BSection>> Connection for EndoConnection<C> {
    type Value = Matrix<Scalar>;
    fn algebroid(&self) -> &CourantAlgebroid {
        self.inner.algebroid()
    }
    fn zero(&self) -> Matrix<Scalar> {
        Matrix::zeros(self.s, self.s)
    }
    fn apply(&self, e: &Section, tau: &Matrix<Scalar>) -> Matrix<Scalar> {
        matrix_of(self.s, |b| {
            let tb = BSection(tau.mul_vec(&b.0));
            let nb = self.inner.apply(e, b);
            self.inner.apply(e, &tb).sub(&BSection(tau.mul_vec(&nb.0)))
        })
    }
}

impl EndoConnection<DorfmanConnection> {
    /// The listed properties of ∇̃: it kills the identity, satisfies both
    /// Leibniz laws on `b* ⊗ b`, and maps `b* ⊗ d_Bf` to
    /// `∇*_eb* ⊗ d_Bf + b* ⊗ d_B(ρ(e)f)`.
    pub fn verify(&self, battery: &Battery) -> Report {
        let alg = self.inner.algebroid();
        let bundle = self.inner.bundle();
        let dual = dual_connection(&self.inner);
        let es = &battery.sections;
        let bs = bundle.battery_sections(battery);
        let duals = dual_sections(bundle, battery);
        let fs = &battery.functions;
        let id = Matrix::identity(self.s);
        let mut identity = Check::new("endo-identity", "∇̃_e(id) = 0");
        let mut law1 = Check::new(
            "endo-law-1",
            "∇̃_{fe}(b*⊗b) = f∇̃_e(b*⊗b) − ⟨b*, d_Bf⟩⟨⟨e,·⟩⟩⊗b + ⟨⟨e,b⟩⟩ b*⊗d_Bf",
        );
        let mut law2 = Check::new("endo-law-2", "∇̃_e(f(b*⊗b)) = f∇̃_e(b*⊗b) + ρ(e)(f)(b*⊗b)");
        let mut invariant = Check::new("endo-image", "∇̃_e(b*⊗d_Bf) = ∇*_eb*⊗d_Bf + b*⊗d_B(ρ(e)f)");
        for i in 0..es.len() {
            identity.record_zero(&self.apply(es.value(i), &id), || vec![es.label(i).to_string()]);
        }
        for (i, j, q) in triples(es.len(), duals.len(), fs.len()) {
            let (e, beta, f) = (es.value(i), duals.value(j), &fs[q].value);
            let b = bs.value((i + j) % bs.len());
            let args = || {
                vec![
                    es.label(i).to_string(),
                    duals.label(j).to_string(),
                    bs.label((i + j) % bs.len()).to_string(),
                    fs[q].label.clone(),
                ]
            };
            let tau = tensor(beta, b);
            let base = self.apply(e, &tau);
            let dbf = bundle.d_b(f);
            let rhs = base
                .scale_by(f)
                .sub(&tensor(&bundle.coupling_form(e), b).scale_by(&pair(beta, &dbf)))
                .add(&tensor(beta, &dbf).scale_by(&bundle.coupling(e, b)));
            law1.record_zero(&self.apply(&e.scale(f), &tau).sub(&rhs), args);
            let rhs = base.scale_by(f).add(&tau.scale_by(&alg.anchor_apply(e, f)));
            law2.record_zero(&self.apply(e, &tau.scale_by(f)).sub(&rhs), args);
            let lhs = self.apply(e, &tensor(beta, &dbf));
            let rhs = tensor(&dual.apply(e, beta), &dbf).add(&tensor(beta, &bundle.d_b(&alg.anchor_apply(e, f))));
            invariant.record_zero(&lhs.sub(&rhs), args);
        }
        Report { checks: vec![identity, law1, law2, invariant] }
    }
}

trait ScaleBy {
    fn scale_by(&self, f: &Scalar) -> Self;
}

impl ScaleBy for Matrix<Scalar> {
    fn scale_by(&self, f: &Scalar) -> Self {
        self.map(|x| x * f)
    }
}

/// `∇*` computed directly from `ρ(e)⟨b*, b⟩ = ⟨∇*_eb*, b⟩ + ⟨b*, ∇_eb⟩` on
/// the frame; works for any connection, including ones acting along a
/// subbundle.
#[derive(Clone, Debug)]
pub struct DefiningDual<C> {
    inner: C,
}

pub fn dual_by_definition<C: Connection<Value = BSection> + Clone>(conn: &C) -> DefiningDual<C> {
    DefiningDual { inner: conn.clone() }
}

impl<C: Connection<Value = BSection>> Connection for DefiningDual<C> {
    type Value = BSection;
    fn algebroid(&self) -> &CourantAlgebroid {
        self.inner.algebroid()
    }
    fn zero(&self) -> BSection {
        self.inner.zero()
    }
    fn apply(&self, e: &Section, beta: &BSection) -> BSection {
        let alg = self.inner.algebroid();
        let s = beta.len();
        BSection(
            (0..s)
                .map(|j| alg.anchor_apply(e, &beta.0[j]) - pair(beta, &self.inner.apply(e, &BSection::basis(s, j))))
                .collect(),
        )
    }
}
