//! Worked connections: the one induced by a linear connection Δ on TM, the
//! pair on the port-Hamiltonian algebroid, and the Bott connection of a
//! Dirac structure.

use crate::algebroid::{Christoffel, CourantAlgebroid, Section};
use crate::battery::{Battery, BatteryConfig, Family};
use crate::linalg::{self, Matrix};
use crate::report::{Check, Report};
use crate::Scalar;

use super::curvature::flatness_check;
use super::induced::dual_by_definition;
use super::{
    ensure_connection, verify_connection, BSection, Connection, DorfmanConnection, DorfmanError, DorfmanLike,
    PredualBundle,
};

/// `∇_{(X,ζ)}(Y,η) = (Δ_XY, 𝓛_Xη + ⟨Δ*_·ζ, Y⟩)` on standard(n) with B = E.
///
/// On frames: `∇_{∂_i}∂_j = Σ_k Γ(i,j,k)∂_k`, `∇_{dx^m}∂_j = −Σ_i Γ(i,j,m)dx^i`,
/// and every value on a `dx` argument vanishes.
pub fn build_example_mjl(delta: &Christoffel) -> Result<DorfmanConnection, DorfmanError> {
    let n = delta.n;
    if delta.v != n {
        return Err(DorfmanError::Shape(format!("Δ must act on TM: rank {} over base {n}", delta.v)));
    }
    let alg = CourantAlgebroid::standard(n)?;
    let bundle = PredualBundle::of_algebroid(&alg);
    let conn = DorfmanConnection::from_fn(&bundle, |i, j| {
        let mut out = BSection::zero(2 * n);
        if j < n {
            for k in 0..n {
                if i < n {
                    out.0[k] = delta.get(i, j, k).clone();
                } else {
                    out.0[n + k] = -delta.get(k, j, i - n);
                }
            }
        }
        out
    });
    ensure_connection(&conn, &Battery::new(&alg, BatteryConfig::default()))?;
    Ok(conn)
}

/// The two connections of the port-Hamiltonian algebroid on
/// `B = T*M ⊕ V` (frame `dx^i, v_a`) and `B′ = T*M ⊕ V*` (frame `dx^i, v^a`):
/// `∇_eb = (𝓛_Xη + ⟨Δ*_·λ_in, μ_out⟩, Δ_Xμ_out)` and
/// `∇′_eb′ = (𝓛_Xη + ⟨μ_in, Δ_·λ_out⟩, Δ*_Xμ_in)`.
pub fn build_port_hamiltonian_connections(
    delta: &Christoffel,
) -> Result<(DorfmanConnection, DorfmanConnection), DorfmanError> {
    let alg = CourantAlgebroid::port_hamiltonian(delta)?;
    let (n, v) = (delta.n, delta.v);
    let (r, s) = (alg.rank(), n + v);
    let (vv, vd) = (2 * n, 2 * n + v);
    let alpha = Matrix::from_fn(s, n, |i, l| if i == l { Scalar::one() } else { Scalar::zero() });
    // b_i = dx^i pairs with ∂_i; the V-part pairs with the opposite V-slot of E.
    let coupling = |partner: usize| {
        Matrix::from_fn(s, r, move |i, j| {
            let hit = if i < n { j == i } else { j == partner + i - n };
            if hit {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    };
    let b = PredualBundle::new(&alg, coupling(vd), alpha.clone())?;
    let b_prime = PredualBundle::new(&alg, coupling(vv), alpha)?;

    let nabla = DorfmanConnection::from_fn(&b, |i, j| {
        let mut out = BSection::zero(s);
        if j < n {
            return out;
        }
        let a = j - n;
        if i < n {
            // Δ_{∂_i} v_a
            for c in 0..v {
                out.0[n + c] = delta.get(i, a, c).clone();
            }
        } else if (vd..vd + v).contains(&i) {
            // ⟨Δ*_· v^c, v_a⟩ = −Σ_k Γ(k,a,c) dx^k
            let c = i - vd;
            for k in 0..n {
                out.0[k] = -delta.get(k, a, c);
            }
        }
        out
    });
    let nabla_prime = DorfmanConnection::from_fn(&b_prime, |i, j| {
        let mut out = BSection::zero(s);
        if j < n {
            return out;
        }
        let c = j - n;
        if i < n {
            // Δ*_{∂_i} v^c = −Σ_a Γ(i,a,c) v^a
            for a in 0..v {
                out.0[n + a] = -delta.get(i, a, c);
            }
        } else if (vv..vv + v).contains(&i) {
            // ⟨v^c, Δ_· v_a⟩ = Σ_k Γ(k,a,c) dx^k
            let a = i - vv;
            for k in 0..n {
                out.0[k] = delta.get(k, a, c).clone();
            }
        }
        out
    });
    let battery = Battery::new(&alg, BatteryConfig::default());
    ensure_connection(&nabla, &battery)?;
    ensure_connection(&nabla_prime, &battery)?;
    Ok((nabla, nabla_prime))
}

/// `∇^L_l c̄ = class of ⟦l, c⟧` on `E/L` for a Dirac structure L, acting
/// along L. Quotient sections are stored by their coordinates on the
/// complement frame `k_a`.
#[derive(Clone, Debug)]
pub struct BottConnection {
    alg: CourantAlgebroid,
    l: Vec<Section>,
    k: Vec<Section>,
    /// Inverse of the basis matrix `[l_1..l_m | k_1..k_m]`.
    change: Matrix<Scalar>,
    p: Matrix<Scalar>,
    a: Matrix<Scalar>,
}

/// Checks the Dirac preconditions on `frame` and builds the connection.
pub fn bott_connection(alg: &CourantAlgebroid, frame: &[Section]) -> Result<BottConnection, DorfmanError> {
    let r = alg.rank();
    for l in frame {
        alg.check_section(l)?;
    }
    let m = frame.len();
    let lmat = Matrix::from_fn(r, m, |i, j| frame[j].0[i].clone());
    let got = lmat.rank();
    if r % 2 != 0 || m != r / 2 || got != m {
        return Err(DorfmanError::WrongRank { got, expected: r / 2 });
    }
    for i in 0..m {
        for j in i..m {
            let value = alg.pair(&frame[i], &frame[j]);
            if !value.is_zero() {
                return Err(DorfmanError::NotIsotropic { i: i + 1, j: j + 1, value: value.to_string() });
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            let bracket = alg.brk(&frame[i], &frame[j]);
            let rhs = Matrix::from_fn(r, 1, |q, _| bracket.0[q].clone());
            if linalg::solve(&lmat, &rhs).is_err() {
                return Err(DorfmanError::NotInvolutive { i: i + 1, j: j + 1, bracket: bracket.to_string() });
            }
        }
    }
    // Greedy complement: standard basis vectors that raise the rank.
    let mut cols: Vec<Section> = frame.to_vec();
    let mut k = Vec::new();
    for q in 0..r {
        if k.len() == m {
            break;
        }
        let cand = Section::basis(r, q);
        let trial = Matrix::from_fn(r, cols.len() + 1, |i, j| {
            if j < cols.len() {
                cols[j].0[i].clone()
            } else {
                cand.0[i].clone()
            }
        });
        if trial.rank() == cols.len() + 1 {
            cols.push(cand.clone());
            k.push(cand);
        }
    }
    let basis = Matrix::from_fn(r, r, |i, j| cols[j].0[i].clone());
    let change = basis.inverse().ok_or(DorfmanError::WrongRank { got: basis.rank(), expected: r })?;
    let mut conn = BottConnection {
        alg: alg.clone(),
        l: frame.to_vec(),
        k,
        change,
        p: Matrix::zeros(0, 0),
        a: Matrix::zeros(0, 0),
    };
    conn.p = Matrix::from_fn(m, m, |a, i| alg.pair(&conn.l[i], &conn.k[a]));
    let n = alg.n();
    let classes: Vec<BSection> = (0..n)
        .map(|l| conn.class(&Section(alg.coanchor_matrix().column(l))))
        .collect();
    conn.a = Matrix::from_fn(m, n, |a, l| classes[l].0[a].clone());
    Ok(conn)
}

impl BottConnection {
    pub fn rank(&self) -> usize {
        self.l.len()
    }

    pub fn l_frame(&self) -> &[Section] {
        &self.l
    }

    pub fn complement(&self) -> &[Section] {
        &self.k
    }

    /// `P[a][i] = ⟨l_i, k_a⟩`, the coupling of L with `E/L`.
    pub fn quotient_pairing(&self) -> &Matrix<Scalar> {
        &self.p
    }

    /// `d_{E/L}f = class of d_Ef = Σ_a (Σ_l A[a][l] ∂_l f) k̄_a`.
    pub fn quotient_alpha(&self) -> &Matrix<Scalar> {
        &self.a
    }

    /// Coordinates of `ē` on the frame `k̄_a`.
    pub fn class(&self, e: &Section) -> BSection {
        let m = self.rank();
        let coords = self.change.mul_vec(&e.0);
        BSection(coords[m..].to_vec())
    }

    pub fn representative(&self, c: &BSection) -> Section {
        let r = self.alg.rank();
        let mut out = Section::zero(r);
        for (ca, ka) in c.0.iter().zip(&self.k) {
            out.add_scaled(ca, ka);
        }
        out
    }

    pub fn l_section(&self, coeffs: &[Scalar]) -> Section {
        let mut out = Section::zero(self.alg.rank());
        for (g, l) in coeffs.iter().zip(&self.l) {
            out.add_scaled(g, l);
        }
        out
    }

    /// The three connection axioms, the quotient constraint `AᵀP = ρ|_L`,
    /// and flatness of `∇^L` and of its dual on `(E/L)* ≅ L`.
    pub fn report(&self, battery: &Battery) -> Report {
        let mut report = verify_connection(self, battery);
        let mut constraint = Check::new("bott-constraint", "AᵀP = ρ restricted to L");
        let lhs = self.a.transpose().mul(&self.p);
        for l in 0..self.alg.n() {
            for i in 0..self.rank() {
                let rho = self.alg.anchor_vector(&self.l[i]);
                constraint.record_zero(&(&lhs.row(l)[i] - &rho[l]), || vec![format!("({l}, {i})")]);
            }
        }
        report.push(constraint);
        let acting = self.acting_sections(battery);
        report.extend(flatness_check(self, &acting, &self.fiber_sections(battery), battery, "bott-"));
        let dual = dual_by_definition(self);
        let duals = battery.vectors(self.rank(), "c*", 5).map(|v| BSection(v.clone()));
        report.extend(flatness_check(&dual, &acting, &duals, battery, "bott-dual-"));
        report
    }
}

impl Connection for BottConnection {
    type Value = BSection;
    fn algebroid(&self) -> &CourantAlgebroid {
        &self.alg
    }
    fn zero(&self) -> BSection {
        BSection::zero(self.rank())
    }
    fn apply(&self, l: &Section, c: &BSection) -> BSection {
        self.class(&self.alg.brk(l, &self.representative(c)))
    }
}

impl DorfmanLike for BottConnection {
    fn coupling(&self, l: &Section, c: &BSection) -> Scalar {
        self.alg.pair(l, &self.representative(c))
    }
    fn d_b(&self, f: &Scalar) -> BSection {
        self.class(&self.alg.d_e(f))
    }
    fn acting_sections(&self, battery: &Battery) -> Family<Section> {
        battery.vectors(self.rank(), "l", 3).map(|v| self.l_section(v))
    }
    fn fiber_sections(&self, battery: &Battery) -> Family<BSection> {
        battery.vectors(self.rank(), "k̄", 4).map(|v| BSection(v.clone()))
    }
}
