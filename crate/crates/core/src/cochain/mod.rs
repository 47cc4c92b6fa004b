//! The Courant–Dorfman algebra and its differential-operator extension as an
//! evaluable expression DAG.
//!
//! Cochains are built lazily and compared extensionally on a battery. A
//! degree-`p` cochain has components `ω_k`, `0 ≤ k ≤ ⌊p/2⌋`, taking `p − 2k`
//! E-arguments and `k` Ω¹-arguments.

mod checks;
pub(crate) mod formula;

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebroid::{CourantAlgebroid, OneForm, Section};
use crate::Scalar;

pub use checks::{
    cartan_suite, check_symmetry_condition, compare, equal, generator_set, order_report, symbol_e, symbol_omega,
    Equality, Operator, SymbolReport,
};
pub use formula::Fiber;

/// Largest degree any node of an evaluated DAG may have.
pub const MAX_DEGREE: i32 = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CochainError {
    #[error("component k = {k} out of range for degree {degree}")]
    Component { k: usize, degree: i32 },
    #[error("expected {expected} section arguments, got {got}")]
    SectionArity { expected: usize, got: usize },
    #[error("expected {expected} function arguments, got {got}")]
    FunctionArity { expected: usize, got: usize },
    #[error("argument of length {got}, expected {expected}")]
    ArgumentLength { got: usize, expected: usize },
    #[error("degree {degree} exceeds the cap {MAX_DEGREE}")]
    DegreeCap { degree: i32 },
    #[error("cannot combine cochains of degrees {0} and {1}")]
    DegreeMismatch(i32, i32),
    #[error("slot {slot} out of range: component has {slots} slots")]
    SlotOutOfRange { slot: usize, slots: usize },
}

#[derive(Clone, Debug)]
pub enum Node {
    /// Zero cochain; negative degrees only ever produce this node.
    Zero,
    ScalarLeaf(Scalar),
    /// `ω₀(v) = ⟨e, v⟩`.
    SectionLeaf(Section),
    Product(Cochain, Cochain),
    Differential(Cochain),
    InteriorE(Section, Cochain),
    InteriorF(Scalar, Cochain),
    /// `𝓛_e = i_e∘d + d∘i_e`; the last field is that expansion.
    LieE(Section, Cochain, Cochain),
    /// `𝓛_f = i_f∘d − d∘i_f`; the last field is that expansion.
    LieF(Scalar, Cochain, Cochain),
    /// Rational linear combination of cochains of equal degree.
    Combination(Vec<(BigRational, Cochain)>),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    degree: i32,
    order: u32,
    peak: i32,
}

/// Shared, immutable DAG node with degree and order metadata.
#[derive(Clone)]
pub struct Cochain(Rc<Inner>);

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Cochain {
    fn make(node: Node, degree: i32, order: u32, peak: i32) -> Cochain {
        if degree < 0 {
            return Cochain(Rc::new(Inner { node: Node::Zero, degree, order: 1, peak }));
        }
        Cochain(Rc::new(Inner { node, degree, order, peak: peak.max(degree) }))
    }

    pub fn zero(degree: i32) -> Cochain {
        Cochain::make(Node::Zero, degree, 1, degree)
    }

    pub fn scalar(f: Scalar) -> Cochain {
        Cochain::make(Node::ScalarLeaf(f), 0, 1, 0)
    }

    pub fn section(e: Section) -> Cochain {
        Cochain::make(Node::SectionLeaf(e), 1, 1, 1)
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn degree(&self) -> i32 {
        self.0.degree
    }

    /// Declared order bound `m` of the class `𝔇^p_{m,m−1}`.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// Largest degree of any node in the DAG.
    pub fn peak_degree(&self) -> i32 {
        self.0.peak
    }

    pub fn is_zero_node(&self) -> bool {
        matches!(self.0.node, Node::Zero)
    }

    pub fn mul(&self, other: &Cochain) -> Cochain {
        let degree = self.degree() + other.degree();
        let peak = self.peak_degree().max(other.peak_degree());
        if self.is_zero_node() || other.is_zero_node() {
            return Cochain::make(Node::Zero, degree, 1, peak);
        }
        let order = self.order().max(other.order());
        Cochain::make(Node::Product(self.clone(), other.clone()), degree, order, peak)
    }

    pub fn d(&self) -> Cochain {
        let degree = self.degree() + 1;
        let peak = self.peak_degree().max(degree);
        if self.is_zero_node() {
            return Cochain::make(Node::Zero, degree, 1, peak);
        }
        Cochain::make(Node::Differential(self.clone()), degree, self.order() + 1, peak)
    }

    pub fn interior_e(&self, e: &Section) -> Cochain {
        let degree = self.degree() - 1;
        if self.is_zero_node() || e.is_zero() {
            return Cochain::make(Node::Zero, degree, 1, self.peak_degree());
        }
        Cochain::make(Node::InteriorE(e.clone(), self.clone()), degree, self.order(), self.peak_degree())
    }

    pub fn interior_f(&self, f: &Scalar) -> Cochain {
        let degree = self.degree() - 2;
        if self.is_zero_node() || f.is_constant() {
            return Cochain::make(Node::Zero, degree, 1, self.peak_degree());
        }
        Cochain::make(Node::InteriorF(f.clone(), self.clone()), degree, self.order(), self.peak_degree())
    }

    pub fn lie_e(&self, e: &Section) -> Cochain {
        let expansion = self.d().interior_e(e).add(&self.interior_e(e).d()).expect("equal degrees");
        Cochain::make(
            Node::LieE(e.clone(), self.clone(), expansion.clone()),
            self.degree(),
            expansion.order(),
            expansion.peak_degree(),
        )
    }

    pub fn lie_f(&self, f: &Scalar) -> Cochain {
        let expansion = self.d().interior_f(f).sub(&self.interior_f(f).d()).expect("equal degrees");
        Cochain::make(
            Node::LieF(f.clone(), self.clone(), expansion.clone()),
            self.degree() - 1,
            expansion.order(),
            expansion.peak_degree(),
        )
    }

    /// `Σ c_i ω_i`; all terms must share a degree.
    pub fn combination(terms: Vec<(BigRational, Cochain)>) -> Result<Cochain, CochainError> {
        let Some(first) = terms.first() else {
            return Ok(Cochain::zero(0));
        };
        let degree = first.1.degree();
        if let Some(bad) = terms.iter().find(|t| t.1.degree() != degree) {
            return Err(CochainError::DegreeMismatch(degree, bad.1.degree()));
        }
        let peak = terms.iter().map(|t| t.1.peak_degree()).max().unwrap_or(degree);
        let live: Vec<_> = terms.into_iter().filter(|(c, w)| !c.is_zero() && !w.is_zero_node()).collect();
        if live.is_empty() {
            return Ok(Cochain::make(Node::Zero, degree, 1, peak));
        }
        let order = live.iter().map(|t| t.1.order()).max().unwrap_or(1);
        Ok(Cochain::make(Node::Combination(live), degree, order, peak))
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        let one = BigRational::one();
        Cochain::combination(vec![(one.clone(), self.clone()), (one, other.clone())])
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        let one = BigRational::one();
        Cochain::combination(vec![(one.clone(), self.clone()), (-one, other.clone())])
    }

    pub fn scale(&self, c: BigRational) -> Cochain {
        Cochain::combination(vec![(c, self.clone())]).expect("single term")
    }

    pub fn neg(&self) -> Cochain {
        self.scale(-BigRational::one())
    }

    /// Number of E-arguments of component `k`, if it exists.
    pub fn section_arity(&self, k: usize) -> Option<usize> {
        let p = usize::try_from(self.degree()).ok()?;
        p.checked_sub(2 * k)
    }

    /// `ω_k(e₁,…; f₁,…)`, the f-slots standing for `df₁,…`.
    pub fn evaluate(
        &self,
        alg: &CourantAlgebroid,
        k: usize,
        sections: &[Section],
        functions: &[Scalar],
    ) -> Result<Scalar, CochainError> {
        let forms: Vec<OneForm> = functions.iter().map(|f| OneForm::exact(alg.n(), f)).collect();
        self.evaluate_forms(alg, k, sections, &forms)
    }

    /// `ω̄_k(e₁,…; α₁,…)` on general one-forms.
    pub fn evaluate_forms(
        &self,
        alg: &CourantAlgebroid,
        k: usize,
        sections: &[Section],
        forms: &[OneForm],
    ) -> Result<Scalar, CochainError> {
        self.validate(alg, k, sections, forms)?;
        Ok(self.eval(alg, k, sections, forms))
    }

    pub(crate) fn validate(
        &self,
        alg: &CourantAlgebroid,
        k: usize,
        sections: &[Section],
        forms: &[OneForm],
    ) -> Result<(), CochainError> {
        validate_args(alg, self.degree(), self.peak_degree(), k, sections, forms)
    }

    pub(crate) fn eval(&self, alg: &CourantAlgebroid, k: usize, secs: &[Section], forms: &[OneForm]) -> Scalar {
        self.eval_in(alg, k, secs, forms, &Memo::default())
    }

    /// Nested differentials revisit the same (node, arguments) pairs many
    /// times; inner nodes are memoized for the duration of one evaluation.
    fn eval_in(&self, alg: &CourantAlgebroid, k: usize, secs: &[Section], forms: &[OneForm], memo: &Memo) -> Scalar {
        let p = self.degree();
        if p < 0 || 2 * k as i32 > p {
            return Scalar::zero();
        }
        let zero = Scalar::zero();
        let key = match &self.0.node {
            Node::Zero => return zero,
            Node::ScalarLeaf(f) => return f.clone(),
            Node::SectionLeaf(e) => return alg.pair(e, &secs[0]),
            Node::LieE(_, _, x) | Node::LieF(_, _, x) => return x.eval_in(alg, k, secs, forms, memo),
            _ => (Rc::as_ptr(&self.0) as usize, k, secs.to_vec(), forms.to_vec()),
        };
        if let Some(v) = memo.borrow().get(&key) {
            return v.clone();
        }
        let value = match &self.0.node {
            Node::Product(a, b) => formula::product(
                a.degree() as usize,
                b.degree() as usize,
                k,
                secs,
                forms,
                &zero,
                &mut |i, s, f| a.eval_in(alg, i, s, f, memo),
                &mut |j, s, f| b.eval_in(alg, j, s, f, memo),
                &|x: &Scalar, y: &Scalar| x * y,
            ),
            Node::Differential(a) => formula::differential(
                alg,
                a.degree() as usize,
                k,
                secs,
                forms,
                &zero,
                &mut |kk, s, f| a.eval_in(alg, kk, s, f, memo),
                &|e, v| alg.anchor_apply(e, v),
            ),
            Node::InteriorE(e, a) => {
                let mut s = Vec::with_capacity(secs.len() + 1);
                s.push(e.clone());
                s.extend_from_slice(secs);
                a.eval_in(alg, k, &s, forms, memo)
            }
            Node::InteriorF(f, a) => {
                let mut fs = Vec::with_capacity(forms.len() + 1);
                fs.push(OneForm::exact(alg.n(), f));
                fs.extend_from_slice(forms);
                a.eval_in(alg, k + 1, secs, &fs, memo)
            }
            Node::Combination(terms) => {
                let mut acc = Scalar::zero();
                for (c, w) in terms {
                    let v = w.eval_in(alg, k, secs, forms, memo);
                    if !v.is_zero() {
                        acc = acc + v.scale_rational(c);
                    }
                }
                acc
            }
            Node::Zero | Node::ScalarLeaf(_) | Node::SectionLeaf(_) | Node::LieE(..) | Node::LieF(..) => {
                unreachable!("handled above")
            }
        };
        memo.borrow_mut().insert(key, value.clone());
        value
    }
}

/// Evaluation cache keyed by node identity, component and arguments. Node
/// addresses are stable because every node is kept alive by its parent.
type Memo = RefCell<HashMap<(usize, usize, Vec<Section>, Vec<OneForm>), Scalar>>;

pub(crate) fn validate_args(
    alg: &CourantAlgebroid,
    degree: i32,
    peak: i32,
    k: usize,
    sections: &[Section],
    forms: &[OneForm],
) -> Result<(), CochainError> {
    if peak > MAX_DEGREE {
        return Err(CochainError::DegreeCap { degree: peak });
    }
    let arity = usize::try_from(degree)
        .ok()
        .and_then(|p| p.checked_sub(2 * k))
        .ok_or(CochainError::Component { k, degree })?;
    if sections.len() != arity {
        return Err(CochainError::SectionArity { expected: arity, got: sections.len() });
    }
    if forms.len() != k {
        return Err(CochainError::FunctionArity { expected: k, got: forms.len() });
    }
    if let Some(s) = sections.iter().find(|s| s.len() != alg.rank()) {
        return Err(CochainError::ArgumentLength { got: s.len(), expected: alg.rank() });
    }
    if let Some(a) = forms.iter().find(|a| a.len() != alg.n()) {
        return Err(CochainError::ArgumentLength { got: a.len(), expected: alg.n() });
    }
    Ok(())
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.node {
            Node::Zero => write!(f, "0"),
            Node::ScalarLeaf(s) => write!(f, "[{s}]"),
            Node::SectionLeaf(e) => write!(f, "<{e},·>"),
            Node::Product(a, b) => write!(f, "({a})·({b})"),
            Node::Differential(a) => write!(f, "d({a})"),
            Node::InteriorE(e, a) => write!(f, "i_{e}({a})"),
            Node::InteriorF(s, a) => write!(f, "i_[{s}]({a})"),
            Node::LieE(e, a, _) => write!(f, "L_{e}({a})"),
            Node::LieF(s, a, _) => write!(f, "L_[{s}]({a})"),
            Node::Combination(terms) => {
                for (i, (c, w)) in terms.iter().enumerate() {
                    match (i, c.is_negative()) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    let a = c.abs();
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
        }
    }
}
