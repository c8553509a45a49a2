//! Non-abelian homotopy embedding tensors `T: T^Z(V) → T^Z(E)` for a
//! coherent action, their descendent Loday structure, the strict adjoint
//! case, and the deformation complex on `𝔥 = Hom(T̄V, E)`.
//!
//! Throughout, `E ⊕ V` is laid out with the E basis first, so an E index is
//! unchanged and a V index `j` becomes `dim E + j`.

use std::collections::{BTreeMap, HashMap};
use std::thread;

use crate::action::{hemisemidirect, product_arity, product_space, require_coherent, ActionFamily};
use crate::coalgebra::{
    lift_coderivation, lift_comorphism, symmetrize_sum, Coalgebra, Tensor2, TruncatedCoderivation, TruncatedComorphism,
    WordMap,
};
use crate::error::{AlgebraError, Result};
use crate::graded::{koszul_sign_of, shuffles, GradedSpace, Word, WordKind};
use crate::homotopy::{check_lie_morphism, check_loday_morphism, compose_through_components, lie_to_loday, HomotopyStructure};
use crate::linear::{mat_mul, nullspace, rank};
use crate::multimap::{Family, Flavor, FnRestriction, MultiMap, Restriction, Space, Vector, WordSum};
use crate::report::{Report, Residual};
use crate::scalar::{Scalar, Sign};

/// Components `T_k: T^k(V) → E` of degree 0, stored as plain maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingTensor<S: Scalar> {
    comps: Family<S>,
}

impl<S: Scalar> EmbeddingTensor<S> {
    pub fn new(v: Space, e: Space, max_arity: usize) -> Self {
        EmbeddingTensor { comps: Family::new(v, e, 0, Flavor::Plain, max_arity.max(1)) }
    }

    /// Symmetric families are expanded to their values on ordered words.
    pub fn from_family(f: Family<S>) -> Result<Self> {
        if f.degree() != 0 {
            return Err(AlgebraError::DegreeMismatch(format!("tensor components need degree 0, got {}", f.degree())));
        }
        Ok(EmbeddingTensor { comps: f.to_plain() })
    }

    /// `T = T_1`.
    pub fn strict(t1: &MultiMap<S>) -> Result<Self> {
        check_unary_shape(t1)?;
        let f = Family::from_maps(t1.source().clone(), t1.target().clone(), 0, t1.flavor(), vec![t1.clone()])?;
        Self::from_family(f)
    }

    pub fn identity(space: Space) -> Self {
        let mut t = Self::new(space.clone(), space.clone(), 1);
        for i in 0..space.dim() {
            t.insert(&[i], i, S::one()).expect("degree-preserving");
        }
        t
    }

    pub fn source(&self) -> &Space {
        self.comps.source()
    }

    pub fn target(&self) -> &Space {
        self.comps.target()
    }

    pub fn family(&self) -> &Family<S> {
        &self.comps
    }

    pub fn insert(&mut self, w: &[usize], out: usize, c: S) -> Result<()> {
        self.comps.insert(w, out, c)
    }

    pub fn eval(&self, w: &[usize]) -> Vector<S> {
        self.comps.eval(w)
    }

    /// `T_•` applied to a formal sum of V-words.
    pub fn eval_sum(&self, x: &WordSum<S>) -> Vector<S> {
        let mut out = Vector::new();
        for (w, c) in x {
            out.add_scaled(&self.eval(w), c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_zero()
    }

    /// Only `T_1` is nonzero.
    pub fn is_strict(&self) -> bool {
        self.comps.top_arity() <= 1
    }

    pub fn is_symmetric(&self) -> bool {
        self.comps.is_symmetric()
    }

    pub fn unary(&self) -> MultiMap<S> {
        match self.comps.map(1) {
            Some(m) => m.clone(),
            None => MultiMap::zero(self.source().clone(), self.target().clone(), 1, 0, Flavor::Plain),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(EmbeddingTensor { comps: self.comps.add(&other.comps)? })
    }

    pub fn scale(&self, c: &S) -> Self {
        EmbeddingTensor { comps: self.comps.scale(c) }
    }

    fn check_against(&self, phi: &ActionFamily<S>) -> Result<()> {
        if self.source() != phi.v_space() || self.target() != phi.e_space() {
            return Err(AlgebraError::SpaceMismatch {
                expected: format!("{} -> {}", phi.v_space().name(), phi.e_space().name()),
                got: format!("{} -> {}", self.source().name(), self.target().name()),
            });
        }
        Ok(())
    }
}

fn embed_v(ed: usize, w: &[usize]) -> Word {
    w.iter().map(|j| j + ed).collect()
}

fn pure_v(ed: usize, w: &[usize]) -> Option<Word> {
    w.iter().all(|&j| j >= ed).then(|| w.iter().map(|j| j - ed).collect())
}

fn e_part<S: Scalar>(ed: usize, v: &Vector<S>) -> Vector<S> {
    v.iter().filter(|(i, _)| **i < ed).map(|(i, c)| (*i, c.clone())).collect()
}

/// Restriction maps of `𝔱`: `T_k ∘ p_{T(V)}` on `E ⊕ V`.
fn tensor_restriction<S: Scalar>(t: &EmbeddingTensor<S>) -> impl Restriction<S> + '_ {
    let ed = t.target().dim();
    FnRestriction::new(0, move |w: &[usize]| match pure_v(ed, w) {
        Some(v) => t.eval(&v),
        None => Vector::new(),
    })
}

/// Restriction maps of `Id ± T`.
fn exp_restriction<S: Scalar>(t: &EmbeddingTensor<S>, sign: Sign) -> impl Restriction<S> + '_ {
    let ed = t.target().dim();
    FnRestriction::new(0, move |w: &[usize]| {
        let mut out = match pure_v(ed, w) {
            Some(v) => t.eval(&v).signed(sign),
            None => Vector::new(),
        };
        if w.len() == 1 {
            out.add_term(w[0], S::one());
        }
        out
    })
}

/// `e^𝔱 = Id + T` on `T^Z(E ⊕ V)`.
pub fn extend_tensor<S: Scalar>(t: &EmbeddingTensor<S>, bound: usize) -> Result<TruncatedComorphism<S>> {
    let sum = product_space(t.target(), t.source());
    TruncatedComorphism::lift(&exp_restriction(t, Sign::from_odd(false)), sum.clone(), sum, Coalgebra::Zinbiel, bound)
}

/// `e^{-𝔱} = Id - T`.
pub fn retract_tensor<S: Scalar>(t: &EmbeddingTensor<S>, bound: usize) -> Result<TruncatedComorphism<S>> {
    let sum = product_space(t.target(), t.source());
    TruncatedComorphism::lift(&exp_restriction(t, Sign::from_odd(true)), sum.clone(), sum, Coalgebra::Zinbiel, bound)
}

/// `𝔱` as a coderivation of `T^Z(E ⊕ V)`.
pub fn tensor_coderivation<S: Scalar>(t: &EmbeddingTensor<S>, bound: usize) -> TruncatedCoderivation<S> {
    let sum = product_space(t.target(), t.source());
    TruncatedCoderivation::lift(&tensor_restriction(t), sum, Coalgebra::Zinbiel, bound)
}

/// `π T(w)`: the comorphism image of a V-word, symmetrized in `S̄(E)`.
fn pi_t<S: Scalar>(t: &EmbeddingTensor<S>, w: &[usize]) -> WordSum<S> {
    let lifted = lift_comorphism(t.family(), t.source(), t.target(), Coalgebra::Zinbiel, w);
    symmetrize_sum(t.target(), &lifted)
}

/// `Σ_x c_x Φ(x; args)` for a formal sum of E-words.
fn phi_of_sum<S: Scalar>(phi: &ActionFamily<S>, xs: &WordSum<S>, args: &[usize]) -> Vector<S> {
    let mut out = Vector::new();
    for (x, c) in xs {
        out.add_scaled(&phi.eval(x, args), c);
    }
    out
}

/// The descendent brackets `q_1 = m_1`,
/// `q_n(v) = m_n(v) + Σ_k Φ(πT(v_1…v_k); v_{k+1}…v_n)`, as a plain structure on V.
pub fn descendent<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, max_arity: usize) -> Result<HomotopyStructure<S>> {
    t.check_against(phi)?;
    require_coherent(phi, max_arity)?;
    let vs = phi.v_space();
    let mut f = Family::new(vs.clone(), vs.clone(), 1, Flavor::Plain, max_arity.max(1));
    for n in 1..=max_arity {
        for w in vs.ordered_words(n) {
            let mut value = phi.v().eval(&w);
            for k in 1..n {
                value.add_comb(&phi_of_sum(phi, &pi_t(t, &w[..k]), &w[k..]));
            }
            for (o, c) in value {
                f.insert(&w, o, c)?;
            }
        }
    }
    HomotopyStructure::new(f)
}

/// `l_•(T(v)) - T_•(M_V^Z(v) + Φ-terms)` on every V-word, from the explicit
/// component equations.
pub fn explicit_residuals<S: Scalar>(
    t: &EmbeddingTensor<S>,
    phi: &ActionFamily<S>,
    bound: usize,
) -> Result<BTreeMap<Word, Vector<S>>> {
    t.check_against(phi)?;
    let vs = phi.v_space();
    let l_plain = lie_to_loday(phi.e())?;
    let m_plain = lie_to_loday(phi.v())?;
    let mut out = BTreeMap::new();
    for n in 1..=bound {
        for v in vs.ordered_words(n) {
            let degs = vs.degrees_of(&v);
            let mut acc = compose_through_components(t.family(), &l_plain, &v, &degs);
            let mut rhs = t.eval_sum(&lift_coderivation(m_plain.brackets(), vs, Coalgebra::Zinbiel, &v));
            for k in 2..=n {
                let head = &v[..k - 1];
                let hdegs = &degs[..k - 1];
                for i in 0..=k - 2 {
                    for sigma in shuffles(&[i, k - 1 - i], false).iter() {
                        let word = sigma.apply(head);
                        let outer: i64 = word[..i].iter().map(|&j| vs.degree(j) as i64).sum();
                        let sign = koszul_sign_of(sigma.images(), hdegs) * Sign::pow(outer);
                        for j in i + 1..k {
                            let mut args = word[j..].to_vec();
                            args.push(v[k - 1]);
                            let value = phi_of_sum(phi, &pi_t(t, &word[i..j]), &args);
                            for (a, c) in &value {
                                let w = Word::concat(&[&word[..i], &[*a], &v[k..]]);
                                rhs.add_scaled(&t.eval(&w), &sign.apply(c.clone()));
                            }
                        }
                    }
                }
            }
            acc.sub_comb(&rhs);
            if !acc.is_zero() {
                out.insert(v, acc);
            }
        }
    }
    Ok(out)
}

/// `𝒫`: keep the components of a coderivation of `T^Z(E ⊕ V)` that send
/// pure-V words to E.
fn project_h<S: Scalar>(map: &WordMap<S>, v_words: &[Word], ed: usize) -> BTreeMap<Word, Vector<S>> {
    let mut out = BTreeMap::new();
    for v in v_words {
        let r = e_part(ed, &map.restrict(&embed_v(ed, v)));
        if !r.is_zero() {
            out.insert(v.clone(), r);
        }
    }
    out
}

fn add_into<S: Scalar>(acc: &mut BTreeMap<Word, Vector<S>>, x: BTreeMap<Word, Vector<S>>, c: &S) {
    for (w, v) in x {
        let slot = acc.entry(w.clone()).or_default();
        slot.add_scaled(&v, c);
        if slot.is_zero() {
            acc.remove(&w);
        }
    }
}

/// `𝒫(Σ_{k≥k0} (1/k!) [[X, 𝔱]_c, …, 𝔱]_c)` with the series run until the
/// iterated commutator vanishes on the whole truncation.
fn projected_series<S: Scalar>(
    x: WordMap<S>,
    t: &TruncatedCoderivation<S>,
    v_words: &[Word],
    ed: usize,
    k0: usize,
) -> Result<BTreeMap<Word, Vector<S>>> {
    let bound = x.bound();
    let mut acc = BTreeMap::new();
    let mut term = x;
    for k in 0..=bound + 1 {
        if term.is_zero() {
            return Ok(acc);
        }
        if k == bound + 1 {
            return Err(AlgebraError::Inconsistency(format!(
                "commutator series with 𝔱 has not stabilized after {k} terms"
            )));
        }
        if k >= k0 {
            add_into(&mut acc, project_h(&term, v_words, ed), &S::inv_factorial(k));
        }
        term = term.commutator(t.map())?;
    }
    unreachable!("loop returns")
}

/// `𝒫(e^{[·,𝔱]}Q)` on every V-word, with `Q` the codifferential of the
/// hemisemidirect product.
pub fn mc_residuals<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<BTreeMap<Word, Vector<S>>> {
    t.check_against(phi)?;
    let product = hemisemidirect(phi, product_arity(phi, bound))?;
    let q = product.structure.codifferential(bound);
    let tt = tensor_coderivation(t, bound);
    let v_words = phi.v_space().words_up_to(bound, WordKind::Ordered);
    projected_series(q.into_map(), &tt, &v_words, product.e_dim, 0)
}

fn embedding_report<S: Scalar>(check: &str, vs: &GradedSpace, es: &GradedSpace, bound: usize, r: &BTreeMap<Word, Vector<S>>) -> Report<S> {
    let mut report = Report::new(check, bound);
    for (w, v) in r {
        report.push(Residual::from_vector("embedding", vs, w, es, v));
    }
    report
}

fn explicit_report<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    let r = explicit_residuals(t, phi, bound)?;
    Ok(embedding_report("embedding-explicit", phi.v_space(), phi.e_space(), bound, &r))
}

fn mc_report<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    let r = mc_residuals(t, phi, bound)?;
    Ok(embedding_report("embedding-mc", phi.v_space(), phi.e_space(), bound, &r))
}

/// Requires `Φ` to be a coherent action up to `bound`.
pub fn check_embedding_explicit<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    require_coherent(phi, bound)?;
    explicit_report(t, phi, bound)
}

/// Requires `Φ` to be a coherent action up to `bound`.
pub fn check_embedding_mc<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    require_coherent(phi, bound)?;
    mc_report(t, phi, bound)
}

/// Both routes, run concurrently. Any difference in the residual vectors is
/// an internal inconsistency.
pub fn check_embedding<S: Scalar>(
    t: &EmbeddingTensor<S>,
    phi: &ActionFamily<S>,
    bound: usize,
) -> Result<(Report<S>, Report<S>)> {
    require_coherent(phi, bound)?;
    let (explicit, mc) = thread::scope(|s| {
        let a = s.spawn(|| explicit_report(t, phi, bound));
        let b = s.spawn(|| mc_report(t, phi, bound));
        (a.join().expect("explicit route"), b.join().expect("mc route"))
    });
    let (explicit, mc) = (explicit?, mc?);
    if explicit.residuals != mc.residuals {
        let witness = (0..explicit.residuals.len().max(mc.residuals.len()))
            .find(|&i| explicit.residuals.get(i) != mc.residuals.get(i))
            .and_then(|i| explicit.residuals.get(i).or(mc.residuals.get(i)))
            .map(|r| r.to_string())
            .unwrap_or_default();
        return Err(AlgebraError::Inconsistency(format!(
            "explicit route says {}, MC route says {}: {witness}",
            explicit.verdict(),
            mc.verdict()
        )));
    }
    Ok((explicit, mc))
}

/// `T` as a Loday∞-morphism from the descendent structure to `E`.
pub fn check_descendent_morphism<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    let desc = descendent(t, phi, bound)?;
    let target = lie_to_loday(phi.e())?;
    let mut r = check_loday_morphism(t.family(), &desc, &target, bound)?;
    r.check = "descendent-morphism".into();
    Ok(r)
}

fn render_sum<S: Scalar>(space: &GradedSpace, x: &WordSum<S>) -> Vec<(String, S)> {
    x.iter().map(|(w, c)| (format!("[{}]", space.render(w)), c.clone())).collect()
}

fn render_tensor2<S: Scalar>(space: &GradedSpace, x: &Tensor2<S>) -> Vec<(String, S)> {
    x.iter()
        .map(|((a, b), c)| (format!("[{}]|[{}]", space.render(a), space.render(b)), c.clone()))
        .collect()
}

/// `X = p_{T(V)} Q e^𝔱` restricted to `T(V)`, as a map on V-words.
pub fn restricted_codifferential<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<WordMap<S>> {
    t.check_against(phi)?;
    let product = hemisemidirect(phi, product_arity(phi, bound))?;
    let sum = product.space().clone();
    let ed = product.e_dim;
    let exp = exp_restriction(t, Sign::from_odd(false));
    let vs = phi.v_space().clone();
    Ok(WordMap::tabulate(vs.clone(), vs, Coalgebra::Zinbiel, bound, 1, |v| {
        let lifted = lift_comorphism(&exp, &sum, &sum, Coalgebra::Zinbiel, &embed_v(ed, v));
        let mut out = WordSum::new();
        for (w, c) in &lifted {
            for (u, d) in &lift_coderivation(product.structure.brackets(), &sum, Coalgebra::Zinbiel, w) {
                if let Some(pv) = pure_v(ed, u) {
                    out.add_term(pv, c.clone() * d.clone());
                }
            }
        }
        out
    }))
}

/// `X` is a coderivation of `T^Z(V)` and equals the Zinbiel lift of the
/// descendent brackets.
pub fn restriction_lemma_check<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    let vs = phi.v_space();
    let x = restricted_codifferential(t, phi, bound)?;
    let mut report = Report::new("restriction-lemma", bound);
    for (w, d) in x.coderivation_defects() {
        report.push(Residual::new("co-leibniz", w.len(), vs.render(&w), render_tensor2(vs, &d)));
    }
    let desc = descendent(t, phi, bound)?;
    let lifted = TruncatedCoderivation::lift(desc.brackets(), vs.clone(), Coalgebra::Zinbiel, bound);
    for (w, d) in x.difference(lifted.map()) {
        report.push(Residual::new("descendent-formula", w.len(), vs.render(&w), render_sum(vs, &d)));
    }
    Ok(report)
}

/// For symmetric `T` with `π(Im T) ⊆ ker Φ`, the symmetric comorphism is a
/// Lie∞-morphism `V → E`. Errors if the hypotheses fail.
pub fn symmetric_morphism_check<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    t.check_against(phi)?;
    if !t.is_symmetric() {
        return Err(AlgebraError::Precondition("T is not symmetric".into()));
    }
    let vs = phi.v_space();
    for n in 1..bound {
        for w in vs.ordered_words(n) {
            let image = pi_t(t, &w);
            for m in 1..=bound - n {
                for args in vs.ordered_words(m) {
                    if !phi_of_sum(phi, &image, &args).is_zero() {
                        return Err(AlgebraError::Precondition(format!(
                            "πT([{}]) acts nontrivially on [{}]",
                            vs.render(&w),
                            vs.render(&args)
                        )));
                    }
                }
            }
        }
    }
    let mut r = check_lie_morphism(&t.family().to_symmetric()?, phi.v(), phi.e(), bound)?;
    r.check = "symmetric-morphism".into();
    Ok(r)
}

fn check_unary_shape<S: Scalar>(t1: &MultiMap<S>) -> Result<()> {
    if t1.arity() != 1 {
        return Err(AlgebraError::ArityMismatch { expected: 1, got: t1.arity() });
    }
    if t1.degree() != 0 {
        return Err(AlgebraError::DegreeMismatch(format!("strict tensors need degree 0, got {}", t1.degree())));
    }
    Ok(())
}

fn check_endo<S: Scalar>(e: &HomotopyStructure<S>, t1: &MultiMap<S>) -> Result<()> {
    check_unary_shape(t1)?;
    if t1.source() != e.space() || t1.target() != e.space() {
        return Err(AlgebraError::SpaceMismatch { expected: e.space().name().to_string(), got: t1.source().name().to_string() });
    }
    Ok(())
}

fn basis_vector<S: Scalar>(i: usize) -> Vector<S> {
    Vector::single(i, S::one())
}

/// `l_1 T = T l_1` and `l_n(Tx_1, …, Tx_n) = T l_n(Tx_1, …, Tx_{n-1}, x_n)`
/// on basis words, for all arities of `e`.
pub fn adjoint_strict_check<S: Scalar>(e: &HomotopyStructure<S>, t1: &MultiMap<S>) -> Result<Report<S>> {
    check_endo(e, t1)?;
    let space = e.space();
    let tv = |v: &Vector<S>| t1.eval_vectors(std::slice::from_ref(v));
    let mut report = Report::new("adjoint-strict", e.max_arity());
    for i in 0..space.dim() {
        let x = basis_vector::<S>(i);
        let r = e.brackets().eval_vectors(&[tv(&x)]).minus(&tv(&e.eval(&[i])));
        if !r.is_zero() {
            report.push(Residual::from_vector("strict-chain", space, &[i], space, &r));
        }
    }
    for n in 2..=e.max_arity() {
        for prefix in space.sorted_words(n - 1) {
            let images: Vec<Vector<S>> = prefix.iter().map(|&i| tv(&basis_vector(i))).collect();
            for last in 0..space.dim() {
                let mut all = images.clone();
                all.push(tv(&basis_vector(last)));
                let lhs = e.brackets().eval_vectors(&all);
                let mut mixed = images.clone();
                mixed.push(basis_vector(last));
                let rhs = tv(&e.brackets().eval_vectors(&mixed));
                let r = lhs.minus(&rhs);
                if !r.is_zero() {
                    let w = Word::concat(&[&prefix, &[last]]);
                    report.push(Residual::from_vector("strict-adjoint", space, &w, space, &r));
                }
            }
        }
    }
    Ok(report)
}

/// `a ∘ b` for unary maps.
pub fn compose_unary<S: Scalar>(a: &MultiMap<S>, b: &MultiMap<S>) -> Result<MultiMap<S>> {
    check_unary_shape(a)?;
    check_unary_shape(b)?;
    if b.target() != a.source() {
        return Err(AlgebraError::SpaceMismatch { expected: a.source().name().to_string(), got: b.target().name().to_string() });
    }
    let mut out = MultiMap::zero(b.source().clone(), a.target().clone(), 1, 0, Flavor::Plain);
    for j in 0..b.source().dim() {
        for (i, c) in a.eval_vectors(&[b.eval(&[j])]) {
            out.insert(&[j], i, c)?;
        }
    }
    Ok(out)
}

pub fn identity_unary<S: Scalar>(space: &Space) -> MultiMap<S> {
    let mut out = MultiMap::zero(space.clone(), space.clone(), 1, 0, Flavor::Plain);
    for i in 0..space.dim() {
        out.insert(&[i], i, S::one()).expect("degree-preserving");
    }
    out
}

fn same_unary<S: Scalar>(a: &MultiMap<S>, b: &MultiMap<S>) -> bool {
    (0..a.source().dim()).all(|i| a.eval(&[i]) == b.eval(&[i]))
}

/// Strict check of `a ∘ b`, plus `id ∘ a = a = a ∘ id`. Both inputs must
/// pass [`adjoint_strict_check`].
pub fn strict_algebra_compose<S: Scalar>(e: &HomotopyStructure<S>, a: &MultiMap<S>, b: &MultiMap<S>) -> Result<Report<S>> {
    for (name, m) in [("left", a), ("right", b)] {
        let r = adjoint_strict_check(e, m)?;
        if !r.passed() {
            return Err(AlgebraError::Precondition(format!("{name} factor is not strict: {}", r.residuals[0])));
        }
    }
    let c = compose_unary(a, b)?;
    let mut report = adjoint_strict_check(e, &c)?;
    report.check = "strict-compose".into();
    let id = identity_unary(e.space());
    for (name, m) in [("left", a), ("right", b)] {
        if !same_unary(&compose_unary(&id, m)?, m) || !same_unary(&compose_unary(m, &id)?, m) {
            report.push(Residual::new("unit", 1, name, Vec::new()));
        }
    }
    Ok(report)
}

/// Linear conditions defining the centroid, as (key, vector) pairs.
fn centroid_defects<S: Scalar>(e: &HomotopyStructure<S>, f: &MultiMap<S>, bound: usize) -> Vec<(String, usize, Word, Vector<S>)> {
    let space = e.space();
    let fv = |v: &Vector<S>| f.eval_vectors(std::slice::from_ref(v));
    let mut out = Vec::new();
    for i in 0..space.dim() {
        let r = e.brackets().eval_vectors(&[f.eval(&[i])]).minus(&fv(&e.eval(&[i])));
        if !r.is_zero() {
            out.push(("centroid-chain".to_string(), 1, Word::single(i), r));
        }
    }
    let top = e.max_arity().min(bound);
    for n in 1..top {
        for x in space.sorted_words(n) {
            for y in 0..space.dim() {
                let mut args: Vec<Vector<S>> = x.iter().map(|&i| basis_vector(i)).collect();
                args.push(f.eval(&[y]));
                let lhs = e.brackets().eval_vectors(&args);
                let rhs = fv(&e.eval(&Word::concat(&[&x, &[y]])));
                let r = lhs.minus(&rhs);
                if !r.is_zero() {
                    out.push(("centroid-ad".to_string(), n + 1, Word::concat(&[&x, &[y]]), r));
                }
            }
        }
    }
    out
}

/// `l_1 F = F l_1` and `ad_x F = F ad_x` for `x ∈ S̄(E)` of length below
/// `bound`. A member of the centroid must also pass the strict check.
pub fn centroid_check<S: Scalar>(e: &HomotopyStructure<S>, f: &MultiMap<S>, bound: usize) -> Result<Report<S>> {
    check_endo(e, f)?;
    let space = e.space();
    let mut report = Report::new("centroid", bound);
    for (cond, weight, w, r) in centroid_defects(e, f, bound) {
        report.push(Residual::from_vector(&cond, space, &w, space, &r).with_weight(weight));
    }
    if report.passed() {
        let strict = adjoint_strict_check(e, f)?;
        if !strict.passed() {
            return Err(AlgebraError::Inconsistency(format!(
                "centroid member fails the strict check: {}",
                strict.residuals[0]
            )));
        }
        report.note("strict: verified");
    }
    Ok(report)
}

/// A basis of the centroid, by exact nullspace of its linear conditions.
pub fn centroid_basis<S: Scalar>(e: &HomotopyStructure<S>, bound: usize) -> Vec<MultiMap<S>> {
    let space = e.space();
    let n = space.dim();
    let unknowns: Vec<(usize, usize)> =
        (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).filter(|&(i, j)| space.degree(i) == space.degree(j)).collect();
    let elementary = |(i, j): (usize, usize)| {
        let mut m = MultiMap::zero(space.clone(), space.clone(), 1, 0, Flavor::Plain);
        m.insert(&[j], i, S::one()).expect("degree-preserving");
        m
    };
    let mut rows: BTreeMap<(String, Word, usize), Vec<S>> = BTreeMap::new();
    for (col, &u) in unknowns.iter().enumerate() {
        for (cond, _, w, r) in centroid_defects(e, &elementary(u), bound) {
            for (o, c) in r {
                rows.entry((cond.clone(), w.clone(), o)).or_insert_with(|| vec![S::zero(); unknowns.len()])[col] = c;
            }
        }
    }
    let rows: Vec<Vec<S>> = rows.into_values().collect();
    nullspace(&rows, unknowns.len())
        .into_iter()
        .map(|v| {
            let mut m = MultiMap::zero(space.clone(), space.clone(), 1, 0, Flavor::Plain);
            for (c, &(i, j)) in v.into_iter().zip(&unknowns) {
                if !c.is_zero() {
                    m.insert(&[j], i, c).expect("degree-preserving");
                }
            }
            m
        })
        .collect()
}

/// Basis element of `𝔥`: the map sending the V-word `word` to `e`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HBasis {
    pub word: Word,
    pub e: usize,
}

/// Ranks of `∂_1^T` around one bigraded piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyRank {
    pub degree: i64,
    pub weight: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub kernel: usize,
    pub cohomology: usize,
}

/// `Q^T = e^{-𝔱} ∘ Q ∘ e^{𝔱}` on the truncated product coalgebra.
fn conjugated_codifferential<S: Scalar>(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<WordMap<S>> {
    let product = hemisemidirect(phi, product_arity(phi, bound))?;
    let q = product.structure.codifferential(bound);
    retract_tensor(t, bound)?.map().compose(&q.map().compose(extend_tensor(t, bound)?.map())?)
}

/// `∂_1^T = 𝒫[Q^T, ·]_c` on `𝔥_{≤N}` for a verified embedding tensor `T`, the quotient of `𝔥` by maps that
/// vanish on words of length at most N. Bigraded by (map degree, length).
#[derive(Clone, Debug)]
pub struct DeformationComplex<S: Scalar> {
    bound: usize,
    tensor: EmbeddingTensor<S>,
    phi: ActionFamily<S>,
    qt: WordMap<S>,
    basis: Vec<HBasis>,
    degrees: Vec<i64>,
    index: HashMap<HBasis, usize>,
    /// `matrix[row][col]`: coefficient of basis `row` in `∂_1^T(basis col)`.
    matrix: Vec<Vec<S>>,
}

impl<S: Scalar> DeformationComplex<S> {
    pub fn new(t: &EmbeddingTensor<S>, phi: &ActionFamily<S>, bound: usize) -> Result<Self> {
        t.check_against(phi)?;
        require_coherent(phi, bound)?;
        if let Some((w, _)) = explicit_residuals(t, phi, bound)?.into_iter().next() {
            return Err(AlgebraError::Precondition(format!(
                "T is not an embedding tensor up to weight {bound}: fails on [{}]",
                phi.v_space().render(&w)
            )));
        }
        let qt = conjugated_codifferential(t, phi, bound)?;
        let (vs, es) = (phi.v_space(), phi.e_space());
        let mut basis = Vec::new();
        for w in vs.words_up_to(bound, WordKind::Ordered) {
            for e in 0..es.dim() {
                basis.push(HBasis { word: w.clone(), e });
            }
        }
        let degrees = basis.iter().map(|b| es.degree(b.e) as i64 - vs.word_degree(&b.word)).collect();
        let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let mut out = DeformationComplex {
            bound,
            tensor: t.clone(),
            phi: phi.clone(),
            qt,
            basis,
            degrees,
            index,
            matrix: Vec::new(),
        };
        let n = out.basis.len();
        let mut matrix = vec![vec![S::zero(); n]; n];
        for col in 0..n {
            for (w, v) in out.differential_of_basis(col) {
                for (e, c) in v {
                    matrix[out.index[&HBasis { word: w.clone(), e }]][col] = c;
                }
            }
        }
        out.matrix = matrix;
        Ok(out)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn basis(&self) -> &[HBasis] {
        &self.basis
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.matrix
    }

    /// `Q^T = e^{-𝔱} Q e^𝔱` on `T^Z(E ⊕ V)`.
    pub fn twisted_codifferential(&self) -> &WordMap<S> {
        &self.qt
    }

    fn ed(&self) -> usize {
        self.phi.e_space().dim()
    }

    fn v_words(&self) -> Vec<Word> {
        self.phi.v_space().words_up_to(self.bound, WordKind::Ordered)
    }

    /// `𝒫[Q^T, b]_c` for `b ∈ 𝔥` of map degree `degree`, given by its
    /// restriction on `E ⊕ V`.
    fn bracket_with_qt(&self, b: &dyn Restriction<S>) -> BTreeMap<Word, Vector<S>> {
        let ed = self.ed();
        let sum = self.qt.source().clone();
        let sign = Sign::pow(b.degree() as i64);
        let mut out = BTreeMap::new();
        for v in self.v_words() {
            let ve = embed_v(ed, &v);
            let inner = lift_coderivation(b, &sum, Coalgebra::Zinbiel, &ve);
            let mut acc = e_part(ed, &crate::coalgebra::project(&self.qt.apply_sum(&inner)));
            for (w, c) in &self.qt.apply(&ve) {
                acc.add_scaled(&b.restrict(w), &sign.apply(-c.clone()));
            }
            if !acc.is_zero() {
                out.insert(v, acc);
            }
        }
        out
    }

    fn differential_of_basis(&self, col: usize) -> BTreeMap<Word, Vector<S>> {
        let ed = self.ed();
        let HBasis { word, e } = self.basis[col].clone();
        let target = embed_v(ed, &word);
        let r = FnRestriction::new(self.degrees[col] as i32, move |w: &[usize]| {
            if w == target.as_ref() {
                Vector::single(e, S::one())
            } else {
                Vector::new()
            }
        });
        self.bracket_with_qt(&r)
    }

    /// Nonzero entries of `(∂_1^T)^2`.
    pub fn square_check(&self) -> Report<S> {
        let n = self.basis.len();
        let sq = mat_mul(&self.matrix, &self.matrix, n);
        let mut report = Report::new("deformation-square", self.bound);
        for col in 0..n {
            let out: Vec<(String, S)> = (0..n)
                .filter(|&row| !sq[row][col].is_zero())
                .map(|row| (self.render_basis(row), sq[row][col].clone()))
                .collect();
            if !out.is_empty() {
                report.push(Residual::new("d-squared", self.basis[col].word.len(), self.render_basis(col), out));
            }
        }
        report
    }

    pub fn render_basis(&self, i: usize) -> String {
        let b = &self.basis[i];
        format!("{}>{}", self.phi.v_space().render(&b.word), self.phi.e_space().symbol(b.e))
    }

    /// `Σ_{k≥1} (1/k!) 𝒫[[Q^T, 𝔱'], …, 𝔱']`: the MC expression of `𝔥^T` at `T'`.
    pub fn twisted_mc(&self, t_prime: &EmbeddingTensor<S>) -> Result<BTreeMap<Word, Vector<S>>> {
        t_prime.check_against(&self.phi)?;
        let tt = tensor_coderivation(t_prime, self.bound);
        projected_series(self.qt.clone(), &tt, &self.v_words(), self.ed(), 1)
    }

    /// MC of `𝔥^T` at `T'`, compared with the explicit equations for `T + T'`.
    pub fn mc_check(&self, t_prime: &EmbeddingTensor<S>) -> Result<Report<S>> {
        let twisted = self.twisted_mc(t_prime)?;
        let direct = explicit_residuals(&self.tensor.add(t_prime)?, &self.phi, self.bound)?;
        if twisted != direct {
            let w = twisted.keys().chain(direct.keys()).find(|w| twisted.get(*w) != direct.get(*w)).expect("maps differ");
            return Err(AlgebraError::Inconsistency(format!(
                "MC of the twisted complex and the explicit check of T+T' differ on [{}]",
                self.phi.v_space().render(w)
            )));
        }
        Ok(embedding_report("deformation-mc", self.phi.v_space(), self.phi.e_space(), self.bound, &twisted))
    }

    fn piece(&self, degree: i64, weight: usize) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.degrees[i] == degree && self.basis[i].word.len() <= weight).collect()
    }

    fn block_rank(&self, rows: &[usize], cols: &[usize]) -> usize {
        let m: Vec<Vec<S>> = rows.iter().map(|&r| cols.iter().map(|&c| self.matrix[r][c].clone()).collect()).collect();
        rank(&m, cols.len())
    }

    /// Exact ranks of `∂_1^T` into and out of the piece of map degree
    /// `degree` on words of length at most `weight`.
    pub fn cohomology_rank(&self, degree: i64, weight: usize) -> Result<CohomologyRank> {
        if weight > self.bound {
            return Err(AlgebraError::BoundMismatch(weight, self.bound));
        }
        let here = self.piece(degree, weight);
        let below = self.piece(degree - 1, weight);
        let above = self.piece(degree + 1, weight);
        let rank_in = self.block_rank(&here, &below);
        let rank_out = self.block_rank(&above, &here);
        let dim = here.len();
        let kernel = dim - rank_out;
        Ok(CohomologyRank { degree, weight, dim, rank_in, rank_out, kernel, cohomology: kernel - rank_in })
    }

    /// Every nonempty degree at `weight`, computed concurrently.
    pub fn cohomology_table(&self, weight: usize) -> Result<Vec<CohomologyRank>> {
        let mut degrees: Vec<i64> = self.degrees.clone();
        degrees.sort_unstable();
        degrees.dedup();
        let results: Vec<Result<CohomologyRank>> = thread::scope(|s| {
            let handles: Vec<_> = degrees.iter().map(|&d| s.spawn(move || self.cohomology_rank(d, weight))).collect();
            handles.into_iter().map(|h| h.join().expect("cohomology thread")).collect()
        });
        results.into_iter().filter(|r| !matches!(r, Ok(c) if c.dim == 0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionFamily;
    use crate::homotopy::{check_loday_infinity, tests::two_dim};
    use crate::Q;
    use std::sync::Arc;

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    fn heisenberg() -> (ActionFamily<Q>, EmbeddingTensor<Q>) {
        let v = Arc::new(GradedSpace::new("V", [("p", -1), ("q", -1), ("z", -1)]).unwrap());
        let mut m = Family::new(v.clone(), v.clone(), 1, Flavor::Symmetric, 2);
        m.insert(&[0, 1], 2, q(1)).unwrap();
        let e = Arc::new(GradedSpace::new("E", [("x", -1)]).unwrap());
        let le = HomotopyStructure::abelian(e.clone(), Flavor::Symmetric, 2);
        let mut phi = ActionFamily::new(le, HomotopyStructure::new(m).unwrap()).unwrap();
        phi.insert(&[0], &[0], 2, q(1)).unwrap();
        let mut t = EmbeddingTensor::new(v, e, 1);
        t.insert(&[0], 0, q(1)).unwrap();
        (phi, t)
    }

    fn adjoint_identity() -> (ActionFamily<Q>, EmbeddingTensor<Q>) {
        let l = two_dim();
        let t = EmbeddingTensor::identity(l.space().clone());
        (ActionFamily::adjoint_representation(l).unwrap(), t)
    }

    #[test]
    fn heisenberg_descendent_products() {
        let (phi, t) = heisenberg();
        let d = descendent(&t, &phi, 3).unwrap();
        let (p, qq, z) = (0, 1, 2);
        assert_eq!(d.eval(&[p, qq]), Vector::single(z, q(1)));
        assert_eq!(d.eval(&[p, p]), Vector::single(z, q(1)));
        assert_eq!(d.eval(&[qq, p]), Vector::single(z, q(-1)));
        assert!(check_loday_infinity(&d, 4).unwrap().passed());
    }

    #[test]
    fn heisenberg_is_a_tensor() {
        let (phi, t) = heisenberg();
        let (a, b) = check_embedding(&t, &phi, 4).unwrap();
        assert!(a.passed() && b.passed());
        assert!(check_descendent_morphism(&t, &phi, 4).unwrap().passed());
        assert!(restriction_lemma_check(&t, &phi, 4).unwrap().passed());
        // T(z) = x breaks it, on both routes
        let mut bad = t.clone();
        bad.insert(&[2], 0, q(1)).unwrap();
        let (a, b) = check_embedding(&bad, &phi, 3).unwrap();
        assert!(!a.passed());
        assert_eq!(a.support(), b.support());
        assert!(restriction_lemma_check(&bad, &phi, 3).unwrap().passed());
    }

    #[test]
    fn identity_on_adjoint() {
        let (phi, t) = adjoint_identity();
        let (a, _) = check_embedding(&t, &phi, 4).unwrap();
        assert!(a.passed());
        let d = descendent(&t, &phi, phi.e().max_arity()).unwrap();
        assert!(d.brackets().same_values(phi.e().brackets(), 3));
        assert!(check_descendent_morphism(&t, &phi, 4).unwrap().passed());
    }

    #[test]
    fn zero_tensor() {
        let (phi, t) = heisenberg();
        let zero = t.scale(&q(0));
        let (a, b) = check_embedding(&zero, &phi, 3).unwrap();
        assert!(a.passed() && b.passed());
        let d = descendent(&zero, &phi, 2).unwrap();
        assert!(d.brackets().same_values(phi.v().brackets(), 2));
        let e = extend_tensor(&zero, 3).unwrap();
        let sum = product_space(phi.e_space(), phi.v_space());
        assert_eq!(*e.map(), WordMap::identity(sum, Coalgebra::Zinbiel, 3));
    }

    /// `E = ⟨x, y⟩` abelian in degrees −1, 0 acting on `V = ⟨p, u⟩` (degrees
    /// −1, 0, no brackets) by `Φ(x; p) = p`, with a non-strict `T`.
    fn mixed() -> (ActionFamily<Q>, EmbeddingTensor<Q>) {
        let v = Arc::new(GradedSpace::new("V", [("p", -1), ("u", 0)]).unwrap());
        let e = Arc::new(GradedSpace::new("E", [("x", -1), ("y", 0)]).unwrap());
        let mut phi = ActionFamily::new(
            HomotopyStructure::abelian(e.clone(), Flavor::Symmetric, 2),
            HomotopyStructure::abelian(v.clone(), Flavor::Symmetric, 2),
        )
        .unwrap();
        phi.insert(&[0], &[0], 0, q(1)).unwrap();
        let mut t = EmbeddingTensor::new(v, e, 2);
        t.insert(&[0], 0, q(1)).unwrap();
        t.insert(&[1], 1, q(-1)).unwrap();
        t.insert(&[0, 1], 0, q(3)).unwrap();
        t.insert(&[1, 1], 1, Q::frac(1, 2)).unwrap();
        (phi, t)
    }

    #[test]
    fn exponential_restrictions() {
        let (phi, t) = mixed();
        let e = extend_tensor(&t, 3).unwrap();
        let ed = 2;
        assert_eq!(e.restrict(&embed_v(ed, &[0, 1])), Vector::single(0, q(3)));
        assert_eq!(e.restrict(&embed_v(ed, &[0])), {
            let mut v = Vector::single(2, q(1));
            v.add_term(0, q(1));
            v
        });
        assert_eq!(e.restrict(&[0, 1]), Vector::new());
        assert!(e.comorphism_defects().is_empty());
        // e^{-t} e^{t} = Id
        let back = retract_tensor(&t, 3).unwrap().compose(&e).unwrap();
        assert_eq!(*back.map(), WordMap::identity(product_space(phi.e_space(), phi.v_space()), Coalgebra::Zinbiel, 3));
    }

    #[test]
    fn conjugation_matches_series() {
        let (phi, t) = mixed();
        let qt = conjugated_codifferential(&t, &phi, 3).unwrap();
        let ed = phi.e_space().dim();
        let v_words = phi.v_space().words_up_to(3, WordKind::Ordered);
        let conj = project_h(&qt, &v_words, ed);
        assert_eq!(conj, mc_residuals(&t, &phi, 3).unwrap());
        assert_eq!(conj, explicit_residuals(&t, &phi, 3).unwrap());
        assert!(matches!(DeformationComplex::new(&t, &phi, 3), Err(AlgebraError::Precondition(_))));
    }

    #[test]
    fn deformation_heisenberg() {
        let (phi, t) = heisenberg();
        let c = DeformationComplex::new(&t, &phi, 3).unwrap();
        assert!(c.square_check().passed());
        assert!(c.twisted_mc(&t.scale(&q(0))).unwrap().is_empty());
        for k in [-2, -1, 1, 2] {
            let tp = t.scale(&Q::frac(k, 2));
            assert!(c.mc_check(&tp).unwrap().passed());
        }
        let mut tp = EmbeddingTensor::new(phi.v_space().clone(), phi.e_space().clone(), 1);
        tp.insert(&[2], 0, Q::frac(1, 2)).unwrap();
        assert!(!c.mc_check(&tp).unwrap().passed());
        for r in c.cohomology_table(2).unwrap() {
            assert_eq!(r.rank_out + r.kernel, r.dim);
        }
    }

    #[test]
    fn strict_adjoint_and_centroid() {
        let l = two_dim();
        let id = identity_unary(l.space());
        assert!(adjoint_strict_check(&l, &id).unwrap().passed());
        let zero = MultiMap::zero(l.space().clone(), l.space().clone(), 1, 0, Flavor::Plain);
        assert!(adjoint_strict_check(&l, &zero).unwrap().passed());
        assert!(centroid_check(&l, &id, 3).unwrap().passed());
        let basis = centroid_basis(&l, 3);
        assert!(!basis.is_empty());
        for f in &basis {
            assert!(centroid_check(&l, f, 3).unwrap().passed());
        }
        // projection onto ⟨a⟩ is not in the centroid
        let mut proj = MultiMap::zero(l.space().clone(), l.space().clone(), 1, 0, Flavor::Plain);
        proj.insert(&[0], 0, q(1)).unwrap();
        assert!(!centroid_check(&l, &proj, 3).unwrap().passed());
        assert!(strict_algebra_compose(&l, &id, &id).unwrap().passed());
    }
}
