//! Lie∞-actions `Φ: E → Coder(S̄V)[1]`, coherence, and the hemisemidirect
//! product on `E ⊕ V`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::thread;

use crate::coalgebra::{lift_coderivation, Coalgebra, TruncatedCoderivation};
use crate::error::{AlgebraError, Result};
use crate::graded::{koszul_sign_of, shuffles, symmetric_normal_form, GradedSpace, Word};
use crate::homotopy::{check_loday_infinity, EndDgla, HomotopyStructure};
use crate::multimap::{expand_words, Family, Flavor, FnRestriction, Restriction, Space, Vector, WordSum};
use crate::report::{render_vector, Report, Residual};
use crate::scalar::{Scalar, Sign};

/// The maps `Φ^{k,n}: S^k(E) × S^n(V) → V` of degree `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionFamily<S: Scalar> {
    e: HomotopyStructure<S>,
    v: HomotopyStructure<S>,
    comps: BTreeMap<(Word, Word), Vector<S>>,
}

impl<S: Scalar> ActionFamily<S> {
    pub fn new(e: HomotopyStructure<S>, v: HomotopyStructure<S>) -> Result<Self> {
        if e.flavor() != Flavor::Symmetric || v.flavor() != Flavor::Symmetric {
            return Err(AlgebraError::FlavorMismatch("actions need symmetric structures on E and V".into()));
        }
        Ok(ActionFamily { e, v, comps: BTreeMap::new() })
    }

    pub fn e(&self) -> &HomotopyStructure<S> {
        &self.e
    }

    pub fn v(&self) -> &HomotopyStructure<S> {
        &self.v
    }

    pub fn e_space(&self) -> &Space {
        self.e.space()
    }

    pub fn v_space(&self) -> &Space {
        self.v.space()
    }

    /// Stored constants keyed by canonically sorted `(x, w)`.
    pub fn components(&self) -> &BTreeMap<(Word, Word), Vector<S>> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Largest `k + n` with a nonzero `Φ^{k,n}`.
    pub fn max_total_arity(&self) -> usize {
        self.comps.keys().map(|(x, w)| x.len() + w.len()).max().unwrap_or(0)
    }

    fn check_entry(&self, x: &[usize], w: &[usize], out: usize) -> Result<()> {
        if x.is_empty() || w.is_empty() {
            return Err(AlgebraError::ZeroArity);
        }
        let (es, vs) = (self.e_space(), self.v_space());
        for &i in x {
            es.check_index(i)?;
        }
        for &j in w {
            vs.check_index(j)?;
        }
        vs.check_index(out)?;
        let want = es.word_degree(x) + vs.word_degree(w) + 1;
        if want != vs.degree(out) as i64 {
            return Err(AlgebraError::DegreeMismatch(format!(
                "Φ({} ; {}) -> {} needs output degree {want}",
                es.render(x),
                vs.render(w),
                vs.symbol(out)
            )));
        }
        Ok(())
    }

    /// Add `c·out` to `Φ(x; w)`; both words must be canonical.
    pub fn insert(&mut self, x: &[usize], w: &[usize], out: usize, c: S) -> Result<()> {
        self.check_entry(x, w, out)?;
        for (space, word) in [(self.e_space(), x), (self.v_space(), w)] {
            match symmetric_normal_form(space, word) {
                None => return Err(AlgebraError::RepeatedOddLetter(space.render(word))),
                Some((sorted, _)) if sorted.as_ref() != word => return Err(AlgebraError::NonCanonicalKey(space.render(word))),
                Some(_) => {}
            }
        }
        self.add_raw(Word::from(x), Word::from(w), out, c);
        Ok(())
    }

    /// Like [`insert`](Self::insert) but sorts both words, applying signs.
    pub fn insert_normalized(&mut self, x: &[usize], w: &[usize], out: usize, c: S) -> Result<()> {
        self.check_entry(x, w, out)?;
        let (Some((xs, sx)), Some((ws, sw))) =
            (symmetric_normal_form(self.e_space(), x), symmetric_normal_form(self.v_space(), w))
        else {
            return Ok(());
        };
        self.add_raw(xs, ws, out, (sx * sw).apply(c));
        Ok(())
    }

    fn add_raw(&mut self, x: Word, w: Word, out: usize, c: S) {
        let key = (x, w);
        let entry = self.comps.entry(key.clone()).or_default();
        entry.add_term(out, c);
        if entry.is_zero() {
            self.comps.remove(&key);
        }
    }

    /// `Φ(x; w)` on arbitrary (unsorted) words.
    pub fn eval(&self, x: &[usize], w: &[usize]) -> Vector<S> {
        let (Some((xs, sx)), Some((ws, sw))) =
            (symmetric_normal_form(self.e_space(), x), symmetric_normal_form(self.v_space(), w))
        else {
            return Vector::new();
        };
        match self.comps.get(&(xs, ws)) {
            Some(v) => v.signed(sx * sw),
            None => Vector::new(),
        }
    }

    /// `Φ(x_1, …, x_k; w)` with vector arguments in the E slots.
    pub fn eval_e_vectors(&self, xs: &[Vector<S>], w: &[usize]) -> Vector<S> {
        let mut out = Vector::new();
        expand_words(xs, &mut |x, c| out.add_scaled(&self.eval(x, w), c));
        out
    }

    /// The adjoint action of a Lie[1]∞ algebra on itself:
    /// `Φ^{k,i}(x; e) = l_{k+i}(x, e)`.
    pub fn adjoint(e: HomotopyStructure<S>) -> Result<Self> {
        let mut out = ActionFamily::new(e.clone(), e.clone())?;
        let space = e.space().clone();
        for total in 2..=e.max_arity() {
            for word in space.ordered_words(total) {
                for k in 1..total {
                    let (x, w) = word.split_at(k);
                    if x.windows(2).any(|p| p[0] > p[1]) || w.windows(2).any(|p| p[0] > p[1]) {
                        continue;
                    }
                    if symmetric_normal_form(&space, x).is_none() || symmetric_normal_form(&space, w).is_none() {
                        continue;
                    }
                    for (o, c) in e.eval(&word) {
                        out.insert(x, w, o, c)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The adjoint representation: `V = (E, l_1)` with `Φ^{k,1}(x; e) = l_{k+1}(x, e)`
    /// and no components with two or more V-slots.
    pub fn adjoint_representation(e: HomotopyStructure<S>) -> Result<Self> {
        let space = e.space().clone();
        let mut d = Family::new(space.clone(), space.clone(), 1, Flavor::Symmetric, 1);
        for i in 0..space.dim() {
            for (o, c) in e.eval(&[i]) {
                d.insert(&[i], o, c)?;
            }
        }
        let mut out = ActionFamily::new(e.clone(), HomotopyStructure::new(d)?)?;
        for k in 1..e.max_arity() {
            for x in space.sorted_words(k) {
                for last in 0..space.dim() {
                    for (o, c) in e.eval(&Word::concat(&[&x, &[last]])) {
                        out.insert(&x, &[last], o, c)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Restrictions of `Φ_x`: `w ↦ Φ(x; w)`, of map degree `|x| + 1`.
    pub fn phi_restriction<'a>(&'a self, x: &'a [usize]) -> impl Restriction<S> + 'a {
        let deg = self.e_space().word_degree(x) as i32 + 1;
        FnRestriction::new(deg, move |w: &[usize]| self.eval(x, w))
    }

    /// Restrictions of `ad_v`: `w ↦ m(v·w)`.
    pub fn ad_restriction<'a>(&'a self, v: &'a [usize]) -> impl Restriction<S> + 'a {
        let deg = self.v_space().word_degree(v) as i32 + 1;
        FnRestriction::new(deg, move |w: &[usize]| self.v.eval(&Word::concat(&[v, w])))
    }

    /// Restrictions of `Φ_{x;v}`: `w ↦ Φ(x; v·w)`.
    pub fn mixed_restriction<'a>(&'a self, x: &'a [usize], v: &'a [usize]) -> impl Restriction<S> + 'a {
        let deg = (self.e_space().word_degree(x) + self.v_space().word_degree(v)) as i32 + 1;
        FnRestriction::new(deg, move |w: &[usize]| self.eval(x, &Word::concat(&[v, w])))
    }

    /// `Φ_x` as a coderivation of `S̄(V)` truncated at `bound`.
    pub fn phi_of(&self, x: &[usize], bound: usize) -> TruncatedCoderivation<S> {
        TruncatedCoderivation::lift(&self.phi_restriction(x), self.v_space().clone(), Coalgebra::Symmetric, bound)
    }

    pub fn ad_of(&self, v: &[usize], bound: usize) -> TruncatedCoderivation<S> {
        TruncatedCoderivation::lift(&self.ad_restriction(v), self.v_space().clone(), Coalgebra::Symmetric, bound)
    }

    /// `Φ_{x;v}`; `v` must be nonempty.
    pub fn phi_mixed(&self, x: &[usize], v: &[usize], bound: usize) -> Result<TruncatedCoderivation<S>> {
        if v.is_empty() {
            return Err(AlgebraError::Precondition("Φ_{x;v} needs a nonempty V-word".into()));
        }
        Ok(TruncatedCoderivation::lift(&self.mixed_restriction(x, v), self.v_space().clone(), Coalgebra::Symmetric, bound))
    }

    /// `Φ_k` as a family `S^k(E) → End(V)[1]` of degree 0. Needs
    /// `Φ^{•,≥2} = 0`; `dgla` must be built on `V`.
    pub fn as_representation(&self, dgla: &EndDgla<S>) -> Result<Family<S>> {
        if dgla.base != *self.v_space() {
            return Err(AlgebraError::SpaceMismatch {
                expected: self.v_space().name().to_string(),
                got: dgla.base.name().to_string(),
            });
        }
        let max_k = self.comps.keys().map(|(x, _)| x.len()).max().unwrap_or(1);
        let mut f = Family::new(self.e_space().clone(), dgla.space().clone(), 0, Flavor::Symmetric, max_k);
        for ((x, w), out) in &self.comps {
            if w.len() != 1 {
                return Err(AlgebraError::Precondition("Φ has components with two or more V-slots".into()));
            }
            for (i, c) in out {
                f.insert(x, dgla.basis_index(*i, w[0]), c.clone())?;
            }
        }
        Ok(f)
    }

    fn render_pair(&self, x: &[usize], w: &[usize]) -> String {
        format!("{} ; {}", self.e_space().render(x), self.v_space().render(w))
    }
}

/// `p ∘ outer` applied to a formal sum.
fn restrict_sum<S: Scalar>(outer: &dyn Restriction<S>, x: &WordSum<S>) -> Vector<S> {
    let mut out = Vector::new();
    for (w, c) in x {
        out.add_scaled(&outer.restrict(w), c);
    }
    out
}

/// `p[A, B]_c(w) = pA(B(w)) - (-1)^{|A||B|} pB(A(w))` on `S̄(V)`.
pub(crate) fn restricted_commutator<S: Scalar>(a: &dyn Restriction<S>, b: &dyn Restriction<S>, space: &GradedSpace, w: &[usize]) -> Vector<S> {
    let mut out = restrict_sum(a, &lift_coderivation(b, space, Coalgebra::Symmetric, w));
    let ba = restrict_sum(b, &lift_coderivation(a, space, Coalgebra::Symmetric, w));
    let sign = Sign::koszul(a.degree() as i64, b.degree() as i64);
    out.add_scaled(&ba, &sign.apply(-S::one()));
    out
}

pub(crate) fn sorted_words_upto(space: &GradedSpace, n: usize) -> Vec<Word> {
    (1..=n).flat_map(|k| space.sorted_words(k)).collect()
}

/// The Lie∞-morphism identity for `Φ: E → (Coder(S̄V)[1], ∂_{M_V}, [·,·])`,
/// on E-words `x` and V-words `w` with `|x| + |w| ≤ bound`.
pub fn check_action<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    let (es, vs) = (phi.e_space().clone(), phi.v_space().clone());
    let mut report = Report::new("action", bound);
    let m_v = phi.v.brackets();
    for n in 1..bound {
        for x in es.sorted_words(n) {
            let degs = es.degrees_of(&x);
            for w in sorted_words_upto(&vs, bound - n) {
                let mut acc = Vector::new();
                // Σ ε Φ(l_k(x_σ(1..k)) · rest; w)
                for k in 1..=n {
                    for sigma in shuffles(&[k, n - k], false).iter() {
                        let word = sigma.apply(&x);
                        let inner = phi.e.eval(&word[..k]);
                        if inner.is_zero() {
                            continue;
                        }
                        let mut args = vec![inner];
                        args.extend(word[k..].iter().map(|&j| Vector::single(j, S::one())));
                        let sign = koszul_sign_of(sigma.images(), &degs);
                        acc.add_scaled(&phi.eval_e_vectors(&args, &w), &sign.to_scalar());
                    }
                }
                // ∂Φ_x = -[M_V, Φ_x]_c
                let px = phi.phi_restriction(&x);
                acc.add_comb(&restricted_commutator(m_v, &px, &vs, &w));
                // Σ_{IncSh(j,n-j)} ε [Φ_{b1}, Φ_{b2}] with the shifted sign
                for j in 1..n {
                    for sigma in shuffles(&[j, n - j], true).iter() {
                        let word = sigma.apply(&x);
                        let (b1, b2) = (&word[..j], &word[j..]);
                        let r1 = phi.phi_restriction(b1);
                        let r2 = phi.phi_restriction(b2);
                        let sign = koszul_sign_of(sigma.images(), &degs) * Sign::pow(r1.degree() as i64);
                        acc.add_scaled(&restricted_commutator(&r1, &r2, &vs, &w), &sign.apply(-S::one()));
                    }
                }
                if !acc.is_zero() {
                    report.push(Residual::new("action", n + w.len(), phi.render_pair(&x, &w), render_vector(&vs, &acc)));
                }
            }
        }
    }
    Ok(report)
}

/// `[ad_v, Φ_x]_c = 0` and `[Φ_{y;v}, Φ_x]_c = 0`, as restrictions on
/// V-words `w`, over all canonical words with total length at most `bound`.
pub fn check_coherence<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> Result<Report<S>> {
    let (es, vs) = (phi.e_space().clone(), phi.v_space().clone());
    let mut report = Report::new("coherence", bound);
    for x in sorted_words_upto(&es, bound) {
        let px = phi.phi_restriction(&x);
        let rest = bound - x.len();
        for v in sorted_words_upto(&vs, rest.saturating_sub(1)) {
            let ad = phi.ad_restriction(&v);
            for w in sorted_words_upto(&vs, rest - v.len()) {
                let r = restricted_commutator(&ad, &px, &vs, &w);
                if !r.is_zero() {
                    let input = format!("{} ; {} ; {}", es.render(&x), vs.render(&v), vs.render(&w));
                    report.push(Residual::new("coherence-ad", x.len() + v.len() + w.len(), input, render_vector(&vs, &r)));
                }
            }
        }
        for y in sorted_words_upto(&es, rest.saturating_sub(2)) {
            for v in sorted_words_upto(&vs, rest - y.len() - 1) {
                let mixed = phi.mixed_restriction(&y, &v);
                for w in sorted_words_upto(&vs, rest - y.len() - v.len()) {
                    let r = restricted_commutator(&mixed, &px, &vs, &w);
                    if !r.is_zero() {
                        let input = format!("{} ; {} ; {} ; {}", es.render(&x), es.render(&y), vs.render(&v), vs.render(&w));
                        let weight = x.len() + y.len() + v.len() + w.len();
                        report.push(Residual::new("coherence-mixed", weight, input, render_vector(&vs, &r)));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Fails with a precondition error unless `Φ` is a coherent action up to `bound`.
pub fn require_coherent<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> Result<()> {
    for report in [check_action(phi, bound)?, check_coherence(phi, bound)?] {
        if let Some(r) = report.residuals.first() {
            return Err(AlgebraError::Precondition(format!("Φ is not a coherent action up to weight {bound}: {r}")));
        }
    }
    Ok(())
}

/// `E ⊕ V` with the brackets `l_n + Σ_i Φ^{i,n-i} + m_n`, E-slots first.
#[derive(Clone, Debug)]
pub struct HemiProduct<S: Scalar> {
    pub structure: HomotopyStructure<S>,
    /// Number of E basis elements; they come first in the product basis.
    pub e_dim: usize,
}

impl<S: Scalar> HemiProduct<S> {
    pub fn space(&self) -> &Space {
        self.structure.space()
    }

    pub fn is_e(&self, i: usize) -> bool {
        i < self.e_dim
    }
}

/// `E ⊕ V` with the E basis first.
pub fn product_space(e: &GradedSpace, v: &GradedSpace) -> Space {
    Arc::new(GradedSpace::direct_sum(&format!("{}_{}", e.name(), v.name()), e, v))
}

/// Brackets of the hemisemidirect product up to arity `max_arity`. Mixed
/// words not of the form `x_1 … x_i v_{i+1} … v_n` get zero.
pub fn hemisemidirect<S: Scalar>(phi: &ActionFamily<S>, max_arity: usize) -> Result<HemiProduct<S>> {
    let (es, vs) = (phi.e_space(), phi.v_space());
    let sum = product_space(es, vs);
    let ed = es.dim();
    let mut f = Family::new(sum.clone(), sum.clone(), 1, Flavor::Plain, max_arity.max(1));
    for n in 1..=max_arity {
        for i in 0..=n {
            let e_words = if i == 0 { vec![Word::default()] } else { es.ordered_words(i) };
            let v_words = if i == n { vec![Word::default()] } else { vs.ordered_words(n - i) };
            for x in &e_words {
                for w in &v_words {
                    let word: Vec<usize> = x.iter().copied().chain(w.iter().map(|j| j + ed)).collect();
                    let (value, shift) = if i == n {
                        (phi.e.eval(x), 0)
                    } else if i == 0 {
                        (phi.v.eval(w), ed)
                    } else {
                        (phi.eval(x, w), ed)
                    };
                    for (o, c) in value {
                        f.insert(&word, o + shift, c)?;
                    }
                }
            }
        }
    }
    Ok(HemiProduct { structure: HomotopyStructure::new(f)?, e_dim: ed })
}

/// Arity needed so that the product agrees with `Φ`, `l` and `m` up to `bound`.
pub fn product_arity<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> usize {
    phi.max_total_arity().max(phi.e.max_arity()).max(phi.v.max_arity()).min(bound).max(1)
}

/// Verdicts of the two sides of the coherence theorem.
#[derive(Clone, Debug)]
pub struct Crosscheck<S: Scalar> {
    pub action: Report<S>,
    pub coherence: Report<S>,
    pub loday: Report<S>,
}

impl<S: Scalar> Crosscheck<S> {
    pub fn agree(&self) -> bool {
        self.coherence.passed() == self.loday.passed()
    }
}

/// Run `check_coherence` and the Loday check of the hemisemidirect product
/// concurrently; a disagreement is an internal inconsistency.
pub fn theorem_crosscheck<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> Result<Crosscheck<S>> {
    let action = check_action(phi, bound)?;
    if !action.passed() {
        return Err(AlgebraError::Precondition(format!(
            "Φ is not an action up to weight {bound}: {}",
            action.residuals[0]
        )));
    }
    let product = hemisemidirect(phi, product_arity(phi, bound))?;
    let (coherence, loday) = thread::scope(|s| {
        let c = s.spawn(|| check_coherence(phi, bound));
        let l = s.spawn(|| check_loday_infinity(&product.structure, bound));
        (c.join().expect("coherence thread"), l.join().expect("loday thread"))
    });
    let out = Crosscheck { action, coherence: coherence?, loday: loday? };
    if !out.agree() {
        let witness = out
            .coherence
            .residuals
            .first()
            .or(out.loday.residuals.first())
            .map(|r| r.to_string())
            .unwrap_or_default();
        return Err(AlgebraError::Inconsistency(format!(
            "coherence says {}, hemisemidirect Loday check says {}: {witness}",
            out.coherence.verdict(),
            out.loday.verdict()
        )));
    }
    Ok(out)
}
