//! Lie[1]∞ and Loday[1]∞ structures, their morphisms, Maurer-Cartan
//! elements, twisting, and the two ambient DGLA[1]s.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::coalgebra::{project, Coalgebra, TruncatedCoderivation, TruncatedComorphism, WordMap};
use crate::error::{AlgebraError, Result};
use crate::graded::{compositions, koszul_sign_of, shuffles, Generator, GradedSpace, Word};
use crate::multimap::{Family, Flavor, MultiMap, Space, Vector};
use crate::report::{Report, Residual};
use crate::scalar::{Scalar, Sign};

/// A space with degree `+1` brackets `l_1, …, l_A`.
///
/// Symmetric flavor is a Lie[1]∞ candidate, plain flavor a Loday[1]∞
/// candidate. Brackets above the declared maximal arity vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyStructure<S: Scalar> {
    brackets: Family<S>,
}

impl<S: Scalar> HomotopyStructure<S> {
    pub fn new(brackets: Family<S>) -> Result<Self> {
        if brackets.degree() != 1 {
            return Err(AlgebraError::DegreeMismatch(format!("brackets must have degree +1, got {}", brackets.degree())));
        }
        if brackets.source() != brackets.target() {
            return Err(AlgebraError::SpaceMismatch {
                expected: brackets.source().name().to_string(),
                got: brackets.target().name().to_string(),
            });
        }
        Ok(HomotopyStructure { brackets })
    }

    pub fn abelian(space: Space, flavor: Flavor, max_arity: usize) -> Self {
        HomotopyStructure { brackets: Family::new(space.clone(), space, 1, flavor, max_arity) }
    }

    pub fn space(&self) -> &Space {
        self.brackets.source()
    }

    pub fn flavor(&self) -> Flavor {
        self.brackets.flavor()
    }

    pub fn max_arity(&self) -> usize {
        self.brackets.max_arity()
    }

    pub fn brackets(&self) -> &Family<S> {
        &self.brackets
    }

    pub fn bracket(&self, k: usize) -> Option<&MultiMap<S>> {
        self.brackets.map(k)
    }

    pub fn eval(&self, w: &[usize]) -> Vector<S> {
        self.brackets.eval(w)
    }

    /// The same brackets on a copy of the space called `name`.
    pub fn renamed(&self, name: &str) -> Result<Self> {
        let space: Space = Arc::new(self.space().renamed(name));
        let maps = self.brackets.maps().iter().map(|m| m.relabel(space.clone(), space.clone())).collect::<Result<_>>()?;
        HomotopyStructure::new(Family::from_maps(space.clone(), space, 1, self.flavor(), maps)?)
    }

    /// The coalgebra on which the brackets define a coderivation.
    pub fn coalgebra(&self) -> Coalgebra {
        match self.flavor() {
            Flavor::Symmetric => Coalgebra::Symmetric,
            Flavor::Plain => Coalgebra::Zinbiel,
        }
    }

    /// The lifted coderivation `M` on words of length at most `bound`.
    pub fn codifferential(&self, bound: usize) -> TruncatedCoderivation<S> {
        TruncatedCoderivation::lift(&self.brackets, self.space().clone(), self.coalgebra(), bound)
    }

    /// The Zinbiel coderivation `M^Z` defined by the same maps.
    pub fn zinbiel_codifferential(&self, bound: usize) -> TruncatedCoderivation<S> {
        TruncatedCoderivation::lift(&self.brackets, self.space().clone(), Coalgebra::Zinbiel, bound)
    }
}

/// The same symmetric brackets viewed as a Loday[1]∞ candidate.
pub fn lie_to_loday<S: Scalar>(l: &HomotopyStructure<S>) -> Result<HomotopyStructure<S>> {
    if l.flavor() != Flavor::Symmetric {
        return Err(AlgebraError::FlavorMismatch("expected a symmetric structure".into()));
    }
    HomotopyStructure::new(l.brackets.to_plain())
}

/// Compare the identity-sum route with the square of the lifted operator.
/// `direct` holds the nonzero identity residuals keyed by input word.
fn reconcile<S: Scalar>(
    condition: &str,
    bound: usize,
    space_in: &GradedSpace,
    space_out: &GradedSpace,
    direct: BTreeMap<Word, Vector<S>>,
    square: &WordMap<S>,
) -> Result<Report<S>> {
    let mut report = Report::new(condition, bound);
    for (w, full) in square.blocks() {
        let p = project(full);
        if direct.get(w).map_or(!p.is_zero(), |d| *d != p) {
            return Err(AlgebraError::Inconsistency(format!(
                "{condition}: routes disagree on [{}]",
                space_in.render(w)
            )));
        }
    }
    for (w, d) in &direct {
        if square.blocks().get(w).is_none() {
            return Err(AlgebraError::Inconsistency(format!(
                "{condition}: routes disagree on [{}]",
                space_in.render(w)
            )));
        }
        report.push(Residual::from_vector(condition, space_in, w, space_out, d));
    }
    if report.passed() && !square.is_zero() {
        let w = square.blocks().keys().next().expect("nonzero map");
        return Err(AlgebraError::Inconsistency(format!(
            "{condition}: restrictions vanish but the square does not, on [{}]",
            space_in.render(w)
        )));
    }
    Ok(report)
}

/// Generalized Jacobi identity up to weight `bound`, checked both as an
/// unshuffle sum and as `M∘M = 0` on `S̄(V)`.
pub fn check_lie_infinity<S: Scalar>(l: &HomotopyStructure<S>, bound: usize) -> Result<Report<S>> {
    if l.flavor() != Flavor::Symmetric {
        return Err(AlgebraError::FlavorMismatch("check-lie needs symmetric brackets".into()));
    }
    let space = l.space();
    let mut direct = BTreeMap::new();
    for n in 1..=bound {
        for w in space.sorted_words(n) {
            let degs = space.degrees_of(&w);
            let mut acc = Vector::new();
            for i in 1..=n {
                for sigma in shuffles(&[i, n - i], false).iter() {
                    let word = sigma.apply(&w);
                    let inner = l.eval(&word[..i]);
                    if inner.is_zero() {
                        continue;
                    }
                    let sign = koszul_sign_of(sigma.images(), &degs);
                    for (e, c) in &inner {
                        let mut args = vec![*e];
                        args.extend_from_slice(&word[i..]);
                        acc.add_scaled(&l.eval(&args), &sign.apply(c.clone()));
                    }
                }
            }
            if !acc.is_zero() {
                direct.insert(w, acc);
            }
        }
    }
    let m = l.codifferential(bound);
    let square = m.compose(&m)?;
    reconcile("lie", bound, space, space, direct, &square)
}

/// Loday[1]∞ identity with the anchored unshuffle sum, and `Q∘Q = 0` on the
/// Zinbiel coalgebra. Symmetric input is read through [`lie_to_loday`].
pub fn check_loday_infinity<S: Scalar>(q: &HomotopyStructure<S>, bound: usize) -> Result<Report<S>> {
    let space = q.space();
    let mut direct = BTreeMap::new();
    for n in 1..=bound {
        for w in space.ordered_words(n) {
            let mut acc = Vector::new();
            for k in 1..=n {
                for i in 0..=n - k {
                    // the first i+k-1 letters split into i outer and k-1 inner ones
                    let head = &w[..i + k - 1];
                    let degs = space.degrees_of(head);
                    for sigma in shuffles(&[i, k - 1], false).iter() {
                        let word = sigma.apply(head);
                        let mut args = word[i..].to_vec();
                        args.push(w[i + k - 1]);
                        let inner = q.eval(&args);
                        if inner.is_zero() {
                            continue;
                        }
                        let outer_deg: i64 = word[..i].iter().map(|&j| space.degree(j) as i64).sum();
                        let sign = koszul_sign_of(sigma.images(), &degs) * Sign::pow(outer_deg);
                        for (e, c) in &inner {
                            let args = Word::concat(&[&word[..i], &[*e], &w[i + k..]]);
                            acc.add_scaled(&q.eval(&args), &sign.apply(c.clone()));
                        }
                    }
                }
            }
            if !acc.is_zero() {
                direct.insert(w, acc);
            }
        }
    }
    let m = q.zinbiel_codifferential(bound);
    let square = m.compose(&m)?;
    reconcile("loday", bound, space, space, direct, &square)
}

/// Degree-0 comorphism components `F_k: S^k(E) → V` (or `T^k(E) → V`).
fn check_components<S: Scalar>(f: &Family<S>, e: &HomotopyStructure<S>, v: &HomotopyStructure<S>) -> Result<()> {
    if f.degree() != 0 {
        return Err(AlgebraError::DegreeMismatch(format!("morphism components need degree 0, got {}", f.degree())));
    }
    if f.source() != e.space() || f.target() != v.space() {
        return Err(AlgebraError::SpaceMismatch { expected: e.space().name().to_string(), got: f.source().name().to_string() });
    }
    Ok(())
}

/// Lie∞-morphism identity, as the explicit sum and as `F∘M_E = M_V∘F`.
pub fn check_lie_morphism<S: Scalar>(
    f: &Family<S>,
    e: &HomotopyStructure<S>,
    v: &HomotopyStructure<S>,
    bound: usize,
) -> Result<Report<S>> {
    check_components(f, e, v)?;
    if e.flavor() != Flavor::Symmetric || v.flavor() != Flavor::Symmetric || f.flavor() != Flavor::Symmetric {
        return Err(AlgebraError::FlavorMismatch("Lie morphisms need symmetric data".into()));
    }
    let es = e.space();
    let mut direct = BTreeMap::new();
    for n in 1..=bound {
        for x in es.sorted_words(n) {
            let degs = es.degrees_of(&x);
            let mut acc = Vector::new();
            for k in 1..=n {
                for sigma in shuffles(&[k, n - k], false).iter() {
                    let word = sigma.apply(&x);
                    let inner = e.eval(&word[..k]);
                    if inner.is_zero() {
                        continue;
                    }
                    let sign = koszul_sign_of(sigma.images(), &degs);
                    for (a, c) in &inner {
                        let mut args = vec![*a];
                        args.extend_from_slice(&word[k..]);
                        acc.add_scaled(&f.eval(&args), &sign.apply(c.clone()));
                    }
                }
            }
            acc.sub_comb(&compose_through_components(f, v, &x, &degs));
            if !acc.is_zero() {
                direct.insert(x, acc);
            }
        }
    }
    let lifted = TruncatedComorphism::lift(f, es.clone(), v.space().clone(), Coalgebra::Symmetric, bound)?;
    let difference = lifted.map().compose(e.codifferential(bound).map())?.combine(
        &S::one(),
        &v.codifferential(bound).map().compose(lifted.map())?,
        &-S::one(),
    )?;
    reconcile("lie-morphism", bound, es, v.space(), direct, &difference)
}

/// `Σ_{k_1+…+k_j=n} Σ_{IncSh} ε m_j(F_{k_1}(…), …, F_{k_j}(…))`
pub(crate) fn compose_through_components<S: Scalar>(
    f: &Family<S>,
    v: &HomotopyStructure<S>,
    x: &[usize],
    degs: &[i64],
) -> Vector<S> {
    let mut acc = Vector::new();
    for blocks in compositions(x.len()) {
        if blocks.len() > v.max_arity() {
            continue;
        }
        for sigma in shuffles(&blocks, true).iter() {
            let word = sigma.apply(x);
            let mut args = Vec::with_capacity(blocks.len());
            let mut start = 0;
            for &b in &blocks {
                args.push(f.eval(&word[start..start + b]));
                start += b;
            }
            if args.iter().any(|a| a.is_zero()) {
                continue;
            }
            let sign = koszul_sign_of(sigma.images(), degs);
            acc.add_scaled(&v.bracket(blocks.len()).expect("arity checked").eval_vectors(&args), &sign.to_scalar());
        }
    }
    acc
}

/// Loday∞-morphism identity, as the explicit sum and as `F∘Q_E = Q_V∘F` on
/// the Zinbiel coalgebras.
pub fn check_loday_morphism<S: Scalar>(
    f: &Family<S>,
    e: &HomotopyStructure<S>,
    v: &HomotopyStructure<S>,
    bound: usize,
) -> Result<Report<S>> {
    check_components(f, e, v)?;
    let es = e.space();
    let mut direct = BTreeMap::new();
    for n in 1..=bound {
        for x in es.ordered_words(n) {
            let mut acc = Vector::new();
            for k in 1..=n {
                for i in 0..=n - k {
                    let head = &x[..i + k - 1];
                    let degs = es.degrees_of(head);
                    for sigma in shuffles(&[i, k - 1], false).iter() {
                        let word = sigma.apply(head);
                        let mut args = word[i..].to_vec();
                        args.push(x[i + k - 1]);
                        let inner = e.eval(&args);
                        if inner.is_zero() {
                            continue;
                        }
                        let outer_deg: i64 = word[..i].iter().map(|&j| es.degree(j) as i64).sum();
                        let sign = koszul_sign_of(sigma.images(), &degs) * Sign::pow(outer_deg);
                        for (a, c) in &inner {
                            let args = Word::concat(&[&word[..i], &[*a], &x[i + k..]]);
                            acc.add_scaled(&f.eval(&args), &sign.apply(c.clone()));
                        }
                    }
                }
            }
            acc.sub_comb(&compose_through_components(f, v, &x, &es.degrees_of(&x)));
            if !acc.is_zero() {
                direct.insert(x, acc);
            }
        }
    }
    let lifted = TruncatedComorphism::lift(f, es.clone(), v.space().clone(), Coalgebra::Zinbiel, bound)?;
    let difference = lifted.map().compose(e.zinbiel_codifferential(bound).map())?.combine(
        &S::one(),
        &v.zinbiel_codifferential(bound).map().compose(lifted.map())?,
        &-S::one(),
    )?;
    reconcile("loday-morphism", bound, es, v.space(), direct, &difference)
}

/// `Σ_{k=1}^{A} (1/k!) l_k(e, …, e)`
pub fn mc_residual<S: Scalar>(l: &HomotopyStructure<S>, e: &Vector<S>) -> Result<Vector<S>> {
    let space = l.space();
    for (i, _) in e {
        space.check_index(*i)?;
        if space.degree(*i) != 0 {
            return Err(AlgebraError::DegreeMismatch(format!("MC elements live in degree 0, `{}` has degree {}", space.symbol(*i), space.degree(*i))));
        }
    }
    let mut acc = Vector::new();
    for k in 1..=l.max_arity() {
        let args = vec![e.clone(); k];
        acc.add_scaled(&l.bracket(k).expect("within arity").eval_vectors(&args), &S::inv_factorial(k));
    }
    Ok(acc)
}

/// Twisted brackets `l_k^e(x) = Σ_{i≥0} (1/i!) l_{k+i}(e, …, e, x)`.
pub fn twist<S: Scalar>(l: &HomotopyStructure<S>, e: &Vector<S>) -> Result<HomotopyStructure<S>> {
    if l.flavor() != Flavor::Symmetric {
        return Err(AlgebraError::FlavorMismatch("twisting needs symmetric brackets".into()));
    }
    if !mc_residual(l, e)?.is_zero() {
        return Err(AlgebraError::NotMaurerCartan);
    }
    let space = l.space();
    let a = l.max_arity();
    let mut out = Family::new(space.clone(), space.clone(), 1, Flavor::Symmetric, a);
    for k in 1..=a {
        for x in space.sorted_words(k) {
            let mut acc = Vector::new();
            for i in 0..=a - k {
                let mut args = vec![e.clone(); i];
                args.extend(x.iter().map(|&j| Vector::single(j, S::one())));
                acc.add_scaled(&l.bracket(k + i).expect("within arity").eval_vectors(&args), &S::inv_factorial(i));
            }
            for (o, c) in acc {
                out.insert(&x, o, c)?;
            }
        }
    }
    HomotopyStructure::new(out)
}

/// `End(V)[1]`: basis `a|b` for the map sending `b` to `a`, in degree
/// `|a| - |b| - 1`.
pub fn end_space(v: &GradedSpace) -> GradedSpace {
    let mut basis = Vec::new();
    for i in 0..v.dim() {
        for j in 0..v.dim() {
            basis.push(Generator {
                symbol: format!("{}|{}", v.symbol(i), v.symbol(j)),
                degree: v.degree(i) - v.degree(j) - 1,
            });
        }
    }
    GradedSpace::new_unchecked(format!("End_{}", v.name()), basis)
}

/// A cochain complex `(V, d)` and the DGLA[1] structure it induces on
/// `End(V)[1]`.
#[derive(Clone, Debug)]
pub struct EndDgla<S: Scalar> {
    pub base: Space,
    pub differential: MultiMap<S>,
    pub structure: HomotopyStructure<S>,
}

impl<S: Scalar> EndDgla<S> {
    pub fn space(&self) -> &Space {
        self.structure.space()
    }

    /// Index of the basis endomorphism sending `j` to `i`.
    pub fn basis_index(&self, i: usize, j: usize) -> usize {
        i * self.base.dim() + j
    }
}

/// `∂_d φ = -d∘φ + (-1)^{|φ|+1} φ∘d` and
/// `[φ,ψ] = (-1)^{|φ|+1}(φ∘ψ - (-1)^{(|φ|+1)(|ψ|+1)} ψ∘φ)`, degrees in `End(V)[1]`.
pub fn end_dgla<S: Scalar>(base: Space, d: &MultiMap<S>) -> Result<EndDgla<S>> {
    if d.arity() != 1 || d.degree() != 1 || d.source() != &base || d.target() != &base {
        return Err(AlgebraError::Precondition("the differential must be a degree +1 endomorphism".into()));
    }
    let n = base.dim();
    for j in 0..n {
        let dd = d.eval_vectors(&[d.eval(&[j])]);
        if !dd.is_zero() {
            return Err(AlgebraError::NotSquareZero);
        }
    }
    let end = Arc::new(end_space(&base));
    // matrix of d: dm[i][j] = coefficient of i in d(j)
    let mut dm = vec![vec![S::zero(); n]; n];
    for j in 0..n {
        for (i, c) in &d.eval(&[j]) {
            dm[*i][j] = c.clone();
        }
    }
    let idx = |i: usize, j: usize| i * n + j;
    let deg = |a: usize| end.degree(a) as i64;
    let mut l1 = MultiMap::new(end.clone(), end.clone(), 1, 1, Flavor::Symmetric)?;
    for i in 0..n {
        for j in 0..n {
            let phi = idx(i, j);
            let mut out = Vector::new();
            // -d∘φ: φ sends j to i, then d sends i to k
            for k in 0..n {
                out.add_term(idx(k, j), -dm[k][i].clone());
            }
            // (-1)^{|φ|+1} φ∘d: d sends k to j
            let s = Sign::pow(deg(phi) + 1);
            for k in 0..n {
                out.add_term(idx(i, k), s.apply(dm[j][k].clone()));
            }
            for (o, c) in out {
                l1.insert(&[phi], o, c)?;
            }
        }
    }
    let mut plain = MultiMap::new(end.clone(), end.clone(), 2, 1, Flavor::Plain)?;
    for a in 0..end.dim() {
        for b in 0..end.dim() {
            let (ai, aj) = (a / n, a % n);
            let (bi, bj) = (b / n, b % n);
            let mut out = Vector::new();
            let outer = Sign::pow(deg(a) + 1);
            if aj == bi {
                out.add_term(idx(ai, bj), outer.to_scalar());
            }
            if bj == ai {
                let s = outer * Sign::koszul(deg(a) + 1, deg(b) + 1);
                out.add_term(idx(bi, aj), s.apply(-S::one()));
            }
            for (o, c) in out {
                plain.insert(&[a, b], o, c)?;
            }
        }
    }
    let l2 = plain.to_symmetric()?;
    let structure = HomotopyStructure::new(Family::from_maps(end.clone(), end, 1, Flavor::Symmetric, vec![l1, l2])?)?;
    Ok(EndDgla { base, differential: d.clone(), structure })
}

/// Representation identity for `Φ_k: S^k(E) → End(V)[1]` (degree 0 in the
/// shifted grading), checked as a Lie∞-morphism into [`end_dgla`].
pub fn check_representation<S: Scalar>(
    phi: &Family<S>,
    e: &HomotopyStructure<S>,
    dgla: &EndDgla<S>,
    bound: usize,
) -> Result<Report<S>> {
    let mut r = check_lie_morphism(phi, e, &dgla.structure, bound)?;
    r.check = "representation".into();
    for res in &mut r.residuals {
        res.condition = "representation".into();
    }
    Ok(r)
}

/// `(Coder(S̄V)[1], ∂_{M_V}, [·,·])` truncated at a weight bound.
#[derive(Clone, Debug)]
pub struct DglaOnCoder<S: Scalar> {
    pub bound: usize,
    pub codifferential: TruncatedCoderivation<S>,
}

impl<S: Scalar> DglaOnCoder<S> {
    /// `∂Q = -M∘Q + (-1)^{|Q|} Q∘M` with `|Q|` the map degree.
    pub fn differential(&self, q: &TruncatedCoderivation<S>) -> Result<TruncatedCoderivation<S>> {
        Ok(TruncatedCoderivation::from_map_unchecked(self.codifferential.commutator(q)?.scale(&-S::one())))
    }

    pub fn bracket(&self, a: &TruncatedCoderivation<S>, b: &TruncatedCoderivation<S>) -> Result<TruncatedCoderivation<S>> {
        a.shifted_bracket(b)
    }
}

pub fn coder_dgla<S: Scalar>(v: &HomotopyStructure<S>, bound: usize) -> Result<DglaOnCoder<S>> {
    if v.flavor() != Flavor::Symmetric {
        return Err(AlgebraError::FlavorMismatch("expected a symmetric structure".into()));
    }
    Ok(DglaOnCoder { bound, codifferential: v.codifferential(bound) })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::Q;

    fn sp(name: &str, gens: &[(&str, i32)]) -> Space {
        Arc::new(GradedSpace::new(name, gens.iter().cloned()).unwrap())
    }

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    /// `[a,b] = b` in degree 0, shifted to degree −1 with the décalage sign.
    pub(crate) fn two_dim() -> HomotopyStructure<Q> {
        let e = sp("E", &[("a", -1), ("b", -1)]);
        let mut f = Family::new(e.clone(), e, 1, Flavor::Symmetric, 2);
        f.insert(&[0, 1], 1, q(1)).unwrap();
        HomotopyStructure::new(f).unwrap()
    }

    #[test]
    fn abelian_and_complexes() {
        let v = sp("V", &[("u", -1), ("w", 0)]);
        let ab = HomotopyStructure::<Q>::abelian(v.clone(), Flavor::Symmetric, 2);
        assert!(check_lie_infinity(&ab, 4).unwrap().passed());
        let mut f = Family::new(v.clone(), v.clone(), 1, Flavor::Symmetric, 1);
        f.insert(&[0], 1, q(1)).unwrap();
        assert!(check_lie_infinity(&HomotopyStructure::new(f).unwrap(), 4).unwrap().passed());

        let s = sp("S", &[("u", 0), ("w", 1)]);
        let mut g = Family::new(s.clone(), s.clone(), 1, Flavor::Symmetric, 1);
        g.insert(&[0], 1, q(1)).unwrap();
        let bad = sp("B", &[("u", 1), ("w", 1)]);
        let mut h = Family::new(bad.clone(), bad.clone(), 1, Flavor::Symmetric, 1);
        assert!(h.insert(&[0], 1, q(1)).is_err());
        let odd = sp("O", &[("u", 0), ("w", 1), ("y", 2)]);
        let mut k = Family::new(odd.clone(), odd.clone(), 1, Flavor::Symmetric, 1);
        k.insert(&[0], 1, q(1)).unwrap();
        k.insert(&[1], 2, q(1)).unwrap();
        let r = check_lie_infinity(&HomotopyStructure::new(k).unwrap(), 3).unwrap();
        assert!(!r.passed());
        assert_eq!(r.residuals[0].weight, 1);
        assert!(check_lie_infinity(&HomotopyStructure::new(g).unwrap(), 3).unwrap().passed());
    }

    #[test]
    fn lie_is_loday() {
        let l = two_dim();
        assert!(check_lie_infinity(&l, 4).unwrap().passed());
        assert!(check_loday_infinity(&lie_to_loday(&l).unwrap(), 4).unwrap().passed());
    }

    #[test]
    fn broken_leibniz_fails_at_three() {
        let v = sp("V", &[("a", -1), ("b", -1)]);
        let mut f = Family::new(v.clone(), v.clone(), 1, Flavor::Plain, 2);
        f.insert(&[0, 0], 1, q(1)).unwrap();
        f.insert(&[1, 0], 0, q(1)).unwrap();
        let r = check_loday_infinity(&HomotopyStructure::new(f).unwrap(), 3).unwrap();
        assert!(!r.passed());
        assert!(r.residuals.iter().all(|x| x.weight == 3));
    }

    #[test]
    fn morphism_to_quotient() {
        let e = two_dim();
        let quo = sp("K", &[("a", -1)]);
        let k = HomotopyStructure::<Q>::abelian(quo.clone(), Flavor::Symmetric, 2);
        let mut f = Family::new(e.space().clone(), quo.clone(), 0, Flavor::Symmetric, 1);
        f.insert(&[0], 0, q(1)).unwrap();
        assert!(check_lie_morphism(&f, &e, &k, 4).unwrap().passed());
        assert!(check_loday_morphism(&f.to_plain(), &lie_to_loday(&e).unwrap(), &lie_to_loday(&k).unwrap(), 4).unwrap().passed());
        // the reversed map K → E picking b is not a morphism of the quotient
        let mut g = Family::new(e.space().clone(), quo.clone(), 0, Flavor::Symmetric, 1);
        g.insert(&[1], 0, q(1)).unwrap();
        let r = check_lie_morphism(&g, &e, &k, 4).unwrap();
        assert!(!r.passed());
        let rz = check_loday_morphism(&g.to_plain(), &lie_to_loday(&e).unwrap(), &lie_to_loday(&k).unwrap(), 4).unwrap();
        assert!(!rz.passed());
        let mut id = Family::new(e.space().clone(), e.space().clone(), 0, Flavor::Symmetric, 1);
        id.insert(&[0], 0, q(1)).unwrap();
        id.insert(&[1], 1, q(1)).unwrap();
        assert!(check_lie_morphism(&id, &e, &e, 4).unwrap().passed());
    }

    #[test]
    fn mc_and_twist() {
        // DGLA[1]: x (degree 0) with l2(x,x) = -2 y, l1(x) = y; e = x is MC
        let v = sp("V", &[("x", 0), ("y", 1)]);
        let mut f = Family::new(v.clone(), v.clone(), 1, Flavor::Symmetric, 2);
        f.insert(&[0], 1, q(1)).unwrap();
        f.insert(&[0, 0], 1, q(-2)).unwrap();
        let l = HomotopyStructure::new(f).unwrap();
        assert!(check_lie_infinity(&l, 4).unwrap().passed());
        let e = Vector::single(0, q(1));
        assert!(mc_residual(&l, &e).unwrap().is_zero());
        let t = twist(&l, &e).unwrap();
        // l1^e(x) = l1(x) + l2(e,x) = y - 2y
        assert_eq!(t.eval(&[0]), Vector::single(1, q(-1)));
        assert!(check_lie_infinity(&t, 4).unwrap().passed());
        assert_eq!(twist(&l, &Vector::new()).unwrap(), l);
        assert!(matches!(twist(&l, &Vector::single(0, q(2))), Err(AlgebraError::NotMaurerCartan)));
        // twist by e then e' equals twist by e + e'
        let e2 = Vector::single(0, q(-1));
        let tt = twist(&t, &e2).unwrap();
        assert_eq!(tt, twist(&l, &Vector::new()).unwrap());
    }

    #[test]
    fn end_dgla_is_lie() {
        let v = sp("V", &[("u", -1), ("w", 0)]);
        let mut d = MultiMap::new(v.clone(), v.clone(), 1, 1, Flavor::Plain).unwrap();
        d.insert(&[0], 1, q(1)).unwrap();
        let g = end_dgla(v.clone(), &d).unwrap();
        assert_eq!(g.space().dim(), 4);
        assert!(check_lie_infinity(&g.structure, 3).unwrap().passed());
        let zero = MultiMap::<Q>::new(v.clone(), v.clone(), 1, 1, Flavor::Plain).unwrap();
        let g0 = end_dgla(v.clone(), &zero).unwrap();
        assert!(g0.structure.bracket(1).unwrap().is_zero());
        assert!(check_lie_infinity(&g0.structure, 3).unwrap().passed());
        let s = sp("S", &[("a", 0), ("b", 1), ("c", 2)]);
        let mut bad = MultiMap::new(s.clone(), s.clone(), 1, 1, Flavor::Plain).unwrap();
        bad.insert(&[0], 1, q(1)).unwrap();
        bad.insert(&[1], 2, q(1)).unwrap();
        assert!(matches!(end_dgla(s, &bad), Err(AlgebraError::NotSquareZero)));
    }

    #[test]
    fn coder_dgla_laws() {
        let l = two_dim();
        let g = coder_dgla(&l, 3).unwrap();
        let m = &g.codifferential;
        assert!(g.differential(m).unwrap().is_zero());
        let e = l.space();
        let mut a = Family::new(e.clone(), e.clone(), 0, Flavor::Symmetric, 2);
        a.insert(&[0], 1, q(1)).unwrap();
        a.insert(&[1], 1, q(2)).unwrap();
        let mut b = Family::new(e.clone(), e.clone(), 1, Flavor::Symmetric, 2);
        b.insert(&[0, 1], 0, q(3)).unwrap();
        let qa = TruncatedCoderivation::lift(&a, e.clone(), Coalgebra::Symmetric, 3);
        let qb = TruncatedCoderivation::lift(&b, e.clone(), Coalgebra::Symmetric, 3);
        let dda = g.differential(&g.differential(&qa).unwrap()).unwrap();
        assert!(dda.is_zero());
        // Leibniz: ∂[a,b] = [∂a,b] + (-1)^{|a|-1}[a,∂b] in shifted degrees
        let lhs = g.differential(&g.bracket(&qa, &qb).unwrap()).unwrap();
        let r1 = g.bracket(&g.differential(&qa).unwrap(), &qb).unwrap();
        let r2 = g.bracket(&qa, &g.differential(&qb).unwrap()).unwrap();
        let s = Sign::pow(qa.degree() as i64 - 1).to_scalar::<Q>();
        let rhs = r1.combine(&q(1), &r2, &s).unwrap();
        assert!(lhs.difference(&rhs).is_empty());
    }

    #[test]
    fn representations() {
        // adjoint representation of the 2-dim algebra on itself
        let e = two_dim();
        let v = sp("V", &[("a", -1), ("b", -1)]);
        let d = MultiMap::<Q>::new(v.clone(), v.clone(), 1, 1, Flavor::Plain).unwrap();
        let g = end_dgla(v.clone(), &d).unwrap();
        let mut phi = Family::new(e.space().clone(), g.space().clone(), 0, Flavor::Symmetric, 1);
        // ad_a(b) = l2(a,b) = b, ad_b(a) = l2(b,a) = -b (odd letters)
        phi.insert(&[0], g.basis_index(1, 1), q(1)).unwrap();
        phi.insert(&[1], g.basis_index(1, 0), q(-1)).unwrap();
        assert!(check_representation(&phi, &e, &g, 3).unwrap().passed());
        let zero = Family::new(e.space().clone(), g.space().clone(), 0, Flavor::Symmetric, 1);
        let ab = HomotopyStructure::<Q>::abelian(e.space().clone(), Flavor::Symmetric, 2);
        assert!(check_representation(&zero, &ab, &g, 3).unwrap().passed());
        // not a chain map
        let w = sp("W", &[("u", -1), ("z", 0)]);
        let mut dw = MultiMap::new(w.clone(), w.clone(), 1, 1, Flavor::Plain).unwrap();
        dw.insert(&[0], 1, q(1)).unwrap();
        let gw = end_dgla(w.clone(), &dw).unwrap();
        let x = sp("X", &[("x", -1)]);
        let ex = HomotopyStructure::<Q>::abelian(x.clone(), Flavor::Symmetric, 1);
        let mut broken = Family::new(x, gw.space().clone(), 0, Flavor::Symmetric, 1);
        broken.insert(&[0], gw.basis_index(0, 0), q(1)).unwrap();
        let r = check_representation(&broken, &ex, &gw, 3).unwrap();
        assert!(!r.passed());
        assert_eq!(r.residuals[0].weight, 1);
    }
}
