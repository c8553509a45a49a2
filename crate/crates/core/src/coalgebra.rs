//! Coshuffle and Zinbiel coalgebras, truncated at a word-length bound.
//!
//! Words of the symmetric coalgebra are stored as canonically sorted
//! monomials; words of the Zinbiel coalgebra are stored in order.

use std::collections::BTreeMap;

use crate::error::{AlgebraError, Result};
use crate::graded::{compositions, koszul_sign_of, shuffles, symmetric_normal_form, GradedSpace, Word, WordKind};
use crate::linear::Comb;
use crate::multimap::{expand_words, Restriction, Space, Vector, WordSum};
use crate::scalar::{Scalar, Sign};

/// Which coalgebra a truncated operator lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coalgebra {
    /// `S̄(V)` with the coshuffle coproduct.
    Symmetric,
    /// `T̄(V)` with the Zinbiel coproduct.
    Zinbiel,
}

impl Coalgebra {
    pub fn word_kind(self) -> WordKind {
        match self {
            Coalgebra::Symmetric => WordKind::Sorted,
            Coalgebra::Zinbiel => WordKind::Ordered,
        }
    }
}

/// Formal sum of `a ⊗ b`.
pub type Tensor2<S> = Comb<(Word, Word), S>;

/// Formal sum of `a ⊗ b ⊗ c`.
pub type Tensor3<S> = Comb<(Word, Word, Word), S>;

/// Put a word into the storage form of the coalgebra: sorted with sign for
/// the symmetric one, unchanged otherwise. `None` means the word is zero.
pub fn normalize(space: &GradedSpace, kind: Coalgebra, w: &[usize]) -> Option<(Word, Sign)> {
    match kind {
        Coalgebra::Symmetric => symmetric_normal_form(space, w),
        Coalgebra::Zinbiel => Some((Word::from(w), Sign::PLUS)),
    }
}

fn push_normalized<S: Scalar>(out: &mut WordSum<S>, space: &GradedSpace, kind: Coalgebra, w: &[usize], c: S) {
    if let Some((key, sign)) = normalize(space, kind, w) {
        out.add_term(key, sign.apply(c));
    }
}

/// `Δ^c(u) = Σ_p Σ_{σ∈Sh(p,n-p)} ε(σ) u_σ(1..p) ⊗ u_σ(p+1..n)`, factors normalized.
pub fn coshuffle_coproduct<S: Scalar>(space: &GradedSpace, w: &[usize]) -> Tensor2<S> {
    let n = w.len();
    let degs = space.degrees_of(w);
    let mut out = Tensor2::new();
    for p in 1..n {
        for sigma in shuffles(&[p, n - p], false).iter() {
            let word = sigma.apply(w);
            let Some((a, sa)) = symmetric_normal_form(space, &word[..p]) else { continue };
            let Some((b, sb)) = symmetric_normal_form(space, &word[p..]) else { continue };
            let sign = koszul_sign_of(sigma.images(), &degs) * sa * sb;
            out.add_term((a, b), sign.to_scalar());
        }
    }
    out
}

/// Zinbiel coproduct: the last letter stays in the right factor and the
/// first `k-1` letters are unshuffled around it.
pub fn zinbiel_coproduct<S: Scalar>(space: &GradedSpace, w: &[usize]) -> Tensor2<S> {
    let n = w.len();
    let mut out = Tensor2::new();
    if n < 2 {
        return out;
    }
    let head = &w[..n - 1];
    let degs = space.degrees_of(head);
    for p in 1..n {
        for sigma in shuffles(&[p, n - 1 - p], false).iter() {
            let word = sigma.apply(head);
            let left = Word::from(&word[..p]);
            let right = Word::concat(&[&word[p..], &w[n - 1..]]);
            out.add_term((left, right), koszul_sign_of(sigma.images(), &degs).to_scalar());
        }
    }
    out
}

/// `τ(a ⊗ b) = (-1)^{|a||b|} b ⊗ a`
pub fn twist<S: Scalar>(space: &GradedSpace, t: &Tensor2<S>) -> Tensor2<S> {
    t.iter()
        .map(|((a, b), c)| {
            let sign = Sign::koszul(space.word_degree(a), space.word_degree(b));
            ((b.clone(), a.clone()), sign.apply(c.clone()))
        })
        .collect()
}

/// Coproduct of the given coalgebra.
pub fn coproduct<S: Scalar>(space: &GradedSpace, kind: Coalgebra, w: &[usize]) -> Tensor2<S> {
    match kind {
        Coalgebra::Symmetric => coshuffle_coproduct(space, w),
        Coalgebra::Zinbiel => zinbiel_coproduct(space, w),
    }
}

pub fn coproduct_sum<S: Scalar>(space: &GradedSpace, kind: Coalgebra, x: &WordSum<S>) -> Tensor2<S> {
    let mut out = Tensor2::new();
    for (w, c) in x {
        out.add_scaled(&coproduct(space, kind, w), c);
    }
    out
}

/// Apply the coderivation with restriction maps `r` to a word.
pub fn lift_coderivation<S: Scalar>(r: &dyn Restriction<S>, space: &GradedSpace, kind: Coalgebra, w: &[usize]) -> WordSum<S> {
    match kind {
        Coalgebra::Symmetric => lift_symmetric(r, space, w),
        Coalgebra::Zinbiel => lift_zinbiel(r, space, w),
    }
}

fn lift_symmetric<S: Scalar>(r: &dyn Restriction<S>, space: &GradedSpace, w: &[usize]) -> WordSum<S> {
    let n = w.len();
    let degs = space.degrees_of(w);
    let mut out = WordSum::new();
    for i in 1..=n {
        for sigma in shuffles(&[i, n - i], false).iter() {
            let word = sigma.apply(w);
            let value = r.restrict(&word[..i]);
            if value.is_zero() {
                continue;
            }
            let sign = koszul_sign_of(sigma.images(), &degs);
            let mut buf = Vec::with_capacity(n - i + 1);
            for (e, c) in &value {
                buf.clear();
                buf.push(*e);
                buf.extend_from_slice(&word[i..]);
                push_normalized(&mut out, space, Coalgebra::Symmetric, &buf, sign.apply(c.clone()));
            }
        }
    }
    out
}

fn lift_zinbiel<S: Scalar>(r: &dyn Restriction<S>, space: &GradedSpace, w: &[usize]) -> WordSum<S> {
    let n = w.len();
    let d = r.degree() as i64;
    let mut out = WordSum::new();
    for a in 0..n {
        let prefix = &w[..a];
        let degs = space.degrees_of(prefix);
        for i in 0..=a {
            for sigma in shuffles(&[i, a - i], false).iter() {
                let word = sigma.apply(prefix);
                let mut args = word[i..].to_vec();
                args.push(w[a]);
                let value = r.restrict(&args);
                if value.is_zero() {
                    continue;
                }
                let left_deg: i64 = word[..i].iter().map(|&j| space.degree(j) as i64).sum();
                let sign = koszul_sign_of(sigma.images(), &degs) * Sign::koszul(d, left_deg);
                for (e, c) in &value {
                    let key = Word::concat(&[&word[..i], &[*e], &w[a + 1..]]);
                    out.add_term(key, sign.apply(c.clone()));
                }
            }
        }
    }
    out
}

/// Apply the comorphism with degree-0 components `f: source → target`.
pub fn lift_comorphism<S: Scalar>(
    f: &dyn Restriction<S>,
    source: &GradedSpace,
    target: &GradedSpace,
    kind: Coalgebra,
    w: &[usize],
) -> WordSum<S> {
    let n = w.len();
    let degs = source.degrees_of(w);
    let mut out = WordSum::new();
    for blocks in compositions(n) {
        for sigma in shuffles(&blocks, true).iter() {
            let word = sigma.apply(w);
            let mut values = Vec::with_capacity(blocks.len());
            let mut start = 0;
            for &b in &blocks {
                values.push(f.restrict(&word[start..start + b]));
                start += b;
            }
            if values.iter().any(|v| v.is_zero()) {
                continue;
            }
            let sign = koszul_sign_of(sigma.images(), &degs);
            expand_words(&values, &mut |word, c| {
                push_normalized(&mut out, target, kind, word, sign.apply(c.clone()));
            });
        }
    }
    out
}

/// A linear map between truncated coalgebras, stored by its value on every
/// basis word of length `1..=bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordMap<S: Scalar> {
    source: Space,
    target: Space,
    kind: Coalgebra,
    bound: usize,
    degree: i32,
    blocks: BTreeMap<Word, WordSum<S>>,
}

impl<S: Scalar> WordMap<S> {
    /// Tabulate `f` on every basis word up to `bound`.
    pub fn tabulate(
        source: Space,
        target: Space,
        kind: Coalgebra,
        bound: usize,
        degree: i32,
        f: impl Fn(&[usize]) -> WordSum<S>,
    ) -> Self {
        let mut blocks = BTreeMap::new();
        for w in source.words_up_to(bound, kind.word_kind()) {
            let v = f(&w);
            if !v.is_zero() {
                blocks.insert(w, v);
            }
        }
        WordMap { source, target, kind, bound, degree, blocks }
    }

    pub fn identity(space: Space, kind: Coalgebra, bound: usize) -> Self {
        Self::tabulate(space.clone(), space, kind, bound, 0, |w| WordSum::single(Word::from(w), S::one()))
    }

    pub fn zero(source: Space, target: Space, kind: Coalgebra, bound: usize, degree: i32) -> Self {
        WordMap { source, target, kind, bound, degree, blocks: BTreeMap::new() }
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn kind(&self) -> Coalgebra {
        self.kind
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Nonzero values, keyed by input word.
    pub fn blocks(&self) -> &BTreeMap<Word, WordSum<S>> {
        &self.blocks
    }

    /// Value on a stored-form word. Words longer than the bound are outside
    /// the truncation.
    pub fn apply(&self, w: &[usize]) -> WordSum<S> {
        debug_assert!(w.len() <= self.bound, "word beyond truncation");
        self.blocks.get(w).cloned().unwrap_or_default()
    }

    pub fn apply_sum(&self, x: &WordSum<S>) -> WordSum<S> {
        let mut out = WordSum::new();
        for (w, c) in x {
            if let Some(v) = self.blocks.get(w) {
                out.add_scaled(v, c);
            }
        }
        out
    }

    /// Length-one part of the value: the restriction map `p ∘ self`.
    pub fn restrict(&self, w: &[usize]) -> Vector<S> {
        project(&self.apply(w))
    }

    fn check_composable(&self, inner: &WordMap<S>) -> Result<()> {
        if inner.bound != self.bound {
            return Err(AlgebraError::BoundMismatch(inner.bound, self.bound));
        }
        if inner.target != self.source {
            return Err(AlgebraError::SpaceMismatch {
                expected: self.source.name().to_string(),
                got: inner.target.name().to_string(),
            });
        }
        if inner.kind != self.kind {
            return Err(AlgebraError::FlavorMismatch("operators live on different coalgebras".into()));
        }
        Ok(())
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &WordMap<S>) -> Result<WordMap<S>> {
        self.check_composable(inner)?;
        let mut blocks = BTreeMap::new();
        for (w, x) in &inner.blocks {
            let v = self.apply_sum(x);
            if !v.is_zero() {
                blocks.insert(w.clone(), v);
            }
        }
        Ok(WordMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            kind: self.kind,
            bound: self.bound,
            degree: self.degree + inner.degree,
            blocks,
        })
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: &S, other: &WordMap<S>, b: &S) -> Result<WordMap<S>> {
        if other.bound != self.bound {
            return Err(AlgebraError::BoundMismatch(self.bound, other.bound));
        }
        if other.source != self.source || other.target != self.target {
            return Err(AlgebraError::SpaceMismatch {
                expected: self.source.name().to_string(),
                got: other.source.name().to_string(),
            });
        }
        if other.degree != self.degree && !other.is_zero() && !self.is_zero() {
            return Err(AlgebraError::DegreeMismatch(format!("{} vs {}", self.degree, other.degree)));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut blocks = BTreeMap::new();
        for w in self.blocks.keys().chain(other.blocks.keys()) {
            if blocks.contains_key(w) {
                continue;
            }
            let mut v = self.apply(w).scaled(a);
            v.add_scaled(&other.apply(w), b);
            if !v.is_zero() {
                blocks.insert(w.clone(), v);
            }
        }
        Ok(WordMap { blocks, degree, ..self.clone() })
    }

    pub fn scale(&self, c: &S) -> WordMap<S> {
        let blocks = self
            .blocks
            .iter()
            .filter_map(|(w, v)| {
                let s = v.scaled(c);
                (!s.is_zero()).then(|| (w.clone(), s))
            })
            .collect();
        WordMap { blocks, ..self.clone() }
    }

    /// Graded commutator `[self, other]_c = self∘other - (-1)^{|self||other|} other∘self`.
    pub fn commutator(&self, other: &WordMap<S>) -> Result<WordMap<S>> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        let sign = Sign::koszul(self.degree as i64, other.degree as i64);
        let mut out = ab.combine(&S::one(), &ba, &sign.apply(-S::one()))?;
        out.degree = self.degree + other.degree;
        Ok(out)
    }

    /// Bracket on `Coder[1]`: `(-1)^{|self|}[self, other]_c` with `|self|` the
    /// map degree.
    pub fn shifted_bracket(&self, other: &WordMap<S>) -> Result<WordMap<S>> {
        let c = self.commutator(other)?;
        Ok(c.scale(&Sign::pow(self.degree as i64).to_scalar()))
    }

    /// Words on which `self` and `other` differ, with the difference.
    pub fn difference(&self, other: &WordMap<S>) -> Vec<(Word, WordSum<S>)> {
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for w in self.blocks.keys().chain(other.blocks.keys()) {
            if seen.insert(w.clone()) {
                let d = self.apply(w).minus(&other.apply(w));
                if !d.is_zero() {
                    out.push((w.clone(), d));
                }
            }
        }
        out
    }

    /// `(Id ⊗ X)(a ⊗ b) = (-1)^{|X||a|} a ⊗ X(b)` plus `X(a) ⊗ b`, on a tensor.
    fn leibniz_on(&self, t: &Tensor2<S>) -> Tensor2<S> {
        let mut out = Tensor2::new();
        for ((a, b), c) in t {
            for (x, cx) in &self.apply(a) {
                out.add_term((x.clone(), b.clone()), cx.clone() * c.clone());
            }
            let sign = Sign::koszul(self.degree as i64, self.source.word_degree(a));
            for (y, cy) in &self.apply(b) {
                out.add_term((a.clone(), y.clone()), sign.apply(cy.clone() * c.clone()));
            }
        }
        out
    }

    /// Words where the coderivation identity `ΔX = (X⊗Id + Id⊗X)Δ` fails.
    pub fn coderivation_defects(&self) -> Vec<(Word, Tensor2<S>)> {
        let mut out = Vec::new();
        for w in self.source.words_up_to(self.bound, self.kind.word_kind()) {
            let lhs = coproduct_sum(&self.target, self.kind, &self.apply(&w));
            let rhs = self.leibniz_on(&coproduct(&self.source, self.kind, &w));
            let d = lhs.minus(&rhs);
            if !d.is_zero() {
                out.push((w, d));
            }
        }
        out
    }

    /// Words where the comorphism identity `ΔF = (F⊗F)Δ` fails.
    pub fn comorphism_defects(&self) -> Vec<(Word, Tensor2<S>)> {
        let mut out = Vec::new();
        for w in self.source.words_up_to(self.bound, self.kind.word_kind()) {
            let lhs = coproduct_sum(&self.target, self.kind, &self.apply(&w));
            let mut rhs = Tensor2::new();
            for ((a, b), c) in &coproduct::<S>(&self.source, self.kind, &w) {
                for (x, cx) in &self.apply(a) {
                    for (y, cy) in &self.apply(b) {
                        rhs.add_term((x.clone(), y.clone()), cx.clone() * cy.clone() * c.clone());
                    }
                }
            }
            let d = lhs.minus(&rhs);
            if !d.is_zero() {
                out.push((w, d));
            }
        }
        out
    }
}

/// Keep the length-one words of a sum, as a vector.
pub fn project<S: Scalar>(x: &WordSum<S>) -> Vector<S> {
    x.iter().filter(|(w, _)| w.len() == 1).map(|(w, c)| (w[0], c.clone())).collect()
}

/// Coderivation of a truncated coalgebra, materialized from its restrictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedCoderivation<S: Scalar>(WordMap<S>);

impl<S: Scalar> TruncatedCoderivation<S> {
    pub fn lift(r: &dyn Restriction<S>, space: Space, kind: Coalgebra, bound: usize) -> Self {
        let sp = space.clone();
        TruncatedCoderivation(WordMap::tabulate(space.clone(), space, kind, bound, r.degree(), move |w| {
            lift_coderivation(r, &sp, kind, w)
        }))
    }

    /// Trust that `map` is a coderivation (e.g. a commutator of two).
    pub fn from_map_unchecked(map: WordMap<S>) -> Self {
        TruncatedCoderivation(map)
    }

    pub fn map(&self) -> &WordMap<S> {
        &self.0
    }

    pub fn into_map(self) -> WordMap<S> {
        self.0
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(TruncatedCoderivation(self.0.commutator(&other.0)?))
    }

    pub fn shifted_bracket(&self, other: &Self) -> Result<Self> {
        Ok(TruncatedCoderivation(self.0.shifted_bracket(&other.0)?))
    }
}

impl<S: Scalar> std::ops::Deref for TruncatedCoderivation<S> {
    type Target = WordMap<S>;
    fn deref(&self) -> &WordMap<S> {
        &self.0
    }
}

impl<S: Scalar> Restriction<S> for TruncatedCoderivation<S> {
    fn degree(&self) -> i32 {
        self.0.degree
    }
    fn restrict(&self, w: &[usize]) -> Vector<S> {
        self.0.restrict(w)
    }
}

/// Coalgebra morphism between truncated coalgebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedComorphism<S: Scalar>(WordMap<S>);

impl<S: Scalar> TruncatedComorphism<S> {
    pub fn lift(f: &dyn Restriction<S>, source: Space, target: Space, kind: Coalgebra, bound: usize) -> Result<Self> {
        if f.degree() != 0 {
            return Err(AlgebraError::DegreeMismatch(format!(
                "comorphism components must have degree 0, got {}",
                f.degree()
            )));
        }
        let (src, tgt) = (source.clone(), target.clone());
        Ok(TruncatedComorphism(WordMap::tabulate(source, target, kind, bound, 0, move |w| {
            lift_comorphism(f, &src, &tgt, kind, w)
        })))
    }

    pub fn map(&self) -> &WordMap<S> {
        &self.0
    }

    pub fn compose(&self, inner: &Self) -> Result<Self> {
        Ok(TruncatedComorphism(self.0.compose(&inner.0)?))
    }
}

impl<S: Scalar> std::ops::Deref for TruncatedComorphism<S> {
    type Target = WordMap<S>;
    fn deref(&self) -> &WordMap<S> {
        &self.0
    }
}

impl<S: Scalar> Restriction<S> for TruncatedComorphism<S> {
    fn degree(&self) -> i32 {
        0
    }
    fn restrict(&self, w: &[usize]) -> Vector<S> {
        self.0.restrict(w)
    }
}

/// Restriction maps of `[lift_Z(f), lift_Z(g)]_c`, up to arity `bound`.
pub fn balavoine<S: Scalar>(f: &dyn Restriction<S>, g: &dyn Restriction<S>, space: Space, bound: usize) -> Result<WordMap<S>> {
    let a = TruncatedCoderivation::lift(f, space.clone(), Coalgebra::Zinbiel, bound);
    let b = TruncatedCoderivation::lift(g, space, Coalgebra::Zinbiel, bound);
    a.commutator(&b).map(TruncatedCoderivation::into_map)
}

/// `π`: the symmetric-algebra image of an ordered word sum.
pub fn symmetrize_sum<S: Scalar>(space: &GradedSpace, x: &WordSum<S>) -> WordSum<S> {
    let mut out = WordSum::new();
    for (w, c) in x {
        push_normalized(&mut out, space, Coalgebra::Symmetric, w, c.clone());
    }
    out
}
