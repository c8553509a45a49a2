//! Graded multilinear maps stored as exact structure constants.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::graded::{canonical_sort, symmetric_normal_form, GradedSpace, Permutation, Word};
use crate::linear::Comb;
use crate::scalar::{Scalar, Sign};

/// Shared handle to a graded space.
pub type Space = Arc<GradedSpace>;

/// Vector in a graded space.
pub type Vector<S> = Comb<usize, S>;

/// Formal sum of words.
pub type WordSum<S> = Comb<Word, S>;

/// Symmetry type of a multilinear map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Graded symmetric; keys are canonically sorted words.
    Symmetric,
    /// No symmetry; keys are ordered words.
    Plain,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Symmetric => "symmetric",
            Flavor::Plain => "plain",
        }
    }
}

/// A homogeneous multilinear map `source^{⊗arity} → target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap<S: Scalar> {
    source: Space,
    target: Space,
    arity: usize,
    degree: i32,
    flavor: Flavor,
    constants: BTreeMap<Word, Vector<S>>,
}

impl<S: Scalar> MultiMap<S> {
    pub fn new(source: Space, target: Space, arity: usize, degree: i32, flavor: Flavor) -> Result<Self> {
        if arity == 0 {
            return Err(AlgebraError::ZeroArity);
        }
        Ok(MultiMap { source, target, arity, degree, flavor, constants: BTreeMap::new() })
    }

    pub fn zero(source: Space, target: Space, arity: usize, degree: i32, flavor: Flavor) -> Self {
        Self::new(source, target, arity.max(1), degree, flavor).expect("positive arity")
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn is_zero(&self) -> bool {
        self.constants.is_empty()
    }

    /// Stored constants: input word to output vector.
    pub fn constants(&self) -> &BTreeMap<Word, Vector<S>> {
        &self.constants
    }

    fn check_key(&self, w: &[usize], out: usize) -> Result<()> {
        if w.len() != self.arity {
            return Err(AlgebraError::ArityMismatch { expected: self.arity, got: w.len() });
        }
        for &i in w {
            self.source.check_index(i)?;
        }
        self.target.check_index(out)?;
        let want = self.degree as i64 + self.source.word_degree(w);
        let got = self.target.degree(out) as i64;
        if want != got {
            return Err(AlgebraError::DegreeMismatch(format!(
                "{} -> {} needs output degree {want}, `{}` has degree {got}",
                self.source.render(w),
                self.target.symbol(out),
                self.target.symbol(out),
            )));
        }
        Ok(())
    }

    /// Add `c · out` to the value on `w`. Symmetric maps demand a canonical key.
    pub fn insert(&mut self, w: &[usize], out: usize, c: S) -> Result<()> {
        self.check_key(w, out)?;
        if self.flavor == Flavor::Symmetric {
            let (sorted, _) = canonical_sort(&self.source, w);
            if sorted.as_ref() != w {
                return Err(AlgebraError::NonCanonicalKey(self.source.render(w)));
            }
            if symmetric_normal_form(&self.source, w).is_none() {
                return Err(AlgebraError::RepeatedOddLetter(self.source.render(w)));
            }
        }
        self.add_raw(Word::from(w), out, c);
        Ok(())
    }

    /// Like [`insert`](Self::insert) but sorts symmetric keys, applying the
    /// Koszul sign. Words that vanish are ignored.
    pub fn insert_normalized(&mut self, w: &[usize], out: usize, c: S) -> Result<()> {
        self.check_key(w, out)?;
        match self.flavor {
            Flavor::Plain => self.add_raw(Word::from(w), out, c),
            Flavor::Symmetric => {
                if let Some((sorted, sign)) = symmetric_normal_form(&self.source, w) {
                    self.add_raw(sorted, out, sign.apply(c));
                }
            }
        }
        Ok(())
    }

    fn add_raw(&mut self, w: Word, out: usize, c: S) {
        let entry = self.constants.entry(w.clone()).or_default();
        entry.add_term(out, c);
        if entry.is_zero() {
            self.constants.remove(&w);
        }
    }

    /// Value on an arbitrary word of the right length.
    pub fn eval(&self, w: &[usize]) -> Vector<S> {
        debug_assert_eq!(w.len(), self.arity);
        match self.flavor {
            Flavor::Plain => self.constants.get(w).cloned().unwrap_or_default(),
            Flavor::Symmetric => match symmetric_normal_form(&self.source, w) {
                None => Vector::new(),
                Some((sorted, sign)) => match self.constants.get(&sorted) {
                    None => Vector::new(),
                    Some(v) => v.signed(sign),
                },
            },
        }
    }

    pub fn eval_checked(&self, w: &[usize]) -> Result<Vector<S>> {
        if w.len() != self.arity {
            return Err(AlgebraError::ArityMismatch { expected: self.arity, got: w.len() });
        }
        for &i in w {
            self.source.check_index(i)?;
        }
        Ok(self.eval(w))
    }

    /// Evaluate on a word whose entries are vectors, expanding multilinearly.
    pub fn eval_vectors(&self, args: &[Vector<S>]) -> Vector<S> {
        let mut out = Vector::new();
        expand_words(args, &mut |w, c| out.add_scaled(&self.eval(w), c));
        out
    }

    /// `F^S(w) = (1/k!) Σ_σ ε(σ) F(σw)`, stored on sorted keys.
    pub fn symmetrize(&self) -> MultiMap<S> {
        let mut out = MultiMap { constants: BTreeMap::new(), flavor: Flavor::Symmetric, ..self.clone() };
        let perms = Permutation::all(self.arity);
        let weight = S::inv_factorial(self.arity);
        for w in self.source.sorted_words(self.arity) {
            let degs = self.source.degrees_of(&w);
            let mut acc = Vector::new();
            for p in &perms {
                let sign = crate::graded::koszul_sign_of(p.images(), &degs);
                acc.add_scaled(&self.eval(&p.apply(&w)), &sign.apply(weight.clone()));
            }
            if !acc.is_zero() {
                out.constants.insert(w, acc);
            }
        }
        out
    }

    /// Expand into a plain map with a constant on every ordered word.
    pub fn to_plain(&self) -> MultiMap<S> {
        if self.flavor == Flavor::Plain {
            return self.clone();
        }
        let mut out = MultiMap { constants: BTreeMap::new(), flavor: Flavor::Plain, ..self.clone() };
        for w in self.source.ordered_words(self.arity) {
            let v = self.eval(&w);
            if !v.is_zero() {
                out.constants.insert(w, v);
            }
        }
        out
    }

    /// Whether the values are graded symmetric.
    pub fn is_symmetric(&self) -> bool {
        match self.flavor {
            Flavor::Symmetric => true,
            Flavor::Plain => self.source.ordered_words(self.arity).into_iter().all(|w| {
                let v = self.eval(&w);
                match symmetric_normal_form(&self.source, &w) {
                    None => v.is_zero(),
                    Some((sorted, sign)) => v == self.eval(&sorted).signed(sign),
                }
            }),
        }
    }

    /// Reinterpret a graded-symmetric plain map as a symmetric one.
    pub fn to_symmetric(&self) -> Result<MultiMap<S>> {
        if !self.is_symmetric() {
            return Err(AlgebraError::FlavorMismatch("map is not graded symmetric".into()));
        }
        let mut out = MultiMap { constants: BTreeMap::new(), flavor: Flavor::Symmetric, ..self.clone() };
        for w in self.source.sorted_words(self.arity) {
            let v = self.eval(&w);
            if !v.is_zero() {
                out.constants.insert(w, v);
            }
        }
        Ok(out)
    }

    /// Same constants with a new source or target space of the same shape.
    pub fn relabel(&self, source: Space, target: Space) -> Result<MultiMap<S>> {
        if source.dim() != self.source.dim() || target.dim() != self.target.dim() {
            return Err(AlgebraError::SpaceMismatch {
                expected: self.source.name().to_string(),
                got: source.name().to_string(),
            });
        }
        Ok(MultiMap { source, target, ..self.clone() })
    }

    pub fn add(&self, other: &MultiMap<S>) -> Result<MultiMap<S>> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (w, v) in &other.constants {
            for (o, c) in v {
                out.add_raw(w.clone(), *o, c.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> MultiMap<S> {
        let mut out = MultiMap { constants: BTreeMap::new(), ..self.clone() };
        for (w, v) in &self.constants {
            let s = v.scaled(c);
            if !s.is_zero() {
                out.constants.insert(w.clone(), s);
            }
        }
        out
    }

    fn same_shape(&self, other: &MultiMap<S>) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(AlgebraError::SpaceMismatch {
                expected: self.source.name().to_string(),
                got: other.source.name().to_string(),
            });
        }
        if self.arity != other.arity {
            return Err(AlgebraError::ArityMismatch { expected: self.arity, got: other.arity });
        }
        if self.degree != other.degree {
            return Err(AlgebraError::DegreeMismatch(format!("{} vs {}", self.degree, other.degree)));
        }
        if self.flavor != other.flavor {
            return Err(AlgebraError::FlavorMismatch("cannot add maps of different flavors".into()));
        }
        Ok(())
    }
}

/// Expand a word of vectors into basis words, calling `f(word, coefficient)`.
pub fn expand_words<S: Scalar>(args: &[Vector<S>], f: &mut dyn FnMut(&[usize], &S)) {
    let mut cur = Vec::with_capacity(args.len());
    fn rec<S: Scalar>(args: &[Vector<S>], cur: &mut Vec<usize>, c: S, f: &mut dyn FnMut(&[usize], &S)) {
        if cur.len() == args.len() {
            f(cur, &c);
            return;
        }
        for (i, ci) in &args[cur.len()] {
            cur.push(*i);
            rec(args, cur, c.clone() * ci.clone(), f);
            cur.pop();
        }
    }
    rec(args, &mut cur, S::one(), f);
}

/// Something that provides the restriction maps `p ∘ X` of a coderivation or
/// comorphism on every word.
pub trait Restriction<S: Scalar> {
    /// Degree of every restriction map.
    fn degree(&self) -> i32;
    /// Value on a word of any positive length.
    fn restrict(&self, w: &[usize]) -> Vector<S>;
}

/// Restrictions given by a closure.
pub struct FnRestriction<F> {
    degree: i32,
    f: F,
}

impl<F> FnRestriction<F> {
    pub fn new(degree: i32, f: F) -> Self {
        FnRestriction { degree, f }
    }
}

impl<S: Scalar, F: Fn(&[usize]) -> Vector<S>> Restriction<S> for FnRestriction<F> {
    fn degree(&self) -> i32 {
        self.degree
    }
    fn restrict(&self, w: &[usize]) -> Vector<S> {
        (self.f)(w)
    }
}

/// Arity-indexed family of maps of a common degree; maps above the
/// declared maximal arity vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family<S: Scalar> {
    source: Space,
    target: Space,
    degree: i32,
    flavor: Flavor,
    maps: Vec<MultiMap<S>>,
}

impl<S: Scalar> Family<S> {
    pub fn new(source: Space, target: Space, degree: i32, flavor: Flavor, max_arity: usize) -> Self {
        let maps = (1..=max_arity)
            .map(|k| MultiMap::zero(source.clone(), target.clone(), k, degree, flavor))
            .collect();
        Family { source, target, degree, flavor, maps }
    }

    /// Build from maps of arities `1..=n` in order.
    pub fn from_maps(source: Space, target: Space, degree: i32, flavor: Flavor, maps: Vec<MultiMap<S>>) -> Result<Self> {
        for (i, m) in maps.iter().enumerate() {
            if m.arity() != i + 1 {
                return Err(AlgebraError::ArityMismatch { expected: i + 1, got: m.arity() });
            }
            if m.degree() != degree {
                return Err(AlgebraError::DegreeMismatch(format!(
                    "arity {} has degree {}, family degree is {degree}",
                    m.arity(),
                    m.degree()
                )));
            }
            if m.source() != &source || m.target() != &target {
                return Err(AlgebraError::SpaceMismatch {
                    expected: source.name().to_string(),
                    got: m.source().name().to_string(),
                });
            }
            if m.flavor() != flavor {
                return Err(AlgebraError::FlavorMismatch(format!("arity {} is {}", m.arity(), m.flavor().as_str())));
            }
        }
        Ok(Family { source, target, degree, flavor, maps })
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn max_arity(&self) -> usize {
        self.maps.len()
    }

    /// Largest arity carrying a nonzero map.
    pub fn top_arity(&self) -> usize {
        self.maps.iter().rposition(|m| !m.is_zero()).map_or(0, |i| i + 1)
    }

    pub fn maps(&self) -> &[MultiMap<S>] {
        &self.maps
    }

    pub fn map(&self, k: usize) -> Option<&MultiMap<S>> {
        k.checked_sub(1).and_then(|i| self.maps.get(i))
    }

    pub fn extend_to(&mut self, max_arity: usize) {
        while self.maps.len() < max_arity {
            let k = self.maps.len() + 1;
            self.maps.push(MultiMap::zero(self.source.clone(), self.target.clone(), k, self.degree, self.flavor));
        }
    }

    pub fn insert(&mut self, w: &[usize], out: usize, c: S) -> Result<()> {
        self.extend_to(w.len());
        self.maps[w.len() - 1].insert(w, out, c)
    }

    pub fn insert_normalized(&mut self, w: &[usize], out: usize, c: S) -> Result<()> {
        self.extend_to(w.len());
        self.maps[w.len() - 1].insert_normalized(w, out, c)
    }

    pub fn eval(&self, w: &[usize]) -> Vector<S> {
        match self.map(w.len()) {
            Some(m) => m.eval(w),
            None => Vector::new(),
        }
    }

    /// Evaluate the component of arity `args.len()` on vector arguments.
    pub fn eval_vectors(&self, args: &[Vector<S>]) -> Vector<S> {
        match self.map(args.len()) {
            Some(m) => m.eval_vectors(args),
            None => Vector::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| m.is_zero())
    }

    pub fn to_plain(&self) -> Family<S> {
        Family {
            flavor: Flavor::Plain,
            maps: self.maps.iter().map(|m| m.to_plain()).collect(),
            ..self.clone()
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.maps.iter().all(|m| m.is_symmetric())
    }

    pub fn to_symmetric(&self) -> Result<Family<S>> {
        Ok(Family {
            flavor: Flavor::Symmetric,
            maps: self.maps.iter().map(|m| m.to_symmetric()).collect::<Result<_>>()?,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &S) -> Family<S> {
        Family { maps: self.maps.iter().map(|m| m.scale(c)).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Family<S>) -> Result<Family<S>> {
        let mut a = self.clone();
        let mut b = other.clone();
        let n = a.max_arity().max(b.max_arity());
        a.extend_to(n);
        b.extend_to(n);
        let maps = a.maps.iter().zip(&b.maps).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
        Ok(Family { maps, ..a })
    }

    /// Equality of values on all words up to `bound`, regardless of flavor
    /// and declared arity.
    pub fn same_values(&self, other: &Family<S>, bound: usize) -> bool {
        (1..=bound).all(|n| self.source.ordered_words(n).iter().all(|w| self.eval(w) == other.eval(w)))
    }
}

impl<S: Scalar> Restriction<S> for Family<S> {
    fn degree(&self) -> i32 {
        self.degree
    }
    fn restrict(&self, w: &[usize]) -> Vector<S> {
        self.eval(w)
    }
}

impl<S: Scalar, R: Restriction<S> + ?Sized> Restriction<S> for &R {
    fn degree(&self) -> i32 {
        (**self).degree()
    }
    fn restrict(&self, w: &[usize]) -> Vector<S> {
        (**self).restrict(w)
    }
}

fn check_shift(base: &GradedSpace, shifted: &GradedSpace) -> Result<()> {
    if base.dim() != shifted.dim() {
        return Err(AlgebraError::ShiftMismatch(format!(
            "`{}` has dimension {}, `{}` has {}",
            base.name(),
            base.dim(),
            shifted.name(),
            shifted.dim()
        )));
    }
    for i in 0..base.dim() {
        if shifted.degree(i) != base.degree(i) + 1 {
            return Err(AlgebraError::ShiftMismatch(format!(
                "`{}` must have degree {} in `{}`",
                shifted.symbol(i),
                base.degree(i) + 1,
                shifted.name()
            )));
        }
    }
    Ok(())
}

/// Sign of `⊗^k u` applied to a word, for a degree-odd map `u` (`s` or `s⁻¹`):
/// `(-1)^{Σ_i (k-i)|a_i|}` with `i` counted from 1.
fn suspension_sign(degrees: &[i64]) -> Sign {
    let k = degrees.len() as i64;
    let total: i64 = degrees.iter().enumerate().map(|(i, d)| (k - 1 - i as i64) * d).sum();
    Sign::pow(total)
}

/// `q_k = s ∘ Q_k ∘ ⊗^k s⁻¹` for a map `Q_k` on `base`; `shifted` is `s base`
/// (same symbols, degrees raised by one). The result is plain.
pub fn decalage<S: Scalar>(map: &MultiMap<S>, shifted: Space) -> Result<MultiMap<S>> {
    if map.source() != map.target() {
        return Err(AlgebraError::ShiftMismatch("décalage needs an endomorphic map".into()));
    }
    check_shift(map.source(), &shifted)?;
    let k = map.arity();
    let mut out = MultiMap::new(shifted.clone(), shifted.clone(), k, map.degree() + 1 - k as i32, Flavor::Plain)?;
    for w in shifted.ordered_words(k) {
        let sign = suspension_sign(&shifted.degrees_of(&w));
        for (o, c) in &map.eval(&w) {
            out.insert(&w, *o, sign.apply(c.clone()))?;
        }
    }
    Ok(out)
}

/// `Q_k = (-1)^{k(k-1)/2} s⁻¹ ∘ q_k ∘ ⊗^k s`, the inverse of [`decalage`].
pub fn inverse_decalage<S: Scalar>(map: &MultiMap<S>, base: Space) -> Result<MultiMap<S>> {
    if map.source() != map.target() {
        return Err(AlgebraError::ShiftMismatch("décalage needs an endomorphic map".into()));
    }
    check_shift(&base, map.source())?;
    let k = map.arity();
    let global = Sign::pow((k * (k - 1) / 2) as i64);
    let mut out = MultiMap::new(base.clone(), base.clone(), k, map.degree() - 1 + k as i32, Flavor::Plain)?;
    for w in base.ordered_words(k) {
        let sign = global * suspension_sign(&base.degrees_of(&w));
        for (o, c) in &map.eval(&w) {
            out.insert(&w, *o, sign.apply(c.clone()))?;
        }
    }
    Ok(out)
}
