//! Graded bases, words, permutations, Koszul signs and unshuffles.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{AlgebraError, Result};
use crate::scalar::Sign;

/// One basis element of a graded space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub symbol: String,
    pub degree: i32,
}

/// A finite graded basis. The stored order is the canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    name: String,
    basis: Vec<Generator>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl GradedSpace {
    pub fn new<N: Into<String>, T: Into<String>>(
        name: N,
        basis: impl IntoIterator<Item = (T, i32)>,
    ) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(AlgebraError::InvalidIdentifier(name));
        }
        let mut gens: Vec<Generator> = Vec::new();
        for (sym, degree) in basis {
            let symbol = sym.into();
            if !is_identifier(&symbol) {
                return Err(AlgebraError::InvalidIdentifier(symbol));
            }
            if gens.iter().any(|g| g.symbol == symbol) {
                return Err(AlgebraError::DuplicateSymbol(symbol));
            }
            gens.push(Generator { symbol, degree });
        }
        Ok(GradedSpace { name, basis: gens })
    }

    /// A space whose symbols are not required to be identifiers (used for
    /// derived spaces such as endomorphisms).
    pub(crate) fn new_unchecked(name: String, basis: Vec<Generator>) -> Self {
        GradedSpace { name, basis }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.basis[i].symbol
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.basis.iter().position(|g| g.symbol == symbol)
    }

    pub fn lookup(&self, symbol: &str) -> Result<usize> {
        self.index_of(symbol).ok_or_else(|| AlgebraError::UnknownSymbol {
            space: self.name.clone(),
            symbol: symbol.to_string(),
        })
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim() {
            Ok(())
        } else {
            Err(AlgebraError::IndexOutOfRange { space: self.name.clone(), index: i })
        }
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.degree(i).rem_euclid(2) == 1
    }

    /// Total degree of a word.
    pub fn word_degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&i| self.degree(i) as i64).sum()
    }

    pub fn degrees_of(&self, w: &[usize]) -> Vec<i64> {
        w.iter().map(|&i| self.degree(i) as i64).collect()
    }

    /// Same symbols, every degree moved by `delta`.
    pub fn shifted(&self, name: &str, delta: i32) -> Self {
        GradedSpace {
            name: name.to_string(),
            basis: self
                .basis
                .iter()
                .map(|g| Generator { symbol: g.symbol.clone(), degree: g.degree + delta })
                .collect(),
        }
    }

    pub fn renamed(&self, name: &str) -> Self {
        GradedSpace { name: name.to_string(), basis: self.basis.clone() }
    }

    /// Direct sum: the basis of `a` followed by the basis of `b`. Colliding
    /// symbols get the owning space name as prefix.
    pub fn direct_sum(name: &str, a: &GradedSpace, b: &GradedSpace) -> Self {
        let clash = |s: &str, other: &GradedSpace| other.index_of(s).is_some();
        let mut basis = Vec::with_capacity(a.dim() + b.dim());
        for g in &a.basis {
            let symbol = if clash(&g.symbol, b) {
                format!("{}_{}", a.name, g.symbol)
            } else {
                g.symbol.clone()
            };
            basis.push(Generator { symbol, degree: g.degree });
        }
        for g in &b.basis {
            let symbol = if clash(&g.symbol, a) {
                format!("{}_{}", b.name, g.symbol)
            } else {
                g.symbol.clone()
            };
            basis.push(Generator { symbol, degree: g.degree });
        }
        GradedSpace { name: name.to_string(), basis }
    }

    /// Render a word as space-separated symbols.
    pub fn render(&self, w: &[usize]) -> String {
        w.iter().map(|&i| self.symbol(i)).collect::<Vec<_>>().join(" ")
    }

    /// All ordered words of the given length.
    pub fn ordered_words(&self, len: usize) -> Vec<Word> {
        let d = self.dim();
        let mut out = Vec::new();
        if d == 0 || len == 0 {
            return out;
        }
        let mut cur = vec![0usize; len];
        loop {
            out.push(Word(cur.clone()));
            let mut pos = len;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                cur[pos] += 1;
                if cur[pos] < d {
                    break;
                }
                cur[pos] = 0;
            }
        }
    }

    /// Canonically sorted words of the given length that do not vanish in
    /// the symmetric algebra (no repeated odd letter).
    pub fn sorted_words(&self, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        self.sorted_rec(len, 0, &mut cur, &mut out);
        out
    }

    fn sorted_rec(&self, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) {
        if cur.len() == len {
            if len > 0 {
                out.push(Word(cur.clone()));
            }
            return;
        }
        for i in start..self.dim() {
            let next = if self.is_odd(i) { i + 1 } else { i };
            cur.push(i);
            self.sorted_rec(len, next, cur, out);
            cur.pop();
        }
    }

    /// Words of length `1..=bound` of the given kind.
    pub fn words_up_to(&self, bound: usize, kind: WordKind) -> Vec<Word> {
        (1..=bound)
            .flat_map(|n| match kind {
                WordKind::Ordered => self.ordered_words(n),
                WordKind::Sorted => self.sorted_words(n),
            })
            .collect()
    }
}

/// Which family of basis words to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WordKind {
    /// Basis of the tensor coalgebra.
    Ordered,
    /// Monomial basis of the symmetric coalgebra.
    Sorted,
}

/// A nonempty sequence of basis indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(v: Vec<usize>) -> Self {
        Word(v)
    }

    pub fn single(i: usize) -> Self {
        Word(vec![i])
    }

    pub fn concat(parts: &[&[usize]]) -> Self {
        let mut v = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        for p in parts {
            v.extend_from_slice(p);
        }
        Word(v)
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for Word {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl std::borrow::Borrow<[usize]> for Word {
    fn borrow(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl From<&[usize]> for Word {
    fn from(v: &[usize]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<usize> for Word {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A permutation of `0..n`, acting on words by `(σw)_j = w_{σ(j)}`.
///
/// Displayed with 1-based images, as in `(3 1 2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// From 0-based images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(AlgebraError::NotAPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(AlgebraError::NotAPermutation(images.to_vec()));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// `self ∘ tau`: act by `tau` first, then by `self`.
    pub fn after(&self, tau: &Permutation) -> Result<Permutation> {
        if self.len() != tau.len() {
            return Err(AlgebraError::LengthMismatch { expected: tau.len(), got: self.len() });
        }
        Ok(Permutation { images: self.images.iter().map(|&j| tau.images[j]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { images: inv }
    }

    /// `(σw)_j = w_{σ(j)}`
    pub fn apply<T: Clone>(&self, w: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| w[i].clone()).collect()
    }

    /// Every permutation of `0..n`, in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { images: cur.clone() });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// Koszul sign of reordering a word with the given degrees into `σw`.
pub fn koszul_sign(sigma: &Permutation, degrees: &[i64]) -> Result<Sign> {
    if sigma.len() != degrees.len() {
        return Err(AlgebraError::LengthMismatch { expected: sigma.len(), got: degrees.len() });
    }
    Ok(koszul_sign_of(sigma.images(), degrees))
}

/// Sign for output word `w_{images[0]} w_{images[1]} ...`; one factor
/// `(-1)^{|a||b|}` per inverted pair.
pub(crate) fn koszul_sign_of(images: &[usize], degrees: &[i64]) -> Sign {
    let mut odd = false;
    for a in 0..images.len() {
        let da = degrees[images[a]];
        if da.rem_euclid(2) == 0 {
            continue;
        }
        for b in a + 1..images.len() {
            if images[a] > images[b] && degrees[images[b]].rem_euclid(2) == 1 {
                odd = !odd;
            }
        }
    }
    Sign::from_odd(odd)
}

type ShuffleKey = (Vec<usize>, bool);

fn shuffle_cache() -> &'static Mutex<HashMap<ShuffleKey, Arc<Vec<Permutation>>>> {
    static CACHE: OnceLock<Mutex<HashMap<ShuffleKey, Arc<Vec<Permutation>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Unshuffles for block sizes that may include zeros; memoized.
pub(crate) fn shuffles(blocks: &[usize], increasing: bool) -> Arc<Vec<Permutation>> {
    let key = (blocks.to_vec(), increasing);
    if let Some(hit) = shuffle_cache().lock().expect("shuffle cache poisoned").get(&key) {
        return hit.clone();
    }
    let all = enumerate_unshuffles(blocks);
    let list = if increasing {
        all.into_iter().filter(|s| is_increasing(s, blocks)).collect()
    } else {
        all
    };
    let list = Arc::new(list);
    shuffle_cache().lock().expect("shuffle cache poisoned").insert(key, list.clone());
    list
}

fn enumerate_unshuffles(blocks: &[usize]) -> Vec<Permutation> {
    let n: usize = blocks.iter().sum();
    let mut out = Vec::new();
    let mut mask = Vec::with_capacity(n);
    let mut room = blocks.to_vec();
    fn rec(n: usize, mask: &mut Vec<usize>, room: &mut [usize], blocks: &[usize], out: &mut Vec<Permutation>) {
        if mask.len() == n {
            let mut images = Vec::with_capacity(n);
            for b in 0..blocks.len() {
                images.extend(mask.iter().enumerate().filter(|(_, &m)| m == b).map(|(i, _)| i));
            }
            out.push(Permutation { images });
            return;
        }
        for b in 0..room.len() {
            if room[b] > 0 {
                room[b] -= 1;
                mask.push(b);
                rec(n, mask, room, blocks, out);
                mask.pop();
                room[b] += 1;
            }
        }
    }
    rec(n, &mut mask, &mut room, blocks, &mut out);
    out
}

fn is_increasing(sigma: &Permutation, blocks: &[usize]) -> bool {
    let mut last = None;
    let mut end = 0;
    for &b in blocks {
        end += b;
        if b == 0 {
            continue;
        }
        let top = sigma.images[end - 1];
        if let Some(prev) = last {
            if top <= prev {
                return false;
            }
        }
        last = Some(top);
    }
    true
}

fn check_blocks(blocks: &[usize]) -> Result<()> {
    if blocks.is_empty() {
        return Err(AlgebraError::Precondition("at least one block is required".into()));
    }
    if blocks.contains(&0) {
        return Err(AlgebraError::Precondition("block sizes must be positive".into()));
    }
    Ok(())
}

/// `Sh(i1,...,ik)`, in lexicographic order of the block-membership mask.
pub fn unshuffles(blocks: &[usize]) -> Result<Vec<Permutation>> {
    check_blocks(blocks)?;
    Ok(shuffles(blocks, false).as_ref().clone())
}

/// The unshuffles whose block maxima increase.
pub fn increasing_unshuffles(blocks: &[usize]) -> Result<Vec<Permutation>> {
    check_blocks(blocks)?;
    Ok(shuffles(blocks, true).as_ref().clone())
}

/// All compositions of `n` into positive parts.
pub(crate) fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Sort a word into canonical basis order, with the Koszul sign of the
/// sorting permutation.
pub fn canonical_sort(space: &GradedSpace, w: &[usize]) -> (Word, Sign) {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by_key(|&j| w[j]);
    let sign = koszul_sign_of(&idx, &space.degrees_of(w));
    (idx.iter().map(|&j| w[j]).collect(), sign)
}

/// Normal form in the symmetric algebra: `None` when an odd letter repeats.
pub fn symmetric_normal_form(space: &GradedSpace, w: &[usize]) -> Option<(Word, Sign)> {
    let (sorted, sign) = canonical_sort(space, w);
    if sorted.windows(2).any(|p| p[0] == p[1] && space.is_odd(p[0])) {
        None
    } else {
        Some((sorted, sign))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(degs: &[i32]) -> GradedSpace {
        GradedSpace::new("V", degs.iter().enumerate().map(|(i, &d)| (format!("v{i}"), d))).unwrap()
    }

    #[test]
    fn koszul_examples() {
        let id = Permutation::identity(3);
        assert_eq!(koszul_sign(&id, &[1, 1, 1]).unwrap(), Sign::PLUS);
        let t = Permutation::from_one_based(&[2, 1]).unwrap();
        assert_eq!(koszul_sign(&t, &[1, 1]).unwrap(), Sign::MINUS);
        let c = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert_eq!(koszul_sign(&c, &[1, 1, 1]).unwrap(), Sign::PLUS);
        assert!(koszul_sign(&c, &[1, 1]).is_err());
    }

    #[test]
    fn permutation_display_and_action() {
        let c = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert_eq!(c.to_string(), "(3 1 2)");
        assert_eq!(c.apply(&['a', 'b', 'c']), vec!['c', 'a', 'b']);
        assert_eq!(c.after(&c.inverse()).unwrap(), Permutation::identity(3));
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn unshuffle_counts() {
        assert_eq!(unshuffles(&[3]).unwrap(), vec![Permutation::identity(3)]);
        assert_eq!(unshuffles(&[1, 2]).unwrap().len(), 3);
        assert_eq!(unshuffles(&[2, 2]).unwrap().len(), 6);
        assert_eq!(increasing_unshuffles(&[1, 1]).unwrap(), vec![Permutation::identity(2)]);
        assert_eq!(increasing_unshuffles(&[1, 2]).unwrap().len(), 2);
        assert_eq!(increasing_unshuffles(&[4]).unwrap(), vec![Permutation::identity(4)]);
        assert!(unshuffles(&[]).is_err());
        assert!(unshuffles(&[1, 0]).is_err());
    }

    #[test]
    fn unshuffle_order_follows_mask() {
        let list: Vec<String> = unshuffles(&[1, 2]).unwrap().iter().map(|p| p.to_string()).collect();
        // masks 011, 101, 110
        assert_eq!(list, vec!["(1 2 3)", "(2 1 3)", "(3 1 2)"]);
    }

    #[test]
    fn sorting_signs() {
        let even = space(&[0, 0]);
        assert_eq!(canonical_sort(&even, &[1, 0]), (Word(vec![0, 1]), Sign::PLUS));
        let odd = space(&[1, 1]);
        assert_eq!(canonical_sort(&odd, &[1, 0]), (Word(vec![0, 1]), Sign::MINUS));
        assert_eq!(canonical_sort(&odd, &[0, 1]), (Word(vec![0, 1]), Sign::PLUS));
        assert!(symmetric_normal_form(&odd, &[1, 1]).is_none());
        assert!(symmetric_normal_form(&even, &[1, 1]).is_some());
    }

    #[test]
    fn word_enumeration() {
        let v = space(&[1, 0]);
        assert_eq!(v.ordered_words(3).len(), 8);
        // v0 odd: v0 v1, v1 v1 ; v0 v0 is excluded
        assert_eq!(v.sorted_words(2), vec![Word(vec![0, 1]), Word(vec![1, 1])]);
        assert_eq!(v.words_up_to(2, WordKind::Ordered).len(), 6);
    }

    #[test]
    fn space_validation() {
        assert!(GradedSpace::new("V", [("a", 0), ("a", 1)]).is_err());
        assert!(GradedSpace::new("V", [("1a", 0)]).is_err());
        let a = GradedSpace::new("E", [("x", 0), ("p", 1)]).unwrap();
        let b = GradedSpace::new("V", [("p", 0)]).unwrap();
        let s = GradedSpace::direct_sum("S", &a, &b);
        assert_eq!(s.symbol(1), "E_p");
        assert_eq!(s.symbol(2), "V_p");
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4).len(), 8);
    }
}
