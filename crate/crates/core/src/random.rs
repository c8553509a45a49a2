//! Seeded generators of structures, actions and tensors over small rationals.
//!
//! Constructions that must satisfy an identity (actions, coherent actions,
//! embedding tensors) are solved for exactly as nullspaces of the linear
//! conditions and then sampled from the solution space.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{restricted_commutator, sorted_words_upto, ActionFamily};
use crate::fixtures;
use crate::graded::{symmetric_normal_form, GradedSpace, Word};
use crate::homotopy::HomotopyStructure;
use crate::linear::nullspace;
use crate::multimap::{Family, Flavor, FnRestriction, MultiMap, Restriction, Space, Vector};
use crate::scalar::Scalar;
use crate::tensor::{centroid_basis, EmbeddingTensor};

/// Degrees are drawn from this range.
pub const DEGREES: std::ops::RangeInclusive<i32> = -2..=1;

const SMALL: [(i64, i64); 6] = [(1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1)];

/// `{0, ±1, ±1/2}`: the parameter sweep for deformation checks.
pub fn sweep<S: Scalar>() -> Vec<S> {
    [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2)].iter().map(|&(n, d)| S::frac(n, d)).collect()
}

/// How an action was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    /// `x` odd and central in `E`, `Φ_x` a random solution of `[M_V, Φ_x]_c = 0`.
    CentralKernel,
    /// The adjoint action of `E` on itself.
    Adjoint,
    /// The adjoint representation of `E` on `(E, l_1)`.
    Representation,
    /// Unary `Φ_x` also solving `[ad_v, Φ_x]_c = 0`: coherent by construction.
    Coherent,
    /// Unary `Φ_x` solving the action condition whose image is not central.
    NonCentral,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] =
        [ActionKind::CentralKernel, ActionKind::Adjoint, ActionKind::Representation, ActionKind::Coherent, ActionKind::NonCentral];

    pub fn label(self) -> &'static str {
        match self {
            ActionKind::CentralKernel => "central-kernel",
            ActionKind::Adjoint => "adjoint",
            ActionKind::Representation => "representation",
            ActionKind::Coherent => "coherent",
            ActionKind::NonCentral => "non-central",
        }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A nonzero small rational.
    pub fn scalar<S: Scalar>(&mut self) -> S {
        let (n, d) = *SMALL.choose(&mut self.rng).expect("nonempty");
        S::frac(n, d)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    fn degree(&mut self) -> i32 {
        self.rng.gen_range(DEGREES)
    }

    /// A space with symbols `prefix0, prefix1, …` and random degrees.
    pub fn space(&mut self, name: &str, prefix: &str, dim: usize) -> Space {
        let gens: Vec<(String, i32)> = (0..dim).map(|i| (format!("{prefix}{i}"), self.degree())).collect();
        Arc::new(GradedSpace::new(name, gens).expect("generated symbols are valid"))
    }

    /// Brackets all landing in a central block `Z`: a 2-step nilpotent
    /// structure with `m_1 = 0` and `m_2, m_3` from `U` into `Z`.
    pub fn nilpotent<S: Scalar>(&mut self, name: &str, prefix: &str, dim: usize) -> HomotopyStructure<S> {
        let z_dim = 1 + self.below(dim.max(2) - 1).min(dim - 1);
        let u_dim = dim - z_dim;
        let u_degs: Vec<i32> = (0..u_dim).map(|_| self.degree()).collect();
        // degrees reachable by a bracket of U-letters
        let mut reachable = Vec::new();
        for i in 0..u_dim {
            for j in i..u_dim {
                reachable.push(u_degs[i] + u_degs[j] + 1);
                for k in j..u_dim {
                    reachable.push(u_degs[i] + u_degs[j] + u_degs[k] + 1);
                }
            }
        }
        reachable.retain(|d| DEGREES.contains(d));
        let mut gens: Vec<(String, i32)> = u_degs.iter().enumerate().map(|(i, &d)| (format!("{prefix}{i}"), d)).collect();
        for i in 0..z_dim {
            let d = match reachable.choose(&mut self.rng) {
                Some(&d) if self.chance(0.8) => d,
                _ => self.degree(),
            };
            gens.push((format!("{prefix}{}", u_dim + i), d));
        }
        let space = Arc::new(GradedSpace::new(name, gens).expect("generated symbols are valid"));
        let u = GradedSpace::new("U", (0..u_dim).map(|i| (format!("u{i}"), u_degs[i]))).expect("valid");
        let mut f = Family::new(space.clone(), space.clone(), 1, Flavor::Symmetric, 3);
        for k in 2..=3 {
            for w in u.sorted_words(k) {
                for z in u_dim..dim {
                    if space.degree(z) as i64 == space.word_degree(&w) + 1 && self.chance(0.6) {
                        f.insert(&w, z, self.scalar()).expect("degree checked");
                    }
                }
            }
        }
        HomotopyStructure::new(f).expect("symmetric family")
    }

    /// A complex: `m_1` only, with `m_1^2 = 0` because no target is a source.
    pub fn complex<S: Scalar>(&mut self, name: &str, prefix: &str, dim: usize) -> HomotopyStructure<S> {
        let space = self.space(name, prefix, dim);
        let mut f = Family::new(space.clone(), space.clone(), 1, Flavor::Symmetric, 1);
        let mut used_as_target = vec![false; dim];
        let mut used_as_source = vec![false; dim];
        for a in 0..dim {
            for b in 0..dim {
                if a != b
                    && space.degree(b) == space.degree(a) + 1
                    && !used_as_target[a]
                    && !used_as_source[b]
                    && self.chance(0.7)
                {
                    f.insert(&[a], b, self.scalar()).expect("degree checked");
                    used_as_source[a] = true;
                    used_as_target[b] = true;
                }
            }
        }
        HomotopyStructure::new(f).expect("symmetric family")
    }

    /// Random constants for a map of the given arity and degree.
    pub fn multimap<S: Scalar>(&mut self, space: &Space, arity: usize, degree: i32, flavor: Flavor, density: f64) -> MultiMap<S> {
        let mut m = MultiMap::zero(space.clone(), space.clone(), arity, degree, flavor);
        let words = match flavor {
            Flavor::Symmetric => space.sorted_words(arity),
            Flavor::Plain => space.ordered_words(arity),
        };
        for w in words {
            for o in 0..space.dim() {
                if space.degree(o) as i64 == space.word_degree(&w) + degree as i64 && self.chance(density) {
                    m.insert(&w, o, self.scalar()).expect("degree checked");
                }
            }
        }
        m
    }

    /// Random restriction maps of arities `1..=max_arity`.
    pub fn family<S: Scalar>(&mut self, space: &Space, degree: i32, flavor: Flavor, max_arity: usize, density: f64) -> Family<S> {
        let maps = (1..=max_arity).map(|k| self.multimap(space, k, degree, flavor, density)).collect();
        Family::from_maps(space.clone(), space.clone(), degree, flavor, maps).expect("consistent maps")
    }

    /// One of: abelian, a complex, 2-step nilpotent, or a named algebra.
    pub fn lie_algebra<S: Scalar>(&mut self, name: &str, prefix: &str, max_dim: usize) -> HomotopyStructure<S> {
        let dim = 1 + self.below(max_dim);
        let named: Vec<HomotopyStructure<S>> = match max_dim {
            0 | 1 => vec![],
            2 => vec![fixtures::two_dim()],
            _ => vec![fixtures::two_dim(), fixtures::sl2(), fixtures::heisenberg_algebra()],
        };
        match self.below(4) {
            0 => HomotopyStructure::abelian(self.space(name, prefix, dim), Flavor::Symmetric, 2),
            1 => self.complex(name, prefix, dim),
            2 if !named.is_empty() => {
                let l = named.choose(&mut self.rng).expect("nonempty").clone();
                l.renamed(name).expect("same shape")
            }
            _ if dim >= 2 => self.nilpotent(name, prefix, dim),
            _ => self.complex(name, prefix, dim),
        }
    }

    /// `E = ⟨x⟩ ⊕ E'` with `x` odd and central.
    fn central_extension<S: Scalar>(&mut self, max_dim: usize) -> HomotopyStructure<S> {
        let x_deg = if self.chance(0.8) { -1 } else { 1 };
        let rest = if max_dim > 1 && self.chance(0.6) { Some(self.lie_algebra::<S>("Ep", "y", max_dim - 1)) } else { None };
        let mut gens = vec![("x".to_string(), x_deg)];
        if let Some(r) = &rest {
            gens.extend(r.space().basis().iter().map(|g| (g.symbol.clone(), g.degree)));
        }
        let space = Arc::new(GradedSpace::new("E", gens).expect("valid"));
        let mut f = Family::new(space.clone(), space.clone(), 1, Flavor::Symmetric, 2);
        if let Some(r) = &rest {
            for (k, m) in r.brackets().maps().iter().enumerate() {
                f.extend_to(k + 1);
                for (w, out) in m.constants() {
                    let shifted: Vec<usize> = w.iter().map(|i| i + 1).collect();
                    for (o, c) in out {
                        f.insert(&shifted, o + 1, c.clone()).expect("same degrees");
                    }
                }
            }
        }
        HomotopyStructure::new(f).expect("symmetric family")
    }

    fn target_algebra<S: Scalar>(&mut self, max_dim: usize) -> HomotopyStructure<S> {
        match self.below(3) {
            0 if max_dim >= 3 => fixtures::heisenberg_algebra(),
            1 if max_dim >= 2 => {
                let dim = 2 + self.below(max_dim - 1);
                self.nilpotent("V", "v", dim)
            }
            _ => self.lie_algebra("V", "v", max_dim),
        }
    }

    /// A random action of the given kind with `dim E, dim V ≤ max_dim`;
    /// `None` when the sampled data admit no action of that kind.
    pub fn action<S: Scalar>(&mut self, kind: ActionKind, max_dim: usize, bound: usize) -> Option<ActionFamily<S>> {
        match kind {
            ActionKind::Adjoint => {
                let e = self.lie_algebra::<S>("E", "e", max_dim);
                ActionFamily::adjoint(e).ok()
            }
            ActionKind::Representation => {
                let e = self.lie_algebra::<S>("E", "e", max_dim);
                ActionFamily::adjoint_representation(e).ok()
            }
            ActionKind::CentralKernel => {
                let e = self.central_extension::<S>(max_dim);
                let v = self.target_algebra::<S>(max_dim);
                let max_k = if self.chance(0.5) { 2 } else { 1 };
                let basis = derivation_kernel(&e, &v, max_k, bound, false);
                self.combine_into_action(e, v, &basis)
            }
            ActionKind::Coherent => {
                let e = self.central_extension::<S>(max_dim);
                let v = self.target_algebra::<S>(max_dim);
                let basis = derivation_kernel(&e, &v, 1, bound, true);
                self.combine_into_action(e, v, &basis)
            }
            ActionKind::NonCentral => {
                let e = self.central_extension::<S>(max_dim);
                let v = self.target_algebra::<S>(max_dim);
                let basis = derivation_kernel(&e, &v, 1, bound, false);
                for _ in 0..8 {
                    let phi = self.combine_into_action(e.clone(), v.clone(), &basis)?;
                    if !image_is_central(&phi, bound) {
                        return Some(phi);
                    }
                }
                None
            }
        }
    }

    fn combine_into_action<S: Scalar>(
        &mut self,
        e: HomotopyStructure<S>,
        v: HomotopyStructure<S>,
        basis: &[BTreeMap<(Word, usize), S>],
    ) -> Option<ActionFamily<S>> {
        if basis.is_empty() {
            return None;
        }
        let mut d: BTreeMap<(Word, usize), S> = BTreeMap::new();
        for b in basis {
            if self.chance(0.7) {
                let c: S = self.scalar();
                for (k, x) in b {
                    let slot = d.entry(k.clone()).or_insert_with(S::zero);
                    *slot = slot.clone() + c.clone() * x.clone();
                }
            }
        }
        d.retain(|_, c| !c.is_zero());
        if d.is_empty() {
            return None;
        }
        let mut phi = ActionFamily::new(e, v).ok()?;
        for ((w, o), c) in d {
            phi.insert(&[0], &w, o, c).ok()?;
        }
        Some(phi)
    }

    /// Sparse random components `T_k`, `k ≤ max_arity`, of degree 0.
    pub fn tensor<S: Scalar>(&mut self, phi: &ActionFamily<S>, max_arity: usize, density: f64) -> EmbeddingTensor<S> {
        let (vs, es) = (phi.v_space(), phi.e_space());
        let mut t = EmbeddingTensor::new(vs.clone(), es.clone(), max_arity);
        for k in 1..=max_arity {
            for w in vs.ordered_words(k) {
                for o in 0..es.dim() {
                    if es.degree(o) as i64 == vs.word_degree(&w) && self.chance(density) {
                        t.insert(&w, o, self.scalar()).expect("degree checked");
                    }
                }
            }
        }
        t
    }

    /// A tensor that is valid by construction: values in the central line of
    /// `x = e_0`, killing every word that contains a letter in the image of
    /// `m` or `Φ`. `None` unless `x` is central and some functional survives.
    pub fn annihilator_tensor<S: Scalar>(&mut self, phi: &ActionFamily<S>, bound: usize) -> Option<EmbeddingTensor<S>> {
        if !is_central(phi.e(), 0, bound) {
            return None;
        }
        let (vs, es) = (phi.v_space(), phi.e_space());
        let funcs = annihilators(phi, bound);
        let by_degree = |d: i64| -> Vec<&Vec<S>> { funcs.iter().filter(|(deg, _)| *deg == d).map(|(_, f)| f).collect() };
        let x_deg = es.degree(0) as i64;
        let mut t = EmbeddingTensor::new(vs.clone(), es.clone(), 2);
        let unary = by_degree(x_deg);
        if let Some(f) = unary.choose(&mut self.rng) {
            let c: S = self.scalar();
            for (i, a) in f.iter().enumerate() {
                if !a.is_zero() {
                    t.insert(&[i], 0, c.clone() * a.clone()).ok()?;
                }
            }
        }
        if self.chance(0.5) {
            let degs: Vec<i64> = funcs.iter().map(|(d, _)| *d).collect();
            let pairs: Vec<(usize, usize)> = (0..funcs.len())
                .flat_map(|a| (0..funcs.len()).map(move |b| (a, b)))
                .filter(|&(a, b)| degs[a] + degs[b] == x_deg)
                .collect();
            if let Some(&(a, b)) = pairs.choose(&mut self.rng) {
                let c: S = self.scalar();
                let (fa, fb) = (&funcs[a].1, &funcs[b].1);
                for (i, ai) in fa.iter().enumerate() {
                    for (j, bj) in fb.iter().enumerate() {
                        let v = c.clone() * ai.clone() * bj.clone();
                        if !v.is_zero() {
                            t.insert(&[i, j], 0, v).ok()?;
                        }
                    }
                }
            }
        }
        (!t.is_zero()).then_some(t)
    }

    /// A random member of the centroid of `e`, as a strict tensor.
    pub fn centroid_tensor<S: Scalar>(&mut self, e: &HomotopyStructure<S>, bound: usize) -> Option<EmbeddingTensor<S>> {
        let basis = centroid_basis(e, bound);
        if basis.is_empty() {
            return None;
        }
        let mut m = basis[0].scale(&S::zero());
        for b in &basis {
            if self.chance(0.7) {
                m = m.add(&b.scale(&self.scalar())).ok()?;
            }
        }
        EmbeddingTensor::strict(&m).ok()
    }
}

/// `e_i` kills every bracket it enters.
pub fn is_central<S: Scalar>(e: &HomotopyStructure<S>, i: usize, bound: usize) -> bool {
    let space = e.space();
    (0..bound.min(e.max_arity())).all(|n| sorted_words_upto(space, n).into_iter().chain([Word::default()]).all(|w| {
        let w = Word::concat(&[&[i], &w]);
        w.len() > e.max_arity() || e.eval(&w).is_zero()
    }))
}

/// Whether every `Φ(x; w)` is central in `V`, checked on words up to `bound`.
pub fn image_is_central<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> bool {
    let vs = phi.v_space();
    phi.components().values().all(|out| {
        out.iter().all(|(i, _)| {
            sorted_words_upto(vs, bound.saturating_sub(2)).into_iter().chain([Word::default()]).all(|w| {
                let word = Word::concat(&[&[*i], &w]);
                word.len() > phi.v().max_arity() || phi.v().eval(&word).is_zero()
            })
        })
    })
}

/// Functionals on `V` (grouped by the degree they live on) that vanish on the
/// image of every `m_n` and every `Φ`.
fn annihilators<S: Scalar>(phi: &ActionFamily<S>, bound: usize) -> Vec<(i64, Vec<S>)> {
    let vs = phi.v_space();
    let mut images: Vec<Vector<S>> = phi.components().values().cloned().collect();
    for w in sorted_words_upto(vs, bound.min(phi.v().max_arity())) {
        images.push(phi.v().eval(&w));
    }
    let mut degrees: Vec<i32> = vs.basis().iter().map(|g| g.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut out = Vec::new();
    for d in degrees {
        let coords: Vec<usize> = (0..vs.dim()).filter(|&i| vs.degree(i) == d).collect();
        let rows: Vec<Vec<S>> = images.iter().map(|v| coords.iter().map(|i| v.coeff(i)).collect()).collect();
        for f in nullspace(&rows, coords.len()) {
            let mut full = vec![S::zero(); vs.dim()];
            for (c, &i) in f.into_iter().zip(&coords) {
                full[i] = c;
            }
            out.push((d as i64, full));
        }
    }
    out
}

/// Solutions `D` (components of arity `≤ max_k`, degree `|x| + 1`, with `x =
/// e_0`) of `[M_V, D]_c = 0`, and of `[ad_v, D]_c = 0` when `coherent`, on
/// V-words below `bound`.
fn derivation_kernel<S: Scalar>(
    e: &HomotopyStructure<S>,
    v: &HomotopyStructure<S>,
    max_k: usize,
    bound: usize,
    coherent: bool,
) -> Vec<BTreeMap<(Word, usize), S>> {
    let vs = v.space().clone();
    let degree = e.space().degree(0) + 1;
    let mut unknowns = Vec::new();
    for w in sorted_words_upto(&vs, max_k) {
        for o in 0..vs.dim() {
            if vs.degree(o) as i64 == vs.word_degree(&w) + degree as i64 {
                unknowns.push((w.clone(), o));
            }
        }
    }
    if unknowns.is_empty() {
        return Vec::new();
    }
    let m = v.brackets();
    let words = sorted_words_upto(&vs, bound.saturating_sub(1));
    let mut rows: BTreeMap<(Word, Word, usize), Vec<S>> = BTreeMap::new();
    for (col, (key, out)) in unknowns.iter().enumerate() {
        let sp = vs.clone();
        let d = FnRestriction::new(degree, move |w: &[usize]| match symmetric_normal_form(&sp, w) {
            Some((sorted, sign)) if sorted == *key => Vector::single(*out, sign.to_scalar()),
            _ => Vector::new(),
        });
        let mut record = |v_word: &Word, w: &Word, value: Vector<S>| {
            for (o, c) in value {
                rows.entry((v_word.clone(), w.clone(), o)).or_insert_with(|| vec![S::zero(); unknowns.len()])[col] = c;
            }
        };
        for w in &words {
            record(&Word::default(), w, restricted_commutator(m, &d, &vs, w));
        }
        if coherent {
            for vw in sorted_words_upto(&vs, bound.saturating_sub(2)) {
                let vw2 = vw.clone();
                let ad = FnRestriction::new(vs.word_degree(&vw) as i32 + 1, move |w: &[usize]| m.eval(&Word::concat(&[&vw2, w])));
                for w in sorted_words_upto(&vs, bound.saturating_sub(1 + vw.len())) {
                    record(&vw, &w, restricted_commutator(&ad, &d as &dyn Restriction<S>, &vs, &w));
                }
            }
        }
    }
    let rows: Vec<Vec<S>> = rows.into_values().collect();
    nullspace(&rows, unknowns.len())
        .into_iter()
        .map(|sol| unknowns.iter().cloned().zip(sol).filter(|(_, c)| !c.is_zero()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{check_action, check_coherence};
    use crate::homotopy::check_lie_infinity;
    use crate::tensor::check_embedding;
    use crate::Q;

    #[test]
    fn generated_algebras_are_lie() {
        let mut s = Sampler::new(7);
        for _ in 0..30 {
            let l = s.lie_algebra::<Q>("E", "e", 3);
            assert!(check_lie_infinity(&l, 4).unwrap().passed(), "{:?}", l);
        }
    }

    #[test]
    fn generated_actions_are_actions() {
        let mut s = Sampler::new(11);
        let mut made = BTreeMap::new();
        for i in 0..60 {
            let kind = ActionKind::ALL[i % 5];
            if let Some(phi) = s.action::<Q>(kind, 3, 4) {
                assert!(check_action(&phi, 4).unwrap().passed(), "{kind:?}");
                if kind == ActionKind::Coherent {
                    assert!(check_coherence(&phi, 4).unwrap().passed());
                }
                if kind == ActionKind::NonCentral {
                    assert!(!image_is_central(&phi, 4));
                }
                *made.entry(kind).or_insert(0) += 1;
            }
        }
        assert_eq!(made.len(), 5, "{made:?}");
    }

    #[test]
    fn annihilator_tensors_are_tensors() {
        let mut s = Sampler::new(3);
        let mut found = 0;
        for _ in 0..40 {
            let Some(phi) = s.action::<Q>(ActionKind::Coherent, 3, 4) else { continue };
            let Some(t) = s.annihilator_tensor(&phi, 3) else { continue };
            let (a, b) = check_embedding(&t, &phi, 3).unwrap();
            assert!(a.passed() && b.passed());
            found += 1;
        }
        assert!(found > 3, "{found}");
    }

    #[test]
    fn seeds_are_reproducible() {
        let a: Vec<Q> = { let mut s = Sampler::new(5); (0..10).map(|_| s.scalar()).collect() };
        let b: Vec<Q> = { let mut s = Sampler::new(5); (0..10).map(|_| s.scalar()).collect() };
        assert_eq!(a, b);
    }
}
