//! Small named examples used by tests, the acceptance suite and the CLI corpus.

use std::sync::Arc;

use crate::action::ActionFamily;
use crate::graded::GradedSpace;
use crate::homotopy::HomotopyStructure;
use crate::multimap::{Family, Flavor, Space};
use crate::scalar::Scalar;
use crate::tensor::EmbeddingTensor;

fn space(name: &str, gens: &[(&str, i32)]) -> Space {
    Arc::new(GradedSpace::new(name, gens.iter().cloned()).expect("valid fixture space"))
}

fn structure<S: Scalar>(space: Space, entries: &[(&[usize], usize, i64)]) -> HomotopyStructure<S> {
    let arity = entries.iter().map(|(w, _, _)| w.len()).max().unwrap_or(1);
    let mut f = Family::new(space.clone(), space, 1, Flavor::Symmetric, arity.max(2));
    for (w, o, c) in entries {
        f.insert(w, *o, S::int(*c)).expect("valid fixture entry");
    }
    HomotopyStructure::new(f).expect("valid fixture structure")
}

/// `⟨a, b⟩` in degree −1 with `[a, b] = b`.
pub fn two_dim<S: Scalar>() -> HomotopyStructure<S> {
    structure(space("E", &[("a", -1), ("b", -1)]), &[(&[0, 1], 1, 1)])
}

/// `sl_2 = ⟨e, f, h⟩` in degree −1.
pub fn sl2<S: Scalar>() -> HomotopyStructure<S> {
    structure(space("E", &[("e", -1), ("f", -1), ("h", -1)]), &[(&[0, 1], 2, 1), (&[0, 2], 0, -2), (&[1, 2], 1, 2)])
}

/// The Heisenberg algebra `⟨p, q, z⟩` in degree −1 with `[p, q] = z`.
pub fn heisenberg_algebra<S: Scalar>() -> HomotopyStructure<S> {
    structure(space("V", &[("p", -1), ("q", -1), ("z", -1)]), &[(&[0, 1], 2, 1)])
}

/// Abelian `E = ⟨x⟩` (degree −1) acting on the Heisenberg algebra by
/// `x: p ↦ z`.
pub fn heisenberg_action<S: Scalar>() -> ActionFamily<S> {
    let e = HomotopyStructure::abelian(space("E", &[("x", -1)]), Flavor::Symmetric, 2);
    let mut phi = ActionFamily::new(e, heisenberg_algebra()).expect("symmetric data");
    phi.insert(&[0], &[0], 2, S::one()).expect("valid fixture entry");
    phi
}

/// `T(p) = x`, `T(q) = T(z) = 0`.
pub fn heisenberg_tensor<S: Scalar>(phi: &ActionFamily<S>) -> EmbeddingTensor<S> {
    let mut t = EmbeddingTensor::new(phi.v_space().clone(), phi.e_space().clone(), 1);
    t.insert(&[0], 0, S::one()).expect("valid fixture entry");
    t
}

/// The adjoint representation of [`two_dim`] with the identity tensor.
pub fn adjoint_identity<S: Scalar>() -> (ActionFamily<S>, EmbeddingTensor<S>) {
    let l = two_dim();
    let t = EmbeddingTensor::identity(l.space().clone());
    (ActionFamily::adjoint_representation(l).expect("symmetric data"), t)
}
