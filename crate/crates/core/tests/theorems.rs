use embtensor::action::{check_action, check_coherence, hemisemidirect, theorem_crosscheck, ActionFamily};
use embtensor::fixtures;
use embtensor::homotopy::{check_lie_infinity, check_loday_infinity};
use embtensor::random::{sweep, ActionKind, Sampler};
use embtensor::tensor::{
    adjoint_strict_check, centroid_basis, centroid_check, check_descendent_morphism, check_embedding, descendent,
    strict_algebra_compose, DeformationComplex, EmbeddingTensor,
};
use embtensor::{Scalar, Q, Q64};

fn coherent_actions(seed: u64, count: usize) -> Vec<ActionFamily<Q>> {
    sample_actions(seed, count).into_iter().filter(|(_, phi)| check_coherence(phi, 4).unwrap().passed()).map(|(_, phi)| phi).collect()
}

fn sample_actions(seed: u64, count: usize) -> Vec<(ActionKind, ActionFamily<Q>)> {
    let mut s = Sampler::new(seed);
    (0..count).filter_map(|i| {
        let kind = ActionKind::ALL[i % ActionKind::ALL.len()];
        s.action(kind, 3, 4).map(|phi| (kind, phi))
    })
    .collect()
}

#[test]
fn coherence_matches_product_loday_condition() {
    for (kind, phi) in sample_actions(91, 60) {
        let c = theorem_crosscheck(&phi, 4).unwrap();
        assert!(c.agree(), "{kind:?}\n{}\n{}", c.coherence, c.loday);
        if kind == ActionKind::Coherent {
            assert!(c.coherence.passed());
        }
    }
}

#[test]
fn heisenberg_product_is_loday() {
    let phi = fixtures::heisenberg_action::<Q>();
    let c = theorem_crosscheck(&phi, 4).unwrap();
    assert!(c.action.passed() && c.coherence.passed() && c.loday.passed());
    let product = hemisemidirect(&phi, 3).unwrap();
    assert_eq!(product.space().dim(), 4);
    // x ⊙ p = z in the product
    let v = product.structure.eval(&[0, 1]);
    assert_eq!(v.coeff(&3), Q::int(1));
}

#[test]
fn routes_agree_on_random_tensors() {
    let mut s = Sampler::new(17);
    for phi in coherent_actions(17, 40) {
        let t = s.tensor(&phi, 2, 0.3);
        let (explicit, mc) = check_embedding(&t, &phi, 4).unwrap();
        assert_eq!(explicit.support(), mc.support());
    }
}

#[test]
fn verified_tensors_descend() {
    let mut s = Sampler::new(5);
    let mut verified = 0;
    for phi in coherent_actions(5, 60) {
        let Some(t) = s.annihilator_tensor(&phi, 4) else { continue };
        let (explicit, _) = check_embedding(&t, &phi, 4).unwrap();
        assert!(explicit.passed());
        let d = descendent(&t, &phi, 4).unwrap();
        assert!(check_loday_infinity(&d, 4).unwrap().passed());
        assert!(check_descendent_morphism(&t, &phi, 4).unwrap().passed());
        let dc = DeformationComplex::new(&t, &phi, 3).unwrap();
        assert!(dc.square_check().passed());
        for c in sweep::<Q>() {
            dc.mc_check(&t.scale(&c)).unwrap();
        }
        verified += 1;
    }
    assert!(verified >= 5, "{verified}");
}

#[test]
fn identity_on_adjoint_representation() {
    let (phi, t) = fixtures::adjoint_identity::<Q>();
    let (explicit, mc) = check_embedding(&t, &phi, 4).unwrap();
    assert!(explicit.passed() && mc.passed());
    let d = descendent(&t, &phi, 3).unwrap();
    let l = phi.e().brackets().to_plain();
    assert!(d.brackets().same_values(&l, 3));
}

#[test]
fn strict_pool_on_small_algebras() {
    let algebras = [fixtures::two_dim::<Q>(), fixtures::sl2(), fixtures::heisenberg_algebra()];
    for e in &algebras {
        assert!(check_lie_infinity(e, 3).unwrap().passed());
        let basis = centroid_basis(e, 3);
        assert!(!basis.is_empty());
        for a in &basis {
            assert!(centroid_check(e, a, 3).unwrap().passed());
            assert!(adjoint_strict_check(e, a).unwrap().passed());
            for b in &basis {
                assert!(strict_algebra_compose(e, a, b).unwrap().passed());
            }
            assert!(EmbeddingTensor::strict(a).unwrap().is_strict());
        }
    }
}

#[test]
fn incoherent_actions_are_rejected() {
    let (_, phi) = sample_actions(91, 60).into_iter().find(|(k, _)| *k == ActionKind::NonCentral).unwrap();
    let t = EmbeddingTensor::new(phi.v_space().clone(), phi.e_space().clone(), 1);
    assert!(matches!(check_embedding(&t, &phi, 3), Err(embtensor::AlgebraError::Precondition(_))));
}

#[test]
fn small_scalars_agree_with_big_ones() {
    let big = check_action(&fixtures::heisenberg_action::<Q>(), 4).unwrap();
    let small = check_action(&fixtures::heisenberg_action::<Q64>(), 4).unwrap();
    assert_eq!(big.passed(), small.passed());
    let phi = fixtures::heisenberg_action::<Q64>();
    let t = fixtures::heisenberg_tensor(&phi);
    assert!(check_embedding(&t, &phi, 4).unwrap().0.passed());
}

#[test]
fn strict_composition_is_not_closed_on_sl2() {
    let e = fixtures::sl2::<Q>();
    let sp = e.space().clone();
    let mut a = embtensor::MultiMap::zero(sp.clone(), sp.clone(), 1, 0, embtensor::Flavor::Plain);
    for j in [0, 1] {
        for i in [0, 1] {
            a.insert(&[j], i, Q::int(-1)).unwrap();
        }
    }
    let mut b = embtensor::MultiMap::zero(sp.clone(), sp, 1, 0, embtensor::Flavor::Plain);
    b.insert(&[1], 0, Q::int(-1)).unwrap();
    assert!(adjoint_strict_check(&e, &a).unwrap().passed());
    assert!(adjoint_strict_check(&e, &b).unwrap().passed());
    // (a ∘ b)(f) = e + f, and l_2(f, h) is sent to 2(e + f) instead of 0
    let r = strict_algebra_compose(&e, &a, &b).unwrap();
    assert!(!r.passed());
    assert!(r.residuals.iter().all(|x| x.condition == "strict-adjoint"));
}
