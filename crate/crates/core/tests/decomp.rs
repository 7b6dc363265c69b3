use iaut::arith::{q, qi};
use iaut::autos::equal;
use iaut::decomp::{
    self, gamma_p, q_generators, split_bounded, split_bounded_within, theorem_b_factor, CofiniteSubgroup, TheoremTag,
};
use iaut::{block, AutoExpr, Atom, Element, GroupDescriptor, Slot};
use proptest::prelude::*;

fn g(atoms: Vec<Atom>) -> GroupDescriptor {
    GroupDescriptor::new(atoms).unwrap()
}

fn el(a: &GroupDescriptor, coords: &[(usize, usize, i64)]) -> Element {
    a.element(coords.iter().map(|&(i, c, v)| (Slot::new(i, c), qi(v)))).unwrap()
}

fn pair(a: AutoExpr, b: AutoExpr) -> AutoExpr {
    AutoExpr::blocks(vec![block(&[0], a), block(&[1], b)])
}

/// Every element of the finite window as a coordinate vector.
fn all_elements(a: &GroupDescriptor, copies: usize) -> Vec<Element> {
    let mut out = vec![Element::zero()];
    for i in 0..a.len() {
        let n = if a.atom(i).is_omega() { copies } else { 1 };
        for c in 0..n {
            let m: i64 = a.atom(i).modulus().unwrap().try_into().unwrap();
            out = out
                .into_iter()
                .flat_map(|x| (0..m).map(move |v| (x.clone(), v)))
                .map(|(x, v)| a.add(&x, &el(a, &[(i, c, v)])).unwrap())
                .collect();
        }
    }
    out
}

#[test]
fn split_kernel_of_first_two() {
    let b = g(vec![Atom::CyclicOmega { p: 2, k: 1 }]);
    // kernel of x0 + x1 inside copies 0..=3, plus the copies beyond
    let gens = vec![el(&b, &[(0, 0, 1), (0, 1, 1)]), el(&b, &[(0, 2, 1)]), el(&b, &[(0, 3, 1)])];
    let b0 = CofiniteSubgroup::new(&b, 3, &gens).unwrap();
    let s = split_bounded(&b, &b0).unwrap();
    assert!(s.direct);
    assert_eq!(s.b2_order, 2.into());
    for x in &gens {
        assert!(s.b1.contains(x));
    }
    // exact check over the 16 window elements
    let elems = all_elements(&b, 4);
    let in_b1 = elems.iter().filter(|x| s.b1.contains(x)).count();
    let in_b2 = elems.iter().filter(|x| s.b2.contains(x)).count();
    assert_eq!(in_b1 * in_b2, elems.len());
    assert_eq!(elems.iter().filter(|x| s.b1.contains(x) && s.b2.contains(x)).count(), 1);
}

#[test]
fn split_of_whole_group() {
    let b = g(vec![Atom::Cyclic { p: 3, k: 2 }, Atom::CyclicOmega { p: 2, k: 2 }]);
    let b0 = CofiniteSubgroup::whole(&b, 2).unwrap();
    let s = split_bounded(&b, &b0).unwrap();
    assert!(s.direct);
    assert_eq!(s.b2_order, 1.into());
    assert!(s.b2.is_zero());
}

#[test]
fn split_finite_brute_force() {
    let b = g(vec![Atom::Cyclic { p: 2, k: 2 }, Atom::Cyclic { p: 2, k: 1 }]);
    let b0 = CofiniteSubgroup::new(&b, 0, &[el(&b, &[(0, 0, 2)])]).unwrap();
    let s = split_bounded(&b, &b0).unwrap();
    assert!(s.direct);
    let elems = all_elements(&b, 1);
    assert_eq!(elems.len(), 8);
    let b1: Vec<&Element> = elems.iter().filter(|x| s.b1.contains(x)).collect();
    let b2: Vec<&Element> = elems.iter().filter(|x| s.b2.contains(x)).collect();
    assert!(b1.contains(&&el(&b, &[(0, 0, 2)])));
    assert_eq!(b1.len() * b2.len(), 8);
    for x in &elems {
        let n = b1.iter().filter(|y| b2.iter().any(|z| b.add(y, z).unwrap() == *x)).count();
        assert_eq!(n, 1, "{x} has a unique decomposition");
    }
    assert_eq!(s.b2_order, (b2.len() as u64).into());

    let w = split_bounded_within(&b, &b0).unwrap();
    assert!(w.direct);
    assert_eq!(w.b2_order, 8.into());
}

#[test]
fn split_rejects_unbounded() {
    let b = g(vec![Atom::Pruefer { p: 2 }]);
    let b0 = CofiniteSubgroup::new(&b, 0, &[]).unwrap();
    assert!(split_bounded(&b, &b0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn split_is_direct(k in 1u32..3, copies in 1usize..4, coeffs in prop::collection::vec(0i64..4, 0..4)) {
        let b = g(vec![Atom::Cyclic { p: 3, k: 1 }, Atom::CyclicOmega { p: 2, k }]);
        let gens: Vec<Element> = coeffs
            .iter()
            .enumerate()
            .map(|(j, &v)| el(&b, &[(1, j % copies, v), (0, 0, v % 3)]))
            .collect();
        let b0 = CofiniteSubgroup::new(&b, copies - 1, &gens).unwrap();
        let s = split_bounded(&b, &b0).unwrap();
        prop_assert!(s.direct);
        for x in &gens {
            prop_assert!(s.b1.contains(x));
        }
        prop_assert!(s.b2.order().is_some());
    }
}

#[test]
fn gamma_p_examples() {
    let a = g(vec![Atom::Cyclic { p: 3, k: 1 }, Atom::LocalizedQ { p: 3 }]);
    let e = gamma_p(&a, 3).unwrap();
    assert!(equal(&a, &e, &pair(AutoExpr::Identity, AutoExpr::rat(3, 1))).unwrap());
    assert!(iaut::is_inertial(&a, &e).unwrap().is_inertial());

    assert!(gamma_p(&iaut::corpus::pq(2), 2).is_err());

    let z = g(vec![Atom::FreeZ]);
    let gens = q_generators(&z).unwrap();
    assert_eq!(gens, vec![AutoExpr::Negation]);
    assert!(decomp::qgroup::q_is_free(&a, 3).unwrap());
    assert!(q_generators(&g(vec![Atom::Cyclic { p: 2, k: 1 }])).is_err());
}

#[test]
fn theorem_b_examples() {
    let a = g(vec![Atom::Cyclic { p: 3, k: 1 }, Atom::LocalizedQ { p: 3 }]);
    let g3 = gamma_p(&a, 3).unwrap();

    let f = theorem_b_factor(&a, &g3.power(2)).unwrap();
    assert!(f.gamma1.is_identity(&a).unwrap());
    assert!(equal(&a, &f.gamma0, &g3.power(2)).unwrap());
    assert_eq!(f.multiplier, qi(9));
    assert!(f.certificate.all_pass());

    let z = g(vec![Atom::FreeZ]);
    let f = theorem_b_factor(&z, &AutoExpr::Negation).unwrap();
    assert!(f.gamma1.is_identity(&z).unwrap());
    assert_eq!(f.gamma0, AutoExpr::Negation);
    assert!(f.certificate.all_pass());

    let e = pair(AutoExpr::padic(3, 2, 1), AutoExpr::rat(3, 1));
    let f = theorem_b_factor(&a, &e).unwrap();
    assert!(equal(&a, &f.gamma1, &pair(AutoExpr::padic(3, 2, 1), AutoExpr::Identity)).unwrap());
    assert!(equal(&a, &f.gamma0, &g3).unwrap());
    assert_eq!(f.certificate.theorem, TheoremTag::TheoremB);
    assert!(f.certificate.all_pass());

    let half = pair(AutoExpr::Negation, AutoExpr::rat(-1, 3));
    let f = theorem_b_factor(&a, &half).unwrap();
    assert_eq!(f.multiplier, q(-1, 3));
    assert!(f.negative);
    assert!(f.certificate.all_pass());

    // not inertial
    let bad = pair(AutoExpr::Identity, AutoExpr::rat(3, 1));
    assert!(theorem_b_factor(&iaut::corpus::pq(3), &bad).is_err());
}

fn check_ids(c: &decomp::Certificate) {
    for item in &c.checklist {
        assert!(item.pass, "check {} failed: {:?}", item.id, item.witness);
    }
}

#[test]
fn pgroup_noncritical_order() {
    let a = g(vec![Atom::Cyclic { p: 2, k: 3 }, Atom::CyclicOmega { p: 2, k: 2 }]);
    let c = decomp::pgroup_decompose(&a).unwrap();
    assert_eq!(c.theorem, TheoremTag::PgroupNoncritical);
    check_ids(&c);
    assert_eq!(c.data["intersection_order"], 2);
    assert_eq!(c.data["m"], 3);
    assert_eq!(c.data["e"], 2);
}

#[test]
fn pgroup_critical_exponents() {
    let a = g(vec![Atom::Pruefer { p: 2 }, Atom::CyclicOmega { p: 2, k: 2 }]);
    let c = decomp::pgroup_decompose(&a).unwrap();
    assert_eq!(c.theorem, TheoremTag::PgroupCritical);
    check_ids(&c);
    assert_eq!(c.data["exp_sigma"], c.data["m_prime"]);
    assert_eq!(c.data["eexp_sigma"], c.data["e_prime"]);
    for k in ["Sigma", "Phi", "Delta"] {
        for e in &c.factors[k] {
            assert!(e.validate(&a).valid, "{k} generator {e:?}");
        }
    }

    let odd = g(vec![Atom::Pruefer { p: 3 }, Atom::CyclicOmega { p: 3, k: 1 }, Atom::Cyclic { p: 3, k: 2 }]);
    let c = decomp::pgroup_decompose(&odd).unwrap();
    check_ids(&c);
    assert!(c.item("commutator_generates_sigma").is_some());
    assert!(c.item("delta_fixed_point_free").is_some());
}

#[test]
fn pgroup_pruefer_alone() {
    let a = g(vec![Atom::Pruefer { p: 5 }]);
    let c = decomp::pgroup_decompose(&a).unwrap();
    check_ids(&c);
    assert_eq!(c.data["intersection_order"], 1);
    for e in c.factors.get("FAut").into_iter().flatten() {
        assert!(e.is_identity(&a).unwrap());
    }
    assert!(!c.factors["PAut"].is_empty());
}

#[test]
fn pgroup_rejects_mixed() {
    let a = g(vec![Atom::Cyclic { p: 2, k: 1 }, Atom::Cyclic { p: 3, k: 1 }]);
    assert!(decomp::pgroup_decompose(&a).is_err());
    assert!(decomp::pgroup_decompose(&iaut::corpus::pq(2)).is_err());
}

/// Conjugation by δ_n is the n-th power on every Σ generator, for n prime to p.
#[test]
fn delta_conjugation_is_power() {
    use iaut::autos::stability::{conjugate, stab_to_hom};
    use iaut::Source;
    let a = g(vec![Atom::Pruefer { p: 3 }, Atom::CyclicOmega { p: 3, k: 2 }]);
    let c = decomp::pgroup_decompose(&a).unwrap();
    for n in [2i64, 4, 5, 7, -1] {
        let d = decomp::pgroup::delta(&a, 3, n);
        for s in &c.factors["Sigma"] {
            let lhs = stab_to_hom(&a, &conjugate(s, &d), &Source::Divisible).unwrap();
            let rhs = stab_to_hom(&a, &s.power(n), &Source::Divisible).unwrap();
            assert_eq!(lhs.normalized(&a).unwrap(), rhs.normalized(&a).unwrap(), "n = {n}");
        }
    }
}

#[test]
fn periodic_examples() {
    let a = g(vec![Atom::Cyclic { p: 2, k: 1 }, Atom::Cyclic { p: 3, k: 2 }]);
    let c = decomp::periodic_decompose(&a).unwrap();
    assert_eq!(c.theorem, TheoremTag::TheoremA);
    check_ids(&c);
    assert!(c.factors["Delta"].is_empty());
    assert_eq!(c.data["pi"], serde_json::json!([2, 3]));

    let a = g(vec![Atom::CyclicOmega { p: 2, k: 1 }, Atom::Pruefer { p: 3 }]);
    let c = decomp::periodic_decompose(&a).unwrap();
    check_ids(&c);
    assert_eq!(c.data["pi"], serde_json::json!([2, 3]));
    assert!(c.factors["Delta"].is_empty());

    let a = g(vec![Atom::Pruefer { p: 2 }, Atom::CyclicOmega { p: 2, k: 2 }, Atom::Cyclic { p: 3, k: 1 }]);
    let c = decomp::periodic_decompose(&a).unwrap();
    check_ids(&c);
    assert_eq!(c.data["pi"], serde_json::json!([3]));
    assert_eq!(c.data["critical"], serde_json::json!([2]));
    assert!(!c.factors["Delta"].is_empty());

    assert!(decomp::periodic_decompose(&g(vec![Atom::FreeZ])).is_err());
}

#[test]
fn factor_inertial_round_trip() {
    let a = g(vec![Atom::Pruefer { p: 2 }, Atom::CyclicOmega { p: 2, k: 2 }, Atom::Cyclic { p: 3, k: 1 }]);
    let gamma = AutoExpr::blocks(vec![
        block(&[0], AutoExpr::padic(2, 3, 1)),
        block(&[1], AutoExpr::padic(2, -1, 1)),
        block(&[2], AutoExpr::Negation),
    ]);
    let [phi, alpha, delta] = decomp::periodic::factor_inertial(&a, &gamma).unwrap().unwrap();
    assert!(phi.is_finitary(&a).unwrap().finitary);
    assert!(equal(&a, &phi.then(alpha).then(delta), &gamma).unwrap());
}

#[test]
fn theorem_c_z12_q2_not_faithful() {
    let a = g(vec![Atom::Cyclic { p: 2, k: 2 }, Atom::Cyclic { p: 3, k: 1 }, Atom::LocalizedQ { p: 2 }]);
    let c = decomp::theorem_c_split(&a).unwrap();
    assert_eq!(c.theorem, TheoremTag::TheoremCBoundedT);
    check_ids(&c);
    assert_eq!(c.data["faithful"], false);
    assert_eq!(c.data["sigma_order"], "3");
    assert_eq!(c.data["phi1_order"], 4);
    assert!(!c.data["kernel_witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn theorem_c_pruefer_plus_z() {
    let a = g(vec![Atom::Pruefer { p: 3 }, Atom::FreeZ]);
    let c = decomp::theorem_c_split(&a).unwrap();
    assert_eq!(c.theorem, TheoremTag::TheoremCFgQuotient);
    check_ids(&c);
    assert_eq!(c.data["faithful"], true);
    assert!(c.item("non_nilpotent").unwrap().pass);
    for n in 1..=6 {
        for s in 1..=3 {
            let w = decomp::non_nilpotency_witness(&a, s, n).unwrap().unwrap();
            assert!(!w.is_zero(), "s = {s}, n = {n}");
        }
    }
}

#[test]
fn theorem_c_z2_plus_z() {
    let a = g(vec![Atom::Cyclic { p: 2, k: 1 }, Atom::FreeZ]);
    let c = decomp::theorem_c_split(&a).unwrap();
    check_ids(&c);
    assert_eq!(c.data["sigma_order"], "2");
    assert_eq!(c.factors["Sigma"].len(), 1);
    // Hom(Z, Z(2)) has two elements: the identity and the one σ
    let s = &c.factors["Sigma"][0];
    assert!(!s.is_identity(&a).unwrap());
    assert!(s.power(2).is_identity(&a).unwrap());
    for x in &c.factors["Gamma1"] {
        assert!(x.is_identity(&a).unwrap());
    }
}

#[test]
fn theorem_c_hypotheses() {
    assert!(decomp::theorem_c_split(&g(vec![Atom::Cyclic { p: 2, k: 1 }])).is_err());
    assert!(decomp::theorem_c_split(&g(vec![Atom::Cyclic { p: 2, k: 1 }, Atom::FreeZOmega])).is_err());
    assert!(decomp::theorem_c_split(&iaut::corpus::pq(2)).is_err());
}

#[test]
fn ki_examples() {
    use iaut::{hom_to_stab, HomData, Source};
    let a = g(vec![Atom::Pruefer { p: 5 }, Atom::FreeZ]);
    let gen = pair(AutoExpr::padic(5, 2, 1), AutoExpr::Identity);
    let sigma = hom_to_stab(&HomData::new(Source::Torsion, [(Slot::new(1, 0), a.generator(Slot::new(0, 0), 1))]));
    let r = decomp::ki_check(&[gen.clone(), sigma.clone()], &a, 8).unwrap();
    assert_eq!(r.commutators.len(), 1);
    assert!(r.holds(), "{r:?}");
    assert_eq!(r.checked, 2);

    // commuting generators
    let r = decomp::ki_check(&[gen.clone(), gen.power(2)], &a, 8).unwrap();
    assert!(r.commutators.is_empty());
    assert!(r.holds());

    let r = decomp::ki_check(&[AutoExpr::Identity], &a, 8).unwrap();
    assert!(r.commutators.is_empty());

    // −1 is not trivial on A/T
    assert!(decomp::ki_check(&[AutoExpr::Negation], &a, 8).is_err());
}

#[test]
fn fc_center() {
    let r = decomp::fc_center_witness(2, 2, 5).unwrap();
    assert_eq!(r.conjugates.len(), 5);
    assert!(r.pairwise_distinct);
    assert!(r.all_finitary);
    for (i, (j, img)) in r.moved.iter().enumerate() {
        assert_eq!(*j, i + 1);
        assert_eq!(r.group.order(img), Some(2.into()));
    }
}

#[test]
fn counterexample_coordinates() {
    let r = decomp::counterexample_witness(2).unwrap();
    assert_eq!(r.primes, vec![2]);
    assert!(r.all_hold);

    let r = decomp::counterexample_witness(5).unwrap();
    assert_eq!(r.coordinates.len(), 3);
    assert!(r.all_hold);
    for c in &r.coordinates {
        assert_eq!(c.sigma_component_order, c.p);
        assert_eq!(r.group.scale(&c.d, &c.p.into()), r.group.sub_elems(&r.v, &r.group.generator(Slot::new(2 * r.primes.iter().position(|&q| q == c.p).unwrap(), 0), 0)));
    }
    assert!(r.truncated_finitary && !r.product_finitary);

    let r = decomp::counterexample_witness_with(2, Some(2)).unwrap();
    assert!(!r.all_hold);
    assert!(!r.coordinates[0].identity_holds);
    assert!(decomp::counterexample_witness(1).is_err());
}
