use super::*;
use crate::forms::{build_standard_space, BlockProfile, ParamChoice, DEFAULT_PARAM_CAP};
use crate::groups::{FiniteGroup, DEFAULT_GROUP_CAP};
use crate::ring::{Ring, RingSpec};

fn level_space(n: u32, lambda: u32, l: usize, r0: usize, param: ParamChoice) -> LevelSpace {
    let k = Ring::new(&RingSpec::modular(n, lambda)).unwrap();
    let s = build_standard_space(&k, &BlockProfile::simple(l, r0), &Mat::identity(r0), &param, DEFAULT_PARAM_CAP).unwrap();
    LevelSpace::new(&EndoContext::new(&s).unwrap()).unwrap()
}

#[test]
fn lambda_examples() {
    let min = level_space(2, 1, 3, 0, ParamChoice::Minimal);
    for (_, els) in &min.lambda.blocks {
        assert_eq!(els.len(), 1);
    }
    let max = level_space(2, 1, 3, 0, ParamChoice::Maximal);
    for (i, els) in &max.lambda.blocks {
        assert_eq!(els.len(), 2, "block {i}");
        assert!(els.iter().all(|h| h.x.is_zero() && h.z.is_zero()));
    }
    let odd = level_space(2, 1, 2, 1, ParamChoice::Minimal);
    for (_, els) in &odd.lambda.blocks {
        assert_eq!(els.len(), 1);
    }
    for s in [&min, &max, &odd, &level_space(3, 1, 2, 0, ParamChoice::Minimal), &level_space(3, 2, 2, 0, ParamChoice::Minimal)] {
        let r = verify_lambda(s);
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}

#[test]
fn basic_levels_are_levels() {
    for s in [level_space(2, 1, 2, 0, ParamChoice::Maximal), level_space(2, 1, 2, 1, ParamChoice::Minimal), level_space(4, 1, 2, 1, ParamChoice::Minimal)] {
        let zero = s.zero_level();
        assert!(s.is_aug_level(&zero));
        let l0 = s.l0().unwrap();
        let r = s.check_aug_level(&l0);
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let full = s.full_level().unwrap();
        assert!(s.is_aug_level(&full));
        assert!(s.contained(&zero, &l0) && s.contained(&l0, &full));
    }
}

#[test]
fn violation_is_reported() {
    let s = level_space(2, 1, 2, 1, ParamChoice::Minimal);
    let c = &s.ctx;
    let l0 = s.l0().unwrap();
    let bad = AugLevel { i: l0.i.clone(), gamma: GammaGroup::generated(c, &c.carrier_elements(1)) };
    let r = s.check_aug_level(&bad);
    assert!(!r.all_passed());
    assert!(!r.passed("pi(Gamma) <= I") || !r.passed("Gamma (I + K + ...) + Lambda I + phi(I) <= Gamma"));
    assert!(r.failures().all(|f| f.witness.is_some()));
}

#[test]
fn floor_envelope_and_ceiling() {
    let s = level_space(2, 1, 2, 1, ParamChoice::Minimal);
    let c = &s.ctx;
    let l0 = s.l0().unwrap();
    let hat = s.enveloping(&l0).unwrap();
    assert!(s.same_class(&s.enveloping(&hat).unwrap(), &hat));
    for lvl in [s.zero_level(), l0.clone(), s.full_level().unwrap()] {
        let fl = s.floor(&lvl).unwrap();
        let ce = s.ceil(&lvl).unwrap();
        assert!(s.is_aug_level(&fl) && s.is_aug_level(&ce));
        assert!(s.same_class(&fl, &lvl) && s.same_class(&ce, &lvl));
        assert!(s.contained(&fl, &ce));
        assert!(s.contained(&fl, &lvl) && s.contained(&lvl, &ce));
        let (m, g) = s.floor_formula(&lvl).unwrap();
        assert_eq!(fl.i.restrict(|i, j| i == 0 && j == 0), m);
        assert!(fl.gamma.act(c, &c.diag(c.e(0))).equal(c, &g));
    }
    let r0 = level_space(2, 1, 2, 0, ParamChoice::Maximal);
    let z = r0.zero_level();
    assert!(r0.same_aug(&r0.floor(&z).unwrap(), &r0.ceil(&z).unwrap()));
    let big = level_space(3, 1, 1, 3, ParamChoice::Minimal);
    assert!(matches!(big.ceil(&big.zero_level()), Err(Error::CarrierTooLarge(_))));
}

#[test]
fn scaling() {
    let s = level_space(4, 1, 2, 1, ParamChoice::Minimal);
    let c = &s.ctx;
    let l0 = s.l0().unwrap();
    let k = c.ring();
    assert!(s.same_aug(&s.scale(&l0, k.one()), &l0));
    let zero = s.scale(&l0, k.zero());
    assert_eq!(zero.i.order(), 1u8.into());
    assert_eq!(zero.gamma.order(), 1u8.into());
    let two = s.scale(&l0, k.from_int(2));
    assert!(s.is_aug_level(&two));
    assert!(s.contained(&two, &l0));
    assert!(two.i.order() < l0.i.order());
}

#[test]
fn level_of_small_groups() {
    let s = level_space(2, 1, 2, 0, ParamChoice::Maximal);
    let c = &s.ctx;
    let triv = |g: &Mat| g.is_identity();
    let zero = s.level_of_group(&triv).unwrap();
    assert!(s.same_aug(&zero, &s.zero_level()));
    let all = |_: &Mat| true;
    let full = s.level_of_group(&all).unwrap();
    assert!(s.same_class(&full, &s.full_level().unwrap()));
    let lg = LevelGroups::new(&s, DEFAULT_GROUP_CAP);
    let eu = lg.eu().unwrap();
    let l = s.level_of_group(&|g: &Mat| eu.contains(g)).unwrap();
    let l0 = s.l0().unwrap();
    assert!(s.same_class(&l, &l0));
    // EU(P, L0) = EU(P) and EU(P, 0) = 1.
    assert!(lg.eu_level(&l0).unwrap().equal(&eu));
    assert_eq!(lg.eu_level(&s.zero_level()).unwrap().order(), 1);
    assert_eq!(lg.eu_level(&s.scale(&l0, c.ring().zero())).unwrap().order(), 1);
}

#[test]
fn principal_membership_examples() {
    let s = level_space(2, 1, 2, 0, ParamChoice::Maximal);
    let c = &s.ctx;
    let l0 = s.l0().unwrap();
    let zero = s.zero_level();
    assert!(s.principal_member(&zero, &c.one()));
    let a = c.diag(&Mat::unit(c.dim(), c.dim(), c.profile().range(1).start, c.profile().range(2).start, c.ring().one()));
    let t = c.tau_short(1, 2, &a).unwrap();
    assert!(s.principal_member(&l0, &t));
    assert!(!s.principal_member(&zero, &t));
    let gu = GuOracle::new(&s, &l0, 50, true, 1).unwrap();
    assert!(gu.member(&c.one()));
    assert!(gu.member(&t));
}

#[test]
fn chevalley_small() {
    let s = level_space(2, 1, 2, 1, ParamChoice::Minimal);
    let l0 = s.l0().unwrap();
    let r = s.verify_chevalley(&l0, 5, 1 << 12, DEFAULT_GROUP_CAP).unwrap();
    assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
}

#[test]
fn level_groups_at_rank_two() {
    let s = level_space(2, 1, 2, 1, ParamChoice::Minimal);
    let lg = LevelGroups::new(&s, DEFAULT_GROUP_CAP);
    let l0 = s.l0().unwrap();
    let eu = lg.eu().unwrap();
    let e = lg.eu_level(&l0).unwrap();
    assert!(e.equal(&eu));
    let back = s.level_of_group(&|g: &Mat| e.contains(g)).unwrap();
    assert!(s.same_class(&back, &l0));
    let up = lg.unitary(3).unwrap();
    assert!(eu.is_subgroup_of(&up));
    let p = lg.principal(&l0, &up, 4).unwrap();
    assert!(eu.is_subgroup_of(&p));
    let _ = FiniteGroup::trivial(s.ctx.ring(), s.ctx.dim(), 1).unwrap();
}

#[test]
fn orders_beyond_128_bits_are_exact() {
    // Every one of the 64 hyperbolic blocks of the full I has 4 elements.
    let s = level_space(2, 1, 4, 0, ParamChoice::Maximal);
    let full = s.full_level().unwrap();
    let expected = num_bigint::BigUint::from(2u8).pow(128);
    assert_eq!(full.i.order(), expected);
    assert_eq!(s.summary(&full).i_order, expected.to_string());
}
