use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;

use zspecial::digits::{carry_free, length_l, perm_apply, DigitPerm};
use zspecial::json::{poly_from_json, poly_to_json};
use zspecial::polyring::{substitute, Substitution, VarTarget};
use zspecial::special::{frobenius_twist_check, phi_degree, z_general};
use zspecial::{field_create, BetaTuple, ComputeOptions, FieldCtx, FqElem, Method, MultiPoly};

fn field(idx: usize) -> Arc<FieldCtx> {
    let (p, e) = [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2), (2, 3)][idx];
    field_create(p, e).unwrap()
}

fn poly(ctx: &Arc<FieldCtx>, n: usize, raw: &[(Vec<u64>, u32)]) -> MultiPoly {
    let q = ctx.q();
    let terms = raw
        .iter()
        .map(|(e, c)| (e[..n].to_vec(), ctx.element_by_rank(c % q)));
    MultiPoly::from_terms(ctx, n, terms).unwrap()
}

fn raw_terms() -> impl Strategy<Value = Vec<(Vec<u64>, u32)>> {
    prop::collection::vec((prop::collection::vec(0u64..4, 3), any::<u32>()), 0..6)
}

fn target(ctx: &FieldCtx) -> impl Strategy<Value = VarTarget> {
    let q = ctx.q();
    let ranks: Vec<FqElem> = (0..q).map(|r| ctx.element_by_rank(r)).collect();
    prop_oneof![
        (0usize..2, 1u64..4).prop_map(|(i, k)| VarTarget::power(i, k)),
        prop::sample::select(ranks).prop_map(VarTarget::Const),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(fi in 0usize..6, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = field(fi);
        let q = f.q();
        let (a, b, c) = (f.element_by_rank(a % q), f.element_by_rank(b % q), f.element_by_rank(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.pow(a, q as u64), a);
        if !a.is_zero() {
            prop_assert!(f.mul(a, f.inv(a).unwrap()).is_one());
        }
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        (fi, targets) in (0usize..6).prop_flat_map(|fi| (Just(fi), prop::collection::vec(target(&field(fi)), 3))),
        x in raw_terms(),
        y in raw_terms(),
    ) {
        let f = field(fi);
        let (px, py) = (poly(&f, 3, &x), poly(&f, 3, &y));
        let s = Substitution::new(targets, 2);
        let sub = |p: &MultiPoly| substitute(p, &s).unwrap();
        prop_assert_eq!(sub(&px.add(&py).unwrap()), sub(&px).add(&sub(&py)).unwrap());
        prop_assert_eq!(sub(&px.mul(&py).unwrap()), sub(&px).mul(&sub(&py)).unwrap());
        prop_assert_eq!(sub(&MultiPoly::one(&f, 3)), MultiPoly::one(&f, 2));
    }

    #[test]
    fn json_round_trip(fi in 0usize..6, x in raw_terms()) {
        let f = field(fi);
        let p = poly(&f, 3, &x);
        prop_assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn carry_free_exactly_when_length_adds(j in 0u64..100_000, k in 0u64..100_000, qi in 0usize..6) {
        let q = [2u64, 3, 4, 5, 8, 9][qi];
        let (bj, bk) = (BigUint::from(j), BigUint::from(k));
        let lj = length_l(&bj, q).unwrap();
        let lk = length_l(&bk, q).unwrap();
        let ls = length_l(&(&bj + &bk), q).unwrap();
        prop_assert!(ls <= lj + lk);
        prop_assert_eq!(carry_free(&bj, &bk, q).unwrap(), ls == lj + lk);
    }

    #[test]
    fn digit_permutations_preserve_twisted_lengths(
        k in 0u64..1_000_000,
        a in 0u64..8,
        b in 0u64..8,
        qi in 0usize..6,
        i in 0u32..6,
    ) {
        let q = [2u64, 3, 4, 5, 8, 9][qi];
        let p = [2u64, 3, 2, 5, 2, 3][qi];
        let perm = DigitPerm::transposition(a, b);
        let bk = BigUint::from(k);
        let image = perm_apply(&perm, &bk, q).unwrap();
        let pi = BigUint::from(p).pow(i);
        prop_assert_eq!(length_l(&image, q).unwrap(), length_l(&bk, q).unwrap());
        prop_assert_eq!(length_l(&(&pi * &image), q).unwrap(), length_l(&(&pi * &bk), q).unwrap());
        prop_assert_eq!(perm_apply(&perm.inverse(), &image, q).unwrap(), bk);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn methods_agree_and_degree_is_phi(fi in 0usize..6, betas in prop::collection::vec(1u64..7, 0..4)) {
        let f = field(fi);
        let b = BetaTuple(betas);
        let o = ComputeOptions::default();
        let direct = z_general(&b, &f, Method::Direct, &o).unwrap();
        let ones = z_general(&b, &f, Method::ViaOnes, &o).unwrap();
        prop_assert_eq!(&direct.poly, &ones.poly);
        prop_assert_eq!(direct.degree(), Some(phi_degree(&b, &f)));
    }

    #[test]
    fn constant_specialization_never_raises_degree(
        fi in 0usize..6,
        betas in prop::collection::vec(1u64..6, 1..4),
        consts in prop::collection::vec(any::<u32>(), 3),
    ) {
        let f = field(fi);
        let b = BetaTuple(betas);
        let z = z_general(&b, &f, Method::ViaOnes, &ComputeOptions::default()).unwrap();
        let mut targets = vec![VarTarget::var(0)];
        targets.extend((0..b.s()).map(|j| VarTarget::Const(f.element_by_rank(consts[j] % f.q()))));
        let special = substitute(&z.poly, &Substitution::new(targets, 1)).unwrap();
        if let Some(d) = special.degree_in_t0() {
            prop_assert!(d <= z.degree().unwrap());
        }
    }

    #[test]
    fn twist_holds(fi in 0usize..6, betas in prop::collection::vec(1u64..5, 1..3), i in 0u32..3) {
        let f = field(fi);
        let r = frobenius_twist_check(&BetaTuple(betas), i, &f, Method::ViaOnes, &ComputeOptions::default()).unwrap();
        prop_assert!(r.holds);
    }
}
