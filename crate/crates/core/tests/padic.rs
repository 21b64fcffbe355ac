mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use klab::padic::series::Series;
use klab::padic::{
    check_prime, hensel_quadratic_unit_root, max_storage_precision, omega_mul, teichmuller, Ctx, PadicElem,
    PadicRecord,
};

use common::*;

proptest! {
    #![proptest_config(config(CASES))]

    #[test]
    fn ring_axioms_p5(a in coords_strategy(5, 26), b in coords_strategy(5, 26), c in coords_strategy(5, 26)) {
        prop_ring_axioms(5, 26, a, b, c)?;
    }

    #[test]
    fn ring_axioms_p7(a in coords_strategy(7, 22), b in coords_strategy(7, 22), c in coords_strategy(7, 22)) {
        prop_ring_axioms(7, 22, a, b, c)?;
    }

    #[test]
    fn record_round_trip(a in coords_strategy(5, 20), abs in 0u32..=80) {
        let ctx = Ctx::new(5, 20).unwrap();
        let x = ctx.from_coords(&a).unwrap().with_abs(abs);
        let rec = x.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: PadicRecord = serde_json::from_str(&json).unwrap();
        let y = PadicElem::from_record(&back).unwrap();
        prop_assert_eq!(y.abs_precision(), x.abs_precision());
        prop_assert_eq!(y.canonical_coords(), x.canonical_coords());
    }

    #[test]
    fn unit_inverse(a in coords_strategy(7, 22)) {
        let ctx = Ctx::new(7, 22).unwrap();
        let x = ctx.from_coords(&a).unwrap() * ctx.pi() + ctx.int(1 + u64::try_from(&a[0] % 6u32).unwrap() as i64);
        let y = x.invert_unit().unwrap();
        prop_assert_eq!(x * y, ctx.one());
    }
}

#[test]
fn pi_relation() {
    for (p, n) in [(5, 26), (7, 22)] {
        let ctx = Ctx::new(p, n).unwrap();
        assert_eq!(ctx.pi().pow((p - 1) as u64), ctx.int(-(p as i64)));
        assert_eq!(ctx.pi().val_units(), 1);
        assert_eq!(ctx.int(p as i64).val_units(), p - 1);
    }
}

#[test]
fn storage_caps() {
    assert_eq!(max_storage_precision(5), 26);
    assert_eq!(max_storage_precision(7), 22);
    assert!(Ctx::new(5, 27).is_err());
    assert!(Ctx::new(7, 23).is_err());
}

#[test]
fn unsupported_primes() {
    assert!(check_prime(3).is_err());
    assert!(check_prime(9).is_err());
    assert!(check_prime(17).is_err());
    assert!(check_prime(5).is_ok());
    assert!(check_prime(13).is_ok());
}

#[test]
fn teichmuller_lifts_are_roots_of_unity() {
    let ctx = Ctx::new(7, 22).unwrap();
    for c in 1..7 {
        let w = teichmuller(ctx, c).unwrap();
        assert_eq!(w.pow(6), ctx.one());
        assert_eq!(w.residue_mod_p(), c);
    }
    assert!(teichmuller(ctx, 0).is_err());
}

#[test]
fn unit_root_of_quadratic() {
    let ctx = Ctx::new(5, 20).unwrap();
    let s = ctx.int(3);
    let c = ctx.int(10);
    let r = hensel_quadratic_unit_root(&s, &c).unwrap();
    assert_eq!(r * r - s * r + c, ctx.zero());
    assert!(r.is_unit());
    assert!(hensel_quadratic_unit_root(&ctx.int(5), &c).is_err());
}

#[test]
fn mixed_precision_product() {
    let a = Ctx::new(5, 20).unwrap();
    let b = Ctx::new(5, 10).unwrap();
    let x = omega_mul(&a.int(7), &b.int(3)).unwrap();
    assert_eq!(x.ctx().n(), 10);
    assert_eq!(x, b.int(21));
    assert!(omega_mul(&a.int(1), &Ctx::new(7, 10).unwrap().int(1)).is_err());
}

#[test]
fn symmetric_integer_form() {
    let ctx = Ctx::new(5, 20).unwrap();
    assert_eq!(ctx.int(-123).to_integer_symmetric(), Some(BigInt::from(-123)));
    assert_eq!(ctx.pi().to_integer_symmetric(), None);
}

#[test]
fn series_inverse() {
    let ctx = Ctx::new(5, 20).unwrap();
    let s = Series::from_vec(ctx, vec![ctx.one(), ctx.int(-3), ctx.pi(), ctx.int(2)]);
    let prod = &s * &s.inv().unwrap();
    assert_eq!(prod.coeff(0), ctx.one());
    for i in 1..prod.len() {
        assert!(prod.coeff(i).is_zero(), "coefficient {i}");
    }
}

#[test]
fn record_rejects() {
    let good = Ctx::new(5, 10).unwrap().int(17).to_record();
    assert!(PadicElem::from_record(&good).is_ok());
    let bad = |f: &dyn Fn(&mut PadicRecord)| {
        let mut r = good.clone();
        f(&mut r);
        PadicElem::from_record(&r)
    };
    assert!(bad(&|r| r.p = 3).is_err());
    assert!(bad(&|r| r.n = 40).is_err());
    assert!(bad(&|r| r.coeffs.pop().map(|_| ()).unwrap()).is_err());
    assert!(bad(&|r| r.coeffs[0] = "abc".into()).is_err());
    assert!(bad(&|r| r.coeffs[0] = "-1".into()).is_err());
    assert!(bad(&|r| r.coeffs[1] = "9765625".into()).is_err());
    assert!(bad(&|r| r.abs = 1000).is_err());
    assert!(serde_json::from_str::<PadicRecord>(r#"{"p":5,"N":10,"abs":4}"#).is_err());
}
