mod common;

use proptest::prelude::*;

use klab::padic::series::Series;
use klab::padic::Ctx;
use klab::sym::{
    alpha_sym_column, beta_matrix, binom_padic, det_one_minus, eta_coefficient, falling_factorial, kernel_dim,
    partial_kappa, reduce_to_r, KappaValue, SymBlock,
};

use common::*;

fn ctx() -> Ctx {
    Ctx::new(5, 20).unwrap()
}

#[test]
fn falling_factorial_examples() {
    let c = ctx();
    let f = |k: i64, m: u64| falling_factorial(&KappaValue::Int(k), m, c);
    assert_eq!(f(5, 5), c.int(120));
    assert_eq!(f(5, 6), c.int(120));
    assert_eq!(f(0, 2), c.int(-1));
    assert_eq!(f(-1, 3), c.int(-6));
}

#[test]
fn binomial_examples() {
    let c = ctx();
    let tau = KappaValue::Int(-1);
    assert_eq!(binom_padic(&KappaValue::Int(7), 0, c), c.one());
    for l in 0..6 {
        assert_eq!(binom_padic(&tau, l, c), c.int(if l % 2 == 0 { 1 } else { -1 }));
    }
    assert_eq!(binom_padic(&KappaValue::Int(5), 2, c), c.int(10));
}

#[test]
fn kappa_text_forms() {
    assert_eq!(KappaValue::parse("-7").unwrap(), KappaValue::Int(-7));
    let k = KappaValue::parse("digits:3,1").unwrap();
    assert_eq!(k, KappaValue::Padic { digits: vec![3, 1] });
    assert_eq!(KappaValue::parse(&k.to_string()).unwrap(), k);
    assert!(KappaValue::parse("digits:").is_err());
    assert!(KappaValue::parse("seven").is_err());
    assert!(KappaValue::parse("digits:9").unwrap().check(5).is_err());
}

proptest! {
    #![proptest_config(config(CASES))]

    #[test]
    fn falling_factorial_recursion(kappa in -30i64..30, m in 0u64..40) {
        prop_falling(kappa, m)?;
    }

    #[test]
    fn fredholm_and_delta_q(a in matrix_strategy()) {
        prop_fredholm_delta(a)?;
    }

    #[test]
    fn kappa_round_trip(k in kappa_strategy()) {
        let s = k.to_string();
        prop_assert_eq!(KappaValue::parse(&s).unwrap(), k);
    }

    /// reduce_to_r vanishes on the image of the boundary operator.
    #[test]
    fn reduce_kills_boundaries(
        kappa in prop_oneof![(-40i64..0).prop_map(KappaValue::Int),
                             prop::collection::vec(0u32..5, 8..12).prop_map(|d| KappaValue::Padic { digits: d })],
        terms in prop::collection::vec((0usize..5, 0usize..6, -30i64..30), 1..6),
    ) {
        prop_assume!(kappa.nonneg_int().is_none());
        let c = ctx();
        let mut xi = SymBlock::zero(c);
        for (n, m, v) in terms {
            xi.add_term(n, m, c.int(v));
        }
        let r = reduce_to_r(&kappa, &partial_kappa(&kappa, &xi)).unwrap();
        prop_assert!(r.values().all(|x| x.is_zero()), "{:?}", r);
    }
}

#[test]
fn fredholm_examples() {
    let c = ctx();
    assert_eq!(det_one_minus(c, &[], 3).unwrap(), vec![c.one(), c.zero(), c.zero(), c.zero()]);
    let d = vec![vec![c.int(2), c.zero()], vec![c.zero(), c.int(7)]];
    assert_eq!(det_one_minus(c, &d, 2).unwrap(), vec![c.one(), c.int(-9), c.int(14)]);
    let u = vec![
        vec![c.zero(), c.int(3), c.int(4)],
        vec![c.zero(), c.zero(), c.int(5)],
        vec![c.zero(), c.zero(), c.zero()],
    ];
    assert_eq!(det_one_minus(c, &u, 3).unwrap(), vec![c.one(), c.zero(), c.zero(), c.zero()]);
}

#[test]
fn boundary_examples() {
    let c = ctx();
    let k = KappaValue::Int(-3);
    let one = SymBlock::monomial(c, 0, 0, c.one());
    assert_eq!(partial_kappa(&k, &one), SymBlock::monomial(c, 0, 1, c.one()));
    let t = SymBlock::monomial(c, 1, 0, c.one());
    let mut want = SymBlock::monomial(c, 1, 0, c.one());
    want.add_term(1, 1, c.one());
    assert_eq!(partial_kappa(&k, &t), want);
    // lowering: d(w^(1)) = w^(2) + kappa pi^2 t
    let w1 = SymBlock::monomial(c, 0, 1, c.one());
    let mut want = SymBlock::monomial(c, 0, 2, c.one());
    want.add_term(1, 0, c.int(-3) * c.pi_pow(2));
    assert_eq!(partial_kappa(&k, &w1), want);
}

#[test]
fn boundary_at_integer_kappa() {
    let c = ctx();
    // kappa = 2: no raising out of w^(2), hatted zero lowering out of w^(3)
    let k = KappaValue::Int(2);
    let w2 = SymBlock::monomial(c, 0, 2, c.one());
    let d = partial_kappa(&k, &w2);
    assert!(d.get(0, 3).is_zero());
    assert_eq!(d.get(1, 1), c.int(2) * c.pi_pow(2));
    let w3 = SymBlock::monomial(c, 0, 3, c.one());
    let d = partial_kappa(&k, &w3);
    assert_eq!(d.get(0, 4), c.one());
    assert_eq!(d.get(1, 2), c.int(3) * c.pi_pow(2));
}

#[test]
fn reduce_examples() {
    let c = ctx();
    for k in [KappaValue::Int(-1), KappaValue::Int(-6), KappaValue::Padic { digits: vec![3, 1, 4, 1] }] {
        let w1 = SymBlock::monomial(c, 0, 1, c.one());
        assert!(reduce_to_r(&k, &w1).unwrap().is_empty());
        let w2 = SymBlock::monomial(c, 0, 2, c.one());
        let r = reduce_to_r(&k, &w2).unwrap();
        let kp = k.to_padic(c);
        assert_eq!(r.len(), 1);
        assert_eq!(r[&1], -(kp * c.pi_pow(2)));
        let xi = SymBlock::monomial(c, 3, 0, c.int(11));
        let r = reduce_to_r(&k, &xi).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[&3], c.int(11));
    }
    assert!(reduce_to_r(&KappaValue::Int(2), &SymBlock::zero(c)).is_err());
}

#[test]
fn even_reduction_matches_pochhammer() {
    let c = ctx();
    for kappa in [-1i64, -2, -5, -9] {
        let k = KappaValue::Int(kappa);
        for m in 1..5u64 {
            let w = SymBlock::monomial(c, 0, 2 * m as usize, c.one());
            let r = reduce_to_r(&k, &w).unwrap();
            let eta = klab::sym::boundary::eta_pochhammer(kappa, m);
            assert!(eta.is_integer());
            let want = c.from_bigint(&eta.to_integer()) * c.pi_pow(2 * m as u32);
            assert_eq!(r.get(&(m as usize)).copied().unwrap_or(c.zero()), want, "kappa {kappa}, m {m}");
            assert_eq!(eta_coefficient(&k, m, c) * c.pi_pow(2 * m as u32), want);
        }
    }
}

#[test]
fn kernel_examples() {
    for (k, want) in [
        (KappaValue::Int(-1), 0),
        (KappaValue::Int(0), 1),
        (KappaValue::Padic { digits: vec![3, 1, 2, 2, 4, 0, 1, 3] }, 0),
    ] {
        let r = kernel_dim(&k, 5, 10, 10).unwrap();
        assert!(!r.indeterminate);
        assert_eq!(r.dim, want, "kappa {k}");
    }
}

#[test]
fn column_at_zero_fixes_one() {
    let s = small_setup();
    let col = alpha_sym_column(&KappaValue::Int(0), 0, &s.frob, 4, 4).unwrap();
    assert_eq!(col.entries.len(), 1);
    assert_eq!(col.get(0, 0), s.ctx().one());
}

#[test]
fn column_degree_zero_part_is_a1_power() {
    let s = small_setup();
    let a = s.frob.unscaled();
    let a1 = a[0][0].truncate(5);
    for kappa in [-1i64, -4, 3] {
        let col = alpha_sym_column(&KappaValue::Int(kappa), 0, &s.frob, 4, 4).unwrap();
        let want = a1.pow_i64(kappa).unwrap();
        assert_eq!(want.coeff(0), s.ctx().one());
        for n in 0..=4 {
            assert_eq!(col.get(n, 0), want.coeff(n), "kappa {kappa}, t^{n}");
        }
    }
}

/// Bivariate truncated series in t (Series) and w (outer index).
fn bi_mul(x: &[Series], y: &[Series], mw: usize) -> Vec<Series> {
    let ctx = x[0].ctx();
    let len = x[0].len();
    let mut out = vec![Series::zero(ctx, len); mw + 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            if i + j <= mw {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
    }
    out
}

#[test]
fn column_matches_direct_expansion() {
    // [alpha]_kappa(w^m) = (A1 + A3 w)^(kappa - m) (A2 + A4 w)^m with
    // w^(j) = kappa^(j) w^j; checked for kappa = -1, m = 1 at (N_t, M_w) = (4, 4)
    let s = small_setup();
    let ctx = s.ctx();
    let (nt, mw) = (4usize, 4usize);
    let len = nt + 1;
    let a = s.frob.unscaled();
    let (a1, a2, a3, a4) = (a[0][0].truncate(len), a[1][0].truncate(len), a[0][1].truncate(len), a[1][1].truncate(len));
    let inv1 = a1.inv().unwrap();
    // (A1 + A3 w)^-1 = A1^-1 sum (-A3/A1)^l w^l
    let r = &a3 * &inv1;
    let mut geo = Vec::new();
    let mut pw = inv1.clone();
    for l in 0..=mw {
        geo.push(if l % 2 == 0 { pw.clone() } else { pw.scale(-ctx.one()) });
        pw = &pw * &r;
    }
    let inv_sq = bi_mul(&geo, &geo, mw);
    let lin = vec![a2.clone(), a4.clone()];
    let direct = bi_mul(&inv_sq, &lin, mw);
    let kappa = KappaValue::Int(-1);
    let col = alpha_sym_column(&kappa, 1, &s.frob, nt, mw).unwrap();
    for (j, dj) in direct.iter().enumerate() {
        // kappa^(1) w^1 image in the w^(j) basis: coefficient * kappa^(j) = kappa^(1) * direct
        let fj = falling_factorial(&kappa, j as u64, ctx);
        let f1 = falling_factorial(&kappa, 1, ctx);
        for n in 0..=nt {
            assert_eq!(col.get(n, j) * fj, dj.coeff(n) * f1, "t^{n} w^{j}");
        }
    }
}

#[test]
fn beta_structure() {
    let s = small_setup();
    let beta = beta_matrix(&KappaValue::Int(0), &s.frob, &s.prof).unwrap();
    let q = beta.q as usize;
    let c = s.ctx();
    let basis = &beta.window.basis;
    let col0 = beta.index_of(0, 0).unwrap();
    for (r, _) in basis.iter().enumerate() {
        let want = if r == col0 { c.one() } else { c.zero() };
        assert_eq!(beta.get(r, col0), want);
    }
    for (r, &(n, _)) in basis.iter().enumerate() {
        for (cidx, &(n2, _)) in basis.iter().enumerate() {
            if q * n < n2 {
                assert!(beta.get(r, cidx).is_zero());
            }
        }
    }
}

#[test]
fn commutation_on_random_kappa() {
    let mut runner = runner(CASES);
    runner.run(&kappa_strategy(), prop_commutation).unwrap();
}

#[test]
fn determinant_is_integral() {
    let s = small_setup();
    for k in [KappaValue::Int(-1), KappaValue::Int(3), KappaValue::Padic { digits: vec![2, 4, 1, 0, 3, 3] }] {
        let l = klab::sym::l_sym_inf(s, &k).unwrap();
        assert_eq!(l.coeffs[0], s.ctx().one());
        for c in &l.coeffs {
            assert!(c.to_integer_symmetric().is_some(), "{c:?} not in Z_p");
        }
    }
}
