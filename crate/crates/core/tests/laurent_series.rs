use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use drinfeld_rat::field::{FfElem, FieldParams, FiniteField};
use drinfeld_rat::laurent::{Ctx, Laurent, EXACT};
use drinfeld_rat::Q;

fn f9() -> Arc<FiniteField> {
    FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap()
}

fn ctx(e: u32) -> Ctx {
    Ctx::new(f9(), e, 200 * e as i64)
}

/// Exact value from `(u-exponent, log)` pairs; logs index the nonzero elements.
fn value(ctx: &Ctx, terms: &[(i64, u32)]) -> Laurent {
    let f = &ctx.field;
    let nz: Vec<FfElem> = f.elements().skip(1).collect();
    let t: Vec<(i64, FfElem)> = terms
        .iter()
        .map(|&(k, c)| (k, nz[c as usize % nz.len()]))
        .collect();
    Laurent::from_terms(ctx, &t, EXACT)
}

fn terms() -> impl Strategy<Value = Vec<(i64, u32)>> {
    prop::collection::vec((-8i64..12, 0u32..8), 1..6)
}

/// Convolution of term lists, independent of the packed representation.
fn naive_product(ctx: &Ctx, a: &Laurent, b: &Laurent) -> BTreeMap<i64, FfElem> {
    let f = &ctx.field;
    let mut out: BTreeMap<i64, FfElem> = BTreeMap::new();
    for (i, x) in a.terms() {
        for (j, y) in b.terms() {
            let slot = out.entry(i + j).or_insert(FfElem::ZERO);
            *slot = f.add(*slot, f.mul(x, y));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

proptest! {
    #[test]
    fn product_matches_convolution(a in terms(), b in terms()) {
        let c = ctx(1);
        let (x, y) = (value(&c, &a), value(&c, &b));
        let got: BTreeMap<i64, FfElem> = x.mul(&y).terms().into_iter().collect();
        prop_assert_eq!(got, naive_product(&c, &x, &y));
    }

    #[test]
    fn ring_laws_hold_to_precision(a in terms(), b in terms(), d in terms()) {
        let c = ctx(2);
        let (x, y, z) = (value(&c, &a), value(&c, &b), value(&c, &d));
        prop_assert!(x.mul(&y.add(&z)).agrees_with(&x.mul(&y).add(&x.mul(&z))));
        prop_assert!(x.mul(&y).mul(&z).agrees_with(&x.mul(&y.mul(&z))));
        prop_assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn division_inverts_multiplication(a in terms(), b in terms()) {
        let c = ctx(1);
        let (x, y) = (value(&c, &a), value(&c, &b));
        prop_assume!(!y.is_zero());
        let back = x.mul(&y).div(&y).unwrap();
        prop_assert!(back.agrees_with(&x));
        if !x.is_zero() {
            prop_assert_eq!(x.inv().unwrap().deg(), x.deg().map(|d| -d));
        }
    }

    #[test]
    fn frobenius_is_a_ring_map(a in terms(), b in terms(), k in 0u32..3) {
        let c = ctx(1);
        let (x, y) = (value(&c, &a), value(&c, &b));
        prop_assert!(x.mul(&y).frobenius(k).agrees_with(&x.frobenius(k).mul(&y.frobenius(k))));
        prop_assert!(x.add(&y).frobenius(k).agrees_with(&x.frobenius(k).add(&y.frobenius(k))));
        prop_assert!(x.frobenius(1).agrees_with(&x.pow(3)));
        prop_assert!(x.frobenius(1).root_q().unwrap().agrees_with(&x));
    }

    #[test]
    fn refit_commutes_with_arithmetic(a in terms(), b in terms(), k in 1u32..4) {
        let c = ctx(2);
        let (x, y) = (value(&c, &a), value(&c, &b));
        let e = 2 * k;
        let lhs = x.mul(&y).refit(e).unwrap();
        let rhs = x.refit(e).unwrap().mul(&y.refit(e).unwrap());
        prop_assert!(lhs.agrees_with(&rhs));
        prop_assert_eq!(x.refit(e).unwrap().deg(), x.deg());
    }

    #[test]
    fn roots_power_back(a in terms(), n in 2u64..5) {
        let c = ctx(1);
        let x = value(&c, &a);
        prop_assume!(!x.is_zero());
        let y = x.pow(n);
        let r = match y.nth_root(n, Some(x.sign())) {
            Ok(r) => r,
            Err(drinfeld_rat::error::Error::NeedRamification { e_needed, .. }) => {
                y.refit(e_needed).unwrap().nth_root(n, Some(x.sign())).unwrap()
            }
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        prop_assert!(r.pow(n).agrees_with(&y.refit(r.e()).unwrap()));
        prop_assert_eq!(r.deg(), x.deg());
    }

    #[test]
    fn truncation_only_lowers_precision(a in terms(), p in -4i64..20) {
        let c = ctx(1);
        let x = value(&c, &a);
        let t = x.truncate(p);
        prop_assert!(t.prec() <= p);
        prop_assert!(t.agrees_with(&x));
        prop_assert!(t.val_bound() >= x.val_bound().min(p));
    }
}

#[test]
fn theta_powers_and_degrees() {
    let c = ctx(4);
    let x = c.theta_pow(FfElem::ONE, Q::new(3, 4)).unwrap();
    assert_eq!(x.deg(), Some(Q::new(3, 4)));
    assert!(x.pow(4).agrees_with(&c.theta().pow(3)));
    assert!(c.theta_pow(FfElem::ONE, Q::new(1, 3)).is_err());
}

#[test]
fn inexact_values_track_precision() {
    let c = ctx(1);
    let x = c.one().sub(&c.theta().inv().unwrap()).truncate(10);
    let y = x.inv().unwrap();
    // 1/(1 - 1/theta) = sum theta^{-k}
    for k in 0..10 {
        assert_eq!(y.coeff(k), Some(FfElem::ONE));
    }
    assert_eq!(y.coeff(10), None);
    assert!(y.mul(&x).agrees_with(&c.one()));
}

#[test]
fn square_roots_need_a_sign_in_odd_characteristic() {
    let c = ctx(1);
    let v = c.theta().pow(3).sub(&c.theta()).sub(&c.one());
    assert!(matches!(v.sqrt(Some(FfElem::ONE)), Err(drinfeld_rat::error::Error::NeedRamification { e_needed: 2, .. })));
    let c = ctx(2);
    let v = c.theta().pow(3).sub(&c.theta()).sub(&c.one());
    let nu = v.sqrt(Some(FfElem::ONE)).unwrap();
    assert!(nu.mul(&nu).agrees_with(&v.refit(nu.e()).unwrap()));
    assert_eq!(nu.deg(), Some(Q::new(3, 2)));
}
