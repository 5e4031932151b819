#[path = "common/mod.rs"]
mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::{cm_module, fib, q};
use drinfeld_rat::drinfeld::{shadowed_partitions, DrinfeldModule};
use drinfeld_rat::error::Error;
use drinfeld_rat::field::{FfElem, FieldParams, FiniteField};
use drinfeld_rat::laurent::{Ctx, Laurent, EXACT};
use drinfeld_rat::rat::carlitz_reference;
use drinfeld_rat::tate::{TailClass, TateSeries};

fn ctx(p: u64, m: u32, big_m: u32, e: u32, cap: i64) -> Ctx {
    let f: Arc<FiniteField> = FiniteField::new(FieldParams { p, m, big_m }).unwrap();
    Ctx::new(f, e, cap)
}

/// Exact value with u-exponents at least `lo`.
fn value(c: &Ctx, lo: i64, raw: &[(i64, u32)]) -> Laurent {
    let nz: Vec<FfElem> = c.field.elements().skip(1).collect();
    let t: Vec<(i64, FfElem)> = raw.iter().map(|&(k, i)| (lo + k, nz[i as usize % nz.len()])).collect();
    Laurent::from_terms(c, &t, EXACT)
}

#[test]
fn carlitz_coefficients_have_closed_forms() {
    for (p, m) in [(2, 1), (3, 1), (2, 2)] {
        let c = ctx(p, m, 1, 1, 400);
        let phi = DrinfeldModule::carlitz(&c);
        let data = phi.exp_log_coeffs(4).unwrap();
        let th = c.theta();
        for n in 0..=4u32 {
            // alpha_n = 1/D_n, D_n = prod_{i<n} (theta^{q^n} - theta^{q^i})
            let d = (0..n).fold(c.one(), |acc, i| acc.mul(&th.frobenius(n).sub(&th.frobenius(i))));
            assert!(data.alpha[n as usize].agrees_with(&d.inv().unwrap()), "alpha_{n}, q = {}", c.q());
            // beta_n = 1/prod_{i=1}^n (theta - theta^{q^i})
            let l = (1..=n).fold(c.one(), |acc, i| acc.mul(&th.sub(&th.frobenius(i))));
            assert!(data.beta[n as usize].agrees_with(&l.inv().unwrap()), "beta_{n}, q = {}", c.q());
        }
    }
}

#[test]
fn carlitz_period_is_a_zero_of_exp() {
    for (p, m) in [(2u64, 1u32), (3, 1), (5, 1), (2, 2)] {
        // (q-1)-th roots of -1 live in F_{q^2}
        let big_m = if p == 2 { 1 } else { 2 };
        let qq = p.pow(m) as u32;
        let c = ctx(p, m, big_m, qq - 1, 60 * (qq as i64 - 1));
        let phi = DrinfeldModule::carlitz(&c);
        let (pi, _) = carlitz_reference(&c, 4, None).unwrap();
        assert_eq!(pi.deg(), Some(q(c.q() as i64, c.q() as i64 - 1)));
        let z = phi.exp_eval(&pi).unwrap();
        // exp_C(pi) = 0 to the precision carried
        assert!(z.is_zero(), "q = {}: exp(pi) = {z}", c.q());
        assert!(z.prec() > 0);
        // and exp_C(pi/theta) is a nonzero t-torsion point
        let x = phi.exp_eval(&pi.mul_theta_pow(-1)).unwrap();
        assert!(!x.is_zero());
        assert!(phi.phi_t(&x).is_zero());
    }
}

#[test]
fn radius_and_outside_disk() {
    let c = ctx(3, 1, 1, 2, 80);
    let phi = DrinfeldModule::carlitz(&c);
    assert_eq!(phi.radius().r_phi_logq, q(3, 2));
    let big = c.theta_pow(FfElem::ONE, q(3, 2)).unwrap();
    assert!(matches!(phi.log_eval(&big), Err(Error::OutsideDisk { .. })));
    let cm = cm_module(40);
    // deg A_1 = 9/2: mu_1 = (9/2 - 3)/2 = 3/4 beats mu_2 = -9/8
    assert_eq!(cm.radius().mu, vec![(1, q(3, 4)), (2, q(-9, 8))]);
    assert_eq!(cm.radius().m_star, 1);
    assert_eq!(cm.radius().r_phi_logq, q(-3, 4));
}

#[test]
fn shadowed_partitions_are_counted_by_fibonacci() {
    for n in 0..12 {
        assert_eq!(shadowed_partitions(2, n).len(), fib(n + 1));
        assert_eq!(shadowed_partitions(1, n).len(), 1);
    }
    // tribonacci for r = 3
    let tri = [1, 1, 2, 4, 7, 13, 24, 44];
    for (n, &want) in tri.iter().enumerate() {
        assert_eq!(shadowed_partitions(3, n).len(), want);
    }
}

#[test]
fn b_n_recursion_for_carlitz_is_a_product() {
    // B_n = prod_{k=1}^n 1/(t - theta^{q^k}) for the Carlitz module
    let c = ctx(3, 1, 1, 1, 80);
    let phi = DrinfeldModule::carlitz(&c);
    let bn = phi.b_n_rational(4, 6).unwrap();
    let mut want = TateSeries::one(&c, 6);
    for (n, b) in bn.iter().enumerate() {
        if n > 0 {
            want = want.mul(&TateSeries::one_over_t_minus_theta_qk(&c, n as u32, 6).unwrap());
        }
        assert!(b.agrees_with(&want), "B_{n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn log_is_an_isometric_inverse_of_exp(raw in prop::collection::vec((0i64..6, 0u32..8), 1..4)) {
        let phi = cm_module(40);
        let c = phi.ctx().clone();
        // below R_phi = q^{-3/4}; e = 2
        let x = value(&c, 2, &raw);
        prop_assume!(!x.is_zero());
        let l = phi.log_eval(&x).unwrap();
        prop_assert_eq!(l.deg(), x.deg());
        let back = phi.exp_eval(&l).unwrap();
        prop_assert!(back.agrees_with(&x));
        prop_assert!(back.prec() > l.val_bound() + 20);
    }

    #[test]
    fn phi_action_is_f_q_linear(raw in prop::collection::vec((0i64..6, 0u32..8), 1..4),
                                 raw2 in prop::collection::vec((0i64..6, 0u32..8), 1..4),
                                 k in 0u64..3) {
        let phi = cm_module(40);
        let c = phi.ctx().clone();
        let (x, y) = (value(&c, 0, &raw), value(&c, 0, &raw2));
        let s = c.field.from_int(k as i64);
        prop_assert!(phi.phi_t(&x.add(&y.scale(s))).agrees_with(&phi.phi_t(&x).add(&phi.phi_t(&y).scale(s))));
        let t2 = [FfElem::ZERO, FfElem::ZERO, FfElem::ONE];
        prop_assert!(phi.phi_apply(&t2, &x).agrees_with(&phi.phi_t(&phi.phi_t(&x))));
    }

    #[test]
    fn generating_function_solves_its_difference_equation(raw in prop::collection::vec((0i64..4, 0u32..8), 1..3)) {
        let phi = cm_module(40);
        let c = phi.ctx().clone();
        let u = value(&c, -4, &raw);
        let t = 5;
        let f = phi.agf(&u, t).unwrap();
        prop_assert!(f.agrees_with(&phi.agf_via_exp(&u, t).unwrap()));
        // phi_t(f) - t f = exp_phi(u)
        let lhs = phi.phi_t_series(&f).sub(&f.shift_t(1));
        let rhs = TateSeries::constant(&phi.exp_eval(&u).unwrap(), t);
        prop_assert!(lhs.agrees_with(&rhs));
        // the factored form expands to the same series
        let fact = phi.agf_factored(&u, t).unwrap();
        prop_assert!(fact.to_series().unwrap().agrees_with(&f));
        prop_assert_eq!(fact.regular.tail(), TailClass::ThetaDisk);
    }
}
