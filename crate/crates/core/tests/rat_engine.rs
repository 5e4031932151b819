#[path = "common/mod.rs"]
mod common;

use std::sync::Arc;

use common::{align, cm_module, half_carlitz, q};
use drinfeld_rat::drinfeld::DrinfeldModule;
use drinfeld_rat::error::Error;
use drinfeld_rat::field::{FieldParams, FiniteField};
use drinfeld_rat::laurent::Ctx;
use drinfeld_rat::newton::{build_xi, DEFAULT_NEWTON_BUDGET};
use drinfeld_rat::rat::{
    build_b, carlitz_reference, closed_form_matrix, contraction_factor, partial_products, partial_products_closed,
    period_log_oracle, quasi_period_oracle, rat_product, run, theta_matrix, upsilon_oracle, RatConfig,
};
use drinfeld_rat::tate::TateSeries;

fn cfg(t_trunc: usize) -> RatConfig {
    RatConfig { t_trunc, ..RatConfig::default() }
}

fn carlitz(p: u64, m: u32, cap: i64) -> DrinfeldModule {
    let big_m = if p == 2 { 1 } else { 2 };
    let f: Arc<FiniteField> = FiniteField::new(FieldParams { p, m, big_m }).unwrap();
    DrinfeldModule::carlitz(&Ctx::new(f, 1, cap))
}

#[test]
fn partial_products_telescope() {
    let t = 8;
    for phi in [cm_module(40), half_carlitz(2, 40)] {
        let (phi, sel) = build_xi(&phi, DEFAULT_NEWTON_BUDGET).unwrap();
        let b = build_b(&sel, t);
        let con = contraction_factor(&phi, &sel, &b, t).unwrap();
        let direct = partial_products(&b, &con.f, 3);
        let closed = partial_products_closed(&phi, &sel, &b, 3, t).unwrap();
        for (k, (x, y)) in direct.iter().zip(&closed).enumerate() {
            assert!(x.agrees_with(y), "Pi_{k}");
        }
    }
}

#[test]
fn product_solves_the_frobenius_equation() {
    let rep = run(&cm_module(60), &cfg(12)).unwrap();
    let pi = &rep.product.pi;
    let res = pi.twist(1).sub(&rep.theta.mul(pi));
    match res.norm_deg() {
        None => {}
        Some(d) => assert!(d <= rep.product.residual_bound, "{d} > {}", rep.product.residual_bound),
    }
    // stopping rule: enough factors to pass t^T
    assert!(rep.product.factors * rep.sel.n > 12);
    // the closed form and the exp-based oracle give the same matrix
    let closed = closed_form_matrix(&rep.entries).unwrap();
    assert!(closed.agrees_with(pi));
    let ups = upsilon_oracle(&rep.phi, &rep.periods.pi, 12).unwrap();
    assert!(ups.agrees_with(pi));
    // Theta has the prescribed determinant (-1)^{r-1} (t - theta)/A_r
    let det = theta_matrix(&rep.phi, 12).unwrap().det();
    let want = TateSeries::polynomial(
        rep.phi.ctx(),
        &[rep.phi.ctx().theta().neg(), rep.phi.ctx().one()],
        12,
    )
    .scalar_mul(&rep.phi.coeff(2).inv().unwrap())
    .neg();
    assert!(det.agrees_with(&want));
}

#[test]
fn periods_agree_with_logarithm_and_partial_fractions() {
    let rep = run(&cm_module(60), &cfg(24)).unwrap();
    let logs = period_log_oracle(&rep.phi, &rep.sel).unwrap();
    for (j, (a, b)) in rep.periods.pi.iter().zip(&logs).enumerate() {
        assert!(a.agrees_with(b), "pi_{}", j + 1);
        let eta = quasi_period_oracle(&rep.phi, a, 1).unwrap();
        assert!(eta.agrees_with(&rep.periods.eta[0][j]), "eta_{}", j + 1);
    }
}

#[test]
fn refitting_does_not_change_the_answer() {
    let t = 8;
    let a = run(&cm_module(40), &cfg(t)).unwrap();
    let e2 = a.phi.ctx().e * 2;
    let b = run(&a.phi.refit(e2).unwrap(), &cfg(t)).unwrap();
    let lifted = a.product.pi.map(|s| {
        TateSeries::from_coeffs(
            s.coeffs().iter().map(|c| c.refit(e2).unwrap()).collect(),
            s.tail(),
        )
    });
    assert!(lifted.agrees_with(&b.product.pi));
    for (x, y) in a.periods.pi.iter().zip(&b.periods.pi) {
        assert!(x.refit(e2).unwrap().agrees_with(y));
    }
}

#[test]
fn carlitz_matches_the_classical_period_and_omega() {
    for (p, m) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (2, 3)] {
        let rep = run(&carlitz(p, m, 60), &cfg(10)).unwrap();
        let ctx = rep.phi.ctx();
        let (pi_tilde, omega) = carlitz_reference(ctx, 10, None).unwrap();
        let pi = &rep.periods.pi[0];
        // our basis is one F_q^x multiple of the classical one
        let c = align(pi, &pi_tilde).expect("period differs by a non-F_q scalar");
        assert!(pi.scale(c).agrees_with(&pi_tilde), "q = {}", ctx.q());
        assert!(pi.prec() - pi.val_bound() >= 10 * ctx.e as i64, "pi known to {} only", pi.prec());
        let ours = rep.product.pi.get(0, 0).scale(c);
        assert!(ours.agrees_with(&omega), "omega_C, q = {}", ctx.q());
        assert!(ours.coeffs().iter().all(|x| x.prec() - x.val_bound() >= 10 * ctx.e as i64));
        assert!(rep.contraction.delta < q(0, 1));
    }
}

#[test]
fn factor_budget_is_enforced() {
    let phi = cm_module(40);
    let (phi, sel) = build_xi(&phi, DEFAULT_NEWTON_BUDGET).unwrap();
    let t = 8;
    let b = build_b(&sel, t);
    let con = contraction_factor(&phi, &sel, &b, t).unwrap();
    let tight = RatConfig { t_trunc: t, factor_budget: 1, ..RatConfig::default() };
    assert!(matches!(
        rat_product(&phi, &b, &con, sel.n, &tight),
        Err(Error::BudgetExhausted { budget: 1 })
    ));
    let ok = rat_product(&phi, &b, &con, sel.n, &cfg(t)).unwrap();
    assert!(ok.factors > 1);
}
