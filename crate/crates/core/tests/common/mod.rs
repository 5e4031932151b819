#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use drinfeld_rat::drinfeld::DrinfeldModule;
use drinfeld_rat::error::Error;
use drinfeld_rat::expr::{build_module, eval_defs, parse};
use drinfeld_rat::field::{FfElem, FieldParams, FiniteField};
use drinfeld_rat::laurent::{deg_to_u, Ctx, Laurent, EXACT};
use drinfeld_rat::Q;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn nu_defs() -> Vec<(String, String)> {
    vec![("nu".to_string(), "sqrt(θ^3 - θ - 1, sign=1)".to_string())]
}

pub fn f9() -> Arc<FiniteField> {
    FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap()
}

/// `phi_t = theta + (nu^3 + nu) tau + tau^2` over `F_9`, `nu^2 = theta^3 - theta - 1`.
pub fn cm_module(cap: i64) -> DrinfeldModule {
    build_module(f9(), 1, cap, &nu_defs(), &["nu^3 + nu".into(), "1".into()]).unwrap()
}

/// `nu` in the context of `ctx`.
pub fn nu(ctx: &Ctx) -> Laurent {
    eval_defs(ctx, &nu_defs()).unwrap()["nu"].clone()
}

/// `phi_t = theta + (theta^{q/2} + theta^{1/2}) tau + tau^2` over `F_q`, `q = 2^m`.
pub fn half_carlitz(m: u32, cap: i64) -> DrinfeldModule {
    let f = FiniteField::with_generator_name(FieldParams { p: 2, m, big_m: 1 }, "g").unwrap();
    build_module(f, 1, cap, &[], &["θ^(q/2) + θ^(1/2)".into(), "1".into()]).unwrap()
}

/// A displayed expansion `src + O(theta^{o})`.
pub fn golden(ctx: &Ctx, src: &str, o: Q) -> Laurent {
    let v = parse(src, ctx.q()).unwrap().eval(ctx, &Default::default()).unwrap();
    v.truncate(deg_to_u(o, ctx.e).unwrap())
}

/// Whether `ours` is known to the precision of `gold` and agrees with it there.
pub fn matches(ours: &Laurent, gold: &Laurent) -> bool {
    ours.agrees_to(gold, gold.prec())
}

/// The scalar `c` in `F_q^x` with `sign(c * ours) = sign(gold)`.
pub fn align(ours: &Laurent, gold: &Laurent) -> Option<FfElem> {
    let f = ours.field();
    let c = f.div(gold.sign(), ours.sign()).ok()?;
    f.in_base_field(c).then_some(c)
}

/// The `n`-th Fibonacci number with `fib(0) = 0`, `fib(1) = 1`.
pub fn fib(n: usize) -> usize {
    let (mut a, mut b) = (0usize, 1usize);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Random `phi_t = theta + A_1 tau + ... + A_r tau^r` over `F_{p^M}` with
/// `F_p`-polynomial coefficients of degree at most 2; `A_i` for `i < r` is
/// zero a quarter of the time.
pub fn random_module(rng: &mut ChaCha8Rng, p: u64, r: usize, big_m: u32, cap: i64) -> Result<DrinfeldModule, Error> {
    let f = FiniteField::new(FieldParams { p, m: 1, big_m })?;
    let ctx = Ctx::new(f.clone(), 1, cap);
    let mut a = Vec::new();
    for i in 1..=r {
        let deg = rng.gen_range(0..=2i64);
        let zero = i < r && rng.gen_bool(0.25);
        let mut terms = Vec::new();
        for k in 0..=deg {
            let c = if k == deg { rng.gen_range(1..p) } else { rng.gen_range(0..p) };
            terms.push((-k, f.from_int(c as i64)));
        }
        a.push(if zero { ctx.zero() } else { Laurent::from_terms(&ctx, &terms, EXACT) });
    }
    DrinfeldModule::new(a)
}

