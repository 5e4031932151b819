//! Drinfeld modules `phi_t = theta + A_1 tau + ... + A_r tau^r` and their
//! analytic companions.

use crate::error::{Error, Result};
use crate::field::FfElem;
use crate::laurent::{Ctx, Laurent};
use crate::tate::{Factored, TailClass, TateSeries};
use crate::Q;

/// Default bound on the number of terms summed by series evaluations.
pub const DEFAULT_N_MAX: usize = 40;

#[derive(Clone, Debug)]
pub struct DrinfeldModule {
    ctx: Ctx,
    a: Vec<Laurent>,
}

/// Exponential and logarithm coefficients.
#[derive(Clone, Debug)]
pub struct ExpLogData {
    pub alpha: Vec<Laurent>,
    pub beta: Vec<Laurent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusData {
    /// `(n, mu_n)` for `n` in `N(phi)`.
    pub mu: Vec<(usize, Q)>,
    pub m_star: usize,
    /// `log_q R_phi = -mu_{m*}`.
    pub r_phi_logq: Q,
}

/// Accumulate `term(0) + term(1) + ...` until `window` consecutive terms
/// fall below the precision of the running sum, which is then truncated to
/// that threshold.  The window must exceed the longest run of vanishing terms
/// that can precede a nonzero one.
pub(crate) fn sum_until_negligible(
    ctx: &Ctx,
    n_max: usize,
    window: usize,
    mut term: impl FnMut(usize) -> Result<Laurent>,
) -> Result<Laurent> {
    let mut acc = Laurent::zero(ctx);
    let mut quiet = 0;
    for n in 0..n_max {
        let t = term(n)?;
        let threshold = acc.prec().min(acc.val_bound().saturating_add(ctx.cap));
        let negligible = t.val_bound() >= threshold;
        acc = acc.add(&t);
        if negligible {
            quiet += 1;
            if quiet >= window {
                return Ok(acc.truncate(threshold));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "series did not settle within {n_max} terms"
    )))
}

impl DrinfeldModule {
    /// Module with `phi_t = theta + sum A_i tau^i`; `A_r` must be nonzero.
    pub fn new(a: Vec<Laurent>) -> Result<DrinfeldModule> {
        let Some(last) = a.last() else {
            return Err(Error::Invalid("rank must be at least 1".into()));
        };
        if last.is_zero() {
            return Err(Error::Invalid("leading coefficient A_r vanishes".into()));
        }
        let ctx = a.iter().max_by_key(|x| x.e()).unwrap().ctx().clone();
        let e = ctx.e;
        let a = a.into_iter().map(|x| x.refit(e)).collect::<Result<Vec<_>>>()?;
        Ok(DrinfeldModule { ctx, a })
    }

    /// Carlitz module `theta + tau`.
    #[must_use]
    pub fn carlitz(ctx: &Ctx) -> DrinfeldModule {
        DrinfeldModule {
            ctx: ctx.clone(),
            a: vec![ctx.one()],
        }
    }

    #[must_use]
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    #[must_use]
    pub fn rank(&self) -> usize {
        self.a.len()
    }
    #[must_use]
    pub fn q(&self) -> u64 {
        self.ctx.q()
    }

    /// `A_i` for `1 <= i <= r`; `A_0 = theta`.
    #[must_use]
    pub fn coeff(&self, i: usize) -> Laurent {
        if i == 0 {
            self.ctx.theta()
        } else {
            self.a[i - 1].clone()
        }
    }

    #[must_use]
    pub fn coeffs(&self) -> &[Laurent] {
        &self.a
    }

    /// `N(phi) = { i : A_i != 0 }`.
    #[must_use]
    pub fn support(&self) -> Vec<usize> {
        (1..=self.rank()).filter(|&i| !self.a[i - 1].is_zero()).collect()
    }

    /// `deg A_i` (with `deg A_0 = 1`).
    #[must_use]
    pub fn deg_coeff(&self, i: usize) -> Option<Q> {
        if i == 0 {
            Some(Q::from(1))
        } else {
            self.a[i - 1].deg()
        }
    }

    /// Consecutive negligible terms required before a series over `n` is
    /// cut off: runs of vanishing coefficients are shorter than the rank.
    pub(crate) fn window(&self) -> usize {
        (self.rank() + 1).max(2)
    }

    /// Same module with every coefficient refitted to ramification `e`.
    pub fn refit(&self, e: u32) -> Result<DrinfeldModule> {
        let a = self.a.iter().map(|x| x.refit(e)).collect::<Result<Vec<_>>>()?;
        Ok(DrinfeldModule {
            ctx: a[0].ctx().clone(),
            a,
        })
    }

    /// Same module with relative precision cap `cap`.
    #[must_use]
    pub fn with_cap(&self, cap: i64) -> DrinfeldModule {
        let a: Vec<Laurent> = self.a.iter().map(|x| x.with_cap(cap)).collect();
        DrinfeldModule {
            ctx: self.ctx.with_cap(cap),
            a,
        }
    }

    /// `phi_t(x) = theta x + sum A_i x^{q^i}`.
    #[must_use]
    pub fn phi_t(&self, x: &Laurent) -> Laurent {
        let mut acc = x.mul_theta_pow(1);
        for (i, a) in self.a.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&a.mul(&x.frobenius(i as u32 + 1)));
        }
        acc
    }

    /// `phi_a(x)` for `a = sum a_k t^k` with coefficients in `F_q`.
    #[must_use]
    pub fn phi_apply(&self, a: &[FfElem], x: &Laurent) -> Laurent {
        let mut acc = Laurent::zero(x.ctx());
        for &c in a.iter().rev() {
            acc = self.phi_t(&acc).add(&x.scale(c));
        }
        acc
    }

    /// `phi_t` acting coefficientwise on a series in `t`:
    /// `theta f + sum A_i f^{(i)}`.
    #[must_use]
    pub fn phi_t_series(&self, f: &TateSeries) -> TateSeries {
        let mut acc = f.scalar_mul(&self.ctx.theta());
        for (i, a) in self.a.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&f.twist(i as u32 + 1).scalar_mul(a));
        }
        acc
    }

    /// `alpha_0..alpha_{n_max}` and `beta_0..beta_{n_max}` from
    /// `alpha_n (theta^{q^n} - theta) = sum_i A_i alpha_{n-i}^{q^i}` and
    /// `beta_n (theta - theta^{q^n}) = sum_i beta_{n-i} A_i^{q^{n-i}}`.
    pub fn exp_log_coeffs(&self, n_max: usize) -> Result<ExpLogData> {
        let mut seq = ExpLogSeq::new(self);
        seq.ensure(n_max)?;
        Ok(ExpLogData {
            alpha: seq.alpha,
            beta: seq.beta,
        })
    }

    /// `exp_phi(z)`, summed until the terms are negligible.
    pub fn exp_eval(&self, z: &Laurent) -> Result<Laurent> {
        let mut seq = ExpLogSeq::new(self);
        sum_until_negligible(&self.ctx, DEFAULT_N_MAX + 1, self.window(), |n| {
            seq.ensure(n)?;
            Ok(seq.alpha[n].mul(&z.try_frobenius(n as u32)?))
        })
    }

    /// Radius data from `mu_n = (deg A_n - q^n)/(q^n - 1)`.
    #[must_use]
    pub fn radius(&self) -> RadiusData {
        let q = self.q() as i64;
        let mut mu = Vec::new();
        for n in self.support() {
            let qn = q.pow(n as u32);
            let d = self.deg_coeff(n).unwrap();
            mu.push((n, (d - Q::from(qn)) / Q::from(qn - 1)));
        }
        let best = mu.iter().map(|m| m.1).max().unwrap();
        let m_star = mu.iter().find(|m| m.1 == best).unwrap().0;
        RadiusData {
            mu,
            m_star,
            r_phi_logq: -best,
        }
    }

    /// `log_phi(x)` for `|x| < R_phi`.
    pub fn log_eval(&self, x: &Laurent) -> Result<Laurent> {
        let bound = self.radius().r_phi_logq;
        if let Some(d) = x.deg() {
            if d >= bound {
                return Err(Error::OutsideDisk {
                    deg: d.to_string(),
                    bound: bound.to_string(),
                });
            }
        } else {
            return Ok(x.clone());
        }
        let mut seq = ExpLogSeq::new(self);
        sum_until_negligible(&self.ctx, DEFAULT_N_MAX + 1, self.window(), |n| {
            seq.ensure(n)?;
            Ok(seq.beta[n].mul(&x.try_frobenius(n as u32)?))
        })
    }

    /// Anderson generating function
    /// `f_phi(u;t) = sum_n alpha_n u^{q^n} / (theta^{q^n} - t)`, whose
    /// `t^m` coefficient is `sum_n alpha_n u^{q^n} theta^{-q^n (m+1)}`.
    pub fn agf(&self, u: &Laurent, t_trunc: usize) -> Result<TateSeries> {
        Ok(TateSeries::from_coeffs(
            self.agf_coeffs(u, t_trunc, 0)?,
            TailClass::UnitDisk,
        ))
    }

    /// `t^m` coefficients of `sum_{n >= n0} alpha_n u^{q^n} / (theta^{q^n} - t)`.
    fn agf_coeffs(&self, u: &Laurent, t_trunc: usize, n0: usize) -> Result<Vec<Laurent>> {
        let mut seq = ExpLogSeq::new(self);
        let mut w: Vec<Laurent> = Vec::new();
        let q = self.q() as i64;
        let mut coeffs = Vec::with_capacity(t_trunc + 1);
        for m in 0..=t_trunc {
            let c = sum_until_negligible(&self.ctx, DEFAULT_N_MAX + 1 - n0, self.window(), |k| {
                let n = k + n0;
                while w.len() <= n {
                    let i = w.len();
                    seq.ensure(i)?;
                    w.push(seq.alpha[i].mul(&u.try_frobenius(i as u32)?));
                }
                if w[n].is_zero() {
                    return Ok(w[n].clone());
                }
                let shift = q
                    .checked_pow(n as u32)
                    .and_then(|qn| qn.checked_mul(m as i64 + 1))
                    .ok_or_else(|| Error::PrecisionExhausted("AGF degree overflow".into()))?;
                Ok(w[n].mul_theta_pow(-shift))
            })?;
            coeffs.push(c);
        }
        Ok(coeffs)
    }

    /// The same function from `f_phi(u;t) = sum_m exp_phi(u/theta^{m+1}) t^m`.
    pub fn agf_via_exp(&self, u: &Laurent, t_trunc: usize) -> Result<TateSeries> {
        let mut coeffs = Vec::with_capacity(t_trunc + 1);
        for m in 0..=t_trunc {
            coeffs.push(self.exp_eval(&u.mul_theta_pow(-(m as i64) - 1))?);
        }
        Ok(TateSeries::from_coeffs(coeffs, TailClass::UnitDisk))
    }

    /// Generating function in factored form `f_+ - t^0/(t - theta) u`, where
    /// `f_+` collects the terms with `n >= 1` and converges at `t = theta`.
    pub fn agf_factored(&self, u: &Laurent, t_trunc: usize) -> Result<Factored> {
        Ok(Factored {
            regular: TateSeries::from_coeffs(self.agf_coeffs(u, t_trunc, 1)?, TailClass::ThetaDisk),
            n: 0,
            h: TateSeries::constant(u, t_trunc),
        })
    }

    /// `B_0..B_n` from `B_m = sum_k A_k B_{m-k}^{(k)} / (t - theta^{q^k})`.
    pub fn b_n_rational(&self, n: usize, t_trunc: usize) -> Result<Vec<TateSeries>> {
        let mut gen = BnSequence::new(self, t_trunc)?;
        (0..=n).map(|m| gen.get(m).cloned()).collect()
    }

    /// `L_phi(xi;t) = sum_n B_n(t) xi^{q^n}`, summed until the terms vanish
    /// coefficientwise to precision.
    pub fn l_phi(&self, xi: &Laurent, t_trunc: usize, n_max: usize) -> Result<TateSeries> {
        let bound = self.radius().r_phi_logq;
        if let Some(d) = xi.deg() {
            if d >= bound {
                return Err(Error::OutsideDisk {
                    deg: d.to_string(),
                    bound: bound.to_string(),
                });
            }
        }
        let mut gen = BnSequence::new(self, t_trunc)?;
        let mut acc = TateSeries::zero(&self.ctx, t_trunc);
        let mut quiet = 0;
        let mut last_deg: Option<Q> = None;
        for n in 0..=n_max {
            let term = gen.get(n)?.scalar_mul(&xi.try_frobenius(n as u32)?);
            let thresholds: Vec<i64> = acc
                .coeffs()
                .iter()
                .map(|a| a.prec().min(a.val_bound().saturating_add(self.ctx.cap)))
                .collect();
            let negligible = term
                .coeffs()
                .iter()
                .zip(&thresholds)
                .all(|(t, &th)| t.val_bound() >= th);
            let d = term.gauss_deg();
            if let (Some(prev), Some(cur)) = (last_deg, d) {
                if cur >= prev && !negligible {
                    return Err(Error::PrecisionExhausted(format!(
                        "terms of L_phi stopped decreasing at n = {n}"
                    )));
                }
            }
            if d.is_some() {
                last_deg = d;
            }
            acc = acc.add(&term);
            if negligible {
                quiet += 1;
                if quiet >= self.window() {
                    let cut: Vec<Laurent> = acc
                        .coeffs()
                        .iter()
                        .zip(&thresholds)
                        .map(|(c, &th)| c.truncate(th))
                        .collect();
                    return Ok(TateSeries::from_coeffs(cut, TailClass::ThetaDisk));
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::PrecisionExhausted(format!(
            "L_phi did not settle within n_max = {n_max}"
        )))
    }
}

/// Lazily extended exponential and logarithm coefficients.
pub struct ExpLogSeq<'a> {
    phi: &'a DrinfeldModule,
    pub alpha: Vec<Laurent>,
    pub beta: Vec<Laurent>,
}

impl<'a> ExpLogSeq<'a> {
    #[must_use]
    pub fn new(phi: &'a DrinfeldModule) -> ExpLogSeq<'a> {
        let one = phi.ctx.one();
        ExpLogSeq {
            phi,
            alpha: vec![one.clone()],
            beta: vec![one],
        }
    }

    /// Extends both sequences through index `n`.
    pub fn ensure(&mut self, n_max: usize) -> Result<()> {
        let ctx = &self.phi.ctx;
        let th = ctx.theta();
        while self.alpha.len() <= n_max {
            let n = self.alpha.len();
            let d = th.try_frobenius(n as u32)?.sub(&th);
            let mut sa = Laurent::zero(ctx);
            let mut sb = Laurent::zero(ctx);
            for i in 1..=n.min(self.phi.rank()) {
                let ai = &self.phi.a[i - 1];
                if ai.is_zero() {
                    continue;
                }
                sa = sa.add(&ai.mul(&self.alpha[n - i].try_frobenius(i as u32)?));
                sb = sb.add(&self.beta[n - i].mul(&ai.try_frobenius((n - i) as u32)?));
            }
            self.alpha.push(sa.div(&d)?);
            self.beta.push(sb.div(&d)?.neg());
        }
        Ok(())
    }
}

/// Lazily extended sequence `B_0, B_1, ...`.
pub struct BnSequence<'a> {
    phi: &'a DrinfeldModule,
    t_trunc: usize,
    inv: Vec<TateSeries>,
    seq: Vec<TateSeries>,
}

impl<'a> BnSequence<'a> {
    pub fn new(phi: &'a DrinfeldModule, t_trunc: usize) -> Result<BnSequence<'a>> {
        let ctx = phi.ctx();
        let inv = (1..=phi.rank())
            .map(|k| TateSeries::one_over_t_minus_theta_qk(ctx, k as u32, t_trunc))
            .collect::<Result<Vec<_>>>()?;
        Ok(BnSequence {
            phi,
            t_trunc,
            inv,
            seq: vec![TateSeries::one(ctx, t_trunc)],
        })
    }

    pub fn get(&mut self, n: usize) -> Result<&TateSeries> {
        let ctx = self.phi.ctx().clone();
        while self.seq.len() <= n {
            let m = self.seq.len();
            let mut acc = TateSeries::zero(&ctx, self.t_trunc);
            for k in 1..=m.min(self.phi.rank()) {
                let ak = &self.phi.a[k - 1];
                if ak.is_zero() {
                    continue;
                }
                let term = self.seq[m - k]
                    .twist(k as u32)
                    .mul(&self.inv[k - 1])
                    .scalar_mul(ak);
                acc = acc.add(&term);
            }
            self.seq.push(acc.with_tail(TailClass::ThetaDisk));
        }
        Ok(&self.seq[n])
    }
}

/// All `(S_1, ..., S_r)` with `S_i` subsets of `{0..n-1}` such that the sets
/// `{s + j : s in S_i, 0 <= j < i}` partition `{0..n-1}`.
#[must_use]
pub fn shadowed_partitions(r: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(r: usize, n: usize, pos: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if pos == n {
            out.push(cur.clone());
            return;
        }
        for i in 1..=r {
            if pos + i <= n {
                cur[i - 1].push(pos);
                go(r, n, pos + i, cur, out);
                cur[i - 1].pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![Vec::new(); r];
    go(r, n, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldParams, FiniteField};

    fn ctx(q: u64) -> Ctx {
        let f = FiniteField::new(FieldParams { p: q, m: 1, big_m: 1 }).unwrap();
        Ctx::new(f, 1, 60)
    }

    #[test]
    fn carlitz_first_coefficients() {
        let c = ctx(3);
        let phi = DrinfeldModule::carlitz(&c);
        let d = phi.exp_log_coeffs(2).unwrap();
        let th = c.theta();
        let tq = th.frobenius(1);
        assert!(d.alpha[1].agrees_with(&tq.sub(&th).inv().unwrap()));
        assert!(d.beta[1].agrees_with(&th.sub(&tq).inv().unwrap()));
        assert!(d.alpha[0].same_as(&c.one()) && d.beta[0].same_as(&c.one()));
    }

    #[test]
    fn carlitz_action() {
        let c = ctx(3);
        let phi = DrinfeldModule::carlitz(&c);
        let x = c.theta().add(&c.int(2));
        let expect = c.theta().mul(&x).add(&x.pow(3));
        assert!(phi.phi_t(&x).same_as(&expect));
        assert!(phi.phi_apply(&[FfElem::ONE], &x).same_as(&x));
    }

    #[test]
    fn carlitz_radius() {
        let c = ctx(3);
        let r = DrinfeldModule::carlitz(&c).radius();
        assert_eq!(r.mu, vec![(1, Q::new(-3, 2))]);
        assert_eq!(r.r_phi_logq, Q::new(3, 2));
    }

    #[test]
    fn partition_counts() {
        for n in 0..8 {
            assert_eq!(shadowed_partitions(1, n).len(), 1);
        }
        assert_eq!(shadowed_partitions(2, 2).len(), 2);
        assert_eq!(shadowed_partitions(3, 0), vec![vec![Vec::<usize>::new(); 3]]);
    }
}
