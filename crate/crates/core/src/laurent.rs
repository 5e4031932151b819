//! Truncated Laurent series in `u = theta^{-1/e}` over `F_{q^M}` with an
//! explicit absolute precision.
//!
//! A value is `sum_{k} c_k u^{lead + k} + O(u^{prec})`. Exact values carry
//! `prec == EXACT`. Every result is additionally limited to `cap` significant
//! u-digits (relative precision), so that repeated Frobenius twists and
//! inversions stay bounded in size; such truncation is reflected in `prec`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FfElem, FiniteField};
use crate::Q;

/// Precision marker for exactly known values.
pub const EXACT: i64 = 1 << 60;
/// Values below `u^LIMIT` are indistinguishable from zero.
pub const LIMIT: i64 = 1 << 56;

/// Shared arithmetic context: field, ramification and relative precision cap.
#[derive(Clone)]
pub struct Ctx {
    pub field: Arc<FiniteField>,
    pub e: u32,
    /// Maximal number of significant u-digits kept by inexact results.
    pub cap: i64,
}

impl fmt::Debug for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ctx(q = {}, e = {}, cap = {})", self.field.q(), self.e, self.cap)
    }
}

impl Ctx {
    #[must_use]
    pub fn new(field: Arc<FiniteField>, e: u32, cap: i64) -> Ctx {
        assert!(e >= 1 && cap >= 1);
        Ctx { field, e, cap }
    }

    #[must_use]
    pub fn q(&self) -> u64 {
        self.field.q()
    }

    #[must_use]
    pub fn with_e(&self, e: u32) -> Ctx {
        let k = (e / self.e).max(1) as i64;
        Ctx {
            field: self.field.clone(),
            e,
            cap: self.cap * k,
        }
    }

    #[must_use]
    pub fn with_cap(&self, cap: i64) -> Ctx {
        Ctx {
            field: self.field.clone(),
            e: self.e,
            cap,
        }
    }

    #[must_use]
    pub fn zero(&self) -> Laurent {
        Laurent::zero(self)
    }

    #[must_use]
    pub fn one(&self) -> Laurent {
        Laurent::constant(self, FfElem::ONE)
    }

    #[must_use]
    pub fn theta(&self) -> Laurent {
        Laurent::monomial(self, FfElem::ONE, -(self.e as i64))
    }

    #[must_use]
    pub fn int(&self, k: i64) -> Laurent {
        Laurent::constant(self, self.field.from_int(k))
    }

    /// `c * theta^{num/den}`; errors if `e * num / den` is not an integer.
    pub fn theta_pow(&self, c: FfElem, exp: Q) -> Result<Laurent> {
        let u = -exp * Q::from(self.e as i64);
        if !u.is_integer() {
            return Err(Error::NeedRamification {
                e: self.e,
                e_needed: lcm_u32(self.e, (*exp.denom()) as u32),
            });
        }
        Ok(Laurent::monomial(self, c, u.to_integer()))
    }
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

#[inline]
fn padd(p: i64, l: i64) -> i64 {
    if p >= EXACT {
        EXACT
    } else {
        p + l
    }
}

#[derive(Clone)]
pub struct Laurent {
    ctx: Ctx,
    lead: i64,
    coeffs: Vec<FfElem>,
    prec: i64,
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Laurent {
    /// Exact zero.
    #[must_use]
    pub fn zero(ctx: &Ctx) -> Laurent {
        Laurent {
            ctx: ctx.clone(),
            lead: EXACT,
            coeffs: Vec::new(),
            prec: EXACT,
        }
    }

    /// Zero known modulo `u^prec`.
    #[must_use]
    pub fn zero_mod(ctx: &Ctx, prec: i64) -> Laurent {
        let mut prec = prec.min(EXACT);
        if prec < EXACT && prec > LIMIT {
            prec = LIMIT;
        }
        Laurent {
            ctx: ctx.clone(),
            lead: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    #[must_use]
    pub fn constant(ctx: &Ctx, c: FfElem) -> Laurent {
        Laurent::monomial(ctx, c, 0)
    }

    /// Exact `c * u^k`.
    #[must_use]
    pub fn monomial(ctx: &Ctx, c: FfElem, k: i64) -> Laurent {
        Laurent::from_parts(ctx, k, vec![c], EXACT)
    }

    /// Build from `(u-exponent, coefficient)` pairs and a precision.
    #[must_use]
    pub fn from_terms(ctx: &Ctx, terms: &[(i64, FfElem)], prec: i64) -> Laurent {
        let nz: Vec<_> = terms
            .iter()
            .filter(|(k, c)| !c.is_zero() && *k < prec)
            .collect();
        if nz.is_empty() {
            return Laurent::zero_mod(ctx, prec);
        }
        let lo = nz.iter().map(|t| t.0).min().unwrap();
        let hi = nz.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![FfElem::ZERO; (hi - lo + 1) as usize];
        let f = &ctx.field;
        for &&(k, c) in &nz {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = f.add(*slot, c);
        }
        Laurent::from_parts(ctx, lo, coeffs, prec)
    }

    /// Normalizing constructor.
    fn from_parts(ctx: &Ctx, lead: i64, mut coeffs: Vec<FfElem>, prec: i64) -> Laurent {
        let mut prec = prec.min(EXACT);
        if prec < EXACT && prec > LIMIT {
            prec = LIMIT;
        }
        let start = coeffs.iter().position(|c| !c.is_zero());
        let Some(start) = start else {
            return Laurent::zero_mod(ctx, prec);
        };
        let lead = lead + start as i64;
        if lead >= prec {
            return Laurent::zero_mod(ctx, prec);
        }
        if start > 0 {
            coeffs.drain(..start);
        }
        let max_len = (prec - lead).min(EXACT) as usize;
        if coeffs.len() > max_len {
            coeffs.truncate(max_len);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let cap = ctx.cap;
        if prec >= EXACT {
            if coeffs.len() as i64 > cap {
                prec = lead + cap;
                coeffs.truncate(cap as usize);
                while coeffs.last().is_some_and(|c| c.is_zero()) {
                    coeffs.pop();
                }
            }
        } else if prec - lead > cap {
            prec = lead + cap;
            coeffs.truncate(cap as usize);
            while coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
        }
        Laurent {
            ctx: ctx.clone(),
            lead,
            coeffs,
            prec,
        }
    }

    #[must_use]
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    #[must_use]
    pub fn field(&self) -> &FiniteField {
        &self.ctx.field
    }
    #[must_use]
    pub fn e(&self) -> u32 {
        self.ctx.e
    }
    #[must_use]
    pub fn prec(&self) -> i64 {
        self.prec
    }
    #[must_use]
    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Zero to the known precision.
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading u-exponent of a nonzero value.
    #[must_use]
    pub fn lead(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lead)
    }

    /// Lower bound for the u-valuation (`prec` for values zero to precision).
    #[must_use]
    pub fn val_bound(&self) -> i64 {
        if self.is_zero() {
            self.prec
        } else {
            self.lead
        }
    }

    /// `deg x = -lead / e`, `None` for zero.
    #[must_use]
    pub fn deg(&self) -> Option<Q> {
        self.lead().map(|l| Q::new(-l, self.ctx.e as i64))
    }

    /// Upper bound for `deg x`, using the precision for zero values.
    #[must_use]
    pub fn deg_bound(&self) -> Q {
        Q::new(-self.val_bound().min(LIMIT), self.ctx.e as i64)
    }

    /// Degree of the precision floor, i.e. the error is `O(theta^{prec_deg})`.
    #[must_use]
    pub fn prec_deg(&self) -> Q {
        Q::new(-self.prec.min(LIMIT), self.ctx.e as i64)
    }

    /// Leading coefficient (the sign), zero for zero.
    #[must_use]
    pub fn sign(&self) -> FfElem {
        self.coeffs.first().copied().unwrap_or(FfElem::ZERO)
    }

    /// Stored coefficients starting at `lead`.
    #[must_use]
    pub fn coeffs(&self) -> &[FfElem] {
        &self.coeffs
    }

    /// Coefficient of `u^k`, `None` if beyond the precision.
    #[must_use]
    pub fn coeff(&self, k: i64) -> Option<FfElem> {
        if k >= self.prec {
            return None;
        }
        if self.is_zero() || k < self.lead {
            return Some(FfElem::ZERO);
        }
        Some(
            self.coeffs
                .get((k - self.lead) as usize)
                .copied()
                .unwrap_or(FfElem::ZERO),
        )
    }

    /// Nonzero `(u-exponent, coefficient)` pairs.
    #[must_use]
    pub fn terms(&self) -> Vec<(i64, FfElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| (self.lead + k as i64, c))
            .collect()
    }

    /// Reduce the precision to at most `prec`.
    #[must_use]
    pub fn truncate(&self, prec: i64) -> Laurent {
        if prec >= self.prec {
            return self.clone();
        }
        Laurent::from_parts(&self.ctx, self.lead, self.coeffs.clone(), prec)
    }

    /// Same value with relative precision cap `cap`.
    #[must_use]
    pub fn with_cap(&self, cap: i64) -> Laurent {
        let ctx = self.ctx.with_cap(cap);
        Laurent::from_parts(&ctx, self.lead, self.coeffs.clone(), self.prec)
    }

    /// Rescale to ramification `e_new`, a multiple of `e`.
    pub fn refit(&self, e_new: u32) -> Result<Laurent> {
        let e = self.ctx.e;
        if e_new == 0 || !e_new.is_multiple_of(e) {
            return Err(Error::Invalid(format!(
                "ramification {e_new} is not a multiple of {e}"
            )));
        }
        if e_new == e {
            return Ok(self.clone());
        }
        let k = (e_new / e) as i64;
        let ctx = self.ctx.with_e(e_new);
        let prec = if self.is_exact() { EXACT } else { self.prec * k };
        if self.is_zero() {
            return Ok(Laurent::zero_mod(&ctx, prec));
        }
        let mut coeffs = vec![FfElem::ZERO; (self.coeffs.len() - 1) * k as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c;
        }
        Ok(Laurent::from_parts(&ctx, self.lead * k, coeffs, prec))
    }

    /// Bring two values to a common ramification index.
    fn unify(a: &Laurent, b: &Laurent) -> (Laurent, Laurent) {
        let e = a.ctx.e.lcm(&b.ctx.e);
        (a.refit(e).unwrap(), b.refit(e).unwrap())
    }

    fn same_e(&self, other: &Laurent) -> bool {
        self.ctx.e == other.ctx.e
    }

    #[must_use]
    pub fn neg(&self) -> Laurent {
        let f = &self.ctx.field;
        Laurent {
            ctx: self.ctx.clone(),
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    #[must_use]
    pub fn add(&self, other: &Laurent) -> Laurent {
        if !self.same_e(other) {
            let (a, b) = Laurent::unify(self, other);
            return a.add(&b);
        }
        let ctx = if self.ctx.cap <= other.ctx.cap { &self.ctx } else { &other.ctx };
        let prec = self.prec.min(other.prec);
        if other.is_zero() {
            return Laurent::from_parts(ctx, self.lead, self.coeffs.clone(), prec);
        }
        if self.is_zero() {
            return Laurent::from_parts(ctx, other.lead, other.coeffs.clone(), prec);
        }
        let lo = self.lead.min(other.lead);
        let hi_x = self.lead + self.coeffs.len() as i64;
        let hi_y = other.lead + other.coeffs.len() as i64;
        let mut hi = hi_x.max(hi_y).min(prec);
        let mut prec = prec;
        if hi - lo > ctx.cap {
            hi = lo + ctx.cap;
            prec = prec.min(hi);
        }
        if hi <= lo {
            return Laurent::zero_mod(ctx, prec);
        }
        let f = &ctx.field;
        let mut out = vec![FfElem::ZERO; (hi - lo) as usize];
        for (src, l) in [(&self.coeffs, self.lead), (&other.coeffs, other.lead)] {
            let off = (l - lo) as usize;
            for (i, &c) in src.iter().enumerate() {
                let k = off + i;
                if k >= out.len() {
                    break;
                }
                out[k] = f.add(out[k], c);
            }
        }
        Laurent::from_parts(ctx, lo, out, prec)
    }

    #[must_use]
    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    #[must_use]
    pub fn mul(&self, other: &Laurent) -> Laurent {
        if !self.same_e(other) {
            let (a, b) = Laurent::unify(self, other);
            return a.mul(&b);
        }
        let ctx = if self.ctx.cap <= other.ctx.cap { &self.ctx } else { &other.ctx };
        let lx = self.val_bound();
        let ly = other.val_bound();
        let prec = padd(self.prec, ly).min(padd(other.prec, lx));
        if self.is_zero() || other.is_zero() {
            return Laurent::zero_mod(ctx, prec);
        }
        let lead = lx + ly;
        if lead >= LIMIT {
            return Laurent::zero_mod(ctx, LIMIT);
        }
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let mut len = full as i64;
        if prec < EXACT {
            len = len.min(prec - lead);
        }
        len = len.min(ctx.cap);
        if len <= 0 {
            return Laurent::zero_mod(ctx, prec);
        }
        let len = len as usize;
        let f = &ctx.field;
        let ynz: Vec<(usize, FfElem)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, &c)| (j, c))
            .collect();
        let mut out = vec![FfElem::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            let room = len - i;
            for &(j, b) in &ynz {
                if j >= room {
                    break;
                }
                let k = i + j;
                out[k] = f.add(out[k], f.mul(a, b));
            }
        }
        let prec = if len < full { prec.min(lead + len as i64) } else { prec };
        Laurent::from_parts(ctx, lead, out, prec)
    }

    /// Multiply by a field constant.
    #[must_use]
    pub fn scale(&self, c: FfElem) -> Laurent {
        if c.is_zero() {
            return Laurent::zero(&self.ctx);
        }
        let f = &self.ctx.field;
        Laurent {
            ctx: self.ctx.clone(),
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by `u^k`.
    #[must_use]
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent::from_parts(&self.ctx, self.lead.saturating_add(k), self.coeffs.clone(), padd(self.prec, k))
    }

    /// Multiply by `theta^k`.
    #[must_use]
    pub fn mul_theta_pow(&self, k: i64) -> Laurent {
        self.shift(-k * self.ctx.e as i64)
    }

    pub fn inv(&self) -> Result<Laurent> {
        if self.is_zero() {
            return Err(Error::ZeroDivision);
        }
        let f = &self.ctx.field;
        let c0_inv = f.inv(self.coeffs[0])?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Laurent::monomial(&self.ctx, c0_inv, -self.lead));
        }
        let rel = if self.is_exact() {
            self.ctx.cap
        } else {
            (self.prec - self.lead).min(self.ctx.cap)
        };
        let n = rel as usize;
        let neg_c0_inv = f.neg(c0_inv);
        let xnz: Vec<(usize, FfElem)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, &c)| (j, c))
            .collect();
        let mut y = vec![FfElem::ZERO; n];
        y[0] = c0_inv;
        for k in 1..n {
            let mut acc = FfElem::ZERO;
            for &(i, c) in &xnz {
                if i > k {
                    break;
                }
                acc = f.add(acc, f.mul(c, y[k - i]));
            }
            y[k] = f.mul(acc, neg_c0_inv);
        }
        Ok(Laurent::from_parts(&self.ctx, -self.lead, y, -self.lead + rel))
    }

    pub fn div(&self, other: &Laurent) -> Result<Laurent> {
        Ok(self.mul(&other.inv()?))
    }

    /// `x^k` for `k >= 0`.
    #[must_use]
    pub fn pow(&self, mut k: u64) -> Laurent {
        let mut acc = Laurent::constant(&self.ctx, FfElem::ONE);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn powi(&self, k: i64) -> Result<Laurent> {
        if k >= 0 {
            Ok(self.pow(k as u64))
        } else {
            Ok(self.inv()?.pow(k.unsigned_abs()))
        }
    }

    /// Frobenius twist `sum c_i u^i -> sum c_i^{q^k} u^{i q^k}`.
    ///
    /// # Panics
    /// If the degree of the result leaves the representable range; see
    /// [`Laurent::try_frobenius`].
    #[must_use]
    pub fn frobenius(&self, k: u32) -> Laurent {
        self.try_frobenius(k).expect("frobenius: degree overflow")
    }

    /// [`Laurent::frobenius`], failing with `PrecisionExhausted` when a
    /// negative valuation or precision would overflow.
    pub fn try_frobenius(&self, k: u32) -> Result<Laurent> {
        let overflow = || Error::PrecisionExhausted(format!("degree overflow in {k}-fold Frobenius"));
        if k == 0 {
            return Ok(self.clone());
        }
        let qk = (self.ctx.q() as i64).checked_pow(k);
        let scale_prec = |p: i64| -> i64 {
            if p >= EXACT {
                EXACT
            } else {
                match qk.and_then(|qk| p.checked_mul(qk)) {
                    Some(v) if v < LIMIT => v,
                    _ if p > 0 => LIMIT,
                    _ => i64::MIN,
                }
            }
        };
        let prec = scale_prec(self.prec);
        if prec == i64::MIN {
            return Err(overflow());
        }
        if self.is_zero() {
            return Ok(Laurent::zero_mod(&self.ctx, prec));
        }
        let Some(qk) = qk else {
            if self.lead == 0 {
                let c = self.ctx.field.frob(self.coeffs[0], k);
                let exact = self.coeffs.len() == 1 && prec == EXACT;
                return Ok(Laurent::from_parts(&self.ctx, 0, vec![c], if exact { EXACT } else { prec.min(LIMIT) }));
            }
            if self.lead < 0 {
                return Err(overflow());
            }
            return Ok(Laurent::zero_mod(&self.ctx, LIMIT));
        };
        let lead = match self.lead.checked_mul(qk) {
            Some(v) if v.abs() < LIMIT => v,
            _ if self.lead > 0 => return Ok(Laurent::zero_mod(&self.ctx, LIMIT)),
            _ => return Err(overflow()),
        };
        let f = &self.ctx.field;
        let mut span = (self.coeffs.len() as i64 - 1) * qk + 1;
        if prec < EXACT {
            span = span.min(prec - lead);
        }
        span = span.min(self.ctx.cap);
        let span = span.max(0) as usize;
        let mut out = vec![FfElem::ZERO; span];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let pos = i as i64 * qk;
            if pos >= span as i64 {
                break;
            }
            out[pos as usize] = f.frob(c, k);
        }
        let full = (self.coeffs.len() as i64 - 1) * qk + 1;
        let prec = if (span as i64) < full { prec.min(lead + span as i64) } else { prec };
        Ok(Laurent::from_parts(&self.ctx, lead, out, prec))
    }

    /// Inverse of [`Laurent::frobenius`] with `k = 1`; all exponents must be
    /// divisible by `q`.
    pub fn root_q(&self) -> Result<Laurent> {
        let q = self.ctx.q();
        self.root_pow(q, |f, c| f.root_q(c))
    }

    /// `p`-th root (inverse of the absolute Frobenius).
    pub fn root_p(&self) -> Result<Laurent> {
        let p = self.ctx.field.p();
        self.root_pow(p, |f, c| f.root_p(c))
    }

    fn root_pow(&self, n: u64, coef: impl Fn(&FiniteField, FfElem) -> FfElem) -> Result<Laurent> {
        let n = n as i64;
        let prec = if self.is_exact() { EXACT } else { self.prec.div_euclid(n) };
        if self.is_zero() {
            return Ok(Laurent::zero_mod(&self.ctx, prec));
        }
        let terms = self.terms();
        if terms.iter().any(|(k, _)| k.rem_euclid(n) != 0) {
            return Err(Error::NeedRamification {
                e: self.ctx.e,
                e_needed: self.ctx.e * n as u32,
            });
        }
        let f = &self.ctx.field;
        let mapped: Vec<_> = terms.iter().map(|&(k, c)| (k / n, coef(f, c))).collect();
        Ok(Laurent::from_terms(&self.ctx, &mapped, prec))
    }

    /// Like [`Laurent::root_q`] but refits the ramification when required.
    pub fn root_q_refit(&self) -> Result<Laurent> {
        match self.root_q() {
            Err(Error::NeedRamification { e_needed, .. }) => self.refit(e_needed)?.root_q(),
            r => r,
        }
    }

    /// An `n`-th root. When `sign` is given, the root with that leading
    /// coefficient is returned; otherwise the one with the smallest
    /// canonical leading coefficient.
    pub fn nth_root(&self, n: u64, sign: Option<FfElem>) -> Result<Laurent> {
        if n == 0 {
            return Err(Error::Invalid("0-th root".into()));
        }
        if self.is_zero() {
            return Ok(Laurent::zero_mod(&self.ctx, self.prec.div_euclid(n as i64)));
        }
        let p = self.ctx.field.p();
        if n.is_multiple_of(p) {
            let r = match self.root_p() {
                Err(Error::NeedRamification { e_needed, .. }) => self.refit(e_needed)?.root_p()?,
                r => r?,
            };
            return r.nth_root(n / p, sign);
        }
        let n_i = n as i64;
        if self.lead.rem_euclid(n_i) != 0 {
            let g = self.lead.gcd(&n_i);
            return Err(Error::NeedRamification {
                e: self.ctx.e,
                e_needed: self.ctx.e * (n_i / g) as u32,
            });
        }
        let f = &self.ctx.field;
        let c0 = self.coeffs[0];
        let mut roots = f.nth_roots(c0, n);
        if roots.is_empty() {
            return Err(Error::NoRoot {
                what: format!("a {n}-th root of the leading coefficient {}", f.format(c0)),
                m_cur: f.params().big_m,
                hint: f.root_extension_hint(c0, n),
            });
        }
        let r0 = match sign {
            Some(s) => *roots.iter().find(|&&r| r == s).ok_or_else(|| {
                Error::Invalid(format!("no {n}-th root with sign {}", f.format(s)))
            })?,
            None => {
                roots.sort_by_key(|&r| f.canonical_key(r));
                roots[0]
            }
        };
        let lead = self.lead / n_i;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Laurent::monomial(&self.ctx, r0, lead));
        }
        // w = x / (c0 u^lead0) = 1 + g; solve z^n = w by Newton iteration
        let norm = Laurent::monomial(&self.ctx, f.inv(c0)?, -self.lead);
        let w = self.mul(&norm);
        let n_el = Laurent::constant(&self.ctx, f.from_int((n % p) as i64));
        let mut z = Laurent::constant(&self.ctx, FfElem::ONE);
        for _ in 0..100 {
            let zn1 = z.pow(n - 1);
            let resid = zn1.mul(&z).sub(&w);
            if resid.is_zero() {
                break;
            }
            let step = resid.div(&n_el.mul(&zn1))?;
            z = z.sub(&step);
        }
        let scale = Laurent::monomial(&self.ctx, r0, lead);
        Ok(z.mul(&scale))
    }

    /// Square root with optional sign selector.
    pub fn sqrt(&self, sign: Option<FfElem>) -> Result<Laurent> {
        match self.nth_root(2, sign) {
            Err(Error::NoRoot { what, .. }) => Err(Error::NonSquare(what)),
            r => r,
        }
    }

    /// Whether `self - other` vanishes modulo the smaller precision.
    #[must_use]
    pub fn agrees_with(&self, other: &Laurent) -> bool {
        self.sub(other).is_zero()
    }

    /// Whether `self - other` vanishes modulo `u^prec` (and both are known
    /// that far).
    #[must_use]
    pub fn agrees_to(&self, other: &Laurent, prec: i64) -> bool {
        let d = self.sub(other);
        d.prec >= prec && d.val_bound() >= prec
    }

    /// Largest coefficient degree where the two values differ, if any.
    #[must_use]
    pub fn difference_deg(&self, other: &Laurent) -> Option<Q> {
        self.sub(other).deg()
    }

    /// Human readable form in powers of theta.
    #[must_use]
    pub fn to_theta_string(&self) -> String {
        let f = &self.ctx.field;
        let e = self.ctx.e as i64;
        let mut out = String::new();
        for (k, c) in self.terms() {
            let s = f.format(c);
            let (neg, body) = if let Some(rest) = s.strip_prefix('-') {
                if rest.contains(['+', '-']) {
                    (false, format!("({s})"))
                } else {
                    (true, rest.to_string())
                }
            } else if s.contains(['+', '-']) {
                (false, format!("({s})"))
            } else {
                (false, s)
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let ex = Q::new(-k, e);
            let mono = if ex.is_zero() {
                String::new()
            } else if ex == Q::from(1) {
                "θ".to_string()
            } else if ex.is_integer() {
                format!("θ^{}", ex.to_integer())
            } else {
                format!("θ^({}/{})", ex.numer(), ex.denom())
            };
            if mono.is_empty() {
                out.push_str(&body);
            } else if body == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{body}*{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        if !self.is_exact() {
            let ex = Q::new(-self.prec, e);
            if ex.is_integer() {
                out.push_str(&format!(" + O(θ^{})", ex.to_integer()));
            } else {
                out.push_str(&format!(" + O(θ^({}/{}))", ex.numer(), ex.denom()));
            }
        }
        out
    }

    /// JSON encoding `{"e":..,"prec":..,"terms":[[k,"c"],..]}`.
    #[must_use]
    pub fn to_json(&self) -> LaurentJson {
        let f = &self.ctx.field;
        LaurentJson {
            e: self.ctx.e,
            prec: (!self.is_exact()).then_some(self.prec),
            terms: self.terms().into_iter().map(|(k, c)| (k, f.format(c))).collect(),
        }
    }

    pub fn from_json(ctx: &Ctx, j: &LaurentJson) -> Result<Laurent> {
        let ctx = if j.e == ctx.e { ctx.clone() } else { ctx.with_e(j.e) };
        let f = &ctx.field;
        let terms = j
            .terms
            .iter()
            .map(|(k, s)| Ok((*k, f.parse(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Laurent::from_terms(&ctx, &terms, j.prec.unwrap_or(EXACT)))
    }

    /// Exact equality of representation (value and precision).
    #[must_use]
    pub fn same_as(&self, other: &Laurent) -> bool {
        self.ctx.e == other.ctx.e
            && self.prec == other.prec
            && self.terms() == other.terms()
    }

    /// `|x|` as `q^{deg}` expressed by the degree; `None` for zero.
    #[must_use]
    pub fn abs_deg(&self) -> Option<Q> {
        self.deg()
    }

    /// Whether the value is a constant in `F_{q^M}` up to precision.
    #[must_use]
    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.lead == 0 && self.coeffs.len() == 1 && self.prec > 0)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_theta_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentJson {
    pub e: u32,
    pub prec: Option<i64>,
    pub terms: Vec<(i64, String)>,
}

macro_rules! bin_op {
    ($tr:ident, $m:ident, $call:ident) => {
        impl std::ops::$tr<&Laurent> for &Laurent {
            type Output = Laurent;
            fn $m(self, rhs: &Laurent) -> Laurent {
                self.$call(rhs)
            }
        }
        impl std::ops::$tr<Laurent> for Laurent {
            type Output = Laurent;
            fn $m(self, rhs: Laurent) -> Laurent {
                (&self).$call(&rhs)
            }
        }
        impl std::ops::$tr<&Laurent> for Laurent {
            type Output = Laurent;
            fn $m(self, rhs: &Laurent) -> Laurent {
                (&self).$call(rhs)
            }
        }
        impl std::ops::$tr<Laurent> for &Laurent {
            type Output = Laurent;
            fn $m(self, rhs: Laurent) -> Laurent {
                self.$call(&rhs)
            }
        }
    };
}

bin_op!(Add, add, add);
bin_op!(Sub, sub, sub);
bin_op!(Mul, mul, mul);

impl std::ops::Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent::neg(self)
    }
}

impl std::ops::Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent::neg(&self)
    }
}

/// Ceiling of a rational.
#[must_use]
pub fn q_ceil(x: Q) -> i64 {
    x.ceil().to_integer()
}

/// Floor of a rational.
#[must_use]
pub fn q_floor(x: Q) -> i64 {
    x.floor().to_integer()
}

/// Convert a theta-degree to a u-exponent at ramification `e`, if integral.
#[must_use]
pub fn deg_to_u(deg: Q, e: u32) -> Option<i64> {
    let u = -deg * Q::from(e as i64);
    u.is_integer().then(|| u.to_integer())
}

#[must_use]
pub fn is_negative(x: Q) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    fn ctx9(e: u32) -> Ctx {
        let f = FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap();
        Ctx::new(f, e, 120)
    }

    #[test]
    fn geometric_series_inverse() {
        let c = ctx9(1);
        let x = c.one().sub(&c.theta().inv().unwrap());
        let y = x.inv().unwrap();
        assert_eq!(y.prec(), 120);
        for k in 0..120 {
            assert_eq!(y.coeff(k), Some(FfElem::ONE));
        }
        assert!(x.mul(&y).agrees_with(&c.one()));
    }

    #[test]
    fn frobenius_of_i_theta_three_quarters() {
        let c = ctx9(4);
        let f = &c.field;
        let i = f.generator();
        let x = c.theta_pow(i, Q::new(3, 4)).unwrap();
        let y = x.frobenius(1);
        let expect = c.theta_pow(f.neg(i), Q::new(9, 4)).unwrap();
        assert!(y.same_as(&expect));
    }

    #[test]
    fn refit_rescales_exponents() {
        let c = ctx9(2);
        let x = c.theta_pow(FfElem::ONE, Q::new(1, 2)).unwrap();
        let y = x.refit(4).unwrap();
        assert_eq!(y.lead(), Some(-2));
        assert!(c.zero().refit(6).unwrap().is_zero());
        assert!(x.refit(3).is_err());
    }

    #[test]
    fn sqrt_of_nu_squared() {
        let c = ctx9(2);
        let th = c.theta();
        let x = th.pow(3).sub(&th).sub(&c.one());
        let nu = x.sqrt(Some(FfElem::ONE)).unwrap();
        assert_eq!(nu.sign(), FfElem::ONE);
        assert_eq!(nu.deg(), Some(Q::new(3, 2)));
        assert!(nu.mul(&nu).agrees_with(&x));
    }

    #[test]
    fn precision_propagation() {
        let c = ctx9(1);
        let a = Laurent::from_terms(&c, &[(0, FfElem::ONE)], 10);
        let b = Laurent::from_terms(&c, &[(-2, FfElem::ONE)], 5);
        assert_eq!(a.add(&b).prec(), 5);
        // (1 + O(u^10)) (u^-2 + O(u^5)) = u^-2 + O(u^min(8, 5))
        assert_eq!(a.mul(&b).prec(), 5);
    }

    #[test]
    fn json_round_trip() {
        let c = ctx9(4);
        let f = &c.field;
        let i = f.generator();
        let x = Laurent::from_terms(&c, &[(-3, i), (1, f.neg(i))], 60);
        let j = x.to_json();
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"{"e":4,"prec":60,"terms":[[-3,"i"],[1,"-i"]]}"#);
        assert!(Laurent::from_json(&c, &j).unwrap().same_as(&x));
    }
}
