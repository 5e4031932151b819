//! Power series in `t` with [`Laurent`] coefficients, truncated modulo
//! `t^{T+1}`, and matrices over them.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FfElem;
use crate::laurent::{Ctx, Laurent, LaurentJson};
use crate::Q;

/// Convergence domain claimed for the untruncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailClass {
    Polynomial,
    ThetaDisk,
    UnitDisk,
}

impl TailClass {
    /// Class of a sum or product.
    #[must_use]
    pub fn join(self, other: TailClass) -> TailClass {
        self.max(other)
    }
}

/// Number of trailing coefficients inspected by [`TateSeries::eval_at_theta`].
pub const DECAY_WINDOW: usize = 5;

#[derive(Clone, Debug)]
pub struct TateSeries {
    ctx: Ctx,
    coeffs: Vec<Laurent>,
    tail: TailClass,
}

impl TateSeries {
    #[must_use]
    pub fn zero(ctx: &Ctx, t_trunc: usize) -> TateSeries {
        TateSeries {
            ctx: ctx.clone(),
            coeffs: vec![Laurent::zero(ctx); t_trunc + 1],
            tail: TailClass::Polynomial,
        }
    }

    #[must_use]
    pub fn constant(x: &Laurent, t_trunc: usize) -> TateSeries {
        let mut s = TateSeries::zero(x.ctx(), t_trunc);
        s.coeffs[0] = x.clone();
        s
    }

    #[must_use]
    pub fn one(ctx: &Ctx, t_trunc: usize) -> TateSeries {
        TateSeries::constant(&ctx.one(), t_trunc)
    }

    /// `t^k` (zero if `k > t_trunc`).
    #[must_use]
    pub fn t_pow(ctx: &Ctx, k: usize, t_trunc: usize) -> TateSeries {
        let mut s = TateSeries::zero(ctx, t_trunc);
        if k <= t_trunc {
            s.coeffs[k] = ctx.one();
        }
        s
    }

    /// Series from coefficients `c_0..c_T`.
    #[must_use]
    pub fn from_coeffs(coeffs: Vec<Laurent>, tail: TailClass) -> TateSeries {
        assert!(!coeffs.is_empty());
        let ctx = coeffs[0].ctx().clone();
        TateSeries { ctx, coeffs, tail }
    }

    /// Polynomial `sum_k c_k t^k`, truncated at `t_trunc`.
    #[must_use]
    pub fn polynomial(ctx: &Ctx, coeffs: &[Laurent], t_trunc: usize) -> TateSeries {
        let mut s = TateSeries::zero(ctx, t_trunc);
        for (k, c) in coeffs.iter().enumerate().take(t_trunc + 1) {
            s.coeffs[k] = c.clone();
        }
        s
    }

    /// `1/(t - c) = -sum_k c^{-k-1} t^k`.
    pub fn one_over_t_minus(c: &Laurent, t_trunc: usize) -> Result<TateSeries> {
        let ci = c.inv()?;
        let mut out = Vec::with_capacity(t_trunc + 1);
        let mut pw = ci.neg();
        for _ in 0..=t_trunc {
            out.push(pw.clone());
            pw = pw.mul(&ci);
        }
        let tail = match c.deg() {
            Some(d) if d > Q::from(1) => TailClass::ThetaDisk,
            _ => TailClass::UnitDisk,
        };
        Ok(TateSeries::from_coeffs(out, tail))
    }

    /// `1/(t - theta^{q^k})`.
    pub fn one_over_t_minus_theta_qk(ctx: &Ctx, k: u32, t_trunc: usize) -> Result<TateSeries> {
        let c = ctx.theta().frobenius(k);
        TateSeries::one_over_t_minus(&c, t_trunc)
    }

    #[must_use]
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    #[must_use]
    pub fn t_trunc(&self) -> usize {
        self.coeffs.len() - 1
    }
    #[must_use]
    pub fn tail(&self) -> TailClass {
        self.tail
    }
    #[must_use]
    pub fn with_tail(mut self, tail: TailClass) -> TateSeries {
        self.tail = tail;
        self
    }
    #[must_use]
    pub fn coeffs(&self) -> &[Laurent] {
        &self.coeffs
    }
    #[must_use]
    pub fn coeff(&self, k: usize) -> &Laurent {
        &self.coeffs[k]
    }
    pub fn set_coeff(&mut self, k: usize, c: Laurent) {
        self.coeffs[k] = c;
    }

    /// Reduce to a smaller truncation.
    #[must_use]
    pub fn truncate(&self, t_trunc: usize) -> TateSeries {
        let n = (t_trunc + 1).min(self.coeffs.len());
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs[..n].to_vec(),
            tail: self.tail,
        }
    }

    /// Gauss norm as a degree: `max_i deg c_i`, `None` if all vanish.
    #[must_use]
    pub fn gauss_deg(&self) -> Option<Q> {
        self.coeffs.iter().filter_map(Laurent::deg).max()
    }

    /// Upper bound for the Gauss norm degree, counting precision floors of
    /// vanishing coefficients.
    #[must_use]
    pub fn gauss_deg_bound(&self) -> Q {
        self.coeffs
            .iter()
            .map(Laurent::deg_bound)
            .max()
            .unwrap_or_else(|| Q::from(-(1i64 << 40)))
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Laurent::is_zero)
    }

    #[must_use]
    pub fn add(&self, other: &TateSeries) -> TateSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: (0..n).map(|k| self.coeffs[k].add(&other.coeffs[k])).collect(),
            tail: self.tail.join(other.tail),
        }
    }

    #[must_use]
    pub fn sub(&self, other: &TateSeries) -> TateSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: (0..n).map(|k| self.coeffs[k].sub(&other.coeffs[k])).collect(),
            tail: self.tail.join(other.tail),
        }
    }

    #[must_use]
    pub fn neg(&self) -> TateSeries {
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(Laurent::neg).collect(),
            tail: self.tail,
        }
    }

    #[must_use]
    pub fn mul(&self, other: &TateSeries) -> TateSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out: Vec<Laurent> = vec![Laurent::zero(&self.ctx); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() && a.is_exact() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if b.is_zero() && b.is_exact() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: out,
            tail: self.tail.join(other.tail),
        }
    }

    #[must_use]
    pub fn scalar_mul(&self, x: &Laurent) -> TateSeries {
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul(x)).collect(),
            tail: self.tail,
        }
    }

    #[must_use]
    pub fn scale(&self, c: FfElem) -> TateSeries {
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
            tail: self.tail,
        }
    }

    /// Multiply by `t^k`.
    #[must_use]
    pub fn shift_t(&self, k: usize) -> TateSeries {
        let n = self.coeffs.len();
        let mut out = vec![Laurent::zero(&self.ctx); n];
        if k < n {
            out[k..].clone_from_slice(&self.coeffs[..n - k]);
        }
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: out,
            tail: self.tail,
        }
    }

    /// Frobenius twist `sum c_i t^i -> sum c_i^{q^k} t^i`.
    #[must_use]
    pub fn twist(&self, k: u32) -> TateSeries {
        TateSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.frobenius(k)).collect(),
            tail: self.tail,
        }
    }

    /// Inverse of a unit `c_0 (1 + g)` with `||g|| < 1`.
    pub fn unit_inv(&self) -> Result<TateSeries> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonUnit { index: 0 });
        }
        let d0 = c0.deg().unwrap();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if let Some(d) = c.deg() {
                if d >= d0 {
                    return Err(Error::NonUnit { index: i });
                }
            }
        }
        let c0_inv = c0.inv()?;
        let n = self.coeffs.len();
        let mut h: Vec<Laurent> = Vec::with_capacity(n);
        h.push(c0_inv.clone());
        let neg_inv = c0_inv.neg();
        for k in 1..n {
            let mut acc = Laurent::zero(&self.ctx);
            for i in 1..=k {
                let c = &self.coeffs[i];
                if c.is_zero() && c.is_exact() {
                    continue;
                }
                acc = acc.add(&c.mul(&h[k - i]));
            }
            h.push(acc.mul(&neg_inv));
        }
        let tail = if self.tail == TailClass::Polynomial && n > 1 && self.coeffs[1..].iter().all(|c| c.is_zero() && c.is_exact()) {
            TailClass::Polynomial
        } else {
            TailClass::UnitDisk
        };
        Ok(TateSeries {
            ctx: self.ctx.clone(),
            coeffs: h,
            tail,
        })
    }

    /// Evaluate at `t = theta`. Polynomial series are summed exactly; for
    /// theta-disk series the norms `|c_i theta^i|` must strictly decrease over
    /// the last [`DECAY_WINDOW`] stored coefficients, and the result precision
    /// is limited by the last term.
    pub fn eval_at_theta(&self) -> Result<Laurent> {
        self.eval_at_theta_window(DECAY_WINDOW)
    }

    pub fn eval_at_theta_window(&self, k_window: usize) -> Result<Laurent> {
        match self.tail {
            TailClass::UnitDisk => {
                return Err(Error::Inadmissible(
                    "series claims convergence only on the unit disk".into(),
                ))
            }
            TailClass::Polynomial => {}
            TailClass::ThetaDisk => {
                let n = self.coeffs.len();
                let start = n.saturating_sub(k_window);
                let bound = |i: usize| -> Option<Q> {
                    let c = &self.coeffs[i];
                    if c.is_zero() && c.is_exact() {
                        None
                    } else {
                        Some(c.deg_bound() + Q::from(i as i64))
                    }
                };
                for i in start + 1..n {
                    match (bound(i - 1), bound(i)) {
                        (_, None) => {}
                        (None, Some(_)) => return Err(Error::DecayNotCertified { k: k_window }),
                        (Some(a), Some(b)) => {
                            if b >= a {
                                return Err(Error::DecayNotCertified { k: k_window });
                            }
                        }
                    }
                }
            }
        }
        let ctx = &self.ctx;
        let th = ctx.theta();
        let mut acc = Laurent::zero(ctx);
        let mut pw = ctx.one();
        for c in &self.coeffs {
            acc = acc.add(&c.mul(&pw));
            pw = pw.mul(&th);
        }
        if self.tail == TailClass::ThetaDisk {
            let last = self.coeffs.len() - 1;
            let c = &self.coeffs[last];
            if !(c.is_zero() && c.is_exact()) {
                let d = c.deg_bound() + Q::from(last as i64);
                let e = Q::from(acc.e() as i64);
                let floor = (-d * e).to_integer() + 1;
                acc = acc.truncate(floor);
            }
        }
        Ok(acc)
    }

    /// Whether all coefficients agree within their precisions.
    #[must_use]
    pub fn agrees_with(&self, other: &TateSeries) -> bool {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).all(|k| self.coeffs[k].agrees_with(&other.coeffs[k]))
    }

    /// Index of the first coefficient where the two series disagree.
    #[must_use]
    pub fn first_disagreement(&self, other: &TateSeries) -> Option<usize> {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).find(|&k| !self.coeffs[k].agrees_with(&other.coeffs[k]))
    }

    /// Smallest coefficient precision, as a theta-degree of the error.
    #[must_use]
    pub fn worst_prec_deg(&self) -> Q {
        self.coeffs
            .iter()
            .map(Laurent::prec_deg)
            .max()
            .unwrap_or_else(Q::zero)
    }

    #[must_use]
    pub fn to_json(&self) -> TateSeriesJson {
        TateSeriesJson {
            t_trunc: self.t_trunc(),
            tail: self.tail,
            coeffs: self.coeffs.iter().map(Laurent::to_json).collect(),
        }
    }

    pub fn from_json(ctx: &Ctx, j: &TateSeriesJson) -> Result<TateSeries> {
        if j.coeffs.len() != j.t_trunc + 1 {
            return Err(Error::Invalid("coefficient count does not match t_trunc".into()));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| Laurent::from_json(ctx, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(TateSeries::from_coeffs(coeffs, j.tail))
    }

    /// Human readable form.
    #[must_use]
    pub fn to_string_t(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_theta_string();
            parts.push(match k {
                0 => format!("({s})"),
                1 => format!("({s})t"),
                _ => format!("({s})t^{k}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TateSeriesJson {
    pub t_trunc: usize,
    pub tail: TailClass,
    pub coeffs: Vec<LaurentJson>,
}

/// A series `regular - t^n/(t - theta) * h` kept in factored form so that it
/// can be evaluated near its pole at `t = theta`.
#[derive(Clone, Debug)]
pub struct Factored {
    /// Polynomial or theta-disk part.
    pub regular: TateSeries,
    pub n: usize,
    /// Theta-disk series multiplying `t^n/(t - theta)`.
    pub h: TateSeries,
}

impl Factored {
    /// Expansion as an element of the Tate algebra modulo `t^{T+1}`.
    pub fn to_series(&self) -> Result<TateSeries> {
        let ctx = self.regular.ctx();
        let t = self.regular.t_trunc();
        let pole = TateSeries::one_over_t_minus(&ctx.theta(), t)?;
        let tail = pole.shift_t(self.n).mul(&self.h);
        Ok(self.regular.sub(&tail).with_tail(TailClass::UnitDisk))
    }

    /// `Res_{t=theta}` of the series, i.e. `((t - theta) f)|_{t=theta} = -theta^n h(theta)`.
    pub fn residue_at_theta(&self) -> Result<Laurent> {
        if self.regular.tail() == TailClass::UnitDisk || self.h.tail() == TailClass::UnitDisk {
            return Err(Error::Inadmissible(
                "factored parts must converge at t = theta".into(),
            ));
        }
        let hv = self.h.eval_at_theta()?;
        Ok(hv.mul_theta_pow(self.n as i64).neg())
    }

    /// Value of the `k`-th twist at `t = theta` for `k >= 1`:
    /// `regular^{(k)}(theta) - theta^n/(theta - theta^{q^k}) h^{(k)}(theta)`.
    pub fn twist_eval_at_theta(&self, k: u32) -> Result<Laurent> {
        if k == 0 {
            return Err(Error::Inadmissible("untwisted series has a pole at theta".into()));
        }
        let ctx = self.regular.ctx();
        let reg = self.regular.twist(k);
        let hv = self.h.twist(k).eval_at_theta()?;
        let th = ctx.theta();
        let denom = th.sub(&th.frobenius(k));
        let pole = hv.mul_theta_pow(self.n as i64).div(&denom)?;
        Ok(reg.eval_at_theta()?.sub(&pole))
    }

    /// Twist of the expansion.
    pub fn twisted_series(&self, k: u32) -> Result<TateSeries> {
        let ctx = self.regular.ctx();
        let t = self.regular.t_trunc();
        let pole = TateSeries::one_over_t_minus(&ctx.theta().frobenius(k), t)?;
        let tail = pole.shift_t(self.n).mul(&self.h.twist(k));
        Ok(self.regular.twist(k).sub(&tail))
    }
}

/// Matrix of [`TateSeries`], row-major.
#[derive(Clone, Debug)]
pub struct TateMatrix {
    rows: usize,
    cols: usize,
    data: Vec<TateSeries>,
}

impl TateMatrix {
    #[must_use]
    pub fn from_rows(rows: Vec<Vec<TateSeries>>) -> TateMatrix {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c));
        TateMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[must_use]
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> TateSeries) -> TateMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        TateMatrix { rows, cols, data }
    }

    #[must_use]
    pub fn identity(ctx: &Ctx, r: usize, t_trunc: usize) -> TateMatrix {
        TateMatrix::from_fn(r, r, |i, j| {
            if i == j {
                TateSeries::one(ctx, t_trunc)
            } else {
                TateSeries::zero(ctx, t_trunc)
            }
        })
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[must_use]
    pub fn get(&self, i: usize, j: usize) -> &TateSeries {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, s: TateSeries) {
        self.data[i * self.cols + j] = s;
    }
    #[must_use]
    pub fn entries(&self) -> &[TateSeries] {
        &self.data
    }
    #[must_use]
    pub fn t_trunc(&self) -> usize {
        self.data.iter().map(TateSeries::t_trunc).min().unwrap_or(0)
    }

    #[must_use]
    pub fn map(&self, f: impl Fn(&TateSeries) -> TateSeries) -> TateMatrix {
        TateMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    #[must_use]
    pub fn add(&self, other: &TateMatrix) -> TateMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        TateMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    #[must_use]
    pub fn sub(&self, other: &TateMatrix) -> TateMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        TateMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    #[must_use]
    pub fn mul(&self, other: &TateMatrix) -> TateMatrix {
        assert_eq!(self.cols, other.rows);
        let ctx = self.data[0].ctx().clone();
        let t = self.t_trunc().min(other.t_trunc());
        TateMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = TateSeries::zero(&ctx, t);
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    #[must_use]
    pub fn scalar_series_mul(&self, s: &TateSeries) -> TateMatrix {
        self.map(|x| x.mul(s))
    }

    #[must_use]
    pub fn twist(&self, k: u32) -> TateMatrix {
        self.map(|x| x.twist(k))
    }

    /// Determinant by cofactor expansion (intended for `r <= 4`).
    #[must_use]
    pub fn det(&self) -> TateSeries {
        assert_eq!(self.rows, self.cols);
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor_det(&idx, &idx)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> TateSeries {
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]).clone();
        }
        let ctx = self.data[0].ctx().clone();
        let t = self.t_trunc();
        let mut acc = TateSeries::zero(&ctx, t);
        let r0 = rows[0];
        let sub_rows: Vec<usize> = rows[1..].to_vec();
        for (pos, &c) in cols.iter().enumerate() {
            let entry = self.get(r0, c);
            if entry.is_zero() && entry.coeffs.iter().all(Laurent::is_exact) {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry.mul(&self.minor_det(&sub_rows, &sub_cols));
            acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    /// Adjugate matrix.
    #[must_use]
    pub fn adjugate(&self) -> TateMatrix {
        let r = self.rows;
        let ctx = self.data[0].ctx().clone();
        let t = self.t_trunc();
        if r == 1 {
            return TateMatrix::identity(&ctx, 1, t);
        }
        TateMatrix::from_fn(r, r, |i, j| {
            // cofactor of (j, i)
            let rows: Vec<usize> = (0..r).filter(|&x| x != j).collect();
            let cols: Vec<usize> = (0..r).filter(|&x| x != i).collect();
            let m = self.minor_det(&rows, &cols);
            if (i + j) % 2 == 0 {
                m
            } else {
                m.neg()
            }
        })
    }

    /// Inverse via adjugate and unit inversion of the determinant.
    pub fn inv(&self) -> Result<TateMatrix> {
        let det = self.det();
        let dinv = det.unit_inv().map_err(|e| match e {
            Error::NonUnit { index } => Error::Singular(format!(
                "determinant is not a unit (coefficient t^{index})"
            )),
            e => e,
        })?;
        Ok(self.adjugate().scalar_series_mul(&dinv))
    }

    /// `||A||` as a degree: the largest Gauss-norm degree of an entry.
    #[must_use]
    pub fn norm_deg(&self) -> Option<Q> {
        self.data.iter().filter_map(TateSeries::gauss_deg).max()
    }

    #[must_use]
    pub fn agrees_with(&self, other: &TateMatrix) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| a.agrees_with(b))
    }

    #[must_use]
    pub fn to_json(&self) -> Vec<Vec<TateSeriesJson>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_json()).collect())
            .collect()
    }
}
