//! Rigid analytic trivializations as products of twisted matrices, periods,
//! quasi-periods and the independent oracles used to cross-check them.

use num_traits::Zero;

use crate::drinfeld::{sum_until_negligible, DrinfeldModule, ExpLogSeq, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::field::FfElem;
use crate::laurent::{Ctx, Laurent};
use crate::newton::{build_xi, moore_certificate, TorsionSelection, DEFAULT_NEWTON_BUDGET};
use crate::tate::{Factored, TailClass, TateMatrix, TateSeries};
use crate::Q;

/// Default cap on the number of terms in `L_phi`.
pub const DEFAULT_L_N_MAX: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatConfig {
    pub t_trunc: usize,
    /// `log_q` of the target Gauss precision `epsilon`.
    pub epsilon_deg: Q,
    pub factor_budget: usize,
    pub newton_budget: usize,
}

impl Default for RatConfig {
    fn default() -> Self {
        RatConfig {
            t_trunc: 24,
            epsilon_deg: Q::from(-60),
            factor_budget: 32,
            newton_budget: DEFAULT_NEWTON_BUDGET,
        }
    }
}

/// Companion matrix with superdiagonal ones and bottom row
/// `((t - theta)/A_r, -A_1/A_r, ..., -A_{r-1}/A_r)`.
pub fn theta_matrix(phi: &DrinfeldModule, t_trunc: usize) -> Result<TateMatrix> {
    let ctx = phi.ctx();
    let r = phi.rank();
    let ar_inv = phi.coeff(r).inv()?;
    let t_minus = TateSeries::polynomial(ctx, &[ctx.theta().neg(), ctx.one()], t_trunc);
    Ok(TateMatrix::from_fn(r, r, |i, j| {
        if i + 1 < r {
            if j == i + 1 {
                TateSeries::one(ctx, t_trunc)
            } else {
                TateSeries::zero(ctx, t_trunc)
            }
        } else if j == 0 {
            t_minus.scalar_mul(&ar_inv)
        } else {
            TateSeries::constant(&phi.coeff(j).mul(&ar_inv).neg(), t_trunc)
        }
    }))
}

/// `Theta^{-1}`: first row `(A_1, ..., A_r)/(t - theta)`, then `e_1, ..., e_{r-1}`.
pub fn theta_inverse(phi: &DrinfeldModule, t_trunc: usize) -> Result<TateMatrix> {
    let ctx = phi.ctx();
    let r = phi.rank();
    let pole = TateSeries::one_over_t_minus(&ctx.theta(), t_trunc)?;
    Ok(TateMatrix::from_fn(r, r, |i, j| {
        if i == 0 {
            pole.scalar_mul(&phi.coeff(j + 1))
        } else if j + 1 == i {
            TateSeries::one(ctx, t_trunc)
        } else {
            TateSeries::zero(ctx, t_trunc)
        }
    }))
}

/// `[B]_{ij} = h_j^{(i-1)}`.
#[must_use]
pub fn build_b(sel: &TorsionSelection, t_trunc: usize) -> TateMatrix {
    let r = sel.rank();
    let h: Vec<TateSeries> = (0..r).map(|j| sel.h(j, t_trunc)).collect();
    TateMatrix::from_fn(r, r, |i, j| h[j].twist(i as u32))
}

/// First row `xi_1..xi_r`, zeros below.
#[must_use]
pub fn w_matrix(sel: &TorsionSelection, t_trunc: usize) -> TateMatrix {
    let ctx = sel.x[0].ctx().clone();
    let r = sel.rank();
    TateMatrix::from_fn(r, r, |i, j| {
        if i == 0 {
            TateSeries::constant(&sel.xi[j], t_trunc)
        } else {
            TateSeries::zero(&ctx, t_trunc)
        }
    })
}

/// `det B = det X + y t` with the norm of `y`.
#[derive(Clone, Debug)]
pub struct DetB {
    pub det_x: Laurent,
    pub det_b: TateSeries,
    /// `log_q ||y||`, `None` when `y` vanishes to precision.
    pub y_deg: Option<Q>,
}

/// Checks the constant term of `det B` against the Moore determinant and
/// `||y|| < |det X|`.
pub fn det_b_certificate(sel: &TorsionSelection, b: &TateMatrix) -> Result<DetB> {
    let det_x = moore_certificate(&sel.x)?;
    let det_b = b.det();
    if !det_b.coeff(0).agrees_with(&det_x) {
        return Err(Error::Certificate("constant term of det B differs from det X".into()));
    }
    let y_deg = det_b.coeffs()[1..].iter().filter_map(Laurent::deg).max();
    let dx = det_x.deg().unwrap();
    if y_deg.is_some_and(|d| d >= dx) {
        return Err(Error::Certificate(format!(
            "||y|| = q^{} is not below |det X| = q^{dx}",
            y_deg.unwrap()
        )));
    }
    Ok(DetB { det_x, det_b, y_deg })
}

#[derive(Clone, Debug)]
pub struct Contraction {
    /// `B^{-1} Theta^{-1} B^{(1)}` by matrix arithmetic.
    pub f: TateMatrix,
    /// `I - t^N/(t - theta) B^{-1} W`.
    pub f_closed: TateMatrix,
    /// `log_q ||F - I||`.
    pub delta: Q,
}

pub fn contraction_factor(
    phi: &DrinfeldModule,
    sel: &TorsionSelection,
    b: &TateMatrix,
    t_trunc: usize,
) -> Result<Contraction> {
    let ctx = phi.ctx();
    let r = phi.rank();
    let b_inv = b.inv()?;
    let f = b_inv.mul(&theta_inverse(phi, t_trunc)?).mul(&b.twist(1));
    let pole = TateSeries::one_over_t_minus(&ctx.theta(), t_trunc)?.shift_t(sel.n);
    let id = TateMatrix::identity(ctx, r, t_trunc);
    let f_closed = id.sub(&b_inv.mul(&w_matrix(sel, t_trunc)).scalar_series_mul(&pole));
    if !f.agrees_with(&f_closed) {
        return Err(Error::Certificate(
            "direct and closed-form F disagree beyond precision".into(),
        ));
    }
    let dev = f.sub(&id);
    let Some(delta) = dev.norm_deg() else {
        return Err(Error::PrecisionExhausted("F - I vanishes to precision".into()));
    };
    if delta >= Q::zero() {
        let (mut worst, mut at) = (Q::zero(), (0, 0));
        for i in 0..r {
            for j in 0..r {
                if let Some(d) = dev.get(i, j).gauss_deg() {
                    if d >= worst {
                        worst = d;
                        at = (i + 1, j + 1);
                    }
                }
            }
        }
        return Err(Error::NotContracting {
            deg: delta.to_string(),
            detail: format!(
                "entry ({}, {}) of F - I; N = {}, deg x = {:?}",
                at.0,
                at.1,
                sel.n,
                sel.x.iter().map(Laurent::deg).collect::<Vec<_>>()
            ),
        });
    }
    Ok(Contraction { f, f_closed, delta })
}

#[derive(Clone, Debug)]
pub struct Product {
    pub pi: TateMatrix,
    /// Number of factors `F^{(0)}, ..., F^{(n-1)}` multiplied in.
    pub factors: usize,
    /// Factors skipped because they equal `I` to precision.
    pub skipped: usize,
    /// `log_q ||Pi^{(1)} - Theta Pi||`, `None` if it vanishes to precision.
    pub residual_deg: Option<Q>,
    /// Bound `log_q(||Theta|| ||Pi|| delta^{q^n})` for the truncated tail,
    /// raised to the worst coefficient precision of the residual.
    pub residual_bound: Q,
}

/// `Pi = B F F^{(1)} ... F^{(n-1)}`, where `n` is the first index with
/// `delta q^n < epsilon` and `n N > t_trunc`.
pub fn rat_product(
    phi: &DrinfeldModule,
    b: &TateMatrix,
    con: &Contraction,
    n_big: usize,
    cfg: &RatConfig,
) -> Result<Product> {
    let q = phi.q() as i64;
    let t = cfg.t_trunc;
    let mut n_stop = None;
    for n in 1..=cfg.factor_budget {
        let small = tail_deg(con.delta, q, n).is_none_or(|g| g < cfg.epsilon_deg);
        if small && n * n_big > t {
            n_stop = Some(n);
            break;
        }
    }
    let n_stop = n_stop.ok_or(Error::BudgetExhausted {
        budget: cfg.factor_budget,
    })?;
    let id = TateMatrix::identity(phi.ctx(), phi.rank(), t);
    let mut pi = b.clone();
    let mut skipped = 0;
    for n in 0..n_stop {
        let fk = con.f.twist(n as u32);
        if fk.sub(&id).norm_deg().is_none() {
            skipped += 1;
            continue;
        }
        pi = pi.mul(&fk);
    }
    let theta = theta_matrix(phi, t)?;
    let residual = pi.twist(1).sub(&theta.mul(&pi));
    let residual_deg = residual.norm_deg();
    let floor = residual.entries().iter().map(TateSeries::worst_prec_deg).max().unwrap_or_default();
    let residual_bound = match tail_deg(con.delta, q, n_stop) {
        Some(tail) => {
            (theta.norm_deg().unwrap_or_default() + pi.norm_deg().unwrap_or_default() + tail).max(floor)
        }
        None => floor,
    };
    Ok(Product {
        pi,
        factors: n_stop,
        skipped,
        residual_deg,
        residual_bound,
    })
}

/// `log_q` of `delta^{q^n}`, `None` once it is below every representable degree.
fn tail_deg(delta: Q, q: i64, n: usize) -> Option<Q> {
    let qn = q.checked_pow(n as u32).filter(|&v| v < 1 << 40)?;
    Some(delta * Q::from(qn))
}

/// `Pi_0, ..., Pi_n` with `Pi_k = B F F^{(1)} ... F^{(k)}`.
#[must_use]
pub fn partial_products(b: &TateMatrix, f: &TateMatrix, n: usize) -> Vec<TateMatrix> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = b.mul(f);
    out.push(cur.clone());
    for k in 1..=n {
        cur = cur.mul(&f.twist(k as u32));
        out.push(cur.clone());
    }
    out
}

/// `Pi_k = B - t^N sum_{m<=k} R_m W^{(m)}` for `k = 0..n`, with
/// `R_m = Theta^{-1} (Theta^{-1})^{(1)} ... (Theta^{-1})^{(m-1)} / (t - theta^{q^m})`.
pub fn partial_products_closed(
    phi: &DrinfeldModule,
    sel: &TorsionSelection,
    b: &TateMatrix,
    n: usize,
    t_trunc: usize,
) -> Result<Vec<TateMatrix>> {
    let ctx = phi.ctx();
    let r = phi.rank();
    let ti = theta_inverse(phi, t_trunc)?;
    let w = w_matrix(sel, t_trunc);
    let mut prefix = TateMatrix::identity(ctx, r, t_trunc);
    let mut acc = b.clone();
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m > 0 {
            prefix = prefix.mul(&ti.twist(m as u32 - 1));
        }
        let pole = TateSeries::one_over_t_minus_theta_qk(ctx, m as u32, t_trunc)?.shift_t(sel.n);
        let term = prefix.mul(&w.twist(m as u32)).scalar_series_mul(&pole);
        acc = acc.sub(&term);
        out.push(acc.clone());
    }
    Ok(out)
}

/// First-row entries `h_j - t^N/(t - theta) L_phi(xi_j; t)` in factored form.
pub fn entrywise_closed_form(
    phi: &DrinfeldModule,
    sel: &TorsionSelection,
    t_trunc: usize,
) -> Result<Vec<Factored>> {
    (0..sel.rank())
        .map(|j| {
            Ok(Factored {
                regular: sel.h(j, t_trunc),
                n: sel.n,
                h: phi.l_phi(&sel.xi[j], t_trunc, DEFAULT_L_N_MAX)?,
            })
        })
        .collect()
}

/// Full matrix from the factored first row: `[Pi]_{ij} = (row_j)^{(i-1)}`.
pub fn closed_form_matrix(entries: &[Factored]) -> Result<TateMatrix> {
    let r = entries.len();
    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        rows.push(
            entries
                .iter()
                .map(|e| e.twisted_series(i as u32))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(TateMatrix::from_rows(rows))
}

#[derive(Clone, Debug)]
pub struct Periods {
    pub pi: Vec<Laurent>,
    /// `eta[i-1][j]` is the value of `[Pi]_{i+1, j+1}` at `t = theta`.
    pub eta: Vec<Vec<Laurent>>,
}

/// `pi_j = -((t - theta)[Pi]_{1j})|_{t=theta}` and the twisted values.
pub fn periods_and_quasi(entries: &[Factored]) -> Result<Periods> {
    let r = entries.len();
    let pi = entries
        .iter()
        .map(|e| Ok(e.residue_at_theta()?.neg()))
        .collect::<Result<Vec<_>>>()?;
    let mut eta = Vec::new();
    for i in 1..r {
        eta.push(
            entries
                .iter()
                .map(|e| e.twist_eval_at_theta(i as u32))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Periods { pi, eta })
}

/// `theta^N log_phi(xi_j)`.
pub fn period_log_oracle(phi: &DrinfeldModule, sel: &TorsionSelection) -> Result<Vec<Laurent>> {
    sel.xi
        .iter()
        .map(|x| Ok(phi.log_eval(x)?.mul_theta_pow(sel.n as i64)))
        .collect()
}

/// `f_phi(pi;t)^{(i)}` at `t = theta` from the partial fractions
/// `sum_n alpha_n^{q^i} pi^{q^{n+i}} / (theta^{q^{n+i}} - theta)`, `i >= 1`.
pub fn quasi_period_oracle(phi: &DrinfeldModule, pi: &Laurent, i: u32) -> Result<Laurent> {
    let mut seq = ExpLogSeq::new(phi);
    let th = phi.ctx().theta();
    sum_until_negligible(phi.ctx(), DEFAULT_N_MAX + 1, phi.window(), |n| {
        seq.ensure(n)?;
        let k = n as u32 + i;
        let num = seq.alpha[n].mul(&pi.try_frobenius(n as u32)?).try_frobenius(i)?;
        num.div(&th.try_frobenius(k)?.sub(&th))
    })
}

/// `Upsilon = (f_phi(pi_j;t)^{(i-1)})`.
pub fn upsilon_oracle(phi: &DrinfeldModule, periods: &[Laurent], t_trunc: usize) -> Result<TateMatrix> {
    let r = periods.len();
    let f = periods
        .iter()
        .map(|p| phi.agf(p, t_trunc))
        .collect::<Result<Vec<_>>>()?;
    Ok(TateMatrix::from_fn(r, r, |i, j| f[j].twist(i as u32)))
}

/// Carlitz period `-(-theta)^{q/(q-1)} prod_{n>=1} (1 - theta^{1-q^n})^{-1}`
/// and `omega_C = (-theta)^{1/(q-1)} prod_{n>=0} (1 - t/theta^{q^n})^{-1}`,
/// using the `(q-1)`-st root of `-theta` with the given sign.
pub fn carlitz_reference(ctx: &Ctx, t_trunc: usize, sign: Option<FfElem>) -> Result<(Laurent, TateSeries)> {
    let q = ctx.q();
    let root = ctx.theta().neg().nth_root(q - 1, sign)?;
    let one = ctx.one();
    let mut prod = one.clone();
    let mut n = 1u32;
    loop {
        let small = ctx.theta().frobenius(n).inv()?.mul_theta_pow(1);
        if small.val_bound() >= prod.val_bound() + ctx.cap {
            break;
        }
        prod = prod.mul(&one.sub(&small).inv()?);
        n += 1;
    }
    let pi_tilde = root.pow(q).mul(&prod).neg();
    let mut omega = TateSeries::constant(&root, t_trunc);
    let mut n = 0u32;
    loop {
        let c = ctx.theta().frobenius(n).inv()?;
        if c.val_bound() >= ctx.cap + root.val_bound() {
            break;
        }
        let factor = TateSeries::from_coeffs(
            (0..=t_trunc).map(|k| c.pow(k as u64)).collect(),
            TailClass::UnitDisk,
        );
        omega = omega.mul(&factor);
        n += 1;
    }
    Ok((pi_tilde, omega.with_tail(TailClass::UnitDisk)))
}

/// `(pi_1 eta_2 - pi_2 eta_1)/pi_tilde`, required to be a constant.
pub fn legendre_ratio(pi: &[Laurent], eta: &[Laurent], pi_tilde: &Laurent) -> Result<Laurent> {
    if pi.len() != 2 || eta.len() != 2 {
        return Err(Error::Invalid("Legendre check needs rank 2".into()));
    }
    let num = pi[0].mul(&eta[1]).sub(&pi[1].mul(&eta[0]));
    let ratio = num.div(pi_tilde)?;
    if !ratio.is_constant() {
        return Err(Error::Certificate(format!("ratio {ratio} is not constant")));
    }
    Ok(ratio)
}

/// `det B'` for the non-strict basis `x_1' = x_1 + x_2`, `x_2' = x_2` with
/// `xi_1' = xi_1 + xi_2 + x_1`, `xi_2' = xi_2` (rank 2, `N = 2`).
pub fn nonstrict_det(x: &[Laurent], xi: &[Laurent], t_trunc: usize) -> Result<TateSeries> {
    if x.len() != 2 || xi.len() != 2 {
        return Err(Error::Invalid("needs rank 2 and N = 2".into()));
    }
    let ctx = x[0].ctx();
    let x1 = x[0].add(&x[1]);
    let xi1 = xi[0].add(&xi[1]).add(&x[0]);
    let h1 = TateSeries::polynomial(ctx, &[x1, xi1], t_trunc);
    let h2 = TateSeries::polynomial(ctx, &[x[1].clone(), xi[1].clone()], t_trunc);
    let b = TateMatrix::from_rows(vec![vec![h1.clone(), h2.clone()], vec![h1.twist(1), h2.twist(1)]]);
    Ok(b.det())
}

/// Everything computed by one run of the construction.
#[derive(Clone, Debug)]
pub struct RatReport {
    pub phi: DrinfeldModule,
    pub sel: TorsionSelection,
    pub theta: TateMatrix,
    pub b: TateMatrix,
    pub det_b: DetB,
    pub contraction: Contraction,
    pub product: Product,
    pub entries: Vec<Factored>,
    pub periods: Periods,
}

/// Torsion selection, `B`, `F`, the product and the periods.
pub fn run(phi: &DrinfeldModule, cfg: &RatConfig) -> Result<RatReport> {
    let (phi, sel) = build_xi(phi, cfg.newton_budget)?;
    let t = cfg.t_trunc;
    let theta = theta_matrix(&phi, t)?;
    let b = build_b(&sel, t);
    let det_b = det_b_certificate(&sel, &b)?;
    let contraction = contraction_factor(&phi, &sel, &b, t)?;
    let product = rat_product(&phi, &b, &contraction, sel.n, cfg)?;
    let entries = entrywise_closed_form(&phi, &sel, t)?;
    let periods = periods_and_quasi(&entries)?;
    Ok(RatReport {
        phi,
        sel,
        theta,
        b,
        det_b,
        contraction,
        product,
        entries,
        periods,
    })
}

/// Direct evaluation of `B_n` from shadowed partitions: the product over
/// `(S_1, ..., S_r)` of `A_i^{q^j} / (t - theta^{q^{i+j}})`.
pub fn b_n_by_partitions(phi: &DrinfeldModule, n: usize, t_trunc: usize) -> Result<TateSeries> {
    let ctx = phi.ctx();
    let mut acc = TateSeries::zero(ctx, t_trunc);
    for part in crate::drinfeld::shadowed_partitions(phi.rank(), n) {
        let mut term = TateSeries::one(ctx, t_trunc);
        for (i0, s) in part.iter().enumerate() {
            let i = i0 + 1;
            for &j in s {
                let a = phi.coeff(i).frobenius(j as u32);
                let pole = TateSeries::one_over_t_minus_theta_qk(ctx, (i + j) as u32, t_trunc)?;
                term = term.mul(&pole).scalar_mul(&a);
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc.with_tail(TailClass::ThetaDisk))
}
