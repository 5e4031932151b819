//! Newton polygon of `phi_t(x)`, t-division sequences, strict bases of
//! `phi[t]` and the selection of `xi_1..xi_r` in `phi[t^N]`.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::field::{FfElem, FieldParams, FiniteField};
use crate::laurent::Laurent;
use crate::tate::TateSeries;
use crate::Q;

/// Default number of contraction steps in the linear phase of root finding.
pub const DEFAULT_NEWTON_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonData {
    pub q: u64,
    /// `d_0 = 0 < d_1 < ... < d_s = r`.
    pub d: Vec<usize>,
    /// Slopes `lambda_1 < ... < lambda_s`.
    pub lambda: Vec<Q>,
    /// Intercepts `a_1 > ... > a_s`.
    pub a: Vec<Q>,
    /// `(q^{d_j}, -deg A_{d_j})`.
    pub vertices: Vec<(u64, Q)>,
}

/// Which interval `-deg y` falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftCase {
    /// `-deg y > a_1`: unique root of degree `deg y - 1`.
    Unique,
    /// `-deg y in (a_{j+1}, a_j]`: `q^{d_j}` roots of degree `u_{d_j}(deg y)`.
    Edge(usize),
}

/// `u_n(z) = (z - deg A_n) / q^n`.
#[must_use]
pub fn u_n(q: u64, n: usize, deg_an: Q, z: Q) -> Q {
    (z - deg_an) / Q::from(q.pow(n as u32) as i64)
}

/// Closed form of the `k`-th iterate of `u_n`.
#[must_use]
pub fn u_n_iter(q: u64, n: usize, deg_an: Q, k: u32, z: Q) -> Q {
    let qn = q.pow(n as u32) as i64;
    let qnk = Q::from(qn.pow(k));
    z / qnk - (qnk - Q::one()) / Q::from(qn - 1) * deg_an / qnk
}

impl PolygonData {
    /// Lower convex hull of `(1, -1)` and `(q^i, -deg A_i)` for `i` in `N(phi)`.
    #[must_use]
    pub fn new(phi: &DrinfeldModule) -> PolygonData {
        let q = phi.q();
        let mut pts: Vec<(usize, Q, Q)> = vec![(0, Q::one(), -Q::one())];
        for i in phi.support() {
            pts.push((i, Q::from(q.pow(i as u32) as i64), -phi.deg_coeff(i).unwrap()));
        }
        let mut d = vec![0];
        let mut lambda = Vec::new();
        let mut a = Vec::new();
        let mut cur = 0;
        while cur + 1 < pts.len() {
            let (_, x0, y0) = pts[cur];
            let mut best: Option<(usize, Q)> = None;
            for (k, &(_, x, y)) in pts.iter().enumerate().skip(cur + 1) {
                let slope = (y - y0) / (x - x0);
                if best.is_none_or(|(_, s)| slope <= s) {
                    best = Some((k, slope));
                }
            }
            let (k, slope) = best.unwrap();
            d.push(pts[k].0);
            lambda.push(slope);
            a.push(y0 - slope * x0);
            cur = k;
        }
        let vertices = d
            .iter()
            .map(|&i| {
                let y = pts.iter().find(|p| p.0 == i).unwrap().2;
                (q.pow(i as u32), y)
            })
            .collect();
        PolygonData {
            q,
            d,
            lambda,
            a,
            vertices,
        }
    }

    /// Number of edges.
    #[must_use]
    pub fn s(&self) -> usize {
        self.lambda.len()
    }

    /// Interval containing `-deg`.
    #[must_use]
    pub fn classify(&self, deg: Q) -> LiftCase {
        let z = -deg;
        if z > self.a[0] {
            return LiftCase::Unique;
        }
        for j in 1..self.s() {
            if z > self.a[j] && z <= self.a[j - 1] {
                return LiftCase::Edge(j);
            }
        }
        LiftCase::Edge(self.s())
    }

    /// Degree of the root chosen when lifting an element of degree `deg`.
    #[must_use]
    pub fn prescribed_degree(&self, phi: &DrinfeldModule, deg: Q) -> Q {
        match self.classify(deg) {
            LiftCase::Unique => deg - Q::one(),
            LiftCase::Edge(j) => {
                let dj = self.d[j];
                u_n(self.q, dj, phi.deg_coeff(dj).unwrap(), deg)
            }
        }
    }

    /// Multiplicity `d_k - d_{k-1}` of the slope `lambda_k` (1-based `k`).
    #[must_use]
    pub fn multiplicity(&self, k: usize) -> usize {
        self.d[k] - self.d[k - 1]
    }

    /// Slopes listed with multiplicity: the degrees of a strict basis.
    #[must_use]
    pub fn strict_degrees(&self) -> Vec<Q> {
        (1..=self.s())
            .flat_map(|k| std::iter::repeat_n(self.lambda[k - 1], self.multiplicity(k)))
            .collect()
    }
}

/// Degrees `deg y_1, ..., deg y_N` of a division chain together with the
/// iterate counts `k_1, k_2, ...` of the descent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    pub degrees: Vec<Q>,
    pub k: Vec<u32>,
    pub n: usize,
}

/// Plan the chain starting at degree `deg_y1` by iterating the closed-form
/// maps `u_{d_j}^{ok}` interval by interval.
#[must_use]
pub fn compute_n(phi: &DrinfeldModule, poly: &PolygonData, deg_y1: Q) -> Itinerary {
    let q = poly.q;
    let mut z = deg_y1;
    let mut degrees = vec![z];
    let mut ks = Vec::new();
    let start = match poly.classify(z) {
        LiftCase::Unique => {
            return Itinerary {
                degrees,
                k: ks,
                n: 1,
            }
        }
        LiftCase::Edge(j) => j,
    };
    for j in (1..=start).rev() {
        let dj = poly.d[j];
        let deg_a = phi.deg_coeff(dj).unwrap();
        let mut k = 0u32;
        while u_n_iter(q, dj, deg_a, k, z) >= -poly.a[j - 1] {
            k += 1;
            degrees.push(u_n_iter(q, dj, deg_a, k, z));
        }
        z = u_n_iter(q, dj, deg_a, k, z);
        ks.push(k);
    }
    let n = 1 + ks.iter().map(|&k| k as usize).sum::<usize>();
    Itinerary { degrees, k: ks, n }
}

/// Degrees visited by repeatedly applying the prescribed lift degree until
/// the chain reaches `-deg > a_1`.
#[must_use]
pub fn itinerary_stepwise(phi: &DrinfeldModule, poly: &PolygonData, deg_y1: Q) -> Vec<Q> {
    let mut out = vec![deg_y1];
    let mut z = deg_y1;
    while poly.classify(z) != LiftCase::Unique {
        z = poly.prescribed_degree(phi, z);
        out.push(z);
    }
    out
}

/// `min_i u_i(D)` over `i` in `{0} u N(phi)` together with the minimizing
/// indices.
#[must_use]
pub fn min_root_degree(phi: &DrinfeldModule, d: Q) -> (Q, Vec<usize>) {
    let q = phi.q();
    let mut best: Option<Q> = None;
    let mut idx = Vec::new();
    for i in std::iter::once(0).chain(phi.support()) {
        let g = u_n(q, i, phi.deg_coeff(i).unwrap(), d);
        match best {
            Some(b) if g > b => {}
            Some(b) if g == b => idx.push(i),
            _ => {
                best = Some(g);
                idx = vec![i];
            }
        }
    }
    (best.unwrap(), idx)
}

fn lcm_denominator(e: u32, x: Q) -> u32 {
    (e as i64).lcm(x.denom()) as u32
}

fn to_u_exponent(x: Q, e: u32) -> Result<i64> {
    let v = -x * Q::from(e as i64);
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::NeedRamification {
            e,
            e_needed: lcm_denominator(e, x),
        })
    }
}

fn in_prime_field(f: &FiniteField, a: FfElem) -> Option<i64> {
    let digits = f.to_digits(a);
    if digits.iter().skip(1).all(|&d| d == 0) {
        Some(digits.first().copied().unwrap_or(0) as i64)
    } else {
        None
    }
}

/// Solutions of `sum_{(k, c) in terms} c x^{q^k} = rhs` in the field.
fn additive_roots(f: &FiniteField, terms: &[(usize, FfElem)], rhs: FfElem) -> Vec<FfElem> {
    let mut out: Vec<FfElem> = f
        .elements()
        .filter(|&x| {
            let mut acc = FfElem::ZERO;
            for &(k, c) in terms {
                acc = f.add(acc, f.mul(c, f.frob(x, k as u32)));
            }
            acc == rhs
        })
        .collect();
    out.sort_by_key(|&x| f.canonical_key(x));
    out
}

/// Smallest multiple `M'` of the working degree for which the equation has
/// `want` solutions, when every coefficient lies in the prime field.
fn extension_hint(
    f: &FiniteField,
    terms: &[(usize, FfElem)],
    rhs: FfElem,
    want: usize,
) -> Option<u32> {
    let p = f.p();
    let FieldParams { m, big_m, .. } = f.params();
    let ints: Option<Vec<(usize, i64)>> = terms
        .iter()
        .map(|&(k, c)| in_prime_field(f, c).map(|v| (k, v)))
        .collect();
    let ints = ints?;
    let rhs = in_prime_field(f, rhs)?;
    for mult in 2..=12u32 {
        let params = FieldParams {
            p,
            m,
            big_m: big_m * mult,
        };
        let Ok(g) = FiniteField::new(params) else {
            return None;
        };
        let terms: Vec<(usize, FfElem)> = ints.iter().map(|&(k, v)| (k, g.from_int(v))).collect();
        if additive_roots(&g, &terms, g.from_int(rhs)).len() >= want {
            return Some(big_m * mult);
        }
    }
    None
}

fn no_root(f: &FiniteField, terms: &[(usize, FfElem)], rhs: FfElem, want: usize) -> Error {
    let q = f.q();
    let poly: Vec<String> = terms
        .iter()
        .map(|&(k, c)| {
            let c = if c == FfElem::ONE { String::new() } else { format!("{}*", f.format(c)) };
            format!("{c}c^{}", q.pow(k as u32))
        })
        .collect();
    let found = additive_roots(f, terms, rhs).len();
    Error::NoRoot {
        what: format!(
            "the full solution set of {} = {} ({want} solutions needed, {found} found)",
            poly.join(" + "),
            f.format(rhs)
        ),
        m_cur: f.params().big_m,
        hint: extension_hint(f, terms, rhs, want),
    }
}

/// Subtract `F_q`-multiples of lower-degree basis vectors so that the
/// coefficients of `v` at their leading exponents become canonical.
#[must_use]
pub fn reduce_against(v: &Laurent, basis: &[Laurent]) -> Laurent {
    let Some(dv) = v.deg() else {
        return v.clone();
    };
    let f = v.field();
    let mut order: Vec<&Laurent> = basis
        .iter()
        .filter(|b| b.deg().is_some_and(|d| d < dv))
        .collect();
    order.sort_by_key(|x| std::cmp::Reverse(x.deg()));
    let mut v = v.clone();
    for b in order {
        let k = b.lead().unwrap();
        let Some(cv) = v.coeff(k) else {
            continue;
        };
        let lb = b.sign();
        let best = f
            .base_field_elements()
            .into_iter()
            .min_by_key(|&a| f.canonical_key(f.sub(cv, f.mul(a, lb))))
            .unwrap();
        if !best.is_zero() {
            v = v.sub(&b.scale(best));
        }
    }
    v
}

/// A root `x` of `phi_t(x) = y` of minimal degree `min_i u_i(deg y)`.
///
/// Terms are fixed one at a time from the leading-coefficient equation of
/// the residual until `-deg(residual) > a_1`; from there the residual
/// contracts under `x <- x + r/theta`.  Choices among several admissible
/// leading coefficients take the smallest in canonical order.
pub fn solve_min_root(phi: &DrinfeldModule, y: &Laurent, budget: usize) -> Result<Laurent> {
    let ctx = y.ctx().clone();
    let e = ctx.e;
    let f = ctx.field.clone();
    if y.is_zero() {
        return Ok(Laurent::zero_mod(&ctx, y.prec()));
    }
    let target = y.prec().min(y.val_bound().saturating_add(ctx.cap));
    let mut x = Laurent::zero(&ctx);
    let mut res = y.clone();
    let mut trace: Vec<String> = Vec::new();
    let mut linear_steps = 0;
    let term_budget = budget + 4 * ctx.cap as usize;
    let mut steps = 0;
    let stop_at = loop {
        let stop_at = target.min(res.prec());
        if res.val_bound() >= stop_at {
            break stop_at;
        }
        steps += 1;
        let d = res.deg().unwrap();
        if trace.len() < 16 {
            trace.push(d.to_string());
        }
        if steps > term_budget {
            return Err(Error::NonConvergence { steps, trace });
        }
        let (g, s) = min_root_degree(phi, d);
        if s == [0] {
            linear_steps += 1;
            if linear_steps > budget {
                return Err(Error::NonConvergence {
                    steps: linear_steps,
                    trace,
                });
            }
            let delta = res.mul_theta_pow(-1);
            x = x.add(&delta);
            let next = res.sub(&phi.phi_t(&delta));
            if next.val_bound() <= res.val_bound() {
                return Err(Error::NonConvergence {
                    steps: linear_steps,
                    trace,
                });
            }
            res = next;
            continue;
        }
        let l = to_u_exponent(g, e)?;
        let terms: Vec<(usize, FfElem)> = s
            .iter()
            .map(|&i| (i, if i == 0 { FfElem::ONE } else { phi.coeff(i).sign() }))
            .collect();
        let rhs = res.sign();
        let c = if terms.len() == 1 {
            let (i, lc) = terms[0];
            f.frob_inv(f.div(rhs, lc)?, i as u32)
        } else {
            *additive_roots(&f, &terms, rhs)
                .first()
                .ok_or_else(|| no_root(&f, &terms, rhs, 1))?
        };
        let mono = Laurent::monomial(&ctx, c, l);
        x = x.add(&mono);
        res = res.sub(&phi.phi_t(&mono));
    };
    let d_bound = Q::new(-stop_at, e as i64);
    let (g_bound, _) = min_root_degree(phi, d_bound);
    let prec = (-g_bound * Q::from(e as i64)).ceil().to_integer();
    Ok(x.truncate(prec))
}

/// Roots of the leading-coefficient equation of edge `k` (1-based).
fn edge_roots(phi: &DrinfeldModule, poly: &PolygonData, k: usize) -> Result<Vec<FfElem>> {
    let f = phi.ctx().field.clone();
    let lam = poly.lambda[k - 1];
    let a = poly.a[k - 1];
    let q = poly.q;
    let terms: Vec<(usize, FfElem)> = std::iter::once(0)
        .chain(phi.support())
        .filter(|&i| -phi.deg_coeff(i).unwrap() == a + lam * Q::from(q.pow(i as u32) as i64))
        .map(|i| (i, if i == 0 { FfElem::ONE } else { phi.coeff(i).sign() }))
        .collect();
    let want = q.pow(poly.multiplicity(k) as u32) as usize;
    let roots = additive_roots(&f, &terms, FfElem::ZERO);
    if roots.len() != want {
        return Err(no_root(&f, &terms, FfElem::ZERO, want));
    }
    Ok(roots)
}

/// Greedy `F_q`-basis of an `F_q`-subspace listed in canonical order.
fn fq_basis(f: &FiniteField, space: &[FfElem], dim: usize) -> Vec<FfElem> {
    let scalars = f.base_field_elements();
    let mut span = vec![FfElem::ZERO];
    let mut basis = Vec::new();
    for &v in space {
        if basis.len() == dim {
            break;
        }
        if span.contains(&v) {
            continue;
        }
        basis.push(v);
        let mut next = Vec::with_capacity(span.len() * scalars.len());
        for &s in &span {
            for &c in &scalars {
                next.push(f.add(s, f.mul(c, v)));
            }
        }
        span = next;
    }
    basis
}

/// Determinant of a small square matrix of Laurent numbers.
pub(crate) fn laurent_det(m: &[Vec<Laurent>]) -> Laurent {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Laurent::zero(m[0][0].ctx());
    for j in 0..n {
        if m[0][j].is_zero() && m[0][j].is_exact() {
            continue;
        }
        let minor: Vec<Vec<Laurent>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&laurent_det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Moore matrix `(x_j^{q^{i-1}})`.
#[must_use]
pub fn moore_matrix(x: &[Laurent]) -> Vec<Vec<Laurent>> {
    (0..x.len())
        .map(|i| x.iter().map(|xj| xj.frobenius(i as u32)).collect())
        .collect()
}

/// Checks `deg det X = sum_j q^{j-1} deg x_j` and returns `det X`.
pub fn moore_certificate(x: &[Laurent]) -> Result<Laurent> {
    let det = laurent_det(&moore_matrix(x));
    let q = x[0].ctx().q() as i64;
    let mut expect = Q::zero();
    for (j, xj) in x.iter().enumerate() {
        let d = xj
            .deg()
            .ok_or_else(|| Error::Certificate(format!("x_{} vanishes to precision", j + 1)))?;
        expect += d * Q::from(q.pow(j as u32));
    }
    match det.deg() {
        Some(d) if d == expect => Ok(det),
        Some(d) => Err(Error::Certificate(format!(
            "deg det X = {d}, expected {expect}"
        ))),
        None => Err(Error::Certificate("det X vanishes to precision".into())),
    }
}

/// Strict `F_q`-basis of `phi[t]`, sign-normalized and reduced against
/// lower-degree members.
pub fn strict_basis(phi: &DrinfeldModule, poly: &PolygonData, budget: usize) -> Result<Vec<Laurent>> {
    let ctx = phi.ctx().clone();
    let f = ctx.field.clone();
    let mut basis: Vec<Laurent> = Vec::new();
    for k in 1..=poly.s() {
        let l = to_u_exponent(poly.lambda[k - 1], ctx.e)?;
        let roots = edge_roots(phi, poly, k)?;
        for c in fq_basis(&f, &roots, poly.multiplicity(k)) {
            let mono = Laurent::monomial(&ctx, c, l);
            let delta = solve_min_root(phi, &phi.phi_t(&mono).neg(), budget)?;
            let x = mono.add(&delta);
            basis.push(reduce_against(&x, &basis));
        }
    }
    let degs: Vec<Option<Q>> = basis.iter().map(Laurent::deg).collect();
    let want: Vec<Option<Q>> = poly.strict_degrees().into_iter().map(Some).collect();
    if degs != want {
        return Err(Error::Certificate(format!(
            "basis degrees {degs:?} differ from slopes {want:?}"
        )));
    }
    moore_certificate(&basis)?;
    Ok(basis)
}

/// Strict basis, lifting depth and `xi_1..xi_r`.
#[derive(Clone, Debug)]
pub struct TorsionSelection {
    pub polygon: PolygonData,
    pub x: Vec<Laurent>,
    pub n: usize,
    /// `N_j` for each basis vector.
    pub n_j: Vec<usize>,
    /// `chains[j] = [y_1 = x_j, y_2, ..., y_N = xi_j]`.
    pub chains: Vec<Vec<Laurent>>,
    pub xi: Vec<Laurent>,
}

impl TorsionSelection {
    /// `h_j = sum_m phi_{t^{N-1-m}}(xi_j) t^m`.
    #[must_use]
    pub fn h(&self, j: usize, t_trunc: usize) -> TateSeries {
        let ctx = self.x[j].ctx();
        TateSeries::polynomial(ctx, &self.chains[j], t_trunc)
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.x.len()
    }
}

/// Lift `y` one step, keeping the choice reduced against `basis`.
pub fn lift(phi: &DrinfeldModule, y: &Laurent, basis: &[Laurent], budget: usize) -> Result<Laurent> {
    let z = solve_min_root(phi, y, budget)?;
    Ok(reduce_against(&z, basis))
}

/// Division chains of common length `N = max_j N_j` above a given basis.
pub fn select_xi(
    phi: &DrinfeldModule,
    poly: &PolygonData,
    x: Vec<Laurent>,
    budget: usize,
) -> Result<TorsionSelection> {
    let mut n_j = Vec::new();
    for xj in &x {
        let d = xj
            .deg()
            .ok_or_else(|| Error::Certificate("basis vector vanishes".into()))?;
        n_j.push(compute_n(phi, poly, d).n);
    }
    let n = *n_j.iter().max().unwrap();
    let mut chains = Vec::new();
    for xj in &x {
        let mut chain = vec![xj.clone()];
        for _ in 1..n {
            let prev = chain.last().unwrap();
            let want = poly.prescribed_degree(phi, prev.deg().unwrap());
            let next = lift(phi, prev, &x, budget)?;
            if next.deg() != Some(want) {
                return Err(Error::Certificate(format!(
                    "lift has degree {:?}, prescribed {want}",
                    next.deg()
                )));
            }
            chain.push(next);
        }
        chains.push(chain);
    }
    let bound = phi.radius().r_phi_logq;
    let xi: Vec<Laurent> = chains.iter().map(|c| c.last().unwrap().clone()).collect();
    for (j, v) in xi.iter().enumerate() {
        if v.deg().is_some_and(|d| d >= bound) {
            return Err(Error::Certificate(format!("|xi_{}| >= R_phi", j + 1)));
        }
    }
    Ok(TorsionSelection {
        polygon: poly.clone(),
        x,
        n,
        n_j,
        chains,
        xi,
    })
}

/// Ramification index making every planned degree integral in `u`-units.
#[must_use]
pub fn required_e(phi: &DrinfeldModule, poly: &PolygonData) -> u32 {
    let mut e = phi.ctx().e;
    for &lam in &poly.lambda {
        e = lcm_denominator(e, lam);
        for d in itinerary_stepwise(phi, poly, lam) {
            e = lcm_denominator(e, d);
        }
    }
    e
}

/// Full torsion pipeline.  Refits the module to a finer ramification when a
/// root needs it and returns the module actually used.
pub fn build_xi(phi: &DrinfeldModule, budget: usize) -> Result<(DrinfeldModule, TorsionSelection)> {
    let poly = PolygonData::new(phi);
    let mut phi = phi.refit(required_e(phi, &poly))?;
    let p = phi.ctx().field.p() as u32;
    let mut wild = 0;
    for _ in 0..8 {
        let attempt = strict_basis(&phi, &poly, budget).and_then(|x| select_xi(&phi, &poly, x, budget));
        match attempt {
            Ok(sel) => return Ok((phi, sel)),
            Err(Error::NeedRamification { e_needed, .. }) => {
                let e = phi.ctx().e;
                if (e_needed / e) % p == 0 {
                    wild += 1;
                    if wild >= 3 {
                        return Err(Error::WildRamification { e: e_needed });
                    }
                }
                phi = phi.refit(e_needed)?;
            }
            Err(err) => return Err(err),
        }
    }
    Err(Error::PrecisionExhausted("ramification kept growing".into()))
}

/// Closed forms for rank 2: `(N, deg xi_1, deg xi_2)`.
#[must_use]
pub fn rank2_table(q: u64, deg_a1: Q, deg_a2: Q) -> (usize, Q, Q) {
    let qq = Q::from(q as i64);
    if deg_a1 <= (qq + deg_a2) / (qq + Q::one()) {
        let d = (Q::one() - deg_a2) / (qq * qq - Q::one());
        return (1, d, d);
    }
    let mut l = 1u32;
    while deg_a1 >= (Q::from((q as i64).pow(l + 1)) + deg_a2) / (qq + Q::one()) {
        l += 1;
    }
    let ql = Q::from((q as i64).pow(l));
    let d1 = (Q::one() - deg_a1) / (qq - Q::one()) - Q::from(l as i64 - 1);
    let d2 = ((-ql + qq + Q::one()) * deg_a1 - deg_a2) / (ql * (qq - Q::one()));
    (l as usize, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Ctx;

    fn carlitz(q: u64) -> DrinfeldModule {
        let f = FiniteField::new(FieldParams { p: q, m: 1, big_m: 2 }).unwrap();
        DrinfeldModule::carlitz(&Ctx::new(f, 1, 40))
    }

    #[test]
    fn carlitz_polygon() {
        let phi = carlitz(3);
        let p = PolygonData::new(&phi);
        assert_eq!(p.lambda, vec![Q::new(1, 2)]);
        assert_eq!(p.d, vec![0, 1]);
        assert_eq!(p.a, vec![Q::new(-3, 2)]);
    }

    #[test]
    fn iterate_closed_form_matches_composition() {
        let (q, n, da) = (3, 2, Q::new(5, 4));
        let mut z = Q::new(7, 3);
        for k in 0..5 {
            assert_eq!(u_n_iter(q, n, da, k, Q::new(7, 3)), z);
            z = u_n(q, n, da, z);
        }
    }

    #[test]
    fn missing_root_hints_extension() {
        let f = FiniteField::new(FieldParams { p: 3, m: 1, big_m: 1 }).unwrap();
        let phi = DrinfeldModule::carlitz(&Ctx::new(f, 2, 40));
        let err = build_xi(&phi, DEFAULT_NEWTON_BUDGET).unwrap_err();
        assert_eq!(err.hint().as_deref(), Some("increase M to 2"));
    }

    #[test]
    fn carlitz_torsion_root() {
        let phi = carlitz(3).refit(2).unwrap();
        let (_, sel) = build_xi(&phi, DEFAULT_NEWTON_BUDGET).unwrap();
        assert_eq!(sel.n, 1);
        let x = &sel.x[0];
        assert_eq!(x.deg(), Some(Q::new(1, 2)));
        assert!(phi.phi_t(x).is_zero());
    }
}
