//! Finite fields `F_{q^M}` (`q = p^m`) with Zech-logarithm tables.
//!
//! Elements are stored as discrete logarithms to a fixed primitive element,
//! so multiplication, inversion and Frobenius are modular integer arithmetic
//! and addition is one table lookup. The polynomial basis used for printing
//! and parsing is the one given by the defining irreducible polynomial; its
//! root is called the generator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element of a [`FiniteField`], stored as a discrete logarithm.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FfElem(u32);

impl FfElem {
    pub const ZERO: FfElem = FfElem(u32::MAX);
    pub const ONE: FfElem = FfElem(0);

    #[inline]
    #[must_use]
    pub fn is_zero(self) -> bool {
        self.0 == u32::MAX
    }

    /// Discrete logarithm, `None` for zero.
    #[must_use]
    pub fn log(self) -> Option<u32> {
        (!self.is_zero()).then_some(self.0)
    }
}

/// Parameters of a working field: `p` prime, `q = p^m`, elements in `F_{q^M}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize, serde::Deserialize)]
pub struct FieldParams {
    pub p: u64,
    pub m: u32,
    #[serde(rename = "M")]
    pub big_m: u32,
}

pub struct FiniteField {
    params: FieldParams,
    q: u64,
    d: u32,
    size: u64,
    n1: u32,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    gen_name: String,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}^{} (q = {}, modulus {:?})",
            self.params.p, self.d, self.q, self.modulus
        )
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.modulus == other.modulus
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            out.push(i);
            while n.is_multiple_of(i) {
                n /= i;
            }
        }
        i += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomials over F_p as coefficient vectors, lowest degree first.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let df = f.len() - 1;
        let inv_lead = inv_mod(f[df], p);
        while r.len() > df {
            let top = r.len() - 1;
            let c = r[top] * inv_lead % p;
            if c != 0 {
                for (i, &fi) in f.iter().enumerate() {
                    let idx = top - df + i;
                    r[idx] = (r[idx] + p - c * fi % p) % p;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut c = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + x * y) % p;
            }
        }
        rem(&c, f, p)
    }

    pub fn pow_mod(a: &[u64], mut k: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, f, p);
        let mut acc = vec![1u64];
        while k > 0 {
            if k & 1 == 1 {
                acc = mul_mod(&acc, &base, f, p);
            }
            base = mul_mod(&base, &base, f, p);
            k >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut c: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut c);
        c
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1;
        let mut b = a % p;
        let mut k = p - 2;
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            k >>= 1;
        }
        r
    }

    /// Rabin's irreducibility test for monic `f` of degree `d`.
    pub fn is_irreducible(f: &[u64], p: u64, d: u32) -> bool {
        let x = vec![0u64, 1];
        let frob = |h: &[u64], times: u32| {
            let mut h = h.to_vec();
            for _ in 0..times {
                h = pow_mod(&h, p, f, p);
            }
            h
        };
        let full = frob(&x, d);
        if !sub(&full, &rem(&x, f, p), p).is_empty() {
            return false;
        }
        for r in super::prime_factors(d as u64) {
            let h = frob(&x, d / r as u32);
            let g = gcd(f, &sub(&h, &x, p), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn encode(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut k: u64, p: u64, d: u32) -> Vec<u64> {
    (0..d)
        .map(|_| {
            let c = k % p;
            k /= p;
            c
        })
        .collect()
}

fn mod_pow(mut b: u64, mut k: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while k > 0 {
        if k & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        k >>= 1;
    }
    r
}

impl FiniteField {
    /// Build `F_{q^M}` with the first monic irreducible modulus in
    /// lexicographic order of its lower coefficients.
    pub fn new(params: FieldParams) -> Result<Arc<FiniteField>> {
        Self::with_generator_name(params, "a")
    }

    pub fn with_generator_name(params: FieldParams, name: &str) -> Result<Arc<FiniteField>> {
        let FieldParams { p, m, big_m } = params;
        if !is_prime(p) || m == 0 || big_m == 0 {
            return Err(Error::Invalid(format!(
                "bad field parameters p = {p}, m = {m}, M = {big_m}"
            )));
        }
        let d = m * big_m;
        let size = p.checked_pow(d).filter(|&s| s <= MAX_FIELD_SIZE);
        let Some(size) = size else {
            return Err(Error::FieldTooLarge { p, d });
        };
        let q = p.pow(m);
        let mut modulus = None;
        for low in 0..p.pow(d) {
            let mut f = decode(low, p, d);
            f.push(1);
            if f[0] != 0 && fp_poly::is_irreducible(&f, p, d) {
                modulus = Some(f);
                break;
            }
        }
        let modulus = modulus.expect("an irreducible polynomial of every degree exists");
        let n1 = size - 1;
        let factors = prime_factors(n1);
        let mut prim = None;
        for cand in 1..size {
            let g = decode(cand, p, d);
            let is_prim = factors.iter().all(|&l| {
                let h = fp_poly::pow_mod(&g, n1 / l, &modulus, p);
                h != vec![1]
            });
            if is_prim {
                prim = Some(g);
                break;
            }
        }
        let prim = prim.expect("a primitive element exists");
        let mut exp = Vec::with_capacity(n1 as usize);
        let mut log = vec![u32::MAX; size as usize];
        let mut cur = vec![1u64];
        for k in 0..n1 {
            let mut v = cur.clone();
            v.resize(d as usize, 0);
            let idx = encode(&v, p);
            exp.push(idx as u32);
            log[idx as usize] = k as u32;
            cur = fp_poly::mul_mod(&cur, &prim, &modulus, p);
        }
        let mut zech = Vec::with_capacity(n1 as usize);
        for k in 0..n1 {
            let mut v = decode(exp[k as usize] as u64, p, d);
            v[0] = (v[0] + 1) % p;
            let idx = encode(&v, p);
            zech.push(if idx == 0 { u32::MAX } else { log[idx as usize] });
        }
        Ok(Arc::new(FiniteField {
            params,
            q,
            d,
            size,
            n1: n1 as u32,
            modulus,
            exp,
            log,
            zech,
            gen_name: name.to_string(),
        }))
    }

    #[must_use]
    pub fn params(&self) -> FieldParams {
        self.params
    }
    #[must_use]
    pub fn p(&self) -> u64 {
        self.params.p
    }
    #[must_use]
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Degree of the field over `F_p`.
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.d
    }
    #[must_use]
    pub fn size(&self) -> u64 {
        self.size
    }
    #[must_use]
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    #[must_use]
    pub fn generator_name(&self) -> &str {
        &self.gen_name
    }

    #[inline]
    #[must_use]
    pub fn add(&self, a: FfElem, b: FfElem) -> FfElem {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let n1 = self.n1;
        let diff = if b.0 >= a.0 { b.0 - a.0 } else { b.0 + n1 - a.0 };
        let z = self.zech[diff as usize];
        if z == u32::MAX {
            return FfElem::ZERO;
        }
        let s = a.0 + z;
        FfElem(if s >= n1 { s - n1 } else { s })
    }

    #[inline]
    #[must_use]
    pub fn neg(&self, a: FfElem) -> FfElem {
        if a.is_zero() || self.params.p == 2 {
            return a;
        }
        let s = a.0 + self.n1 / 2;
        FfElem(if s >= self.n1 { s - self.n1 } else { s })
    }

    #[inline]
    #[must_use]
    pub fn sub(&self, a: FfElem, b: FfElem) -> FfElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    #[must_use]
    pub fn mul(&self, a: FfElem, b: FfElem) -> FfElem {
        if a.is_zero() || b.is_zero() {
            return FfElem::ZERO;
        }
        let s = a.0 + b.0;
        FfElem(if s >= self.n1 { s - self.n1 } else { s })
    }

    pub fn inv(&self, a: FfElem) -> Result<FfElem> {
        if a.is_zero() {
            return Err(Error::ZeroDivision);
        }
        Ok(FfElem(if a.0 == 0 { 0 } else { self.n1 - a.0 }))
    }

    pub fn div(&self, a: FfElem, b: FfElem) -> Result<FfElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k` for a non-negative integer `k`.
    #[must_use]
    pub fn pow(&self, a: FfElem, k: u64) -> FfElem {
        if k == 0 {
            return FfElem::ONE;
        }
        if a.is_zero() {
            return FfElem::ZERO;
        }
        let n1 = self.n1 as u64;
        FfElem(((a.0 as u128 * (k % n1) as u128) % n1 as u128) as u32)
    }

    /// `a^k` for a possibly negative integer `k`.
    pub fn powi(&self, a: FfElem, k: i64) -> Result<FfElem> {
        if k >= 0 {
            Ok(self.pow(a, k as u64))
        } else {
            Ok(self.pow(self.inv(a)?, k.unsigned_abs()))
        }
    }

    /// Frobenius `a -> a^{q^k}`.
    #[must_use]
    pub fn frob(&self, a: FfElem, k: u32) -> FfElem {
        if a.is_zero() {
            return a;
        }
        let n1 = self.n1 as u64;
        let e = mod_pow(self.q, k as u64, n1);
        FfElem(((a.0 as u64 * e) % n1) as u32)
    }

    /// Inverse Frobenius `a -> a^{1/q^k}`.
    #[must_use]
    pub fn frob_inv(&self, a: FfElem, k: u32) -> FfElem {
        let big_m = self.params.big_m;
        let k = k % big_m;
        self.frob(a, (big_m - k) % big_m)
    }

    #[must_use]
    pub fn pow_q(&self, a: FfElem) -> FfElem {
        self.frob(a, 1)
    }

    #[must_use]
    pub fn root_q(&self, a: FfElem) -> FfElem {
        self.frob_inv(a, 1)
    }

    /// `a -> a^{1/p}`.
    #[must_use]
    pub fn root_p(&self, a: FfElem) -> FfElem {
        if a.is_zero() {
            return a;
        }
        let n1 = self.n1 as u64;
        let e = mod_pow(self.params.p, (self.d - 1) as u64, n1);
        FfElem(((a.0 as u64 * e) % n1) as u32)
    }

    /// All `n`-th roots of `a` in the field.
    #[must_use]
    pub fn nth_roots(&self, a: FfElem, n: u64) -> Vec<FfElem> {
        if n == 0 {
            return Vec::new();
        }
        if a.is_zero() {
            return vec![FfElem::ZERO];
        }
        let n1 = self.n1 as u64;
        let mut nn = n;
        let mut a_log = a.0 as u64;
        // p-power part of n is a bijection
        while nn.is_multiple_of(self.params.p) {
            nn /= self.params.p;
            a_log = (a_log * mod_pow(self.params.p, (self.d - 1) as u64, n1)) % n1;
        }
        let g = num_integer::gcd(nn, n1);
        if !a_log.is_multiple_of(g) {
            return Vec::new();
        }
        let m1 = n1 / g;
        let base = if m1 == 1 {
            0
        } else {
            let inv = mod_inverse((nn / g) % m1, m1);
            (a_log / g) % m1 * inv % m1
        };
        (0..g).map(|k| FfElem(((base + k * m1) % n1) as u32)).collect()
    }

    /// One `n`-th root of `a`, or an error carrying the minimal extension hint.
    pub fn nth_root(&self, a: FfElem, n: u64) -> Result<FfElem> {
        self.nth_roots(a, n)
            .into_iter()
            .next()
            .ok_or_else(|| Error::NoRoot {
                what: format!("a {n}-th root of {}", self.format(a)),
                m_cur: self.params.big_m,
                hint: self.root_extension_hint(a, n),
            })
    }

    /// Smallest `M' >= M`, a multiple of `M`, with `a^{1/n}` in `F_{q^{M'}}`.
    #[must_use]
    pub fn root_extension_hint(&self, a: FfElem, n: u64) -> Option<u32> {
        if a.is_zero() {
            return Some(self.params.big_m);
        }
        let n1 = self.n1 as u128;
        let ord = n1 / num_integer::gcd(a.0 as u128, n1);
        let mut nn = n as u128;
        while nn.is_multiple_of(self.params.p as u128) {
            nn /= self.params.p as u128;
        }
        for k in 1..=64u32 {
            let mm = self.params.big_m * k;
            let qq = (self.q as u128).checked_pow(mm)?;
            let big = qq - 1;
            let g = num_integer::gcd(nn, big);
            if (big / g) % ord == 0 {
                return Some(mm);
            }
        }
        None
    }

    /// Image of an integer in the prime field.
    #[must_use]
    pub fn from_int(&self, k: i64) -> FfElem {
        let p = self.params.p as i64;
        let r = k.rem_euclid(p) as u64;
        self.from_digits(&[r])
    }

    /// Element `sum digits[j] * gen^j`.
    #[must_use]
    pub fn from_digits(&self, digits: &[u64]) -> FfElem {
        let p = self.params.p;
        let v: Vec<u64> = digits.iter().map(|c| c % p).collect();
        let mut v = fp_poly::rem(&v, &self.modulus, p);
        v.resize(self.d as usize, 0);
        let idx = encode(&v, p);
        if idx == 0 {
            FfElem::ZERO
        } else {
            FfElem(self.log[idx as usize])
        }
    }

    /// Polynomial-basis digits of `a`, length `degree()`.
    #[must_use]
    pub fn to_digits(&self, a: FfElem) -> Vec<u64> {
        if a.is_zero() {
            return vec![0; self.d as usize];
        }
        decode(self.exp[a.0 as usize] as u64, self.params.p, self.d)
    }

    /// The root of the defining polynomial.
    #[must_use]
    pub fn generator(&self) -> FfElem {
        if self.d == 1 {
            // the modulus is x - c, so the root is c
            let c = (self.params.p - self.modulus[0]) % self.params.p;
            return self.from_digits(&[c]);
        }
        self.from_digits(&[0, 1])
    }

    /// Iterator over all field elements, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FfElem> + '_ {
        std::iter::once(FfElem::ZERO).chain((0..self.n1).map(FfElem))
    }

    /// Whether `a` lies in the subfield `F_q`.
    #[must_use]
    pub fn in_base_field(&self, a: FfElem) -> bool {
        self.pow_q(a) == a
    }

    /// Elements of `F_q`, zero first.
    #[must_use]
    pub fn base_field_elements(&self) -> Vec<FfElem> {
        let step = self.n1 / (self.q as u32 - 1);
        std::iter::once(FfElem::ZERO)
            .chain((0..self.q as u32 - 1).map(|k| FfElem(k * step)))
            .collect()
    }

    /// Total order used for canonical choices: zero first, then by digits.
    #[must_use]
    pub fn canonical_key(&self, a: FfElem) -> u64 {
        if a.is_zero() {
            0
        } else {
            self.exp[a.0 as usize] as u64
        }
    }

    /// Print as a polynomial in the generator, e.g. `1-i` or `2*a^2+a`.
    #[must_use]
    pub fn format(&self, a: FfElem) -> String {
        let digits = self.to_digits(a);
        let p = self.params.p;
        let mut out = String::new();
        for (j, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let (neg, mag) = if p > 2 && c > p / 2 { (true, p - c) } else { (false, c) };
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mono = match j {
                0 => String::new(),
                1 => self.gen_name.clone(),
                _ => format!("{}^{}", self.gen_name, j),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag == 1 {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parse the output of [`FiniteField::format`] (also accepts spaces and
    /// unnormalized integer coefficients).
    pub fn parse(&self, s: &str) -> Result<FfElem> {
        let p = self.params.p as i64;
        let mut digits = vec![0i64; self.d as usize + 1];
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty field element".into(),
            });
        }
        let name: Vec<char> = self.gen_name.chars().collect();
        let mut i = 0;
        let mut extra: Vec<(i64, usize)> = Vec::new();
        while i < chars.len() {
            let mut sign = 1;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if i != 0 {
                return Err(Error::Parse {
                    pos: i,
                    msg: "expected + or -".into(),
                });
            }
            let mut coef: i64 = 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let has_num = i > start;
            if has_num {
                let txt: String = chars[start..i].iter().collect();
                coef = txt.parse::<i64>().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "bad integer".into(),
                })? % p;
                if i < chars.len() && chars[i] == '*' {
                    i += 1;
                } else {
                    digits[0] += sign * coef;
                    continue;
                }
            }
            if chars[i..].starts_with(&name) {
                i += name.len();
                let mut power = 1usize;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let ps = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let txt: String = chars[ps..i].iter().collect();
                    power = txt.parse().map_err(|_| Error::Parse {
                        pos: ps,
                        msg: "bad exponent".into(),
                    })?;
                }
                if power < digits.len() {
                    digits[power] += sign * coef;
                } else {
                    extra.push((sign * coef, power));
                }
            } else {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("expected integer or generator '{}'", self.gen_name),
                });
            }
        }
        let mut acc = FfElem::ZERO;
        let g = self.generator();
        for (j, &c) in digits.iter().enumerate() {
            let term = self.mul(self.from_int(c), self.pow(g, j as u64));
            acc = self.add(acc, term);
        }
        for (c, j) in extra {
            acc = self.add(acc, self.mul(self.from_int(c), self.pow(g, j as u64)));
        }
        Ok(acc)
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}
