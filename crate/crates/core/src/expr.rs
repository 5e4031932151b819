//! Coefficient expressions such as `nu^3 + nu` or `θ^{q/2} + θ^{1/2}`.
//!
//! Grammar: `+ - * /`, parentheses, integer powers of any expression,
//! rational powers `θ^{a/b}` (exponents may use `q`), integers, the field
//! generator, named variables, `sqrt(x, sign=s)` and `root(x, n, sign=s)`.

use std::collections::BTreeMap;

use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::laurent::{Ctx, Laurent};
use crate::Q;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Theta,
    Op(char),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Theta(Q),
    Var { name: String, pos: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Root { arg: Box<Expr>, n: u64, sign: Option<String>, pos: usize },
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().map_err(|_| Error::Parse {
                pos: start,
                msg: format!("integer literal {s} out of range"),
            })?;
            out.push((Tok::Int(v), start));
        } else if c == 'θ' {
            out.push((Tok::Theta, i));
            i += 1;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') && chars[i] != 'θ' {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if s == "theta" {
                out.push((Tok::Theta, start));
            } else {
                out.push((Tok::Ident(s), start));
            }
        } else {
            let op = match c {
                '−' => '-',
                '·' | '×' => '*',
                '+' | '-' | '*' | '/' | '^' | '(' | ')' | '{' | '}' | ',' | '=' => c,
                _ => {
                    return Err(Error::Parse {
                        pos: i,
                        msg: format!("unexpected character {c:?}"),
                    })
                }
            };
            out.push((Tok::Op(op), i));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    q: u64,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }
    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let is_theta = self.peek() == Some(&Tok::Theta);
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let ex = self.exponent()?;
        if is_theta {
            return Ok(Expr::Theta(ex));
        }
        if !ex.is_integer() {
            return Err(Error::Parse {
                pos,
                msg: "rational powers are only allowed on θ; use sqrt or root".into(),
            });
        }
        Ok(Expr::Pow(Box::new(base), ex.to_integer()))
    }

    fn exponent(&mut self) -> Result<Q> {
        if self.eat('{') {
            let v = self.rexpr()?;
            self.expect('}')?;
            Ok(v)
        } else if self.eat('-') {
            Ok(-self.rfactor()?)
        } else {
            self.rfactor()
        }
    }

    fn rexpr(&mut self) -> Result<Q> {
        let mut v = self.rterm()?;
        loop {
            if self.eat('+') {
                v += self.rterm()?;
            } else if self.eat('-') {
                v -= self.rterm()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn rterm(&mut self) -> Result<Q> {
        let mut v = self.rfactor()?;
        loop {
            if self.eat('*') {
                v *= self.rfactor()?;
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.rfactor()?;
                if d == Q::from(0) {
                    return Err(Error::Parse {
                        pos,
                        msg: "division by zero in exponent".into(),
                    });
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn rfactor(&mut self) -> Result<Q> {
        if self.eat('-') {
            return Ok(-self.rfactor()?);
        }
        if self.eat('(') {
            let v = self.rexpr()?;
            self.expect(')')?;
            return Ok(v);
        }
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.i += 1;
                Ok(Q::from(v))
            }
            Some(Tok::Ident(s)) if s == "q" => {
                self.i += 1;
                Ok(Q::from(self.q as i64))
            }
            _ => self.err("expected a rational exponent"),
        }
    }

    fn sign_arg(&mut self) -> Result<Option<String>> {
        if !self.eat(',') {
            return Ok(None);
        }
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "sign" => self.i += 1,
            _ => return self.err("expected 'sign='"),
        }
        self.expect('=')?;
        let start = self.i;
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            match t {
                Tok::Op('(') => depth += 1,
                Tok::Op(')') if depth == 0 => break,
                Tok::Op(')') => depth -= 1,
                _ => {}
            }
            self.i += 1;
        }
        if self.i == start {
            return self.err("empty sign selector");
        }
        let text: String = self.toks[start..self.i]
            .iter()
            .map(|(t, _)| match t {
                Tok::Int(v) => v.to_string(),
                Tok::Ident(s) => s.clone(),
                Tok::Theta => "θ".into(),
                Tok::Op(c) => c.to_string(),
            })
            .collect();
        Ok(Some(text))
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.i += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Theta) => {
                self.i += 1;
                Ok(Expr::Theta(Q::from(1)))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(s)) if (s == "sqrt" || s == "root") && self.toks.get(self.i + 1).map(|t| &t.0) == Some(&Tok::Op('(')) => {
                self.i += 2;
                let arg = self.expr()?;
                let n = if s == "root" {
                    self.expect(',')?;
                    match self.peek().cloned() {
                        Some(Tok::Int(n)) if n >= 1 => {
                            self.i += 1;
                            n as u64
                        }
                        _ => return self.err("expected a positive root index"),
                    }
                } else {
                    2
                };
                let sign = self.sign_arg()?;
                self.expect(')')?;
                Ok(Expr::Root {
                    arg: Box::new(arg),
                    n,
                    sign,
                    pos,
                })
            }
            Some(Tok::Ident(s)) if s == "q" => {
                self.i += 1;
                Ok(Expr::Int(self.q as i64))
            }
            Some(Tok::Ident(s)) => {
                self.i += 1;
                Ok(Expr::Var { name: s, pos })
            }
            _ => self.err("expected an expression"),
        }
    }
}

/// Parse an expression; `q` is substituted where it occurs.
pub fn parse(src: &str, q: u64) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: src.chars().count(),
        q,
    };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Named values available to expressions.
pub type Env = BTreeMap<String, Laurent>;

impl Expr {
    pub fn eval(&self, ctx: &Ctx, env: &Env) -> Result<Laurent> {
        let f = &ctx.field;
        Ok(match self {
            Expr::Int(v) => ctx.int(*v),
            Expr::Theta(x) => ctx.theta_pow(crate::field::FfElem::ONE, *x)?,
            Expr::Var { name, pos } => {
                if name == f.generator_name() {
                    Laurent::constant(ctx, f.generator())
                } else if let Some(v) = env.get(name) {
                    v.refit(ctx.e)?
                } else {
                    return Err(Error::Parse {
                        pos: *pos,
                        msg: format!("unknown name {name}"),
                    });
                }
            }
            Expr::Neg(a) => a.eval(ctx, env)?.neg(),
            Expr::Add(a, b) => a.eval(ctx, env)?.add(&b.eval(ctx, env)?),
            Expr::Sub(a, b) => a.eval(ctx, env)?.sub(&b.eval(ctx, env)?),
            Expr::Mul(a, b) => a.eval(ctx, env)?.mul(&b.eval(ctx, env)?),
            Expr::Div(a, b) => a.eval(ctx, env)?.div(&b.eval(ctx, env)?)?,
            Expr::Pow(a, k) => a.eval(ctx, env)?.powi(*k)?,
            Expr::Root { arg, n, sign, pos } => {
                let x = arg.eval(ctx, env)?;
                let sign = match sign {
                    Some(s) => Some(f.parse(s.trim_start_matches('+')).map_err(|_| Error::Parse {
                        pos: *pos,
                        msg: format!("bad sign selector {s}"),
                    })?),
                    None if f.p().is_multiple_of(2) && n.is_power_of_two() => None,
                    None => {
                        return Err(Error::Parse {
                            pos: *pos,
                            msg: "root is sign-ambiguous; give sign=...".into(),
                        })
                    }
                };
                x.nth_root(*n, sign)?
            }
        })
    }
}

/// Evaluate a list of `(name, expression)` definitions in order.
pub fn eval_defs(ctx: &Ctx, defs: &[(String, String)]) -> Result<Env> {
    let mut env = Env::new();
    for (name, src) in defs {
        let v = parse(src, ctx.q())?.eval(ctx, &env)?;
        env.insert(name.clone(), v);
    }
    Ok(env)
}

/// Build `phi_t = theta + sum A_i tau^i` from expressions, refining the
/// ramification until every expression is representable.
pub fn build_module(
    field: Arc<FiniteField>,
    e0: u32,
    cap: i64,
    defs: &[(String, String)],
    coeffs: &[String],
) -> Result<DrinfeldModule> {
    let mut e = e0.max(1);
    for _ in 0..8 {
        let ctx = Ctx::new(field.clone(), e, cap * e as i64 / e0.max(1) as i64);
        let attempt = eval_defs(&ctx, defs).and_then(|env| {
            coeffs
                .iter()
                .map(|c| parse(c, ctx.q())?.eval(&ctx, &env))
                .collect::<Result<Vec<_>>>()
        });
        match attempt {
            Ok(a) => return DrinfeldModule::new(a),
            Err(Error::NeedRamification { e_needed, .. }) => e = e_needed,
            Err(err) => return Err(err),
        }
    }
    Err(Error::Invalid("ramification did not stabilize".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    fn ctx(e: u32) -> Ctx {
        let f = FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap();
        Ctx::new(f, e, 40)
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let err = parse("θ^{1/0}", 3).unwrap_err();
        assert_eq!(err.class(), "parse");
    }

    #[test]
    fn theta_powers_with_q() {
        let c = ctx(2);
        let v = parse("theta^{q/2} + θ^{1/2}", 4).unwrap().eval(&c, &Env::new()).unwrap();
        assert_eq!(v.deg(), Some(Q::from(2)));
        assert_eq!(v.terms().len(), 2);
    }

    #[test]
    fn sqrt_needs_a_sign() {
        let c = ctx(2);
        let err = parse("sqrt(θ^3 - θ - 1)", 3).unwrap().eval(&c, &Env::new()).unwrap_err();
        assert_eq!(err.class(), "parse");
        let nu = parse("sqrt(θ^3 − θ − 1, sign=+1)", 3).unwrap().eval(&c, &Env::new()).unwrap();
        assert!(nu.mul(&nu).agrees_with(&parse("θ^3-θ-1", 3).unwrap().eval(&c, &Env::new()).unwrap()));
    }

    #[test]
    fn generator_constant() {
        let c = ctx(1);
        let v = parse("i^2 + 1", 3).unwrap().eval(&c, &Env::new()).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn module_refines_ramification() {
        let f = FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap();
        let defs = vec![("nu".to_string(), "sqrt(θ^3 - θ - 1, sign=1)".to_string())];
        let phi = build_module(f, 1, 40, &defs, &["nu^3 + nu".into(), "1".into()]).unwrap();
        assert_eq!(phi.ctx().e, 2);
        assert_eq!(phi.deg_coeff(1), Some(Q::new(9, 2)));
    }
}
