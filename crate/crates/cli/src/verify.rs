//! Property checks on one module, and seeded random modules to run them on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use drinfeld_rat::drinfeld::DrinfeldModule;
use drinfeld_rat::newton::{moore_certificate, rank2_table};
use drinfeld_rat::rat::{
    b_n_by_partitions, closed_form_matrix, period_log_oracle, quasi_period_oracle, upsilon_oracle, RatReport,
};
use drinfeld_rat::tate::TateMatrix;
use drinfeld_rat::{Error, Laurent, Result, Q};

use crate::report::{opt_rational, rational};
use crate::spec::{FieldSpec, Precision, RunSpec};

const BN_MAX: usize = 6;
const BN_T: usize = 4;
const EXP_LOG_ORDER: usize = 3;
const RANDOM_DRAWS: usize = 64;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: Value,
    pub bound: Value,
}

impl Check {
    pub fn to_json(&self) -> Value {
        json!({"name": self.name, "pass": self.pass, "measured": self.measured, "bound": self.bound})
    }
}

fn prec_floor(x: &Laurent) -> Value {
    if x.is_exact() {
        Value::Null
    } else {
        rational(x.prec_deg())
    }
}

fn agree(name: String, a: &Laurent, b: &Laurent) -> Check {
    Check {
        name,
        pass: a.agrees_with(b),
        measured: opt_rational(a.sub(b).deg()),
        bound: prec_floor(&a.sub(b)),
    }
}

fn agree_matrix(name: &str, a: &TateMatrix, b: &TateMatrix) -> Check {
    let diff = a.sub(b);
    let floor = diff.entries().iter().map(|s| s.worst_prec_deg()).max();
    Check {
        name: name.into(),
        pass: a.agrees_with(b),
        measured: opt_rational(diff.norm_deg()),
        bound: opt_rational(floor),
    }
}

fn failed(name: &str, e: &Error) -> Check {
    Check {
        name: name.into(),
        pass: false,
        measured: json!(e.to_string()),
        bound: Value::Null,
    }
}

/// Every invariant of one finished run.
pub fn checks(rep: &RatReport) -> Vec<Check> {
    let phi = &rep.phi;
    let t = rep.product.pi.t_trunc();
    let mut out = Vec::new();
    let delta = rep.contraction.delta;
    out.push(Check {
        name: "contraction: log_q ||F - I|| < 0".into(),
        pass: delta < Q::from(0),
        measured: rational(delta),
        bound: rational(Q::from(0)),
    });
    let p = &rep.product;
    out.push(Check {
        name: "frobenius equation: ||Pi^(1) - Theta Pi|| within the tail bound".into(),
        pass: p.residual_deg.is_none_or(|d| d <= p.residual_bound),
        measured: opt_rational(p.residual_deg),
        bound: rational(p.residual_bound),
    });
    match closed_form_matrix(&rep.entries) {
        Ok(m) => out.push(agree_matrix("product vs entrywise closed form", &p.pi, &m)),
        Err(e) => out.push(failed("product vs entrywise closed form", &e)),
    }
    match upsilon_oracle(phi, &rep.periods.pi, t) {
        Ok(m) => out.push(agree_matrix("product vs generating-function matrix", &p.pi, &m)),
        Err(e) => out.push(failed("product vs generating-function matrix", &e)),
    }
    match period_log_oracle(phi, &rep.sel) {
        Ok(logs) => {
            for (j, (a, b)) in rep.periods.pi.iter().zip(&logs).enumerate() {
                out.push(agree(format!("pi_{} vs theta^N log(xi_{})", j + 1, j + 1), a, b));
            }
        }
        Err(e) => out.push(failed("periods vs logarithm", &e)),
    }
    for (i, row) in rep.periods.eta.iter().enumerate() {
        for (j, pj) in rep.periods.pi.iter().enumerate() {
            let name = format!("eta_{},{} vs partial fractions", i + 1, j + 1);
            match quasi_period_oracle(phi, pj, i as u32 + 1) {
                Ok(v) => out.push(agree(name, &row[j], &v)),
                Err(e) => out.push(failed(&name, &e)),
            }
        }
    }
    let r_phi = phi.radius().r_phi_logq;
    let d1 = rep.periods.pi[0].deg();
    out.push(Check {
        name: "|pi_1| = R_phi".into(),
        pass: d1 == Some(r_phi),
        measured: opt_rational(d1),
        bound: rational(r_phi),
    });
    match moore_certificate(&rep.sel.x) {
        Ok(det) => out.push(Check {
            name: "Moore determinant of the basis".into(),
            pass: !det.is_zero(),
            measured: opt_rational(det.deg()),
            bound: Value::Null,
        }),
        Err(e) => out.push(failed("Moore determinant of the basis", &e)),
    }
    let db = &rep.det_b;
    out.push(Check {
        name: "det B = det X + y t with |y| < |det X|".into(),
        pass: db.y_deg.is_none_or(|y| Some(y) < db.det_x.deg()),
        measured: opt_rational(db.y_deg),
        bound: opt_rational(db.det_x.deg()),
    });
    if phi.rank() == 2 {
        // A_1 = 0 lands in the first case of the table
        let d_a1 = phi.deg_coeff(1).unwrap_or(Q::from(i64::MIN / 4));
        let (n, e1, e2) = rank2_table(phi.q(), d_a1, phi.deg_coeff(2).unwrap());
        let got = (rep.sel.n, rep.sel.xi[0].deg(), rep.sel.xi[1].deg());
        out.push(Check {
            name: "rank-2 table: N, deg xi_1, deg xi_2".into(),
            pass: got == (n, Some(e1), Some(e2)),
            measured: json!([got.0, opt_rational(got.1), opt_rational(got.2)]),
            bound: json!([n, rational(e1), rational(e2)]),
        });
    }
    out.push(b_n_check(phi));
    out.push(exp_log_check(phi));
    out
}

fn b_n_check(phi: &DrinfeldModule) -> Check {
    let name = "B_n recursion vs shadowed partitions";
    let run = || -> Result<Option<usize>> {
        let rec = phi.b_n_rational(BN_MAX, BN_T)?;
        for (n, b) in rec.iter().enumerate() {
            if !b.agrees_with(&b_n_by_partitions(phi, n, BN_T)?) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(bad) => Check {
            name: name.into(),
            pass: bad.is_none(),
            measured: json!(bad),
            bound: json!(BN_MAX),
        },
        Err(e) => failed(name, &e),
    }
}

fn exp_log_check(phi: &DrinfeldModule) -> Check {
    let name = "exp o log = log o exp = id";
    let run = || -> Result<Option<usize>> {
        let data = phi.exp_log_coeffs(EXP_LOG_ORDER)?;
        let ctx = phi.ctx();
        for n in 1..=EXP_LOG_ORDER {
            let (mut el, mut le) = (ctx.zero(), ctx.zero());
            for i in 0..=n {
                el = el.add(&data.alpha[i].mul(&data.beta[n - i].try_frobenius(i as u32)?));
                le = le.add(&data.beta[i].mul(&data.alpha[n - i].try_frobenius(i as u32)?));
            }
            if !(el.is_zero() && le.is_zero()) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(bad) => Check {
            name: name.into(),
            pass: bad.is_none(),
            measured: json!(bad),
            bound: json!(EXP_LOG_ORDER),
        },
        Err(e) => failed(name, &e),
    }
}

/// `c_2 θ^2 + c_1 θ + c_0` with a nonzero leading coefficient.
fn random_poly(rng: &mut ChaCha8Rng, p: u64) -> String {
    let deg = rng.gen_range(0..=2usize);
    let mut parts = Vec::new();
    for k in (0..=deg).rev() {
        let c = if k == deg { rng.gen_range(1..p) } else { rng.gen_range(0..p) };
        if c == 0 {
            continue;
        }
        parts.push(match k {
            0 => format!("{c}"),
            1 => format!("{c}*θ"),
            _ => format!("{c}*θ^{k}"),
        });
    }
    parts.join(" + ")
}

/// Random rank-`r` module over `F_2` or `F_3`.  `A_i` for `i < r` is zero a
/// quarter of the time.
pub fn random_spec(rng: &mut ChaCha8Rng, rank: usize) -> RunSpec {
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    let coeffs = (1..=rank)
        .map(|i| {
            let poly = random_poly(rng, p);
            if i < rank && rng.gen_bool(0.25) {
                "0".to_string()
            } else {
                poly
            }
        })
        .collect();
    RunSpec {
        field: FieldSpec {
            p,
            m: 1,
            big_m: 1,
            generator: None,
        },
        e: 1,
        defs: Vec::new(),
        coeffs,
        precision: Precision {
            prec: 24,
            t_trunc: 6,
            ..Precision::default()
        },
        command: None,
        seed: None,
    }
}

/// First seeded draw whose torsion has a finite expansion within the field
/// limits, with the number of draws rejected before it.
pub fn random_module_spec(seed: u64, rank: usize, adjust: impl Fn(&mut RunSpec)) -> Result<(RunSpec, RatReport, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for rejected in 0..RANDOM_DRAWS {
        let mut spec = random_spec(&mut rng, rank);
        spec.seed = Some(seed);
        adjust(&mut spec);
        let cfg = spec.rat_config();
        match spec.with_module(|phi| drinfeld_rat::rat::run(phi, &cfg)) {
            Ok((spec, rep)) => return Ok((spec, rep, rejected)),
            Err(Error::WildRamification { .. } | Error::NoRoot { hint: None, .. } | Error::FieldTooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::BudgetExhausted { budget: RANDOM_DRAWS })
}
