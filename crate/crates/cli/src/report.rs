//! JSON encodings of library values.  Rationals are `[numerator, denominator]`
//! pairs; series are coefficient lists.

use serde_json::{json, Value};

use drinfeld_rat::drinfeld::{DrinfeldModule, RadiusData};
use drinfeld_rat::newton::{PolygonData, TorsionSelection};
use drinfeld_rat::rat::{DetB, Periods, Product, RatReport};
use drinfeld_rat::tate::{TateMatrix, TateSeries};
use drinfeld_rat::{Error, Laurent, Q};

pub fn rational(x: Q) -> Value {
    json!([x.numer(), x.denom()])
}

pub fn opt_rational(x: Option<Q>) -> Value {
    x.map_or(Value::Null, rational)
}

pub fn laurent(x: &Laurent) -> Value {
    let mut v = serde_json::to_value(x.to_json()).expect("laurent serializes");
    v["deg"] = opt_rational(x.deg());
    v
}

pub fn series(s: &TateSeries) -> Value {
    serde_json::to_value(s.to_json()).expect("series serializes")
}

pub fn matrix(m: &TateMatrix) -> Value {
    serde_json::to_value(m.to_json()).expect("matrix serializes")
}

pub fn module(phi: &DrinfeldModule) -> Value {
    json!({
        "r": phi.rank(),
        "e": phi.ctx().e,
        "A": phi.coeffs().iter().map(laurent).collect::<Vec<_>>(),
    })
}

pub fn radius(r: &RadiusData) -> Value {
    json!({
        "mu": r.mu.iter().map(|(n, m)| json!([n, rational(*m)])).collect::<Vec<_>>(),
        "m_star": r.m_star,
        "log_q_r_phi": rational(r.r_phi_logq),
    })
}

pub fn polygon(p: &PolygonData) -> Value {
    json!({
        "q": p.q,
        "d": p.d,
        "slopes": p.lambda.iter().map(|x| rational(*x)).collect::<Vec<_>>(),
        "intercepts": p.a.iter().map(|x| rational(*x)).collect::<Vec<_>>(),
        "vertices": p.vertices.iter().map(|(x, y)| json!([x, rational(*y)])).collect::<Vec<_>>(),
        "strict_degrees": p.strict_degrees().into_iter().map(rational).collect::<Vec<_>>(),
    })
}

pub fn torsion(sel: &TorsionSelection) -> Value {
    json!({
        "polygon": polygon(&sel.polygon),
        "x": sel.x.iter().map(laurent).collect::<Vec<_>>(),
        "N": sel.n,
        "N_j": sel.n_j,
        "chains": sel.chains.iter().map(|c| c.iter().map(laurent).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "xi": sel.xi.iter().map(laurent).collect::<Vec<_>>(),
    })
}

pub fn det_b(d: &DetB) -> Value {
    json!({
        "det_x": laurent(&d.det_x),
        "det_b": series(&d.det_b),
        "log_q_y": opt_rational(d.y_deg),
    })
}

pub fn product(p: &Product) -> Value {
    json!({
        "pi": matrix(&p.pi),
        "factors": p.factors,
        "skipped": p.skipped,
        "log_q_residual": opt_rational(p.residual_deg),
        "log_q_residual_bound": rational(p.residual_bound),
    })
}

pub fn periods(p: &Periods) -> Value {
    json!({
        "pi": p.pi.iter().map(laurent).collect::<Vec<_>>(),
        "eta": p.eta.iter().map(|row| row.iter().map(laurent).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn rat(rep: &RatReport) -> Value {
    json!({
        "module": module(&rep.phi),
        "torsion": torsion(&rep.sel),
        "theta": matrix(&rep.theta),
        "b": matrix(&rep.b),
        "det_b": det_b(&rep.det_b),
        "f": matrix(&rep.contraction.f),
        "log_q_delta": rational(rep.contraction.delta),
        "product": product(&rep.product),
        "periods": periods(&rep.periods),
    })
}

pub fn error(e: &Error) -> Value {
    json!({
        "class": e.class(),
        "message": e.to_string(),
        "hint": e.hint(),
    })
}
