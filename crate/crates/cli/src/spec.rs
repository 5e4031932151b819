//! Run descriptions read from `--spec FILE`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use drinfeld_rat::drinfeld::DrinfeldModule;
use drinfeld_rat::expr::build_module;
use drinfeld_rat::rat::RatConfig;
use drinfeld_rat::{Error, FieldParams, FiniteField, Result, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Polygon,
    Basis,
    Torsion,
    Rat,
    Periods,
    Verify,
    Carlitz,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub m: u32,
    #[serde(rename = "M", default = "one")]
    pub big_m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Def {
    pub name: String,
    pub expr: String,
}

/// Precision knobs.  `prec` is the relative precision in theta-degrees and
/// `epsilon` the exponent `N` of the target `epsilon = q^-N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Precision {
    pub prec: i64,
    pub t_trunc: usize,
    pub epsilon: i64,
    pub factor_budget: usize,
    pub newton_budget: usize,
}

impl Default for Precision {
    fn default() -> Self {
        let c = RatConfig::default();
        Precision {
            prec: 60,
            t_trunc: c.t_trunc,
            epsilon: -*c.epsilon_deg.numer(),
            factor_budget: c.factor_budget,
            newton_budget: c.newton_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub field: FieldSpec,
    /// Starting ramification index; refined automatically.
    #[serde(default = "one")]
    pub e: u32,
    /// Named values, evaluated in order, usable in `coeffs`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defs: Vec<Def>,
    /// Expressions for `A_1, ..., A_r`.
    pub coeffs: Vec<String>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn parse_runspec(text: &str) -> Result<RunSpec> {
    let spec: RunSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        pos: e.column(),
        msg: format!("line {}: {e}", e.line()),
    })?;
    if spec.coeffs.is_empty() {
        return Err(Error::Invalid("coeffs must list A_1..A_r".into()));
    }
    if spec.precision.prec < 1 || spec.precision.t_trunc == 0 {
        return Err(Error::Invalid("prec and t_trunc must be positive".into()));
    }
    Ok(spec)
}

impl RunSpec {
    pub fn rat_config(&self) -> RatConfig {
        RatConfig {
            t_trunc: self.precision.t_trunc,
            epsilon_deg: Q::from(-self.precision.epsilon),
            factor_budget: self.precision.factor_budget,
            newton_budget: self.precision.newton_budget,
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn field(&self) -> Result<std::sync::Arc<FiniteField>> {
        let params = FieldParams {
            p: self.field.p,
            m: self.field.m,
            big_m: self.field.big_m,
        };
        match &self.field.generator {
            Some(g) => FiniteField::with_generator_name(params, g),
            None => FiniteField::new(params),
        }
    }

    pub fn module(&self) -> Result<DrinfeldModule> {
        let defs: Vec<(String, String)> = self.defs.iter().map(|d| (d.name.clone(), d.expr.clone())).collect();
        build_module(self.field()?, self.e, self.precision.prec, &defs, &self.coeffs)
    }

    /// Run `f` on the module, enlarging `M` whenever a root is missing from
    /// the working field but present in a larger one.  Returns the spec
    /// actually used.
    pub fn with_module<T>(&self, mut f: impl FnMut(&DrinfeldModule) -> Result<T>) -> Result<(RunSpec, T)> {
        let mut spec = self.clone();
        loop {
            match f(&spec.module()?) {
                Err(Error::NoRoot { hint: Some(h), .. }) if h > spec.field.big_m => spec.field.big_m = h,
                Err(e) => return Err(e),
                Ok(v) => return Ok((spec, v)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_runspec(r#"{"field":{"p":3},"coeffs":["1"],"colour":1}"#).unwrap_err();
        assert_eq!(err.class(), "parse");
        let err = parse_runspec(r#"{"field":{"p":3,"q":9},"coeffs":["1"]}"#).unwrap_err();
        assert_eq!(err.class(), "parse");
    }

    #[test]
    fn defaults_fill_in() {
        let s = parse_runspec(r#"{"field":{"p":2},"coeffs":["θ","1"]}"#).unwrap();
        assert_eq!((s.field.m, s.field.big_m, s.e), (1, 1, 1));
        assert_eq!(s.precision, Precision::default());
        assert_eq!(s.module().unwrap().rank(), 2);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = parse_runspec(r#"{"field":{"p":2},"coeffs":["θ","1"]}"#).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.precision.t_trunc += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
