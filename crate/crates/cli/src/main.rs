mod report;
mod spec;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use drinfeld_rat::newton::{build_xi, moore_certificate};
use drinfeld_rat::rat::{carlitz_reference, legendre_ratio, period_log_oracle, run};
use drinfeld_rat::{Error, Result};

use spec::{parse_runspec, Command, FieldSpec, Precision, RunSpec};

#[derive(Parser)]
#[command(name = "drat", version, about = "Rigid analytic trivializations of Drinfeld modules")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Run description (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Truncation order in t.
    #[arg(long, global = true)]
    t_trunc: Option<usize>,
    /// Relative precision of coefficients, in theta-degrees.
    #[arg(long, global = true)]
    prec: Option<i64>,
    /// Target Gauss precision, as `q^-N` or `N`.
    #[arg(long, global = true, value_parser = parse_epsilon)]
    epsilon: Option<i64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Compact output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Newton polygon and radius data.
    Polygon,
    /// Strict basis of the t-torsion.
    Basis,
    /// Basis, division chains and xi_j.
    Torsion,
    /// Full report: Theta, B, F, the product Pi and periods.
    Rat,
    /// Periods and quasi-periods with oracle cross-checks.
    Periods,
    /// Property checks on the spec module or a seeded random one.
    Verify {
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Carlitz module against the classical period and omega.
    Carlitz {
        #[arg(long)]
        q: u64,
    },
}

impl Cmd {
    fn command(self) -> Command {
        match self {
            Cmd::Polygon => Command::Polygon,
            Cmd::Basis => Command::Basis,
            Cmd::Torsion => Command::Torsion,
            Cmd::Rat => Command::Rat,
            Cmd::Periods => Command::Periods,
            Cmd::Verify { .. } => Command::Verify,
            Cmd::Carlitz { .. } => Command::Carlitz,
        }
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<i64, String> {
    let n = s.strip_prefix("q^-").unwrap_or(s);
    n.parse::<i64>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("expected q^-N or N with N > 0, got {s}"))
}

/// Result of one command: the payload, the spec actually used, stopping
/// diagnostics and the names of failed checks.
struct Outcome {
    result: Value,
    spec: RunSpec,
    stop: Value,
    failures: Vec<String>,
}

fn load_spec(cli: &Cli, cmd: Command) -> Result<RunSpec> {
    let path = cli
        .spec
        .as_ref()
        .ok_or_else(|| Error::Invalid("this command needs --spec FILE".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let mut spec = parse_runspec(&text)?;
    if spec.command.is_some_and(|c| c != cmd) {
        return Err(Error::Invalid(format!(
            "spec is for {:?}, not {cmd:?}",
            spec.command.unwrap()
        )));
    }
    spec.command = Some(cmd);
    apply_flags(cli, &mut spec);
    Ok(spec)
}

fn apply_flags(cli: &Cli, spec: &mut RunSpec) {
    let p = &mut spec.precision;
    if let Some(t) = cli.t_trunc {
        p.t_trunc = t;
    }
    if let Some(v) = cli.prec {
        p.prec = v;
    }
    if let Some(n) = cli.epsilon {
        p.epsilon = n;
    }
    if cli.seed.is_some() {
        spec.seed = cli.seed;
    }
}

fn stop_info(rep: &drinfeld_rat::rat::RatReport) -> Value {
    json!({
        "e": rep.phi.ctx().e,
        "log_q_delta": report::rational(rep.contraction.delta),
        "factors": rep.product.factors,
        "skipped": rep.product.skipped,
        "log_q_residual_bound": report::rational(rep.product.residual_bound),
    })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cmd = cli.cmd.command();
    match cli.cmd {
        Cmd::Polygon => {
            let spec = load_spec(cli, cmd)?;
            let phi = spec.module()?;
            let poly = drinfeld_rat::newton::PolygonData::new(&phi);
            Ok(Outcome {
                result: json!({
                    "module": report::module(&phi),
                    "polygon": report::polygon(&poly),
                    "radius": report::radius(&phi.radius()),
                }),
                stop: json!({"e": phi.ctx().e}),
                spec,
                failures: Vec::new(),
            })
        }
        Cmd::Basis | Cmd::Torsion => {
            let spec = load_spec(cli, cmd)?;
            let budget = spec.precision.newton_budget;
            let (spec, (phi, sel)) = spec.with_module(|phi| build_xi(phi, budget))?;
            let result = if matches!(cli.cmd, Cmd::Basis) {
                let det = moore_certificate(&sel.x)?;
                json!({
                    "x": sel.x.iter().map(report::laurent).collect::<Vec<_>>(),
                    "slopes": sel.polygon.lambda.iter().map(|x| report::rational(*x)).collect::<Vec<_>>(),
                    "moore_det": report::laurent(&det),
                })
            } else {
                report::torsion(&sel)
            };
            Ok(Outcome {
                result,
                stop: json!({"e": phi.ctx().e, "N": sel.n}),
                spec,
                failures: Vec::new(),
            })
        }
        Cmd::Rat => {
            let spec = load_spec(cli, cmd)?;
            let cfg = spec.rat_config();
            let (spec, rep) = spec.with_module(|phi| run(phi, &cfg))?;
            Ok(Outcome {
                result: report::rat(&rep),
                stop: stop_info(&rep),
                spec,
                failures: Vec::new(),
            })
        }
        Cmd::Periods => {
            let spec = load_spec(cli, cmd)?;
            let cfg = spec.rat_config();
            let (spec, rep) = spec.with_module(|phi| run(phi, &cfg))?;
            let logs = period_log_oracle(&rep.phi, &rep.sel)?;
            let agree: Vec<bool> = rep.periods.pi.iter().zip(&logs).map(|(a, b)| a.agrees_with(b)).collect();
            let legendre = legendre(&rep);
            let mut failures: Vec<String> = agree
                .iter()
                .enumerate()
                .filter(|(_, &ok)| !ok)
                .map(|(j, _)| format!("pi_{} vs theta^N log(xi_{})", j + 1, j + 1))
                .collect();
            if legendre.get("constant") == Some(&json!(false)) {
                failures.push("Legendre ratio is constant".into());
            }
            Ok(Outcome {
                result: json!({
                    "N": rep.sel.n,
                    "xi": rep.sel.xi.iter().map(report::laurent).collect::<Vec<_>>(),
                    "periods": report::periods(&rep.periods),
                    "log_oracle_agrees": agree,
                    "legendre": legendre,
                }),
                stop: stop_info(&rep),
                spec,
                failures,
            })
        }
        Cmd::Verify { rank } => verify_cmd(cli, rank),
        Cmd::Carlitz { q } => carlitz_cmd(cli, q),
    }
}

/// `(pi_1 eta_2 - pi_2 eta_1)/pi_tilde` in rank 2, when the `(q-1)`-th root of
/// `-theta` is available in the working field.
fn legendre(rep: &drinfeld_rat::rat::RatReport) -> Value {
    if rep.phi.rank() != 2 {
        return Value::Null;
    }
    let ctx = rep.phi.ctx();
    let t = rep.product.pi.t_trunc();
    let root = match ctx.theta().neg().nth_root(ctx.q() - 1, None) {
        Ok(r) => r,
        Err(e) => return json!({"unavailable": report::error(&e)}),
    };
    let sign = root.sign();
    match carlitz_reference(ctx, t, Some(sign)).and_then(|(pt, _)| legendre_ratio(&rep.periods.pi, &rep.periods.eta[0], &pt)) {
        Ok(ratio) => json!({
            "root_sign": ctx.field.format(sign),
            "ratio": report::laurent(&ratio),
            "constant": true,
        }),
        Err(e) => json!({"constant": false, "error": report::error(&e)}),
    }
}

fn verify_cmd(cli: &Cli, rank: usize) -> Result<Outcome> {
    let (spec, rep, rejected) = if cli.spec.is_some() {
        let spec = load_spec(cli, Command::Verify)?;
        let cfg = spec.rat_config();
        let (spec, rep) = spec.with_module(|phi| run(phi, &cfg))?;
        (spec, rep, 0)
    } else {
        if !(1..=4).contains(&rank) {
            return Err(Error::Invalid(format!("rank {rank} outside 1..=4")));
        }
        let seed = cli.seed.unwrap_or(0);
        let (mut spec, rep, rejected) = verify::random_module_spec(seed, rank, |s| apply_flags(cli, s))?;
        spec.command = Some(Command::Verify);
        (spec, rep, rejected)
    };
    let checks = verify::checks(&rep);
    let failures: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    Ok(Outcome {
        result: json!({
            "module": report::module(&rep.phi),
            "rejected_draws": rejected,
            "checks": checks.iter().map(verify::Check::to_json).collect::<Vec<_>>(),
        }),
        stop: stop_info(&rep),
        spec,
        failures,
    })
}

/// `(p, m)` with `q = p^m`.
fn prime_power(q: u64) -> Result<(u64, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or_else(|| Error::Invalid(format!("q = {q} is not a prime power")))?;
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    if r != 1 {
        return Err(Error::Invalid(format!("q = {q} is not a prime power")));
    }
    Ok((p, m))
}

fn carlitz_cmd(cli: &Cli, q: u64) -> Result<Outcome> {
    let (p, m) = prime_power(q)?;
    // the (q-1)-th roots of -1 lie in F_{q^2}
    let mut spec = RunSpec {
        field: FieldSpec {
            p,
            m,
            big_m: if p == 2 { 1 } else { 2 },
            generator: None,
        },
        e: 1,
        defs: Vec::new(),
        coeffs: vec!["1".into()],
        precision: Precision::default(),
        command: Some(Command::Carlitz),
        seed: None,
    };
    apply_flags(cli, &mut spec);
    let cfg = spec.rat_config();
    let (spec, rep) = spec.with_module(|phi| run(phi, &cfg))?;
    let ctx = rep.phi.ctx();
    let t = cfg.t_trunc;
    let (pi_tilde, omega) = carlitz_reference(ctx, t, None)?;
    let pi = &rep.periods.pi[0];
    let f = &ctx.field;
    // our basis vector is one F_q^x multiple of the classical one
    let c = f.div(pi_tilde.sign(), pi.sign()).ok().filter(|&c| f.in_base_field(c));
    let (period_ok, omega_ok, residue_ok) = match c {
        Some(c) => {
            let pi_c = rep.product.pi.get(0, 0).scale(c);
            let res = rep.entries[0].residue_at_theta()?.scale(c);
            (
                pi.scale(c).agrees_with(&pi_tilde),
                pi_c.agrees_with(&omega),
                res.agrees_with(&pi_tilde.neg()),
            )
        }
        None => (false, false, false),
    };
    Ok(Outcome {
        result: json!({
            "q": q,
            "pi_tilde": report::laurent(&pi_tilde),
            "omega": report::series(&omega),
            "pi": report::laurent(pi),
            "product": report::series(rep.product.pi.get(0, 0)),
            "scalar": c.map(|c| f.format(c)),
            "checks": {
                "period": period_ok,
                "omega": omega_ok,
                "residue": residue_ok,
            },
        }),
        stop: stop_info(&rep),
        spec,
        failures: [("period", period_ok), ("omega", omega_ok), ("residue", residue_ok)]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.to_string())
            .collect(),
    })
}

fn provenance(spec: &RunSpec, stop: Value) -> Value {
    json!({
        "tool": "drat",
        "version": env!("CARGO_PKG_VERSION"),
        "spec_sha256": spec.hash(),
        "spec": spec,
        "field": {"p": spec.field.p, "m": spec.field.m, "M": spec.field.big_m},
        "prec": spec.precision.prec,
        "t_trunc": spec.precision.t_trunc,
        "log_q_epsilon": -spec.precision.epsilon,
        "stopping": stop,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = serde_json::to_value(cli.cmd.command()).expect("command serializes");
    let (doc, code) = match execute(&cli) {
        Ok(out) => {
            let ok = out.failures.is_empty();
            let code = if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
            let failures: Vec<Value> = out
                .failures
                .iter()
                .map(|n| json!({"class": "check-failed", "message": n, "hint": null}))
                .collect();
            (
                json!({
                    "command": name,
                    "ok": ok,
                    "failures": failures,
                    "result": out.result,
                    "provenance": provenance(&out.spec, out.stop),
                }),
                code,
            )
        }
        Err(e) => (
            json!({
                "command": name,
                "ok": false,
                "failures": [report::error(&e)],
            }),
            ExitCode::from(1),
        ),
    };
    let text = if cli.pretty {
        serde_json::to_string_pretty(&doc)
    } else {
        serde_json::to_string(&doc)
    };
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("report serializes"));
    code
}
