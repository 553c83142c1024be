use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;

use skew_puiseux::factorizer::{
    newton_puiseux_factor, sigma_zero, sigma_zero_quadratic, verify_factorization, FactorConfig,
    Factorization,
};
use skew_puiseux::hensel::{hensel_lift, HenselConfig};
use skew_puiseux::parse::{
    format_linear, format_poly, format_series, parse_alpha, parse_poly_in, parse_series,
};
use skew_puiseux::puiseux::{PuiseuxSeries, SkewContext};
use skew_puiseux::scalar::{lcm_u32, parse_rational, Rational, DEFAULT_BITS};
use skew_puiseux::skew_poly::{evaluate, left_divmod, poly_mul, poly_ram, SkewPoly};
use skew_puiseux::Error;

#[derive(Parser, Debug)]
#[command(
    name = "skewfactor",
    version,
    about = "Factor skew polynomials over Puiseux series fields"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Multiplier of the automorphism x^q -> alpha^q x^q.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Target order in x, a rational.
    #[arg(long, global = true, default_value = "10")]
    prec: String,
    /// Scalar precision in bits.
    #[arg(long, global = true, env = "SKEWFACTOR_BITS", default_value_t = DEFAULT_BITS)]
    bits: usize,
    #[arg(long = "ramification-cap", global = true, default_value_t = 256)]
    ramification_cap: u32,
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Override the residue root tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Derivation parameter a of delta_a(b) = a (sigma(b) - b), as a series.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Deterministic mode; always on.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Factor into linear factors (t - c_1)...(t - c_d).
    Factor { poly: String },
    /// A right zero of the polynomial.
    SigmaZero {
        poly: String,
        /// Use the coefficient recursion for monic quadratics.
        #[arg(long)]
        quadratic: bool,
    },
    /// Evaluate at a series.
    Eval {
        poly: String,
        #[arg(long)]
        at: String,
    },
    /// Product of two polynomials.
    Mul { left: String, right: String },
    /// Left division f = q p + r.
    Divmod { poly: String, divisor: String },
    /// Lift a residue factorization f = g h.
    Hensel {
        poly: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Check f = (t - c_1)...(t - c_d) for zeros separated by ';'.
    Verify {
        poly: String,
        #[arg(long)]
        zeros: String,
    },
}

enum Failure {
    Usage(String),
    Math(Error),
    Internal(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Domain(_)
            | Error::NotMonic
            | Error::ContextMismatch(_)
            | Error::NegativeOrder { .. } => Failure::Usage(e.to_string()),
            e if e.is_obstruction() => Failure::Math(e),
            e => Failure::Internal(e),
        }
    }
}

fn read_arg(s: &str) -> Result<String, Failure> {
    if s == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        Ok(buf.trim().to_string())
    } else {
        Ok(s.to_string())
    }
}

fn order_str(q: &Rational) -> String {
    q.to_string()
}

struct Env {
    ctx: SkewContext,
    target: Rational,
    bits: usize,
}

fn ring(g: &Global, allow_complex: bool) -> Result<Env, Failure> {
    let text = g
        .alpha
        .as_deref()
        .ok_or_else(|| Failure::Usage("--alpha is required".into()))?;
    let alpha = parse_alpha(text, g.bits, allow_complex).map_err(|e| match e {
        Error::Domain(m) => Failure::Usage(format!(
            "{m}; complex alpha is accepted by sigma-zero and eval only"
        )),
        e => Failure::from(e),
    })?;
    let target = parse_rational(&g.prec)
        .ok_or_else(|| Failure::Usage(format!("--prec: not a rational: {}", g.prec)))?;
    if target <= Rational::from_integer(0.into()) {
        return Err(Failure::Usage("--prec must be positive".into()));
    }
    let mut ctx = SkewContext::plain(alpha);
    ctx.bits = g.bits;
    if let Some(d) = &g.delta {
        let a = parse_series(d, g.bits)?;
        ctx = ctx.with_a(a);
    }
    Ok(Env {
        ctx,
        target,
        bits: g.bits,
    })
}

fn poly(env: &Env, text: &str) -> Result<SkewPoly<PuiseuxSeries>, Failure> {
    let f = parse_poly_in(&env.ctx, &read_arg(text)?)?;
    Ok(f.trimmed(&env.ctx))
}

fn widen(env: &Env, ps: &[&SkewPoly<PuiseuxSeries>]) -> SkewContext {
    let ram = ps
        .iter()
        .fold(lcm_u32(env.ctx.ram, env.ctx.a.ram()), |acc, p| {
            lcm_u32(acc, poly_ram(p))
        });
    env.ctx.with_ram(ram)
}

fn factor_config(g: &Global, env: &Env) -> FactorConfig {
    let mut cfg = FactorConfig::new(env.bits, env.target.clone());
    cfg.max_ramification = g.ramification_cap;
    if let Some(t) = g.tol {
        cfg.root_tol = t;
    }
    cfg
}

#[derive(Serialize)]
struct FactorOut {
    factors: Vec<String>,
    zeros: Vec<String>,
    unit: String,
    residual: f64,
    order: String,
    exact: bool,
    complete: bool,
    ramification: u32,
    iso_trail: Vec<String>,
}

fn factor_out(fac: &Factorization) -> FactorOut {
    FactorOut {
        factors: fac.factors.iter().map(format_linear).collect(),
        zeros: fac.factors.iter().map(|z| format_series(z, true)).collect(),
        unit: format_series(&fac.unit, false),
        residual: fac.residual,
        order: order_str(&fac.precision),
        exact: fac.exact,
        complete: fac.complete,
        ramification: fac.ramification,
        iso_trail: fac.iso_trail.iter().map(|r| r.summary()).collect(),
    }
}

#[derive(Serialize)]
struct ZeroOut {
    zero: String,
    check_ord: Option<String>,
    method: &'static str,
}

#[derive(Serialize)]
struct HenselOut {
    g_hat: String,
    h_hat: String,
    achieved_order: Option<String>,
    exact: bool,
    corrections: usize,
}

#[derive(Serialize)]
struct VerifyOut {
    deviation: f64,
    order: Option<String>,
    check_ord: Option<String>,
}

#[derive(Serialize)]
struct ErrorOut {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("serializable output")
        );
    } else {
        println!("{}", text());
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Factor { poly: p } => {
            let env = ring(g, false)?;
            let f = poly(&env, p)?;
            if env.ctx.has_delta() {
                return Err(Failure::Usage(
                    "factor works in the ring without derivation".into(),
                ));
            }
            let fac = newton_puiseux_factor(&widen(&env, &[&f]), &f, &factor_config(g, &env))?;
            let out = factor_out(&fac);
            emit(g.json, &out, || {
                let mut s = String::new();
                if out.unit != "1" {
                    s.push_str(&format!("unit: {}\n", out.unit));
                }
                s.push_str(
                    &out.factors
                        .iter()
                        .map(|f| format!("({f})"))
                        .collect::<Vec<_>>()
                        .join(" * "),
                );
                s.push_str(&format!(
                    "\nresidual: {:e}\norder: {}{}",
                    out.residual,
                    out.order,
                    if out.exact { " (exact)" } else { "" }
                ));
                if !out.complete {
                    s.push_str("\nwarning: iteration budget exhausted, trailing factors are truncated expansions");
                }
                s
            });
        }
        Cmd::SigmaZero { poly: p, quadratic } => {
            let env = ring(g, true)?;
            let f = poly(&env, p)?;
            let ctx = widen(&env, &[&f]);
            let cfg = factor_config(g, &env);
            let use_quadratic = *quadratic || !env.ctx.alpha.is_positive_real();
            let (z, check, method) = if use_quadratic {
                let z = sigma_zero_quadratic(&ctx, &f, &cfg)?;
                let ev = evaluate(&ctx.with_ram(lcm_u32(ctx.ram, z.ram())), &f, &z);
                let ord = ev.significant_ord(
                    cfg.zero_eps * f.coeffs.iter().map(|c| c.max_abs()).fold(1.0, f64::max),
                );
                let check = match (ord, ev.trunc_q()) {
                    (Some(o), Some(t)) => Some(o.min(t)),
                    (o, t) => o.or(t),
                };
                (z, check, "quadratic")
            } else {
                let (z, fac) = sigma_zero(&ctx, &f, &cfg)?;
                (z, fac.check_ord, "factor")
            };
            let out = ZeroOut {
                zero: format_series(&z, true),
                check_ord: check.as_ref().map(order_str),
                method,
            };
            emit(g.json, &out, || {
                format!(
                    "{}\ncheck order: {}",
                    out.zero,
                    out.check_ord.clone().unwrap_or_else(|| "exact".into())
                )
            });
        }
        Cmd::Eval { poly: p, at } => {
            let env = ring(g, true)?;
            let f = poly(&env, p)?;
            let c = parse_series(&read_arg(at)?, env.bits)?;
            let ctx = widen(&env, &[&f]).with_ram(lcm_u32(widen(&env, &[&f]).ram, c.ram()));
            let v = evaluate(&ctx, &f, &c);
            let s = format_series(&v, true);
            emit(g.json, &serde_json::json!({ "value": s }), || s.clone());
        }
        Cmd::Mul { left, right } => {
            let env = ring(g, true)?;
            let (a, b) = (poly(&env, left)?, poly(&env, right)?);
            let ctx = widen(&env, &[&a, &b]);
            let s = format_poly(&poly_mul(&ctx, &a, &b).trimmed(&ctx), true);
            emit(g.json, &serde_json::json!({ "product": s }), || s.clone());
        }
        Cmd::Divmod { poly: p, divisor } => {
            let env = ring(g, true)?;
            let (f, d) = (poly(&env, p)?, poly(&env, divisor)?);
            let ctx = widen(&env, &[&f, &d]);
            let (q, r) = left_divmod(&ctx, &f, &d)?;
            let (qs, rs) = (
                format_poly(&q.trimmed(&ctx), true),
                format_poly(&r.trimmed(&ctx), true),
            );
            emit(
                g.json,
                &serde_json::json!({ "quotient": qs, "remainder": rs }),
                || format!("quotient: {qs}\nremainder: {rs}"),
            );
        }
        Cmd::Hensel {
            poly: p,
            g: gt,
            h: ht,
        } => {
            let env = ring(g, false)?;
            let (f, gp, hp) = (poly(&env, p)?, poly(&env, gt)?, poly(&env, ht)?);
            let ctx = widen(&env, &[&f, &gp, &hp]);
            let units = (&env.target * Rational::from_integer(ctx.ram.into()))
                .ceil()
                .to_integer()
                .to_i64()
                .unwrap_or(i64::MAX);
            let mut cfg = HenselConfig::for_bits(env.bits);
            if let Some(t) = g.tol {
                cfg.residue_tol = t;
            }
            let out = hensel_lift(&ctx, &f, &gp, &hp, units, &cfg)?;
            let achieved = out
                .achieved
                .map(|k| Rational::new(k.into(), ctx.ram.into()));
            let o = HenselOut {
                g_hat: format_poly(&out.g, true),
                h_hat: format_poly(&out.h, true),
                achieved_order: achieved.as_ref().map(order_str),
                exact: out.achieved.is_none(),
                corrections: out.corrections,
            };
            emit(g.json, &o, || {
                format!(
                    "g: {}\nh: {}\norder: {}",
                    o.g_hat,
                    o.h_hat,
                    o.achieved_order.clone().unwrap_or_else(|| "exact".into())
                )
            });
        }
        Cmd::Verify { poly: p, zeros } => {
            let env = ring(g, false)?;
            let f = poly(&env, p)?;
            let zs = read_arg(zeros)?
                .split(';')
                .map(|s| parse_series(s.trim(), env.bits))
                .collect::<Result<Vec<_>, _>>()?;
            let d = f.coeffs.len().saturating_sub(1);
            let fac = Factorization {
                factors: zs,
                unit: f
                    .coeffs
                    .get(d)
                    .cloned()
                    .unwrap_or_else(|| PuiseuxSeries::zero(env.bits)),
                residual: 0.0,
                iso_trail: Vec::new(),
                precision: env.target.clone(),
                exact: false,
                check_ord: None,
                ramification: 1,
                complete: true,
            };
            let cfg = factor_config(g, &env);
            let rep = verify_factorization(&widen(&env, &[&f]), &f, &fac, cfg.zero_eps);
            let o = VerifyOut {
                deviation: rep.deviation,
                order: rep.precision.as_ref().map(order_str),
                check_ord: rep.check_ord.as_ref().map(order_str),
            };
            emit(g.json, &o, || {
                format!(
                    "deviation: {:e}\norder: {}\ncheck order: {}",
                    o.deviation,
                    o.order.clone().unwrap_or_else(|| "exact".into()),
                    o.check_ord.clone().unwrap_or_else(|| "exact".into())
                )
            });
        }
    }
    Ok(())
}

fn report(json: bool, e: &Error, kind: &'static str) {
    let (n, q, witness) = match e {
        Error::TwistCoprimeFailed { n, witness } => (Some(*n), None, Some(witness.clone())),
        Error::Obstruction { q } => (None, Some(q.to_string()), None),
        _ => (None, None, None),
    };
    let out = ErrorOut {
        error: kind,
        message: e.to_string(),
        n,
        q,
        witness,
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializable output")
        );
    } else {
        eprintln!("error: {e}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Math(e)) => {
            let kind = match e {
                Error::TwistCoprimeFailed { .. } => "twist_coprime_failed",
                _ => "obstruction",
            };
            report(cli.global.json, &e, kind);
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            report(cli.global.json, &e, "internal");
            ExitCode::from(3)
        }
    }
}
