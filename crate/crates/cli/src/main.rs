use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use qrevert::expr::parse_expr;
use qrevert::inversion::{build_context, f1_forward, f1_inverse, FuncSpec};
use qrevert::quadint::{
    closed_integral, closed_integral_log, closed_integral_oracle, endpoint, quad_oracle, LogWeight,
    QuadraticPowerIntegral,
};
use qrevert::rational::Rational;
use qrevert::realanalog::{
    f1_real_cross, preimage_gap, preimage_gap_oracle, s_residual, sqrt_model_fit,
    sqrt_model_residual, LFunction, RealConstants, RealContext, RealPoint,
};
use qrevert::specfun::{
    appell_f1, e_map, eta, gamma_fn, hyp2f1, inc_beta, k_r, lambert_w, mstar, rogers_ramanujan,
    theta2, theta3, LambertBranch, Nome, UpperHalfPoint,
};
use qrevert::verify::{emit_report, run_suite, Status};

const ORACLE_TOL: f64 = 1e-12;
const L_ANCHORS: [f64; 3] = [0.8, 1.6, 3.2];

#[derive(Parser)]
#[command(
    name = "qrevert",
    version,
    about = "Series reversion, special functions and identity checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reversion coefficients c_n of w = q f(w) and a_n = n c_n.
    Revert {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 24)]
        order: usize,
        /// Evaluate w at this q ("RE,IM").
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// w, P and y at a point of the upper half-plane.
    Context {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 24)]
        order: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Evaluate a special function.
    Special {
        #[arg(long = "fn", value_enum)]
        func: SpecialFn,
        /// Arguments in order; complex values as "RE,IM" (a negative
        /// complex value needs the `--arg=RE,IM` form).
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        arg: Vec<String>,
        /// Lambert W branch: 0 or -1.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        branch: i32,
    },
    /// The F1 pair.
    F1 {
        #[arg(long, value_enum)]
        mode: F1Mode,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Closed form of the quadratic-power integral between beta_r endpoints.
    Integral {
        #[arg(long, allow_hyphen_values = true)]
        a1: String,
        #[arg(long, allow_hyphen_values = true)]
        b1: String,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        /// Exponent as a literal P/Q in (0, 1).
        #[arg(long)]
        m: String,
        /// Endpoint parameters; "inf" selects the root.
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        /// Weight P0 for the logarithmic form.
        #[arg(long)]
        f1: Option<String>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Real analog on the line q = exp(-pi sqrt(A)).
    Real {
        #[arg(long, value_enum)]
        op: RealOp,
        #[arg(long, default_value = "exp(A)")]
        f: String,
        #[arg(long, default_value_t = 48)]
        order: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// Additive constant of h_i.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        a1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<f64>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
    },
    /// Run the identity checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecialFn {
    Gamma,
    Eta,
    Theta2,
    Theta3,
    Mstar,
    Kr,
    Rr,
    Lambert,
    IncBeta,
    Hyp2f1,
    AppellF1,
}

#[derive(Clone, Copy, ValueEnum)]
enum F1Mode {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum RealOp {
    Hi,
    #[value(name = "L")]
    L,
    #[value(name = "S")]
    S,
    #[value(name = "thm19")]
    PreimageGap,
    #[value(name = "thm20")]
    SqrtModel,
    F1cross,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Classical,
    Paper,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Classical => "classical",
            Suite::Paper => "paper",
            Suite::All => "all",
        }
    }
}

enum Failure {
    Usage(String),
    Compute(qrevert::Error),
}

impl From<qrevert::Error> for Failure {
    fn from(e: qrevert::Error) -> Self {
        Failure::Compute(e)
    }
}

type Out = Result<ExitCode, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn real_num(s: &str) -> Result<f64, Failure> {
    s.trim()
        .parse()
        .or_else(|_| usage(format!("not a number: `{s}`")))
}

fn complex(s: &str) -> Result<C64, Failure> {
    match s.split_once(',') {
        Some((r, i)) => Ok(C64::new(real_num(r)?, real_num(i)?)),
        None => Ok(C64::new(real_num(s)?, 0.0)),
    }
}

fn rational(s: &str) -> Result<Rational, Failure> {
    s.parse()
        .or_else(|e| usage(format!("bad exponent `{s}`: {e}")))
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_c(z: C64) -> String {
    format!("{},{}", fmt(z.re), fmt(z.im))
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
    match run(cli.cmd) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Revert { f, order, q } => revert(&f, order, q.as_deref()),
        Cmd::Context { f, order, c, z } => context(&f, order, &c, &z),
        Cmd::Special { func, arg, branch } => special(func, &arg, branch),
        Cmd::F1 { mode, x } => {
            let x = complex(&x)?;
            let v = match mode {
                F1Mode::Forward => f1_forward(x)?,
                F1Mode::Inverse => f1_inverse(x)?,
            };
            println!("{}", fmt_c(v));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Integral {
            a1,
            b1,
            c1,
            m,
            r1,
            r2,
            f1,
            c,
            oracle,
        } => {
            let q = QuadraticPowerIntegral::new(
                complex(&a1)?,
                complex(&b1)?,
                complex(&c1)?,
                rational(&m)?,
            )?;
            integral(&q, r1, r2, f1.as_deref(), complex(&c)?, oracle)
        }
        Cmd::Real {
            op,
            f,
            order,
            a,
            x,
            c,
            a1,
            b1,
            c1,
            m,
            r1,
            r2,
        } => {
            let ctx = RealContext::new(&FuncSpec::parse(&f, order)?, order)?.with_constants(
                RealConstants {
                    c,
                    ..Default::default()
                },
            );
            let need = |v: Option<f64>, name: &str| {
                v.map_or_else(|| usage(format!("--{name} is required")), Ok)
            };
            match op {
                RealOp::Hi => {
                    let p = RealPoint::new(need(a, "a")?)?;
                    println!("hi {}", fmt(ctx.hi_of(p)));
                    println!("hi_prime {}", fmt(ctx.hi_prime(p)?));
                }
                RealOp::L => {
                    let (lf, _) = LFunction::fit(&ctx, &L_ANCHORS)?;
                    println!("L {}", fmt(lf.l(need(x, "x")?)?));
                    println!("offset {}", fmt(lf.offset()));
                }
                RealOp::S => {
                    let (lf, _) = LFunction::fit(&ctx, &L_ANCHORS)?;
                    let xv = match (x, a) {
                        (Some(x), _) => x,
                        (None, Some(a)) => ctx.hi_of(RealPoint::new(a)?),
                        _ => return usage("--x or --a is required"),
                    };
                    let s = s_residual(&ctx, &lf, xv)?;
                    println!("x {}", fmt(s.x));
                    println!("lhs {}", fmt(s.lhs));
                    println!("rhs {}", fmt(s.rhs));
                    println!("residual {}", fmt(s.residual));
                }
                RealOp::PreimageGap => {
                    let q = QuadraticPowerIntegral::real(
                        need(a1, "a1")?,
                        need(b1, "b1")?,
                        need(c1, "c1")?,
                        rational(m.as_deref().unwrap_or("1/2"))?,
                    )?;
                    let (r1, r2) = (need(r1, "r1")?, need(r2, "r2")?);
                    let (lf, _) = LFunction::fit(&ctx, &L_ANCHORS)?;
                    let v = preimage_gap(&ctx, &q, r1, r2)?;
                    let o = preimage_gap_oracle(&lf, &q, r1, r2, ORACLE_TOL)?;
                    println!("value {}", fmt(v));
                    println!("oracle {}", fmt(o));
                    println!("abs_err {}", fmt((v - o).abs()));
                }
                RealOp::SqrtModel => {
                    let xs = |v: &[f64]| -> Result<Vec<f64>, Failure> {
                        v.iter()
                            .map(|&a| Ok(ctx.hi_of(RealPoint::new(a)?)))
                            .collect()
                    };
                    let h = |x: f64| ctx.hi_inverse(x);
                    let fit = sqrt_model_fit(&ctx, &h, &xs(&[0.8, 1.5, 3.0])?, (-0.5, 0.5))?;
                    println!("l1 {}", fmt(fit.l1));
                    println!("sign {}", fit.sign);
                    println!("base {}", fmt(fit.base));
                    println!("offset {}", fmt(fit.offset));
                    for (a, x) in [1.0, 2.0, 2.5].into_iter().zip(xs(&[1.0, 2.0, 2.5])?) {
                        println!(
                            "residual A={a} {}",
                            fmt(sqrt_model_residual(&ctx, &h, &fit, x)?)
                        );
                    }
                }
                RealOp::F1cross => {
                    let (u, v) = f1_real_cross(need(a, "a")?)?;
                    println!("f1 {}", fmt(u));
                    println!("rogers_ramanujan {}", fmt(v));
                    println!("abs_err {}", fmt((u - v).abs()));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { suite, tol, json } => {
            let report = run_suite(suite.name(), tol);
            for c in &report.checks {
                let status = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Recorded => "recorded",
                    Status::Skipped => "skipped",
                };
                println!(
                    "{status:<8} {:?} {:<45} err {} tol {:.1e}",
                    c.tier,
                    c.id,
                    fmt(c.max_abs_error),
                    c.tolerance
                );
            }
            if let Some(path) = json {
                emit_report(&report, &path)?;
            }
            let failed = report.tier_a_failures();
            if failed > 0 {
                eprintln!("{failed} Tier A check(s) failed");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn revert(f: &str, order: usize, q: Option<&str>) -> Out {
    if order == 0 {
        return usage("--order must be positive");
    }
    let spec = FuncSpec::parse(f, order)?;
    let ctx = build_context(&spec, order)?;
    for n in 1..=order {
        println!(
            "{n} c {} a {}",
            fmt_c(ctx.w_series().coeff(n)),
            fmt_c(ctx.a()[n - 1])
        );
    }
    if let Some(q) = q {
        let q = complex(q)?;
        let v = ctx.w_series().eval(q);
        println!("w {}", fmt_c(v.value));
        println!("tail {}", fmt(v.tail));
    }
    Ok(ExitCode::SUCCESS)
}

fn context(f: &str, order: usize, c: &str, z: &str) -> Out {
    let ctx = build_context(&FuncSpec::parse(f, order)?, order)?.with_c(complex(c)?);
    let z = UpperHalfPoint::new(complex(z)?)?;
    let q = e_map(z).q();
    println!("q {}", fmt_c(q));
    println!("w {}", fmt_c(ctx.w(q)));
    println!("P {}", fmt_c(ctx.p_of_z(z)?));
    println!("y {}", fmt_c(ctx.y_of(z)?));
    Ok(ExitCode::SUCCESS)
}

fn special(func: SpecialFn, args: &[String], branch: i32) -> Out {
    let arity = match func {
        SpecialFn::IncBeta => 3,
        SpecialFn::Hyp2f1 => 4,
        SpecialFn::AppellF1 => 6,
        _ => 1,
    };
    if args.len() != arity {
        return usage(format!(
            "expected {arity} --arg value(s), got {}",
            args.len()
        ));
    }
    let z = |k: usize| complex(&args[k]);
    let x = |k: usize| real_num(&args[k]);
    let v = match func {
        SpecialFn::Gamma => gamma_fn(z(0)?)?,
        SpecialFn::Eta => eta(UpperHalfPoint::new(z(0)?)?),
        SpecialFn::Theta2 => theta2(Nome::new(z(0)?)?),
        SpecialFn::Theta3 => theta3(Nome::new(z(0)?)?),
        SpecialFn::Mstar => mstar(UpperHalfPoint::new(z(0)?)?),
        SpecialFn::Kr => C64::new(k_r(x(0)?)?, 0.0),
        SpecialFn::Rr => rogers_ramanujan(Nome::new(z(0)?)?),
        SpecialFn::Lambert => {
            let b = match branch {
                0 => LambertBranch::Principal,
                -1 => LambertBranch::Minus1,
                _ => return usage("--branch must be 0 or -1"),
            };
            lambert_w(z(0)?, b)?
        }
        SpecialFn::IncBeta => inc_beta(z(0)?, x(1)?, x(2)?)?,
        SpecialFn::Hyp2f1 => hyp2f1(x(0)?, x(1)?, x(2)?, z(3)?)?,
        SpecialFn::AppellF1 => appell_f1(x(0)?, x(1)?, x(2)?, x(3)?, z(4)?, z(5)?)?,
    };
    println!("{}", fmt_c(v));
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct IntegralOut {
    value_re: f64,
    value_im: f64,
    oracle_re: Option<f64>,
    oracle_im: Option<f64>,
    abs_err: Option<f64>,
    branch_phase: f64,
}

fn integral(
    q: &QuadraticPowerIntegral,
    r1: f64,
    r2: f64,
    p0: Option<&str>,
    c: C64,
    oracle: bool,
) -> Out {
    let (value, reference) = match p0 {
        None => {
            let v = closed_integral(q, r1, r2)?;
            let o = if oracle {
                Some(closed_integral_oracle(q, r1, r2, ORACLE_TOL)?.value)
            } else {
                None
            };
            (v, o)
        }
        Some(src) => {
            if r1.is_infinite() || r2.is_infinite() {
                return usage("the weighted form needs finite --r1 and --r2");
            }
            let w = LogWeight {
                q: *q,
                p0: parse_expr(src)?,
                c,
            };
            let z = |r: f64| C64::new(0.0, r.sqrt());
            let v = closed_integral_log(&w, z(r1), z(r2))?;
            let o = if oracle {
                let failure = std::cell::RefCell::new(None);
                let res = quad_oracle(
                    |t| {
                        w.integrand(t).unwrap_or_else(|e| {
                            failure.borrow_mut().get_or_insert(e);
                            C64::new(f64::NAN, 0.0)
                        })
                    },
                    endpoint(q, r1)?,
                    endpoint(q, r2)?,
                    ORACLE_TOL,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e.into());
                }
                Some(res?.value)
            } else {
                None
            };
            (v, o)
        }
    };
    let out = IntegralOut {
        value_re: value.re,
        value_im: value.im,
        oracle_re: reference.map(|o| o.re),
        oracle_im: reference.map(|o| o.im),
        abs_err: reference.map(|o| (o - value).norm()),
        branch_phase: q.branch_phase(),
    };
    let out = serde_json::to_string(&out).expect("plain struct serialises");
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}
