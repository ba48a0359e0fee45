use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use hsframe::certificates::{certify_decay, certify_finite, certify_parseval};
use hsframe::generate::{self, GenMode};
use hsframe::io::{fmt_f64, read_frame, serialize_frame, write_frame};
use hsframe::models::decay_example_lhs;
use hsframe::weaving::{sample_sweep, WeavingSweep};
use hsframe::{
    certify, classify, optimal_bounds, parseval_pair, shift_frame, soundness_check, sweep, weave,
    CMatrix, CertConfig, Certificate, CertifyRequest, Complex64, EpsChoice, HsFrame, Regime,
    ShiftFrameParams, SoundnessOptions, SoundnessReport, SweepOptions, TheoremId, WeavingSpec,
};

use crate::report::{num, to_value};
use crate::specs;
use crate::{CertArgs, Cli, Command, Done, ExampleName, GenModeArg, Status, Tolerances};

/// Dispatches a parsed command line.
pub fn execute(cli: &Cli, env_seed: Option<&str>) -> Result<Done> {
    let tol = &cli.tol;
    match &cli.command {
        Command::Analyze { file } => analyze(file, tol),
        Command::Certify {
            theorem,
            f,
            g,
            cert,
        } => certify_cmd(theorem, f, g, cert, tol),
        Command::Weave { f, g, sigma, out } => weave_cmd(f, g, sigma, out.as_deref()),
        Command::Brute {
            f,
            g,
            max_size,
            restrict_n,
            parallel,
            sample,
            seed,
            csv,
            check,
            cert,
        } => {
            let seed = match sample {
                Some(_) => Some(resolve_seed(*seed, env_seed)?),
                None => None,
            };
            brute(
                f,
                g,
                &BruteOptions {
                    max_size: *max_size,
                    restrict_n: *restrict_n,
                    parallel: *parallel,
                    sample: *sample,
                    seed,
                    csv: *csv,
                    check: check.as_deref(),
                    cert,
                },
                tol,
            )
        }
        Command::PaperExample {
            name,
            truncation,
            p,
            c,
            seed,
        } => {
            let seed = resolve_seed(*seed, env_seed)?;
            paper_example(*name, *truncation, *p, *c, seed, tol)
        }
        Command::Gen {
            seed,
            dim_h,
            dim_k,
            count,
            mode,
            base,
            eps,
            profile,
            out,
        } => {
            let seed = resolve_seed(*seed, env_seed)?;
            gen(
                &GenOptions {
                    seed,
                    dim_h: *dim_h,
                    dim_k: *dim_k,
                    count: *count,
                    mode: *mode,
                    base: base.as_deref(),
                    eps: *eps,
                    profile,
                },
                out.as_deref(),
            )
        }
    }
}

/// `HSFRAME_SEED` wins over `--seed`.
pub fn resolve_seed(flag: u64, env: Option<&str>) -> Result<u64> {
    match env {
        Some(text) => text
            .trim()
            .parse()
            .with_context(|| format!("HSFRAME_SEED: cannot parse {text:?} as an unsigned integer")),
        None => Ok(flag),
    }
}

fn config(tol: &Tolerances) -> CertConfig {
    CertConfig {
        tol_parseval: tol.tol_parseval,
        tol_psd: tol.tol_psd,
    }
}

fn load(path: &str) -> Result<HsFrame> {
    read_frame(path).with_context(|| format!("reading frame file {path}"))
}

fn ok(status: Status, result: Value) -> Result<Done> {
    Ok(Done {
        status,
        seed: None,
        result,
        raw_stdout: None,
        notice: None,
    })
}

fn cert_status(cert: &Certificate) -> Status {
    if cert.accepted {
        Status::Accepted
    } else {
        Status::Rejected
    }
}

pub fn analyze(file: &str, tol: &Tolerances) -> Result<Done> {
    let frame = load(file)?;
    let bounds = optimal_bounds(&frame)?;
    let class = classify(&frame, tol.tol_parseval)?;
    ok(
        Status::Ok,
        json!({
            "file": file,
            "dim_h": frame.dim_h(),
            "dim_k": frame.dim_k(),
            "count": frame.len(),
            "bounds": to_value(&bounds),
            "classification": to_value(&class),
            "condition_number": num(bounds.condition_number()),
        }),
    )
}

fn request(theorem: TheoremId, args: &CertArgs, len: usize) -> Result<CertifyRequest> {
    let weights = match (&args.weights, theorem) {
        (Some(spec), _) => Some(specs::parse_weights(spec, len)?),
        (None, TheoremId::Decay) => bail!("the decay certificate needs --weights"),
        (None, _) => None,
    };
    Ok(CertifyRequest {
        theorem,
        n: args.n,
        eps: specs::parse_eps(&args.eps)?,
        weights,
    })
}

fn certificate_value(cert: &Certificate) -> Value {
    let mut v = to_value(cert);
    if let Some(r) = &cert.rejection {
        v["verdict"] = Value::String(format!(
            "rejected: {} fails with lhs = {}, rhs = {}",
            r.inequality,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs)
        ));
    } else {
        v["verdict"] = Value::String("accepted".into());
    }
    v
}

pub fn certify_cmd(
    theorem: &str,
    f_path: &str,
    g_path: &str,
    args: &CertArgs,
    tol: &Tolerances,
) -> Result<Done> {
    let theorem = TheoremId::parse(theorem)?;
    let f = load(f_path)?;
    let g = load(g_path)?;
    f.check_compatible(&g)?;
    let req = request(theorem, args, g.len())?;
    let cert = certify(&f, &g, &req, &config(tol))?;
    ok(
        cert_status(&cert),
        json!({ "certificate": certificate_value(&cert) }),
    )
}

pub fn weave_cmd(f_path: &str, g_path: &str, sigma: &str, out: Option<&str>) -> Result<Done> {
    let f = load(f_path)?;
    let g = load(g_path)?;
    f.check_compatible(&g)?;
    let indices = specs::parse_sigma(sigma, f.len())?;
    let spec = WeavingSpec::from_indices(f.len(), &indices)?;
    let woven = weave(&f, &g, &spec)?;
    let bounds = optimal_bounds(&woven)?;
    if let Some(path) = out {
        write_frame(path, &woven)?;
    }
    ok(
        Status::Ok,
        json!({
            "sigma": spec.sigma().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "mask": spec.mask(),
            "bounds": to_value(&bounds),
            "out": out,
        }),
    )
}

pub struct BruteOptions<'a> {
    pub max_size: usize,
    pub restrict_n: Option<usize>,
    pub parallel: bool,
    pub sample: Option<usize>,
    pub seed: Option<u64>,
    pub csv: bool,
    pub check: Option<&'a str>,
    pub cert: &'a CertArgs,
}

/// Per-weaving bounds as CSV, one row per weaving in mask order.
pub fn sweep_csv(s: &WeavingSweep) -> String {
    let mut out = String::from("mask,sigma,cardinality,lower,upper\n");
    for r in &s.records {
        let sigma = WeavingSpec::from_mask(s.size, r.mask)
            .map(|w| {
                w.sigma()
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.mask,
            sigma,
            r.cardinality,
            fmt_f64(r.bounds.lower),
            fmt_f64(r.bounds.upper)
        ));
    }
    out
}

pub fn brute(f_path: &str, g_path: &str, opts: &BruteOptions, tol: &Tolerances) -> Result<Done> {
    let f = load(f_path)?;
    let g = load(g_path)?;
    f.check_compatible(&g)?;

    let cert = match opts.check {
        Some(name) => {
            let theorem = TheoremId::parse(name)?;
            let req = request(theorem, opts.cert, g.len())?;
            Some(certify(&f, &g, &req, &config(tol))?)
        }
        None => None,
    };
    if let Some(c) = cert.as_ref().filter(|c| !c.accepted) {
        return Ok(Done {
            status: Status::Rejected,
            seed: opts.seed,
            result: json!({
                "certificate": certificate_value(c),
                "check": "certificate rejected; nothing to cross-check",
            }),
            raw_stdout: None,
            notice: None,
        });
    }
    let class_n = cert.as_ref().and_then(|c| c.quantifier.restrict_n());
    let restrict_n = opts.restrict_n.or(class_n);

    let s = match opts.sample {
        Some(k) => sample_sweep(
            &f,
            &g,
            k,
            opts.seed.unwrap_or_default(),
            restrict_n,
            opts.parallel,
        )?,
        None => sweep(
            &f,
            &g,
            &SweepOptions {
                max_size: opts.max_size,
                restrict_n,
                parallel: opts.parallel,
            },
        )?,
    };

    let mut status = Status::Ok;
    let mut stderr_line = None;
    let mut check = Value::Null;
    if let (Some(c), Some(predicted)) = (&cert, cert.as_ref().and_then(|c| c.predicted)) {
        let in_class = s
            .records
            .iter()
            .filter(|r| class_n.is_none_or(|n| r.cardinality <= n));
        let (mut checked, mut violations) = (0usize, 0usize);
        let (mut worst_lower, mut worst_upper) = (f64::INFINITY, f64::NEG_INFINITY);
        for r in in_class {
            checked += 1;
            worst_lower = worst_lower.min(r.bounds.lower);
            worst_upper = worst_upper.max(r.bounds.upper);
            if !r.bounds.within(&predicted, tol.tol_sound) {
                violations += 1;
            }
        }
        let pass = violations == 0;
        status = if pass { Status::Pass } else { Status::Fail };
        let verdict = if pass { "PASS" } else { "FAIL" };
        let lower_tightness = worst_lower / predicted.lower;
        let upper_tightness = worst_upper / predicted.upper;
        stderr_line = Some(format!(
            "{verdict}: {} weavings, {violations} violations, tightness lower {} upper {}",
            checked,
            fmt_f64(lower_tightness),
            fmt_f64(upper_tightness)
        ));
        check = json!({
            "verdict": verdict,
            "certificate": certificate_value(c),
            "weavings_checked": checked,
            "violations": violations,
            "worst_lower": num(worst_lower),
            "worst_upper": num(worst_upper),
            "lower_tightness": num(lower_tightness),
            "upper_tightness": num(upper_tightness),
            "slack": num(tol.tol_sound),
        });
    }

    Ok(Done {
        status,
        seed: opts.seed,
        result: json!({ "sweep": to_value(&s), "check": check }),
        raw_stdout: opts.csv.then(|| sweep_csv(&s)),
        notice: stderr_line,
    })
}

fn row(quantity: &str, paper: Option<f64>, recomputed: f64, relation: &str) -> Value {
    let diff = paper.map(|p| (recomputed - p).abs());
    let holds = match (relation, paper) {
        ("<", Some(p)) => Some(recomputed < p),
        _ => None,
    };
    json!({
        "quantity": quantity,
        "relation": relation,
        "paper": paper.map(num),
        "recomputed": num(recomputed),
        "abs_diff": diff.map(num),
        "holds": holds,
    })
}

fn soundness_value(r: &SoundnessReport) -> Value {
    let mut v = to_value(r);
    v["verdict"] = Value::String(if r.pass { "PASS" } else { "FAIL" }.into());
    v
}

/// The synthetic pair for the finite example: `G` is the truncated shift
/// frame (bounds 1 and 2) and `F_i = G_i ∘ U` for a rotation `U` in the
/// `(e₁, e₂)` plane with `‖U − I‖ = eps`, so `B_F = B_G = 2` and every
/// `‖F_i − G_i‖ ≤ eps`.
pub fn finite_example_pair(truncation: usize, eps: f64) -> Result<(HsFrame, HsFrame)> {
    if !(eps > 0.0 && eps < 2.0) {
        bail!("rotation perturbation must lie in (0, 2), got {eps}");
    }
    let g = shift_frame(&ShiftFrameParams::new(truncation)?);
    let theta = 2.0 * (eps / 2.0).asin();
    let (s, c) = theta.sin_cos();
    let mut u = CMatrix::identity(truncation).into_inner();
    u[(0, 0)] = Complex64::new(c, 0.0);
    u[(0, 1)] = Complex64::new(-s, 0.0);
    u[(1, 0)] = Complex64::new(s, 0.0);
    u[(1, 1)] = Complex64::new(c, 0.0);
    let f = g.map_elements(|gi| gi.compose_right(&u))?;
    Ok((f, g))
}

const FINITE_N: usize = 3;
const FINITE_EPS: f64 = 0.1;
const FINITE_MARGIN_REFERENCE: f64 = 0.8485;

pub fn paper_example(
    name: ExampleName,
    truncation: Option<usize>,
    p: f64,
    c: f64,
    seed: u64,
    tol: &Tolerances,
) -> Result<Done> {
    let cfg = config(tol);
    let sound = SoundnessOptions {
        slack: tol.tol_sound,
        parallel: true,
        ..SoundnessOptions::default()
    };
    let (label, cert, rows, extra, seed_used, f, g) = match name {
        ExampleName::Finite => {
            let m = truncation.unwrap_or(4);
            if m < FINITE_N {
                bail!("the finite example needs truncation ≥ {FINITE_N}, got {m}");
            }
            let (f, g) = finite_example_pair(m, FINITE_EPS)?;
            let cert = certify_finite(
                &f,
                &g,
                Some(FINITE_N),
                EpsChoice::Explicit(FINITE_EPS),
                &cfg,
            )?;
            let d = |k: &str| cert.diagnostic(k).unwrap_or(f64::NAN);
            let rows = vec![
                row("A_G", Some(1.0), d("A_G"), "≈"),
                row("B_G", Some(2.0), d("B_G"), "≈"),
                row("B_F", Some(2.0), d("B_F"), "≈"),
                row(
                    "2Nε·max(√B_F, √B_G)",
                    Some(FINITE_MARGIN_REFERENCE),
                    d("margin"),
                    "≈",
                ),
                row("2Nε·max(√B_F, √B_G) < A_G", Some(1.0), d("margin"), "<"),
            ];
            let extra = json!({
                "N": FINITE_N,
                "eps": num(FINITE_EPS),
                "closed_form_margin": num(0.6 * 2f64.sqrt()),
            });
            ("finite", cert, rows, extra, None, f, g)
        }
        ExampleName::DecayPoly | ExampleName::DecayExp => {
            let m = truncation.unwrap_or(12);
            let (regime, paper_w) = if name == ExampleName::DecayPoly {
                let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
                (Regime::Poly { p }, (p == 1.0).then_some(zeta2))
            } else {
                let q = (-2.0 * c).exp();
                (Regime::Exp { c }, Some(q / (1.0 - q)))
            };
            let (a_g, b_g) = (1.0, 2.0);
            let w = regime.weight_sum()?;
            let eps = hsframe::feasible_epsilon(&regime, a_g, b_g)?;
            let (f, g, weights) = hsframe::models::decay_instance(&regime, m, eps, seed)?;
            let cert = certify_decay(&f, &g, &weights, EpsChoice::Explicit(eps), &cfg)?;
            let gb = optimal_bounds(&g)?;
            let lhs = decay_example_lhs(eps, w, b_g);
            let rows = vec![
                row("A_G", Some(a_g), gb.lower, "≈"),
                row("B_G", Some(b_g), gb.upper, "≈"),
                row("Σ 1/w_i²", paper_w, w, "≈"),
                row("ε√W(√(2(B_G + ε²W)) + √B_G) < A_G", Some(a_g), lhs, "<"),
            ];
            let extra = json!({
                "regime": to_value(&regime),
                "eps": num(eps),
                "truncation": m,
            });
            let label = if name == ExampleName::DecayPoly {
                "decay-poly"
            } else {
                "decay-exp"
            };
            (label, cert, rows, extra, Some(seed), f, g)
        }
        ExampleName::Parseval => {
            let m = truncation.unwrap_or(6);
            let (f, g) = parseval_pair(m)?;
            let cert = certify_parseval(&f, &g, &cfg)?;
            let predicted = cert
                .predicted
                .ok_or_else(|| anyhow!("the Parseval example certificate was rejected"))?;
            let rows = vec![
                row(
                    "δ",
                    Some(0.005),
                    cert.diagnostic("delta_min").unwrap_or(f64::NAN),
                    "≈",
                ),
                row("A = 1 − 2√(2δ)", Some(0.8), predicted.lower, "≈"),
                row("B = 1 + 2√(2δ)", Some(1.2), predicted.upper, "≈"),
            ];
            (
                "parseval",
                cert,
                rows,
                json!({ "truncation": m }),
                None,
                f,
                g,
            )
        }
    };

    let soundness = if cert.accepted {
        Some(soundness_check(&cert, &f, &g, &sound)?)
    } else {
        None
    };
    let status = match (&soundness, cert.accepted) {
        (Some(r), true) if r.pass => Status::Accepted,
        (Some(_), true) => Status::Fail,
        _ => Status::Rejected,
    };
    Ok(Done {
        status,
        seed: seed_used,
        result: json!({
            "example": label,
            "rows": rows,
            "parameters": extra,
            "certificate": certificate_value(&cert),
            "soundness": soundness.as_ref().map(soundness_value),
        }),
        raw_stdout: None,
        notice: None,
    })
}

pub struct GenOptions<'a> {
    pub seed: u64,
    pub dim_h: usize,
    pub dim_k: usize,
    pub count: usize,
    pub mode: GenModeArg,
    pub base: Option<&'a str>,
    pub eps: Option<f64>,
    pub profile: &'a str,
}

pub fn generate_frame(opts: &GenOptions) -> Result<HsFrame> {
    let mode = match opts.mode {
        GenModeArg::Bessel => GenMode::Bessel,
        GenModeArg::Frame => GenMode::Frame,
        GenModeArg::Parseval => GenMode::Parseval,
        GenModeArg::Perturb => {
            let base = opts
                .base
                .ok_or_else(|| anyhow!("--mode perturb needs --base"))?;
            let eps = opts
                .eps
                .ok_or_else(|| anyhow!("--mode perturb needs --eps"))?;
            let profile = specs::parse_profile(opts.profile)?;
            return Ok(generate::perturb(opts.seed, &load(base)?, eps, profile)?);
        }
    };
    Ok(generate::random_frame(
        opts.seed, opts.dim_h, opts.dim_k, opts.count, mode,
    )?)
}

pub fn gen(opts: &GenOptions, out: Option<&str>) -> Result<Done> {
    let frame = generate_frame(opts)?;
    let raw_stdout = match out {
        Some(path) => {
            write_frame(path, &frame)?;
            None
        }
        None => Some(serialize_frame(&frame)),
    };
    let bounds = optimal_bounds(&frame)?;
    Ok(Done {
        status: Status::Ok,
        seed: Some(opts.seed),
        result: json!({
            "out": out,
            "dim_h": frame.dim_h(),
            "dim_k": frame.dim_k(),
            "count": frame.len(),
            "bounds": to_value(&bounds),
        }),
        raw_stdout,
        notice: None,
    })
}
