//! The subcommands. Each returns its rendered output and an exit code; only
//! the binary touches the process state.

use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use gheb_core::assembler::{analyze, Analysis, LevelReport};
use gheb_core::asymptotics::{AsymptoticContext, CertificateVerdict, GhebCertificate, PsiCurve};
use gheb_core::poly::{infimum_estimate, parse, to_star_form, Polynomial, StarForm};
use gheb_core::{Error, ToleranceConfig};

use crate::args::{Cli, Command, CommonArgs, Format};
use crate::report::AnalysisReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    /// I/O failure or an internal error.
    Failure = 1,
    /// Unreadable polynomial, flags or configuration.
    Parse = 2,
    /// Results exist but rest only on inconclusive evidence.
    Inconclusive = 3,
    /// A requested level lies below `inf f`.
    Infeasible = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// What a command produced. `output` is written even on a nonzero exit, so
/// inconclusive runs still leave a partial report behind.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub exit: Exit,
    /// Diagnostic for standard error.
    pub message: Option<String>,
}

impl Outcome {
    fn fail(exit: Exit, message: impl Into<String>) -> Self {
        Outcome {
            output: String::new(),
            exit,
            message: Some(message.into()),
        }
    }
}

fn exit_for(e: &Error) -> Exit {
    match e {
        Error::InfeasibleLevel { .. } => Exit::Infeasible,
        Error::Inconclusive(_) => Exit::Inconclusive,
        Error::Syntax { .. }
        | Error::UnknownVariable { .. }
        | Error::ConstantPolynomial
        | Error::UnsupportedDimension(_)
        | Error::Config(_) => Exit::Parse,
        _ => Exit::Failure,
    }
}

fn from_core(e: Error) -> Outcome {
    Outcome::fail(exit_for(&e), e.to_string())
}

pub fn load_polynomial(args: &CommonArgs) -> Result<Polynomial, Outcome> {
    let text = match (&args.poly, &args.poly_file) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| Outcome::fail(Exit::Parse, format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(Outcome::fail(Exit::Parse, "one of --poly or --poly-file is required")),
    };
    parse(text.trim()).map_err(from_core)
}

/// Defaults, then the `--config` file, then individual flags.
pub fn load_config(args: &CommonArgs) -> Result<ToleranceConfig, Outcome> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Outcome::fail(Exit::Parse, format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Outcome::fail(Exit::Parse, format!("bad configuration {}: {e}", path.display())))?
        }
        None => ToleranceConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.radius0 {
        cfg.radius0 = v;
    }
    if let Some(v) = args.radius_growth {
        cfg.radius_growth = v;
    }
    if let Some(v) = args.radius_steps {
        cfg.radius_steps = v;
    }
    if let Some(v) = args.grad_tol {
        cfg.grad_tol = v;
    }
    if let Some(v) = args.cluster_tol {
        cfg.cluster_tol = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = v;
    }
    if let Some(v) = args.m_offset {
        cfg.m_offset = v;
    }
    cfg.validate().map_err(from_core)?;
    Ok(cfg)
}

fn require_levels(args: &CommonArgs, name: &str) -> Result<(), Outcome> {
    if args.t.is_empty() {
        Err(Outcome::fail(Exit::Parse, format!("{name} needs at least one --t level")))
    } else {
        Ok(())
    }
}

/// Runs a command inside a pool sized by `--threads`.
pub fn run(cli: &Cli) -> Outcome {
    let args = cli.command.common();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Outcome::fail(Exit::Parse, "--threads must be positive");
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(Exit::Failure, format!("cannot start worker pool: {e}")),
    };
    pool.install(|| {
        let result = match &cli.command {
            Command::Analyze(a) => cmd_analyze(a).map(|(r, exit)| finish_report(&r, exit, a.format)),
            Command::Classify(a) => cmd_classify(a),
            Command::Verify(a) => cmd_verify(a),
            Command::Psi(a) => cmd_psi(a),
        };
        result.unwrap_or_else(|o| o)
    })
}

fn finish_report(report: &AnalysisReport, exit: Exit, format: Option<Format>) -> Outcome {
    match format.unwrap_or(Format::Json) {
        Format::Json => Outcome {
            output: report.to_json() + "\n",
            exit,
            message: (exit == Exit::Inconclusive).then(|| "every piece of H(f) is inconclusive".to_string()),
        },
        Format::Csv => Outcome::fail(Exit::Parse, "analyze writes json only; use psi for csv curves"),
    }
}

/// Star form and asymptotic context for level-wise commands.
struct Setup {
    star: StarForm,
    cfg: ToleranceConfig,
    poly: Polynomial,
}

impl Setup {
    fn new(args: &CommonArgs) -> Result<Self, Outcome> {
        let poly = load_polynomial(args)?;
        let cfg = load_config(args)?;
        if poly.is_constant() {
            return Err(from_core(Error::ConstantPolynomial));
        }
        let star = to_star_form(&poly, cfg.seed).map_err(from_core)?;
        Ok(Setup { star, cfg, poly })
    }

    fn context(&self) -> AsymptoticContext<'_> {
        AsymptoticContext::new(&self.star, infimum_estimate(&self.poly, &self.cfg), &self.cfg)
    }
}

/// Psi curves and certificates at the feasible requested levels.
fn level_artifacts(ctx: &AsymptoticContext, levels: &[f64]) -> Result<(Vec<PsiCurve>, Vec<GhebCertificate>), Error> {
    let mut curves = Vec::new();
    let mut certs = Vec::new();
    for &t in levels {
        if ctx.check_level(t).is_err() {
            continue;
        }
        let psi = ctx.psi_curve(t)?;
        certs.push(ctx.gheb_certificate_with(t, &psi)?);
        curves.push(psi);
    }
    Ok((curves, certs))
}

pub fn cmd_analyze(args: &CommonArgs) -> Result<(AnalysisReport, Exit), Outcome> {
    let start = Instant::now();
    let setup = Setup::new(args)?;
    let analysis: Analysis = analyze(&setup.poly, &setup.cfg, &args.t).map_err(from_core)?;
    let (curves, certs) = if args.t.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        level_artifacts(&setup.context(), &args.t).map_err(from_core)?
    };
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = AnalysisReport::new(&analysis, &setup.cfg, curves, certs, total_ms);
    let exit = if analysis.levels.iter().any(|l| l.snapped_to.is_none()) {
        Exit::Infeasible
    } else if report.inconclusive {
        Exit::Inconclusive
    } else {
        Exit::Ok
    };
    Ok((report, exit))
}

fn confidence(l: &LevelReport) -> &'static str {
    if l.estimated {
        "estimated"
    } else {
        "confirmed"
    }
}

pub fn cmd_classify(args: &CommonArgs) -> Result<Outcome, Outcome> {
    require_levels(args, "classify")?;
    let poly = load_polynomial(args)?;
    let cfg = load_config(args)?;
    let analysis = analyze(&poly, &cfg, &args.t).map_err(from_core)?;
    let infeasible = analysis.levels.iter().any(|l| l.label.is_none());
    let output = match args.format.unwrap_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&analysis.levels).expect("levels serialize") + "\n",
        Format::Csv => {
            let mut out = String::from("level,label,confidence\n");
            for l in &analysis.levels {
                match l.label {
                    Some(label) => {
                        let _ = writeln!(out, "{},{},{}", l.level, label, confidence(l));
                    }
                    None => {
                        let _ = writeln!(out, "{},,infeasible", l.level);
                    }
                }
            }
            out
        }
    };
    let exit = if infeasible {
        Exit::Infeasible
    } else if analysis.is_inconclusive() {
        Exit::Inconclusive
    } else {
        Exit::Ok
    };
    let message = infeasible.then(|| {
        let errs: Vec<&str> = analysis.levels.iter().filter_map(|l| l.error.as_deref()).collect();
        errs.join("; ")
    });
    Ok(Outcome { output, exit, message })
}

pub fn cmd_verify(args: &CommonArgs) -> Result<Outcome, Outcome> {
    require_levels(args, "verify")?;
    let setup = Setup::new(args)?;
    let ctx = setup.context();
    let certs = args
        .t
        .iter()
        .map(|&t| ctx.gheb_certificate(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(from_core)?;
    let output = match args.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&certs).expect("certificates serialize") + "\n",
        Format::Csv => return Err(Outcome::fail(Exit::Parse, "verify writes json only")),
    };
    let all_inconclusive = certs
        .iter()
        .all(|c| matches!(c.verdict, CertificateVerdict::Inconclusive { .. }));
    Ok(Outcome {
        output,
        exit: if all_inconclusive { Exit::Inconclusive } else { Exit::Ok },
        message: None,
    })
}

pub fn cmd_psi(args: &CommonArgs) -> Result<Outcome, Outcome> {
    require_levels(args, "psi")?;
    let setup = Setup::new(args)?;
    let ctx = setup.context();
    let curves = args
        .t
        .iter()
        .map(|&t| ctx.psi_curve(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(from_core)?;
    let output = match args.format.unwrap_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&curves).expect("curves serialize") + "\n",
        Format::Csv => curves.iter().map(PsiCurve::to_csv).collect::<Vec<_>>().join("\n"),
    };
    Ok(Outcome {
        output,
        exit: Exit::Ok,
        message: None,
    })
}
