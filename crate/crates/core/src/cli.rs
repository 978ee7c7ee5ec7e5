//! Command-line front end. `run` parses arguments, dispatches one command and
//! returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, or a decision that came out true |
//! | 1 | malformed input or a violated precondition |
//! | 2 | numerical failure |
//! | 3 | decision false / no common complement |
//! | 4 | invalid certificate or involution |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{to_json, to_text, PairInput};
use crate::kernel::TolerancePolicy;
use crate::relpos::{classify, has_common_complement, m_sided_angles, principal_angles, CrossChecks};
use crate::sampling::Sampler;
use crate::truncated::{self, ExampleName, ShiftWindow};
use crate::witness::{self, GraphForm};

/// Environment variable naming the default tolerance profile.
pub const PROFILE_ENV: &str = "COCOMP_TOL_PROFILE";

#[derive(Debug, Parser)]
#[command(name = "cocomp", version, about = "Common complements of subspace pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Cone / spectral parameter in (0, 1); defaults to half the sum-closedness margin.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Relative rank tolerance.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Angle tolerance (radians).
    #[arg(long, global = true)]
    tol_angle: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write a re-checkable input document (M, N and the constructed K or S) here.
    #[arg(long, global = true)]
    emit_certificate: Option<PathBuf>,
    /// Seed for the sampling command.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Corner dimensions, principal angles and position flags.
    Classify { input: PathBuf },
    /// Principal angles (both one-sided lists and the shared part).
    Angles { input: PathBuf },
    /// Whether M and N have a common complement, with every cross-check.
    Decide { input: PathBuf },
    /// Construct a common complement with its certificate.
    Complement { input: PathBuf },
    /// Verify that K is a common complement of M and N.
    Certify { input: PathBuf },
    /// Graph form of the pair (over K when given).
    GraphForm {
        input: PathBuf,
        #[arg(long, conflicts_with_all = ["antisymmetric", "contraction"])]
        zero_form: bool,
        #[arg(long, conflicts_with = "contraction")]
        antisymmetric: bool,
        #[arg(long)]
        contraction: bool,
    },
    /// Involution exchanging M and N (along K when given).
    Involution { input: PathBuf },
    /// Common complement ker(S + I) from an involution S.
    FromInvolution { input: PathBuf },
    /// Common complement from an isomorphism U: M -> N with bound C.
    FromIsomorphism { input: PathBuf },
    /// Split off M ∩ N.
    Reduce { input: PathBuf },
    /// Whether the orthogonal complement of M complements both subspaces.
    OrthoComplementCheck { input: PathBuf },
    /// Companion N1 of M1 ⊆ M and the lower-bound constant.
    ClosedCompanion { input: PathBuf },
    /// Finite truncation of one of the built-in examples.
    Example {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Shift-triple window: symmetric or asymmetric.
        #[arg(long, default_value = "symmetric")]
        variant: String,
    },
    /// Seeded random pair as an input document.
    Sample {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        equal_dims: bool,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(Outcome { text, code }) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            eprintln!("cocomp: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Precondition(_) => 1,
        Error::Numerical(_) => 2,
        Error::NoComplement(_) => 3,
        Error::InvalidCertificate(_) | Error::InvalidInvolution(_) => 4,
    }
}

struct Outcome {
    text: String,
    code: i32,
}

fn render<T: Serialize>(cli: &Cli, value: &T, code: i32) -> Result<Outcome> {
    let text = match cli.format {
        Format::Json => to_json(value)?,
        Format::Text => to_text(value)?,
    };
    Ok(Outcome { text, code })
}

fn load(path: &Path) -> Result<PairInput> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    PairInput::parse(&text)
}

fn tolerances(cli: &Cli, input: Option<&PairInput>) -> Result<TolerancePolicy> {
    let base = match std::env::var(PROFILE_ENV) {
        Ok(name) if !name.is_empty() => TolerancePolicy::profile(&name)?,
        _ => TolerancePolicy::default(),
    };
    let mut tol = match input.and_then(|i| i.tolerances.as_ref()) {
        Some(o) => o.apply(base)?,
        None => base,
    };
    if let Some(v) = cli.tol_rank {
        tol.rank_rel = v;
    }
    if let Some(v) = cli.tol_angle {
        tol.angle_tol = v;
    }
    tol.validate()?;
    Ok(tol)
}

fn emit(cli: &Cli, doc: &PairInput) -> Result<()> {
    if let Some(path) = &cli.emit_certificate {
        fs::write(path, to_json(doc)?).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AnglesReport {
    principal_angles: Vec<f64>,
    m_sided: Vec<f64>,
    n_sided: Vec<f64>,
}

#[derive(Serialize)]
struct DecisionReport {
    decision: bool,
    dim_m: usize,
    dim_n: usize,
    checks: CrossChecks,
}

#[derive(Serialize)]
struct GraphReport {
    kind: &'static str,
    form: GraphForm,
    residual_m: f64,
    residual_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    injectivity_margin: Option<f64>,
}

#[derive(Serialize)]
struct ReduceReport {
    reduced: witness::ReducedPair,
    decision: bool,
    reduced_decision: bool,
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Classify { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            render(cli, &classify(&m, &n, &tol)?, 0)
        }
        Command::Angles { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let report = AnglesReport {
                principal_angles: principal_angles(&m, &n)?,
                m_sided: m_sided_angles(&m, &n)?,
                n_sided: m_sided_angles(&n, &m)?,
            };
            render(cli, &report, 0)
        }
        Command::Decide { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let epsilon = cli.epsilon.or(doc.epsilon);
            let (decision, checks) = has_common_complement(&m, &n, epsilon, &tol)?;
            let report = DecisionReport {
                decision,
                dim_m: m.dim(),
                dim_n: n.dim(),
                checks,
            };
            render(cli, &report, if decision { 0 } else { 3 })
        }
        Command::Complement { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let cert = witness::common_complement(&m, &n, &tol)?;
            emit(cli, &PairInput::from_subspaces(&[("M", &m), ("N", &n), ("K", &cert.k)]))?;
            render(cli, &cert, 0)
        }
        Command::Certify { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n, k) = (
                doc.require("M", &tol)?,
                doc.require("N", &tol)?,
                doc.require("K", &tol)?,
            );
            render(cli, &witness::verify_common_complement(&m, &n, &k, &tol)?, 0)
        }
        Command::GraphForm {
            input,
            zero_form,
            antisymmetric,
            contraction,
        } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let k = doc.subspace("K", &tol)?;
            let (kind, form, margin) = if *contraction {
                let c = witness::contraction_graph_form(&m, &n, &tol)?;
                ("contraction", c.form, Some(c.injectivity_margin))
            } else if *antisymmetric {
                let f = match &k {
                    Some(k) => witness::antisymmetric_graph_form_along(&m, &n, k, &tol)?,
                    None => witness::antisymmetric_graph_form(&m, &n, &tol)?,
                };
                ("antisymmetric", f, None)
            } else if *zero_form {
                let f = match &k {
                    Some(k) => witness::zero_graph_form_along(&m, &n, k, &tol)?,
                    None => witness::zero_graph_form(&m, &n, &tol)?,
                };
                ("zero", f, None)
            } else {
                let k = k.ok_or_else(|| {
                    Error::Input("graph-form needs K, or one of --zero-form, --antisymmetric, --contraction".into())
                })?;
                ("pair", witness::graph_pair_form(&m, &n, &k, &tol)?, None)
            };
            let (residual_m, residual_n) = form.residuals(&m, &n, &tol)?;
            let report = GraphReport {
                kind,
                form,
                residual_m,
                residual_n,
                injectivity_margin: margin,
            };
            render(cli, &report, 0)
        }
        Command::Involution { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let cert = match doc.subspace("K", &tol)? {
                Some(k) => witness::involution_for_pair_along(&m, &n, &k, &tol)?,
                None => witness::involution_for_pair(&m, &n, &tol)?,
            };
            let mut out = PairInput::from_subspaces(&[("M", &m), ("N", &n)]);
            out.s = Some(cert.s.to_rows());
            emit(cli, &out)?;
            render(cli, &cert, 0)
        }
        Command::FromInvolution { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let cert = witness::complement_from_involution(&m, &n, &doc.s_matrix()?, &tol)?;
            emit(cli, &PairInput::from_subspaces(&[("M", &m), ("N", &n), ("K", &cert.k)]))?;
            render(cli, &cert, 0)
        }
        Command::FromIsomorphism { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let c = doc
                .c
                .ok_or_else(|| Error::Input("constant `C` is required for this command".into()))?;
            let cert = witness::projection_from_isomorphism(&m, &n, &doc.u_matrix()?, c, &tol)?;
            emit(cli, &PairInput::from_subspaces(&[("M", &m), ("N", &n), ("K", &cert.k)]))?;
            render(cli, &cert, 0)
        }
        Command::Reduce { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let reduced = witness::reduce_pair(&m, &n, &tol)?;
            let (decision, _) = has_common_complement(&m, &n, None, &tol)?;
            let (reduced_decision, _) = has_common_complement(&reduced.m1, &reduced.n1, None, &tol)?;
            if decision != reduced_decision {
                return Err(Error::Numerical("splitting off M ∩ N changed the decision".into()));
            }
            let report = ReduceReport {
                reduced,
                decision,
                reduced_decision,
            };
            render(cli, &report, 0)
        }
        Command::OrthoComplementCheck { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let check = witness::orthocomplement_common_complement(&m, &n, &tol)?;
            let code = if check.holds { 0 } else { 3 };
            render(cli, &check, code)
        }
        Command::ClosedCompanion { input } => {
            let doc = load(input)?;
            let tol = tolerances(cli, Some(&doc))?;
            let (m, n) = (doc.require("M", &tol)?, doc.require("N", &tol)?);
            let (k, m1) = (doc.require("K", &tol)?, doc.require("M1", &tol)?);
            render(cli, &witness::closed_companion(&m, &n, &k, &m1, &tol)?, 0)
        }
        Command::Example { name, level, variant } => {
            let tol = tolerances(cli, None)?;
            let name: ExampleName = name.parse()?;
            let window: ShiftWindow = variant.parse()?;
            render(cli, &truncated::build(name, *level, window, &tol)?, 0)
        }
        Command::Sample { n, equal_dims } => {
            let tol = tolerances(cli, None)?;
            let mut s = Sampler::new(cli.seed.unwrap_or(0));
            let (m, nn) = if *equal_dims {
                s.equal_dim_pair(*n, &tol)?
            } else {
                s.pair(*n, &tol)?
            };
            let doc = PairInput::from_subspaces(&[("M", &m), ("N", &nn)]);
            render(cli, &doc, 0)
        }
    }
}
