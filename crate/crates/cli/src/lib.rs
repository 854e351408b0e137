//! Command implementations behind the `treesec` binary.
//!
//! Every command returns its full output as a string, so the binary and the
//! tests share one code path. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | file could not be read |
//! | 2 | usage or parse error |
//! | 3 | precondition failure (bad lengths, sampling failure, ...) |
//! | 4 | internal cross-check failure |

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treesec::spectrum::DET_RESIDUAL_BOUND;
use treesec::{
    compute_spectrum, discreteness_obstruction, mingap_estimate, parse_graph, parse_relations,
    reconstruction_error, sample_secular, sample_stratum, secular_polynomial, singular_components,
    verify_multiplicity, write_spectrum_human, write_spectrum_machine, write_strata_report,
    ExteriorClass, ObstructionReport, SpectrumOptions, TreeGraph, Verdict, TAU_RANK,
};

/// Relative error above which a reconstructed eigenvector fails `verify`.
pub const RECONSTRUCTION_BOUND: f64 = 1e-8;
/// Minimum fraction of samples on which the multiplicity formula must hold.
pub const AGREEMENT_BOUND: f64 = 0.95;

#[derive(Debug, Parser)]
#[command(
    name = "treesec",
    version,
    about = "Secular polynomials and spectra of metric trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative singular value threshold for numeric rank.
    #[arg(long, global = true, default_value_t = TAU_RANK)]
    pub tol_rank: f64,

    /// Root tolerance of the spectrum scan.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_root: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical secular polynomial.
    Secular { graph: PathBuf },
    /// List the singular strata, optionally only those of type m.
    Strata {
        graph: PathBuf,
        #[arg(long)]
        m: Option<i64>,
    },
    /// Pair every stratum class with the closure class of a length family.
    Obstruction {
        graph: PathBuf,
        #[arg(long)]
        relations: PathBuf,
    },
    /// Eigenvalues with multiplicities up to `kmax`.
    Spectrum {
        graph: PathBuf,
        #[arg(long, value_parser = parse_list::<f64>)]
        lengths: List<f64>,
        #[arg(long)]
        kmax: f64,
    },
    /// Smallest eigenvalue gap inside a window.
    Mingap {
        graph: PathBuf,
        #[arg(long, value_parser = parse_list::<f64>)]
        lengths: List<f64>,
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
    },
    /// Check the multiplicity formula and the eigenvector reconstruction on
    /// random points of the secular manifold.
    Verify {
        graph: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        samples: usize,
    },
}

/// A comma separated list argument.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<List<T>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("bad list entry `{t}`"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(List)
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    match parse_list::<f64>(s)?.0[..] {
        [a, b] => Ok((a, b)),
        _ => Err("expected K0,K1".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Io = 1,
    Parse = 2,
    Precondition = 3,
    CrossCheck = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
    /// Output produced before a cross-check failed.
    pub output: Option<String>,
}

impl CliError {
    fn new(kind: ExitKind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
            output: None,
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<treesec::Error> for CliError {
    fn from(e: treesec::Error) -> Self {
        let kind = match e {
            treesec::Error::Parse { .. } => ExitKind::Parse,
            _ => ExitKind::Precondition,
        };
        CliError::new(kind, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(ExitKind::Io, format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<TreeGraph, CliError> {
    parse_graph(&read(path)?).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let opts = SpectrumOptions {
        tau_root: cli.tol_root,
        tau_rank: cli.tol_rank,
        adaptive: true,
        ..Default::default()
    };
    match &cli.command {
        Command::Secular { graph } => {
            let p = secular_polynomial(&load_graph(graph)?)?;
            Ok(format!("{p}\n"))
        }
        Command::Strata { graph, m } => {
            let strata = singular_components(&load_graph(graph)?)?;
            let kept: Vec<_> = strata
                .into_iter()
                .filter(|s| m.is_none_or(|m| s.m == m))
                .collect();
            if kept.is_empty() {
                Ok("none\n".into())
            } else {
                Ok(write_strata_report(&kept))
            }
        }
        Command::Obstruction { graph, relations } => {
            let g = load_graph(graph)?;
            let rel = parse_relations(&read(relations)?, g.ambient())?;
            let rep = discreteness_obstruction(&g, &rel)?;
            Ok(match cli.format {
                Format::Human => write_obstruction_human(&rep),
                Format::Machine => write_obstruction_machine(&rep),
            })
        }
        Command::Spectrum {
            graph,
            lengths,
            kmax,
        } => {
            let g = load_graph(graph)?;
            let rep = compute_spectrum(&g, &lengths.0, *kmax, &opts)?;
            let out = match cli.format {
                Format::Human => write_spectrum_human(&rep),
                Format::Machine => write_spectrum_machine(&rep),
            };
            if let Some(e) = rep
                .eigenvalues
                .iter()
                .find(|e| e.det_residual >= DET_RESIDUAL_BOUND)
            {
                return Err(CliError {
                    kind: ExitKind::CrossCheck,
                    message: format!(
                        "determinant residual {:e} at k={} exceeds {DET_RESIDUAL_BOUND:e}",
                        e.det_residual, e.k
                    ),
                    output: Some(out),
                });
            }
            Ok(out)
        }
        Command::Mingap {
            graph,
            lengths,
            window,
        } => {
            let g = load_graph(graph)?;
            let m = mingap_estimate(&g, &lengths.0, *window, &opts)?;
            Ok(match cli.format {
                Format::Human => format!("mingap_estimate={m:.12}\n"),
                Format::Machine => format!("mingap_estimate\t{m}\n"),
            })
        }
        Command::Verify {
            graph,
            seed,
            samples,
        } => {
            let g = load_graph(graph)?;
            let summary = verify(&g, *seed, *samples, cli.tol_rank)?;
            let out = match cli.format {
                Format::Human => summary.to_human(),
                Format::Machine => summary.to_machine(),
            };
            if let Some(reason) = summary.failure() {
                return Err(CliError {
                    kind: ExitKind::CrossCheck,
                    message: reason,
                    output: Some(out),
                });
            }
            Ok(out)
        }
    }
}

/// Outcome of the `verify` suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub samples: usize,
    pub agree: usize,
    /// Points where the reconstruction ran.
    pub reconstructed: usize,
    /// Points where it did not apply (vanishing vertex, no seed).
    pub skipped: usize,
    pub max_error: f64,
}

impl VerifySummary {
    pub fn to_human(&self) -> String {
        format!(
            "multiplicity-formula: {}/{} agree; reconstruction: max rel err {:.1e} ({} points, {} skipped)\n",
            self.agree, self.samples, self.max_error, self.reconstructed, self.skipped
        )
    }

    pub fn to_machine(&self) -> String {
        format!(
            "multiplicity\t{}\t{}\nreconstruction\t{:e}\t{}\t{}\n",
            self.agree, self.samples, self.max_error, self.reconstructed, self.skipped
        )
    }

    pub fn parse_machine(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let m: Vec<&str> = lines.next()?.split('\t').collect();
        let r: Vec<&str> = lines.next()?.split('\t').collect();
        if lines.next().is_some() || m.len() != 3 || r.len() != 4 {
            return None;
        }
        if m[0] != "multiplicity" || r[0] != "reconstruction" {
            return None;
        }
        Some(VerifySummary {
            agree: m[1].parse().ok()?,
            samples: m[2].parse().ok()?,
            max_error: r[1].parse().ok()?,
            reconstructed: r[2].parse().ok()?,
            skipped: r[3].parse().ok()?,
        })
    }

    pub fn failure(&self) -> Option<String> {
        if (self.agree as f64) < AGREEMENT_BOUND * self.samples as f64 {
            return Some(format!(
                "multiplicity formula held on {}/{} samples",
                self.agree, self.samples
            ));
        }
        if self.max_error >= RECONSTRUCTION_BOUND {
            return Some(format!("reconstruction error {:e}", self.max_error));
        }
        None
    }
}

/// Alternates generic points of the secular manifold with points of the
/// strata in turn. The reconstruction runs on the generic points only, where
/// the eigenspace is a line.
pub fn verify(
    g: &TreeGraph,
    seed: u64,
    samples: usize,
    tau_rank: f64,
) -> Result<VerifySummary, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strata = singular_components(g)?;
    let mut summary = VerifySummary {
        samples,
        agree: 0,
        reconstructed: 0,
        skipped: 0,
        max_error: 0.0,
    };
    for i in 0..samples {
        let on_stratum = !strata.is_empty() && i % 2 == 1;
        let z = if on_stratum {
            sample_stratum(&strata[(i / 2) % strata.len()], &strata, &mut rng)?
        } else {
            sample_secular(g, &strata, &mut rng)?
        };
        if verify_multiplicity(g, &z, tau_rank)?.agree {
            summary.agree += 1;
        }
        if on_stratum {
            continue;
        }
        match reconstruction_error(g, &z, tau_rank) {
            Ok(err) => {
                summary.reconstructed += 1;
                summary.max_error = summary.max_error.max(err);
            }
            Err(treesec::Error::VanishingVertex(_) | treesec::Error::NoSpecialVertex) => {
                summary.skipped += 1
            }
            Err(treesec::Error::InteriorDirichlet(_)) => summary.skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(summary)
}

fn product_text(p: Option<i64>) -> String {
    p.map_or_else(|| "none".into(), |x| x.to_string())
}

pub fn write_obstruction_human(rep: &ObstructionReport) -> String {
    let mut out = String::new();
    writeln!(out, "closure: {}", rep.closure).unwrap();
    for (i, p) in rep.pairings.iter().enumerate() {
        let deleted: Vec<String> = p
            .stratum
            .h
            .deleted()
            .iter()
            .map(|v| v.to_string())
            .collect();
        writeln!(
            out,
            "stratum {} m={} codim={} deleted {}: class {} product {}",
            i + 1,
            p.stratum.m,
            p.stratum.codim,
            deleted.join(","),
            p.class,
            product_text(p.product)
        )
        .unwrap();
    }
    writeln!(out, "verdict: {}", rep.verdict).unwrap();
    out
}

/// Tab-separated records:
///
/// ```text
/// closure <class>
/// pairing <index> <m> <codim> <class> <product | none>
/// verdict <OBSTRUCTED | INCONCLUSIVE>
/// ```
pub fn write_obstruction_machine(rep: &ObstructionReport) -> String {
    let mut out = String::new();
    writeln!(out, "closure\t{}", rep.closure).unwrap();
    for (i, p) in rep.pairings.iter().enumerate() {
        writeln!(
            out,
            "pairing\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            p.stratum.m,
            p.stratum.codim,
            p.class,
            product_text(p.product)
        )
        .unwrap();
    }
    writeln!(out, "verdict\t{}", rep.verdict).unwrap();
    out
}

/// Parsed form of [`write_obstruction_machine`].
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionRecord {
    pub closure: ExteriorClass,
    /// `(m, codim, class, product)` per stratum.
    pub pairings: Vec<(i64, usize, ExteriorClass, Option<i64>)>,
    pub verdict: Verdict,
}

impl ObstructionRecord {
    pub fn from_report(rep: &ObstructionReport) -> Self {
        ObstructionRecord {
            closure: rep.closure.clone(),
            pairings: rep
                .pairings
                .iter()
                .map(|p| (p.stratum.m, p.stratum.codim, p.class.clone(), p.product))
                .collect(),
            verdict: rep.verdict,
        }
    }
}

pub fn parse_obstruction_machine(text: &str, n: usize) -> Result<ObstructionRecord, CliError> {
    let bad =
        |line: usize, what: &str| CliError::new(ExitKind::Parse, format!("line {line}: {what}"));
    let mut closure = None;
    let mut pairings = Vec::new();
    let mut verdict = None;
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        let f: Vec<&str> = line.split('\t').collect();
        match f[..] {
            ["closure", c] => closure = Some(treesec::parse_class(c, n)?),
            ["pairing", i, m, codim, class, product] => {
                if i.parse::<usize>().ok() != Some(pairings.len() + 1) {
                    return Err(bad(ln, "pairings out of order"));
                }
                let product = match product {
                    "none" => None,
                    x => Some(x.parse().map_err(|_| bad(ln, "bad product"))?),
                };
                pairings.push((
                    m.parse().map_err(|_| bad(ln, "bad m"))?,
                    codim.parse().map_err(|_| bad(ln, "bad codim"))?,
                    treesec::parse_class(class, n)?,
                    product,
                ));
            }
            ["verdict", "OBSTRUCTED"] => verdict = Some(Verdict::Obstructed),
            ["verdict", "INCONCLUSIVE"] => verdict = Some(Verdict::Inconclusive),
            _ => return Err(bad(ln, "unrecognised record")),
        }
    }
    Ok(ObstructionRecord {
        closure: closure.ok_or_else(|| bad(0, "missing closure record"))?,
        pairings,
        verdict: verdict.ok_or_else(|| bad(0, "missing verdict record"))?,
    })
}
