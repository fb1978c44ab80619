//! Command-line interface.
//!
//! Every subcommand writes JSON or CSV with a header to stdout. Failures write
//! `{"error": <variant>, "message": <text>}` to stderr and exit with 2 for bad
//! input or 1 for a failed check.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::Error;
use crate::experiments::{self, fmt_f64, random_profile, with_thread_cap, SampleKind};
use crate::fem2d;
use crate::gtransform::{self, DEFAULT_TRANSFORM_KNOTS};
use crate::profile::Profile;
use crate::rearrange;
use crate::sl1d::{self, ACCEPTANCE_N};
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "thinspec", version, about = "Eigenvalues of concave profiles and their thin planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Mu,
    Sigma,
    Hardy,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the first nonzero eigenvalue of a profile as JSON.
    Eigen {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        /// Finest mesh; must be a multiple of 4 and at least 32.
        #[arg(long, default_value_t = ACCEPTANCE_N)]
        n: usize,
    },
    /// sigma1 of the triangle with peak at x0, from the Bessel root and from the solver.
    ///
    /// CSV columns: x0,sigma_bessel,sigma_fem
    Triangle {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, default_value_t = ACCEPTANCE_N)]
        n: usize,
    },
    /// sigma1 of triangles on an equally spaced grid of peaks in [0, 1].
    ///
    /// CSV columns: x0,sigma_bessel,sigma_fem
    ScanTriangle {
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value_t = ACCEPTANCE_N)]
        n: usize,
    },
    /// Apply the transform G (or its inverse) and print the resulting profile as JSON.
    Transform {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        inverse: bool,
        /// Knots used for curved profiles.
        #[arg(long, default_value_t = DEFAULT_TRANSFORM_KNOTS)]
        knots: usize,
    },
    /// A random quasi-concave function and its sharp rearrangement.
    ///
    /// CSV columns: x,w,w_sharp
    RearrangeDemo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        /// Square the values, giving a quasi-concave but non-concave function.
        #[arg(long)]
        squared: bool,
    },
    /// mu1 * mass / sigma1 for the closed-form profiles, given files and random samples.
    ///
    /// CSV columns: profile_id,mu1,sigma1,ratio
    RatioScan {
        /// Random samples of each kind.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ACCEPTANCE_N)]
        mesh: usize,
        /// Extra profile files, identified by file stem.
        #[arg(long)]
        profile: Vec<PathBuf>,
    },
    /// Planar eigenvalues of the thin domain built from a profile against the 1D limits.
    ///
    /// CSV columns: epsilon,mu_2d,sigma_2d,mu_1d,sigma_1d_scaled,mu_gap,sigma_gap
    Limit2d {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 256)]
        nx: usize,
        #[arg(long, default_value_t = 4)]
        ny: usize,
    },
    /// Ratio over random generic, symmetric and near-triangle profiles.
    ///
    /// CSV columns: seed,kind,mu1,sigma1,ratio
    Probe {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1024)]
        mesh: usize,
        #[arg(long, default_value_t = verify::PROBE_SEED)]
        seed: u64,
    },
    /// Run the acceptance checks and print one line per check.
    Verify {
        /// Run a single check by number.
        #[arg(long)]
        only: Option<usize>,
    },
}

/// Failures of a command, mapped to exit codes.
enum Failure {
    Input(Error),
    Check(Error),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConvergenceFailure(_) | Error::SingularInterior | Error::AssertionFailure(_) => Failure::Check(e),
            other => Failure::Input(other),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn load_profile(path: &Path) -> std::result::Result<Profile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(Error::InvalidProfile(e.to_string())))
}

fn emit(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
}

fn execute(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Eigen { profile, which, n } => {
            let h = load_profile(&profile)?;
            let r = match which {
                Which::Mu => sl1d::mu1(&h, n)?,
                Which::Sigma => sl1d::sigma1(&h, n)?,
                Which::Hardy => sl1d::sigma1_hardy(&h, n)?,
            };
            let text = serde_json::to_string(&r).map_err(|e| Failure::Io(e.to_string()))?;
            emit(out, &format!("{text}\n"))
        }
        Command::Triangle { x0, n } => {
            if !(0.0..=1.0).contains(&x0) {
                return Err(Failure::Input(Error::InvalidInput(format!("x0 must lie in [0, 1], got {x0}"))));
            }
            let fem = sl1d::sigma1(&Profile::triangle(x0), n)?.extrapolated;
            let row = experiments::TriangleRow { x0, sigma_bessel: crate::bessel::sigma1_triangle(x0), sigma_fem: fem };
            emit(out, &experiments::triangle_csv(&[row]))
        }
        Command::ScanTriangle { grid, n } => emit(out, &experiments::triangle_csv(&experiments::triangle_scan(grid, n)?)),
        Command::Transform { profile, inverse, knots } => {
            let h = load_profile(&profile)?;
            let g = if inverse { gtransform::gof_inverse(&h, knots)? } else { gtransform::gof(&h, knots)? };
            let text = serde_json::to_string(&g).map_err(|e| Failure::Io(e.to_string()))?;
            emit(out, &format!("{text}\n"))
        }
        Command::RearrangeDemo { seed, nodes, squared } => {
            if nodes < 4 {
                return Err(Failure::Input(Error::InvalidInput(format!("need at least 4 nodes, got {nodes}"))));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = rearrange::random_quasi_concave(&mut rng, nodes, squared);
            let s = rearrange::sharp(&w)?;
            let mut xs: Vec<f64> = w.xs().iter().chain(s.xs()).copied().collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let mut text = String::from("x,w,w_sharp\n");
            for x in xs {
                text += &format!("{},{},{}\n", fmt_f64(x), fmt_f64(w.eval(x)), fmt_f64(s.eval(x)));
            }
            emit(out, &text)
        }
        Command::RatioScan { samples, seed, mesh, profile } => {
            let mut list = experiments::named_profiles();
            for path in &profile {
                let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                list.push((id, load_profile(path)?));
            }
            for s in seed..seed + samples as u64 {
                for kind in SampleKind::ALL {
                    list.push((format!("{kind}-{s}"), random_profile(s, kind)));
                }
            }
            emit(out, &experiments::ratio_csv(&experiments::ratio_scan(&list, mesh)?))
        }
        Command::Limit2d { profile, eps, nx, ny } => {
            let h = load_profile(&profile)?;
            let rows = with_thread_cap(|| fem2d::limit_check(&h, &eps, nx, ny))?;
            let mut text = String::from("epsilon,mu_2d,sigma_2d,mu_1d,sigma_1d_scaled,mu_gap,sigma_gap\n");
            for r in rows {
                let cols = [r.epsilon, r.mu_2d, r.sigma_2d, r.mu_1d, r.sigma_1d_scaled, r.mu_gap, r.sigma_gap];
                text += &cols.map(fmt_f64).join(",");
                text.push('\n');
            }
            emit(out, &text)
        }
        Command::Probe { samples, mesh, seed } => {
            emit(out, &experiments::conjecture_probe(samples, mesh, seed)?.to_csv())
        }
        Command::Verify { only } => {
            let ids: Vec<usize> = match only {
                Some(k) if (1..=verify::CRITERIA.len()).contains(&k) => vec![k],
                Some(k) => return Err(Failure::Input(Error::InvalidInput(format!("no check numbered {k}")))),
                None => (1..=verify::CRITERIA.len()).collect(),
            };
            let mut all = true;
            for id in ids {
                let o = verify::criterion(id);
                all &= o.passed;
                emit(out, &format!("{o}\n"))?;
            }
            if all { Ok(()) } else { Err(Failure::Verify) }
        }
    }
}

fn report(err: &mut dyn Write, code: &str, message: &str) {
    let _ = writeln!(err, "{}", json!({ "error": code, "message": message }));
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            report(err, "Usage", e.render().to_string().trim());
            return 2;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Input(e)) => {
            report(err, e.code(), &e.to_string());
            2
        }
        Err(Failure::Check(e)) => {
            report(err, e.code(), &e.to_string());
            1
        }
        Err(Failure::Io(msg)) => {
            report(err, "Io", &msg);
            2
        }
        Err(Failure::Verify) => {
            report(err, "AssertionFailure", "one or more acceptance checks failed");
            1
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
