use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crossed_hadamard::crossed::{hadamard_coeffs, pi_norm, synthesize, CPElement};
use crossed_hadamard::instance::{parse_instance, random_instance, InstanceSpec, Profile};
use crossed_hadamard::numerics::spectral_norm;
use crossed_hadamard::schur::{check_intertwining, check_schur_equivalence, BlockMatrix};
use crossed_hadamard::verify::{check_livshits, CheckEntry, CheckReport};
use crossed_hadamard::{DynamicalSystem, Error, GroupTable, SeededRng, C64};

#[derive(Parser)]
#[command(name = "crossed-hadamard", version, about = "Check Hadamard-product identities in finite crossed products")]
struct Cli {
    /// Multiply every tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
    /// Write the full JSON report here.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Print nothing on success or failure; rely on the exit code.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on an instance file or a seeded random instance.
    Verify(VerifyArgs),
    /// Compare the Schur product of two random block matrices with the Hadamard product.
    DemoSchur {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convolution on C_n: ‖X⋆Y‖ against ‖X‖_π·‖Y‖_π.
    DemoFourier {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Instance JSON file.
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    /// Generate a random instance from --seed.
    #[arg(long, requires = "seed")]
    random: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    /// Inline JSON profile for --random, e.g. '{"n": [2, 4], "kinds": ["diagonal_shift"]}'.
    #[arg(long, value_name = "P", requires = "random")]
    profile: Option<String>,
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if !cli.quiet {
                print_summary(&report);
            }
            if let Some(path) = &cli.json {
                if let Err(msg) = write_report(path, &report) {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<CheckReport, Failure> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Failure::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Verify(args) => verify(args, cli.tol),
        Command::DemoSchur { n, d, seed } => demo_schur(*n, *d, *seed, cli.tol),
        Command::DemoFourier { n, seed } => demo_fourier(*n, *seed, cli.tol),
    }
}

fn verify(args: &VerifyArgs, tol: f64) -> Result<CheckReport, Failure> {
    let mut spec: InstanceSpec = match (&args.source.instance, args.seed) {
        (Some(path), _) => {
            let text = std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            parse_instance(&text)?
        }
        (None, Some(seed)) => {
            let profile = match &args.profile {
                Some(p) => Profile::from_json(p)?,
                None => Profile::default(),
            };
            random_instance(seed, &profile)?
        }
        (None, None) => return Err(Failure::Input("--random needs --seed".into())),
    };
    if let (Some(_), Some(seed)) = (&args.source.instance, args.seed) {
        spec.seed = seed;
    }
    spec.config.tol_scale *= tol;
    Ok(spec.run()?)
}

fn demo_schur(n: usize, d: usize, seed: u64, tol: f64) -> Result<CheckReport, Failure> {
    let mut rng = SeededRng::new(seed);
    let a = BlockMatrix::random(n, d, &mut rng)?;
    let b = BlockMatrix::random(n, d, &mut rng)?;
    let mut entries = vec![check_schur_equivalence(&a, &b)?, check_intertwining(&a, &b)?];
    for e in &mut entries {
        e.rescale(tol);
    }
    Ok(CheckReport {
        entries,
        seed,
        instance: json!({ "a": a, "b": b }),
    })
}

fn demo_fourier(n: usize, seed: u64, tol: f64) -> Result<CheckReport, Failure> {
    let ds = Arc::new(DynamicalSystem::trivial(GroupTable::cyclic(n)?, 1)?);
    let mut rng = SeededRng::new(seed);
    let mut draw = || {
        let coeffs = (0..n).map(|_| ds.random_element(&mut rng)).collect();
        CPElement::new(Arc::clone(&ds), coeffs)
    };
    let (x, y) = (draw()?, draw()?);
    let product = hadamard_coeffs(&x, &y)?;
    let op_norm = spectral_norm(synthesize(&product).matrix())?;
    // Convolution by c on C_n is diagonalized by the characters k ↦ Σ_g c_g ω^{gk}.
    let sup_transform = (0..n)
        .map(|k| {
            (0..n)
                .map(|g| {
                    let w = C64::from_polar(1.0, std::f64::consts::TAU * (g * k) as f64 / n as f64);
                    product.coeff(g)[(0, 0)] * w
                })
                .sum::<C64>()
                .norm()
        })
        .fold(0.0, f64::max);
    let bound = pi_norm(&x) * pi_norm(&y);
    let mut entries = vec![
        CheckEntry::equality(
            "fourier_norm",
            (op_norm - sup_transform).abs(),
            1e-9 * (1.0 + sup_transform),
            format!("‖X⋆Y‖ = {op_norm:.12e}, sup of the transform = {sup_transform:.12e}"),
        ),
        check_livshits(&x, &y, 1.0)?,
        CheckEntry::inequality(
            "convolution_bound",
            bound - op_norm,
            1e-9 * (1.0 + bound),
            format!("‖X⋆Y‖ = {op_norm:.12e}, ‖X‖_π·‖Y‖_π = {bound:.12e}"),
        ),
    ];
    for e in &mut entries {
        e.rescale(tol);
    }
    let coeffs = |e: &CPElement| e.coeffs().iter().map(|c| [c[(0, 0)].re, c[(0, 0)].im]).collect::<Vec<_>>();
    Ok(CheckReport {
        entries,
        seed,
        instance: json!({ "n": n, "x": coeffs(&x), "y": coeffs(&y) }),
    })
}

fn print_summary(report: &CheckReport) {
    for e in &report.entries {
        let tag = if e.pass { "PASS" } else { "FAIL" };
        if e.context.is_empty() {
            println!("{tag} {} slack={:.3e} tol={:.1e}", e.name, e.slack, e.tol);
        } else {
            println!("{tag} {} slack={:.3e} tol={:.1e} ({})", e.name, e.slack, e.tol, e.context);
        }
    }
    let failed = report.failures().count();
    println!("{} checks, {} failed", report.entries.len(), failed);
}

fn write_report(path: &Path, report: &CheckReport) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}
