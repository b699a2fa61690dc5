use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crn_core::conjugacy::{
    satisfies_condition, solve_conjugacy, verify_conjugacy_numerically, ConjugacyOptions, Scaling,
};
use crn_core::dynamics::{integrate, random_positive_point, EquilibriumOptions, IntegrationControls, StabilityOptions};
use crn_core::model::parse_rate_list;
use crn_core::report::{
    to_json, AnalysisReport, ConjugacyDocument, ConjugacySection, SimulationDocument, VerificationDocument, SCHEMA,
};
use crn_core::search::{search_conjugate_targets, SearchConfig};
use crn_core::{Network, OdeSystem64};

const SUCCESS: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "crn",
    version,
    about = "Mass-action reaction network analysis and linear conjugacy"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized probe.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Equilibrium residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_eq: f64,
    /// Eigenvalue real-part margin for the stability verdict.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_eig: f64,
    /// Integrator relative tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rel: f64,
    /// Integrator absolute tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_abs: f64,
    /// Sup-norm tolerance of the trajectory conjugacy check.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol_conj: f64,
    /// Print the JSON schema of all outputs and exit.
    #[arg(long)]
    schema: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure, dynamics and complex balancing of one network.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        rates: RateArgs,
        /// Initial state for the equilibrium search (default: all ones).
        #[arg(long)]
        x0: Option<String>,
    },
    /// Decide linear conjugacy to a given target, or search for targets.
    Conjugate(ConjugateArgs),
    /// Integrate the mass-action system and write a CSV trajectory.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        rates: RateArgs,
        /// Comma-separated positive initial state.
        #[arg(long)]
        x0: String,
        /// Integration end time.
        #[arg(long)]
        t_end: f64,
        /// CSV destination; stdout when omitted in text mode.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check the trajectory against this conjugate target.
        #[arg(long)]
        verify_against: Option<PathBuf>,
        /// Look for a witness with T = I when verifying.
        #[arg(long)]
        identity: bool,
    },
    /// Solve for a witness and check it exactly and along trajectories.
    Verify {
        file: PathBuf,
        /// Candidate conjugate target network file.
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        rates: RateArgs,
        /// Restrict to T = I.
        #[arg(long)]
        identity: bool,
        /// Allow T to permute species as well as scale them.
        #[arg(long)]
        allow_permutation: bool,
        /// Number of random initial states.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Integration horizon of each trajectory check.
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
    },
}

#[derive(Args, Debug)]
struct RateArgs {
    /// Comma-separated rate constants overriding the file (file order).
    #[arg(long)]
    k: Option<String>,
}

#[derive(Args, Debug)]
struct ConjugateArgs {
    file: PathBuf,
    #[command(flatten)]
    rates: RateArgs,
    /// Target network file with the same species.
    #[arg(long, conflicts_with = "search", required_unless_present = "search")]
    target: Option<PathBuf>,
    /// Enumerate weakly reversible targets instead of checking one.
    #[arg(long)]
    search: bool,
    /// Allow product complexes of the original as extra target vertices.
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = ArgAction::Set)]
    allow_phantoms: bool,
    #[arg(long, default_value_t = 2)]
    max_phantoms: usize,
    /// Keep only targets that are complex balanced at their transformed rates.
    #[arg(long)]
    require_cb: bool,
    /// Allow T to permute species as well as scale them.
    #[arg(long)]
    allow_permutation: bool,
    /// Refuse searches over more complexes than this.
    #[arg(long, default_value_t = 7)]
    max_complexes: usize,
    /// Stop after this many candidate digraphs.
    #[arg(long, default_value_t = 200_000)]
    max_candidates: usize,
    /// Restrict to T = I.
    #[arg(long)]
    identity: bool,
    /// Write every search result as a network file into this directory.
    #[arg(long)]
    emit_dir: Option<PathBuf>,
}

struct Settings {
    json: bool,
    seed: u64,
    stability: StabilityOptions<f64>,
    tol_conj: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.schema {
        emit(SCHEMA);
        return ExitCode::from(SUCCESS);
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (analyze, conjugate, simulate, verify)");
        return ExitCode::from(USAGE);
    };
    let controls = IntegrationControls {
        rel_tol: cli.tol_rel,
        abs_tol: cli.tol_abs,
        ..IntegrationControls::default()
    };
    let settings = Settings {
        json: cli.json,
        seed: cli.seed,
        stability: StabilityOptions {
            equilibrium: EquilibriumOptions {
                tol_eq: cli.tol_eq,
                controls,
                ..EquilibriumOptions::default()
            },
            tol_eig: cli.tol_eig,
            seed: cli.seed,
            ..StabilityOptions::default()
        },
        tol_conj: cli.tol_conj,
    };
    match run(command, &settings) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

fn run(command: Command, s: &Settings) -> Result<u8> {
    match command {
        Command::Analyze { file, rates, x0 } => analyze(&file, &rates, x0.as_deref(), s),
        Command::Conjugate(args) => conjugate(&args, s),
        Command::Simulate {
            file,
            rates,
            x0,
            t_end,
            out,
            verify_against,
            identity,
        } => simulate(
            &file,
            &rates,
            &x0,
            t_end,
            out.as_deref(),
            verify_against.as_deref(),
            identity,
            s,
        ),
        Command::Verify {
            file,
            target,
            rates,
            identity,
            allow_permutation,
            samples,
            t_end,
        } => verify(&file, &target, &rates, identity, allow_permutation, samples, t_end, s),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn load(path: &Path, rates: &RateArgs) -> Result<Network> {
    if !path.exists() {
        bail!("file not found: {}", path.display());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let net = Network::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    match &rates.k {
        Some(k) => {
            let k = parse_rate_list(k).context("--k")?;
            net.with_rates(&k).context("--k")
        }
        None => Ok(net),
    }
}

fn parse_state(text: &str, m: usize) -> Result<Vec<f64>> {
    let x: Vec<f64> = text
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid number `{}` in state", v.trim()))
        })
        .collect::<Result<_>>()?;
    if x.len() != m {
        bail!("state has {} entries, network has {m} species", x.len());
    }
    if x.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        bail!("initial state must be strictly positive");
    }
    Ok(x)
}

fn scaling(identity: bool) -> Scaling {
    if identity {
        Scaling::Identity
    } else {
        Scaling::Free
    }
}

fn analyze(file: &Path, rates: &RateArgs, x0: Option<&str>, s: &Settings) -> Result<u8> {
    let net = load(file, rates)?;
    let x0 = match x0 {
        Some(t) => parse_state(t, net.num_species())?,
        None => vec![1.0; net.num_species()],
    };
    let report = AnalysisReport::analyze(&net, &x0, &s.stability);
    if s.json {
        emit(&format!("{}\n", report.to_json()));
    } else {
        emit(&report.to_string());
    }
    Ok(SUCCESS)
}

fn conjugate(args: &ConjugateArgs, s: &Settings) -> Result<u8> {
    let original = load(&args.file, &args.rates)?;
    let section = if let Some(target_path) = &args.target {
        let target = load(target_path, &RateArgs { k: None })?;
        let opts = ConjugacyOptions {
            scaling: scaling(args.identity),
            allow_permutation: args.allow_permutation,
        };
        let witness = solve_conjugacy(&original, &target, &opts)?;
        let target_text = witness
            .as_ref()
            .map(|w| target.with_rates(&w.k_tilde).map(|t| t.to_text()))
            .transpose()?;
        ConjugacySection {
            feasible: witness.is_some(),
            witness,
            target: target_text,
            checks: Vec::new(),
            search: None,
        }
    } else {
        let cfg = SearchConfig {
            max_complexes: args.max_complexes,
            allow_phantoms: args.allow_phantoms,
            max_phantoms: args.max_phantoms,
            require_complex_balanced: args.require_cb,
            max_candidates: args.max_candidates,
            scaling: scaling(args.identity),
            ..SearchConfig::default()
        };
        let outcome = search_conjugate_targets(&original, &cfg)?;
        if outcome.cap_exhausted {
            eprintln!(
                "warning: candidate cap of {} exhausted; results are partial",
                cfg.max_candidates
            );
        }
        if let Some(dir) = &args.emit_dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (i, r) in outcome.results.iter().enumerate() {
                let path = dir.join(format!("target_{:03}.crn", i + 1));
                fs::write(&path, r.instantiated().to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        ConjugacySection {
            feasible: !outcome.results.is_empty(),
            witness: None,
            target: None,
            checks: Vec::new(),
            search: Some(outcome),
        }
    };
    let feasible = section.feasible;
    if s.json {
        emit(&format!("{}\n", to_json(&ConjugacyDocument::new(section))));
    } else {
        emit(&section.to_string());
    }
    Ok(if feasible { SUCCESS } else { NEGATIVE })
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    file: &Path,
    rates: &RateArgs,
    x0: &str,
    t_end: f64,
    out: Option<&Path>,
    verify_against: Option<&Path>,
    identity: bool,
    s: &Settings,
) -> Result<u8> {
    let net = load(file, rates)?;
    let x0 = parse_state(x0, net.num_species())?;
    if t_end.is_nan() || t_end <= 0.0 {
        bail!("--t-end must be positive");
    }
    let sys = OdeSystem64::new(&net);
    let traj = integrate(&sys, &x0, t_end, &s.stability.equilibrium.controls)?;
    let csv = traj.to_csv(net.species().names());
    match out {
        Some(path) => fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None if !s.json => emit(&csv),
        None => {}
    }
    let check = match verify_against {
        Some(target_path) => {
            let target = load(target_path, &RateArgs { k: None })?;
            let opts = ConjugacyOptions {
                scaling: scaling(identity),
                allow_permutation: false,
            };
            let Some(w) = solve_conjugacy(&net, &target, &opts)? else {
                eprintln!("infeasible: no conjugacy witness to {}", target_path.display());
                return Ok(NEGATIVE);
            };
            Some(verify_conjugacy_numerically(&net, &target, &w, &x0, t_end, s.tol_conj)?)
        }
        None => None,
    };
    let completed = traj.completed();
    let passed = check.as_ref().is_none_or(|c| c.passed);
    if s.json {
        emit(&format!("{}\n", to_json(&SimulationDocument::new(&net, &traj, check))));
    } else {
        if let Some(c) = &check {
            eprintln!(
                "conjugacy check: max deviation {:.3e}, {}",
                c.max_deviation,
                if c.passed { "passed" } else { "FAILED" }
            );
        }
        if out.is_some() {
            emit(&format!("wrote {} rows\n", traj.times.len()));
        }
    }
    if !completed {
        eprintln!("integration stopped early: {:?}", traj.termination);
        return Ok(NEGATIVE);
    }
    Ok(if passed { SUCCESS } else { NEGATIVE })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    file: &Path,
    target_path: &Path,
    rates: &RateArgs,
    identity: bool,
    allow_permutation: bool,
    samples: usize,
    t_end: f64,
    s: &Settings,
) -> Result<u8> {
    let original = load(file, rates)?;
    let target = load(target_path, &RateArgs { k: None })?;
    let opts = ConjugacyOptions {
        scaling: scaling(identity),
        allow_permutation,
    };
    let witness = solve_conjugacy(&original, &target, &opts)?;
    let mut checks = Vec::new();
    let mut condition = false;
    if let Some(w) = &witness {
        condition = satisfies_condition(&original, &target, w);
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for _ in 0..samples {
            let x0 = random_positive_point(&mut rng, original.num_species(), 0.1, 3.0);
            checks.push(verify_conjugacy_numerically(
                &original, &target, w, &x0, t_end, s.tol_conj,
            )?);
        }
    }
    let doc = VerificationDocument::new(condition, witness, checks);
    let passed = doc.passed;
    if s.json {
        emit(&format!("{}\n", to_json(&doc)));
    } else {
        match &doc.witness {
            Some(w) => emit(&w.to_string()),
            None => emit("infeasible\n"),
        }
        emit(&format!("condition holds exactly: {}\n", doc.condition_holds));
        for (i, c) in doc.checks.iter().enumerate() {
            emit(&format!(
                "sample {}: max deviation {:.3e} {}\n",
                i + 1,
                c.max_deviation,
                if c.passed { "ok" } else { "FAILED" }
            ));
        }
        emit(&format!("{}\n", if passed { "verified" } else { "not verified" }));
    }
    Ok(if passed { SUCCESS } else { NEGATIVE })
}
