use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use carfock::channels::{
    erasure_choi, erasure_ppt_spectrum, erasure_quantum_capacity, grassmann_output_state,
    AccelerationParam, ErasureParams,
};
use carfock::density::{partial_transpose_second, spectrum_of, DensityMatrix};
use carfock::entanglement::{
    concurrence_two_qubit, eof_wootters, log_negativity, negativity, EntanglementReport,
};
use carfock::io;
use carfock::roof::{eof_convex_roof, RoofConfig, RoofConstraint};
use carfock::{Error, FockVector, ModeOrder, Result};

#[derive(Parser)]
#[command(
    name = "carfock",
    version,
    about = "Fermionic Fock states with braided sign bookkeeping: superselection checks, entanglement measures, erasure-channel diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Report parity sector, norm or trace, and the superselection verdict
    #[command(group(ArgGroup::new("input").required(true).args(["state", "rho"])))]
    Check {
        /// State file to inspect
        #[arg(long)]
        state: Option<PathBuf>,
        /// Density file to inspect
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Rewrite a state in a different mode order, tracking fermionic signs
    Reorder {
        #[arg(long)]
        state: PathBuf,
        /// Target mode order, e.g. "acb" or "a,c,b"
        #[arg(long)]
        order: String,
    },
    /// Partial trace of a pure state, emitted as a density file
    Reduce {
        #[arg(long)]
        state: PathBuf,
        /// Modes to trace out
        #[arg(long = "trace-out")]
        trace_out: String,
        /// Mode order to rewrite into before tracing
        #[arg(long)]
        order: Option<String>,
    },
    /// Evaluate an entanglement measure on a density file
    Measure {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        measure: MeasureName,
        /// Restrict the roof to decompositions respecting this rule
        #[arg(long)]
        constraint: Option<Constraint>,
        /// Optimizer seed (eof-roof only)
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Erasure-channel diagnostics at a given erasure probability
    Erasure {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        report: ErasureReport,
    },
    /// CSV of formation entanglement vs acceleration, both calculations
    UnruhCurve {
        /// Grid points over the acceleration range
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureName {
    Negativity,
    LogNegativity,
    Concurrence,
    EofWootters,
    EofRoof,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constraint {
    Ssr,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErasureReport {
    Ppt,
    Negativity,
    Capacity,
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SsrViolation(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Check { state, rho } => cmd_check(state.as_deref(), rho.as_deref()),
        Cmd::Reorder { state, order } => cmd_reorder(&state, &order),
        Cmd::Reduce { state, trace_out, order } => cmd_reduce(&state, &trace_out, order.as_deref()),
        Cmd::Measure { rho, measure, constraint, seed } => cmd_measure(&rho, measure, constraint, seed),
        Cmd::Erasure { p, report } => cmd_erasure(p, report),
        Cmd::UnruhCurve { samples, seed, out } => cmd_unruh_curve(samples, seed, &out),
    }
}

fn load_state(path: &Path) -> Result<FockVector> {
    io::parse_state(&std::fs::read_to_string(path)?)
}

fn load_density(path: &Path) -> Result<DensityMatrix> {
    io::parse_density(&std::fs::read_to_string(path)?)
}

fn target_order(current: &FockVector, spec: &str) -> Result<ModeOrder> {
    let labels = io::split_labels(spec);
    let order = ModeOrder::new(labels)?;
    if !order.is_permutation_of(current.order()) {
        return Err(Error::OrderMismatch(
            current.order().to_string(),
            order.to_string(),
        ));
    }
    Ok(order)
}

fn cmd_check(state: Option<&Path>, rho: Option<&Path>) -> Result<u8> {
    let verdict = if let Some(path) = state {
        let v = load_state(path)?;
        println!("modes: {}", v.order());
        println!("norm: {:.12e}", v.norm());
        println!("parity: {}", v.parity()?);
        v.ssr_check()
    } else {
        let rho = load_density(rho.expect("clap enforces one input"))?;
        if rho.order().is_empty() {
            println!("modes: (none)");
        } else {
            println!("modes: {}", rho.order());
        }
        println!("trace: {:.12e}", rho.trace().re);
        let (even, odd) = rho.parity_sector_weights();
        println!("sector weights: even={even:.12e} odd={odd:.12e}");
        rho.ssr_check()
    };
    println!("ssr: {verdict}");
    Ok(if verdict.is_valid() { 0 } else { 2 })
}

fn cmd_reorder(state: &Path, order: &str) -> Result<u8> {
    let v = load_state(state)?;
    let target = target_order(&v, order)?;
    print!("{}", io::write_state(&v.reorder_modes(&target)?));
    Ok(0)
}

fn cmd_reduce(state: &Path, trace_out: &str, order: Option<&str>) -> Result<u8> {
    let mut v = load_state(state)?;
    if let Some(spec) = order {
        let target = target_order(&v, spec)?;
        v = v.reorder_modes(&target)?;
    }
    let rho = DensityMatrix::outer(&v)?;
    let reduced = rho.partial_trace(io::split_labels(trace_out))?;
    print!("{}", io::write_density(&reduced));
    Ok(0)
}

fn cmd_measure(
    rho_path: &Path,
    measure: MeasureName,
    constraint: Option<Constraint>,
    seed: u64,
) -> Result<u8> {
    let rho = load_density(rho_path)?;
    if constraint.is_some() && !matches!(measure, MeasureName::EofRoof) {
        eprintln!("note: --constraint only affects eof-roof; ignored");
    }
    let report = match measure {
        MeasureName::Negativity => {
            EntanglementReport::closed_form("negativity", negativity(&rho, [last_mode(&rho)?])?)
        }
        MeasureName::LogNegativity => EntanglementReport::closed_form(
            "log-negativity",
            log_negativity(&rho, [last_mode(&rho)?])?,
        ),
        MeasureName::Concurrence => {
            EntanglementReport::closed_form("concurrence", concurrence_two_qubit(&rho)?)
        }
        MeasureName::EofWootters => {
            EntanglementReport::closed_form("eof-wootters", eof_wootters(&rho)?)
        }
        MeasureName::EofRoof => {
            let roof_constraint = match constraint {
                Some(Constraint::Ssr) => RoofConstraint::ParitySsr,
                None => RoofConstraint::Unconstrained,
            };
            let (report, _) = eof_convex_roof(&rho, roof_constraint, &RoofConfig::with_seed(seed))?;
            if !report.converged {
                eprintln!("note: optimizer did not converge; value is an upper bound");
            }
            report
        }
    };
    println!("{report}");
    Ok(0)
}

fn last_mode(rho: &DensityMatrix) -> Result<String> {
    rho.order()
        .labels()
        .last()
        .cloned()
        .ok_or_else(|| Error::WrongModeCount { expected: 1, found: 0 })
}

fn cmd_erasure(p: f64, report: ErasureReport) -> Result<u8> {
    let params = ErasureParams::new(p)?;
    match report {
        ErasureReport::Ppt => {
            let spectrum = erasure_ppt_spectrum(params);
            let parts: Vec<String> = spectrum.eigenvalues().iter().map(|e| format!("{e:.11e}")).collect();
            println!("ppt: {}", parts.join(" "));
        }
        ErasureReport::Negativity => {
            println!("negativity: {:.11e}", choi_negativity(params)?);
        }
        ErasureReport::Capacity => {
            println!("capacity: {:.11e}", erasure_quantum_capacity(params));
        }
        ErasureReport::All => {
            let spectrum = erasure_ppt_spectrum(params);
            println!(
                "{:.11e},{:.11e},{:.11e},{:.11e}",
                p,
                spectrum.min(),
                choi_negativity(params)?,
                erasure_quantum_capacity(params)
            );
        }
    }
    Ok(0)
}

fn choi_negativity(params: ErasureParams) -> Result<f64> {
    let pt = partial_transpose_second(&erasure_choi(params), 2, 3)?;
    Ok(spectrum_of(&pt)?.negative_weight())
}

fn cmd_unruh_curve(samples: u64, seed: u64, out: &Path) -> Result<u8> {
    let mut csv = String::from("r,eof_wootters,eof_ssr,gap\n");
    let config = RoofConfig::with_seed(seed);
    for i in 0..samples {
        let r = AccelerationParam::MAX * i as f64 / (samples - 1) as f64;
        let rho = grassmann_output_state(AccelerationParam::new(r)?);
        let wootters = eof_wootters(&rho)?;
        let (ssr_report, _) = eof_convex_roof(&rho, RoofConstraint::ParitySsr, &config)?;
        let ssr = ssr_report.value;
        csv.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e}\n",
            r,
            wootters,
            ssr,
            ssr - wootters
        ));
    }
    std::fs::write(out, csv)?;
    Ok(0)
}
