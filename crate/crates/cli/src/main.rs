//! `worm`: evaluate kernels, project boundary data and verify the Szegő
//! machinery on the worm domain.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad usage or
//! unusable input.

mod commands;
mod config;
mod data;
mod report;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "worm", version, about = "Szegő projection on the non-smooth worm domain")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate K(w, ζ) and write the series, term by term
    KernelEval(commands::KernelEvalArgs),
    /// Project boundary data onto an interior slice (y, s)
    Project(commands::ProjectArgs),
    /// Apply the boundary Szegő projection to boundary data
    BoundaryProject(commands::BoundaryProjectArgs),
    /// Boundary values of the Hardy function with given mode profiles
    Synthesize(commands::SynthesizeArgs),
    /// Run the verification suites
    Verify(commands::VerifyArgs),
    /// Run checks over a range of β
    Sweep(commands::SweepArgs),
    /// Distances along an approach path, or the growth functional
    Convergence(commands::ConvergenceArgs),
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("WORM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow::anyhow!("WORM_THREADS must be a positive integer, got '{v}'"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let run = init_threads().and_then(|()| match &cli.cmd {
        Cmd::KernelEval(a) => commands::kernel_eval(a),
        Cmd::Project(a) => commands::project(a),
        Cmd::BoundaryProject(a) => commands::boundary_project(a),
        Cmd::Synthesize(a) => commands::synthesize(a),
        Cmd::Verify(a) => commands::verify(a),
        Cmd::Sweep(a) => commands::sweep(a),
        Cmd::Convergence(a) => commands::convergence(a),
    });
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
