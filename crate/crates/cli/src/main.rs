use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use robin_cli::commands;

#[derive(Parser)]
#[command(name = "robin", version, about = "Robin Laplacian eigenvalues and boundary geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the lowest eigenvalues over an alpha grid.
    Eig {
        #[arg(long)]
        domain: PathBuf,
        /// A:B:N, or A:B:N:geom for geometric spacing.
        #[arg(long)]
        alpha_grid: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// radial (ball, shell) or fem (star2d).
        #[arg(long)]
        method: String,
        /// coarse, medium or fine.
        #[arg(long, default_value = "medium")]
        mesh_preset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the coefficient of alpha, or the remainder exponent.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// coeff or exponent.
        #[arg(long, default_value = "coeff")]
        mode: String,
        #[arg(long)]
        geometry: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integral identities and the H_max lower bound.
    Geom {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value = "divergence,minkowski,hmax-bound")]
        checks: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare eigenvalue curves of two domains.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Area-preserving perturbations that lower H_max.
    Perturb {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an SVG plot.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        /// eig-curve, c-curve or geometry.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eig { domain, alpha_grid, count, method, mesh_preset, out } => {
            commands::cmd_eig(&domain, &alpha_grid, count, &method, &mesh_preset, &out)
        }
        Command::Fit { input, j, mode, geometry, out } => commands::cmd_fit(&input, j, &mode, geometry.as_deref(), &out),
        Command::Geom { domain, checks, out } => commands::cmd_geom(&domain, &checks, &out),
        Command::Compare { a, b, j, out } => commands::cmd_compare(&a, &b, j, &out),
        Command::Perturb { domain, eps, iters, out } => commands::cmd_perturb(&domain, eps, iters, &out),
        Command::Plot { input, kind, out } => commands::cmd_plot(&input, &kind, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("robin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
