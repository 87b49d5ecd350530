use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use robinfem::error_norms::error_norms_discrete;
use robinfem::fem::{assemble_system, Order};
use robinfem::harness::{
    diagnose, lookup, parse_config, run_convergence_study, solve, ConvergenceReport, ErrorReportRow, ReportFormat,
    Rules, StudyConfig,
};
use robinfem::mesh::{generate_disk_mesh, load_mesh, write_mesh, Mesh};
use robinfem::DomainGeometry;

#[derive(Parser)]
#[command(name = "robinfem", version, about = "Isoparametric FEM for -Δu = f with generalized Robin boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a disk mesh and write it to a file.
    Mesh {
        #[arg(long, default_value = "disk")]
        domain: String,
        /// Number of boundary vertices.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve once and write nodal values plus a one-row error report.
    Solve(SolveArgs),
    /// Run a convergence study over the configured levels.
    Study {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        exact_domain: bool,
        #[arg(long)]
        diagnostics: bool,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        /// Defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print geometric and consistency diagnostics for one mesh.
    Diagnose {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value = "cubic10")]
        solution: String,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Boundary vertex count; defaults to the first configured level.
    #[arg(long)]
    n: Option<usize>,
    /// Solve on a mesh file instead of a generated disk mesh.
    #[arg(long, conflicts_with = "n")]
    mesh: Option<PathBuf>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    solution: Option<String>,
    #[arg(long)]
    solver_tol: Option<f64>,
    /// Nodal values as `id value` lines; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One-row CSV error report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Stiffness matrix as `row col value` triplets.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

fn order_from(k: usize) -> Result<Order> {
    Order::from_degree(k).with_context(|| format!("order must be 1 or 2, got {k}"))
}

fn load_config(path: Option<&Path>) -> Result<StudyConfig> {
    match path {
        Some(p) => parse_config(p).with_context(|| format!("reading config {}", p.display())),
        None => Ok(StudyConfig::default()),
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(k) = args.order {
        config.order = order_from(k)?;
    }
    if let Some(name) = args.solution {
        config.solution = name;
    }
    if let Some(tol) = args.solver_tol {
        config.solver_tol = tol;
    }
    config.validate()?;
    let solution = lookup(&config.solution)?;
    let rules = Rules::from_config(&config);

    let mesh: Mesh = match &args.mesh {
        Some(path) => {
            let mesh = load_mesh(path).with_context(|| format!("loading mesh {}", path.display()))?;
            mesh.check_boundary_on(&DomainGeometry::unit_disk())?;
            mesh
        }
        None => generate_disk_mesh(args.n.unwrap_or(config.levels[0]), config.order)?,
    };

    if let Some(path) = &args.dump_matrix {
        let system = assemble_system(&mesh, solution.f, solution.tau, &rules.assembly_tri, &rules.assembly_edge)?;
        system.matrix.write_triplets(writer(Some(path))?)?;
    }

    let field = solve(&mesh, &solution, &rules, config.solver_tol)?;
    let mut out = writer(args.out.as_deref())?;
    for (id, value) in field.values().iter().enumerate() {
        writeln!(out, "{id} {value:e}")?;
    }
    out.flush()?;

    if let Some(path) = &args.report {
        let discrete = error_norms_discrete(&field, solution.u, solution.grad_u, &rules.error_tri, &rules.error_edge)?;
        let report = ConvergenceReport::new(vec![ErrorReportRow {
            n: mesh.num_boundary_vertices(),
            h: mesh.h(),
            discrete,
            exact: None,
            diagnostics: None,
        }]);
        std::fs::write(path, report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Mesh { domain, n, order, out } => {
            if domain != "disk" {
                bail!("unsupported domain {domain:?}; only `disk` can be meshed");
            }
            let mesh = generate_disk_mesh(n, order_from(order)?)?;
            std::fs::write(&out, write_mesh(&mesh)).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Solve(args) => run_solve(args)?,
        Command::Study {
            config,
            exact_domain,
            diagnostics,
            format,
            out,
        } => {
            let mut config = load_config(config.as_deref())?;
            config.exact_domain |= exact_domain;
            config.diagnostics |= diagnostics;
            let report = run_convergence_study(&config)?;
            let mut w = writer(out.as_deref().or(config.output.as_deref()))?;
            w.write_all(report.render(format).as_bytes())?;
            w.flush()?;
        }
        Command::Diagnose { n, order, solution } => {
            let solution = lookup(&solution)?;
            let mesh = generate_disk_mesh(n, order_from(order)?)?;
            let d = diagnose(&mesh, &solution, &Rules::new(5, 7))?;
            println!("boundary_distance_profile {:e}", d.distance_profile);
            println!("normal_discrepancy {:e}", d.normal_discrepancy);
            println!("consistency_residual {:e}", d.consistency_residual);
        }
    }
    Ok(())
}
