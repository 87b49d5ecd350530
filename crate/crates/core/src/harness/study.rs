use crate::error_norms::{
    consistency_residual, error_norms_discrete, error_norms_exact_domain, normal_discrepancy,
};
use crate::fem::{assemble_system, EdgeRule, Order, TriangleRule};
use crate::geometry::{boundary_distance_profile, DomainGeometry};
use crate::interpolation::SolutionField;
use crate::linalg::{conjugate_gradient, CgOptions};
use crate::mesh::{generate_disk_mesh, Mesh};
use crate::Error;

use super::config::StudyConfig;
use super::registry::{lookup, ManufacturedSolution};
use super::report::{ConvergenceReport, Diagnostics, ErrorReportRow};
use super::HarnessError;

/// Assembly and error-evaluation rules selected by a config.
#[derive(Debug, Clone)]
pub struct Rules {
    pub assembly_tri: TriangleRule,
    pub assembly_edge: EdgeRule,
    pub error_tri: TriangleRule,
    pub error_edge: EdgeRule,
}

impl Rules {
    /// A triangle rule of the given degree and Gauss rules with that many
    /// points along edges.
    pub fn new(assembly_degree: usize, error_degree: usize) -> Self {
        Self {
            assembly_tri: TriangleRule::triangle(assembly_degree),
            assembly_edge: EdgeRule::gauss(assembly_degree),
            error_tri: TriangleRule::triangle(error_degree),
            error_edge: EdgeRule::gauss(error_degree),
        }
    }

    pub fn from_config(config: &StudyConfig) -> Self {
        Self::new(config.quad_assembly_degree, config.quad_error_degree)
    }
}

/// Assembles and solves the discrete problem on `mesh`.
pub fn solve<'m>(
    mesh: &'m Mesh,
    solution: &ManufacturedSolution,
    rules: &Rules,
    solver_tol: f64,
) -> Result<SolutionField<'m>, Error> {
    let system = assemble_system(mesh, solution.f, solution.tau, &rules.assembly_tri, &rules.assembly_edge)?;
    let options = CgOptions {
        tol: solver_tol,
        ..CgOptions::default()
    };
    let cg = conjugate_gradient(&system.matrix, &system.rhs, None, &options)?;
    Ok(SolutionField::new(mesh, cg.x)?)
}

/// Geometric and consistency diagnostics of a mesh.
pub fn diagnose(mesh: &Mesh, solution: &ManufacturedSolution, rules: &Rules) -> Result<Diagnostics, Error> {
    let disk = DomainGeometry::unit_disk();
    Ok(Diagnostics {
        distance_profile: boundary_distance_profile(&disk, mesh, &rules.error_edge)?,
        normal_discrepancy: normal_discrepancy(mesh, &disk, &rules.error_edge)?,
        consistency_residual: consistency_residual(
            mesh,
            solution.u,
            solution.grad_u,
            solution.f,
            solution.tau,
            &rules.error_tri,
            &rules.error_edge,
        )?,
    })
}

/// One refinement level: mesh, solve, and measure.
pub fn run_level(config: &StudyConfig, n: usize) -> Result<ErrorReportRow, Error> {
    let solution = lookup(&config.solution)?;
    let rules = Rules::from_config(config);
    let mesh = generate_disk_mesh(n, config.order)?;
    let field = solve(&mesh, &solution, &rules, config.solver_tol)?;
    let discrete = error_norms_discrete(&field, solution.u, solution.grad_u, &rules.error_tri, &rules.error_edge)?;
    let exact = if config.exact_domain {
        let disk = DomainGeometry::unit_disk();
        Some(error_norms_exact_domain(
            &field,
            solution.u,
            solution.grad_u,
            &disk,
            &rules.error_tri,
            &rules.error_edge,
        )?)
    } else {
        None
    };
    let diagnostics = if config.diagnostics {
        Some(diagnose(&mesh, &solution, &rules)?)
    } else {
        None
    };
    Ok(ErrorReportRow {
        n,
        h: mesh.h(),
        discrete,
        exact,
        diagnostics,
    })
}

/// Runs every level of the study in order.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceReport, HarnessError> {
    config.validate()?;
    let rows = config
        .levels
        .iter()
        .map(|&n| {
            run_level(config, n).map_err(|e| HarnessError::Level {
                n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceReport::new(rows))
}

/// Shorthand for a study of `solution` at the given order and levels.
pub fn quick_config(solution: &str, order: Order, levels: &[usize]) -> StudyConfig {
    StudyConfig {
        solution: solution.to_string(),
        order,
        levels: levels.to_vec(),
        ..StudyConfig::default()
    }
}
