//! Solve-and-measure driver for convergence studies.

use std::thread;

use crate::error::Result;
use crate::interface::{classify_mesh, CutOptions, Side};
use crate::mesh::{generate_uniform_square_mesh, PolygonalMesh};
use crate::norms::{convergence_orders, discrete_h1_seminorm, energy_norm, l2_error_v0, ErrorRow};
use crate::operator::{assemble, AssemblyOptions};
use crate::point::Point;
use crate::problems::{validate_problem, Problem};
use crate::solver::{solve, SolverOptions};
use crate::space::{project_qh_with_degree, FeSpace, WgFunction};

/// Quadrature degree used for `Q_h u` when measuring errors.
pub const ERROR_QUAD_DEGREE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub lambda: f64,
    pub quad_degree: usize,
    pub solver: SolverOptions,
    pub cut: CutOptions,
    pub parallel_assembly: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            lambda: 1.0,
            quad_degree: 4,
            solver: SolverOptions::default(),
            cut: CutOptions::default(),
            parallel_assembly: false,
        }
    }
}

/// One mesh of a refinement study.
#[derive(Clone, Debug)]
pub enum MeshLevel {
    /// `n x n` uniform squares, labelled `n`.
    Uniform(usize),
    /// An imported mesh with its `1/h` label.
    Imported { label: usize, mesh: PolygonalMesh },
}

impl MeshLevel {
    /// Wraps an imported mesh, labelled `round(sqrt(#cells))`.
    pub fn imported(mesh: PolygonalMesh) -> Self {
        let label = (mesh.num_cells() as f64).sqrt().round().max(1.0) as usize;
        MeshLevel::Imported { label, mesh }
    }

    pub fn label(&self) -> usize {
        match self {
            MeshLevel::Uniform(n) => *n,
            MeshLevel::Imported { label, .. } => *label,
        }
    }

    fn build(&self) -> Result<std::borrow::Cow<'_, PolygonalMesh>> {
        Ok(match self {
            MeshLevel::Uniform(n) => std::borrow::Cow::Owned(generate_uniform_square_mesh(*n)?),
            MeshLevel::Imported { mesh, .. } => std::borrow::Cow::Borrowed(mesh),
        })
    }
}

/// Builds the discrete space of `mesh` for `problem`.
pub fn build_space<'m>(mesh: &'m PolygonalMesh, problem: &dyn Problem, opts: &RunOptions) -> Result<FeSpace<'m>> {
    let level = |p: Point| problem.level_set(p);
    let beta = |s: Side, p: Point| problem.beta(s, p);
    let cuts = classify_mesh(mesh, &level, &beta, &opts.cut)?;
    FeSpace::new(mesh, cuts, opts.quad_degree)
}

/// Assembles and solves the discrete problem, returning `u_h`.
pub fn solve_discrete(space: &FeSpace<'_>, problem: &dyn Problem, opts: &RunOptions) -> Result<WgFunction> {
    let f = |p: Point| problem.f(p);
    let g = |p: Point| problem.g(p);
    let system = assemble(space, &f, &g, &AssemblyOptions { lambda: opts.lambda, parallel: opts.parallel_assembly })?;
    let x = solve(&system.matrix, &system.rhs, &opts.solver)?;
    Ok(system.expand(space, &x))
}

/// Measurements on one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub inv_h: usize,
    pub max_diameter: f64,
    pub num_cells: usize,
    pub num_interface_cells: usize,
    pub num_unknowns: usize,
    /// `|u_h - Q_h u|_{1,h}`
    pub h1_error: f64,
    /// `||u_0 - Q_0 u||_0`
    pub l2_error: f64,
    /// `|||u_h - Q_h u|||`
    pub energy_error: f64,
}

pub fn solve_level(problem: &dyn Problem, level: &MeshLevel, opts: &RunOptions) -> Result<LevelReport> {
    let mesh = level.build()?;
    let space = build_space(&mesh, problem, opts)?;
    let uh = solve_discrete(&space, problem, opts)?;
    let qhu = project_qh_with_degree(&space, &|p| problem.u(p), ERROR_QUAD_DEGREE)?;
    let diff = uh.sub(&qhu);
    Ok(LevelReport {
        inv_h: level.label(),
        max_diameter: mesh.max_diameter(),
        num_cells: mesh.num_cells(),
        num_interface_cells: space.num_interface_elements(),
        num_unknowns: space.dofs.total() - space.dofs.num_boundary(),
        h1_error: discrete_h1_seminorm(&space, &diff, opts.lambda),
        l2_error: l2_error_v0(&space, &uh.v0, &qhu.v0),
        energy_error: energy_norm(&space, &diff, opts.lambda)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceResult {
    pub rows: Vec<ErrorRow>,
    pub levels: Vec<LevelReport>,
}

/// Validates the problem, then solves every level and fills in the orders.
/// With `parallel_levels` the levels run on separate threads; results are
/// identical to the sequential run.
pub fn run_convergence(
    problem: &dyn Problem,
    levels: &[MeshLevel],
    opts: &RunOptions,
    parallel_levels: bool,
) -> Result<ConvergenceResult> {
    validate_problem(problem)?;
    let reports: Vec<LevelReport> = if parallel_levels && levels.len() > 1 {
        thread::scope(|scope| {
            let handles: Vec<_> =
                levels.iter().map(|level| scope.spawn(move || solve_level(problem, level, opts))).collect();
            handles.into_iter().map(|h| h.join().expect("level worker panicked")).collect::<Result<Vec<_>>>()
        })?
    } else {
        levels.iter().map(|level| solve_level(problem, level, opts)).collect::<Result<Vec<_>>>()?
    };
    let mut rows: Vec<ErrorRow> = reports.iter().map(|r| ErrorRow::new(r.inv_h, r.h1_error, r.l2_error)).collect();
    convergence_orders(&mut rows)?;
    Ok(ConvergenceResult { rows, levels: reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::CircleProblem;

    #[test]
    fn imported_label() {
        let mesh = generate_uniform_square_mesh(5).unwrap();
        assert_eq!(MeshLevel::imported(mesh).label(), 5);
    }

    #[test]
    fn coarse_circle_run() {
        let p = CircleProblem::new(1.0, 10.0).unwrap();
        let levels = [MeshLevel::Uniform(4), MeshLevel::Uniform(8)];
        let res = run_convergence(&p, &levels, &RunOptions::default(), false).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert!(res.rows[0].h1_order.is_none() && res.rows[1].h1_order.is_some());
        assert!(res.rows.iter().all(|r| r.h1_error > 0.0 && r.l2_error > 0.0));
        let par = run_convergence(&p, &levels, &RunOptions::default(), true).unwrap();
        assert_eq!(res, par);
    }
}
