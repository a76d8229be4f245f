//! Shared fixtures for the benchmarks.

use iwg_core::experiment::build_space;
use iwg_core::operator::{assemble, AssemblyOptions, GlobalSystem};
use iwg_core::{generate_uniform_square_mesh, PolygonalMesh, Problem, RunOptions};

pub fn mesh(n: usize) -> PolygonalMesh {
    generate_uniform_square_mesh(n).expect("uniform mesh")
}

/// Classifies, builds the space and assembles the reduced system.
pub fn system(problem: &dyn Problem, mesh: &PolygonalMesh, parallel: bool) -> GlobalSystem {
    let space = build_space(mesh, problem, &RunOptions::default()).expect("space");
    let f = |x| problem.f(x);
    let g = |x| problem.g(x);
    assemble(&space, &f, &g, &AssemblyOptions { lambda: 1.0, parallel }).expect("assembly")
}
