//! Immersed weak Galerkin solver for `-div(beta grad u) = f` with an interface
//! that cuts through a polygonal mesh.
//!
//! Pipeline: build or load a [`PolygonalMesh`], classify its cells against a
//! level set ([`classify_mesh`]), build the discrete space ([`FeSpace`]),
//! [`assemble`] the reduced system, [`solve`] it, and measure errors with the
//! routines in [`norms`].

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod experiment;
pub mod interface;
pub mod mesh;
pub mod norms;
pub mod operator;
pub mod point;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;

pub use error::{Error, Result};
pub use experiment::{
    build_space, run_convergence, solve_discrete, solve_level, ConvergenceResult, LevelReport, MeshLevel, RunOptions,
};
pub use interface::{
    classify_element, classify_mesh, Coefficient, CutOptions, ElementCut, InterfaceCut, LevelSet, Side,
};
pub use mesh::{
    generate_uniform_square_mesh, load_polygon_mesh, validate_mesh, write_polygon_mesh, MeshQualityReport,
    PolygonalMesh,
};
pub use norms::{
    convergence_orders, discrete_h1_seminorm, energy_norm, l2_error_v0, least_squares_slope, projection_errors,
    write_csv, ErrorRow, ProjectionErrors,
};
pub use operator::{
    assemble, assemble_full_matrix, local_stiffness, local_weak_gradient, AssemblyOptions, GlobalSystem,
};
pub use point::Point;
pub use problems::{
    validate_problem, BuiltinProblem, CircleProblem, Problem, SharpEdgeProblem, VariableCoefficientProblem,
};
pub use quadrature::{polygon_quadrature, QuadratureRule};
pub use solver::{solve, solve_cholesky, solve_pcg, SolverKind, SolverOptions};
pub use space::{build_dof_map, project_q0, project_qh, DofMap, Element, ElementBasis, FeSpace, WgFunction};
pub use sparse::SparseSymmetric;
