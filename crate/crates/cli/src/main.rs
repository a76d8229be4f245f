use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iwg_core::norms::format_table;
use iwg_core::{
    generate_uniform_square_mesh, load_polygon_mesh, run_convergence, validate_mesh, write_csv, CircleProblem, Error,
    MeshLevel, PolygonalMesh, Problem, RunOptions, SharpEdgeProblem, SolverKind, SolverOptions,
    VariableCoefficientProblem,
};

#[derive(Parser, Debug)]
#[command(name = "iwg", version, about = "Immersed weak Galerkin solver for elliptic interface problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one mesh and report its errors.
    Solve(SolveArgs),
    /// Run a refinement study and print the error table.
    Convergence(ConvergenceArgs),
    /// Report shape-regularity diagnostics of a mesh.
    ValidateMesh(ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Example {
    Circle,
    Sharp,
    Variable,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeshFamily {
    M1,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Solver {
    Cholesky,
    Cg,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value = "circle")]
    example: Example,
    /// beta on the outer region (circle example only; default 1)
    #[arg(long)]
    beta_plus: Option<f64>,
    /// beta on the inner region (circle example only; default 10)
    #[arg(long)]
    beta_minus: Option<f64>,
    /// Stabilisation parameter.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 4)]
    quad_degree: usize,
    /// Defaults to Cholesky up to 200000 unknowns, CG beyond.
    #[arg(long, value_enum)]
    solver: Option<Solver>,
    /// Relative residual tolerance for CG.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Cells per side of the uniform square mesh.
    #[arg(long, default_value_t = 16, conflicts_with = "mesh_file")]
    level: usize,
    /// Polygon mesh file instead of a uniform mesh.
    #[arg(long)]
    mesh_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "m1")]
    mesh: MeshFamily,
    /// Polygon mesh files, coarsest first; replaces the uniform family.
    #[arg(long, num_args = 1.., conflicts_with = "levels")]
    mesh_file: Vec<PathBuf>,
    /// Uniform levels (cells per side), increasing.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256")]
    levels: Vec<usize>,
    /// Levels above this are skipped.
    #[arg(long, default_value_t = 64)]
    max_level: usize,
    /// Write the table as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve the levels concurrently.
    #[arg(long)]
    parallel_levels: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Polygon mesh file; a uniform mesh is checked when omitted.
    mesh_file: Option<PathBuf>,
    #[arg(long, default_value_t = 16, conflicts_with = "mesh_file")]
    level: usize,
    /// Shape-regularity threshold for edge and star-ball ratios.
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Convergence(args) => convergence(&args),
        Command::ValidateMesh(args) => validate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn build_problem(args: &ProblemArgs) -> Result<Box<dyn Problem>, Error> {
    match args.example {
        Example::Circle => {
            let p = CircleProblem::new(args.beta_plus.unwrap_or(1.0), args.beta_minus.unwrap_or(10.0))?;
            Ok(Box::new(p))
        }
        Example::Sharp | Example::Variable if args.beta_plus.is_some() || args.beta_minus.is_some() => {
            Err(config("--beta-plus/--beta-minus only apply to the circle example"))
        }
        Example::Sharp => Ok(Box::new(SharpEdgeProblem::default())),
        Example::Variable => Ok(Box::new(VariableCoefficientProblem)),
    }
}

fn run_options(args: &ProblemArgs) -> Result<RunOptions, Error> {
    if !(args.lambda > 0.0 && args.lambda.is_finite()) {
        return Err(config("--lambda must be positive"));
    }
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(config("--tol must lie in (0, 1)"));
    }
    if args.quad_degree == 0 {
        return Err(config("--quad-degree must be at least 1"));
    }
    let kind = args.solver.map(|s| match s {
        Solver::Cholesky => SolverKind::Cholesky,
        Solver::Cg => SolverKind::Cg,
    });
    Ok(RunOptions {
        lambda: args.lambda,
        quad_degree: args.quad_degree,
        solver: SolverOptions { kind, tol: args.tol, ..Default::default() },
        ..Default::default()
    })
}

fn read_mesh(path: &Path) -> Result<PolygonalMesh, Error> {
    let file = File::open(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    load_polygon_mesh(BufReader::new(file))
}

fn solve(args: &SolveArgs) -> Result<(), Error> {
    let problem = build_problem(&args.problem)?;
    let opts = run_options(&args.problem)?;
    let level = match &args.mesh_file {
        Some(path) => MeshLevel::imported(read_mesh(path)?),
        None if args.level == 0 => return Err(config("--level must be positive")),
        None => MeshLevel::Uniform(args.level),
    };
    let res = run_convergence(problem.as_ref(), std::slice::from_ref(&level), &opts, false)?;
    let r = &res.levels[0];
    let mut out = io::stdout().lock();
    writeln!(out, "example            {}", problem.name())?;
    writeln!(out, "cells              {}", r.num_cells)?;
    writeln!(out, "interface cells    {}", r.num_interface_cells)?;
    writeln!(out, "unknowns           {}", r.num_unknowns)?;
    writeln!(out, "max diameter       {:.6e}", r.max_diameter)?;
    writeln!(out, "|u_h - Q_h u|_1,h  {:.6e}", r.h1_error)?;
    writeln!(out, "||u_0 - Q_0 u||    {:.6e}", r.l2_error)?;
    writeln!(out, "|||u_h - Q_h u|||  {:.6e}", r.energy_error)?;
    Ok(())
}

fn convergence(args: &ConvergenceArgs) -> Result<(), Error> {
    let problem = build_problem(&args.problem)?;
    let opts = run_options(&args.problem)?;
    let levels: Vec<MeshLevel> = if args.mesh_file.is_empty() {
        let MeshFamily::M1 = args.mesh;
        if args.levels.contains(&0) || args.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config("--levels must be positive and strictly increasing"));
        }
        args.levels.iter().filter(|&&n| n <= args.max_level).map(|&n| MeshLevel::Uniform(n)).collect()
    } else {
        args.mesh_file.iter().map(|p| read_mesh(p).map(MeshLevel::imported)).collect::<Result<_, _>>()?
    };
    if levels.is_empty() {
        return Err(config("no levels left to run (check --levels and --max-level)"));
    }
    let res = run_convergence(problem.as_ref(), &levels, &opts, args.parallel_levels)?;
    print!("{}", format_table(&res.rows));
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        write_csv(&res.rows, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<(), Error> {
    if !(args.rho > 0.0 && args.rho < 1.0) {
        return Err(config("--rho must lie in (0, 1)"));
    }
    let mesh = match &args.mesh_file {
        Some(path) => read_mesh(path)?,
        None => generate_uniform_square_mesh(args.level)?,
    };
    let q = validate_mesh(&mesh, args.rho);
    let mut out = io::stdout().lock();
    writeln!(out, "vertices {}  edges {}  cells {}", mesh.num_vertices(), mesh.num_edges(), mesh.num_cells())?;
    writeln!(out, "boundary edges {}  area {:.12}", mesh.num_boundary_edges(), mesh.total_area())?;
    writeln!(out, "max vertices per cell {}", q.max_vertices)?;
    writeln!(out, "min edge ratio {:.4}  min star-ball ratio {:.4}", q.min_edge_ratio, q.min_ball_ratio)?;
    writeln!(out, "cells below rho={}: short edges {:?}, star-shape {:?}", q.rho, q.violations, q.star_violations)?;
    Ok(())
}
