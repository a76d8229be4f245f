//! Benchmark interface problems with closed-form solutions.
//!
//! Each problem is described side by side: `u`, `grad u`, and `f` are given
//! for a chosen side, and the side-free accessors pick the side from the sign
//! of the level set.

use crate::error::{Error, Result};
use crate::interface::Side;
use crate::point::Point;

pub trait Problem: Sync {
    fn name(&self) -> &'static str;
    fn level_set(&self, p: Point) -> f64;
    fn level_set_gradient(&self, p: Point) -> Point;
    fn beta(&self, side: Side, p: Point) -> f64;
    fn u_side(&self, side: Side, p: Point) -> f64;
    fn grad_u_side(&self, side: Side, p: Point) -> Point;
    fn f_side(&self, side: Side, p: Point) -> f64;
    /// `n` points on the interface inside the unit square.
    fn interface_points(&self, n: usize) -> Vec<Point>;

    fn side(&self, p: Point) -> Side {
        Side::of(self.level_set(p))
    }

    fn u(&self, p: Point) -> f64 {
        self.u_side(self.side(p), p)
    }

    fn grad_u(&self, p: Point) -> Point {
        self.grad_u_side(self.side(p), p)
    }

    fn f(&self, p: Point) -> f64 {
        self.f_side(self.side(p), p)
    }

    /// Dirichlet data.
    fn g(&self, p: Point) -> f64 {
        self.u(p)
    }
}

const CENTER: Point = Point { x: 0.5, y: 0.5 };

/// Circle of radius 0.4 about the centre, `u = (r^2 - r0^2)^3 / beta`,
/// with the `+` side outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleProblem {
    pub beta_plus: f64,
    pub beta_minus: f64,
}

impl CircleProblem {
    pub const RADIUS: f64 = 0.4;

    pub fn new(beta_plus: f64, beta_minus: f64) -> Result<Self> {
        if !(beta_plus > 0.0 && beta_minus > 0.0 && beta_plus.is_finite() && beta_minus.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coefficients must be positive and finite, got ({beta_plus}, {beta_minus})"
            )));
        }
        Ok(CircleProblem { beta_plus, beta_minus })
    }

    fn s(p: Point) -> f64 {
        (p - CENTER).dot(p - CENTER) - Self::RADIUS * Self::RADIUS
    }

    fn side_beta(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.beta_plus,
            Side::Minus => self.beta_minus,
        }
    }
}

impl Problem for CircleProblem {
    fn name(&self) -> &'static str {
        "circle"
    }

    fn level_set(&self, p: Point) -> f64 {
        Self::s(p)
    }

    fn level_set_gradient(&self, p: Point) -> Point {
        (p - CENTER) * 2.0
    }

    fn beta(&self, side: Side, _p: Point) -> f64 {
        self.side_beta(side)
    }

    fn u_side(&self, side: Side, p: Point) -> f64 {
        Self::s(p).powi(3) / self.side_beta(side)
    }

    fn grad_u_side(&self, side: Side, p: Point) -> Point {
        (p - CENTER) * (6.0 * Self::s(p).powi(2) / self.side_beta(side))
    }

    fn f_side(&self, _side: Side, p: Point) -> f64 {
        let s = Self::s(p);
        let r2 = (p - CENTER).dot(p - CENTER);
        -(12.0 * s * s + 24.0 * r2 * s)
    }

    fn interface_points(&self, n: usize) -> Vec<Point> {
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
                CENTER + Point::new(t.cos(), t.sin()) * Self::RADIUS
            })
            .collect()
    }
}

/// Teardrop interface with a corner on the right boundary, `u = L / beta`
/// with `beta = 1000` inside the teardrop and `1` outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpEdgeProblem {
    tan2: f64,
}

impl Default for SharpEdgeProblem {
    fn default() -> Self {
        SharpEdgeProblem { tan2: 10f64.to_radians().tan().powi(2) }
    }
}

impl SharpEdgeProblem {
    pub const BETA_PLUS: f64 = 1000.0;
    pub const BETA_MINUS: f64 = 1.0;

    fn side_beta(side: Side) -> f64 {
        match side {
            Side::Plus => Self::BETA_PLUS,
            Side::Minus => Self::BETA_MINUS,
        }
    }
}

impl Problem for SharpEdgeProblem {
    fn name(&self) -> &'static str {
        "sharp"
    }

    fn level_set(&self, p: Point) -> f64 {
        let (a, b) = (2.0 * p.x - 2.0, 2.0 * p.y - 1.0);
        -b * b + self.tan2 * a * a * (2.0 * p.x - 1.0)
    }

    fn level_set_gradient(&self, p: Point) -> Point {
        let a = 2.0 * p.x - 2.0;
        let dx = self.tan2 * (4.0 * a * (2.0 * p.x - 1.0) + 2.0 * a * a);
        Point::new(dx, -4.0 * (2.0 * p.y - 1.0))
    }

    fn beta(&self, side: Side, _p: Point) -> f64 {
        Self::side_beta(side)
    }

    fn u_side(&self, side: Side, p: Point) -> f64 {
        self.level_set(p) / Self::side_beta(side)
    }

    fn grad_u_side(&self, side: Side, p: Point) -> Point {
        self.level_set_gradient(p) * (1.0 / Self::side_beta(side))
    }

    fn f_side(&self, _side: Side, p: Point) -> f64 {
        8.0 - 4.0 * self.tan2 * (12.0 * p.x - 10.0)
    }

    fn interface_points(&self, n: usize) -> Vec<Point> {
        let tan = self.tan2.sqrt();
        (0..n)
            .map(|k| {
                let upper = k % 2 == 0;
                let x = 0.5 + 0.5 * ((k / 2) as f64 + 0.5) / n.div_ceil(2) as f64;
                let dy = (1.0 - x) * tan * (2.0 * x - 1.0).sqrt();
                Point::new(x, if upper { 0.5 + dy } else { 0.5 - dy })
            })
            .collect()
    }
}

/// Ellipse with semi-axes 0.25 and 0.125, `u = L / beta`, where `beta = 1`
/// outside and a positive quadratic inside.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VariableCoefficientProblem;

impl VariableCoefficientProblem {
    const R1: f64 = 0.25;
    const R2: f64 = 0.125;

    fn beta_minus(p: Point) -> f64 {
        let (x, y) = (2.0 * p.x - 1.0, 2.0 * p.y - 1.0);
        1.0 + 0.5 * x * x - x * y + y * y
    }

    fn beta_minus_gradient(p: Point) -> Point {
        let (x, y) = (2.0 * p.x - 1.0, 2.0 * p.y - 1.0);
        Point::new(2.0 * x - 2.0 * y, -2.0 * x + 4.0 * y)
    }

    const BETA_MINUS_LAPLACIAN: f64 = 12.0;
    const LEVEL_SET_LAPLACIAN: f64 = 2.0 / (Self::R1 * Self::R1) + 2.0 / (Self::R2 * Self::R2);
}

impl Problem for VariableCoefficientProblem {
    fn name(&self) -> &'static str {
        "variable"
    }

    fn level_set(&self, p: Point) -> f64 {
        let d = p - CENTER;
        d.x * d.x / (Self::R1 * Self::R1) + d.y * d.y / (Self::R2 * Self::R2) - 1.0
    }

    fn level_set_gradient(&self, p: Point) -> Point {
        let d = p - CENTER;
        Point::new(2.0 * d.x / (Self::R1 * Self::R1), 2.0 * d.y / (Self::R2 * Self::R2))
    }

    fn beta(&self, side: Side, p: Point) -> f64 {
        match side {
            Side::Plus => 1.0,
            Side::Minus => Self::beta_minus(p),
        }
    }

    fn u_side(&self, side: Side, p: Point) -> f64 {
        self.level_set(p) / self.beta(side, p)
    }

    fn grad_u_side(&self, side: Side, p: Point) -> Point {
        let gl = self.level_set_gradient(p);
        match side {
            Side::Plus => gl,
            Side::Minus => {
                let b = Self::beta_minus(p);
                (gl - Self::beta_minus_gradient(p) * (self.level_set(p) / b)) * (1.0 / b)
            }
        }
    }

    fn f_side(&self, side: Side, p: Point) -> f64 {
        match side {
            Side::Plus => -Self::LEVEL_SET_LAPLACIAN,
            Side::Minus => {
                // beta grad u = grad L - u grad beta
                let u = self.u_side(Side::Minus, p);
                -Self::LEVEL_SET_LAPLACIAN
                    + self.grad_u_side(Side::Minus, p).dot(Self::beta_minus_gradient(p))
                    + u * Self::BETA_MINUS_LAPLACIAN
            }
        }
    }

    fn interface_points(&self, n: usize) -> Vec<Point> {
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
                CENTER + Point::new(Self::R1 * t.cos(), Self::R2 * t.sin())
            })
            .collect()
    }
}

/// Built-in problems by command-line name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinProblem {
    Circle(CircleProblem),
    SharpEdge(SharpEdgeProblem),
    Variable(VariableCoefficientProblem),
}

impl BuiltinProblem {
    pub fn as_problem(&self) -> &dyn Problem {
        match self {
            BuiltinProblem::Circle(p) => p,
            BuiltinProblem::SharpEdge(p) => p,
            BuiltinProblem::Variable(p) => p,
        }
    }
}

/// Sample count used by [`validate_problem`].
pub const VALIDATION_SAMPLES: usize = 200;
const JUMP_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-4;

/// Halton point in the unit square (bases 2 and 3).
pub fn halton(index: usize) -> Point {
    fn radical_inverse(mut i: usize, base: usize) -> f64 {
        let (mut r, mut f) = (0.0, 1.0 / base as f64);
        while i > 0 {
            r += f * (i % base) as f64;
            i /= base;
            f /= base as f64;
        }
        r
    }
    Point::new(radical_inverse(index, 2), radical_inverse(index, 3))
}

/// `-div(beta grad u)` on one side by a conservative five-point difference.
pub fn finite_difference_f(problem: &dyn Problem, side: Side, p: Point, h: f64) -> f64 {
    let flux =
        |a: Point, b: Point| problem.beta(side, a.midpoint(b)) * (problem.u_side(side, b) - problem.u_side(side, a));
    let (ex, ey) = (Point::new(h, 0.0), Point::new(0.0, h));
    let div = flux(p, p + ex) - flux(p - ex, p) + flux(p, p + ey) - flux(p - ey, p);
    -div / (h * h)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    pub max_value_jump: f64,
    pub max_flux_jump: f64,
    pub max_f_mismatch: f64,
    pub interface_samples: usize,
    pub interior_samples: usize,
}

/// Checks the jump conditions at interface samples and `f` against a
/// finite-difference divergence at interior samples. Stencils that straddle
/// the interface are skipped.
pub fn validate_problem(problem: &dyn Problem) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        max_value_jump: 0.0,
        max_flux_jump: 0.0,
        max_f_mismatch: 0.0,
        interface_samples: 0,
        interior_samples: 0,
    };

    for p in problem.interface_points(VALIDATION_SAMPLES) {
        let (up, um) = (problem.u_side(Side::Plus, p), problem.u_side(Side::Minus, p));
        let jump = (up - um).abs() / up.abs().max(um.abs()).max(1.0);
        let fp = problem.grad_u_side(Side::Plus, p) * problem.beta(Side::Plus, p);
        let fm = problem.grad_u_side(Side::Minus, p) * problem.beta(Side::Minus, p);
        let gl = problem.level_set_gradient(p);
        let d = fp - fm;
        let flux_jump = if gl.norm() > 1e-12 { d.dot(gl).abs() / gl.norm() } else { d.norm() };
        let flux_jump = flux_jump / fp.norm().max(fm.norm()).max(1.0);
        if !(jump <= JUMP_TOL) {
            return Err(Error::Validation(format!("{}: solution jump {jump:e} at ({}, {})", problem.name(), p.x, p.y)));
        }
        if !(flux_jump <= JUMP_TOL) {
            return Err(Error::Validation(format!(
                "{}: flux jump {flux_jump:e} at ({}, {})",
                problem.name(),
                p.x,
                p.y
            )));
        }
        report.max_value_jump = report.max_value_jump.max(jump);
        report.max_flux_jump = report.max_flux_jump.max(flux_jump);
        report.interface_samples += 1;
    }

    let margin = 2.0 * FD_STEP;
    for k in 1..=VALIDATION_SAMPLES {
        let q = halton(k);
        let p = Point::new(margin + (1.0 - 2.0 * margin) * q.x, margin + (1.0 - 2.0 * margin) * q.y);
        let side = problem.side(p);
        let stencil = [(FD_STEP, 0.0), (-FD_STEP, 0.0), (0.0, FD_STEP), (0.0, -FD_STEP)];
        if stencil.iter().any(|&(dx, dy)| problem.side(p + Point::new(dx, dy)) != side) {
            continue;
        }
        let exact = problem.f_side(side, p);
        let approx = finite_difference_f(problem, side, p, FD_STEP);
        let mismatch = (exact - approx).abs() / exact.abs().max(1.0);
        if !(mismatch <= FD_TOL) {
            return Err(Error::Validation(format!(
                "{}: f = {exact} but finite differences give {approx} at ({}, {})",
                problem.name(),
                p.x,
                p.y
            )));
        }
        report.max_f_mismatch = report.max_f_mismatch.max(mismatch);
        report.interior_samples += 1;
    }
    Ok(report)
}
