//! Reference computations written independently of the library's operator
//! and quadrature code.

use iwg_core::interface::{ElementCut, Side};
use iwg_core::space::{Element, FeSpace};
use iwg_core::Point;
use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

/// `n`-point Gauss-Legendre nodes and weights on `[0, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 + x), 0.5 * w));
    }
    out
}

/// Integral over a triangle by a collapsed tensor Gauss rule.
pub fn triangle_integral(a: Point, b: Point, c: Point, f: &dyn Fn(Point) -> f64, n: usize) -> f64 {
    let gl = gauss_legendre(n);
    let jac = ((b - a).cross(c - a)).abs();
    let mut s = 0.0;
    for &(u, wu) in &gl {
        for &(v, wv) in &gl {
            // (u, v) in the square -> (u (1 - v), u v) in the reference triangle
            let (xi, eta) = (u * (1.0 - v), u * v);
            let p = a + (b - a) * xi + (c - a) * eta;
            s += wu * wv * u * f(p);
        }
    }
    s * jac
}

/// Fan from the first vertex; exact for polynomials of degree below `2n`
/// on convex polygons.
pub fn subdivision_integral(poly: &[Point], f: &dyn Fn(Point) -> f64, n: usize) -> f64 {
    (1..poly.len() - 1).map(|k| triangle_integral(poly[0], poly[k], poly[k + 1], f, n)).sum()
}

/// `int_P x^a y^b` by Green's theorem: `int x^a y^b dA = oint x^{a+1} y^b / (a+1) dy`,
/// evaluated edge by edge with Gauss-Legendre exact for the polynomial degree.
pub fn green_monomial(poly: &[Point], a: i32, b: i32) -> f64 {
    let gl = gauss_legendre(((a + b) as usize + 2) / 2 + 1);
    let n = poly.len();
    let mut s = 0.0;
    for k in 0..n {
        let (p, q) = (poly[k], poly[(k + 1) % n]);
        let dy = q.y - p.y;
        for &(t, w) in &gl {
            let x = p.x + t * (q.x - p.x);
            let y = p.y + t * (q.y - p.y);
            s += w * x.powi(a + 1) * y.powi(b) / (a as f64 + 1.0) * dy;
        }
    }
    s
}

struct OracleBasis {
    x0: Point,
    normal: Point,
    tangent: Point,
    beta: [f64; 2],
    broken: bool,
}

fn idx(s: Side) -> usize {
    if s == Side::Plus {
        0
    } else {
        1
    }
}

impl OracleBasis {
    fn of(element: &Element) -> Self {
        match &element.cut {
            ElementCut::Interface(c) => OracleBasis {
                x0: c.x0,
                normal: c.normal,
                tangent: c.tangent,
                beta: [c.beta_plus, c.beta_minus],
                broken: true,
            },
            ElementCut::NonInterface { beta, .. } => OracleBasis {
                x0: element.centroid,
                normal: Point::new(0.0, 1.0),
                tangent: Point::new(1.0, 0.0),
                beta: [*beta, *beta],
                broken: false,
            },
        }
    }

    fn grad(&self, s: Side, i: usize) -> Point {
        let div = if self.broken { self.beta[idx(s)] } else { 1.0 };
        match i {
            0 => Point::ZERO,
            1 => self.tangent,
            _ => self.normal * (1.0 / div),
        }
    }

    fn value(&self, s: Side, i: usize, p: Point) -> f64 {
        let d = p - self.x0;
        match i {
            0 => 1.0,
            1 => self.tangent.dot(d),
            _ => self.grad(s, 2).dot(d),
        }
    }
}

/// Local stiffness built directly from the weak-gradient identity, with edge
/// integrals by Gauss-Legendre on each piece and nalgebra solves.
pub fn oracle_local_matrix(element: &Element, lambda: f64) -> DMatrix<f64> {
    let basis = OracleBasis::of(element);
    let nloc = 3 + element.edges.len();
    let gl = gauss_legendre(4);

    let mut m = Matrix2::zeros();
    for part in &element.parts {
        let area: f64 = part.rule.weights.iter().sum();
        let b = basis.beta[idx(part.side)];
        for j in 0..2 {
            for k in 0..2 {
                m[(j, k)] += b * area * basis.grad(part.side, j + 1).dot(basis.grad(part.side, k + 1));
            }
        }
    }

    // edge averages of each interior basis function
    let edge_avg: Vec<[f64; 3]> = element
        .edges
        .iter()
        .map(|e| {
            let mut avg = [0.0; 3];
            for piece in &e.pieces {
                let len = piece.a.distance(piece.b);
                for &(t, w) in &gl {
                    let p = piece.a + (piece.b - piece.a) * t;
                    for (i, a) in avg.iter_mut().enumerate() {
                        *a += w * len * basis.value(piece.side, i, p);
                    }
                }
            }
            avg.map(|v| v / e.length)
        })
        .collect();

    // weak gradient coefficients of each local unit vector
    let minv = m.try_inverse().expect("invertible Gram");
    let mut w = Vec::with_capacity(nloc);
    #[allow(clippy::needless_range_loop)]
    for dof in 0..nloc {
        let mut rhs = Vector2::zeros();
        for j in 0..2 {
            let q = j + 1;
            if dof < 3 {
                for part in &element.parts {
                    let area: f64 = part.rule.weights.iter().sum();
                    rhs[j] +=
                        basis.beta[idx(part.side)] * area * basis.grad(part.side, dof).dot(basis.grad(part.side, q));
                }
            }
            for (k, e) in element.edges.iter().enumerate() {
                let mismatch = if dof < 3 {
                    edge_avg[k][dof]
                } else if dof - 3 == k {
                    -1.0
                } else {
                    0.0
                };
                for piece in &e.pieces {
                    let len = piece.a.distance(piece.b);
                    let flux = basis.beta[idx(piece.side)] * basis.grad(piece.side, q).dot(e.normal);
                    rhs[j] -= mismatch * flux * len;
                }
            }
        }
        w.push(minv * rhs);
    }

    let poly: Vec<Point> = element.parts.iter().flat_map(|p| p.polygon.iter().copied()).collect();
    let h = poly.iter().flat_map(|a| poly.iter().map(move |b| a.distance(*b))).fold(0.0, f64::max);

    let mut a = DMatrix::zeros(nloc, nloc);
    for i in 0..nloc {
        for j in 0..nloc {
            let mut v = 0.0;
            for part in &element.parts {
                let area: f64 = part.rule.weights.iter().sum();
                let gi = basis.grad(part.side, 1) * w[i][0] + basis.grad(part.side, 2) * w[i][1];
                let gj = basis.grad(part.side, 1) * w[j][0] + basis.grad(part.side, 2) * w[j][1];
                v += basis.beta[idx(part.side)] * area * gi.dot(gj);
            }
            for (k, e) in element.edges.iter().enumerate() {
                let s = |d: usize| {
                    if d < 3 {
                        edge_avg[k][d]
                    } else if d - 3 == k {
                        -1.0
                    } else {
                        0.0
                    }
                };
                v += lambda / h * e.length * s(i) * s(j);
            }
            a[(i, j)] = v;
        }
    }
    a
}

/// Dense global matrix without boundary elimination.
pub fn oracle_global_matrix(space: &FeSpace<'_>, lambda: f64) -> DMatrix<f64> {
    let nc = space.elements.len();
    let n = 3 * nc + space.mesh.num_edges();
    let mut a = DMatrix::zeros(n, n);
    for element in &space.elements {
        let local = oracle_local_matrix(element, lambda);
        let mut dofs: Vec<usize> = (0..3).map(|i| 3 * element.cell + i).collect();
        dofs.extend(element.edges.iter().map(|e| 3 * nc + e.edge));
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                a[(gi, gj)] += local[(i, j)];
            }
        }
    }
    a
}

/// Dense Gaussian elimination with partial pivoting.
pub fn gaussian_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs())).unwrap();
        m.swap_rows(col, piv);
        x.swap_rows(col, piv);
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            if f != 0.0 {
                for c in col..n {
                    m[(r, c)] -= f * m[(col, c)];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for c in r + 1..n {
            s -= m[(r, c)] * x[c];
        }
        x[r] = s / m[(r, r)];
    }
    x
}
