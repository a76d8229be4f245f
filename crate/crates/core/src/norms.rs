//! Error measures, convergence orders, and table output.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::operator::{local_stiffness, local_weak_gradient};
use crate::point::Point;
use crate::quadrature::polygon_quadrature;
use crate::space::{project_q0_with_degree, FeSpace, WgFunction};

/// `|v|_{1,h}`: broken gradient of `v0` plus the scaled edge mismatch.
pub fn discrete_h1_seminorm(space: &FeSpace<'_>, v: &WgFunction, lambda: f64) -> f64 {
    let mut sum = 0.0;
    for element in &space.elements {
        let c = &v.v0[element.cell];
        for part in &element.parts {
            let g = element.basis.gradients_on(part.side);
            let grad = g[0] * c[0] + g[1] * c[1] + g[2] * c[2];
            sum += part.area * grad.dot(grad);
        }
        let scale = lambda / element.diameter;
        for (k, edge) in element.edges.iter().enumerate() {
            let jump = element.edge_average(k, c) - v.vb[edge.edge];
            sum += scale * edge.length * jump * jump;
        }
    }
    sum.sqrt()
}

/// `||a - b||_0` for two interior coefficient fields, through the element mass matrices.
pub fn l2_error_v0(space: &FeSpace<'_>, a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    assert_eq!(a.len(), space.elements.len());
    assert_eq!(b.len(), space.elements.len());
    let mut sum = 0.0;
    for element in &space.elements {
        let (x, y) = (a[element.cell], b[element.cell]);
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        let m = element.mass_matrix();
        for i in 0..3 {
            for j in 0..3 {
                sum += d[i] * m[i][j] * d[j];
            }
        }
    }
    sum.max(0.0).sqrt()
}

/// `|||v||| = sqrt(a_s(v, v))`, accumulated element by element.
pub fn energy_norm(space: &FeSpace<'_>, v: &WgFunction, lambda: f64) -> Result<f64> {
    let mut sum = 0.0;
    for element in &space.elements {
        let lwg = local_weak_gradient(element)?;
        let a = local_stiffness(element, &lwg, lambda).total();
        sum += a.quadratic_form(&v.local(element));
    }
    Ok(sum.max(0.0).sqrt())
}

/// Projection errors `||u - Q_0 u||_0` and the broken seminorm `|u - Q_0 u|_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionErrors {
    pub l2: f64,
    pub h1: f64,
}

/// Measures how well `Q_0` approximates `u`. `u` and `grad_u` are evaluated
/// on the true side of the interface; `Q_0 u` uses the chord branch.
pub fn projection_errors(
    space: &FeSpace<'_>,
    u: &dyn Fn(Point) -> f64,
    grad_u: &dyn Fn(Point) -> Point,
    degree: usize,
) -> Result<ProjectionErrors> {
    let (mut l2, mut h1) = (0.0, 0.0);
    for element in &space.elements {
        let c = project_q0_with_degree(element, u, degree)?;
        for part in &element.parts {
            let rule = polygon_quadrature(&part.polygon, degree)?;
            let g = element.basis.gradients_on(part.side);
            let grad_q = g[0] * c[0] + g[1] * c[1] + g[2] * c[2];
            for (p, w) in rule.iter() {
                let v = element.basis.values_on(part.side, p);
                let e = u(p) - (c[0] * v[0] + c[1] * v[1] + c[2] * v[2]);
                let ge = grad_u(p) - grad_q;
                l2 += w * e * e;
                h1 += w * ge.dot(ge);
            }
        }
    }
    Ok(ProjectionErrors { l2: l2.sqrt(), h1: h1.sqrt() })
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    pub inv_h: usize,
    pub h1_error: f64,
    pub h1_order: Option<f64>,
    pub l2_error: f64,
    pub l2_order: Option<f64>,
}

impl ErrorRow {
    pub fn new(inv_h: usize, h1_error: f64, l2_error: f64) -> Self {
        ErrorRow { inv_h, h1_error, h1_order: None, l2_error, l2_order: None }
    }
}

/// `log2(e_{k-1} / e_k)` for consecutive errors; the first entry is `None`.
pub fn log2_orders(errors: &[f64]) -> Result<Vec<Option<f64>>> {
    let inv_h: Vec<f64> = (0..errors.len()).map(|k| 2f64.powi(k as i32)).collect();
    orders(errors, &inv_h)
}

fn orders(errors: &[f64], inv_h: &[f64]) -> Result<Vec<Option<f64>>> {
    if let Some(row) = errors.iter().position(|&e| e == 0.0) {
        return Err(Error::ExactError { row });
    }
    let mut out = vec![None; errors.len()];
    for k in 1..errors.len() {
        out[k] = Some((errors[k - 1] / errors[k]).ln() / (inv_h[k] / inv_h[k - 1]).ln());
    }
    Ok(out)
}

/// Fills the order columns. For a halving sequence this is `log2(e_{k-1}/e_k)`;
/// other refinement ratios use `ln(e_{k-1}/e_k) / ln(N_k/N_{k-1})`.
pub fn convergence_orders(rows: &mut [ErrorRow]) -> Result<()> {
    let inv_h: Vec<f64> = rows.iter().map(|r| r.inv_h as f64).collect();
    let h1: Vec<f64> = rows.iter().map(|r| r.h1_error).collect();
    let l2: Vec<f64> = rows.iter().map(|r| r.l2_error).collect();
    let (h1o, l2o) = (orders(&h1, &inv_h)?, orders(&l2, &inv_h)?);
    for (k, row) in rows.iter_mut().enumerate() {
        row.h1_order = h1o[k];
        row.l2_order = l2o[k];
    }
    Ok(())
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn least_squares_slope(h: &[f64], errors: &[f64]) -> Result<f64> {
    if h.len() != errors.len() || h.len() < 2 {
        return Err(Error::InvalidArgument("slope needs at least two (h, error) pairs".into()));
    }
    if let Some(row) = errors.iter().position(|&e| e <= 0.0) {
        return Err(Error::ExactError { row });
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("mesh sizes must not all be equal".into()));
    }
    Ok(sxy / sxx)
}

/// Slopes of both error columns against `h = 1 / inv_h`.
pub fn table_slopes(rows: &[ErrorRow]) -> Result<(f64, f64)> {
    let h: Vec<f64> = rows.iter().map(|r| 1.0 / r.inv_h as f64).collect();
    let h1: Vec<f64> = rows.iter().map(|r| r.h1_error).collect();
    let l2: Vec<f64> = rows.iter().map(|r| r.l2_error).collect();
    Ok((least_squares_slope(&h, &h1)?, least_squares_slope(&h, &l2)?))
}

pub const CSV_HEADER: &str = "inv_h,h1_error,h1_order,l2_error,l2_order";

fn fmt_order(o: Option<f64>) -> String {
    o.map(|v| format!("{v:.4}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ErrorRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.6e},{},{:.6e},{}",
            r.inv_h,
            r.h1_error,
            fmt_order(r.h1_order),
            r.l2_error,
            fmt_order(r.l2_order)
        )?;
    }
    Ok(())
}

/// Fixed-width table for terminal output.
pub fn format_table(rows: &[ErrorRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>6}  {:>12}  {:>7}  {:>12}  {:>7}", "1/h", "|u_h-Q_hu|", "order", "||u0-Q0u||", "order");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>6}  {:>12.4e}  {:>7}  {:>12.4e}  {:>7}",
            r.inv_h,
            r.h1_error,
            fmt_order(r.h1_order),
            r.l2_error,
            fmt_order(r.l2_order)
        );
    }
    s
}
