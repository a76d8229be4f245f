//! Quadrature on polygons and segments.
//!
//! Polygons are fan-triangulated from their area centroid and each triangle
//! receives a symmetric Gauss rule with positive weights.

use crate::error::{Error, Result};
use crate::point::{polygon_centroid, signed_area, Point};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Barycentric points and weights (summing to one) of a triangle rule.
struct TriangleRule {
    bary: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl TriangleRule {
    fn new() -> Self {
        TriangleRule { bary: Vec::new(), weights: Vec::new() }
    }

    fn centroid(mut self, w: f64) -> Self {
        self.bary.push([1.0 / 3.0; 3]);
        self.weights.push(w);
        self
    }

    /// Orbit of (a, a, 1 - 2a).
    fn orbit3(mut self, a: f64, w: f64) -> Self {
        let b = 1.0 - 2.0 * a;
        for bc in [[b, a, a], [a, b, a], [a, a, b]] {
            self.bary.push(bc);
            self.weights.push(w);
        }
        self
    }

    /// Orbit of (a, b, 1 - a - b) with distinct entries.
    fn orbit6(mut self, a: f64, b: f64, w: f64) -> Self {
        let c = 1.0 - a - b;
        for bc in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.bary.push(bc);
            self.weights.push(w);
        }
        self
    }
}

fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    let rule = match degree {
        1 => TriangleRule::new().centroid(1.0),
        2 => TriangleRule::new().orbit3(1.0 / 6.0, 1.0 / 3.0),
        // Strang-Fix / Dunavant 6-point rule, exact for degree 4
        3 | 4 => TriangleRule::new()
            .orbit3(0.445_948_490_915_965, 0.223_381_589_678_011)
            .orbit3(0.091_576_213_509_771, 0.109_951_743_655_322),
        // Radon 7-point rule
        5 => {
            let s = 15f64.sqrt();
            TriangleRule::new()
                .centroid(9.0 / 40.0)
                .orbit3((6.0 - s) / 21.0, (155.0 - s) / 1200.0)
                .orbit3((6.0 + s) / 21.0, (155.0 + s) / 1200.0)
        }
        // Dunavant 12-point rule
        6 => TriangleRule::new()
            .orbit3(0.249_286_745_170_910, 0.116_786_275_726_379)
            .orbit3(0.063_089_014_491_502, 0.050_844_906_370_207)
            .orbit6(0.053_145_049_844_817, 0.310_352_451_033_784, 0.082_851_075_618_374),
        _ => return Err(Error::InvalidArgument(format!("quadrature degree must be in 1..=6, got {degree}"))),
    };
    Ok(rule)
}

/// Quadrature rule on a simple counter-clockwise polygon, exact for
/// polynomials up to `degree` (1..=6).
pub fn polygon_quadrature(polygon: &[Point], degree: usize) -> Result<QuadratureRule> {
    let area = signed_area(polygon);
    if !(area.abs() >= 1e-300) {
        return Err(Error::DegeneratePolygon { area });
    }
    let rule = triangle_rule(degree)?;
    let center = polygon_centroid(polygon);
    let n = polygon.len();
    let mut out = QuadratureRule {
        points: Vec::with_capacity(n * rule.weights.len()),
        weights: Vec::with_capacity(n * rule.weights.len()),
    };
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let tri_area = 0.5 * (a - center).cross(b - center);
        if tri_area == 0.0 {
            continue;
        }
        for (bc, &w) in rule.bary.iter().zip(&rule.weights) {
            out.points.push(Point::new(
                bc[0] * center.x + bc[1] * a.x + bc[2] * b.x,
                bc[0] * center.y + bc[1] * a.y + bc[2] * b.y,
            ));
            out.weights.push(w * tri_area);
        }
    }
    Ok(out)
}

/// Five-point Gauss-Legendre rule on `[0, 1]` (exact to degree 9).
pub fn gauss_legendre_unit() -> [(f64, f64); 5] {
    let r = (10.0f64 / 7.0).sqrt();
    let x1 = (5.0 - 2.0 * r).sqrt() / 3.0;
    let x2 = (5.0 + 2.0 * r).sqrt() / 3.0;
    let s70 = 70f64.sqrt();
    let w0 = 128.0 / 225.0;
    let w1 = (322.0 + 13.0 * s70) / 900.0;
    let w2 = (322.0 - 13.0 * s70) / 900.0;
    // map from [-1, 1] to [0, 1]: t = (1 + x) / 2, weight / 2
    [
        (0.5 * (1.0 - x2), 0.5 * w2),
        (0.5 * (1.0 - x1), 0.5 * w1),
        (0.5, 0.5 * w0),
        (0.5 * (1.0 + x1), 0.5 * w1),
        (0.5 * (1.0 + x2), 0.5 * w2),
    ]
}

/// Integral of `f` over the segment `[a, b]` (with respect to arc length).
pub fn integrate_segment(a: Point, b: Point, f: impl Fn(Point) -> f64) -> f64 {
    let len = a.distance(b);
    gauss_legendre_unit().iter().map(|&(t, w)| w * f(a.lerp(b, t))).sum::<f64>() * len
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]
    }

    #[test]
    fn weights_sum_to_area() {
        for d in 1..=6 {
            let q = polygon_quadrature(&unit_square(), d).unwrap();
            assert!((q.total_weight() - 1.0).abs() < 1e-14, "degree {d}");
            assert!(q.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn square_monomials() {
        let q = polygon_quadrature(&unit_square(), 2).unwrap();
        assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!((q.integrate(|p| p.x * p.x) - 1.0 / 3.0).abs() < 1e-15);
        let q = polygon_quadrature(&unit_square(), 6).unwrap();
        // int x^3 y^3 = 1/16
        assert!((q.integrate(|p| (p.x * p.y).powi(3)) - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(polygon_quadrature(&unit_square(), 7), Err(Error::InvalidArgument(_))));
        let flat = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert!(matches!(polygon_quadrature(&flat, 2), Err(Error::DegeneratePolygon { .. })));
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_9() {
        for k in 0..=9 {
            let v: f64 = gauss_legendre_unit().iter().map(|&(t, w)| w * t.powi(k)).sum();
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-15, "degree {k}");
        }
        let s = integrate_segment(Point::new(0.0, 0.0), Point::new(1.0, 0.0), |p| p.x);
        assert!((s - 0.5).abs() < 1e-15);
    }
}
