use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotation by +90 degrees: (x, y) -> (-y, x).
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new((1.0 - t) * self.x + t * other.x, (1.0 - t) * self.y + t * other.y)
    }

    #[inline]
    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    #[inline]
    fn mul(self, p: Point) -> Point {
        p * self
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Signed area of a closed polygon (positive when counter-clockwise).
pub fn signed_area(polygon: &[Point]) -> f64 {
    let n = polygon.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..n {
        twice += polygon[i].cross(polygon[(i + 1) % n]);
    }
    0.5 * twice
}

/// Area-weighted centroid of a simple polygon.
///
/// Coordinates are shifted to the first vertex before accumulation, which
/// keeps the result accurate for small polygons far from the origin.
pub fn polygon_centroid(polygon: &[Point]) -> Point {
    let n = polygon.len();
    let origin = polygon[0];
    let mut twice_area = 0.0;
    let mut acc = Point::ZERO;
    for i in 0..n {
        let p = polygon[i] - origin;
        let q = polygon[(i + 1) % n] - origin;
        let c = p.cross(q);
        twice_area += c;
        acc += (p + q) * c;
    }
    if twice_area.abs() <= f64::MIN_POSITIVE {
        // Degenerate: fall back to the vertex average.
        let mut s = Point::ZERO;
        for &p in polygon {
            s += p;
        }
        return s * (1.0 / n as f64);
    }
    origin + acc * (1.0 / (3.0 * twice_area))
}

/// Largest distance between any two vertices.
pub fn polygon_diameter(polygon: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &p) in polygon.iter().enumerate() {
        for &q in &polygon[i + 1..] {
            d = d.max(p.distance(q));
        }
    }
    d
}
