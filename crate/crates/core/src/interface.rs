//! Level-set classification of mesh cells and splitting of interface cells
//! along the chord joining the two edge intersections.

use crate::error::{Error, Result};
use crate::mesh::PolygonalMesh;
use crate::point::{polygon_centroid, signed_area, Point};

/// Subdomain label. `Plus` is `{L > 0}`, `Minus` is `{L < 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    #[inline]
    pub fn of(value: f64) -> Side {
        if value >= 0.0 {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    #[inline]
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// A scalar function whose zero set is the interface.
pub trait LevelSet: Sync {
    fn value(&self, p: Point) -> f64;
}

impl<F: Fn(Point) -> f64 + Sync> LevelSet for F {
    fn value(&self, p: Point) -> f64 {
        self(p)
    }
}

/// Piecewise coefficient `beta`: one smooth positive function per side.
pub trait Coefficient: Sync {
    fn beta(&self, side: Side, p: Point) -> f64;
}

impl<F: Fn(Side, Point) -> f64 + Sync> Coefficient for F {
    fn beta(&self, side: Side, p: Point) -> f64 {
        self(side, p)
    }
}

/// Tolerances for element cutting. Defaults follow the documented contract:
/// vertex snapping at `1e-12 h_T`, small-cut guard at `1e-10 |T|`, bisection
/// to `1e-13` in the edge parameter with at most 100 iterations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutOptions {
    pub snap: f64,
    pub small_cut: f64,
    pub bisection_tol: f64,
    pub max_bisection_iterations: usize,
}

impl Default for CutOptions {
    fn default() -> Self {
        CutOptions { snap: 1e-12, small_cut: 1e-10, bisection_tol: 1e-13, max_bisection_iterations: 100 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceCut {
    /// Chord start: where the counter-clockwise boundary walk leaves `T+`.
    pub p0: Point,
    /// Chord end: where the walk re-enters `T+`.
    pub p1: Point,
    /// Chord midpoint.
    pub x0: Point,
    /// Unit normal to the chord pointing from `T+` into `T-`.
    pub normal: Point,
    /// `(-n_2, n_1)`, i.e. the unit vector from `p0` to `p1`.
    pub tangent: Point,
    pub plus: Vec<Point>,
    pub minus: Vec<Point>,
    pub plus_area: f64,
    pub minus_area: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    /// Side of each loop vertex after snapping.
    pub vertex_sides: Vec<Side>,
    /// Intersection point on each local edge, if the edge is cut.
    pub crossings: Vec<Option<Point>>,
}

impl InterfaceCut {
    #[inline]
    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.beta_plus,
            Side::Minus => self.beta_minus,
        }
    }

    #[inline]
    pub fn polygon(&self, side: Side) -> &[Point] {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    #[inline]
    pub fn area(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.plus_area,
            Side::Minus => self.minus_area,
        }
    }

    /// Side of the chord's supporting line that `p` lies on.
    #[inline]
    pub fn side_of(&self, p: Point) -> Side {
        if self.normal.dot(p - self.x0) <= 0.0 {
            Side::Plus
        } else {
            Side::Minus
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementCut {
    NonInterface { side: Side, beta: f64 },
    Interface(Box<InterfaceCut>),
}

impl ElementCut {
    pub fn is_interface(&self) -> bool {
        matches!(self, ElementCut::Interface(_))
    }

    pub fn as_interface(&self) -> Option<&InterfaceCut> {
        match self {
            ElementCut::Interface(c) => Some(c),
            ElementCut::NonInterface { .. } => None,
        }
    }
}

/// Root of `L` on the segment `[p_a, p_b]` when the endpoint values have
/// strictly opposite signs. Endpoints with `|L| < 1e-12 |p_b - p_a|` count as
/// lying on the interface and yield `None`; cell classification resolves
/// those through vertex snapping instead.
///
/// `tol` is the bisection tolerance in the segment parameter `t in [0, 1]`.
pub fn edge_intersection(p_a: Point, p_b: Point, levelset: &dyn LevelSet, tol: f64) -> Result<Option<Point>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bisection tolerance must be positive, got {tol}")));
    }
    let snap = 1e-12 * p_a.distance(p_b);
    let (la, lb) = (levelset.value(p_a), levelset.value(p_b));
    if la.abs() < snap || lb.abs() < snap || la * lb >= 0.0 {
        return Ok(None);
    }
    bisect(p_a, p_b, Side::of(la), levelset, tol, 100).map(Some)
}

/// Bisection on `t -> L((1 - t) a + t b)` given the (snapped) side of `a`;
/// the side of `b` is taken to be the opposite one.
fn bisect(a: Point, b: Point, side_a: Side, levelset: &dyn LevelSet, tol: f64, max_iterations: usize) -> Result<Point> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations == max_iterations {
            return Err(Error::BisectionFailed { iterations });
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let v = levelset.value(a.lerp(b, mid));
        if v.is_nan() {
            return Err(Error::BisectionFailed { iterations });
        }
        if v == 0.0 {
            return Ok(a.lerp(b, mid));
        }
        if Side::of(v) == side_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(a.lerp(b, 0.5 * (lo + hi)))
}

/// Coefficient value at the area centroid of a (sub-)polygon.
pub fn barycenter_beta(polygon: &[Point], beta: impl Fn(Point) -> f64) -> f64 {
    beta(polygon_centroid(polygon))
}

/// Classifies one cell against the level set and, for interface cells, builds
/// the chord, the sub-polygons, and the frozen coefficients.
pub fn classify_element(
    mesh: &PolygonalMesh,
    cell: usize,
    levelset: &dyn LevelSet,
    beta: &dyn Coefficient,
    opts: &CutOptions,
) -> Result<ElementCut> {
    let poly = mesh.cell_polygon(cell);
    let geo = mesh.cell_geometry(cell);
    let n = poly.len();

    let snap = opts.snap * geo.diameter;
    let centroid_side = Side::of(levelset.value(geo.centroid));
    let sides: Vec<Side> = poly
        .iter()
        .map(|&p| {
            let v = levelset.value(p);
            if v.abs() < snap {
                centroid_side
            } else {
                Side::of(v)
            }
        })
        .collect();

    let sign_changes = (0..n).filter(|&k| sides[k] != sides[(k + 1) % n]).count();
    if sign_changes == 0 {
        let side = sides[0];
        return Ok(ElementCut::NonInterface { side, beta: beta.beta(side, geo.centroid) });
    }
    if sign_changes != 2 {
        return Err(Error::CutTopology { cell, sign_changes });
    }

    let cell_edges = mesh.cell_edges(cell);
    let mut crossings = vec![None; n];
    let mut plus = Vec::with_capacity(n + 2);
    let mut minus = Vec::with_capacity(n + 2);
    let (mut p_out, mut p_in) = (Point::ZERO, Point::ZERO);
    for k in 0..n {
        let next = (k + 1) % n;
        match sides[k] {
            Side::Plus => plus.push(poly[k]),
            Side::Minus => minus.push(poly[k]),
        }
        if sides[k] == sides[next] {
            continue;
        }
        // Bisect in the global edge orientation so both neighbours of an edge
        // obtain bit-identical points.
        let (a, b, side_a) =
            if cell_edges[k].reversed { (poly[next], poly[k], sides[next]) } else { (poly[k], poly[next], sides[k]) };
        let p = bisect(a, b, side_a, levelset, opts.bisection_tol, opts.max_bisection_iterations)?;
        crossings[k] = Some(p);
        plus.push(p);
        minus.push(p);
        if sides[k] == Side::Plus {
            p_out = p;
        } else {
            p_in = p;
        }
    }

    let plus_area = signed_area(&plus);
    let minus_area = signed_area(&minus);
    if plus_area.min(minus_area) < opts.small_cut * geo.area {
        let side = if plus_area >= minus_area { Side::Plus } else { Side::Minus };
        return Ok(ElementCut::NonInterface { side, beta: beta.beta(side, geo.centroid) });
    }

    let chord = p_in - p_out;
    let tangent = chord * (1.0 / chord.norm());
    // outward normal of the plus polygon along its chord edge p_out -> p_in
    let normal = Point::new(tangent.y, -tangent.x);
    let beta_plus = barycenter_beta(&plus, |x| beta.beta(Side::Plus, x));
    let beta_minus = barycenter_beta(&minus, |x| beta.beta(Side::Minus, x));

    Ok(ElementCut::Interface(Box::new(InterfaceCut {
        p0: p_out,
        p1: p_in,
        x0: p_out.midpoint(p_in),
        normal,
        tangent,
        plus,
        minus,
        plus_area,
        minus_area,
        beta_plus,
        beta_minus,
        vertex_sides: sides,
        crossings,
    })))
}

/// Classifies every cell of the mesh.
pub fn classify_mesh(
    mesh: &PolygonalMesh,
    levelset: &dyn LevelSet,
    beta: &dyn Coefficient,
    opts: &CutOptions,
) -> Result<Vec<ElementCut>> {
    (0..mesh.num_cells()).map(|c| classify_element(mesh, c, levelset, beta, opts)).collect()
}
