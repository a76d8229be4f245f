//! The weak Galerkin space: broken-linear element bases, per-element
//! quadrature and edge data, global degrees of freedom, and the projections
//! `Q_0`, `Q_partial`, and `Q_h`.

use crate::dense::spd_solve;
use crate::error::Result;
use crate::interface::{ElementCut, Side};
use crate::mesh::PolygonalMesh;
use crate::point::Point;
use crate::quadrature::{integrate_segment, polygon_quadrature, QuadratureRule};

/// Three shape functions spanning the local interior space.
///
/// On a non-interface cell they are `1, x - x_c, y - y_c`. On an interface
/// cell they are `1`, `t . (x - x0)`, and `n . (x - x0) / beta_bar`, which are
/// continuous across the chord and have continuous `beta_bar`-weighted normal
/// derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementBasis {
    Linear { centroid: Point },
    Broken { x0: Point, normal: Point, tangent: Point, beta_plus: f64, beta_minus: f64 },
}

impl ElementBasis {
    pub fn new(cut: &ElementCut, centroid: Point) -> Self {
        match cut {
            ElementCut::NonInterface { .. } => ElementBasis::Linear { centroid },
            ElementCut::Interface(c) => ElementBasis::Broken {
                x0: c.x0,
                normal: c.normal,
                tangent: c.tangent,
                beta_plus: c.beta_plus,
                beta_minus: c.beta_minus,
            },
        }
    }

    /// Branch selected by the chord half-plane (points on the chord may use
    /// either branch; the values agree there).
    pub fn side_of(&self, p: Point) -> Side {
        match *self {
            ElementBasis::Linear { .. } => Side::Plus,
            ElementBasis::Broken { x0, normal, .. } => {
                if normal.dot(p - x0) <= 0.0 {
                    Side::Plus
                } else {
                    Side::Minus
                }
            }
        }
    }

    #[inline]
    pub fn values_on(&self, side: Side, p: Point) -> [f64; 3] {
        match *self {
            ElementBasis::Linear { centroid } => [1.0, p.x - centroid.x, p.y - centroid.y],
            ElementBasis::Broken { x0, normal, tangent, beta_plus, beta_minus } => {
                let d = p - x0;
                let beta = if side == Side::Plus { beta_plus } else { beta_minus };
                [1.0, tangent.dot(d), normal.dot(d) / beta]
            }
        }
    }

    #[inline]
    pub fn gradients_on(&self, side: Side) -> [Point; 3] {
        match *self {
            ElementBasis::Linear { .. } => [Point::ZERO, Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            ElementBasis::Broken { normal, tangent, beta_plus, beta_minus, .. } => {
                let beta = if side == Side::Plus { beta_plus } else { beta_minus };
                [Point::ZERO, tangent, normal * (1.0 / beta)]
            }
        }
    }

    pub fn eval(&self, p: Point) -> [f64; 3] {
        self.values_on(self.side_of(p), p)
    }

    pub fn eval_grad(&self, side: Side) -> [Point; 3] {
        self.gradients_on(side)
    }
}

#[inline]
fn combine(c: &[f64; 3], v: [f64; 3]) -> f64 {
    c[0] * v[0] + c[1] * v[1] + c[2] * v[2]
}

/// A straight piece of a cell edge lying on one side of the chord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgePiece {
    pub a: Point,
    pub b: Point,
    pub side: Side,
}

impl EdgePiece {
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalEdge {
    pub edge: usize,
    pub length: f64,
    /// Outward unit normal of the cell on this edge.
    pub normal: Point,
    /// Interface crossing on this edge, if any.
    pub crossing: Option<Point>,
    pub pieces: Vec<EdgePiece>,
}

/// Quadrature over one sub-polygon together with its side and frozen coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementPart {
    pub side: Side,
    pub beta: f64,
    pub area: f64,
    pub polygon: Vec<Point>,
    pub rule: QuadratureRule,
}

#[derive(Clone, Debug)]
pub struct Element {
    pub cell: usize,
    pub area: f64,
    pub diameter: f64,
    pub centroid: Point,
    pub cut: ElementCut,
    pub basis: ElementBasis,
    pub parts: Vec<ElementPart>,
    pub edges: Vec<LocalEdge>,
}

impl Element {
    pub fn new(mesh: &PolygonalMesh, cell: usize, cut: ElementCut, degree: usize) -> Result<Self> {
        let geo = mesh.cell_geometry(cell);
        let poly = mesh.cell_polygon(cell);
        let n = poly.len();
        let basis = ElementBasis::new(&cut, geo.centroid);

        let parts = match &cut {
            ElementCut::NonInterface { side, beta } => vec![ElementPart {
                side: *side,
                beta: *beta,
                area: geo.area,
                rule: polygon_quadrature(&poly, degree)?,
                polygon: poly.clone(),
            }],
            ElementCut::Interface(c) => [Side::Plus, Side::Minus]
                .into_iter()
                .map(|s| {
                    Ok(ElementPart {
                        side: s,
                        beta: c.beta(s),
                        area: c.area(s),
                        rule: polygon_quadrature(c.polygon(s), degree)?,
                        polygon: c.polygon(s).to_vec(),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };

        let edges = mesh
            .cell_edges(cell)
            .iter()
            .enumerate()
            .map(|(k, ce)| {
                let a = poly[k];
                let b = poly[(k + 1) % n];
                let d = b - a;
                let length = d.norm();
                let normal = Point::new(d.y, -d.x) * (1.0 / length);
                let (crossing, pieces) = match &cut {
                    ElementCut::NonInterface { side, .. } => (None, vec![EdgePiece { a, b, side: *side }]),
                    ElementCut::Interface(c) => {
                        let sa = c.vertex_sides[k];
                        match c.crossings[k] {
                            Some(p) => (
                                Some(p),
                                vec![EdgePiece { a, b: p, side: sa }, EdgePiece { a: p, b, side: sa.opposite() }],
                            ),
                            None => (None, vec![EdgePiece { a, b, side: sa }]),
                        }
                    }
                };
                LocalEdge { edge: ce.edge, length, normal, crossing, pieces }
            })
            .collect();

        Ok(Element { cell, area: geo.area, diameter: geo.diameter, centroid: geo.centroid, cut, basis, parts, edges })
    }

    pub fn num_local_dofs(&self) -> usize {
        3 + self.edges.len()
    }

    /// `beta_bar` on one side (the single value on non-interface cells).
    pub fn beta(&self, side: Side) -> f64 {
        match &self.cut {
            ElementCut::NonInterface { beta, .. } => *beta,
            ElementCut::Interface(c) => c.beta(side),
        }
    }

    /// `M_ij = int_T phi_i phi_j`, split over the sub-polygons.
    pub fn mass_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for part in &self.parts {
            for (p, w) in part.rule.iter() {
                let v = self.basis.values_on(part.side, p);
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] += w * v[i] * v[j];
                    }
                }
            }
        }
        m
    }

    /// `int_T phi_i f`, split over the sub-polygons.
    pub fn load_vector(&self, f: &dyn Fn(Point) -> f64) -> [f64; 3] {
        let mut b = [0.0; 3];
        for part in &self.parts {
            for (p, w) in part.rule.iter() {
                let v = self.basis.values_on(part.side, p);
                let fw = w * f(p);
                for i in 0..3 {
                    b[i] += fw * v[i];
                }
            }
        }
        b
    }

    /// Edge averages of the three shape functions on local edge `k`.
    /// Exact, since each shape function is linear on every edge piece.
    pub fn basis_edge_averages(&self, k: usize) -> [f64; 3] {
        let edge = &self.edges[k];
        let mut avg = [0.0; 3];
        for piece in &edge.pieces {
            let v = self.basis.values_on(piece.side, piece.a.midpoint(piece.b));
            let len = piece.length();
            for i in 0..3 {
                avg[i] += len * v[i];
            }
        }
        avg.map(|x| x / edge.length)
    }

    /// `Q_partial v0` on local edge `k` for interior coefficients `coeffs`.
    pub fn edge_average(&self, k: usize, coeffs: &[f64; 3]) -> f64 {
        combine(coeffs, self.basis_edge_averages(k))
    }

    /// `v0(p)` using the chord half-plane to pick the branch.
    pub fn eval(&self, coeffs: &[f64; 3], p: Point) -> f64 {
        combine(coeffs, self.basis.eval(p))
    }
}

/// Global numbering: three interior unknowns per cell (cell-major), then one
/// unknown per edge in edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    num_cells: usize,
    num_edges: usize,
    boundary: Vec<bool>,
}

impl DofMap {
    #[inline]
    pub fn interior(&self, cell: usize, i: usize) -> usize {
        3 * cell + i
    }

    #[inline]
    pub fn edge(&self, edge: usize) -> usize {
        3 * self.num_cells + edge
    }

    pub fn num_interior(&self) -> usize {
        3 * self.num_cells
    }

    pub fn num_edge(&self) -> usize {
        self.num_edges
    }

    pub fn total(&self) -> usize {
        self.num_interior() + self.num_edges
    }

    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        self.boundary[edge]
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    /// Whether a global DOF is fixed by Dirichlet data.
    pub fn is_fixed(&self, dof: usize) -> bool {
        dof >= self.num_interior() && self.boundary[dof - self.num_interior()]
    }

    /// Global indices of an element's local DOFs: interior first, then edges
    /// in cell-loop order.
    pub fn local_dofs(&self, element: &Element) -> Vec<usize> {
        let mut out = Vec::with_capacity(element.num_local_dofs());
        out.extend((0..3).map(|i| self.interior(element.cell, i)));
        out.extend(element.edges.iter().map(|e| self.edge(e.edge)));
        out
    }
}

pub fn build_dof_map(mesh: &PolygonalMesh) -> DofMap {
    DofMap {
        num_cells: mesh.num_cells(),
        num_edges: mesh.num_edges(),
        boundary: mesh.edges().iter().map(|e| e.is_boundary()).collect(),
    }
}

/// A discrete function `{v0, v_partial}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WgFunction {
    pub v0: Vec<[f64; 3]>,
    pub vb: Vec<f64>,
}

impl WgFunction {
    pub fn zeros(dofs: &DofMap) -> Self {
        WgFunction { v0: vec![[0.0; 3]; dofs.num_cells], vb: vec![0.0; dofs.num_edges] }
    }

    pub fn from_vector(dofs: &DofMap, x: &[f64]) -> Self {
        assert_eq!(x.len(), dofs.total(), "vector length does not match the DOF map");
        let v0 = x[..dofs.num_interior()].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        WgFunction { v0, vb: x[dofs.num_interior()..].to_vec() }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(3 * self.v0.len() + self.vb.len());
        for c in &self.v0 {
            x.extend_from_slice(c);
        }
        x.extend_from_slice(&self.vb);
        x
    }

    /// Local coefficient vector in element DOF order.
    pub fn local(&self, element: &Element) -> Vec<f64> {
        let mut out = Vec::with_capacity(element.num_local_dofs());
        out.extend_from_slice(&self.v0[element.cell]);
        out.extend(element.edges.iter().map(|e| self.vb[e.edge]));
        out
    }

    pub fn sub(&self, other: &WgFunction) -> WgFunction {
        WgFunction {
            v0: self.v0.iter().zip(&other.v0).map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]]).collect(),
            vb: self.vb.iter().zip(&other.vb).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.v0.iter().flatten().chain(&self.vb).fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Mesh, per-element data, and DOF map for one discretisation.
#[derive(Clone, Debug)]
pub struct FeSpace<'m> {
    pub mesh: &'m PolygonalMesh,
    pub elements: Vec<Element>,
    pub dofs: DofMap,
}

impl<'m> FeSpace<'m> {
    pub fn new(mesh: &'m PolygonalMesh, cuts: Vec<ElementCut>, degree: usize) -> Result<Self> {
        assert_eq!(cuts.len(), mesh.num_cells(), "one cut per cell required");
        let elements = cuts
            .into_iter()
            .enumerate()
            .map(|(c, cut)| Element::new(mesh, c, cut, degree))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeSpace { mesh, dofs: build_dof_map(mesh), elements })
    }

    pub fn num_interface_elements(&self) -> usize {
        self.elements.iter().filter(|e| e.cut.is_interface()).count()
    }

    /// The interface crossing on a global edge, as seen by either neighbour.
    pub fn edge_crossing(&self, edge: usize) -> Option<Point> {
        let (c0, c1) = self.mesh.edges()[edge].cells;
        std::iter::once(c0)
            .chain(c1)
            .find_map(|c| self.elements[c].edges.iter().find(|le| le.edge == edge).and_then(|le| le.crossing))
    }
}

/// `L^2` projection of `u` onto the element's broken-linear space, using the
/// element's own quadrature.
pub fn project_q0(element: &Element, u: &dyn Fn(Point) -> f64) -> Result<[f64; 3]> {
    solve_mass(element, element.load_vector(u))
}

/// As [`project_q0`], with the load integrals evaluated by a rule of the given degree.
pub fn project_q0_with_degree(element: &Element, u: &dyn Fn(Point) -> f64, degree: usize) -> Result<[f64; 3]> {
    let mut b = [0.0; 3];
    for part in &element.parts {
        let rule = polygon_quadrature(&part.polygon, degree)?;
        for (p, w) in rule.iter() {
            let v = element.basis.values_on(part.side, p);
            let uw = w * u(p);
            for i in 0..3 {
                b[i] += uw * v[i];
            }
        }
    }
    solve_mass(element, b)
}

fn solve_mass(element: &Element, b: [f64; 3]) -> Result<[f64; 3]> {
    let m = element.mass_matrix();
    let flat: Vec<f64> = m.iter().flatten().copied().collect();
    let x = spd_solve(&flat, 3, &b, "element mass")?;
    Ok([x[0], x[1], x[2]])
}

/// Average of `u` over the segment `[a, b]`, split at `split` when the
/// integrand has a kink there.
pub fn project_qpartial(a: Point, b: Point, split: Option<Point>, u: &dyn Fn(Point) -> f64) -> f64 {
    let len = a.distance(b);
    let integral = match split {
        Some(p) => integrate_segment(a, p, u) + integrate_segment(p, b, u),
        None => integrate_segment(a, b, u),
    };
    integral / len
}

/// `Q_h u = {Q_0 u, Q_partial u}`. Edge values come from `u` directly and are
/// therefore single valued.
pub fn project_qh(space: &FeSpace<'_>, u: &dyn Fn(Point) -> f64) -> Result<WgFunction> {
    project_qh_impl(space, u, None)
}

/// [`project_qh`] with element integrals evaluated at the given quadrature degree.
pub fn project_qh_with_degree(space: &FeSpace<'_>, u: &dyn Fn(Point) -> f64, degree: usize) -> Result<WgFunction> {
    project_qh_impl(space, u, Some(degree))
}

fn project_qh_impl(space: &FeSpace<'_>, u: &dyn Fn(Point) -> f64, degree: Option<usize>) -> Result<WgFunction> {
    let v0 = space
        .elements
        .iter()
        .map(|e| match degree {
            Some(d) => project_q0_with_degree(e, u, d),
            None => project_q0(e, u),
        })
        .collect::<Result<Vec<_>>>()?;
    let vb = (0..space.mesh.num_edges())
        .map(|e| {
            let (a, b) = space.mesh.edge_endpoints(e);
            project_qpartial(a, b, space.edge_crossing(e), u)
        })
        .collect();
    Ok(WgFunction { v0, vb })
}
