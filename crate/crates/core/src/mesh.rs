//! Polygonal meshes with derived edge topology.
//!
//! Cells are counter-clockwise vertex loops. Local edge `k` of a cell joins
//! loop vertices `k` and `k + 1` (cyclically). Global edges are stored once,
//! with their vertices in the orientation of the first cell that references
//! them.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::point::{polygon_centroid, polygon_diameter, signed_area, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// The owning cell and, for interior edges, the neighbour.
    pub cells: (usize, Option<usize>),
}

impl Edge {
    #[inline]
    pub fn is_boundary(&self) -> bool {
        self.cells.1.is_none()
    }
}

/// Reference from a cell to one of its global edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellEdge {
    pub edge: usize,
    /// `true` when the cell traverses the edge against its stored orientation.
    pub reversed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub diameter: f64,
    pub centroid: Point,
}

#[derive(Clone, Debug)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    cell_edges: Vec<Vec<CellEdge>>,
    geometry: Vec<CellGeometry>,
}

impl PolygonalMesh {
    /// Builds a mesh from vertex coordinates and counter-clockwise cell loops,
    /// deriving the edge topology and checking every structural invariant.
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Topology("mesh has no cells".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite()) {
                return Err(Error::Topology(format!("vertex {i} has non-finite coordinates")));
            }
        }

        let mut geometry = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(Error::Topology(format!("cell {c} has {} vertices (at least 3 required)", cell.len())));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Topology(format!(
                    "cell {c} references vertex {bad}, but only {} vertices exist",
                    vertices.len()
                )));
            }
            let poly: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            let area = signed_area(&poly);
            if !(area > 0.0) {
                return Err(Error::Orientation { cell: c, area });
            }
            geometry.push(CellGeometry { area, diameter: polygon_diameter(&poly), centroid: polygon_centroid(&poly) });
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        // (min, max) vertex pair -> edge index
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        for (c, cell) in cells.iter().enumerate() {
            let k = cell.len();
            let mut local = Vec::with_capacity(k);
            for i in 0..k {
                let a = cell[i];
                let b = cell[(i + 1) % k];
                if a == b {
                    return Err(Error::Topology(format!("cell {c} repeats vertex {a}")));
                }
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        lookup.insert(key, edges.len());
                        local.push(CellEdge { edge: edges.len(), reversed: false });
                        edges.push(Edge { vertices: [a, b], cells: (c, None) });
                    }
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.cells.1.is_some() || edge.cells.0 == c {
                            return Err(Error::Topology(format!("edge ({a}, {b}) is shared by more than two cells")));
                        }
                        if edge.vertices == [a, b] {
                            return Err(Error::Topology(format!(
                                "cells {} and {c} traverse edge ({a}, {b}) in the same direction \
                                 (overlapping or duplicate cells)",
                                edge.cells.0
                            )));
                        }
                        edge.cells.1 = Some(c);
                        local.push(CellEdge { edge: e, reversed: true });
                    }
                }
            }
            cell_edges.push(local);
        }

        Ok(PolygonalMesh { vertices, cells, edges, cell_edges, geometry })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    pub fn cell_edges(&self, cell: usize) -> &[CellEdge] {
        &self.cell_edges[cell]
    }

    /// Vertex coordinates of a cell in loop order.
    pub fn cell_polygon(&self, cell: usize) -> Vec<Point> {
        self.cells[cell].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Area, diameter, and centroid of a cell.
    pub fn cell_geometry(&self, cell: usize) -> CellGeometry {
        self.geometry[cell]
    }

    pub fn edge_endpoints(&self, edge: usize) -> (Point, Point) {
        let [a, b] = self.edges[edge].vertices;
        (self.vertices[a], self.vertices[b])
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let (a, b) = self.edge_endpoints(edge);
        a.distance(b)
    }

    /// Largest cell diameter.
    pub fn max_diameter(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }
}

/// `n x n` axis-aligned squares tiling the unit square.
pub fn generate_uniform_square_mesh(n: usize) -> Result<PolygonalMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("uniform mesh needs n >= 1".into()));
    }
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    PolygonalMesh::new(vertices, cells)
}

/// Reads the whitespace-separated text mesh format:
///
/// ```text
/// nv nc
/// x y            (nv lines)
/// k i1 ... ik    (nc lines, zero-based, counter-clockwise)
/// ```
///
/// Blank lines and lines starting with `#` are ignored.
pub fn load_polygon_mesh<R: BufRead>(reader: R) -> Result<PolygonalMesh> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((i + 1, trimmed.to_owned()));
    }
    let mut iter = lines.into_iter();

    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    let (hline, header) = iter.next().ok_or_else(|| parse_err(0, "empty mesh file".into()))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(hline, format!("header: {e}")))?;
    let [nv, nc] = counts[..] else {
        return Err(parse_err(hline, "header must be `nv nc`".into()));
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, text) = iter.next().ok_or_else(|| parse_err(0, format!("expected {nv} vertex lines")))?;
        let coords: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("vertex: {e}")))?;
        let [x, y] = coords[..] else {
            return Err(parse_err(ln, "vertex line must be `x y`".into()));
        };
        vertices.push(Point::new(x, y));
    }

    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, text) = iter.next().ok_or_else(|| parse_err(0, format!("expected {nc} cell lines")))?;
        let ints: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("cell: {e}")))?;
        let (&k, rest) = ints.split_first().ok_or_else(|| parse_err(ln, "empty cell line".into()))?;
        if k < 3 || rest.len() != k {
            return Err(parse_err(ln, format!("cell declares {k} vertices but lists {}", rest.len())));
        }
        cells.push(rest.to_vec());
    }
    if let Some((ln, _)) = iter.next() {
        return Err(parse_err(ln, "trailing data after the last cell".into()));
    }

    PolygonalMesh::new(vertices, cells)
}

/// Writes a mesh in the format read by [`load_polygon_mesh`].
pub fn write_polygon_mesh<W: Write>(mesh: &PolygonalMesh, mut out: W) -> Result<()> {
    let mut buf = String::new();
    let _ = writeln!(buf, "{} {}", mesh.num_vertices(), mesh.num_cells());
    for v in mesh.vertices() {
        let _ = writeln!(buf, "{:?} {:?}", v.x, v.y);
    }
    for cell in mesh.cells() {
        let _ = write!(buf, "{}", cell.len());
        for v in cell {
            let _ = write!(buf, " {v}");
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellQuality {
    /// min |e| / h_T
    pub edge_ratio: f64,
    /// Estimated radius of a ball the cell is star-shaped with respect to, over h_T.
    pub ball_ratio: f64,
    pub num_vertices: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshQualityReport {
    pub rho: f64,
    pub cells: Vec<CellQuality>,
    pub min_edge_ratio: f64,
    pub min_ball_ratio: f64,
    pub max_vertices: usize,
    /// Cells with an edge shorter than `rho * h_T`.
    pub violations: Vec<usize>,
    /// Cells whose estimated star-shapedness ball radius is below `rho * h_T`.
    pub star_violations: Vec<usize>,
}

/// Shape-regularity diagnostics. Never fails: cells below `rho` are listed.
pub fn validate_mesh(mesh: &PolygonalMesh, rho: f64) -> MeshQualityReport {
    let mut cells = Vec::with_capacity(mesh.num_cells());
    let mut violations = Vec::new();
    let mut star_violations = Vec::new();
    for c in 0..mesh.num_cells() {
        let poly = mesh.cell_polygon(c);
        let geo = mesh.cell_geometry(c);
        let n = poly.len();
        let min_edge = (0..n).map(|i| poly[i].distance(poly[(i + 1) % n])).fold(f64::INFINITY, f64::min);
        let q = CellQuality {
            edge_ratio: min_edge / geo.diameter,
            ball_ratio: star_ball_radius(&poly, geo.centroid) / geo.diameter,
            num_vertices: n,
        };
        if q.edge_ratio < rho {
            violations.push(c);
        }
        if q.ball_ratio < rho {
            star_violations.push(c);
        }
        cells.push(q);
    }
    MeshQualityReport {
        rho,
        min_edge_ratio: cells.iter().map(|q| q.edge_ratio).fold(f64::INFINITY, f64::min),
        min_ball_ratio: cells.iter().map(|q| q.ball_ratio).fold(f64::INFINITY, f64::min),
        max_vertices: cells.iter().map(|q| q.num_vertices).max().unwrap_or(0),
        cells,
        violations,
        star_violations,
    }
}

/// Largest radius of a disc centred at a sampled point of the polygon's kernel
/// such that the disc stays inside every edge's inner half-plane.
///
/// Candidates are the centroid and a 9 x 9 grid over the bounding box. When no
/// candidate lies in the kernel, the centroid's distance to the boundary is
/// returned (a lower bound that may be zero for non-star-shaped cells).
fn star_ball_radius(poly: &[Point], centroid: Point) -> f64 {
    let n = poly.len();
    let kernel_radius = |c: Point| -> Option<f64> {
        let mut r = f64::INFINITY;
        for i in 0..n {
            let a = poly[i];
            let d = poly[(i + 1) % n] - a;
            let len = d.norm();
            // signed distance to the edge line, positive on the inner side
            let s = d.cross(c - a) / len;
            if s <= 0.0 {
                return None;
            }
            r = r.min(s);
        }
        Some(r)
    };

    let (mut lo, mut hi) = (poly[0], poly[0]);
    for p in poly {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut best = kernel_radius(centroid);
    const SAMPLES: usize = 9;
    for j in 1..=SAMPLES {
        for i in 1..=SAMPLES {
            let c = Point::new(
                lo.x + (hi.x - lo.x) * i as f64 / (SAMPLES + 1) as f64,
                lo.y + (hi.y - lo.y) * j as f64 / (SAMPLES + 1) as f64,
            );
            if let Some(r) = kernel_radius(c) {
                best = Some(best.map_or(r, |b| b.max(r)));
            }
        }
    }
    best.unwrap_or_else(|| {
        (0..n).map(|i| point_segment_distance(centroid, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
    })
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    p.distance(a + d * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PolygonalMesh> {
        load_polygon_mesh(text.as_bytes())
    }

    #[test]
    fn uniform_mesh_counts() {
        let m = generate_uniform_square_mesh(1).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices(), m.num_edges()), (1, 4, 4));
        assert_eq!(m.num_boundary_edges(), 4);

        let m = generate_uniform_square_mesh(2).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices(), m.num_edges()), (4, 9, 12));
        assert_eq!(m.num_edges() - m.num_boundary_edges(), 4);

        let m = generate_uniform_square_mesh(8).unwrap();
        assert_eq!(m.num_cells(), 64);
        for c in 0..64 {
            assert!((m.cell_geometry(c).diameter - 2f64.sqrt() / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_mesh_edge_formula_and_area() {
        for n in 1..=12 {
            let m = generate_uniform_square_mesh(n).unwrap();
            assert_eq!(m.num_edges(), 2 * n * (n + 1));
            assert_eq!(m.num_edges() - m.num_boundary_edges(), 2 * n * (n - 1));
            assert!((m.total_area() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_n_is_rejected() {
        assert!(matches!(generate_uniform_square_mesh(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn single_square_file() {
        let m = parse("4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n").unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_boundary_edges(), 4);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let m = parse("# unit square\n4 1\n\n0 0\n1 0\n# mid\n1 1\n0 1\n4 0 1 2 3\n").unwrap();
        assert_eq!(m.num_edges(), 4);
    }

    #[test]
    fn duplicate_cell_is_topology_error() {
        let err = parse("4 2\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n4 0 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Topology(_)), "{err}");
    }

    #[test]
    fn three_cells_on_one_edge_is_topology_error() {
        // Two triangles above edge 0-1 (one reversed so orientations differ) plus one below.
        let text = "5 3\n0 0\n1 0\n0.5 1\n0.5 -1\n0.5 2\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        assert!(matches!(parse(text), Err(Error::Topology(_))));
    }

    #[test]
    fn clockwise_cell_is_orientation_error() {
        let err = parse("4 1\n0 0\n0 1\n1 1\n1 0\n4 0 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Orientation { cell: 0, .. }));
    }

    #[test]
    fn malformed_lines_are_parse_errors() {
        assert!(matches!(parse("4 1\n0 0\n1 0\n1 x\n0 1\n4 0 1 2 3\n"), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse("4 1\n0 0\n1 0\n1 1\n0 1\n5 0 1 2 3\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("4 1\n0 0\n1 0\n1 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
        assert!(matches!(parse("4 1\n0 0\n1 0\n1 1\n0 1\n2 0 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        assert!(matches!(parse("3 1\n0 0\n1 0\n0 1\n3 0 1 5\n"), Err(Error::Topology(_))));
    }

    #[test]
    fn cell_geometry_examples() {
        let m = generate_uniform_square_mesh(1).unwrap();
        let g = m.cell_geometry(0);
        assert!((g.area - 1.0).abs() < 1e-15);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.centroid.x - 0.5).abs() < 1e-15 && (g.centroid.y - 0.5).abs() < 1e-15);

        let m = parse("3 1\n0 0\n1 0\n0 1\n3 0 1 2\n").unwrap();
        let g = m.cell_geometry(0);
        assert!((g.area - 0.5).abs() < 1e-15);
        assert!((g.centroid.x - 1.0 / 3.0).abs() < 1e-15);

        let hex: Vec<Point> = (0..6)
            .map(|k| {
                let a = std::f64::consts::PI / 3.0 * k as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let m = PolygonalMesh::new(hex, vec![(0..6).collect()]).unwrap();
        assert!((m.cell_geometry(0).area - 1.5 * 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quality_of_unit_square() {
        let m = generate_uniform_square_mesh(1).unwrap();
        let r = validate_mesh(&m, 0.5);
        assert!((r.cells[0].edge_ratio - 0.5f64.sqrt()).abs() < 1e-15);
        // inscribed circle radius 0.5 over diameter sqrt(2)
        assert!((r.cells[0].ball_ratio - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.cells[0].num_vertices, 4);
    }

    #[test]
    fn uniform_mesh_has_no_violations() {
        let m = generate_uniform_square_mesh(4).unwrap();
        let r = validate_mesh(&m, 0.5);
        assert!(r.violations.is_empty());
        // inscribed radius / diameter of a square is 0.3536
        assert_eq!(r.star_violations.len(), 16);
        assert!(validate_mesh(&m, 0.3).star_violations.is_empty());
    }

    #[test]
    fn sliver_triangle_is_flagged() {
        let m = PolygonalMesh::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1e-6)],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let r = validate_mesh(&m, 0.1);
        assert_eq!(r.violations, vec![0]);
        assert!(r.cells[0].edge_ratio < 1e-5);
        assert!(r.cells[0].ball_ratio > 0.0 && r.cells[0].ball_ratio <= 1.0);
    }
}
