#![allow(dead_code)]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use iwg_core::interface::{classify_element, CutOptions, ElementCut, Side};
use iwg_core::space::Element;
use iwg_core::{load_polygon_mesh, Point, PolygonalMesh, Problem};
use rand::rngs::StdRng;
use rand::Rng;

pub mod oracles;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn voronoi4() -> PolygonalMesh {
    let file = File::open(data_path("voronoi4.mesh")).expect("sample mesh present");
    load_polygon_mesh(BufReader::new(file)).expect("sample mesh parses")
}

/// Global linear solution with constant coefficient and no interface.
pub struct LinearPatch {
    pub coeffs: [f64; 3],
    pub beta: f64,
}

impl Problem for LinearPatch {
    fn name(&self) -> &'static str {
        "linear-patch"
    }
    fn level_set(&self, _p: Point) -> f64 {
        1.0
    }
    fn level_set_gradient(&self, _p: Point) -> Point {
        Point::ZERO
    }
    fn beta(&self, _s: Side, _p: Point) -> f64 {
        self.beta
    }
    fn u_side(&self, _s: Side, p: Point) -> f64 {
        self.coeffs[0] + self.coeffs[1] * p.x + self.coeffs[2] * p.y
    }
    fn grad_u_side(&self, _s: Side, _p: Point) -> Point {
        Point::new(self.coeffs[1], self.coeffs[2])
    }
    fn f_side(&self, _s: Side, _p: Point) -> f64 {
        0.0
    }
    fn interface_points(&self, _n: usize) -> Vec<Point> {
        Vec::new()
    }
}

/// Straight interface `y = y0` with piecewise constant coefficient and
/// `u = (y - y0) / beta`.
pub struct StraightInterfacePatch {
    pub y0: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
}

impl StraightInterfacePatch {
    fn b(&self, s: Side) -> f64 {
        if s == Side::Plus {
            self.beta_plus
        } else {
            self.beta_minus
        }
    }
}

impl Problem for StraightInterfacePatch {
    fn name(&self) -> &'static str {
        "straight-interface-patch"
    }
    fn level_set(&self, p: Point) -> f64 {
        p.y - self.y0
    }
    fn level_set_gradient(&self, _p: Point) -> Point {
        Point::new(0.0, 1.0)
    }
    fn beta(&self, s: Side, _p: Point) -> f64 {
        self.b(s)
    }
    fn u_side(&self, s: Side, p: Point) -> f64 {
        (p.y - self.y0) / self.b(s)
    }
    fn grad_u_side(&self, s: Side, _p: Point) -> Point {
        Point::new(0.0, 1.0 / self.b(s))
    }
    fn f_side(&self, _s: Side, _p: Point) -> f64 {
        0.0
    }
    fn interface_points(&self, n: usize) -> Vec<Point> {
        (0..n).map(|k| Point::new((k as f64 + 0.5) / n as f64, self.y0)).collect()
    }
}

/// Random convex polygon: sorted random angles on an ellipse around `center`.
pub fn random_convex_polygon(rng: &mut StdRng) -> Vec<Point> {
    let k = rng.gen_range(3..=8);
    let center = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (ax, ay) = (rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0));
    let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    if angles.len() < 3 {
        angles = vec![0.0, 2.1, 4.2];
    }
    angles.iter().map(|t| center + Point::new(ax * t.cos(), ay * t.sin())).collect()
}

/// One-cell mesh plus a random straight or circular interface through it.
pub struct RandomCutCase {
    pub mesh: PolygonalMesh,
    pub element: Element,
}

/// Draws random polygons and interfaces until `count` genuine interface
/// elements have been produced.
pub fn random_cut_elements(rng: &mut StdRng, count: usize) -> Vec<RandomCutCase> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100 * count, "could not generate enough cut elements");
        let poly = random_convex_polygon(rng);
        let k = poly.len();
        let Ok(mesh) = PolygonalMesh::new(poly.clone(), vec![(0..k).collect()]) else {
            continue;
        };
        let geo = mesh.cell_geometry(0);
        let through = geo.centroid + Point::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)) * geo.diameter;
        let bp: f64 = 10f64.powf(rng.gen_range(0.0..3.0));
        let bm: f64 = 10f64.powf(rng.gen_range(0.0..3.0));
        let beta = move |s: Side, _p: Point| if s == Side::Plus { bp } else { bm };
        let cut = if rng.gen_bool(0.5) {
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let n = Point::new(t.cos(), t.sin());
            let ls = move |p: Point| n.dot(p - through);
            classify_element(&mesh, 0, &ls, &beta, &CutOptions::default())
        } else {
            let r = rng.gen_range(0.3..3.0) * geo.diameter;
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let c = through + Point::new(t.cos(), t.sin()) * r;
            let ls = move |p: Point| (p - c).norm() - r;
            classify_element(&mesh, 0, &ls, &beta, &CutOptions::default())
        };
        let Ok(cut @ ElementCut::Interface(_)) = cut else {
            continue;
        };
        let element = Element::new(&mesh, 0, cut, 4).expect("element builds");
        out.push(RandomCutCase { mesh, element });
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}
