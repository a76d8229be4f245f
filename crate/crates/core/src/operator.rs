//! Discrete weak gradient, local stiffness, and global assembly.
//!
//! Local DOFs of an element are ordered `[c_1, c_2, c_3, v_e1, ..., v_ek]`:
//! the interior coefficients in the element basis, then one edge value per
//! edge in cell-loop order.
//!
//! The weak gradient lives in `span{grad phi_2, grad phi_3}` (piecewise
//! constant on `T+` and `T-`). Testing its defining identity with
//! `q = phi_2, phi_3` gives `M w = B v` where
//!
//! ```text
//! M_jk = int_T beta_bar grad phi_j . grad phi_k
//! B_j,i   = int_T beta_bar grad phi_i . grad phi_j - sum_e avg_e(phi_i) F_ej   (interior i)
//! B_j,3+e = F_ej,       F_ej = int_e beta_bar grad phi_j . n_T ds
//! ```
//!
//! so the weak-gradient matrix is `G = M^{-1} B` and the consistency part of
//! the local stiffness is `G^T M G`.

use std::thread;

use crate::dense::spd_solve;
use crate::error::Result;
use crate::point::Point;
use crate::space::{project_qpartial, Element, FeSpace, WgFunction};
use crate::sparse::SparseSymmetric;

/// Row-major dense local matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl LocalMatrix {
    pub fn zeros(n: usize) -> Self {
        LocalMatrix { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data.chunks_exact(self.n).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> LocalMatrix {
        LocalMatrix { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn sum(&self, other: &LocalMatrix) -> LocalMatrix {
        LocalMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalWeakGradient {
    /// Gram matrix of `{grad phi_2, grad phi_3}` weighted by `beta_bar`.
    pub gram: [[f64; 2]; 2],
    /// Right-hand side operator `B` (2 x n_loc, column per local DOF).
    pub rhs: Vec<[f64; 2]>,
    /// `G = M^{-1} B`: weak-gradient coefficients per local DOF.
    pub g: Vec<[f64; 2]>,
}

impl LocalWeakGradient {
    /// Weak-gradient coefficients in the basis `{grad phi_2, grad phi_3}`.
    pub fn apply(&self, local: &[f64]) -> [f64; 2] {
        let mut w = [0.0; 2];
        for (col, &v) in self.g.iter().zip(local) {
            w[0] += col[0] * v;
            w[1] += col[1] * v;
        }
        w
    }
}

/// Full 3 x 3 weighted gradient Gram matrix `int_T beta_bar grad phi_i . grad phi_j`.
fn weighted_gradient_gram(element: &Element) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    for part in &element.parts {
        let g = element.basis.gradients_on(part.side);
        let s = part.beta * part.area;
        for i in 0..3 {
            for j in 0..3 {
                k[i][j] += s * g[i].dot(g[j]);
            }
        }
    }
    k
}

pub fn local_weak_gradient(element: &Element) -> Result<LocalWeakGradient> {
    let n_loc = element.num_local_dofs();
    let k = weighted_gradient_gram(element);
    let gram = [[k[1][1], k[1][2]], [k[2][1], k[2][2]]];

    let mut rhs = vec![[0.0; 2]; n_loc];
    for i in 0..3 {
        rhs[i] = [k[1][i], k[2][i]];
    }
    for (e, edge) in element.edges.iter().enumerate() {
        // flux of the test functions phi_2, phi_3 through this edge
        let mut flux = [0.0; 2];
        for piece in &edge.pieces {
            let g = element.basis.gradients_on(piece.side);
            let s = element.beta(piece.side) * piece.length();
            flux[0] += s * g[1].dot(edge.normal);
            flux[1] += s * g[2].dot(edge.normal);
        }
        let avg = element.basis_edge_averages(e);
        for i in 0..3 {
            rhs[i][0] -= avg[i] * flux[0];
            rhs[i][1] -= avg[i] * flux[1];
        }
        rhs[3 + e] = flux;
    }

    let flat = [gram[0][0], gram[0][1], gram[1][0], gram[1][1]];
    let g = rhs
        .iter()
        .map(|col| {
            let x = spd_solve(&flat, 2, col, "weak-gradient Gram")?;
            Ok([x[0], x[1]])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalWeakGradient { gram, rhs, g })
}

/// Consistency and stabilisation parts of the local stiffness matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStiffness {
    /// `G^T M G`
    pub consistency: LocalMatrix,
    /// `lambda h_T^{-1} sum_e |e| s_e s_e^T`
    pub stabilization: LocalMatrix,
}

impl LocalStiffness {
    pub fn total(&self) -> LocalMatrix {
        self.consistency.sum(&self.stabilization)
    }
}

/// Edge-mismatch functional `s_e` with `s_e . v = Q_partial v0 - v_e` on local edge `e`.
fn mismatch_row(element: &Element, e: usize) -> Vec<f64> {
    let mut s = vec![0.0; element.num_local_dofs()];
    s[..3].copy_from_slice(&element.basis_edge_averages(e));
    s[3 + e] = -1.0;
    s
}

pub fn local_stiffness(element: &Element, lwg: &LocalWeakGradient, lambda: f64) -> LocalStiffness {
    let n = element.num_local_dofs();
    let m = lwg.gram;
    let mut consistency = LocalMatrix::zeros(n);
    for i in 0..n {
        let gi = lwg.g[i];
        let mgi = [m[0][0] * gi[0] + m[0][1] * gi[1], m[1][0] * gi[0] + m[1][1] * gi[1]];
        for j in 0..n {
            let gj = lwg.g[j];
            consistency.add(i, j, mgi[0] * gj[0] + mgi[1] * gj[1]);
        }
    }
    // symmetrise away round-off
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (consistency.get(i, j) + consistency.get(j, i));
            consistency.data[i * n + j] = v;
            consistency.data[j * n + i] = v;
        }
    }

    let mut unit = LocalMatrix::zeros(n);
    for (e, edge) in element.edges.iter().enumerate() {
        let s = mismatch_row(element, e);
        let scale = edge.length / element.diameter;
        for i in 0..n {
            for j in 0..n {
                unit.add(i, j, scale * s[i] * s[j]);
            }
        }
    }
    LocalStiffness { consistency, stabilization: unit.scaled(lambda) }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyOptions {
    pub lambda: f64,
    /// Compute element matrices on several threads. Scatter order is unchanged,
    /// so results are bitwise identical to the serial path.
    pub parallel: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { lambda: 1.0, parallel: false }
    }
}

/// Reduced system over the free DOFs after eliminating Dirichlet edge values.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub matrix: SparseSymmetric,
    pub rhs: Vec<f64>,
    /// Prescribed `Q_partial g` per global edge (zero on interior edges).
    pub dirichlet_values: Vec<f64>,
    /// Global DOF index of each free unknown.
    pub free_dofs: Vec<usize>,
}

impl GlobalSystem {
    /// Expands a solution over the free DOFs into a full discrete function.
    pub fn expand(&self, space: &FeSpace<'_>, free: &[f64]) -> WgFunction {
        assert_eq!(free.len(), self.free_dofs.len());
        let dofs = &space.dofs;
        let mut x = vec![0.0; dofs.total()];
        for (e, &g) in self.dirichlet_values.iter().enumerate() {
            if dofs.is_boundary_edge(e) {
                x[dofs.edge(e)] = g;
            }
        }
        for (&gdof, &v) in self.free_dofs.iter().zip(free) {
            x[gdof] = v;
        }
        WgFunction::from_vector(dofs, &x)
    }
}

struct ElementContribution {
    dofs: Vec<usize>,
    stiffness: LocalMatrix,
    load: [f64; 3],
}

fn element_contributions(
    space: &FeSpace<'_>,
    lambda: f64,
    f: &(dyn Fn(Point) -> f64 + Sync),
    parallel: bool,
) -> Result<Vec<ElementContribution>> {
    let compute = |element: &Element| -> Result<ElementContribution> {
        let lwg = local_weak_gradient(element)?;
        Ok(ElementContribution {
            dofs: space.dofs.local_dofs(element),
            stiffness: local_stiffness(element, &lwg, lambda).total(),
            load: element.load_vector(f),
        })
    };
    let threads = thread::available_parallelism().map_or(1, |n| n.get());
    if !parallel || threads < 2 || space.elements.len() < 256 {
        return space.elements.iter().map(compute).collect();
    }
    let chunk = space.elements.len().div_ceil(threads);
    thread::scope(|scope| {
        let handles: Vec<_> = space
            .elements
            .chunks(chunk)
            .map(|els| scope.spawn(move || els.iter().map(compute).collect::<Result<Vec<_>>>()))
            .collect();
        let mut out = Vec::with_capacity(space.elements.len());
        for h in handles {
            out.extend(h.join().expect("assembly worker panicked")?);
        }
        Ok(out)
    })
}

/// Assembles `a_s(u, v) = (f, v0)` with `u_partial = Q_partial g` on the
/// boundary, eliminating the boundary edge unknowns.
pub fn assemble(
    space: &FeSpace<'_>,
    f: &(dyn Fn(Point) -> f64 + Sync),
    g: &dyn Fn(Point) -> f64,
    opts: &AssemblyOptions,
) -> Result<GlobalSystem> {
    let dofs = &space.dofs;
    let mesh = space.mesh;

    let dirichlet_values: Vec<f64> = (0..mesh.num_edges())
        .map(|e| {
            if dofs.is_boundary_edge(e) {
                let (a, b) = mesh.edge_endpoints(e);
                project_qpartial(a, b, space.edge_crossing(e), g)
            } else {
                0.0
            }
        })
        .collect();

    let mut free_index = vec![usize::MAX; dofs.total()];
    let mut free_dofs = Vec::with_capacity(dofs.total());
    for (d, slot) in free_index.iter_mut().enumerate() {
        if !dofs.is_fixed(d) {
            *slot = free_dofs.len();
            free_dofs.push(d);
        }
    }
    let fixed_value = |d: usize| dirichlet_values[d - dofs.num_interior()];

    let contributions = element_contributions(space, opts.lambda, f, opts.parallel)?;
    let mut rhs = vec![0.0; free_dofs.len()];
    let mut triplets = Vec::with_capacity(contributions.iter().map(|c| c.dofs.len().pow(2)).sum());
    for c in &contributions {
        for (i, &gi) in c.dofs.iter().enumerate() {
            if dofs.is_fixed(gi) {
                continue;
            }
            let fi = free_index[gi];
            if i < 3 {
                rhs[fi] += c.load[i];
            }
            for (j, &gj) in c.dofs.iter().enumerate() {
                let v = c.stiffness.get(i, j);
                if dofs.is_fixed(gj) {
                    rhs[fi] -= v * fixed_value(gj);
                } else {
                    triplets.push((fi, free_index[gj], v));
                }
            }
        }
    }

    Ok(GlobalSystem {
        matrix: SparseSymmetric::from_triplets(free_dofs.len(), triplets),
        rhs,
        dirichlet_values,
        free_dofs,
    })
}

/// The stabilised form `a_s` over all DOFs, without boundary elimination.
pub fn assemble_full_matrix(space: &FeSpace<'_>, lambda: f64) -> Result<SparseSymmetric> {
    let mut triplets = Vec::new();
    for element in &space.elements {
        let lwg = local_weak_gradient(element)?;
        let a = local_stiffness(element, &lwg, lambda).total();
        let ld = space.dofs.local_dofs(element);
        for (i, &gi) in ld.iter().enumerate() {
            for (j, &gj) in ld.iter().enumerate() {
                triplets.push((gi, gj, a.get(i, j)));
            }
        }
    }
    Ok(SparseSymmetric::from_triplets(space.dofs.total(), triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::{classify_element, CutOptions, ElementCut, Side};
    use crate::mesh::generate_uniform_square_mesh;

    fn square_element(cut: Option<(f64, f64)>) -> Element {
        let mesh = generate_uniform_square_mesh(1).unwrap();
        let cut = match cut {
            None => ElementCut::NonInterface { side: Side::Plus, beta: 1.0 },
            Some((bp, bm)) => {
                let ls = |p: Point| p.y - 0.5;
                let beta = move |s: Side, _: Point| if s == Side::Plus { bp } else { bm };
                classify_element(&mesh, 0, &ls, &beta, &CutOptions::default()).unwrap()
            }
        };
        Element::new(&mesh, 0, cut, 4).unwrap()
    }

    #[test]
    fn gram_of_horizontal_cut() {
        let e = square_element(Some((1.0, 2.0)));
        let lwg = local_weak_gradient(&e).unwrap();
        assert!((lwg.gram[0][0] - 1.5).abs() < 1e-13);
        assert!((lwg.gram[1][1] - 0.75).abs() < 1e-13);
        assert!(lwg.gram[0][1].abs() < 1e-15);
    }

    #[test]
    fn unit_edge_value_on_bottom_edge() {
        let e = square_element(None);
        let lwg = local_weak_gradient(&e).unwrap();
        // local edge 0 is the bottom edge, outward normal (0,-1):
        // w = M^{-1} int_e grad q . n_T = |e| n_T / |T|
        let mut v = vec![0.0; 7];
        v[3] = 1.0;
        let w = lwg.apply(&v);
        assert!(w[0].abs() < 1e-14 && (w[1] + 1.0).abs() < 1e-14, "{w:?}");
    }

    #[test]
    fn consistency_for_phi2() {
        let e = square_element(Some((1.0, 3.0)));
        let lwg = local_weak_gradient(&e).unwrap();
        let mut v = vec![0.0, 1.0, 0.0];
        for k in 0..e.edges.len() {
            v.push(e.edge_average(k, &[0.0, 1.0, 0.0]));
        }
        let w = lwg.apply(&v);
        assert!((w[0] - 1.0).abs() < 1e-13 && w[1].abs() < 1e-13);
    }

    #[test]
    fn constants_are_in_the_kernel() {
        for cut in [None, Some((1.0, 10.0))] {
            let e = square_element(cut);
            let lwg = local_weak_gradient(&e).unwrap();
            let a = local_stiffness(&e, &lwg, 1.0).total();
            let v = vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
            assert!(a.mul_vec(&v).iter().all(|x| x.abs() < 1e-13));
        }
    }

    #[test]
    fn stabilization_is_linear_in_lambda() {
        let e = square_element(Some((1.0, 10.0)));
        let lwg = local_weak_gradient(&e).unwrap();
        let a1 = local_stiffness(&e, &lwg, 0.7);
        let a2 = local_stiffness(&e, &lwg, 1.4);
        assert_eq!(a1.consistency, a2.consistency);
        for (x, y) in a1.stabilization.data.iter().zip(&a2.stabilization.data) {
            assert_eq!(2.0 * x, *y);
        }
    }
}
