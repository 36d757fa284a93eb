//! Meshes on `(0,1)` and axis-aligned rectangles, P1 gradients, one-point
//! quadrature and Dirichlet projection.
//!
//! Every integral in the crate goes through [`Mesh::integrate`], which
//! multiplies one value per element by the element measure and reduces with
//! pairwise summation. Element values are always taken at the element
//! midpoint (1D) or centroid (2D).

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position in the plane; 1D meshes leave the second coordinate at zero.
pub type Point = [f64; 2];

/// Gradient of a P1 function on one element; 1D meshes use the first slot only.
pub type Gradient = [f64; 2];

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshId(u64);

impl fmt::Display for MeshId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    id: MeshId,
    dim: usize,
    nodes: Vec<Point>,
    /// Vertex indices; only the first `dim + 1` entries are used.
    elements: Vec<[usize; 3]>,
    measures: Vec<f64>,
    centroids: Vec<Point>,
    /// Gradients of the local hat functions, one per vertex.
    basis_gradients: Vec<[Gradient; 3]>,
    boundary: Vec<bool>,
    interior_index: Vec<Option<usize>>,
    interior_nodes: Vec<usize>,
    lower: Point,
    upper: Point,
}

/// Builds a uniform mesh: `dim = 1` takes one resolution (segments on `(0,1)`),
/// `dim = 2` takes one or two (cells per side of the unit square).
pub fn build_mesh(dim: usize, resolution: &[usize]) -> Result<Mesh> {
    match (dim, resolution) {
        (1, [n]) => Mesh::interval(*n),
        (2, [n]) => Mesh::unit_square(*n, *n),
        (2, [nx, ny]) => Mesh::unit_square(*nx, *ny),
        (1 | 2, _) => Err(Error::DegenerateResolution(format!(
            "dimension {dim} expects {} resolution value(s), got {}",
            if dim == 1 { "1" } else { "1 or 2" },
            resolution.len()
        ))),
        _ => Err(Error::DegenerateResolution(format!(
            "dimension must be 1 or 2, got {dim}"
        ))),
    }
}

impl Mesh {
    /// Uniform partition of `(0,1)` into `n` segments.
    pub fn interval(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateResolution(format!(
                "resolution ≥ 2 required (got {n}): no interior node"
            )));
        }
        let h = 1.0 / n as f64;
        let nodes: Vec<Point> = (0..=n).map(|i| [i as f64 * h, 0.0]).collect();
        let elements: Vec<[usize; 3]> = (0..n).map(|i| [i, i + 1, usize::MAX]).collect();
        let mut boundary = vec![false; n + 1];
        boundary[0] = true;
        boundary[n] = true;
        Ok(Self::assemble(1, nodes, elements, boundary, [0.0, 0.0], [1.0, 0.0]))
    }

    pub fn unit_square(nx: usize, ny: usize) -> Result<Self> {
        Self::rectangle(nx, ny, [0.0, 0.0], [1.0, 1.0])
    }

    /// Uniform right-triangle split of `[lower, upper]`; each cell is cut
    /// along its lower-left to upper-right diagonal.
    pub fn rectangle(nx: usize, ny: usize, lower: Point, upper: Point) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::DegenerateResolution(format!(
                "resolution ≥ 2 required per side (got {nx}×{ny})"
            )));
        }
        if !(upper[0] > lower[0] && upper[1] > lower[1]) {
            return Err(Error::DegenerateResolution(format!(
                "empty rectangle {lower:?}–{upper:?}"
            )));
        }
        let hx = (upper[0] - lower[0]) / nx as f64;
        let hy = (upper[1] - lower[1]) / ny as f64;
        let index = |i: usize, j: usize| j * (nx + 1) + i;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut boundary = Vec::with_capacity(nodes.capacity());
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([lower[0] + i as f64 * hx, lower[1] + j as f64 * hy]);
                boundary.push(i == 0 || j == 0 || i == nx || j == ny);
            }
        }
        let mut elements = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let a = index(i, j);
                let b = index(i + 1, j);
                let c = index(i + 1, j + 1);
                let d = index(i, j + 1);
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            }
        }
        Ok(Self::assemble(2, nodes, elements, boundary, lower, upper))
    }

    fn assemble(
        dim: usize,
        nodes: Vec<Point>,
        elements: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        lower: Point,
        upper: Point,
    ) -> Self {
        let mut measures = Vec::with_capacity(elements.len());
        let mut centroids = Vec::with_capacity(elements.len());
        let mut basis_gradients = Vec::with_capacity(elements.len());
        for el in &elements {
            if dim == 1 {
                let (x0, x1) = (nodes[el[0]][0], nodes[el[1]][0]);
                let h = x1 - x0;
                measures.push(h);
                centroids.push([0.5 * (x0 + x1), 0.0]);
                basis_gradients.push([[-1.0 / h, 0.0], [1.0 / h, 0.0], [0.0, 0.0]]);
            } else {
                let [p0, p1, p2] = [nodes[el[0]], nodes[el[1]], nodes[el[2]]];
                let twice_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
                measures.push(0.5 * twice_area);
                centroids.push([(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0]);
                basis_gradients.push([
                    [(p1[1] - p2[1]) / twice_area, (p2[0] - p1[0]) / twice_area],
                    [(p2[1] - p0[1]) / twice_area, (p0[0] - p2[0]) / twice_area],
                    [(p0[1] - p1[1]) / twice_area, (p1[0] - p0[0]) / twice_area],
                ]);
            }
        }
        let mut interior_index = vec![None; nodes.len()];
        let mut interior_nodes = Vec::new();
        for (node, &on_boundary) in boundary.iter().enumerate() {
            if !on_boundary {
                interior_index[node] = Some(interior_nodes.len());
                interior_nodes.push(node);
            }
        }
        Self {
            id: MeshId(NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed)),
            dim,
            nodes,
            elements,
            measures,
            centroids,
            basis_gradients,
            boundary,
            interior_index,
            interior_nodes,
            lower,
            upper,
        }
    }

    pub fn id(&self) -> MeshId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_interior(&self) -> usize {
        self.interior_nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i][..self.dim]
    }

    /// Vertex indices of element `e` (two in 1D, three in 2D).
    pub fn element_nodes(&self, e: usize) -> &[usize] {
        &self.elements[e][..self.dim + 1]
    }

    pub fn element_measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn centroid(&self, e: usize) -> &[f64] {
        &self.centroids[e][..self.dim]
    }

    pub fn centroids(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.centroids.iter().map(move |c| &c[..self.dim])
    }

    pub(crate) fn basis_gradients(&self, e: usize) -> &[Gradient] {
        &self.basis_gradients[e][..self.dim + 1]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_index[node]
    }

    /// Lebesgue measure of the domain.
    pub fn domain_measure(&self) -> f64 {
        match self.dim {
            1 => self.upper[0] - self.lower[0],
            _ => (self.upper[0] - self.lower[0]) * (self.upper[1] - self.lower[1]),
        }
    }

    pub fn domain_center(&self) -> Point {
        [0.5 * (self.lower[0] + self.upper[0]), 0.5 * (self.lower[1] + self.upper[1])]
    }

    pub fn bounds(&self) -> (Point, Point) {
        (self.lower, self.upper)
    }

    /// Node closest to the centre of the domain.
    pub fn center_node(&self) -> usize {
        let c = self.domain_center();
        let dist = |p: &Point| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
        (0..self.nodes.len())
            .min_by(|&a, &b| dist(&self.nodes[a]).total_cmp(&dist(&self.nodes[b])))
            .expect("mesh has nodes")
    }

    /// `Σ measure(e)·value(e)` with pairwise summation.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.measures.len() {
            return Err(Error::LengthMismatch {
                expected: self.measures.len(),
                found: values.len(),
            });
        }
        let weighted: Vec<f64> = self.measures.iter().zip(values).map(|(m, v)| m * v).collect();
        Ok(pairwise_sum(&weighted))
    }

    pub(crate) fn check(&self, id: MeshId) -> Result<()> {
        if self.id != id {
            return Err(Error::MeshMismatch { expected: self.id, found: id });
        }
        Ok(())
    }
}

/// Free-function form of [`Mesh::integrate`].
pub fn integrate(values: &[f64], mesh: &Mesh) -> Result<f64> {
    mesh.integrate(values)
}

/// Pairwise (cascade) summation; result is independent of how callers chunk
/// the input and has `O(log n)` error growth.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Nodal values of a P1 function. Membership in the discrete `W₀` space
/// additionally requires zero boundary values, see
/// [`GridFunction::is_dirichlet_compliant`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh_id: MeshId,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self { mesh_id: mesh.id, values: vec![0.0; mesh.num_nodes()] }
    }

    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(Error::LengthMismatch { expected: mesh.num_nodes(), found: values.len() });
        }
        Ok(Self { mesh_id: mesh.id, values })
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn(mesh: &Mesh, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..mesh.num_nodes()).map(|i| f(mesh.node(i))).collect();
        Self { mesh_id: mesh.id, values }
    }

    /// Builds a Dirichlet-compliant function from interior values.
    pub fn from_interior(mesh: &Mesh, interior: &[f64]) -> Result<Self> {
        if interior.len() != mesh.num_interior() {
            return Err(Error::LengthMismatch { expected: mesh.num_interior(), found: interior.len() });
        }
        let mut values = vec![0.0; mesh.num_nodes()];
        for (&node, &v) in mesh.interior_nodes().iter().zip(interior) {
            values[node] = v;
        }
        Ok(Self { mesh_id: mesh.id, values })
    }

    /// Hat function of height one at `node`.
    pub fn hat(mesh: &Mesh, node: usize) -> Self {
        let mut values = vec![0.0; mesh.num_nodes()];
        values[node] = 1.0;
        Self { mesh_id: mesh.id, values }
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn interior_values(&self, mesh: &Mesh) -> Vec<f64> {
        mesh.interior_nodes().iter().map(|&n| self.values[n]).collect()
    }

    pub fn is_dirichlet_compliant(&self, mesh: &Mesh) -> bool {
        self.first_boundary_violation(mesh).is_none()
    }

    pub(crate) fn first_boundary_violation(&self, mesh: &Mesh) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .find(|&(i, &v)| mesh.is_boundary(i) && v != 0.0)
            .map(|(i, &v)| (i, v))
    }

    pub(crate) fn require_dirichlet(&self, mesh: &Mesh) -> Result<()> {
        mesh.check(self.mesh_id)?;
        match self.first_boundary_violation(mesh) {
            Some((node, value)) => Err(Error::NotDirichletCompliant { node, value }),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { mesh_id: self.mesh_id, values: self.values.iter().map(|v| t * v).collect() }
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, t: f64, other: &GridFunction) -> Self {
        debug_assert_eq!(self.mesh_id, other.mesh_id);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + t * b).collect();
        Self { mesh_id: self.mesh_id, values }
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.add_scaled(-1.0, other)
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Nodal max-norm distance.
    pub fn max_distance(&self, other: &GridFunction) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Linear interpolation to element midpoints/centroids.
    pub fn at_centroids(&self, mesh: &Mesh) -> Result<ElementField> {
        mesh.check(self.mesh_id)?;
        let k = (mesh.dim() + 1) as f64;
        let values = (0..mesh.num_elements())
            .map(|e| mesh.element_nodes(e).iter().map(|&n| self.values[n]).sum::<f64>() / k)
            .collect();
        Ok(ElementField { mesh_id: mesh.id, values })
    }

    /// Per-element Euclidean magnitude of the P1 gradient.
    pub fn gradient_magnitudes(&self, mesh: &Mesh) -> Result<ElementField> {
        mesh.check(self.mesh_id)?;
        let values = (0..mesh.num_elements())
            .map(|e| {
                let g = element_gradient(self, mesh, e);
                g[0].hypot(g[1])
            })
            .collect();
        Ok(ElementField { mesh_id: mesh.id, values })
    }
}

/// One value per element, e.g. midpoint samples of a function or `|∇u|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    mesh_id: MeshId,
    values: Vec<f64>,
}

impl ElementField {
    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_elements() {
            return Err(Error::LengthMismatch { expected: mesh.num_elements(), found: values.len() });
        }
        Ok(Self { mesh_id: mesh.id, values })
    }

    /// Samples `f` at element midpoints/centroids.
    pub fn from_fn(mesh: &Mesh, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = mesh.centroids().map(f).collect();
        Self { mesh_id: mesh.id, values }
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { mesh_id: self.mesh_id, values: self.values.iter().map(|v| t * v).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Constant P1 gradient of `u` on element `e`.
pub fn element_gradient(u: &GridFunction, mesh: &Mesh, e: usize) -> Gradient {
    let mut g = [0.0; 2];
    for (&node, grad) in mesh.element_nodes(e).iter().zip(mesh.basis_gradients(e)) {
        let value = u.values[node];
        g[0] += value * grad[0];
        g[1] += value * grad[1];
    }
    g
}

/// Zeroes boundary nodal values and leaves interior values untouched.
pub fn project_dirichlet(u: &GridFunction, mesh: &Mesh) -> Result<GridFunction> {
    mesh.check(u.mesh_id)?;
    let values = u
        .values
        .iter()
        .zip(mesh.boundary_mask())
        .map(|(&v, &b)| if b { 0.0 } else { v })
        .collect();
    Ok(GridFunction { mesh_id: u.mesh_id, values })
}
