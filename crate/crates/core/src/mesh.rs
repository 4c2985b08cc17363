//! Triangulations of the L-shaped domain (-1,1)^2 minus the closed unit square.
//!
//! Meshes are built as structured triangulations of the three unit squares
//! making up the L-shape and refined uniformly (red refinement) into nested
//! hierarchies. Vertices, edges and triangles are numbered lexicographically
//! by coordinate so that two builds of the same configuration are identical.
//!
//! Orientation conventions needed by H(div) elements:
//! - every triangle is stored counterclockwise,
//! - every edge stores its vertices as (lower index, higher index),
//! - the global unit normal of an interior edge points from the
//!   lower-numbered adjacent triangle into the higher-numbered one; for a
//!   boundary edge it points out of the domain.

use std::sync::Arc;

use crate::{Error, Result};

/// Oriented mesh edge.
#[derive(Clone, Debug)]
pub struct Edge {
    /// Endpoint vertex indices, lower index first.
    pub vertices: [usize; 2],
    /// Lower-numbered adjacent triangle.
    pub tri_lo: usize,
    /// Higher-numbered adjacent triangle (`None` on the boundary).
    pub tri_hi: Option<usize>,
    /// Global unit normal; outward normal of `tri_lo` on this edge.
    pub normal: [f64; 2],
    /// True if the edge lies on the domain boundary.
    pub boundary: bool,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.boundary
    }
}

/// Link from a refined mesh back to the mesh it was refined from.
#[derive(Clone)]
pub struct ParentLink {
    /// The coarser mesh.
    pub mesh: Arc<Mesh>,
    /// For each fine triangle, the index of its parent triangle.
    pub parent_of: Vec<usize>,
}

/// Conforming triangulation of the L-shaped domain.
///
/// Immutable after construction; share it with [`Arc`].
#[derive(Clone)]
pub struct Mesh {
    /// Vertex coordinates, lexicographically sorted by (x, y).
    pub vertices: Vec<[f64; 2]>,
    /// Vertex index triples, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Edges with adjacency and orientation data.
    pub edges: Vec<Edge>,
    /// Per triangle, the edge indices of the local edges (0,1), (0,2), (1,2).
    pub tri_edges: Vec<[usize; 3]>,
    /// Refinement depth (0 for [`build_lshape`] output).
    pub level: u32,
    /// Present when this mesh was produced by [`refine_uniform`].
    pub parent: Option<ParentLink>,
}

impl Mesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Coordinates of the three vertices of triangle `k`.
    pub fn tri_coords(&self, k: usize) -> [[f64; 2]; 3] {
        let t = self.triangles[k];
        [
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
        ]
    }

    /// Signed area of triangle `k` (positive by the orientation invariant).
    pub fn tri_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.tri_coords(k);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    pub fn tri_centroid(&self, k: usize) -> [f64; 2] {
        let [a, b, c] = self.tri_coords(k);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Longest edge of triangle `k`.
    pub fn tri_diameter(&self, k: usize) -> f64 {
        let [a, b, c] = self.tri_coords(k);
        dist(a, b).max(dist(b, c)).max(dist(a, c))
    }

    /// Length of edge `e`.
    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    /// For each triangle of the parent mesh, its four children in this mesh.
    ///
    /// Returns `None` if this mesh has no parent.
    pub fn children_of_parent(&self) -> Option<Vec<[usize; 4]>> {
        let link = self.parent.as_ref()?;
        let mut children = vec![[usize::MAX; 4]; link.mesh.num_triangles()];
        let mut count = vec![0usize; link.mesh.num_triangles()];
        for (fine, &coarse) in link.parent_of.iter().enumerate() {
            children[coarse][count[coarse]] = fine;
            count[coarse] += 1;
        }
        debug_assert!(count.iter().all(|&c| c == 4));
        Some(children)
    }

    /// Walks the parent chain from `fine` down to `self`, composing the
    /// triangle maps. Returns `None` if `self` is not an ancestor of `fine`
    /// (a mesh counts as its own ancestor).
    pub fn triangle_map_from(self: &Arc<Mesh>, fine: &Arc<Mesh>) -> Option<Vec<usize>> {
        if Arc::ptr_eq(self, fine) {
            return Some((0..fine.num_triangles()).collect());
        }
        let mut map: Vec<usize> = (0..fine.num_triangles()).collect();
        let mut current = Arc::clone(fine);
        while let Some(link) = current.parent.clone() {
            for m in map.iter_mut() {
                *m = link.parent_of[*m];
            }
            if Arc::ptr_eq(&link.mesh, self) {
                return Some(map);
            }
            current = link.mesh;
        }
        None
    }

    /// Checks all structural invariants; used by tests and debug builds.
    pub fn validate(&self) -> Result<()> {
        for k in 0..self.num_triangles() {
            if self.tri_area(k) <= 0.0 {
                return Err(Error::DegenerateTriangle {
                    det: 2.0 * self.tri_area(k),
                });
            }
        }
        // Euler relation for a simply connected planar triangulation.
        let euler =
            self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64;
        if euler != 1 {
            return Err(Error::SingularSystem(format!(
                "Euler relation violated: V - E + T = {euler}"
            )));
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let expected = self.outward_normal(edge.tri_lo, edge.vertices);
            let dot = expected[0] * edge.normal[0] + expected[1] * edge.normal[1];
            if (dot - 1.0).abs() > 1e-12 {
                return Err(Error::SingularSystem(format!(
                    "edge {e}: stored normal disagrees with outward normal of lower triangle"
                )));
            }
            if edge.boundary != edge.tri_hi.is_none() {
                return Err(Error::SingularSystem(format!(
                    "edge {e}: boundary flag inconsistent with adjacency"
                )));
            }
        }
        if let Some(link) = &self.parent {
            if link.parent_of.len() != self.num_triangles() {
                return Err(Error::SingularSystem("parent map length mismatch".into()));
            }
            let children = self.children_of_parent().unwrap();
            for (coarse, ch) in children.iter().enumerate() {
                let pa = link.mesh.tri_area(coarse);
                for &fine in ch {
                    if (self.tri_area(fine) - pa / 4.0).abs() > 1e-13 * pa.max(1.0) {
                        return Err(Error::SingularSystem(format!(
                            "child of triangle {coarse} does not have a quarter of its area"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Outward unit normal of triangle `k` on the edge with the given
    /// endpoint vertices.
    pub fn outward_normal(&self, k: usize, edge_vertices: [usize; 2]) -> [f64; 2] {
        let a = self.vertices[edge_vertices[0]];
        let b = self.vertices[edge_vertices[1]];
        let t = self.triangles[k];
        let other = t
            .iter()
            .copied()
            .find(|v| *v != edge_vertices[0] && *v != edge_vertices[1])
            .expect("edge does not belong to triangle");
        let c = self.vertices[other];
        let tangent = [b[0] - a[0], b[1] - a[1]];
        let len = (tangent[0] * tangent[0] + tangent[1] * tangent[1]).sqrt();
        let mut n = [tangent[1] / len, -tangent[0] / len];
        // Flip so that the remaining vertex lies on the negative side.
        if n[0] * (c[0] - a[0]) + n[1] * (c[1] - a[1]) > 0.0 {
            n = [-n[0], -n[1]];
        }
        n
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Builds the structured triangulation of the L-shape with `n` cells per
/// unit length (mesh parameter h = 1/n).
///
/// Each of the three unit squares is split into n x n cells and every cell
/// into two triangles by its lower-left to upper-right diagonal. The lines
/// x = 0 and y = 0 are mesh lines at every resolution.
pub fn build_lshape(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidResolution);
    }
    let m = 2 * n; // lattice cells per direction over (-1,1)
    let coord = |i: usize| i as f64 / n as f64 - 1.0;

    // Lattice points outside the removed square [0,1]^2 interior/boundary,
    // i.e. keep (i, j) with x <= 0 or y <= 0.
    let mut vertices = Vec::new();
    let mut id = vec![usize::MAX; (m + 1) * (m + 1)];
    for i in 0..=m {
        for j in 0..=m {
            if i <= n || j <= n {
                id[i * (m + 1) + j] = vertices.len();
                vertices.push([coord(i), coord(j)]);
            }
        }
    }

    let mut triangles = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i >= n && j >= n {
                continue; // cell inside the removed square
            }
            let ll = id[i * (m + 1) + j];
            let lr = id[(i + 1) * (m + 1) + j];
            let ul = id[i * (m + 1) + j + 1];
            let ur = id[(i + 1) * (m + 1) + j + 1];
            triangles.push([ll, lr, ur]);
            triangles.push([ll, ur, ul]);
        }
    }

    Ok(finish_mesh(vertices, triangles, 0, None))
}

/// Red refinement: splits every triangle into four congruent children via
/// its edge midpoints. The result keeps a [`ParentLink`] to `mesh`.
pub fn refine_uniform(mesh: &Arc<Mesh>) -> Mesh {
    let mut vertices = mesh.vertices.clone();
    // Midpoint vertex per coarse edge, keyed by sorted endpoint pair.
    let mut midpoint = std::collections::BTreeMap::<[usize; 2], usize>::new();
    for edge in &mesh.edges {
        let [a, b] = edge.vertices;
        let va = mesh.vertices[a];
        let vb = mesh.vertices[b];
        midpoint.insert([a, b], vertices.len());
        vertices.push([(va[0] + vb[0]) / 2.0, (va[1] + vb[1]) / 2.0]);
    }
    let mid = |a: usize, b: usize| midpoint[&[a.min(b), a.max(b)]];

    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    let mut parent_of = Vec::with_capacity(4 * mesh.num_triangles());
    for (k, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let mab = mid(a, b);
        let mac = mid(a, c);
        let mbc = mid(b, c);
        for child in [[a, mab, mac], [mab, b, mbc], [mac, mbc, c], [mab, mbc, mac]] {
            triangles.push(child);
            parent_of.push(k);
        }
    }

    // Restore lexicographic vertex numbering.
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&p, &q| {
        vertices[p][0]
            .total_cmp(&vertices[q][0])
            .then(vertices[p][1].total_cmp(&vertices[q][1]))
    });
    let mut rank = vec![0usize; vertices.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let vertices: Vec<[f64; 2]> = order.iter().map(|&old| vertices[old]).collect();
    for tri in triangles.iter_mut() {
        for v in tri.iter_mut() {
            *v = rank[*v];
        }
    }

    finish_mesh(
        vertices,
        triangles,
        mesh.level + 1,
        Some((Arc::clone(mesh), parent_of)),
    )
}

/// Mesh size and shape regularity: returns (max element diameter,
/// min over elements of inradius / diameter).
pub fn mesh_stats(mesh: &Mesh) -> (f64, f64) {
    let mut h: f64 = 0.0;
    let mut gamma = f64::INFINITY;
    for k in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.tri_coords(k);
        let perimeter = dist(a, b) + dist(b, c) + dist(a, c);
        let inradius = 2.0 * mesh.tri_area(k) / perimeter;
        let diameter = mesh.tri_diameter(k);
        h = h.max(diameter);
        gamma = gamma.min(inradius / diameter);
    }
    (h, gamma)
}

/// Sorts triangles canonically, derives edges and orientation data.
fn finish_mesh(
    vertices: Vec<[f64; 2]>,
    mut triangles: Vec<[usize; 3]>,
    level: u32,
    parent: Option<(Arc<Mesh>, Vec<usize>)>,
) -> Mesh {
    // Canonical triangle numbering: lexicographic by sorted vertex triple
    // (vertex ids are already coordinate-ordered).
    let key = |t: &[usize; 3]| {
        let mut s = *t;
        s.sort_unstable();
        s
    };
    let mut order: Vec<usize> = (0..triangles.len()).collect();
    order.sort_by_key(|&k| key(&triangles[k]));
    triangles = order.iter().map(|&k| triangles[k]).collect();
    let parent = parent.map(|(mesh, parent_of)| ParentLink {
        mesh,
        parent_of: order.iter().map(|&k| parent_of[k]).collect(),
    });

    // Edge table keyed by sorted endpoints; adjacency in triangle order.
    let mut table = std::collections::BTreeMap::<[usize; 2], (usize, Option<usize>)>::new();
    for (k, &[a, b, c]) in triangles.iter().enumerate() {
        for [p, q] in [[a, b], [a, c], [b, c]] {
            let key = [p.min(q), p.max(q)];
            table
                .entry(key)
                .and_modify(|adj| {
                    debug_assert!(adj.1.is_none(), "edge shared by more than two triangles");
                    adj.1 = Some(k);
                })
                .or_insert((k, None));
        }
    }

    let mut edges = Vec::with_capacity(table.len());
    let mut edge_index = std::collections::BTreeMap::new();
    let mut stub = Mesh {
        vertices,
        triangles,
        edges: Vec::new(),
        tri_edges: Vec::new(),
        level,
        parent,
    };
    for (&key, &(t_lo, t_hi)) in &table {
        edge_index.insert(key, edges.len());
        edges.push(Edge {
            vertices: key,
            tri_lo: t_lo,
            tri_hi: t_hi,
            normal: stub.outward_normal(t_lo, key),
            boundary: t_hi.is_none(),
        });
    }
    let tri_edges = stub
        .triangles
        .iter()
        .map(|&[a, b, c]| {
            [
                edge_index[&[a.min(b), a.max(b)]],
                edge_index[&[a.min(c), a.max(c)]],
                edge_index[&[b.min(c), b.max(c)]],
            ]
        })
        .collect();
    stub.edges = edges;
    stub.tri_edges = tri_edges;
    stub
}
