//! Sparse matrix assembly: mass matrices, divergence coupling and loads.
//!
//! Assembly traverses elements in ascending index order with a fixed local
//! dof order and merges duplicate entries in that traversal order, so
//! repeated assembly of the same problem produces bitwise identical arrays.

use std::io::Write;
use std::sync::Arc;

use crate::elements::{bdm1, quadrature, AffineMap, DofMap};
use crate::projections::{ScalarFunction, VectorFunction};
use crate::{Error, Result};

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds CSR from triplets, summing duplicates in their given order
    /// (stable sort, so the merge order is the insertion order).
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; nrows];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_counts[r] += 1;
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        for r in 0..nrows {
            row_ptr[r + 1] = row_ptr[r] + row_counts[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut s = 0.0;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[idx] * x[self.col_idx[idx]];
            }
            y[r] = s;
        }
    }

    /// y = A^T x.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows {
            let xr = x[r];
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.col_idx[idx]] += self.values[idx] * xr;
            }
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.col_idx[idx] == c {
                return self.values[idx];
            }
        }
        0.0
    }

    /// Writes the matrix in "row col value" coordinate text format.
    pub fn dump_coo(&self, out: &mut impl Write) -> std::io::Result<()> {
        for r in 0..self.nrows {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(out, "{} {} {:e}", r, self.col_idx[idx], self.values[idx])?;
            }
        }
        Ok(())
    }
}

/// Uniformly positive material coefficients a and b (time independent).
#[derive(Clone)]
pub struct ProblemCoefficients {
    pub a: ScalarFunction,
    pub b: ScalarFunction,
}

impl ProblemCoefficients {
    pub fn new(a: ScalarFunction, b: ScalarFunction) -> Self {
        Self { a, b }
    }

    pub fn constant(a: f64, b: f64) -> Self {
        Self {
            a: ScalarFunction::constant(a),
            b: ScalarFunction::constant(b),
        }
    }
}

fn check_positive(name: &'static str, value: f64, x: [f64; 2]) -> Result<()> {
    if value < 1e-12 {
        return Err(Error::NonPositiveCoefficient {
            name,
            value,
            x: x[0],
            y: x[1],
        });
    }
    Ok(())
}

/// Pressure mass matrix (a p, q): diagonal since P0 bases are elementwise.
pub fn assemble_mass_p0(
    coeffs: &ProblemCoefficients,
    dofmap: &Arc<DofMap>,
) -> Result<SparseMatrix> {
    let mesh = &dofmap.mesh;
    let rule = quadrature(6).expect("builtin rule");
    let mut triplets = Vec::with_capacity(mesh.num_triangles());
    for k in 0..mesh.num_triangles() {
        let map = AffineMap::from_triangle(mesh.tri_coords(k))?;
        let mut entry = 0.0;
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*p);
            let a = coeffs.a.eval(x[0], x[1], 0.0);
            check_positive("a", a, x)?;
            entry += w * map.det * a;
        }
        triplets.push((k, k, entry));
    }
    Ok(SparseMatrix::from_triplets(
        dofmap.num_p0,
        dofmap.num_p0,
        triplets,
    ))
}

/// Element mass block of the mapped dual basis (no orientation signs).
pub(crate) fn element_mass_block(
    coords: [[f64; 2]; 3],
    b: &ScalarFunction,
) -> Result<[[f64; 6]; 6]> {
    let rule = quadrature(6).expect("builtin rule");
    let map = AffineMap::from_triangle(coords)?;
    let basis = bdm1();
    let mut block = [[0.0; 6]; 6];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let x = map.to_physical(*p);
        let bval = b.eval(x[0], x[1], 0.0);
        check_positive("b", bval, x)?;
        let (vals, _) = basis.eval(*p);
        // Piola without the 1/det factors: one global 1/det remains.
        let mapped: Vec<[f64; 2]> = vals
            .iter()
            .map(|v| {
                [
                    map.jac[0][0] * v[0] + map.jac[0][1] * v[1],
                    map.jac[1][0] * v[0] + map.jac[1][1] * v[1],
                ]
            })
            .collect();
        for i in 0..6 {
            for j in 0..=i {
                let dot = mapped[i][0] * mapped[j][0] + mapped[i][1] * mapped[j][1];
                block[i][j] += w * bval * dot / map.det;
            }
        }
    }
    for i in 0..6 {
        for j in i + 1..6 {
            block[i][j] = block[j][i];
        }
    }
    Ok(block)
}

/// Velocity mass matrix (b u, v) on the BDM1 space.
pub fn assemble_mass_bdm1(
    coeffs: &ProblemCoefficients,
    dofmap: &Arc<DofMap>,
) -> Result<SparseMatrix> {
    let mesh = &dofmap.mesh;
    let mut triplets = Vec::with_capacity(36 * mesh.num_triangles());
    for k in 0..mesh.num_triangles() {
        let block = element_mass_block(mesh.tri_coords(k), &coeffs.b)?;
        let dofs = dofmap.elem_dofs[k];
        let signs = dofmap.elem_signs[k];
        for i in 0..6 {
            for j in 0..6 {
                triplets.push((dofs[i], dofs[j], signs[i] * signs[j] * block[i][j]));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(
        dofmap.num_bdm,
        dofmap.num_bdm,
        triplets,
    ))
}

/// Divergence coupling D with rows over pressure dofs and columns over
/// velocity dofs: the (q, v) entry is (div v, q). Entries are geometry independent:
/// integrating the constant divergence of a mapped basis function over its
/// element gives (reference divergence) / 2.
pub fn assemble_div(dofmap: &Arc<DofMap>) -> SparseMatrix {
    let mesh = &dofmap.mesh;
    let divs = bdm1().divergences();
    let mut triplets = Vec::with_capacity(6 * mesh.num_triangles());
    for k in 0..mesh.num_triangles() {
        let dofs = dofmap.elem_dofs[k];
        let signs = dofmap.elem_signs[k];
        for loc in 0..6 {
            triplets.push((k, dofs[loc], signs[loc] * divs[loc] / 2.0));
        }
    }
    SparseMatrix::from_triplets(dofmap.num_p0, dofmap.num_bdm, triplets)
}

/// Load vector (f, q) over the pressure space.
pub fn assemble_load_p0(f: &ScalarFunction, t: f64, dofmap: &Arc<DofMap>) -> Vec<f64> {
    let mesh = &dofmap.mesh;
    let mut load = vec![0.0; dofmap.num_p0];
    if f.is_zero() {
        return load;
    }
    let rule = quadrature(6).expect("builtin rule");
    for (k, entry) in load.iter_mut().enumerate() {
        let map = AffineMap::from_triangle(mesh.tri_coords(k)).expect("valid mesh");
        let mut s = 0.0;
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*p);
            s += w * map.det * f.eval(x[0], x[1], t);
        }
        *entry = s;
    }
    load
}

/// Load vector (g, v) over the velocity space.
pub fn assemble_load_bdm1(g: &VectorFunction, t: f64, dofmap: &Arc<DofMap>) -> Vec<f64> {
    let mesh = &dofmap.mesh;
    let mut load = vec![0.0; dofmap.num_bdm];
    if g.is_zero() {
        return load;
    }
    let rule = quadrature(6).expect("builtin rule");
    let basis = bdm1();
    let ref_vals: Vec<[[f64; 2]; 6]> = rule.points.iter().map(|p| basis.eval(*p).0).collect();
    for k in 0..mesh.num_triangles() {
        let map = AffineMap::from_triangle(mesh.tri_coords(k)).expect("valid mesh");
        let dofs = dofmap.elem_dofs[k];
        let signs = dofmap.elem_signs[k];
        let mut local = [0.0; 6];
        for (q, w) in rule.weights.iter().enumerate() {
            let x = map.to_physical(rule.points[q]);
            let gv = g.eval(x[0], x[1], t);
            for loc in 0..6 {
                let v = ref_vals[q][loc];
                // (g, J v / det) * det collapses to g . (J v).
                let jv = [
                    map.jac[0][0] * v[0] + map.jac[0][1] * v[1],
                    map.jac[1][0] * v[0] + map.jac[1][1] * v[1],
                ];
                local[loc] += w * (gv[0] * jv[0] + gv[1] * jv[1]);
            }
        }
        for loc in 0..6 {
            load[dofs[loc]] += signs[loc] * local[loc];
        }
    }
    load
}
