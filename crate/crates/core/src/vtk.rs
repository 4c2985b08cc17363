//! Legacy ASCII VTK export of meshes and discrete fields.
//!
//! Two layouts are written: the shared-vertex mesh with cell data (P0
//! pressure scalars and BDM1 velocity vectors sampled at centroids), and a
//! disconnected-triangle layout for the piecewise linear pressure, which is
//! discontinuous across edges and therefore needs per-cell corner values.

use std::io::Write;

use crate::mesh::Mesh;
use crate::projections::{FieldBDM1, FieldP0, FieldP1};

fn write_header(out: &mut impl Write, title: &str) -> std::io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")
}

fn write_cells(out: &mut impl Write, triangles: &[[usize; 3]]) -> std::io::Result<()> {
    writeln!(out, "CELLS {} {}", triangles.len(), 4 * triangles.len())?;
    for t in triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {}", triangles.len())?;
    for _ in triangles {
        writeln!(out, "5")?;
    }
    Ok(())
}

/// Mesh with optional cell data: P0 pressure and centroid velocity vectors.
pub fn write_mesh_vtk(
    out: &mut impl Write,
    mesh: &Mesh,
    pressure: Option<&FieldP0>,
    velocity: Option<&FieldBDM1>,
    title: &str,
) -> std::io::Result<()> {
    write_header(out, title)?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for v in &mesh.vertices {
        writeln!(out, "{:.12e} {:.12e} 0.0", v[0], v[1])?;
    }
    write_cells(out, &mesh.triangles)?;
    if pressure.is_some() || velocity.is_some() {
        writeln!(out, "CELL_DATA {}", mesh.num_triangles())?;
    }
    if let Some(p) = pressure {
        writeln!(out, "SCALARS pressure double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for c in &p.coeffs {
            writeln!(out, "{c:.12e}")?;
        }
    }
    if let Some(u) = velocity {
        writeln!(out, "VECTORS velocity double")?;
        for k in 0..mesh.num_triangles() {
            let c = mesh.tri_centroid(k);
            let v = u.eval(k, c[0], c[1]);
            writeln!(out, "{:.12e} {:.12e} 0.0", v[0], v[1])?;
        }
    }
    Ok(())
}

/// Piecewise linear field on disconnected triangles, sampled at the three
/// corners of every cell.
pub fn write_p1_vtk(out: &mut impl Write, field: &FieldP1, title: &str) -> std::io::Result<()> {
    let mesh = &field.mesh;
    write_header(out, title)?;
    writeln!(out, "POINTS {} double", 3 * mesh.num_triangles())?;
    for k in 0..mesh.num_triangles() {
        for v in mesh.tri_coords(k) {
            writeln!(out, "{:.12e} {:.12e} 0.0", v[0], v[1])?;
        }
    }
    let triangles: Vec<[usize; 3]> = (0..mesh.num_triangles())
        .map(|k| [3 * k, 3 * k + 1, 3 * k + 2])
        .collect();
    write_cells(out, &triangles)?;
    writeln!(out, "POINT_DATA {}", 3 * mesh.num_triangles())?;
    writeln!(out, "SCALARS pressure double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for k in 0..mesh.num_triangles() {
        for v in mesh.tri_coords(k) {
            writeln!(out, "{:.12e}", field.eval(k, v[0], v[1]))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_lshape;
    use crate::projections::{FieldP0, FieldP1};
    use std::sync::Arc;

    #[test]
    fn mesh_file_has_expected_structure() {
        let mesh = Arc::new(build_lshape(1).unwrap());
        let p = FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: (0..mesh.num_triangles()).map(|k| k as f64).collect(),
        };
        let mut buf = Vec::new();
        write_mesh_vtk(&mut buf, &mesh, Some(&p), None, "test").unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("POINTS 8 double"));
        assert!(text.contains("CELLS 6 24"));
        assert!(text.contains("CELL_TYPES 6"));
        assert!(text.contains("CELL_DATA 6"));
        assert!(text.contains("SCALARS pressure double 1"));
        // every cell line starts with the vertex count 3
        let cell_lines: Vec<&str> = text
            .lines()
            .skip_while(|l| !l.starts_with("CELLS"))
            .skip(1)
            .take(6)
            .collect();
        assert!(cell_lines.iter().all(|l| l.starts_with("3 ")));
    }

    #[test]
    fn p1_file_duplicates_vertices_per_cell() {
        let mesh = Arc::new(build_lshape(1).unwrap());
        let field = FieldP1::zeros(&mesh);
        let mut buf = Vec::new();
        write_p1_vtk(&mut buf, &field, "ptilde").unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("POINTS 18 double"));
        assert!(text.contains("POINT_DATA 18"));
    }

    #[test]
    fn output_is_deterministic() {
        let mesh = Arc::new(build_lshape(2).unwrap());
        let p = FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: (0..mesh.num_triangles())
                .map(|k| (k as f64).sin())
                .collect(),
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_mesh_vtk(&mut a, &mesh, Some(&p), None, "x").unwrap();
        write_mesh_vtk(&mut b, &mesh, Some(&p), None, "x").unwrap();
        assert_eq!(a, b);
    }
}
