//! Global degree-of-freedom numbering for BDM1 / P0 pairs.
//!
//! Edge `e` owns the two velocity dofs `2e` (constant normal moment) and
//! `2e + 1` (linear normal moment), both taken against the stored global
//! edge normal with the edge parameterized from its lower to its higher
//! vertex. Triangle `k` owns pressure dof `k`.
//!
//! Per element the six local dofs relate to the global ones by a sign:
//! the normal factor is +1 exactly when the triangle's outward normal
//! coincides with the global edge normal, and the linear moment picks up an
//! additional -1 when the element's local edge direction runs against the
//! global (lower vertex to higher vertex) parameterization.

use std::sync::Arc;

use super::bdm1::REF_EDGES;
use crate::mesh::Mesh;

/// Global dof layout for one mesh.
pub struct DofMap {
    pub mesh: Arc<Mesh>,
    /// Per triangle, global velocity dof indices in local order
    /// (edge (0,1) constant, edge (0,1) linear, edge (0,2) ..., edge (1,2) ...).
    pub elem_dofs: Vec<[usize; 6]>,
    /// Orientation signs matching `elem_dofs`.
    pub elem_signs: Vec<[f64; 6]>,
    /// Total velocity dofs (2 per edge).
    pub num_bdm: usize,
    /// Total pressure dofs (1 per triangle).
    pub num_p0: usize,
}

/// Builds the global numbering with orientation signs.
pub fn build_dofmap(mesh: &Arc<Mesh>) -> DofMap {
    let mut elem_dofs = Vec::with_capacity(mesh.num_triangles());
    let mut elem_signs = Vec::with_capacity(mesh.num_triangles());
    for (k, tri) in mesh.triangles.iter().enumerate() {
        let mut dofs = [0usize; 6];
        let mut signs = [0.0f64; 6];
        for (le, [i, j]) in REF_EDGES.iter().enumerate() {
            let e = mesh.tri_edges[k][le];
            let sigma = if mesh.edges[e].tri_lo == k { 1.0 } else { -1.0 };
            let flip = if tri[*i] < tri[*j] { 1.0 } else { -1.0 };
            dofs[2 * le] = 2 * e;
            signs[2 * le] = sigma;
            dofs[2 * le + 1] = 2 * e + 1;
            signs[2 * le + 1] = sigma * flip;
        }
        elem_dofs.push(dofs);
        elem_signs.push(signs);
    }
    DofMap {
        mesh: Arc::clone(mesh),
        elem_dofs,
        elem_signs,
        num_bdm: 2 * mesh.num_edges(),
        num_p0: mesh.num_triangles(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{bdm1, gauss_legendre, AffineMap};
    use crate::mesh::build_lshape;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn dofmap(n: usize) -> DofMap {
        let mesh = Arc::new(build_lshape(n).unwrap());
        build_dofmap(&mesh)
    }

    /// Evaluates the global field with coefficients `u` on triangle `k`.
    fn eval_on_tri(dm: &DofMap, u: &[f64], k: usize, x: [f64; 2]) -> [f64; 2] {
        let map = AffineMap::from_triangle(dm.mesh.tri_coords(k)).unwrap();
        let r = map.to_reference(x);
        let (vals, _) = bdm1().eval(r);
        let mut v = [0.0, 0.0];
        for loc in 0..6 {
            let c = dm.elem_signs[k][loc] * u[dm.elem_dofs[k][loc]];
            let phys = map.piola(vals[loc]);
            v[0] += c * phys[0];
            v[1] += c * phys[1];
        }
        v
    }

    #[test]
    fn unit_mesh_dof_counts() {
        let dm = dofmap(1);
        assert_eq!(dm.num_bdm, 26);
        assert_eq!(dm.num_p0, 6);
    }

    #[test]
    fn interior_constant_moments_have_opposite_signs() {
        let dm = dofmap(2);
        let mesh = &dm.mesh;
        for (e, edge) in mesh.edges.iter().enumerate() {
            let carriers: Vec<(usize, f64)> = (0..mesh.num_triangles())
                .flat_map(|k| {
                    (0..3).filter_map(move |le| (mesh.tri_edges[k][le] == e).then_some((k, le)))
                })
                .map(|(k, le)| (k, dm.elem_signs[k][2 * le]))
                .collect();
            if edge.boundary {
                assert_eq!(carriers.len(), 1);
                assert_eq!(carriers[0].1, 1.0);
            } else {
                assert_eq!(carriers.len(), 2);
                assert_eq!(carriers[0].1 * carriers[1].1, -1.0);
            }
        }
    }

    #[test]
    fn interior_dofs_shared_by_two_triangles() {
        let dm = dofmap(3);
        let mut count = vec![0usize; dm.num_bdm];
        for dofs in &dm.elem_dofs {
            for &d in dofs {
                count[d] += 1;
            }
        }
        for (e, edge) in dm.mesh.edges.iter().enumerate() {
            let expect = if edge.boundary { 1 } else { 2 };
            assert_eq!(count[2 * e], expect);
            assert_eq!(count[2 * e + 1], expect);
        }
    }

    #[test]
    fn normal_component_single_valued_across_interior_edges() {
        let dm = dofmap(2);
        let mesh = Arc::clone(&dm.mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let u: Vec<f64> = (0..dm.num_bdm).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (gauss, _) = gauss_legendre(2);
        for edge in &mesh.edges {
            let Some(hi) = edge.tri_hi else { continue };
            let a = mesh.vertices[edge.vertices[0]];
            let b = mesh.vertices[edge.vertices[1]];
            for s in &gauss {
                let x = [
                    (a[0] + b[0]) / 2.0 + s / 2.0 * (b[0] - a[0]),
                    (a[1] + b[1]) / 2.0 + s / 2.0 * (b[1] - a[1]),
                ];
                let v_lo = eval_on_tri(&dm, &u, edge.tri_lo, x);
                let v_hi = eval_on_tri(&dm, &u, hi, x);
                let n = edge.normal;
                let flux_lo = v_lo[0] * n[0] + v_lo[1] * n[1];
                let flux_hi = v_hi[0] * n[0] + v_hi[1] * n[1];
                assert!(
                    (flux_lo - flux_hi).abs() < 1e-12,
                    "normal jump {} at {:?}",
                    flux_lo - flux_hi,
                    x
                );
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(8))]

            // n = 1 mesh: 13 edges, 26 velocity dofs.
            #[test]
            fn normal_continuity_for_arbitrary_coefficients(
                u in proptest::collection::vec(-10.0f64..10.0, 26),
            ) {
                let dm = dofmap(1);
                let mesh = Arc::clone(&dm.mesh);
                let (gauss, _) = gauss_legendre(2);
                for edge in &mesh.edges {
                    let Some(hi) = edge.tri_hi else { continue };
                    let a = mesh.vertices[edge.vertices[0]];
                    let b = mesh.vertices[edge.vertices[1]];
                    for s in &gauss {
                        let x = [
                            (a[0] + b[0]) / 2.0 + s / 2.0 * (b[0] - a[0]),
                            (a[1] + b[1]) / 2.0 + s / 2.0 * (b[1] - a[1]),
                        ];
                        let v_lo = eval_on_tri(&dm, &u, edge.tri_lo, x);
                        let v_hi = eval_on_tri(&dm, &u, hi, x);
                        let n = edge.normal;
                        let jump = (v_lo[0] - v_hi[0]) * n[0] + (v_lo[1] - v_hi[1]) * n[1];
                        prop_assert!(jump.abs() < 1e-11, "normal jump {jump} at {x:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_is_elementwise_constant() {
        // Divergence probed by central differences of the evaluated field,
        // independent of the stored constant divergences.
        let dm = dofmap(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..dm.num_bdm).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let delta = 1e-6;
        for k in 0..dm.mesh.num_triangles() {
            let c = dm.mesh.tri_centroid(k);
            let samples: Vec<f64> = [[0.0, 0.0], [0.05, 0.02], [-0.03, 0.04]]
                .iter()
                .map(|offset| {
                    let p = [c[0] + offset[0] / 4.0, c[1] + offset[1] / 4.0];
                    let dvx = (eval_on_tri(&dm, &u, k, [p[0] + delta, p[1]])[0]
                        - eval_on_tri(&dm, &u, k, [p[0] - delta, p[1]])[0])
                        / (2.0 * delta);
                    let dvy = (eval_on_tri(&dm, &u, k, [p[0], p[1] + delta])[1]
                        - eval_on_tri(&dm, &u, k, [p[0], p[1] - delta])[1])
                        / (2.0 * delta);
                    dvx + dvy
                })
                .collect();
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let variance =
                samples.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / samples.len() as f64;
            assert!(variance < 1e-12, "divergence variance {variance}");
        }
    }
}
