//! Element-local reconstruction of an improved piecewise linear pressure.
//!
//! On every element the reconstruction solves the local gradient system
//!
//! ```text
//!   (grad ptilde, grad q)_K = (g, grad q)_K - (b du/dt, grad q)_K
//! ```
//!
//! for all linear q and pins the element mean to the discrete pressure.
//! In the centered basis {1, x - xc, y - yc} the gradient Gram matrix is
//! area times the identity and the mean constraint decouples, so the local
//! solve reduces to two divisions and one assignment. The fully discrete
//! variant feeds the difference quotient (u^n - u^{n-1}) / tau and the
//! averaged data g^{n-1/2}, producing a pressure at the half step.

use std::sync::Arc;

use crate::elements::{bdm1, quadrature, AffineMap};
use crate::projections::{FieldBDM1, FieldP0, FieldP1, ScalarFunction, VectorFunction};
use crate::Result;

/// Inputs for the fully discrete reconstruction at t^{n-1/2}.
pub struct HalfStepContext<'a> {
    pub u_prev: &'a FieldBDM1,
    pub u_next: &'a FieldBDM1,
    pub p_prev: &'a FieldP0,
    pub p_next: &'a FieldP0,
    pub tau: f64,
    pub t_prev: f64,
    pub t_next: f64,
    pub g: &'a VectorFunction,
}

/// Reconstructed pressure with its time label.
pub struct PostprocessedPressure {
    pub field: FieldP1,
    pub time: f64,
    /// True when the reconstruction lives at an intermediate time step.
    pub half_step: bool,
}

/// Local solve on one element: returns the three coefficients against
/// {1, x - xc, y - yc}. `dtu` and `g_eval` take physical coordinates,
/// `b` is the material coefficient.
pub fn local_reconstruct(
    coords: [[f64; 2]; 3],
    dtu: &dyn Fn(f64, f64) -> [f64; 2],
    g_eval: &dyn Fn(f64, f64) -> [f64; 2],
    p_mean: f64,
    b: &dyn Fn(f64, f64) -> f64,
) -> Result<[f64; 3]> {
    let map = AffineMap::from_triangle(coords)?;
    let rule = quadrature(6).expect("builtin rule");
    let area = map.det / 2.0;
    let mut rhs = [0.0, 0.0];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let x = map.to_physical(*p);
        let gv = g_eval(x[0], x[1]);
        let dv = dtu(x[0], x[1]);
        let bv = b(x[0], x[1]);
        rhs[0] += w * map.det * (gv[0] - bv * dv[0]);
        rhs[1] += w * map.det * (gv[1] - bv * dv[1]);
    }
    Ok([p_mean, rhs[0] / area, rhs[1] / area])
}

/// Source of the velocity time derivative for the generic reconstruction.
pub enum VelocityRate<'a> {
    /// A discrete BDM1 field (e.g. a difference quotient).
    Field(&'a FieldBDM1),
    /// An analytic evaluator of du/dt at a fixed time.
    Analytic(&'a VectorFunction, f64),
}

/// Reconstruction at time `t` from a caller-supplied velocity rate.
pub fn postprocess_generic(
    dtu: VelocityRate,
    p: &FieldP0,
    g: &VectorFunction,
    t: f64,
    b: &ScalarFunction,
) -> Result<PostprocessedPressure> {
    let mesh = Arc::clone(&p.mesh);
    let rule = quadrature(6).expect("builtin rule");
    let basis = bdm1();
    let ref_vals: Vec<[[f64; 2]; 6]> = rule.points.iter().map(|q| basis.eval(*q).0).collect();
    let mut coeffs = vec![0.0; 3 * mesh.num_triangles()];
    for k in 0..mesh.num_triangles() {
        let map = AffineMap::from_triangle(mesh.tri_coords(k))?;
        let area = map.det / 2.0;
        let local = match &dtu {
            VelocityRate::Field(f) => Some(f.local_coeffs(k)),
            VelocityRate::Analytic(..) => None,
        };
        let mut rhs = [0.0, 0.0];
        for (qi, w) in rule.weights.iter().enumerate() {
            let x = map.to_physical(rule.points[qi]);
            let gv = if g.is_zero() {
                [0.0, 0.0]
            } else {
                g.eval(x[0], x[1], t)
            };
            let dv = match (&dtu, &local) {
                (VelocityRate::Analytic(func, at), _) => func.eval(x[0], x[1], *at),
                (VelocityRate::Field(_), Some(c)) => {
                    let mut v = [0.0, 0.0];
                    for loc in 0..6 {
                        v[0] += c[loc] * ref_vals[qi][loc][0];
                        v[1] += c[loc] * ref_vals[qi][loc][1];
                    }
                    map.piola(v)
                }
                _ => unreachable!(),
            };
            let bv = b.eval(x[0], x[1], 0.0);
            rhs[0] += w * map.det * (gv[0] - bv * dv[0]);
            rhs[1] += w * map.det * (gv[1] - bv * dv[1]);
        }
        coeffs[3 * k] = p.coeffs[k];
        coeffs[3 * k + 1] = rhs[0] / area;
        coeffs[3 * k + 2] = rhs[1] / area;
    }
    Ok(PostprocessedPressure {
        field: FieldP1 { mesh, coeffs },
        time: t,
        half_step: false,
    })
}

/// Fully discrete reconstruction at the half step t^{n-1/2}: the velocity
/// rate is the difference quotient, g is averaged over the step endpoints
/// and the pinned mean is the averaged discrete pressure.
pub fn postprocess_halfstep(
    ctx: &HalfStepContext,
    b: &ScalarFunction,
) -> Result<PostprocessedPressure> {
    let dofmap = Arc::clone(&ctx.u_prev.dofmap);
    let diff = FieldBDM1 {
        dofmap,
        coeffs: ctx
            .u_next
            .coeffs
            .iter()
            .zip(&ctx.u_prev.coeffs)
            .map(|(n, p)| (n - p) / ctx.tau)
            .collect(),
    };
    let p_half = FieldP0 {
        mesh: Arc::clone(&ctx.p_prev.mesh),
        coeffs: ctx
            .p_prev
            .coeffs
            .iter()
            .zip(&ctx.p_next.coeffs)
            .map(|(a, b)| 0.5 * (a + b))
            .collect(),
    };
    let t_half = 0.5 * (ctx.t_prev + ctx.t_next);
    let g_half = if ctx.g.is_zero() {
        VectorFunction::zero()
    } else {
        let g = ctx.g.clone();
        let (t0, t1) = (ctx.t_prev, ctx.t_next);
        VectorFunction::new(move |x, y, _| {
            let a = g.eval(x, y, t0);
            let b = g.eval(x, y, t1);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        })
    };
    let mut result = postprocess_generic(VelocityRate::Field(&diff), &p_half, &g_half, t_half, b)?;
    result.half_step = true;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::build_dofmap;
    use crate::mesh::build_lshape;
    use crate::projections::project_p0;
    use nalgebra::{DMatrix, DVector};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn globally_linear_pressure_is_reconstructed_exactly() {
        // With dtu = -grad p, g = 0, b = 1 the local equations are satisfied
        // identically by the linear pressure itself.
        let mesh = Arc::new(build_lshape(2).unwrap());
        let p_exact = |x: f64, y: f64| 0.7 - 1.3 * x + 2.1 * y;
        let dtu = |_x: f64, _y: f64| [1.3, -2.1];
        let g = |_x: f64, _y: f64| [0.0, 0.0];
        let b = |_x: f64, _y: f64| 1.0;
        for k in [0, 3, 7] {
            let coords = mesh.tri_coords(k);
            let c = mesh.tri_centroid(k);
            let p_mean = p_exact(c[0], c[1]);
            let sol = local_reconstruct(coords, &dtu, &g, p_mean, &b).unwrap();
            for v in coords {
                let recon = sol[0] + sol[1] * (v[0] - c[0]) + sol[2] * (v[1] - c[1]);
                assert!((recon - p_exact(v[0], v[1])).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_rate_gives_constant_reconstruction() {
        let mesh = Arc::new(build_lshape(1).unwrap());
        let sol = local_reconstruct(
            mesh.tri_coords(0),
            &|_, _| [0.0, 0.0],
            &|_, _| [0.0, 0.0],
            1.25,
            &|_, _| 1.0,
        )
        .unwrap();
        assert_eq!(sol[0], 1.25);
        assert!(sol[1].abs() < 1e-15);
        assert!(sol[2].abs() < 1e-15);
    }

    #[test]
    fn matches_constrained_dense_oracle() {
        // Oracle: KKT system for the constrained local problem in the same
        // centered basis, with the gradient load computed by quadrature.
        let mesh = Arc::new(build_lshape(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for k in [0, 5, 11] {
            let coords = mesh.tri_coords(k);
            let a0 = rng.gen_range(-1.0..1.0);
            let a1 = rng.gen_range(-1.0..1.0);
            let a2 = rng.gen_range(-1.0..1.0);
            let a3 = rng.gen_range(-1.0..1.0);
            let dtu = move |x: f64, y: f64| [a0 + a1 * x, a2 + a3 * y];
            let p_mean = rng.gen_range(-1.0..1.0);
            let sol =
                local_reconstruct(coords, &dtu, &|_, _| [0.0, 0.0], p_mean, &|_, _| 1.0).unwrap();

            let map = AffineMap::from_triangle(coords).unwrap();
            let area = map.det / 2.0;
            let rule = quadrature(6).unwrap();
            // Load F_i = integral of (-b dtu) . grad(basis_i).
            let mut load = [0.0; 3];
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let x = map.to_physical(*p);
                let dv = dtu(x[0], x[1]);
                load[1] += w * map.det * (-dv[0]);
                load[2] += w * map.det * (-dv[1]);
            }
            // KKT: [G m^T; m 0] [c; lambda] = [F; p_mean * area].
            let mut kkt = DMatrix::<f64>::zeros(4, 4);
            kkt[(1, 1)] = area;
            kkt[(2, 2)] = area;
            kkt[(0, 3)] = area;
            kkt[(3, 0)] = area;
            let mut rhs = DVector::<f64>::zeros(4);
            rhs[0] = load[0];
            rhs[1] = load[1];
            rhs[2] = load[2];
            rhs[3] = p_mean * area;
            let oracle = kkt.lu().solve(&rhs).expect("KKT solvable");
            for i in 0..3 {
                assert!(
                    (sol[i] - oracle[i]).abs() < 1e-11,
                    "coefficient {i}: {} vs {}",
                    sol[i],
                    oracle[i]
                );
            }
        }
    }

    #[test]
    fn halfstep_preserves_element_means() {
        let mesh = Arc::new(build_lshape(2).unwrap());
        let dofmap = Arc::new(build_dofmap(&mesh));
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rand_bdm = |rng: &mut ChaCha8Rng| FieldBDM1 {
            dofmap: Arc::clone(&dofmap),
            coeffs: (0..dofmap.num_bdm)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let rand_p0 = |rng: &mut ChaCha8Rng| FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: (0..mesh.num_triangles())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let u_prev = rand_bdm(&mut rng);
        let u_next = rand_bdm(&mut rng);
        let p_prev = rand_p0(&mut rng);
        let p_next = rand_p0(&mut rng);
        let g = VectorFunction::new(|x, y, t| [x * t, y - t]);
        let ctx = HalfStepContext {
            u_prev: &u_prev,
            u_next: &u_next,
            p_prev: &p_prev,
            p_next: &p_next,
            tau: 0.1,
            t_prev: 0.4,
            t_next: 0.5,
            g: &g,
        };
        let b = ScalarFunction::constant(1.0);
        let result = postprocess_halfstep(&ctx, &b).unwrap();
        assert!(result.half_step);
        assert!((result.time - 0.45).abs() < 1e-15);
        for k in 0..mesh.num_triangles() {
            let expect = 0.5 * (p_prev.coeffs[k] + p_next.coeffs[k]);
            assert!((result.field.mean(k) - expect).abs() <= 1e-13);
        }
    }

    #[test]
    fn halfstep_equals_generic_with_difference_quotient() {
        let mesh = Arc::new(build_lshape(1).unwrap());
        let dofmap = Arc::new(build_dofmap(&mesh));
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let u_prev = FieldBDM1 {
            dofmap: Arc::clone(&dofmap),
            coeffs: (0..dofmap.num_bdm)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let u_next = FieldBDM1 {
            dofmap: Arc::clone(&dofmap),
            coeffs: (0..dofmap.num_bdm)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let p_prev = FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: (0..mesh.num_triangles())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let p_next = FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: (0..mesh.num_triangles())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let tau = 0.2;
        let ctx = HalfStepContext {
            u_prev: &u_prev,
            u_next: &u_next,
            p_prev: &p_prev,
            p_next: &p_next,
            tau,
            t_prev: 0.0,
            t_next: tau,
            g: &VectorFunction::zero(),
        };
        let b = ScalarFunction::constant(1.0);
        let via_halfstep = postprocess_halfstep(&ctx, &b).unwrap();

        let diff = FieldBDM1 {
            dofmap: Arc::clone(&dofmap),
            coeffs: u_next
                .coeffs
                .iter()
                .zip(&u_prev.coeffs)
                .map(|(n, p)| (n - p) / tau)
                .collect(),
        };
        let p_half = FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: p_prev
                .coeffs
                .iter()
                .zip(&p_next.coeffs)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        };
        let via_generic = postprocess_generic(
            VelocityRate::Field(&diff),
            &p_half,
            &VectorFunction::zero(),
            tau / 2.0,
            &b,
        )
        .unwrap();
        for (a, b) in via_halfstep
            .field
            .coeffs
            .iter()
            .zip(&via_generic.field.coeffs)
        {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn scaling_b_and_rate_inversely_leaves_output_unchanged() {
        let mesh = Arc::new(build_lshape(1).unwrap());
        let coords = mesh.tri_coords(2);
        let dtu = |x: f64, y: f64| [y - 0.5 * x, x];
        let dtu_half = |x: f64, y: f64| [(y - 0.5 * x) / 2.0, x / 2.0];
        let a = local_reconstruct(coords, &dtu, &|_, _| [0.0, 0.0], 0.3, &|_, _| 1.0).unwrap();
        let b = local_reconstruct(coords, &dtu_half, &|_, _| [0.0, 0.0], 0.3, &|_, _| 2.0).unwrap();
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_is_local() {
        // Perturbing a velocity dof changes the output only on the elements
        // adjacent to its edge.
        let mesh = Arc::new(build_lshape(2).unwrap());
        let dofmap = Arc::new(build_dofmap(&mesh));
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let base_coeffs: Vec<f64> = (0..dofmap.num_bdm)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let p = FieldP0 {
            mesh: Arc::clone(&mesh),
            coeffs: (0..mesh.num_triangles())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        };
        let b = ScalarFunction::constant(1.0);
        let make = |coeffs: Vec<f64>| FieldBDM1 {
            dofmap: Arc::clone(&dofmap),
            coeffs,
        };
        let base_field = make(base_coeffs.clone());
        let base = postprocess_generic(
            VelocityRate::Field(&base_field),
            &p,
            &VectorFunction::zero(),
            0.0,
            &b,
        )
        .unwrap();
        let edge = 5usize;
        let mut perturbed_coeffs = base_coeffs;
        perturbed_coeffs[2 * edge] += 1.0;
        let perturbed_field = make(perturbed_coeffs);
        let perturbed = postprocess_generic(
            VelocityRate::Field(&perturbed_field),
            &p,
            &VectorFunction::zero(),
            0.0,
            &b,
        )
        .unwrap();
        let adjacent: Vec<usize> = {
            let e = &mesh.edges[edge];
            let mut v = vec![e.tri_lo];
            if let Some(hi) = e.tri_hi {
                v.push(hi);
            }
            v
        };
        for k in 0..mesh.num_triangles() {
            let changed = (0..3).any(|i| {
                (base.field.coeffs[3 * k + i] - perturbed.field.coeffs[3 * k + i]).abs() > 1e-14
            });
            assert_eq!(changed, adjacent.contains(&k), "element {k}");
        }
    }

    #[test]
    fn exact_rate_reconstruction_converges_at_second_order() {
        // Feed the analytic velocity rate and exact means at t = 0.3; the
        // reconstruction error must decay like h^2.
        let t = 0.3;
        let p_exact =
            ScalarFunction::new(move |x, y, tt| (PI * x).sin() * (PI * y).sin() * (PI * tt).cos());
        let dtu = VectorFunction::new(|x, y, tt| {
            let s = -PI * (PI * tt).cos();
            [
                s * (PI * x).cos() * (PI * y).sin(),
                s * (PI * x).sin() * (PI * y).cos(),
            ]
        });
        let b = ScalarFunction::constant(1.0);
        let mut errors = Vec::new();
        for n in [4usize, 8, 16] {
            let mesh = Arc::new(build_lshape(n).unwrap());
            let p_means = project_p0(&p_exact, t, &mesh);
            let result = postprocess_generic(
                VelocityRate::Analytic(&dtu, t),
                &p_means,
                &VectorFunction::zero(),
                t,
                &b,
            )
            .unwrap();
            let rule = quadrature(6).unwrap();
            let mut err2 = 0.0;
            for k in 0..mesh.num_triangles() {
                let map = AffineMap::from_triangle(mesh.tri_coords(k)).unwrap();
                for (pt, w) in rule.points.iter().zip(&rule.weights) {
                    let x = map.to_physical(*pt);
                    let d = p_exact.eval(x[0], x[1], t) - result.field.eval(k, x[0], x[1]);
                    err2 += w * map.det * d * d;
                }
            }
            errors.push(err2.sqrt());
        }
        for pair in errors.windows(2) {
            let rate = (pair[0] / pair[1]).log2();
            assert!((rate - 2.0).abs() < 0.15, "rate {rate}");
        }
    }
}
