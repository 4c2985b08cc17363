//! L2 projections, the BDM1 interpolation operator and nested-mesh transfer.
//!
//! Discrete fields come in three flavors: `FieldP0` (one mean value per
//! triangle), `FieldP1` (three coefficients per triangle against the
//! centroid-centered basis {1, x - xc, y - yc}) and `FieldBDM1` (two normal
//! moments per edge, see [`crate::elements::DofMap`] for the orientation
//! conventions).

use std::sync::Arc;

use crate::elements::{bdm1, gauss_legendre, linalg::solve3, quadrature, AffineMap, DofMap};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Number of Gauss points per edge for the BDM1 interpolation moments.
/// Exact far beyond the polynomial degrees involved and accurate to machine
/// precision for the trigonometric data used in the experiments, which the
/// commuting-diagram checks rely on even on very coarse meshes.
const EDGE_MOMENT_GAUSS: usize = 16;

/// Declared smoothness of user-supplied functions.
///
/// `PiecewiseAxisAligned` marks data whose kinks lie on the lines x = 0 and
/// y = 0; those lines are mesh lines at every refinement level, so
/// per-element quadrature only ever sees a smooth integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    PiecewiseAxisAligned,
}

/// Scalar-valued function of (x, y, t).
#[derive(Clone)]
pub struct ScalarFunction {
    f: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
    pub smoothness: Smoothness,
    zero: bool,
}

impl ScalarFunction {
    pub fn new(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            smoothness: Smoothness::Smooth,
            zero: false,
        }
    }

    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    pub fn zero() -> Self {
        Self {
            f: Arc::new(|_, _, _| 0.0),
            smoothness: Smoothness::Smooth,
            zero: true,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            f: Arc::new(move |_, _, _| c),
            smoothness: Smoothness::Smooth,
            zero: c == 0.0,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.f)(x, y, t)
    }

    /// True if the function is identically zero (enables fast paths).
    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// Vector-valued function of (x, y, t).
#[derive(Clone)]
pub struct VectorFunction {
    f: Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>,
    pub smoothness: Smoothness,
    zero: bool,
}

impl VectorFunction {
    pub fn new(f: impl Fn(f64, f64, f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            smoothness: Smoothness::Smooth,
            zero: false,
        }
    }

    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    pub fn zero() -> Self {
        Self {
            f: Arc::new(|_, _, _| [0.0, 0.0]),
            smoothness: Smoothness::Smooth,
            zero: true,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        (self.f)(x, y, t)
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// Piecewise constant field (pressure space).
#[derive(Clone)]
pub struct FieldP0 {
    pub mesh: Arc<Mesh>,
    /// One coefficient per triangle; the coefficient is the element mean.
    pub coeffs: Vec<f64>,
}

impl FieldP0 {
    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Self {
            mesh: Arc::clone(mesh),
            coeffs: vec![0.0; mesh.num_triangles()],
        }
    }

    #[inline]
    pub fn eval(&self, k: usize) -> f64 {
        self.coeffs[k]
    }
}

/// Piecewise linear field against {1, x - xc, y - yc} per element.
#[derive(Clone)]
pub struct FieldP1 {
    pub mesh: Arc<Mesh>,
    /// Three coefficients per triangle: [mean, x-slope, y-slope].
    pub coeffs: Vec<f64>,
}

impl FieldP1 {
    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Self {
            mesh: Arc::clone(mesh),
            coeffs: vec![0.0; 3 * mesh.num_triangles()],
        }
    }

    #[inline]
    pub fn eval(&self, k: usize, x: f64, y: f64) -> f64 {
        let c = self.mesh.tri_centroid(k);
        self.coeffs[3 * k]
            + self.coeffs[3 * k + 1] * (x - c[0])
            + self.coeffs[3 * k + 2] * (y - c[1])
    }

    /// Element mean (the constant coefficient in the centered basis).
    #[inline]
    pub fn mean(&self, k: usize) -> f64 {
        self.coeffs[3 * k]
    }
}

/// H(div)-conforming BDM1 field.
#[derive(Clone)]
pub struct FieldBDM1 {
    pub dofmap: Arc<DofMap>,
    /// One coefficient per global dof (2 per edge).
    pub coeffs: Vec<f64>,
}

impl FieldBDM1 {
    pub fn zeros(dofmap: &Arc<DofMap>) -> Self {
        Self {
            dofmap: Arc::clone(dofmap),
            coeffs: vec![0.0; dofmap.num_bdm],
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.dofmap.mesh
    }

    /// Signed local coefficients of the element restriction against the
    /// Piola-mapped reference dual basis.
    #[inline]
    pub fn local_coeffs(&self, k: usize) -> [f64; 6] {
        let mut c = [0.0; 6];
        for loc in 0..6 {
            c[loc] = self.dofmap.elem_signs[k][loc] * self.coeffs[self.dofmap.elem_dofs[k][loc]];
        }
        c
    }

    /// Field value at a physical point known to lie in triangle `k`.
    pub fn eval(&self, k: usize, x: f64, y: f64) -> [f64; 2] {
        let map = AffineMap::from_triangle(self.mesh().tri_coords(k)).expect("valid mesh");
        let r = map.to_reference([x, y]);
        let (vals, _) = bdm1().eval(r);
        let c = self.local_coeffs(k);
        let mut v_ref = [0.0, 0.0];
        for loc in 0..6 {
            v_ref[0] += c[loc] * vals[loc][0];
            v_ref[1] += c[loc] * vals[loc][1];
        }
        map.piola(v_ref)
    }

    /// Elementwise constant divergence on triangle `k`.
    pub fn div(&self, k: usize) -> f64 {
        let map = AffineMap::from_triangle(self.mesh().tri_coords(k)).expect("valid mesh");
        let divs = bdm1().divergences();
        let c = self.local_coeffs(k);
        let mut d = 0.0;
        for loc in 0..6 {
            d += c[loc] * divs[loc];
        }
        map.piola_div(d)
    }
}

/// Elementwise mean values of `f` at time `t` (degree-6 quadrature).
pub fn project_p0(f: &ScalarFunction, t: f64, mesh: &Arc<Mesh>) -> FieldP0 {
    let rule = quadrature(6).expect("builtin rule");
    let mut coeffs = vec![0.0; mesh.num_triangles()];
    if !f.is_zero() {
        for (k, c) in coeffs.iter_mut().enumerate() {
            let map = AffineMap::from_triangle(mesh.tri_coords(k)).expect("valid mesh");
            let mut mean = 0.0;
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let x = map.to_physical(*p);
                mean += w * f.eval(x[0], x[1], t);
            }
            // Reference weights sum to 1/2, so the mean is 2 * sum.
            *c = 2.0 * mean;
        }
    }
    FieldP0 {
        mesh: Arc::clone(mesh),
        coeffs,
    }
}

/// Exact mass matrix of {1, x - xc, y - yc} on triangle `k`.
fn p1_mass(mesh: &Mesh, k: usize) -> [[f64; 3]; 3] {
    let area = mesh.tri_area(k);
    let c = mesh.tri_centroid(k);
    let [a, b, d] = mesh.tri_coords(k);
    let mut ixx = 0.0;
    let mut ixy = 0.0;
    let mut iyy = 0.0;
    for v in [a, b, d] {
        let dx = v[0] - c[0];
        let dy = v[1] - c[1];
        ixx += dx * dx;
        ixy += dx * dy;
        iyy += dy * dy;
    }
    let s = area / 12.0;
    [
        [area, 0.0, 0.0],
        [0.0, s * ixx, s * ixy],
        [0.0, s * ixy, s * iyy],
    ]
}

/// Elementwise linear L2 projection of a scalar function.
pub fn project_p1(f: &ScalarFunction, t: f64, mesh: &Arc<Mesh>) -> FieldP1 {
    let rule = quadrature(6).expect("builtin rule");
    let mut coeffs = vec![0.0; 3 * mesh.num_triangles()];
    if !f.is_zero() {
        for k in 0..mesh.num_triangles() {
            let map = AffineMap::from_triangle(mesh.tri_coords(k)).expect("valid mesh");
            let c = mesh.tri_centroid(k);
            let mut rhs = [0.0; 3];
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let x = map.to_physical(*p);
                let v = w * map.det * f.eval(x[0], x[1], t);
                rhs[0] += v;
                rhs[1] += v * (x[0] - c[0]);
                rhs[2] += v * (x[1] - c[1]);
            }
            let sol = solve3(p1_mass(mesh, k), rhs);
            coeffs[3 * k..3 * k + 3].copy_from_slice(&sol);
        }
    }
    FieldP1 {
        mesh: Arc::clone(mesh),
        coeffs,
    }
}

/// Componentwise elementwise linear L2 projection of a vector function.
pub fn project_p1_vector(g: &VectorFunction, t: f64, mesh: &Arc<Mesh>) -> (FieldP1, FieldP1) {
    let rule = quadrature(6).expect("builtin rule");
    let mut cx = vec![0.0; 3 * mesh.num_triangles()];
    let mut cy = vec![0.0; 3 * mesh.num_triangles()];
    if !g.is_zero() {
        for k in 0..mesh.num_triangles() {
            let map = AffineMap::from_triangle(mesh.tri_coords(k)).expect("valid mesh");
            let c = mesh.tri_centroid(k);
            let mut rhs_x = [0.0; 3];
            let mut rhs_y = [0.0; 3];
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let x = map.to_physical(*p);
                let v = g.eval(x[0], x[1], t);
                let scale = w * map.det;
                let basis = [1.0, x[0] - c[0], x[1] - c[1]];
                for i in 0..3 {
                    rhs_x[i] += scale * v[0] * basis[i];
                    rhs_y[i] += scale * v[1] * basis[i];
                }
            }
            let mass = p1_mass(mesh, k);
            cx[3 * k..3 * k + 3].copy_from_slice(&solve3(mass, rhs_x));
            cy[3 * k..3 * k + 3].copy_from_slice(&solve3(mass, rhs_y));
        }
    }
    (
        FieldP1 {
            mesh: Arc::clone(mesh),
            coeffs: cx,
        },
        FieldP1 {
            mesh: Arc::clone(mesh),
            coeffs: cy,
        },
    )
}

/// BDM1 interpolation: global dofs are the edge Legendre moments of u.n.
///
/// This operator commutes with the divergence, div(interp u) equals the
/// P0 projection of div u.
pub fn interpolate_bdm1(u: &VectorFunction, t: f64, dofmap: &Arc<DofMap>) -> FieldBDM1 {
    let mesh = &dofmap.mesh;
    let mut coeffs = vec![0.0; dofmap.num_bdm];
    if !u.is_zero() {
        let (xs, ws) = gauss_legendre(EDGE_MOMENT_GAUSS);
        for (e, edge) in mesh.edges.iter().enumerate() {
            let a = mesh.vertices[edge.vertices[0]];
            let b = mesh.vertices[edge.vertices[1]];
            let half_len = mesh.edge_length(e) / 2.0;
            let n = edge.normal;
            let mut m0 = 0.0;
            let mut m1 = 0.0;
            for (s, w) in xs.iter().zip(&ws) {
                let x = [
                    (a[0] + b[0]) / 2.0 + s / 2.0 * (b[0] - a[0]),
                    (a[1] + b[1]) / 2.0 + s / 2.0 * (b[1] - a[1]),
                ];
                let v = u.eval(x[0], x[1], t);
                let flux = v[0] * n[0] + v[1] * n[1];
                m0 += w * flux * half_len;
                m1 += w * flux * s * half_len;
            }
            coeffs[2 * e] = m0;
            coeffs[2 * e + 1] = m1;
        }
    }
    FieldBDM1 {
        dofmap: Arc::clone(dofmap),
        coeffs,
    }
}

/// Restriction of a fine P0 field to its parent mesh: the mean of the four
/// equal-area children.
pub fn restrict_p0(fine: &FieldP0, coarse: &Arc<Mesh>) -> Result<FieldP0> {
    let link = fine.mesh.parent.as_ref().ok_or(Error::NotNested)?;
    if !Arc::ptr_eq(&link.mesh, coarse) {
        return Err(Error::NotNested);
    }
    let mut coeffs = vec![0.0; coarse.num_triangles()];
    for (k, &p) in link.parent_of.iter().enumerate() {
        coeffs[p] += 0.25 * fine.coeffs[k];
    }
    Ok(FieldP0 {
        mesh: Arc::clone(coarse),
        coeffs,
    })
}

/// Elementwise L2 projection of a fine P1 field onto the parent mesh's P1
/// space (exact; the integrands are quadratic).
pub fn project_p1_nested(fine: &FieldP1, coarse: &Arc<Mesh>) -> Result<FieldP1> {
    let link = fine.mesh.parent.as_ref().ok_or(Error::NotNested)?;
    if !Arc::ptr_eq(&link.mesh, coarse) {
        return Err(Error::NotNested);
    }
    let rule = quadrature(2).expect("builtin rule");
    let mut rhs = vec![[0.0; 3]; coarse.num_triangles()];
    for (k, &p) in link.parent_of.iter().enumerate() {
        let map = AffineMap::from_triangle(fine.mesh.tri_coords(k)).expect("valid mesh");
        let c = coarse.tri_centroid(p);
        for (q, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*q);
            let v = w * map.det * fine.eval(k, x[0], x[1]);
            rhs[p][0] += v;
            rhs[p][1] += v * (x[0] - c[0]);
            rhs[p][2] += v * (x[1] - c[1]);
        }
    }
    let mut coeffs = vec![0.0; 3 * coarse.num_triangles()];
    for p in 0..coarse.num_triangles() {
        let sol = solve3(p1_mass(coarse, p), rhs[p]);
        coeffs[3 * p..3 * p + 3].copy_from_slice(&sol);
    }
    Ok(FieldP1 {
        mesh: Arc::clone(coarse),
        coeffs,
    })
}

/// A discrete field of any of the three kinds, for nested comparisons.
#[derive(Clone, Copy)]
pub enum FieldView<'a> {
    P0(&'a FieldP0),
    P1(&'a FieldP1),
    Bdm(&'a FieldBDM1),
}

impl<'a> FieldView<'a> {
    fn mesh(&self) -> &Arc<Mesh> {
        match self {
            FieldView::P0(f) => &f.mesh,
            FieldView::P1(f) => &f.mesh,
            FieldView::Bdm(f) => f.mesh(),
        }
    }

    fn is_vector(&self) -> bool {
        matches!(self, FieldView::Bdm(_))
    }

    fn eval(&self, k: usize, x: f64, y: f64) -> [f64; 2] {
        match self {
            FieldView::P0(f) => [f.eval(k), 0.0],
            FieldView::P1(f) => [f.eval(k, x, y), 0.0],
            FieldView::Bdm(f) => f.eval(k, x, y),
        }
    }
}

/// L2 norm over the domain of (fine - coarse), where the coarse field lives
/// on an ancestor mesh of the fine field's mesh. Both fields are evaluated
/// at the fine mesh's degree-6 quadrature points.
pub fn diff_norm_nested(fine: FieldView, coarse: FieldView) -> Result<f64> {
    if fine.is_vector() != coarse.is_vector() {
        panic!("cannot compare scalar and vector fields");
    }
    let fine_mesh = fine.mesh();
    let coarse_mesh = coarse.mesh();
    let tri_map = coarse_mesh
        .triangle_map_from(fine_mesh)
        .ok_or(Error::NotNested)?;
    let rule = quadrature(6).expect("builtin rule");
    let mut total = 0.0;
    for k in 0..fine_mesh.num_triangles() {
        let map = AffineMap::from_triangle(fine_mesh.tri_coords(k)).expect("valid mesh");
        let kc = tri_map[k];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*p);
            let vf = fine.eval(k, x[0], x[1]);
            let vc = coarse.eval(kc, x[0], x[1]);
            let dx = vf[0] - vc[0];
            let dy = vf[1] - vc[1];
            total += w * map.det * (dx * dx + dy * dy);
        }
    }
    Ok(total.sqrt())
}
