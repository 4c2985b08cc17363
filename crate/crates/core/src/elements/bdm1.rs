//! Reference BDM1 element: full linear vector polynomials on the reference
//! triangle with edge normal moments as degrees of freedom.
//!
//! Each of the three edges carries two functionals: moments of v.n against
//! the Legendre polynomials {1, s}, where s in [-1, 1] runs from the
//! lower-index to the higher-index endpoint and integration is with respect
//! to arc length. The dual basis is obtained once by inverting the 6x6 dof
//! matrix of the monomial vector basis.

use std::sync::OnceLock;

use super::linalg::invert_dense;
use super::quadrature::gauss_legendre;

/// Local edges as (lower, higher) local vertex pairs.
pub const REF_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// Outward unit normals of the reference triangle on [`REF_EDGES`].
pub const REF_NORMALS: [[f64; 2]; 3] = [
    [0.0, -1.0],
    [-1.0, 0.0],
    [
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ],
];

const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
const REF_EDGE_LENGTHS: [f64; 3] = [1.0, 1.0, std::f64::consts::SQRT_2];

/// Dual basis of the six edge-moment functionals.
pub struct ReferenceBasisBdm1 {
    /// Row k: coefficients of basis k against the monomials
    /// (1,0), (x,0), (y,0), (0,1), (0,x), (0,y).
    coeff: [[f64; 6]; 6],
}

impl ReferenceBasisBdm1 {
    fn build() -> Self {
        // Dof matrix of the monomial basis: entry (i, j) = dof_i(monomial_j),
        // edge moments computed with 2-point Gauss (exact for these degrees).
        let (xs, ws) = gauss_legendre(2);
        let monomial = |j: usize, p: [f64; 2]| -> [f64; 2] {
            let scalar = match j % 3 {
                0 => 1.0,
                1 => p[0],
                _ => p[1],
            };
            if j < 3 {
                [scalar, 0.0]
            } else {
                [0.0, scalar]
            }
        };
        let mut dof = vec![vec![0.0; 6]; 6];
        for (e, [i0, i1]) in REF_EDGES.iter().enumerate() {
            let a = REF_VERTICES[*i0];
            let b = REF_VERTICES[*i1];
            let n = REF_NORMALS[e];
            let half_len = REF_EDGE_LENGTHS[e] / 2.0;
            for j in 0..6 {
                let mut m0 = 0.0;
                let mut m1 = 0.0;
                for (s, w) in xs.iter().zip(&ws) {
                    let p = [
                        (a[0] + b[0]) / 2.0 + s / 2.0 * (b[0] - a[0]),
                        (a[1] + b[1]) / 2.0 + s / 2.0 * (b[1] - a[1]),
                    ];
                    let v = monomial(j, p);
                    let flux = v[0] * n[0] + v[1] * n[1];
                    m0 += w * flux * half_len;
                    m1 += w * flux * s * half_len;
                }
                dof[2 * e][j] = m0;
                dof[2 * e + 1][j] = m1;
            }
        }
        let inv = invert_dense(&dof).expect("BDM1 dof matrix is invertible");
        let mut coeff = [[0.0; 6]; 6];
        for k in 0..6 {
            for j in 0..6 {
                // basis_k = sum_j inv[j][k] * monomial_j
                coeff[k][j] = inv[j][k];
            }
        }
        ReferenceBasisBdm1 { coeff }
    }

    /// Values and (constant) divergences of the six basis functions.
    pub fn eval(&self, p: [f64; 2]) -> ([[f64; 2]; 6], [f64; 6]) {
        let mut values = [[0.0; 2]; 6];
        let mut divs = [0.0; 6];
        for k in 0..6 {
            let c = &self.coeff[k];
            values[k] = [
                c[0] + c[1] * p[0] + c[2] * p[1],
                c[3] + c[4] * p[0] + c[5] * p[1],
            ];
            divs[k] = c[1] + c[5];
        }
        (values, divs)
    }

    /// Divergences alone (independent of position).
    pub fn divergences(&self) -> [f64; 6] {
        let mut divs = [0.0; 6];
        for k in 0..6 {
            divs[k] = self.coeff[k][1] + self.coeff[k][5];
        }
        divs
    }
}

/// Shared reference basis, constructed on first use.
pub fn bdm1() -> &'static ReferenceBasisBdm1 {
    static BASIS: OnceLock<ReferenceBasisBdm1> = OnceLock::new();
    BASIS.get_or_init(ReferenceBasisBdm1::build)
}

/// Evaluates the six dual basis functions and their divergences at a
/// reference point. Points slightly outside the triangle are permitted
/// (polynomial extrapolation).
pub fn bdm1_eval(ref_point: [f64; 2]) -> ([[f64; 2]; 6], [f64; 6]) {
    bdm1().eval(ref_point)
}
