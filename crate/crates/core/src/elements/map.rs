//! Affine reference-to-physical maps and the contravariant Piola transform.

use crate::{Error, Result};

/// Affine map F(x^) = J x^ + origin from the reference triangle
/// {(0,0), (1,0), (0,1)} onto a physical triangle.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap {
    pub origin: [f64; 2],
    /// Jacobian columns (v1 - v0, v2 - v0).
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    inv: [[f64; 2]; 2],
}

impl AffineMap {
    pub fn from_triangle(coords: [[f64; 2]; 3]) -> Result<Self> {
        let [a, b, c] = coords;
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-14 {
            return Err(Error::DegenerateTriangle { det });
        }
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        Ok(AffineMap {
            origin: a,
            jac,
            det,
            inv,
        })
    }

    pub fn to_physical(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn to_reference(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [
            self.inv[0][0] * d[0] + self.inv[0][1] * d[1],
            self.inv[1][0] * d[0] + self.inv[1][1] * d[1],
        ]
    }

    /// Contravariant Piola transform v = J v^ / det J, which preserves edge
    /// normal fluxes and keeps piecewise polynomials H(div)-conforming.
    pub fn piola(&self, v: [f64; 2]) -> [f64; 2] {
        [
            (self.jac[0][0] * v[0] + self.jac[0][1] * v[1]) / self.det,
            (self.jac[1][0] * v[0] + self.jac[1][1] * v[1]) / self.det,
        ]
    }

    /// Divergence transforms as div v = div v^ / det J.
    pub fn piola_div(&self, div_ref: f64) -> f64 {
        div_ref / self.det
    }
}

/// Maps a reference vector at a reference point onto the physical triangle
/// via the contravariant Piola transform.
pub fn piola_map(
    triangle: [[f64; 2]; 3],
    ref_vector: [f64; 2],
    _ref_point: [f64; 2],
) -> Result<[f64; 2]> {
    let map = AffineMap::from_triangle(triangle)?;
    Ok(map.piola(ref_vector))
}
