//! Symmetric quadrature on the reference triangle and Gauss rules on [-1, 1].

use crate::{Error, Result};

/// Quadrature rule on the reference triangle {x, y >= 0, x + y <= 1}.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Points in reference coordinates.
    pub points: Vec<[f64; 2]>,
    /// Weights summing to the reference area 1/2.
    pub weights: Vec<f64>,
    /// Largest polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f` over the reference triangle.
    pub fn integrate_ref(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }
}

/// Returns a symmetric rule exact for polynomials up to `degree` (1..=6).
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    // Orbit helpers in barycentric coordinates; weights normalized to sum 1
    // and rescaled by the reference area 1/2 below.
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let center = |w: f64, pts: &mut Vec<[f64; 2]>, ws: &mut Vec<f64>| {
        pts.push([1.0 / 3.0, 1.0 / 3.0]);
        ws.push(w);
    };
    let orbit3 = |a: f64, w: f64, pts: &mut Vec<[f64; 2]>, ws: &mut Vec<f64>| {
        let b = 1.0 - 2.0 * a;
        for p in [[b, a], [a, b], [a, a]] {
            pts.push(p);
            ws.push(w);
        }
    };
    let orbit6 = |a: f64, b: f64, w: f64, pts: &mut Vec<[f64; 2]>, ws: &mut Vec<f64>| {
        let c = 1.0 - a - b;
        for p in [[a, b], [b, a], [a, c], [c, a], [b, c], [c, b]] {
            pts.push(p);
            ws.push(w);
        }
    };

    match degree {
        1 => center(1.0, &mut points, &mut weights),
        2 => orbit3(1.0 / 6.0, 1.0 / 3.0, &mut points, &mut weights),
        3 => {
            center(-27.0 / 48.0, &mut points, &mut weights);
            orbit3(0.2, 25.0 / 48.0, &mut points, &mut weights);
        }
        4 => {
            orbit3(
                0.445948490915965,
                0.223381589678011,
                &mut points,
                &mut weights,
            );
            orbit3(
                0.091576213509771,
                0.109951743655322,
                &mut points,
                &mut weights,
            );
        }
        5 => {
            // Closed-form parameters keep this rule exact to machine precision.
            let s15 = 15f64.sqrt();
            center(9.0 / 40.0, &mut points, &mut weights);
            orbit3(
                (6.0 + s15) / 21.0,
                (155.0 + s15) / 1200.0,
                &mut points,
                &mut weights,
            );
            orbit3(
                (6.0 - s15) / 21.0,
                (155.0 - s15) / 1200.0,
                &mut points,
                &mut weights,
            );
        }
        6 => {
            orbit3(
                0.063089014491502,
                0.050844906370207,
                &mut points,
                &mut weights,
            );
            orbit3(
                0.249286745170910,
                0.116786275726379,
                &mut points,
                &mut weights,
            );
            orbit6(
                0.310352451033785,
                0.053145049844816,
                0.082851075618374,
                &mut points,
                &mut weights,
            );
        }
        _ => return Err(Error::QuadratureDegree(degree)),
    }

    for w in weights.iter_mut() {
        *w *= 0.5;
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree,
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence (machine accurate for the sizes used here).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d) = legendre(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and derivative P_n' at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
