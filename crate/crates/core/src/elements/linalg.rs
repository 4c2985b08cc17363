//! Small dense solves used by element-local computations.

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// Returns `None` if a pivot falls below `1e-14` in magnitude.
pub(crate) fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Inverts a small dense matrix; `None` if singular.
pub(crate) fn invert_dense(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut work: Vec<Vec<f64>> = a.to_vec();
        let mut rhs = vec![0.0; n];
        rhs[col] = 1.0;
        let x = solve_dense(&mut work, &mut rhs)?;
        for row in 0..n {
            inv[row][col] = x[row];
        }
    }
    Some(inv)
}

/// Solves a symmetric 3x3 system directly; used by the elementwise P1 mass solves.
pub(crate) fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let mut m: Vec<Vec<f64>> = a.iter().map(|r| r.to_vec()).collect();
    let mut rhs = b.to_vec();
    let x = solve_dense(&mut m, &mut rhs).expect("3x3 element mass matrix is singular");
    [x[0], x[1], x[2]]
}
