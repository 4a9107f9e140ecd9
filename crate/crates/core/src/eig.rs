//! Cyclic Jacobi diagonalization for small real symmetric matrices.
//!
//! Complex Hermitian 4x4 operators are handled by the standard embedding
//! `H = A + iB  ->  [[A, -B], [B, A]]`, which is real symmetric and carries
//! each eigenvalue of `H` twice. An eigenvector `(x; y)` of the embedding
//! maps back to `x + iy`.

const OFF_DIAG_THRESHOLD: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Diagonalize a real symmetric matrix in place with cyclic Jacobi rotations.
///
/// Returns the eigenvalues (unsorted) and the orthogonal matrix whose
/// columns are the matching eigenvectors.
pub fn jacobi_symmetric<const N: usize>(mut a: [[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..N {
            for q in (p + 1)..N {
                off = off.max(a[p][q].abs());
            }
        }
        if off <= OFF_DIAG_THRESHOLD {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() <= OFF_DIAG_THRESHOLD {
                    continue;
                }
                // Classic two-sided rotation zeroing a[p][q].
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = {
                    let s = theta.signum();
                    s / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..N {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut eig = [0.0; N];
    for i in 0..N {
        eig[i] = a[i][i];
    }
    (eig, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_fixed_point() {
        let a = [[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -2.0]];
        let (eig, _) = jacobi_symmetric(a);
        let mut sorted = eig;
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, [-2.0, 1.0, 3.0]);
    }

    #[test]
    fn known_2x2() {
        // Eigenvalues of [[2, 1], [1, 2]] are 1 and 3.
        let (eig, v) = jacobi_symmetric([[2.0, 1.0], [1.0, 2.0]]);
        let mut sorted = eig;
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0).abs() < 1e-14);
        assert!((sorted[1] - 3.0).abs() < 1e-14);
        // Columns are orthonormal.
        let dot = v[0][0] * v[0][1] + v[1][0] * v[1][1];
        assert!(dot.abs() < 1e-14);
    }

    #[test]
    fn residual_small_for_random_symmetric() {
        let mut seed = 0x1234_5678_u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..50 {
            let mut a = [[0.0; 6]; 6];
            for i in 0..6 {
                for j in i..6 {
                    let x = next();
                    a[i][j] = x;
                    a[j][i] = x;
                }
            }
            let (eig, v) = jacobi_symmetric(a);
            for k in 0..6 {
                for i in 0..6 {
                    let mut av = 0.0;
                    for j in 0..6 {
                        av += a[i][j] * v[j][k];
                    }
                    assert!((av - eig[k] * v[i][k]).abs() < 1e-11);
                }
            }
        }
    }
}
