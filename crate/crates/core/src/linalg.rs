//! Small dense symmetric eigensolver and spectral norms.
//!
//! Matrices here are at most ~150 x 150 (grid Gram matrices); cyclic Jacobi
//! converges to machine precision and is fully deterministic, which matters
//! more than speed.

/// Largest eigenvalue and eigenvector of a symmetric n x n matrix
/// (row-major). The input is consumed as scratch.
pub(crate) fn jacobi_eig_max(mut a: Vec<f64>, n: usize) -> (f64, Vec<f64>) {
    if n == 0 {
        return (0.0, vec![]);
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = a.iter().map(|x| x * x).sum();
    let tol = 1e-30 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if 2.0 * off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..n {
        if a[i * n + i] > a[best * n + best] {
            best = i;
        }
    }
    let vec: Vec<f64> = (0..n).map(|k| v[k * n + best]).collect();
    (a[best * n + best], vec)
}

/// Largest singular value of a rows x cols matrix (row-major) together with
/// a unit (Euclidean) right singular vector.
pub(crate) fn spectral_norm(rows: usize, cols: usize, m: &[f64]) -> (f64, Vec<f64>) {
    debug_assert_eq!(m.len(), rows * cols);
    if rows == 0 || cols == 0 || m.iter().all(|&x| x == 0.0) {
        let mut v = vec![0.0; cols.max(1)];
        v[0] = 1.0;
        v.truncate(cols.max(1));
        return (0.0, v);
    }
    if cols <= rows {
        // Gram on the right: G = M^T M.
        let mut g = vec![0.0; cols * cols];
        for i in 0..cols {
            for j in i..cols {
                let mut acc = 0.0;
                for r in 0..rows {
                    acc += m[r * cols + i] * m[r * cols + j];
                }
                g[i * cols + j] = acc;
                g[j * cols + i] = acc;
            }
        }
        let (lam, v) = jacobi_eig_max(g, cols);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = if norm > 0.0 { v.iter().map(|x| x / norm).collect() } else { v };
        (lam.max(0.0).sqrt(), v)
    } else {
        // Gram on the left, then pull the vector back through M^T.
        let mut g = vec![0.0; rows * rows];
        for i in 0..rows {
            for j in i..rows {
                let mut acc = 0.0;
                for c in 0..cols {
                    acc += m[i * cols + c] * m[j * cols + c];
                }
                g[i * rows + j] = acc;
                g[j * rows + i] = acc;
            }
        }
        let (lam, u) = jacobi_eig_max(g, rows);
        let sigma = lam.max(0.0).sqrt();
        let mut v = vec![0.0; cols];
        for c in 0..cols {
            let mut acc = 0.0;
            for r in 0..rows {
                acc += m[r * cols + c] * u[r];
            }
            v[c] = acc;
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
        } else {
            v[0] = 1.0;
        }
        (sigma, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_of_diagonal() {
        let a = vec![3.0, 0.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0, 5.0];
        let (lam, v) = jacobi_eig_max(a, 3);
        assert!((lam - 7.0).abs() < 1e-12);
        assert!((v[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_rotation_conjugate() {
        // Eigenvalues 1 and 4 rotated by 30 degrees.
        let (c, s) = (3.0f64.sqrt() / 2.0, 0.5);
        let a = vec![
            c * c + 4.0 * s * s,
            c * s * 3.0,
            c * s * 3.0,
            s * s + 4.0 * c * c,
        ];
        let (lam, v) = jacobi_eig_max(a, 2);
        assert!((lam - 4.0).abs() < 1e-12);
        // Eigenvector proportional to (s, c).
        assert!((v[0] * c - v[1] * s).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_of_stacked_identity_rows() {
        // [[1,0],[1,0]] has sigma = sqrt(2).
        let (sig, v) = spectral_norm(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        assert!((sig - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((v[0].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_wide_and_tall_agree() {
        let m = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let (a, _) = spectral_norm(2, 3, &m);
        let mt = [1.0, 4.0, 2.0, 5.0, 3.0, 6.0];
        let (b, _) = spectral_norm(3, 2, &mt);
        assert!((a - b).abs() < 1e-10);
        // Frozen value: the Gram matrix [[14,32],[32,77]] has
        // trace 91 and determinant 54.
        let lam = (91.0 + (91.0f64 * 91.0 - 4.0 * 54.0).sqrt()) / 2.0;
        assert!((a - lam.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn zero_matrix() {
        let (sig, v) = spectral_norm(2, 2, &[0.0; 4]);
        assert_eq!(sig, 0.0);
        assert_eq!(v.len(), 2);
    }
}
