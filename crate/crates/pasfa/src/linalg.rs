//! Small dense linear-algebra helpers.
//!
//! Everything here operates on desk-scale matrices (state and observation
//! dimensions in the single digits, Gram matrices up to a few thousand rows
//! for the batch oracle), so plain loop implementations are used throughout
//! instead of a LAPACK backend.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// Returns `None` if a pivot drops to zero or below (matrix not SPD).
pub fn cholesky(a: ArrayView2<'_, f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_substitute(l: &Array2<f64>, b: ArrayView1<'_, f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = b.to_owned();
    for i in 0..n {
        for k in 0..i {
            let lik = l[[i, k]];
            x[i] -= lik * x[k];
        }
        x[i] /= l[[i, i]];
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub fn back_substitute(l: &Array2<f64>, b: ArrayView1<'_, f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = b.to_owned();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lki = l[[k, i]];
            x[i] -= lki * x[k];
        }
        x[i] /= l[[i, i]];
    }
    x
}

/// Solves `A x = b` with `A` symmetric positive definite via Cholesky.
pub fn spd_solve_vec(a: ArrayView2<'_, f64>, b: ArrayView1<'_, f64>) -> Option<Array1<f64>> {
    let l = cholesky(a)?;
    let y = forward_substitute(&l, b);
    Some(back_substitute(&l, y.view()))
}

/// Solves `A X = B` column by column with `A` symmetric positive definite.
pub fn spd_solve_mat(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Option<Array2<f64>> {
    let l = cholesky(a)?;
    let mut x = Array2::<f64>::zeros(b.raw_dim());
    for (j, col) in b.columns().into_iter().enumerate() {
        let y = forward_substitute(&l, col);
        let s = back_substitute(&l, y.view());
        x.column_mut(j).assign(&s);
    }
    Some(x)
}

/// In-place symmetrization: `m <- (m + mᵀ)/2`.
pub fn symmetrize(m: &mut Array2<f64>) {
    let n = m.nrows();
    if let Some(flat) = m.as_slice_mut() {
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (flat[i * n + j] + flat[j * n + i]);
                flat[i * n + j] = avg;
                flat[j * n + i] = avg;
            }
        }
        return;
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = avg;
            m[[j, i]] = avg;
        }
    }
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, ascending.
///
/// Used for positive-semidefiniteness checks on covariance blocks; the
/// matrices involved never exceed a few dozen rows.
pub fn sym_eigenvalues(a: ArrayView2<'_, f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.to_owned();
    if n == 1 {
        return vec![m[[0, 0]]];
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[[i, i]]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Maximum modulus among the roots of `z^L - c[0] z^(L-1) - ... - c[L-1]`.
///
/// This is the spectral radius of the companion matrix of an AR(L) channel;
/// roots are found by Durand-Kerner iteration, which is ample for the small
/// orders seen here. Returns 0 for an empty coefficient slice.
pub fn max_ar_root_modulus(coeffs: &[f64]) -> f64 {
    let l = coeffs.len();
    if l == 0 {
        return 0.0;
    }
    // Monic polynomial p(z) = z^l + p[1] z^(l-1) + ... + p[l], p[i] = -c[i-1].
    let poly: Vec<f64> = coeffs.iter().map(|c| -c).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for &p in &poly {
            acc = acc * z + Complex64::new(p, 0.0);
        }
        acc
    };
    // Standard Durand-Kerner seeds: powers of a non-real point off the unit circle.
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..l).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..l {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..l {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-13 {
            break;
        }
    }
    roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
}
