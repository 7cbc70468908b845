//! Tiny dense linear algebra for the 2x2 and 3x3 symmetric systems that show
//! up in the conjugate parameter updates. Fixed-size arrays keep everything on
//! the stack; nothing here is meant for large matrices.

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky<const N: usize>(a: &[[f64; N]; N]) -> Result<[[f64; N]; N]> {
    let mut l = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::numerical(format!(
                        "matrix not positive definite (pivot {i} = {s})"
                    )));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Solve `L Lᵀ x = b` given the lower-triangular Cholesky factor `L`.
pub fn chol_solve<const N: usize>(l: &[[f64; N]; N], b: &[f64; N]) -> [f64; N] {
    // Forward substitution: L w = b.
    let mut w = [0.0; N];
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * w[k];
        }
        w[i] = s / l[i][i];
    }
    // Back substitution: Lᵀ x = w.
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let mut s = w[i];
        for k in (i + 1)..N {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// `mean + L ε` with `ε` a vector of the supplied standard-normal draws:
/// a multivariate normal draw given the covariance's Cholesky factor.
pub fn mvn_from_std<const N: usize>(
    mean: &[f64; N],
    l: &[[f64; N]; N],
    std_normals: &[f64; N],
) -> [f64; N] {
    let mut out = *mean;
    for i in 0..N {
        for k in 0..=i {
            out[i] += l[i][k] * std_normals[k];
        }
    }
    out
}
