//! Real eigenvalue bookkeeping for dense nonsymmetric matrices.

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// All eigenvalues of `m`, read off its real Schur form.
///
/// 2x2 diagonal blocks with a nonnegative discriminant are split into two real values
/// instead of trusting the block to encode a complex pair.
pub fn eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = m.amax().max(1.0);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 == n || t[(i + 1, i)].abs() <= f64::EPSILON * scale {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
            continue;
        }
        let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let half_tr = 0.5 * (a + d);
        let half_diff = 0.5 * (a - d);
        let disc = half_diff * half_diff + b * c;
        if disc >= 0.0 {
            let s = disc.sqrt();
            out.push(Complex64::new(half_tr + s, 0.0));
            out.push(Complex64::new(half_tr - s, 0.0));
        } else {
            let s = (-disc).sqrt();
            out.push(Complex64::new(half_tr, s));
            out.push(Complex64::new(half_tr, -s));
        }
        i += 2;
    }
    Ok(out)
}

/// Number of real negative eigenvalues.
pub fn negative_real_count(m: DMatrix<f64>) -> Result<usize> {
    Ok(eigenvalues(m)?.iter().filter(|z| z.im == 0.0 && z.re < 0.0).count())
}

/// Sign of the determinant from an LU factorization; 0 for an exactly singular matrix.
pub fn det_sign(m: DMatrix<f64>) -> i32 {
    let lu = m.lu();
    let u = lu.u();
    let mut sign = lu.p().determinant::<f64>().signum() as i32;
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 {
            return 0;
        }
        if d < 0.0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_on_a_block_matrix() {
        // Eigenvalues: -2, 3, and the pair 1 ± 2i.
        let m = DMatrix::from_row_slice(4, 4, &[
            -2.0, 0.0, 0.0, 0.0, //
            0.0, 3.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, -2.0, //
            0.0, 0.0, 2.0, 1.0,
        ]);
        let ev = eigenvalues(m.clone()).unwrap();
        assert_eq!(ev.len(), 4);
        assert_eq!(negative_real_count(m.clone()).unwrap(), 1);
        assert_eq!(det_sign(m), -1);
    }

    #[test]
    fn parity_agrees_with_determinant_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [3, 6, 11, 20] {
            for _ in 0..20 {
                let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
                let neg = negative_real_count(m.clone()).unwrap();
                let expect = if neg % 2 == 0 { 1 } else { -1 };
                assert_eq!(det_sign(m), expect);
            }
        }
    }
}
