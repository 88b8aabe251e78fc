use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const MAX_HAAR_DIM: usize = 256;

/// Haar-random unitary from a Ginibre matrix: `Q · diag(R_ii / |R_ii|)` for `Z = QR`.
pub fn haar_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<CMatrix> {
    if d == 0 || d > MAX_HAAR_DIM {
        return Err(Error::InvalidArgument(format!("unitary dimension must be in 1..={MAX_HAAR_DIM}, got {d}")));
    }
    let z = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    Ok(u)
}

pub fn haar_unitary(d: usize, seed: u64) -> Result<CMatrix> {
    haar_unitary_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn unitary_and_deterministic() {
        for (d, seed) in [(1, 0), (2, 1), (7, 2), (32, 3)] {
            let u = haar_unitary(d, seed).unwrap();
            let eye = CMatrix::identity(d, d);
            assert!(linalg::max_abs_diff(&(&u * u.adjoint()), &eye) <= 1e-9);
            assert_eq!(u, haar_unitary(d, seed).unwrap());
        }
        assert!(haar_unitary(0, 0).is_err());
        assert!(haar_unitary(257, 0).is_err());
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let u = haar_unitary(3, 9).unwrap();
        let rho = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.2, 0.0),
        ]));
        let spec = linalg::hermitian_eigenvalues(&(&u * &rho * u.adjoint()));
        for (a, b) in spec.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn phases_are_not_biased() {
        // the mean of U_00 over many draws vanishes for the Haar measure
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 2000;
        let mean: Complex64 = (0..n).map(|_| haar_unitary_with(2, &mut rng).unwrap()[(0, 0)]).sum::<Complex64>() / n as f64;
        assert!(mean.norm() < 0.05);
    }
}
