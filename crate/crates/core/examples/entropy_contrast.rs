//! The von Neumann entropy is basis independent; the Shannon entropy of the
//! diagonal is not.

use decohere::quantum_state;
use decohere::{DensityMatrix, C64};
use nalgebra::DMatrix;

fn main() -> decohere::Result<()> {
    let spectrum = [0.6, 0.3, 0.1];
    for theta in [0.0, 0.3, 0.7, std::f64::consts::FRAC_PI_4] {
        let (s, c) = f64::sin_cos(theta);
        let u = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(c, 0.0),
                C64::new(-s, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, s),
                C64::new(0.0, c),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            spectrum.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let rho = DensityMatrix::new(&u * d * u.adjoint())?;
        let diag: Vec<f64> = (0..3).map(|k| rho.get(k, k).re).collect();
        println!(
            "theta = {theta:.3}: S(rho) = {:.6}  H(diag) = {:.6}",
            quantum_state::vn_entropy(&rho)?,
            quantum_state::shannon_entropy(&diag)?
        );
    }
    Ok(())
}
