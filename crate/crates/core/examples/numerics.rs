//! The numerical building blocks: Haar unitaries, the Hermitian eigensolver
//! and Gauss-Legendre quadrature.
//!
//!     cargo run --example numerics

use num_complex::Complex64;
use weichsel::channel::build_covariance;
use weichsel::montecarlo::rng_stream;
use weichsel::numerics::{gauss_legendre, haar_unitary, hermitian_eig, integrate};

fn main() -> weichsel::Result<()> {
    let mut rng = rng_stream(42, 0);
    let u = haar_unitary(24, &mut rng)?;
    println!("Haar U (24x24): |U^H U - I|_max = {:.2e}", u.unitarity_defect());

    let omega: Vec<f64> = (1..=24).map(|i| i as f64 * 2.0 / 25.0).collect();
    let q = build_covariance(&u, &omega)?;
    let eig = hermitian_eig(q.matrix())?;
    // values come back in descending order
    let worst = eig.values.iter().zip(omega.iter().rev()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("eigenvalues recovered to {worst:.2e}");

    let (nodes, weights) = gauss_legendre(5);
    let exact = weights.iter().zip(&nodes).map(|(w, x)| w * x.powi(8)).sum::<f64>();
    println!("5-point rule on x^8 over [-1, 1]: {exact:.15} (2/9 = {:.15})", 2.0 / 9.0);

    // J0(30) as an oscillatory check
    let j0 = integrate(|t| Complex64::new((30.0 * t.sin()).cos(), 0.0), 0.0, std::f64::consts::PI)?.re
        / std::f64::consts::PI;
    println!("J0(30) = {j0:.12}");
    Ok(())
}
