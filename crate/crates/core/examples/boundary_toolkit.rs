//! Boundary functions on the disk and the annulus: FFT coefficients,
//! harmonic measure, and the splitting of `log ρ` into analytic, conjugate
//! and harmonic-measure parts.

use constrained_hardy::boundary::{BoundaryFunction, DomainSpec};
use constrained_hardy::series::Laurent;
use constrained_hardy::szego::decompose_log_rho;
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    // sampled values come back as Fourier coefficients
    let disk = DomainSpec::disk(16)?;
    let f = BoundaryFunction::from_sparse(&[vec![(-2, C64::new(0.5, 0.0)), (3, C64::new(0.0, 1.0))]])?;
    let g = BoundaryFunction::from_samples(&f.samples_on(&disk)?, 4)?;
    println!("disk: coeff(3) = {:.12}, coeff(-2) = {:.12}", g.coeff(0, 3), g.coeff(0, -2));

    // the representing measure of x0 reproduces analytic monomials
    let x0 = C64::new(0.75, 0.0);
    let ann = DomainSpec::annulus(0.5, x0, 24)?;
    println!("annulus: {} nodes per circle, sigma = {}", ann.nodes(), ann.sigma());
    for k in [-3i64, -1, 2, 5] {
        let zk = BoundaryFunction::from_laurent(&Laurent::monomial(k, C64::new(1.0, 0.0)), &ann);
        let samples = zk.samples_on(&ann)?;
        let (got, want) = (ann.integrate(&samples), x0.powi(k as i32));
        println!("  ∫ z^{k:<2} dm = {:.12}   x0^{k} = {:.12}   |diff| = {:.1e}", got.re, want.re, (got - want).norm());
    }

    // log ρ = Re(γ) + n·λ + ζ̄-part + C_ρ on the annulus
    let rho = BoundaryFunction::from_sparse(&[
        vec![(0, C64::new(1.0, 0.0)), (1, C64::new(0.2, 0.0)), (-1, C64::new(0.2, 0.0))],
        vec![(0, C64::new(2.0, 0.0))],
    ])?;
    let dec = decompose_log_rho(&rho, &ann)?;
    println!("log rho: C_rho = {:.10}, n = {:?}, residual = {:.1e}", dec.c_rho, dec.n, dec.residual);
    Ok(())
}
