//! Szegő equality on the annulus `0.5 < |z| < 1` with a weight whose
//! logarithm has a nonzero N-component.

use constrained_hardy::boundary::{BoundaryFunction, DomainSpec};
use constrained_hardy::chain::{validate_chain, Constraint, GamelinChain};
use constrained_hardy::szego::verify_szego;
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let (q, s) = (0.5, 0.6);
    let x0 = C64::new(0.5f64.sqrt(), 0.0);
    let domain = DomainSpec::annulus(q, x0, 8)?;
    let fine = domain.with_min_nodes(513)?;
    // ρ = |z|^{2s} exp(0.3 Re z + 0.2 Im z²)
    let samples: Vec<Vec<C64>> = (0..2)
        .map(|comp| {
            (0..fine.nodes())
                .map(|j| {
                    let z = fine.node_point(comp, j);
                    C64::new((2.0 * s * z.norm().ln() + 0.3 * z.re + 0.2 * (z * z).im).exp(), 0.0)
                })
                .collect()
        })
        .collect();
    let rho = BoundaryFunction::from_samples(&samples, 40)?;
    let chain = GamelinChain::new(vec![
        Constraint::two_point(C64::new(0.6, 0.1), C64::new(-0.65, 0.0))?,
        Constraint::derivation(C64::new(0.0, 0.75), 1)?,
    ]);
    validate_chain(&chain, &domain, 7)?.ensure()?;
    let report = verify_szego(&rho, &chain, &domain, &[12, 24, 48])?;
    println!("C_rho = {:.12}", report.c_rho);
    println!("n     = {:?}", report.n);
    println!("omega = {}", report.omega);
    println!("decomposition residual = {:e}", report.decomposition_residual);
    for t in &report.trace {
        println!("M = {:3}  lhs = {:.10}  rhs = {:.10}  gap = {:.3e}", t.degree, t.lhs, t.rhs, t.gap);
    }
    Ok(())
}
