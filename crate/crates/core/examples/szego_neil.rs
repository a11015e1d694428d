//! Szegő extremal problem on the Neil algebra: brute-force minimum against
//! the kernel formula, and the parameter built from `ρ̂(1)` instead of the
//! analytic part of `log ρ`.

use constrained_hardy::boundary::{boundary_exp, BoundaryFunction, DomainSpec};
use constrained_hardy::chain::GamelinChain;
use constrained_hardy::szego::{neil_constants, neil_lambda_rhs, verify_szego};
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let domain = DomainSpec::disk(64)?;
    let chain = GamelinChain::neil();
    let cos = BoundaryFunction::from_sparse(&[vec![(1, C64::new(0.5, 0.0)), (-1, C64::new(0.5, 0.0))]])?;
    let outer_poly = BoundaryFunction::from_sparse(&[vec![(-1, C64::new(0.4, 0.0)), (0, C64::new(1.16, 0.0)), (1, C64::new(0.4, 0.0))]])?;
    for (name, rho) in [("exp(cos θ)", boundary_exp(&cos, &domain)?), ("|1 + 0.4z|²", outer_poly)] {
        let rep = verify_szego(&rho, &chain, &domain, &[8, 16, 32, 64])?;
        println!("ρ = {name}: omega = {}", rep.omega);
        for t in &rep.trace {
            println!("  M = {:2}  lhs = {:.12}  rhs = {:.12}", t.degree, t.lhs, t.rhs);
        }
        let k = neil_constants(&rho, &domain)?;
        println!("  λ = {:.6}, kernel value with σ(λ): {:.6}", k.lambda, neil_lambda_rhs(&rho, &domain)?);
    }
    Ok(())
}
