//! Projective arithmetic on Δ and the quotient rule it encodes.

use constrained_hardy::boundary::DomainSpec;
use constrained_hardy::chain::{
    constraint_residual, delta_gamma, delta_inverse, delta_product, Constraint, DeltaPoint, GamelinChain,
};
use constrained_hardy::series::Laurent;
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let (a, b) = (C64::new(0.3, 0.0), C64::new(-0.3, 0.0));
    let chain = GamelinChain::new(vec![Constraint::two_point(a, b)?, Constraint::derivation(C64::new(0.0, 0.0), 1)?]);
    let x = DeltaPoint::parse_list("2, 1+1i")?;
    let y = DeltaPoint::parse_list("0.25, inf")?;
    println!("D_Γ        = {}", delta_gamma(&chain));
    println!("x · y      = {}", delta_product(&x, &y, &chain)?);
    println!("x⁻¹        = {}", delta_inverse(&x, &chain)?);
    println!("x · x⁻¹    = {}", delta_product(&x, &delta_inverse(&x, &chain)?, &chain)?);

    // f(a) = 2 f(b) and g(a) = g(b): then f/g has ratio 2 as well
    let z = Laurent::monomial(1, C64::new(1.0, 0.0));
    let k = (C64::new(2.0, 0.0) - 1.0) / (a - b);
    let f = Laurent::constant(C64::new(1.0, 0.0)).add(&z.sub(&Laurent::constant(b)).scale(k));
    let g = Laurent::power_series(vec![C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
    let q = f.mul(&g.reciprocal_power_series(120)?).truncate(0, 120);
    let one = GamelinChain::new(vec![Constraint::two_point(a, b)?]);
    let d = DeltaPoint::parse_list("2")?;
    println!("residual of f/g at {d}: {:.1e}", constraint_residual(&q, &one, &d, &DomainSpec::disk(8)?)?);
    Ok(())
}
