//! Widom scans: σ_min of `T_φ` over the Σ × Δ grid against `dist(φ, A)`.

use constrained_hardy::boundary::{boundary_exp, BoundaryFunction, DomainSpec};
use constrained_hardy::chain::{Constraint, GamelinChain};
use constrained_hardy::toeplitz::{widom_scan, ScanGrid};
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let grid = ScanGrid::default();
    let disk = DomainSpec::disk(32)?;
    let cases = [
        ("1, Neil", BoundaryFunction::constant(1, C64::new(1.0, 0.0)), GamelinChain::neil()),
        ("conj(z)², no constraints", BoundaryFunction::from_sparse(&[vec![(-2, C64::new(1.0, 0.0))]])?, GamelinChain::empty()),
        (
            "exp(0.3i cos θ), Neil",
            boundary_exp(&BoundaryFunction::from_sparse(&[vec![(1, C64::new(0.0, 0.15)), (-1, C64::new(0.0, 0.15))]])?, &disk)?,
            GamelinChain::neil(),
        ),
    ];
    for (name, phi, chain) in &cases {
        let s = widom_scan(phi, chain, &disk, &grid)?;
        println!(
            "{name:28} {:>3} points  min σ = {:.4}  max ||T|| = {:.4}  d = {:.4}  -> {:?}",
            s.points.len(),
            s.min_sigma,
            s.max_norm,
            s.distance.value,
            s.verdict
        );
    }
    // on the annulus Σ is a circle and the weight |z|^α varies with it;
    // coefficients are in e^{ikθ} per circle, so this is z/|z|
    let ann = DomainSpec::annulus(0.5, C64::new(0.75, 0.0), 16)?;
    let chain = GamelinChain::new(vec![Constraint::derivation(C64::new(0.0, 0.7), 1)?]);
    let phi = BoundaryFunction::from_sparse(&[vec![(1, C64::new(1.0, 0.0))], vec![(1, C64::new(1.0, 0.0))]])?;
    let s = widom_scan(&phi, &chain, &ann, &grid)?;
    println!("annulus z/|z|: min σ = {:.4}  d = {:.4} -> {:?}", s.min_sigma, s.distance.value, s.verdict);
    let one = BoundaryFunction::from_sparse(&[vec![(0, C64::new(1.0, 0.0))], vec![(0, C64::new(1.0, 0.0))]])?;
    let s = widom_scan(&one, &chain, &ann, &grid)?;
    println!("annulus 1: {} points, min σ = {:.4} -> {:?}", s.points.len(), s.min_sigma, s.verdict);
    Ok(())
}
