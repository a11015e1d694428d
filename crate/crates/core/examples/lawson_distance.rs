//! Minimax distance from a boundary function to the truncated algebra,
//! computed by Lawson's reweighted least squares.

use constrained_hardy::boundary::{BoundaryFunction, DomainSpec};
use constrained_hardy::chain::GamelinChain;
use constrained_hardy::toeplitz::distance_to_algebra;
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let disk = DomainSpec::disk(24)?;
    let one = C64::new(1.0, 0.0);
    let cases = [
        ("conj(z)", vec![(-1, one)], GamelinChain::empty()),
        ("z", vec![(1, one)], GamelinChain::neil()),
        ("z²", vec![(2, one)], GamelinChain::neil()),
        ("z + 0.5 conj(z)", vec![(1, one), (-1, C64::new(0.5, 0.0))], GamelinChain::empty()),
    ];
    for (name, terms, chain) in cases {
        let phi = BoundaryFunction::from_sparse(&[terms])?;
        let est = distance_to_algebra(&phi, &chain, &disk, 24)?;
        println!(
            "{name:16} chain of {} stages: d = {:.6}  lower bound = {:.6}  iterations = {}  stalled = {}",
            chain.len(),
            est.value,
            est.lower_bound,
            est.iterations,
            est.stalled
        );
    }
    Ok(())
}
