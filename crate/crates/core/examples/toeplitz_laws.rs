//! Toeplitz compressions on a constrained space: adjoints, norms, products,
//! and invertibility of symbols in the algebra.

use constrained_hardy::boundary::{BoundaryFunction, DomainSpec, WeightSpec};
use constrained_hardy::chain::{DeltaPoint, GamelinChain, Projective};
use constrained_hardy::series::Laurent;
use constrained_hardy::toeplitz::{
    min_singular_value, operator_norm, symbol_invertibility_check, toeplitz_matrix, PaddedSpace, ScanGrid,
};
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let chain = GamelinChain::neil();
    let d = DeltaPoint::new(vec![Projective::finite(C64::new(0.5, 1.5))]);
    // |φ| ≥ 0.7 but φ winds −2 times, so σ_min must collapse as M grows
    let phi = BoundaryFunction::from_sparse(&[vec![(-2, C64::new(1.0, 0.0)), (1, C64::new(0.3, 0.0))]])?;
    for m in [16, 32, 64, 128] {
        let s = PaddedSpace::new(&DomainSpec::disk(m)?, &WeightSpec::Unit, &chain, &d)?;
        let t = toeplitz_matrix(&phi, &s)?;
        let ta = toeplitz_matrix(&phi.conj(), &s)?;
        let adj = (ta.full() - t.full().adjoint()).iter().fold(0.0f64, |m, c| m.max(c.norm()));
        println!(
            "M = {m:3}: ||T|| = {:.6} (sup |φ| = 1.3), σ_min = {:.2e}, adjoint defect = {adj:.1e}",
            operator_norm(&t),
            min_singular_value(&t)
        );
    }
    let grid = ScanGrid { sphere_points: 6, ..ScanGrid::default() };
    let domain = DomainSpec::disk(16)?;
    for (name, psi) in [("2 + z²", Laurent::from_real(&[2.0, 0.0, 1.0])), ("z²", Laurent::from_real(&[0.0, 0.0, 1.0]))] {
        let r = symbol_invertibility_check(&psi, &chain, &domain, &grid)?;
        println!(
            "ψ = {name}: min |ψ| = {:.3}, invertible = {}, inverse residual = {:?}, σ_min(T_ψ̄) trace = {:?}",
            r.min_modulus, r.invertible, r.inverse_residual, r.adjoint_sigma_trace
        );
    }
    Ok(())
}
