//! The Neil space `{f : β f(0) = α f'(0)}` built by downdating the Szegő
//! kernel, compared with its closed form.

use constrained_hardy::boundary::{DomainSpec, WeightSpec};
use constrained_hardy::chain::{DeltaPoint, GamelinChain, Projective};
use constrained_hardy::rkhs::{build_constrained_space, kernel_norm_at_basepoint};
use num_complex::Complex64 as C64;

fn closed(a: C64, b: C64, z: C64, w: C64) -> C64 {
    (a + b * z) * (a + b * w).conj() + z * z * (w * w).conj() / (1.0 - z * w.conj())
}

fn main() -> constrained_hardy::Result<()> {
    let domain = DomainSpec::disk(64)?;
    let chain = GamelinChain::neil();
    let (z, w) = (C64::new(0.3, -0.2), C64::new(-0.1, 0.45));
    for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)] {
        let (a, b) = (C64::new(a, 0.0), C64::new(b, 0.0));
        let d = DeltaPoint::new(vec![Projective::new(a, b)]);
        let s = build_constrained_space(&domain, &WeightSpec::Unit, &chain, &d)?;
        println!(
            "(α, β) = ({a}, {b}): K(z,w) = {:.12}  closed = {:.12}  ||k_0||² = {:.12}  dim = {}",
            s.kernel_eval(z, w),
            closed(a, b, z, w),
            kernel_norm_at_basepoint(&s),
            s.dim()
        );
    }
    Ok(())
}
