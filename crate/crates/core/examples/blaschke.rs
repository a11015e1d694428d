//! The finite Blaschke product vanishing on the constraint points: it and
//! all its multiples satisfy every fiber of the chain.

use constrained_hardy::boundary::DomainSpec;
use constrained_hardy::chain::{constraint_residual, Constraint, DeltaPoint, GamelinChain};
use constrained_hardy::rkhs::blaschke_with_gamma_zeros;
use constrained_hardy::series::Laurent;
use num_complex::Complex64 as C64;

fn main() -> constrained_hardy::Result<()> {
    let disk = DomainSpec::disk(12)?;
    let chain = GamelinChain::new(vec![
        Constraint::two_point(C64::new(0.3, 0.0), C64::new(-0.3, 0.0))?,
        Constraint::derivation(C64::new(0.0, 0.4), 2)?,
    ]);
    let b = blaschke_with_gamma_zeros(&chain, &disk)?;
    println!("zeros (point, order): {:?}, degree {}", b.zeros(), b.degree());
    let f = b.to_laurent()?.mul(&Laurent::from_real(&[1.0, -0.5, 0.25]));
    for d in ["1, inf", "2, 0.5i", "-1+1i, 3"] {
        let d = DeltaPoint::parse_list(d)?;
        println!("residual of B·h at {d}: {:.1e}", constraint_residual(&f, &chain, &d, &disk)?);
    }
    println!("|B| on the circle: {:.15}", b.eval(C64::from_polar(1.0, 0.7)).norm());
    Ok(())
}
