//! Both sides of the Szegő distance formula for a constrained algebra.
//!
//! The kernel side decomposes `log ρ = γ ⊕ ζ ⊕ n`, selects the parameter `ω`
//! for which `e^γ` satisfies the chain, and evaluates
//! `exp(C_ρ) / K^{n,ω}(x0, x0)`. The brute-force side minimizes
//! `∫ |1 − p|² ρ dm` over a truncated basis of `A₀`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_log, pair_with_m, BoundaryFunction, DomainKind, DomainSpec, WeightSpec};
use crate::chain::{constraint_rows, delta_gamma, Constraint, DeltaPoint, GamelinChain, Projective};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rkhs::{build_constrained_space, kernel_norm_at_basepoint, szego_kernel, Functional};
use crate::series::Laurent;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Largest nodal reassembly error accepted from [`decompose_log_rho`].
pub const DECOMPOSITION_TOL: f64 = 1e-6;

/// `log ρ = γ + ζ + Σ n_i λ_i` with `γ` analytic, `ζ` conjugate-analytic
/// vanishing at `x0`, and `λ_i` the N-basis densities.
#[derive(Clone, Debug)]
pub struct LogRhoDecomposition {
    pub gamma: Laurent,
    /// Boundary values of `ζ`.
    pub zeta: BoundaryFunction,
    pub n: Vec<f64>,
    /// `∫ log ρ dm`.
    pub c_rho: f64,
    /// Max nodal error of the reassembled sum.
    pub residual: f64,
}

pub fn decompose_log_rho(rho: &BoundaryFunction, domain: &DomainSpec) -> Result<LogRhoDecomposition> {
    let log_rho = boundary_log(rho, domain)?;
    let band = domain.full_band() as i64;
    let c_rho = pair_with_m(&log_rho, domain)?.re;
    let (gamma, zeta, n) = match domain.kind() {
        DomainKind::Disk => {
            let gamma = Laurent::power_series((0..=band).map(|k| log_rho.coeff(0, k)).collect());
            let zeta = BoundaryFunction::new(
                band as usize,
                vec![(-band..=band)
                    .map(|k| if k < 0 { log_rho.coeff(0, k) } else { ZERO })
                    .collect()],
            )?;
            (gamma, zeta, Vec::new())
        }
        DomainKind::Annulus { q } => {
            let lambda = domain.n_basis().remove(0);
            // mode 0 of H² ⊕ conj(H²₀) is the same constant on both circles
            let n1 = ((log_rho.coeff(0, 0) - log_rho.coeff(1, 0))
                / (lambda.coeff(0, 0) - lambda.coeff(1, 0)))
            .re;
            let g = log_rho.add(&lambda.scale(C64::new(-n1, 0.0)))?;
            // per mode m ≠ 0: a z^m + b conj(z)^{-m}, i.e. (a + b) on the
            // outer circle and (a q^m + b q^{-m}) on the inner one
            let mut a = vec![ZERO; (2 * band + 1) as usize];
            let mut b = vec![ZERO; (2 * band + 1) as usize];
            for m in -band..=band {
                if m == 0 {
                    continue;
                }
                let (go, gi) = (g.coeff(0, m), g.coeff(1, m));
                let p = m.unsigned_abs() as i32;
                let qp = q.powi(p);
                let den = 1.0 - qp * qp;
                let i = (m + band) as usize;
                // the small coefficient is formed directly: it is later
                // multiplied by q^{-p} on the inner circle
                if m > 0 {
                    a[i] = (go - gi * qp) / den;
                    b[i] = (gi - go * qp) * qp / den;
                } else {
                    b[i] = (go - gi * qp) / den;
                    a[i] = (gi - go * qp) * qp / den;
                }
            }
            let x0 = domain.x0();
            // ζ = Σ b_m (conj(z)^{-m} − conj(x0)^{-m})
            let shift: C64 = (-band..=band)
                .filter(|&m| m != 0)
                .map(|m| b[(m + band) as usize] * x0.conj().powi(-m as i32))
                .sum();
            a[band as usize] = g.coeff(0, 0) + shift;
            let gamma = Laurent::new(-band, a.clone());
            let zeta_comps = (0..2)
                .map(|comp| {
                    let r = domain.radius(comp);
                    (-band..=band)
                        .map(|m| {
                            if m == 0 {
                                -shift
                            } else {
                                b[(m + band) as usize] * r.powi(-m as i32)
                            }
                        })
                        .collect()
                })
                .collect();
            (gamma, BoundaryFunction::new(band as usize, zeta_comps)?, vec![n1])
        }
    };
    let residual = reassembly_error(&log_rho, &gamma, &zeta, &n, domain)?;
    if !(residual <= DECOMPOSITION_TOL) {
        return Err(Error::Truncation(format!(
            "log ρ decomposition residual {residual:e}"
        )));
    }
    Ok(LogRhoDecomposition {
        gamma,
        zeta,
        n,
        c_rho,
        residual,
    })
}

fn reassembly_error(
    log_rho: &BoundaryFunction,
    gamma: &Laurent,
    zeta: &BoundaryFunction,
    n: &[f64],
    domain: &DomainSpec,
) -> Result<f64> {
    let mut sum = BoundaryFunction::from_laurent(gamma, domain).add(zeta)?;
    for (ni, lam) in n.iter().zip(domain.n_basis()) {
        sum = sum.add(&lam.scale(C64::new(*ni, 0.0)))?;
    }
    let a = sum.samples_on(domain)?;
    let b = log_rho.samples_on(domain)?;
    Ok(a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Derivatives `(e^{γ − γ(c)})^{(k)}(c)` for `k = 0..=n`, from
/// `h' = γ' h`, i.e. `h_k = Σ_j C(k−1, j) γ^{(j+1)} h_{k−1−j}`.
fn exp_derivatives(gamma: &Laurent, c: C64, n: u32, domain: &DomainSpec) -> Result<Vec<C64>> {
    let g: Vec<C64> = (0..=n)
        .map(|j| crate::boundary::evaluate_analytic(gamma, c, j, domain))
        .collect::<Result<_>>()?;
    let mut h = vec![ONE];
    for k in 1..=n as usize {
        let mut s = ZERO;
        let mut binom = 1.0;
        for j in 0..k {
            s += g[j + 1] * h[k - 1 - j] * binom;
            binom = binom * (k - 1 - j) as f64 / (j + 1) as f64;
        }
        h.push(s);
    }
    Ok(h)
}

/// The parameter `ω` with `e^γ ∈ H²_ω`: `exp(γ(a) − γ(b))` for 2-point
/// stages and `e^{γ(c)} / (e^γ)^{(n)}(c)` for derivation stages.
pub fn omega_from_gamma(gamma: &Laurent, chain: &GamelinChain, domain: &DomainSpec) -> Result<DeltaPoint> {
    let coords = chain
        .constraints()
        .iter()
        .map(|c| match *c {
            Constraint::TwoPoint { a, b } => {
                let ga = crate::boundary::evaluate_analytic(gamma, a, 0, domain)?;
                let gb = crate::boundary::evaluate_analytic(gamma, b, 0, domain)?;
                Ok(Projective::finite((ga - gb).exp()))
            }
            Constraint::Derivation { c, order } => {
                let h = exp_derivatives(gamma, c, order, domain)?;
                Ok(Projective::new(ONE, h[order as usize]))
            }
        })
        .collect::<Result<_>>()?;
    Ok(DeltaPoint::new(coords))
}

/// Kernel side of the formula.
#[derive(Clone, Debug)]
pub struct SzegoRhs {
    pub decomposition: LogRhoDecomposition,
    pub omega: DeltaPoint,
    /// `K^{n,ω}(x0, x0)`.
    pub kernel_norm: f64,
    pub value: f64,
}

pub fn szego_rhs(rho: &BoundaryFunction, chain: &GamelinChain, domain: &DomainSpec) -> Result<SzegoRhs> {
    let dec = decompose_log_rho(rho, domain)?;
    let omega = omega_from_gamma(&dec.gamma, chain, domain)?;
    let space = build_constrained_space(domain, &WeightSpec::ExpN(dec.n.clone()), chain, &omega)?;
    let kernel_norm = kernel_norm_at_basepoint(&space);
    Ok(SzegoRhs {
        value: dec.c_rho.exp() / kernel_norm,
        decomposition: dec,
        omega,
        kernel_norm,
    })
}

/// Minimum of `∫|1 − p|² ρ dm` and whether the normal equations needed
/// regularization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhsValue {
    pub value: f64,
    pub regularized: bool,
}

/// `min ∫ |1 − p|² ρ dm` over the degree-`M` truncation of
/// `A₀ = {p ∈ A : p(x0) = 0}` (constraints at `D_Γ`).
pub fn szego_lhs_bruteforce(rho: &BoundaryFunction, chain: &GamelinChain, domain: &DomainSpec) -> Result<f64> {
    szego_lhs_detailed(rho, chain, domain).map(|v| v.value)
}

pub fn szego_lhs_detailed(rho: &BoundaryFunction, chain: &GamelinChain, domain: &DomainSpec) -> Result<LhsValue> {
    let kernel = szego_kernel(domain, &WeightSpec::Density(rho.clone()))?;
    let basis = kernel.basis();
    let gram = kernel.gram();
    let dg = delta_gamma(chain);
    let scale: Vec<f64> = (0..basis.len()).map(|i| basis.scale(i)).collect();
    let mut rows = constraint_rows(chain, &dg, basis.powers(), |j| scale[j])?;
    let x0_row = Functional::Eval {
        z: domain.x0(),
        order: 0,
    }
    .row(basis);
    rows = rows.insert_row(chain.len(), ZERO);
    rows.set_row(chain.len(), &x0_row.transpose());
    let b = linalg::null_space(&rows)?;
    let one = basis.from_laurent(&Laurent::constant(ONE));
    let h = b.adjoint() * gram * &b;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let rhs = b.adjoint() * gram * &one;
    let total = (one.adjoint() * gram * &one)[(0, 0)].re;
    let (l, regularized) = match linalg::cholesky_lower(&h) {
        Ok(l) => (l, false),
        Err(_) => {
            let eps = 1e-12 * h.diagonal().iter().map(|v| v.re).fold(0.0, f64::max);
            let reg = &h + CMat::identity(h.nrows(), h.ncols()) * C64::new(eps, 0.0);
            (linalg::cholesky_lower(&reg)?, true)
        }
    };
    let y = linalg::solve_lower(&l, &CMat::from_column_slice(rhs.len(), 1, rhs.as_slice()));
    let value = total - y.norm_squared();
    Ok(LhsValue { value, regularized })
}

/// Constants of the closed-form Neil statement on the disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeilConstants {
    pub c_rho: f64,
    pub lambda: C64,
    pub sigma: (C64, C64),
}

/// `C_ρ = ∫ log ρ dm`, `λ = e^{C_ρ} ρ̂(1)` and `σ = (1, λ)/√(1 + |λ|²)`.
pub fn neil_constants(rho: &BoundaryFunction, domain: &DomainSpec) -> Result<NeilConstants> {
    if !domain.is_disk() {
        return Err(Error::UnsupportedDomain("Neil constants are defined on the disk".into()));
    }
    let c_rho = pair_with_m(&boundary_log(rho, domain)?, domain)?.re;
    let samples = rho.samples_on(domain)?;
    let rho1 = BoundaryFunction::from_samples(&samples, 1)?.coeff(0, 1);
    let lambda = rho1 * c_rho.exp();
    let s = (1.0 + lambda.norm_sqr()).sqrt();
    Ok(NeilConstants {
        c_rho,
        lambda,
        sigma: (C64::new(1.0 / s, 0.0), lambda / s),
    })
}

/// Kernel side computed with the Neil parameter `σ` in place of `ω`.
pub fn neil_lambda_rhs(rho: &BoundaryFunction, domain: &DomainSpec) -> Result<f64> {
    let k = neil_constants(rho, domain)?;
    let chain = GamelinChain::neil();
    let d = DeltaPoint::new(vec![Projective::new(k.sigma.0, k.sigma.1)]);
    let space = build_constrained_space(domain, &WeightSpec::Unit, &chain, &d)?;
    Ok(k.c_rho.exp() / kernel_norm_at_basepoint(&space))
}

/// One truncation level of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub degree: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub regularized: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzegoReport {
    pub c_rho: f64,
    pub omega: DeltaPoint,
    pub n: Vec<f64>,
    pub rhs: f64,
    pub lhs: f64,
    pub degree: usize,
    pub gap: f64,
    pub decomposition_residual: f64,
    pub trace: Vec<TracePoint>,
}

impl SzegoReport {
    /// True when the gap never grows along the trace (up to `slack`).
    pub fn gap_nonincreasing(&self, slack: f64) -> bool {
        self.trace.windows(2).all(|w| w[1].gap <= w[0].gap + slack)
    }
}

/// Evaluates both sides for each truncation degree in `schedule`.
pub fn verify_szego(
    rho: &BoundaryFunction,
    chain: &GamelinChain,
    domain: &DomainSpec,
    schedule: &[usize],
) -> Result<SzegoReport> {
    if schedule.is_empty() {
        return Err(Error::Precondition("empty truncation schedule".into()));
    }
    let mut trace = Vec::with_capacity(schedule.len());
    let mut last = None;
    for &m in schedule {
        let dm = domain.with_truncation(m)?;
        let rhs = szego_rhs(rho, chain, &dm).map_err(|e| e.in_stage("szego rhs"))?;
        let lhs = szego_lhs_detailed(rho, chain, &dm).map_err(|e| e.in_stage("szego lhs"))?;
        trace.push(TracePoint {
            degree: m,
            lhs: lhs.value,
            rhs: rhs.value,
            gap: (lhs.value - rhs.value).abs(),
            regularized: lhs.regularized,
        });
        last = Some(rhs);
    }
    let rhs = last.expect("schedule is nonempty");
    let t = trace.last().expect("schedule is nonempty").clone();
    Ok(SzegoReport {
        c_rho: rhs.decomposition.c_rho,
        omega: rhs.omega,
        n: rhs.decomposition.n,
        rhs: t.rhs,
        lhs: t.lhs,
        degree: t.degree,
        gap: t.gap,
        decomposition_residual: rhs.decomposition.residual,
        trace,
    })
}
