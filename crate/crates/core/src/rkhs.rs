//! Reproducing kernels of weighted, constrained Hardy spaces.
//!
//! Functions are coefficient vectors over scaled monomials `ṽ_k = z^k / s_k`
//! with `s_k = ‖z^k‖_w`, so the Gram matrix has unit diagonal. A kernel is a
//! Hermitian matrix `P` with `K(z, w) = ṽ(z)ᵀ P conj(ṽ(w))`; the unconstrained
//! kernel has `P = G⁻¹` and each constraint removes one representer by a
//! rank-one downdate. Independently, an orthonormal basis of the constrained
//! space is built from the null space of the constraint rows.

use num_complex::Complex64 as C64;

use crate::boundary::{evaluate_analytic, DomainSpec, Weight, WeightSpec};
use crate::chain::{Constraint, DeltaPoint, GamelinChain, Projective};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::series::{falling_factorial, Laurent};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Representer norms below this fraction of the unconstrained functional
/// norm count as degenerate.
const DEGENERATE_REL: f64 = 1e-12;

/// `d^n/dz^n (z^k) / s` evaluated at `z`, with `ln s` supplied to avoid
/// overflow for large `|k|`.
fn scaled_monomial_deriv(k: i64, order: u32, z: C64, ln_s: f64) -> C64 {
    let ff = falling_factorial(k, order);
    if ff == 0.0 {
        return ZERO;
    }
    let p = k - order as i64;
    if z == ZERO {
        return if p == 0 { C64::new(ff * (-ln_s).exp(), 0.0) } else { ZERO };
    }
    let mag = (p as f64 * z.norm().ln() - ln_s).exp();
    C64::from_polar(ff * mag, p as f64 * z.arg())
}

/// Scaled monomials `ṽ_k` in nesting order.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    powers: Vec<i64>,
    ln_scale: Vec<f64>,
    degree: usize,
}

impl MonomialBasis {
    fn new(domain: &DomainSpec, weight: &Weight) -> Self {
        let powers = domain.analytic_powers(domain.truncation());
        let mu0: Vec<f64> = domain
            .weighted_moments(weight, 0)
            .iter()
            .map(|m| m[0].re)
            .collect();
        let ln_scale = powers
            .iter()
            .map(|&k| {
                // ½ log Σ_comp r^{2k} μ_comp[0], evaluated stably
                let terms: Vec<f64> = (0..domain.components())
                    .map(|c| 2.0 * k as f64 * domain.radius(c).ln() + mu0[c].ln())
                    .collect();
                let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                0.5 * (m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
            })
            .collect();
        MonomialBasis {
            powers,
            ln_scale,
            degree: domain.truncation(),
        }
    }

    pub fn powers(&self) -> &[i64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `s_k` for each basis element.
    pub fn scale(&self, i: usize) -> f64 {
        self.ln_scale[i].exp()
    }

    /// Number of leading basis elements of degree at most `m`.
    pub fn leading_len(&self, m: usize) -> usize {
        self.powers
            .iter()
            .take_while(|k| k.unsigned_abs() as usize <= m)
            .count()
    }

    /// `(d^n ṽ_k/dz^n)(z)` for every `k`.
    pub fn eval(&self, z: C64, order: u32) -> CVec {
        CVec::from_iterator(
            self.len(),
            self.powers
                .iter()
                .zip(&self.ln_scale)
                .map(|(&k, &ls)| scaled_monomial_deriv(k, order, z, ls)),
        )
    }

    /// Laurent series of `Σ c_k ṽ_k`.
    pub fn to_laurent(&self, coef: &[C64]) -> Laurent {
        let scaled: Vec<C64> = coef
            .iter()
            .zip(&self.ln_scale)
            .map(|(c, ls)| c * (-ls).exp())
            .collect();
        crate::chain::sparse_laurent(&self.powers, &scaled)
    }

    /// Coefficients of the Laurent series `f` (powers outside the basis are dropped).
    pub fn from_laurent(&self, f: &Laurent) -> CVec {
        CVec::from_iterator(
            self.len(),
            self.powers
                .iter()
                .zip(&self.ln_scale)
                .map(|(&k, ls)| f.coeff(k) * ls.exp()),
        )
    }

    /// `M[l, k] = ∫ φ ṽ_k conj(ṽ_l) w dm`, with `φ = 1` when `factor` is `None`.
    pub fn weighted_gram(
        &self,
        domain: &DomainSpec,
        weight: &Weight,
        factor: Option<&[Vec<C64>]>,
    ) -> CMat {
        let lo = *self.powers.iter().min().unwrap_or(&0);
        let hi = *self.powers.iter().max().unwrap_or(&0);
        let span = (hi - lo) as usize;
        let mom = match factor {
            None => domain.weighted_moments(weight, span),
            Some(f) => domain.weighted_moments_with(weight, f, span),
        };
        let n = self.len();
        let ln_r: Vec<f64> = (0..domain.components()).map(|c| domain.radius(c).ln()).collect();
        CMat::from_fn(n, n, |l, k| {
            let (pk, pl) = (self.powers[k], self.powers[l]);
            let idx = (pk - pl + span as i64) as usize;
            let mut acc = ZERO;
            for (c, m) in mom.iter().enumerate() {
                let e = (pk + pl) as f64 * ln_r[c] - self.ln_scale[k] - self.ln_scale[l];
                acc += m[idx] * e.exp();
            }
            acc
        })
    }
}

/// A linear functional on analytic functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Functional {
    /// `f ↦ f^{(order)}(z)`.
    Eval { z: C64, order: u32 },
    /// `f ↦ v·F₁(f) − u·F₂(f)` with `F_i` point evaluations of derivatives.
    Combination {
        first: (C64, u32),
        second: (C64, u32),
        u: C64,
        v: C64,
    },
}

impl Functional {
    /// `f ↦ f(a) − t f(b)`.
    pub fn difference(a: C64, b: C64, t: C64) -> Self {
        Functional::Combination {
            first: (a, 0),
            second: (b, 0),
            u: t,
            v: ONE,
        }
    }

    /// Stage functional of a chain constraint at parameter `t`; vanishes
    /// exactly on the functions satisfying the constraint.
    pub fn stage(c: &Constraint, t: &Projective) -> Self {
        let [first, second] = c.functionals();
        Functional::Combination {
            first,
            second,
            u: t.u(),
            v: t.v(),
        }
    }

    /// Values on the basis elements: `ℓ_k = L(ṽ_k)`.
    pub fn row(&self, basis: &MonomialBasis) -> CVec {
        match *self {
            Functional::Eval { z, order } => basis.eval(z, order),
            Functional::Combination {
                first,
                second,
                u,
                v,
            } => basis.eval(first.0, first.1) * v - basis.eval(second.0, second.1) * u,
        }
    }

    pub fn points(&self) -> Vec<C64> {
        match *self {
            Functional::Eval { z, .. } => vec![z],
            Functional::Combination { first, second, .. } => vec![first.0, second.0],
        }
    }

    pub fn apply(&self, f: &Laurent, domain: &DomainSpec) -> Result<C64> {
        match *self {
            Functional::Eval { z, order } => evaluate_analytic(f, z, order, domain),
            Functional::Combination {
                first,
                second,
                u,
                v,
            } => Ok(v * evaluate_analytic(f, first.0, first.1, domain)?
                - u * evaluate_analytic(f, second.0, second.1, domain)?),
        }
    }
}

/// Element of the current space reproducing a functional.
#[derive(Clone, Debug)]
pub struct Representer {
    functional: Functional,
    coef: CVec,
    norm_sq: f64,
    base_norm_sq: f64,
}

impl Representer {
    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    /// Coefficients over the scaled monomial basis.
    pub fn coefficients(&self) -> &CVec {
        &self.coef
    }

    /// `‖w‖²` in the current metric.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
}

/// Kernel data of a (possibly downdated) truncated space.
#[derive(Clone, Debug)]
pub struct KernelRep {
    domain: DomainSpec,
    weight: Weight,
    basis: MonomialBasis,
    gram: CMat,
    gram_inv: CMat,
    p: CMat,
    applied: Vec<Representer>,
}

/// Unconstrained kernel of `H²` with inner product `∫ f ḡ w dm`.
pub fn szego_kernel(domain: &DomainSpec, weight: &WeightSpec) -> Result<KernelRep> {
    let weight = weight.resolve(domain)?;
    let basis = MonomialBasis::new(domain, &weight);
    let g = basis.weighted_gram(domain, &weight, None);
    let gram = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    linalg::check_conditioning(&gram)?;
    let gram_inv = linalg::hermitian_inverse(&gram)?;
    Ok(KernelRep {
        domain: domain.clone(),
        weight,
        basis,
        gram,
        p: gram_inv.clone(),
        gram_inv,
        applied: Vec::new(),
    })
}

impl KernelRep {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    /// Gram matrix of the scaled monomials.
    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// Kernel matrix `P`.
    pub fn matrix(&self) -> &CMat {
        &self.p
    }

    pub fn applied(&self) -> &[Representer] {
        &self.applied
    }

    /// `dim − #downdates`.
    pub fn rank(&self) -> usize {
        self.basis.len() - self.applied.len()
    }

    pub fn eval(&self, z: C64, w: C64) -> C64 {
        let vz = self.basis.eval(z, 0);
        let vw = self.basis.eval(w, 0).map(|c| c.conj());
        (vz.transpose() * &self.p * vw)[(0, 0)]
    }

    /// Coefficients of `K(·, w)`.
    pub fn column(&self, w: C64) -> CVec {
        &self.p * self.basis.eval(w, 0).map(|c| c.conj())
    }

    /// `⟨f, g⟩_w` for coefficient vectors.
    pub fn inner(&self, f: &CVec, g: &CVec) -> C64 {
        (g.adjoint() * &self.gram * f)[(0, 0)]
    }
}

pub fn functional_representer(kernel: &KernelRep, functional: Functional) -> Result<Representer> {
    for z in functional.points() {
        if !kernel.domain.is_interior(z) {
            return Err(Error::Evaluation { re: z.re, im: z.im });
        }
    }
    let row = functional.row(&kernel.basis);
    let conj_row = row.map(|c| c.conj());
    let coef = &kernel.p * &conj_row;
    let norm_sq = (row.transpose() * &coef)[(0, 0)].re;
    let base_norm_sq = (row.transpose() * &kernel.gram_inv * &conj_row)[(0, 0)].re;
    Ok(Representer {
        functional,
        coef,
        norm_sq,
        base_norm_sq,
    })
}

/// Kernel of the orthogonal complement of `w` in the current space.
pub fn downdate(kernel: &KernelRep, w: &Representer) -> Result<KernelRep> {
    if !(w.norm_sq > DEGENERATE_REL * w.base_norm_sq) || !(w.norm_sq > 0.0) {
        return Err(Error::DegenerateConstraint {
            stage: kernel.applied.len(),
            norm: w.norm_sq.max(0.0).sqrt(),
        });
    }
    let r = &w.coef;
    let mut p = &kernel.p - r * r.adjoint() * C64::new(1.0 / w.norm_sq, 0.0);
    p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
    let mut applied = kernel.applied.clone();
    applied.push(w.clone());
    Ok(KernelRep {
        p,
        applied,
        ..kernel.clone()
    })
}

/// Truncated `H²_{w,D}` with both kernel routes available.
#[derive(Clone, Debug)]
pub struct ConstrainedSpace {
    kernel: KernelRep,
    chain: GamelinChain,
    delta: DeltaPoint,
    onb: CMat,
}

/// Builds the constrained space for `chain` at `d`.
pub fn build_constrained_space(
    domain: &DomainSpec,
    weight: &WeightSpec,
    chain: &GamelinChain,
    d: &DeltaPoint,
) -> Result<ConstrainedSpace> {
    let kernel = szego_kernel(domain, weight)?;
    ConstrainedSpace::from_kernel(&kernel, chain, d, None)
}

impl ConstrainedSpace {
    /// Constrain an unconstrained kernel. With `nested = Some(m)`, constraint
    /// pivots are confined to degree `m`, so the first `leading_len(m) − d`
    /// basis columns span the degree-`m` truncation of the same space.
    pub fn from_kernel(
        base: &KernelRep,
        chain: &GamelinChain,
        d: &DeltaPoint,
        nested: Option<usize>,
    ) -> Result<Self> {
        if d.len() != chain.len() {
            return Err(Error::Shape(format!(
                "Δ point has {} coordinates, chain has {} constraints",
                d.len(),
                chain.len()
            )));
        }
        if !base.applied.is_empty() {
            return Err(Error::Precondition("kernel is already constrained".into()));
        }
        let mut kernel = base.clone();
        let mut rows = CMat::zeros(chain.len(), base.basis.len());
        for (i, (c, t)) in chain.constraints().iter().zip(d.coords()).enumerate() {
            let f = Functional::stage(c, t);
            rows.set_row(i, &f.row(&base.basis).transpose());
            let w = functional_representer(&kernel, f)?;
            kernel = downdate(&kernel, &w).map_err(|e| match e {
                Error::DegenerateConstraint { norm, .. } => {
                    Error::DegenerateConstraint { stage: i, norm }
                }
                other => other,
            })?;
        }
        let inner = nested.map_or(base.basis.len(), |m| base.basis.leading_len(m));
        let b = linalg::nested_null_space(&rows, inner)?;
        let onb = linalg::orthonormalize(&b, &base.gram)?;
        Ok(ConstrainedSpace {
            kernel,
            chain: chain.clone(),
            delta: d.clone(),
            onb,
        })
    }

    pub fn kernel(&self) -> &KernelRep {
        &self.kernel
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.kernel.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.kernel.weight
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.kernel.basis
    }

    pub fn chain(&self) -> &GamelinChain {
        &self.chain
    }

    pub fn delta(&self) -> &DeltaPoint {
        &self.delta
    }

    /// Orthonormal basis, one column per element, over the scaled monomials.
    pub fn onb(&self) -> &CMat {
        &self.onb
    }

    pub fn dim(&self) -> usize {
        self.onb.ncols()
    }

    /// `K(z, w)` from the downdated kernel matrix.
    pub fn kernel_eval(&self, z: C64, w: C64) -> C64 {
        self.kernel.eval(z, w)
    }

    /// `Σ_j e_j(z) conj(e_j(w))` from the orthonormal basis.
    pub fn kernel_eval_onb(&self, z: C64, w: C64) -> C64 {
        let ez = self.onb.transpose() * self.basis().eval(z, 0);
        let ew = self.onb.transpose() * self.basis().eval(w, 0);
        ez.dot(&ew.map(|c| c.conj()))
    }

    pub fn column_laurent(&self, j: usize) -> Laurent {
        self.basis().to_laurent(self.onb.column(j).as_slice())
    }

    pub fn eval_column(&self, j: usize, z: C64) -> C64 {
        (self.basis().eval(z, 0).transpose() * self.onb.column(j))[(0, 0)]
    }

    /// Weighted inner product of coefficient vectors.
    pub fn inner(&self, f: &CVec, g: &CVec) -> C64 {
        self.kernel.inner(f, g)
    }
}

/// `K(x0, x0) = ‖k_{x0}‖²`.
pub fn kernel_norm_at_basepoint(space: &ConstrainedSpace) -> f64 {
    let x0 = space.domain().x0();
    space.kernel_eval(x0, x0).re
}

/// Finite Blaschke product on the disk with prescribed zero orders.
#[derive(Clone, Debug, PartialEq)]
pub struct Blaschke {
    zeros: Vec<(C64, u32)>,
}

impl Blaschke {
    pub fn zeros(&self) -> &[(C64, u32)] {
        &self.zeros
    }

    pub fn degree(&self) -> u32 {
        self.zeros.iter().map(|z| z.1).sum()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .map(|&(a, m)| ((z - a) / (ONE - a.conj() * z)).powu(m))
            .product()
    }

    /// Taylor series, truncated where the geometric tail drops below `1e-16`.
    pub fn to_laurent(&self) -> Result<Laurent> {
        let rmax = self.zeros.iter().map(|z| z.0.norm()).fold(0.0, f64::max);
        let deg = self.degree() as usize;
        let extra = if rmax == 0.0 {
            4
        } else {
            (-37.0 / rmax.ln()).ceil() as usize + 8 * self.zeros.len()
        };
        let n = (deg + extra).max(16);
        let mut num = Laurent::constant(ONE);
        let mut den = Laurent::constant(ONE);
        for &(a, m) in &self.zeros {
            for _ in 0..m {
                num = num.mul(&Laurent::power_series(vec![-a, ONE]));
                den = den.mul(&Laurent::power_series(vec![ONE, -a.conj()]));
            }
        }
        let inv = den.reciprocal_power_series(n)?;
        Ok(num.mul(&inv).truncate(0, n as i64))
    }
}

/// Blaschke product `Φ` with `Φ(Γ) = 0`: simple zeros at 2-point points and a
/// zero of order `n + 1` at each `Derivation(c, n)` point (orders at a shared
/// point are maxed).
pub fn blaschke_with_gamma_zeros(chain: &GamelinChain, domain: &DomainSpec) -> Result<Blaschke> {
    if !domain.is_disk() {
        return Err(Error::UnsupportedDomain(
            "Blaschke products are only built on the disk".into(),
        ));
    }
    let mut zeros: Vec<(C64, u32)> = Vec::new();
    let mut need = |z: C64, m: u32| -> Result<()> {
        if !domain.is_interior(z) {
            return Err(Error::Evaluation { re: z.re, im: z.im });
        }
        match zeros.iter_mut().find(|(a, _)| (*a - z).norm() < 1e-14) {
            Some(e) => e.1 = e.1.max(m),
            None => zeros.push((z, m)),
        }
        Ok(())
    };
    for c in chain.constraints() {
        match *c {
            Constraint::TwoPoint { a, b } => {
                need(a, 1)?;
                need(b, 1)?;
            }
            Constraint::Derivation { c, order } => need(c, order + 1)?,
        }
    }
    Ok(Blaschke { zeros })
}

/// Coefficient vector of a Laurent series in a space's basis.
pub fn coefficients_of(space: &ConstrainedSpace, f: &Laurent) -> CVec {
    space.basis().from_laurent(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{constraint_residual, delta_gamma};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn disk(m: usize) -> DomainSpec {
        DomainSpec::disk(m).unwrap()
    }

    fn grid() -> Vec<C64> {
        let mut g = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                g.push(c(-0.5 + 0.25 * i as f64, -0.5 + 0.25 * j as f64));
            }
        }
        g
    }

    /// Closed-form Neil kernel `(α+βz)conj(α+βw) + z²w̄²/(1−zw̄)`.
    fn neil_kernel(alpha: C64, beta: C64, z: C64, w: C64) -> C64 {
        (alpha + beta * z) * (alpha + beta * w).conj()
            + z * z * (w * w).conj() / (ONE - z * w.conj())
    }

    #[test]
    fn disk_kernel_is_geometric() {
        let k = szego_kernel(&disk(64), &WeightSpec::Unit).unwrap();
        assert!((k.eval(c(0.3, 0.0), c(0.2, 0.0)) - c(1.0 / 0.94, 0.0)).norm() < 1e-12);
        assert!((k.eval(ZERO, ZERO) - ONE).norm() < 1e-14);
        assert!((k.gram() - CMat::identity(65, 65)).norm() < 1e-12);
    }

    #[test]
    fn annulus_kernel_stable_in_truncation() {
        let x0 = c(0.5f64.sqrt(), 0.0);
        let a = szego_kernel(&DomainSpec::annulus(0.5, x0, 40).unwrap(), &WeightSpec::ZPower(vec![0.0]))
            .unwrap()
            .eval(x0, x0);
        let b = szego_kernel(&DomainSpec::annulus(0.5, x0, 48).unwrap(), &WeightSpec::ZPower(vec![0.0]))
            .unwrap()
            .eval(x0, x0);
        assert!(a.re > 0.0 && a.re.is_finite());
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn representers_reproduce_functionals() {
        let k = szego_kernel(&disk(32), &WeightSpec::Unit).unwrap();
        let d1 = functional_representer(&k, Functional::Eval { z: ZERO, order: 1 }).unwrap();
        let lz = k.basis().to_laurent(d1.coefficients().as_slice());
        assert!((lz.coeff(1) - ONE).norm() < 1e-13);
        assert!(lz.coeffs().iter().enumerate().all(|(i, v)| i == 1 || v.norm() < 1e-13));

        let p = functional_representer(&k, Functional::Eval { z: c(0.4, 0.0), order: 0 }).unwrap();
        let lp = k.basis().to_laurent(p.coefficients().as_slice());
        for j in 0..10 {
            assert!((lp.coeff(j) - c(0.4f64.powi(j as i32), 0.0)).norm() < 1e-13);
        }

        let f = Functional::difference(c(0.2, 0.0), c(-0.2, 0.0), c(2.0, 0.0));
        let w = functional_representer(&k, f).unwrap();
        let one = k.basis().from_laurent(&Laurent::constant(ONE));
        let z = k.basis().from_laurent(&Laurent::monomial(1, ONE));
        assert!((k.inner(&one, w.coefficients()) - c(-1.0, 0.0)).norm() < 1e-13);
        assert!((k.inner(&z, w.coefficients()) - c(0.6, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn downdates_match_closed_forms() {
        let k = szego_kernel(&disk(64), &WeightSpec::Unit).unwrap();
        let w0 = functional_representer(&k, Functional::Eval { z: ZERO, order: 0 }).unwrap();
        let k0 = downdate(&k, &w0).unwrap();
        assert!(k0.eval(ZERO, ZERO).norm() < 1e-14);
        let (z, w) = (c(0.3, 0.2), c(-0.1, 0.4));
        let zw = z * w.conj();
        assert!((k0.eval(z, w) - zw / (ONE - zw)).norm() < 1e-12);
        assert_eq!(k0.rank(), k.rank() - 1);

        let w1 = functional_representer(&k, Functional::Eval { z: ZERO, order: 1 }).unwrap();
        let k1 = downdate(&k, &w1).unwrap();
        for &z in &grid() {
            for &w in &grid() {
                let want = neil_kernel(ONE, ZERO, z, w);
                assert!((k1.eval(z, w) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_downdate_rejected() {
        let k = szego_kernel(&disk(16), &WeightSpec::Unit).unwrap();
        let w = functional_representer(&k, Functional::Eval { z: c(0.2, 0.0), order: 0 }).unwrap();
        let k1 = downdate(&k, &w).unwrap();
        let w2 = functional_representer(&k1, Functional::Eval { z: c(0.2, 0.0), order: 0 }).unwrap();
        assert!(matches!(downdate(&k1, &w2), Err(Error::DegenerateConstraint { stage: 1, .. })));
    }

    #[test]
    fn neil_space_at_infinity() {
        let ch = GamelinChain::neil();
        let s = build_constrained_space(&disk(48), &WeightSpec::Unit, &ch, &delta_gamma(&ch)).unwrap();
        for &z in &grid() {
            let w = c(0.1, -0.3);
            assert!((s.kernel_eval(z, w) - neil_kernel(ONE, ZERO, z, w)).norm() < 1e-10);
        }
        assert!((kernel_norm_at_basepoint(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_symmetry() {
        let (a, b) = (c(0.5, 0.0), c(-0.5, 0.0));
        let ch = GamelinChain::new(vec![Constraint::two_point(a, b).unwrap()]);
        let s = build_constrained_space(&disk(48), &WeightSpec::Unit, &ch, &delta_gamma(&ch)).unwrap();
        for &w in &grid() {
            assert!((s.kernel_eval(a, w) - s.kernel_eval(b, w)).norm() < 1e-10);
        }
        // constants survive
        let one = s.basis().from_laurent(&Laurent::constant(ONE));
        let col = s.kernel().column(ZERO);
        assert!((s.inner(&one, &col) - ONE).norm() < 1e-10);

        let s2 = build_constrained_space(&disk(56), &WeightSpec::Unit, &ch, &delta_gamma(&ch)).unwrap();
        let (n1, n2) = (kernel_norm_at_basepoint(&s), kernel_norm_at_basepoint(&s2));
        assert!((n1 - n2).abs() < 1e-8);
        // direct oracle: P_0 minus the single representer |k_a − k_b|² term
        let ka = |z: C64| ONE / (ONE - z * a.conj());
        let kb = |z: C64| ONE / (ONE - z * b.conj());
        let norm = 1.0 / (1.0 - 0.25) * 2.0 - 2.0 / (1.0 + 0.25);
        let direct = 1.0 - (ka(ZERO) - kb(ZERO)).norm_sqr() / norm;
        assert!((n1 - direct).abs() < 1e-12);
    }

    #[test]
    fn double_derivation_columns_satisfy_constraints() {
        let ch = GamelinChain::new(vec![
            Constraint::derivation(ZERO, 1).unwrap(),
            Constraint::derivation(ZERO, 3).unwrap(),
        ]);
        let d = disk(32);
        let s = build_constrained_space(&d, &WeightSpec::Unit, &ch, &delta_gamma(&ch)).unwrap();
        for j in 0..s.dim() {
            let f = s.column_laurent(j);
            assert!(constraint_residual(&f, &ch, &delta_gamma(&ch), &d).unwrap() < 1e-8);
        }
    }

    #[test]
    fn blaschke_examples() {
        let d = disk(16);
        let ch = GamelinChain::new(vec![Constraint::two_point(c(0.2, 0.0), c(-0.2, 0.0)).unwrap()]);
        let b = blaschke_with_gamma_zeros(&ch, &d).unwrap();
        assert!(b.eval(c(0.2, 0.0)).norm() < 1e-15 && b.eval(c(-0.2, 0.0)).norm() < 1e-15);
        for j in 0..d.nodes() {
            assert!((b.eval(d.node_point(0, j)).norm() - 1.0).abs() < 1e-12);
        }
        let s = b.to_laurent().unwrap();
        for j in 0..d.nodes() {
            assert!((s.eval(d.node_point(0, j)).unwrap().norm() - 1.0).abs() < 1e-10);
        }

        let n = blaschke_with_gamma_zeros(&GamelinChain::neil(), &d).unwrap();
        let s = n.to_laurent().unwrap();
        assert!((s.coeff(2) - ONE).norm() < 1e-15 && s.l2_norm() - 1.0 < 1e-15);

        let ch = GamelinChain::new(vec![Constraint::derivation(c(0.3, 0.0), 1).unwrap()]);
        let s = blaschke_with_gamma_zeros(&ch, &d).unwrap().to_laurent().unwrap();
        let g = crate::chain::gamma_eval(&s, &ch, &d).unwrap();
        assert!(g.entries.iter().all(|v| v.norm() < 1e-12));

        let ann = DomainSpec::annulus(0.5, c(0.7, 0.0), 8).unwrap();
        assert!(matches!(
            blaschke_with_gamma_zeros(&ch, &ann),
            Err(Error::UnsupportedDomain(_))
        ));
    }
}
