//! Truncated Toeplitz operators on constrained spaces and the Widom scan.
//!
//! A Toeplitz matrix is always built on a padded space: the constrained space
//! of degree `2M` whose first columns span the degree-`M` truncation. The
//! compression `T_φ` of degree-`M` functions is then represented by the
//! rectangular matrix `E_{2M}^H M_φ E_M`, whose singular values bound the
//! operator's action from below without the finite-section artefacts of a
//! square `M × M` block.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryFunction, DomainSpec, WeightSpec};
use crate::chain::{constraint_residual, constraint_rows, delta_gamma, DeltaPoint, GamelinChain, Projective};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::rkhs::{szego_kernel, ConstrainedSpace, KernelRep};
use crate::series::Laurent;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Constrained space of degree `2M` nested over its degree-`M` truncation.
#[derive(Clone, Debug)]
pub struct PaddedSpace {
    space: ConstrainedSpace,
    inner_degree: usize,
    inner_dim: usize,
}

impl PaddedSpace {
    /// `domain` carries the inner truncation `M`.
    pub fn new(
        domain: &DomainSpec,
        weight: &WeightSpec,
        chain: &GamelinChain,
        d: &DeltaPoint,
    ) -> Result<Self> {
        let outer = domain.with_truncation(2 * domain.truncation())?;
        let kernel = szego_kernel(&outer, weight)?;
        Self::from_kernel(&kernel, chain, d, domain.truncation())
    }

    /// Reuse an unconstrained degree-`2M` kernel.
    pub fn from_kernel(
        kernel: &KernelRep,
        chain: &GamelinChain,
        d: &DeltaPoint,
        inner_degree: usize,
    ) -> Result<Self> {
        let space = ConstrainedSpace::from_kernel(kernel, chain, d, Some(inner_degree))?;
        let inner_dim = kernel.basis().leading_len(inner_degree) - chain.len();
        Ok(PaddedSpace {
            space,
            inner_degree,
            inner_dim,
        })
    }

    pub fn space(&self) -> &ConstrainedSpace {
        &self.space
    }

    pub fn inner_degree(&self) -> usize {
        self.inner_degree
    }

    /// Dimension of the degree-`M` truncation.
    pub fn inner_dim(&self) -> usize {
        self.inner_dim
    }

    pub fn outer_dim(&self) -> usize {
        self.space.dim()
    }
}

/// `T[i, j] = ⟨φ e_j, e_i⟩_w` over the padded basis.
#[derive(Clone, Debug)]
pub struct ToeplitzMatrix {
    full: CMat,
    inner_dim: usize,
}

pub fn toeplitz_matrix(phi: &BoundaryFunction, space: &PaddedSpace) -> Result<ToeplitzMatrix> {
    let s = &space.space;
    let domain = s.domain();
    let samples = phi.samples_on(domain)?;
    if samples.iter().flatten().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Precondition("symbol is not bounded on the grid".into()));
    }
    let m = s.basis().weighted_gram(domain, s.weight(), Some(&samples));
    let e = s.onb();
    Ok(ToeplitzMatrix {
        full: e.adjoint() * m * e,
        inner_dim: space.inner_dim,
    })
}

impl ToeplitzMatrix {
    /// Square `M`-block `E_M^H M_φ E_M`.
    pub fn block(&self) -> CMat {
        self.full.view((0, 0), (self.inner_dim, self.inner_dim)).into_owned()
    }

    /// `E_{2M}^H M_φ E_M`: the compression applied to degree-`M` inputs.
    pub fn padded(&self) -> CMat {
        self.full.columns(0, self.inner_dim).into_owned()
    }

    /// `E_M^H M_φ E_{2M}`: degree-`M` outputs of padded inputs.
    pub fn wide(&self) -> CMat {
        self.full.rows(0, self.inner_dim).into_owned()
    }

    /// Compression to the full padded space.
    pub fn full(&self) -> &CMat {
        &self.full
    }

    pub fn inner_dim(&self) -> usize {
        self.inner_dim
    }
}

/// Smallest singular value of the padded compression.
pub fn min_singular_value(t: &ToeplitzMatrix) -> f64 {
    linalg::singular_extremes(&t.padded()).0
}

/// Largest singular value of the padded compression.
pub fn operator_norm(t: &ToeplitzMatrix) -> f64 {
    linalg::singular_extremes(&t.padded()).1
}

/// Result of the Lawson iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    /// Best sup-norm error found on the grid.
    pub value: f64,
    /// Lawson lower bound for the discrete minimax value.
    pub lower_bound: f64,
    pub iterations: usize,
    pub stalled: bool,
}

pub const LAWSON_TOL: f64 = 1e-6;
pub const LAWSON_MAX_ITER: usize = 500;

/// `min_ψ max_nodes |φ − ψ|` over degree-`M` elements of `A`, by Lawson's
/// reweighted least squares.
pub fn distance_to_algebra(
    phi: &BoundaryFunction,
    chain: &GamelinChain,
    domain: &DomainSpec,
    degree: usize,
) -> Result<DistanceEstimate> {
    let dm = domain.with_truncation(degree)?;
    let powers = dm.analytic_powers(degree);
    // sup-normalized monomials
    let scale: Vec<f64> = powers
        .iter()
        .map(|&k| (0..dm.components()).map(|c| dm.radius(c).powi(k as i32)).fold(0.0, f64::max))
        .collect();
    let dg = delta_gamma(chain);
    let rows = constraint_rows(chain, &dg, &powers, |j| scale[j])?;
    let b = linalg::null_space(&rows)?;
    let nodes: Vec<C64> = (0..dm.components())
        .flat_map(|c| (0..dm.nodes()).map(move |j| (c, j)))
        .map(|(c, j)| dm.node_point(c, j))
        .collect();
    let mono = CMat::from_fn(nodes.len(), powers.len(), |i, j| {
        nodes[i].powi(powers[j] as i32) / scale[j]
    });
    let a = mono * b;
    let q = a.qr().q();
    let target: Vec<C64> = phi.samples_on(&dm)?.into_iter().flatten().collect();
    let f = CVec::from_vec(target);
    let n = nodes.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut best = f64::INFINITY;
    let mut lower: f64 = 0.0;
    for it in 1..=LAWSON_MAX_ITER {
        let mut qw = q.clone();
        for (i, wi) in w.iter().enumerate() {
            qw.row_mut(i).scale_mut(*wi);
        }
        let h = q.adjoint() * &qw;
        let rhs = qw.adjoint() * &f;
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let l = match linalg::cholesky_lower(&h) {
            Ok(l) => l,
            Err(_) => {
                let eps = 1e-14 * h.diagonal().iter().map(|v| v.re).fold(0.0, f64::max);
                linalg::cholesky_lower(&(&h + CMat::identity(h.nrows(), h.ncols()) * C64::new(eps, 0.0)))?
            }
        };
        let y = l.adjoint().solve_upper_triangular(&linalg::solve_lower(&l, &CMat::from_column_slice(rhs.len(), 1, rhs.as_slice()))).expect("triangular solve");
        let e = &f - &q * y;
        let abs: Vec<f64> = e.iter().map(|v| v.norm()).collect();
        let sup = abs.iter().copied().fold(0.0, f64::max);
        let lb = w.iter().zip(&abs).map(|(wi, a)| wi * a * a).sum::<f64>().sqrt();
        best = best.min(sup);
        lower = lower.max(lb);
        if best <= 1e-13 || best - lower <= LAWSON_TOL * best {
            return Ok(DistanceEstimate {
                value: best,
                lower_bound: lower.min(best),
                iterations: it,
                stalled: false,
            });
        }
        let mut total = 0.0;
        for (wi, a) in w.iter_mut().zip(&abs) {
            *wi *= a;
            total += *wi;
        }
        for wi in &mut w {
            *wi = (*wi / total).max(1e-300);
        }
    }
    Ok(DistanceEstimate {
        value: best,
        lower_bound: lower.min(best),
        iterations: LAWSON_MAX_ITER,
        stalled: true,
    })
}

/// Grid sizes and decision band for [`widom_scan`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanGrid {
    /// Points per Σ dimension, uniform in `[0, 1)`.
    pub sigma_points: usize,
    /// Points per Riemann sphere for each Δ coordinate.
    pub sphere_points: usize,
    /// Indeterminate band `δ`.
    pub delta: f64,
    /// Degree of the approximating elements of `A` (defaults to `M`).
    pub distance_degree: Option<usize>,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            sigma_points: 16,
            sphere_points: 12,
            delta: 0.05,
            distance_degree: None,
        }
    }
}

/// `n` points of `ℂ ∪ {∞}`: both poles plus latitude rings at polar angles
/// `πi/(rings+1)`, mapped stereographically (`t = tan(θ/2) e^{iφ}`).
pub fn sphere_net(n: usize) -> Vec<Projective> {
    let mut pts = vec![Projective::finite(ZERO), Projective::infinity()];
    pts.truncate(n);
    let rest = n.saturating_sub(2);
    if rest == 0 {
        return pts;
    }
    let rings = if rest >= 4 { 2 } else { 1 };
    for ring in 0..rings {
        let count = rest / rings + usize::from(ring < rest % rings);
        let theta = PI * (ring + 1) as f64 / (rings + 1) as f64;
        let r = (theta / 2.0).tan();
        let offset = if ring % 2 == 1 { PI / count as f64 } else { 0.0 };
        for j in 0..count {
            let phi = 2.0 * PI * j as f64 / count as f64 + offset;
            pts.push(Projective::finite(C64::from_polar(r, phi)));
        }
    }
    pts
}

/// Uniform Σ grid: all `α ∈ {0, 1/n, …}^σ`.
pub fn sigma_grid(sigma: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..sigma {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i as f64 / n as f64);
                    q
                })
            })
            .collect();
    }
    out
}

/// All points of the product net over `d` coordinates.
pub fn delta_grid(d: usize, per_sphere: usize) -> Vec<DeltaPoint> {
    let net = sphere_net(per_sphere);
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Projective>| {
                net.iter().map(move |t| {
                    let mut q = p.clone();
                    q.push(*t);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(DeltaPoint::new).collect()
}

fn weight_for(alpha: &[f64], domain: &DomainSpec) -> WeightSpec {
    if domain.sigma() == 0 {
        WeightSpec::Unit
    } else {
        WeightSpec::ZPower(alpha.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: Vec<f64>,
    pub delta: DeltaPoint,
    pub sigma_min: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentInvertible,
    ConsistentNoninvertible,
    /// `sigma_margin = min σ_min − δ`, `distance_margin = (1 − δ) − d`.
    Indeterminate { sigma_margin: f64, distance_margin: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidomScan {
    pub grid: ScanGrid,
    pub degree: usize,
    pub points: Vec<ScanPoint>,
    pub min_sigma: f64,
    pub max_norm: f64,
    pub distance: DistanceEstimate,
    pub verdict: Verdict,
}

/// Verdict from the scan minimum and the distance estimate.
pub fn decide(min_sigma: f64, distance: f64, delta: f64) -> Verdict {
    if min_sigma > delta && distance < 1.0 - delta {
        Verdict::ConsistentInvertible
    } else if min_sigma < delta && distance >= 1.0 - delta {
        Verdict::ConsistentNoninvertible
    } else {
        Verdict::Indeterminate {
            sigma_margin: min_sigma - delta,
            distance_margin: (1.0 - delta) - distance,
        }
    }
}

/// Scans `σ_min(T^{α,D}_φ)` over `Σ × Δ` and compares with `dist(φ, A)`.
/// `domain` carries the inner truncation `M`.
pub fn widom_scan(
    phi: &BoundaryFunction,
    chain: &GamelinChain,
    domain: &DomainSpec,
    grid: &ScanGrid,
) -> Result<WidomScan> {
    let outer = domain.with_truncation(2 * domain.truncation())?;
    let dev = phi
        .samples_on(&outer)?
        .iter()
        .flatten()
        .map(|v| (v.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    if !(dev < 1e-8) {
        return Err(Error::Precondition(format!(
            "symbol is not unimodular (max ||φ| − 1| = {dev:e})"
        )));
    }
    let alphas = sigma_grid(domain.sigma(), grid.sigma_points.max(1));
    let deltas = delta_grid(chain.len(), grid.sphere_points.max(1));
    let mut points = Vec::with_capacity(alphas.len() * deltas.len());
    for alpha in &alphas {
        let kernel = szego_kernel(&outer, &weight_for(alpha, domain))?;
        let row: Vec<Result<ScanPoint>> = deltas
            .par_iter()
            .map(|d| {
                let ps = PaddedSpace::from_kernel(&kernel, chain, d, domain.truncation())?;
                let t = toeplitz_matrix(phi, &ps)?;
                let (lo, hi) = linalg::singular_extremes(&t.padded());
                Ok(ScanPoint {
                    alpha: alpha.clone(),
                    delta: d.clone(),
                    sigma_min: lo,
                    norm: hi,
                })
            })
            .collect();
        for p in row {
            points.push(p?);
        }
    }
    let distance = distance_to_algebra(
        phi,
        chain,
        domain,
        grid.distance_degree.unwrap_or(domain.truncation()),
    )?;
    let min_sigma = points.iter().map(|p| p.sigma_min).fold(f64::INFINITY, f64::min);
    let max_norm = points.iter().map(|p| p.norm).fold(0.0, f64::max);
    Ok(WidomScan {
        grid: grid.clone(),
        degree: domain.truncation(),
        verdict: decide(min_sigma, distance.value, grid.delta),
        points,
        min_sigma,
        max_norm,
        distance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    /// Smallest `|ψ|` over the sampled closed domain.
    pub min_modulus: f64,
    pub invertible: bool,
    /// Max entrywise `|T_{ψ⁻¹} T_ψ − I|` over the grid (invertible case).
    pub inverse_residual: Option<f64>,
    /// `(M, min σ_min of T_ψ̄)` over the grid (vanishing case).
    pub adjoint_sigma_trace: Vec<(usize, f64)>,
}

/// Dense sample of the closed domain: boundary nodes and interior circles.
fn closed_domain_samples(domain: &DomainSpec) -> Vec<C64> {
    let (lo, hi) = match domain.q() {
        None => (0.0, 1.0),
        Some(q) => (q, 1.0),
    };
    let mut pts = Vec::new();
    for i in 0..=40 {
        let r = lo + (hi - lo) * i as f64 / 40.0;
        for j in 0..256 {
            pts.push(C64::from_polar(r, 2.0 * PI * j as f64 / 256.0));
        }
    }
    pts
}

/// Checks `ψ ∈ A` for invertibility through its Toeplitz operators.
///
/// Nonvanishing `ψ`: `T_{ψ⁻¹} T_ψ = I` on padded spaces over the grid.
/// Vanishing `ψ`: `T_ψ` is not onto, which shows up as `σ_min(T_ψ̄) → 0`.
pub fn symbol_invertibility_check(
    psi: &Laurent,
    chain: &GamelinChain,
    domain: &DomainSpec,
    grid: &ScanGrid,
) -> Result<InvertibilityReport> {
    let m = domain.truncation();
    if psi.max_pow() > m as i64 || psi.min_pow() < -(m as i64) {
        return Err(Error::Precondition(format!(
            "symbol degree exceeds the truncation {m}"
        )));
    }
    let res = constraint_residual(psi, chain, &delta_gamma(chain), domain)?;
    if !(res < 1e-8) {
        return Err(Error::Precondition(format!(
            "symbol violates the chain at D_Γ (residual {res:e})"
        )));
    }
    let min_modulus = closed_domain_samples(domain)
        .into_iter()
        .map(|z| psi.eval(z).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let alphas = sigma_grid(domain.sigma(), grid.sigma_points.clamp(1, 4));
    let deltas = delta_grid(chain.len(), grid.sphere_points.max(1));
    if min_modulus > 1e-8 {
        let outer = domain.with_truncation(2 * m)?;
        let sym = BoundaryFunction::from_laurent(psi, &outer);
        let inv = sym.map_nodes(&outer, |v| Ok(ONE / v))?;
        let band = inv.band() as i64;
        let edge = (0..inv.components())
            .map(|c| inv.coeff(c, band).norm().max(inv.coeff(c, -band).norm()))
            .fold(0.0, f64::max);
        let head = inv.sup_norm(&outer)?;
        if !(edge <= 1e-8 * head) {
            return Err(Error::Truncation(format!(
                "inverse symbol not resolved on the grid (edge/sup = {:e})",
                edge / head
            )));
        }
        let mut worst: f64 = 0.0;
        for alpha in &alphas {
            let kernel = szego_kernel(&outer, &weight_for(alpha, domain))?;
            let errs: Vec<Result<f64>> = deltas
                .par_iter()
                .map(|d| {
                    let ps = PaddedSpace::from_kernel(&kernel, chain, d, m)?;
                    let t = toeplitz_matrix(&sym, &ps)?;
                    let ti = toeplitz_matrix(&inv, &ps)?;
                    let prod = ti.wide() * t.padded();
                    let id = CMat::identity(prod.nrows(), prod.ncols());
                    Ok((prod - id).iter().map(|v| v.norm()).fold(0.0, f64::max))
                })
                .collect();
            for e in errs {
                worst = worst.max(e?);
            }
        }
        Ok(InvertibilityReport {
            min_modulus,
            invertible: true,
            inverse_residual: Some(worst),
            adjoint_sigma_trace: Vec::new(),
        })
    } else {
        let mut trace = Vec::new();
        for level in [m, 2 * m] {
            let dl = domain.with_truncation(level)?;
            let outer = dl.with_truncation(2 * level)?;
            let sym = BoundaryFunction::from_laurent(psi, &outer).conj();
            let mut lo = f64::INFINITY;
            for alpha in &alphas {
                let kernel = szego_kernel(&outer, &weight_for(alpha, domain))?;
                let vals: Vec<Result<f64>> = deltas
                    .par_iter()
                    .map(|d| {
                        let ps = PaddedSpace::from_kernel(&kernel, chain, d, level)?;
                        Ok(min_singular_value(&toeplitz_matrix(&sym, &ps)?))
                    })
                    .collect();
                for v in vals {
                    lo = lo.min(v?);
                }
            }
            trace.push((level, lo));
        }
        Ok(InvertibilityReport {
            min_modulus,
            invertible: false,
            inverse_residual: None,
            adjoint_sigma_trace: trace,
        })
    }
}
