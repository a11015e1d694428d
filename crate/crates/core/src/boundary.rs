//! Boundary data on the disk and the annulus `{q < |z| < 1}`.
//!
//! Every boundary component is a circle sampled on a uniform grid of
//! `nodes` points `θ_j = 2πj/nodes`. Functions are stored as symmetric bands
//! of Fourier coefficients per component. The representing measure `dm` is
//! harmonic measure for the basepoint `x0`; on the annulus it is built from
//! per-mode harmonic solves.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Laurent;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Accepted range for the annulus modulus.
pub const Q_RANGE: (f64, f64) = (0.05, 0.95);

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward transform, returning `c[k] = (1/N) Σ_j x_j e^{-ikθ_j}` for `|k| <= band`.
fn analyze(samples: &[C64], band: usize) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    (-(band as i64)..=band as i64)
        .map(|k| buf[k.rem_euclid(n as i64) as usize] * scale)
        .collect()
}

/// Exact samples of the trigonometric polynomial with coefficients `coeffs`
/// (indices `-band..=band`) at `n` uniform nodes. Coefficients beyond the
/// Nyquist band are folded, which is what sampling does.
fn synthesize(coeffs: &[C64], band: usize, n: usize) -> Vec<C64> {
    let mut buf = vec![ZERO; n];
    for (i, c) in coeffs.iter().enumerate() {
        let k = i as i64 - band as i64;
        buf[k.rem_euclid(n as i64) as usize] += c;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf
}

/// Sums `Σ_j x_j e^{+iℓθ_j}` for `|ℓ| <= max_freq`.
fn trig_moments(samples: &[C64], max_freq: usize) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    (-(max_freq as i64)..=max_freq as i64)
        .map(|l| buf[(-l).rem_euclid(n as i64) as usize])
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    Disk,
    Annulus { q: f64 },
}

#[derive(Debug)]
struct HarmonicMeasure {
    /// Nodal density of `dm` w.r.t. normalized arclength, per component.
    density: Vec<Vec<f64>>,
}

/// Geometry, basepoint, truncation and quadrature of a disk or annulus.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    kind: DomainKind,
    x0: C64,
    truncation: usize,
    nodes: usize,
    min_nodes: usize,
    measure: Arc<HarmonicMeasure>,
}

impl PartialEq for DomainSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.x0 == other.x0
            && self.truncation == other.truncation
            && self.nodes == other.nodes
    }
}

impl DomainSpec {
    /// Unit disk with basepoint 0.
    pub fn disk(truncation: usize) -> Result<Self> {
        Self::build(DomainKind::Disk, C64::new(0.0, 0.0), truncation, 0)
    }

    /// Annulus `q < |z| < 1` with interior basepoint `x0`.
    pub fn annulus(q: f64, x0: C64, truncation: usize) -> Result<Self> {
        Self::build(DomainKind::Annulus { q }, x0, truncation, 0)
    }

    pub fn new(kind: DomainKind, x0: C64, truncation: usize) -> Result<Self> {
        Self::build(kind, x0, truncation, 0)
    }

    /// Same geometry with a different truncation degree.
    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        Self::build(self.kind, self.x0, truncation, self.min_nodes)
    }

    /// Request at least `nodes` quadrature points per circle.
    pub fn with_min_nodes(&self, nodes: usize) -> Result<Self> {
        Self::build(self.kind, self.x0, self.truncation, nodes)
    }

    fn build(kind: DomainKind, x0: C64, truncation: usize, min_nodes: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::InvalidDomain("truncation must be positive".into()));
        }
        if !x0.re.is_finite() || !x0.im.is_finite() {
            return Err(Error::InvalidDomain("basepoint must be finite".into()));
        }
        let mut nodes = (6 * truncation + 1).max(129).max(min_nodes);
        match kind {
            DomainKind::Disk => {
                if x0.norm() != 0.0 {
                    return Err(Error::InvalidDomain("disk basepoint must be 0".into()));
                }
            }
            DomainKind::Annulus { q } => {
                if !(q > 0.0 && q < 1.0) {
                    return Err(Error::InvalidDomain(format!("q outside (0,1): {q}")));
                }
                if q < Q_RANGE.0 || q > Q_RANGE.1 {
                    return Err(Error::InvalidDomain(format!(
                        "q = {q} outside the supported range [{}, {}]",
                        Q_RANGE.0, Q_RANGE.1
                    )));
                }
                let r = x0.norm();
                if !(r > q && r < 1.0) {
                    return Err(Error::InvalidDomain(format!(
                        "basepoint modulus {r} not in ({q}, 1)"
                    )));
                }
                // harmonic-measure modes decay like rate^|k|; resolve them to ~1e-17
                let rate = r.max(q / r);
                let need = 2 * (39.0 / -rate.ln()).ceil() as usize + 1;
                nodes = nodes.max(need);
            }
        }
        if nodes % 2 == 0 {
            nodes += 1;
        }
        let measure = Arc::new(harmonic_measure(kind, x0, nodes));
        Ok(DomainSpec {
            kind,
            x0,
            truncation,
            nodes,
            min_nodes,
            measure,
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn is_disk(&self) -> bool {
        matches!(self.kind, DomainKind::Disk)
    }

    pub fn q(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Disk => None,
            DomainKind::Annulus { q } => Some(q),
        }
    }

    pub fn x0(&self) -> C64 {
        self.x0
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Quadrature nodes per boundary circle (always odd).
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Largest band a nodal sample vector represents without aliasing.
    pub fn full_band(&self) -> usize {
        (self.nodes - 1) / 2
    }

    pub fn components(&self) -> usize {
        match self.kind {
            DomainKind::Disk => 1,
            DomainKind::Annulus { .. } => 2,
        }
    }

    /// Radius of boundary component `comp` (0 = outer circle).
    pub fn radius(&self, comp: usize) -> f64 {
        match (self.kind, comp) {
            (_, 0) => 1.0,
            (DomainKind::Annulus { q }, 1) => q,
            _ => panic!("component {comp} out of range"),
        }
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.nodes as f64
    }

    /// Boundary point for node `j` on component `comp`.
    pub fn node_point(&self, comp: usize, j: usize) -> C64 {
        C64::from_polar(self.radius(comp), self.theta(j))
    }

    pub fn is_interior(&self, z: C64) -> bool {
        let r = z.norm();
        match self.kind {
            DomainKind::Disk => r < 1.0,
            DomainKind::Annulus { q } => r > q && r < 1.0,
        }
    }

    /// Dimension `σ` of the space of differences of representing measures.
    pub fn sigma(&self) -> usize {
        self.components() - 1
    }

    /// The invertible functions `Z_j` (empty for the disk, `[z]` for the annulus).
    pub fn z_functions(&self) -> Vec<Laurent> {
        match self.kind {
            DomainKind::Disk => Vec::new(),
            DomainKind::Annulus { .. } => vec![Laurent::monomial(1, C64::new(1.0, 0.0))],
        }
    }

    /// Weight of Fourier mode `k` of component `comp` in the pairing with `dm`:
    /// `∫ f dm = Σ_comp Σ_k f̂_comp[k] · mode_weight(comp, k)`.
    pub fn mode_weight(&self, comp: usize, k: i64) -> C64 {
        match self.kind {
            DomainKind::Disk => {
                if k == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            }
            DomainKind::Annulus { q } => {
                let (outer, inner) = annulus_mode(q, self.x0, k);
                if comp == 0 {
                    outer
                } else {
                    inner
                }
            }
        }
    }

    /// Nodal density of `dm` with respect to normalized arclength.
    pub fn representing_density(&self) -> &[Vec<f64>] {
        &self.measure.density
    }

    /// `∫ F dm` for `F` given by nodal samples on every component.
    pub fn integrate(&self, samples: &[Vec<C64>]) -> C64 {
        let mut acc = ZERO;
        for (vals, dens) in samples.iter().zip(&self.measure.density) {
            let s: C64 = vals.iter().zip(dens).map(|(v, d)| v * d).sum();
            acc += s;
        }
        acc / self.nodes as f64
    }

    /// `∫ f dν_i` for each `i` (annulus: `ν₁ = (m_out − m_in)/log(1/q)`).
    pub fn nu_pairing(&self, f: &BoundaryFunction) -> Vec<C64> {
        match self.kind {
            DomainKind::Disk => Vec::new(),
            DomainKind::Annulus { q } => {
                vec![(f.coeff(0, 0) - f.coeff(1, 0)) / (1.0 / q).ln()]
            }
        }
    }

    /// Nodal values of the densities `λ_i = dμ_i/dm` spanning `N`.
    ///
    /// Annulus: `λ₁ = d(m_out − m_in)/dm`, i.e. `1/ω` on the outer circle and
    /// `−1/ω` on the inner one, where `ω` is the harmonic-measure density.
    pub fn n_basis_nodal(&self) -> Vec<Vec<Vec<f64>>> {
        match self.kind {
            DomainKind::Disk => Vec::new(),
            DomainKind::Annulus { .. } => {
                let d = &self.measure.density;
                vec![vec![
                    d[0].iter().map(|w| 1.0 / w).collect(),
                    d[1].iter().map(|w| -1.0 / w).collect(),
                ]]
            }
        }
    }

    pub fn n_basis(&self) -> Vec<BoundaryFunction> {
        self.n_basis_nodal()
            .into_iter()
            .map(|vals| {
                let samples: Vec<Vec<C64>> = vals
                    .iter()
                    .map(|c| c.iter().map(|&v| C64::new(v, 0.0)).collect())
                    .collect();
                BoundaryFunction::from_samples(&samples, self.full_band())
                    .expect("nodal n-basis has domain shape")
            })
            .collect()
    }

    /// Powers of the truncated analytic basis in nesting order: `0..=M` on the
    /// disk, `0, 1, -1, 2, -2, …, M, -M` on the annulus.
    pub fn analytic_powers(&self, degree: usize) -> Vec<i64> {
        match self.kind {
            DomainKind::Disk => (0..=degree as i64).collect(),
            DomainKind::Annulus { .. } => {
                let mut p = vec![0];
                for k in 1..=degree as i64 {
                    p.push(k);
                    p.push(-k);
                }
                p
            }
        }
    }

    /// `μ_comp[ℓ] = ∫_comp e^{iℓθ} w dm` for `|ℓ| <= max_freq`, where the
    /// integral over one component uses the nodal density of `dm` there.
    pub fn weighted_moments(&self, weight: &Weight, max_freq: usize) -> Vec<Vec<C64>> {
        self.measure
            .density
            .iter()
            .zip(weight.nodal())
            .map(|(dens, w)| {
                let prod: Vec<C64> = dens
                    .iter()
                    .zip(w)
                    .map(|(d, w)| C64::new(d * w / self.nodes as f64, 0.0))
                    .collect();
                trig_moments(&prod, max_freq)
            })
            .collect()
    }

    /// Same as [`weighted_moments`](Self::weighted_moments) with an extra
    /// complex nodal factor (used for Toeplitz symbols).
    pub fn weighted_moments_with(
        &self,
        weight: &Weight,
        factor: &[Vec<C64>],
        max_freq: usize,
    ) -> Vec<Vec<C64>> {
        self.measure
            .density
            .iter()
            .zip(weight.nodal())
            .zip(factor)
            .map(|((dens, w), f)| {
                let prod: Vec<C64> = dens
                    .iter()
                    .zip(w)
                    .zip(f)
                    .map(|((d, w), f)| f * (d * w / self.nodes as f64))
                    .collect();
                trig_moments(&prod, max_freq)
            })
            .collect()
    }
}

/// Outer and inner pairing weights for mode `k` on the annulus.
fn annulus_mode(q: f64, x0: C64, k: i64) -> (C64, C64) {
    let r0 = x0.norm();
    let (lr, lq) = (r0.ln(), q.ln());
    let phase = C64::from_polar(1.0, k as f64 * x0.arg());
    if k == 0 {
        let b = lr / lq;
        return (C64::new(1.0 - b, 0.0), C64::new(b, 0.0));
    }
    let p = k.unsigned_abs() as f64;
    let denom = 1.0 - (2.0 * p * lq).exp();
    let outer = ((p * lr).exp() - (p * (2.0 * lq - lr)).exp()) / denom;
    let inner = ((p * (lq - lr)).exp() - (p * (lq + lr)).exp()) / denom;
    (phase * outer, phase * inner)
}

fn harmonic_measure(kind: DomainKind, x0: C64, nodes: usize) -> HarmonicMeasure {
    match kind {
        DomainKind::Disk => HarmonicMeasure {
            density: vec![vec![1.0; nodes]],
        },
        DomainKind::Annulus { q } => {
            let band = (nodes - 1) / 2;
            let mut density = Vec::with_capacity(2);
            for comp in 0..2 {
                // ω(θ) = Σ_k H[k] e^{-ikθ}: synthesize with coefficients H[-k]
                let coeffs: Vec<C64> = (-(band as i64)..=band as i64)
                    .map(|k| {
                        let (o, i) = annulus_mode(q, x0, -k);
                        if comp == 0 {
                            o
                        } else {
                            i
                        }
                    })
                    .collect();
                density.push(
                    synthesize(&coeffs, band, nodes)
                        .into_iter()
                        .map(|v| v.re)
                        .collect(),
                );
            }
            HarmonicMeasure { density }
        }
    }
}

/// Truncated Fourier data on each boundary circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    band: usize,
    comps: Vec<Vec<C64>>,
}

impl BoundaryFunction {
    /// Coefficients `c[k]`, `k = -band..=band`, stored at index `k + band`.
    pub fn new(band: usize, comps: Vec<Vec<C64>>) -> Result<Self> {
        if comps.is_empty() || comps.len() > 2 {
            return Err(Error::Shape(format!(
                "expected 1 or 2 boundary components, got {}",
                comps.len()
            )));
        }
        for c in &comps {
            if c.len() != 2 * band + 1 {
                return Err(Error::Shape(format!(
                    "component has {} coefficients, band {band} needs {}",
                    c.len(),
                    2 * band + 1
                )));
            }
        }
        Ok(BoundaryFunction { band, comps })
    }

    pub fn constant(components: usize, c: C64) -> Self {
        BoundaryFunction {
            band: 0,
            comps: vec![vec![c]; components],
        }
    }

    /// Build from sparse `(k, c_k)` lists per component.
    pub fn from_sparse(terms: &[Vec<(i64, C64)>]) -> Result<Self> {
        let band = terms
            .iter()
            .flat_map(|t| t.iter().map(|(k, _)| k.unsigned_abs() as usize))
            .max()
            .unwrap_or(0);
        let comps = terms
            .iter()
            .map(|t| {
                let mut c = vec![ZERO; 2 * band + 1];
                for &(k, v) in t {
                    c[(k + band as i64) as usize] += v;
                }
                c
            })
            .collect();
        BoundaryFunction::new(band, comps)
    }

    /// Boundary values of an analytic (Laurent) function: `a_k r^k` on the
    /// circle of radius `r`.
    pub fn from_laurent(f: &Laurent, domain: &DomainSpec) -> Self {
        let band = f
            .min_pow()
            .unsigned_abs()
            .max(f.max_pow().unsigned_abs()) as usize;
        let comps = (0..domain.components())
            .map(|comp| {
                let r = domain.radius(comp);
                let mut c = vec![ZERO; 2 * band + 1];
                for (k, a) in f.terms() {
                    c[(k + band as i64) as usize] = a * r.powi(k as i32);
                }
                c
            })
            .collect();
        BoundaryFunction { band, comps }
    }

    /// Truncate nodal samples to `band` Fourier modes per component.
    pub fn from_samples(samples: &[Vec<C64>], band: usize) -> Result<Self> {
        if let Some(first) = samples.first() {
            if first.len() < 2 * band + 1 {
                return Err(Error::Shape(format!(
                    "{} samples cannot resolve band {band}",
                    first.len()
                )));
            }
            if samples.iter().any(|s| s.len() != first.len()) {
                return Err(Error::Shape("components sampled on different grids".into()));
            }
        }
        BoundaryFunction::new(band, samples.iter().map(|s| analyze(s, band)).collect())
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn components(&self) -> usize {
        self.comps.len()
    }

    pub fn coeffs(&self, comp: usize) -> &[C64] {
        &self.comps[comp]
    }

    pub fn coeff(&self, comp: usize, k: i64) -> C64 {
        let i = k + self.band as i64;
        if i < 0 || i as usize >= self.comps[comp].len() {
            ZERO
        } else {
            self.comps[comp][i as usize]
        }
    }

    /// Nodal samples at `nodes` uniform points per component.
    pub fn samples(&self, nodes: usize) -> Vec<Vec<C64>> {
        self.comps
            .iter()
            .map(|c| synthesize(c, self.band, nodes))
            .collect()
    }

    /// Samples on the domain's quadrature grid, checking the component count.
    pub fn samples_on(&self, domain: &DomainSpec) -> Result<Vec<Vec<C64>>> {
        self.check_domain(domain)?;
        Ok(self.samples(domain.nodes()))
    }

    fn check_domain(&self, domain: &DomainSpec) -> Result<()> {
        if self.components() != domain.components() {
            return Err(Error::Shape(format!(
                "function has {} components, domain has {}",
                self.components(),
                domain.components()
            )));
        }
        Ok(())
    }

    pub fn is_real_valued(&self, tol: f64) -> bool {
        self.comps.iter().all(|c| {
            (0..=self.band).all(|k| (c[self.band + k] - c[self.band - k].conj()).norm() <= tol)
        })
    }

    pub fn conj(&self) -> Self {
        BoundaryFunction {
            band: self.band,
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().rev().map(|v| v.conj()).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        BoundaryFunction {
            band: self.band,
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &BoundaryFunction) -> Result<Self> {
        if self.components() != other.components() {
            return Err(Error::Shape("component count mismatch".into()));
        }
        let band = self.band.max(other.band);
        let comps = (0..self.components())
            .map(|comp| {
                (-(band as i64)..=band as i64)
                    .map(|k| self.coeff(comp, k) + other.coeff(comp, k))
                    .collect()
            })
            .collect();
        BoundaryFunction::new(band, comps)
    }

    /// Apply `f` at every node and re-truncate to the domain's full band.
    pub fn map_nodes(
        &self,
        domain: &DomainSpec,
        f: impl Fn(C64) -> Result<C64>,
    ) -> Result<BoundaryFunction> {
        let samples = self.samples_on(domain)?;
        let mapped = samples
            .into_iter()
            .map(|c| c.into_iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        BoundaryFunction::from_samples(&mapped, domain.full_band())
    }

    /// Pointwise product resolved on the domain grid.
    pub fn mul(&self, other: &BoundaryFunction, domain: &DomainSpec) -> Result<Self> {
        let a = self.samples_on(domain)?;
        let b = other.samples_on(domain)?;
        let prod: Vec<Vec<C64>> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v).collect())
            .collect();
        BoundaryFunction::from_samples(&prod, domain.full_band())
    }

    /// Maximum modulus over the quadrature nodes.
    pub fn sup_norm(&self, domain: &DomainSpec) -> Result<f64> {
        Ok(self
            .samples_on(domain)?
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }
}

/// Truncated Fourier coefficients (band `M`) from samples on the quadrature grid.
pub fn samples_to_coeffs(values: &[Vec<C64>], domain: &DomainSpec) -> Result<BoundaryFunction> {
    if values.len() != domain.components() {
        return Err(Error::Shape(format!(
            "expected {} components, got {}",
            domain.components(),
            values.len()
        )));
    }
    for v in values {
        if v.len() != domain.nodes() {
            return Err(Error::Shape(format!(
                "expected {} samples per component, got {}",
                domain.nodes(),
                v.len()
            )));
        }
    }
    BoundaryFunction::from_samples(values, domain.truncation())
}

pub fn coeffs_to_samples(f: &BoundaryFunction, domain: &DomainSpec) -> Result<Vec<Vec<C64>>> {
    f.samples_on(domain)
}

/// `∫ f dm`: the value at `x0` of the harmonic extension of `f`.
pub fn pair_with_m(f: &BoundaryFunction, domain: &DomainSpec) -> Result<C64> {
    f.check_domain(domain)?;
    let band = f.band() as i64;
    let mut acc = ZERO;
    for comp in 0..f.components() {
        for k in -band..=band {
            let c = f.coeff(comp, k);
            if c != ZERO {
                acc += c * domain.mode_weight(comp, k);
            }
        }
    }
    Ok(acc)
}

/// Weight of an inner product `∫ f ḡ w dm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum WeightSpec {
    Unit,
    /// `e^n` with `n = Σ n_i λ_i` on the N-basis.
    ExpN(Vec<f64>),
    /// `|Z|^α = Π |Z_j|^{α_j}`.
    ZPower(Vec<f64>),
    /// An arbitrary positive boundary density.
    Density(BoundaryFunction),
}

/// A weight resolved to nodal values on a particular domain.
#[derive(Clone, Debug)]
pub struct Weight {
    spec: WeightSpec,
    nodal: Vec<Vec<f64>>,
}

impl WeightSpec {
    pub fn resolve(&self, domain: &DomainSpec) -> Result<Weight> {
        let comps = domain.components();
        let nodes = domain.nodes();
        let nodal: Vec<Vec<f64>> = match self {
            WeightSpec::Unit => vec![vec![1.0; nodes]; comps],
            WeightSpec::ExpN(n) => {
                if n.len() != domain.sigma() {
                    return Err(Error::InvalidWeight(format!(
                        "N-coordinates have length {}, expected {}",
                        n.len(),
                        domain.sigma()
                    )));
                }
                let basis = domain.n_basis_nodal();
                (0..comps)
                    .map(|c| {
                        (0..nodes)
                            .map(|j| {
                                n.iter()
                                    .zip(&basis)
                                    .map(|(ni, b)| ni * b[c][j])
                                    .sum::<f64>()
                                    .exp()
                            })
                            .collect()
                    })
                    .collect()
            }
            WeightSpec::ZPower(alpha) => {
                if alpha.len() != domain.sigma() {
                    return Err(Error::InvalidWeight(format!(
                        "α has length {}, expected {}",
                        alpha.len(),
                        domain.sigma()
                    )));
                }
                (0..comps)
                    .map(|c| {
                        // the only Z is z itself, so |Z|^α is constant per circle
                        let v: f64 = alpha
                            .iter()
                            .map(|a| domain.radius(c).powf(*a))
                            .product();
                        vec![v; nodes]
                    })
                    .collect()
            }
            WeightSpec::Density(f) => {
                let s = f.samples_on(domain)?;
                // rounding in the synthesis scales with the largest value
                let tol = 1e-10 * s.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
                let mut out = Vec::with_capacity(comps);
                for c in s {
                    let mut row = Vec::with_capacity(nodes);
                    for v in c {
                        if v.im.abs() > tol {
                            return Err(Error::InvalidWeight(
                                "weight density is not real".into(),
                            ));
                        }
                        row.push(v.re);
                    }
                    out.push(row);
                }
                out
            }
        };
        if let Some(bad) = nodal.iter().flatten().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "weight density {bad} is not positive at a quadrature node"
            )));
        }
        Ok(Weight {
            spec: self.clone(),
            nodal,
        })
    }
}

impl Weight {
    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn nodal(&self) -> &[Vec<f64>] {
        &self.nodal
    }

    pub fn density(&self, domain: &DomainSpec) -> BoundaryFunction {
        let s: Vec<Vec<C64>> = self
            .nodal
            .iter()
            .map(|c| c.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        BoundaryFunction::from_samples(&s, domain.full_band()).expect("nodal weight shape")
    }
}

/// `∫ f ḡ w dm`, computed from pointwise products on the quadrature grid.
pub fn weighted_inner_product(
    f: &BoundaryFunction,
    g: &BoundaryFunction,
    weight: &Weight,
    domain: &DomainSpec,
) -> Result<C64> {
    let fs = f.samples_on(domain)?;
    let gs = g.samples_on(domain)?;
    let prod: Vec<Vec<C64>> = fs
        .iter()
        .zip(&gs)
        .zip(weight.nodal())
        .map(|((a, b), w)| {
            a.iter()
                .zip(b)
                .zip(w)
                .map(|((x, y), w)| x * y.conj() * *w)
                .collect()
        })
        .collect();
    Ok(domain.integrate(&prod))
}

/// Pointwise logarithm of a positive real boundary function.
pub fn boundary_log(f: &BoundaryFunction, domain: &DomainSpec) -> Result<BoundaryFunction> {
    let tol = 1e-10 * f.sup_norm(domain)?.max(1.0);
    f.map_nodes(domain, |v| {
        if v.im.abs() > tol || !(v.re > 0.0) {
            Err(Error::Domain(format!("log of non-positive value {v}")))
        } else {
            Ok(C64::new(v.re.ln(), 0.0))
        }
    })
}

pub fn boundary_exp(f: &BoundaryFunction, domain: &DomainSpec) -> Result<BoundaryFunction> {
    f.map_nodes(domain, |v| Ok(v.exp()))
}

/// `order`-th derivative of the Laurent series `f` at an interior point.
pub fn evaluate_analytic(f: &Laurent, z: C64, order: u32, domain: &DomainSpec) -> Result<C64> {
    if !domain.is_interior(z) {
        return Err(Error::Evaluation { re: z.re, im: z.im });
    }
    f.eval_deriv(z, order)
}

/// Laurent coefficients of an analytic function from its boundary values:
/// nonnegative powers come from the outer circle, negative powers from the
/// inner one (disk: negative modes are dropped).
pub fn analytic_part(f: &BoundaryFunction, domain: &DomainSpec, band: usize) -> Laurent {
    let b = band as i64;
    match domain.kind() {
        DomainKind::Disk => Laurent::power_series((0..=b).map(|k| f.coeff(0, k)).collect()),
        DomainKind::Annulus { q } => Laurent::new(
            -b,
            (-b..=b)
                .map(|k| {
                    if k >= 0 {
                        f.coeff(0, k)
                    } else {
                        f.coeff(1, k) / q.powi(k as i32)
                    }
                })
                .collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Independent quadrature `(1/2π)∫ e^{cos θ} e^{-ikθ} dθ` with a fine
    /// midpoint rule, which is spectrally accurate for periodic integrands.
    fn bessel_quadrature(k: i64) -> f64 {
        let n = 4000;
        (0..n)
            .map(|j| {
                let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                (t.cos().exp() * (k as f64 * t).cos()) / n as f64
            })
            .sum()
    }

    fn sample_fn(domain: &DomainSpec, f: impl Fn(C64) -> C64) -> Vec<Vec<C64>> {
        (0..domain.components())
            .map(|comp| {
                (0..domain.nodes())
                    .map(|j| f(domain.node_point(comp, j)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constant_and_pure_mode_coefficients() {
        let d = DomainSpec::disk(8).unwrap();
        let one = sample_fn(&d, |_| c(1.0));
        let f = samples_to_coeffs(&one, &d).unwrap();
        assert!((f.coeff(0, 0) - c(1.0)).norm() < 1e-15);
        for k in 1..=8 {
            assert!(f.coeff(0, k).norm() < 1e-15);
            assert!(f.coeff(0, -k).norm() < 1e-15);
        }
        let z = sample_fn(&d, |z| z);
        let f = samples_to_coeffs(&z, &d).unwrap();
        assert!((f.coeff(0, 1) - c(1.0)).norm() < 1e-14);
        assert!(f.coeff(0, 0).norm() < 1e-14);
    }

    #[test]
    fn exp_cos_coefficients_match_quadrature_oracle() {
        let d = DomainSpec::disk(16).unwrap();
        let s = sample_fn(&d, |z| c(z.re.exp()));
        let f = samples_to_coeffs(&s, &d).unwrap();
        for k in 0..6 {
            let want = bessel_quadrature(k);
            assert!((f.coeff(0, k) - c(want)).norm() < 1e-13, "k={k}");
            assert!((f.coeff(0, -k) - c(want)).norm() < 1e-13);
        }
        // I_1(1)
        assert!((bessel_quadrature(1) - 0.565_159_103_992_485).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_a_shape_error() {
        let d = DomainSpec::disk(8).unwrap();
        let bad = vec![vec![c(1.0); d.nodes() - 1]];
        assert!(matches!(samples_to_coeffs(&bad, &d), Err(Error::Shape(_))));
    }

    #[test]
    fn pairing_on_disk_is_mean() {
        let d = DomainSpec::disk(4).unwrap();
        let f = BoundaryFunction::from_sparse(&[vec![(0, c(3.0)), (1, c(2.0))]]).unwrap();
        assert!((pair_with_m(&f, &d).unwrap() - c(3.0)).norm() < 1e-15);
    }

    #[test]
    fn annulus_pairing_reproduces_analytic_values() {
        let x0 = c(0.5f64.sqrt());
        let d = DomainSpec::annulus(0.5, x0, 16).unwrap();
        let z = BoundaryFunction::from_laurent(&Laurent::monomial(1, c(1.0)), &d);
        assert!((pair_with_m(&z, &d).unwrap() - x0).norm() < 1e-14);
        let zinv = BoundaryFunction::from_laurent(&Laurent::monomial(-1, c(1.0)), &d);
        let v = pair_with_m(&zinv, &d).unwrap();
        assert!((v - c(2.0f64.sqrt())).norm() < 1e-13, "{v}");
        for k in -10..=10 {
            let f = BoundaryFunction::from_laurent(&Laurent::monomial(k, c(1.0)), &d);
            let v = pair_with_m(&f, &d).unwrap();
            assert!((v - x0.powi(k as i32)).norm() < 1e-12 * x0.norm().powi(k as i32).max(1.0));
        }
    }

    /// Per-mode 2×2 harmonic solve done with a generic linear solve, as an
    /// independent check of the closed-form weights.
    #[test]
    fn mode_weights_match_direct_two_by_two_solve() {
        let (q, r0) = (0.4, 0.63);
        let d = DomainSpec::annulus(q, c(r0), 8).unwrap();
        for k in 1..12i64 {
            let p = k as f64;
            let a = nalgebra::Matrix2::new(1.0, 1.0, q.powf(p), q.powf(-p));
            let inv = a.try_inverse().unwrap();
            // data (1, 0) and (0, 1)
            let s_out = inv * nalgebra::Vector2::new(1.0, 0.0);
            let s_in = inv * nalgebra::Vector2::new(0.0, 1.0);
            let eval = |s: nalgebra::Vector2<f64>| s[0] * r0.powf(p) + s[1] * r0.powf(-p);
            assert!((d.mode_weight(0, k).re - eval(s_out)).abs() < 1e-13);
            assert!((d.mode_weight(1, k).re - eval(s_in)).abs() < 1e-13);
        }
    }

    #[test]
    fn harmonic_density_positive_and_normalized() {
        let d = DomainSpec::annulus(0.5, c(0.5f64.sqrt()), 24).unwrap();
        let dens = d.representing_density();
        assert!(dens.iter().flatten().all(|&w| w > 0.0));
        let total: f64 =
            dens.iter().flatten().sum::<f64>() / d.nodes() as f64;
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nu_normalization() {
        let q = 0.5;
        let d = DomainSpec::annulus(q, c(0.7), 16).unwrap();
        // log|z| is 0 outside and log q inside
        let logz = BoundaryFunction::new(0, vec![vec![c(0.0)], vec![c(q.ln())]]).unwrap();
        let nu = d.nu_pairing(&logz);
        assert!((nu[0] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn weighted_products() {
        let d = DomainSpec::disk(8).unwrap();
        let w = WeightSpec::Unit.resolve(&d).unwrap();
        let z3 = BoundaryFunction::from_laurent(&Laurent::monomial(3, c(1.0)), &d);
        let z2 = BoundaryFunction::from_laurent(&Laurent::monomial(2, c(1.0)), &d);
        assert!((weighted_inner_product(&z3, &z3, &w, &d).unwrap() - c(1.0)).norm() < 1e-14);
        assert!(weighted_inner_product(&z2, &z3, &w, &d).unwrap().norm() < 1e-14);

        let a = DomainSpec::annulus(0.5, c(0.5f64.sqrt()), 8).unwrap();
        let wz = WeightSpec::ZPower(vec![1.0]).resolve(&a).unwrap();
        let one = BoundaryFunction::constant(2, c(1.0));
        let v = weighted_inner_product(&one, &one, &wz, &a).unwrap();
        let dens = a.representing_density();
        let mass_out: f64 = dens[0].iter().sum::<f64>() / a.nodes() as f64;
        let mass_in: f64 = dens[1].iter().sum::<f64>() / a.nodes() as f64;
        assert!((v - c(mass_out + 0.5 * mass_in)).norm() < 1e-14);
        // x0 at the geometric mean radius splits the mass evenly
        assert!((mass_out - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_positive_weight_rejected() {
        let d = DomainSpec::disk(4).unwrap();
        let f = BoundaryFunction::from_sparse(&[vec![(0, c(0.5)), (1, c(0.5)), (-1, c(0.5))]])
            .unwrap();
        assert!(matches!(
            WeightSpec::Density(f).resolve(&d),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn log_exp_roundtrip() {
        let d = DomainSpec::disk(64).unwrap();
        let cos = BoundaryFunction::from_sparse(&[vec![(1, c(0.5)), (-1, c(0.5))]]).unwrap();
        let e = boundary_exp(&cos, &d).unwrap();
        for k in 0..5 {
            assert!((e.coeff(0, k) - c(bessel_quadrature(k))).norm() < 1e-13);
        }
        let back = boundary_log(&e, &d).unwrap();
        for k in -(back.band() as i64)..=back.band() as i64 {
            assert!((back.coeff(0, k) - cos.coeff(0, k)).norm() < 1e-10);
        }
        let one = BoundaryFunction::constant(1, c(1.0));
        let l = boundary_log(&one, &d).unwrap();
        assert!(l.coeffs(0).iter().all(|v| v.norm() < 1e-15));
        let neg = BoundaryFunction::constant(1, c(-1.0));
        assert!(matches!(boundary_log(&neg, &d), Err(Error::Domain(_))));
    }

    #[test]
    fn evaluation_outside_rejected() {
        let d = DomainSpec::annulus(0.5, c(0.7), 8).unwrap();
        let f = Laurent::monomial(2, c(1.0));
        assert!(evaluate_analytic(&f, c(0.3), 0, &d).is_err());
        assert!(evaluate_analytic(&f, c(1.0), 0, &d).is_err());
        assert!(evaluate_analytic(&f, c(0.6), 1, &d).is_ok());
    }

    #[test]
    fn domain_validation() {
        assert!(DomainSpec::annulus(1.2, c(0.5), 8).is_err());
        assert!(DomainSpec::annulus(0.5, c(0.4), 8).is_err());
        assert!(DomainSpec::annulus(0.01, c(0.5), 8).is_err());
        assert!(DomainSpec::disk(0).is_err());
    }

    #[test]
    fn analytic_part_recovers_laurent() {
        let d = DomainSpec::annulus(0.5, c(0.7), 12).unwrap();
        let f = Laurent::new(-3, vec![c(0.2), c(-1.0), c(0.5), c(1.0), c(0.3), c(0.0), c(0.1)]);
        let b = BoundaryFunction::from_laurent(&f, &d);
        let g = analytic_part(&b, &d, 3);
        for k in -3..=3 {
            assert!((g.coeff(k) - f.coeff(k)).norm() < 1e-14);
        }
    }
}
