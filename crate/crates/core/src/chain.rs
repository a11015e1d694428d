//! Gamelin chains of 2-point and derivation constraints, and the parameter
//! space `Δ = ∏ (ℂ ∪ {∞})` selecting a constrained space.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{evaluate_analytic, DomainSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::series::Laurent;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// One step of a Gamelin chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConstraintRecord", into = "ConstraintRecord")]
pub enum Constraint {
    /// `f(a) = f(b)` in the algebra; `f(a) = t f(b)` in the spaces.
    TwoPoint { a: C64, b: C64 },
    /// `f^{(n)}(c) = 0` in the algebra; `f(c) = t f^{(n)}(c)` in the spaces.
    Derivation { c: C64, order: u32 },
}

/// Structured-text record for a constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintRecord {
    TwoPoint { points: [[f64; 2]; 2] },
    Derivation { point: [f64; 2], order: u32 },
}

impl TryFrom<ConstraintRecord> for Constraint {
    type Error = Error;

    fn try_from(r: ConstraintRecord) -> Result<Self> {
        match r {
            ConstraintRecord::TwoPoint { points: [a, b] } => {
                Constraint::two_point(C64::new(a[0], a[1]), C64::new(b[0], b[1]))
            }
            ConstraintRecord::Derivation { point, order } => {
                Constraint::derivation(C64::new(point[0], point[1]), order)
            }
        }
    }
}

impl From<Constraint> for ConstraintRecord {
    fn from(c: Constraint) -> Self {
        match c {
            Constraint::TwoPoint { a, b } => ConstraintRecord::TwoPoint {
                points: [[a.re, a.im], [b.re, b.im]],
            },
            Constraint::Derivation { c, order } => ConstraintRecord::Derivation {
                point: [c.re, c.im],
                order,
            },
        }
    }
}

impl Constraint {
    pub fn two_point(a: C64, b: C64) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::InvalidConstraint("non-finite point".into()));
        }
        if (a - b).norm() < 1e-12 {
            return Err(Error::InvalidConstraint(format!(
                "2-point constraint needs distinct points, got {a} twice"
            )));
        }
        Ok(Constraint::TwoPoint { a, b })
    }

    pub fn derivation(c: C64, order: u32) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidConstraint("non-finite point".into()));
        }
        if order == 0 {
            return Err(Error::InvalidConstraint(
                "derivation constraint needs order >= 1".into(),
            ));
        }
        Ok(Constraint::Derivation { c, order })
    }

    pub fn is_two_point(&self) -> bool {
        matches!(self, Constraint::TwoPoint { .. })
    }

    /// The two evaluation functionals `(point, derivative order)` whose
    /// values form this stage's entries of `f(Γ)`.
    pub fn functionals(&self) -> [(C64, u32); 2] {
        match *self {
            Constraint::TwoPoint { a, b } => [(a, 0), (b, 0)],
            Constraint::Derivation { c, order } => [(c, 0), (c, order)],
        }
    }

    pub fn points(&self) -> Vec<C64> {
        match *self {
            Constraint::TwoPoint { a, b } => vec![a, b],
            Constraint::Derivation { c, .. } => vec![c],
        }
    }
}

/// Ordered list of constraints `A = A_d ⊆ … ⊆ A_0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GamelinChain {
    constraints: Vec<Constraint>,
}

impl GamelinChain {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        GamelinChain { constraints }
    }

    /// The unconstrained chain (`A = 𝒜`).
    pub fn empty() -> Self {
        GamelinChain::default()
    }

    /// `[Derivation(0, 1)]`, the Neil algebra `f'(0) = 0`.
    pub fn neil() -> Self {
        GamelinChain::new(vec![Constraint::Derivation {
            c: ZERO,
            order: 1,
        }])
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Codimension `d`.
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Number of entries of `f(Γ)`: two per stage.
    pub fn gamma_count(&self) -> usize {
        2 * self.constraints.len()
    }

    pub fn prefix(&self, len: usize) -> GamelinChain {
        GamelinChain::new(self.constraints[..len].to_vec())
    }

    /// Parse a structured-text chain: a TOML document with `[[chain]]` records.
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            chain: Vec<Constraint>,
        }
        let doc: Doc = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(GamelinChain::new(doc.chain))
    }

    pub fn to_toml(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            chain: &'a [Constraint],
        }
        toml::to_string(&Doc {
            chain: &self.constraints,
        })
        .expect("chain records serialize")
    }
}

/// A point of `ℂ ∪ {∞}` in homogeneous coordinates: `t = u / v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projective {
    u: C64,
    v: C64,
}

impl Projective {
    /// Panics on `(0, 0)`; use [`try_new`](Self::try_new) for untrusted input.
    pub fn new(u: C64, v: C64) -> Self {
        Self::try_new(u, v).expect("projective point (0, 0)")
    }

    pub fn try_new(u: C64, v: C64) -> Option<Self> {
        let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Some(Projective { u: u / n, v: v / n })
    }

    pub fn finite(t: C64) -> Self {
        Projective::new(t, ONE)
    }

    pub fn infinity() -> Self {
        Projective::new(ONE, ZERO)
    }

    pub fn u(&self) -> C64 {
        self.u
    }

    pub fn v(&self) -> C64 {
        self.v
    }

    pub fn is_infinite(&self) -> bool {
        self.v == ZERO
    }

    /// `u / v`, or `None` at infinity.
    pub fn value(&self) -> Option<C64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.u / self.v)
        }
    }

    /// Cross-product test `u v' = u' v` (inputs are unit-normalized).
    pub fn approx_eq(&self, other: &Projective, tol: f64) -> bool {
        (self.u * other.v - other.u * self.v).norm() <= tol
    }

    /// Chordal distance on the Riemann sphere.
    pub fn chordal_distance(&self, other: &Projective) -> f64 {
        (self.u * other.v - other.u * self.v).norm()
    }
}

impl fmt::Display for Projective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Projective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Projective::infinity());
        }
        let t = C64::from_str(s)
            .map_err(|_| Error::Config(format!("cannot parse Δ coordinate '{s}'")))?;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::Config(format!("non-finite Δ coordinate '{s}'")));
        }
        Ok(Projective::finite(t))
    }
}

/// A point `D = (t_1, …, t_d)` of `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeltaPoint {
    coords: Vec<Projective>,
}

impl DeltaPoint {
    pub fn new(coords: Vec<Projective>) -> Self {
        DeltaPoint { coords }
    }

    pub fn coords(&self) -> &[Projective] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn approx_eq(&self, other: &DeltaPoint, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Parse comma-separated coordinates such as `2,inf,1+0.5i`.
    pub fn parse_list(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(DeltaPoint::new(Vec::new()));
        }
        Ok(DeltaPoint::new(
            s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?,
        ))
    }

    fn check(&self, chain: &GamelinChain) -> Result<()> {
        if self.len() != chain.len() {
            return Err(Error::Shape(format!(
                "Δ point has {} coordinates, chain has {} constraints",
                self.len(),
                chain.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DeltaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `D_Γ`: 1 for 2-point stages, ∞ for derivation stages.
pub fn delta_gamma(chain: &GamelinChain) -> DeltaPoint {
    DeltaPoint::new(
        chain
            .constraints()
            .iter()
            .map(|c| {
                if c.is_two_point() {
                    Projective::finite(ONE)
                } else {
                    Projective::infinity()
                }
            })
            .collect(),
    )
}

/// Parameter of `fg` for `f ∈ H²_D`, `g ∈ H²_{D'}`: `t s` on 2-point stages
/// and `1/(1/t + 1/s)` on derivation stages.
///
/// When both factors vanish at a stage's points (e.g. `t = s = 0` on a
/// derivation stage), the product satisfies every parameter at that stage
/// and the homogeneous product is `(0, 0)`; the coordinate of `D_Γ` is
/// returned there.
pub fn delta_product(d1: &DeltaPoint, d2: &DeltaPoint, chain: &GamelinChain) -> Result<DeltaPoint> {
    d1.check(chain)?;
    d2.check(chain)?;
    let gamma = delta_gamma(chain);
    let coords = chain
        .constraints()
        .iter()
        .zip(d1.coords.iter().zip(&d2.coords))
        .zip(gamma.coords())
        .map(|((c, (a, b)), g)| {
            let (u, v) = if c.is_two_point() {
                (a.u * b.u, a.v * b.v)
            } else {
                (a.u * b.u, a.u * b.v + a.v * b.u)
            };
            Projective::try_new(u, v).unwrap_or(*g)
        })
        .collect();
    Ok(DeltaPoint::new(coords))
}

/// `1/t` on 2-point stages, `-t` on derivation stages.
pub fn delta_inverse(d: &DeltaPoint, chain: &GamelinChain) -> Result<DeltaPoint> {
    d.check(chain)?;
    Ok(DeltaPoint::new(
        chain
            .constraints()
            .iter()
            .zip(&d.coords)
            .map(|(c, p)| {
                if c.is_two_point() {
                    Projective::new(p.v, p.u)
                } else {
                    Projective::new(-p.u, p.v)
                }
            })
            .collect(),
    ))
}

/// `f(Γ)`: per stage, the pair of functional values in chain order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaVector {
    pub entries: Vec<C64>,
}

pub fn gamma_eval(f: &Laurent, chain: &GamelinChain, domain: &DomainSpec) -> Result<GammaVector> {
    let mut entries = Vec::with_capacity(chain.gamma_count());
    for c in chain.constraints() {
        for (z, order) in c.functionals() {
            entries.push(evaluate_analytic(f, z, order, domain)?);
        }
    }
    Ok(GammaVector { entries })
}

/// Max over stages of `|v·lhs − u·rhs| / (|u| + |v|)`; zero iff `f ∈ H²_D`.
pub fn constraint_residual(
    f: &Laurent,
    chain: &GamelinChain,
    d: &DeltaPoint,
    domain: &DomainSpec,
) -> Result<f64> {
    d.check(chain)?;
    let g = gamma_eval(f, chain, domain)?;
    Ok(d.coords
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (lhs, rhs) = (g.entries[2 * i], g.entries[2 * i + 1]);
            (p.v * lhs - p.u * rhs).norm() / (p.u.norm() + p.v.norm())
        })
        .fold(0.0, f64::max))
}

/// Outcome of the Leibniz-rule check for one chain stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCheck {
    pub stage: usize,
    pub passed: bool,
    /// Largest relative Leibniz defect over the sampled pairs (0 for 2-point stages).
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub stages: Vec<StageCheck>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }

    /// Error naming the first failing stage.
    pub fn ensure(&self) -> Result<()> {
        match self.stages.iter().find(|s| !s.passed) {
            None => Ok(()),
            Some(s) => Err(Error::ChainRejected {
                stage: s.stage,
                reason: format!(
                    "functional is not a point derivation on the previous algebra (defect {:e})",
                    s.defect
                ),
            }),
        }
    }
}

/// Relative tolerance for the Leibniz identity.
pub const LEIBNIZ_TOL: f64 = 1e-9;

/// Rows `ℓ_k = F(z^k)` of the stage functionals at parameter `d`:
/// `v·F₁ − u·F₂` for each stage.
pub(crate) fn constraint_rows(
    chain: &GamelinChain,
    d: &DeltaPoint,
    powers: &[i64],
    scale: impl Fn(usize) -> f64,
) -> Result<DMatrix<C64>> {
    let mut m = DMatrix::zeros(chain.len(), powers.len());
    for (i, (c, p)) in chain.constraints().iter().zip(d.coords()).enumerate() {
        let [(z1, o1), (z2, o2)] = c.functionals();
        for (j, &k) in powers.iter().enumerate() {
            let mono = Laurent::monomial(k, ONE);
            let f1 = mono.eval_deriv(z1, o1)?;
            let f2 = mono.eval_deriv(z2, o2)?;
            m[(i, j)] = (p.v * f1 - p.u * f2) / scale(j);
        }
    }
    Ok(m)
}

/// Checks that every chain point is interior and that each derivation stage
/// obeys `D(fg) = f(c)D(g) + g(c)D(f)` on random pairs drawn from a
/// polynomial basis of the previous algebra.
pub fn validate_chain(
    chain: &GamelinChain,
    domain: &DomainSpec,
    seed: u64,
) -> Result<AdmissibilityReport> {
    for (i, c) in chain.constraints().iter().enumerate() {
        for z in c.points() {
            if !domain.is_interior(z) {
                return Err(Error::ChainRejected {
                    stage: i,
                    reason: format!("point {z} is not interior to the domain"),
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_order = chain
        .constraints()
        .iter()
        .map(|c| match c {
            Constraint::Derivation { order, .. } => *order as usize,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let degree = 8 + max_order + chain.len();
    let powers = domain.analytic_powers(degree);
    let mut stages = Vec::with_capacity(chain.len());
    for (i, c) in chain.constraints().iter().enumerate() {
        let Constraint::Derivation { c: point, order } = *c else {
            stages.push(StageCheck {
                stage: i,
                passed: true,
                defect: 0.0,
            });
            continue;
        };
        let prefix = chain.prefix(i);
        let rows = constraint_rows(&prefix, &delta_gamma(&prefix), &powers, |_| 1.0)?;
        let basis = linalg::null_space(&rows)?;
        let random_member = |rng: &mut ChaCha8Rng| -> Laurent {
            let x: Vec<C64> = (0..basis.ncols())
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let coef = &basis * nalgebra::DVector::from_vec(x);
            sparse_laurent(&powers, coef.as_slice())
        };
        let mut defect: f64 = 0.0;
        for _ in 0..4 {
            let f = random_member(&mut rng);
            let g = random_member(&mut rng);
            let fg = f.mul(&g);
            let d_fg = fg.eval_deriv(point, order)?;
            let a = f.eval(point)? * g.eval_deriv(point, order)?;
            let b = g.eval(point)? * f.eval_deriv(point, order)?;
            let scale = d_fg.norm() + a.norm() + b.norm() + f64::MIN_POSITIVE;
            defect = defect.max((d_fg - a - b).norm() / scale);
        }
        stages.push(StageCheck {
            stage: i,
            passed: defect <= LEIBNIZ_TOL,
            defect,
        });
    }
    Ok(AdmissibilityReport { stages })
}

/// Laurent series from coefficients attached to an arbitrary power list.
pub(crate) fn sparse_laurent(powers: &[i64], coef: &[C64]) -> Laurent {
    let lo = powers.iter().copied().min().unwrap_or(0);
    let hi = powers.iter().copied().max().unwrap_or(-1);
    let mut c = vec![ZERO; (hi - lo + 1).max(0) as usize];
    for (&k, &v) in powers.iter().zip(coef) {
        c[(k - lo) as usize] += v;
    }
    Laurent::new(lo, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn neil() -> GamelinChain {
        GamelinChain::neil()
    }

    fn two_point() -> GamelinChain {
        GamelinChain::new(vec![Constraint::two_point(c(0.3), c(-0.3)).unwrap()])
    }

    fn t(x: f64) -> Projective {
        Projective::finite(c(x))
    }

    fn dp(v: Vec<Projective>) -> DeltaPoint {
        DeltaPoint::new(v)
    }

    #[test]
    fn product_examples() {
        let r = delta_product(&dp(vec![t(1.0)]), &dp(vec![t(1.0)]), &two_point()).unwrap();
        assert!(r.coords()[0].approx_eq(&t(1.0), 1e-15));
        let r = delta_product(&dp(vec![t(2.0)]), &dp(vec![t(2.0)]), &neil()).unwrap();
        assert!(r.coords()[0].approx_eq(&t(1.0), 1e-15));
        let r = delta_product(&dp(vec![Projective::infinity()]), &dp(vec![t(3.0)]), &neil())
            .unwrap();
        assert!(r.coords()[0].approx_eq(&t(3.0), 1e-15));
    }

    /// Oracle for the ∞·3 Neil product: f with f'(0) = 0 (parameter ∞) and
    /// g with g(0) = 3 g'(0); Leibniz gives (fg)(0) = 3 (fg)'(0).
    #[test]
    fn neil_product_with_infinity_matches_leibniz() {
        let f = Laurent::from_real(&[2.0, 0.0, 1.0]);
        let g = Laurent::from_real(&[3.0, 1.0, 0.5]);
        let fg = f.mul(&g);
        let v = fg.eval(c(0.0)).unwrap();
        let dv = fg.eval_deriv(c(0.0), 1).unwrap();
        assert!((v - c(3.0) * dv).norm() < 1e-14);
    }

    #[test]
    fn inverse_examples() {
        let r = delta_inverse(&dp(vec![t(2.0)]), &two_point()).unwrap();
        assert!(r.coords()[0].approx_eq(&t(0.5), 1e-15));
        let r = delta_inverse(&dp(vec![t(5.0)]), &neil()).unwrap();
        assert!(r.coords()[0].approx_eq(&t(-5.0), 1e-15));
        let r = delta_inverse(&dp(vec![Projective::infinity()]), &two_point()).unwrap();
        assert!(r.coords()[0].approx_eq(&t(0.0), 1e-15));
    }

    #[test]
    fn gamma_examples() {
        assert!(delta_gamma(&two_point()).coords()[0].approx_eq(&t(1.0), 0.0));
        assert!(delta_gamma(&neil()).coords()[0].is_infinite());
        let mixed = GamelinChain::new(vec![
            Constraint::two_point(c(0.3), c(-0.3)).unwrap(),
            Constraint::derivation(c(0.0), 1).unwrap(),
        ]);
        let g = delta_gamma(&mixed);
        assert!(g.coords()[0].approx_eq(&t(1.0), 0.0) && g.coords()[1].is_infinite());
    }

    #[test]
    fn indeterminate_product_falls_back_to_gamma() {
        let r = delta_product(&dp(vec![t(0.0)]), &dp(vec![t(0.0)]), &neil()).unwrap();
        assert!(r.coords()[0].is_infinite());
        let r = delta_product(&dp(vec![t(0.0)]), &dp(vec![Projective::infinity()]), &two_point())
            .unwrap();
        assert!(r.coords()[0].approx_eq(&t(1.0), 1e-15));
    }

    #[test]
    fn gamma_eval_examples() {
        let d = DomainSpec::disk(8).unwrap();
        let z2 = Laurent::from_real(&[0.0, 0.0, 1.0]);
        let g = gamma_eval(&z2, &two_point(), &d).unwrap();
        assert!((g.entries[0] - c(0.09)).norm() < 1e-15);
        let ch = GamelinChain::new(vec![Constraint::two_point(c(0.2), c(-0.2)).unwrap()]);
        let g = gamma_eval(&z2, &ch, &d).unwrap();
        assert!((g.entries[0] - c(0.04)).norm() < 1e-15 && (g.entries[1] - c(0.04)).norm() < 1e-15);
        let g = gamma_eval(&z2, &neil(), &d).unwrap();
        assert!(g.entries.iter().all(|v| v.norm() < 1e-15));

        let mut coeffs = vec![c(1.0)];
        for k in 1..40 {
            let prev = coeffs[k - 1];
            coeffs.push(prev / k as f64);
        }
        let ez = Laurent::power_series(coeffs);
        let ch = GamelinChain::new(vec![Constraint::derivation(c(0.1), 2).unwrap()]);
        let g = gamma_eval(&ez, &ch, &d).unwrap();
        let e = 0.1f64.exp();
        assert!((g.entries[0] - c(e)).norm() < 1e-14 && (g.entries[1] - c(e)).norm() < 1e-14);
    }

    #[test]
    fn residual_examples() {
        let d = DomainSpec::disk(8).unwrap();
        let f = Laurent::from_real(&[0.0, 0.0, 1.0, 1.0]);
        let r = constraint_residual(&f, &neil(), &delta_gamma(&neil()), &d).unwrap();
        assert!(r < 1e-15);

        let one = Laurent::constant(c(1.0));
        let r = constraint_residual(&one, &two_point(), &dp(vec![t(1.0)]), &d).unwrap();
        assert!(r < 1e-15);

        let f = Laurent::from_real(&[1.0, 1.0]);
        let r = constraint_residual(&f, &two_point(), &dp(vec![t(1.3 / 0.7)]), &d).unwrap();
        assert!(r < 1e-15);
        let r = constraint_residual(&f, &two_point(), &dp(vec![t(1.0)]), &d).unwrap();
        assert!(r > 0.1);
    }

    #[test]
    fn validate_examples() {
        let d = DomainSpec::disk(8).unwrap();
        let ch = GamelinChain::new(vec![Constraint::derivation(c(0.4), 1).unwrap()]);
        assert!(validate_chain(&ch, &d, 1).unwrap().passed());

        let ch = GamelinChain::new(vec![
            Constraint::derivation(c(0.0), 1).unwrap(),
            Constraint::derivation(c(0.0), 3).unwrap(),
        ]);
        assert!(validate_chain(&ch, &d, 2).unwrap().passed());

        let ch = GamelinChain::new(vec![Constraint::derivation(c(0.0), 2).unwrap()]);
        let rep = validate_chain(&ch, &d, 3).unwrap();
        assert!(!rep.passed());
        assert!(matches!(rep.ensure(), Err(Error::ChainRejected { stage: 0, .. })));
    }

    #[test]
    fn exterior_points_rejected() {
        let d = DomainSpec::annulus(0.5, c(0.7), 8).unwrap();
        let ch = GamelinChain::new(vec![Constraint::two_point(c(0.2), c(0.6)).unwrap()]);
        assert!(matches!(
            validate_chain(&ch, &d, 0),
            Err(Error::ChainRejected { stage: 0, .. })
        ));
    }

    #[test]
    fn degenerate_records_rejected() {
        assert!(Constraint::two_point(c(0.0), c(0.0)).is_err());
        assert!(Constraint::derivation(c(0.0), 0).is_err());
        let bad = "[[chain]]\ntype = \"two_point\"\npoints = [[0.1, 0.0], [0.1, 0.0]]\n";
        assert!(GamelinChain::from_toml(bad).is_err());
    }

    #[test]
    fn chain_records_roundtrip() {
        let ch = GamelinChain::new(vec![
            Constraint::two_point(c(0.3), C64::new(-0.3, 0.1)).unwrap(),
            Constraint::derivation(c(0.0), 3).unwrap(),
        ]);
        let text = ch.to_toml();
        assert!(text.contains("type = \"two_point\"") && text.contains("type = \"derivation\""));
        assert_eq!(GamelinChain::from_toml(&text).unwrap(), ch);
    }

    #[test]
    fn parse_coordinates() {
        let d = DeltaPoint::parse_list("2, inf,1+0.5i").unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.coords()[1].is_infinite());
        assert!((d.coords()[2].value().unwrap() - C64::new(1.0, 0.5)).norm() < 1e-15);
        assert!(DeltaPoint::parse_list("abc").is_err());
    }
}
