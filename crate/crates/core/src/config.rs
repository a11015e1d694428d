//! Experiment configuration files.
//!
//! A config is a TOML document. Boundary data is given as numbers only:
//! Fourier coefficient lists, coefficient lists of the logarithm, or sampled
//! values on an equispaced grid. There is no expression language.
//!
//! ```toml
//! seed = 7
//!
//! [domain]
//! kind = "annulus"
//! q = 0.5
//! x0 = [0.7071067811865476, 0.0]
//! schedule = [12, 24, 48]
//!
//! [rho]
//! # one list per boundary circle (outer first); entries are [k, re, im]
//! log_coefficients = [[[1, 0.5, 0.0], [-1, 0.5, 0.0]], [[0, 0.3, 0.0]]]
//!
//! [[chain]]
//! type = "derivation"
//! point = [0.0, 0.75]
//! order = 1
//!
//! [output]
//! json = "report.json"
//! csv = "convergence.csv"
//! ```

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_exp, BoundaryFunction, DomainKind, DomainSpec};
use crate::chain::{delta_gamma, DeltaPoint, GamelinChain, Projective};
use crate::error::{Error, Result};
use crate::toeplitz::ScanGrid;

pub const DEFAULT_SCHEDULE: [usize; 3] = [16, 32, 64];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKindName {
    Disk,
    Annulus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    pub kind: DomainKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<[f64; 2]>,
    /// Truncation degrees `M`, strictly increasing.
    #[serde(default = "default_schedule")]
    pub schedule: Vec<usize>,
    /// Minimum quadrature nodes per circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

fn default_schedule() -> Vec<usize> {
    DEFAULT_SCHEDULE.to_vec()
}

/// Boundary data; exactly one field is set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionBlock {
    /// `[k, re, im]` triples per circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<[f64; 3]>>>,
    /// Coefficients of the logarithm; the function is their exponential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_coefficients: Option<Vec<Vec<[f64; 3]>>>,
    /// `[re, im]` values at `θ_j = 2πj/n`, per circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBlock {
    pub points: Vec<[f64; 2]>,
    /// Δ coordinates as text (`"inf"`, `"0.5-1i"`); `D_Γ` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Convergence,
    SigmaGrid,
    KernelTable,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PlotKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for the randomized chain admissibility check.
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<FunctionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<FunctionBlock>,
    #[serde(default)]
    pub chain: GamelinChain,
    #[serde(default)]
    pub scan: ScanGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

/// 1-based line of the first `key = ...` assignment or `[key]` table header.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let header = format!("[{key}]");
    text.lines().position(|l| {
        let l = l.trim();
        l == header
            || l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn config_err(text: &str, key: &str, msg: impl std::fmt::Display) -> Error {
    match line_of(text, key) {
        Some(n) => Error::Config(format!("line {n}: {msg}")),
        None => Error::Config(msg.to_string()),
    }
}

/// Parses and validates a config. Errors carry the offending line where one
/// can be located.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate_with(text)?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.validate_with("")
    }

    fn validate_with(&self, text: &str) -> Result<()> {
        let s = &self.domain.schedule;
        if s.is_empty() {
            return Err(config_err(text, "schedule", "M schedule is empty"));
        }
        if s[0] == 0 || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err(text, "schedule", "M schedule must be positive and strictly increasing"));
        }
        match (self.domain.kind, self.domain.q) {
            (DomainKindName::Disk, Some(_)) => {
                return Err(config_err(text, "q", "q given for a disk domain"))
            }
            (DomainKindName::Annulus, None) => {
                return Err(config_err(text, "kind", "annulus domain requires q"))
            }
            _ => {}
        }
        let domain = self.domain().map_err(|e| {
            let key = if matches!(e, Error::InvalidDomain(ref m) if m.contains("basepoint")) {
                "x0"
            } else {
                "q"
            };
            config_err(text, key, e)
        })?;
        if self.rho.is_some() && self.phi.is_some() {
            return Err(config_err(text, "phi", "exclusivity violation: both rho and phi given"));
        }
        for (name, block) in [("rho", &self.rho), ("phi", &self.phi)] {
            if let Some(b) = block {
                b.check(domain.components())
                    .map_err(|m| config_err(text, name, format!("{name}: {m}")))?;
            }
        }
        for (i, c) in self.chain.constraints().iter().enumerate() {
            for z in c.points() {
                if !domain.is_interior(z) {
                    return Err(Error::Config(format!(
                        "chain stage {i}: point {z} is not interior to the domain"
                    )));
                }
            }
        }
        let g = &self.scan;
        if !(g.delta > 0.0 && g.delta < 0.5) {
            return Err(config_err(text, "delta", "scan delta must lie in (0, 0.5)"));
        }
        if g.sigma_points == 0 || g.sphere_points == 0 {
            return Err(config_err(text, "sphere_points", "scan grid sizes must be positive"));
        }
        if let Some(k) = &self.kernel {
            for p in &k.points {
                if !domain.is_interior(C64::new(p[0], p[1])) {
                    return Err(config_err(text, "points", format!("kernel point {p:?} is not interior")));
                }
            }
            self.kernel_delta().map_err(|e| config_err(text, "delta", e))?;
        }
        Ok(())
    }

    /// Domain at the largest scheduled truncation.
    pub fn domain(&self) -> Result<DomainSpec> {
        let b = &self.domain;
        let m = *b.schedule.last().unwrap_or(&DEFAULT_SCHEDULE[2]);
        let x0 = b.x0.map_or(C64::new(0.0, 0.0), |p| C64::new(p[0], p[1]));
        let kind = match b.kind {
            DomainKindName::Disk => DomainKind::Disk,
            DomainKindName::Annulus => DomainKind::Annulus {
                q: b.q.unwrap_or(f64::NAN),
            },
        };
        let d = DomainSpec::new(kind, x0, m)?;
        match b.nodes {
            Some(n) => d.with_min_nodes(n),
            None => Ok(d),
        }
    }

    /// The kernel-dump Δ point (`D_Γ` by default).
    pub fn kernel_delta(&self) -> Result<DeltaPoint> {
        match self.kernel.as_ref().and_then(|k| k.delta.as_ref()) {
            None => Ok(delta_gamma(&self.chain)),
            Some(v) => {
                if v.len() != self.chain.len() {
                    return Err(Error::Config(format!(
                        "kernel delta has {} coordinates, chain has {} stages",
                        v.len(),
                        self.chain.len()
                    )));
                }
                let coords = v
                    .iter()
                    .map(|s| s.parse::<Projective>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Config(format!("kernel delta: {e}")))?;
                Ok(DeltaPoint::new(coords))
            }
        }
    }

    /// Copy with every default written out.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        let mut c = self.clone();
        let d = self.domain()?;
        c.domain.nodes = Some(d.nodes());
        if c.domain.kind == DomainKindName::Disk {
            c.domain.x0 = Some([0.0, 0.0]);
        }
        c.scan.distance_degree.get_or_insert(d.truncation());
        if let Some(k) = &mut c.kernel {
            if k.delta.is_none() {
                k.delta = Some(delta_gamma(&self.chain).coords().iter().map(|p| p.to_string()).collect());
            }
        }
        Ok(c)
    }
}

impl FunctionBlock {
    fn check(&self, comps: usize) -> std::result::Result<(), String> {
        let set = [
            self.coefficients.is_some(),
            self.log_coefficients.is_some(),
            self.samples.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if set != 1 {
            return Err("give exactly one of coefficients, log_coefficients, samples".into());
        }
        let n = match (&self.coefficients, &self.log_coefficients, &self.samples) {
            (Some(c), _, _) | (_, Some(c), _) => {
                for t in c.iter().flatten() {
                    if t[0].fract() != 0.0 || !t.iter().all(|v| v.is_finite()) {
                        return Err(format!("bad coefficient entry {t:?}"));
                    }
                }
                c.len()
            }
            (_, _, Some(s)) => {
                let len = s.first().map_or(0, |c| c.len());
                if len == 0 || s.iter().any(|c| c.len() != len) {
                    return Err("sample lists must be nonempty and of equal length".into());
                }
                if !s.iter().flatten().flatten().all(|v| v.is_finite()) {
                    return Err("samples must be finite".into());
                }
                s.len()
            }
            _ => unreachable!(),
        };
        if n != comps {
            return Err(format!("{n} component lists for a domain with {comps} boundary circles"));
        }
        Ok(())
    }

    /// Boundary function on `domain`'s grid.
    pub fn to_boundary(&self, domain: &DomainSpec) -> Result<BoundaryFunction> {
        fn sparse(c: &[Vec<[f64; 3]>]) -> Result<BoundaryFunction> {
            let terms: Vec<Vec<(i64, C64)>> = c
                .iter()
                .map(|t| t.iter().map(|e| (e[0] as i64, C64::new(e[1], e[2]))).collect())
                .collect();
            BoundaryFunction::from_sparse(&terms)
        }
        if let Some(c) = &self.coefficients {
            return sparse(c);
        }
        if let Some(c) = &self.log_coefficients {
            return boundary_exp(&sparse(c)?, domain);
        }
        let s = self
            .samples
            .as_ref()
            .ok_or_else(|| Error::Config("empty function block".into()))?;
        let vals: Vec<Vec<C64>> = s
            .iter()
            .map(|c| c.iter().map(|p| C64::new(p[0], p[1])).collect())
            .collect();
        let band = (vals[0].len() - 1) / 2;
        BoundaryFunction::from_samples(&vals, band)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[domain]\nkind = \"disk\"\n\n[rho]\ncoefficients = [[[0, 1.0, 0.0]]]\n";

    #[test]
    fn minimal_disk_uses_default_schedule() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.domain.schedule, vec![16, 32, 64]);
        assert_eq!(c.seed, 0);
        assert!(c.chain.is_empty());
        assert_eq!(c.scan, ScanGrid::default());
    }

    #[test]
    fn q_out_of_range() {
        let t = "[domain]\nkind = \"annulus\"\nq = 1.2\nx0 = [0.9, 0.0]\n";
        let e = parse_config(t).unwrap_err().to_string();
        assert!(e.contains("q outside (0,1)") && e.contains("line 3"), "{e}");
    }

    #[test]
    fn rho_and_phi_exclusive() {
        let t = format!("{MINIMAL}\n[phi]\ncoefficients = [[[0, 1.0, 0.0]]]\n");
        let e = parse_config(&t).unwrap_err().to_string();
        assert!(e.contains("exclusivity"), "{e}");
    }

    #[test]
    fn schedule_must_increase() {
        let t = "[domain]\nkind = \"disk\"\nschedule = [16, 16]\n";
        let e = parse_config(t).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("strictly increasing"), "{e}");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = parse_config("[domain]\nkind = disk\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse_config("[domain]\nkind = \"disk\"\nbogus = 1\n").unwrap_err().to_string();
        assert!(e.contains("bogus"), "{e}");
    }

    #[test]
    fn chain_records_and_resolution() {
        let t = "seed = 3\n[domain]\nkind = \"disk\"\nschedule = [8]\n\n[[chain]]\ntype = \"two_point\"\npoints = [[0.3, 0.0], [-0.3, 0.0]]\n\n[[chain]]\ntype = \"derivation\"\npoint = [0.0, 0.0]\norder = 1\n\n[kernel]\npoints = [[0.1, 0.0]]\n";
        let c = parse_config(t).unwrap();
        assert_eq!(c.chain.len(), 2);
        let r = c.resolved().unwrap();
        assert_eq!(r.kernel.unwrap().delta.unwrap(), vec!["1+0i".to_string(), "inf".to_string()]);
        assert_eq!(r.scan.distance_degree, Some(8));
        let back: ExperimentConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn exterior_chain_point_rejected() {
        let t = "[domain]\nkind = \"disk\"\n[[chain]]\ntype = \"derivation\"\npoint = [1.5, 0.0]\norder = 1\n";
        assert!(matches!(parse_config(t), Err(Error::Config(_))));
    }

    #[test]
    fn function_data_forms_agree() {
        let d = DomainSpec::disk(8).unwrap();
        let log = FunctionBlock {
            log_coefficients: Some(vec![vec![[1.0, 0.5, 0.0], [-1.0, 0.5, 0.0]]]),
            ..Default::default()
        };
        let f = log.to_boundary(&d).unwrap();
        let n = 129;
        let samples: Vec<[f64; 2]> = (0..n)
            .map(|j| [(2.0 * std::f64::consts::PI * j as f64 / n as f64).cos().exp(), 0.0])
            .collect();
        let s = FunctionBlock {
            samples: Some(vec![samples]),
            ..Default::default()
        };
        let g = s.to_boundary(&d).unwrap();
        let (a, b) = (f.samples_on(&d).unwrap(), g.samples_on(&d).unwrap());
        for (x, y) in a[0].iter().zip(&b[0]) {
            assert!((x - y).norm() < 1e-12);
        }
        let both = FunctionBlock {
            coefficients: Some(vec![vec![]]),
            samples: Some(vec![vec![[1.0, 0.0]]]),
            ..Default::default()
        };
        assert!(both.check(1).is_err());
    }
}
