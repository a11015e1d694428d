//! Finite Laurent series `Σ a_k z^k` for `k` in a contiguous index range.
//!
//! On the disk these are truncated power series (`min_pow = 0`); on the
//! annulus negative powers are allowed.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    min_pow: i64,
    coeffs: Vec<C64>,
}

/// `k (k-1) ... (k-n+1)`, valid for negative `k`.
pub fn falling_factorial(k: i64, n: u32) -> f64 {
    (0..n as i64).map(|j| (k - j) as f64).product()
}

impl Laurent {
    pub fn new(min_pow: i64, coeffs: Vec<C64>) -> Self {
        Laurent { min_pow, coeffs }
    }

    /// Power series `Σ_{k≥0} a_k z^k`.
    pub fn power_series(coeffs: Vec<C64>) -> Self {
        Laurent::new(0, coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Laurent::power_series(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Laurent::new(0, Vec::new())
    }

    pub fn constant(c: C64) -> Self {
        Laurent::new(0, vec![c])
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Laurent::new(k, vec![c])
    }

    pub fn min_pow(&self) -> i64 {
        self.min_pow
    }

    /// Highest stored power; `min_pow - 1` for the empty series.
    pub fn max_pow(&self) -> i64 {
        self.min_pow + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> C64 {
        if k < self.min_pow || k > self.max_pow() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.min_pow) as usize]
        }
    }

    pub fn is_power_series(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| self.min_pow + i as i64 >= 0 || c.norm() == 0.0)
    }

    /// Iterator over `(power, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.min_pow + i as i64, c))
    }

    /// `order`-th derivative evaluated at `z`, term by term.
    pub fn eval_deriv(&self, z: C64, order: u32) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in self.terms() {
            if c.norm() == 0.0 {
                continue;
            }
            let ff = falling_factorial(k, order);
            if ff == 0.0 {
                continue;
            }
            let p = k - order as i64;
            if p < 0 && z.norm() == 0.0 {
                return Err(Error::Evaluation { re: z.re, im: z.im });
            }
            acc += c * ff * z.powi(p as i32);
        }
        Ok(acc)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.eval_deriv(z, 0)
    }

    pub fn derivative(&self) -> Laurent {
        let d: Vec<C64> = self.terms().map(|(k, c)| c * k as f64).collect();
        if self.min_pow == 0 && !d.is_empty() {
            Laurent::new(0, d[1..].to_vec())
        } else {
            Laurent::new(self.min_pow - 1, d)
        }
    }

    pub fn scale(&self, s: C64) -> Laurent {
        Laurent::new(self.min_pow, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.min_pow.min(other.min_pow);
        let hi = self.max_pow().max(other.max_pow());
        Laurent::new(
            lo,
            (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        )
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Laurent::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Laurent::new(self.min_pow + other.min_pow, out)
    }

    /// Keep only powers in `lo..=hi`.
    pub fn truncate(&self, lo: i64, hi: i64) -> Laurent {
        if hi < lo {
            return Laurent::new(lo, Vec::new());
        }
        Laurent::new(lo, (lo..=hi).map(|k| self.coeff(k)).collect())
    }

    /// Power series of `exp(self)` through degree `degree`.
    ///
    /// Uses `F' = f' F`, i.e. `k F_k = Σ_{j=1}^{k} j f_j F_{k-j}`. Errors when
    /// the last quarter of the result carries more than `1e-8` of the total
    /// coefficient mass.
    pub fn exp_power_series(&self, degree: usize) -> Result<Laurent> {
        if !self.is_power_series() {
            return Err(Error::Precondition(
                "series exponentiation needs a power series".into(),
            ));
        }
        let f: Vec<C64> = (0..=degree as i64).map(|k| self.coeff(k)).collect();
        let mut out = vec![C64::new(0.0, 0.0); degree + 1];
        out[0] = f[0].exp();
        for k in 1..=degree {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += f[j] * (j as f64) * out[k - j];
            }
            out[k] = s / k as f64;
        }
        check_tail(&out)?;
        Ok(Laurent::power_series(out))
    }

    /// Power series of `1/self` through degree `degree`; needs `self(0) != 0`.
    pub fn reciprocal_power_series(&self, degree: usize) -> Result<Laurent> {
        if !self.is_power_series() {
            return Err(Error::Precondition(
                "series reciprocal needs a power series".into(),
            ));
        }
        let f0 = self.coeff(0);
        if f0.norm() == 0.0 {
            return Err(Error::Domain("reciprocal of a series vanishing at 0".into()));
        }
        let mut out = vec![C64::new(0.0, 0.0); degree + 1];
        out[0] = f0.inv();
        for k in 1..=degree {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.coeff(j as i64) * out[k - j];
            }
            out[k] = -s / f0;
        }
        check_tail(&out)?;
        Ok(Laurent::power_series(out))
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_tail(coeffs: &[C64]) -> Result<()> {
    let split = coeffs.len() - coeffs.len() / 4;
    let head: f64 = coeffs[..split].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let tail: f64 = coeffs[split..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if head == 0.0 || tail / head >= 1e-8 {
        return Err(Error::Truncation(format!(
            "series tail mass ratio {:e} at degree {}",
            if head == 0.0 { f64::INFINITY } else { tail / head },
            coeffs.len() - 1
        )));
    }
    Ok(())
}
