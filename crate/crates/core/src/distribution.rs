use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported distribution on `[0, 1]^J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct GridDistribution {
    dims: usize,
    support: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    dims: usize,
    support: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<RawDistribution> for GridDistribution {
    type Error = Error;

    fn try_from(r: RawDistribution) -> Result<Self> {
        GridDistribution::new(r.dims, r.support, r.weights)
    }
}

pub const WEIGHT_TOL: f64 = 1e-12;

impl GridDistribution {
    pub fn new(dims: usize, support: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::invariant("distribution needs at least one dimension"));
        }
        if support.len() != weights.len() || support.is_empty() {
            return Err(Error::invariant(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        for (k, p) in support.iter().enumerate() {
            if p.len() != dims {
                return Err(Error::invariant(format!("support point {k} has {} coordinates, expected {dims}", p.len())));
            }
            if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::invariant(format!("support point {k} = {p:?} leaves [0, 1]")));
            }
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invariant(format!("weight {k} = {} is negative or not finite", weights[k])));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invariant(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { dims, support, weights })
    }

    /// One-dimensional convenience constructor.
    pub fn univariate(points: &[f64], weights: &[f64]) -> Result<Self> {
        Self::new(1, points.iter().map(|&v| vec![v]).collect(), weights.to_vec())
    }

    /// Uniform weights over `points`.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let mut weights = vec![w; points.len()];
        // Put rounding residue on the last atom so the sum is 1 to the ulp.
        let rest: f64 = weights[..points.len() - 1].iter().sum();
        weights[points.len() - 1] = 1.0 - rest;
        Self::univariate(points, &weights)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expectation(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.support.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    pub fn mean(&self, axis: usize) -> f64 {
        self.expectation(|p| p[axis])
    }

    /// `(1 − eps)·self + eps·other` on the union of supports.
    pub fn mix(&self, other: &GridDistribution, eps: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::domain("cannot mix distributions of different dimension"));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::domain(format!("mixing weight {eps} is outside [0, 1]")));
        }
        let mut support = self.support.clone();
        let mut weights: Vec<f64> = self.weights.iter().map(|w| (1.0 - eps) * w).collect();
        for (p, w) in other.support.iter().zip(&other.weights) {
            match support.iter().position(|q| q == p) {
                Some(k) => weights[k] += eps * w,
                None => {
                    support.push(p.clone());
                    weights.push(eps * w);
                }
            }
        }
        Self::new(self.dims, support, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights() {
        assert!(GridDistribution::univariate(&[0.0, 1.0], &[0.5, 0.4]).is_err());
        assert!(GridDistribution::univariate(&[0.0, 1.0], &[1.5, -0.5]).is_err());
        assert!(GridDistribution::univariate(&[0.0, 1.2], &[0.5, 0.5]).is_err());
        let d = GridDistribution::univariate(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(d.mean(0), 0.5);
    }

    #[test]
    fn json_rejects_mass_point_nine() {
        let text = r#"{"dims":1,"support":[[0.2],[0.8]],"weights":[0.45,0.45]}"#;
        assert!(serde_json::from_str::<GridDistribution>(text).is_err());
        let ok = r#"{"dims":1,"support":[[0.2],[0.8]],"weights":[0.5,0.5]}"#;
        assert!(serde_json::from_str::<GridDistribution>(ok).is_ok());
    }

    #[test]
    fn mixing_keeps_mass() {
        let a = GridDistribution::uniform(&[0.0, 0.5, 1.0]).unwrap();
        let b = GridDistribution::univariate(&[0.5, 0.25], &[0.5, 0.5]).unwrap();
        let m = a.mix(&b, 0.3).unwrap();
        assert_eq!(m.support().len(), 4);
        assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
