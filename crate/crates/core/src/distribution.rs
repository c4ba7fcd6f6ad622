use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Absolute tolerance on the total mass of a distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A probability vector over an indexed finite set.
///
/// Used for mixed strategies, beliefs and priors alike. Weights are
/// non-negative and sum to one within [`NORMALIZATION_TOL`].
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FiniteDistribution {
    weights: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(problem) = Self::check(&weights) {
            return Err(GameError::malformed(problem));
        }
        Ok(FiniteDistribution { weights })
    }

    /// Returns a description of what is wrong with `weights`, if anything.
    pub fn check(weights: &[f64]) -> Option<String> {
        if weights.is_empty() {
            return Some("distribution over an empty set".into());
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Some(format!("weight {i} is {w}, expected a finite non-negative value"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Some(format!("weights sum to {total}, not 1"));
        }
        None
    }

    /// Normalizes non-negative weights with a positive total.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(GameError::malformed(format!(
                "cannot normalize weights {weights:?}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over an empty set");
        FiniteDistribution {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn point(n: usize, index: usize) -> Self {
        assert!(index < n, "point mass index {index} out of range {n}");
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        FiniteDistribution { weights }
    }

    /// Uniform over the allowed indices.
    pub fn uniform_over(n: usize, allowed: &[usize]) -> Self {
        assert!(!allowed.is_empty());
        let mut weights = vec![0.0; n];
        for &i in allowed {
            weights[i] = 1.0 / allowed.len() as f64;
        }
        FiniteDistribution { weights }
    }

    /// Clamps tiny negative values from floating-point noise and renormalizes.
    ///
    /// Values below `-tol` are rejected.
    pub fn cleaned(raw: &[f64], tol: f64) -> Result<Self> {
        if raw.iter().any(|w| *w < -tol || !w.is_finite()) {
            return Err(GameError::malformed(format!(
                "weights {raw:?} are not a distribution"
            )));
        }
        let clipped: Vec<f64> = raw.iter().map(|w| w.max(0.0)).collect();
        Self::from_unnormalized(clipped)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().copied()
    }

    /// Indices with weight above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_pure(&self, tol: f64) -> Option<usize> {
        match self.support(tol).as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    pub fn expectation(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Sup-norm distance; distributions of different length are infinitely far apart.
    pub fn sup_distance(&self, other: &FiniteDistribution) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for FiniteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.weights).finish()
    }
}

impl TryFrom<Vec<f64>> for FiniteDistribution {
    type Error = GameError;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        FiniteDistribution::new(weights)
    }
}

impl From<FiniteDistribution> for Vec<f64> {
    fn from(d: FiniteDistribution) -> Vec<f64> {
        d.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        assert!(FiniteDistribution::new(vec![0.6, 0.6]).is_err());
        assert!(FiniteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(FiniteDistribution::new(vec![]).is_err());
        assert!(FiniteDistribution::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn accepts_within_tolerance() {
        let d = FiniteDistribution::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn support_and_purity() {
        let d = FiniteDistribution::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.support(1e-12), vec![1]);
        assert_eq!(d.is_pure(1e-12), Some(1));
        assert_eq!(FiniteDistribution::uniform(2).is_pure(1e-12), None);
    }

    #[test]
    fn cleaned_clips_noise() {
        let d = FiniteDistribution::cleaned(&[-1e-13, 1.0 + 1e-13], 1e-9).unwrap();
        assert_eq!(d.get(0), 0.0);
        assert!(FiniteDistribution::cleaned(&[-0.1, 1.1], 1e-9).is_err());
    }

    #[test]
    fn serde_validates() {
        let d: FiniteDistribution = serde_json::from_str("[0.25,0.75]").unwrap();
        assert_eq!(d.get(1), 0.75);
        assert!(serde_json::from_str::<FiniteDistribution>("[0.6,0.6]").is_err());
    }
}
