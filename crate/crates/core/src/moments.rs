use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moment constraints `E[ν^i] = k_i`, `i = 1..N`, shared by all agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    agents: usize,
    moments: Vec<f64>,
}

impl MomentSet {
    pub fn new(agents: usize, moments: Vec<f64>) -> Result<Self> {
        if agents == 0 {
            return Err(Error::domain("moment set needs at least one agent"));
        }
        if moments.is_empty() {
            return Err(Error::domain("moment set needs at least one moment"));
        }
        for (i, &k) in moments.iter().enumerate() {
            if !(k > 0.0 && k < 1.0) {
                return Err(Error::domain(format!("moment k{} = {k} must lie in (0, 1)", i + 1)));
            }
            // On [0, 1] the moment sequence is nonincreasing.
            if i > 0 && k > moments[i - 1] {
                return Err(Error::domain(format!(
                    "moment k{} = {k} exceeds k{} = {}",
                    i + 1,
                    i,
                    moments[i - 1]
                )));
            }
        }
        if moments.len() >= 2 && moments[1] < moments[0] * moments[0] {
            return Err(Error::domain(format!(
                "k2 = {} is below k1² = {}; no distribution attains it",
                moments[1],
                moments[0] * moments[0]
            )));
        }
        Ok(Self { agents, moments })
    }

    pub fn mean(mu: f64) -> Result<Self> {
        Self::new(1, vec![mu])
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn order(&self) -> usize {
        self.moments.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attainability() {
        assert!(MomentSet::new(1, vec![0.5, 1.0 / 3.0]).is_ok());
        assert!(MomentSet::new(1, vec![0.5, 0.2]).is_err());
        assert!(MomentSet::new(1, vec![0.5, 0.6]).is_err());
        assert!(MomentSet::new(1, vec![1.0]).is_err());
        assert!(MomentSet::new(1, vec![]).is_err());
    }
}
