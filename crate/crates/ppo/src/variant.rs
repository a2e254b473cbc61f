use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::PpoError;

/// The three trained algorithms compared by the evaluation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgorithmVariant {
    /// Single-objective PPO on the component sum, value dimension 1.
    PpoScalar,
    /// MOPPO whose policy never sees the weights.
    MoppoUnconditioned,
    /// MOPPO with the weight vector appended to the observation.
    MoppoConditioned,
}

impl AlgorithmVariant {
    pub const ALL: [AlgorithmVariant; 3] =
        [AlgorithmVariant::PpoScalar, AlgorithmVariant::MoppoUnconditioned, AlgorithmVariant::MoppoConditioned];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmVariant::PpoScalar => "ppo",
            AlgorithmVariant::MoppoUnconditioned => "moppo-nocond",
            AlgorithmVariant::MoppoConditioned => "moppo",
        }
    }

    pub fn is_scalar(self) -> bool {
        self == AlgorithmVariant::PpoScalar
    }

    pub fn is_conditioned(self) -> bool {
        self == AlgorithmVariant::MoppoConditioned
    }

    /// Value-head width for an environment with `objectives` objectives.
    pub fn value_dim(self, objectives: usize) -> usize {
        if self.is_scalar() {
            1
        } else {
            objectives
        }
    }
}

impl fmt::Display for AlgorithmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmVariant {
    type Err = PpoError;

    fn from_str(s: &str) -> Result<Self, PpoError> {
        match s {
            "ppo" | "ppo_scalar" => Ok(AlgorithmVariant::PpoScalar),
            "moppo-nocond" | "moppo_unconditioned" => Ok(AlgorithmVariant::MoppoUnconditioned),
            "moppo" | "moppo_conditioned" => Ok(AlgorithmVariant::MoppoConditioned),
            other => Err(PpoError::Config(format!("unknown variant {other:?} (ppo, moppo-nocond, moppo)"))),
        }
    }
}

impl From<AlgorithmVariant> for String {
    fn from(v: AlgorithmVariant) -> Self {
        v.name().to_string()
    }
}

impl TryFrom<String> for AlgorithmVariant {
    type Error = PpoError;

    fn try_from(s: String) -> Result<Self, PpoError> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for v in AlgorithmVariant::ALL {
            assert_eq!(v.name().parse::<AlgorithmVariant>().unwrap(), v);
        }
        assert!("sac".parse::<AlgorithmVariant>().is_err());
        assert_eq!(AlgorithmVariant::PpoScalar.value_dim(3), 1);
        assert_eq!(AlgorithmVariant::MoppoUnconditioned.value_dim(3), 3);
    }
}
