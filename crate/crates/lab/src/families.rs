//! Named channel families buildable from CLI parameters.

use serde::{Deserialize, Serialize};

use consensus_lab_core::channel::{
    make_bec_pair, make_bsc_mix, make_noiseless, make_two_step_bec, BroadcastChannel,
};

use crate::LabError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Two-step binary erasure broadcast channel with parameters `p`, `q`.
    TwoStepBec { p: f64, q: f64 },
    /// Independent binary erasure pair with erasure probability `q`.
    BecPair { q: f64 },
    /// Coupled-BSC channel with a mixing third input, crossover `p`.
    BscMix { p: f64 },
    /// Noiseless broadcast of the given symbols.
    Noiseless { symbols: Vec<String> },
}

impl Family {
    pub fn build(&self) -> Result<BroadcastChannel, LabError> {
        let ch = match self {
            Family::TwoStepBec { p, q } => make_two_step_bec(*p, *q)?,
            Family::BecPair { q } => make_bec_pair(*q)?,
            Family::BscMix { p } => make_bsc_mix(*p)?,
            Family::Noiseless { symbols } => {
                let refs: Vec<&str> = symbols.iter().map(String::as_str).collect();
                make_noiseless(&refs)?
            }
        };
        Ok(ch)
    }

    /// Parses e.g. `two-step-bec:p=0.5,q=0.5` or `bsc-mix:p=0.25`.
    pub fn parse(text: &str) -> Result<Family, LabError> {
        let (name, args) = text.split_once(':').unwrap_or((text, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in args.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| LabError::Usage(format!("bad family argument {part:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |key: &str| -> Result<f64, LabError> {
            kv.get(key)
                .ok_or_else(|| LabError::Usage(format!("family {name} needs parameter {key}")))?
                .parse()
                .map_err(|_| LabError::Usage(format!("parameter {key} is not a number")))
        };
        match name {
            "two-step-bec" => Ok(Family::TwoStepBec { p: num("p")?, q: num("q")? }),
            "bec-pair" => Ok(Family::BecPair { q: num("q")? }),
            "bsc-mix" => Ok(Family::BscMix { p: num("p")? }),
            "noiseless" => {
                let symbols = kv
                    .get("symbols")
                    .map(|s| s.split('+').map(str::to_string).collect())
                    .unwrap_or_else(|| vec!["0".to_string(), "1".to_string()]);
                Ok(Family::Noiseless { symbols })
            }
            other => Err(LabError::Usage(format!("unknown channel family {other:?}"))),
        }
    }
}
