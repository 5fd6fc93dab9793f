use std::path::PathBuf;

use clap::ValueEnum;
use paycomm_core::constructions::{ConstructionId, Kind};
use paycomm_core::parse::parse_k_range;

use crate::commands::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Monotone,
    Ic,
    Gaps,
    Tie,
    Thresholds,
    Unique,
    Reach,
}

impl Check {
    pub const ALL: [Check; 7] =
        [Check::Monotone, Check::Ic, Check::Gaps, Check::Tie, Check::Thresholds, Check::Unique, Check::Reach];

    pub fn name(self) -> &'static str {
        match self {
            Check::Monotone => "monotone",
            Check::Ic => "ic",
            Check::Gaps => "gaps",
            Check::Tie => "tie",
            Check::Thresholds => "thresholds",
            Check::Unique => "unique",
            Check::Reach => "reach",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Sorted, one entry per (construction, k).
    pub ids: Vec<ConstructionId>,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub cap: u64,
}

impl ExperimentConfig {
    pub fn new(
        construction: &str,
        k: Option<&str>,
        mut checks: Vec<Check>,
        seed: u64,
        out: Option<PathBuf>,
        cap: u64,
    ) -> Result<Self, Failure> {
        let ks = k.map(parse_k_range).transpose().map_err(|e| Failure::Usage(e.to_string()))?;
        let mut ids = Vec::new();
        if construction.contains(':') {
            if ks.is_some() {
                return Err(Failure::Usage("give k either in the construction id or with --k".into()));
            }
            ids.push(construction.parse::<ConstructionId>().map_err(|e| Failure::Usage(e.to_string()))?);
        } else {
            let all = construction.trim() == "all";
            let kinds: Vec<Kind> = if all {
                Kind::ALL.to_vec()
            } else {
                vec![construction.parse::<Kind>().map_err(|e| Failure::Usage(e.to_string()))?]
            };
            for kind in kinds {
                match &ks {
                    None => ids.push(ConstructionId::new(kind, kind.default_k()).expect("default k is supported")),
                    Some(ks) => {
                        for &k in ks {
                            match ConstructionId::new(kind, k) {
                                Ok(id) => ids.push(id),
                                // With `all`, constructions skip the k they do not support.
                                Err(_) if all => {}
                                Err(e) => return Err(Failure::Usage(e.to_string())),
                            }
                        }
                    }
                }
            }
            if ids.is_empty() {
                return Err(Failure::Usage(format!("no construction supports k={}", k.unwrap_or_default())));
            }
        }
        ids.sort();
        if checks.is_empty() {
            checks = Check::ALL.to_vec();
        }
        checks.sort();
        checks.dedup();
        Ok(ExperimentConfig { ids, checks, seed, out, cap })
    }
}
