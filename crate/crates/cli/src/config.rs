//! Run configuration: one JSON document, overridden field by field from the command line.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cone_auglag::analysis::{DualOptions, ProbeOptions, SaddleOptions};
use cone_auglag::aug_lagrangians::FamilyParams;
use cone_auglag::axioms::SamplingPlan;
use cone_auglag::exact_al::{ExactAlParams, ExactProbeOptions};
use cone_auglag::solvers::{AlmConfig, ExactSolveConfig};

pub const SEED_ENV: &str = "CONE_AUGLAG_SEED";
pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub problem: Option<String>,
    pub family: Option<String>,
    pub construction: Option<String>,
    /// Cone for `axioms`, e.g. `"orthant:2,soc:3"`.
    pub cone: Option<String>,
    pub family_params: FamilyParams,
    pub exact_params: ExactAlParams,
    /// Penalty parameters for `dual` and `sublevel`.
    pub c: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    /// Pass threshold for `kkt` and `dual`, determinant tolerance for `alternance`.
    pub tol: Option<f64>,
    pub plan: SamplingPlan,
    pub alm: AlmConfig,
    pub exact_solve: ExactSolveConfig,
    pub saddle: SaddleOptions,
    pub dual: DualOptions,
    pub probe: ProbeOptions,
    pub exact_probe: ExactProbeOptions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<RunConfig> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RunConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Sha-256 of the compact JSON form with `out` cleared, so the output location does not
    /// change the hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Flag value, then config value, then `CONE_AUGLAG_SEED`, then the built-in default.
    pub fn resolve_seed(&mut self, flag: Option<u64>) -> anyhow::Result<u64> {
        let seed = match flag.or(self.seed) {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned integer"))?,
                Err(std::env::VarError::NotPresent) => DEFAULT_SEED,
                Err(e) => bail!("{SEED_ENV}: {e}"),
            },
        };
        self.seed = Some(seed);
        self.plan.seed = seed;
        self.saddle.seed = seed;
        self.dual.seed = seed;
        self.probe.seed = seed;
        self.exact_probe.probe.seed = seed;
        Ok(seed)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("reports"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = RunConfig { problem: Some("qp2".into()), c: Some(vec![1.0, 10.0]), ..RunConfig::default() };
        c.alm.max_outer = 7;
        let back = RunConfig::parse(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), c.to_json());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse(r#"{"problme": "qp2"}"#).is_err());
        assert!(RunConfig::parse(r#"{"alm": {"c_zero": 1}}"#).is_err());
    }

    #[test]
    fn hash_ignores_out() {
        let a = RunConfig::default();
        let b = RunConfig { out: Some("elsewhere".into()), ..RunConfig::default() };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { seed: Some(3), ..RunConfig::default() };
        assert_ne!(a.hash(), c.hash());
    }
}
