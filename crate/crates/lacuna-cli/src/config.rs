//! TOML experiment configuration with defaults matching the checked-in
//! baselines. Unknown keys and out-of-range values are configuration errors.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub run: RunSection,
    pub sweep: SweepSection,
    pub props: PropsSection,
    pub decompose: DecomposeSection,
    pub cover: CoverSection,
    pub ineq: IneqSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// 0 = leave the rayon pool at its default size.
    pub threads: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 7, threads: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub m: u32,
    /// Recompute the ratio table on a finer grid to measure drift (0 = off).
    pub refine_m: u32,
    pub alpha: u64,
    pub count: usize,
    /// Dyadic indicator sizes |F| = 2^-s.
    pub s_values: Vec<u32>,
    /// Extra random-family instances per family kind.
    pub extra_instances: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            m: 14,
            refine_m: 16,
            alpha: 2,
            count: 12,
            s_values: (1..=10).collect(),
            extra_instances: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropsSection {
    pub m: u32,
    pub alpha: u64,
    pub count: usize,
    pub instances: usize,
    /// Multiplier in the rule λ = c_lambda |F| / |Ḡ|.
    pub c_lambda: f64,
}

impl Default for PropsSection {
    fn default() -> Self {
        Self { m: 12, alpha: 2, count: 10, instances: 20, c_lambda: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeSection {
    pub m: u32,
    pub alpha: u64,
    pub count: usize,
    pub lambda: f64,
    pub function: FunctionSpec,
}

impl Default for DecomposeSection {
    fn default() -> Self {
        Self {
            m: 10,
            alpha: 2,
            count: 8,
            lambda: 0.25,
            function: FunctionSpec::Dyadic { s: 2 },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverSection {
    pub instances: usize,
    pub max_intervals: usize,
    /// Finest dyadic level of generated intervals.
    pub level: u32,
}

impl Default for CoverSection {
    fn default() -> Self {
        Self { instances: 10_000, max_intervals: 512, level: 12 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IneqSection {
    pub m: u32,
    pub corpus: usize,
    pub j_max: usize,
    /// Also evaluate at m + 2 and report drift.
    pub refine: bool,
}

impl Default for IneqSection {
    fn default() -> Self {
        Self { m: 16, corpus: 48, j_max: 12, refine: true }
    }
}

/// Function families driven by the sweep and decomposition reports.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// χ of the dyadic block [0, 2^-s).
    Dyadic { s: u32 },
    /// Union of `pieces` random disjoint dyadic cells.
    IndicatorUnion { pieces: usize },
    /// Random complex samples with |f| <= 1 everywhere.
    Bounded,
    /// `count` isolated unit spikes.
    Spikes { count: usize },
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: Config =
            toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.sweep.m < 10 || self.sweep.m > 18 {
            return Err(format!("sweep.m = {} out of range 10..=18", self.sweep.m));
        }
        let r = self.sweep.refine_m;
        if r != 0 && (r <= self.sweep.m || r > 18) {
            return Err(format!("sweep.refine_m = {r} must be 0 or exceed sweep.m and stay <= 18"));
        }
        if self.sweep.alpha < 2 || self.props.alpha < 2 || self.decompose.alpha < 2 {
            return Err("alpha must be >= 2".into());
        }
        if self.props.m < 10 || self.props.m > 16 {
            return Err(format!("props.m = {} out of range 10..=16", self.props.m));
        }
        if self.props.c_lambda <= 0.0 || self.props.c_lambda.is_nan() {
            return Err("props.c_lambda must be positive".into());
        }
        if self.decompose.m < 10 || self.decompose.m > 16 {
            return Err(format!("decompose.m = {} out of range 10..=16", self.decompose.m));
        }
        if !(self.decompose.lambda > 0.0 && self.decompose.lambda < 1.0) {
            return Err("decompose.lambda must lie in (0, 1)".into());
        }
        if self.cover.max_intervals == 0 || self.cover.level > 14 {
            return Err("cover: need max_intervals >= 1 and level <= 14".into());
        }
        if self.ineq.m < 10 || self.ineq.m + 2 > 18 {
            return Err(format!("ineq.m = {} out of range 10..=16", self.ineq.m));
        }
        if self.ineq.j_max == 0 || self.ineq.j_max > 14 {
            return Err("ineq.j_max out of range 1..=14".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "[sweep]\nm = 14\nbogus = 3\n";
        assert!(toml::from_str::<Config>(text).is_err());
    }

    #[test]
    fn function_spec_round_trips() {
        let spec = FunctionSpec::IndicatorUnion { pieces: 4 };
        let text = toml::to_string(&spec).unwrap();
        let back: FunctionSpec = toml::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
