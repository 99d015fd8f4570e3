//! Frozen regression baselines. The caps were recorded from the first
//! audited run of the default configuration (rounded up in the last shown
//! digit) and act as non-regression ceilings; the spec-pinned covering
//! constants are hard-coded where the algorithm guarantees them.

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baselines {
    pub schema: u32,
    pub sweep: SweepCaps,
    pub props: PropCaps,
    pub ineq: IneqCaps,
    pub cover: CoverCaps,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCaps {
    /// Max of W / (‖f‖₁ loglog(10 + ‖f‖∞/‖f‖₁)) over the dyadic sweep.
    pub c_main: f64,
    /// Allowed relative drift of c_main under m -> refine_m.
    pub refine_drift: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropCaps {
    pub cluster_ratio: f64,
    pub p2_ratio: f64,
    pub p1_ratio: f64,
    pub residual_ratio: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IneqCaps {
    pub c_z: f64,
    pub c_k: f64,
    pub c_d_half: f64,
    pub c_d_one: f64,
    pub c_b: f64,
    pub c_g: f64,
    /// Allowed relative drift of each corpus max under m -> m + 2.
    pub refine_drift: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverCaps {
    pub min_round_ratio: f64,
    pub msum_cap: f64,
}

pub const BASELINES_TOML: &str = include_str!("../baselines.toml");

impl Baselines {
    pub fn load() -> Self {
        toml::from_str(BASELINES_TOML).expect("baselines.toml is well-formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baselines_parse_and_are_positive() {
        let b = Baselines::load();
        assert_eq!(b.schema, 1);
        assert!(b.sweep.c_main > 0.0);
        assert!(b.cover.min_round_ratio == 1.0 / 500.0);
        assert!(b.cover.msum_cap == 500.0);
    }
}
