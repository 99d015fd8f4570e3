//! Structured decomposition report: label counts and mass totals per scale,
//! mass-bucket histograms, multiplicity statistics, tree counts, and the
//! level-set invariants as pass/fail fields.

use crate::config::Config;
use crate::families;
use crate::report::{fmt_f64, CsvTable};
use lacuna_core::classify::{classify, small_oscillation_products, Label};
use lacuna_core::dyadic::DyadicInterval;
use lacuna_core::lacunary::{linearize, LacunarySequence};
use lacuna_core::tile::{all_tiles, decompose_trees, mass, mass_partition, Tile};
use lacuna_core::GridFunction;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize)]
pub struct LabelDump {
    pub tile: Tile,
    pub label: String,
    pub k: Option<u32>,
    pub p_o: Option<DyadicInterval>,
    pub r: Option<u8>,
    pub l: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompStats {
    pub tile_count: usize,
    pub cluster_count: usize,
    pub residual_tiles: usize,
    pub group_count: usize,
    pub p2_members: usize,
    pub p1_members: usize,
    pub max_multiplicity: usize,
    pub multiplicity_histogram: BTreeMap<usize, usize>,
    pub mass_bucket_histogram: BTreeMap<u32, usize>,
    pub null_mass_tiles: usize,
    pub tree_count_p2: usize,
    pub tree_count_p1: usize,
    pub small_osc_max: f64,
    pub coverage_ok: bool,
    pub multiplicity_ok: bool,
    pub shells_ok: bool,
    pub k_max: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompReport {
    pub schema_version: u32,
    pub m: u32,
    pub alpha: u64,
    pub lambda: f64,
    pub levels: Vec<Vec<DyadicInterval>>,
    pub labels: Vec<LabelDump>,
    pub stats: DecompStats,
}

/// The exact level-shell checks: indicator vanishing and the pointwise
/// sample bound |f| <= 2^{-l+1} λ on Ī_l \ Ī_{l-1}.
fn shells_hold(
    f: &GridFunction,
    level_sets: &lacuna_core::LevelSets,
    lambda: f64,
) -> bool {
    let is_indicator = f
        .samples()
        .iter()
        .all(|z| z.norm() == 0.0 || (z.im == 0.0 && z.re == 1.0));
    for l in 1..=level_sets.k_max() {
        for i in 0..f.len() {
            if level_sets.union_contains_sample(l, i)
                && !level_sets.union_contains_sample(l - 1, i)
            {
                let bound = lambda * (0.5f64).powi(l as i32 - 1);
                if f.samples()[i].norm() > bound {
                    return false;
                }
                if is_indicator && f.samples()[i].norm() > bound {
                    return false;
                }
            }
        }
    }
    true
}

pub fn run_decompose(cfg: &Config) -> Result<DecompReport, String> {
    let d = &cfg.decompose;
    let seq = LacunarySequence::new(d.alpha, d.count).map_err(|e| e.to_string())?;
    if seq.max_value() >= 1 << (d.m - 1) {
        return Err("sequence maximum does not fit below N/2".into());
    }
    let mut rng = families::seeded_rng(cfg.run.seed);
    let f = families::generate(&d.function, d.m, &mut rng);
    let selector = linearize(&f, &seq).map_err(|e| e.to_string())?;
    let tiles = all_tiles(d.m).map_err(|e| e.to_string())?;
    let classification =
        classify(&tiles, &f, d.lambda, d.alpha, &selector).map_err(|e| e.to_string())?;

    let mut labels = Vec::new();
    for (idx, tile_labels) in classification.labels.iter().enumerate() {
        for label in tile_labels {
            let dump = match label {
                Label::Cluster => LabelDump {
                    tile: tiles[idx],
                    label: "cluster".into(),
                    k: None,
                    p_o: None,
                    r: None,
                    l: None,
                },
                Label::P2 { k, p_o, r } => LabelDump {
                    tile: tiles[idx],
                    label: "p2".into(),
                    k: Some(*k),
                    p_o: Some(*p_o),
                    r: Some(*r),
                    l: None,
                },
                Label::P1 { k, p_o, r } => LabelDump {
                    tile: tiles[idx],
                    label: "p1".into(),
                    k: Some(*k),
                    p_o: Some(*p_o),
                    r: Some(*r),
                    l: None,
                },
                Label::Residual { l } => LabelDump {
                    tile: tiles[idx],
                    label: "residual".into(),
                    k: None,
                    p_o: None,
                    r: None,
                    l: Some(*l),
                },
            };
            labels.push(dump);
        }
    }

    let part = mass_partition(&tiles, &selector);
    let mass_bucket_histogram: BTreeMap<u32, usize> =
        part.buckets.iter().map(|(&n, v)| (n, v.len())).collect();

    let mut multiplicity_histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for idx in 0..tiles.len() {
        *multiplicity_histogram
            .entry(classification.k_multiplicity(idx))
            .or_default() += 1;
    }

    let mut tree_count_p2 = 0;
    let mut tree_count_p1 = 0;
    for members in classification.groups.values() {
        let fam2: Vec<Tile> = members.p2.iter().map(|&(i, _)| tiles[i]).collect();
        let fam1: Vec<Tile> = members.p1.iter().map(|&(i, _)| tiles[i]).collect();
        tree_count_p2 += decompose_trees(&fam2).len();
        tree_count_p1 += decompose_trees(&fam1).len();
    }

    let small_osc_max = small_oscillation_products(&classification, &tiles)
        .into_iter()
        .map(|(_, v)| v)
        .fold(0.0f64, f64::max);

    let stats = DecompStats {
        tile_count: tiles.len(),
        cluster_count: classification.cluster.len(),
        residual_tiles: (0..tiles.len())
            .filter(|&i| !classification.residual_levels(i).is_empty())
            .count(),
        group_count: classification.groups.len(),
        p2_members: classification.groups.values().map(|g| g.p2.len()).sum(),
        p1_members: classification.groups.values().map(|g| g.p1.len()).sum(),
        max_multiplicity: classification.max_k_multiplicity,
        multiplicity_histogram,
        mass_bucket_histogram,
        null_mass_tiles: part.null_bucket.len(),
        tree_count_p2,
        tree_count_p1,
        small_osc_max,
        coverage_ok: classification.uncovered.is_empty(),
        multiplicity_ok: classification.max_k_multiplicity <= 14,
        shells_ok: shells_hold(&f, &classification.level_sets, d.lambda),
        k_max: classification.level_sets.k_max(),
    };

    Ok(DecompReport {
        schema_version: 1,
        m: d.m,
        alpha: d.alpha,
        lambda: d.lambda,
        levels: classification.level_sets.levels().to_vec(),
        labels,
        stats,
    })
}

/// CSV summary per (label, k, mass bucket) with counts and mass totals.
pub fn decompose_csv(report: &DecompReport, cfg: &Config) -> Result<CsvTable, String> {
    let d = &cfg.decompose;
    let seq = LacunarySequence::new(d.alpha, d.count).map_err(|e| e.to_string())?;
    let mut rng = families::seeded_rng(cfg.run.seed);
    let f = families::generate(&d.function, d.m, &mut rng);
    let selector = linearize(&f, &seq).map_err(|e| e.to_string())?;

    let bucket_of = |tile: &Tile| -> Option<u32> {
        let count = lacuna_core::tile::e_count(tile, &selector) as u64;
        (count > 0).then(|| lacuna_core::tile::mass_bucket(count, d.m - tile.level()))
    };
    type SummaryKey = (String, Option<u32>, Option<u32>);
    let mut rows: BTreeMap<SummaryKey, (usize, f64)> = BTreeMap::new();
    for dump in &report.labels {
        let key = (dump.label.clone(), dump.k.or(dump.l), bucket_of(&dump.tile));
        let slot = rows.entry(key).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += mass(&dump.tile, &selector);
    }
    let fmt_opt = |v: Option<u32>| v.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    let mut table =
        CsvTable::new(vec!["label", "k_or_l", "mass_bucket", "count", "mass_total"]);
    for ((label, k, bucket), (count, mass_total)) in rows {
        table.push(vec![
            label,
            fmt_opt(k),
            fmt_opt(bucket),
            count.to_string(),
            fmt_f64(mass_total),
        ]);
    }
    Ok(table)
}

/// CSV sample table of a grid function: index, position, re, im.
pub fn function_csv(f: &lacuna_core::GridFunction) -> CsvTable {
    let mut table = CsvTable::new(vec!["index", "x", "re", "im"]);
    let n = f.len() as f64;
    for (i, z) in f.samples().iter().enumerate() {
        table.push(vec![
            i.to_string(),
            fmt_f64(i as f64 / n),
            fmt_f64(z.re),
            fmt_f64(z.im),
        ]);
    }
    table
}

/// The function analyzed by the decompose section of this config.
pub fn decompose_function(cfg: &Config) -> lacuna_core::GridFunction {
    let mut rng = families::seeded_rng(cfg.run.seed);
    families::generate(&cfg.decompose.function, cfg.decompose.m, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FunctionSpec;

    #[test]
    fn default_decomposition_validates() {
        let cfg = Config::default();
        let report = run_decompose(&cfg).unwrap();
        assert!(report.stats.coverage_ok);
        assert!(report.stats.multiplicity_ok);
        assert!(report.stats.shells_ok);
        assert_eq!(report.stats.tile_count, 512);
    }

    #[test]
    fn zero_function_yields_empty_histograms() {
        let mut cfg = Config::default();
        cfg.decompose.function = FunctionSpec::Spikes { count: 0 };
        // Spikes{0} still places one spike; use Bounded with a zero-prob trick
        // instead: easiest honest zero function is an indicator with no bits,
        // which IndicatorUnion{0} produces.
        cfg.decompose.function = FunctionSpec::IndicatorUnion { pieces: 0 };
        let report = run_decompose(&cfg).unwrap();
        assert!(report.levels.iter().all(|l| l.is_empty()));
        assert_eq!(report.stats.group_count, 0);
        assert!(report.stats.coverage_ok);
    }

    #[test]
    fn quarter_indicator_matches_unit_scale_counts() {
        let mut cfg = Config::default();
        cfg.decompose.function = FunctionSpec::Dyadic { s: 2 };
        cfg.decompose.lambda = 0.25;
        let report = run_decompose(&cfg).unwrap();
        // every labeled tile appears in the dump; cluster tiles are the
        // frequency indices 0..=9 at level 5 (10 per space cell, 32 cells)
        assert_eq!(report.stats.cluster_count, 320);
        assert!(report.stats.coverage_ok && report.stats.multiplicity_ok);
    }
}
