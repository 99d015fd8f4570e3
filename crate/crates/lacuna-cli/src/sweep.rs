//! Weak-L¹ ratio sweep for the lacunary maximal function: for each instance,
//! W = ‖sup_j |S_{n_j} f|‖_{1,∞} against the shape ‖f‖₁ loglog(10 + ‖f‖∞/‖f‖₁),
//! with the full-cutoff maximal function computed from the same partial-sum
//! scan so the pointwise domination check is exact.

use crate::config::Config;
use crate::families;
use crate::report::{fmt_f64, CsvTable};
use lacuna_core::grid::{l1_norm, lp_norm, weak_l1_from_moduli};
use lacuna_core::lacunary::{carleson_scan, lacunary_maximal, LacunarySequence};
use lacuna_core::{weak_l1_norm, GridFunction};
use rayon::prelude::*;
use serde::Serialize;

/// loglog shape with the pinned inner constant 10 (natural logarithms).
pub fn loglog_shape(l1: f64, linf: f64) -> f64 {
    if l1 == 0.0 {
        return 0.0;
    }
    l1 * (10.0 + linf / l1).ln().ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub id: String,
    pub m: u32,
    pub l1: f64,
    pub linf: f64,
    pub weak_norm: f64,
    pub shape: f64,
    pub ratio: f64,
    pub lambda_star: f64,
    pub domination_ok: bool,
    #[serde(skip)]
    pub runtime_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub schema_version: u32,
    pub m: u32,
    pub alpha: u64,
    pub count: usize,
    pub c_main: f64,
    pub refine_m: Option<u32>,
    pub refine_c_main: Option<f64>,
    pub refine_drift: Option<f64>,
    pub rows: Vec<SweepRow>,
    pub refine_rows: Vec<SweepRow>,
}

/// The threshold achieving the weak norm: v_{i*} at the maximizing rank.
pub fn weak_norm_threshold(moduli: &[f64]) -> f64 {
    let mut v = moduli.to_vec();
    v.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite"));
    let n = v.len() as f64;
    let mut best = (0.0, 0.0f64);
    for (i, &vi) in v.iter().enumerate() {
        let score = vi * (i + 1) as f64 / n;
        if score > best.0 {
            best = (score, vi);
        }
    }
    best.1
}

fn scan_instance(family: &str, id: String, f: &GridFunction, seq: &LacunarySequence) -> SweepRow {
    let start = std::time::Instant::now();
    let scan = carleson_scan(f, seq).expect("sequence fits the grid");
    let domination_ok = scan
        .lacunary_max
        .iter()
        .zip(&scan.full_max)
        .all(|(l, f)| l <= f);
    let weak = weak_l1_from_moduli(&scan.lacunary_max);
    let l1 = l1_norm(f);
    let linf = lp_norm(f, f64::INFINITY).expect("p >= 1");
    let shape = loglog_shape(l1, linf);
    SweepRow {
        family: family.to_string(),
        id,
        m: f.m(),
        l1,
        linf,
        weak_norm: weak,
        shape,
        ratio: if shape > 0.0 { weak / shape } else { 0.0 },
        lambda_star: weak_norm_threshold(&scan.lacunary_max),
        domination_ok,
        runtime_ms: start.elapsed().as_millis(),
    }
}

/// Lacunary-only instance (FFT path) for the refinement grid.
fn fft_instance(family: &str, id: String, f: &GridFunction, seq: &LacunarySequence) -> SweepRow {
    let start = std::time::Instant::now();
    let maximal = lacunary_maximal(f, seq).expect("sequence fits the grid");
    let weak = weak_l1_norm(&maximal);
    let l1 = l1_norm(f);
    let linf = lp_norm(f, f64::INFINITY).expect("p >= 1");
    let shape = loglog_shape(l1, linf);
    SweepRow {
        family: family.to_string(),
        id,
        m: f.m(),
        l1,
        linf,
        weak_norm: weak,
        shape,
        ratio: if shape > 0.0 { weak / shape } else { 0.0 },
        lambda_star: weak_norm_threshold(&maximal.moduli()),
        domination_ok: true,
        runtime_ms: start.elapsed().as_millis(),
    }
}

pub fn run_sweep(cfg: &Config) -> Result<SweepOutcome, String> {
    let sweep = &cfg.sweep;
    let seq = LacunarySequence::new(sweep.alpha, sweep.count).map_err(|e| e.to_string())?;
    if seq.max_value() >= 1 << (sweep.m - 1) {
        return Err(format!(
            "sequence maximum {} does not fit below N/2 at m = {}",
            seq.max_value(),
            sweep.m
        ));
    }

    // dyadic indicator instances (the regression family), then extras
    let mut jobs: Vec<(String, String, GridFunction)> = Vec::new();
    for &s in &sweep.s_values {
        jobs.push((
            "dyadic".into(),
            format!("s{s}"),
            families::dyadic_indicator(sweep.m, s, 0),
        ));
    }
    for i in 0..sweep.extra_instances {
        let seed = cfg.run.seed.wrapping_add(1000 + i as u64);
        let mut rng = families::seeded_rng(seed);
        jobs.push((
            "union".into(),
            format!("seed{seed}"),
            families::indicator_union(sweep.m, 4, &mut rng),
        ));
        let mut rng = families::seeded_rng(seed ^ 0xb0b);
        jobs.push((
            "bounded".into(),
            format!("seed{seed}"),
            families::bounded_random(sweep.m, &mut rng),
        ));
        let mut rng = families::seeded_rng(seed ^ 0x5eed);
        jobs.push((
            "spikes".into(),
            format!("seed{seed}"),
            families::spikes(sweep.m, 3, &mut rng),
        ));
    }

    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|(family, id, f)| scan_instance(family, id.clone(), f, &seq))
        .collect();

    let c_main = rows
        .iter()
        .filter(|r| r.family == "dyadic")
        .map(|r| r.ratio)
        .fold(0.0f64, f64::max);

    let (refine_rows, refine_c_main, refine_drift) = match sweep.refine_m {
        0 => (Vec::new(), None, None),
        rm => {
            let refine: Vec<SweepRow> = sweep
                .s_values
                .par_iter()
                .map(|&s| {
                    let f = families::dyadic_indicator(rm, s, 0);
                    fft_instance("dyadic", format!("s{s}"), &f, &seq)
                })
                .collect();
            let c = refine.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
            let drift = if c_main > 0.0 { (c - c_main).abs() / c_main } else { 0.0 };
            (refine, Some(c), Some(drift))
        }
    };

    Ok(SweepOutcome {
        schema_version: 1,
        m: sweep.m,
        alpha: sweep.alpha,
        count: sweep.count,
        c_main,
        refine_m: (sweep.refine_m != 0).then_some(sweep.refine_m),
        refine_c_main,
        refine_drift,
        rows,
        refine_rows,
    })
}

pub fn sweep_csv(out: &SweepOutcome) -> CsvTable {
    let mut table = CsvTable::new(vec![
        "family",
        "id",
        "m",
        "l1",
        "linf",
        "weak_norm",
        "shape",
        "ratio",
        "lambda_star",
        "domination_ok",
    ]);
    for row in out.rows.iter().chain(&out.refine_rows) {
        table.push(vec![
            row.family.clone(),
            row.id.clone(),
            row.m.to_string(),
            fmt_f64(row.l1),
            fmt_f64(row.linf),
            fmt_f64(row.weak_norm),
            fmt_f64(row.shape),
            fmt_f64(row.ratio),
            fmt_f64(row.lambda_star),
            row.domination_ok.to_string(),
        ]);
    }
    table
}

pub fn sweep_svg_series(out: &SweepOutcome) -> Vec<(&'static str, Vec<(f64, f64)>)> {
    // ratio against loglog(10 + 1/|F|) over the dyadic family
    let mut pts: Vec<(f64, f64)> = out
        .rows
        .iter()
        .filter(|r| r.family == "dyadic" && r.l1 > 0.0)
        .map(|r| ((10.0 + 1.0 / r.l1).ln().ln(), r.ratio))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let cap: Vec<(f64, f64)> = pts.iter().map(|&(x, _)| (x, out.c_main)).collect();
    vec![("ratio", pts), ("c_main", cap)]
}
