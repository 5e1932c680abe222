//! Scaling measurements over generated model/view pairs.
//!
//! For each size `n` a model with `n` components, `8n` ports, and up to
//! `4n` connectors is generated. Two setups derive the views: `Variable`
//! keeps a fixed fraction of the model in the view (`n/5` components), so
//! views grow with the model; `Fixed` keeps a constant view size (12
//! components). Both mutate the derived views (a mix drawn from all
//! mutation kinds), verify, and time the full verification call plus the
//! slowest single-witness rebuild. Workloads are seeded and reproducible;
//! only the timings vary between runs.

use serde::Serialize;
use std::time::Instant;

use crate::generate::{derive_view, gen_model, ModelGenParams, MutationKind, ViewDeriveParams};
use crate::rng::SplitMix64;
use crate::verify::verify;
use crate::witness::{build_for_reason, build_satisfaction_witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Setup {
    /// View size grows with model size (one fifth of the components).
    Variable,
    /// View size stays constant regardless of model size.
    Fixed,
}

impl Setup {
    pub fn name(&self) -> &'static str {
        match self {
            Setup::Variable => "variable",
            Setup::Fixed => "fixed",
        }
    }
}

/// One measured verification.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub setup: Setup,
    pub size: usize,
    pub repeat: usize,
    pub verify_ms: f64,
    pub max_witness_ms: f64,
    pub n_reasons: usize,
}

/// Aggregates over the repeats of one `(setup, size)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub setup: Setup,
    pub size: usize,
    pub mean_verify_ms: f64,
    pub max_verify_ms: f64,
    pub mean_max_witness_ms: f64,
    pub mean_reasons: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<BenchSummary>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setup,size,repeat,verify_ms,max_witness_ms,n_reasons\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.4},{:.4},{}\n",
                r.setup.name(),
                r.size,
                r.repeat,
                r.verify_ms,
                r.max_witness_ms,
                r.n_reasons
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numbers and strings serialize")
    }
}

fn model_params(size: usize) -> ModelGenParams {
    ModelGenParams {
        components: size,
        max_subs: 8,
        port_types: 8,
        ports: 8 * size,
        max_connectors: 4 * size,
    }
}

fn view_shape(setup: Setup, size: usize) -> (usize, usize) {
    match setup {
        Setup::Variable => {
            let comps = (size / 5).max(1);
            (comps, comps / 3)
        }
        Setup::Fixed => (12.min(size), 6),
    }
}

/// Independent per-cell seed so cells can be reproduced in isolation.
fn cell_seed(base: u64, setup: Setup, size: usize, repeat: usize) -> u64 {
    let tag = match setup {
        Setup::Variable => 1u64,
        Setup::Fixed => 2u64,
    };
    let mut r = SplitMix64::new(base ^ (tag << 60) ^ ((size as u64) << 32) ^ repeat as u64);
    r.next_u64()
}

/// Runs the protocol: every setup at every size, `repeats` times each.
pub fn run_bench(setups: &[Setup], sizes: &[usize], repeats: usize, seed: u64) -> BenchReport {
    let mut rows = Vec::new();
    for &setup in setups {
        for &size in sizes {
            for repeat in 0..repeats {
                let cell = cell_seed(seed, setup, size, repeat);
                let mut rng = SplitMix64::new(cell);
                let m = gen_model(&model_params(size), rng.next_u64())
                    .expect("bench parameters are feasible");
                let (view_comps, n_mutations) = view_shape(setup, size);
                let mutations: Vec<MutationKind> = (0..n_mutations)
                    .map(|_| *rng.pick(&MutationKind::ALL).expect("nonempty"))
                    .collect();
                let params = ViewDeriveParams {
                    keep_components: view_comps,
                    max_keep_ports: 2 * view_comps,
                    max_keep_connectors: 2 * view_comps,
                    mutations,
                };
                let (v, _) = derive_view(&m, &params, rng.next_u64());

                let t0 = Instant::now();
                let result = verify(&m, &v);
                let verify_ms = t0.elapsed().as_secs_f64() * 1e3;

                let mut max_witness_ms: f64 = 0.0;
                if result.satisfied {
                    let t = Instant::now();
                    let _ = build_satisfaction_witness(&m, &v).expect("satisfied");
                    max_witness_ms = t.elapsed().as_secs_f64() * 1e3;
                } else {
                    for reason in &result.reasons {
                        let t = Instant::now();
                        let _ = build_for_reason(&m, &v, reason);
                        max_witness_ms = max_witness_ms.max(t.elapsed().as_secs_f64() * 1e3);
                    }
                }
                rows.push(BenchRow {
                    setup,
                    size,
                    repeat,
                    verify_ms,
                    max_witness_ms,
                    n_reasons: result.reasons.len(),
                });
            }
        }
    }
    let mut summaries = Vec::new();
    for &setup in setups {
        for &size in sizes {
            let cell: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.setup == setup && r.size == size)
                .collect();
            if cell.is_empty() {
                continue;
            }
            let n = cell.len() as f64;
            summaries.push(BenchSummary {
                setup,
                size,
                mean_verify_ms: cell.iter().map(|r| r.verify_ms).sum::<f64>() / n,
                max_verify_ms: cell.iter().map(|r| r.verify_ms).fold(0.0, f64::max),
                mean_max_witness_ms: cell.iter().map(|r| r.max_witness_ms).sum::<f64>() / n,
                mean_reasons: cell.iter().map(|r| r.n_reasons as f64).sum::<f64>() / n,
            });
        }
    }
    BenchReport { rows, summaries }
}
