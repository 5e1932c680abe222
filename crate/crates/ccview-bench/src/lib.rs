//! Deterministic workload construction for the criterion benchmarks.

use ccview_core::generate::{
    derive_view, gen_model, ModelGenParams, MutationKind, ViewDeriveParams,
};
use ccview_core::{CncModel, CncView};

/// A model of `size` components (with `8*size` ports and up to `4*size`
/// connectors) and a view derived from it keeping `view_comps` components.
/// With `mutated` the view is damaged by the full mutation palette, so
/// verification has reasons to explain; without it the pair is satisfied.
/// Same arguments, same pair.
pub fn workload(size: usize, view_comps: usize, mutated: bool) -> (CncModel, CncView) {
    let params = ModelGenParams {
        components: size,
        max_subs: 8,
        port_types: 8,
        ports: 8 * size,
        max_connectors: 4 * size,
    };
    let m = gen_model(&params, size as u64 + 1).expect("parameters are feasible");
    let dp = ViewDeriveParams {
        keep_components: view_comps,
        max_keep_ports: 2 * view_comps,
        max_keep_connectors: 2 * view_comps,
        mutations: if mutated {
            MutationKind::ALL.to_vec()
        } else {
            Vec::new()
        },
    };
    let (v, _) = derive_view(&m, &dp, 7);
    (m, v)
}
