//! Fixture loading shared by the acceptance suite.

use std::path::PathBuf;

use crn_core::Network;

pub fn networks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../networks")
}

pub fn load(name: &str) -> Network {
    let path = networks_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    Network::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Edges of `target` as sorted pairs of indices into `original`'s complexes.
pub fn edges_in(original: &Network, target: &Network) -> Option<Vec<(usize, usize)>> {
    let mut edges = target
        .reaction_ends()
        .iter()
        .map(|&(a, b)| {
            let ia = original.complex_index(&target.complexes()[a]).ok()??;
            let ib = original.complex_index(&target.complexes()[b]).ok()??;
            Some((ia, ib))
        })
        .collect::<Option<Vec<_>>>()?;
    edges.sort_unstable();
    Some(edges)
}
