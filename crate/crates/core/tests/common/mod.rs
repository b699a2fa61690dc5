#![allow(dead_code)]

use std::path::PathBuf;

use crn_core::model::Complex;
use crn_core::scalar::parse_rational;
use crn_core::{Network, Rational};

pub fn networks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../networks")
}

pub fn load(name: &str) -> Network {
    let path = networks_dir().join(name);
    Network::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

pub fn qs(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| parse_rational(s).unwrap()).collect()
}

pub fn complex(text: &str, species: &str) -> Complex {
    let net = Network::parse(&format!("species: {species}\n{text} -> 0 ; k = 1")).unwrap();
    net.reactions()[0].reactant.clone()
}

/// Edges of `target` as sorted index pairs into `original`'s complexes.
pub fn edges_in(original: &Network, target: &Network) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = target
        .reaction_ends()
        .iter()
        .map(|&(a, b)| {
            let ia = original.complex_index(&target.complexes()[a]).unwrap().unwrap();
            let ib = original.complex_index(&target.complexes()[b]).unwrap().unwrap();
            (ia, ib)
        })
        .collect();
    edges.sort_unstable();
    edges
}
