//! Structural analysis: the complex digraph, weak reversibility, linkage
//! classes, and the stoichiometric and kinetic subspaces.

use petgraph::algo::{has_path_connecting, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::StructureError;
use crate::linalg::independent_subset;
use crate::model::Network;
use crate::scalar::{serde_rational, Real, Scalar};
use crate::Rational;

/// Distinct complexes as nodes, one edge per reaction weighted by its rate.
#[derive(Clone, Debug)]
pub struct ComplexGraph {
    graph: DiGraph<usize, Rational>,
}

impl ComplexGraph {
    pub fn from_network(net: &Network) -> Self {
        let mut graph = DiGraph::with_capacity(net.num_complexes(), net.num_reactions());
        for i in 0..net.num_complexes() {
            graph.add_node(i);
        }
        for (rx, &(a, b)) in net.reactions().iter().zip(net.reaction_ends()) {
            graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), rx.rate.clone());
        }
        Self { graph }
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.node_count()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.edge_count()
    }

    /// `(from, to)` per reaction, in reaction order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph
            .edge_indices()
            .map(|e| {
                let (a, b) = self.graph.edge_endpoints(e).expect("edge exists");
                (a.index(), b.index())
            })
            .collect()
    }

    fn check(&self, i: usize) -> Result<NodeIndex, StructureError> {
        if i < self.num_nodes() {
            Ok(NodeIndex::new(i))
        } else {
            Err(StructureError::IndexOutOfRange {
                index: i,
                n: self.num_nodes(),
            })
        }
    }

    /// Directed path from complex `i` to complex `j`; the empty path counts.
    pub fn has_path(&self, i: usize, j: usize) -> Result<bool, StructureError> {
        let (a, b) = (self.check(i)?, self.check(j)?);
        Ok(a == b || has_path_connecting(&self.graph, a, b, None))
    }

    /// Strongly connected component id of every node.
    pub fn component_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.num_nodes()];
        for (c, comp) in tarjan_scc(&self.graph).into_iter().enumerate() {
            for node in comp {
                ids[node.index()] = c;
            }
        }
        ids
    }

    /// Every edge lies inside one strongly connected component.
    pub fn is_weakly_reversible(&self) -> bool {
        let ids = self.component_ids();
        self.edges().iter().all(|&(a, b)| ids[a] == ids[b])
    }

    /// Connected components of the underlying undirected graph, each sorted,
    /// ordered by smallest member.
    pub fn linkage_classes(&self) -> Vec<Vec<usize>> {
        let n = self.num_nodes();
        let mut uf = UnionFind::<usize>::new(n);
        for (a, b) in self.edges() {
            uf.union(a, b);
        }
        let labels = uf.into_labeling();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut seen: Vec<Option<usize>> = vec![None; n];
        for (i, &l) in labels.iter().enumerate() {
            match seen[l] {
                Some(c) => classes[c].push(i),
                None => {
                    seen[l] = Some(classes.len());
                    classes.push(vec![i]);
                }
            }
        }
        classes
    }
}

pub fn has_path(net: &Network, i: usize, j: usize) -> Result<bool, StructureError> {
    ComplexGraph::from_network(net).has_path(i, j)
}

pub fn is_weakly_reversible(net: &Network) -> bool {
    ComplexGraph::from_network(net).is_weakly_reversible()
}

pub fn linkage_classes(net: &Network) -> Vec<Vec<usize>> {
    ComplexGraph::from_network(net).linkage_classes()
}

/// A linear subspace given by an independent spanning set.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    pub basis: Vec<Vec<T>>,
}

impl<T: Scalar> Subspace<T> {
    fn spanned_by(vectors: Vec<Vec<T>>, dim: usize) -> Self {
        let keep = independent_subset(&vectors, dim);
        let basis = keep.into_iter().map(|i| vectors[i].clone()).collect();
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceReport {
    #[serde(serialize_with = "serde_rational::mat")]
    pub stoich_basis: Vec<Vec<Rational>>,
    #[serde(serialize_with = "serde_rational::mat")]
    pub kinetic_basis: Vec<Vec<Rational>>,
    pub s: usize,
    pub s_star: usize,
}

fn to_scalar<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("small integer")
}

/// Span of all reaction vectors `z' − z`.
pub fn stoichiometric_subspace(net: &Network) -> Subspace<Rational> {
    let vectors = net
        .reactions()
        .iter()
        .map(|rx| rx.reaction_vector().into_iter().map(to_scalar).collect())
        .collect();
    Subspace::spanned_by(vectors, net.num_species())
}

/// For each reactant complex `C`, the aggregated outflow `Σ_{C_i = C} k_i (z_i' − z_i)`.
/// Pairs are `(complex index, vector)` in complex order.
pub fn aggregated_outflows<T: Scalar>(net: &Network, rates: &[T]) -> Vec<(usize, Vec<T>)> {
    assert_eq!(rates.len(), net.num_reactions());
    let m = net.num_species();
    net.reactant_complexes()
        .iter()
        .map(|&c| {
            let mut v = vec![T::zero(); m];
            for ((rx, &(a, _)), k) in net.reactions().iter().zip(net.reaction_ends()).zip(rates) {
                if a != c {
                    continue;
                }
                for (vj, dj) in v.iter_mut().zip(rx.reaction_vector()) {
                    *vj = vj.clone() + k.clone() * to_scalar::<T>(dj);
                }
            }
            (c, v)
        })
        .collect()
}

/// Kinetic subspace for arbitrary rates: the span of the aggregated outflows.
/// Monomials of distinct reactant complexes are linearly independent functions
/// on the positive orthant, so this span equals the span of the image of `f`.
pub fn kinetic_subspace_for<T: Scalar>(net: &Network, rates: &[T]) -> Subspace<T> {
    let vectors = aggregated_outflows(net, rates).into_iter().map(|(_, v)| v).collect();
    Subspace::spanned_by(vectors, net.num_species())
}

/// Kinetic subspace at the network's own (exact) rate constants.
pub fn kinetic_subspace(net: &Network) -> Subspace<Rational> {
    kinetic_subspace_for(net, &net.rates())
}

pub fn subspace_report(net: &Network) -> SubspaceReport {
    let s = stoichiometric_subspace(net);
    let k = kinetic_subspace(net);
    SubspaceReport {
        s: s.dim(),
        s_star: k.dim(),
        stoich_basis: s.basis,
        kinetic_basis: k.basis,
    }
}

/// `(x0 + S) ∩ R^m_{>0}` or `(x0 + S*) ∩ R^m_{>0}`, as a point and a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityClass<F> {
    pub point: Vec<F>,
    pub basis: Vec<Vec<Rational>>,
    pub kinetic: bool,
}

impl<F: Real> CompatibilityClass<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn compatibility_class<F: Real>(
    net: &Network,
    x0: &[F],
    use_kinetic: bool,
) -> Result<CompatibilityClass<F>, StructureError> {
    if x0.len() != net.num_species() {
        return Err(StructureError::DimensionMismatch {
            expected: net.num_species(),
            found: x0.len(),
        });
    }
    if x0.iter().any(|&x| !(x > F::zero())) {
        return Err(StructureError::NonPositivePoint);
    }
    let basis = if use_kinetic {
        kinetic_subspace(net).basis
    } else {
        stoichiometric_subspace(net).basis
    };
    Ok(CompatibilityClass {
        point: x0.to_vec(),
        basis,
        kinetic: use_kinetic,
    })
}
