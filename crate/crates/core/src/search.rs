//! Search for weakly reversible targets linearly conjugate to a given network.
//!
//! Candidates live on the reactant complexes of the input, optionally
//! augmented with up to `max_phantoms` of its product complexes. Each
//! complex's out-neighbourhood is enumerated separately and pruned by the
//! local part of the conjugacy condition, which only involves that complex.
//! Surviving combinations are kept if weakly reversible and then solved
//! exactly. When complex balancing is required and the witness cone has free
//! directions beyond overall scale, the section `Σv = const` of the cone is
//! swept on a grid and refined by Levenberg–Marquardt on the log-linear
//! balancing residual; the refined point is rounded to a rational inside the
//! exact solution space before the final check.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::balance::{KirchhoffLayout, LOG_RESIDUAL_TOL};
use crate::conjugacy::{ConjugacySystem, ConjugacyWitness, Scaling};
use crate::dynamics::OdeSystem;
use crate::error::SearchError;
use crate::linalg::{independent_subset, solve_linear, Matrix};
use crate::lp::strictly_positive_solution;
use crate::model::{Complex, Network, Reaction};
use crate::scalar::{approximate_rational, Scalar};
use crate::Rational;

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub max_complexes: usize,
    pub allow_phantoms: bool,
    pub max_phantoms: usize,
    pub require_complex_balanced: bool,
    /// Upper bound on weakly reversible candidates handed to the exact solver.
    pub max_candidates: usize,
    pub dedup: bool,
    pub scaling: Scaling,
    /// Grid points per free direction of the witness section.
    pub sweep_points: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_complexes: 7,
            allow_phantoms: true,
            max_phantoms: 2,
            require_complex_balanced: false,
            max_candidates: 200_000,
            dedup: true,
            scaling: Scaling::Free,
            sweep_points: 33,
        }
    }
}

fn network_text<S: Serializer>(net: &Network, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&net.to_text())
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    /// Target structure with unit placeholder rates; see [`SearchResult::instantiated`].
    #[serde(serialize_with = "network_text")]
    pub target: Network,
    pub witness: ConjugacyWitness,
    /// Reactant complexes of the target that are not reactant complexes of the input.
    pub phantoms: Vec<Complex>,
    pub balanced: bool,
    pub stability_implied: bool,
    /// Complex-balanced equilibrium of the instantiated target, if any.
    pub equilibrium: Option<Vec<f64>>,
    /// Edges as pairs of indices into the input's distinct complexes.
    pub edges: Vec<(usize, usize)>,
}

impl SearchResult {
    /// The target with the transformed rate constants.
    pub fn instantiated(&self) -> Network {
        self.target
            .with_rates(&self.witness.k_tilde)
            .expect("witness rates are positive")
    }

    pub fn num_complexes(&self) -> usize {
        self.target.num_complexes()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub results: Vec<SearchResult>,
    pub candidates_evaluated: usize,
    pub cap_exhausted: bool,
}

/// Transitive-closure test: every edge `i → j` has a path back `j → i`.
fn weakly_reversible_masks(out: &[u64]) -> bool {
    let n = out.len();
    let mut reach = out.to_vec();
    for k in 0..n {
        for i in 0..n {
            if reach[i] >> k & 1 == 1 {
                reach[i] |= reach[k];
            }
        }
    }
    (0..n).all(|i| (0..n).all(|j| out[i] >> j & 1 == 0 || reach[j] >> i & 1 == 1))
}

/// Streams the weakly reversible edge sets over `n` complexes.
pub struct WrDigraphs {
    n: usize,
    edges: Vec<(usize, usize)>,
    next: u64,
    end: u64,
    remaining: usize,
}

impl Iterator for WrDigraphs {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.remaining > 0 && self.next < self.end {
            let mask = self.next;
            self.next += 1;
            let mut out = vec![0u64; self.n];
            for (e, &(i, j)) in self.edges.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    out[i] |= 1 << j;
                }
            }
            if weakly_reversible_masks(&out) {
                self.remaining -= 1;
                return Some(
                    self.edges
                        .iter()
                        .enumerate()
                        .filter(|&(e, _)| mask >> e & 1 == 1)
                        .map(|(_, &ij)| ij)
                        .collect(),
                );
            }
        }
        None
    }
}

/// All nonempty edge sets without self-loops over `complexes` in which every
/// edge lies on a directed cycle. Edges are index pairs into `complexes`;
/// edge sets come in increasing order of their bitmask over the
/// lexicographically sorted edge list. At most `cap` sets are produced.
pub fn enumerate_wr_digraphs(complexes: &[Complex], cap: usize) -> Result<WrDigraphs, SearchError> {
    let n = complexes.len();
    let limit = SearchConfig::default().max_complexes;
    if n > limit {
        return Err(SearchError::TooManyComplexes { found: n, limit });
    }
    if n < 2 {
        return Err(SearchError::TooFewComplexes(n));
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    Ok(WrDigraphs {
        n,
        end: 1u64 << edges.len(),
        edges,
        next: 1,
        remaining: cap,
    })
}

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

struct SearchContext<'a> {
    original: &'a Network,
    cfg: &'a SearchConfig,
    complexes: &'a [Complex],
    outflows: Vec<Vec<Rational>>,
    local_cache: HashMap<(usize, Vec<usize>), bool>,
}

impl SearchContext<'_> {
    /// Whether complex `a` can send edges to exactly `targets` (indices into
    /// the input's complexes): the local condition at `a` must have a
    /// strictly positive solution.
    fn local_feasible(&mut self, a: usize, targets: &[usize]) -> bool {
        let key = (a, targets.to_vec());
        if let Some(&hit) = self.local_cache.get(&key) {
            return hit;
        }
        let m = self.original.num_species();
        let l = &self.outflows[a];
        let za = &self.complexes[a];
        let mut cols: Vec<Vec<Rational>> = targets
            .iter()
            .map(|&t| za.difference_to(&self.complexes[t]).into_iter().map(q).collect())
            .collect();
        match self.cfg.scaling {
            Scaling::Free => {
                for j in 0..m {
                    if !l[j].is_zero() {
                        let mut col = vec![Rational::zero(); m];
                        col[j] = -l[j].clone();
                        cols.push(col);
                    }
                }
            }
            Scaling::Identity => {
                if l.iter().any(|v| !v.is_zero()) {
                    cols.push(l.iter().map(|v| -v).collect());
                }
            }
        }
        let ok = strictly_positive_solution(&Matrix::from_columns(&cols, m)).is_some();
        self.local_cache.insert(key, ok);
        ok
    }
}

fn subsets(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            let Some(p) = (0..size).rev().find(|&p| idx[p] < items.len() - size + p) else {
                break;
            };
            idx[p] += 1;
            for t in p + 1..size {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    out
}

/// Searches weakly reversible targets linearly conjugate to `original` at its
/// own rate constants. Results are sorted by complex count, edge count and
/// edge list.
pub fn search_conjugate_targets(original: &Network, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let complexes = original.complexes();
    let mut reactants = original.reactant_complexes().to_vec();
    reactants.sort_unstable();
    if reactants.len() > cfg.max_complexes {
        return Err(SearchError::TooManyComplexes {
            found: reactants.len(),
            limit: cfg.max_complexes,
        });
    }
    let pool: Vec<usize> = if cfg.allow_phantoms {
        (0..complexes.len()).filter(|i| !reactants.contains(i)).collect()
    } else {
        Vec::new()
    };
    let mut node_sets = vec![reactants.clone()];
    let room = cfg.max_complexes - reactants.len();
    for extra in subsets(&pool, cfg.max_phantoms.min(room)) {
        let mut set = reactants.clone();
        set.extend(extra);
        set.sort_unstable();
        node_sets.push(set);
    }
    node_sets.retain(|s| s.len() >= 2);
    if node_sets.is_empty() {
        return Err(SearchError::TooFewComplexes(reactants.len()));
    }

    let rates = original.rates();
    let outflows = (0..complexes.len())
        .map(|c| {
            let mut v = vec![Rational::zero(); original.num_species()];
            for ((rx, &(a, _)), k) in original.reactions().iter().zip(original.reaction_ends()).zip(&rates) {
                if a == c {
                    for (vj, d) in v.iter_mut().zip(rx.reaction_vector()) {
                        *vj += k * q(d);
                    }
                }
            }
            v
        })
        .collect();
    let mut ctx = SearchContext {
        original,
        cfg,
        complexes,
        outflows,
        local_cache: HashMap::new(),
    };

    let mut candidates: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut cap_exhausted = false;
    'sets: for nodes in &node_sets {
        let options: Vec<Vec<Vec<usize>>> = nodes
            .iter()
            .map(|&a| {
                let others: Vec<usize> = nodes.iter().copied().filter(|&b| b != a).collect();
                subsets(&others, others.len())
                    .into_iter()
                    .filter(|targets| ctx.local_feasible(a, targets))
                    .collect()
            })
            .collect();
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let position = |c: usize| nodes.iter().position(|&x| x == c).unwrap();
        let mut choice = vec![0usize; nodes.len()];
        loop {
            let out: Vec<u64> = (0..nodes.len())
                .map(|p| options[p][choice[p]].iter().fold(0u64, |m, &t| m | 1 << position(t)))
                .collect();
            if weakly_reversible_masks(&out) {
                if candidates.len() >= cfg.max_candidates {
                    cap_exhausted = true;
                    break 'sets;
                }
                candidates.push(
                    nodes
                        .iter()
                        .enumerate()
                        .flat_map(|(p, &a)| options[p][choice[p]].iter().map(move |&t| (a, t)))
                        .collect(),
                );
            }
            // Odometer over the per-complex choices.
            let mut p = nodes.len();
            loop {
                if p == 0 {
                    continue 'sets;
                }
                p -= 1;
                choice[p] += 1;
                if choice[p] < options[p].len() {
                    break;
                }
                choice[p] = 0;
            }
        }
    }

    let evaluated = candidates.len();
    let mut results: Vec<SearchResult> = candidates
        .par_iter()
        .map(|edges| evaluate(original, &reactants, edges, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    results.sort_by(|a, b| {
        (a.num_complexes(), a.edges.len(), &a.edges).cmp(&(b.num_complexes(), b.edges.len(), &b.edges))
    });
    if cfg.dedup {
        results.dedup_by(|a, b| a.edges == b.edges);
    }
    Ok(SearchOutcome {
        results,
        candidates_evaluated: evaluated,
        cap_exhausted,
    })
}

fn build_target(original: &Network, edges: &[(usize, usize)]) -> Network {
    let cs = original.complexes();
    let reactions = edges
        .iter()
        .map(|&(a, b)| Reaction::new(cs[a].clone(), cs[b].clone(), q(1)))
        .collect();
    Network::new(original.species().clone(), reactions).expect("candidate edges are valid reactions")
}

fn evaluate(
    original: &Network,
    reactants: &[usize],
    edges: &[(usize, usize)],
    cfg: &SearchConfig,
) -> Option<SearchResult> {
    let target = build_target(original, edges);
    let system = ConjugacySystem::new(original, &target, cfg.scaling).ok()?;
    let v0 = strictly_positive_solution(system.matrix())?;
    let mut witness = system.witness_from(&v0)?;
    let mut cert = balance_of(&target, &witness);
    if cfg.require_complex_balanced && cert.is_none() {
        let refined = Section::new(&system, &target, v0, cfg.scaling)?.find_balanced(cfg.sweep_points)?;
        witness = system.witness_from(&refined)?;
        cert = balance_of(&target, &witness);
        cert.as_ref()?;
    }
    let mut phantoms: Vec<Complex> = edges
        .iter()
        .map(|&(a, _)| a)
        .filter(|a| !reactants.contains(a))
        .map(|a| original.complexes()[a].clone())
        .collect();
    phantoms.dedup();
    let balanced = cert.is_some();
    Some(SearchResult {
        target,
        witness,
        phantoms,
        balanced,
        stability_implied: balanced,
        equilibrium: cert,
        edges: edges.to_vec(),
    })
}

/// Complex-balanced equilibrium of the instantiated target, if one exists.
fn balance_of(target: &Network, w: &ConjugacyWitness) -> Option<Vec<f64>> {
    let sys = OdeSystem::<f64>::with_rates(target, &w.k_tilde).ok()?;
    let cert = crate::balance::find_complex_balanced_equilibrium(&sys);
    if cert.balanced {
        cert.equilibrium
    } else {
        None
    }
}

/// The witness cone cut by `Σv = Σv0`, parametrized as `v0 + Σ θ_k d_k`.
struct Section<'a> {
    system: &'a ConjugacySystem,
    layout: KirchhoffLayout,
    target: &'a Network,
    scaling: Scaling,
    v0: Vec<Rational>,
    dirs: Vec<Vec<Rational>>,
    v0f: Vec<f64>,
    dirsf: Vec<Vec<f64>>,
}

impl<'a> Section<'a> {
    fn new(system: &'a ConjugacySystem, target: &'a Network, v0: Vec<Rational>, scaling: Scaling) -> Option<Self> {
        let total: Rational = v0.iter().sum();
        let raw: Vec<Vec<Rational>> = system
            .nullspace()
            .into_iter()
            .map(|n| {
                let s: Rational = n.iter().sum();
                let f = s / &total;
                n.iter().zip(&v0).map(|(a, b)| a - &f * b).collect()
            })
            .collect();
        let keep = independent_subset(&raw, v0.len());
        if keep.is_empty() {
            return None;
        }
        let dirs: Vec<Vec<Rational>> = keep.into_iter().map(|i| raw[i].clone()).collect();
        Some(Self {
            system,
            layout: KirchhoffLayout::from_network(target),
            target,
            scaling,
            v0f: v0.iter().map(Scalar::as_f64).collect(),
            dirsf: dirs.iter().map(|d| d.iter().map(Scalar::as_f64).collect()).collect(),
            v0,
            dirs,
        })
    }

    fn point(&self, theta: &[f64]) -> Vec<f64> {
        let mut v = self.v0f.clone();
        for (d, &t) in self.dirsf.iter().zip(theta) {
            for (vi, di) in v.iter_mut().zip(d) {
                *vi += t * di;
            }
        }
        v
    }

    /// Target rates for a raw cone point; the overall scale is irrelevant to
    /// complex balancing, so no normalization is applied.
    fn rates(&self, v: &[f64]) -> Vec<f64> {
        let r = self.target.num_reactions();
        let m = self.target.num_species();
        let mut c = vec![1.0; m];
        let mut scale = 1.0;
        match self.scaling {
            Scaling::Free => {
                for (s, j) in self.system.scaled_species().into_iter().enumerate() {
                    c[j] = 1.0 / v[r + s];
                }
            }
            Scaling::Identity => {
                if v.len() > r {
                    scale = 1.0 / v[r];
                }
            }
        }
        self.target
            .reactions()
            .iter()
            .zip(v)
            .map(|(rx, &b)| {
                rx.reactant
                    .coeffs()
                    .iter()
                    .zip(&c)
                    .fold(b * scale, |acc, (&z, cj)| acc * cj.powi(z as i32))
            })
            .collect()
    }

    fn residual(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let v = self.point(theta);
        if v.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let fit = self.layout.log_fit(&self.rates(&v))?;
        Some(fit.residual_vector)
    }

    fn range(&self, theta: &[f64], k: usize) -> (f64, f64) {
        let v = self.point(theta);
        let d = &self.dirsf[k];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (vi, di) in v.iter().zip(d) {
            if *di > 0.0 {
                lo = lo.max(-vi / di);
            } else if *di < 0.0 {
                hi = hi.min(-vi / di);
            }
        }
        (lo, hi)
    }

    fn find_balanced(&self, sweep_points: usize) -> Option<Vec<Rational>> {
        let p = self.dirs.len();
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
        for k in 0..p {
            let (lo, hi) = self.range(&vec![0.0; p], k);
            if !(lo.is_finite() && hi.is_finite()) {
                continue;
            }
            for i in 0..sweep_points {
                let mut theta = vec![0.0; p];
                theta[k] = lo + (hi - lo) * (i + 1) as f64 / (sweep_points + 1) as f64;
                if let Some(r) = self.residual(&theta) {
                    starts.push((norm(&r), theta));
                }
            }
        }
        starts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, theta) in starts.into_iter().take(4) {
            let Some(theta) = self.levenberg_marquardt(theta) else {
                continue;
            };
            if let Some(v) = self.rationalize(&theta) {
                return Some(v);
            }
        }
        None
    }

    fn levenberg_marquardt(&self, mut theta: Vec<f64>) -> Option<Vec<f64>> {
        let p = theta.len();
        let sq = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
        let mut r = self.residual(&theta)?;
        let mut lambda = 1e-3;
        for _ in 0..200 {
            if r.iter().all(|x| x.abs() < 1e-13) {
                break;
            }
            let mut jac = Vec::with_capacity(p);
            for k in 0..p {
                let h = 1e-7 * theta[k].abs().max(1e-3);
                let mut t2 = theta.clone();
                t2[k] += h;
                let r2 = match self.residual(&t2) {
                    Some(r2) => r2,
                    None => {
                        t2[k] = theta[k] - h;
                        let r2 = self.residual(&t2)?;
                        r2.iter().zip(&r).map(|(a, b)| 2.0 * b - a).collect()
                    }
                };
                jac.push(r2.iter().zip(&r).map(|(a, b)| (a - b) / h).collect::<Vec<f64>>());
            }
            let mut jtj = Matrix::zeros(p, p);
            let mut jtr = vec![0.0; p];
            for a in 0..p {
                for b in 0..p {
                    jtj[(a, b)] = jac[a].iter().zip(&jac[b]).map(|(x, y)| x * y).sum();
                }
                jtr[a] = -jac[a].iter().zip(&r).map(|(x, y)| x * y).sum::<f64>();
            }
            let mut improved = false;
            while lambda < 1e12 {
                let mut damped = jtj.clone();
                for a in 0..p {
                    damped[(a, a)] += lambda * (1.0 + jtj[(a, a)]);
                }
                let Some(step) = solve_linear(&damped, &jtr) else {
                    lambda *= 4.0;
                    continue;
                };
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + s).collect();
                match self.residual(&trial) {
                    Some(rt) if sq(&rt) < sq(&r) => {
                        theta = trial;
                        r = rt;
                        lambda = (lambda / 3.0).max(1e-12);
                        improved = true;
                        break;
                    }
                    _ => lambda *= 4.0,
                }
            }
            if !improved {
                break;
            }
        }
        let best = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        (best < LOG_RESIDUAL_TOL).then_some(theta)
    }

    /// Exact cone point near `v0 + Σ θ_k d_k`.
    fn rationalize(&self, theta: &[f64]) -> Option<Vec<Rational>> {
        let mut v = self.v0.clone();
        for (d, &t) in self.dirs.iter().zip(theta) {
            let tq = approximate_rational(t, 1e-15)?;
            for (vi, di) in v.iter_mut().zip(d) {
                *vi += &tq * di;
            }
        }
        v.iter().all(Signed::is_positive).then_some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complexes(n: usize) -> Vec<Complex> {
        (0..n).map(|i| Complex::new(vec![i as u32])).collect()
    }

    #[test]
    fn two_complexes_give_one_candidate() {
        let all: Vec<_> = enumerate_wr_digraphs(&complexes(2), 100).unwrap().collect();
        assert_eq!(all, vec![vec![(0, 1), (1, 0)]]);
    }

    #[test]
    fn three_complexes_include_cycle_and_triangle() {
        let all: Vec<_> = enumerate_wr_digraphs(&complexes(3), 1000).unwrap().collect();
        assert!(all.contains(&vec![(0, 1), (1, 2), (2, 0)]));
        assert!(all.contains(&vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]));
        assert!(!all.contains(&vec![(0, 1), (1, 2)]));
        for edges in &all {
            let mut out = vec![0u64; 3];
            for &(i, j) in edges {
                out[i] |= 1 << j;
            }
            assert!(weakly_reversible_masks(&out));
        }
    }

    #[test]
    fn enumeration_respects_cap_and_limits() {
        assert_eq!(enumerate_wr_digraphs(&complexes(4), 5).unwrap().count(), 5);
        assert!(matches!(
            enumerate_wr_digraphs(&complexes(8), 5),
            Err(SearchError::TooManyComplexes { found: 8, limit: 7 })
        ));
        assert!(matches!(
            enumerate_wr_digraphs(&complexes(1), 5),
            Err(SearchError::TooFewComplexes(1))
        ));
    }

    #[test]
    fn subsets_in_size_then_lexicographic_order() {
        assert_eq!(
            subsets(&[4, 7, 9], 2),
            vec![vec![4], vec![7], vec![9], vec![4, 7], vec![4, 9], vec![7, 9]]
        );
    }

    #[test]
    fn example2_off_the_knife_edge_has_no_target() {
        let net = Network::parse("species: A1 A2\nA1 -> A2 ; k = 1\n2A2 -> A1 ; k = 2\n2A2 -> 3A1 ; k = 1").unwrap();
        let out = search_conjugate_targets(&net, &SearchConfig::default()).unwrap();
        assert!(out.results.is_empty());
    }
}
