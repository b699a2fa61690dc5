//! Linear conjugacy between mass-action systems.
//!
//! A target network `N'` is linearly conjugate to `N` under `h(x) = T⁻¹x`,
//! `T = diag(c)`, when for every reactant complex `C⁰` of either network
//!
//! ```text
//! Σ_{C_i = C⁰} k_i (z_i' − z_i) = T Σ_{C̃_i = C⁰} b_i (z̃_i' − z̃_i)
//! ```
//!
//! with `b, c > 0` and empty sums read as zero. Substituting `u_j = 1/c_j`
//! makes every equation linear and homogeneous in `(b, u)`, so the question
//! becomes whether a linear system has a strictly positive solution, which
//! the exact simplex answers. The target then carries the rate constants
//! `k̃_i = b_i Π_j c_j^{z̃_ij}`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dynamics::{integrate_at, IntegrationControls, OdeSystem, Termination};
use crate::error::ConjugacyError;
use crate::linalg::Matrix;
use crate::lp::strictly_positive_solution;
use crate::model::{Complex, Network};
use crate::scalar::{serde_rational, Scalar};
use crate::structure::aggregated_outflows;
use crate::Rational;

/// How the diagonal `T` is constrained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Any positive diagonal.
    #[default]
    Free,
    /// `T = I`: the two systems share their mass-action kinetics.
    Identity,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConjugacyOptions {
    pub scaling: Scaling,
    /// Also try every relabelling of the species (at most 6 species).
    pub allow_permutation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugacyWitness {
    /// Diagonal of `T`.
    #[serde(serialize_with = "serde_rational::vec")]
    pub c: Vec<Rational>,
    /// One coefficient per target reaction.
    #[serde(serialize_with = "serde_rational::vec")]
    pub b: Vec<Rational>,
    #[serde(serialize_with = "serde_rational::vec")]
    pub k_tilde: Vec<Rational>,
    /// Species `j` of the target corresponds to species `permutation[j]` of the original.
    pub permutation: Vec<usize>,
    pub solution_cone_dim: usize,
    /// Basis of the solution space in coordinates `(b, u)`, restricted to the
    /// unknowns the system actually constrains.
    #[serde(serialize_with = "serde_rational::mat")]
    pub solution_cone_basis: Vec<Vec<Rational>>,
}

impl ConjugacyWitness {
    pub fn is_identity_permutation(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `h(x) = T⁻¹ P x` in floating point, where `(P x)_j = x_{permutation[j]}`.
    pub fn map_state(&self, x: &[f64]) -> Vec<f64> {
        self.permutation
            .iter()
            .zip(&self.c)
            .map(|(&p, c)| x[p] / c.as_f64())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ScaleVar {
    Species(usize),
    Uniform,
}

/// The homogeneous system `E (b, u) = 0` for a fixed pair of networks.
#[derive(Clone, Debug)]
pub struct ConjugacySystem {
    original: Network,
    target: Network,
    scaling: Scaling,
    permutation: Vec<usize>,
    matrix: Matrix<Rational>,
    scale_vars: Vec<ScaleVar>,
}

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// All reactant complexes of either network, original ones first.
fn union_reactants(original: &Network, target: &Network) -> Vec<Complex> {
    let mut out: Vec<Complex> = original
        .reactant_complexes()
        .iter()
        .map(|&i| original.complexes()[i].clone())
        .collect();
    for &i in target.reactant_complexes() {
        let c = &target.complexes()[i];
        if !out.contains(c) {
            out.push(c.clone());
        }
    }
    out
}

/// Aggregated outflow of `net` at `c` (zero if `c` is not a reactant complex).
fn outflow_at(net: &Network, rates: &[Rational], c: &Complex) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); net.num_species()];
    for (rx, k) in net.reactions().iter().zip(rates) {
        if &rx.reactant == c {
            for (vj, d) in v.iter_mut().zip(rx.reaction_vector()) {
                *vj += k * q(d);
            }
        }
    }
    v
}

fn check_species(original: &Network, target: &Network, allow_permutation: bool) -> Result<(), ConjugacyError> {
    let (a, b) = (original.species().names(), target.species().names());
    let same = if allow_permutation {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        x.sort();
        y.sort();
        x == y
    } else {
        a == b
    };
    if same {
        Ok(())
    } else {
        Err(ConjugacyError::SpeciesMismatch {
            original: a.to_vec(),
            target: b.to_vec(),
        })
    }
}

impl ConjugacySystem {
    /// Builds the system for `original` (with its own rates) against the
    /// structure of `target`.
    pub fn new(original: &Network, target: &Network, scaling: Scaling) -> Result<Self, ConjugacyError> {
        check_species(original, target, false)?;
        Self::build(original.clone(), target, scaling, (0..original.num_species()).collect())
    }

    fn build(
        original: Network,
        target: &Network,
        scaling: Scaling,
        permutation: Vec<usize>,
    ) -> Result<Self, ConjugacyError> {
        if target.num_reactions() == 0 {
            return Err(ConjugacyError::EmptyTarget);
        }
        let m = original.num_species();
        let rates = original.rates();
        let react = union_reactants(&original, target);
        let outflows: Vec<Vec<Rational>> = react.iter().map(|c| outflow_at(&original, &rates, c)).collect();

        let scale_vars: Vec<ScaleVar> = match scaling {
            Scaling::Free => (0..m)
                .filter(|&j| outflows.iter().any(|l| !l[j].is_zero()))
                .map(ScaleVar::Species)
                .collect(),
            Scaling::Identity => {
                if outflows.iter().any(|l| l.iter().any(|v| !v.is_zero())) {
                    vec![ScaleVar::Uniform]
                } else {
                    Vec::new()
                }
            }
        };
        let r = target.num_reactions();
        let mut e = Matrix::zeros(react.len() * m, r + scale_vars.len());
        for (ci, c) in react.iter().enumerate() {
            for (i, rx) in target.reactions().iter().enumerate() {
                if &rx.reactant != c {
                    continue;
                }
                for (j, d) in rx.reaction_vector().into_iter().enumerate() {
                    e[(ci * m + j, i)] = q(d);
                }
            }
            for (s, var) in scale_vars.iter().enumerate() {
                match *var {
                    ScaleVar::Species(j) => e[(ci * m + j, r + s)] = -outflows[ci][j].clone(),
                    ScaleVar::Uniform => {
                        for j in 0..m {
                            e[(ci * m + j, r + s)] = -outflows[ci][j].clone();
                        }
                    }
                }
            }
        }
        Ok(Self {
            original,
            target: target.clone(),
            scaling,
            permutation,
            matrix: e,
            scale_vars,
        })
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.matrix
    }

    pub fn target(&self) -> &Network {
        &self.target
    }

    /// Species whose `u_j` is an unknown, in column order after the `b` block.
    pub fn scaled_species(&self) -> Vec<usize> {
        self.scale_vars
            .iter()
            .filter_map(|v| match *v {
                ScaleVar::Species(j) => Some(j),
                ScaleVar::Uniform => None,
            })
            .collect()
    }

    pub fn num_unknowns(&self) -> usize {
        self.matrix.cols()
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        self.matrix.nullspace()
    }

    /// Strictly positive solution from the exact LP, normalized into a witness.
    pub fn solve(&self) -> Option<ConjugacyWitness> {
        let v = strictly_positive_solution(&self.matrix)?;
        self.witness_from(&v)
    }

    /// Normalizes a strictly positive null vector into a witness. Returns
    /// `None` if `v` is not strictly positive or not a solution.
    pub fn witness_from(&self, v: &[Rational]) -> Option<ConjugacyWitness> {
        if v.len() != self.num_unknowns() || v.iter().any(|x| !x.is_positive()) {
            return None;
        }
        if self.matrix.mul_vec(v).iter().any(|x| !x.is_zero()) {
            return None;
        }
        let r = self.target.num_reactions();
        let m = self.original.num_species();
        let (b, c) = match self.scaling {
            Scaling::Free => {
                // Scale so that the largest constrained u equals one, i.e. min c = 1.
                let norm = v[r..]
                    .iter()
                    .max()
                    .cloned()
                    .unwrap_or_else(|| v[..r].iter().max().cloned().expect("target has reactions"));
                let mut u = vec![Rational::one(); m];
                for (s, var) in self.scale_vars.iter().enumerate() {
                    if let ScaleVar::Species(j) = *var {
                        u[j] = &v[r + s] / &norm;
                    }
                }
                let b: Vec<Rational> = v[..r].iter().map(|x| x / &norm).collect();
                (b, u.into_iter().map(|x| x.recip()).collect::<Vec<_>>())
            }
            Scaling::Identity => {
                let tau = v.get(r).cloned().unwrap_or_else(Rational::one);
                let b: Vec<Rational> = v[..r].iter().map(|x| x / &tau).collect();
                (b, vec![Rational::one(); m])
            }
        };
        let k_tilde = transform_rates(&b, &c, &self.target).ok()?;
        let basis = self.nullspace();
        Some(ConjugacyWitness {
            c,
            b,
            k_tilde,
            permutation: self.permutation.clone(),
            solution_cone_dim: basis.len(),
            solution_cone_basis: basis,
        })
    }
}

/// Decides linear conjugacy of `original` (at its own rate constants) to
/// some rate assignment on `target`.
pub fn solve_conjugacy(
    original: &Network,
    target: &Network,
    opts: &ConjugacyOptions,
) -> Result<Option<ConjugacyWitness>, ConjugacyError> {
    check_species(original, target, opts.allow_permutation)?;
    if target.num_reactions() == 0 {
        return Err(ConjugacyError::EmptyTarget);
    }
    let m = original.num_species();
    if !opts.allow_permutation {
        return Ok(ConjugacySystem::new(original, target, opts.scaling)?.solve());
    }
    if m > 6 {
        return Err(ConjugacyError::TooManySpecies(m));
    }
    for perm in permutations(m) {
        let relabelled = original.permute_species(&perm).expect("permutation of valid species");
        let renamed =
            Network::new(target.species().clone(), relabelled.reactions().to_vec()).expect("same species count");
        let system = ConjugacySystem::build(renamed, target, opts.scaling, perm)?;
        if let Some(w) = system.solve() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// All permutations of `0..m`, identity first, in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..m).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// `k̃_i = b_i Π_j c_j^{z̃_ij}` for every target reaction.
pub fn transform_rates(b: &[Rational], c: &[Rational], target: &Network) -> Result<Vec<Rational>, ConjugacyError> {
    if b.len() != target.num_reactions() {
        return Err(ConjugacyError::LengthMismatch {
            expected: target.num_reactions(),
            found: b.len(),
        });
    }
    if c.len() != target.num_species() {
        return Err(ConjugacyError::LengthMismatch {
            expected: target.num_species(),
            found: c.len(),
        });
    }
    if b.iter().chain(c).any(|x| !x.is_positive()) {
        return Err(ConjugacyError::NonPositive);
    }
    Ok(target
        .reactions()
        .iter()
        .zip(b)
        .map(|(rx, bi)| {
            rx.reactant.coeffs().iter().zip(c).fold(bi.clone(), |acc, (&z, cj)| {
                acc * num_traits::pow(cj.clone(), z as usize)
            })
        })
        .collect())
}

/// Left minus right side of the conjugacy condition at every reactant complex
/// of either network, evaluated exactly. All zero for a valid witness.
pub fn condition_residual(original: &Network, target: &Network, w: &ConjugacyWitness) -> Vec<Vec<Rational>> {
    let relabelled = if w.is_identity_permutation() {
        original.clone()
    } else {
        original.permute_species(&w.permutation).expect("valid permutation")
    };
    let rates = relabelled.rates();
    union_reactants(&relabelled, target)
        .iter()
        .map(|c0| {
            let left = outflow_at(&relabelled, &rates, c0);
            let right = outflow_at(target, &w.b, c0);
            left.iter()
                .zip(&right)
                .zip(&w.c)
                .map(|((l, r), cj)| l - cj * r)
                .collect()
        })
        .collect()
}

pub fn satisfies_condition(original: &Network, target: &Network, w: &ConjugacyWitness) -> bool {
    condition_residual(original, target, w)
        .iter()
        .all(|row| row.iter().all(Zero::is_zero))
}

/// Generators of the reaction cones at one reactant complex.
#[derive(Clone, Debug)]
pub struct ConeQuery {
    pub reactant_complex: Complex,
    /// `k_i (z_i' − z_i)` for the original reactions leaving the complex.
    pub generators_original: Vec<Vec<Rational>>,
    /// `z̃_i' − z̃_i` for the target reactions leaving the complex.
    pub generators_target: Vec<Vec<Rational>>,
    /// Diagonal of `T`.
    pub scaling: Vec<Rational>,
}

impl ConeQuery {
    pub fn new(original: &Network, target: &Network, complex: &Complex, scaling: &[Rational]) -> Self {
        let rates = original.rates();
        let generators_original = original
            .reactions()
            .iter()
            .zip(&rates)
            .filter(|(rx, _)| &rx.reactant == complex)
            .map(|(rx, k)| rx.reaction_vector().into_iter().map(|d| k * q(d)).collect())
            .collect();
        let generators_target = target
            .reactions()
            .iter()
            .filter(|rx| &rx.reactant == complex)
            .map(|rx| rx.reaction_vector().into_iter().map(q).collect())
            .collect();
        Self {
            reactant_complex: complex.clone(),
            generators_original,
            generators_target,
            scaling: scaling.to_vec(),
        }
    }

    fn dim(&self) -> usize {
        self.scaling.len()
    }

    fn scaled_target(&self) -> Vec<Vec<Rational>> {
        self.generators_target
            .iter()
            .map(|w| w.iter().zip(&self.scaling).map(|(a, c)| a * c).collect())
            .collect()
    }
}

/// `Σ α_i v_i − Σ β_i w_i = 0` with all coefficients strictly positive.
fn positive_combination_meets(left: &[Vec<Rational>], right: &[Vec<Rational>], dim: usize) -> bool {
    let cols: Vec<Vec<Rational>> = left
        .iter()
        .cloned()
        .chain(right.iter().map(|w| w.iter().map(|x| -x).collect()))
        .collect();
    if cols.is_empty() {
        return true;
    }
    strictly_positive_solution(&Matrix::from_columns(&cols, dim)).is_some()
}

/// Whether the original cone at the complex meets the scaled target cone.
/// Empty generator sets contribute the zero vector.
pub fn cones_intersect(query: &ConeQuery) -> bool {
    positive_combination_meets(&query.generators_original, &query.scaled_target(), query.dim())
}

/// Whether every original generator lies in the relative interior of the
/// scaled target cone.
pub fn cone_contains(query: &ConeQuery) -> bool {
    let target = query.scaled_target();
    query
        .generators_original
        .iter()
        .all(|v| positive_combination_meets(std::slice::from_ref(v), &target, query.dim()))
}

/// Identical reactant-complex sets and pairwise intersecting cones under `T = I`.
pub fn craciun_pantea_check(original: &Network, target: &Network) -> bool {
    let set = |net: &Network| {
        let mut v: Vec<Complex> = net
            .reactant_complexes()
            .iter()
            .map(|&i| net.complexes()[i].clone())
            .collect();
        v.sort();
        v
    };
    let shared = set(original);
    if original.num_species() != target.num_species() || shared != set(target) {
        return false;
    }
    let ones = vec![Rational::one(); original.num_species()];
    shared
        .iter()
        .all(|c| cones_intersect(&ConeQuery::new(original, target, c, &ones)))
}

/// Positively weighted permutation matrix: one positive entry in every row
/// and column, zeros elsewhere.
pub fn validate_linear_map<T: Scalar>(matrix: &Matrix<T>) -> bool {
    let n = matrix.rows();
    if n != matrix.cols() || n == 0 {
        return false;
    }
    let mut column_used = vec![false; n];
    for i in 0..n {
        let mut found = None;
        for j in 0..n {
            let v = &matrix[(i, j)];
            if v.is_zero() {
                continue;
            }
            if found.is_some() || !(*v > T::zero()) {
                return false;
            }
            found = Some(j);
        }
        match found {
            Some(j) if !column_used[j] => column_used[j] = true,
            _ => return false,
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyCheck {
    /// `max_t ‖T⁻¹ P Φ(x0, t) − Ψ(h(x0), t)‖∞` over the shared grid.
    pub max_deviation: f64,
    pub passed: bool,
    pub original_termination: Termination,
    pub target_termination: Termination,
    pub grid_points: usize,
}

/// Integrates both systems on a shared grid of `grid` points in `(0, t_end]`
/// and compares the mapped original trajectory with the target trajectory.
pub fn verify_conjugacy_numerically(
    original: &Network,
    target: &Network,
    witness: &ConjugacyWitness,
    x0: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<ConjugacyCheck, crate::DynamicsError> {
    let grid = 200;
    let times: Vec<f64> = (1..=grid).map(|i| t_end * i as f64 / grid as f64).collect();
    let controls = IntegrationControls::<f64> {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        ..IntegrationControls::default()
    };
    let phi_sys = OdeSystem::<f64>::new(original);
    let psi_sys = OdeSystem::<f64>::with_rates(target, &witness.k_tilde)?;
    let phi = integrate_at(&phi_sys, x0, &times, &controls)?;
    let psi = integrate_at(&psi_sys, &witness.map_state(x0), &times, &controls)?;
    let mut dev: f64 = 0.0;
    for (a, b) in phi.states.iter().zip(&psi.states) {
        let mapped = witness.map_state(a);
        for (p, q) in mapped.iter().zip(b) {
            dev = dev.max((p - q).abs());
        }
    }
    let complete = phi.completed() && psi.completed();
    if !complete {
        dev = f64::INFINITY;
    }
    Ok(ConjugacyCheck {
        max_deviation: dev,
        passed: complete && dev < tol,
        original_termination: phi.termination,
        target_termination: psi.termination,
        grid_points: grid,
    })
}

/// Per reactant complex of the original, the aggregated outflow vector.
pub fn original_outflows(original: &Network) -> Vec<(Complex, Vec<Rational>)> {
    aggregated_outflows(original, &original.rates())
        .into_iter()
        .map(|(i, v)| (original.complexes()[i].clone(), v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn net(text: &str) -> Network {
        Network::parse(text).unwrap()
    }

    fn qs(text: &str) -> Vec<Rational> {
        text.split(',').map(|t| parse_rational(t).unwrap()).collect()
    }

    const EX1: &str = "species: A1 A2
A1 + 2A2 -> A1 + 3A2 ; k = 1
A1 + 3A2 -> A1 + A2 ; k = 1
A1 + A2 -> 3A1 ; k = 1
2A1 -> A2 ; k = 1";
    const EX1_T: &str = "species: A1 A2
A1 + 2A2 <-> A1 + 3A2 ; kf = 1 ; kr = 1
A1 + A2 <-> 2A1 ; kf = 1 ; kr = 1";
    const EX2: &str = "species: A1 A2
A1 -> A2 ; k = 1
2A2 -> A1 ; k = 1
2A2 -> 3A1 ; k = 1";
    const EX2_T: &str = "species: A1 A2\nA1 <-> 2A2 ; kf = 1 ; kr = 1";

    #[test]
    fn example1_witness() {
        let w = solve_conjugacy(&net(EX1), &net(EX1_T), &ConjugacyOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.c, qs("2,1"));
        assert_eq!(w.b, qs("1,2,1,1"));
        assert_eq!(w.k_tilde, qs("2,4,2,4"));
        assert_eq!(w.solution_cone_dim, 1);
        assert!(satisfies_condition(&net(EX1), &net(EX1_T), &w));
    }

    #[test]
    fn example2_knife_edge() {
        let target = net(EX2_T);
        let w = solve_conjugacy(&net(EX2), &target, &ConjugacyOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.c, qs("2,1"));
        // k1 = b1 c1 forces b1 = 1/2, so k̃1 = b1 c1 = 1; k̃2 = b2 c2² = 2.
        assert_eq!(w.b, qs("1/2,2"));
        assert_eq!(w.k_tilde, qs("1,2"));
        let check = verify_conjugacy_numerically(&net(EX2), &target, &w, &[0.5, 0.5], 10.0, 1e-6).unwrap();
        assert!(check.passed, "{check:?}");
        let off = net(EX2).with_rates(&qs("1,2,1")).unwrap();
        assert!(solve_conjugacy(&off, &target, &ConjugacyOptions::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn species_and_target_errors() {
        let other = net("species: X Y\nX <-> 2Y ; kf = 1 ; kr = 1");
        assert!(matches!(
            solve_conjugacy(&net(EX2), &other, &ConjugacyOptions::default()),
            Err(ConjugacyError::SpeciesMismatch { .. })
        ));
    }

    #[test]
    fn transform_rates_examples() {
        let t = net(EX1_T);
        assert_eq!(transform_rates(&qs("1,2,1,1"), &qs("2,1"), &t).unwrap(), qs("2,4,2,4"));
        assert_eq!(transform_rates(&qs("3,5,7,9"), &qs("1,1"), &t).unwrap(), qs("3,5,7,9"));
        assert_eq!(
            transform_rates(&qs("1,2"), &qs("2,1"), &t).unwrap_err(),
            ConjugacyError::LengthMismatch { expected: 4, found: 2 }
        );
        assert_eq!(
            transform_rates(&qs("1,2,0,1"), &qs("2,1"), &t).unwrap_err(),
            ConjugacyError::NonPositive
        );
    }

    #[test]
    fn cone_queries() {
        let t2 = qs("2,1");
        let c = Complex::new(vec![0, 2]);
        let q = ConeQuery::new(&net(EX2), &net(EX2_T), &c, &t2);
        assert!(cones_intersect(&q));
        assert!(!cone_contains(&q));

        let opposite = ConeQuery {
            reactant_complex: Complex::new(vec![1, 0]),
            generators_original: vec![qs("1,0")],
            generators_target: vec![qs("-1,0")],
            scaling: qs("1,1"),
        };
        assert!(!cones_intersect(&opposite));
        let empty = ConeQuery {
            generators_original: Vec::new(),
            ..opposite
        };
        assert!(cone_contains(&empty));

        for &i in net(EX1).reactant_complexes() {
            let c = net(EX1).complexes()[i].clone();
            assert!(cone_contains(&ConeQuery::new(&net(EX1), &net(EX1_T), &c, &t2)));
        }
    }

    #[test]
    fn craciun_pantea() {
        assert!(!craciun_pantea_check(&net(EX1), &net(EX1_T)));
        assert!(craciun_pantea_check(&net(EX1), &net(EX1)));
        assert!(!craciun_pantea_check(&net(EX2), &net(EX1_T)));
    }

    #[test]
    fn linear_maps() {
        let id = Matrix::<Rational>::identity(2);
        assert!(validate_linear_map(&id));
        assert!(validate_linear_map(&Matrix::from_rows(&[qs("2,0"), qs("0,1")], 2)));
        assert!(!validate_linear_map(&Matrix::from_rows(&[qs("1,1"), qs("0,1")], 2)));
        assert!(validate_linear_map(&Matrix::from_rows(&[qs("0,3"), qs("1/2,0")], 2)));
        assert!(!validate_linear_map(&Matrix::from_rows(&[qs("0,-3"), qs("1,0")], 2)));
        assert!(!validate_linear_map(&Matrix::from_rows(&[qs("0,3"), qs("0,1")], 2)));
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
    }

    #[test]
    fn permutation_option_finds_relabelled_target() {
        // Example 2 with the species swapped in the target.
        let swapped = net("species: A1 A2\nA2 <-> 2A1 ; kf = 1 ; kr = 1");
        let plain = solve_conjugacy(&net(EX2), &swapped, &ConjugacyOptions::default()).unwrap();
        assert!(plain.is_none());
        let opts = ConjugacyOptions {
            allow_permutation: true,
            ..ConjugacyOptions::default()
        };
        let w = solve_conjugacy(&net(EX2), &swapped, &opts).unwrap().unwrap();
        assert_eq!(w.permutation, vec![1, 0]);
        assert!(satisfies_condition(&net(EX2), &swapped, &w));
        let check = verify_conjugacy_numerically(&net(EX2), &swapped, &w, &[0.5, 0.7], 5.0, 1e-6).unwrap();
        assert!(check.passed, "{check:?}");
    }

    #[test]
    fn numerical_oracle_detects_corruption() {
        let (n, t) = (net(EX1), net(EX1_T));
        let w = solve_conjugacy(&n, &t, &ConjugacyOptions::default()).unwrap().unwrap();
        let ok = verify_conjugacy_numerically(&n, &t, &w, &[1.0, 2.0], 10.0, 1e-6).unwrap();
        assert!(ok.passed, "{ok:?}");
        let mut bad = w.clone();
        bad.k_tilde[0] = &bad.k_tilde[0] * q(2);
        let fail = verify_conjugacy_numerically(&n, &t, &bad, &[1.0, 2.0], 10.0, 1e-6).unwrap();
        assert!(!fail.passed);
        assert!(fail.max_deviation > 1e-2);
    }

    #[test]
    fn identity_scaling_requires_equal_kinetics() {
        let opts = ConjugacyOptions {
            scaling: Scaling::Identity,
            ..ConjugacyOptions::default()
        };
        assert!(solve_conjugacy(&net(EX1), &net(EX1_T), &opts).unwrap().is_none());
        let w = solve_conjugacy(&net(EX1), &net(EX1), &opts).unwrap().unwrap();
        assert_eq!(w.c, qs("1,1"));
        assert_eq!(w.k_tilde, net(EX1).rates());
    }
}
