//! Complex balancing: a pointwise test at a concentration, and existence of a
//! complex-balanced equilibrium from the Kirchhoff kernel of the weighted
//! complex digraph.
//!
//! For a weakly reversible network every linkage class is strongly connected,
//! and the Matrix–Tree theorem gives a strictly positive kernel vector `ψ` per
//! class: `ψ_i` is the principal minor of the negated class Laplacian with row
//! and column `i` removed. A concentration `x* = exp(μ)` is complex balanced
//! exactly when `z_i · μ = ln ψ_i + a_L` for every complex `i` in class `L`,
//! which is a linear system in `(μ, a)`.

use serde::Serialize;

use crate::dynamics::OdeSystem;
use crate::error::DynamicsError;
use crate::linalg::{least_squares, Matrix};
use crate::model::Network;
use crate::scalar::Real;
use crate::structure::ComplexGraph;

/// Residual threshold of the log-linear membership test.
pub const LOG_RESIDUAL_TOL: f64 = 1e-8;
/// Relative tolerance of the pointwise inflow/outflow comparison.
pub const DEFAULT_TOL_BAL: f64 = 1e-8;

/// Structure of the complex digraph, reusable across rate vectors.
#[derive(Clone, Debug)]
pub struct KirchhoffLayout {
    species: usize,
    complexes: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
    classes: Vec<Vec<usize>>,
    weakly_reversible: bool,
}

impl KirchhoffLayout {
    pub fn from_network(net: &Network) -> Self {
        let graph = ComplexGraph::from_network(net);
        Self {
            species: net.num_species(),
            complexes: net.complexes().iter().map(|c| c.coeffs().to_vec()).collect(),
            edges: net.reaction_ends().to_vec(),
            classes: graph.linkage_classes(),
            weakly_reversible: graph.is_weakly_reversible(),
        }
    }

    pub fn weakly_reversible(&self) -> bool {
        self.weakly_reversible
    }

    pub fn num_complexes(&self) -> usize {
        self.complexes.len()
    }

    /// Kirchhoff matrix: `A[j][i]` is the total rate of `i → j`, and each
    /// column sums to zero.
    pub fn kirchhoff<F: Real>(&self, rates: &[F]) -> Matrix<F> {
        let n = self.complexes.len();
        let mut a = Matrix::zeros(n, n);
        for (&(i, j), &k) in self.edges.iter().zip(rates) {
            a[(j, i)] = a[(j, i)] + k;
            a[(i, i)] = a[(i, i)] - k;
        }
        a
    }

    /// Matrix–Tree kernel vector, computed independently on each linkage class.
    pub fn kernel<F: Real>(&self, rates: &[F]) -> Vec<F> {
        let a = self.kirchhoff(rates);
        let mut psi = vec![F::zero(); self.complexes.len()];
        for class in &self.classes {
            let s = class.len();
            if s == 1 {
                psi[class[0]] = F::one();
                continue;
            }
            for (skip, &target) in class.iter().enumerate() {
                let mut minor = Matrix::zeros(s - 1, s - 1);
                for (r, &ci) in class.iter().enumerate().filter(|&(r, _)| r != skip) {
                    let rr = if r > skip { r - 1 } else { r };
                    for (c, &cj) in class.iter().enumerate().filter(|&(c, _)| c != skip) {
                        let cc = if c > skip { c - 1 } else { c };
                        minor[(rr, cc)] = -a[(ci, cj)];
                    }
                }
                psi[target] = minor.determinant();
            }
        }
        psi
    }

    /// Least-squares fit of `Z μ − a_L = ln ψ`. Requires a positive kernel.
    pub fn log_fit<F: Real>(&self, rates: &[F]) -> Option<LogFit<F>> {
        let psi = self.kernel(rates);
        if psi.iter().any(|&p| !(p > F::zero()) || !p.is_finite()) {
            return None;
        }
        let (n, m, l) = (self.complexes.len(), self.species, self.classes.len());
        let mut sys = Matrix::zeros(n, m + l);
        for (ci, z) in self.complexes.iter().enumerate() {
            for (j, &zj) in z.iter().enumerate() {
                sys[(ci, j)] = F::from_u32(zj).unwrap();
            }
        }
        for (li, class) in self.classes.iter().enumerate() {
            for &ci in class {
                sys[(ci, m + li)] = -F::one();
            }
        }
        let rhs: Vec<F> = psi.iter().map(|p| p.ln()).collect();
        let fit = least_squares(&sys, &rhs);
        let residual = fit.residual.iter().fold(F::zero(), |acc, r| acc.max(r.abs()));
        Some(LogFit {
            mu: fit.solution[..m].to_vec(),
            residual_vector: fit.residual,
            residual,
            kernel: psi,
        })
    }
}

#[derive(Clone, Debug)]
pub struct LogFit<F> {
    pub mu: Vec<F>,
    pub residual_vector: Vec<F>,
    /// `‖Z μ − a − ln ψ‖∞`.
    pub residual: F,
    pub kernel: Vec<F>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceCertificate<F> {
    /// Positive Kirchhoff kernel vector over the distinct complexes.
    pub kernel: Vec<F>,
    /// `μ` with `x* = exp(μ)`; absent if the log-linear system has no solution.
    pub log_solution: Option<Vec<F>>,
    pub equilibrium: Option<Vec<F>>,
    pub balanced: bool,
    pub residual: F,
    pub weakly_reversible: bool,
}

/// Per-complex `(inflow − outflow)` divided by `max(inflow, outflow)`.
pub fn complex_balance_defects<F: Real>(sys: &OdeSystem<F>, x: &[F]) -> Result<Vec<F>, DynamicsError> {
    let net = sys.network();
    if x.len() != net.num_species() {
        return Err(DynamicsError::DimensionMismatch {
            expected: net.num_species(),
            found: x.len(),
        });
    }
    if x.iter().any(|&v| !(v > F::zero())) {
        return Err(DynamicsError::NonPositiveState);
    }
    let n = net.num_complexes();
    let mut inflow = vec![F::zero(); n];
    let mut outflow = vec![F::zero(); n];
    for (&(a, b), flux) in net.reaction_ends().iter().zip(sys.fluxes(x)) {
        outflow[a] = outflow[a] + flux;
        inflow[b] = inflow[b] + flux;
    }
    Ok(inflow
        .iter()
        .zip(&outflow)
        .map(|(&i, &o)| {
            let scale = i.max(o);
            if scale > F::zero() {
                (i - o) / scale
            } else {
                F::zero()
            }
        })
        .collect())
}

/// Checks inflow = outflow at every distinct complex, relative tolerance `tol_bal`.
pub fn is_complex_balanced_at_tol<F: Real>(sys: &OdeSystem<F>, x: &[F], tol_bal: F) -> Result<bool, DynamicsError> {
    Ok(complex_balance_defects(sys, x)?.iter().all(|d| d.abs() < tol_bal))
}

pub fn is_complex_balanced_at<F: Real>(sys: &OdeSystem<F>, x: &[F]) -> Result<bool, DynamicsError> {
    is_complex_balanced_at_tol(sys, x, F::from_f64(DEFAULT_TOL_BAL).unwrap())
}

pub fn find_complex_balanced_equilibrium<F: Real>(sys: &OdeSystem<F>) -> BalanceCertificate<F> {
    let layout = KirchhoffLayout::from_network(sys.network());
    certify(sys, &layout)
}

fn certify<F: Real>(sys: &OdeSystem<F>, layout: &KirchhoffLayout) -> BalanceCertificate<F> {
    let rejected = |kernel: Vec<F>, residual: F, wr: bool| BalanceCertificate {
        kernel,
        log_solution: None,
        equilibrium: None,
        balanced: false,
        residual,
        weakly_reversible: wr,
    };
    if !layout.weakly_reversible() {
        return rejected(Vec::new(), F::infinity(), false);
    }
    let Some(fit) = layout.log_fit(sys.rates()) else {
        return rejected(layout.kernel(sys.rates()), F::infinity(), true);
    };
    if !(fit.residual < F::from_f64(LOG_RESIDUAL_TOL).unwrap()) {
        return rejected(fit.kernel, fit.residual, true);
    }
    let x: Vec<F> = fit.mu.iter().map(|m| m.exp()).collect();
    let confirmed = x.iter().all(|v| *v > F::zero() && v.is_finite())
        && is_complex_balanced_at_tol(sys, &x, confirm_tol::<F>()).unwrap_or(false);
    BalanceCertificate {
        kernel: fit.kernel,
        log_solution: Some(fit.mu),
        equilibrium: if confirmed { Some(x) } else { None },
        balanced: confirmed,
        residual: fit.residual,
        weakly_reversible: true,
    }
}

/// A complex-balanced equilibrium exists, and hence every positive equilibrium is one.
pub fn is_complex_balanced_system<F: Real>(sys: &OdeSystem<F>) -> bool {
    find_complex_balanced_equilibrium(sys).balanced
}

/// Tolerance for confirming a log-linear solution pointwise; the log residual
/// bound translates into a relative flux error of the same order.
fn confirm_tol<F: Real>() -> F {
    F::from_f64(1e-6)
        .unwrap()
        .max(F::epsilon().sqrt() * F::from_f64(10.0).unwrap())
}
