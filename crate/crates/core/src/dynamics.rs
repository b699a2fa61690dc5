//! Mass-action ODEs `dx/dt = Σ k_i (z_i' − z_i) x^{z_i}`: right-hand side,
//! Jacobian, adaptive integration, equilibria and local stability.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::DynamicsError;
use crate::linalg::{dot, orthonormal_basis, solve_linear, Matrix};
use crate::model::Network;
use crate::scalar::{to_real, Real};
use crate::structure::{kinetic_subspace, kinetic_subspace_for, stoichiometric_subspace};
use crate::Rational;

/// A network together with floating-point rate constants.
#[derive(Clone, Debug)]
pub struct OdeSystem<F> {
    network: Network,
    rates: Vec<F>,
    exponents: Vec<Vec<u32>>,
    deltas: Vec<Vec<F>>,
    kinetic_basis: Vec<Vec<F>>,
    stoich_basis: Vec<Vec<F>>,
}

fn real_vectors<F: Real>(vs: &[Vec<Rational>]) -> Vec<Vec<F>> {
    vs.iter().map(|v| v.iter().map(to_real).collect()).collect()
}

impl<F: Real> OdeSystem<F> {
    /// Uses the network's own rate constants; the kinetic subspace is computed exactly.
    pub fn new(net: &Network) -> Self {
        let rates: Vec<F> = net.rates().iter().map(to_real).collect();
        let kinetic = real_vectors(&kinetic_subspace(net).basis);
        Self::assemble(net, rates, kinetic)
    }

    /// Exact rate constants, e.g. transformed rates from a conjugacy witness.
    pub fn with_rates(net: &Network, rates: &[Rational]) -> Result<Self, DynamicsError> {
        let exact = net.with_rates(rates).map_err(|_| DynamicsError::NonPositiveRate)?;
        Ok(Self::new(&exact))
    }

    /// Floating-point rate constants. The kinetic subspace rank is then
    /// decided with a floating-point tolerance.
    pub fn from_float_rates(net: &Network, rates: &[F]) -> Result<Self, DynamicsError> {
        if rates.len() != net.num_reactions() {
            return Err(DynamicsError::DimensionMismatch {
                expected: net.num_reactions(),
                found: rates.len(),
            });
        }
        if rates.iter().any(|&k| !(k > F::zero()) || !k.is_finite()) {
            return Err(DynamicsError::NonPositiveRate);
        }
        let kinetic = kinetic_subspace_for(net, rates).basis;
        Ok(Self::assemble(net, rates.to_vec(), kinetic))
    }

    fn assemble(net: &Network, rates: Vec<F>, kinetic: Vec<Vec<F>>) -> Self {
        let exponents = net.reactions().iter().map(|r| r.reactant.coeffs().to_vec()).collect();
        let deltas = net
            .reactions()
            .iter()
            .map(|r| {
                r.reaction_vector()
                    .into_iter()
                    .map(|d| F::from_i64(d).unwrap())
                    .collect()
            })
            .collect();
        let stoich = real_vectors(&stoichiometric_subspace(net).basis);
        Self {
            network: net.clone(),
            rates,
            exponents,
            deltas,
            kinetic_basis: orthonormal_basis(&kinetic),
            stoich_basis: orthonormal_basis(&stoich),
        }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn rates(&self) -> &[F] {
        &self.rates
    }

    pub fn num_species(&self) -> usize {
        self.network.num_species()
    }

    /// Orthonormal basis of the kinetic subspace.
    pub fn kinetic_basis(&self) -> &[Vec<F>] {
        &self.kinetic_basis
    }

    /// Orthonormal basis of the stoichiometric subspace.
    pub fn stoich_basis(&self) -> &[Vec<F>] {
        &self.stoich_basis
    }

    fn check_state(&self, x: &[F]) -> Result<(), DynamicsError> {
        if x.len() != self.num_species() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.num_species(),
                found: x.len(),
            });
        }
        if x.iter().any(|&v| !(v > F::zero())) {
            return Err(DynamicsError::NonPositiveState);
        }
        Ok(())
    }

    /// `k_i x^{z_i}` for every reaction.
    pub fn fluxes(&self, x: &[F]) -> Vec<F> {
        self.exponents
            .iter()
            .zip(&self.rates)
            .map(|(z, &k)| k * monomial(x, z))
            .collect()
    }

    pub(crate) fn rhs_into(&self, x: &[F], out: &mut [F]) {
        out.iter_mut().for_each(|o| *o = F::zero());
        for ((z, &k), d) in self.exponents.iter().zip(&self.rates).zip(&self.deltas) {
            let flux = k * monomial(x, z);
            for (o, &dj) in out.iter_mut().zip(d) {
                *o = *o + flux * dj;
            }
        }
    }

    pub fn rhs(&self, x: &[F]) -> Result<Vec<F>, DynamicsError> {
        self.check_state(x)?;
        let mut out = vec![F::zero(); x.len()];
        self.rhs_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn jacobian_unchecked(&self, x: &[F]) -> Matrix<F> {
        let m = x.len();
        let mut j = Matrix::zeros(m, m);
        for ((z, &k), d) in self.exponents.iter().zip(&self.rates).zip(&self.deltas) {
            let flux = k * monomial(x, z);
            for (b, &zb) in z.iter().enumerate() {
                if zb == 0 {
                    continue;
                }
                let partial = flux * F::from_u32(zb).unwrap() / x[b];
                for (a, &da) in d.iter().enumerate() {
                    if da != F::zero() {
                        j[(a, b)] = j[(a, b)] + da * partial;
                    }
                }
            }
        }
        j
    }

    /// Analytic Jacobian, entry `(a, b) = Σ_i k_i (z_i' − z_i)_a z_ib x^{z_i} / x_b`.
    pub fn jacobian(&self, x: &[F]) -> Result<Matrix<F>, DynamicsError> {
        self.check_state(x)?;
        Ok(self.jacobian_unchecked(x))
    }
}

fn monomial<F: Real>(x: &[F], z: &[u32]) -> F {
    x.iter().zip(z).fold(
        F::one(),
        |acc, (&xi, &zi)| if zi == 0 { acc } else { acc * xi.powi(zi as i32) },
    )
}

fn max_abs<F: Real>(v: &[F]) -> F {
    v.iter().fold(F::zero(), |acc, &x| acc.max(x.abs()))
}

fn norm2<F: Real>(v: &[F]) -> F {
    dot(v, v).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrationControls<F> {
    pub rel_tol: F,
    pub abs_tol: F,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<F>,
    pub min_step: F,
    pub max_step: Option<F>,
    pub max_steps: usize,
}

impl<F: Real> Default for IntegrationControls<F> {
    fn default() -> Self {
        Self {
            rel_tol: F::from_f64(1e-9).unwrap(),
            abs_tol: F::from_f64(1e-12).unwrap(),
            initial_step: None,
            min_step: F::from_f64(1e-14).unwrap(),
            max_step: None,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    PositivityLost { time: f64 },
    StepUnderflow { time: f64 },
    MaxSteps { time: f64 },
}

#[derive(Clone, Debug)]
pub struct Trajectory<F> {
    pub times: Vec<F>,
    pub states: Vec<Vec<F>>,
    /// Step size that produced each recorded state (zero for the initial state).
    pub step_sizes: Vec<F>,
    pub rejected_steps: usize,
    pub termination: Termination,
}

impl<F: Real> Trajectory<F> {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn last_state(&self) -> &[F] {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// CSV with header `t,<species...>`.
    pub fn to_csv(&self, species: &[String]) -> String {
        let mut out = String::from("t");
        for s in species {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{}", t.as_f64());
            for v in x {
                let _ = write!(out, ",{}", v.as_f64());
            }
            out.push('\n');
        }
        out
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).unwrap()
}

fn validate_start<F: Real>(sys: &OdeSystem<F>, x0: &[F]) -> Result<(), DynamicsError> {
    sys.check_state(x0)
}

/// Integrates from `x0` to `t_end`, recording every accepted step.
pub fn integrate<F: Real>(
    sys: &OdeSystem<F>,
    x0: &[F],
    t_end: F,
    controls: &IntegrationControls<F>,
) -> Result<Trajectory<F>, DynamicsError> {
    if !(t_end > F::zero()) {
        return Err(DynamicsError::NonPositiveEndTime);
    }
    validate_start(sys, x0)?;
    Ok(run(sys, x0, &[t_end], true, controls))
}

/// Integrates and records the state exactly at each of `times` (increasing,
/// positive). The initial state is recorded at `t = 0`.
pub fn integrate_at<F: Real>(
    sys: &OdeSystem<F>,
    x0: &[F],
    times: &[F],
    controls: &IntegrationControls<F>,
) -> Result<Trajectory<F>, DynamicsError> {
    if times.is_empty() || !(times[0] > F::zero()) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DynamicsError::BadOutputTimes);
    }
    validate_start(sys, x0)?;
    Ok(run(sys, x0, times, false, controls))
}

fn run<F: Real>(
    sys: &OdeSystem<F>,
    x0: &[F],
    stops: &[F],
    record_all: bool,
    ctl: &IntegrationControls<F>,
) -> Trajectory<F> {
    let m = x0.len();
    let t_end = *stops.last().expect("non-empty stops");
    let mut traj = Trajectory {
        times: vec![F::zero()],
        states: vec![x0.to_vec()],
        step_sizes: vec![F::zero()],
        rejected_steps: 0,
        termination: Termination::Completed,
    };
    let mut t = F::zero();
    let mut y = x0.to_vec();
    let mut k: Vec<Vec<F>> = vec![vec![F::zero(); m]; 7];
    sys.rhs_into(&y, &mut k[0]);

    let mut h = ctl.initial_step.unwrap_or_else(|| {
        let scale: Vec<F> = y.iter().map(|&v| ctl.abs_tol + ctl.rel_tol * v.abs()).collect();
        let d0 = y.iter().zip(&scale).fold(F::zero(), |a, (&v, &s)| a.max((v / s).abs()));
        let d1 = k[0]
            .iter()
            .zip(&scale)
            .fold(F::zero(), |a, (&v, &s)| a.max((v / s).abs()));
        if d0 < lit(1e-5) || d1 < lit(1e-5) {
            lit(1e-6)
        } else {
            lit::<F>(0.01) * d0 / d1
        }
    });
    h = h.min(t_end);
    if let Some(hmax) = ctl.max_step {
        h = h.min(hmax);
    }

    let mut next_stop = 0;
    let mut y_stage = vec![F::zero(); m];
    let mut y_new = vec![F::zero(); m];
    let mut steps = 0usize;
    let finish = |traj: &mut Trajectory<F>, term: Termination| traj.termination = term;

    while next_stop < stops.len() {
        if steps >= ctl.max_steps {
            finish(&mut traj, Termination::MaxSteps { time: t.as_f64() });
            return traj;
        }
        steps += 1;
        let target = stops[next_stop];
        let mut hit = false;
        let mut step = h;
        if t + step >= target {
            step = target - t;
            hit = true;
        }

        for s in 1..7 {
            for i in 0..m {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc = acc + step * lit::<F>(a) * kj[i];
                    }
                }
                y_stage[i] = acc;
            }
            let (done, rest) = k.split_at_mut(s);
            let _ = done;
            sys.rhs_into(&y_stage, &mut rest[0]);
            let _ = C[s];
        }
        // Stage 7 evaluated at the 5th-order solution (FSAL), so y_stage is y_new.
        let mut err = F::zero();
        for i in 0..m {
            let mut hi = F::zero();
            let mut lo = F::zero();
            for s in 0..7 {
                hi = hi + lit::<F>(B5[s]) * k[s][i];
                lo = lo + lit::<F>(B4[s]) * k[s][i];
            }
            y_new[i] = y[i] + step * hi;
            let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max((step * (hi - lo)).abs() / sc);
        }

        let positive = y_new.iter().all(|&v| v > F::zero() && v.is_finite());
        if !err.is_finite() || err > F::one() || !positive {
            traj.rejected_steps += 1;
            let factor = if !positive || !err.is_finite() {
                lit(0.25)
            } else {
                (lit::<F>(0.9) * err.powf(lit(-0.2))).max(lit(0.2))
            };
            h = step * factor;
            if h < ctl.min_step * t.abs().max(F::one()) {
                let term = if positive {
                    Termination::StepUnderflow { time: t.as_f64() }
                } else {
                    Termination::PositivityLost { time: t.as_f64() }
                };
                finish(&mut traj, term);
                return traj;
            }
            continue;
        }

        t = if hit { target } else { t + step };
        std::mem::swap(&mut y, &mut y_new);
        let last = k[6].clone();
        k[0] = last;
        if record_all || hit {
            traj.times.push(t);
            traj.states.push(y.clone());
            traj.step_sizes.push(step);
        }
        if hit {
            next_stop += 1;
        }
        let factor = if err == F::zero() {
            lit(5.0)
        } else {
            (lit::<F>(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
        };
        // Keep the pre-clipping step when a stop truncated this one.
        h = if hit { h.max(step * factor) } else { step * factor };
        if let Some(hmax) = ctl.max_step {
            h = h.min(hmax);
        }
    }
    traj
}

#[derive(Clone, Copy, Debug)]
pub struct EquilibriumOptions<F> {
    /// Required `‖f(x*)‖∞`.
    pub tol_eq: F,
    pub max_newton: usize,
    /// Length of the seeding integration.
    pub seed_time: F,
    pub controls: IntegrationControls<F>,
}

impl<F: Real> Default for EquilibriumOptions<F> {
    fn default() -> Self {
        Self {
            tol_eq: lit(1e-10),
            max_newton: 100,
            seed_time: lit(20.0),
            controls: IntegrationControls::default(),
        }
    }
}

/// `Q^T J Q` for an orthonormal basis `Q` (given as row vectors).
fn restrict<F: Real>(j: &Matrix<F>, basis: &[Vec<F>]) -> Matrix<F> {
    let d = basis.len();
    let mut r = Matrix::zeros(d, d);
    for (b, qb) in basis.iter().enumerate() {
        let jq = j.mul_vec(qb);
        for (a, qa) in basis.iter().enumerate() {
            r[(a, b)] = dot(qa, &jq);
        }
    }
    r
}

fn converged<F: Real>(sys: &OdeSystem<F>, x: &[F], f: &[F], tol: F) -> bool {
    let fnorm = max_abs(f);
    if !(fnorm < tol) {
        return false;
    }
    // Guard against drifting to the boundary, where every flux vanishes.
    let flux_scale = sys.fluxes(x).into_iter().fold(F::zero(), |a, v| a.max(v));
    fnorm <= lit::<F>(1e-6) * flux_scale
}

/// Damped Newton on `f` inside `x + S*`. Returns the converged point, if any.
pub fn newton_in_class<F: Real>(sys: &OdeSystem<F>, start: &[F], opts: &EquilibriumOptions<F>) -> Option<Vec<F>> {
    let basis = sys.kinetic_basis();
    let mut x = start.to_vec();
    if x.iter().any(|&v| !(v > F::zero())) {
        return None;
    }
    let mut f = vec![F::zero(); x.len()];
    sys.rhs_into(&x, &mut f);
    if basis.is_empty() {
        return Some(x);
    }
    for _ in 0..=opts.max_newton {
        if converged(sys, &x, &f, opts.tol_eq) {
            return Some(x);
        }
        let jr = restrict(&sys.jacobian_unchecked(&x), basis);
        let g: Vec<F> = basis.iter().map(|q| -dot(q, &f)).collect();
        let delta = solve_linear(&jr, &g)?;
        let mut step = vec![F::zero(); x.len()];
        for (q, &d) in basis.iter().zip(&delta) {
            for (s, &qi) in step.iter_mut().zip(q) {
                *s = *s + d * qi;
            }
        }
        let merit = norm2(&f);
        let mut lambda = F::one();
        let mut accepted = false;
        let mut trial = vec![F::zero(); x.len()];
        let mut f_trial = vec![F::zero(); x.len()];
        while lambda > lit(1e-12) {
            for i in 0..x.len() {
                trial[i] = x[i] + lambda * step[i];
            }
            if trial.iter().all(|&v| v > F::zero()) {
                sys.rhs_into(&trial, &mut f_trial);
                if norm2(&f_trial) < merit {
                    accepted = true;
                    break;
                }
            }
            lambda = lambda * lit(0.5);
        }
        if !accepted {
            return None;
        }
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut f, &mut f_trial);
    }
    None
}

/// Positive equilibrium in the kinetic compatibility class of `x0`: a short
/// integration provides the seed, damped Newton restricted to `x0 + S*` finishes.
pub fn find_equilibrium<F: Real>(sys: &OdeSystem<F>, x0: &[F], opts: &EquilibriumOptions<F>) -> Option<Vec<F>> {
    if sys.check_state(x0).is_err() {
        return None;
    }
    let seed = match integrate(sys, x0, opts.seed_time, &opts.controls) {
        Ok(traj) => traj.last_state().to_vec(),
        Err(_) => x0.to_vec(),
    };
    newton_in_class(sys, &seed, opts).or_else(|| newton_in_class(sys, x0, opts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    LocallyStableInClass,
    Unstable,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub equilibrium: Option<Vec<f64>>,
    pub eigen_real_parts: Vec<f64>,
    pub eigen_imag_parts: Vec<f64>,
    pub classification: Stability,
    /// Distinct equilibria found by multi-start Newton in the same class.
    pub distinct_equilibria: usize,
    /// Uniqueness is only ever "not refuted" by sampling, never proven.
    pub uniqueness_not_refuted: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct StabilityOptions<F> {
    pub equilibrium: EquilibriumOptions<F>,
    pub tol_eig: f64,
    pub multistart: usize,
    pub seed: u64,
}

impl<F: Real> Default for StabilityOptions<F> {
    fn default() -> Self {
        Self {
            equilibrium: EquilibriumOptions::default(),
            tol_eig: 1e-8,
            multistart: 20,
            seed: 42,
        }
    }
}

/// Eigenvalues `(re, im)` of the Jacobian restricted to the kinetic subspace.
pub fn restricted_eigenvalues<F: Real>(sys: &OdeSystem<F>, x: &[F]) -> Vec<(f64, f64)> {
    let basis = sys.kinetic_basis();
    if basis.is_empty() {
        return Vec::new();
    }
    let jr = restrict(&sys.jacobian_unchecked(x), basis);
    let d = jr.rows();
    let dm = DMatrix::from_fn(d, d, |i, j| jr[(i, j)].as_f64());
    dm.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

/// Multi-start Newton from deterministic pseudo-random points of `x + S*`.
/// Returns the distinct equilibria found (including `x` itself when it is one).
pub fn probe_equilibria<F: Real>(
    sys: &OdeSystem<F>,
    around: &[F],
    starts: usize,
    seed: u64,
    opts: &EquilibriumOptions<F>,
) -> Vec<Vec<F>> {
    let basis = sys.kinetic_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = around.iter().fold(F::zero(), |a, &v| a.max(v));
    let mut found: Vec<Vec<F>> = Vec::new();
    let push = |x: Vec<F>, found: &mut Vec<Vec<F>>| {
        let dup = found.iter().any(|y| {
            let d = x.iter().zip(y).fold(F::zero(), |a, (&p, &q)| a.max((p - q).abs()));
            d <= lit::<F>(1e-6) * scale.max(F::one())
        });
        if !dup {
            found.push(x);
        }
    };
    if let Some(x) = newton_in_class(sys, around, opts) {
        push(x, &mut found);
    }
    if basis.is_empty() {
        return found;
    }
    let mut made = 0;
    let mut attempts = 0;
    while made < starts && attempts < starts * 200 {
        attempts += 1;
        let mut x = around.to_vec();
        for q in basis {
            let theta: f64 = rng.gen_range(-1.0..1.0);
            let theta = lit::<F>(theta) * scale;
            for (xi, &qi) in x.iter_mut().zip(q) {
                *xi = *xi + theta * qi;
            }
        }
        if x.iter().any(|&v| !(v > F::zero())) {
            continue;
        }
        made += 1;
        if let Some(eq) = newton_in_class(sys, &x, opts) {
            push(eq, &mut found);
        }
    }
    found
}

/// Finds an equilibrium in the class of `x0`, probes for others, and
/// classifies local stability relative to the class from the restricted
/// Jacobian spectrum. The verdict is empirical.
pub fn classify_stability<F: Real>(sys: &OdeSystem<F>, x0: &[F], opts: &StabilityOptions<F>) -> StabilityVerdict {
    let Some(eq) = find_equilibrium(sys, x0, &opts.equilibrium) else {
        return StabilityVerdict {
            equilibrium: None,
            eigen_real_parts: Vec::new(),
            eigen_imag_parts: Vec::new(),
            classification: Stability::Inconclusive,
            distinct_equilibria: 0,
            uniqueness_not_refuted: false,
        };
    };
    let eig = restricted_eigenvalues(sys, &eq);
    let distinct = probe_equilibria(sys, &eq, opts.multistart, opts.seed, &opts.equilibrium)
        .len()
        .max(1);
    let classification = if eig.is_empty() {
        Stability::Inconclusive
    } else if eig.iter().all(|&(re, _)| re < -opts.tol_eig) {
        Stability::LocallyStableInClass
    } else if eig.iter().any(|&(re, _)| re > opts.tol_eig) {
        Stability::Unstable
    } else {
        Stability::Inconclusive
    };
    StabilityVerdict {
        equilibrium: Some(eq.iter().map(|v| v.as_f64()).collect()),
        eigen_real_parts: eig.iter().map(|e| e.0).collect(),
        eigen_imag_parts: eig.iter().map(|e| e.1).collect(),
        classification,
        distinct_equilibria: distinct,
        uniqueness_not_refuted: distinct == 1,
    }
}

/// Uniform random positive point, used by tests and property probes.
pub fn random_positive_point<R: Rng>(rng: &mut R, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(lo..hi)).collect()
}
