//! Serializable reports tying the analysis modules together, plus the JSON
//! schema they conform to.

use std::fmt;

use serde::Serialize;

use crate::balance::{find_complex_balanced_equilibrium, BalanceCertificate};
use crate::conjugacy::{ConjugacyCheck, ConjugacyWitness};
use crate::dynamics::{classify_stability, OdeSystem, StabilityOptions, StabilityVerdict, Termination, Trajectory};
use crate::search::SearchOutcome;
use crate::structure::{linkage_classes, subspace_report, ComplexGraph, SubspaceReport};
use crate::Network;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON schema for every document the command-line front end emits.
pub const SCHEMA: &str = include_str!("schema.json");

#[derive(Clone, Debug, Serialize)]
pub struct StructuralSection {
    pub weakly_reversible: bool,
    /// Each class as the display strings of its complexes.
    pub linkage_classes: Vec<Vec<String>>,
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub l: usize,
    pub s: usize,
    pub s_star: usize,
    pub deficiency: i64,
    pub subspaces: SubspaceReport,
}

impl StructuralSection {
    pub fn of(net: &Network) -> Self {
        let graph = ComplexGraph::from_network(net);
        let classes = linkage_classes(net);
        let sub = subspace_report(net);
        let names = |c: &[usize]| {
            c.iter()
                .map(|&i| net.complexes()[i].display(net.species()).to_string())
                .collect()
        };
        let n = net.num_complexes();
        Self {
            weakly_reversible: graph.is_weakly_reversible(),
            linkage_classes: classes.iter().map(|c| names(c)).collect(),
            n,
            r: net.num_reactions(),
            m: net.num_species(),
            l: classes.len(),
            s: sub.s,
            s_star: sub.s_star,
            deficiency: n as i64 - classes.len() as i64 - sub.s as i64,
            subspaces: sub,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsSection {
    pub x0: Vec<f64>,
    pub stability: StabilityVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceSection {
    pub complex_balanced: bool,
    pub certificate: BalanceCertificate<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacySection {
    pub feasible: bool,
    pub witness: Option<ConjugacyWitness>,
    /// Target network text with the transformed rate constants.
    pub target: Option<String>,
    pub checks: Vec<ConjugacyCheck>,
    pub search: Option<SearchOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub species: Vec<String>,
    /// Rate constants as exact `p/q` strings, file order.
    pub rates: Vec<String>,
    pub structural: StructuralSection,
    pub dynamics: DynamicsSection,
    pub balance: BalanceSection,
    pub conjugacy: Option<ConjugacySection>,
}

impl AnalysisReport {
    /// Structure, dynamics from `x0`, and complex balancing at the network's rates.
    pub fn analyze(net: &Network, x0: &[f64], opts: &StabilityOptions<f64>) -> Self {
        let sys = OdeSystem::<f64>::new(net);
        let certificate = find_complex_balanced_equilibrium(&sys);
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "analysis",
            species: net.species().names().to_vec(),
            rates: net.rates().iter().map(|k| k.to_string()).collect(),
            structural: StructuralSection::of(net),
            dynamics: DynamicsSection {
                x0: x0.to_vec(),
                stability: classify_stability(&sys, x0, opts),
            },
            balance: BalanceSection {
                complex_balanced: certificate.balanced,
                certificate,
            },
            conjugacy: None,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub conjugacy: ConjugacySection,
}

impl ConjugacyDocument {
    pub fn new(conjugacy: ConjugacySection) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "conjugacy",
            conjugacy,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub species: Vec<String>,
    pub termination: Termination,
    pub steps: usize,
    pub rejected_steps: usize,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    pub check: Option<ConjugacyCheck>,
}

impl SimulationDocument {
    pub fn new(net: &Network, traj: &Trajectory<f64>, check: Option<ConjugacyCheck>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "simulation",
            species: net.species().names().to_vec(),
            termination: traj.termination,
            steps: traj.times.len() - 1,
            rejected_steps: traj.rejected_steps,
            final_time: *traj.times.last().expect("initial time recorded"),
            final_state: traj.last_state().to_vec(),
            check,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    /// The witness satisfies the outflow condition exactly.
    pub condition_holds: bool,
    pub witness: Option<ConjugacyWitness>,
    pub checks: Vec<ConjugacyCheck>,
    pub passed: bool,
}

impl VerificationDocument {
    pub fn new(condition_holds: bool, witness: Option<ConjugacyWitness>, checks: Vec<ConjugacyCheck>) -> Self {
        let passed = condition_holds && checks.iter().all(|c| c.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "verification",
            condition_holds,
            witness,
            checks,
            passed,
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("document serializes")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.10}")).collect();
    format!("({})", parts.join(", "))
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = &self.structural;
        writeln!(f, "species: {}", self.species.join(" "))?;
        writeln!(f, "rates: {}", self.rates.join(", "))?;
        writeln!(
            f,
            "complexes n = {}, reactions r = {}, species m = {}",
            st.n, st.r, st.m
        )?;
        writeln!(f, "linkage classes l = {}", st.l)?;
        for (i, class) in st.linkage_classes.iter().enumerate() {
            writeln!(f, "  L{}: {}", i + 1, class.join(", "))?;
        }
        writeln!(f, "weakly_reversible = {}", st.weakly_reversible)?;
        writeln!(f, "s = {}, s* = {}, deficiency = {}", st.s, st.s_star, st.deficiency)?;
        let stab = &self.dynamics.stability;
        match &stab.equilibrium {
            Some(eq) => {
                writeln!(f, "equilibrium = {}", fmt_vec(eq))?;
                let eig: Vec<String> = stab
                    .eigen_real_parts
                    .iter()
                    .zip(&stab.eigen_imag_parts)
                    .map(|(re, im)| format!("{re:.6}{im:+.6}i"))
                    .collect();
                writeln!(f, "restricted eigenvalues = [{}]", eig.join(", "))?;
            }
            None => writeln!(f, "equilibrium = none found")?,
        }
        let stability = serde_json::to_value(stab.classification).expect("enum serializes");
        writeln!(f, "stability = {}", stability.as_str().unwrap_or_default())?;
        writeln!(f, "distinct equilibria found = {}", stab.distinct_equilibria)?;
        writeln!(f, "complex_balanced = {}", self.balance.complex_balanced)?;
        if let Some(eq) = &self.balance.certificate.equilibrium {
            writeln!(f, "complex balanced equilibrium = {}", fmt_vec(eq))?;
        }
        if let Some(conj) = &self.conjugacy {
            write!(f, "{conj}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ConjugacyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[crate::Rational]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "c = ({})", join(&self.c))?;
        writeln!(f, "b = ({})", join(&self.b))?;
        writeln!(f, "k~ = ({})", join(&self.k_tilde))?;
        if !self.is_identity_permutation() {
            writeln!(f, "permutation = {:?}", self.permutation)?;
        }
        writeln!(f, "solution cone dimension = {}", self.solution_cone_dim)
    }
}

impl fmt::Display for ConjugacySection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(search) = &self.search {
            writeln!(
                f,
                "{} result(s) from {} candidate(s){}",
                search.results.len(),
                search.candidates_evaluated,
                if search.cap_exhausted { " (cap exhausted)" } else { "" }
            )?;
            for (i, r) in search.results.iter().enumerate() {
                writeln!(
                    f,
                    "--- result {} ({} complexes, {} phantom(s), balanced = {}) ---",
                    i + 1,
                    r.num_complexes(),
                    r.phantoms.len(),
                    r.balanced
                )?;
                write!(f, "{}", r.instantiated().to_text())?;
                write!(f, "{}", r.witness)?;
            }
            return Ok(());
        }
        match &self.witness {
            Some(w) => {
                writeln!(f, "feasible")?;
                write!(f, "{w}")?;
                if let Some(t) = &self.target {
                    writeln!(f, "transformed target:")?;
                    write!(f, "{t}")?;
                }
            }
            None => writeln!(f, "infeasible")?,
        }
        for c in &self.checks {
            writeln!(
                f,
                "trajectory check: max deviation {:.3e} over {} points, {}",
                c.max_deviation,
                c.grid_points,
                if c.passed { "passed" } else { "FAILED" }
            )?;
        }
        Ok(())
    }
}
