//! `probability`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use renorm_core::probtools::{bonami_suite, khintchine_suite, BonamiReport, KhintchineReport};

use crate::report::to_value;
use crate::{LabError, Outcome};

/// Allowed |ratio − 1| for s = 1, p = 2, where the inequality is an identity.
pub const S1_P2_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProbSuite {
    Bonami,
    Khintchine,
    All,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct ProbabilityArgs {
    #[arg(long, value_enum, default_value_t = ProbSuite::All)]
    pub suite: ProbSuite,
    #[arg(long)]
    pub seed: u64,
    /// Random polynomials in the Bonami check.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Boolean variables.
    #[arg(long, default_value_t = 12)]
    pub m: usize,
    /// Largest degree.
    #[arg(long, default_value_t = 3)]
    pub smax: usize,
    /// Sites of the Khintchine chains.
    #[arg(long, default_value_t = 10)]
    pub sites: usize,
    /// Random chains per (s, p) in the Khintchine check.
    #[arg(long, default_value_t = 20)]
    pub chains: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn bonami_pass(r: &BonamiReport) -> bool {
    r.all_hold
}

pub fn khintchine_pass(r: &KhintchineReport) -> bool {
    r.s1_p2_deviation <= S1_P2_TOL && r.s2_p2_holds && r.negative_control.exceeds_rhs
}

pub fn probability(a: &ProbabilityArgs) -> Result<Outcome, LabError> {
    let mut report = Map::new();
    let mut pass = true;
    let mut parts = Vec::new();
    if matches!(a.suite, ProbSuite::Bonami | ProbSuite::All) {
        let b = bonami_suite(a.trials, a.m, a.smax, a.seed)?;
        pass &= bonami_pass(&b);
        parts.push(format!("Bonami max Ef⁴/(9^s (Ef²)²) = {:.4} over {} trials", b.max_ratio, b.trials.len()));
        report.insert("bonami".into(), to_value(&b)?);
    }
    if matches!(a.suite, ProbSuite::Khintchine | ProbSuite::All) {
        let k = khintchine_suite(a.seed, a.chains, a.sites)?;
        pass &= khintchine_pass(&k);
        let s2 = k.constants.iter().filter(|c| c.s == 2 && c.p == 2.0).map(|c| c.max_ratio).fold(0.0, f64::max);
        parts.push(format!(
            "Khintchine |s1p2 − 1| = {:.1e}, s2p2 max ratio {s2:.4} (bound {}), control exceeds: {}",
            k.s1_p2_deviation, k.s2_p2_bound, k.negative_control.exceeds_rhs
        ));
        report.insert("khintchine".into(), to_value(&k)?);
        report.insert("s1_p2_tolerance".into(), json!(S1_P2_TOL));
    }
    Ok(Outcome { pass, summary: parts.join("; "), report: Value::Object(report) })
}
