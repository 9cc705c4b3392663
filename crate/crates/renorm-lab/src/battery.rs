//! `verify-all`: the ten acceptance criteria in one run.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use renorm_core::finitevol::{HamiltonianConfig, PotentialStage, W_RADIUS};
use renorm_core::kernels::{
    axis_points, decay_fit, derived_kernels, free_green, renorm_constants, torus_green_projected,
};
use renorm_core::opalgebra::IdentityReport;
use renorm_core::probtools::{bonami_suite, khintchine_suite};

use crate::algebra::{graph_table, lemma_reports, offset_check, ring_identities, ConstantsKind};
use crate::probability::{bonami_pass, khintchine_pass};
use crate::report::{self, to_value, RunConfig};
use crate::simulation::{decay_run, decay_summary, sweep_pass, sweep_summary};
use crate::{LabError, Outcome};

/// Watson's simple-cubic integral W/2 = G₀(0) for d = 3.
pub const WATSON_G0: f64 = 0.2527310098586632;

#[derive(Clone, Debug, Serialize, Args)]
pub struct VerifyAllArgs {
    /// Two seeds instead of five in the decay survey.
    #[arg(long)]
    pub quick: bool,
    /// Base seed of every stochastic criterion.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for one report per criterion plus summary.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    pub report: Value,
}

fn criterion(id: usize, name: &'static str, pass: bool, summary: String, report: Value) -> Criterion {
    Criterion { id, name, pass, summary, report }
}

pub fn graph_tables() -> Result<Criterion, LabError> {
    let (p6, r6) = graph_table(6)?;
    let (p7, r7) = graph_table(7)?;
    let n = |r: &Value| r["rows"].as_array().map_or(0, Vec::len);
    let summary = format!("order 6: {} rows match {p6}; order 7: {} rows match {p7}", n(&r6), n(&r7));
    Ok(criterion(1, "graph tables", p6 && p7, summary, json!({"order6": r6, "order7": r7})))
}

pub fn offset_cancellation() -> Result<Criterion, LabError> {
    let (pass, report) = offset_check()?;
    let control = report["eta_shift_control"]["fails"].as_bool().unwrap_or(false);
    Ok(criterion(2, "offset cancellation", pass, format!("zero residual and η control fails: {control}"), report))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRun {
    pub sites: usize,
    pub seed: u64,
    pub constants: ConstantsKind,
    pub report: IdentityReport,
}

/// Ring sizes 6, 8, 10, five seeds, canonical and perturbed constants.
pub fn identity_runs(seed: u64) -> Result<Vec<IdentityRun>, LabError> {
    let mut out = Vec::new();
    for sites in [6, 8, 10] {
        for s in seed..seed + 5 {
            for constants in [ConstantsKind::Canonical, ConstantsKind::Perturbed] {
                let report = ring_identities(sites, s, constants, false)?;
                out.push(IdentityRun { sites, seed: s, constants, report });
            }
        }
    }
    Ok(out)
}

/// Worst residual over the selected rows, with every selected row required to pass.
fn row_criterion(id: usize, name: &'static str, runs: &[IdentityRun], select: impl Fn(&str) -> bool) -> Criterion {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut failures = Vec::new();
    for run in runs {
        for row in run.report.rows.iter().filter(|r| r.expected && select(&r.check)) {
            count += 1;
            worst = worst.max(row.residual);
            if !row.pass {
                failures.push(format!("{} (N={}, seed {}, {:?})", row.check, run.sites, run.seed, run.constants));
            }
        }
    }
    let pass = count > 0 && failures.is_empty();
    let summary = format!("{count} rows over {} instances, worst residual {worst:.2e}", runs.len());
    criterion(id, name, pass, summary, json!({"rows": count, "worst_residual": worst, "failures": failures}))
}

pub fn born_identity(runs: &[IdentityRun]) -> Criterion {
    row_criterion(3, "degreewise Born identity", runs, |c| (0..=7).any(|i| c == format!("boxed{i}_vs_born")))
}

pub fn rearrangements(runs: &[IdentityRun]) -> Criterion {
    row_criterion(4, "rearrangement identities", runs, |c| c.starts_with("rearrange"))
}

pub fn lemma_recurrence(runs: &[IdentityRun]) -> Criterion {
    row_criterion(5, "boxed-term recurrence", runs, |c| (2..=7).any(|i| c == format!("lemma_iteration_{i}")))
}

pub fn probability(seed: u64) -> Result<Criterion, LabError> {
    let b = bonami_suite(200, 12, 3, seed)?;
    let k = khintchine_suite(seed, 20, 10)?;
    let pass = bonami_pass(&b) && khintchine_pass(&k);
    let s2 = k.constants.iter().filter(|c| c.s == 2 && c.p == 2.0).map(|c| c.max_ratio).fold(0.0, f64::max);
    let summary = format!(
        "Bonami max ratio {:.4}; |s1p2 − 1| {:.1e}; s2p2 max {s2:.4} ≤ {}; control exceeds {}",
        b.max_ratio, k.s1_p2_deviation, k.s2_p2_bound, k.negative_control.exceeds_rhs
    );
    Ok(criterion(6, "probability suite", pass, summary, json!({"bonami": to_value(&b)?, "khintchine": to_value(&k)?})))
}

pub fn kernel_decay() -> Result<Criterion, LabError> {
    let g = free_green(5, 0.0, 16)?;
    let g_fit = decay_fit(&axis_points(&g.values, (4, 16)))?;
    let k = g.values.map(|v| v * v * v);
    let k_fit = decay_fit(&axis_points(&k, (4, 16)))?;
    let t = torus_green_projected(5, 32, 1e-3)?;
    let c = renorm_constants(&t)?;
    let dk = derived_kernels(&t, &c)?;
    let gn_fit = decay_fit(&axis_points(&dk.g0n, (3, 7)))?;
    let watson = free_green(3, 0.0, 2)?.sigma();
    let checks = [
        (g_fit.exponent + 3.0).abs() <= 0.15,
        (k_fit.exponent + 9.0).abs() <= 1.0,
        gn_fit.exponent <= -6.3,
        (watson - WATSON_G0).abs() <= 1e-6,
    ];
    let summary = format!(
        "G₀ {:.3}, K {:.3}, G*Ñ {:.3}, d=3 G(0) {:.12} vs {WATSON_G0}",
        g_fit.exponent, k_fit.exponent, gn_fit.exponent, watson
    );
    let report = json!({
        "free_g0": {"fit": to_value(&g_fit)?, "window": [4, 16], "target": -3.0, "tolerance": 0.15},
        "k_cubed": {"fit": to_value(&k_fit)?, "window": [4, 16], "target": -9.0, "tolerance": 1.0},
        "g0_ntilde": {"fit": to_value(&gn_fit)?, "window": [3, 7], "bound": -6.3, "kernel": t.describe()},
        "watson": {"g0": watson, "reference": WATSON_G0, "tolerance": 1e-6},
        "checks": checks,
    });
    Ok(criterion(7, "kernel decay", checks.iter().all(|&x| x), summary, report))
}

/// d = 5, L = 11, κ = 0.05, α = 0.3, three sources per seed; five seeds, or
/// two when quick.
pub fn decay(scale: Scale, seed: u64) -> Result<Criterion, LabError> {
    let n = match scale {
        Scale::Quick => 2,
        Scale::Full => 5,
    };
    let config = HamiltonianConfig::dirichlet(5, 11, PotentialStage::V6, 0.05, 0.3, seed);
    let seeds: Vec<u64> = (seed..seed + n).collect();
    let s = decay_run(&config, &seeds, 3)?;
    Ok(criterion(
        8,
        "Green's function decay",
        s.pass,
        decay_summary(&s),
        json!({"seeds": seeds, "survey": to_value(&s)?}),
    ))
}

pub fn extended_state(seed: u64) -> Result<Criterion, LabError> {
    let base = HamiltonianConfig::dirichlet(5, 9, PotentialStage::V6, 0.0, 0.3, seed);
    let s = renorm_core::finitevol::extended_sweep(&base, &[0.01, 0.04, 0.16], W_RADIUS)?;
    Ok(criterion(9, "extended state", sweep_pass(&s), sweep_summary(&s), to_value(&s)?))
}

pub fn summation_lemmas() -> Result<Criterion, LabError> {
    let reports = lemma_reports()?;
    let pass = reports.iter().all(|r| r.pass);
    let worst = reports.iter().map(|r| r.spread).fold(0.0, f64::max);
    Ok(criterion(
        10,
        "summation lemmas",
        pass,
        format!("worst spread {worst:.2} ≤ 50"),
        json!({"lemmas": to_value(&reports)?}),
    ))
}

fn guarded(id: usize, name: &'static str, r: Result<Criterion, LabError>) -> Criterion {
    r.unwrap_or_else(|e| criterion(id, name, false, format!("error: {e}"), json!({"error": e.to_string()})))
}

/// Every criterion in order; `progress` sees each as it finishes.
pub fn run_all(scale: Scale, seed: u64, mut progress: impl FnMut(&Criterion, f64)) -> Vec<Criterion> {
    let mut out = Vec::new();
    let mut push = |c: Criterion, t: Instant| {
        progress(&c, t.elapsed().as_secs_f64());
        out.push(c);
    };
    let t = Instant::now();
    push(guarded(1, "graph tables", graph_tables()), t);
    let t = Instant::now();
    push(guarded(2, "offset cancellation", offset_cancellation()), t);
    let t = Instant::now();
    match identity_runs(seed) {
        Ok(runs) => {
            push(born_identity(&runs), t);
            push(rearrangements(&runs), Instant::now());
            push(lemma_recurrence(&runs), Instant::now());
        }
        Err(e) => {
            for (id, name) in
                [(3, "degreewise Born identity"), (4, "rearrangement identities"), (5, "boxed-term recurrence")]
            {
                push(guarded(id, name, Err(LabError::Numerical(e.to_string()))), t);
            }
        }
    }
    let t = Instant::now();
    push(guarded(6, "probability suite", probability(seed)), t);
    let t = Instant::now();
    push(guarded(7, "kernel decay", kernel_decay()), t);
    let t = Instant::now();
    push(guarded(8, "Green's function decay", decay(scale, seed)), t);
    let t = Instant::now();
    push(guarded(9, "extended state", extended_state(seed)), t);
    let t = Instant::now();
    push(guarded(10, "summation lemmas", summation_lemmas()), t);
    out
}

pub fn verify_all(a: &VerifyAllArgs) -> Result<Outcome, LabError> {
    let scale = if a.quick { Scale::Quick } else { Scale::Full };
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| LabError::Io(format!("{}: {e}", dir.display())))?;
    }
    let config = RunConfig::new("verify-all", a)?;
    let criteria = run_all(scale, a.seed, |c, secs| {
        eprintln!("{} {:>2} {} ({secs:.1} s): {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.summary);
    });
    if let Some(dir) = &a.out_dir {
        for c in &criteria {
            let body = report::envelope(&config, c.pass, to_value(c)?)?;
            report::write_atomic(&dir.join(format!("criterion_{:02}.json", c.id)), &report::to_json(&body))?;
        }
    }
    let pass = criteria.iter().all(|c| c.pass);
    let rows: Vec<Value> =
        criteria.iter().map(|c| json!({"id": c.id, "name": c.name, "pass": c.pass, "summary": c.summary})).collect();
    let summary = json!({"scale": scale, "seed": a.seed, "criteria": rows});
    if let Some(dir) = &a.out_dir {
        let body = report::envelope(&config, pass, summary.clone())?;
        report::write_atomic(&dir.join("summary.json"), &report::to_json(&body))?;
    }
    let passed = criteria.iter().filter(|c| c.pass).count();
    Ok(Outcome { pass, summary: format!("verify-all: {passed}/{} criteria", criteria.len()), report: summary })
}
