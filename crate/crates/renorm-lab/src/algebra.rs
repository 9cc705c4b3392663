//! `graphs`, `verify-offsets` and `verify`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use renorm_core::graphcalc::{
    coefficient_table, published_rows_partition_compositions, verify_offsets, verify_offsets_with_eta_shift,
    GraphCalcError, OffsetsSummary, Rational,
};
use renorm_core::kernels::{
    convolution_lemma, difference_lemma, weighted_convolution_lemma, LemmaReport, DEFAULT_SPREAD,
};
use renorm_core::opalgebra::{identity_suite, ConstantChoice, IdentityReport, InstanceConfig, LatticeInstance};

use crate::report::to_value;
use crate::{LabError, Outcome};

#[derive(Clone, Debug, Serialize, Args)]
pub struct GraphsArgs {
    /// Remainder order.
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u8).range(6..=7))]
    pub order: u8,
    /// Write the table as JSON.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct OffsetsArgs {
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Boxed terms, Born series, rearrangements and special operators on a ring.
    Identities,
    /// Ratio checks of the summation and difference lemmas.
    Lemmas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsKind {
    Canonical,
    /// (ρ + 1, η − 1).
    Perturbed,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Seed of the sign field (required for identities).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ring size.
    #[arg(long, default_value_t = 8)]
    pub sites: usize,
    #[arg(long, value_enum, default_value_t = ConstantsKind::Canonical)]
    pub constants: ConstantsKind,
    /// Also check the degree-i homogeneity of every boxed term.
    #[arg(long)]
    pub homogeneity: bool,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn graph_table(order: usize) -> Result<(bool, Value), LabError> {
    let rows = coefficient_table(order)?;
    let partition = published_rows_partition_compositions(order);
    let all_match = rows.iter().all(|r| r.matches());
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "class": r.class,
                "coefficient": r.coefficient.to_string(),
                "paper": r.published.to_string(),
                "match": r.matches(),
            })
        })
        .collect();
    let report = json!({
        "order": order,
        "rows": rows,
        "all_match": all_match,
        "partition_complete": partition,
        "grammar": "terms c*s^i*r^j*e^k joined by + and -, with s = σ, r = ρ, e = η; 0 for the zero polynomial",
    });
    Ok((all_match && partition, report))
}

pub fn graphs(a: &GraphsArgs) -> Result<Outcome, LabError> {
    let (pass, report) = graph_table(a.order as usize)?;
    let n = report["rows"].as_array().map_or(0, Vec::len);
    Ok(Outcome { pass, summary: format!("graphs order {}: {n} rows", a.order), report })
}

fn offset_summary(s: &OffsetsSummary) -> Value {
    json!({
        "order6": {"passed": s.order6.passed(), "residual": s.order6.residual, "cancelled": s.order6.cancelled},
        "order7": {"passed": s.order7.passed(), "residual": s.order7.residual, "cancelled": s.order7.cancelled},
    })
}

/// Certified offsets plus the η-shift control, which must fail.
pub fn offset_check() -> Result<(bool, Value), LabError> {
    let s = verify_offsets()?;
    let certified = s.order6.passed() && s.order7.passed();
    let (control_fails, control) = match verify_offsets_with_eta_shift(Rational::from_integer(1)) {
        Ok(c) => (!(c.order6.passed() && c.order7.passed()), offset_summary(&c)),
        Err(e @ GraphCalcError::OffsetFailure(_)) => (true, json!({"error": e.to_string()})),
        Err(e) => return Err(e.into()),
    };
    let report = json!({
        "certified": offset_summary(&s),
        "eta_shift_control": {"shift": "4η → 4η + 1 in every ⟨6,1⟩ bookkeeping term", "fails": control_fails, "result": control},
    });
    Ok((certified && control_fails, report))
}

pub fn offsets(_: &OffsetsArgs) -> Result<Outcome, LabError> {
    let (pass, report) = offset_check()?;
    Ok(Outcome { pass, summary: "offset cancellation at orders 6 and 7 with η control".into(), report })
}

pub fn ring_identities(
    sites: usize,
    seed: u64,
    constants: ConstantsKind,
    homogeneity: bool,
) -> Result<IdentityReport, LabError> {
    let mut cfg = InstanceConfig::ring(sites, seed);
    cfg.constants = match constants {
        ConstantsKind::Canonical => ConstantChoice::Canonical,
        ConstantsKind::Perturbed => ConstantChoice::Perturbed,
    };
    let inst = LatticeInstance::new(cfg)?;
    Ok(identity_suite(&inst, homogeneity)?)
}

/// Probe sets of the lemma checks: axis radii 2..=20 in a box of radius 80,
/// the textbook pair (100e₁, 101e₁) and a planar grid of pairs.
pub fn lemma_reports() -> Result<Vec<LemmaReport>, LabError> {
    let probes: Vec<usize> = (2..=20).collect();
    let grid: Vec<Vec<i64>> = (-12..=12).flat_map(|x| (-12..=12).map(move |y| vec![x, y])).collect();
    let pairs: Vec<_> =
        grid.iter().step_by(7).flat_map(|a| grid.iter().step_by(5).map(move |b| (a.clone(), b.clone()))).collect();
    Ok(vec![
        convolution_lemma(5, 3.0, 4.0, 80, &probes, DEFAULT_SPREAD)?,
        weighted_convolution_lemma(5, 3.0, 3.0, 2.5, 80, &probes, DEFAULT_SPREAD)?,
        difference_lemma(0.3, &[(vec![100, 0, 0], vec![101, 0, 0])], DEFAULT_SPREAD)?,
        difference_lemma(0.3, &pairs, DEFAULT_SPREAD)?,
    ])
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, LabError> {
    match a.suite {
        Suite::Identities => {
            let seed = a.seed.ok_or_else(|| LabError::Config("--seed is required for --suite identities".into()))?;
            let r = ring_identities(a.sites, seed, a.constants, a.homogeneity)?;
            let pass = r.all_as_expected();
            let bad: Vec<&str> = r.rows.iter().filter(|x| !x.as_expected()).map(|x| x.check.as_str()).collect();
            let summary =
                format!("identities on {} sites, seed {seed}: {} rows, unexpected {:?}", a.sites, r.rows.len(), bad);
            Ok(Outcome { pass, summary, report: to_value(&r)? })
        }
        Suite::Lemmas => {
            let reports = lemma_reports()?;
            let pass = reports.iter().all(|r| r.pass);
            let spreads: Vec<String> = reports.iter().map(|r| format!("{:.2}", r.spread)).collect();
            let summary = format!("summation lemmas: spreads [{}] against {DEFAULT_SPREAD}", spreads.join(", "));
            Ok(Outcome { pass, summary, report: json!({"lemmas": to_value(&reports)?}) })
        }
    }
}
