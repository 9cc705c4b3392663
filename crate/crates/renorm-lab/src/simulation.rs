//! `simulate` and `extstate`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use renorm_core::finitevol::{
    decay_experiment, extended_sweep, Boundary, ConstantSource, DecaySurvey, ExtendedSweep, HamiltonianConfig,
    PotentialStage, W_RADIUS,
};

use crate::report::to_value;
use crate::{LabError, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StageArg {
    Bare,
    V2,
    V4,
    V6,
}

impl From<StageArg> for PotentialStage {
    fn from(s: StageArg) -> Self {
        match s {
            StageArg::Bare => PotentialStage::Bare,
            StageArg::V2 => PotentialStage::V2,
            StageArg::V4 => PotentialStage::V4,
            StageArg::V6 => PotentialStage::V6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    /// Periodic with mass² added to −Δ.
    Torus,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long = "L", default_value_t = 11)]
    pub side: usize,
    #[arg(long, default_value_t = 0.05)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    /// First seed; `--seeds` consecutive seeds are run.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Green's columns per seed.
    #[arg(long, default_value_t = 3)]
    pub sources: usize,
    #[arg(long, value_enum, default_value_t = StageArg::V6)]
    pub stage: StageArg,
    #[arg(long, value_enum, default_value_t = BoundaryKind::Dirichlet)]
    pub boundary: BoundaryKind,
    /// Torus mass.
    #[arg(long, default_value_t = 1e-3)]
    pub mass: f64,
    /// R₆ truncation radius (default: largest within the work budget).
    #[arg(long)]
    pub r6_radius: Option<usize>,
    /// Custom ρ (with --eta) in place of the free-lattice value; needed for d < 5.
    #[arg(long, requires = "eta")]
    pub rho: Option<f64>,
    #[arg(long, requires = "rho")]
    pub eta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct ExtstateArgs {
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long = "L", default_value_t = 9)]
    pub side: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.04,0.16")]
    pub kappa_sweep: Vec<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: u64,
    /// Truncation radius of W.
    #[arg(long, default_value_t = W_RADIUS)]
    pub w_radius: usize,
    #[arg(long)]
    pub r6_radius: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn decay_run(config: &HamiltonianConfig, seeds: &[u64], sources: usize) -> Result<DecaySurvey, LabError> {
    Ok(decay_experiment(config, seeds, sources, (1.0, f64::INFINITY))?)
}

pub fn decay_summary(s: &DecaySurvey) -> String {
    format!(
        "{} fits, exponents min {:.3} median {:.3} max {:.3}, {:.0}% ≤ {:.2}",
        s.fits.len(),
        s.quantiles[0],
        s.quantiles[2],
        s.quantiles[4],
        100.0 * s.pass_fraction,
        s.threshold
    )
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome, LabError> {
    if a.seeds == 0 || a.sources == 0 {
        return Err(LabError::Config("--seeds and --sources must be positive".into()));
    }
    let config = HamiltonianConfig {
        d: a.d,
        side: a.side,
        boundary: match a.boundary {
            BoundaryKind::Dirichlet => Boundary::Dirichlet,
            BoundaryKind::Torus => Boundary::Torus { mass: a.mass },
        },
        stage: a.stage.into(),
        kappa: a.kappa,
        alpha: a.alpha,
        seed: a.seed,
        constants: match (a.rho, a.eta) {
            (Some(rho), Some(eta)) => ConstantSource::Custom { rho, eta },
            _ => ConstantSource::Canonical,
        },
        r6_radius: a.r6_radius,
    };
    let seeds: Vec<u64> = (a.seed..a.seed + a.seeds).collect();
    let survey = decay_run(&config, &seeds, a.sources)?;
    let report = json!({
        "geometry": to_value(&config.geometry()?)?,
        "hamiltonian": to_value(&config)?,
        "seeds": seeds,
        "fit_window": "inner half-box sites at Euclidean distance ≥ 1 from the source",
        "survey": to_value(&survey)?,
    });
    Ok(Outcome { pass: survey.pass, summary: format!("decay: {}", decay_summary(&survey)), report })
}

pub fn sweep_pass(s: &ExtendedSweep) -> bool {
    s.bounded && s.kappa_zero_exact && s.points.iter().all(|p| p.within_budget)
}

pub fn sweep_summary(s: &ExtendedSweep) -> String {
    let devs: Vec<String> = s.points.iter().map(|p| format!("{}:{:.3e}", p.kappa, p.deviation_inf)).collect();
    format!(
        "deviations [{}], spread of dev/√κ {:.3} (limit {}), fitted power {:.2}, κ=0 exact {}",
        devs.join(", "),
        s.spread,
        s.spread_limit,
        s.fitted_power,
        s.kappa_zero_exact
    )
}

pub fn extstate(a: &ExtstateArgs) -> Result<Outcome, LabError> {
    if a.kappa_sweep.is_empty() {
        return Err(LabError::Config("--kappa-sweep is empty".into()));
    }
    let mut base = HamiltonianConfig::dirichlet(a.d, a.side, PotentialStage::V6, 0.0, a.alpha, a.seed);
    base.r6_radius = a.r6_radius;
    let sweep = extended_sweep(&base, &a.kappa_sweep, a.w_radius)?;
    let pass = sweep_pass(&sweep);
    let report = json!({
        "geometry": to_value(&base.geometry()?)?,
        "sweep": to_value(&sweep)?,
    });
    Ok(Outcome { pass, summary: format!("extended state: {}", sweep_summary(&sweep)), report })
}
