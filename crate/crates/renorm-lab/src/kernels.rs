//! `constants` and `kernel`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use renorm_core::kernels::{
    free_green, renorm_constants, torus_extrapolated, torus_green, torus_green_projected, GreenKernel,
};

use crate::report::{self, fmt_f64, RunConfig};
use crate::{LabError, Outcome};

/// Largest defining residual accepted for ρ and η, relative to
/// max(1, |constant|): below 1e−8 absolute unless the constant itself is
/// large enough that 1e−8 is under its rounding floor.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    /// Massless kernel on Z^d, stored for |n|_∞ ≤ R.
    Free,
    /// Massive periodic box of side L.
    Torus,
    /// Periodic box with the constant mode removed.
    TorusProjected,
    /// Richardson extrapolation of projected tori L and L/2.
    TorusExtrapolated,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = GeometryKind::Free)]
    pub geometry: GeometryKind,
    /// Torus side.
    #[arg(long = "L", default_value_t = 32)]
    pub side: usize,
    /// Torus mass.
    #[arg(long, default_value_t = 1e-3)]
    pub mass: f64,
    /// Free-kernel radius.
    #[arg(long = "R", default_value_t = 16)]
    pub radius: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KernelFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize, Args)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long = "R", default_value_t = 16)]
    pub radius: usize,
    #[arg(long, value_enum, default_value_t = GeometryKind::Free)]
    pub geometry: GeometryKind,
    #[arg(long = "L", default_value_t = 32)]
    pub side: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub mass: f64,
    #[arg(long, value_enum, default_value_t = KernelFormat::Csv)]
    pub format: KernelFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn build_kernel(
    d: usize,
    geometry: GeometryKind,
    side: usize,
    mass: f64,
    radius: usize,
) -> Result<GreenKernel, LabError> {
    Ok(match geometry {
        GeometryKind::Free => free_green(d, 0.0, radius)?,
        GeometryKind::Torus => torus_green(d, side, mass)?,
        GeometryKind::TorusProjected => torus_green_projected(d, side, mass)?,
        GeometryKind::TorusExtrapolated => torus_extrapolated(d, side)?,
    })
}

pub fn constants(a: &ConstantsArgs) -> Result<Outcome, LabError> {
    let g = build_kernel(a.d, a.geometry, a.side, a.mass, a.radius)?;
    let c = renorm_constants(&g)?;
    let tol_m = RESIDUAL_TOL * c.rho.abs().max(c.sigma.powi(3)).max(1.0);
    let tol_n = RESIDUAL_TOL * c.eta.abs().max(1.0);
    let pass = c.residual_m0 < tol_m && c.residual_n0 < tol_n;
    let summary = format!(
        "constants d={} {}: σ={:.12} ρ={:.12} η={:.12} (residuals {:.1e}, {:.1e})",
        c.d, c.source, c.sigma, c.rho, c.eta, c.residual_m0, c.residual_n0
    );
    let report = json!({
        "d": c.d,
        "sigma": c.sigma,
        "rho": c.rho,
        "eta": c.eta,
        "residual_M0": c.residual_m0,
        "residual_N0": c.residual_n0,
        "tail_bound": c.tail_bound,
        "kernel": g.describe(),
        "tolerance_M0": tol_m,
        "tolerance_N0": tol_n,
        "absolute_pass": c.residual_m0 < RESIDUAL_TOL && c.residual_n0 < RESIDUAL_TOL,
    });
    Ok(Outcome { pass, summary, report })
}

/// One row per orthant representative 0 ≤ n₁, …, n_d.
fn rows(g: &GreenKernel) -> Vec<(Vec<usize>, f64)> {
    (0..g.values.len()).map(|i| (g.values.coords(i), g.values.data[i])).collect()
}

pub fn kernel_csv(g: &GreenKernel) -> String {
    let mut s = (1..=g.d).map(|k| format!("n{k}")).collect::<Vec<_>>().join(",");
    s.push_str(",value\n");
    for (c, v) in rows(g) {
        for x in &c {
            s.push_str(&x.to_string());
            s.push(',');
        }
        s.push_str(&fmt_f64(v));
        s.push('\n');
    }
    s
}

pub fn kernel(a: &KernelArgs) -> Result<Outcome, LabError> {
    let g = build_kernel(a.d, a.geometry, a.side, a.mass, a.radius)?;
    let text = match a.format {
        KernelFormat::Csv => kernel_csv(&g),
        KernelFormat::Json => {
            let rows: Vec<_> = rows(&g).into_iter().map(|(n, v)| json!({"n": n, "value": v})).collect();
            let body = json!({"d": g.d, "kernel": g.describe(), "sigma": g.sigma(), "rows": rows});
            report::to_json(&report::envelope(&RunConfig::new("kernel", a)?, true, body)?)
        }
    };
    match &a.out {
        Some(p) => report::write_atomic(p, &text)?,
        None => {
            std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| LabError::Io(format!("stdout: {e}")))?
        }
    }
    Ok(Outcome { pass: true, summary: format!("kernel {} ({} rows)", g.describe(), g.values.len()), report: json!({}) })
}
