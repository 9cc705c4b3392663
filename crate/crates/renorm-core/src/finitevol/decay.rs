//! Power-law fits of Green's columns over the inner half-box.

use serde::{Deserialize, Serialize};

use super::hamiltonian::{assemble_with, Hamiltonian, HamiltonianConfig, GREEN_TOL};
use super::lattice::BoxGeometry;
use super::FvError;
use crate::kernels::{decay_fit, DecayFit, GreenKernel};

/// Slack ε in the exponent threshold −(d − 2 − ε).
pub const DECAY_EPSILON: f64 = 0.5;
/// Fraction of fits that must clear the threshold.
pub const PASS_FRACTION: f64 = 0.9;

/// Center, then the center shifted by ±⌊L/8⌋∨1 along successive axes.
pub fn survey_sources(geom: &BoxGeometry, n: usize) -> Vec<Vec<i64>> {
    let o = geom.origin();
    let step = (geom.side as i64 / 8).max(1);
    let mut out = vec![o.clone()];
    'outer: for k in 0..geom.d {
        for sign in [1, -1] {
            if out.len() >= n {
                break 'outer;
            }
            let mut c = o.clone();
            c[k] += sign * step;
            out.push(c);
        }
    }
    out.truncate(n);
    out
}

/// (Euclidean distance, G) over inner-half sites t ≠ source with distance
/// in the window, plus the displacement of each point.
fn window_points(geom: &BoxGeometry, source: &[i64], values: &[f64], window: (f64, f64)) -> Vec<(Vec<i64>, f64, f64)> {
    geom.inner_sites()
        .into_iter()
        .filter_map(|i| {
            let c = geom.coords(i);
            let disp = geom.displacement(source, &c);
            let r = disp.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            (r > 0.0 && r >= window.0 && r <= window.1).then_some((disp, r, values[i]))
        })
        .collect()
}

/// Fit along the 2d axis rays from `source`, radii 1..=rmax.
pub fn axis_fit(geom: &BoxGeometry, source: &[i64], values: &[f64], rmax: usize) -> Result<DecayFit, FvError> {
    let mut pts = Vec::new();
    for k in 0..geom.d {
        for sign in [1i64, -1] {
            for r in 1..=rmax as i64 {
                let mut c = source.to_vec();
                c[k] += sign * r;
                if let Some(i) = geom.index(&c) {
                    pts.push((r as f64, values[i]));
                }
            }
        }
    }
    Ok(decay_fit(&pts)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceFit {
    pub seed: u64,
    pub source: Vec<i64>,
    pub fit: DecayFit,
    /// Same fit applied to the free kernel on the same displacements.
    pub free_fit: Option<DecayFit>,
    /// Fit along the axis rays from the source out to distance ⌊L/2⌋
    /// (boundary layer included); `None` when fewer than four radii fit.
    pub axis: Option<DecayFit>,
    pub iterations: usize,
    pub rayleigh: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySurvey {
    pub fits: Vec<SourceFit>,
    pub threshold: f64,
    /// Min, 10%, median, 90%, max of the exponents.
    pub quantiles: [f64; 5],
    pub pass_fraction: f64,
    pub pass: bool,
}

fn quantiles(mut xs: Vec<f64>) -> [f64; 5] {
    xs.sort_by(f64::total_cmp);
    let q = |t: f64| xs[((xs.len() - 1) as f64 * t).round() as usize];
    [q(0.0), q(0.1), q(0.5), q(0.9), q(1.0)]
}

/// Solve and fit `n_sources` columns of one Hamiltonian.
pub fn survey_fits(
    h: &Hamiltonian,
    n_sources: usize,
    window: (f64, f64),
    free: Option<&GreenKernel>,
) -> Result<Vec<SourceFit>, FvError> {
    let geom = &h.geometry;
    let threshold = -(geom.d as f64 - 2.0 - DECAY_EPSILON);
    let sources = survey_sources(geom, n_sources);
    let idx: Vec<usize> = sources.iter().map(|c| geom.index(c).expect("source inside the box")).collect();
    let columns = h.green_columns(&idx, GREEN_TOL)?;
    sources
        .into_iter()
        .zip(columns)
        .map(|(source, col)| {
            let pts = window_points(geom, &source, &col.values, window);
            let fit = decay_fit(&pts.iter().map(|p| (p.1, p.2)).collect::<Vec<_>>())?;
            let free_fit = match free {
                Some(k) => {
                    let fp: Option<Vec<(f64, f64)>> = pts.iter().map(|p| k.value(&p.0).map(|g| (p.1, g))).collect();
                    let fp =
                        fp.ok_or_else(|| FvError::InvalidParameter("free kernel box smaller than the window".into()))?;
                    Some(decay_fit(&fp)?)
                }
                None => None,
            };
            let axis = axis_fit(geom, &source, &col.values, geom.side / 2).ok();
            Ok(SourceFit {
                seed: h.config.seed,
                axis,
                source,
                passes: fit.exponent <= threshold,
                fit,
                free_fit,
                iterations: col.iterations,
                rayleigh: col.rayleigh,
            })
        })
        .collect()
}

fn summarize(fits: Vec<SourceFit>, d: usize) -> DecaySurvey {
    let threshold = -(d as f64 - 2.0 - DECAY_EPSILON);
    let passed = fits.iter().filter(|f| f.passes).count();
    let pass_fraction = if fits.is_empty() { 0.0 } else { passed as f64 / fits.len() as f64 };
    let quantiles =
        if fits.is_empty() { [f64::NAN; 5] } else { quantiles(fits.iter().map(|f| f.fit.exponent).collect()) };
    DecaySurvey { threshold, quantiles, pass_fraction, pass: !fits.is_empty() && pass_fraction >= PASS_FRACTION, fits }
}

pub fn decay_survey(
    h: &Hamiltonian,
    n_sources: usize,
    window: (f64, f64),
    free: Option<&GreenKernel>,
) -> Result<DecaySurvey, FvError> {
    Ok(summarize(survey_fits(h, n_sources, window, free)?, h.geometry.d))
}

/// One survey over several seeds, sharing the ω-independent counterterms.
pub fn decay_experiment(
    config: &HamiltonianConfig,
    seeds: &[u64],
    n_sources: usize,
    window: (f64, f64),
) -> Result<DecaySurvey, FvError> {
    let free = config.free_data()?;
    let ct = config.counterterms(&free)?;
    let mut fits = Vec::new();
    for &seed in seeds {
        let cfg = HamiltonianConfig { seed, ..config.clone() };
        let h = assemble_with(&cfg, &ct)?;
        fits.extend(survey_fits(&h, n_sources, window, Some(&free.kernel))?);
    }
    Ok(summarize(fits, config.d))
}
