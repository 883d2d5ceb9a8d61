use serde::{Deserialize, Serialize};

use crate::basis::SpectralField;
use crate::error::{domain, Error, Result};
use crate::kernel::EigenvalueTable;
use crate::scalar::Real;
use crate::spaces::{spectral_norm, NormSpec};

use super::evolve;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub time: f64,
    pub norm: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySlope {
    pub norm: String,
    /// `-d log ‖g(t)‖ / dt` by least squares; `None` with fewer than two
    /// positive samples.
    pub rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub label: String,
    pub times: Vec<f64>,
    pub samples: Vec<NormSample>,
    pub decay_slopes: Vec<DecaySlope>,
}

impl EvolutionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `time,norm,value`, one row per sample.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["time", "norm", "value"]).map_err(csv_err)?;
        for s in &self.samples {
            w.write_record([format!("{:e}", s.time), s.norm.clone(), format!("{:e}", s.value)])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn fitted_rate(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0 && p.1.is_finite()).map(|p| (p.0, p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Evaluates every norm of `g(t)` at every time.
pub fn evolution_report<T: Real>(
    g0: &SpectralField<T>,
    times: &[T],
    norms: &[NormSpec<T>],
    table: &EigenvalueTable<T>,
) -> Result<EvolutionReport> {
    if times.is_empty() || norms.is_empty() {
        return domain("a report needs at least one time and one norm");
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("report times must be strictly increasing");
    }
    let mut samples = Vec::with_capacity(times.len() * norms.len());
    for &t in times {
        let g = evolve(g0, t, table)?;
        for spec in norms {
            let value = spectral_norm(&g, spec, Some(table))?;
            samples.push(NormSample {
                time: t.to_f64_lossy(),
                norm: spec.to_string(),
                value: value.to_f64_lossy(),
            });
        }
    }
    let decay_slopes = norms
        .iter()
        .map(|spec| {
            let name = spec.to_string();
            let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.norm == name).map(|s| (s.time, s.value)).collect();
            DecaySlope {
                rate: fitted_rate(&pts),
                norm: name,
            }
        })
        .collect();
    Ok(EvolutionReport {
        label: g0.label().to_string(),
        times: times.iter().map(|t| t.to_f64_lossy()).collect(),
        samples,
        decay_slopes,
    })
}
