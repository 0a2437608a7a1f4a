//! JSON reports shared by the pipelines and the command-line tool.
//!
//! The layout is described by `schemas/report.schema.json` at the repository
//! root.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::imggraph::{GraphParams, WeightedGraph};
use crate::metrics::QualityReport;
use crate::sgwt::{average_quadratic_forms, per_scale_quadratic_forms, WaveletCoefficients};
use crate::sparse::CsrMatrix;
use crate::spectral::quadratic_form;

pub const SNR_DEFINITION: &str = "power-ratio";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformMode {
    Exact,
    Chebyshev { order: usize },
}

impl Default for TransformMode {
    fn default() -> Self {
        TransformMode::Chebyshev {
            order: crate::sgwt::DEFAULT_CHEBYSHEV_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub lambda_max: f64,
}

impl GraphSummary {
    pub fn new(graph: &WeightedGraph, lambda_max: f64) -> Self {
        Self {
            vertices: graph.n_vertices(),
            edges: graph.edges().len(),
            components: graph.component_count(),
            lambda_max,
        }
    }
}

/// Laplacian quadratic forms of a color signal and of its SGWT planes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForms {
    /// `q` of each color channel of the analyzed signal.
    pub signal: [f64; 3],
    /// Channel-averaged `q` of the signal.
    pub q: f64,
    /// `q_tau` per channel, scaling plane first.
    pub per_channel: Vec<Vec<f64>>,
    /// `q_tau` averaged over channels.
    pub per_scale: Vec<f64>,
}

impl QuadraticForms {
    pub fn compute(channels: &[Vec<f64>; 3], coeffs: &[WaveletCoefficients], laplacian: &CsrMatrix) -> Result<Self> {
        let mut signal = [0.0; 3];
        for (s, c) in signal.iter_mut().zip(channels) {
            *s = quadratic_form(c, laplacian)?;
        }
        let per_channel = coeffs
            .iter()
            .map(|c| per_scale_quadratic_forms(c, laplacian))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            q: signal.iter().sum::<f64>() / 3.0,
            signal,
            per_scale: average_quadratic_forms(&per_channel),
            per_channel,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    pub graph: GraphParams,
    pub scales: usize,
    pub transform: TransformMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub smooth_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold_multiplier: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl ReportParameters {
    pub fn new(graph: GraphParams, scales: usize, transform: TransformMode) -> Self {
        Self {
            graph,
            scales,
            transform,
            smooth_sigma: None,
            threshold_multiplier: None,
            iterations: None,
            noise_std: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestorationReport {
    pub command: String,
    pub width: usize,
    pub height: usize,
    pub parameters: ReportParameters,
    pub graph: GraphSummary,
    pub scales: Vec<f64>,
    pub quadratic_forms: QuadraticForms,
    /// Estimated noise level per channel.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise_estimate: Option<[f64; 3]>,
    /// Hard threshold applied per channel (first iteration for inpainting).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thresholds: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cg_iterations: Option<usize>,
    /// Quality of the input against the reference.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_metrics: Option<QualityReport>,
    /// Quality of the output against the reference.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<QualityReport>,
    pub snr_definition: String,
}

impl RestorationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}
