use crate::gauss::GaussianPure;
use crate::resource::SqueezedBellResource;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Vbk,
    Ar,
}

/// How a fidelity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    GaussianMoments,
    Quadrature,
    FockOracle,
}

/// One teleportation run for one input state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub scheme: Scheme,
    pub method: Method,
    pub input: GaussianPure,
    pub fidelity: f64,
    /// Always 1 for the deterministic scheme.
    pub success_prob: f64,
    pub entropy_ebits: f64,
    pub energy_units: f64,
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resource: Option<SqueezedBellResource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branches: Option<usize>,
}
