//! `manifest.json`: what was run, under which conventions, and checksums of
//! everything written.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub hopping_sign: String,
    pub generator_scale: String,
    pub hamiltonian: String,
    pub thermal_exponent: String,
    pub pure_state_beta: f64,
    pub readout: String,
    pub wigner_kernel: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub qfi_pair_cutoff: f64,
    pub cfi_bin_cutoff: f64,
    pub fisher_chain_relative: f64,
    pub ratio_slack: f64,
    pub finite_difference_delta: f64,
    pub classical_energy_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub t_pi: f64,
    pub coupling: f64,
    /// Absent when the coupling admits no separatrix at zero phase.
    pub z_c0: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub tolerances: Tolerances,
    pub derived: Derived,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// File name to lowercase hex SHA-256.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises") + "\n"
    }
}
