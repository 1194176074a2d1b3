//! Config-driven experiment runner: JSON config in, CSV table plus JSON sidecar and a
//! hashed manifest out.

mod config;
mod output;
mod run;

pub use config::{
    parse_config, ChshParams, ClassicalParams, Experiment, ExperimentConfig, ExperimentParams,
    FransonParams, GridParams, HomDipParams, HomDispersionParams, NonlocalDispersionParams,
    PropagatorMapParams, RwaParams, Sweep, TwoAtomParams, Units, SCHEMA_VERSION, SPEED_OF_LIGHT,
};
pub use output::{verify_manifest, write_outputs, Manifest, ManifestEntry, MANIFEST_FILE};
pub use run::{run_experiment, RunOutput};

use std::path::Path;

use crate::error::{Error, Result};

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
