//! Experiment configs: parsing, unit conversion and validation.
//!
//! A config is a JSON object
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "experiment": "hom-dip",
//!   "units": { "system": "natural" },
//!   "seed": 0,
//!   "params": { "delays": { "start": -10, "stop": 10, "count": 401 } }
//! }
//! ```
//!
//! Every parameter has a default, so `params` may be omitted. With
//! `"units": {"system": "si", "time_unit_s": T₀}` times are read in seconds, angular
//! frequencies in rad/s and lengths in metres; they are converted once, here, to natural
//! units with time unit T₀ and length unit c·T₀. Phases, probabilities and the propagator
//! regularization ε are dimensionless and pass through unchanged.

use std::f64::consts::TAU;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::biphoton::{FrequencyGrid, SourceSpec};
use crate::dispersion::DispersiveMedium;
use crate::error::{Error, Result};
use crate::interferometry::{ChshSettings, FransonSetup, PortPair, UnbalancedMZ};
use crate::lightcone::{QuadratureOptions, TwoAtomConfig};
use crate::scan::linspace;

/// Config layout understood by this version.
pub const SCHEMA_VERSION: u32 = 1;

/// Speed of light in m/s, used to turn metres into natural length units.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// The closed set of experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FransonFringes,
    Chsh,
    ClassicalBound,
    HomDip,
    HomDispersion,
    NonlocalDispersion,
    PropagatorMap,
    TwoAtomEntanglement,
    RwaArtifact,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::FransonFringes,
        Experiment::Chsh,
        Experiment::ClassicalBound,
        Experiment::HomDip,
        Experiment::HomDispersion,
        Experiment::NonlocalDispersion,
        Experiment::PropagatorMap,
        Experiment::TwoAtomEntanglement,
        Experiment::RwaArtifact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FransonFringes => "franson-fringes",
            Experiment::Chsh => "chsh",
            Experiment::ClassicalBound => "classical-bound",
            Experiment::HomDip => "hom-dip",
            Experiment::HomDispersion => "hom-dispersion",
            Experiment::NonlocalDispersion => "nonlocal-dispersion",
            Experiment::PropagatorMap => "propagator-map",
            Experiment::TwoAtomEntanglement => "two-atom-entanglement",
            Experiment::RwaArtifact => "rwa-artifact",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::FransonFringes => "Franson coincidence rate over a (phi1, phi2) grid",
            Experiment::Chsh => "CHSH value against fringe visibility as the imbalance grows",
            Experiment::ClassicalBound => "fringe visibility against the classical-field bound",
            Experiment::HomDip => "Hong-Ou-Mandel coincidence probability against delay",
            Experiment::HomDispersion => "HOM dip with and without a dispersive medium",
            Experiment::NonlocalDispersion => "correlation width under opposite and same-sign GVD",
            Experiment::PropagatorMap => "Feynman propagator on an (x, t) lattice",
            Experiment::TwoAtomEntanglement => "transfer amplitude and post-selection protocol",
            Experiment::RwaArtifact => "rotating-wave detection probability outside the cone",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Unit system of the numbers in `params`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase", deny_unknown_fields)]
pub enum Units {
    #[default]
    Natural,
    Si {
        /// Seconds per natural time unit.
        time_unit_s: f64,
    },
}

/// Multipliers from the config's units to natural units.
#[derive(Debug, Clone, Copy)]
struct Scale {
    time: f64,
    length: f64,
}

impl Scale {
    fn new(units: Units) -> Self {
        match units {
            Units::Natural => Scale {
                time: 1.0,
                length: 1.0,
            },
            Units::Si { time_unit_s } => Scale {
                time: 1.0 / time_unit_s,
                length: 1.0 / (SPEED_OF_LIGHT * time_unit_s),
            },
        }
    }

    fn time(&self, v: &mut f64) {
        *v *= self.time;
    }

    fn freq(&self, v: &mut f64) {
        *v /= self.time;
    }

    fn length(&self, v: &mut f64) {
        *v *= self.length;
    }

    fn source(&self, s: &mut SourceSpec) {
        match s {
            SourceSpec::Cascade {
                sum_frequency,
                tau1,
                tau2,
            } => {
                self.freq(sum_frequency);
                self.time(tau1);
                self.time(tau2);
            }
            SourceSpec::GaussianPdc {
                center1,
                center2,
                sigma_plus,
                sigma_minus,
            } => {
                for v in [center1, center2, sigma_plus, sigma_minus] {
                    self.freq(v);
                }
            }
            SourceSpec::TimeBin {
                pulse_width,
                separation,
                ..
            } => {
                self.time(pulse_width);
                self.time(separation);
            }
        }
    }

    /// k₀ [1/length], k′ [time/length], k″ [time²/length].
    fn medium(&self, m: &DispersiveMedium) -> Result<DispersiveMedium> {
        let (t, l) = (self.time, self.length);
        DispersiveMedium::new(
            m.k0() / l,
            m.group_slowness() * t / l,
            m.gvd() * t * t / l,
            m.length() * l,
        )
    }
}

/// Uniform frequency grid, centered per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    pub n_points: usize,
    /// Full width of each frequency axis.
    pub span: f64,
    pub centers: [f64; 2],
}

impl GridParams {
    pub fn new(n_points: usize, span: f64) -> Self {
        GridParams {
            n_points,
            span,
            centers: [0.0, 0.0],
        }
    }

    pub fn build(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::with_centers(self.n_points, self.centers, self.span)
    }

    /// Time step of the conjugate grid.
    pub fn time_step(&self) -> f64 {
        TAU / self.span
    }

    fn scale(&mut self, s: &Scale) {
        s.freq(&mut self.span);
        self.centers.iter_mut().for_each(|c| s.freq(c));
    }
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams::new(512, 16.0)
    }
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        linspace([self.start, self.stop], self.count)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::param(format!("{what} sweep bounds must be finite")));
        }
        Ok(())
    }

    fn scale(&mut self, f: impl Fn(&mut f64)) {
        f(&mut self.start);
        f(&mut self.stop);
    }
}

fn pdc(sigma_plus: f64, sigma_minus: f64) -> SourceSpec {
    SourceSpec::GaussianPdc {
        center1: 0.0,
        center2: 0.0,
        sigma_plus,
        sigma_minus,
    }
}

fn check_source(source: &SourceSpec, grid: &GridParams) -> Result<()> {
    source.check_grid(&grid.build()?)
}

/// Franson fringes: rate over a `phase_points` × `phase_points` grid of (φ₁, φ₂).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FransonParams {
    pub source: SourceSpec,
    pub grid: GridParams,
    /// Interferometer imbalance ΔT, equal on both sides.
    pub delay: f64,
    /// Coincidence window w on |t₁ − t₂|.
    pub window: f64,
    pub ports: PortPair,
    pub phase_points: usize,
    /// Optional gate on the mean arrival time, for time-bin sources.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrival_gate: Option<[f64; 2]>,
}

impl Default for FransonParams {
    fn default() -> Self {
        let grid = GridParams::new(1024, 6.0);
        let dt = grid.time_step();
        FransonParams {
            source: pdc(0.006, 1.0),
            grid,
            delay: 8.0 * dt,
            window: 3.0 * dt,
            ports: PortPair::HH,
            phase_points: 16,
            arrival_gate: None,
        }
    }
}

impl FransonParams {
    pub fn setup(&self) -> Result<FransonSetup> {
        let mut s = FransonSetup::new(
            UnbalancedMZ::new(self.delay, 0.0)?,
            UnbalancedMZ::new(self.delay, 0.0)?,
            self.window,
            self.ports,
        )?;
        s.arrival_gate = self.arrival_gate;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        check_source(&self.source, &self.grid)?;
        self.setup()?;
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        s.source(&mut self.source);
        self.grid.scale(s);
        s.time(&mut self.delay);
        s.time(&mut self.window);
        if let Some(g) = &mut self.arrival_gate {
            g.iter_mut().for_each(|t| s.time(t));
        }
    }
}

/// CHSH value and fringe visibility for each interferometer imbalance in `delays`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshParams {
    pub source: SourceSpec,
    pub grid: GridParams,
    pub window: f64,
    pub delays: Vec<f64>,
    pub settings: ChshSettings,
}

impl Default for ChshParams {
    fn default() -> Self {
        let grid = GridParams::new(1024, 12.0);
        let dt = grid.time_step();
        ChshParams {
            source: pdc(0.05, 1.0),
            grid,
            window: 5.0 * dt,
            delays: (8..=24).map(|k| (2 * k) as f64 * dt).collect(),
            settings: ChshSettings::default(),
        }
    }
}

impl ChshParams {
    fn validate(&self) -> Result<()> {
        check_source(&self.source, &self.grid)?;
        for &d in &self.delays {
            FransonSetup::symmetric(d, self.window, 0.0, 0.0)?;
        }
        let s = &self.settings;
        if ![s.a, s.a_prime, s.b, s.b_prime]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::param("CHSH analyzer phases must be finite"));
        }
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        s.source(&mut self.source);
        self.grid.scale(s);
        s.time(&mut self.window);
        self.delays.iter_mut().for_each(|d| s.time(d));
    }
}

/// Fringe visibility against the classical bound for each imbalance in `delays`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalParams {
    pub source: SourceSpec,
    pub grid: GridParams,
    pub window: f64,
    pub delays: Vec<f64>,
}

impl Default for ClassicalParams {
    fn default() -> Self {
        let grid = GridParams::new(2048, 10.0);
        let dt = grid.time_step();
        ClassicalParams {
            source: SourceSpec::Cascade {
                sum_frequency: 0.0,
                tau1: 100.0,
                tau2: 1.0,
            },
            grid,
            window: 4.0 * dt,
            delays: [12.0, 16.0, 20.0, 24.0].iter().map(|k| k * dt).collect(),
        }
    }
}

impl ClassicalParams {
    fn validate(&self) -> Result<()> {
        check_source(&self.source, &self.grid)?;
        for &d in &self.delays {
            FransonSetup::symmetric(d, self.window, 0.0, 0.0)?;
        }
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        s.source(&mut self.source);
        self.grid.scale(s);
        s.time(&mut self.window);
        self.delays.iter_mut().for_each(|d| s.time(d));
    }
}

/// HOM coincidence probability over a delay sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomDipParams {
    pub source: SourceSpec,
    pub grid: GridParams,
    pub delays: Sweep,
}

impl Default for HomDipParams {
    fn default() -> Self {
        HomDipParams {
            source: pdc(0.1, 1.0),
            grid: GridParams::new(512, 16.0),
            delays: Sweep {
                start: -10.0,
                stop: 10.0,
                count: 401,
            },
        }
    }
}

impl HomDipParams {
    fn validate(&self) -> Result<()> {
        check_source(&self.source, &self.grid)?;
        self.delays.validate("delay")
    }

    fn scale(&mut self, s: &Scale) {
        s.source(&mut self.source);
        self.grid.scale(s);
        self.delays.scale(|v| s.time(v));
    }
}

/// HOM dip with and without `medium` in arm 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomDispersionParams {
    pub source: SourceSpec,
    pub grid: GridParams,
    pub medium: DispersiveMedium,
    pub delays: Sweep,
}

impl Default for HomDispersionParams {
    fn default() -> Self {
        HomDispersionParams {
            source: pdc(0.02, 1.0),
            grid: GridParams::new(1024, 12.0),
            medium: DispersiveMedium::quadratic(4.0, 1.0).expect("valid medium"),
            delays: Sweep {
                start: -20.0,
                stop: 20.0,
                count: 801,
            },
        }
    }
}

impl HomDispersionParams {
    fn validate(&self) -> Result<()> {
        check_source(&self.source, &self.grid)?;
        self.delays.validate("delay")
    }

    fn scale(&mut self, s: &Scale) -> Result<()> {
        s.source(&mut self.source);
        self.grid.scale(s);
        self.medium = s.medium(&self.medium)?;
        self.delays.scale(|v| s.time(v));
        Ok(())
    }
}

/// Correlation width with GVD k″ on photon 1 and ∓k″ on photon 2, per k″ in `gvd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlocalDispersionParams {
    pub source: SourceSpec,
    pub grid: GridParams,
    /// Medium length z shared by both photons.
    pub length: f64,
    /// GVD values k″ to scan.
    pub gvd: Vec<f64>,
}

impl Default for NonlocalDispersionParams {
    fn default() -> Self {
        NonlocalDispersionParams {
            source: pdc(0.02, 1.0),
            grid: GridParams::new(1024, 12.0),
            length: 1.0,
            gvd: vec![0.5, 1.0, 2.0, 4.0],
        }
    }
}

impl NonlocalDispersionParams {
    fn validate(&self) -> Result<()> {
        check_source(&self.source, &self.grid)?;
        for &k in &self.gvd {
            DispersiveMedium::quadratic(k, self.length)?;
        }
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        s.source(&mut self.source);
        self.grid.scale(s);
        s.length(&mut self.length);
        let k2 = s.time * s.time / s.length;
        self.gvd.iter_mut().for_each(|k| *k *= k2);
    }
}

/// `D_F` on an (x, t) lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorMapParams {
    pub x_range: [f64; 2],
    pub t_range: [f64; 2],
    /// Points along x and t.
    pub resolution: [usize; 2],
    pub epsilon: f64,
}

impl Default for PropagatorMapParams {
    fn default() -> Self {
        PropagatorMapParams {
            x_range: [-4.0, 4.0],
            t_range: [-3.0, 3.0],
            resolution: [161, 121],
            epsilon: 1e-4,
        }
    }
}

impl PropagatorMapParams {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param(format!(
                "epsilon {} must be > 0",
                self.epsilon
            )));
        }
        if self.resolution.contains(&0) {
            return Err(Error::param(
                "propagator map needs at least one point per axis",
            ));
        }
        if !self
            .x_range
            .iter()
            .chain(&self.t_range)
            .all(|v| v.is_finite())
        {
            return Err(Error::param("propagator map ranges must be finite"));
        }
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        self.x_range.iter_mut().for_each(|v| s.length(v));
        self.t_range.iter_mut().for_each(|v| s.time(v));
    }
}

/// Transfer amplitude for `atoms`, followed by the post-selection protocol for it and for
/// `samples` seeded random (b, p_γ) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoAtomParams {
    pub atoms: TwoAtomConfig,
    /// Probability that a photon escaped, p_γ = |γ|².
    pub p_gamma: f64,
    pub quadrature: QuadratureOptions,
    pub samples: usize,
}

impl Default for TwoAtomParams {
    fn default() -> Self {
        TwoAtomParams {
            atoms: TwoAtomConfig {
                separation: 200.0,
                omega: TAU,
                dipole: 1.0,
                duration: 1.0,
            },
            p_gamma: 1e-3,
            quadrature: QuadratureOptions::default(),
            samples: 16,
        }
    }
}

impl TwoAtomParams {
    fn validate(&self) -> Result<()> {
        self.atoms.validate()?;
        self.quadrature.validate()?;
        if !(0.0..1.0).contains(&self.p_gamma) {
            return Err(Error::param(format!(
                "p_gamma {} must lie in [0, 1)",
                self.p_gamma
            )));
        }
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        let a = &mut self.atoms;
        s.length(&mut a.separation);
        s.freq(&mut a.omega);
        s.length(&mut a.dipole);
        s.time(&mut a.duration);
    }
}

/// `|D_F(r, t)|²` at fixed t for log-spaced distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RwaParams {
    /// Detection time t.
    pub time: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    pub epsilon: f64,
}

impl Default for RwaParams {
    fn default() -> Self {
        RwaParams {
            time: 1.0,
            r_min: 0.1,
            r_max: 100.0,
            count: 61,
            epsilon: 1e-9,
        }
    }
}

impl RwaParams {
    /// Log-spaced distances from `r_min` to `r_max`.
    pub fn distances(&self) -> Vec<f64> {
        let (lo, hi) = (self.r_min.ln(), self.r_max.ln());
        linspace([lo, hi], self.count)
            .into_iter()
            .map(f64::exp)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.time > 0.0 && self.time.is_finite()) {
            return Err(Error::param(format!(
                "detection time {} must be > 0",
                self.time
            )));
        }
        if !(self.r_min > 0.0 && self.r_max >= self.r_min && self.r_max.is_finite()) {
            return Err(Error::param("distances need 0 < r_min <= r_max"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param(format!(
                "epsilon {} must be > 0",
                self.epsilon
            )));
        }
        Ok(())
    }

    fn scale(&mut self, s: &Scale) {
        s.time(&mut self.time);
        s.length(&mut self.r_min);
        s.length(&mut self.r_max);
    }
}

/// Parameters of one experiment, in natural units.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentParams {
    FransonFringes(FransonParams),
    Chsh(ChshParams),
    ClassicalBound(ClassicalParams),
    HomDip(HomDipParams),
    HomDispersion(HomDispersionParams),
    NonlocalDispersion(NonlocalDispersionParams),
    PropagatorMap(PropagatorMapParams),
    TwoAtomEntanglement(TwoAtomParams),
    RwaArtifact(RwaParams),
}

fn params_from<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| Error::Config {
        path: format!("params.{}", e.path()),
        message: e.into_inner().to_string(),
    })
}

impl ExperimentParams {
    /// Defaults of `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        Self::from_value(experiment, Value::Object(Default::default()))
            .expect("every experiment has complete defaults")
    }

    fn from_value(experiment: Experiment, v: Value) -> Result<Self> {
        use ExperimentParams as P;
        Ok(match experiment {
            Experiment::FransonFringes => P::FransonFringes(params_from(v)?),
            Experiment::Chsh => P::Chsh(params_from(v)?),
            Experiment::ClassicalBound => P::ClassicalBound(params_from(v)?),
            Experiment::HomDip => P::HomDip(params_from(v)?),
            Experiment::HomDispersion => P::HomDispersion(params_from(v)?),
            Experiment::NonlocalDispersion => P::NonlocalDispersion(params_from(v)?),
            Experiment::PropagatorMap => P::PropagatorMap(params_from(v)?),
            Experiment::TwoAtomEntanglement => P::TwoAtomEntanglement(params_from(v)?),
            Experiment::RwaArtifact => P::RwaArtifact(params_from(v)?),
        })
    }

    pub fn experiment(&self) -> Experiment {
        match self {
            ExperimentParams::FransonFringes(_) => Experiment::FransonFringes,
            ExperimentParams::Chsh(_) => Experiment::Chsh,
            ExperimentParams::ClassicalBound(_) => Experiment::ClassicalBound,
            ExperimentParams::HomDip(_) => Experiment::HomDip,
            ExperimentParams::HomDispersion(_) => Experiment::HomDispersion,
            ExperimentParams::NonlocalDispersion(_) => Experiment::NonlocalDispersion,
            ExperimentParams::PropagatorMap(_) => Experiment::PropagatorMap,
            ExperimentParams::TwoAtomEntanglement(_) => Experiment::TwoAtomEntanglement,
            ExperimentParams::RwaArtifact(_) => Experiment::RwaArtifact,
        }
    }

    /// Checks every parameter, including that grids resolve their sources, without
    /// running anything expensive.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentParams::FransonFringes(p) => p.validate(),
            ExperimentParams::Chsh(p) => p.validate(),
            ExperimentParams::ClassicalBound(p) => p.validate(),
            ExperimentParams::HomDip(p) => p.validate(),
            ExperimentParams::HomDispersion(p) => p.validate(),
            ExperimentParams::NonlocalDispersion(p) => p.validate(),
            ExperimentParams::PropagatorMap(p) => p.validate(),
            ExperimentParams::TwoAtomEntanglement(p) => p.validate(),
            ExperimentParams::RwaArtifact(p) => p.validate(),
        }
    }

    fn scale(&mut self, s: &Scale) -> Result<()> {
        match self {
            ExperimentParams::FransonFringes(p) => p.scale(s),
            ExperimentParams::Chsh(p) => p.scale(s),
            ExperimentParams::ClassicalBound(p) => p.scale(s),
            ExperimentParams::HomDip(p) => p.scale(s),
            ExperimentParams::HomDispersion(p) => p.scale(s)?,
            ExperimentParams::NonlocalDispersion(p) => p.scale(s),
            ExperimentParams::PropagatorMap(p) => p.scale(s),
            ExperimentParams::TwoAtomEntanglement(p) => p.scale(s),
            ExperimentParams::RwaArtifact(p) => p.scale(s),
        }
        Ok(())
    }
}

/// A parsed, validated config with every quantity in natural units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ExperimentParams,
    pub seed: u64,
    /// Output directory requested by the config; the CLI flag takes precedence.
    pub output_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    experiment: String,
    #[serde(default)]
    units: Units,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    params: Option<Value>,
}

/// Serialized form of a resolved config; parses back to the same config.
#[derive(Serialize)]
struct ResolvedConfig<'a> {
    schema_version: u32,
    experiment: Experiment,
    units: Units,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: &'a Option<PathBuf>,
    params: &'a ExperimentParams,
}

impl ExperimentConfig {
    /// Default parameters of `experiment` with seed 0.
    pub fn defaults(experiment: Experiment) -> Self {
        ExperimentConfig {
            params: ExperimentParams::defaults(experiment),
            seed: 0,
            output_dir: None,
        }
    }

    pub fn experiment(&self) -> Experiment {
        self.params.experiment()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()
    }

    /// The resolved config as JSON, in natural units.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(ResolvedConfig {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment(),
            units: Units::Natural,
            seed: self.seed,
            output_dir: &self.output_dir,
            params: &self.params,
        })
        .expect("configs serialize to JSON")
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        parse_config(text)
    }
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Parses and validates a config, converting its parameters to natural units.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| config_error(&e.path().to_string(), e.into_inner().to_string()))?;
    de.end().map_err(|e| config_error(".", e.to_string()))?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(config_error(
            "schema_version",
            format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            ),
        ));
    }
    let experiment: Experiment = raw.experiment.parse()?;
    if let Units::Si { time_unit_s } = raw.units {
        if !(time_unit_s > 0.0 && time_unit_s.is_finite()) {
            return Err(config_error(
                "units.time_unit_s",
                format!("time unit {time_unit_s} s must be > 0"),
            ));
        }
    }
    let value = match raw.params {
        None | Some(Value::Null) => Value::Object(Default::default()),
        Some(v) => v,
    };
    let mut params = ExperimentParams::from_value(experiment, value)?;
    params.scale(&Scale::new(raw.units))?;
    let config = ExperimentConfig {
        params,
        seed: raw.seed,
        output_dir: raw.output_dir,
    };
    config.validate()?;
    Ok(config)
}
