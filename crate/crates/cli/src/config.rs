//! Run configuration, read from a TOML file. Every key is optional.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;
use solartwin_core::pv::samples::{DEFAULT_AZIMUTH_WEIGHTS, DEFAULT_TILTS_MEDIUM, DEFAULT_TILTS_SMALL};
use solartwin_core::pv::{Azimuth, DecayParams, DegradationTable, OrientationTable, PvConfig};

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    pub paths: Paths,
    pub toygen: Toygen,
    pub preprocess: Preprocess,
    pub sqft: Sqft,
    pub calibrate: Calibrate,
    pub pv: Pv,
    pub validate: Validate,
    pub diffusion: Diffusion,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            workers: 4,
            paths: Paths::default(),
            toygen: Toygen::default(),
            preprocess: Preprocess::default(),
            sqft: Sqft::default(),
            calibrate: Calibrate::default(),
            pv: Pv::default(),
            validate: Validate::default(),
            diffusion: Diffusion::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        // relative paths in a config file are relative to the file
        if let Some(base) = path.parent() {
            cfg.paths.rebase(base);
        }
        Ok(cfg)
    }
}

/// Input and output locations. Unset inputs default to files under `data_dir`.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub data_dir: PathBuf,
    pub output_dir: PathBuf,
    pub population: Option<PathBuf>,
    pub survey: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub irradiance_dir: Option<PathBuf>,
    pub network: Option<PathBuf>,
    pub barriers: Option<PathBuf>,
    pub reference_dir: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            data_dir: "data".into(),
            output_dir: "out".into(),
            population: None,
            survey: None,
            targets: None,
            irradiance_dir: None,
            network: None,
            barriers: None,
            reference_dir: None,
        }
    }
}

impl Paths {
    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data_dir);
        fix(&mut self.output_dir);
        for p in [
            &mut self.population,
            &mut self.survey,
            &mut self.targets,
            &mut self.irradiance_dir,
            &mut self.network,
            &mut self.barriers,
            &mut self.reference_dir,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    fn data(&self, set: &Option<PathBuf>, name: &str) -> PathBuf {
        set.clone().unwrap_or_else(|| self.data_dir.join(name))
    }

    pub fn population(&self) -> PathBuf {
        self.data(&self.population, "households.csv")
    }

    pub fn truth(&self) -> PathBuf {
        self.data_dir.join("population_truth.csv")
    }

    pub fn survey(&self) -> PathBuf {
        self.data(&self.survey, "survey.csv")
    }

    pub fn targets(&self) -> PathBuf {
        self.data(&self.targets, "targets.csv")
    }

    pub fn irradiance_dir(&self) -> PathBuf {
        self.data(&self.irradiance_dir, "irradiance")
    }

    pub fn network(&self) -> PathBuf {
        self.data(&self.network, "network.edges")
    }

    pub fn barriers(&self) -> PathBuf {
        self.data(&self.barriers, "barriers.csv")
    }

    pub fn reference_dir(&self) -> PathBuf {
        self.data(&self.reference_dir, "reference")
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toygen {
    pub households: usize,
    pub survey_households: usize,
    pub tracts: usize,
    pub tracts_per_county: usize,
    pub adopter_fraction: f64,
    pub lmi_fraction: f64,
    pub rural_fraction: f64,
    pub signal_shift: f64,
    pub start_date: String,
    pub days: usize,
    pub state: String,
    pub edge_prob: f64,
    pub network_groups: usize,
}

impl Default for Toygen {
    fn default() -> Self {
        Toygen {
            households: 2000,
            survey_households: 2000,
            tracts: 10,
            tracts_per_county: 3,
            adopter_fraction: 0.1,
            lmi_fraction: 0.3,
            rural_fraction: 0.3,
            signal_shift: 2.0,
            start_date: "2020-01-01".into(),
            days: 366,
            state: "VA".into(),
            edge_prob: 0.2,
            network_groups: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Preprocess {
    /// Neighbours per synthetic row.
    pub k: usize,
    /// Duplicate minority rows instead of synthesizing new ones.
    pub random_oversample: bool,
}

impl Default for Preprocess {
    fn default() -> Self {
        Preprocess {
            k: 5,
            random_oversample: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sqft {
    /// Class bounds in ft²; the last one caps the open top class.
    pub bounds: Vec<f64>,
    pub rounds: usize,
    pub subclasses: usize,
    pub draws_m: usize,
    pub draws_l: usize,
    pub uniform_fallback: bool,
}

impl Default for Sqft {
    fn default() -> Self {
        Sqft {
            bounds: solartwin_core::sqft::SqftClasses::default().bounds,
            rounds: 40,
            subclasses: 10,
            draws_m: 100,
            draws_l: 10,
            uniform_fallback: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calibrate {
    pub budget: usize,
    pub init: usize,
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
}

impl Default for Calibrate {
    fn default() -> Self {
        Calibrate {
            budget: 2000,
            init: 10,
            rounds: 100,
            max_depth: 3,
            learning_rate: 0.3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pv {
    pub period: String,
    pub samples: usize,
    pub area_candidates: usize,
    // Optional table overrides; unset entries keep the built-in values.
    pub panel_area: Option<f64>,
    pub roof_factor: Option<f64>,
    pub small_threshold_m2: Option<f64>,
    pub yield_range: Option<[f64; 2]>,
    pub ratio_range: Option<[f64; 2]>,
    /// `[[planes, weight], ...]`
    pub plane_weights: Option<Vec<(u32, f64)>>,
    /// `[[tilt_deg, weight], ...]`
    pub tilts_small: Option<Vec<(f64, f64)>>,
    pub tilts_medium: Option<Vec<(f64, f64)>>,
    /// Weights for N, NE, E, SE, S, SW, W, NW.
    pub azimuth_weights: Option<[f64; 8]>,
    /// Degradation factors for N, NE, E, SE, S, SW, W, NW.
    pub degradation: Option<[f64; 8]>,
    /// `[rate, location]` of the area density.
    pub decay_small_single: Option<[f64; 2]>,
    pub decay_small_multi: Option<[f64; 2]>,
    pub decay_medium_single: Option<[f64; 2]>,
    pub decay_medium_multi: Option<[f64; 2]>,
}

impl Default for Pv {
    fn default() -> Self {
        Pv {
            period: "month:2020-06".into(),
            samples: 20,
            area_candidates: 50,
            panel_area: None,
            roof_factor: None,
            small_threshold_m2: None,
            yield_range: None,
            ratio_range: None,
            plane_weights: None,
            tilts_small: None,
            tilts_medium: None,
            azimuth_weights: None,
            degradation: None,
            decay_small_single: None,
            decay_small_multi: None,
            decay_medium_single: None,
            decay_medium_multi: None,
        }
    }
}

impl Pv {
    pub fn to_core(&self) -> PvConfig {
        let d = PvConfig::default();
        let decay =
            |o: Option<[f64; 2]>, dflt: DecayParams| o.map_or(dflt, |[rate, location]| DecayParams { rate, location });
        let azimuths: Vec<(Azimuth, f64)> = match self.azimuth_weights {
            Some(w) => Azimuth::ALL.into_iter().zip(w).collect(),
            None => DEFAULT_AZIMUTH_WEIGHTS.to_vec(),
        };
        let tilts = |o: &Option<Vec<(f64, f64)>>, dflt: &[(f64, f64)]| o.clone().unwrap_or_else(|| dflt.to_vec());
        PvConfig {
            samples: self.samples,
            area_candidates: self.area_candidates,
            panel_area: self.panel_area.unwrap_or(d.panel_area),
            roof_factor: self.roof_factor.unwrap_or(d.roof_factor),
            small_threshold_m2: self.small_threshold_m2.unwrap_or(d.small_threshold_m2),
            yield_range: self.yield_range.map_or(d.yield_range, |[a, b]| (a, b)),
            ratio_range: self.ratio_range.map_or(d.ratio_range, |[a, b]| (a, b)),
            plane_weights: self.plane_weights.clone().unwrap_or(d.plane_weights),
            decay_small_single: decay(self.decay_small_single, d.decay_small_single),
            decay_small_multi: decay(self.decay_small_multi, d.decay_small_multi),
            decay_medium_single: decay(self.decay_medium_single, d.decay_medium_single),
            decay_medium_multi: decay(self.decay_medium_multi, d.decay_medium_multi),
            orientation_small: OrientationTable::product(&tilts(&self.tilts_small, &DEFAULT_TILTS_SMALL), &azimuths),
            orientation_medium: OrientationTable::product(&tilts(&self.tilts_medium, &DEFAULT_TILTS_MEDIUM), &azimuths),
            degradation: self
                .degradation
                .map_or(d.degradation, |factors| DegradationTable { factors }),
            sqft_to_m2: d.sqft_to_m2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Validate {
    pub bins: usize,
    pub kde_grid: usize,
}

impl Default for Validate {
    fn default() -> Self {
        Validate {
            bins: 50,
            kde_grid: 512,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diffusion {
    pub cases: Vec<String>,
    pub time_steps: usize,
    pub iterations: usize,
    /// Personal benefit, community and neighbour weights.
    pub weights: [f64; 3],
    pub cost_per_watt: f64,
    pub credit_rate: f64,
    pub lmi_extra: f64,
    pub capacity_factor: f64,
}

impl Default for Diffusion {
    fn default() -> Self {
        Diffusion {
            cases: ["1a", "1b", "2a", "2b", "3", "4", "5"].map(String::from).to_vec(),
            time_steps: 10,
            iterations: 1,
            weights: [0.4, 0.3, 0.3],
            cost_per_watt: 3.04,
            credit_rate: 0.30,
            lmi_extra: 0.20,
            capacity_factor: 0.15,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: RunConfig = toml::from_str("seed = 7\n[pv]\nsamples = 5\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.pv.samples, 5);
        assert_eq!(cfg.pv.area_candidates, 50);
        assert_eq!(cfg.calibrate.budget, 2000);
    }

    #[test]
    fn pv_tables_override() {
        let cfg: RunConfig = toml::from_str(
            "[pv]\ndegradation = [1, 1, 1, 1, 1, 1, 1, 1]\nplane_weights = [[1, 1.0]]\ndecay_small_single = [0.1, 5]\n",
        )
        .unwrap();
        let pv = cfg.pv.to_core();
        assert_eq!(pv.degradation.factors, [1.0; 8]);
        assert_eq!(pv.plane_weights, vec![(1, 1.0)]);
        assert_eq!(pv.decay_small_single.location, 5.0);
        assert_eq!(pv.orientation_small, PvConfig::default().orientation_small);
        assert_eq!(RunConfig::default().pv.to_core(), PvConfig::default());
    }

    #[test]
    fn example_file_matches_defaults() {
        let cfg: RunConfig = toml::from_str(include_str!("../../../solartwin.example.toml")).unwrap();
        let d = RunConfig::default();
        assert_eq!(cfg.seed, d.seed);
        assert_eq!(cfg.sqft.bounds, d.sqft.bounds);
        assert_eq!(cfg.pv.to_core(), d.pv.to_core());
        assert_eq!(cfg.diffusion.cases, d.diffusion.cases);
        assert_eq!(cfg.toygen.days, d.toygen.days);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("[pv]\nsample = 5\n").is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let mut p = Paths::default();
        p.rebase(Path::new("/tmp/run"));
        assert_eq!(p.population(), PathBuf::from("/tmp/run/data/households.csv"));
        assert_eq!(p.out("x.csv"), PathBuf::from("/tmp/run/out/x.csv"));
    }
}
