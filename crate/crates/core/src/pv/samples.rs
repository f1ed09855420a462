//! Time-invariant sample generation per household.
//!
//! For each adopter the roof area is derived from the house area, then `n`
//! samples of suitable panel area, module yield, performance ratio, plane
//! count, tilt and azimuth are drawn. Areas come from uniform candidates on
//! `[0, roof_area]` weighted by a shifted exponential density whose rate and
//! location depend on building type and plane count, snapped down to whole
//! panels.

use std::fmt;

use rand::Rng;

use crate::data::HouseholdRecord;
use crate::error::{Error, Result};
use crate::pv::geometry::{Azimuth, DegradationTable};
use crate::rng::{stream, Purpose};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildingType {
    Small,
    Medium,
}

impl fmt::Display for BuildingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuildingType::Small => "small",
            BuildingType::Medium => "medium",
        })
    }
}

/// Rate `r` (1/m²) and location `t` (m²) of the area-suitability density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    pub rate: f64,
    pub location: f64,
}

/// Weighted `(tilt, azimuth)` table for one building type.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationTable {
    pub entries: Vec<(f64, Azimuth, f64)>,
}

impl OrientationTable {
    /// Product table `tilt weight * azimuth weight`.
    pub fn product(tilts: &[(f64, f64)], azimuths: &[(Azimuth, f64)]) -> Self {
        let entries = tilts
            .iter()
            .flat_map(|&(t, wt)| azimuths.iter().map(move |&(a, wa)| (t, a, wt * wa)))
            .collect();
        OrientationTable { entries }
    }
}

pub const DEFAULT_AZIMUTH_WEIGHTS: [(Azimuth, f64); 8] = [
    (Azimuth::N, 0.05),
    (Azimuth::NE, 0.06),
    (Azimuth::E, 0.14),
    (Azimuth::SE, 0.15),
    (Azimuth::S, 0.25),
    (Azimuth::SW, 0.15),
    (Azimuth::W, 0.14),
    (Azimuth::NW, 0.06),
];

/// `(tilt in degrees, weight)` for small buildings.
pub const DEFAULT_TILTS_SMALL: [(f64, f64); 3] = [(15.0, 0.2), (25.0, 0.4), (35.0, 0.4)];
pub const DEFAULT_TILTS_MEDIUM: [(f64, f64); 3] = [(15.0, 0.5), (25.0, 0.3), (35.0, 0.2)];

/// Tables and constants for sample generation.
#[derive(Debug, Clone, PartialEq)]
pub struct PvConfig {
    /// Samples per household.
    pub samples: usize,
    /// Uniform area candidates drawn per sample before weighting.
    pub area_candidates: usize,
    /// Area of one panel, m².
    pub panel_area: f64,
    /// Roof area as a multiple of the house area.
    pub roof_factor: f64,
    pub sqft_to_m2: f64,
    /// Roof area (m²) at or below which a building is `small`.
    pub small_threshold_m2: f64,
    pub yield_range: (f64, f64),
    pub ratio_range: (f64, f64),
    /// `(plane count, weight)`.
    pub plane_weights: Vec<(u32, f64)>,
    pub decay_small_single: DecayParams,
    pub decay_small_multi: DecayParams,
    pub decay_medium_single: DecayParams,
    pub decay_medium_multi: DecayParams,
    pub orientation_small: OrientationTable,
    pub orientation_medium: OrientationTable,
    pub degradation: DegradationTable<f64>,
}

impl Default for PvConfig {
    fn default() -> Self {
        PvConfig {
            samples: 20,
            area_candidates: 50,
            panel_area: 1.64,
            roof_factor: 1.5,
            sqft_to_m2: 0.092903,
            small_threshold_m2: 464.6,
            yield_range: (0.18, 0.22),
            ratio_range: (0.5, 0.9),
            plane_weights: vec![(1, 0.5), (2, 0.3), (3, 0.15), (4, 0.05)],
            decay_small_single: DecayParams {
                rate: 0.042,
                location: 10.0,
            },
            decay_small_multi: DecayParams {
                rate: 0.071,
                location: 10.0,
            },
            decay_medium_single: DecayParams {
                rate: 0.002,
                location: 300.0,
            },
            decay_medium_multi: DecayParams {
                rate: 0.046,
                location: 10.0,
            },
            orientation_small: OrientationTable::product(&DEFAULT_TILTS_SMALL, &DEFAULT_AZIMUTH_WEIGHTS),
            orientation_medium: OrientationTable::product(&DEFAULT_TILTS_MEDIUM, &DEFAULT_AZIMUTH_WEIGHTS),
            degradation: DegradationTable::default(),
        }
    }
}

impl PvConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.samples == 0 || self.area_candidates == 0 {
            return bad("samples and area_candidates must be >= 1");
        }
        if !(self.panel_area > 0.0) {
            return bad("panel_area must be > 0");
        }
        if self.plane_weights.is_empty() || self.plane_weights.iter().any(|&(p, w)| p == 0 || !(w >= 0.0)) {
            return bad("plane weights need positive plane counts and non-negative weights");
        }
        for t in [&self.orientation_small, &self.orientation_medium] {
            if t.entries.is_empty()
                || t.entries
                    .iter()
                    .any(|&(tilt, _, w)| !(0.0..90.0).contains(&tilt) || !(w >= 0.0))
            {
                return bad("orientation tilts must lie in [0, 90) with non-negative weights");
            }
        }
        Ok(())
    }

    pub fn decay(&self, ty: BuildingType, planes: u32) -> DecayParams {
        match (ty, planes == 1) {
            (BuildingType::Small, true) => self.decay_small_single,
            (BuildingType::Small, false) => self.decay_small_multi,
            (BuildingType::Medium, true) => self.decay_medium_single,
            (BuildingType::Medium, false) => self.decay_medium_multi,
        }
    }

    /// Roof area in m² for a house of `sqft` ft².
    pub fn roof_area_m2(&self, sqft: f64) -> f64 {
        self.roof_factor * sqft * self.sqft_to_m2
    }

    pub fn building_type(&self, roof_area_m2: f64) -> BuildingType {
        if roof_area_m2 <= self.small_threshold_m2 {
            BuildingType::Small
        } else {
            BuildingType::Medium
        }
    }
}

/// Shifted exponential density `r * exp(-r (v - t))` for `v >= t`, else 0.
pub fn exp_density<T: Scalar>(v: T, p: DecayParams) -> T {
    let r: T = lit(p.rate);
    let t: T = lit(p.location);
    if v < t {
        T::zero()
    } else {
        r * (-(r * (v - t))).exp()
    }
}

/// Snaps an available area down to a whole number of panels.
pub fn snap_to_panels<T: Scalar>(area: T, panel_area: T) -> T {
    (area / panel_area).floor() * panel_area
}

fn weighted_choice<R: Rng + ?Sized>(weights: impl Iterator<Item = f64> + Clone, rng: &mut R) -> Option<usize> {
    let total: f64 = weights.clone().sum();
    if !(total > 0.0) {
        return None;
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = Some(i);
        }
        acc += w;
        if u < acc {
            return Some(i);
        }
    }
    last
}

/// Per-household sample ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeInvariantSamples<T> {
    pub household: u64,
    pub roof_area: T,
    pub building_type: BuildingType,
    pub areas: Vec<T>,
    pub yields: Vec<T>,
    pub ratios: Vec<T>,
    pub planes: Vec<u32>,
    pub tilts: Vec<T>,
    pub azimuths: Vec<Azimuth>,
    /// `areas[i] * yields[i] * ratios[i]`.
    pub arpr: Vec<T>,
}

impl<T: Scalar> TimeInvariantSamples<T> {
    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }
}

/// Draws the sample ensemble for one household from its own RNG stream.
pub fn sample_time_invariant<T: Scalar>(
    h: &HouseholdRecord,
    cfg: &PvConfig,
    seed: u64,
) -> Result<TimeInvariantSamples<T>> {
    let sqft = h.sqft_value.ok_or(Error::MissingField {
        what: "sqft_value",
        id: h.id,
    })?;
    let mut rng = stream(seed, Purpose::TimeInvariant, h.id);
    sample_from_area(h.id, cfg.roof_area_m2(sqft), cfg, &mut rng)
}

/// Sample ensemble for a known roof area (m²).
pub fn sample_from_area<T: Scalar, R: Rng + ?Sized>(
    household: u64,
    roof_area_m2: f64,
    cfg: &PvConfig,
    rng: &mut R,
) -> Result<TimeInvariantSamples<T>> {
    cfg.validate()?;
    let n = cfg.samples;
    let ty = cfg.building_type(roof_area_m2);
    let uniform = |rng: &mut R, (lo, hi): (f64, f64)| lo + (hi - lo) * rng.random::<f64>();

    let yields: Vec<T> = (0..n).map(|_| lit(uniform(rng, cfg.yield_range))).collect();
    let ratios: Vec<T> = (0..n).map(|_| lit(uniform(rng, cfg.ratio_range))).collect();
    let planes: Vec<u32> = (0..n)
        .map(|_| {
            let i = weighted_choice(cfg.plane_weights.iter().map(|p| p.1), rng).unwrap_or(0);
            cfg.plane_weights[i].0
        })
        .collect();

    let roof: T = lit(roof_area_m2);
    let panel: T = lit(cfg.panel_area);
    let mut candidates: Vec<T> = Vec::with_capacity(cfg.area_candidates);
    let areas: Vec<T> = planes
        .iter()
        .map(|&p| {
            let decay = cfg.decay(ty, p);
            candidates.clear();
            candidates.extend((0..cfg.area_candidates).map(|_| roof * lit(rng.random::<f64>())));
            let weights = candidates
                .iter()
                .map(|&v| exp_density(v, decay).to_f64().unwrap_or(0.0));
            // A roof smaller than the density location has no weighted candidate.
            let pick = weighted_choice(weights, rng).unwrap_or_else(|| rng.random_range(0..candidates.len()));
            snap_to_panels(candidates[pick], panel).min(roof)
        })
        .collect();

    let table = match ty {
        BuildingType::Small => &cfg.orientation_small,
        BuildingType::Medium => &cfg.orientation_medium,
    };
    let (tilts, azimuths): (Vec<T>, Vec<Azimuth>) = (0..n)
        .map(|_| {
            let i = weighted_choice(table.entries.iter().map(|e| e.2), rng).unwrap_or(0);
            let (tilt, az, _) = table.entries[i];
            (lit::<T>(tilt), az)
        })
        .unzip();

    let arpr = (0..n).map(|i| areas[i] * yields[i] * ratios[i]).collect();
    Ok(TimeInvariantSamples {
        household,
        roof_area: roof,
        building_type: ty,
        areas,
        yields,
        ratios,
        planes,
        tilts,
        azimuths,
        arpr,
    })
}
