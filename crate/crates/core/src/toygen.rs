//! Deterministic synthetic inputs: population, irradiance, network, barriers.
//!
//! Adopters are planted with shifted categorical marginals (higher income,
//! newer and larger homes, more owners) so both classifiers have signal.

use chrono::NaiveDate;
use rand::seq::index::sample;
use rand::Rng;

use crate::data::{Feature, FeatureDomains, Graph, HouseholdRecord, HouseholdTable, IrradianceSeries, N_FEATURES};
use crate::diffusion::BarrierFlags;
use crate::error::{Error, Result};
use crate::pv::geometry::declination;
use crate::rng::{stream, Purpose};
use crate::sqft::SqftClasses;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub n_households: usize,
    pub n_tracts: usize,
    pub adopter_fraction: f64,
    pub lmi_fraction: f64,
    pub rural_fraction: f64,
    pub seed: u64,
    pub days: usize,
    pub start_date: NaiveDate,
    pub latitude_band: (f64, f64),
    pub state: String,
    pub state_fips: String,
    /// Strength of the adopter marginal shift; 0 plants no signal.
    pub signal_shift: f64,
    /// Tracts per county.
    pub tracts_per_county: usize,
    pub domains: FeatureDomains,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            n_households: 2000,
            n_tracts: 10,
            adopter_fraction: 0.1,
            lmi_fraction: 0.3,
            rural_fraction: 0.3,
            seed: 42,
            days: 365,
            start_date: NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date"),
            latitude_band: (36.5, 39.5),
            state: "VA".into(),
            state_fips: "51".into(),
            signal_shift: 2.0,
            tracts_per_county: 3,
            domains: FeatureDomains::default(),
        }
    }
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_households == 0 {
            return bad("n_households must be > 0".into());
        }
        if self.n_tracts == 0 || self.n_tracts > self.n_households {
            return bad(format!("n_tracts must be in 1..={}", self.n_households));
        }
        for (name, f) in [
            ("adopter_fraction", self.adopter_fraction),
            ("lmi_fraction", self.lmi_fraction),
            ("rural_fraction", self.rural_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("{name} must be in [0, 1]"));
            }
        }
        if self.days == 0 {
            return bad("days must be > 0".into());
        }
        let (lo, hi) = self.latitude_band;
        if !(-66.0..=66.0).contains(&lo) || !(-66.0..=66.0).contains(&hi) || lo > hi {
            return bad("latitude_band must be ordered and within the polar circles".into());
        }
        if self.tracts_per_county == 0 {
            return bad("tracts_per_county must be > 0".into());
        }
        Ok(())
    }

    pub fn n_adopters(&self) -> usize {
        (self.n_households as f64 * self.adopter_fraction).round() as usize
    }
}

/// A census tract of the toy geography.
#[derive(Debug, Clone, PartialEq)]
pub struct Tract {
    pub index: usize,
    pub id: String,
    pub county: String,
    pub lat: f64,
    pub lon: f64,
    pub rural: bool,
}

pub fn tracts(cfg: &ToyConfig) -> Vec<Tract> {
    let (lo, hi) = cfg.latitude_band;
    let n_rural = (cfg.n_tracts as f64 * cfg.rural_fraction).round() as usize;
    (0..cfg.n_tracts)
        .map(|i| {
            let county_no = 2 * (i / cfg.tracts_per_county) + 1;
            let county = format!("{}{:03}", cfg.state_fips, county_no);
            Tract {
                index: i,
                id: format!("{county}{:06}", (i + 1) * 100),
                county,
                lat: lo + (hi - lo) * (i as f64 + 0.5) / cfg.n_tracts as f64,
                lon: -80.0 + 4.0 * ((i * 7) % cfg.n_tracts) as f64 / cfg.n_tracts as f64,
                rural: i >= cfg.n_tracts - n_rural,
            }
        })
        .collect()
}

/// Direction of the adopter shift per feature (`+1` favours high codes).
fn shift_direction(f: Feature) -> f64 {
    match f {
        Feature::Moneypy => 1.0,
        Feature::Yearmaderange => 1.0,
        Feature::Bedrooms => 0.6,
        Feature::Kownrent => -1.0,
        Feature::Typehuq => -0.6,
        _ => 0.0,
    }
}

fn draw_code<R: Rng + ?Sized>(domain: u8, shift: f64, rng: &mut R) -> u8 {
    let k = domain as usize;
    if k <= 1 {
        return 0;
    }
    // Mildly peaked base marginal, tilted exponentially by the shift.
    let weights: Vec<f64> = (0..k)
        .map(|c| {
            let x = c as f64 / (k - 1) as f64;
            (1.0 + 2.0 * x * (1.0 - x)) * (shift * (x - 0.5)).exp()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (c, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return c as u8;
        }
    }
    (k - 1) as u8
}

/// Household table with planted `solar`, `sqft_class`, `sqft_value`, `lmi`, `rural`.
pub fn gen_population(cfg: &ToyConfig) -> Result<HouseholdTable> {
    cfg.validate()?;
    let n = cfg.n_households;
    let tracts = tracts(cfg);
    let classes = SqftClasses::default();

    let mut pick = stream(cfg.seed, Purpose::Population, u64::MAX);
    let mut adopter = vec![false; n];
    for i in sample(&mut pick, n, cfg.n_adopters()).into_iter() {
        adopter[i] = true;
    }

    let mut records = Vec::with_capacity(n);
    let mut lmi_score = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = stream(cfg.seed, Purpose::Population, i as u64);
        let tract = &tracts[i % cfg.n_tracts];
        let shift = if adopter[i] { cfg.signal_shift } else { 0.0 };
        let mut features = [0u8; N_FEATURES];
        for f in Feature::ALL {
            features[f.index()] = draw_code(cfg.domains.size(f), shift * shift_direction(f), &mut rng);
        }
        // climate zone follows latitude
        let zones = cfg.domains.size(Feature::BaClimate).max(1) as usize;
        features[Feature::BaClimate.index()] = ((tract.index * zones) / cfg.n_tracts).min(zones - 1) as u8;

        let bed = features[Feature::Bedrooms.index()] as f64 / (cfg.domains.size(Feature::Bedrooms).max(2) - 1) as f64;
        let apt = features[Feature::Typehuq.index()] as f64 / (cfg.domains.size(Feature::Typehuq).max(2) - 1) as f64;
        let noise: f64 = (0..3).map(|_| rng.random::<f64>()).sum::<f64>() - 1.5;
        let latent = 1.0 + 5.5 * bed - 1.5 * apt + 1.6 * noise;
        let class = latent.round().clamp(0.0, (classes.n_classes() - 1) as f64) as usize;
        let (lo, hi) = classes.range(class);
        let sqft = lo + (hi - lo) * rng.random::<f64>().powf(1.5);

        let income = features[Feature::Moneypy.index()] as f64;
        lmi_score.push(income + 3.0 * rng.random::<f64>());
        records.push(HouseholdRecord {
            id: i as u64 + 1,
            state: cfg.state.clone(),
            county: tract.county.clone(),
            tract: tract.id.clone(),
            lat: ((tract.lat + 0.04 * (rng.random::<f64>() - 0.5)) * 1e5).round() / 1e5,
            lon: ((tract.lon + 0.04 * (rng.random::<f64>() - 0.5)) * 1e5).round() / 1e5,
            features,
            sqft_class: Some(class as u8),
            sqft_value: Some((sqft * 10.0).round() / 10.0),
            solar: Some(adopter[i]),
            lmi: Some(false),
            rural: Some(tract.rural),
        });
    }
    // LMI: the lowest-income households (with noise), exact count.
    let n_lmi = (n as f64 * cfg.lmi_fraction).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lmi_score[a].total_cmp(&lmi_score[b]).then(a.cmp(&b)));
    for &i in order.iter().take(n_lmi) {
        records[i].lmi = Some(true);
    }
    HouseholdTable::new(records).map_err(Error::from)
}

/// Clear-sky sinusoid GHI for `tract_index`, with a per-day sky factor.
///
/// Sunrise and sunset follow the hour angle `acos(-tan φ tan δ)`; the daily
/// peak is `1000 * cos(φ - δ)` W/m² scaled by a sky factor in `[0.6, 1]`.
pub fn gen_irradiance(cfg: &ToyConfig, tract_index: usize) -> Result<IrradianceSeries> {
    cfg.validate()?;
    let tracts = tracts(cfg);
    let tract = tracts
        .get(tract_index)
        .ok_or_else(|| Error::Config(format!("tract index {tract_index} >= {}", cfg.n_tracts)))?;
    let mut rng = stream(cfg.seed, Purpose::Irradiance, tract_index as u64);
    let mut hours = Vec::with_capacity(cfg.days * 24);
    for d in 0..cfg.days {
        let date = cfg.start_date + chrono::Days::new(d as u64);
        let sky = 0.6 + 0.4 * rng.random::<f64>();
        let day = clear_sky_day(tract.lat, crate::data::day_of_year(date), sky);
        hours.extend_from_slice(&day);
    }
    IrradianceSeries::new(tract.id.clone(), cfg.start_date, hours).map_err(Error::from)
}

/// Sunrise and sunset (solar hours) at latitude `lat` on `day_of_year`.
pub fn sun_hours(lat: f64, day_of_year: u32) -> (f64, f64) {
    let delta: f64 = declination(day_of_year);
    let cos_h0 = (-lat.to_radians().tan() * delta.to_radians().tan()).clamp(-1.0, 1.0);
    let half = cos_h0.acos().to_degrees() / 15.0;
    (12.0 - half, 12.0 + half)
}

/// Peak GHI (W/m²) before the sky factor.
pub fn clear_sky_peak(lat: f64, day_of_year: u32) -> f64 {
    let delta: f64 = declination(day_of_year);
    1000.0 * (lat - delta).to_radians().cos().max(0.0)
}

fn clear_sky_day(lat: f64, day_of_year: u32, sky: f64) -> [f64; 24] {
    let (rise, set) = sun_hours(lat, day_of_year);
    let peak = clear_sky_peak(lat, day_of_year) * sky;
    let mut out = [0.0; 24];
    for (w, v) in out.iter_mut().enumerate() {
        let t = w as f64;
        if t > rise && t < set {
            *v = (peak * (std::f64::consts::PI * (t - rise) / (set - rise)).sin()).max(0.0);
        }
    }
    out
}

/// Workplace-style network: contiguous groups, independent within-group edges.
pub fn gen_network(n: usize, edge_prob: f64, groups: usize, seed: u64) -> Result<Graph> {
    if n == 0 || groups == 0 {
        return Err(Error::Config("gen_network needs n > 0 and groups >= 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::Config("edge_prob must be in [0, 1]".into()));
    }
    let groups = groups.min(n);
    let mut edges = Vec::new();
    for g in 0..groups {
        let start = g * n / groups;
        let end = (g + 1) * n / groups;
        let mut rng = stream(seed, Purpose::Network, g as u64);
        for u in start..end {
            for v in u + 1..end {
                if edge_prob >= 1.0 || rng.random::<f64>() < edge_prob {
                    edges.push((u as u32, v as u32));
                }
            }
        }
    }
    Graph::from_edges(n, edges).map_err(Error::from)
}

/// Adoption barrier flags, more frequent for LMI and rural households.
pub fn gen_barriers(table: &HouseholdTable, seed: u64) -> Vec<(u64, BarrierFlags)> {
    table
        .iter()
        .map(|h| {
            let mut rng = stream(seed, Purpose::Barriers, h.id);
            let lmi = h.lmi == Some(true);
            let rural = h.rural == Some(true);
            let base = 0.1 + if lmi { 0.3 } else { 0.0 } + if rural { 0.1 } else { 0.0 };
            let mut flags = [false; 8];
            for f in flags.iter_mut() {
                *f = rng.random::<f64>() < base;
            }
            // rental and income barriers follow the record
            flags[3] = h.feature(Feature::Kownrent) != 0;
            flags[5] = lmi;
            (h.id, flags)
        })
        .collect()
}
