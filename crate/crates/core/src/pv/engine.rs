//! Hourly energy profiles with uncertainty, computed in parallel blocks.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::data::{DataError, HouseholdRecord, HouseholdTable, IrradianceSeries};
use crate::error::{Error, Result};
use crate::pv::geometry::{declination, tilt_factor};
use crate::pv::samples::{sample_time_invariant, PvConfig, TimeInvariantSamples};
use crate::scalar::{count, lit, Scalar};

/// Mean and population standard deviation of `arpr[i] * ht[j] / 1000` over
/// every `(i, j)` pair, in kWh for one hour.
pub fn hourly_energy<T: Scalar>(arpr: &[T], ht: &[T]) -> (T, T) {
    let n = arpr.len() * ht.len();
    if n == 0 {
        return (T::zero(), T::zero());
    }
    let kilo: T = lit(1000.0);
    let mut sum = T::zero();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &h in ht {
        for &a in arpr {
            let e = a * h / kilo;
            sum += e;
            lo = lo.min(e);
            hi = hi.max(e);
        }
    }
    let mean = sum / count(n);
    if lo == hi {
        return (mean, T::zero());
    }
    let mut ss = T::zero();
    for &h in ht {
        for &a in arpr {
            let d = a * h / kilo - mean;
            ss += d * d;
        }
    }
    (mean, (ss / count(n)).sqrt())
}

/// Time window to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Date(NaiveDate),
    /// ISO week.
    Week {
        year: i32,
        week: u32,
    },
    Month {
        year: i32,
        month: u32,
    },
    Year(i32),
}

impl Period {
    pub fn dates(&self) -> Vec<NaiveDate> {
        let (start, end) = match *self {
            Period::Date(d) => (d, d),
            Period::Week { year, week } => {
                let s = NaiveDate::from_isoywd_opt(year, week, Weekday::Mon).expect("validated week");
                (s, s + chrono::Days::new(6))
            }
            Period::Month { year, month } => {
                let s = NaiveDate::from_ymd_opt(year, month, 1).expect("validated month");
                let next = if month == 12 {
                    NaiveDate::from_ymd_opt(year + 1, 1, 1)
                } else {
                    NaiveDate::from_ymd_opt(year, month + 1, 1)
                }
                .expect("valid date");
                (s, next.pred_opt().expect("valid date"))
            }
            Period::Year(y) => (
                NaiveDate::from_ymd_opt(y, 1, 1).expect("valid year"),
                NaiveDate::from_ymd_opt(y, 12, 31).expect("valid year"),
            ),
        };
        start.iter_days().take_while(|d| *d <= end).collect()
    }

    /// File-name label, e.g. `2020-06-01`, `2020-W23`, `2020-06`, `2020`.
    pub fn label(&self) -> String {
        match *self {
            Period::Date(d) => d.format("%Y-%m-%d").to_string(),
            Period::Week { year, week } => format!("{year}-W{week:02}"),
            Period::Month { year, month } => format!("{year}-{month:02}"),
            Period::Year(y) => y.to_string(),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            Period::Date(_) => "date",
            Period::Week { .. } => "week",
            Period::Month { .. } => "month",
            Period::Year(_) => "year",
        };
        write!(f, "{kind}:{}", self.label())
    }
}

impl FromStr for Period {
    type Err = Error;

    /// `date:YYYY-MM-DD`, `week:YYYY-Www` (or `YYYY-ww`), `month:YYYY-MM`, `year:YYYY`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid period {s:?}; expected date:|week:|month:|year:VALUE"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value = value.trim();
        let num = |x: &str| x.trim().parse::<i64>().map_err(|_| bad());
        match kind.trim() {
            "date" => NaiveDate::parse_from_str(value, "%Y-%m-%d")
                .map(Period::Date)
                .map_err(|_| bad()),
            "week" => {
                let (y, w) = value.split_once('-').ok_or_else(bad)?;
                let (year, week) = (num(y)? as i32, num(w.trim_start_matches(['W', 'w']))? as u32);
                NaiveDate::from_isoywd_opt(year, week, Weekday::Mon).ok_or_else(bad)?;
                Ok(Period::Week { year, week })
            }
            "month" => {
                let (y, m) = value.split_once('-').ok_or_else(bad)?;
                let (year, month) = (num(y)? as i32, num(m)? as u32);
                NaiveDate::from_ymd_opt(year, month, 1).ok_or_else(bad)?;
                Ok(Period::Month { year, month })
            }
            "year" => {
                let year = num(value)? as i32;
                NaiveDate::from_ymd_opt(year, 1, 1).ok_or_else(bad)?;
                Ok(Period::Year(year))
            }
            _ => Err(bad()),
        }
    }
}

/// 24-hour profile for one household and date.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile<T> {
    pub household: u64,
    pub date: NaiveDate,
    pub hourly_mean: [T; 24],
    pub hourly_std: [T; 24],
    pub daily_mean: T,
    pub daily_std: T,
}

/// Profiles ordered by date, then household id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProfileSet<T> {
    pub profiles: Vec<EnergyProfile<T>>,
}

/// Which households get profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Only households flagged `solar = 1`.
    Adopters,
    /// Every household (potential generation).
    All,
}

/// One household-day: declination from the day of year, tilted radiation for
/// each orientation sample, then per-hour energy statistics.
pub fn household_day<T: Scalar>(
    samples: &TimeInvariantSamples<T>,
    lat: T,
    date: NaiveDate,
    ghi: &[f64],
    cfg: &PvConfig,
) -> EnergyProfile<T> {
    let delta: T = declination(date.ordinal());
    let factors: Vec<T> = samples
        .tilts
        .iter()
        .zip(&samples.azimuths)
        .map(|(&tilt, &az)| tilt_factor(lat, delta, tilt, lit(cfg.degradation.factor(az))))
        .collect();
    let mut hourly_mean = [T::zero(); 24];
    let mut hourly_std = [T::zero(); 24];
    let mut ht = vec![T::zero(); factors.len()];
    for w in 0..24 {
        let g: T = lit(ghi[w]);
        if g == T::zero() {
            continue;
        }
        for (h, &f) in ht.iter_mut().zip(&factors) {
            *h = g * f;
        }
        let (m, s) = hourly_energy(&samples.arpr, &ht);
        hourly_mean[w] = m;
        hourly_std[w] = s;
    }
    let daily_mean = hourly_mean.iter().copied().sum();
    let daily_std = hourly_std.iter().map(|&s| s * s).sum::<T>().sqrt();
    EnergyProfile {
        household: samples.household,
        date,
        hourly_mean,
        hourly_std,
        daily_mean,
        daily_std,
    }
}

fn selected(pop: &HouseholdTable, selection: Selection) -> Vec<&HouseholdRecord> {
    let mut hs: Vec<&HouseholdRecord> = pop
        .iter()
        .filter(|h| selection == Selection::All || h.solar == Some(true))
        .collect();
    hs.sort_by_key(|h| h.id);
    hs
}

/// Generates profiles for every selected household and date.
///
/// Households are sorted by id, split into `workers` contiguous blocks and
/// processed on scoped threads; each household's samples come from an RNG
/// stream keyed by `(seed, id)`, so the output does not depend on `workers`
/// or on input order.
pub fn generate_profiles<T: Scalar>(
    pop: &HouseholdTable,
    irradiance: &BTreeMap<String, IrradianceSeries>,
    dates: &[NaiveDate],
    cfg: &PvConfig,
    selection: Selection,
    workers: usize,
    seed: u64,
) -> Result<ProfileSet<T>> {
    cfg.validate()?;
    let households = selected(pop, selection);
    for h in &households {
        if h.sqft_value.is_none() {
            return Err(Error::MissingField {
                what: "sqft_value",
                id: h.id,
            });
        }
        for &date in dates {
            let covered = irradiance.get(&h.tract).and_then(|s| s.day(date)).is_some();
            if !covered {
                return Err(Error::MissingIrradiance {
                    tract: h.tract.clone(),
                    date,
                });
            }
        }
    }

    let workers = workers.max(1);
    let block = households.len().div_ceil(workers).max(1);
    let run_block = |block: &[&HouseholdRecord]| -> Result<Vec<Vec<EnergyProfile<T>>>> {
        block
            .iter()
            .map(|h| {
                let samples: TimeInvariantSamples<T> = sample_time_invariant(h, cfg, seed)?;
                let series = &irradiance[&h.tract];
                Ok(dates
                    .iter()
                    .map(|&d| household_day(&samples, lit(h.lat), d, series.day(d).expect("checked"), cfg))
                    .collect())
            })
            .collect()
    };
    let per_household: Vec<Vec<EnergyProfile<T>>> = if workers == 1 {
        run_block(&households)?
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = households
                .chunks(block)
                .map(|chunk| scope.spawn(move || run_block(chunk)))
                .collect();
            let mut out = Vec::with_capacity(households.len());
            for h in handles {
                out.extend(h.join().expect("profile worker panicked")?);
            }
            Ok::<_, Error>(out)
        })?
    };

    let mut profiles = Vec::with_capacity(households.len() * dates.len());
    for d in 0..dates.len() {
        profiles.extend(per_household.iter().map(|p| p[d].clone()));
    }
    Ok(ProfileSet { profiles })
}

/// Time-invariant ensembles for every selected household, sorted by id.
pub fn time_invariant_set<T: Scalar>(
    pop: &HouseholdTable,
    cfg: &PvConfig,
    selection: Selection,
    seed: u64,
) -> Result<Vec<TimeInvariantSamples<T>>> {
    selected(pop, selection)
        .into_iter()
        .map(|h| sample_time_invariant(h, cfg, seed))
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Data(DataError::Csv(e))
}

fn flush<W: Write>(w: &mut csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| csv_err(e.into()))
}

/// `household_id,date,hour,mean_kwh,std_kwh`
pub fn write_hourly<T: Scalar, W: Write>(set: &ProfileSet<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["household_id", "date", "hour", "mean_kwh", "std_kwh"])
        .map_err(csv_err)?;
    for p in &set.profiles {
        let date = p.date.format("%Y-%m-%d").to_string();
        for h in 0..24 {
            w.write_record([
                p.household.to_string(),
                date.clone(),
                h.to_string(),
                p.hourly_mean[h].to_string(),
                p.hourly_std[h].to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    flush(&mut w)
}

/// `household_id,date,daily_mean_kwh,daily_std_kwh`
pub fn write_daily<T: Scalar, W: Write>(set: &ProfileSet<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["household_id", "date", "daily_mean_kwh", "daily_std_kwh"])
        .map_err(csv_err)?;
    for p in &set.profiles {
        w.write_record([
            p.household.to_string(),
            p.date.format("%Y-%m-%d").to_string(),
            p.daily_mean.to_string(),
            p.daily_std.to_string(),
        ])
        .map_err(csv_err)?;
    }
    flush(&mut w)
}

/// `household_id,roof_area_m2,building_type,sample,area_m2,eta,pr,planes,tilt_deg,azimuth`
pub fn write_time_invariant<T: Scalar, W: Write>(sets: &[TimeInvariantSamples<T>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "household_id",
        "roof_area_m2",
        "building_type",
        "sample",
        "area_m2",
        "eta",
        "pr",
        "planes",
        "tilt_deg",
        "azimuth",
    ])
    .map_err(csv_err)?;
    for s in sets {
        for i in 0..s.len() {
            w.write_record([
                s.household.to_string(),
                s.roof_area.to_string(),
                s.building_type.to_string(),
                i.to_string(),
                s.areas[i].to_string(),
                s.yields[i].to_string(),
                s.ratios[i].to_string(),
                s.planes[i].to_string(),
                s.tilts[i].to_string(),
                s.azimuths[i].to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    flush(&mut w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyRow {
    pub household: u64,
    pub date: NaiveDate,
    pub mean_kwh: f64,
    pub std_kwh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourlyRow {
    pub household: u64,
    pub date: NaiveDate,
    pub hour: u32,
    pub mean_kwh: f64,
    pub std_kwh: f64,
}

fn field<'a>(rec: &'a csv::StringRecord, headers: &csv::StringRecord, name: &str, line: usize) -> Result<&'a str> {
    let idx = headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| DataError::MissingColumn { column: name.into() })?;
    rec.get(idx).map(str::trim).ok_or_else(|| {
        Error::Data(DataError::InvalidValue {
            line,
            column: name.into(),
            value: String::new(),
            reason: "missing cell".into(),
        })
    })
}

fn parse<F: FromStr>(raw: &str, name: &str, line: usize) -> Result<F> {
    raw.parse().map_err(|_| {
        Error::Data(DataError::InvalidValue {
            line,
            column: name.into(),
            value: raw.into(),
            reason: "unparseable".into(),
        })
    })
}

fn parse_date(raw: &str, line: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|_| {
        Error::Data(DataError::InvalidValue {
            line,
            column: "date".into(),
            value: raw.into(),
            reason: "expected YYYY-MM-DD".into(),
        })
    })
}

pub fn read_daily<R: Read>(reader: R) -> Result<Vec<DailyRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        out.push(DailyRow {
            household: parse(field(&rec, &headers, "household_id", line)?, "household_id", line)?,
            date: parse_date(field(&rec, &headers, "date", line)?, line)?,
            mean_kwh: parse(field(&rec, &headers, "daily_mean_kwh", line)?, "daily_mean_kwh", line)?,
            std_kwh: parse(field(&rec, &headers, "daily_std_kwh", line)?, "daily_std_kwh", line)?,
        });
    }
    Ok(out)
}

pub fn read_hourly<R: Read>(reader: R) -> Result<Vec<HourlyRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        out.push(HourlyRow {
            household: parse(field(&rec, &headers, "household_id", line)?, "household_id", line)?,
            date: parse_date(field(&rec, &headers, "date", line)?, line)?,
            hour: parse(field(&rec, &headers, "hour", line)?, "hour", line)?,
            mean_kwh: parse(field(&rec, &headers, "mean_kwh", line)?, "mean_kwh", line)?,
            std_kwh: parse(field(&rec, &headers, "std_kwh", line)?, "std_kwh", line)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hourly_energy_reference() {
        let (m, s) = hourly_energy(&[9.84f64 * 0.2 * 0.8], &[500.0]);
        assert!((m - 0.7872).abs() < 1e-12);
        assert_eq!(s, 0.0);
        assert_eq!(hourly_energy(&[1.0f64, 2.0, 3.0], &[0.0, 0.0]), (0.0, 0.0));
        let (_, s) = hourly_energy(&[0.3f64; 7], &[123.4; 5]);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn hourly_energy_outer_product_stats() {
        let a = [1.0f64, 3.0];
        let h = [1000.0, 2000.0];
        // products in kWh: 1, 3, 2, 6
        let (m, s) = hourly_energy(&a, &h);
        assert!((m - 3.0).abs() < 1e-12);
        let var = ((1.0f64 - 3.0).powi(2) + 0.0 + 1.0 + 9.0) / 4.0;
        assert!((s - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn period_parsing_and_dates() {
        let p: Period = "date:2020-06-01".parse().unwrap();
        assert_eq!(p.dates().len(), 1);
        let p: Period = "week:2020-W23".parse().unwrap();
        let d = p.dates();
        assert_eq!(d.len(), 7);
        assert_eq!(d[0], NaiveDate::from_ymd_opt(2020, 6, 1).unwrap());
        assert_eq!(p.label(), "2020-W23");
        assert_eq!("month:2020-02".parse::<Period>().unwrap().dates().len(), 29);
        assert_eq!("year:2021".parse::<Period>().unwrap().dates().len(), 365);
        assert_eq!("month:2020-06".parse::<Period>().unwrap().to_string(), "month:2020-06");
        assert!("month:2020-13".parse::<Period>().is_err());
        assert!("fortnight:2020".parse::<Period>().is_err());
    }
}
