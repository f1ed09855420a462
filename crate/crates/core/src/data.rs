//! Household, irradiance, target and network tables with their CSV formats.
//!
//! Formats:
//!
//! * `households.csv`: `id,state,county,tract,lat,lon,NHSLDMEM,BEDROOMS,TYPEHUQ,
//!   FUELHEAT,KOWNRENT,YEARMADERANGE,MONEYPY,BA_climate` followed by any of the
//!   optional columns `sqft_class,sqft_value,solar,lmi,rural`. Empty optional
//!   cells mean "unknown". Booleans are written `0`/`1` and read from
//!   `0/1/true/false`.
//! * `irradiance_<tract>.csv`: `date,hour,ghi_wm2`, contiguous hourly rows.
//! * `targets.csv`: `state,count`.
//! * `network.edges`: one `u v` (or `u,v`) pair per line; `#` starts a comment,
//!   and a `# nodes N` comment pins the node count.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

/// Categorical household features used by both classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    Nhsldmem,
    Bedrooms,
    Typehuq,
    Fuelheat,
    Kownrent,
    Yearmaderange,
    Moneypy,
    BaClimate,
}

pub const N_FEATURES: usize = 8;

impl Feature {
    pub const ALL: [Feature; N_FEATURES] = [
        Feature::Nhsldmem,
        Feature::Bedrooms,
        Feature::Typehuq,
        Feature::Fuelheat,
        Feature::Kownrent,
        Feature::Yearmaderange,
        Feature::Moneypy,
        Feature::BaClimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Nhsldmem => "NHSLDMEM",
            Feature::Bedrooms => "BEDROOMS",
            Feature::Typehuq => "TYPEHUQ",
            Feature::Fuelheat => "FUELHEAT",
            Feature::Kownrent => "KOWNRENT",
            Feature::Yearmaderange => "YEARMADERANGE",
            Feature::Moneypy => "MONEYPY",
            Feature::BaClimate => "BA_climate",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Number of codes per feature; valid codes are `0..size`.
///
/// Defaults follow the RECS 2020 codebook category counts, re-encoded as
/// zero-based ordinals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureDomains(pub [u8; N_FEATURES]);

impl Default for FeatureDomains {
    fn default() -> Self {
        //              NHSLDMEM BEDROOMS TYPEHUQ FUELHEAT KOWNRENT YEARMADE MONEYPY BA
        FeatureDomains([7, 6, 5, 7, 3, 9, 16, 8])
    }
}

impl FeatureDomains {
    pub fn size(&self, f: Feature) -> u8 {
        self.0[f.index()]
    }

    pub fn as_usize(&self) -> Vec<usize> {
        self.0.iter().map(|&d| d as usize).collect()
    }
}

/// Default number of square-footage classes.
pub const N_SQFT_CLASSES: u8 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdRecord {
    pub id: u64,
    pub state: String,
    pub county: String,
    pub tract: String,
    pub lat: f64,
    pub lon: f64,
    pub features: [u8; N_FEATURES],
    pub sqft_class: Option<u8>,
    pub sqft_value: Option<f64>,
    pub solar: Option<bool>,
    pub lmi: Option<bool>,
    pub rural: Option<bool>,
}

impl HouseholdRecord {
    pub fn feature(&self, f: Feature) -> u8 {
        self.features[f.index()]
    }
}

/// Ordered, id-unique collection of households.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HouseholdTable {
    pub records: Vec<HouseholdRecord>,
}

impl HouseholdTable {
    pub fn new(records: Vec<HouseholdRecord>) -> Result<Self, DataError> {
        let mut seen = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if !seen.insert(r.id) {
                return Err(DataError::DuplicateId { line: i + 2, id: r.id });
            }
        }
        Ok(HouseholdTable { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HouseholdRecord> {
        self.records.iter()
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {column}")]
    MissingColumn { column: String },
    #[error("line {line}, column {column}: invalid value {value:?} ({reason})")]
    InvalidValue {
        line: usize,
        column: String,
        value: String,
        reason: String,
    },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: u64 },
    #[error("irradiance gap: expected day {day} ({date}) hour {hour}, found {found}")]
    IrradianceGap {
        day: usize,
        date: NaiveDate,
        hour: u32,
        found: String,
    },
    #[error("negative ghi {value} at {date} hour {hour}")]
    NegativeGhi { date: NaiveDate, hour: u32, value: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u32 },
    #[error("edge ({u}, {v}) outside node count {node_count}")]
    EdgeOutOfRange { u: u32, v: u32, node_count: usize },
}

pub(crate) fn open(path: &Path) -> Result<File, DataError> {
    File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create(path: &Path) -> Result<File, DataError> {
    File::create(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) struct Columns {
    index: BTreeMap<String, usize>,
}

impl Columns {
    pub(crate) fn new(headers: &csv::StringRecord) -> Self {
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        Columns { index }
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize, DataError> {
        self.index.get(name).copied().ok_or_else(|| DataError::MissingColumn {
            column: name.to_string(),
        })
    }

    pub(crate) fn optional(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

pub(crate) fn invalid(line: usize, column: &str, value: &str, reason: impl Into<String>) -> DataError {
    DataError::InvalidValue {
        line,
        column: column.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn parse_num<F: std::str::FromStr>(line: usize, column: &str, raw: &str) -> Result<F, DataError> {
    raw.trim()
        .parse::<F>()
        .map_err(|_| invalid(line, column, raw, "not a number"))
}

pub(crate) fn parse_bool(line: usize, column: &str, raw: &str) -> Result<bool, DataError> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(invalid(line, column, raw, "expected 0/1/true/false")),
    }
}

pub(crate) fn cell(rec: &csv::StringRecord, idx: Option<usize>) -> Option<&str> {
    idx.and_then(|i| rec.get(i)).map(str::trim).filter(|s| !s.is_empty())
}

pub const OPTIONAL_HOUSEHOLD_COLUMNS: [&str; 5] = ["sqft_class", "sqft_value", "solar", "lmi", "rural"];

/// Reads `households.csv` with the default feature domains.
pub fn load_households(path: impl AsRef<Path>) -> Result<HouseholdTable, DataError> {
    load_households_with(path, &FeatureDomains::default())
}

pub fn load_households_with(path: impl AsRef<Path>, domains: &FeatureDomains) -> Result<HouseholdTable, DataError> {
    read_households(open(path.as_ref())?, domains)
}

pub fn read_households<R: Read>(reader: R, domains: &FeatureDomains) -> Result<HouseholdTable, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let cols = Columns::new(rdr.headers()?);
    let id_c = cols.require("id")?;
    let state_c = cols.require("state")?;
    let county_c = cols.require("county")?;
    let tract_c = cols.require("tract")?;
    let lat_c = cols.require("lat")?;
    let lon_c = cols.require("lon")?;
    let mut feat_c = [0usize; N_FEATURES];
    for f in Feature::ALL {
        feat_c[f.index()] = cols.require(f.name())?;
    }
    let [sqft_class_c, sqft_value_c, solar_c, lmi_c, rural_c] = OPTIONAL_HOUSEHOLD_COLUMNS.map(|c| cols.optional(c));

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let get = |c: usize, name: &str| -> Result<&str, DataError> {
            row.get(c)
                .map(str::trim)
                .ok_or_else(|| invalid(line, name, "", "missing cell"))
        };
        let id: u64 = parse_num(line, "id", get(id_c, "id")?)?;
        if !seen.insert(id) {
            return Err(DataError::DuplicateId { line, id });
        }
        let lat: f64 = parse_num(line, "lat", get(lat_c, "lat")?)?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(invalid(line, "lat", &lat.to_string(), "outside [-90, 90]"));
        }
        let lon: f64 = parse_num(line, "lon", get(lon_c, "lon")?)?;
        if !(-180.0..=180.0).contains(&lon) {
            return Err(invalid(line, "lon", &lon.to_string(), "outside [-180, 180]"));
        }
        let mut features = [0u8; N_FEATURES];
        for f in Feature::ALL {
            let raw = get(feat_c[f.index()], f.name())?;
            let code: u8 = parse_num(line, f.name(), raw)?;
            if code >= domains.size(f) {
                return Err(invalid(
                    line,
                    f.name(),
                    raw,
                    format!("code outside domain 0..{}", domains.size(f)),
                ));
            }
            features[f.index()] = code;
        }
        let sqft_class = match cell(&row, sqft_class_c) {
            Some(raw) => {
                let c: u8 = parse_num(line, "sqft_class", raw)?;
                if c >= N_SQFT_CLASSES {
                    return Err(invalid(line, "sqft_class", raw, "class outside 0..8"));
                }
                Some(c)
            }
            None => None,
        };
        let sqft_value = match cell(&row, sqft_value_c) {
            Some(raw) => {
                let v: f64 = parse_num(line, "sqft_value", raw)?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(line, "sqft_value", raw, "must be positive"));
                }
                Some(v)
            }
            None => None,
        };
        let flag = |c: Option<usize>, name: &str| cell(&row, c).map(|raw| parse_bool(line, name, raw)).transpose();
        records.push(HouseholdRecord {
            id,
            state: get(state_c, "state")?.to_string(),
            county: get(county_c, "county")?.to_string(),
            tract: get(tract_c, "tract")?.to_string(),
            lat,
            lon,
            features,
            sqft_class,
            sqft_value,
            solar: flag(solar_c, "solar")?,
            lmi: flag(lmi_c, "lmi")?,
            rural: flag(rural_c, "rural")?,
        });
    }
    Ok(HouseholdTable { records })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|b| if b { "1" } else { "0" }.to_string()).unwrap_or_default()
}

/// Writes every column, leaving unknown optional values empty.
pub fn write_households<W: Write>(table: &HouseholdTable, writer: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = vec!["id", "state", "county", "tract", "lat", "lon"];
    header.extend(Feature::ALL.iter().map(|f| f.name()));
    header.extend(OPTIONAL_HOUSEHOLD_COLUMNS);
    w.write_record(&header)?;
    for r in &table.records {
        let mut row = vec![
            r.id.to_string(),
            r.state.clone(),
            r.county.clone(),
            r.tract.clone(),
            r.lat.to_string(),
            r.lon.to_string(),
        ];
        row.extend(r.features.iter().map(|c| c.to_string()));
        row.push(opt(r.sqft_class));
        row.push(opt(r.sqft_value));
        row.push(opt_bool(r.solar));
        row.push(opt_bool(r.lmi));
        row.push(opt_bool(r.rural));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| DataError::Csv(e.into()))?;
    Ok(())
}

pub fn save_households(table: &HouseholdTable, path: impl AsRef<Path>) -> Result<(), DataError> {
    write_households(table, create(path.as_ref())?)
}

/// Hourly global horizontal irradiance for one census tract.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceSeries {
    pub tract: String,
    pub start_date: NaiveDate,
    /// W/m², 24 values per day.
    pub hours: Vec<f64>,
}

impl IrradianceSeries {
    pub fn new(tract: impl Into<String>, start_date: NaiveDate, hours: Vec<f64>) -> Result<Self, DataError> {
        if !hours.len().is_multiple_of(24) {
            return Err(DataError::Invalid(format!(
                "irradiance length {} is not a multiple of 24",
                hours.len()
            )));
        }
        if let Some((i, v)) = hours.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(DataError::NegativeGhi {
                date: start_date + chrono::Days::new((i / 24) as u64),
                hour: (i % 24) as u32,
                value: *v,
            });
        }
        Ok(IrradianceSeries {
            tract: tract.into(),
            start_date,
            hours,
        })
    }

    pub fn days(&self) -> usize {
        self.hours.len() / 24
    }

    pub fn end_date(&self) -> NaiveDate {
        self.start_date + chrono::Days::new(self.days().saturating_sub(1) as u64)
    }

    /// The 24 hourly values for `date`, if covered.
    pub fn day(&self, date: NaiveDate) -> Option<&[f64]> {
        let offset = (date - self.start_date).num_days();
        if offset < 0 || offset as usize >= self.days() {
            return None;
        }
        let o = offset as usize * 24;
        Some(&self.hours[o..o + 24])
    }
}

/// Tract id encoded in an `irradiance_<tract>.csv` file name.
pub fn tract_from_path(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    stem.strip_prefix("irradiance_").unwrap_or(stem).to_string()
}

pub fn load_irradiance(path: impl AsRef<Path>) -> Result<IrradianceSeries, DataError> {
    let path = path.as_ref();
    read_irradiance(open(path)?, tract_from_path(path))
}

pub fn read_irradiance<R: Read>(reader: R, tract: String) -> Result<IrradianceSeries, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let cols = Columns::new(rdr.headers()?);
    let date_c = cols.require("date")?;
    let hour_c = cols.require("hour")?;
    let ghi_c = cols.require("ghi_wm2")?;
    let mut start: Option<NaiveDate> = None;
    let mut hours = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let raw_date = row.get(date_c).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d")
            .map_err(|_| invalid(line, "date", raw_date, "expected YYYY-MM-DD"))?;
        let hour: u32 = parse_num(line, "hour", row.get(hour_c).unwrap_or(""))?;
        let ghi: f64 = parse_num(line, "ghi_wm2", row.get(ghi_c).unwrap_or(""))?;
        let start_date = *start.get_or_insert(date);
        let expected_day = i / 24;
        let expected_hour = (i % 24) as u32;
        let expected_date = start_date + chrono::Days::new(expected_day as u64);
        if date != expected_date || hour != expected_hour {
            return Err(DataError::IrradianceGap {
                day: expected_day + 1,
                date: expected_date,
                hour: expected_hour,
                found: format!("{date} hour {hour}"),
            });
        }
        if !(ghi.is_finite() && ghi >= 0.0) {
            return Err(DataError::NegativeGhi { date, hour, value: ghi });
        }
        hours.push(ghi);
    }
    let start_date = start.ok_or_else(|| DataError::Invalid("irradiance file has no rows".into()))?;
    if !hours.len().is_multiple_of(24) {
        let n = hours.len();
        return Err(DataError::IrradianceGap {
            day: n / 24 + 1,
            date: start_date + chrono::Days::new((n / 24) as u64),
            hour: (n % 24) as u32,
            found: "end of file".into(),
        });
    }
    IrradianceSeries::new(tract, start_date, hours)
}

pub fn write_irradiance<W: Write>(series: &IrradianceSeries, writer: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "hour", "ghi_wm2"])?;
    for (i, v) in series.hours.iter().enumerate() {
        let date = series.start_date + chrono::Days::new((i / 24) as u64);
        w.write_record([date.format("%Y-%m-%d").to_string(), (i % 24).to_string(), v.to_string()])?;
    }
    w.flush().map_err(|e| DataError::Csv(e.into()))?;
    Ok(())
}

pub fn save_irradiance(series: &IrradianceSeries, dir: impl AsRef<Path>) -> Result<PathBuf, DataError> {
    let path = dir.as_ref().join(format!("irradiance_{}.csv", series.tract));
    write_irradiance(series, create(&path)?)?;
    Ok(path)
}

/// Loads every `irradiance_*.csv` in `dir`, keyed by tract.
pub fn load_irradiance_dir(dir: impl AsRef<Path>) -> Result<BTreeMap<String, IrradianceSeries>, DataError> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|source| DataError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("irradiance_") && n.ends_with(".csv"))
        })
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let s = load_irradiance(&p)?;
        out.insert(s.tract.clone(), s);
    }
    Ok(out)
}

/// Ground-truth adopter count for a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdopterTarget {
    pub state: String,
    pub count: u64,
}

pub fn load_targets(path: impl AsRef<Path>) -> Result<Vec<AdopterTarget>, DataError> {
    read_targets(open(path.as_ref())?)
}

pub fn read_targets<R: Read>(reader: R) -> Result<Vec<AdopterTarget>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let cols = Columns::new(rdr.headers()?);
    let state_c = cols.require("state")?;
    let count_c = cols.require("count")?;
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        out.push(AdopterTarget {
            state: row.get(state_c).unwrap_or("").trim().to_string(),
            count: parse_num(i + 2, "count", row.get(count_c).unwrap_or(""))?,
        });
    }
    Ok(out)
}

pub fn write_targets<W: Write>(targets: &[AdopterTarget], writer: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["state", "count"])?;
    for t in targets {
        w.write_record([t.state.clone(), t.count.to_string()])?;
    }
    w.flush().map_err(|e| DataError::Csv(e.into()))?;
    Ok(())
}

pub fn save_targets(targets: &[AdopterTarget], path: impl AsRef<Path>) -> Result<(), DataError> {
    write_targets(targets, create(path.as_ref())?)
}

/// Undirected simple graph; edges are stored as `(min, max)` in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub node_count: usize,
    pub edges: Vec<(u32, u32)>,
}

/// Compressed adjacency lists.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }
}

impl Graph {
    /// Builds a graph, dropping duplicate undirected edges.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, DataError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, (u, v)) in edges.into_iter().enumerate() {
            if u == v {
                return Err(DataError::SelfLoop { line: i + 1, node: u });
            }
            if u as usize >= node_count || v as usize >= node_count {
                return Err(DataError::EdgeOutOfRange { u, v, node_count });
            }
            let e = (u.min(v), u.max(v));
            if seen.insert(e) {
                out.push(e);
            }
        }
        Ok(Graph { node_count, edges: out })
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut deg = vec![0usize; self.node_count];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(self.node_count + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[self.node_count]];
        for &(u, v) in &self.edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for n in 0..self.node_count {
            targets[offsets[n]..offsets[n + 1]].sort_unstable();
        }
        Adjacency { offsets, targets }
    }
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Graph, DataError> {
    read_network(open(path.as_ref())?)
}

pub fn read_network<R: Read>(reader: R) -> Result<Graph, DataError> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut max_node: Option<u32> = None;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| DataError::Io {
            path: PathBuf::from("<network>"),
            source,
        })?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if parts.next() == Some("nodes") {
                let raw = parts.next().unwrap_or("");
                declared = Some(parse_num(lineno, "nodes", raw)?);
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if toks.len() != 2 {
            return Err(invalid(lineno, "edge", trimmed, "expected two node ids"));
        }
        let u: u32 = parse_num(lineno, "u", toks[0])?;
        let v: u32 = parse_num(lineno, "v", toks[1])?;
        if u == v {
            return Err(DataError::SelfLoop { line: lineno, node: u });
        }
        max_node = Some(max_node.map_or(u.max(v), |m| m.max(u).max(v)));
        pairs.push((u, v));
    }
    let implied = max_node.map_or(0, |m| m as usize + 1);
    let node_count = declared.map_or(implied, |d| d.max(implied));
    Graph::from_edges(node_count, pairs)
}

pub fn write_network<W: Write>(graph: &Graph, mut writer: W) -> Result<(), DataError> {
    let io = |source| DataError::Io {
        path: PathBuf::from("<network>"),
        source,
    };
    let mut buf = String::with_capacity(graph.edges.len() * 12 + 16);
    buf.push_str(&format!("# nodes {}\n", graph.node_count));
    for (u, v) in &graph.edges {
        buf.push_str(&format!("{u} {v}\n"));
    }
    writer.write_all(buf.as_bytes()).map_err(io)?;
    writer.flush().map_err(io)
}

pub fn save_network(graph: &Graph, path: impl AsRef<Path>) -> Result<(), DataError> {
    let f = create(path.as_ref())?;
    write_network(graph, std::io::BufWriter::new(f))
}

/// Day of year in `1..=366`.
pub fn day_of_year(date: NaiveDate) -> u32 {
    date.ordinal()
}
