//! Progressive-threshold adoption spread over a household network.
//!
//! A non-adopter first passes a Bernoulli gate with its node probability, then
//! adopts if its utility `w1 p + w2 c + w3 n` strictly exceeds its threshold.
//! `p` is the household's normalized PV benefit, `c` the adoption rate in its
//! county and `n` the adopted share of its neighbours, all read from the state
//! at the start of the step. Adopters never revert.
//!
//! Network node `i` is the `i`-th household of the input table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::data::{
    cell, create, open, parse_bool, parse_num, Adjacency, Columns, DataError, Feature, Graph, HouseholdRecord,
    HouseholdTable,
};
use crate::error::{Error, Result};
use crate::rng::{uniform_at, Purpose};
use crate::scalar::Scalar;

/// Internet, language, race/socioeconomic, rental, education, income, house
/// age, member age.
pub type BarrierFlags = [bool; 8];

pub const BARRIER_COLUMNS: [&str; 8] = [
    "internet",
    "language",
    "race_socioeconomic",
    "rental",
    "education",
    "income",
    "house_age",
    "member_age",
];

pub const MIN_THRESHOLD: f64 = 0.1;
pub const MAX_THRESHOLD: f64 = 0.95;

/// Linear step from 0.1 (no barriers) to 0.95 (all eight).
pub fn threshold_from_barriers(flags: &BarrierFlags) -> f64 {
    let k = flags.iter().filter(|&&b| b).count();
    MIN_THRESHOLD + (MAX_THRESHOLD - MIN_THRESHOLD) * k as f64 / 8.0
}

/// Barriers derivable from the household record alone: rental from tenure,
/// income from LMI status, house age from the oldest construction bands.
pub fn proxy_barriers(h: &HouseholdRecord) -> BarrierFlags {
    let mut f = [false; 8];
    f[3] = h.feature(Feature::Kownrent) != 0;
    f[5] = h.lmi == Some(true);
    f[6] = h.feature(Feature::Yearmaderange) <= 1;
    f
}

/// `barriers.csv`: `household_id` then one 0/1 column per barrier.
pub fn read_barriers<R: Read>(reader: R) -> Result<BTreeMap<u64, BarrierFlags>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let cols = Columns::new(rdr.headers()?);
    let id_c = cols.require("household_id")?;
    let flag_c = BARRIER_COLUMNS
        .iter()
        .map(|c| cols.require(c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let id: u64 = parse_num(line, "household_id", cell(&row, Some(id_c)).unwrap_or(""))?;
        let mut flags = [false; 8];
        for (k, &c) in flag_c.iter().enumerate() {
            flags[k] = parse_bool(line, BARRIER_COLUMNS[k], cell(&row, Some(c)).unwrap_or(""))?;
        }
        if out.insert(id, flags).is_some() {
            return Err(DataError::DuplicateId { line, id });
        }
    }
    Ok(out)
}

pub fn load_barriers(path: impl AsRef<Path>) -> Result<BTreeMap<u64, BarrierFlags>, DataError> {
    read_barriers(open(path.as_ref())?)
}

pub fn write_barriers<W: Write>(rows: &[(u64, BarrierFlags)], writer: W) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["household_id"];
    header.extend(BARRIER_COLUMNS);
    w.write_record(&header)?;
    for (id, flags) in rows {
        let mut rec = vec![id.to_string()];
        rec.extend(flags.iter().map(|&b| if b { "1" } else { "0" }.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn save_barriers(rows: &[(u64, BarrierFlags)], path: impl AsRef<Path>) -> Result<(), DataError> {
    write_barriers(rows, create(path.as_ref())?)
}

/// Weights on personal benefit, community rate and neighbour share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityWeights<T> {
    pub personal: T,
    pub community: T,
    pub neighbors: T,
}

impl Default for UtilityWeights<f64> {
    fn default() -> Self {
        UtilityWeights {
            personal: 0.4,
            community: 0.3,
            neighbors: 0.3,
        }
    }
}

impl<T: Scalar> UtilityWeights<T> {
    pub fn validate(&self) -> Result<()> {
        let w = [self.personal, self.community, self.neighbors];
        let sum: T = w.iter().copied().sum();
        if w.iter().any(|&x| !(x >= T::zero() && x <= T::one())) || (sum - T::one()).abs() > crate::scalar::lit(1e-9) {
            return Err(Error::Config(format!(
                "utility weights must lie in [0, 1] and sum to 1, got {w:?}"
            )));
        }
        Ok(())
    }
}

pub fn utility<T: Scalar>(p: T, c: T, n: T, w: &UtilityWeights<T>) -> T {
    w.personal * p + w.community * c + w.neighbors * n
}

/// Policy scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Case {
    C1a,
    C1b,
    C2a,
    C2b,
    C3,
    C4,
    C5,
}

impl Case {
    pub const ALL: [Case; 7] = [Case::C1a, Case::C1b, Case::C2a, Case::C2b, Case::C3, Case::C4, Case::C5];

    pub fn label(self) -> &'static str {
        match self {
            Case::C1a => "1a",
            Case::C1b => "1b",
            Case::C2a => "2a",
            Case::C2b => "2b",
            Case::C3 => "3",
            Case::C4 => "4",
            Case::C5 => "5",
        }
    }

    pub fn uses_rebates(self) -> bool {
        matches!(self, Case::C4 | Case::C5)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.label() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown case {s:?}; expected one of 1a,1b,2a,2b,3,4,5")))
    }
}

/// LMI node probability per step in case 3; later steps keep the last value.
pub const CASE3_LMI_SCHEDULE: [f64; 10] = [0.3, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5];

/// Upper bound of the rebate-binned node probability.
pub const REBATE_MAX_PROB: f64 = 0.1;
pub const REBATE_BINS: usize = 10;

/// Node probability for the fixed-rate cases at a 1-based `step`.
/// Rebate cases have no fixed rate and return `None`.
pub fn fixed_node_probability(case: Case, lmi: bool, step: usize) -> Option<f64> {
    Some(match (case, lmi) {
        (Case::C1a, _) => 0.1,
        (Case::C1b, _) => 0.2,
        (Case::C2a, false) | (Case::C2b, false) | (Case::C3, false) => 0.1,
        (Case::C2a, true) => 0.2,
        (Case::C2b, true) => 0.5,
        (Case::C3, true) => CASE3_LMI_SCHEDULE[step.clamp(1, CASE3_LMI_SCHEDULE.len()) - 1],
        (Case::C4, _) | (Case::C5, _) => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RebateParams {
    pub capacity_factor: f64,
    pub cost_per_watt: f64,
    pub credit_rate: f64,
    /// Added to the credit rate for LMI households in case 5.
    pub lmi_extra: f64,
}

impl Default for RebateParams {
    fn default() -> Self {
        RebateParams {
            capacity_factor: 0.15,
            cost_per_watt: 3.04,
            credit_rate: 0.30,
            lmi_extra: 0.20,
        }
    }
}

/// Rebate in dollars for a system sized to produce `annual_kwh`.
pub fn rebate_value(annual_kwh: f64, cost_per_watt: f64, credit_rate: f64, capacity_factor: f64) -> f64 {
    let watts = annual_kwh * 1000.0 / (capacity_factor * 8760.0);
    credit_rate * cost_per_watt * watts
}

/// Ranks rebates ascending (ties by position) into equal-population bins and
/// maps bin `k` of 10 to probability `k / 10 * 0.1`.
pub fn rebate_bin_probabilities(rebates: &[f64]) -> Vec<f64> {
    let n = rebates.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rebates[a].total_cmp(&rebates[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        let bin = rank * REBATE_BINS / n + 1;
        out[i] = bin as f64 / REBATE_BINS as f64 * REBATE_MAX_PROB;
    }
    out
}

/// Min-max normalization to `[0, 1]`; a constant input maps to 0.5.
pub fn normalize_benefit(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Per-household inputs in network-node order.
#[derive(Debug, Clone, PartialEq)]
pub struct Agents {
    pub ids: Vec<u64>,
    pub county: Vec<usize>,
    pub n_counties: usize,
    pub lmi: Vec<bool>,
    pub rural: Vec<bool>,
    pub threshold: Vec<f64>,
    /// Normalized personal benefit.
    pub benefit: Vec<f64>,
    /// Expected yearly PV generation, used for rebates.
    pub annual_kwh: Vec<f64>,
    pub initial: Vec<bool>,
}

impl Agents {
    /// `daily_kwh` holds each household's mean daily generation; `barriers`
    /// falls back to [`proxy_barriers`] for absent households.
    pub fn new(
        pop: &HouseholdTable,
        barriers: &BTreeMap<u64, BarrierFlags>,
        daily_kwh: &BTreeMap<u64, f64>,
        initial: &BTreeSet<u64>,
    ) -> Result<Self> {
        let mut counties = BTreeMap::new();
        for h in pop.iter() {
            let next = counties.len();
            counties.entry(h.county.as_str()).or_insert(next);
        }
        let mut daily = Vec::with_capacity(pop.len());
        for h in pop.iter() {
            let v = *daily_kwh.get(&h.id).ok_or(Error::MissingField {
                what: "daily generation",
                id: h.id,
            })?;
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "daily generation {v} for household {}",
                    h.id
                )));
            }
            daily.push(v);
        }
        if let Some(id) = initial.iter().find(|id| !pop.iter().any(|h| h.id == **id)) {
            return Err(Error::InvalidInput(format!(
                "initial adopter {id} is not in the population"
            )));
        }
        Ok(Agents {
            ids: pop.iter().map(|h| h.id).collect(),
            county: pop.iter().map(|h| counties[h.county.as_str()]).collect(),
            n_counties: counties.len(),
            lmi: pop.iter().map(|h| h.lmi == Some(true)).collect(),
            rural: pop.iter().map(|h| h.rural == Some(true)).collect(),
            threshold: pop
                .iter()
                .map(|h| threshold_from_barriers(&barriers.get(&h.id).copied().unwrap_or_else(|| proxy_barriers(h))))
                .collect(),
            benefit: normalize_benefit(&daily),
            annual_kwh: daily.iter().map(|d| d * 365.0).collect(),
            initial: pop.iter().map(|h| initial.contains(&h.id)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionConfig {
    pub weights: UtilityWeights<f64>,
    pub time_steps: usize,
    pub iterations: usize,
    pub case: Case,
    pub rebate: RebateParams,
    pub seed: u64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            weights: UtilityWeights::default(),
            time_steps: 10,
            iterations: 1,
            case: Case::C1a,
            rebate: RebateParams::default(),
            seed: 42,
        }
    }
}

impl DiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        let r = &self.rebate;
        if !(r.capacity_factor > 0.0 && r.cost_per_watt > 0.0 && r.credit_rate >= 0.0 && r.lmi_extra >= 0.0) {
            return Err(Error::Config(format!("invalid rebate parameters {r:?}")));
        }
        Ok(())
    }
}

/// Node probabilities for a case, evaluated per step.
pub struct NodeProbabilities<'a> {
    case: Case,
    lmi: &'a [bool],
    binned: Option<Vec<f64>>,
}

impl<'a> NodeProbabilities<'a> {
    pub fn new(case: Case, agents: &'a Agents, rebate: &RebateParams) -> Self {
        let binned = case.uses_rebates().then(|| {
            let rebates: Vec<f64> = agents
                .annual_kwh
                .iter()
                .zip(&agents.lmi)
                .map(|(&kwh, &lmi)| {
                    let rate = rebate.credit_rate + if case == Case::C5 && lmi { rebate.lmi_extra } else { 0.0 };
                    rebate_value(kwh, rebate.cost_per_watt, rate, rebate.capacity_factor)
                })
                .collect();
            rebate_bin_probabilities(&rebates)
        });
        NodeProbabilities {
            case,
            lmi: &agents.lmi,
            binned,
        }
    }

    pub fn get(&self, node: usize, step: usize) -> f64 {
        match &self.binned {
            Some(b) => b[node],
            None => fixed_node_probability(self.case, self.lmi[node], step).unwrap_or(0.0),
        }
    }
}

/// Adoption counts after a step, split by LMI status and rurality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepCounts {
    pub step: usize,
    pub total: usize,
    pub lmi_rural: usize,
    pub lmi_urban: usize,
    pub nonlmi_rural: usize,
    pub nonlmi_urban: usize,
}

impl StepCounts {
    pub fn tally(step: usize, adopted: &[bool], agents: &Agents) -> Self {
        let mut c = StepCounts {
            step,
            ..StepCounts::default()
        };
        for i in (0..adopted.len()).filter(|&i| adopted[i]) {
            c.total += 1;
            match (agents.lmi[i], agents.rural[i]) {
                (true, true) => c.lmi_rural += 1,
                (true, false) => c.lmi_urban += 1,
                (false, true) => c.nonlmi_rural += 1,
                (false, false) => c.nonlmi_urban += 1,
            }
        }
        c
    }

    pub fn lmi(&self) -> usize {
        self.lmi_rural + self.lmi_urban
    }
}

/// Adopted share per county.
pub fn county_rates(adopted: &[bool], agents: &Agents) -> Vec<f64> {
    let mut num = vec![0usize; agents.n_counties];
    let mut den = vec![0usize; agents.n_counties];
    for (i, &a) in adopted.iter().enumerate() {
        den[agents.county[i]] += 1;
        num[agents.county[i]] += usize::from(a);
    }
    num.iter()
        .zip(&den)
        .map(|(&a, &n)| if n == 0 { 0.0 } else { a as f64 / n as f64 })
        .collect()
}

/// One synchronous update at 1-based `step` of run `iteration`.
pub fn step(
    adopted: &[bool],
    agents: &Agents,
    adj: &Adjacency,
    cfg: &DiffusionConfig,
    probs: &NodeProbabilities,
    step: usize,
    iteration: usize,
) -> Vec<bool> {
    let rates = county_rates(adopted, agents);
    let w = &cfg.weights;
    (0..adopted.len())
        .into_par_iter()
        .map(|i| {
            if adopted[i] {
                return true;
            }
            let gate = uniform_at(cfg.seed, Purpose::Diffusion, iteration as u64, step as u64, i as u64);
            if gate >= probs.get(i, step) {
                return false;
            }
            let nb = adj.neighbors(i);
            let share = if nb.is_empty() {
                0.0
            } else {
                nb.iter().filter(|&&j| adopted[j as usize]).count() as f64 / nb.len() as f64
            };
            utility(agents.benefit[i], rates[agents.county[i]], share, w) > agents.threshold[i]
        })
        .collect()
}

/// One run of the simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    /// Counts for the initial state (step 0) and after every step.
    pub counts: Vec<StepCounts>,
    pub final_adopted: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub case: Case,
    pub runs: Vec<Run>,
}

impl Simulation {
    /// Mean counts over runs, per step.
    pub fn mean_counts(&self) -> Vec<[f64; 5]> {
        let steps = self.runs[0].counts.len();
        let r = self.runs.len() as f64;
        (0..steps)
            .map(|s| {
                let mut m = [0.0; 5];
                for run in &self.runs {
                    let c = &run.counts[s];
                    let v = [c.total, c.lmi_rural, c.lmi_urban, c.nonlmi_rural, c.nonlmi_urban];
                    for k in 0..5 {
                        m[k] += v[k] as f64 / r;
                    }
                }
                m
            })
            .collect()
    }
}

pub fn simulate(agents: &Agents, graph: &Graph, cfg: &DiffusionConfig) -> Result<Simulation> {
    cfg.validate()?;
    if graph.node_count != agents.len() {
        return Err(Error::InvalidInput(format!(
            "network has {} nodes but the population has {} households",
            graph.node_count,
            agents.len()
        )));
    }
    let adj = graph.adjacency();
    let probs = NodeProbabilities::new(cfg.case, agents, &cfg.rebate);
    let runs = (0..cfg.iterations)
        .map(|it| {
            let mut adopted = agents.initial.clone();
            let mut counts = vec![StepCounts::tally(0, &adopted, agents)];
            for s in 1..=cfg.time_steps {
                adopted = step(&adopted, agents, &adj, cfg, &probs, s, it);
                counts.push(StepCounts::tally(s, &adopted, agents));
            }
            Run {
                counts,
                final_adopted: adopted,
            }
        })
        .collect();
    Ok(Simulation { case: cfg.case, runs })
}

/// `adoption_timeline.csv`; counts are averaged when a case has several runs.
pub fn write_timeline<W: Write>(sims: &[Simulation], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let data = |e: csv::Error| Error::Data(DataError::from(e));
    w.write_record([
        "case",
        "step",
        "total_adopters",
        "lmi_rural",
        "lmi_urban",
        "nonlmi_rural",
        "nonlmi_urban",
    ])
    .map_err(data)?;
    for sim in sims {
        for (s, m) in sim.mean_counts().iter().enumerate() {
            let mut rec = vec![sim.case.to_string(), s.to_string()];
            rec.extend(m.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(data)?;
        }
    }
    w.flush().map_err(|e| data(e.into()))?;
    Ok(())
}

pub fn save_timeline(sims: &[Simulation], path: impl AsRef<Path>) -> Result<()> {
    write_timeline(sims, create(path.as_ref())?)
}
