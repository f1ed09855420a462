//! One function per pipeline stage. Each reads its inputs from disk and
//! writes its artifacts, so stages can be run on their own.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use log::info;

use solartwin_core::boost::{
    save_model, GbtParams, Logistic, MajorityBaseline, OneVsRest, ProbabilisticClassifier, VotingEnsemble,
};
use solartwin_core::calibrate::{calibrate, save_trace, CalibrateConfig};
use solartwin_core::data::{
    load_households, load_irradiance_dir, load_network, load_targets, save_households, save_irradiance, save_network,
    save_targets, AdopterTarget, FeatureDomains, HouseholdTable,
};
use solartwin_core::diffusion::{
    load_barriers, save_barriers, save_timeline, simulate, Agents, Case, DiffusionConfig, RebateParams, UtilityWeights,
};
use solartwin_core::metrics::{aggregate_monthly, jsd_histogram, jsd_kde, pearson_monthly, relative_pct_diff};
use solartwin_core::preprocess::{
    correlation_matrix, load_dataset, max_abs_diff, random_oversample, save_dataset, smoten_oversample, LabelColumn,
    LabeledDataset,
};
use solartwin_core::pv::{
    generate_profiles, read_daily, read_hourly, time_invariant_set, write_daily, write_hourly, write_time_invariant,
    Period, PvConfig, Selection,
};
use solartwin_core::rng::{derive_seed, Purpose};
use solartwin_core::sqft::{SqftClasses, SqftEstimator};
use solartwin_core::toygen::{gen_barriers, gen_irradiance, gen_network, gen_population, ToyConfig};
use solartwin_core::Profiles;

use crate::config::RunConfig;

/// An upstream file a stage needs is absent.
#[derive(Debug)]
pub struct MissingArtifact(pub PathBuf);

impl std::fmt::Display for MissingArtifact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "missing input file {}", self.0.display())
    }
}

impl std::error::Error for MissingArtifact {}

fn need(path: &Path) -> Result<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(MissingArtifact(path.to_path_buf()).into())
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> solartwin_core::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    fs::write(path, buf).with_context(|| format!("cannot write {}", path.display()))
}

/// Resolved settings shared by every stage.
pub struct Ctx {
    pub cfg: RunConfig,
    pub period: Period,
    pub cases: Vec<Case>,
}

impl Ctx {
    pub fn new(cfg: RunConfig, period: Option<Period>, case: Option<Case>) -> Result<Self> {
        let period = match period {
            Some(p) => p,
            None => cfg.pv.period.parse()?,
        };
        let cases = match case {
            Some(c) => vec![c],
            None => cfg
                .diffusion
                .cases
                .iter()
                .map(|c| c.parse())
                .collect::<solartwin_core::Result<_>>()?,
        };
        if cfg.workers == 0 {
            bail!(solartwin_core::Error::Config("workers must be >= 1".into()));
        }
        cfg.pv.to_core().validate()?;
        Ok(Ctx { cfg, period, cases })
    }

    fn pv(&self) -> PvConfig {
        self.cfg.pv.to_core()
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.paths.out(name)
    }

    fn domains(&self) -> FeatureDomains {
        FeatureDomains::default()
    }
}

fn strip_labels(table: &HouseholdTable) -> Result<HouseholdTable> {
    let records = table
        .iter()
        .map(|h| {
            let mut h = h.clone();
            h.sqft_class = None;
            h.sqft_value = None;
            h.solar = None;
            h
        })
        .collect();
    Ok(HouseholdTable::new(records)?)
}

fn profile_files(dir: &Path, period: &Period) -> (PathBuf, PathBuf) {
    let label = period.label();
    (
        dir.join(format!("profiles_{label}.csv")),
        dir.join(format!("daily_{label}.csv")),
    )
}

fn write_profiles(set: &Profiles, dir: &Path, period: &Period) -> Result<()> {
    let (hourly, daily) = profile_files(dir, period);
    write_file(&hourly, |b| write_hourly(set, b))?;
    write_file(&daily, |b| write_daily(set, b))
}

pub fn cmd_toygen(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.toygen;
    let paths = &ctx.cfg.paths;
    let start = NaiveDate::parse_from_str(&c.start_date, "%Y-%m-%d")
        .map_err(|_| solartwin_core::Error::Config(format!("invalid toygen start_date {:?}", c.start_date)))?;
    let toy = ToyConfig {
        n_households: c.households,
        n_tracts: c.tracts,
        tracts_per_county: c.tracts_per_county,
        adopter_fraction: c.adopter_fraction,
        lmi_fraction: c.lmi_fraction,
        rural_fraction: c.rural_fraction,
        signal_shift: c.signal_shift,
        start_date: start,
        days: c.days,
        state: c.state.clone(),
        seed: ctx.cfg.seed,
        ..ToyConfig::default()
    };
    ensure_dir(&paths.data_dir)?;
    let truth = gen_population(&toy)?;
    save_households(&truth, paths.truth())?;
    save_households(&strip_labels(&truth)?, paths.population())?;

    let survey_cfg = ToyConfig {
        n_households: c.survey_households,
        seed: derive_seed(ctx.cfg.seed, Purpose::Population, 1),
        ..toy.clone()
    };
    save_households(&gen_population(&survey_cfg)?, paths.survey())?;

    let adopters = truth.iter().filter(|h| h.solar == Some(true)).count() as u64;
    save_targets(
        &[AdopterTarget {
            state: toy.state.clone(),
            count: adopters,
        }],
        paths.targets(),
    )?;

    let irr_dir = paths.irradiance_dir();
    ensure_dir(&irr_dir)?;
    for t in 0..toy.n_tracts {
        save_irradiance(&gen_irradiance(&toy, t)?, &irr_dir)?;
    }
    save_network(
        &gen_network(truth.len(), c.edge_prob, c.network_groups, ctx.cfg.seed)?,
        paths.network(),
    )?;
    save_barriers(&gen_barriers(&truth, ctx.cfg.seed), paths.barriers())?;

    // Stand-in for measured generation: the planted adopters under an independent seed.
    let irr = load_irradiance_dir(&irr_dir)?;
    let reference: Profiles = generate_profiles(
        &truth,
        &irr,
        &ctx.period.dates(),
        &ctx.pv(),
        Selection::Adopters,
        ctx.cfg.workers,
        ctx.cfg.seed.wrapping_add(1),
    )?;
    let ref_dir = paths.reference_dir();
    ensure_dir(&ref_dir)?;
    write_profiles(&reference, &ref_dir, &ctx.period)?;
    info!(
        "toygen: {} households, {adopters} adopters, {} tracts",
        truth.len(),
        toy.n_tracts
    );
    Ok(())
}

fn correlation_rows(name: &str, before: &LabeledDataset, after: &LabeledDataset, out: &mut Vec<String>) -> Result<f64> {
    let a: Vec<Vec<f64>> = correlation_matrix(before, true)?;
    let b: Vec<Vec<f64>> = correlation_matrix(after, true)?;
    let names: Vec<&str> = solartwin_core::data::Feature::ALL
        .iter()
        .map(|f| f.name())
        .chain(["label"])
        .collect();
    for i in 0..a.len() {
        for j in 0..a.len() {
            out.push(format!("{name},{},{},{},{}", names[i], names[j], a[i][j], b[i][j]));
        }
    }
    Ok(max_abs_diff(&a, &b))
}

/// Which preprocess outputs to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PreprocessAction {
    /// Balanced training sets only.
    Smoten,
    /// Association matrices before and after balancing only.
    Corr,
    All,
}

pub fn cmd_preprocess(ctx: &Ctx, action: PreprocessAction) -> Result<()> {
    let paths = &ctx.cfg.paths;
    let survey = load_households(need(&paths.survey())?)?;
    ensure_dir(&paths.output_dir)?;
    let mut rows = vec!["dataset,feature_a,feature_b,before,after".to_string()];
    for (name, column, file) in [
        ("solar", LabelColumn::Solar, "train_solar.csv"),
        ("sqft", LabelColumn::SqftClass, "train_sqft.csv"),
    ] {
        let raw = LabeledDataset::from_households(&survey, column, &ctx.domains())?;
        if raw.is_empty() {
            bail!(solartwin_core::Error::InvalidInput(format!(
                "survey has no {name} labels"
            )));
        }
        let seed = derive_seed(ctx.cfg.seed, Purpose::Oversample, 0);
        let balanced = if ctx.cfg.preprocess.random_oversample {
            random_oversample(&raw, seed)?
        } else {
            smoten_oversample(&raw, ctx.cfg.preprocess.k, seed)?
        };
        if action != PreprocessAction::Corr {
            save_dataset(&balanced, ctx.out(file))?;
        }
        if action != PreprocessAction::Smoten {
            let diff = correlation_rows(name, &raw, &balanced, &mut rows)?;
            info!("preprocess {name}: max |dV| = {diff:.4}");
        }
        info!("preprocess {name}: {} -> {} rows", raw.len(), balanced.len());
    }
    if action != PreprocessAction::Smoten {
        rows.push(String::new());
        fs::write(ctx.out("correlation.csv"), rows.join("\n")).context("cannot write correlation.csv")?;
    }
    Ok(())
}

fn sqft_ensemble(data: &LabeledDataset, n_classes: usize, rounds: usize) -> Result<VotingEnsemble> {
    let member = |max_depth, learning_rate| -> Result<Box<dyn ProbabilisticClassifier>> {
        let params = GbtParams {
            rounds,
            max_depth,
            learning_rate,
            ..GbtParams::default()
        };
        Ok(Box::new(OneVsRest::<f64>::train(data, n_classes, &params, &Logistic)?))
    };
    Ok(VotingEnsemble::new(vec![
        member(3, 0.3)?,
        member(4, 0.2)?,
        member(2, 0.5)?,
        Box::new(MajorityBaseline::train(data, n_classes)?),
    ])?)
}

pub fn cmd_classify_sqft(ctx: &Ctx) -> Result<()> {
    let train = load_dataset(need(&ctx.out("train_sqft.csv"))?, &ctx.domains())?;
    let pop = load_households(need(&ctx.cfg.paths.population())?)?;
    let classes = SqftClasses::new(ctx.cfg.sqft.bounds.clone())?;
    let ensemble = sqft_ensemble(&train, classes.n_classes(), ctx.cfg.sqft.rounds)?;
    let records = pop
        .iter()
        .map(|h| {
            let mut h = h.clone();
            h.sqft_class = Some(ensemble.predict(&h.features)? as u8);
            Ok(h)
        })
        .collect::<solartwin_core::Result<Vec<_>>>()?;
    save_households(&HouseholdTable::new(records)?, ctx.out("households_classified.csv"))?;
    info!("classify-sqft: {} households", pop.len());
    Ok(())
}

pub fn cmd_estimate_sqft(ctx: &Ctx) -> Result<()> {
    let s = &ctx.cfg.sqft;
    let pop = load_households(need(&ctx.out("households_classified.csv"))?)?;
    let survey = load_households(need(&ctx.cfg.paths.survey())?)?;
    let values: Vec<f64> = survey.iter().filter_map(|h| h.sqft_value).collect();
    let est = SqftEstimator::from_survey(
        SqftClasses::new(s.bounds.clone())?,
        &values,
        s.subclasses,
        s.draws_m,
        s.draws_l,
        s.uniform_fallback,
    )?;
    let records = pop
        .iter()
        .map(|h| {
            let class = h.sqft_class.ok_or(solartwin_core::Error::MissingField {
                what: "sqft_class",
                id: h.id,
            })?;
            let mut h = h.clone();
            let v = est.estimate(class as usize, ctx.cfg.seed, h.id)?;
            h.sqft_value = Some((v * 10.0).round() / 10.0);
            Ok(h)
        })
        .collect::<solartwin_core::Result<Vec<_>>>()?;
    save_households(&HouseholdTable::new(records)?, ctx.out("households_sqft.csv"))?;
    info!("estimate-sqft: {} households", pop.len());
    Ok(())
}

pub fn cmd_calibrate(ctx: &Ctx) -> Result<()> {
    let c = &ctx.cfg.calibrate;
    let train = load_dataset(need(&ctx.out("train_solar.csv"))?, &ctx.domains())?;
    let pop = load_households(need(&ctx.out("households_sqft.csv"))?)?;
    let targets = load_targets(need(&ctx.cfg.paths.targets())?)?;
    if targets.is_empty() {
        bail!(solartwin_core::Error::InvalidInput(
            "targets file lists no states".into()
        ));
    }
    let cal = CalibrateConfig {
        budget: c.budget,
        init: c.init,
        seed: ctx.cfg.seed,
        gbt: GbtParams {
            rounds: c.rounds,
            max_depth: c.max_depth,
            learning_rate: c.learning_rate,
            ..GbtParams::default()
        },
    };
    let single = targets.len() == 1;
    let mut flags: BTreeMap<u64, bool> = BTreeMap::new();
    let mut summary = vec!["state,beta,tau,target,discrepancy,rounds,converged".to_string()];
    for t in &targets {
        let r = calibrate(&train, &pop, t, &cal)?;
        let suffix = if single { String::new() } else { format!("_{}", t.state) };
        save_trace(&r.trace, &ctx.out(&format!("calibration_trace{suffix}.csv")))?;
        save_model(&r.model, &ctx.out(&format!("solar_model{suffix}.gbt")))?;
        for h in pop.iter().filter(|h| h.state == t.state) {
            flags.insert(h.id, r.model.predict_proba(&h.features)? >= r.tau_star);
        }
        summary.push(format!(
            "{},{:.2},{:.2},{},{},{},{}",
            t.state, r.beta_star, r.tau_star, t.count, r.discrepancy, r.rounds_used, r.converged
        ));
        info!(
            "calibrate {}: beta {:.2} tau {:.2} discrepancy {} after {} rounds",
            t.state, r.beta_star, r.tau_star, r.discrepancy, r.rounds_used
        );
    }
    let records = pop
        .iter()
        .map(|h| {
            let mut h = h.clone();
            h.solar = flags.get(&h.id).copied();
            h
        })
        .collect();
    save_households(&HouseholdTable::new(records)?, ctx.out("households_solar.csv"))?;
    summary.push(String::new());
    fs::write(ctx.out("calibration.csv"), summary.join("\n")).context("cannot write calibration.csv")?;
    Ok(())
}

pub fn cmd_generate(ctx: &Ctx) -> Result<()> {
    let pop = load_households(need(&ctx.out("households_solar.csv"))?)?;
    let irr = load_irradiance_dir(need(&ctx.cfg.paths.irradiance_dir())?)?;
    let pv = ctx.pv();
    let set: Profiles = generate_profiles(
        &pop,
        &irr,
        &ctx.period.dates(),
        &pv,
        Selection::Adopters,
        ctx.cfg.workers,
        ctx.cfg.seed,
    )?;
    write_profiles(&set, &ctx.cfg.paths.output_dir, &ctx.period)?;
    let samples = time_invariant_set::<f64>(&pop, &pv, Selection::Adopters, ctx.cfg.seed)?;
    write_file(&ctx.out("time_invariant.csv"), |b| write_time_invariant(&samples, b))?;
    info!("generate: {} household-days for {}", set.profiles.len(), ctx.period);
    Ok(())
}

pub fn cmd_validate(ctx: &Ctx) -> Result<()> {
    let v = &ctx.cfg.validate;
    let (syn_hourly, syn_daily) = profile_files(&ctx.cfg.paths.output_dir, &ctx.period);
    let (ref_hourly, ref_daily) = profile_files(&ctx.cfg.paths.reference_dir(), &ctx.period);
    let open = |p: &Path| -> Result<fs::File> { Ok(fs::File::open(need(p)?)?) };
    let syn = read_daily(open(&syn_daily)?)?;
    let reference = read_daily(open(&ref_daily)?)?;
    let pop = load_households(need(&ctx.out("households_solar.csv"))?)?;
    let targets = load_targets(need(&ctx.cfg.paths.targets())?)?;

    let mut rows = vec!["metric,scope,value".to_string()];
    let fmt = |x: Option<f64>| x.map_or("NA".to_string(), |v| v.to_string());

    // Household mean daily generation, synthetic against reference.
    let per_household = |rows: &[solartwin_core::pv::DailyRow]| -> (Vec<f64>, Vec<f64>) {
        let mut acc: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
        for r in rows {
            let e = acc.entry(r.household).or_default();
            e.0 += r.mean_kwh;
            e.1 += r.std_kwh;
            e.2 += 1;
        }
        acc.values().map(|(m, s, n)| (m / *n as f64, s / *n as f64)).unzip()
    };
    let (syn_mean, syn_std) = per_household(&syn);
    let (ref_mean, _) = per_household(&reference);
    let scope = targets.first().map_or("all".to_string(), |t| {
        if targets.len() == 1 {
            t.state.clone()
        } else {
            "all".into()
        }
    });
    if syn_mean.is_empty() || ref_mean.is_empty() {
        bail!(solartwin_core::Error::InvalidInput("no profiles to compare".into()));
    }
    rows.push(format!(
        "jsd_histogram,{scope},{}",
        jsd_histogram(&syn_mean, &ref_mean, v.bins)?
    ));
    let kde = jsd_kde(&syn_mean, &ref_mean, Some(&syn_std), v.kde_grid).ok();
    rows.push(format!("jsd_kde,{scope},{}", fmt(kde)));

    // Monthly load shape of the average adopter.
    let hourly = |p: &Path| -> Result<Vec<(NaiveDate, u32, f64)>> {
        let rows = read_hourly(open(p)?)?;
        let n = rows.iter().map(|r| r.household).collect::<BTreeSet<_>>().len().max(1) as f64;
        let mut sum: BTreeMap<(NaiveDate, u32), f64> = BTreeMap::new();
        for r in rows {
            *sum.entry((r.date, r.hour)).or_default() += r.mean_kwh / n;
        }
        Ok(sum.into_iter().map(|((d, h), v)| (d, h, v)).collect())
    };
    let corr = pearson_monthly(
        &aggregate_monthly(&hourly(&syn_hourly)?)?,
        &aggregate_monthly(&hourly(&ref_hourly)?)?,
    )?;
    for (m, r) in corr {
        rows.push(format!("pearson_monthly,month-{m:02},{}", fmt(r)));
    }

    for t in &targets {
        let synth = pop
            .iter()
            .filter(|h| h.state == t.state && h.solar == Some(true))
            .count();
        let d = relative_pct_diff(t.count as f64, synth as f64).ok();
        rows.push(format!("adopters_real,{},{}", t.state, t.count));
        rows.push(format!("adopters_synthetic,{},{synth}", t.state));
        rows.push(format!("adopters_relative_pct_diff,{},{}", t.state, fmt(d)));
    }
    rows.push(String::new());
    fs::write(ctx.out("metrics.csv"), rows.join("\n")).context("cannot write metrics.csv")?;
    info!("validate: wrote {} metrics", rows.len() - 2);
    Ok(())
}

pub fn cmd_simulate(ctx: &Ctx) -> Result<()> {
    let d = &ctx.cfg.diffusion;
    let paths = &ctx.cfg.paths;
    let pop = load_households(need(&ctx.out("households_solar.csv"))?)?;
    let graph = load_network(need(&paths.network())?)?;
    let barriers = if paths.barriers().exists() {
        load_barriers(paths.barriers())?
    } else {
        log::warn!(
            "{} not found; deriving barriers from household records",
            paths.barriers().display()
        );
        BTreeMap::new()
    };
    let irr = load_irradiance_dir(need(&paths.irradiance_dir())?)?;
    let potential: Profiles = generate_profiles(
        &pop,
        &irr,
        &ctx.period.dates(),
        &ctx.pv(),
        Selection::All,
        ctx.cfg.workers,
        ctx.cfg.seed,
    )?;
    let mut daily: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for p in &potential.profiles {
        let e = daily.entry(p.household).or_default();
        e.0 += p.daily_mean;
        e.1 += 1;
    }
    let daily: BTreeMap<u64, f64> = daily.into_iter().map(|(id, (s, n))| (id, s / n as f64)).collect();
    let initial: BTreeSet<u64> = pop.iter().filter(|h| h.solar == Some(true)).map(|h| h.id).collect();
    let agents = Agents::new(&pop, &barriers, &daily, &initial)?;
    let sims = ctx
        .cases
        .iter()
        .map(|&case| {
            let cfg = DiffusionConfig {
                weights: UtilityWeights {
                    personal: d.weights[0],
                    community: d.weights[1],
                    neighbors: d.weights[2],
                },
                time_steps: d.time_steps,
                iterations: d.iterations,
                case,
                rebate: RebateParams {
                    capacity_factor: d.capacity_factor,
                    cost_per_watt: d.cost_per_watt,
                    credit_rate: d.credit_rate,
                    lmi_extra: d.lmi_extra,
                },
                seed: ctx.cfg.seed,
            };
            let s = simulate(&agents, &graph, &cfg)?;
            info!(
                "simulate case {case}: {} -> {} adopters",
                s.runs[0].counts[0].total,
                s.runs[0].counts.last().map_or(0, |c| c.total)
            );
            Ok(s)
        })
        .collect::<solartwin_core::Result<Vec<_>>>()?;
    save_timeline(&sims, ctx.out("adoption_timeline.csv"))?;
    Ok(())
}

pub fn cmd_pipeline(ctx: &Ctx) -> Result<()> {
    ensure_dir(&ctx.cfg.paths.output_dir)?;
    cmd_toygen(ctx)?;
    cmd_preprocess(ctx, PreprocessAction::All)?;
    cmd_classify_sqft(ctx)?;
    cmd_estimate_sqft(ctx)?;
    cmd_calibrate(ctx)?;
    cmd_generate(ctx)?;
    cmd_validate(ctx)?;
    cmd_simulate(ctx)
}
