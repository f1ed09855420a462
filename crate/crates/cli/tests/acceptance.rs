//! Acceptance checks. Runs as a plain binary so every PASS/FAIL line shows up
//! in `cargo test` output; exits nonzero if any check fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use solartwin_core::boost::{loss_grad_hess, sigmoid, train_gbt, GbtParams, Logistic, WeightedLogLoss};
use solartwin_core::calibrate::{
    calibrate, expected_improvement, gp_fit, gp_predict, CalibrateConfig, GpKernel, TOLERANCE,
};
use solartwin_core::data::{AdopterTarget, FeatureDomains, HouseholdTable};
use solartwin_core::diffusion::{fixed_node_probability, simulate, Agents, Case, DiffusionConfig};
use solartwin_core::metrics::{jsd, pearson_monthly, relative_pct_diff, scott_factor, DiscreteDistribution};
use solartwin_core::preprocess::{correlation_matrix, max_abs_diff, smoten_oversample, LabelColumn, LabeledDataset};
use solartwin_core::pv::{
    declination, generate_profiles, tilt_factor, tilted_radiation, write_daily, write_hourly, Azimuth,
    DegradationTable, PvConfig, Selection,
};
use solartwin_core::rng::{derive_seed, stream, uniform_at, Purpose};
use solartwin_core::sqft::{estimate_sqft, SubclassWeights};
use solartwin_core::toygen::{gen_barriers, gen_irradiance, gen_network, gen_population, tracts, ToyConfig};
use solartwin_core::Profiles;

const LOSS_REL_TOL: f64 = 1e-6;
const LOSS_BUDGET: Duration = Duration::from_secs(5);
const CAL_SEEDS: u64 = 10;
const CAL_MIN_CONVERGED: usize = 9;
const CAL_BUDGET: Duration = Duration::from_secs(600);
const EI_TOL: f64 = 1e-6;
const GP_INTERP_TOL: f64 = 1e-9;
const SQFT_EXPECTED: f64 = 1416.7;
const SQFT_TOL: f64 = 5.0;
const SQFT_CONFIGS: usize = 10_000;
const TILT_EXPECTED: f64 = 628.3;
const TILT_TOL: f64 = 0.1;
const DECL_TOL: f64 = 0.05;
const PROFILE_ID_TOL: f64 = 1e-9;
const PROFILE_BUDGET: Duration = Duration::from_secs(120);
const RPD_EXPECTED: f64 = 445.2;
const RPD_TOL: f64 = 0.1;
const DIFFUSION_BUDGET: Duration = Duration::from_secs(300);
const CRAMER_TOL: f64 = 0.15;
const PIPELINE_BUDGET: Duration = Duration::from_secs(900);

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= budget, format!("took {t:.1?}, budget {budget:?}"))
}

fn loss_at(y: usize, z: f64, beta: f64) -> f64 {
    let p = 1.0 / (1.0 + (-z).exp());
    if y == 1 {
        -p.ln()
    } else {
        -beta * (1.0 - p).ln()
    }
}

fn criterion_loss() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for y in [0, 1] {
        for i in 0..10 {
            let p = 0.05 + 0.1 * i as f64;
            let z = (p / (1.0 - p)).ln();
            for beta in [0.25, 0.5, 1.0, 1.5, 2.0] {
                let f = |z| loss_at(y, z, beta);
                let d1 = |h: f64| (f(z + h) - f(z - h)) / (2.0 * h);
                let d2 = |h: f64| (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
                let fg = (4.0 * d1(5e-4) - d1(1e-3)) / 3.0;
                let fh = (16.0 * d2(5e-4) - d2(1e-3)) / 15.0;
                let (g, h) = loss_grad_hess(y, sigmoid(z), beta);
                worst = worst.max((g - fg).abs() / fg.abs()).max((h - fh).abs() / fh.abs());
            }
        }
    }
    ensure(worst <= LOSS_REL_TOL, format!("worst relative error {worst:e}"))?;

    let survey = gen_population(&ToyConfig::default()).map_err(|e| e.to_string())?;
    let data = LabeledDataset::from_households(&survey, LabelColumn::Solar, &FeatureDomains::default())
        .map_err(|e| e.to_string())?;
    let params = GbtParams::default();
    let a = train_gbt::<f64, _>(&data, &params, &WeightedLogLoss { beta: 1.0 }).map_err(|e| e.to_string())?;
    let b = train_gbt::<f64, _>(&data, &params, &Logistic).map_err(|e| e.to_string())?;
    ensure(a == b, "unit-weight trees differ from logistic trees")?;
    within(start, LOSS_BUDGET)?;
    Ok(format!(
        "100 grid points, worst rel err {worst:.1e}; {} identical trees",
        a.trees.len()
    ))
}

fn calibration_setup(seed: u64) -> Result<(LabeledDataset, HouseholdTable, AdopterTarget), String> {
    let toy = ToyConfig {
        n_households: 2000,
        seed,
        ..ToyConfig::default()
    };
    let pop = gen_population(&toy).map_err(|e| e.to_string())?;
    let survey = gen_population(&ToyConfig {
        seed: derive_seed(seed, Purpose::Population, 1),
        ..toy.clone()
    })
    .map_err(|e| e.to_string())?;
    let raw = LabeledDataset::from_households(&survey, LabelColumn::Solar, &FeatureDomains::default())
        .map_err(|e| e.to_string())?;
    let train = smoten_oversample(&raw, 5, seed).map_err(|e| e.to_string())?;
    let count = pop.iter().filter(|h| h.solar == Some(true)).count() as u64;
    Ok((
        train,
        pop,
        AdopterTarget {
            state: toy.state,
            count,
        },
    ))
}

fn criterion_calibration() -> Check {
    let start = Instant::now();
    let mut converged = 0;
    let mut notes = Vec::new();
    for seed in 0..CAL_SEEDS {
        let (train, pop, target) = calibration_setup(seed)?;
        ensure(
            target.count == 200,
            format!("seed {seed}: planted {} adopters", target.count),
        )?;
        let cfg = CalibrateConfig {
            seed,
            ..CalibrateConfig::default()
        };
        let r = calibrate(&train, &pop, &target, &cfg).map_err(|e| e.to_string())?;
        let inc = r.incumbent_trace();
        ensure(
            inc.windows(2).all(|w| w[1] <= w[0]),
            format!("seed {seed}: incumbent trace increases"),
        )?;
        if r.discrepancy <= TOLERANCE * target.count as f64 && r.rounds_used <= 2000 {
            converged += 1;
        }
        notes.push(format!("{}:{}", r.discrepancy, r.rounds_used));
    }
    ensure(
        converged >= CAL_MIN_CONVERGED,
        format!(
            "{converged}/{CAL_SEEDS} seeds converged (diff:rounds {})",
            notes.join(" ")
        ),
    )?;
    within(start, CAL_BUDGET)?;
    Ok(format!(
        "{converged}/{CAL_SEEDS} seeds within 30 (diff:rounds {})",
        notes.join(" ")
    ))
}

fn criterion_ei() -> Check {
    let ei: f64 = expected_improvement(1.0, 1.0, 1.0);
    ensure((ei - 0.398942).abs() <= EI_TOL, format!("EI(mu=f_min, sigma=1) = {ei}"))?;
    for (mu, fmin) in [(1.0, 1.0), (2.0, 1.0), (5.0, -3.0)] {
        ensure(
            expected_improvement::<f64>(mu, 0.0, fmin) == 0.0,
            format!("EI({mu}, 0, {fmin}) != 0"),
        )?;
    }
    let points: [[f64; 2]; 5] = [[0.0, 0.1], [0.5, 0.3], [1.2, 0.6], [1.9, 0.9], [0.7, 0.05]];
    let values = [12.0, 3.0, 40.0, 7.5, 0.0];
    let kernel = GpKernel {
        signal_var: 150.0,
        length_scales: [0.5, 0.225],
        noise_var: 0.0,
    };
    let gp = gp_fit(&points, &values, kernel).map_err(|e| e.to_string())?;
    let worst = points
        .iter()
        .zip(&values)
        .map(|(x, v)| (gp_predict(&gp, x).0 - v).abs())
        .fold(0.0, f64::max);
    ensure(
        worst <= GP_INTERP_TOL,
        format!("GP misses a training point by {worst:e}"),
    )?;
    Ok(format!("EI = {ei:.6}; GP interpolation error {worst:.1e}"))
}

fn criterion_sqft() -> Check {
    let w = SubclassWeights::new(1000.0, 2000.0, vec![2.0 / 3.0, 1.0 / 3.0]).map_err(|e| e.to_string())?;
    let mut rng = stream(1, Purpose::SqftEstimate, 0);
    let est: f64 = estimate_sqft(&w, 10_000, 10, &mut rng);
    ensure((est - SQFT_EXPECTED).abs() <= SQFT_TOL, format!("estimate {est}"))?;
    for i in 0..SQFT_CONFIGS as u64 {
        let u = |j| uniform_at(2, Purpose::SqftEstimate, i, j, 0);
        let low = 100.0 + 4900.0 * u(0);
        let high = low + 1.0 + 2999.0 * u(1);
        let k = 1 + (u(2) * 11.0) as usize;
        let raw: Vec<f64> = (0..k).map(|j| u(10 + j as u64)).collect();
        let total: f64 = raw.iter().sum();
        let w = SubclassWeights::new(low, high, raw.iter().map(|x| x / total).collect()).map_err(|e| e.to_string())?;
        let mut rng = stream(3, Purpose::SqftEstimate, i);
        let e = estimate_sqft(&w, 1 + (u(3) * 20.0) as usize, 1 + (u(4) * 5.0) as usize, &mut rng);
        ensure(
            e >= low && e <= high,
            format!("config {i}: {e} outside [{low}, {high}]"),
        )?;
    }
    Ok(format!(
        "estimate {est:.1} over 1e5 draws; {SQFT_CONFIGS} configs in bounds"
    ))
}

fn criterion_geometry() -> Check {
    let table = DegradationTable::<f64> { factors: [1.0; 8] };
    let r = tilted_radiation(500.0, 38.0, 0.0, 30.0, Azimuth::S, &table);
    ensure((r - TILT_EXPECTED).abs() <= TILT_TOL, format!("tilted radiation {r}"))?;
    for (lat, delta) in [(20.0, -10.0), (38.0, 0.0), (47.0, 23.0)] {
        ensure(tilt_factor(lat, delta, 0.0, 1.0) == 1.0, "zero tilt is not an identity")?;
    }
    let (hi, lo) = (declination::<f64>(172), declination::<f64>(355));
    ensure(
        (hi - 23.45).abs() <= DECL_TOL && (lo + 23.45).abs() <= DECL_TOL,
        format!("declination {hi} / {lo}"),
    )?;
    Ok(format!("{r:.2} W/m2; declination {hi:.3} / {lo:.3}"))
}

fn profile_bytes(set: &Profiles) -> Vec<u8> {
    let mut out = Vec::new();
    write_hourly(set, &mut out).expect("in-memory write");
    write_daily(set, &mut out).expect("in-memory write");
    out
}

fn criterion_profiles() -> Check {
    let toy = ToyConfig {
        n_households: 500,
        days: 7,
        ..ToyConfig::default()
    };
    let pop = gen_population(&toy).map_err(|e| e.to_string())?;
    let irr: BTreeMap<_, _> = (0..tracts(&toy).len())
        .map(|t| gen_irradiance(&toy, t).map(|s| (s.tract.clone(), s)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let dates: Vec<_> = (0..7).map(|d| toy.start_date + chrono::Days::new(d)).collect();
    let pv = PvConfig::default();
    let gen = |ghi: &BTreeMap<String, solartwin_core::data::IrradianceSeries>, workers| -> Result<Profiles, String> {
        generate_profiles(&pop, ghi, &dates, &pv, Selection::All, workers, 42).map_err(|e| e.to_string())
    };
    let start = Instant::now();
    let base = gen(&irr, 8)?;
    within(start, PROFILE_BUDGET)?;
    let reference = profile_bytes(&base);
    for w in [1, 2] {
        ensure(
            profile_bytes(&gen(&irr, w)?) == reference,
            format!("{w} workers differ from 8"),
        )?;
    }
    let tract: BTreeMap<u64, &str> = pop.iter().map(|h| (h.id, h.tract.as_str())).collect();
    for p in &base.profiles {
        let sum: f64 = p.hourly_mean.iter().sum();
        let var: f64 = p.hourly_std.iter().map(|s| s * s).sum();
        ensure(
            (p.daily_mean - sum).abs() <= PROFILE_ID_TOL,
            "daily mean is not the hourly sum",
        )?;
        ensure(
            (p.daily_std.powi(2) - var).abs() <= PROFILE_ID_TOL,
            "daily variance is not the hourly sum",
        )?;
        let ghi = irr[tract[&p.household]].day(p.date).expect("covered");
        for h in (0..24).filter(|&h| ghi[h] == 0.0) {
            ensure(p.hourly_mean[h] == 0.0 && p.hourly_std[h] == 0.0, "night hour not zero")?;
        }
    }
    let doubled: BTreeMap<_, _> = irr
        .iter()
        .map(|(k, s)| {
            let hours = s.hours.iter().map(|g| 2.0 * g).collect();
            (
                k.clone(),
                solartwin_core::data::IrradianceSeries::new(k.clone(), s.start_date, hours).expect("valid"),
            )
        })
        .collect();
    let twice = gen(&doubled, 8)?;
    for (a, b) in base.profiles.iter().zip(&twice.profiles) {
        ensure(
            (b.daily_mean - 2.0 * a.daily_mean).abs() <= PROFILE_ID_TOL * a.daily_mean.max(1.0),
            "doubling GHI did not double the daily mean",
        )?;
    }
    Ok(format!(
        "{} household-days identical at 1/2/8 workers; 8 workers in {:.1?}",
        base.profiles.len(),
        start.elapsed()
    ))
}

fn criterion_metrics() -> Check {
    let edges: Vec<f64> = (0..=8).map(f64::from).collect();
    let dist = |m: Vec<f64>| DiscreteDistribution::from_weights(edges.clone(), &m).map_err(|e| e.to_string());
    let p = dist(vec![1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0])?;
    let q = dist(vec![0.0, 0.0, 0.0, 0.0, 4.0, 1.0, 1.0, 1.0])?;
    ensure(jsd(&p, &p).map_err(|e| e.to_string())? == 0.0, "jsd(P, P) != 0")?;
    let disjoint = jsd(&p, &q).map_err(|e| e.to_string())?;
    ensure((disjoint - 1.0).abs() < 1e-12, format!("jsd(disjoint) = {disjoint}"))?;
    for i in 0..100u64 {
        let draw = |k: u64| -> Vec<f64> { (0..8).map(|j| uniform_at(5, Purpose::Population, i, k, j)).collect() };
        let (a, b) = (dist(draw(0))?, dist(draw(1))?);
        let ab = jsd(&a, &b).map_err(|e| e.to_string())?;
        let ba = jsd(&b, &a).map_err(|e| e.to_string())?;
        ensure((ab - ba).abs() < 1e-15, format!("asymmetric jsd on pair {i}"))?;
    }
    ensure(scott_factor::<f64>(32) == 0.5, "Scott factor for n = 32 is not 0.5")?;
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut c = BTreeMap::new();
    for m in 1..=12u32 {
        let x: [f64; 24] = std::array::from_fn(|h| uniform_at(6, Purpose::Population, m as u64, h as u64, 0));
        let y: [f64; 24] = std::array::from_fn(|h| uniform_at(6, Purpose::Population, m as u64, h as u64, 1));
        a.insert(m, x);
        b.insert(m, y);
        c.insert(m, y.map(|v| 4.0 * v - 2.5));
    }
    let r1 = pearson_monthly(&a, &b).map_err(|e| e.to_string())?;
    let r2 = pearson_monthly(&a, &c).map_err(|e| e.to_string())?;
    for m in 1..=12 {
        let (x, y) = (r1[&m].ok_or("undefined r")?, r2[&m].ok_or("undefined r")?);
        ensure((x - y).abs() < 1e-12, format!("month {m}: {x} vs {y}"))?;
    }
    let d: f64 = relative_pct_diff(62.0, 338.0).map_err(|e| e.to_string())?;
    ensure((d - RPD_EXPECTED).abs() <= RPD_TOL, format!("relative difference {d}"))?;
    Ok(format!(
        "jsd bounds, symmetry x100, Scott 0.5, affine r, rel diff {d:.2}%"
    ))
}

fn diffusion_world(n: usize, seed: u64) -> Result<(Agents, solartwin_core::data::Graph), String> {
    let toy = ToyConfig {
        n_households: n,
        n_tracts: 20,
        seed,
        ..ToyConfig::default()
    };
    let pop = gen_population(&toy).map_err(|e| e.to_string())?;
    let barriers: BTreeMap<_, _> = gen_barriers(&pop, seed).into_iter().collect();
    let daily: BTreeMap<u64, f64> = pop
        .iter()
        .map(|h| (h.id, 6.0 + h.sqft_value.unwrap_or(1500.0) / 300.0))
        .collect();
    let initial: BTreeSet<u64> = pop.iter().filter(|h| h.solar == Some(true)).map(|h| h.id).collect();
    let agents = Agents::new(&pop, &barriers, &daily, &initial).map_err(|e| e.to_string())?;
    let graph = gen_network(n, 0.2, n / 20, seed).map_err(|e| e.to_string())?;
    Ok((agents, graph))
}

fn criterion_diffusion() -> Check {
    let start = Instant::now();
    let (agents, graph) = diffusion_world(5000, 42)?;
    let mut runs = 0;
    for case in Case::ALL {
        let cfg = DiffusionConfig {
            case,
            iterations: 3,
            ..DiffusionConfig::default()
        };
        let sim = simulate(&agents, &graph, &cfg).map_err(|e| e.to_string())?;
        for r in &sim.runs {
            ensure(
                r.counts.windows(2).all(|w| w[1].total >= w[0].total),
                format!("case {case}: adopters decreased"),
            )?;
            ensure(
                agents.initial.iter().zip(&r.final_adopted).all(|(&i, &f)| !i || f),
                format!("case {case}: an adopter reverted"),
            )?;
            runs += 1;
        }
    }
    ensure(
        fixed_node_probability(Case::C2b, true, 1) == Some(0.5),
        "case 2b LMI probability",
    )?;
    let seq: Vec<f64> = (1..=10)
        .filter_map(|s| fixed_node_probability(Case::C3, true, s))
        .collect();
    ensure(
        seq == [0.3, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
        format!("case 3 sequence {seq:?}"),
    )?;

    let mut finals: BTreeMap<Case, (f64, f64)> = BTreeMap::new();
    for seed in 0..20 {
        for case in [Case::C1a, Case::C1b, Case::C2a, Case::C2b] {
            let cfg = DiffusionConfig {
                case,
                seed,
                ..DiffusionConfig::default()
            };
            let sim = simulate(&agents, &graph, &cfg).map_err(|e| e.to_string())?;
            let last = sim.runs[0].counts.last().expect("step 0 is always present");
            let e = finals.entry(case).or_default();
            e.0 += last.total as f64 / 20.0;
            e.1 += last.lmi() as f64 / 20.0;
        }
    }
    ensure(
        finals[&Case::C1b].0 >= finals[&Case::C1a].0,
        format!("1b below 1a: {finals:?}"),
    )?;
    ensure(
        finals[&Case::C2b].1 >= finals[&Case::C2a].1,
        format!("2b LMI below 2a LMI: {finals:?}"),
    )?;
    within(start, DIFFUSION_BUDGET)?;
    Ok(format!(
        "{runs} monotone runs on 5000 nodes; mean final 1a {:.1} 1b {:.1}, LMI 2a {:.1} 2b {:.1}",
        finals[&Case::C1a].0,
        finals[&Case::C1b].0,
        finals[&Case::C2a].1,
        finals[&Case::C2b].1
    ))
}

fn criterion_smoten() -> Check {
    let survey = gen_population(&ToyConfig::default()).map_err(|e| e.to_string())?;
    let raw = LabeledDataset::from_households(&survey, LabelColumn::SqftClass, &FeatureDomains::default())
        .map_err(|e| e.to_string())?;
    let out = smoten_oversample(&raw, 5, 42).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = out.class_counts().into_values().collect();
    ensure(
        counts.windows(2).all(|w| w[0] == w[1]),
        format!("class counts {counts:?}"),
    )?;
    let before: Vec<Vec<f64>> = correlation_matrix(&raw, true).map_err(|e| e.to_string())?;
    let after: Vec<Vec<f64>> = correlation_matrix(&out, true).map_err(|e| e.to_string())?;
    let d = max_abs_diff(&before, &after);
    ensure(d <= CRAMER_TOL, format!("max |dV| = {d}"))?;
    Ok(format!(
        "{} classes x {} rows; max |dV| {d:.4}",
        counts.len(),
        counts[0]
    ))
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).expect("readable dir").flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(dir).expect("under dir").to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn criterion_pipeline() -> Check {
    let start = Instant::now();
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().expect("temp dir")).collect();
    for d in &dirs {
        let out = Command::new(env!("CARGO_BIN_EXE_solartwin"))
            .arg("pipeline")
            .current_dir(d.path())
            .env("SOLARTWIN_LOG", "error")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            out.status.success(),
            format!(
                "exit {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr).trim()
            ),
        )?;
    }
    let (a, b) = (files_under(dirs[0].path()), files_under(dirs[1].path()));
    ensure(a == b, "runs produced different file sets")?;
    for expected in [
        "out/adoption_timeline.csv",
        "out/metrics.csv",
        "out/calibration_trace.csv",
    ] {
        ensure(a.contains(&PathBuf::from(expected)), format!("{expected} not written"))?;
    }
    for f in &a {
        let x = std::fs::read(dirs[0].path().join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(dirs[1].path().join(f)).map_err(|e| e.to_string())?;
        ensure(x == y, format!("{} differs between runs", f.display()))?;
    }
    within(start, PIPELINE_BUDGET)?;
    Ok(format!(
        "{} files byte-identical across two runs in {:.1?}",
        a.len(),
        start.elapsed()
    ))
}

fn main() {
    let checks: [Criterion; 10] = [
        ("loss-correctness", criterion_loss),
        ("calibration-convergence", criterion_calibration),
        ("expected-improvement", criterion_ei),
        ("sqft-estimator", criterion_sqft),
        ("solar-geometry", criterion_geometry),
        ("profile-engine", criterion_profiles),
        ("metrics", criterion_metrics),
        ("diffusion", criterion_diffusion),
        ("smoten", criterion_smoten),
        ("end-to-end", criterion_pipeline),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
