use solartwin_core::boost::{load_model, save_model, train_gbt, GbtParams, WeightedLogLoss};
use solartwin_core::data::{
    load_households, load_irradiance_dir, load_network, load_targets, save_households, save_irradiance, save_network,
    save_targets, AdopterTarget, FeatureDomains,
};
use solartwin_core::diffusion::{load_barriers, save_barriers};
use solartwin_core::preprocess::{LabelColumn, LabeledDataset};
use solartwin_core::toygen::{gen_barriers, gen_irradiance, gen_network, gen_population, ToyConfig};
use solartwin_core::Gbt;

fn toy() -> ToyConfig {
    ToyConfig {
        n_households: 150,
        n_tracts: 3,
        days: 5,
        ..ToyConfig::default()
    }
}

#[test]
fn toy_inputs_survive_disk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = toy();
    let pop = gen_population(&cfg).unwrap();
    save_households(&pop, dir.path().join("h.csv")).unwrap();
    assert_eq!(load_households(dir.path().join("h.csv")).unwrap(), pop);

    let irr_dir = dir.path().join("irr");
    std::fs::create_dir(&irr_dir).unwrap();
    let series: Vec<_> = (0..3).map(|t| gen_irradiance(&cfg, t).unwrap()).collect();
    for s in &series {
        save_irradiance(s, &irr_dir).unwrap();
    }
    let back = load_irradiance_dir(&irr_dir).unwrap();
    assert_eq!(back.len(), 3);
    for s in &series {
        assert_eq!(&back[&s.tract], s);
    }

    let graph = gen_network(pop.len(), 0.3, 10, 1).unwrap();
    save_network(&graph, dir.path().join("n.edges")).unwrap();
    assert_eq!(load_network(dir.path().join("n.edges")).unwrap(), graph);

    let targets = vec![AdopterTarget {
        state: "VA".into(),
        count: 15,
    }];
    save_targets(&targets, dir.path().join("t.csv")).unwrap();
    assert_eq!(load_targets(dir.path().join("t.csv")).unwrap(), targets);

    let barriers = gen_barriers(&pop, 2);
    save_barriers(&barriers, dir.path().join("b.csv")).unwrap();
    let loaded = load_barriers(dir.path().join("b.csv")).unwrap();
    assert!(barriers.iter().all(|(id, f)| loaded[id] == *f));
}

#[test]
fn model_file_reproduces_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let pop = gen_population(&toy()).unwrap();
    let data = LabeledDataset::from_households(&pop, LabelColumn::Solar, &FeatureDomains::default()).unwrap();
    let model: Gbt = train_gbt(&data, &GbtParams::default(), &WeightedLogLoss { beta: 0.7 }).unwrap();
    let path = dir.path().join("m.gbt");
    save_model(&model, &path).unwrap();
    let back: Gbt = load_model(&path).unwrap();
    assert_eq!(back, model);
    assert_eq!(
        back.predict_all(&data.rows).unwrap(),
        model.predict_all(&data.rows).unwrap()
    );
}
