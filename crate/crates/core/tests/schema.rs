use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortexloop::circle_forms::CircleForm;
use vortexloop::flow::{Bump, PlanarHamiltonian};
use vortexloop::generate::{random_decorated_loop, AnalyticMap};
use vortexloop::loops::{DecoratedLoop, LoopEmbedding};
use vortexloop::schema::{DiffeoFile, FormFile, HamiltonianFile, LoopFile, SCHEMA};
use vortexloop::Error;

fn round_trip<T: serde::Serialize + serde::de::DeserializeOwned>(value: &T) -> T {
    serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
}

#[test]
fn loop_file_round_trips() {
    let l = random_decorated_loop(&mut ChaCha8Rng::seed_from_u64(5), 64, 3).unwrap();
    let file = LoopFile::from_loop(&l);
    assert_eq!(file.schema.as_deref(), Some(SCHEMA));
    let back = round_trip(&file);
    assert_eq!(back, file);
    let restored = back.to_loop(false, 1e-8).unwrap();
    assert_eq!(restored.embedding().points(), l.embedding().points());
    assert_eq!(restored.profile(), l.profile());

    let sampled = DecoratedLoop::new(
        LoopEmbedding::circle([0.0, 0.0], 1.0, 32).unwrap(),
        CircleForm::sampled_from_fn(|t| (2.0 * t).sin() + 0.1 * t.cos(), 32).unwrap(),
    )
    .unwrap();
    let file = round_trip(&LoopFile::from_loop(&sampled));
    assert!(matches!(file.beta, FormFile::Samples { .. }));
    assert_eq!(file.to_loop(false, 1e-8).unwrap().profile(), sampled.profile());
}

#[test]
fn hamiltonian_and_diffeo_files_round_trip() {
    let h = PlanarHamiltonian::new(vec![Bump::new([0.1, -0.2], 0.3, 1.5).unwrap()]);
    let back = round_trip(&HamiltonianFile::from_hamiltonian(&h)).to_hamiltonian().unwrap();
    assert_eq!(back, h);

    let psi = AnalyticMap::random(&mut ChaCha8Rng::seed_from_u64(1), 2, 0.4).to_diffeo(64).unwrap();
    let back = round_trip(&DiffeoFile::from_diffeo(&psi)).to_diffeo().unwrap();
    assert_eq!(back, psi);
}

#[test]
fn schema_version_is_checked() {
    let l = random_decorated_loop(&mut ChaCha8Rng::seed_from_u64(2), 32, 2).unwrap();
    let mut file = LoopFile::from_loop(&l);
    file.schema = None;
    assert!(file.to_loop(false, 1e-8).is_ok());
    file.schema = Some("vortexloop/2".into());
    assert!(matches!(file.to_loop(false, 1e-8), Err(Error::InvalidInput(_))));
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"samples": [[0,0],[1,0],[1,1],[0,1],[0,0.5],[0.5,0],[1,0.5],[0.5,1]],
                   "beta": {"kind": "trig", "coeffs": {"a0": 0, "sin": [0, 1], "tan": [1]}}}"#;
    let err = serde_json::from_str::<LoopFile>(text).unwrap_err().to_string();
    assert!(err.contains("tan"), "{err}");
}
