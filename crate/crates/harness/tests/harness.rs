use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxz_core::correlators::{CorrelatorKind, CorrelatorRecord};
use xxz_core::spectral::droplet_band;
use xxz_harness::cli::{parse_pairs, parse_usizes, run};
use xxz_harness::manifest::{RunManifest, MANIFEST_FILE};
use xxz_harness::persist::{load, persist, BandRow, CorrelatorRow, DecayRow, Format};
use xxz_harness::HarnessError;

fn xxz(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["xxz".to_string(), "--out-dir".into(), dir.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

fn random_records(count: usize) -> Vec<CorrelatorRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let kinds = [
        CorrelatorKind::State,
        CorrelatorKind::Set,
        CorrelatorKind::Partition,
        CorrelatorKind::Dynamical,
        CorrelatorKind::Sector,
    ];
    (0..count)
        .map(|k| {
            let i = rng.random_range(-40..=40);
            let j = rng.random_range(-40..=40);
            let lo: f64 = rng.random();
            CorrelatorRecord::new(
                kinds[k % kinds.len()],
                rng.random(),
                rng.random(),
                rng.random_range(0..8),
                i,
                j,
                rng.random_range(0.0..1e4),
                (lo, lo + rng.random::<f64>()),
                rng.random::<f64>() * 10f64.powi(rng.random_range(-300..3)),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn correlator_records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let records = random_records(10_000);
    let rows: Vec<CorrelatorRow> = records.iter().map(CorrelatorRow::from).collect();
    for format in [Format::Csv, Format::Json] {
        let path = dir.path().join(format!("c.{}", format.extension()));
        persist(&rows, &path, format).unwrap();
        let back: Vec<CorrelatorRow> = load(&path, format).unwrap();
        let back: Vec<CorrelatorRecord> = back.into_iter().map(|r| r.try_into().unwrap()).collect();
        assert_eq!(back, records);
    }
}

#[test]
fn correlator_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let rows: Vec<CorrelatorRow> = random_records(1).iter().map(CorrelatorRow::from).collect();
    persist(&rows, &path, Format::Csv).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("seed,N,i,j,distance,t,value,kind,stream,window_lo,window_hi\n"));
}

#[test]
fn corrupted_files_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(&path, "N,distance,mean,stderr,n_samples\n2,1,0.5,0.1,10\n2,2,oops,0.1,10\n").unwrap();
    assert!(matches!(load::<DecayRow>(&path, Format::Csv), Err(HarnessError::Schema { .. })));
    std::fs::write(&path, "N,distance,mean,n_samples\n2,1,0.5,10\n").unwrap();
    assert!(matches!(load::<DecayRow>(&path, Format::Csv), Err(HarnessError::Schema { .. })));
    std::fs::write(&path, "N,distance,mean,stderr,n_samples\n2,1,0.5,0.1\n").unwrap();
    assert!(matches!(load::<DecayRow>(&path, Format::Csv), Err(HarnessError::Schema { .. })));
    let json = dir.path().join("d.json");
    std::fs::write(&json, r#"[{"N": 2, "distance": 1, "mean": 0.5, "stderr": 0.1, "n_samples": 3}, {"N": 2}]"#)
        .unwrap();
    assert!(matches!(load::<DecayRow>(&json, Format::Json), Err(HarnessError::Schema { .. })));
    std::fs::write(&json, r#"[{"N": 2, "distance": 1, "mean": 0.5, "stderr": 0.1"#).unwrap();
    assert!(matches!(load::<DecayRow>(&json, Format::Json), Err(HarnessError::Schema { .. })));
}

#[test]
fn mismatched_distance_is_rejected() {
    let mut row = CorrelatorRow::from(&random_records(1)[0]);
    row.distance += 1;
    assert!(CorrelatorRecord::try_from(row).is_err());
}

#[test]
fn list_arguments() {
    assert_eq!(parse_usizes("1..5").unwrap().0, vec![1, 2, 3, 4, 5]);
    assert_eq!(parse_usizes("1..=3,7").unwrap().0, vec![1, 2, 3, 7]);
    assert_eq!(parse_usizes("4").unwrap().0, vec![4]);
    assert!(parse_usizes("5..1").is_err());
    assert!(parse_usizes("x").is_err());
    assert_eq!(parse_pairs("-1:2,0:0").unwrap().0, vec![(-1, 2), (0, 0)]);
    assert!(parse_pairs("1-2").is_err());
}

#[test]
fn band_table_matches_formula() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xxz(dir.path(), &["band", "--delta", "2", "--n", "1..5"]), 0);
    let rows: Vec<BandRow> = load(&dir.path().join("band.csv"), Format::Csv).unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let b = droplet_band(r.n_particles, 2.0).unwrap();
        assert_eq!((r.lo, r.hi), (b.lo, b.hi));
    }
    let m = RunManifest::load(&dir.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.experiment, "band");
    assert_eq!(m.config.model.anisotropy, 2.0);
    assert!(!m.code_version.is_empty());
}

#[test]
fn invalid_configuration_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xxz(dir.path(), &["band", "--delta", "0.5"]), 2);
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"model": {"anisotropy": 2, "unknown": 1}}"#).unwrap();
    assert_eq!(xxz(dir.path(), &["--config", cfg.to_str().unwrap(), "band"]), 2);
    assert_eq!(xxz(dir.path(), &["fit", dir.path().join("missing.csv").to_str().unwrap()]), 2);
}

fn ensemble_args(cfg: &Path, threads: &str) -> Vec<String> {
    ["--config", cfg.to_str().unwrap(), "--seed", "7", "--threads", threads, "ensemble"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn ensemble_is_deterministic_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"model": {"half_length": 6}, "ensemble": {"n_list": [1, 2], "distances": [1, 2, 3, 4], "realizations": 12}}"#,
    )
    .unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let args = ensemble_args(&cfg, "1");
    assert_eq!(xxz(&a, &args.iter().map(String::as_str).collect::<Vec<_>>()), 0);
    let args = ensemble_args(&cfg, "3");
    assert_eq!(xxz(&b, &args.iter().map(String::as_str).collect::<Vec<_>>()), 0);
    for name in ["decay.csv", "samples.csv", "fits.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let m = RunManifest::load(&a.join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.master_seed, 7);
    assert_eq!(m.ensemble.as_ref().unwrap().realizations, 12);
    let decay: Vec<DecayRow> = load(&a.join("decay.csv"), Format::Csv).unwrap();
    assert_eq!(decay.len(), 8);
    assert!(decay.iter().all(|r| r.n_samples == 12));

    let manifest = a.join(MANIFEST_FILE);
    assert_eq!(xxz(&c, &["replay", manifest.to_str().unwrap()]), 0);
    std::fs::write(a.join("decay.csv"), "tampered").unwrap();
    assert_eq!(xxz(&dir.path().join("d"), &["replay", manifest.to_str().unwrap()]), 1);

    let fits = dir.path().join("f");
    assert_eq!(xxz(&fits, &["fit", b.join("decay.csv").to_str().unwrap()]), 0);
    assert!(fits.join("fits.json").exists());
}

#[test]
fn verify_ct_passes_with_zero_violations() {
    let dir = tempfile::tempdir().unwrap();
    let code = xxz(
        dir.path(),
        &["-L", "4", "verify", "ct", "--n", "2", "--realizations", "4", "--pairs", "4", "--energies", "2"],
    );
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ct_report.json")).unwrap()).unwrap();
    assert_eq!(report["bulk_violations"], 0);
    assert!(report["bulk_checks"].as_u64().unwrap() > 0);
}

#[test]
fn verify_identities_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xxz(dir.path(), &["verify", "identities", "--instances", "5", "--seeds", "1"]), 0);
}

#[test]
fn single_realization_commands() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xxz(dir.path(), &["-L", "4", "build", "--n", "1..3"]), 0);
    assert!(dir.path().join("operators.csv").exists());
    assert_eq!(xxz(dir.path(), &["-L", "4", "--format", "json", "spectrum", "--n", "2"]), 0);
    let spec: Vec<xxz_core::spectral::SpectrumRow> =
        load(&dir.path().join("spectrum_N2.json"), Format::Json).unwrap();
    assert_eq!(spec.len(), 36);
    assert_eq!(xxz(dir.path(), &["-L", "3", "correlate", "--n", "1..7", "--pairs", "-1:1,0:2"]), 0);
    let sector: Vec<CorrelatorRow> = load(&dir.path().join("correlators.csv"), Format::Csv).unwrap();
    assert_eq!(xxz(dir.path(), &["-L", "3", "correlate", "--picture", "spin", "--pairs", "-1:1,0:2"]), 0);
    let spin: Vec<CorrelatorRow> = load(&dir.path().join("correlators.csv"), Format::Csv).unwrap();
    for (k, s) in spin.iter().enumerate() {
        let total: f64 = sector.iter().filter(|r| (r.i, r.j) == (s.i, s.j)).map(|r| r.value).sum();
        assert!((total - s.value).abs() <= 1e-8 * s.value.max(1.0), "pair {k}: {total} vs {}", s.value);
    }
}
