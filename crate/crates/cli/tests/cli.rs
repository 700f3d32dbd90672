use std::f64::consts::PI;
use std::process::Command;

use geophase_cli::config::Format;
use geophase_cli::experiments::Rows;
use geophase_cli::{output, run_experiment, CliError, ExperimentConfig};

const ROOT2: f64 = std::f64::consts::SQRT_2;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).expect("valid config")
}

fn geophase() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geophase"))
}

fn shipped(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/");
    std::fs::read_to_string(format!("{path}{name}")).expect("shipped config")
}

#[test]
fn canonical_form_round_trips() {
    for name in ["dirac_circuit.toml", "reflectionless_phase.toml", "smatrix_compare.toml", "oracle_verify.toml"] {
        let parsed = config(&shipped(name));
        let again = config(&parsed.emit().unwrap());
        assert_eq!(parsed, again, "{name}");
        assert_eq!(parsed.digest().unwrap(), again.digest().unwrap());
    }
}

#[test]
fn digest_ignores_layout_but_not_values() {
    let a = config("experiment = \"dirac-circuit\"\n[dirac]\n");
    let b = config("# comment\nexperiment = \"dirac-circuit\"\n\n[dirac]\nomega = 1.0\n");
    let c = config("experiment = \"dirac-circuit\"\n[dirac]\nomega = 2.0\n");
    assert_eq!(a.digest().unwrap(), b.digest().unwrap());
    assert_ne!(a.digest().unwrap(), c.digest().unwrap());
    assert_eq!(a.digest().unwrap().len(), 64);
}

#[test]
fn unknown_keys_and_bad_values_are_rejected() {
    let cases = [
        "experiment = \"dirac-circuit\"\ncolour = 1\n[dirac]\n",
        "experiment = \"dirac-circuit\"\n[dirac]\nthetaz = [0.5]\n",
        "experiment = \"dirac-circuit\"\n[dirac]\nthetas = [2.0]\n",
        "experiment = \"dirac-circuit\"\n[dirac]\nthetas = [1.0, 0.5]\n",
        "experiment = \"reflectionless-phase\"\n[reflectionless]\nk1 = 1.0\n",
        "experiment = \"reflectionless-phase\"\n[reflectionless]\nk1 = 1.0\n[sweep]\nk_lo = 0.0\nk_hi = 2.0\nn_points = 3\n",
        "experiment = \"teleport\"\n",
    ];
    for text in cases {
        match ExperimentConfig::parse(text) {
            Err(e @ CliError::Config(_)) => assert_eq!(e.exit_code(), 1),
            other => panic!("accepted {text:?}: {other:?}"),
        }
    }
}

#[test]
fn dirac_circuit_hits_half_solid_angle() {
    let record = run_experiment(&config("experiment = \"dirac-circuit\"\n[dirac]\n")).unwrap();
    let Rows::Circuit(rows) = &record.rows else { panic!("wrong row kind") };
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.abs_diff < 1e-10, "{row:?}");
        assert!((row.gamma_geo_closed + 0.5 * row.omega_solid).abs() < 1e-14);
    }
    let equator = rows.last().unwrap();
    assert!((equator.omega_solid - 2.0 * PI).abs() < 1e-12);
    assert!((equator.gamma_geo_numeric + PI).abs() < 1e-10);
}

#[test]
fn upper_branch_differs_by_a_full_turn() {
    let lower = run_experiment(&config("experiment = \"dirac-circuit\"\n[dirac]\nthetas = [0.7]\n")).unwrap();
    let upper =
        run_experiment(&config("experiment = \"dirac-circuit\"\n[dirac]\nthetas = [0.7]\nbranch = \"upper\"\n")).unwrap();
    let (Rows::Circuit(l), Rows::Circuit(u)) = (&lower.rows, &upper.rows) else { panic!() };
    assert!((u[0].gamma_geo_numeric - (-l[0].gamma_geo_numeric - 2.0 * PI)).abs() < 1e-10);
    assert!(u[0].abs_diff < 1e-10);
}

#[test]
fn reflectionless_sweep_matches_closed_form() {
    let text = format!(
        "experiment = \"reflectionless-phase\"\n[reflectionless]\nk1 = {ROOT2}\n[sweep]\nk_lo = 0.5\nk_hi = 10.0\nn_points = 4\n"
    );
    let record = run_experiment(&config(&text)).unwrap();
    let Rows::Phase(rows) = &record.rows else { panic!() };
    assert_eq!(record.skipped_k, vec![0.5]);
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.abs_diff < 1e-3, "{row:?}");
        let closed = 2.0 * ROOT2 * row.k / (row.k * row.k + 2.0);
        assert!((row.gamma_geo_closed - closed).abs() < 1e-14);
        assert!(row.delta_exact_rad > row.delta0_rad);
    }
}

#[test]
fn decreasing_sweep_flips_sign() {
    let text = "experiment = \"reflectionless-phase\"\n[reflectionless]\nk1 = 1.0\ndirection = \"decreasing\"\n[sweep]\nk_lo = 3.0\nk_hi = 4.0\nn_points = 2\n";
    let record = run_experiment(&config(text)).unwrap();
    let Rows::Phase(rows) = &record.rows else { panic!() };
    let closed = -2.0 * 3.0 / (9.0 + 1.0);
    assert!((rows[0].gamma_geo_closed - closed).abs() < 1e-14);
    assert!((rows[0].gamma_geo_numeric - closed).abs() < 1e-3);
}

#[test]
fn smatrix_table_is_unitary_and_ordered() {
    let text = format!(
        "experiment = \"smatrix-compare\"\n[reflectionless]\nk1 = {ROOT2}\n[sweep]\nk_lo = 1.5\nk_hi = 10.0\nn_points = 3\n"
    );
    let record = run_experiment(&config(&text)).unwrap();
    let Rows::Phase(rows) = &record.rows else { panic!() };
    assert!(rows.windows(2).all(|w| w[0].k < w[1].k));
    for row in rows {
        assert!((row.s_modulus.unwrap() - 1.0).abs() < 1e-12);
        assert!(row.abs_diff < 1e-3);
        assert!((row.delta_exact_rad - 2.0 * (ROOT2 / row.k).atan()).abs() < 1e-14);
    }
    let gap_lo = rows[0].delta_exact_rad - rows[0].delta0_rad;
    let gap_hi = rows[2].delta_exact_rad - rows[2].delta0_rad;
    assert!(gap_lo > gap_hi && gap_hi > 0.0);
}

#[test]
fn csv_layout_and_determinism() {
    let cfg = config("experiment = \"dirac-circuit\"\n[dirac]\nthetas = [0.3, 0.9]\n");
    let a = output::render(&run_experiment(&cfg).unwrap(), Format::Csv).unwrap();
    let b = output::render(&run_experiment(&cfg).unwrap(), Format::Csv).unwrap();
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some(output::CIRCUIT_HEADER));
    assert_eq!(lines.count(), 2);
    assert!(geophase_cli::determinism_check().passed);
}

#[test]
fn json_record_carries_provenance() {
    let cfg = config("experiment = \"dirac-circuit\"\n[dirac]\nthetas = [0.3]\n");
    let record = run_experiment(&cfg).unwrap();
    let json: serde_json::Value = serde_json::from_str(&output::to_json(&record).unwrap()).unwrap();
    assert_eq!(json["experiment"], "dirac-circuit");
    assert_eq!(json["kind"], "circuit");
    assert_eq!(json["config_digest"], cfg.digest().unwrap());
    assert_eq!(json["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(json["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn binary_writes_file_and_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "experiment = \"dirac-circuit\"\n[dirac]\nthetas = [0.4]\n").unwrap();

    let ok = geophase().args(["run", "--config"]).arg(&cfg).arg("--output").arg(&out).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.starts_with(output::CIRCUIT_HEADER));

    let single = geophase().env("GEOPHASE_THREADS", "1").args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(String::from_utf8(single.stdout).unwrap(), body);

    let bad_env = geophase().env("GEOPHASE_THREADS", "none").args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(bad_env.status.code(), Some(1));

    std::fs::write(&cfg, "experiment = \"dirac-circuit\"\n[dirac]\nextra = true\n").unwrap();
    let rejected = geophase().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(rejected.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("extra"));

    let missing = geophase().args(["run", "--config"]).arg(dir.path().join("absent.toml")).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    std::fs::write(
        &cfg,
        "experiment = \"reflectionless-phase\"\n[reflectionless]\nk1 = 1.0\nhalf_length = 0.5\n[sweep]\nk_lo = 3.0\nk_hi = 4.0\nn_points = 2\n",
    )
    .unwrap();
    let unresolved = geophase().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(unresolved.status.code(), Some(2));

    let version = geophase().arg("--version").output().unwrap();
    assert!(String::from_utf8_lossy(&version.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn exit_code_mapping() {
    assert_eq!(CliError::Config("x".into()).exit_code(), 1);
    assert_eq!(CliError::Numerical(geophase::PhaseError::InvalidInput("x".into())).exit_code(), 2);
    assert_eq!(CliError::Verification("x".into()).exit_code(), 3);
}
