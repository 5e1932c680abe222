//! End-to-end tests for the `ccview` binary: exit codes, witness files,
//! report formats, specification handling, generation, and bench output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ccview"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_satisfied_exits_zero_and_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify"])
        .arg(fixtures().join("pumpstation.ccm"))
        .arg(fixtures().join("userbutton.ccv"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("C&C model PumpStation satisfies view UserButton."));
    let witness = dir.path().join("UserButton_satisfaction_0.ccw");
    let content = fs::read_to_string(&witness).unwrap();
    assert!(content.starts_with("// witness kind: satisfaction"));
    assert!(content.contains("view W_sat_UserButton {"));
}

#[test]
fn verify_failing_exits_one_and_writes_one_witness_per_reason() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify"])
        .arg(fixtures().join("pumpstation.ccm"))
        .arg(fixtures().join("systememergencycontroller.ccv"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("does not satisfy view SystemEmergencyController: 4 reason(s)"));
    assert!(text.contains(
        "Component EmergencyController from view SystemEmergencyController does not exist \
         in C&C model PumpStation."
    ));
    assert!(text.contains("port userPumpState has type Boolean."));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "SystemEmergencyController_interface_mismatch_1.ccw",
            "SystemEmergencyController_interface_mismatch_2.ccw",
            "SystemEmergencyController_missing_component_0.ccw",
            "SystemEmergencyController_missing_connection_3.ccw",
        ]
    );
}

#[test]
fn verify_json_report_has_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "--format", "json"])
        .arg(fixtures().join("pumpstation.ccm"))
        .arg(fixtures().join("pcpumpingsystem.ccv"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["model"], "PumpStation");
    assert_eq!(doc["view"], "PCPumpingSystem");
    assert_eq!(doc["satisfied"], false);
    let witnesses = doc["witnesses"].as_array().unwrap();
    assert_eq!(witnesses.len(), 2);
    assert_eq!(witnesses[0]["kind"], "hierarchy_mismatch");
    assert!(witnesses[1]["fragment"]
        .as_str()
        .unwrap()
        .starts_with("view W_connection_"));
}

#[test]
fn out_dir_falls_back_to_env_and_flag_wins() {
    let env_dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify"])
        .arg(fixtures().join("pumpstation.ccm"))
        .arg(fixtures().join("userbutton.ccv"))
        .env("CCVIEW_OUT", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir
        .path()
        .join("UserButton_satisfaction_0.ccw")
        .exists());

    let flag_dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify"])
        .arg(fixtures().join("pumpstation.ccm"))
        .arg(fixtures().join("userbutton.ccv"))
        .arg("--out")
        .arg(flag_dir.path())
        .env("CCVIEW_OUT", env_dir.path().join("ignored"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir
        .path()
        .join("UserButton_satisfaction_0.ccw")
        .exists());
    assert!(!env_dir.path().join("ignored").exists());
}

#[test]
fn parse_errors_exit_two_with_located_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ccm");
    fs::write(
        &bad,
        "model Broken {\n  component A {\n    port in T;\n  }\n}\n",
    )
    .unwrap();
    let out = bin()
        .args(["verify"])
        .arg(&bad)
        .arg(fixtures().join("userbutton.ccv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("bad.ccm:3:"), "stderr: {err}");
    assert!(err.contains("error:"));
}

#[test]
fn missing_input_file_exits_two() {
    let out = bin()
        .args(["verify", "/nonexistent/m.ccm", "/nonexistent/v.ccv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn batch_fixture_specification_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["batch"])
        .arg(fixtures().join("pumpstation.ccs"))
        .arg(fixtures().join("pumpstation.ccm"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("mandatory UserButton: satisfied -> pass"));
    assert!(text.contains("negative PCPumpingSystem: not satisfied -> pass"));
    assert!(text.trim_end().ends_with("result: pass"));
    // One witness file per witness of every distinct view.
    assert!(dir.path().join("UserButton_satisfaction_0.ccw").exists());
    assert!(dir
        .path()
        .join("SystemEmergencyController_missing_connection_3.ccw")
        .exists());
}

#[test]
fn batch_failing_entry_fails_and_prints_reasons() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.ccs");
    // A satisfied view under `negative` must fail the specification.
    fs::write(
        &spec,
        format!(
            "# inverted expectation\nnegative {}\n",
            fixtures().join("userbutton.ccv").display()
        ),
    )
    .unwrap();
    let out = bin()
        .args(["batch"])
        .arg(&spec)
        .arg(fixtures().join("pumpstation.ccm"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("negative UserButton: satisfied -> fail"));
    assert!(text.trim_end().ends_with("result: fail"));
}

#[test]
fn batch_alternative_group_needs_one_satisfied_member() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("m.ccm"),
        "model M {\n  component Root;\n}\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("good.ccv"),
        "view Good {\n  component Root;\n}\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("bad.ccv"),
        "view Bad {\n  component Nope;\n}\n",
    )
    .unwrap();

    let spec = dir.path().join("alt.ccs");
    fs::write(&spec, "alt:g good.ccv\nalt:g bad.ccv\n").unwrap();
    let out = bin()
        .args(["batch"])
        .arg(&spec)
        .arg(dir.path().join("m.ccm"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("group g: pass"));

    let spec2 = dir.path().join("alt2.ccs");
    fs::write(&spec2, "alt:g bad.ccv\n").unwrap();
    let out = bin()
        .args(["batch"])
        .arg(&spec2)
        .arg(dir.path().join("m.ccm"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("group g: fail"));
}

#[test]
fn batch_json_report_embeds_per_view_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["batch", "--format", "json"])
        .arg(fixtures().join("pumpstation.ccs"))
        .arg(fixtures().join("pumpstation.ccm"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["model"], "PumpStation");
    assert_eq!(doc["pass"], true);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(entries[0]["view"], "UserButton");
    assert_eq!(entries[0]["mode"], "mandatory");
    assert_eq!(entries[2]["mode"], "negative");
    assert_eq!(entries[2]["satisfied"], false);
    assert_eq!(entries[2]["pass"], true);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 4);
    assert_eq!(results[0]["view"], "UserButton");
    assert!(results[0]["witnesses"][0]["fragment"]
        .as_str()
        .unwrap()
        .starts_with("view W_sat_UserButton {"));
}

#[test]
fn bad_mode_in_specification_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.ccs");
    fs::write(&spec, "sometimes whatever.ccv\n").unwrap();
    let out = bin()
        .args(["batch"])
        .arg(&spec)
        .arg(fixtures().join("pumpstation.ccm"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("spec.ccs:1:"));
}

#[test]
fn generated_model_satisfies_its_unmutated_derived_view() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("g.ccm");
    let view = dir.path().join("g.ccv");
    let out = bin()
        .args([
            "gen-model",
            "--seed",
            "11",
            "--components",
            "12",
            "--ports",
            "30",
            "--max-connectors",
            "18",
            "-o",
        ])
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let out = bin()
        .args(["derive-view", "--seed", "4", "--keep-components", "5", "-o"])
        .arg(&view)
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let out = bin()
        .args(["verify"])
        .arg(&model)
        .arg(&view)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
}

#[test]
fn derive_view_logs_mutations_to_stderr_and_breaks_satisfaction() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("g.ccm");
    let view = dir.path().join("g.ccv");
    bin()
        .args(["gen-model", "--seed", "11", "--components", "12", "-o"])
        .arg(&model)
        .output()
        .unwrap();
    let out = bin()
        .args([
            "derive-view",
            "--seed",
            "4",
            "--keep-components",
            "5",
            "--mutate",
            "rename-component",
            "-o",
        ])
        .arg(&view)
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("mutation rename-component:"));
    let out = bin()
        .args(["verify"])
        .arg(&model)
        .arg(&view)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_mutation_name_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("g.ccm");
    bin()
        .args(["gen-model", "--seed", "1", "-o"])
        .arg(&model)
        .output()
        .unwrap();
    let out = bin()
        .args(["derive-view", "--mutate", "explode"])
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("explode"));
}

#[test]
fn infeasible_generator_parameters_exit_two() {
    let out = bin()
        .args(["gen-model", "--components", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn bench_writes_csv_with_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let json = dir.path().join("report.json");
    let out = bin()
        .args([
            "bench",
            "--sizes",
            "6",
            "--repeats",
            "2",
            "--seed",
            "5",
            "--csv",
        ])
        .arg(&csv)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let rows = fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("setup,size,repeat,verify_ms,max_witness_ms,n_reasons\n"));
    assert_eq!(rows.lines().count(), 1 + 2 * 2); // header + setups x repeats
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert_eq!(doc["summaries"].as_array().unwrap().len(), 2);
    assert!(stdout(&out).contains("mean_verify_ms"));
}
