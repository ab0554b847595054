//! End-to-end tests of the `axk` binary: output contents, machine-format
//! round-trips, determinism, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn axk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axk"))
        .args(args)
        .env_remove("AXK_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn k_11_text_output() {
    let out = axk(&["k", "11"]);
    let text = stdout(&out);
    assert_eq!(exit_code(&out), 0);
    assert!(text.contains("finite of order 14400"), "{text}");
    assert!(text.contains("TR^3_{11-λ_4}(Z;2)"), "{text}");
    assert!(text.contains("TR^2_{11-λ_3}(Z;3)"), "{text}");
    assert!(text.contains("TR^2_{11-λ_5}(Z;5)"), "{text}");
    assert!(text.contains("Z/2 ⊕ Z/32 ⊕ Z/9 ⊕ Z/25"), "{text}");
    assert!(text.contains("proven"), "{text}");
}

#[test]
fn k_1_is_trivial() {
    let out = axk(&["k", "1"]);
    let text = stdout(&out);
    assert_eq!(exit_code(&out), 0);
    assert!(text.contains("= 0 (trivial)"), "{text}");
}

#[test]
fn k_13_is_conjectural() {
    let out = axk(&["k", "13"]);
    let text = stdout(&out);
    assert!(text.contains("518400"), "{text}");
    assert!(text.contains("conjectural"), "{text}");
    assert!(
        text.contains("Z/2 ⊕ Z/2 ⊕ Z/8 ⊕ Z/8 ⊕ Z/3 ⊕ Z/3 ⊕ Z/9 ⊕ Z/5 ⊕ Z/5"),
        "{text}"
    );
}

#[test]
fn k_even_degree_is_free_of_rank_one() {
    let out = axk(&["k", "10"]);
    let text = stdout(&out);
    assert!(text.contains("free of rank 1"), "{text}");
}

#[test]
fn k_records_round_trip_losslessly() {
    let out = axk(&["k", "11", "--format", "records"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(value["command"], "k");
    assert_eq!(value["inputs"]["q"], 11);
    assert_eq!(value["results"]["torsion_order"], "14400");
    assert_eq!(value["results"]["per_prime"]["2"], "64");
    assert_eq!(value["results"]["summands"][0]["r"], 3);
    assert_eq!(value["status"], "proven");
    // Reserializing reproduces the output byte for byte.
    let reprinted = serde_json::to_string_pretty(&value).unwrap();
    assert_eq!(text.trim_end(), reprinted);
}

#[test]
fn machine_output_is_deterministic() {
    for args in [
        vec!["k", "11", "--format", "records"],
        vec!["verify", "--max-i", "6", "--format", "records"],
        vec!["chart", "c4-integral-lambda4-deg9-10", "--truncate", "--degree", "9", "--format", "records"],
    ] {
        let first = axk(&args);
        let second = axk(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn k_csv_lists_summands() {
    let out = axk(&["k", "11", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q,rank,torsion_order,p,d,r,lambda_index,order_raw,order_p_part"
    );
    assert_eq!(lines.next().unwrap(), "11,0,14400,2,1,3,4,320,64");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn verify_sweep_passes_to_40() {
    let out = axk(&["verify", "--max-i", "40"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("verified 0 <= i <= 40"), "{text}");

    let out = axk(&["verify", "--max-i", "0"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn verify_reports_the_degree_11_order() {
    let out = axk(&["verify", "--max-i", "5"]);
    let text = stdout(&out);
    assert!(text.contains("K_11 order 14400"), "{text}");
}

#[test]
fn verify_csv_is_a_two_column_table_consistent_with_records() {
    let out = axk(&["verify", "--max-i", "5", "--format", "csv"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,order");
    assert_eq!(lines.len(), 13); // header + degrees 0..=11
    assert!(lines.contains(&"11,14400"));
    assert!(lines.contains(&"10,1"));

    let records = axk(&["verify", "--max-i", "5", "--format", "records"]);
    let value: serde_json::Value =
        serde_json::from_str(&stdout(&records)).expect("valid json");
    assert_eq!(value["results"]["all_pass"], true);
    let entries = value["results"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 6);
    for entry in entries {
        let q = entry["odd_degree"].as_u64().unwrap();
        let order = entry["odd_order"].as_str().unwrap();
        assert!(lines.contains(&format!("{q},{order}").as_str()));
    }
}

#[test]
fn tr_summand_with_level() {
    let out = axk(&["tr", "--i", "5", "--p", "2", "--d", "1"]);
    let text = stdout(&out);
    assert_eq!(exit_code(&out), 0);
    assert!(text.contains("level r = 3"), "{text}");
    assert!(text.contains("raw order 320"), "{text}");
    assert!(text.contains("p-part 64 = 2^6"), "{text}");
}

#[test]
fn tr_trivial_when_d_exceeds_i() {
    let out = axk(&["tr", "--i", "5", "--p", "2", "--d", "7"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("trivial"), "{}", stdout(&out));
}

#[test]
fn tr_lambda_6_summand_at_p_3() {
    let out = axk(&["tr", "--i", "6", "--p", "3", "--d", "2"]);
    let text = stdout(&out);
    assert!(text.contains("lambda index 6"), "{text}");
    assert!(text.contains("p-part 3"), "{text}");
}

#[test]
fn tr_rejects_composite_p_and_shared_factors() {
    let out = axk(&["tr", "--i", "5", "--p", "4", "--d", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));

    let out = axk(&["tr", "--i", "5", "--p", "3", "--d", "6"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("coprime"));
}

#[test]
fn unknown_flags_exit_nonzero_with_usage() {
    let out = axk(&["k", "11", "--frobnicate"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn discriminate_determines_the_degree_11_two_part() {
    let out = axk(&[
        "discriminate", "--order-exp", "6", "--summands", "2", "--p", "2", "--v", "2",
        "--observed", "8",
    ]);
    let text = stdout(&out);
    assert_eq!(exit_code(&out), 0);
    assert!(text.contains("structure determined: Z/2 ⊕ Z/32"), "{text}");
}

#[test]
fn discriminate_without_observation_lists_candidates() {
    let out = axk(&["discriminate", "--order-exp", "4", "--summands", "2", "--p", "2"]);
    let text = stdout(&out);
    assert!(text.contains("Z/2 ⊕ Z/8, Z/4 ⊕ Z/4"), "{text}");
    assert!(text.contains("2 candidates remain"), "{text}");
}

#[test]
fn discriminate_with_inconsistent_observation_exits_2() {
    let out = axk(&[
        "discriminate", "--order-exp", "6", "--summands", "2", "--p", "2", "--v", "2",
        "--observed", "5",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stdout(&out).contains("no candidate"), "{}", stdout(&out));
}

#[test]
fn chart_audit_matches_bundled_expectations() {
    let out = axk(&[
        "chart", "c4-mod4-lambda4-deg11", "--truncate", "--degree", "11", "--expect", "8",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("degree 11: order 8"), "{text}");
    assert!(text.contains("— match"), "{text}");

    let out = axk(&["chart", "c4-mod4-lambda4-deg11", "--degree", "11", "--expect", "4"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn chart_mismatch_exit_codes_distinguish_conjectural_data() {
    // The mod 4 chart is fully proven: a mismatch exits 2.
    let out = axk(&["chart", "c4-mod4-lambda4-deg11", "--degree", "11", "--expect", "5"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stdout(&out).contains("MISMATCH"));

    // The degree 9 fixed-point range rests on a conjectural long
    // differential: a mismatch exits 3.
    let out = axk(&[
        "chart", "c4-integral-lambda4-deg9-10", "--truncate", "--degree", "9", "--expect", "999",
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn chart_assembles_the_conjectural_structures() {
    let out = axk(&[
        "chart", "c4-integral-lambda4-deg9-10", "--truncate", "8", "--degree", "9",
    ]);
    let text = stdout(&out);
    assert!(text.contains("assembles to Z/2 ⊕ Z/16 (conjectural)"), "{text}");

    let out = axk(&["chart", "c4-integral-lambda4-deg13", "--truncate", "--degree", "13"]);
    let text = stdout(&out);
    assert!(text.contains("assembles to Z/2 ⊕ Z/8 (conjectural)"), "{text}");
}

#[test]
fn chart_grid_render_circles_the_truncated_survivors() {
    let out = axk(&[
        "chart", "c4-integral-lambda4-deg9-10", "--truncate", "--degree", "9",
        "--render", "grid",
    ]);
    let text = stdout(&out);
    for survivor in [
        "(t^-3 la1[2^1])",
        "(t^-1 la1 mu1[2^1])",
        "(t^3 la1 mu1^3[2^1])",
        "(t^7 la1 mu1^5[2^2])",
        "(t^11 la1 mu1^7[2^1])",
    ] {
        assert!(text.contains(survivor), "missing {survivor} in:\n{text}");
    }
    // The page 5 source dies and is not circled.
    assert!(text.contains("t^4 u2 la1 mu1^4[2^1]"), "{text}");
    assert!(!text.contains("(t^4 u2 la1 mu1^4[2^1])"), "{text}");
}

#[test]
fn chart_svg_render_owns_stdout() {
    let out = axk(&["chart", "c4-mod4-lambda4-deg11", "--render", "svg"]);
    let text = stdout(&out);
    // Only the figure on stdout, so it can be redirected to a .svg file;
    // the summary goes to stderr.
    assert!(text.starts_with("<svg xmlns="), "{text}");
    assert!(text.trim_end().ends_with("</svg>"), "{text}");
    assert!(text.contains("t^-6"), "{text}");
    assert!(text.contains("marker-end"), "{text}");
    // Two differential arrows.
    assert_eq!(text.matches("<line").count(), 2, "{text}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("validated"), "{err}");
}

#[test]
fn chart_loads_from_a_path_and_from_the_data_dir() {
    let dir = std::env::temp_dir().join(format!("axk-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    // Save a bundled chart to a file and load it back through the path.
    let text = axk_core::chart::load_bundled("c2-integral-lambda4-deg9")
        .unwrap()
        .unwrap()
        .save_string();
    let path = dir.join("comparison.chart");
    std::fs::write(&path, &text).unwrap();

    let out = axk(&["chart", path.to_str().unwrap(), "--truncate", "--degree", "9"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("degree 9: order 2"), "{}", stdout(&out));

    // Resolve by name through AXK_DATA_DIR.
    let out = Command::new(env!("CARGO_BIN_EXE_axk"))
        .args(["chart", "comparison", "--degree", "9"])
        .env("AXK_DATA_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("degree 9: order 1"), "{}", stdout(&out));

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn empty_chart_renders_an_empty_grid() {
    let dir = std::env::temp_dir().join(format!("axk-cli-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("empty.chart");
    std::fs::write(
        &path,
        "chart \"empty\"\nprime 2\nsubgroup_exp 1\ncoefficients integral\nlambda_shift 0\n",
    )
    .unwrap();
    let out = axk(&["chart", path.to_str().unwrap(), "--render", "grid"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("(empty chart)"), "{}", stdout(&out));

    let out = axk(&["chart", path.to_str().unwrap(), "--render", "svg"]);
    assert!(stdout(&out).contains("empty chart"), "{}", stdout(&out));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn chart_with_unknown_name_exits_1() {
    let out = axk(&["chart", "no-such-chart"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}

#[test]
fn chart_rejects_invalid_files_with_location() {
    let dir = std::env::temp_dir().join(format!("axk-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.chart");
    std::fs::write(
        &path,
        "chart \"bad\"\nprime 2\nsubgroup_exp 1\ncoefficients integral\nlambda_shift 0\nclass \"a\" filtration 0 degree 4 order_exp 3\n",
    )
    .unwrap();
    let out = axk(&["chart", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6"), "{err}");
    assert!(err.contains("exceeding the coefficient bound"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn chart_records_include_the_audit() {
    let out = axk(&[
        "chart", "c4-integral-lambda4-deg13", "--truncate", "--degree", "13",
        "--expect", "16", "--format", "records",
    ]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["results"]["audit"]["matched"], true);
    assert_eq!(value["results"]["audit"]["conjectural"], true);
    assert_eq!(value["results"]["degree"]["assembled"], "Z/2 ⊕ Z/8");
    assert_eq!(value["status"], "conjectural");
    assert_eq!(value["results"]["survivors"].as_array().unwrap().len(), 4);
}

#[test]
fn bundled_charts_exist_for_the_documented_names() {
    for name in [
        "c4-mod4-lambda4-deg11",
        "c4-integral-lambda4-deg9-10",
        "c4-integral-lambda4-deg13",
        "c2-integral-lambda4-deg9",
    ] {
        assert!(
            axk_core::chart::bundled_chart(name).is_some(),
            "missing bundled chart {name}"
        );
        assert!(Path::new("../axk-core/data/charts")
            .join(format!("{name}.chart"))
            .exists());
    }
}
