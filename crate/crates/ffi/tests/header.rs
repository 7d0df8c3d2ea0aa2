use std::path::Path;
use std::process::Command;

fn header() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/padic_prob.h");
    std::fs::read_to_string(path).expect("header is generated by the build script")
}

#[test]
fn declares_every_export() {
    let h = header();
    for name in [
        "pp_last_error_message",
        "pp_string_free",
        "pp_valuation",
        "pp_selector_parse",
        "pp_selector_free",
        "pp_collective_from_bits",
        "pp_collective_from_file",
        "pp_collective_free",
        "pp_verify_thm31",
        "pp_verify_thm32",
        "pp_report_len",
        "pp_report_converging",
        "pp_report_row",
        "pp_report_json",
        "pp_report_free",
        "pp_randomness_test",
        "pp_integrate_digit_weight",
        "pp_gamma1_bounded",
    ] {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    for item in [
        "typedef struct PpSelector PpSelector;",
        "typedef struct PpCollective PpCollective;",
        "typedef struct PpReport PpReport;",
        "PP_STATUS_OK = 0",
        "PP_STATUS_HYPOTHESIS = 3",
        "PP_STATUS_INSUFFICIENT_DATA = 4",
        "PP_VALUATION_INFINITE",
    ] {
        assert!(h.contains(item), "{item} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"padic_prob.h\"\nint main(void) { PpSelector *s = 0; (void)s; return PP_STATUS_OK; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let o = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
