use css_blowup::cli::{run, write_output, Check, Command, CommandOptions, GridKind, RunConfig, KEYS};
use css_blowup::error::CssError;
use css_blowup::field::ComplexField;
use num_complex::Complex64;
use std::process::Command as Process;

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_css-blowup"))
}

#[test]
fn empty_config_gives_documented_defaults() {
    let cfg = RunConfig::parse("").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.grid_n, 4096);
    assert_eq!(cfg.grid_r_max, 100.0);
    assert_eq!(cfg.grid_kind, GridKind::Log);
    assert_eq!(cfg.q, Complex64::new(1.0, 0.0));
    assert_eq!(cfg.nu, Complex64::new(2.0, 0.0));
    assert_eq!(cfg.tau, -0.1);
    assert_eq!(cfg.window, 0.075);
    assert_eq!(cfg.dt_max, 1e-4);
    assert_eq!(cfg.c_cfl, 0.1);
    let help = RunConfig::help_text();
    for (key, default, _) in KEYS {
        assert!(help.contains(key) && help.contains(default), "{key} missing from help");
    }
}

#[test]
fn config_lines_comments_and_whitespace() {
    let cfg = RunConfig::parse("# header\n grid.n = 512 # trailing\n\ngrid.kind=uniform\nspec.nu_im = -1\n").unwrap();
    assert_eq!(cfg.grid_n, 512);
    assert_eq!(cfg.grid_kind, GridKind::Uniform);
    assert_eq!(cfg.nu, Complex64::new(2.0, -1.0));
}

#[test]
fn bad_configs_are_config_errors() {
    for text in [
        "grid.m = 3",
        "grid.n = 10\ngrid.n = 20",
        "grid.n",
        "grid.n = many",
        "grid.n = 4",
        "grid.kind = spiral",
        "grid.r_max = -1",
        "spec.q_re = 0",
        "spec.nu_re = -1",
        "time.tau = 0.1",
        "time.window = 0.09",
        "solver.c_cfl = 0",
        "solver.dt_max = nan",
        "out.dir =",
    ] {
        match RunConfig::parse(text) {
            Err(CssError::Config(_)) => {}
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}

#[test]
fn checks_compare_inclusively() {
    assert!(Check::at_most("a", 1.0, 1.0).pass);
    assert!(!Check::at_most("a", 1.0 + 1e-12, 1.0).pass);
    assert!(Check::between("b", 0.5, 0.5, 1.5).pass);
    assert!(!Check::between("b", f64::NAN, 0.0, 1.0).pass);
    assert!(Check::at_least("c", 2.0, 1.0).pass);
    assert!(!Check::holds("d", false).pass);
}

#[test]
fn soliton_check_reports_the_vortex_identities() {
    let out = run(Command::SolitonCheck, &RunConfig::default(), &CommandOptions::default()).unwrap();
    let names: Vec<&str> = out.summary.checks.iter().map(|c| c.name.as_str()).collect();
    for key in ["E_Q", "M_Q_over_8pi", "LQ_rho_resid"] {
        assert!(names.contains(&key), "{key} missing");
    }
    assert!(out.summary.pass, "{:?}", out.failures());
    assert_eq!(out.summary.schema, 1);
}

#[test]
fn specfun_check_at_nu_two_reports_unit_p() {
    let options = CommandOptions { nu: Some(Complex64::new(2.0, 0.0)), ..Default::default() };
    let out = run(Command::SpecfunCheck, &RunConfig::default(), &options).unwrap();
    let p = out.summary.data["p"].as_array().unwrap();
    assert!((p[0].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!(p[1].as_f64().unwrap().abs() <= 1e-12);
    assert!(out.summary.pass);
}

#[test]
fn summaries_and_tables_are_deterministic() {
    let cfg = RunConfig::parse("grid.n = 512").unwrap();
    for command in [Command::SolitonCheck, Command::SpecfunCheck, Command::ModOde, Command::Transform] {
        let a = run(command, &cfg, &CommandOptions::default()).unwrap();
        let b = run(command, &cfg, &CommandOptions::default()).unwrap();
        assert_eq!(a.summary_json().unwrap(), b.summary_json().unwrap());
        assert_eq!(a.tables, b.tables);
    }
}

#[test]
fn output_files_are_written_without_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Command::SpecfunCheck, &RunConfig::default(), &CommandOptions::default()).unwrap();
    let files = write_output(&out, dir.path()).unwrap();
    assert_eq!(files.len(), 1 + out.tables.len());
    let json = std::fs::read_to_string(dir.path().join("specfun-check.json")).unwrap();
    assert_eq!(json, out.summary_json().unwrap());
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
}

#[test]
fn transform_reads_a_field_csv() {
    let dir = tempfile::tempdir().unwrap();
    // The transform at tau = -0.1 dilates the data tenfold, so the grid must reach r = 100.
    let cfg = RunConfig::default();
    let out = run(Command::Transform, &cfg, &CommandOptions::default()).unwrap();
    assert!(out.summary.pass, "{:?}", out.failures());
    let grid = cfg.grid().unwrap();
    let u = ComplexField::from_fn(grid, 0, |r| Complex64::new(1.0, 0.5 * r) * (-r * r).exp());
    let path = dir.path().join("u.csv");
    u.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    let options = CommandOptions { input: Some(path), ..Default::default() };
    let again = run(Command::Transform, &cfg, &options).unwrap();
    assert!(again.summary.pass, "{:?}", again.failures());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let status = binary().args(["--out", dir.path().to_str().unwrap(), "specfun-check", "--nu", "2"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("specfun-check.json").exists());

    let status = binary().args(["--set", "grid.bogus=1", "soliton-check"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "time.tau = 0.5\n").unwrap();
    let status = binary().args(["--config", cfg.to_str().unwrap(), "soliton-check"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let status = binary().args(["specfun-check", "--nu", "two"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // The default window collapses the modulation ODE; the failing check is named on stderr.
    let output = binary().args(["--out", dir.path().to_str().unwrap(), "mod-ode"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("lambda_ratio_end"));
}

#[test]
fn help_lists_subcommands_and_keys() {
    let output = binary().arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&output.stdout);
    for c in Command::ALL {
        assert!(text.contains(c.name()), "{} missing", c.name());
        assert_eq!(Command::from_name(c.name()), Some(c));
    }
    assert!(text.contains("solver.c_cfl"));
}
