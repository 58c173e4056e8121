use std::io::Write;
use std::process::{Command, Output};

fn equilab(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_equilab"));
    c.args(args).env_remove("EQUILAB_SEED");
    c
}

fn output(c: &mut Command) -> Output {
    c.output().expect("runs the binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const MC: &[&str] = &["mc-solv", "--rho", "6", "--n", "20000", "--bins", "8"];

#[test]
fn mc_solv_requires_a_seed() {
    let o = output(&mut equilab(MC));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn seed_precedence_is_flag_then_config_then_env() {
    let with_flag = |s: &str| stdout(&output(equilab(MC).args(["--seed", s])));
    let cfg = config("seed = 7\n");
    let from_env = stdout(&output(equilab(MC).env("EQUILAB_SEED", "7")));
    let from_cfg = stdout(&output(
        equilab(MC).env("EQUILAB_SEED", "8").args(["--config"]).arg(cfg.path()),
    ));
    let flag_wins = stdout(&output(
        equilab(MC)
            .env("EQUILAB_SEED", "8")
            .args(["--seed", "7", "--config"])
            .arg(cfg.path()),
    ));
    let seven = with_flag("7");
    assert_eq!(from_env, seven);
    assert_eq!(from_cfg, seven);
    assert_eq!(flag_wins, seven);
    assert_ne!(with_flag("8"), seven);
}

#[test]
fn config_values_apply_and_flags_override() {
    let cfg = config("# small sweep\nrhos = 8\nrho_primes = 2, 4\n");
    let from_cfg = stdout(&output(equilab(&["measure-gap", "--config"]).arg(cfg.path())));
    let flags = stdout(&output(&mut equilab(&[
        "measure-gap",
        "--rhos",
        "8",
        "--rho-primes",
        "2,4",
    ])));
    assert_eq!(from_cfg, flags);
    let over = stdout(&output(
        equilab(&["measure-gap", "--rho-primes", "2", "--config"]).arg(cfg.path()),
    ));
    assert_eq!(over.lines().count(), 2);
}

#[test]
fn bad_config_and_parameters_exit_with_2() {
    let cfg = config("radius = 3\n");
    let o = output(equilab(&["flows-check", "--config"]).arg(cfg.path()));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        output(&mut equilab(&["limit-integral", "--tol", "0"])).status.code(),
        Some(2)
    );
    assert_eq!(
        output(&mut equilab(&["limit-integral", "--tol", "-1e-3"]))
            .status
            .code(),
        Some(2)
    );
    let singular = output(equilab(MC).args(["--seed", "1", "--lattice", "1", "1", "0", "1"]));
    assert_eq!(singular.status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_1_and_names_it() {
    // ρ' = 2 after ρ' = 4 breaks the decreasing-gap check
    let o = output(&mut equilab(&["measure-gap", "--rhos", "8", "--rho-primes", "4,2"]));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("violated criteria: gap-decreasing"), "{err}");
    assert!(!o.stdout.is_empty());
}

#[test]
fn lattice_flag_accepts_negative_entries() {
    let base = stdout(&output(equilab(MC).args(["--seed", "3"])));
    let neg = output(equilab(MC).args(["--seed", "3", "--lattice", "-3", "1", "-1", "0"]));
    assert!(neg.status.success(), "{}", String::from_utf8_lossy(&neg.stderr));
    // the t-marginal does not see the lattice
    assert_eq!(stdout(&neg), base);
}

#[test]
fn out_flag_writes_the_csv_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flows.csv");
    let o = output(equilab(&["flows-check", "--out"]).arg(&path));
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,s,conjugation_residual,flow_residual\n"));
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn limit_integral_error_shrinks_with_tolerance() {
    let diff = |tol: &str| {
        let text = stdout(&output(&mut equilab(&["limit-integral", "--tol", tol])));
        let row = text.lines().nth(1).unwrap().to_string();
        row.split(',').nth(3).unwrap().parse::<f64>().unwrap().abs()
    };
    let (coarse, fine) = (diff("1e-4"), diff("1e-10"));
    assert!(coarse <= 1e-4 && fine <= 1e-10);
    assert!(fine <= coarse / 2.0, "{coarse} -> {fine}");
}

#[test]
fn flows_residuals_are_stable_under_grid_refinement() {
    let max = |grid: &str| {
        let text = stdout(&output(&mut equilab(&["flows-check", "--grid", grid])));
        text.lines()
            .skip(1)
            .flat_map(|l| {
                l.split(',')
                    .skip(2)
                    .map(|v| v.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    };
    let coarse = max("-2,-1,0.5,1,3");
    let fine = max("-2,-1.5,-1,-0.25,0.5,0.75,1,2,3");
    assert!(coarse < 1e-12 && fine < 1e-12);
}

#[test]
fn default_gap_sits_within_1e8_of_its_normalizer_bound() {
    let text = stdout(&output(&mut equilab(&["measure-gap"])));
    let mut r = csv::Reader::from_reader(text.as_bytes());
    for row in r.records() {
        let row = row.unwrap();
        let (gap, bound): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
        assert!(gap <= bound && bound - gap < 1e-8, "{gap} vs {bound}");
    }
}
