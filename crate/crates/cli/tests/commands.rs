use std::fs;

use clap::Parser;
use derham_cli::table::ChartTable;
use derham_cli::{run, Cli, CliError};

fn exec(args: &[&str]) -> Result<derham_cli::Outcome, CliError> {
    let mut full = vec!["derham"];
    full.extend_from_slice(args);
    run(&Cli::try_parse_from(full).expect("arguments parse"))
}

fn report(args: &[&str]) -> String {
    let mut a = vec!["--no-cache"];
    a.extend_from_slice(args);
    exec(&a).unwrap().report
}

fn betti_line(r: &str) -> &str {
    r.lines().find_map(|l| l.strip_prefix("betti ")).expect("betti line")
}

#[test]
fn open_conic_complement() {
    let r = report(&["open", "--vars", "x,y,z", "--poly", "x^2+y*z"]);
    assert_eq!(betti_line(&r), "1 0 0 0 0");
    assert!(r.contains("H0 dim=1\n") && r.contains("H4 dim=0\n"));
}

#[test]
fn closed_cubic() {
    let r = report(&["closed", "--vars", "x,y,z", "--poly", "x^2*y+y^2*z+z^2*x"]);
    assert_eq!(betti_line(&r), "1 2 1");
    assert!(r.lines().filter(|l| l.starts_with("sequence")).all(|l| l.ends_with("(alternating sum 0)")));
}

#[test]
fn affine_line() {
    let r = report(&["affine", "--vars", "x", "--poly", "x"]);
    assert_eq!(betti_line(&r), "1 1");
    assert!(r.contains("H1 dim=1\n"));
}

#[test]
fn compact_of_a_point() {
    let r = report(&["compact", "--vars", "x", "--poly", "x"]);
    assert_eq!(betti_line(&r), "1 0 0");
}

#[test]
fn locally_closed_conic() {
    let r = report(&["locally-closed", "--vars", "x,y,z", "--poly", "x^2+y*z", "--minus", "x"]);
    assert_eq!(betti_line(&r), "1 1 0");
    assert!(r.contains("row H(Z) 2 0 0 0 0\n"));
}

#[test]
fn toric_inputs_agree() {
    let by_cox = report(&["toric", "--rays", "1,0;0,1;-1,2;0,-1", "--cox", "x,y,z,w", "--poly", "w-x^2*y+z^2*y"]);
    let by_chars = report(&[
        "toric", "--rays", "1,0;0,1;-1,2;0,-1", "--cox", "x,y,z,w", "--characters", "1-s^2*t+t", "--twist", "0,0,0,1",
    ]);
    assert_eq!(betti_line(&by_cox), "1 0 1 0 0");
    assert_eq!(by_cox, by_chars);
    let whole = report(&["toric", "--rays", "1,0;0,1;-1,2;0,-1"]);
    assert_eq!(betti_line(&whole), "1 0 2 0 1");
}

#[test]
fn cup_table_on_the_plane() {
    let r = report(&["cup", "--vars", "x,y,z"]);
    assert_eq!(betti_line(&r), "1 0 1 0 1");
    let square = r.lines().find(|l| l.starts_with("cup 2.0 * 2.0 = ")).unwrap();
    assert_ne!(square, "cup 2.0 * 2.0 = (0)");
}

#[test]
fn reports_are_deterministic() {
    let args = ["open", "--vars", "x,y,z", "--poly", "x^2*y+y^2*z+z^2*x"];
    assert_eq!(report(&args), report(&args));
}

#[test]
fn warm_cache_matches_cold() {
    let ws = tempfile::tempdir().unwrap();
    let w = ws.path().to_str().unwrap();
    let args = ["--workspace", w, "open", "--vars", "x,y,z", "--poly", "x^2*y+y^2*z+z^2*x"];
    let cold = exec(&args).unwrap();
    assert_eq!(cold.cache_hits, 0);
    let warm = exec(&args).unwrap();
    assert!(warm.cache_hits > 0);
    assert!(warm.warnings.is_empty());
    assert_eq!(cold.report, warm.report);
    assert_eq!(cold.report, report(&args[2..]));
}

#[test]
fn corrupt_cache_is_recomputed() {
    let ws = tempfile::tempdir().unwrap();
    let w = ws.path().to_str().unwrap();
    let args = ["--workspace", w, "open", "--vars", "x,y,z", "--poly", "x^2+y*z"];
    let cold = exec(&args).unwrap();
    for dir in fs::read_dir(ws.path()).unwrap() {
        for f in fs::read_dir(dir.unwrap().path()).unwrap() {
            let p = f.unwrap().path();
            let s = fs::read_to_string(&p).unwrap();
            fs::write(&p, s.replace("gen 0 1 : 1 / D^0", "gen 0 1 : u0 / D^0")).unwrap();
        }
    }
    let again = exec(&args).unwrap();
    assert!(!again.warnings.is_empty());
    assert_eq!(cold.report, again.report);
}

#[test]
fn table_files_parse_back() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let r = exec(&["--no-cache", "--table", o, "open", "--vars", "x,y,z", "--poly", "x^2+y*z"]).unwrap();
    assert_eq!(r.tables_written, 7);
    for f in fs::read_dir(out.path()).unwrap() {
        let src = fs::read_to_string(f.unwrap().path()).unwrap();
        let t = ChartTable::parse(&src, 2).unwrap();
        assert_eq!(t.serialize(), src);
        assert!(src.lines().any(|l| l.starts_with("chart ")));
    }
}

#[test]
fn parse_errors_carry_position() {
    let e = exec(&["--no-cache", "open", "--vars", "x,y,z", "--poly", "x^2+y*"]).unwrap_err();
    assert_eq!(e.to_string(), "--poly: parse error at position 6: unexpected end of input");
}

#[test]
fn caps_fail_loudly() {
    let e = exec(&["--no-cache", "--max-gb-steps", "3", "open", "--vars", "x,y,z", "--poly", "x^2+y*z"]).unwrap_err();
    assert!(e.to_string().contains("Bernstein-Sato stage"), "{e}");
    let e = exec(&["--no-cache", "--max-level", "0", "open", "--vars", "x,y,z", "--poly", "x^2*y+y^2*z+z^2*x"])
        .unwrap_err();
    assert!(e.to_string().contains("exhaustion level cap 0"), "{e}");
}

#[test]
fn rejects_unknown_command() {
    assert!(Cli::try_parse_from(["derham", "plot"]).is_err());
}
