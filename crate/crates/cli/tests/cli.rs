use std::path::Path;
use std::process::{Command, Output};

use num_bigint::BigInt;
use num_rational::BigRational;

fn densework(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densework"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn density_of_a_slice_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = densework(&["density", "--set", "R:3", "--points", "31,1023"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    // 8 and 24 lie in R_3 below 32; 64 elements below 1024
    assert_eq!(stdout(&o), "n,rho_num,rho_den,rho_float\n31,1,16,0.0625\n1023,1,16,0.0625\n");
    let o = densework(&["density", "--set", "R:2", "--points", "31,1023"], dir.path());
    assert!(stdout(&o).contains("31,1,8,0.125"));
}

#[test]
fn density_against_another_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = densework(&["density", "--set", "evens", "--against", "elements:0,2,4,7", "--points", "9,99"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    // evens and {0,2,4,7} differ on 6, 7, 8 below 10
    assert!(stdout(&o).starts_with("n,symdiff_num,symdiff_den\n9,3,10\n"), "{}", stdout(&o));
}

#[test]
fn delta02_meets_its_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = densework(&["build-delta02", "--q", "const:1/2", "--steps", "1000", "--out", out.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let last = text.lines().last().unwrap();
    let f: Vec<BigInt> = last.split(',').map(|w| w.parse().unwrap()).collect();
    let rho = BigRational::new(f[3].clone(), f[4].clone());
    let q = BigRational::new(f[5].clone(), f[6].clone());
    let gap = if rho > q { rho - q } else { q - rho };
    assert!(gap <= BigRational::new(1.into(), 1000.into()));
    assert!(stdout(&o).contains("n = 1000"));

    let o = densework(&["build-delta02", "--q", "const:3/2", "--steps", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_simple_run_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = densework(&["run", "construction=simple", "--stages", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "stage,slice,event,value,restraint\n");
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for c in ["simple", "diag", "density1", "genpair", "interval"] {
        let mut docs = Vec::new();
        for i in 0..2 {
            let out = dir.path().join(format!("{c}{i}.csv"));
            let o = densework(
                &["run", &format!("construction={c}"), "--stages", "3000", "--intervals", "9", "--out", out.to_str().unwrap()],
                dir.path(),
            );
            assert_eq!(o.status.code(), Some(0), "{c}: {}", stderr(&o));
            docs.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(docs[0], docs[1], "{c}");
        assert!(!docs[0].is_empty());
    }
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("omega.txt"), "# identity: fall off with r0 = x\n").unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "construction=simple\nstages=20\nmachines=6\nadversaries=5:omega.txt\n",
    )
    .unwrap();
    let o = densework(&["run", "--config", "run.cfg", "--stages", "100"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().any(|l| l == "26,5,enter,26,"));
    assert!(stderr(&o).contains("100 stages"));

    let o = densework(&["run", "--config", "run.cfg"], dir.path());
    assert!(stderr(&o).contains("20 stages"));
    assert!(!stdout(&o).contains("26,5,enter"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run"],
        vec!["run", "construction=simple", "colour=blue"],
        vec!["run", "construction=simple", "--out", "missing/dir/t.csv"],
        vec!["density", "--set", "primes", "--points", "5"],
        vec!["density", "--set", "evens", "--points", "9,5"],
        vec!["nonsense"],
    ] {
        let o = densework(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn contradictory_listing_is_an_invariant_violation() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "m,b\n4,1\n4,0\n2,1\n").unwrap();
    let o = densework(&["decode-r", "--listing", "bad.csv", "--n-max", "3"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn encode_then_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = densework(&["encode-r", "--set", "elements:0,3,5", "--bound", "4096", "--format", "listing", "--out", "l.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = densework(&["decode-r", "--listing", "l.csv", "--n-max", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "n,bit\n0,1\n1,0\n2,0\n3,1\n4,0\n5,1\n6,0\n7,0\n");

    let o = densework(&["decode-r", "--set", "odds", "--n-max", "4"], dir.path());
    assert_eq!(stdout(&o), "n,bit\n0,0\n1,1\n2,0\n3,1\n");

    let o = densework(&["encode-r", "--set", "elements:1", "--bound", "16"], dir.path());
    assert_eq!(stdout(&o), "m,slice\n2,1\n6,1\n10,1\n14,1\n");
}

#[test]
fn coarse_decoding_recovers_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let o = densework(
        &["decode-coarse", "--target", "1,3,6", "--early", "0,2", "--stable-at", "100", "--stage", "65536"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("recovered 8/8"), "{}", stderr(&o));
    let o = densework(&["decode-coarse", "--set", "code:1", "--stage", "4096", "--n-max", "4"], dir.path());
    assert_eq!(stdout(&o), "n,decoded,target\n0,0,\n1,1,\n2,0,\n3,0,\n");
}

#[test]
fn operator_files_apply_and_compose() {
    let dir = tempfile::tempdir().unwrap();
    // W: 1 ← {0}, 2 ← {0,1}; V: 7 ← {1,2}, 8 ← ∅
    std::fs::write(dir.path().join("w.op"), "1:1\n2:3\n").unwrap();
    std::fs::write(dir.path().join("v.op"), "7:6\n8:0\n").unwrap();
    let o = densework(&["eop", "apply", "--operator", "w.op", "--input", "0,1"], dir.path());
    assert_eq!(stdout(&o), "n\n1\n2\n");
    let o = densework(&["eop", "compose", "--outer", "v.op", "--inner", "w.op", "--out", "vw.op"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = densework(&["eop", "apply", "--operator", "vw.op", "--input", "0,1"], dir.path());
    assert_eq!(stdout(&o), "n\n7\n8\n");
    let o = densework(&["eop", "apply", "--operator", "vw.op", "--input", "0"], dir.path());
    assert_eq!(stdout(&o), "n\n8\n");
}
