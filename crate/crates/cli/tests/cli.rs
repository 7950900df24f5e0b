use std::path::Path;
use std::process::Command;

fn qlattice(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qlattice")).args(args).output().unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let out = out.to_str().unwrap();
    assert_eq!(qlattice(&["spectrum", "--out", out]).status.code(), Some(0));
    assert_eq!(qlattice(&["spectrum", "--n", "0", "--out", out]).status.code(), Some(2));
    assert_eq!(qlattice(&["spectrum", "--ell", "1.5", "--out", out]).status.code(), Some(2));
    assert_eq!(qlattice(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qlattice(&["spectrum", "--out", "/nonexistent/dir/s.json"]).status.code(), Some(3));
    assert_eq!(qlattice(&["validate", "--out", dir.path().join("v.json").to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 3\nell = 0.25\nk-points = 10\n").unwrap();
    let out = dir.path().join("chi.csv");
    let status = qlattice(&["chi-sweep", "--config", cfg.to_str().unwrap(), "--k-points", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let rows = std::fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert_eq!(rows, 3 * 7);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(qlattice(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn table_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let chi = d.join("chi.csv");
    let decay = d.join("decay.csv");
    let decay_full = d.join("decay_full.csv");
    qlattice(&["chi-sweep", "--k-points", "5", "--out", chi.to_str().unwrap()]);
    qlattice(&["decay-sweep", "--points", "5", "--out", decay.to_str().unwrap()]);
    qlattice(&[
        "decay-sweep",
        "--points",
        "5",
        "--both-branches",
        "--mu",
        "1",
        "--epsilon-d",
        "1",
        "--area",
        "1",
        "--out",
        decay_full.to_str().unwrap(),
    ]);
    assert_eq!(header(&chi), "l_index,l_value,omega_k_ghz,re_chi,im_chi,abs_chi,arg_chi_rad");
    assert_eq!(header(&decay), "ell,omega_q_ghz,s_kq_abs,s_zero_abs,gamma_normalized");
    assert_eq!(header(&decay_full), "ell,omega_q_ghz,s_kq_abs,s_zero_abs,gamma_normalized,gamma_physical_ghz,branch");
}

#[test]
fn uncoupled_dynamics_stays_excited() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dyn.csv");
    let status = qlattice(&["dynamics", "--kappa", "0", "--modes", "51", "--t-final", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let alpha_sq: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((alpha_sq - 1.0).abs() < 1e-12);
    }
}
