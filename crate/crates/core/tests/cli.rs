use std::fs;
use std::process::Command;

use vslepian::cli::run;
use vslepian::io::{read_basis, read_coeffs, read_eigenvalues, read_grid, read_kernel, write_coeffs, CoeffKind};
use vslepian::{polar_cap_basis, Part};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("vslepian").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn shannon_from_fraction() {
    let (code, out, _) = call(&["shannon", "--fraction", "0.0581", "--L", "18"]);
    assert_eq!(code, 0);
    assert!(out.contains("predicted N_tangential 41.832000 rounded 42"), "{out}");
}

#[test]
fn cap_kernel_reports_shannon_numbers() {
    let (code, out, _) = call(&["kernel", "--cap", "40", "--L", "18", "--part", "tangential"]);
    assert_eq!(code, 0);
    assert!(out.contains("kernel N_tangential 84.2"), "{out}");
}

#[test]
fn solve_then_synth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, err) = call(&["solve", "--cap", "30", "--L", "6", "--part", "tangential", "--out", d]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("kind tangential L 6 count 96"), "{out}");
    let ev = read_eigenvalues(&fs::read_to_string(dir.path().join("eigenvalues.txt")).unwrap()).unwrap();
    let basis = read_basis(&fs::read_to_string(dir.path().join("basis.txt")).unwrap()).unwrap();
    let direct = polar_cap_basis(30f64.to_radians(), 6, Part::Tangential).unwrap();
    assert_eq!(basis.lambdas, direct.lambdas);
    assert_eq!(ev.len(), 96);

    let grid = dir.path().join("g1.grid");
    let basis_path = dir.path().join("basis.txt");
    let (code, _, err) = call(&[
        "synth", "--basis", basis_path.to_str().unwrap(), "--alpha", "1", "--step", "10", "--out", grid.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let g = read_grid(&fs::read_to_string(&grid).unwrap()).unwrap();
    assert_eq!((g.thetas.len(), g.phis.len()), (19, 37));
    let (code, _, _) = call(&["synth", "--basis", basis_path.to_str().unwrap(), "--alpha", "97", "--out", grid.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn quadrature_kernel_file_feeds_solve() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("box.txt");
    fs::write(&poly, "0 0\n40 0\n40 30\n0 30\n").unwrap();
    let kfile = dir.path().join("k.txt");
    let (code, out, err) = call(&[
        "kernel", "--polygon", poly.to_str().unwrap(), "--L", "4", "--part", "radial", "--out", kfile.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("trace"));
    let k = read_kernel(&fs::read_to_string(&kfile).unwrap()).unwrap();
    assert_eq!(k.dim(), 25);
    let (code, out, _) = call(&["solve", "--kernel", kfile.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("kind radial L 4 count 25"), "{out}");
}

#[test]
fn reconstruct_reports_error_and_bias() {
    let dir = tempfile::tempdir().unwrap();
    let basis = polar_cap_basis(40f64.to_radians(), 8, Part::Tangential).unwrap();
    let mut u = basis.coeffs(0).unwrap();
    u.axpy(0.3, &basis.coeffs(150).unwrap()).unwrap();
    let cfile = dir.path().join("u.coeff");
    fs::write(&cfile, write_coeffs(&u, CoeffKind::FullUvw).unwrap()).unwrap();
    let out_dir = dir.path().join("rec");
    let (code, out, err) = call(&[
        "reconstruct", "--coeffs", cfile.to_str().unwrap(), "--cap", "40", "--times-shannon", "1.5",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("kind tangential L 8 dim 160"), "{out}");
    let (v, _) = read_coeffs(&fs::read_to_string(out_dir.join("reconstruction.coeff")).unwrap()).unwrap();
    let mut d = v.clone();
    d.axpy(-1.0, &basis.coeffs(0).unwrap()).unwrap();
    assert!(d.norm_sq() < 1e-20);
    assert!(out_dir.join("input.grid").exists() && out_dir.join("report.txt").exists());
}

#[test]
fn usage_and_domain_errors_exit_one() {
    assert_eq!(call(&["kernel", "--L", "4"]).0, 1);
    assert_eq!(call(&["kernel", "--cap", "40", "--polygon", "x", "--L", "4"]).0, 1);
    let (code, _, err) = call(&["kernel", "--cap", "-5", "--L", "4"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: domain error"), "{err}");
    assert_eq!(call(&["shannon", "--fraction", "1.5", "--L", "4"]).0, 1);
    assert_eq!(call(&["solve", "--mask", "/nonexistent/mask.txt", "--L", "4"]).0, 1);
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn numerical_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let kfile = dir.path().join("bad.txt");
    // Eigenvalue 2 violates the concentration range.
    fs::write(&kfile, "KERNEL P 0 1\n2.0\n").unwrap();
    let (code, _, err) = call(&["solve", "--kernel", kfile.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_vslepian"))
        .args(["shannon", "--fraction", "0.0997", "--L", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("N_tangential 9.5712"));
    let bad = Command::new(env!("CARGO_BIN_EXE_vslepian")).arg("nonsense").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
