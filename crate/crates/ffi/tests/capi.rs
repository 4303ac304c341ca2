use std::ffi::c_char;
use std::f64::consts::PI;
use std::ptr;

use vslepian_ffi::*;

fn last_error() -> String {
    unsafe {
        let mut buf = vec![0 as c_char; 256];
        let n = vsl_last_error_message(buf.as_mut_ptr(), buf.len());
        let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
        String::from_utf8(bytes).unwrap()
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(vsl_xlm(0, 0, 1.0, &mut x), VslStatus::Ok);
        assert!((x - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(vsl_xlm(1, 2, 1.0, &mut x), VslStatus::Domain);
        assert!(last_error().contains("order"));
        assert_eq!(vsl_xlm(1, 0, 1.0, ptr::null_mut()), VslStatus::NullPointer);
        assert!((vsl_wigner3j(1, 1, 0, 0, 0, 0) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(vsl_wigner3j(2, 3, 7, 0, 0, 0), 0.0);
    }
}

#[test]
fn region_handles() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(vsl_region_polar_cap(PI / 3.0, &mut r), VslStatus::Ok);
        let mut a = 0.0;
        assert_eq!(vsl_region_area(r, &mut a), VslStatus::Ok);
        assert!((a - PI).abs() < 1e-14);
        let mut inside = false;
        assert_eq!(vsl_region_contains(r, 0.5, 1.0, &mut inside), VslStatus::Ok);
        assert!(inside);
        vsl_region_free(r);
        assert_eq!(vsl_region_polar_cap(-1.0, &mut r), VslStatus::Domain);

        let square = [0.0, 0.0, 90.0, 0.0, 90.0, 45.0, 0.0, 45.0];
        let sizes = [4usize];
        assert_eq!(vsl_region_polygons(square.as_ptr(), sizes.as_ptr(), 1, &mut r), VslStatus::Ok);
        assert_eq!(vsl_region_area(r, &mut a), VslStatus::Ok);
        assert!((a - PI / 2.0 * (PI / 4.0).sin()).abs() < 1e-14);
        vsl_region_free(r);
        vsl_region_free(ptr::null_mut());
    }
}

#[test]
fn basis_handles() {
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(vsl_basis_polar_cap(40f64.to_radians(), 6, VslPart::Tangential, &mut b), VslStatus::Ok);
        assert_eq!(vsl_basis_len(b), 2 * 49 - 2);
        assert_eq!(vsl_basis_dim(b), 2 * 49 - 2);
        let mut l0 = 0.0;
        let mut l1 = 0.0;
        assert_eq!(vsl_basis_eigenvalue(b, 0, &mut l0), VslStatus::Ok);
        assert_eq!(vsl_basis_eigenvalue(b, 1, &mut l1), VslStatus::Ok);
        assert!(l0 > 0.9 && l0 <= 1.0 && (l0 - l1).abs() < 1e-9);
        assert_eq!(vsl_basis_eigenvalue(b, 10_000, &mut l0), VslStatus::IndexOutOfRange);
        let mut col = vec![0.0; vsl_basis_dim(b)];
        assert_eq!(vsl_basis_column(b, 0, col.as_mut_ptr(), col.len()), VslStatus::Ok);
        let norm: f64 = col.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(vsl_basis_column(b, 0, col.as_mut_ptr(), 3), VslStatus::BufferTooSmall);
        vsl_basis_free(b);

        let mut r = ptr::null_mut();
        assert_eq!(vsl_region_polar_cap(PI, &mut r), VslStatus::Ok);
        assert_eq!(vsl_basis_region(r, 3, VslPart::Full, &mut b), VslStatus::Ok);
        assert_eq!(vsl_basis_len(b), 3 * 16 - 2);
        assert_eq!(vsl_basis_eigenvalue(b, 45, &mut l0), VslStatus::Ok);
        assert!((l0 - 1.0).abs() < 1e-12);
        vsl_basis_free(b);
        vsl_region_free(r);
    }
}

#[test]
fn shannon_numbers() {
    unsafe {
        let (mut t, mut r, mut q) = (0.0, 0.0, 0.0);
        assert_eq!(vsl_shannon_predicted(4.0 * PI, 18, &mut t, &mut r, &mut q), VslStatus::Ok);
        assert!((t - 1081.0).abs() < 1e-9 && (r - 361.0).abs() < 1e-9 && (q - 720.0).abs() < 1e-9);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vslepian.h")).unwrap();
    for name in ["vsl_xlm", "vsl_basis_polar_cap", "vsl_region_free", "VslStatus", "VslBasis"] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
