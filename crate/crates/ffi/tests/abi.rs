use k2local_ffi::*;
use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

fn last_error() -> String {
    let p = k2_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn witt_handles() {
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(k2_witt_omega(8, 0, &mut w), K2Status::Ok);
        // omega^8 = 1: square three times
        let mut acc = w;
        for _ in 0..3 {
            let mut next = ptr::null_mut();
            assert_eq!(k2_witt_mul(acc, acc, &mut next), K2Status::Ok);
            if acc != w {
                k2_witt_free(acc);
            }
            acc = next;
        }
        let (mut c0, mut c1) = (0, 0);
        assert_eq!(k2_witt_coords(acc, &mut c0, &mut c1), K2Status::Ok);
        assert_eq!((c0, c1), (1, 0));
        let mut n = 0;
        assert_eq!(k2_witt_norm(w, &mut n), K2Status::Ok);
        // the norm of a primitive 8th root of unity is a primitive square root of unity
        assert_eq!(n, 3u64.pow(8) - 1);
        k2_witt_free(acc);
        k2_witt_free(w);

        let mut three = ptr::null_mut();
        assert_eq!(k2_witt_new(3, 0, 8, &mut three), K2Status::Ok);
        let mut inv = ptr::null_mut();
        assert_eq!(k2_witt_inverse(three, &mut inv), K2Status::NotAUnit);
        assert!(inv.is_null());
        assert!(!last_error().is_empty());
        k2_witt_free(three);
        k2_witt_free(ptr::null_mut());
    }
}

#[test]
fn group_handles() {
    unsafe {
        let mut a = ptr::null_mut();
        assert_eq!(k2_g2_element_a(8, 0, &mut a), K2Status::Ok);
        let mut ord = 0;
        assert_eq!(k2_g2_order(a, 24, &mut ord), K2Status::Ok);
        assert_eq!(ord, 3);
        let mut det = 99;
        assert_eq!(k2_g2_reduced_det(a, &mut det), K2Status::Ok);
        assert_eq!(det, 0);

        let mut four = ptr::null_mut();
        assert_eq!(k2_g2_new(4, 0, 0, 0, false, 8, &mut four), K2Status::Ok);
        assert_eq!(k2_g2_reduced_det(four, &mut det), K2Status::Ok);
        assert_eq!(det, 2);

        let mut phi = ptr::null_mut();
        assert_eq!(k2_g2_phi(8, &mut phi), K2Status::Ok);
        let mut phi2 = ptr::null_mut();
        assert_eq!(k2_g2_mul(phi, phi, &mut phi2), K2Status::Ok);
        assert_eq!(k2_g2_order(phi2, 4, &mut ord), K2Status::Ok);
        assert_eq!(ord, 1);
        let mut inv = ptr::null_mut();
        assert_eq!(k2_g2_inverse(a, &mut inv), K2Status::Ok);
        assert_eq!(k2_g2_order(inv, 24, &mut ord), K2Status::Ok);
        assert_eq!(ord, 3);

        let mut bad = ptr::null_mut();
        assert_eq!(k2_g2_new(3, 0, 1, 0, false, 8, &mut bad), K2Status::NotAUnit);
        assert_eq!(k2_g2_element_a(8, 2, &mut bad), K2Status::InvalidArgument);
        assert_eq!(k2_g2_element_a(0, 0, &mut bad), K2Status::InvalidArgument);
        assert!(bad.is_null());

        for g in [a, four, phi, phi2, inv] {
            k2_g2_free(g);
        }
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(k2_witt_new(1, 0, 8, ptr::null_mut()), K2Status::NullPointer);
        assert_eq!(k2_g2_order(ptr::null(), 3, &mut 0), K2Status::NullPointer);
        assert_eq!(last_error(), "null pointer argument");
        assert_eq!(k2_e2_p0(0, 12, 12, ptr::null_mut(), &mut false), K2Status::NullPointer);
    }
}

#[test]
fn arithmetic_entry_points() {
    unsafe {
        let mut v = 0;
        assert_eq!(k2_log_base4(4, 8, &mut v), K2Status::Ok);
        assert_eq!(v, 1);
        assert_eq!(k2_log_base4(2, 8, &mut v), K2Status::InvalidArgument);
        let mut val = 0;
        assert_eq!(k2_central_character_valuation(12, &mut val), K2Status::Ok);
        assert_eq!(val, 2);
        assert_eq!(k2_central_character_valuation(6, &mut val), K2Status::InvalidArgument);
    }
}

#[test]
fn d1_and_e2() {
    unsafe {
        let (mut c, mut s, mut f, mut l) = (0i8, 0u32, 0u32, 0i64);
        assert_eq!(k2_d1_eval(0, 1, &mut c, &mut s, &mut f, &mut l), K2Status::Ok);
        assert_eq!((c, s, f, l), (-1, 0, 1, 3));
        assert_eq!(k2_d1_eval(1, 1, &mut c, &mut s, &mut f, &mut l), K2Status::Ok);
        assert_eq!(c, 0);
        assert_eq!(k2_d1_eval(1, 4, &mut c, &mut s, &mut f, &mut l), K2Status::InvalidArgument);
        assert_eq!(k2_d1_eval(9, 0, &mut c, &mut s, &mut f, &mut l), K2Status::InvalidArgument);

        let mut dims = [9usize; 4];
        let mut stable = false;
        assert_eq!(k2_e2_p0(0, 12, 12, dims.as_mut_ptr(), &mut stable), K2Status::Ok);
        assert_eq!(dims, [1, 0, 0, 1]);
        assert!(stable);
    }
}

#[test]
fn verify_all_through_the_abi() {
    unsafe {
        let mut json = ptr::null_mut();
        let mut pass = false;
        assert_eq!(k2_verify_all_json(ptr::null(), &mut json, &mut pass), K2Status::Ok);
        assert!(pass);
        let text = CStr::from_ptr(json).to_string_lossy().into_owned();
        assert!(text.contains("\"first_failure\": null"), "{text}");
        k2_string_free(json);

        let cfg = CString::new("sabotage_sign=b-second\n").unwrap();
        assert_eq!(k2_verify_all_json(cfg.as_ptr(), &mut json, &mut pass), K2Status::Ok);
        assert!(!pass);
        assert!(CStr::from_ptr(json).to_string_lossy().contains("\"first_failure\": \"d1-squared\""));
        k2_string_free(json);

        let cfg = CString::new("precision=6\nnope=1\n").unwrap();
        assert_eq!(k2_verify_all_json(cfg.as_ptr(), &mut json, &mut pass), K2Status::Config);
        assert!(last_error().contains("line 2"), "{}", last_error());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(k2_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/k2local.h")).unwrap();
    let src = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from the header");
    }
    for variant in ["K2_STATUS_OK = 0", "K2_STATUS_NULL_POINTER = 1", "K2_STATUS_INTERNAL = 7"] {
        assert!(header.contains(variant), "{variant}");
    }
    assert!(header.contains("typedef struct K2Witt K2Witt;"));
}

/// Compile and run a small C program against the header and the static library.
#[test]
fn c_program_links_against_the_static_library() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; C link check not run");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libk2local_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile_dir();
    let c = dir.join("smoke.c");
    std::fs::write(
        &c,
        r#"#include <stdio.h>
#include "k2local.h"
int main(void) {
    K2G2Element *a = NULL;
    uint32_t ord = 0;
    uint64_t det = 1;
    if (k2_g2_element_a(8, 0, &a) != K2_STATUS_OK) return 1;
    if (k2_g2_order(a, 24, &ord) != K2_STATUS_OK || ord != 3) return 2;
    if (k2_g2_reduced_det(a, &det) != K2_STATUS_OK || det != 0) return 3;
    k2_g2_free(a);
    if (k2_witt_new(1, 0, 8, NULL) != K2_STATUS_NULL_POINTER) return 4;
    size_t dims[4];
    bool stable = false;
    if (k2_e2_p0(0, 12, 12, dims, &stable) != K2_STATUS_OK || !stable) return 5;
    printf("%zu%zu%zu%zu\n", dims[0], dims[1], dims[2], dims[3]);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .arg(&c)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "1001\n");
    std::fs::remove_dir_all(&dir).ok();
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("k2local-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
