//! Compiles a C program against the generated header and the shared library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn library_dir() -> PathBuf {
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let libdir = library_dir();
    assert!(libdir.join("libsobolev_lab_ffi.so").exists() || libdir.join("libsobolev_lab_ffi.dylib").exists());
    let work = tempfile::tempdir().unwrap();
    let exe = work.path().join("smoke");
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-D_DEFAULT_SOURCE"])
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-o")
        .arg(&exe)
        .arg(format!("-L{}", libdir.display()))
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .args(["-lsobolev_lab_ffi", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
