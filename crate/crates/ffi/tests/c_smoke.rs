//! Compiles a small C program against the generated header and the static
//! library. Skipped when no C compiler or static archive is around.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "fundet.h"

int main(void) {
    FdProfile *p = NULL;
    if (fd_profile_constant(1.0, 0.0, 1.0, &p) != FD_STATUS_OK) return 1;
    FdDetResult r;
    if (fd_det(p, FD_BC_DIRICHLET, 1.0, &r) != FD_STATUS_OK) return 2;
    if (fabs(r.value - sin(1.0)) > 1e-9) return 3;
    if (fd_det(NULL, FD_BC_DIRICHLET, 1.0, &r) != FD_STATUS_NULL_POINTER) return 4;
    char msg[64];
    fd_last_error_message(msg, sizeof msg);
    fd_profile_free(p);
    printf("%s %.12f\n", fd_version(), r.value);
    return 0;
}
"#;

fn archive() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    // target/<profile>/deps/<test>
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("libfundet_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = archive() else {
        eprintln!("skipping: static library not built");
        return;
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    let exe = tmp.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}
