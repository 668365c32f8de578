//! Compiles a small C program against the generated header and the static
//! library and runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include "mwdkit.h"

#define CHECK(call) do { MwdStatus s_ = (call); if (s_ != MWD_STATUS_OK) { \
    char b_[256]; mwd_last_error(b_, sizeof b_); \
    fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, b_); return 1; } } while (0)

int main(void) {
    MwdMatrix *a = NULL;
    MwdGrid *g = NULL;
    MwdSignal *f = NULL;
    MwdField *w = NULL;
    CHECK(mwd_matrix_preset("wigner", 0.0, 1, &a));
    CHECK(mwd_grid_new(1, 64, 12.0, &g));
    CHECK(mwd_signal_from_json("{\"kind\": \"gaussian\"}", 1, &f));
    CHECK(mwd_transform(a, f, NULL, g, &w));
    size_t len = mwd_field_len(w);
    double *v = malloc(2 * len * sizeof *v);
    CHECK(mwd_field_copy(w, v, 2 * len));
    double centre = v[2 * (32 * 64 + 32)];
    printf("centre %.12f\n", centre);
    if (mwd_matrix_preset("nope", 0.0, 1, &a) != MWD_STATUS_INVALID_ARGUMENT) return 2;
    free(v);
    mwd_field_free(w);
    mwd_signal_free(f);
    mwd_grid_free(g);
    mwd_matrix_free(a);
    return fabs(centre - sqrt(2.0)) < 1e-8 ? 0 : 3;
}
"#;

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmwdkit_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.starts_with("centre 1.41421356"), "{stdout}");
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mwdkit.h")).unwrap();
    for name in [
        "MWD_STATUS_OK = 0",
        "MWD_STATUS_BUFFER_TOO_SMALL = 8",
        "typedef struct MwdMatrix MwdMatrix;",
        "typedef struct MwdOperator MwdOperator;",
        "mwd_last_error(char *buf, size_t cap)",
        "mwd_transform(",
        "mwd_operator_apply(",
        "mwd_symbol_from_json(",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
