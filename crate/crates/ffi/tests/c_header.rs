//! Compiles and runs a small C program against the generated header and the
//! static library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "spectral_nsr.h"

int main(void) {
    size_t src[2] = {0, 1}, dst[2] = {1, 2};
    double w[2] = {1.0, 1.0};
    SnsrGraph *g = NULL;
    if (snsr_graph_new(3, src, dst, w, 2, &g) != SNSR_STATUS_OK) return 1;
    double theta[3] = {0.5, 0.25, 0.125};
    SnsrFilter *f = NULL;
    if (snsr_filter_new(theta, 3, 2.0, &f) != SNSR_STATUS_OK) return 2;
    double x[3] = {1.0, 0.0, 0.0}, y[3];
    if (snsr_filter_apply(g, SNSR_LAPLACIAN_NORMALIZED, f, x, y, 3) != SNSR_STATUS_OK) return 3;
    SnsrFilter *bad = NULL;
    if (snsr_filter_new(theta, 3, -1.0, &bad) != SNSR_STATUS_INVALID_INPUT) return 4;
    char msg[128];
    if (snsr_last_error(msg, sizeof msg) == 0) return 5;
    printf("%.17g %.17g %.17g\n", y[0], y[1], y[2]);
    snsr_filter_free(f);
    snsr_graph_free(g);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/c_header-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let lib = target_dir().join("libspectral_nsr_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let y: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    // h(L~) = 0.5 I + 0.25 L~ + 0.125 (2 L~^2 - I) with L~ = L - I on the 3-path.
    let s = 1.0 / 2f64.sqrt();
    let lt = [[0.0, -s, 0.0], [-s, 0.0, -s], [0.0, -s, 0.0]];
    let mut expected = [0.0; 3];
    for i in 0..3 {
        let lt2: f64 = (0..3).map(|k| lt[i][k] * lt[k][0]).sum();
        let id = if i == 0 { 1.0 } else { 0.0 };
        expected[i] = 0.375 * id + 0.25 * lt[i][0] + 0.25 * lt2;
    }
    for (a, b) in y.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
