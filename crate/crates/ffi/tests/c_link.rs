//! Compiles `smoke.c` against the generated header and links it with the
//! static library cargo builds alongside this test.

use std::path::{Path, PathBuf};
use std::process::Command;

fn staticlib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps.join("libdail_ffi.a"), deps.parent().unwrap().join("libdail_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
        .expect("libdail_ffi.a next to the test binary")
}

#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("dail_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(staticlib())
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success(), "cc failed");
    let run = Command::new(&out).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "smoke exited with {:?}: {stdout}", run.status.code());
    assert!(stdout.starts_with("max overlap 1; order 12 is not a prime"), "{stdout}");
}
