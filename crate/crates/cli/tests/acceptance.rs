//! CLI acceptance gate: the determinism criterion and the exit-code
//! contract, exercised against the real binary. One verdict line each,
//! nonzero exit on any failure (`harness = false`).

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};

fn qdesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdesign"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn main() {
    panic::set_hook(Box::new(|_| {}));

    let mut failures = 0u32;
    let mut run = |number: &str, label: &str, body: &mut dyn FnMut() -> String| {
        match panic::catch_unwind(AssertUnwindSafe(body)) {
            Ok(note) if note.is_empty() => println!("ACCEPTANCE {number} {label}: PASS"),
            Ok(note) => println!("ACCEPTANCE {number} {label}: PASS ({note})"),
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".to_string());
                println!("ACCEPTANCE {number} {label}: FAIL — {msg}");
                failures += 1;
            }
        }
    };

    run(
        "12",
        "determinism: `sic search --dim 5 --seed 42` twice, byte-identical",
        &mut || {
            let dir = tempfile::tempdir().unwrap();
            let path_a = dir.path().join("a.json");
            let path_b = dir.path().join("b.json");
            let first = qdesign(&[
                "sic", "search", "--dim", "5", "--seed", "42",
                "--out", path_a.to_str().unwrap(),
            ]);
            let second = qdesign(&[
                "sic", "search", "--dim", "5", "--seed", "42",
                "--out", path_b.to_str().unwrap(),
            ]);
            assert!(first.status.success(), "first run failed");
            assert!(second.status.success(), "second run failed");
            assert_eq!(first.stdout, second.stdout, "certificates differ");
            assert_eq!(
                std::fs::read(&path_a).unwrap(),
                std::fs::read(&path_b).unwrap(),
                "artifacts differ"
            );
            format!("{} certificate bytes", first.stdout.len())
        },
    );

    run(
        "--",
        "exit code 0: `mub --order 3` verifies clean",
        &mut || {
            let out = qdesign(&["mub", "--order", "3"]);
            assert_eq!(out.status.code(), Some(0), "status {:?}", out.status.code());
            let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            assert_eq!(cert["pass"], true);
            assert_eq!(cert["subject"], "mub");
            String::new()
        },
    );

    run(
        "--",
        "exit code 1: tampered SIC artifact fails verification",
        &mut || {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("sic2.json");
            let search = qdesign(&[
                "sic", "search", "--dim", "2", "--seed", "1",
                "--out", path.to_str().unwrap(),
            ]);
            assert!(search.status.success(), "search failed");
            tamper_first_vector(&path);
            let out = qdesign(&["sic", "verify", "--input", path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(1), "status {:?}", out.status.code());
            let stderr = String::from_utf8_lossy(&out.stderr);
            assert!(
                stderr.contains("verification failed"),
                "stderr was: {stderr}"
            );
            let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            assert_eq!(cert["pass"], false);
            String::new()
        },
    );

    run(
        "--",
        "exit code 2: `plane --order 6` rejects a non-prime-power order",
        &mut || {
            let out = qdesign(&["plane", "--order", "6"]);
            assert_eq!(out.status.code(), Some(2), "status {:?}", out.status.code());
            let stderr = String::from_utf8_lossy(&out.stderr);
            assert!(stderr.contains("not a prime power"), "stderr was: {stderr}");
            String::new()
        },
    );

    let _ = panic::take_hook();
    if failures > 0 {
        eprintln!("{failures} CLI acceptance checks FAILED");
        std::process::exit(1);
    }
    println!("CLI acceptance criteria passed");
}

/// Replace the first fiducial-orbit vector with a *different unit vector*.
/// Unit norm keeps the candidate loadable, so the failure surfaces in
/// `verify_sic` (exit 1) rather than at parse time (exit 2).
fn tamper_first_vector(path: &Path) {
    let mut doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    let dim = doc["dim"].as_u64().unwrap() as usize;
    let mut replacement = vec![serde_json::json!([0.0, 0.0]); dim];
    let amp = 1.0 / (dim as f64).sqrt();
    for entry in replacement.iter_mut() {
        *entry = serde_json::json!([amp, 0.0]);
    }
    doc["vectors"][0] = serde_json::Value::Array(replacement);
    std::fs::write(path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
}
