use fsi_cli::verify::{run_criterion, VerifyContext};
use std::io::Write;

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = VerifyContext {
        seed: 20240611,
        workers: 2,
        scratch: dir.path().to_path_buf(),
    };
    let mut failed = Vec::new();
    for id in 1..=13u8 {
        let r = run_criterion(id, &ctx);
        // written to the handle directly so the lines survive output capture
        writeln!(
            std::io::stderr().lock(),
            "criterion {:2} {} {} ({:.2}s): {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.title,
            r.seconds,
            r.detail
        )
        .unwrap();
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
