#![no_main]

use fsi_cli::report::RunReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = RunReport::from_json(text) {
        let _ = r.kappa_series();
        let json = r.to_json();
        let again = RunReport::from_json(&json).expect("written report reads back");
        assert_eq!(again.status, r.status);
        assert_eq!(again.slabs.len(), r.slabs.len());
        assert_eq!(again.snapshots, r.snapshots);
    }
});
