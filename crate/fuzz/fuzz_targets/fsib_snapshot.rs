#![no_main]

use fsi_cli::snapshot::Snapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = Snapshot::from_bytes(data) {
        let bytes = s.to_bytes();
        let again = Snapshot::from_bytes(&bytes).expect("written snapshot reads back");
        assert_eq!(again.to_bytes(), bytes);
    }
});
