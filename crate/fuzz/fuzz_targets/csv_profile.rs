#![no_main]

use fsi_cli::csvio::read_profile_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for column in [None, Some("eta")] {
        if let Ok(v) = read_profile_csv(text, column) {
            assert!(!v.is_empty());
            assert!(v.iter().all(|x| x.is_finite()));
        }
    }
});
