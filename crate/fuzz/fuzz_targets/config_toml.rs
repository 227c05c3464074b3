#![no_main]

use fsi_cli::config::SolverConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = SolverConfig::parse(text) {
        let again = SolverConfig::parse(&cfg.to_toml()).expect("echoed config parses");
        assert_eq!(again.check(), cfg.check());
    }
});
