#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = cqed::cli::parse_config(text) {
            assert!(cqed::cli::Scenario::from_name(cfg.scenario.name()).is_some());
        }
    }
});
