#![no_main]

use alcove_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        // resolving the root system must fail cleanly, never panic
        let _ = cfg.root_system();
    }
});
