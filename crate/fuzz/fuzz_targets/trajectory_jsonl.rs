#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = alcove::scaling::parse_trajectory_jsonl(data);
});
