#![no_main]

use alcove::alcove_markov::{spectrum_from_json, spectrum_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(s) = spectrum_from_json(data) {
        let _ = spectrum_to_json(&s);
    }
});
