#![no_main]

use alcove::scaling::BrownianFit;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = BrownianFit::from_json(data);
});
