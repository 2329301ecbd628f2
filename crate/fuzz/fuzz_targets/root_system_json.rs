#![no_main]

use alcove::rootsys::RootSystemDescriptor;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(d) = RootSystemDescriptor::from_json(data) {
        let _ = d.resolve();
    }
});
