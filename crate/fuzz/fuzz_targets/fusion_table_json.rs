#![no_main]

use alcove::fusion::FusionTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(t) = FusionTable::from_json(data) {
        let again = FusionTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(again, t);
    }
});
