#![no_main]

use alcove::charlib::WeightMultiplicityMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(m) = WeightMultiplicityMap::from_json(data) {
        let again = WeightMultiplicityMap::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(again, m);
    }
});
