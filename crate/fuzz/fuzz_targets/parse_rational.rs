#![no_main]

use alcove::rational::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(r) = parse_rational(data) {
        // anything accepted must survive a round trip
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
});
