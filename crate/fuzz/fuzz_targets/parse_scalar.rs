#![no_main]

use bialg_core::exactlin::parse_scalar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_scalar(text) {
        assert_eq!(parse_scalar(&c.to_string()).unwrap(), c);
    }
});
