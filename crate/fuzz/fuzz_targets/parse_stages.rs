#![no_main]

use bialg_cli::pipeline::parse_stages;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(stages) = parse_stages(text) {
        let joined: Vec<&str> = stages.iter().map(|s| s.name()).collect();
        assert_eq!(parse_stages(&joined.join(",")).unwrap(), stages);
    }
});
