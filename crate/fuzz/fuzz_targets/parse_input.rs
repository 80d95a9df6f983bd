#![no_main]

use bialg_cli::input::{parse_input, render_document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_input(text) {
        // A resolved document renders to text that resolves to the same document.
        let again = parse_input(&render_document(&doc.raw)).expect("rendered document parses");
        assert_eq!(again.raw, doc.raw);
    }
});
