#![no_main]

use kinexp::io::{parse_mechanism, serialize_mechanism};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_mechanism(text) {
        Ok(m) => {
            let again = parse_mechanism(&serialize_mechanism(&m)).expect("serialized mechanism must parse");
            assert_eq!(again, m);
        }
        Err(e) => {
            let lines = text.lines().count().max(1);
            assert!(e.line >= 1 && e.line <= lines + 1 && e.column >= 1, "{e}");
        }
    }
});
