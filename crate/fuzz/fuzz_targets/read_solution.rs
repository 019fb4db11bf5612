#![no_main]

use kinexp::io::{read_solution, write_solution};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok((species, rows)) = read_solution(data) else { return };
    let names: Vec<&str> = species.iter().map(String::as_str).collect();
    let borrowed: Vec<(f64, &[f64])> = rows.iter().map(|(t, y)| (*t, y.as_slice())).collect();
    let mut buf = Vec::new();
    // Rows of the wrong width are a csv error, not a panic.
    if write_solution(&mut buf, &names, &borrowed).is_ok() {
        let _ = read_solution(buf.as_slice());
    }
});
