#![no_main]

use kinexp::io::{read_csv, write_csv, SpectrumRow, StepRow, SweepRow};
use libfuzzer_sys::fuzz_target;

fn check<T: kinexp::io::CsvRow + PartialEq + std::fmt::Debug>(data: &[u8]) {
    if let Ok(rows) = read_csv::<T, _>(data) {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let again: Vec<T> = read_csv(buf.as_slice()).expect("written table must read back");
        // NaN fields compare unequal; compare the re-serialized text instead.
        let mut buf2 = Vec::new();
        write_csv(&mut buf2, &again).unwrap();
        assert_eq!(buf, buf2);
    }
}

fuzz_target!(|data: &[u8]| {
    check::<StepRow>(data);
    check::<SweepRow>(data);
    check::<SpectrumRow>(data);
});
