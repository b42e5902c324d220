#![no_main]

use fibnet::experiments::{parse_runs_csv, runs_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(rows) = parse_runs_csv(text) else {
        return;
    };
    let Ok(written) = runs_csv(&rows) else {
        return;
    };
    let reparsed = parse_runs_csv(&written).expect("written runs.csv parses");
    assert_eq!(runs_csv(&reparsed).unwrap(), written);
});
