#![no_main]

use fibnet::signals::{Interval, SampledSignal};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(signal) = SampledSignal::from_csv(text, Interval::UNIT) else {
        return;
    };
    let again = SampledSignal::from_csv(&signal.to_csv(), Interval::UNIT).expect("written csv parses");
    assert_eq!(again, signal);
});
