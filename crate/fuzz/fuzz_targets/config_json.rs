#![no_main]

use fibnet::experiments::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = ExperimentConfig::from_json(text) else {
        return;
    };
    let again = ExperimentConfig::from_json(&config.to_json()).expect("resolved config parses");
    assert_eq!(again.hash(), config.hash());
});
