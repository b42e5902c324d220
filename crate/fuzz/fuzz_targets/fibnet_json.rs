#![no_main]

use fibnet::fibnet::FibNet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(net) = FibNet::from_json(text) else {
        return;
    };
    let again = FibNet::from_json(&net.to_json()).expect("re-serialized fibnet parses");
    assert_eq!(again, net);
});
