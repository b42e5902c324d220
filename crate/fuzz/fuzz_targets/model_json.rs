#![no_main]

use fibnet::nn::DenseNetwork;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(net) = DenseNetwork::from_json(text) else {
        return;
    };
    // Anything accepted must survive a round trip unchanged.
    let again = DenseNetwork::from_json(&net.to_json()).expect("re-serialized model parses");
    assert_eq!(again, net);
});
