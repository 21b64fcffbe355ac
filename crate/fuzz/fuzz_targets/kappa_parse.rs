#![no_main]

use klab::sym::KappaValue;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(k) = KappaValue::parse(s) {
        let back = KappaValue::parse(&k.to_string()).expect("display form parses");
        assert_eq!(back, k);
        let _ = k.check(5);
    }
});
