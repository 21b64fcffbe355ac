#![no_main]

use klab::bessel::{FrobMatrix2, FrobRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = serde_json::from_slice::<FrobRecord>(data) else { return };
    if let Ok(f) = FrobMatrix2::from_record(&rec) {
        let _ = f.to_record();
        if f.level == 1 && f.len() <= 64 {
            let _ = f.level(2);
        }
    }
});
