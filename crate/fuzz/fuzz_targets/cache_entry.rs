#![no_main]

use klab::harness::decode_entry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_entry(data);
});
