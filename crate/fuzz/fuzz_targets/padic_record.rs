#![no_main]

use klab::padic::{PadicElem, PadicRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = serde_json::from_slice::<PadicRecord>(data) else { return };
    if let Ok(x) = PadicElem::from_record(&rec) {
        let y = PadicElem::from_record(&x.to_record()).expect("round trip");
        assert_eq!(x.canonical_coords(), y.canonical_coords());
        let _ = x * y + x;
        let _ = x.valuation();
    }
});
