#![no_main]

use klab::exact::LPolyRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = serde_json::from_slice::<LPolyRecord>(data) else { return };
    if let Ok(l) = rec.decode() {
        let _ = l.newton_polygon().to_csv();
        let _ = l.bound_report();
        l.to_record().decode().expect("round trip");
    }
});
