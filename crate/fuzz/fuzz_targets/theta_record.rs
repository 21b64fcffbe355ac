#![no_main]

use klab::bessel::{SplittingFunction, ThetaRecord};
use klab::padic::Ctx;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = serde_json::from_slice::<ThetaRecord>(data) else { return };
    let Ok(ctx) = Ctx::new(rec.p, rec.n) else { return };
    if let Ok(th) = SplittingFunction::from_records(ctx, &rec.coeffs) {
        if !th.is_empty() {
            let _ = th.eval_one();
        }
    }
});
