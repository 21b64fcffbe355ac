//! Replays the checked-in fuzz seeds through the decoders on stable.

use std::fs;
use std::path::PathBuf;

use klab::bessel::{FrobMatrix2, FrobRecord, SplittingFunction, ThetaRecord};
use klab::exact::LPolyRecord;
use klab::harness::decode_entry;
use klab::padic::{Ctx, PadicElem, PadicRecord};
use klab::sym::KappaValue;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn kappa_seeds() {
    for (name, data) in seeds("kappa_parse") {
        let parsed = KappaValue::parse(std::str::from_utf8(&data).unwrap());
        if name == "long_digits" {
            assert!(parsed.is_err());
            continue;
        }
        let k = parsed.unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(KappaValue::parse(&k.to_string()).unwrap(), k, "{name}");
    }
}

#[test]
fn padic_seeds() {
    for (name, data) in seeds("padic_record") {
        let rec: PadicRecord = serde_json::from_slice(&data).unwrap();
        let x = PadicElem::from_record(&rec).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(x.to_record().coeffs.len(), rec.coeffs.len());
    }
}

#[test]
fn lpoly_seeds() {
    for (name, data) in seeds("lpoly_record") {
        let rec: LPolyRecord = serde_json::from_slice(&data).unwrap();
        let l = rec.decode().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(l.to_record().coeffs, rec.coeffs, "{name}");
    }
}

#[test]
fn cache_entry_seeds() {
    for (name, data) in seeds("cache_entry") {
        decode_entry(&data).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn frob_seeds() {
    for (name, data) in seeds("frob_record") {
        let rec: FrobRecord = serde_json::from_slice(&data).unwrap();
        let f = FrobMatrix2::from_record(&rec);
        assert_eq!(f.is_ok(), name == "small", "{name}");
    }
}

#[test]
fn theta_seeds() {
    for (name, data) in seeds("theta_record") {
        let rec: ThetaRecord = serde_json::from_slice(&data).unwrap();
        let ctx = Ctx::new(rec.p, rec.n).unwrap();
        let th = SplittingFunction::from_records(ctx, &rec.coeffs).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(th.coeff(0), ctx.one());
    }
}
