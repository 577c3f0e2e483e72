#![no_main]

use fts_core::io::{parse_series, parse_sidecar};
use libfuzzer_sys::fuzz_target;

// Input layout: sidecar JSON, a NUL byte, then the CSV body.
fuzz_target!(|data: &str| {
    let (meta, csv) = match data.split_once('\0') {
        Some((json, csv)) => (parse_sidecar(json).ok(), csv),
        None => (None, data),
    };
    if let Ok(series) = parse_series(csv, meta.as_ref()) {
        assert_eq!(series.values().nrows(), series.len());
        assert!(series.times().windows(2).all(|w| w[0] < w[1]));
        assert!(series.values().iter().all(|v| v.is_finite()));
    }
});
