#![no_main]

use fts_core::io::{parse_series_csv, write_matrix_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(table) = parse_series_csv(data) else {
        return;
    };
    // Anything accepted must survive a write/read round trip unchanged.
    let times = table.times.clone().unwrap_or_else(|| (1..=table.values.nrows()).map(|i| i as f64).collect());
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, &[], &times, &table.values, None).unwrap();
    let again = parse_series_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(again.values, table.values);
});
