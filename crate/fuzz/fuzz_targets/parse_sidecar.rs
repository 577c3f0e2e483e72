#![no_main]

use fts_core::io::parse_sidecar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(meta) = parse_sidecar(data) {
        for p in [1, 2, 50, 100, 200] {
            if let Ok(grid) = meta.grid_for(p) {
                assert_eq!(grid.dim(), p);
            }
        }
    }
});
