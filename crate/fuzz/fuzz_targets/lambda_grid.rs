#![no_main]

use libfuzzer_sys::fuzz_target;
use rkhs_regress::io::parse_lambda_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_lambda_grid(text) {
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|l| l.is_finite() && *l > 0.0));
    }
});
