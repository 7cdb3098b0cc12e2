#![no_main]

use libfuzzer_sys::fuzz_target;
use rkhs_regress::io::{parse_samples_csv, write_samples_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(samples) = parse_samples_csv(text) else { return };
    assert!(!samples.is_empty());
    for s in &samples {
        assert!(s.x.is_finite() && (-1.0..=1.0).contains(&s.x) && s.y.is_finite());
    }
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &samples).unwrap();
    let again = parse_samples_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(again, samples);
});
