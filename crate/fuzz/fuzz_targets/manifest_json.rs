#![no_main]

use libfuzzer_sys::fuzz_target;
use rkhs_regress::harness::RunManifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(manifest) = RunManifest::from_json(text) {
        let json = manifest.to_json().unwrap();
        assert_eq!(RunManifest::from_json(&json).unwrap(), manifest);
    }
});
