#![no_main]

use confounded_ridge::model::ModelSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = ModelSpec::from_json(text) else { return };
    let again = ModelSpec::from_json(&serde_json::to_string(&spec).unwrap()).expect("round trip");
    assert_eq!(spec, again);
    // small specs only; building is O(d^2)
    if spec.d <= 64 {
        if let Ok(s) = spec.summaries() {
            assert!(s.sigma_stat_sq > 0.0);
        }
        let _ = spec.build();
    }
});
