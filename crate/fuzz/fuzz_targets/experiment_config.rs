#![no_main]

use confounded_ridge_harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ExperimentConfig::from_json(text) else { return };
    let again = ExperimentConfig::from_json(&serde_json::to_string(&config).unwrap()).expect("round trip");
    assert_eq!(config, again);
    if config.d <= 64 {
        let _ = config.model_at_d();
    }
});
