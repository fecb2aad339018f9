#![no_main]

use confounded_ridge::optimal_reg::OptimalLambda;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(opt) = serde_json::from_slice::<OptimalLambda>(data) else { return };
    assert!(opt.value >= 0.0);
    let again: OptimalLambda = serde_json::from_str(&serde_json::to_string(&opt).unwrap()).expect("round trip");
    assert_eq!(opt, again);
});
