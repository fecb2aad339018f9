#![no_main]

use confounded_ridge_harness::kernels::KernelName;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(k) = text.parse::<KernelName>() {
        assert_eq!(k.as_str(), text);
        assert_eq!(k.to_string().parse::<KernelName>(), Ok(k));
    }
});
