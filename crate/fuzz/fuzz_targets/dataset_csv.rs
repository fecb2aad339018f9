#![no_main]

use confounded_ridge::model::{Dataset, Source};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(ds) = Dataset::read_csv(data, Source::Observational, 0) else { return };
    assert_eq!(ds.x.nrows(), ds.y.len());
    let mut bytes = Vec::new();
    ds.write_csv(&mut bytes).unwrap();
    let again = Dataset::read_csv(bytes.as_slice(), Source::Observational, 0).expect("round trip");
    assert_eq!(ds, again);
});
