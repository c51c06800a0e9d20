#![no_main]

use cantorval::geometry::parse_radius;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_radius(text) {
        assert!(r > num_rational::BigRational::from_integer(0.into()));
    }
});
