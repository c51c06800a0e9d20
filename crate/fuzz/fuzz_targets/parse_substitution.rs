#![no_main]

use cantorval::subst::parse_substitution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_substitution(text) {
        let again = parse_substitution(&s.to_string()).expect("display output parses");
        assert_eq!(again, s);
        let _ = s.matrix().det();
    }
});
