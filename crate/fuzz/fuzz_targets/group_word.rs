#![no_main]

use cantorval::nielsen::GroupWord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = text.parse::<GroupWord>() {
        let again: GroupWord = w.to_string().parse().expect("display output parses");
        assert_eq!(again, w);
        assert!(w.mul(&w.inv()).is_empty());
    }
});
