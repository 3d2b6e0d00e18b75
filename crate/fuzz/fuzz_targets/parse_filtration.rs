#![no_main]

use libfuzzer_sys::fuzz_target;
use persinv::Filtration;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(f) = Filtration::parse_text(text) {
            let again = Filtration::parse_text(&f.to_text()).expect("written filtration re-parses");
            assert_eq!(again.entries(), f.entries());
        }
    }
});
