#![no_main]

use libfuzzer_sys::fuzz_target;
use persinv::AtomSelection;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = persinv::parse_pdb(text, &AtomSelection::atoms(&["CA"]));
        let _ = persinv::parse_pdb(
            text,
            &AtomSelection::atoms(&["P", "CA"]).with_chains(&['A']),
        );
    }
});
