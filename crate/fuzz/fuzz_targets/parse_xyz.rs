#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cloud) = persinv::parse_xyz(text) {
            let again = persinv::parse_xyz(&cloud.to_xyz("fuzz")).expect("written XYZ re-parses");
            assert_eq!(again.points(), cloud.points());
        }
    }
});
