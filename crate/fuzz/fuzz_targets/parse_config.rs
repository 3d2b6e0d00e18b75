#![no_main]

use libfuzzer_sys::fuzz_target;
use persinv_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::from_text(text) {
            let _ = cfg.validate();
            if let Ok(grid) = cfg.grid.values() {
                assert!(grid.windows(2).all(|w| w[0] < w[1]));
            }
            let again = RunConfig::from_header(&cfg.to_header()).expect("header re-parses");
            // NaN never survives JSON, so equality holds whenever parsing succeeded
            assert_eq!(again, cfg);
        }
    }
});
