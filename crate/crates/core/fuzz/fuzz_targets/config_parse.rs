#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_pf::config::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::parse(s) {
        assert!(cfg.validate().is_ok());
    }
});
