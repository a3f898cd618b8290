#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_pf::ode::parse_ode_json;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(ode) = parse_ode_json(s) {
        assert_eq!(parse_ode_json(&ode.to_json().to_string()).unwrap(), ode);
        let _ = ode.indicial_equation();
    }
});
