#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_pf::exactseries::parse_series_json;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(series) = parse_series_json(s) {
        let again = parse_series_json(&series.to_json().to_string()).unwrap();
        assert_eq!(again, series);
    }
});
