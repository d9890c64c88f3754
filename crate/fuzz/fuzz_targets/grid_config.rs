#![no_main]

use libfuzzer_sys::fuzz_target;
use struve_bounds::verify::GridConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = GridConfig::from_json(text) {
        // Accepted configs must survive a serialisation round trip.
        let again = serde_json::to_string(&cfg).unwrap();
        assert_eq!(GridConfig::from_json(&again).unwrap(), cfg);
        let _ = cfg.selected_checks();
        let _ = cfg.effective_tolerances();
    }
});
