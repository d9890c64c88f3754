#![no_main]

use libfuzzer_sys::fuzz_target;
use struve_bounds::table::TableArtifact;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = TableArtifact::from_json(text) {
        let again = table.to_json().unwrap();
        assert_eq!(TableArtifact::from_json(&again).unwrap(), table);
    }
});
