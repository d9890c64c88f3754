#![no_main]

use libfuzzer_sys::fuzz_target;
use struve_bounds::table::{TableArtifact, TableKind};

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let kind = match selector % 3 {
        0 => TableKind::Table1,
        1 => TableKind::Table2,
        _ => TableKind::Dconstants,
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(table) = TableArtifact::from_csv(kind, text) {
        let _ = table.to_csv();
        let _ = table.to_json();
    }
});
