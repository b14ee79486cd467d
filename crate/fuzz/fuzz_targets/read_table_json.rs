#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = su11_cli::read_table_json(text) {
            let mut buf = Vec::new();
            if su11_cli::write_json(&table, &mut buf).is_ok() {
                let again =
                    su11_cli::read_table_json(std::str::from_utf8(&buf).unwrap()).expect("re-read emitted JSON");
                assert_eq!(again, table);
            }
        }
    }
});
