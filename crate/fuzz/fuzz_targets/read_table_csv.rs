#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = su11_cli::read_table_csv(data) {
        // anything accepted must survive a write/read cycle
        let mut buf = Vec::new();
        if su11_cli::write_csv(&table, &mut buf).is_ok() {
            let again = su11_cli::read_table_csv(&buf).expect("re-read emitted CSV");
            assert_eq!(again.rows.len(), table.rows.len());
        }
    }
});
