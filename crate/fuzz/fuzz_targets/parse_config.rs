#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = su11_cli::parse_config(text) {
            assert!(spec.grid_size() <= spec.numerics.max_points);
            assert_eq!(
                spec.columns().len(),
                spec.axes.len() + spec.outputs.iter().map(|o| o.columns().len()).sum::<usize>()
            );
        }
    }
});
