#![no_main]

use kinexp::io::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_config(text) {
        Ok(cfg) => {
            let opts = cfg.solver_options();
            assert!(opts.output_times.iter().all(|t| (0.0..=cfg.t_final).contains(t)));
            if let Some(plan) = &cfg.sweep {
                assert!(plan.validate().is_ok());
            }
        }
        Err(e) => assert!(e.line >= 1 && e.column >= 1, "{e}"),
    }
});
