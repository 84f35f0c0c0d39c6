//! Config decoder: arbitrary TOML must never panic, every accepted config
//! must serialize to a fixed point, and the embedded grid/range syntaxes
//! must stay panic-free too.

#![no_main]

use libfuzzer_sys::fuzz_target;
use sol3_cli::config::{parse_grid, JobConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = JobConfig::from_toml(src) else { return };

    let once = cfg.to_toml();
    let back = JobConfig::from_toml(&once)
        .unwrap_or_else(|e| panic!("re-decode of {once:?} failed: {e}"));
    assert_eq!(cfg, back, "round trip changed the config");
    assert_eq!(once, back.to_toml(), "serialization is not a fixed point");

    if let Some(grid) = &cfg.grid {
        let _ = parse_grid(grid);
    }
});
