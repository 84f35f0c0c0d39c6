//! Profile selector: arbitrary input must never panic, and every accepted
//! profile must evaluate without panicking on a few sample points.

#![no_main]

use libfuzzer_sys::fuzz_target;
use sol3::families::AlphaProfile;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(profile) = src.parse::<AlphaProfile>() else { return };
    let Ok(f) = profile.smooth() else { return };
    for s in [-0.9, -0.2, 0.0, 0.4, 0.8] {
        let _ = f.value(s);
        let _ = f.deriv(s);
        let _ = f.deriv2(s);
    }
});
