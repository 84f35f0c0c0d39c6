//! Expression parser: arbitrary input must never panic, and every accepted
//! expression must print to a form that reparses to the identical tree.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(expr) = sol3::expr::parse(src) else { return };

    let printed = expr.to_string();
    let again = sol3::expr::parse(&printed)
        .unwrap_or_else(|e| panic!("reparse of {printed:?} failed: {e}"));
    assert_eq!(expr, again, "round trip changed the tree: {printed:?}");

    let d = expr.diff();
    for x in [-2.0, -0.5, 0.0, 0.7, 1.9] {
        if let Ok(v) = expr.eval(x) {
            assert!(v.is_finite());
        }
        if let Ok(v) = d.eval(x) {
            assert!(v.is_finite());
        }
    }
});
