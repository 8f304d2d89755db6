//! Corrupting the blade product must make the suites fail by name.

use krein_core::clifford::blade::fault;
use krein_core::verify::{run, Suite};

#[test]
fn sign_flip_is_caught() {
    assert!(run(Suite::Core, 0).ok);
    fault::set_blade_sign_flip(true);
    let report = run(Suite::All, 0);
    fault::set_blade_sign_flip(false);
    assert!(!report.ok);
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    assert!(failed.contains(&"core/blade_product_matches_reordering"), "{failed:?}");
    assert!(failed.iter().any(|n| n.starts_with("spinor/")), "{failed:?}");
}
