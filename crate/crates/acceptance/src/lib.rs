//! Test-only package; the suite lives in `tests/acceptance.rs` and runs after
//! every other workspace target.
