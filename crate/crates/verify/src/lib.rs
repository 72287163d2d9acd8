//! Holds the acceptance report in `tests/acceptance.rs`.
