//! Holds the acceptance suite in `tests/acceptance.rs`; no library code.
