//! Acceptance checks for `bootperc` live in `tests/acceptance.rs`; run them
//! with `cargo test -p bootperc-validation --test acceptance`.
