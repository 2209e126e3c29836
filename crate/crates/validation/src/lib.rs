//! Cross-crate validation. The acceptance criteria live in the `acceptance`
//! test target.
