//! Executable constructions around effectively inseparable theories.

pub mod arith_r;
pub mod atlas;
pub mod coding;
pub mod logic;
pub mod machine;
pub mod reductions;
pub mod resets;
pub mod theories;
