//! Trace checking and violation diagnosis for signal-based temporal properties.

pub mod causes;
pub mod diagnosis;
pub mod dsl;
pub mod engine;
pub mod semantics;
pub mod trace;
