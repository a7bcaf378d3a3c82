//! Static-SVG chart reverse engineering: deconstruction, data recovery,
//! multi-view linking, and scripted interaction replay.

pub mod data;
pub mod deconstruct;
pub mod interact;
pub mod link;
pub mod query;
pub mod session;
pub mod svg;
pub mod value;
