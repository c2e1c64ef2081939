pub mod cli;
pub mod decompose;
pub mod error;
pub mod group;
pub mod report;
pub mod search;
pub mod sequence;
pub mod structure;
pub mod subsums;
