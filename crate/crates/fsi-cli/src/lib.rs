pub mod bench;
pub mod config;
pub mod csvio;
pub mod plot;
pub mod report;
pub mod runner;
pub mod scenarios;
pub mod snapshot;
pub mod svg;
pub mod verify;
