//! Command-line companion of the optomechanical noise engine: configuration,
//! scenario runs, result files and the time-domain oracle.

pub use optomech_core as engine;

pub mod config;
pub mod envelope;
pub mod error;
pub mod io;
pub mod oracle;
pub mod run;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::AppError;
pub use run::Command;
pub use scenario::Scenario;
