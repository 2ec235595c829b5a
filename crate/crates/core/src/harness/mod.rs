//! Instance files, random generation, online runs, adversary games and the
//! property-verification suites behind the command-line tool.

mod generate;
mod instance;
mod run;
mod verify;

use thiserror::Error;

use crate::adversary::GameError;
use crate::engine::EngineError;
use crate::geometry::GeometryError;
use crate::oracle::OracleError;

pub use generate::{gen_random, sample_object, GenParams};
pub use instance::{AnyInstance, InstanceFile, InstanceHeader};
pub use run::{
    base_shape, run_adversary, run_adversary_sweep, run_online, AdversaryParams, AdversaryRun, OnlineRun,
    OpponentKind, Report,
};
pub use verify::{verify, LevelFn, Suite, SuiteReport, VerifyParams, VerifySummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("object {index} (line {line}): {msg}")]
    InvalidObject { index: usize, line: usize, msg: String },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 1 for a broken property, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Engine(
                EngineError::StepBoundViolated { .. }
                | EngineError::CounterExceeded { .. }
                | EngineError::ReplayMismatch { .. },
            ) => 1,
            HarnessError::Game(GameError::Invariant { .. } | GameError::Protocol { .. }) => 1,
            _ => 2,
        }
    }
}
