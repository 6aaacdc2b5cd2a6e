//! Intrinsic asymptotic expansions of convergent sequences in a scale of
//! nested norms.

mod example3;
mod extract;
mod scale;
mod vector;
mod verify;

pub use example3::{compare_with_engine, example3_oracle, EngineComparison, OracleRow, OracleTable, TailSource};
pub use extract::{extract, Classification, ExpansionOptions, ExpansionReport, LimitMode, Term};
pub use scale::{SobolevScale, MAX_EXPONENT};
pub use vector::{AsVelocity, ScaleVector};
pub use verify::{verify_report, Check, ConditionLog, VerifyTolerances};
