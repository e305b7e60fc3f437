//! Classroom orchestration: who audits whom, how well they did, and
//! corpus-level error statistics.

mod feedback;
mod grading;
mod metrics;
mod pairing;

pub use feedback::{
    parse_responses, tally_feedback, FeedbackError, FeedbackTally, QuestionTally, Response,
    QUESTIONS,
};
pub use grading::{grade_auditor, AuditorGrade, GradeError};
pub use metrics::{compute_metrics, percent_half_up, CorpusMetrics, MetricsError, SheetResult};
pub use pairing::{make_pairing, parse_roster, PairingAssignment, PairingError, MIN_COHORT};
