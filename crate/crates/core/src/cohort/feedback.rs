use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::percent_half_up;

pub const QUESTIONS: usize = 5;

/// One respondent's answers; `false` covers both "no" and "not sure".
pub type Response = [bool; QUESTIONS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionTally {
    pub yes: usize,
    pub no_or_not_sure: usize,
    pub yes_percent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackTally {
    pub respondents: usize,
    pub questions: Vec<QuestionTally>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeedbackError {
    #[error("no responses")]
    Empty,
    #[error("line {line}: expected {QUESTIONS} answers, found {found}")]
    WrongCount { line: usize, found: usize },
    #[error("line {line}: unrecognised answer `{answer}`")]
    BadAnswer { line: usize, answer: String },
}

pub fn tally_feedback(responses: &[Response]) -> Result<FeedbackTally, FeedbackError> {
    if responses.is_empty() {
        return Err(FeedbackError::Empty);
    }
    let n = responses.len();
    let questions = (0..QUESTIONS)
        .map(|q| {
            let yes = responses.iter().filter(|r| r[q]).count();
            QuestionTally {
                yes,
                no_or_not_sure: n - yes,
                yes_percent: percent_half_up(yes, n),
            }
        })
        .collect();
    Ok(FeedbackTally {
        respondents: n,
        questions,
    })
}

fn answer(token: &str) -> Option<bool> {
    match token.trim().to_ascii_lowercase().as_str() {
        "yes" | "y" | "true" | "1" => Some(true),
        "no" | "n" | "false" | "0" | "not sure" | "unsure" => Some(false),
        _ => None,
    }
}

/// One respondent per line, five comma-separated answers. Blank lines and
/// `#` comments are skipped.
pub fn parse_responses(text: &str) -> Result<Vec<Response>, FeedbackError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').collect();
        if tokens.len() != QUESTIONS {
            return Err(FeedbackError::WrongCount {
                line: i + 1,
                found: tokens.len(),
            });
        }
        let mut r = [false; QUESTIONS];
        for (slot, t) in r.iter_mut().zip(&tokens) {
            *slot = answer(t).ok_or_else(|| FeedbackError::BadAnswer {
                line: i + 1,
                answer: t.trim().to_string(),
            })?;
        }
        out.push(r);
    }
    Ok(out)
}
