use thiserror::Error;

use super::{SdpSolution, SdpStatus};
use crate::relax::{LabelMap, SdpProblem};

/// Scores are snapped to this grid so that symmetric vertices, whose
/// diagonal entries differ only by rounding, compare equal.
const SCORE_GRID: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("problem carries no variable labels")]
    MissingLabels,
    #[error("solver ended with numerical failure")]
    FailedSolve,
}

/// Relaxation bound and per-vertex fractional guidance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaScores {
    /// Primal objective value of the relaxation.
    pub theta: f64,
    /// Fractional value of each variable, clamped to `[0, 1]`.
    pub score: Vec<f64>,
    /// Values before clamping.
    pub raw: Vec<f64>,
}

impl ThetaScores {
    /// Uniform scores, for callers that have no relaxation.
    pub fn uniform(n: usize, value: f64, theta: f64) -> Self {
        ThetaScores {
            theta,
            score: vec![value; n],
            raw: vec![value; n],
        }
    }
}

/// Reads per-variable fractional values off the diagonal of the solution.
///
/// For the trace-one formulation the value of vertex `i` is
/// `θ · X̃_ii / w_i`, which is `θ · X̃_ii` for unit weights and recovers `x_i`
/// at a rank-one optimum in the weighted case. Zero-weight vertices score 0.
/// For the homogenized formulations the diagonal already holds `x_i`.
pub fn extract_scores(sol: &SdpSolution, p: &SdpProblem) -> Result<ThetaScores, ScoreError> {
    if sol.status == SdpStatus::NumericalFailure {
        return Err(ScoreError::FailedSolve);
    }
    let theta = sol.primal_value;
    let raw: Vec<f64> = match &p.labels {
        LabelMap::Absent => return Err(ScoreError::MissingLabels),
        LabelMap::Theta3 { weights } => weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                if w > 0.0 {
                    theta * sol.x[(i, i)] / w
                } else {
                    0.0
                }
            })
            .collect(),
        LabelMap::Theta1 | LabelMap::Lifted => (1..p.dim).map(|i| sol.x[(i, i)]).collect(),
    };
    let score = raw
        .iter()
        .map(|&v| ((v / SCORE_GRID).round() * SCORE_GRID).clamp(0.0, 1.0))
        .collect();
    Ok(ThetaScores { theta, score, raw })
}
