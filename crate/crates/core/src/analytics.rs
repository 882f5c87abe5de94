//! Outage interval traces, contiguous session merging and classification.
//!
//! Intervals are half-open `[t_start, t_end)` periods of non-connectivity,
//! each tagged with exactly one cause. Back-to-back intervals of one UE
//! (gap within half a tick) form a single contiguous outage session. A
//! session is named after its terminal constituent; the constituent order
//! must match the admissible cause sequences:
//!
//! ```text
//! SINR* -> BFR_SUCCESS? -> (HO_SUCCESS | HO_FAILURE)
//! SINR* -> BFR_SUCCESS
//! SINR* -> BFR_FAILURE -> RLF
//! SINR+
//! ```
//!
//! Anything else indicates a corrupted trace or a state-machine bug and is
//! reported as an error, never silently reclassified.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::procedures::OutageCause;

/// One cause-tagged period of non-connectivity for one UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageInterval {
    pub ue_id: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub cause: OutageCause,
}

impl OutageInterval {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Maximal contiguous run of outage intervals of one UE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageSession {
    pub ue_id: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub constituents: Vec<OutageInterval>,
}

impl OutageSession {
    /// Session duration: the sum of constituent durations (equal to
    /// `t_end - t_start` up to the merge tolerance).
    pub fn duration(&self) -> f64 {
        self.constituents.iter().map(|c| c.duration()).sum()
    }

    pub fn terminal_cause(&self) -> OutageCause {
        self.constituents.last().expect("non-empty session").cause
    }
}

/// Session taxonomy: the terminal constituent names the session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SessionClass {
    #[serde(rename = "SUCCESSFUL_HO")]
    SuccessfulHo,
    #[serde(rename = "HO_FAILURE")]
    HoFailure,
    #[serde(rename = "RLF")]
    Rlf,
    #[serde(rename = "BFR_SUCCESS")]
    BfrSuccess,
    #[serde(rename = "STANDALONE_SINR")]
    StandaloneSinr,
}

impl SessionClass {
    pub const ALL: [SessionClass; 5] = [
        SessionClass::SuccessfulHo,
        SessionClass::HoFailure,
        SessionClass::Rlf,
        SessionClass::BfrSuccess,
        SessionClass::StandaloneSinr,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SessionClass::SuccessfulHo => "SUCCESSFUL_HO",
            SessionClass::HoFailure => "HO_FAILURE",
            SessionClass::Rlf => "RLF",
            SessionClass::BfrSuccess => "BFR_SUCCESS",
            SessionClass::StandaloneSinr => "STANDALONE_SINR",
        }
    }
}

impl fmt::Display for SessionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SessionClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SessionClass::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown session class '{s}'"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("ue {ue_id}: intervals overlap at t = {t} s (trace corruption)")]
    OverlappingIntervals { ue_id: usize, t: f64 },
    #[error("ue {ue_id}: interval at t = {t} s has non-positive duration")]
    EmptyInterval { ue_id: usize, t: f64 },
    #[error("ue {ue_id}: inadmissible cause sequence [{sequence}] in session starting at {t} s")]
    InadmissibleSequence {
        ue_id: usize,
        t: f64,
        sequence: String,
    },
}

/// Merge per-UE intervals (sorted by start time, non-overlapping) into
/// maximal contiguous sessions. Gaps of at most `tolerance` seconds count
/// as contiguous; isolated intervals become singleton sessions.
pub fn merge_sessions(
    intervals: &[OutageInterval],
    tolerance: f64,
) -> Result<Vec<OutageSession>, AnalyticsError> {
    let mut sessions: Vec<OutageSession> = Vec::new();
    let mut current: Option<OutageSession> = None;

    for iv in intervals {
        if iv.t_end <= iv.t_start {
            return Err(AnalyticsError::EmptyInterval {
                ue_id: iv.ue_id,
                t: iv.t_start,
            });
        }
        let extend = match &current {
            Some(s) if s.ue_id == iv.ue_id => {
                if iv.t_start < s.t_end - tolerance {
                    return Err(AnalyticsError::OverlappingIntervals {
                        ue_id: iv.ue_id,
                        t: iv.t_start,
                    });
                }
                iv.t_start - s.t_end <= tolerance
            }
            _ => false,
        };
        if extend {
            let s = current.as_mut().unwrap();
            s.t_end = iv.t_end;
            s.constituents.push(*iv);
        } else {
            if let Some(done) = current.take() {
                sessions.push(done);
            }
            current = Some(OutageSession {
                ue_id: iv.ue_id,
                t_start: iv.t_start,
                t_end: iv.t_end,
                constituents: vec![*iv],
            });
        }
    }
    if let Some(done) = current.take() {
        sessions.push(done);
    }
    Ok(sessions)
}

/// Classify a session by its terminal cause after validating that the
/// constituent order is admissible.
pub fn classify(session: &OutageSession) -> Result<SessionClass, AnalyticsError> {
    let causes: Vec<OutageCause> = session.constituents.iter().map(|c| c.cause).collect();
    assert!(!causes.is_empty(), "sessions have at least one constituent");

    let inadmissible = || AnalyticsError::InadmissibleSequence {
        ue_id: session.ue_id,
        t: session.t_start,
        sequence: causes
            .iter()
            .map(|c| c.label())
            .collect::<Vec<_>>()
            .join(", "),
    };

    // leading run of SINR degradation
    let mut i = 0;
    while i < causes.len() && causes[i] == OutageCause::SinrDegradation {
        i += 1;
    }
    let tail = &causes[i..];
    let class = match tail {
        [] => SessionClass::StandaloneSinr, // one or more SINR, nothing else
        [OutageCause::HoSuccess] => SessionClass::SuccessfulHo,
        [OutageCause::HoFailure] => SessionClass::HoFailure,
        [OutageCause::BfrSuccess] => SessionClass::BfrSuccess,
        [OutageCause::BfrSuccess, OutageCause::HoSuccess] => SessionClass::SuccessfulHo,
        [OutageCause::BfrSuccess, OutageCause::HoFailure] => SessionClass::HoFailure,
        [OutageCause::BfrFailure, OutageCause::Rlf] => SessionClass::Rlf,
        _ => return Err(inadmissible()),
    };
    Ok(class)
}

/// Number of sessions whose class is a mobility failure (HOF or RLF).
pub fn mobility_failure_count(classes: &[SessionClass]) -> usize {
    classes
        .iter()
        .filter(|c| matches!(c, SessionClass::HoFailure | SessionClass::Rlf))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(ue: usize, s: f64, e: f64, cause: OutageCause) -> OutageInterval {
        OutageInterval {
            ue_id: ue,
            t_start: s,
            t_end: e,
            cause,
        }
    }

    const TOL: f64 = 0.005;

    #[test]
    fn zero_gap_intervals_merge() {
        let intervals = vec![
            iv(0, 1.00, 1.05, OutageCause::SinrDegradation),
            iv(0, 1.05, 1.20, OutageCause::BfrSuccess),
        ];
        let sessions = merge_sessions(&intervals, TOL).unwrap();
        assert_eq!(sessions.len(), 1);
        assert_eq!(sessions[0].constituents.len(), 2);
        assert!((sessions[0].duration() - 0.20).abs() < 1e-12);
        assert!((sessions[0].t_end - sessions[0].t_start - 0.20).abs() < 1e-12);
        assert_eq!(classify(&sessions[0]).unwrap(), SessionClass::BfrSuccess);
    }

    #[test]
    fn distant_intervals_stay_separate() {
        let intervals = vec![
            iv(0, 1.0, 1.05, OutageCause::SinrDegradation),
            iv(0, 2.0, 2.055, OutageCause::HoSuccess),
        ];
        let sessions = merge_sessions(&intervals, TOL).unwrap();
        assert_eq!(sessions.len(), 2);
    }

    #[test]
    fn rlf_chain_merges_to_single_session() {
        let intervals = vec![
            iv(0, 0.50, 0.55, OutageCause::SinrDegradation),
            iv(0, 0.55, 0.61, OutageCause::BfrFailure),
            iv(0, 0.61, 0.79, OutageCause::Rlf),
        ];
        let sessions = merge_sessions(&intervals, TOL).unwrap();
        assert_eq!(sessions.len(), 1);
        assert!((sessions[0].duration() - 0.29).abs() < 1e-12);
        assert_eq!(classify(&sessions[0]).unwrap(), SessionClass::Rlf);
    }

    #[test]
    fn sub_tolerance_gap_merges_and_above_splits() {
        let just_under = vec![
            iv(0, 0.0, 0.1, OutageCause::SinrDegradation),
            iv(0, 0.1 + TOL * 0.99, 0.2, OutageCause::BfrSuccess),
        ];
        assert_eq!(merge_sessions(&just_under, TOL).unwrap().len(), 1);
        let just_over = vec![
            iv(0, 0.0, 0.1, OutageCause::SinrDegradation),
            iv(0, 0.1 + TOL * 1.01, 0.2, OutageCause::BfrSuccess),
        ];
        assert_eq!(merge_sessions(&just_over, TOL).unwrap().len(), 2);
    }

    #[test]
    fn different_ues_never_merge() {
        let intervals = vec![
            iv(0, 1.0, 1.05, OutageCause::SinrDegradation),
            iv(1, 1.05, 1.10, OutageCause::SinrDegradation),
        ];
        assert_eq!(merge_sessions(&intervals, TOL).unwrap().len(), 2);
    }

    #[test]
    fn overlap_is_an_error() {
        let intervals = vec![
            iv(0, 1.0, 1.2, OutageCause::SinrDegradation),
            iv(0, 1.1, 1.3, OutageCause::BfrSuccess),
        ];
        assert!(matches!(
            merge_sessions(&intervals, TOL),
            Err(AnalyticsError::OverlappingIntervals { ue_id: 0, .. })
        ));
    }

    #[test]
    fn classification_table() {
        let cases: Vec<(Vec<OutageCause>, Option<SessionClass>)> = vec![
            (
                vec![
                    OutageCause::SinrDegradation,
                    OutageCause::BfrSuccess,
                    OutageCause::HoSuccess,
                ],
                Some(SessionClass::SuccessfulHo),
            ),
            (
                vec![OutageCause::SinrDegradation],
                Some(SessionClass::StandaloneSinr),
            ),
            (vec![OutageCause::HoSuccess], Some(SessionClass::SuccessfulHo)),
            (
                vec![OutageCause::SinrDegradation, OutageCause::HoFailure],
                Some(SessionClass::HoFailure),
            ),
            (
                vec![OutageCause::BfrSuccess, OutageCause::HoFailure],
                Some(SessionClass::HoFailure),
            ),
            (
                vec![OutageCause::BfrFailure, OutageCause::Rlf],
                Some(SessionClass::Rlf),
            ),
            (
                vec![
                    OutageCause::SinrDegradation,
                    OutageCause::BfrFailure,
                    OutageCause::Rlf,
                ],
                Some(SessionClass::Rlf),
            ),
            (
                vec![OutageCause::SinrDegradation, OutageCause::BfrSuccess],
                Some(SessionClass::BfrSuccess),
            ),
            // RLF without its BFR_FAILURE predecessor is forced to error
            (vec![OutageCause::Rlf], None),
            (vec![OutageCause::BfrFailure], None),
            (vec![OutageCause::HoSuccess, OutageCause::SinrDegradation], None),
            (
                vec![OutageCause::BfrSuccess, OutageCause::BfrSuccess],
                None,
            ),
            (
                vec![OutageCause::HoSuccess, OutageCause::HoSuccess],
                None,
            ),
        ];
        for (causes, expected) in cases {
            let mut t = 0.0;
            let constituents: Vec<OutageInterval> = causes
                .iter()
                .map(|&cause| {
                    let iv = iv(0, t, t + 0.01, cause);
                    t += 0.01;
                    iv
                })
                .collect();
            let session = OutageSession {
                ue_id: 0,
                t_start: 0.0,
                t_end: t,
                constituents,
            };
            match expected {
                Some(class) => assert_eq!(classify(&session).unwrap(), class, "{causes:?}"),
                None => assert!(classify(&session).is_err(), "{causes:?} should be an error"),
            }
        }
    }

    #[test]
    fn failure_count_is_cardinality() {
        use SessionClass::*;
        let classes = [
            SuccessfulHo,
            SuccessfulHo,
            SuccessfulHo,
            HoFailure,
            Rlf,
            Rlf,
        ];
        assert_eq!(mobility_failure_count(&classes), 3);
        assert_eq!(mobility_failure_count(&[]), 0);
    }

    // strategy: per-UE interval chains with adversarial gap choices
    fn interval_chain(ue: usize) -> impl Strategy<Value = Vec<OutageInterval>> {
        let gap = prop_oneof![
            Just(0.0),
            Just(TOL * 0.5),
            Just(TOL * 0.99),
            Just(TOL * 1.01),
            Just(0.5),
        ];
        let cause = prop_oneof![
            Just(OutageCause::SinrDegradation),
            Just(OutageCause::HoSuccess),
            Just(OutageCause::HoFailure),
            Just(OutageCause::BfrSuccess),
            Just(OutageCause::BfrFailure),
            Just(OutageCause::Rlf),
        ];
        proptest::collection::vec((gap, 0.01f64..0.4, cause), 0..12).prop_map(move |items| {
            let mut t = 0.0;
            let mut out = Vec::new();
            for (gap, dur, cause) in items {
                t += gap;
                out.push(iv(ue, t, t + dur, cause));
                t += dur;
            }
            out
        })
    }

    proptest! {
        // merging then splitting at constituent boundaries is the identity
        #[test]
        fn merge_split_identity(intervals in interval_chain(0)) {
            let sessions = merge_sessions(&intervals, TOL).unwrap();
            let rebuilt: Vec<OutageInterval> = sessions
                .iter()
                .flat_map(|s| s.constituents.iter().copied())
                .collect();
            prop_assert_eq!(rebuilt.clone(), intervals.clone());
            let remerged = merge_sessions(&rebuilt, TOL).unwrap();
            prop_assert_eq!(remerged, sessions);
        }

        // merging neither creates nor destroys outage time
        #[test]
        fn duration_conserved(intervals in interval_chain(0)) {
            let sessions = merge_sessions(&intervals, TOL).unwrap();
            let total_iv: f64 = intervals.iter().map(|i| i.duration()).sum();
            let total_s: f64 = sessions.iter().map(|s| s.duration()).sum();
            prop_assert!((total_iv - total_s).abs() < 1e-9);
        }
    }
}
