use std::collections::HashMap;

use chrono::{DateTime, TimeDelta, Utc};

use super::SignalError;
use crate::ingest::{ActorId, MessageEvent};

/// A run of unanswered `requester -> responder` messages closed by a reply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseEvent {
    pub requester: ActorId,
    pub responder: ActorId,
    /// First message of the run.
    pub run_start: DateTime<Utc>,
    /// Last nudge before the reply.
    pub run_last: DateTime<Utc>,
    pub response_at: DateTime<Utc>,
    pub nudges: u32,
}

impl ResponseEvent {
    pub fn elapsed_hours(&self) -> f64 {
        (self.response_at - self.run_start).num_seconds() as f64 / 3600.0
    }

    /// Delay measured from the last nudge instead of the first message.
    pub fn elapsed_since_last_hours(&self) -> f64 {
        (self.response_at - self.run_last).num_seconds() as f64 / 3600.0
    }
}

struct OpenRun {
    start: DateTime<Utc>,
    last: DateTime<Utc>,
    nudges: u32,
}

/// Scans time-sorted events for request/response runs per ordered pair.
///
/// Consecutive `A -> B` messages form a run. The first later `B -> A` message
/// closes it and yields a [`ResponseEvent`] when it arrives within `horizon`
/// of the run start; a later reply closes the run without an event. An
/// `A -> B` message arriving after the horizon has lapsed starts a new run.
/// Runs still open at the end are censored.
pub fn extract_response_events(events: &[MessageEvent], horizon: TimeDelta) -> Vec<ResponseEvent> {
    let mut open: HashMap<(&ActorId, &ActorId), OpenRun> = HashMap::new();
    let mut out = Vec::new();

    for e in events {
        let t = e.timestamp;
        for r in &e.recipients {
            // reply direction: e.sender answers r
            let reply_key = (&r.actor, &e.sender);
            if open.get(&reply_key).is_some_and(|run| t > run.last) {
                let run = open.remove(&reply_key).expect("checked above");
                if t - run.start <= horizon {
                    out.push(ResponseEvent {
                        requester: r.actor.clone(),
                        responder: e.sender.clone(),
                        run_start: run.start,
                        run_last: run.last,
                        response_at: t,
                        nudges: run.nudges,
                    });
                }
            }
            // request direction: e.sender nudges r
            match open.get_mut(&(&e.sender, &r.actor)) {
                Some(run) if t - run.start <= horizon => {
                    run.nudges += 1;
                    run.last = t;
                }
                _ => {
                    open.insert(
                        (&e.sender, &r.actor),
                        OpenRun {
                            start: t,
                            last: t,
                            nudges: 1,
                        },
                    );
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RapidResponse {
    pub avg_response_time_hours: f64,
    pub avg_nudges: f64,
    /// `1 / (1 + avg_hours / 24)`: 1 for instant replies, falling with delay.
    pub responsiveness: f64,
}

pub fn rapid_response(events: &[ResponseEvent]) -> Result<RapidResponse, SignalError> {
    if events.is_empty() {
        return Err(SignalError::NoResponses);
    }
    let n = events.len() as f64;
    let avg_hours = events.iter().map(ResponseEvent::elapsed_hours).sum::<f64>() / n;
    let avg_nudges = events.iter().map(|e| e.nudges as f64).sum::<f64>() / n;
    Ok(RapidResponse {
        avg_response_time_hours: avg_hours,
        avg_nudges,
        responsiveness: 1.0 / (1.0 + avg_hours / 24.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Recipient;

    fn actor(s: &str) -> ActorId {
        ActorId::new(format!("{s}@x.com")).unwrap()
    }

    fn msg(hours: i64, from: &str, to: &str) -> MessageEvent {
        MessageEvent {
            message_id: format!("{from}{to}{hours}"),
            timestamp: DateTime::UNIX_EPOCH + TimeDelta::hours(hours),
            sender: actor(from),
            recipients: vec![Recipient {
                actor: actor(to),
                weight: 1.0,
            }],
            in_reply_to: None,
            subject_key: String::new(),
            tokens: vec![],
        }
    }

    fn extract(evs: &[MessageEvent]) -> Vec<ResponseEvent> {
        extract_response_events(evs, TimeDelta::days(14))
    }

    #[test]
    fn single_reply() {
        let r = extract(&[msg(0, "a", "b"), msg(4, "b", "a")]);
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].nudges, r[0].elapsed_hours()), (1, 4.0));
        assert_eq!(r[0].requester, actor("a"));
        assert_eq!(r[0].responder, actor("b"));
    }

    #[test]
    fn nudged_reply() {
        let r = extract(&[msg(0, "a", "b"), msg(24, "a", "b"), msg(30, "b", "a")]);
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].nudges, r[0].elapsed_hours()), (2, 30.0));
        assert_eq!(r[0].elapsed_since_last_hours(), 6.0);
    }

    #[test]
    fn censored_runs() {
        assert!(extract(&[msg(0, "a", "b")]).is_empty());
        // reply after the horizon closes the run without an event
        let late = extract(&[msg(0, "a", "b"), msg(15 * 24, "b", "a"), msg(15 * 24 + 1, "a", "b")]);
        assert_eq!(late.len(), 1);
        assert_eq!(late[0].requester, actor("b"));
        assert_eq!(late[0].elapsed_hours(), 1.0);
    }

    #[test]
    fn stale_run_restarts() {
        let r = extract(&[msg(0, "a", "b"), msg(20 * 24, "a", "b"), msg(20 * 24 + 2, "b", "a")]);
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].nudges, r[0].elapsed_hours()), (1, 2.0));
    }

    #[test]
    fn cc_reply_counts_and_ping_pong() {
        let mut reply = msg(3, "b", "c");
        reply.recipients.push(Recipient {
            actor: actor("a"),
            weight: 0.5,
        });
        let r = extract(&[msg(0, "a", "b"), reply]);
        assert_eq!(r.len(), 1);

        let pp = extract(&[msg(0, "a", "b"), msg(4, "b", "a"), msg(8, "a", "b"), msg(12, "b", "a")]);
        assert_eq!(
            pp.iter().map(|e| e.elapsed_hours()).collect::<Vec<_>>(),
            [4.0, 4.0, 4.0]
        );
    }

    #[test]
    fn rapid_response_examples() {
        let one = extract(&[msg(0, "a", "b"), msg(4, "b", "a")]);
        let rr = rapid_response(&one).unwrap();
        assert_eq!((rr.avg_response_time_hours, rr.avg_nudges), (4.0, 1.0));
        assert!((rr.responsiveness - 6.0 / 7.0).abs() < 1e-12);

        let two = extract(&[
            msg(0, "a", "b"),
            msg(4, "b", "a"),
            msg(100, "c", "d"),
            msg(124, "c", "d"),
            msg(130, "d", "c"),
        ]);
        let rr = rapid_response(&two).unwrap();
        assert_eq!(rr.avg_response_time_hours, 17.0);
        assert_eq!(rr.avg_nudges, 1.5);

        let instant = extract(&[msg(0, "a", "b"), msg(0, "a", "c"), msg(1, "c", "a")]);
        assert_eq!(instant.len(), 1);

        assert_eq!(rapid_response(&[]), Err(SignalError::NoResponses));
    }

    #[test]
    fn zero_delay_means_full_responsiveness() {
        let e = ResponseEvent {
            requester: actor("a"),
            responder: actor("b"),
            run_start: DateTime::UNIX_EPOCH,
            run_last: DateTime::UNIX_EPOCH,
            response_at: DateTime::UNIX_EPOCH,
            nudges: 1,
        };
        assert_eq!(rapid_response(&[e]).unwrap().responsiveness, 1.0);
    }
}
