//! Timestamp helpers shared by the parsers and the CSV formats.

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, TimeZone, Utc};

/// Second-precision UTC timestamp in the canonical CSV form, `2024-01-01T00:00:00Z`.
pub fn format_utc(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Parses an RFC 3339 timestamp and normalizes it to UTC.
///
/// A bare `YYYY-MM-DDTHH:MM:SS` (no offset) and a bare date are read as UTC.
pub fn parse_utc(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        return Some(Utc.from_utc_datetime(&naive));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|naive| Utc.from_utc_datetime(&naive))
}

/// Parses an RFC 5322 `Date:` header value. A missing zone is read as UTC.
pub fn parse_mail_date(raw: &str) -> Option<DateTime<Utc>> {
    // Trailing comments such as "(PDT)" carry no information beyond the offset.
    let mut s = raw.trim().to_string();
    while s.ends_with(')') {
        match s.rfind('(') {
            Some(open) => s.truncate(open),
            None => break,
        }
        s = s.trim_end().to_string();
    }
    let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if let Ok(dt) = DateTime::parse_from_rfc2822(&s) {
        return Some(dt.with_timezone(&Utc).with_nanosecond_zero());
    }
    let no_weekday = match s.split_once(',') {
        Some((_, rest)) => rest.trim(),
        None => s.as_str(),
    };
    for fmt in ["%d %b %Y %H:%M:%S", "%d %b %Y %H:%M", "%d %B %Y %H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(no_weekday, fmt) {
            return Some(Utc.from_utc_datetime(&naive));
        }
    }
    None
}

/// Midnight UTC at or before `ts`.
pub fn floor_day(ts: DateTime<Utc>) -> DateTime<Utc> {
    let d = ts.date_naive();
    Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight exists"))
}

/// First instant of the calendar month containing `ts`.
pub fn floor_month(ts: DateTime<Utc>) -> DateTime<Utc> {
    let d = NaiveDate::from_ymd_opt(ts.year(), ts.month(), 1).expect("first of month exists");
    Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight exists"))
}

/// First instant of the calendar month after the one containing `ts`.
pub fn next_month(ts: DateTime<Utc>) -> DateTime<Utc> {
    let (y, m) = if ts.month() == 12 {
        (ts.year() + 1, 1)
    } else {
        (ts.year(), ts.month() + 1)
    };
    let d = NaiveDate::from_ymd_opt(y, m, 1).expect("first of month exists");
    Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight exists"))
}

trait TruncateNanos {
    fn with_nanosecond_zero(self) -> Self;
}

impl TruncateNanos for DateTime<Utc> {
    fn with_nanosecond_zero(self) -> Self {
        chrono::Timelike::with_nanosecond(&self, 0).unwrap_or(self)
    }
}
